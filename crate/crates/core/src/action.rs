//! The action of `Z_r` on the cycle `C = {s(n), …, s(n + r − 1)}` by `j̄ ⊛ c = (j mod r) ∗ c`,
//! and discrete-log solvers for it.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::holomorph::Pair;
use crate::orbit::OrbitProfile;
use crate::platform::Element;

/// Largest period for which [`CycleAction::verify`] runs.
pub const MAX_VERIFY_PERIOD: u64 = 4096;

/// Periods up to this size get a precomputed `s(0..r)` table.
const S_TABLE_LIMIT: u64 = 1 << 16;

/// An element of `Z_r`, kept canonical in `[0, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    modulus: u64,
    value: u64,
}

impl ResidueClass {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Precondition("residue modulus must be positive".into()));
        }
        Ok(ResidueClass { modulus, value: value % modulus })
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn add(&self, other: &ResidueClass) -> Result<ResidueClass> {
        self.same_modulus(other)?;
        let v = (self.value as u128 + other.value as u128) % self.modulus as u128;
        Ok(ResidueClass { modulus: self.modulus, value: v as u64 })
    }

    pub fn neg(&self) -> ResidueClass {
        ResidueClass { modulus: self.modulus, value: (self.modulus - self.value) % self.modulus }
    }

    pub fn sub(&self, other: &ResidueClass) -> Result<ResidueClass> {
        self.add(&other.neg())
    }

    fn same_modulus(&self, other: &ResidueClass) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch { expected: self.modulus, found: other.modulus });
        }
        Ok(())
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// An element known to lie on the cycle. Its offset from `s(n)` is computed on demand.
#[derive(Debug, Clone)]
pub struct CyclePoint {
    element: Element,
    offset: OnceLock<u64>,
}

impl CyclePoint {
    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn into_element(self) -> Element {
        self.element
    }
}

impl PartialEq for CyclePoint {
    fn eq(&self, other: &Self) -> bool {
        self.element == other.element
    }
}

impl Eq for CyclePoint {}

/// GADLP solver choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadlpMethod {
    Brute,
    Bsgs,
    HiddenShift,
}

impl std::str::FromStr for GadlpMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(GadlpMethod::Brute),
            "bsgs" => Ok(GadlpMethod::Bsgs),
            "hidden-shift" => Ok(GadlpMethod::HiddenShift),
            other => Err(Error::Precondition(format!("unknown GADLP method `{other}`"))),
        }
    }
}

/// The action context: a base pair with its profile.
#[derive(Debug)]
pub struct CycleAction {
    pair: Pair,
    profile: OrbitProfile,
    s_table: Option<Vec<Element>>,
    queries: AtomicU64,
}

impl CycleAction {
    /// Trusts `profile` to be the true profile of `pair`; only the anchor is checked.
    pub fn new(pair: Pair, profile: OrbitProfile) -> Result<Self> {
        if profile.n == 0 || profile.r == 0 {
            return Err(Error::Precondition("profile needs n ≥ 1 and r ≥ 1".into()));
        }
        if pair.s_at(profile.n) != profile.cycle_anchor {
            return Err(Error::Precondition("cycle anchor is not s(n)".into()));
        }
        let s_table = (profile.r <= S_TABLE_LIMIT).then(|| {
            let mut table = Vec::with_capacity(profile.r as usize);
            let mut cur = pair.platform().identity();
            for _ in 0..profile.r {
                let next = pair.step(&cur);
                table.push(cur);
                cur = next;
            }
            table
        });
        let action = CycleAction { pair, profile, s_table, queries: AtomicU64::new(0) };
        if !action.is_on_cycle(&action.profile.cycle_anchor) {
            return Err(Error::Precondition("period does not fix the anchor".into()));
        }
        Ok(action)
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn profile(&self) -> &OrbitProfile {
        &self.profile
    }

    pub fn period(&self) -> u64 {
        self.profile.r
    }

    /// `star(r, a) = a`.
    pub fn is_on_cycle(&self, a: &Element) -> bool {
        self.act_raw(self.profile.r, a) == *a
    }

    /// Wraps `a` after checking cycle membership.
    pub fn point(&self, a: Element) -> Result<CyclePoint> {
        self.pair.platform().check(&a)?;
        if !self.is_on_cycle(&a) {
            return Err(Error::NotOnCycle);
        }
        Ok(CyclePoint { element: a, offset: OnceLock::new() })
    }

    /// `s(n + i mod r)`, with its offset already known.
    pub fn point_at(&self, i: u64) -> CyclePoint {
        let i = i % self.profile.r;
        let element = self.act_raw(i, &self.profile.cycle_anchor);
        let offset = OnceLock::new();
        let _ = offset.set(i);
        CyclePoint { element, offset }
    }

    /// Every cycle element, in order of offset.
    pub fn cycle_points(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.profile.r as usize);
        let mut cur = self.profile.cycle_anchor.clone();
        for _ in 0..self.profile.r {
            let next = self.pair.step(&cur);
            out.push(cur);
            cur = next;
        }
        out
    }

    /// The `i` with `c = s(n + i)`.
    pub fn offset(&self, c: &CyclePoint) -> u64 {
        *c.offset.get_or_init(|| {
            let anchor = CyclePoint { element: self.profile.cycle_anchor.clone(), offset: OnceLock::new() };
            self.bsgs(&anchor, c).expect("cycle points are reachable from the anchor").value
        })
    }

    pub(crate) fn act_raw(&self, j: u64, a: &Element) -> Element {
        match &self.s_table {
            Some(table) if j < self.profile.r => self.pair.star_with(j, &table[j as usize], a),
            _ => self.pair.star_at(j, a),
        }
    }

    /// `j̄ ⊛ c`.
    pub fn act(&self, j: &ResidueClass, c: &CyclePoint) -> Result<CyclePoint> {
        if j.modulus != self.profile.r {
            return Err(Error::ModulusMismatch { expected: self.profile.r, found: j.modulus });
        }
        self.pair.platform().check(&c.element)?;
        let element = self.act_raw(j.value, &c.element);
        let offset = OnceLock::new();
        if let Some(&o) = c.offset.get() {
            let _ = offset.set((o + j.value) % self.profile.r);
        }
        Ok(CyclePoint { element, offset })
    }

    fn class(&self, v: u64) -> ResidueClass {
        ResidueClass { modulus: self.profile.r, value: v % self.profile.r }
    }

    /// Exhaustive check of the action axioms.
    pub fn verify(&self) -> Result<ActionReport> {
        verify_action(self.profile.r, &self.cycle_points(), |j, a| self.act_raw(j, a))
    }

    /// Number of GADLP solves performed through [`CycleAction::gadlp`].
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// `δ(y, x)` with the chosen solver; counts one query.
    pub fn gadlp(&self, method: GadlpMethod, x: &CyclePoint, y: &CyclePoint) -> Result<ResidueClass> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        match method {
            GadlpMethod::Brute => self.gadlp_brute(x, y),
            GadlpMethod::Bsgs => self.gadlp_bsgs(x, y),
            GadlpMethod::HiddenShift => {
                let hs = self.build_hidden_shift(x, y)?;
                ahsp_collision_solve(|a| hs.f_a(a), |a| hs.f_b(a), self.profile.r)
            }
        }
    }

    fn check_pair(&self, x: &CyclePoint, y: &CyclePoint) -> Result<()> {
        self.pair.platform().check(&x.element)?;
        self.pair.platform().check(&y.element)
    }

    /// Scans `k = 0, 1, …` for `k̄ ⊛ x = y`.
    pub fn gadlp_brute(&self, x: &CyclePoint, y: &CyclePoint) -> Result<ResidueClass> {
        self.check_pair(x, y)?;
        (0..self.profile.r)
            .find(|&k| self.act_raw(k, &x.element) == y.element)
            .map(|k| self.class(k))
            .ok_or(Error::NotOnCycle)
    }

    /// Baby-step giant-step with `m = ⌈√r⌉`.
    pub fn gadlp_bsgs(&self, x: &CyclePoint, y: &CyclePoint) -> Result<ResidueClass> {
        self.check_pair(x, y)?;
        self.bsgs(x, y).ok_or(Error::NotOnCycle)
    }

    fn bsgs(&self, x: &CyclePoint, y: &CyclePoint) -> Option<ResidueClass> {
        let r = self.profile.r;
        let m = (r as f64).sqrt().ceil() as u64;
        let m = if m * m < r { m + 1 } else { m.max(1) };
        let mut baby: HashMap<Element, u64> = HashMap::with_capacity(m as usize);
        let mut cur = x.element.clone();
        for i in 0..m {
            baby.entry(cur.clone()).or_insert(i);
            cur = self.act_raw(1, &cur);
        }
        let giant = (r - m % r) % r;
        let mut cur = y.element.clone();
        for j in 0..=m {
            if let Some(&i) = baby.get(&cur) {
                return Some(self.class(i + m * j));
            }
            cur = self.act_raw(giant, &cur);
        }
        None
    }

    /// `f_A(ā) = ā ⊛ x` and `f_B(ā) = ā ⊛ y`, which hide `δ(y, x)`.
    pub fn build_hidden_shift(&self, x: &CyclePoint, y: &CyclePoint) -> Result<HiddenShift<'_>> {
        self.check_pair(x, y)?;
        Ok(HiddenShift { action: self, x: x.element.clone(), y: y.element.clone() })
    }

    /// `(g + h) ⊛ x` from `y = g ⊛ x` and `z = h ⊛ x`.
    pub fn gacdh_via_gadlp(
        &self,
        method: GadlpMethod,
        x: &CyclePoint,
        y: &CyclePoint,
        z: &CyclePoint,
    ) -> Result<CyclePoint> {
        let g = self.gadlp(method, x, y)?;
        self.act(&g, z)
    }
}

/// The pair of functions produced by [`CycleAction::build_hidden_shift`].
pub struct HiddenShift<'a> {
    action: &'a CycleAction,
    x: Element,
    y: Element,
}

impl HiddenShift<'_> {
    pub fn modulus(&self) -> u64 {
        self.action.profile.r
    }

    pub fn f_a(&self, a: u64) -> Element {
        self.action.act_raw(a % self.modulus(), &self.x)
    }

    pub fn f_b(&self, a: u64) -> Element {
        self.action.act_raw(a % self.modulus(), &self.y)
    }
}

/// Recovers `s̄` with `f_B(ā) = f_A(ā + s̄)` by tabulating `f_A` on all of `Z_r` and
/// scanning `f_B` for a collision.
pub fn ahsp_collision_solve<F, G>(f_a: F, f_b: G, r: u64) -> Result<ResidueClass>
where
    F: Fn(u64) -> Element,
    G: Fn(u64) -> Element,
{
    if r == 0 {
        return Err(Error::Precondition("group order must be positive".into()));
    }
    let table: HashMap<Element, u64> = (0..r).map(|b| (f_a(b), b)).collect();
    for a in 0..r {
        if let Some(&b) = table.get(&f_b(a)) {
            let shift = (b + r - a) % r;
            if f_b(0) != f_a(shift) {
                return Err(Error::NoHiddenShift);
            }
            return ResidueClass::new(shift, r);
        }
    }
    Err(Error::NoHiddenShift)
}

/// A failed action axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionFailure {
    Identity { point: u64 },
    Closure { j: u64, point: u64 },
    Compatibility { j: u64, point: u64 },
    Freeness { j: u64, point: u64 },
    Transitivity { from: u64, to: u64 },
}

impl fmt::Display for ActionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionFailure::Identity { point } => write!(f, "identity: 0 does not fix point {point}"),
            ActionFailure::Closure { j, point } => write!(f, "closure: {j} moves point {point} off the cycle"),
            ActionFailure::Compatibility { j, point } => {
                write!(f, "compatibility: (j+1) and j after 1 disagree at j={j}, point {point}")
            }
            ActionFailure::Freeness { j, point } => write!(f, "freeness: nonzero {j} fixes point {point}"),
            ActionFailure::Transitivity { from, to } => write!(f, "transitivity: point {from} never reaches {to}"),
        }
    }
}

/// Outcome of an exhaustive axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionReport {
    pub r: u64,
    pub failures: Vec<ActionFailure>,
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn has(&self, pred: impl Fn(&ActionFailure) -> bool) -> bool {
        self.failures.iter().any(pred)
    }

    pub fn identity_ok(&self) -> bool {
        !self.has(|f| matches!(f, ActionFailure::Identity { .. }))
    }

    pub fn compatibility_ok(&self) -> bool {
        !self.has(|f| matches!(f, ActionFailure::Compatibility { .. } | ActionFailure::Closure { .. }))
    }

    pub fn freeness_ok(&self) -> bool {
        !self.has(|f| matches!(f, ActionFailure::Freeness { .. }))
    }

    pub fn transitivity_ok(&self) -> bool {
        !self.has(|f| matches!(f, ActionFailure::Transitivity { .. }))
    }
}

impl fmt::Display for ActionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "period: {}", self.r)?;
        writeln!(f, "identity: {}", verdict(self.identity_ok()))?;
        writeln!(f, "compatibility: {}", verdict(self.compatibility_ok()))?;
        writeln!(f, "freeness: {}", verdict(self.freeness_ok()))?;
        writeln!(f, "transitivity: {}", verdict(self.transitivity_ok()))?;
        for w in &self.failures {
            writeln!(f, "witness: {w}")?;
        }
        Ok(())
    }
}

const WITNESS_LIMIT: usize = 4;

/// Checks the axioms of a `Z_r` action on `points` given by `act`, over all of
/// `Z_r × points`.
///
/// Compatibility is checked against the generator: `T_(j+1) = T_j ∘ T_1` for every `j`
/// (wrapping at `r`), which together with the identity axiom forces `T_j = T_1^j` and
/// hence `T_(j+k) = T_j ∘ T_k`.
pub fn verify_action<F>(r: u64, points: &[Element], act: F) -> Result<ActionReport>
where
    F: Fn(u64, &Element) -> Element,
{
    if r == 0 || r > MAX_VERIFY_PERIOD {
        return Err(Error::Precondition(format!("verify_action needs 1 ≤ r ≤ {MAX_VERIFY_PERIOD}")));
    }
    if points.len() as u64 != r {
        return Err(Error::Precondition(format!("{} points for a period of {r}", points.len())));
    }
    let ru = r as usize;
    let index: HashMap<&Element, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
    let mut failures: Vec<ActionFailure> = Vec::new();
    let mut counts = [0usize; 5];
    let mut push = |slot: usize, f: ActionFailure, failures: &mut Vec<ActionFailure>| {
        counts[slot] += 1;
        if counts[slot] <= WITNESS_LIMIT {
            failures.push(f);
        }
    };
    // table[j * r + i] = index of act(j, points[i]), or u32::MAX when it leaves the set.
    let mut table = vec![u32::MAX; ru * ru];
    for j in 0..ru {
        for (i, p) in points.iter().enumerate() {
            match index.get(&act(j as u64, p)) {
                Some(&t) => table[j * ru + i] = t,
                None => push(1, ActionFailure::Closure { j: j as u64, point: i as u64 }, &mut failures),
            }
        }
    }
    for (i, &t) in table[..ru].iter().enumerate() {
        if t != i as u32 {
            push(0, ActionFailure::Identity { point: i as u64 }, &mut failures);
        }
    }
    for j in 0..ru {
        let next = (j + 1) % ru;
        for i in 0..ru {
            let one = table[(1 % ru) * ru + i];
            let composed = if one == u32::MAX { u32::MAX } else { table[j * ru + one as usize] };
            if composed == u32::MAX || table[next * ru + i] != composed {
                push(2, ActionFailure::Compatibility { j: j as u64, point: i as u64 }, &mut failures);
            }
        }
    }
    for j in 1..ru {
        for i in 0..ru {
            if table[j * ru + i] == i as u32 {
                push(3, ActionFailure::Freeness { j: j as u64, point: i as u64 }, &mut failures);
            }
        }
    }
    let mut reached = vec![false; ru];
    for i in 0..ru {
        reached.iter_mut().for_each(|b| *b = false);
        for j in 0..ru {
            let t = table[j * ru + i];
            if t != u32::MAX {
                reached[t as usize] = true;
            }
        }
        if let Some(to) = reached.iter().position(|b| !b) {
            push(4, ActionFailure::Transitivity { from: i as u64, to: to as u64 }, &mut failures);
        }
    }
    Ok(ActionReport { r, failures })
}
