//! Index and period recovery for the orbit `X = {s(g, φ, x) : x ≥ 1}`.
//!
//! Exhaustive enumeration and Brent cycle detection on `a ↦ φ(a)·g` give the profile
//! classically. The quantum route simulates period finding at the amplitude level, then
//! bisects for the index.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::holomorph::Pair;
use crate::platform::Element;
use crate::quantum::{self, AmplitudeVector};

/// Largest simulated register size, `2^22`.
pub const MAX_QUBITS: u32 = 22;

/// Index and period, with the first cycle element `s(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitProfile {
    pub n: u64,
    pub r: u64,
    pub cycle_anchor: Element,
}

impl OrbitProfile {
    /// `|X| = n + r − 1`.
    pub fn total(&self) -> u64 {
        self.n + self.r - 1
    }
}

/// Enumerates `s(1), s(2), …` until the first repeat. Fails if no repeat occurs among
/// the first `cap` values.
pub fn brute_force_profile(pair: &Pair, cap: u64) -> Result<OrbitProfile> {
    let mut seen: HashMap<Element, u64> = HashMap::new();
    let mut cur = pair.g().clone();
    for j in 1..=cap {
        if let Some(&i) = seen.get(&cur) {
            let cycle_anchor = pair.s_at(i);
            return Ok(OrbitProfile { n: i, r: j - i, cycle_anchor });
        }
        let next = pair.step(&cur);
        seen.insert(cur, j);
        cur = next;
    }
    Err(Error::OrbitExceedsCap { cap })
}

/// Brent cycle detection from `g`. Always terminates since the platform is finite.
pub fn brent_profile(pair: &Pair) -> OrbitProfile {
    brent(pair, u64::MAX).expect("unbounded search cannot exceed its cap")
}

/// [`brent_profile`], giving up once the orbit is known to exceed `cap` elements.
pub fn brent_profile_within(pair: &Pair, cap: u64) -> Result<OrbitProfile> {
    brent(pair, cap)
}

fn brent(pair: &Pair, cap: u64) -> Result<OrbitProfile> {
    let step_limit = cap.saturating_mul(4).saturating_add(4);
    let x0 = pair.g().clone();
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut steps = 1u64;
    let mut tortoise = x0.clone();
    let mut hare = pair.step(&x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = pair.step(&hare);
        lam += 1;
        steps += 1;
        if steps > step_limit {
            return Err(Error::OrbitExceedsCap { cap });
        }
    }
    let mut tortoise = x0.clone();
    let mut hare = x0;
    for _ in 0..lam {
        hare = pair.step(&hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = pair.step(&tortoise);
        hare = pair.step(&hare);
        mu += 1;
    }
    let profile = OrbitProfile { n: mu + 1, r: lam, cycle_anchor: tortoise };
    if profile.n + profile.r > cap {
        return Err(Error::OrbitExceedsCap { cap });
    }
    Ok(profile)
}

/// Register size and retry policy for the simulated period finder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumRunConfig {
    pub qubits: u32,
    pub max_retries: u32,
    pub seed: u64,
}

impl QuantumRunConfig {
    /// The smallest register with `2^l ≥ N² + N`.
    pub fn for_bound(bound: u64, max_retries: u32, seed: u64) -> Result<Self> {
        let need = min_register(bound)?;
        let qubits = need.trailing_zeros();
        let cfg = QuantumRunConfig { qubits, max_retries, seed };
        cfg.validate(bound)?;
        Ok(cfg)
    }

    pub fn register_size(&self) -> u64 {
        1u64 << self.qubits
    }

    /// Requires `N² + N ≤ M ≤ 2^22` and at least one retry.
    pub fn validate(&self, bound: u64) -> Result<()> {
        if bound == 0 {
            return Err(Error::InvalidQuantumConfig("orbit bound must be positive".into()));
        }
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "register of {} qubits outside 1..={MAX_QUBITS}",
                self.qubits
            )));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidQuantumConfig("max_retries must be positive".into()));
        }
        let need = bound.checked_mul(bound).and_then(|b| b.checked_add(bound));
        match need {
            Some(need) if self.register_size() >= need => Ok(()),
            _ => Err(Error::InvalidQuantumConfig(format!("M = 2^{} is below N² + N for N = {bound}", self.qubits))),
        }
    }
}

fn min_register(bound: u64) -> Result<u64> {
    let need = bound
        .checked_mul(bound)
        .and_then(|b| b.checked_add(bound))
        .and_then(|b| b.checked_next_power_of_two())
        .ok_or_else(|| Error::InvalidQuantumConfig(format!("bound {bound} too large")))?;
    if need.trailing_zeros() > MAX_QUBITS {
        return Err(Error::InvalidQuantumConfig(format!("bound {bound} needs more than {MAX_QUBITS} qubits")));
    }
    Ok(need.max(2))
}

/// What the second-register measurement saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// A singleton class: a tail value, or the `k = 0` slot.
    Tail,
    /// A class with this many preimages.
    Cycle(usize),
}

/// One simulated run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialTrace {
    pub trial: u32,
    pub observed: Observation,
    pub measured: u64,
    pub candidates: Vec<u64>,
    pub result: Option<u64>,
}

impl fmt::Display for TrialTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let observed = match self.observed {
            Observation::Tail => "tail".to_string(),
            Observation::Cycle(size) => format!("cycle:{size}"),
        };
        let candidates: Vec<String> = self.candidates.iter().map(u64::to_string).collect();
        let result = self.result.map_or_else(|| "fail".to_string(), |r| r.to_string());
        write!(
            f,
            "trial={} observed={observed} measured={} candidates={} result={result}",
            self.trial,
            self.measured,
            candidates.join(",")
        )
    }
}

/// A completed recovery, with one trace per attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodRecovery {
    pub period: Option<u64>,
    pub traces: Vec<TrialTrace>,
}

impl PeriodRecovery {
    pub fn attempts(&self) -> u32 {
        self.traces.len() as u32
    }
}

/// Tabulated `k ↦ s(k)` on `0..M`, partitioned into preimage classes of the second
/// register. Slot `k = 0` forms its own class.
pub struct PeriodFinder<'a> {
    pair: &'a Pair,
    cfg: QuantumRunConfig,
    bound: u64,
    class_of: Vec<u32>,
    offsets: Vec<usize>,
    members: Vec<u32>,
    s_m: Element,
}

impl<'a> PeriodFinder<'a> {
    pub fn new(pair: &'a Pair, cfg: QuantumRunConfig, bound: u64) -> Result<Self> {
        cfg.validate(bound)?;
        let m = cfg.register_size() as usize;
        let mut ids: HashMap<Element, u32> = HashMap::new();
        let mut class_of = Vec::with_capacity(m);
        class_of.push(0u32);
        let mut next_id = 1u32;
        let mut cur = pair.g().clone();
        for _ in 1..m {
            let id = *ids.entry(cur.clone()).or_insert_with(|| {
                next_id += 1;
                next_id - 1
            });
            class_of.push(id);
            cur = pair.step(&cur);
        }
        let s_m = cur;
        let classes = next_id as usize;
        let mut offsets = vec![0usize; classes + 1];
        for &c in &class_of {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..classes {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0u32; m];
        for (k, &c) in class_of.iter().enumerate() {
            members[fill[c as usize]] = k as u32;
            fill[c as usize] += 1;
        }
        Ok(PeriodFinder { pair, cfg, bound, class_of, offsets, members, s_m })
    }

    pub fn register_size(&self) -> u64 {
        self.cfg.register_size()
    }

    pub fn class_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Register values sharing class `c`, in increasing order.
    pub fn class_members(&self, c: usize) -> &[u32] {
        &self.members[self.offsets[c]..self.offsets[c + 1]]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `star(d, s(M)) = s(M)`.
    pub fn verify(&self, d: u64) -> bool {
        d > 0 && self.pair.star_at(d, &self.s_m) == self.s_m
    }

    /// Convergent denominators of `measured/M` within the bound.
    pub fn candidates_for(&self, measured: u64) -> Vec<u64> {
        quantum::continued_fraction_denominators(measured, self.register_size(), self.bound)
    }

    /// The smallest verified candidate, reduced to the least verified divisor.
    pub fn resolve(&self, candidates: &[u64]) -> Option<u64> {
        let d = candidates.iter().copied().filter(|&d| self.verify(d)).min()?;
        Some(self.reduce(d))
    }

    fn reduce(&self, mut d: u64) -> u64 {
        for p in prime_factors(d) {
            while d.is_multiple_of(p) && self.verify(d / p) {
                d /= p;
            }
        }
        d
    }

    /// The post-DFT first register after observing class `c`.
    pub fn transformed_state(&self, c: usize) -> Result<AmplitudeVector> {
        let support: Vec<usize> = self.class_members(c).iter().map(|&k| k as usize).collect();
        quantum::dft(&quantum::support_state(&support, self.register_size() as usize)?)
    }

    /// One independent run on random stream `trial`.
    pub fn trial(&self, trial: u32) -> Result<TrialTrace> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(trial as u64);
        self.trial_with(trial, &mut rng)
    }

    fn trial_with(&self, trial: u32, rng: &mut ChaCha8Rng) -> Result<TrialTrace> {
        use rand::Rng;
        let m = self.register_size();
        // The second register reads class c with probability |class c| / M.
        let k = rng.gen_range(0..m) as usize;
        let c = self.class_of[k] as usize;
        let size = self.offsets[c + 1] - self.offsets[c];
        let observed = if size == 1 { Observation::Tail } else { Observation::Cycle(size) };
        let state = self.transformed_state(c)?;
        let measured = quantum::sample(&state, rng) as u64;
        let candidates = self.candidates_for(measured);
        let result = self.resolve(&candidates);
        Ok(TrialTrace { trial, observed, measured, candidates, result })
    }

    /// Runs trials until one verifies, pooling candidates across attempts and checking
    /// pairwise least common multiples within the bound.
    pub fn recover(&self) -> Result<PeriodRecovery> {
        let mut pool: BTreeSet<u64> = BTreeSet::new();
        let mut traces = Vec::new();
        for i in 0..self.cfg.max_retries {
            let mut trace = self.trial(i)?;
            if trace.result.is_none() {
                pool.extend(trace.candidates.iter().copied());
                trace.result = self.resolve_pool(&pool);
            }
            let period = trace.result;
            traces.push(trace);
            if period.is_some() {
                return Ok(PeriodRecovery { period, traces });
            }
        }
        Ok(PeriodRecovery { period: None, traces })
    }

    fn resolve_pool(&self, pool: &BTreeSet<u64>) -> Option<u64> {
        let items: Vec<u64> = pool.iter().copied().collect();
        let mut lcms = Vec::new();
        for (i, &a) in items.iter().enumerate() {
            for &b in &items[i + 1..] {
                let l = a / gcd(a, b) * b;
                if l <= self.bound {
                    lcms.push(l);
                }
            }
        }
        self.resolve(&lcms)
    }
}

/// Simulated period finding with retries; `Err(PeriodRecoveryFailed)` when every attempt fails.
pub fn period_recovery_sim(pair: &Pair, cfg: QuantumRunConfig, bound: u64) -> Result<PeriodRecovery> {
    let finder = PeriodFinder::new(pair, cfg, bound)?;
    let run = finder.recover()?;
    if run.period.is_none() {
        return Err(Error::PeriodRecoveryFailed { attempts: run.attempts() });
    }
    Ok(run)
}

/// Result of [`binary_search_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexSearch {
    pub index: u64,
    /// Bisection probes, each one `s` evaluation plus one `∗`.
    pub probes: u32,
}

fn on_cycle(pair: &Pair, r: u64, x: u64) -> bool {
    let s = pair.s_at(x);
    pair.star_at(r, &s) == s
}

/// The least `n` in `[start, end]` with `star(r, s(n)) = s(n)`, by bisection.
pub fn binary_search_index(pair: &Pair, start: u64, end: u64, r: u64) -> Result<IndexSearch> {
    if start == 0 || start > end || r == 0 {
        return Err(Error::Precondition(format!("bad search range [{start}, {end}] with r={r}")));
    }
    let (mut left, mut right) = (start, end);
    let mut probes = 0u32;
    while left < right {
        let mid = left + (right - left) / 2;
        probes += 1;
        if on_cycle(pair, r, mid) {
            right = mid;
        } else {
            left = mid + 1;
        }
    }
    let minimal = on_cycle(pair, r, left) && (left == 1 || !on_cycle(pair, r, left - 1));
    if !minimal {
        return Err(Error::Precondition(format!("index search post-check failed at {left}; range or period is wrong")));
    }
    Ok(IndexSearch { index: left, probes })
}

/// For a tail element `target = s(x)`, the least `t ∈ [0, n]` with `t ∗ target` on the
/// cycle, so that `x = n − t`. Cycle inputs give `t = 0`.
pub fn binary_search_tail(pair: &Pair, target: &Element, n: u64, r: u64) -> Result<u64> {
    pair.platform().check(target)?;
    let hit = |t: u64| {
        let a = pair.star_at(t, target);
        pair.star_at(r, &a) == a
    };
    let (mut left, mut right) = (0u64, n);
    if !hit(right) {
        return Err(Error::Precondition("target does not reach the cycle within n steps".into()));
    }
    while left < right {
        let mid = left + (right - left) / 2;
        if hit(mid) {
            right = mid;
        } else {
            left = mid + 1;
        }
    }
    Ok(left)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            out.push(p);
            while d.is_multiple_of(p) {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn designed_profiles() {
        for f in fixtures::all() {
            let brute = brute_force_profile(&f.pair, 10_000).unwrap();
            assert_eq!(brent_profile(&f.pair), brute, "{}", f.name);
            if let Some((n, r)) = f.designed {
                assert_eq!((brute.n, brute.r), (n, r), "{}", f.name);
            }
            assert_eq!(brute.cycle_anchor, f.pair.s_eval(brute.n).unwrap());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let pair = fixtures::tail_n3_r2();
        assert!(brute_force_profile(&pair, 5).is_ok());
        assert_eq!(brute_force_profile(&pair, 4), Err(Error::OrbitExceedsCap { cap: 4 }));
        assert!(brent_profile_within(&pair, 4).is_err());
        assert!(brent_profile_within(&pair, 5).is_ok());
    }

    #[test]
    fn register_sizing() {
        let cfg = QuantumRunConfig::for_bound(6, 5, 0).unwrap();
        assert_eq!(cfg.register_size(), 64);
        assert!(QuantumRunConfig { qubits: 5, max_retries: 1, seed: 0 }.validate(6).is_err());
        assert!(QuantumRunConfig::for_bound(5000, 1, 0).is_err());
    }

    #[test]
    fn classes_partition_register() {
        let pair = fixtures::tail_n3_r2();
        let finder = PeriodFinder::new(&pair, QuantumRunConfig::for_bound(5, 1, 0).unwrap(), 5).unwrap();
        let sizes = finder.class_sizes();
        assert_eq!(sizes.iter().sum::<usize>() as u64, finder.register_size());
        // k = 0, s(1), s(2) are singletons; the two cycle classes split the rest.
        assert_eq!(&sizes[..3], &[1, 1, 1]);
        assert_eq!(sizes.len(), 5);
    }

    #[test]
    fn every_outcome_resolves_to_period_or_nothing() {
        let pair = fixtures::tail_n3_r2();
        let finder = PeriodFinder::new(&pair, QuantumRunConfig::for_bound(5, 1, 0).unwrap(), 5).unwrap();
        let mut hits = 0;
        for a in 0..finder.register_size() {
            if let Some(d) = finder.resolve(&finder.candidates_for(a)) {
                assert_eq!(d, 2);
                hits += 1;
            }
        }
        assert!(hits > 0);
        assert!(!finder.verify(1));
        assert!(finder.verify(4));
    }

    #[test]
    fn recovery_finds_period() {
        for f in fixtures::all().into_iter().filter(|f| f.designed.is_some_and(|(n, r)| n + r <= 32)) {
            let (n, r) = f.designed.unwrap();
            let cfg = QuantumRunConfig::for_bound(n + r, 20, 7).unwrap();
            let run = period_recovery_sim(&f.pair, cfg, n + r).unwrap();
            assert_eq!(run.period, Some(r), "{}", f.name);
        }
    }

    #[test]
    fn trace_format() {
        let t = TrialTrace {
            trial: 3,
            observed: Observation::Cycle(12),
            measured: 40,
            candidates: vec![1, 2],
            result: Some(2),
        };
        assert_eq!(t.to_string(), "trial=3 observed=cycle:12 measured=40 candidates=1,2 result=2");
    }

    #[test]
    fn index_search() {
        let pair = fixtures::tail_n3_r2();
        assert_eq!(binary_search_index(&pair, 1, 16, 2).unwrap().index, 3);
        let u = fixtures::unipotent_z5();
        assert_eq!(binary_search_index(&u, 1, 64, 5).unwrap().index, 1);
        assert!(binary_search_index(&pair, 4, 16, 2).is_err());
        assert!(binary_search_index(&pair, 0, 16, 2).is_err());
    }

    #[test]
    fn tail_search() {
        let pair = fixtures::tail_n3_r2();
        assert_eq!(binary_search_tail(&pair, &pair.s_eval(1).unwrap(), 3, 2).unwrap(), 2);
        assert_eq!(binary_search_tail(&pair, &pair.s_eval(2).unwrap(), 3, 2).unwrap(), 1);
        assert_eq!(binary_search_tail(&pair, &pair.s_eval(4).unwrap(), 3, 2).unwrap(), 0);
    }

    #[test]
    fn factorization() {
        assert_eq!(prime_factors(60), vec![2, 3, 5]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(97), vec![97]);
    }
}
