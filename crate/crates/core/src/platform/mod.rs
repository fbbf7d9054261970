//! Finite semigroup platforms with a public endomorphism.
//!
//! Two concrete families are provided: Cayley tables (small, fully enumerable, used as
//! exhaustive oracles) and `d×d` matrices over `Z_m` or `GF(p^k)`. Elements carry a
//! canonical fixed-width payload; two elements of one platform are equal exactly when
//! their payloads are byte-identical.

mod cayley;
mod endo;
mod matrix;
mod ring;

use std::fmt;

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use cayley::{CayleyTable, MAX_CAYLEY_SIZE};
pub use endo::{EndoTable, Endomorphism};
pub use matrix::{MatrixSemigroup, MAX_ENUMERABLE_MATRICES};
pub use ring::{GaloisField, Ring, MAX_FIELD_ORDER};

/// Associativity is checked over all triples only up to this many elements.
pub const MAX_EXHAUSTIVE_ASSOCIATIVITY: u64 = 256;

/// Stable identifier derived from a platform's defining data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlatformId(pub u64);

/// An element of some platform: its canonical payload bytes plus the platform tag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    platform: PlatformId,
    payload: SmallVec<[u8; 24]>,
}

impl Element {
    pub(crate) fn from_parts(platform: PlatformId, payload: &[u8]) -> Self {
        Element { platform, payload: SmallVec::from_slice(payload) }
    }

    pub fn platform_id(&self) -> PlatformId {
        self.platform
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Canonical byte encoding (the payload).
    pub fn encode(&self) -> Vec<u8> {
        self.payload.to_vec()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.payload)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.to_hex())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Platform {
    Cayley(CayleyTable),
    Matrix(MatrixSemigroup),
}

impl Platform {
    pub fn id(&self) -> PlatformId {
        match self {
            Platform::Cayley(t) => t.id(),
            Platform::Matrix(m) => m.id(),
        }
    }

    pub fn cayley(&self) -> Option<&CayleyTable> {
        match self {
            Platform::Cayley(t) => Some(t),
            Platform::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&MatrixSemigroup> {
        match self {
            Platform::Matrix(m) => Some(m),
            Platform::Cayley(_) => None,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Platform::Cayley(t) => t.element_unchecked(t.identity_index()),
            Platform::Matrix(m) => m.element_unchecked(&m.identity_entries()),
        }
    }

    /// Crude bound on the size of any orbit: the platform size unless overridden.
    pub fn size_bound(&self) -> u64 {
        match self {
            Platform::Cayley(t) => t.size() as u64,
            Platform::Matrix(m) => m.size_bound(),
        }
    }

    pub fn is_enumerable(&self) -> bool {
        match self {
            Platform::Cayley(_) => true,
            Platform::Matrix(m) => m.is_enumerable(),
        }
    }

    /// Exact element count when known and representable.
    pub fn element_count(&self) -> Option<u64> {
        match self {
            Platform::Cayley(t) => Some(t.size() as u64),
            Platform::Matrix(m) => m.element_count(),
        }
    }

    /// Every element, when the platform is enumerable.
    pub fn elements(&self) -> Option<Vec<Element>> {
        match self {
            Platform::Cayley(t) => Some((0..t.size()).map(|i| t.element_unchecked(i)).collect()),
            Platform::Matrix(m) => m.enumerate(),
        }
    }

    pub fn payload_width(&self) -> usize {
        match self {
            Platform::Cayley(t) => t.width(),
            Platform::Matrix(m) => m.payload_width(),
        }
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        if a.platform_id() == self.id() {
            Ok(())
        } else {
            Err(Error::PlatformMismatch)
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        match self {
            Platform::Cayley(t) => t.element_unchecked(t.product(t.index_of(a), t.index_of(b))),
            Platform::Matrix(m) => {
                let prod = m.mul_entries(&m.entries(a), &m.entries(b));
                m.element_unchecked(&prod)
            }
        }
    }

    /// `a^k` with `a^0` the identity.
    pub(crate) fn pow_unchecked(&self, a: &Element, mut k: u64) -> Element {
        let mut acc = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul_unchecked(&base, &base);
            }
        }
        acc
    }

    pub fn pow(&self, a: &Element, k: u64) -> Result<Element> {
        self.check(a)?;
        Ok(self.pow_unchecked(a, k))
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<Element> {
        match self {
            Platform::Cayley(t) => t.decode(bytes),
            Platform::Matrix(m) => m.decode(bytes),
        }
    }

    pub fn element_from_hex(&self, text: &str) -> Result<Element> {
        let bytes = hex::decode(text.trim()).map_err(|e| Error::Decode(format!("bad hex: {e}")))?;
        self.decode(&bytes)
    }

    /// Two-sided inverse of `h`, if one exists.
    pub fn unit_inverse(&self, h: &Element) -> Result<Option<Element>> {
        self.check(h)?;
        match self {
            Platform::Matrix(m) => m.inverse(h),
            Platform::Cayley(t) => {
                let id = t.identity_index();
                let hi = t.index_of(h);
                Ok((0..t.size())
                    .find(|&b| t.product(hi, b) == id && t.product(b, hi) == id)
                    .map(|b| t.element_unchecked(b)))
            }
        }
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> Element {
        match self {
            Platform::Cayley(t) => t.element_unchecked(rng.gen_range(0..t.size())),
            Platform::Matrix(m) => m.element_unchecked(&m.random_entries(rng)),
        }
    }

    /// Exhaustive commutativity check; `None` when the platform is not enumerable.
    pub fn is_commutative(&self) -> Option<bool> {
        let all = self.elements()?;
        Some(
            all.iter()
                .enumerate()
                .all(|(i, a)| all[i + 1..].iter().all(|b| self.mul_unchecked(a, b) == self.mul_unchecked(b, a))),
        )
    }

    /// Single-line configuration string (see [`Platform::parse_config`]).
    pub fn config_string(&self) -> String {
        match self {
            Platform::Cayley(t) => {
                let entries: Vec<String> = t.table().iter().map(u32::to_string).collect();
                format!("cayley n={} identity={} table={}", t.size(), t.identity_index(), entries.join(","))
            }
            Platform::Matrix(m) => {
                let mut s = match m.ring() {
                    Ring::Modular { modulus } => format!("matrix d={} m={modulus}", m.dim()),
                    Ring::Galois(f) => {
                        format!("matrix d={} m={} ext={}", m.dim(), f.characteristic(), m.ring().degree())
                    }
                };
                if m.size_bound() != m.element_count().unwrap_or(u64::MAX) {
                    s.push_str(&format!(" bound={}", m.size_bound()));
                }
                s
            }
        }
    }

    /// Parses `matrix d=<dim> m=<modulus> [ext=<k>] [bound=<N>]` or
    /// `cayley n=<size> identity=<index> table=<row-major comma-separated indices>`.
    /// Unknown keys are rejected.
    pub fn parse_config(text: &str) -> Result<Self> {
        let (platform, rest) = Platform::parse_config_with_extras(text)?;
        if let Some((k, _)) = rest.first() {
            return Err(Error::InvalidPlatform(format!("unknown platform key `{k}`")));
        }
        Ok(platform)
    }

    /// Like [`Platform::parse_config`], returning unrecognised `key=value` pairs instead of
    /// rejecting them (platform files carry endomorphism settings on the same line).
    pub(crate) fn parse_config_with_extras(text: &str) -> Result<(Self, Vec<(String, String)>)> {
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::InvalidPlatform("empty platform config".into()))?;
        let fields = key_values(words)?;
        let mut rest = Vec::new();
        let num = |v: &str, key: &str| -> Result<u64> {
            v.parse::<u64>().map_err(|_| Error::InvalidPlatform(format!("bad value for `{key}`: {v}")))
        };
        match kind {
            "matrix" => {
                let (mut d, mut m, mut ext, mut bound) = (None, None, 1u64, None);
                for (k, v) in fields {
                    match k.as_str() {
                        "d" => d = Some(num(&v, "d")?),
                        "m" => m = Some(num(&v, "m")?),
                        "ext" => ext = num(&v, "ext")?,
                        "bound" => bound = Some(num(&v, "bound")?),
                        _ => rest.push((k, v)),
                    }
                }
                let d = d.ok_or_else(|| Error::InvalidPlatform("matrix config missing `d`".into()))?;
                let m = m.ok_or_else(|| Error::InvalidPlatform("matrix config missing `m`".into()))?;
                let m = u32::try_from(m).map_err(|_| Error::InvalidPlatform("modulus too large".into()))?;
                let ring = if ext == 1 {
                    Ring::modular(m)?
                } else {
                    let ext = u32::try_from(ext).map_err(|_| Error::InvalidPlatform("bad ext".into()))?;
                    Ring::galois(m, ext)?
                };
                let mut sg = MatrixSemigroup::new(d as usize, ring)?;
                if let Some(b) = bound {
                    sg = sg.with_size_bound(b);
                }
                Ok((Platform::Matrix(sg), rest))
            }
            "cayley" => {
                let (mut n, mut identity, mut table) = (None, None, None);
                for (k, v) in fields {
                    match k.as_str() {
                        "n" => n = Some(num(&v, "n")?),
                        "identity" => identity = Some(num(&v, "identity")?),
                        "table" => {
                            table = Some(
                                v.split(',')
                                    .map(|x| x.parse::<u32>())
                                    .collect::<std::result::Result<Vec<_>, _>>()
                                    .map_err(|_| Error::InvalidPlatform("bad table entry".into()))?,
                            )
                        }
                        _ => rest.push((k, v)),
                    }
                }
                let n = n.ok_or_else(|| Error::InvalidPlatform("cayley config missing `n`".into()))?;
                let identity = identity.unwrap_or(0);
                let table = table.ok_or_else(|| Error::InvalidPlatform("cayley config missing `table`".into()))?;
                let n = u32::try_from(n).map_err(|_| Error::InvalidPlatform("size too large".into()))?;
                Ok((Platform::Cayley(CayleyTable::new(n, identity as u32, table)?), rest))
            }
            other => Err(Error::InvalidPlatform(format!("unknown platform kind `{other}`"))),
        }
    }
}

/// Splits `key=value` words.
pub(crate) fn key_values<'a>(words: impl Iterator<Item = &'a str>) -> Result<Vec<(String, String)>> {
    words
        .map(|w| {
            w.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::InvalidPlatform(format!("expected key=value, found `{w}`")))
        })
        .collect()
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// A law violation found by [`validate_platform`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawFailure {
    Associativity {
        a: Element,
        b: Element,
        c: Element,
    },
    LeftIdentity {
        a: Element,
    },
    RightIdentity {
        a: Element,
    },
    Homomorphism {
        a: Element,
        b: Element,
    },
    /// Inner descriptor whose conjugators do not multiply to the identity.
    ConjugatorNotInverse,
    Descriptor(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// True when every law was checked over all elements rather than by sampling.
    pub exhaustive: bool,
    pub triples_checked: u64,
    pub pairs_checked: u64,
    pub failures: Vec<LawFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn associativity_ok(&self) -> bool {
        !self.failures.iter().any(|f| matches!(f, LawFailure::Associativity { .. }))
    }

    pub fn identity_ok(&self) -> bool {
        !self.failures.iter().any(|f| matches!(f, LawFailure::LeftIdentity { .. } | LawFailure::RightIdentity { .. }))
    }

    pub fn homomorphism_ok(&self) -> bool {
        !self.failures.iter().any(|f| {
            matches!(f, LawFailure::Homomorphism { .. } | LawFailure::ConjugatorNotInverse | LawFailure::Descriptor(_))
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if self.exhaustive { "exhaustive" } else { "sampled" };
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "mode={mode} triples={} pairs={}", self.triples_checked, self.pairs_checked)?;
        writeln!(f, "associativity={}", verdict(self.associativity_ok()))?;
        writeln!(f, "identity={}", verdict(self.identity_ok()))?;
        writeln!(f, "homomorphism={}", verdict(self.homomorphism_ok()))?;
        for failure in &self.failures {
            match failure {
                LawFailure::Associativity { a, b, c } => writeln!(f, "witness associativity a={a} b={b} c={c}")?,
                LawFailure::LeftIdentity { a } => writeln!(f, "witness left-identity a={a}")?,
                LawFailure::RightIdentity { a } => writeln!(f, "witness right-identity a={a}")?,
                LawFailure::Homomorphism { a, b } => writeln!(f, "witness homomorphism a={a} b={b}")?,
                LawFailure::ConjugatorNotInverse => writeln!(f, "witness conjugator-not-inverse")?,
                LawFailure::Descriptor(msg) => writeln!(f, "witness descriptor {msg}")?,
            }
        }
        Ok(())
    }
}

/// Most witnesses recorded per law.
const MAX_WITNESSES: usize = 4;

/// Checks the monoid laws of `platform` and the homomorphism law of `endo`.
///
/// Enumerable platforms are checked over every element (associativity over every triple
/// up to [`MAX_EXHAUSTIVE_ASSOCIATIVITY`] elements); otherwise `samples` random triples
/// and pairs are drawn from `rng`.
pub fn validate_platform(
    platform: &Platform,
    endo: &Endomorphism,
    samples: u64,
    rng: &mut impl Rng,
) -> ValidationReport {
    let mut failures = Vec::new();
    match endo {
        Endomorphism::Inner { h, h_inv } => {
            if platform.check(h).is_err() || platform.check(h_inv).is_err() {
                failures.push(LawFailure::Descriptor("conjugator from another platform".into()));
            } else {
                let id = platform.identity();
                if platform.mul_unchecked(h, h_inv) != id || platform.mul_unchecked(h_inv, h) != id {
                    failures.push(LawFailure::ConjugatorNotInverse);
                }
            }
        }
        other => {
            if let Err(e) = other.check(platform) {
                failures.push(LawFailure::Descriptor(e.to_string()));
            }
        }
    }
    let endo_usable = !failures.iter().any(|f| matches!(f, LawFailure::Descriptor(_)));

    let id = platform.identity();
    let all = platform.elements();
    let exhaustive_assoc = all.as_ref().is_some_and(|v| v.len() as u64 <= MAX_EXHAUSTIVE_ASSOCIATIVITY);
    let mut triples = 0u64;
    let mut pairs = 0u64;

    let mut assoc = Vec::new();
    let mut check_triple = |a: &Element, b: &Element, c: &Element| {
        triples += 1;
        let left = platform.mul_unchecked(&platform.mul_unchecked(a, b), c);
        let right = platform.mul_unchecked(a, &platform.mul_unchecked(b, c));
        if left != right && assoc.len() < MAX_WITNESSES {
            assoc.push(LawFailure::Associativity { a: a.clone(), b: b.clone(), c: c.clone() });
        }
    };
    match &all {
        Some(all) if exhaustive_assoc => {
            for a in all {
                for b in all {
                    for c in all {
                        check_triple(a, b, c);
                    }
                }
            }
        }
        _ => {
            for _ in 0..samples {
                let a = platform.random_element(rng);
                let b = platform.random_element(rng);
                let c = platform.random_element(rng);
                check_triple(&a, &b, &c);
            }
        }
    }
    failures.extend(assoc);

    let mut check_identity = |a: &Element| {
        if platform.mul_unchecked(&id, a) != *a {
            failures.push(LawFailure::LeftIdentity { a: a.clone() });
        }
        if platform.mul_unchecked(a, &id) != *a {
            failures.push(LawFailure::RightIdentity { a: a.clone() });
        }
    };
    match &all {
        Some(all) => all.iter().for_each(&mut check_identity),
        None => {
            for _ in 0..samples {
                let a = platform.random_element(rng);
                check_identity(&a);
            }
        }
    }

    if endo_usable {
        let mut hom = Vec::new();
        let mut check_pair = |a: &Element, b: &Element| {
            pairs += 1;
            let lhs = endo.apply_unchecked(platform, 1, &platform.mul_unchecked(a, b));
            let rhs =
                platform.mul_unchecked(&endo.apply_unchecked(platform, 1, a), &endo.apply_unchecked(platform, 1, b));
            if lhs != rhs && hom.len() < MAX_WITNESSES {
                hom.push(LawFailure::Homomorphism { a: a.clone(), b: b.clone() });
            }
        };
        match &all {
            Some(all) => {
                for a in all {
                    for b in all {
                        check_pair(a, b);
                    }
                }
            }
            None => {
                // The identity pair exposes bad conjugator pairs directly.
                check_pair(&id, &id);
                for _ in 0..samples {
                    let a = platform.random_element(rng);
                    let b = platform.random_element(rng);
                    check_pair(&a, &b);
                }
            }
        }
        failures.extend(hom);
    }

    failures.sort_by_key(|f| match f {
        LawFailure::Descriptor(_) | LawFailure::ConjugatorNotInverse => 0,
        LawFailure::Associativity { .. } => 1,
        LawFailure::LeftIdentity { .. } | LawFailure::RightIdentity { .. } => 2,
        LawFailure::Homomorphism { .. } => 3,
    });
    ValidationReport {
        exhaustive: all.is_some() && exhaustive_assoc,
        triples_checked: triples,
        pairs_checked: pairs,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z6() -> Platform {
        Platform::Cayley(CayleyTable::from_fn(6, 0, |a, b| (a + b) % 6).unwrap())
    }

    #[test]
    fn identity_laws_and_matrix_product() {
        let p = Platform::parse_config("matrix d=2 m=5").unwrap();
        let u = p.decode(&[1, 1, 0, 1]).unwrap();
        assert_eq!(p.mul(&p.identity(), &u).unwrap(), u);
        assert_eq!(p.mul(&u, &p.identity()).unwrap(), u);
        assert_eq!(p.mul(&u, &u).unwrap().payload(), &[1, 2, 0, 1]);
        assert_eq!(p.identity().payload(), &[1, 0, 0, 1]);
    }

    #[test]
    fn platform_mismatch_is_rejected() {
        let a = Platform::parse_config("matrix d=2 m=5").unwrap();
        let b = Platform::parse_config("matrix d=2 m=7").unwrap();
        assert_eq!(a.mul(&a.identity(), &b.identity()), Err(Error::PlatformMismatch));
    }

    #[test]
    fn valid_cayley_passes_exhaustively() {
        let p = z6();
        let phi = Endomorphism::table(vec![0, 5, 4, 3, 2, 1]); // negation
        let report = validate_platform(&p, &phi, 0, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(report.passed(), "{report}");
        assert!(report.exhaustive);
        assert_eq!(report.triples_checked, 216);
        assert_eq!(report.pairs_checked, 36);
    }

    #[test]
    fn corrupted_entry_yields_associativity_witness() {
        let Platform::Cayley(t) = z6() else { unreachable!() };
        let bad = Platform::Cayley(t.with_entry(2, 3, 1).unwrap());
        let phi = Endomorphism::table((0..6).collect());
        let report = validate_platform(&bad, &phi, 0, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(!report.associativity_ok());
        let Some(LawFailure::Associativity { a, b, c }) =
            report.failures.iter().find(|f| matches!(f, LawFailure::Associativity { .. }))
        else {
            panic!("no witness")
        };
        let idx = |e: &Element| e.payload()[0] as u32;
        let (a, b, c) = (idx(a), idx(b), idx(c));
        // The witness must route through the corrupted product (2,3).
        let ab = bad.cayley().unwrap().product(a, b);
        let bc = bad.cayley().unwrap().product(b, c);
        assert!((a, b) == (2, 3) || (b, c) == (2, 3) || (ab, c) == (2, 3) || (a, bc) == (2, 3));
    }

    #[test]
    fn non_homomorphism_table_is_reported() {
        let p = z6();
        let phi = Endomorphism::table(vec![0, 2, 1, 3, 4, 5]);
        let report = validate_platform(&p, &phi, 0, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(report.associativity_ok());
        assert!(!report.homomorphism_ok());
    }

    #[test]
    fn non_inverse_conjugator_pair_is_reported() {
        let p = Platform::parse_config("matrix d=3 m=101").unwrap();
        let m = p.matrix().unwrap();
        let h = m.element(&[1, 1, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        let phi = Endomorphism::Inner { h: h.clone(), h_inv: h };
        let report = validate_platform(&p, &phi, 50, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(!report.exhaustive);
        assert!(report.failures.contains(&LawFailure::ConjugatorNotInverse));
        assert!(report.failures.iter().any(|f| matches!(f, LawFailure::Homomorphism { .. })));
    }

    #[test]
    fn sampled_matrix_validation_passes() {
        let p = Platform::parse_config("matrix d=3 m=101").unwrap();
        let h = p.matrix().unwrap().element(&[0, 1, 0, 0, 0, 1, 1, 0, 0]).unwrap();
        let phi = Endomorphism::inner(&p, h).unwrap();
        let report = validate_platform(&p, &phi, 200, &mut ChaCha8Rng::seed_from_u64(4));
        assert!(report.passed(), "{report}");
        assert_eq!(report.triples_checked, 200);
    }

    #[test]
    fn config_round_trip() {
        for cfg in ["matrix d=2 m=5", "matrix d=2 m=2 ext=2", "matrix d=3 m=101 bound=1000"] {
            assert_eq!(Platform::parse_config(cfg).unwrap().config_string(), cfg);
        }
        let c = z6();
        assert_eq!(Platform::parse_config(&c.config_string()).unwrap(), c);
        assert!(Platform::parse_config("matrix d=2").is_err());
        assert!(Platform::parse_config("matrix d=2 m=5 colour=red").is_err());
        assert!(Platform::parse_config("torus n=3").is_err());
    }

    #[test]
    fn commutativity_detection() {
        assert_eq!(z6().is_commutative(), Some(true));
        assert_eq!(Platform::parse_config("matrix d=2 m=2").unwrap().is_commutative(), Some(false));
        assert_eq!(Platform::parse_config("matrix d=3 m=101").unwrap().is_commutative(), None);
    }
}
