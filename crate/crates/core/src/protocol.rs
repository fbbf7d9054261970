//! Key exchange and the end-to-end SDLP attack.

use rand::Rng;

use crate::action::{CycleAction, GadlpMethod};
use crate::error::{Error, Result};
use crate::holomorph::Pair;
use crate::orbit::{self, OrbitProfile, QuantumRunConfig, TrialTrace};
use crate::platform::Element;

/// Default orbit cap for parameter derivation.
pub const DEFAULT_ORBIT_CAP: u64 = 1 << 26;

/// Public parameters: the base pair and the orbit size `N = n + r − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pair: Pair,
    profile: OrbitProfile,
}

impl PublicParams {
    /// Computes `N` by cycle detection, refusing orbits larger than `cap`.
    pub fn derive(pair: Pair, cap: u64) -> Result<Self> {
        let profile = orbit::brent_profile_within(&pair, cap)?;
        Ok(PublicParams { pair, profile })
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn profile(&self) -> &OrbitProfile {
        &self.profile
    }

    /// `N = n + r − 1`.
    pub fn bound(&self) -> u64 {
        self.profile.total()
    }
}

/// A secret exponent with its public value `s(g, φ, x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    secret: u64,
    public: Element,
}

impl KeyPair {
    /// Requires `1 ≤ x ≤ N`.
    pub fn from_secret(params: &PublicParams, x: u64) -> Result<Self> {
        if x == 0 || x > params.bound() {
            return Err(Error::Precondition(format!("secret {x} outside 1..={}", params.bound())));
        }
        Ok(KeyPair { secret: x, public: params.pair.s_at(x) })
    }

    pub fn secret(&self) -> u64 {
        self.secret
    }

    pub fn public(&self) -> &Element {
        &self.public
    }
}

/// Draws `x` uniformly from `1..=N`.
pub fn spdke_keygen<R: Rng + ?Sized>(params: &PublicParams, rng: &mut R) -> KeyPair {
    let x = rng.gen_range(1..=params.bound());
    KeyPair { secret: x, public: params.pair.s_at(x) }
}

/// `K = φ^x(B)·A = x ∗ B`.
pub fn spdke_derive(pair: &Pair, keys: &KeyPair, peer: &Element) -> Result<Element> {
    pair.star(keys.secret, peer)
}

/// Whether `A·B` already equals the shared key, which happens on commutative platforms.
pub fn product_leaks_key(pair: &Pair, a: &Element, b: &Element, key: &Element) -> Result<bool> {
    Ok(pair.platform().mul(a, b)? == *key)
}

/// The adversary's view of an exchange, with optional planted secrets kept apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub pair: Pair,
    pub a: Element,
    pub b: Element,
    pub planted: Option<(u64, u64)>,
}

/// An SDLP instance: find `x` with `s(g, φ, x) = target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdlpInstance {
    pub pair: Pair,
    pub target: Element,
    pub bound: u64,
    /// Generator-side answer; solvers never read it.
    pub planted: Option<u64>,
}

/// How [`gen_instance`] produces its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceMode {
    /// Run a full exchange and take Alice's public value.
    Protocol,
    /// Plant a uniform exponent directly.
    Planted,
}

/// A generated instance, with the exchange transcript in protocol mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub instance: SdlpInstance,
    pub transcript: Option<Transcript>,
}

pub fn gen_instance<R: Rng + ?Sized>(params: &PublicParams, rng: &mut R, mode: InstanceMode) -> Generated {
    let bound = params.bound();
    match mode {
        InstanceMode::Planted => {
            let x = rng.gen_range(1..=bound);
            let instance =
                SdlpInstance { pair: params.pair.clone(), target: params.pair.s_at(x), bound, planted: Some(x) };
            Generated { instance, transcript: None }
        }
        InstanceMode::Protocol => {
            let alice = spdke_keygen(params, rng);
            let bob = spdke_keygen(params, rng);
            let transcript = Transcript {
                pair: params.pair.clone(),
                a: alice.public.clone(),
                b: bob.public.clone(),
                planted: Some((alice.secret, bob.secret)),
            };
            let instance =
                SdlpInstance { pair: params.pair.clone(), target: alice.public, bound, planted: Some(alice.secret) };
            Generated { instance, transcript: Some(transcript) }
        }
    }
}

/// How the solver learns `(n, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMethod {
    Brent,
    /// Simulated period finding with orbit bound `bound`, then index bisection over `[1, M]`.
    Quantum {
        config: QuantumRunConfig,
        bound: u64,
    },
}

/// Where the target sat in the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Tail,
    Cycle,
}

/// Output of [`solve_sdlp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdlpSolution {
    pub x: u64,
    pub profile: OrbitProfile,
    pub branch: Branch,
    pub gadlp_queries: u64,
    pub profile_attempts: u32,
    pub traces: Vec<TrialTrace>,
}

/// Profiles a pair by the chosen method, with the attempt count and trial traces.
pub fn profile_pair(pair: &Pair, method: ProfileMethod) -> Result<(OrbitProfile, u32, Vec<TrialTrace>)> {
    match method {
        ProfileMethod::Brent => Ok((orbit::brent_profile(pair), 1, Vec::new())),
        ProfileMethod::Quantum { config, bound } => {
            let run = orbit::period_recovery_sim(pair, config, bound)?;
            let r = run.period.expect("successful run carries a period");
            let search = orbit::binary_search_index(pair, 1, config.register_size(), r)?;
            let profile = OrbitProfile { n: search.index, r, cycle_anchor: pair.s_at(search.index) };
            Ok((profile, run.attempts(), run.traces))
        }
    }
}

/// Recovers `x` from `s(g, φ, x)` with at most one GADLP query.
pub fn solve_sdlp(inst: &SdlpInstance, profile_method: ProfileMethod, gadlp: GadlpMethod) -> Result<SdlpSolution> {
    let pair = &inst.pair;
    pair.platform().check(&inst.target)?;
    let (profile, profile_attempts, traces) = profile_pair(pair, profile_method)?;
    let (n, r) = (profile.n, profile.r);
    let action = CycleAction::new(pair.clone(), profile.clone())?;
    let (x, branch) = if action.is_on_cycle(&inst.target) {
        let anchor = action.point_at(0);
        let target = action.point(inst.target.clone())?;
        let shift = action.gadlp(gadlp, &anchor, &target)?;
        (n + shift.value(), Branch::Cycle)
    } else {
        let t = orbit::binary_search_tail(pair, &inst.target, n, r)?;
        (n - t, Branch::Tail)
    };
    if x == 0 || pair.s_at(x) != inst.target {
        return Err(Error::Precondition("target is not in the orbit of (g, φ)".into()));
    }
    Ok(SdlpSolution { x, profile, branch, gadlp_queries: action.query_count(), profile_attempts, traces })
}

/// Result of [`attack_transcript`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome {
    pub key: Element,
    pub solution: SdlpSolution,
}

/// Recovers Alice's secret from `A` and derives `x ∗ B`.
pub fn attack_transcript(t: &Transcript, profile_method: ProfileMethod, gadlp: GadlpMethod) -> Result<AttackOutcome> {
    let bound = orbit::brent_profile(&t.pair).total();
    let inst = SdlpInstance { pair: t.pair.clone(), target: t.a.clone(), bound, planted: None };
    let solution = solve_sdlp(&inst, profile_method, gadlp)?;
    let key = t.pair.star(solution.x, &t.b)?;
    Ok(AttackOutcome { key, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(pair: Pair) -> PublicParams {
        PublicParams::derive(pair, 1 << 20).unwrap()
    }

    #[test]
    fn exchange_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in fixtures::all() {
            let p = params(f.pair);
            for _ in 0..20 {
                let alice = spdke_keygen(&p, &mut rng);
                let bob = spdke_keygen(&p, &mut rng);
                let ka = spdke_derive(p.pair(), &alice, bob.public()).unwrap();
                let kb = spdke_derive(p.pair(), &bob, alice.public()).unwrap();
                assert_eq!(ka, kb, "{}", f.name);
                assert_eq!(ka, p.pair().s_eval(alice.secret() + bob.secret()).unwrap());
            }
        }
    }

    #[test]
    fn forced_secret_one() {
        let p = params(fixtures::unipotent_z5());
        let kp = KeyPair::from_secret(&p, 1).unwrap();
        assert_eq!(kp.public(), p.pair().g());
        assert!(KeyPair::from_secret(&p, 0).is_err());
        assert!(KeyPair::from_secret(&p, 6).is_err());
    }

    #[test]
    fn keygen_is_seeded() {
        let p = params(fixtures::m3_z101_inner());
        let a = spdke_keygen(&p, &mut ChaCha8Rng::seed_from_u64(11));
        let b = spdke_keygen(&p, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn commutative_leak_detected() {
        let p = params(fixtures::unipotent_z5());
        let (a, b) = (KeyPair::from_secret(&p, 2).unwrap(), KeyPair::from_secret(&p, 4).unwrap());
        let k = spdke_derive(p.pair(), &a, b.public()).unwrap();
        assert!(product_leaks_key(p.pair(), a.public(), b.public(), &k).unwrap());

        let p = params(fixtures::m3_z101_inner());
        let (a, b) = (KeyPair::from_secret(&p, 2).unwrap(), KeyPair::from_secret(&p, 5).unwrap());
        let k = spdke_derive(p.pair(), &a, b.public()).unwrap();
        assert!(!product_leaks_key(p.pair(), a.public(), b.public(), &k).unwrap());
    }

    #[test]
    fn solves_every_exponent() {
        for f in fixtures::all() {
            let p = params(f.pair);
            for x in 1..=p.bound().min(300) {
                let inst =
                    SdlpInstance { pair: p.pair().clone(), target: p.pair().s_at(x), bound: p.bound(), planted: None };
                let sol = solve_sdlp(&inst, ProfileMethod::Brent, GadlpMethod::Bsgs).unwrap();
                assert_eq!(sol.x, x, "{}", f.name);
                let expect = if x < sol.profile.n { (Branch::Tail, 0) } else { (Branch::Cycle, 1) };
                assert_eq!((sol.branch, sol.gadlp_queries), expect);
            }
        }
    }

    #[test]
    fn degenerate_instance() {
        let p = params(fixtures::idempotent());
        assert_eq!(p.bound(), 1);
        let g = gen_instance(&p, &mut ChaCha8Rng::seed_from_u64(0), InstanceMode::Planted);
        assert_eq!(g.instance.planted, Some(1));
    }

    #[test]
    fn quantum_profile_solves() {
        let p = params(fixtures::tail_n3_r2());
        let config = QuantumRunConfig::for_bound(5, 20, 1).unwrap();
        let g = gen_instance(&p, &mut ChaCha8Rng::seed_from_u64(5), InstanceMode::Protocol);
        let method = ProfileMethod::Quantum { config, bound: 5 };
        let out = attack_transcript(g.transcript.as_ref().unwrap(), method, GadlpMethod::HiddenShift).unwrap();
        let (x, y) = g.transcript.unwrap().planted.unwrap();
        assert_eq!(out.solution.x, x);
        assert_eq!(out.key, p.pair().s_eval(x + y).unwrap());
    }

    #[test]
    fn foreign_target_rejected() {
        let p = params(fixtures::tail_n3_r2());
        // The adjoined zero is never reached from g.
        let zero = p.pair().platform().cayley().unwrap().element(5).unwrap();
        let inst = SdlpInstance { pair: p.pair().clone(), target: zero, bound: 4, planted: None };
        assert!(solve_sdlp(&inst, ProfileMethod::Brent, GadlpMethod::Brute).is_err());
    }
}
