//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spdh_core::action::{verify_action, CycleAction, CyclePoint, GadlpMethod};
use spdh_core::fixtures::{self, Fixture};
use spdh_core::orbit::{self, PeriodFinder, QuantumRunConfig};
use spdh_core::platform::Element;
use spdh_core::protocol::{self, Branch, InstanceMode, ProfileMethod, PublicParams, SdlpInstance};
use spdh_core::quantum::{self, AmplitudeVector};
use spdh_core::Pair;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn params(pair: Pair) -> PublicParams {
    PublicParams::derive(pair, 1 << 24).expect("fixture orbit fits the cap")
}

/// 100 seeded exchanges on each fixture: K_A = K_B = s(x + y).
fn protocol_correctness() -> Outcome {
    let start = Instant::now();
    let named = [
        ("tail-n3-r2", fixtures::tail_n3_r2()),
        ("unipotent-z5", fixtures::unipotent_z5()),
        ("m3-z101-inner", fixtures::m3_z101_inner()),
        ("idempotent", fixtures::idempotent()),
        ("s3-sign", fixtures::s3_sign()),
        ("gf4-frobenius", fixtures::gf4_frobenius()),
    ];
    let mut bad = Vec::new();
    let mut exchanges = 0;
    for (i, (name, pair)) in named.into_iter().enumerate() {
        let p = params(pair);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
        for _ in 0..100 {
            let alice = protocol::spdke_keygen(&p, &mut rng);
            let bob = protocol::spdke_keygen(&p, &mut rng);
            let ka = protocol::spdke_derive(p.pair(), &alice, bob.public()).unwrap();
            let kb = protocol::spdke_derive(p.pair(), &bob, alice.public()).unwrap();
            let expect = p.pair().s_eval(alice.secret() + bob.secret()).unwrap();
            exchanges += 1;
            if ka != kb || ka != expect {
                bad.push(name);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && within(elapsed, 5),
        format!("{exchanges} exchanges, {} mismatches, {:.2?}", bad.len(), elapsed),
    )
}

fn small_enumerable_pairs() -> Vec<(String, Pair)> {
    let mut out: Vec<(String, Pair)> = fixtures::enumerable()
        .into_iter()
        .filter(|f| f.pair.platform().element_count().is_some_and(|c| c <= 64))
        .map(|f| (f.name.to_string(), f.pair))
        .collect();
    for (i, pair) in fixtures::transformation_pairs().into_iter().enumerate() {
        out.push((format!("t3-{i}"), pair));
    }
    out
}

/// |X| = n + r − 1 with distinct elements, and s(n+x) = s(n+y) ⇔ x ≡ y (mod r).
fn orbit_structure() -> Outcome {
    let start = Instant::now();
    let pairs = small_enumerable_pairs();
    let mut bad = Vec::new();
    for (name, pair) in &pairs {
        let size = pair.platform().element_count().unwrap();
        let profile = orbit::brute_force_profile(pair, size + 1).unwrap();
        let (n, r) = (profile.n, profile.r);
        // Every orbit element appears among s(1..=|G|+1).
        let orbit_set: HashSet<Element> = (1..=size + 1).map(|x| pair.s_eval(x).unwrap()).collect();
        let listed: Vec<Element> = (1..n + r).map(|x| pair.s_eval(x).unwrap()).collect();
        let distinct: HashSet<&Element> = listed.iter().collect();
        let size_ok = orbit_set.len() as u64 == n + r - 1 && distinct.len() == listed.len();
        let mut congruence_ok = true;
        let cycle: Vec<Element> = (0..=3 * r).map(|x| pair.s_eval(n + x).unwrap()).collect();
        for x in 0..=3 * r {
            for y in 0..=3 * r {
                let equal = cycle[x as usize] == cycle[y as usize];
                if equal != (x % r == y % r) {
                    congruence_ok = false;
                }
            }
        }
        if !(size_ok && congruence_ok) {
            bad.push(name.clone());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && within(elapsed, 10),
        format!("{} pairs with |G| <= 64, failures {:?}, {:.2?}", pairs.len(), bad, elapsed),
    )
}

fn action_for(pair: Pair) -> CycleAction {
    let profile = orbit::brent_profile(&pair);
    CycleAction::new(pair, profile).unwrap()
}

/// Axioms hold on every fixture; corrupted actions produce witnesses.
fn action_axioms() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut contexts: Vec<(String, Pair)> =
        fixtures::all().into_iter().map(|f: Fixture| (f.name.to_string(), f.pair)).collect();
    contexts.extend(fixtures::transformation_pairs().into_iter().enumerate().map(|(i, p)| (format!("t3-{i}"), p)));
    for (name, pair) in contexts {
        let act = action_for(pair);
        if act.period() > 4096 {
            continue;
        }
        checked += 1;
        if !act.verify().unwrap().passed() {
            bad.push(name);
        }
    }
    let act = action_for(fixtures::m3_z101_inner());
    let r = act.period();
    let points = act.cycle_points();
    let shifted = verify_action(r, &points, |j, a| act.pair().star(j + 1, a).unwrap()).unwrap();
    let skewed = verify_action(r, &points, |j, a| act.pair().star(if j == 7 { 8 } else { j }, a).unwrap()).unwrap();
    let collapsed = verify_action(r, &points, |j, a| act.pair().star(2 * j, a).unwrap()).unwrap();
    let mutations_caught =
        !shifted.passed() && !shifted.failures.is_empty() && !skewed.compatibility_ok() && !collapsed.freeness_ok();
    outcome(
        bad.is_empty() && mutations_caught,
        format!("{checked} contexts verified, failures {bad:?}, mutations caught: {mutations_caught}"),
    )
}

/// Brent ≡ brute force on 500 random instances; BSGS ≡ brute ≡ hidden shift on all cycle pairs.
fn oracle_equivalences() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut profile_mismatch = 0;
    for _ in 0..500 {
        let pair = fixtures::random_enumerable(&mut rng);
        let cap = pair.platform().element_count().unwrap() + 1;
        if orbit::brute_force_profile(&pair, cap).unwrap() != orbit::brent_profile(&pair) {
            profile_mismatch += 1;
        }
    }
    let mut pairs_checked = 0u64;
    let mut gadlp_mismatch = 0;
    let mut max_r = 0;
    for f in fixtures::all() {
        let act = action_for(f.pair);
        let r = act.period();
        if r > 1024 {
            continue;
        }
        max_r = max_r.max(r);
        let points: Vec<CyclePoint> = (0..r).map(|i| act.point_at(i)).collect();
        for x in &points {
            for y in &points {
                let brute = act.gadlp_brute(x, y).unwrap();
                let bsgs = act.gadlp_bsgs(x, y).unwrap();
                let hidden = act.gadlp(GadlpMethod::HiddenShift, x, y).unwrap();
                pairs_checked += 1;
                if brute != bsgs || brute != hidden || act.act(&brute, x).unwrap() != *y {
                    gadlp_mismatch += 1;
                }
            }
        }
    }
    outcome(
        profile_mismatch == 0 && gadlp_mismatch == 0,
        format!(
            "500 profiles ({profile_mismatch} mismatches); {pairs_checked} cycle pairs up to r={max_r} \
             ({gadlp_mismatch} mismatches), {:.2?}",
            start.elapsed()
        ),
    )
}

/// Simulated period finding on fixtures with n + r ≤ 32.
fn quantum_period_recovery() -> Outcome {
    let start = Instant::now();
    let floor = 4.0 / (PI * PI) - 0.001;
    let mut wrong = 0u64;
    let mut worst_rate = 1.0f64;
    let mut worst_mass = f64::INFINITY;
    let mut fixtures_run = Vec::new();
    for f in fixtures::all() {
        let profile = orbit::brent_profile(&f.pair);
        let (n, r) = (profile.n, profile.r);
        if n + r > 32 {
            continue;
        }
        fixtures_run.push(format!("{}(n={n},r={r})", f.name));
        let bound = profile.total();
        let cfg = QuantumRunConfig::for_bound(bound, 1, 77).unwrap();
        let finder = PeriodFinder::new(&f.pair, cfg, bound).unwrap();
        // (a) every possible measurement outcome resolves to r or to nothing
        for a in 0..finder.register_size() {
            if let Some(d) = finder.resolve(&finder.candidates_for(a)) {
                if d != r {
                    wrong += 1;
                }
            }
        }
        // (b) single-trial success over 500 seeded trials
        let mut successes = 0;
        for t in 0..500 {
            let trace = finder.trial(t).unwrap();
            match trace.result {
                Some(d) if d == r => successes += 1,
                Some(_) => wrong += 1,
                None => {}
            }
        }
        worst_rate = worst_rate.min(successes as f64 / 500.0);
        // (c) post-DFT mass near multiples of M/r, for every cycle class
        for c in 0..finder.class_count() {
            if finder.class_members(c).len() > 1 {
                let state = finder.transformed_state(c).unwrap();
                worst_mass = worst_mass.min(quantum::mass_near_multiples(&state, r as usize));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        wrong == 0 && worst_rate >= 0.2 && worst_mass >= floor && within(elapsed, 60),
        format!(
            "{}; wrong outputs {wrong}, worst single-trial rate {worst_rate:.3}, worst peak mass {worst_mass:.4} \
             (floor {floor:.4}), {elapsed:.2?}",
            fixtures_run.join(" ")
        ),
    )
}

/// Bisection recovers n on 500 random instances within ⌈log₂ M⌉ + 1 probes.
fn index_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut wrong = 0;
    let mut over_budget = 0;
    let mut max_probes = 0;
    for _ in 0..500 {
        let pair = fixtures::random_enumerable(&mut rng);
        let size = pair.platform().element_count().unwrap();
        let oracle = orbit::brute_force_profile(&pair, size + 1).unwrap();
        let bound = size + 1;
        let cfg = QuantumRunConfig::for_bound(bound, 1, 0).unwrap();
        let m = cfg.register_size();
        let found = orbit::binary_search_index(&pair, 1, m, oracle.r).unwrap();
        let budget = (64 - (m - 1).leading_zeros()) + 1;
        max_probes = max_probes.max(found.probes);
        if found.index != oracle.n {
            wrong += 1;
        }
        if found.probes > budget {
            over_budget += 1;
        }
    }
    outcome(
        wrong == 0 && over_budget == 0,
        format!("500 instances, {wrong} wrong, {over_budget} over the probe budget, max probes {max_probes}"),
    )
}

/// Planted SDLP instances are recovered exactly with at most one GADLP query.
fn end_to_end_attack() -> Outcome {
    let start = Instant::now();
    let methods = [GadlpMethod::Brute, GadlpMethod::Bsgs, GadlpMethod::HiddenShift];
    let mut solved = 0;
    let mut failed = Vec::new();
    let mut max_queries = 0;
    let mut branches = HashSet::new();
    for (i, f) in fixtures::all().into_iter().enumerate() {
        let p = params(f.pair);
        let mut rng = ChaCha8Rng::seed_from_u64(700 + i as u64);
        let mut plants: Vec<SdlpInstance> =
            (0..100).map(|_| protocol::gen_instance(&p, &mut rng, InstanceMode::Planted).instance).collect();
        for x in [1, p.bound()] {
            plants.push(SdlpInstance {
                pair: p.pair().clone(),
                target: p.pair().s_eval(x).unwrap(),
                bound: p.bound(),
                planted: Some(x),
            });
        }
        for (k, inst) in plants.iter().enumerate() {
            let planted = inst.planted.unwrap();
            let public = SdlpInstance { planted: None, ..inst.clone() };
            match protocol::solve_sdlp(&public, ProfileMethod::Brent, methods[k % 3]) {
                Ok(sol) if sol.x == planted && p.pair().s_eval(sol.x).unwrap() == inst.target => {
                    solved += 1;
                    max_queries = max_queries.max(sol.gadlp_queries);
                    branches.insert(sol.branch);
                }
                _ => failed.push(f.name),
            }
        }
    }
    let classical_ok = failed.is_empty() && max_queries <= 1 && branches.len() == 2;

    let mut quantum_lines = Vec::new();
    let mut quantum_ok = true;
    for (i, f) in fixtures::all().into_iter().enumerate() {
        let Some((n, r)) = f.designed else { continue };
        if n + r > 64 {
            continue;
        }
        let p = params(f.pair);
        let bound = n + r - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
        let mut ok = 0;
        for k in 0..100u64 {
            let inst = protocol::gen_instance(&p, &mut rng, InstanceMode::Planted).instance;
            let planted = inst.planted.unwrap();
            let public = SdlpInstance { planted: None, ..inst };
            let config = QuantumRunConfig::for_bound(bound, 20, 31 * k + i as u64).unwrap();
            let method = ProfileMethod::Quantum { config, bound };
            if let Ok(sol) = protocol::solve_sdlp(&public, method, methods[k as usize % 3]) {
                if sol.x == planted && sol.gadlp_queries <= 1 {
                    ok += 1;
                }
            }
        }
        quantum_ok &= ok >= 99;
        quantum_lines.push(format!("{}={ok}/100", f.name));
    }
    let branch_names: Vec<&str> = branches.iter().map(|b| if *b == Branch::Tail { "tail" } else { "cycle" }).collect();
    outcome(
        classical_ok && quantum_ok,
        format!(
            "brent: {solved} solved, {} failed, max queries {max_queries}, branches {:?}; qsim: {}; {:.2?}",
            failed.len(),
            branch_names,
            quantum_lines.join(" "),
            start.elapsed()
        ),
    )
}

fn random_state(m: usize, rng: &mut impl Rng) -> AmplitudeVector {
    let raw: Vec<Complex64> =
        (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    AmplitudeVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// DFT unitarity and the exact-divisor peak law.
fn dft_numerics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_unitarity = 0.0f64;
    for _ in 0..1000 {
        let m = 1usize << rng.gen_range(1..=12);
        let v = random_state(m, &mut rng);
        let out = quantum::dft(&v).unwrap();
        worst_unitarity = worst_unitarity.max((out.norm_sqr() - v.norm_sqr()).abs());
    }
    let mut worst_leak = 0.0f64;
    let mut worst_peak = 0.0f64;
    for l in 1..=12u32 {
        let m = 1usize << l;
        for rl in 0..=l {
            let r = 1usize << rl;
            for x0 in [0, r / 2, r - 1] {
                let probs = quantum::dft(&quantum::collapsed_state(x0, r, m).unwrap()).unwrap().probabilities();
                let step = m / r;
                let leak: f64 = probs.iter().enumerate().filter(|(k, _)| k % step != 0).map(|(_, p)| p).sum();
                worst_leak = worst_leak.max(leak);
                for k in (0..m).step_by(step) {
                    worst_peak = worst_peak.max((probs[k] - 1.0 / r as f64).abs());
                }
            }
        }
    }
    outcome(
        worst_unitarity <= 1e-9 && worst_leak <= 1e-9 && worst_peak <= 1e-9,
        format!(
            "unitarity error {worst_unitarity:.2e}, divisor-law leakage {worst_leak:.2e}, peak error {worst_peak:.2e}"
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 8] = [
        ("protocol correctness", protocol_correctness),
        ("orbit structure", orbit_structure),
        ("action axioms", action_axioms),
        ("oracle equivalences", oracle_equivalences),
        ("quantum period recovery", quantum_period_recovery),
        ("index recovery", index_recovery),
        ("end-to-end attack", end_to_end_attack),
        ("DFT numerics", dft_numerics),
    ];
    let mut all_pass = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        all_pass &= o.pass;
        println!("criterion {} [{name}]: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
