//! Small platforms with known orbit structure, shared by tests, the CLI demo commands, and
//! the FFI smoke tests.

use std::sync::Arc;

use crate::holomorph::Pair;
use crate::platform::{CayleyTable, Element, Endomorphism, MatrixSemigroup, Platform, Ring};

/// A named base pair.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub pair: Pair,
    /// Index and period when fixed by construction.
    pub designed: Option<(u64, u64)>,
}

/// Monogenic monoid `{e, a, a², …, a^(n+r-1)}` with `a^(n+r) = a^n`, taking `g = a` and
/// `φ = id`, so `(g, φ)` has index `n` and period `r`. Index 0 is the identity and index
/// `i` is `a^i`.
pub fn monogenic(index: u32, period: u32) -> Pair {
    assert!(index >= 1 && period >= 1);
    let top = index + period - 1;
    let reduce = |k: u32| if k <= top { k } else { index + (k - index) % period };
    let table = CayleyTable::from_fn(top + 1, 0, |a, b| reduce(a + b)).expect("valid table");
    let platform = Arc::new(Platform::Cayley(table));
    let g = platform.cayley().unwrap().element(1).unwrap();
    let phi = Endomorphism::identity(&platform);
    Pair::new(platform, g, phi).expect("fixture")
}

/// Six elements: the monogenic monoid with index 3 and period 2, plus an adjoined zero.
pub fn tail_n3_r2() -> Pair {
    let zero = 5;
    let reduce = |k: u32| if k <= 4 { k } else { 3 + (k - 3) % 2 };
    let table = CayleyTable::from_fn(6, 0, |a, b| if a == zero || b == zero { zero } else { reduce(a + b) })
        .expect("valid table");
    let platform = Arc::new(Platform::Cayley(table));
    let g = platform.cayley().unwrap().element(1).unwrap();
    let phi = Endomorphism::identity(&platform);
    Pair::new(platform, g, phi).expect("fixture")
}

/// `M_2(Z_5)` with `g = [[1,1],[0,1]]` and `φ = id`: `s(x) = [[1,x],[0,1]]`, so `n = 1`, `r = 5`.
pub fn unipotent_z5() -> Pair {
    let platform = Arc::new(Platform::Matrix(MatrixSemigroup::new(2, Ring::Modular { modulus: 5 }).unwrap()));
    let g = platform.matrix().unwrap().element(&[1, 1, 0, 1]).unwrap();
    let phi = Endomorphism::identity(&platform);
    Pair::new(platform, g, phi).expect("fixture")
}

/// `M_2(Z_5)` with the idempotent `g = diag(1, 0)` and `φ = id`: `n = r = 1`.
pub fn idempotent() -> Pair {
    let platform = Arc::new(Platform::Matrix(MatrixSemigroup::new(2, Ring::Modular { modulus: 5 }).unwrap()));
    let g = platform.matrix().unwrap().element(&[1, 0, 0, 0]).unwrap();
    let phi = Endomorphism::identity(&platform);
    Pair::new(platform, g, phi).expect("fixture")
}

/// `M_3(Z_101)` with `φ` conjugation by the cyclic permutation matrix `P` and
/// `g = P⁻¹·D`, `D = diag(u, v, 1)` with `u` of order 5 and `v` of order 4.
///
/// Here `s(x) = P^(-x)·D^x`, which returns to the identity exactly when `3 | x` and
/// `20 | x`: `n = 1`, `r = 60`.
pub fn m3_z101_inner() -> Pair {
    let platform = Arc::new(Platform::Matrix(MatrixSemigroup::new(3, Ring::Modular { modulus: 101 }).unwrap()));
    let m = platform.matrix().unwrap();
    // 2 generates Z_101^*, so 2^20 has order 5; 10^2 = -1, so 10 has order 4.
    let ring = Ring::Modular { modulus: 101 };
    let mut order5 = 1;
    for _ in 0..20 {
        order5 = ring.mul(order5, 2);
    }
    let p = m.element(&[0, 1, 0, 0, 0, 1, 1, 0, 0]).unwrap();
    let phi = Endomorphism::inner(&platform, p.clone()).unwrap();
    let Endomorphism::Inner { h_inv, .. } = &phi else { unreachable!() };
    let d = m.element(&[order5, 0, 0, 0, 10, 0, 0, 0, 1]).unwrap();
    let g = platform.mul(h_inv, &d).unwrap();
    Pair::new(platform, g, phi).expect("fixture")
}

fn s3_table() -> CayleyTable {
    let perms = s3_perms();
    let idx = |p: [u8; 3]| perms.iter().position(|q| *q == p).unwrap() as u32;
    CayleyTable::from_fn(6, 0, |a, b| {
        let (pa, pb) = (perms[a as usize], perms[b as usize]);
        // (a·b)(i) = b(a(i))
        idx([pb[pa[0] as usize], pb[pa[1] as usize], pb[pa[2] as usize]])
    })
    .expect("valid table")
}

fn s3_perms() -> Vec<[u8; 3]> {
    vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

/// `S_3` with the non-injective endomorphism sending odd permutations to the
/// transposition `(0 1)` and even ones to the identity; `g` is a 3-cycle.
pub fn s3_sign() -> Pair {
    let platform = Arc::new(Platform::Cayley(s3_table()));
    let map = vec![0, 1, 1, 1, 0, 0];
    let g = platform.cayley().unwrap().element(4).unwrap();
    Pair::new(platform, g, Endomorphism::table(map)).expect("fixture")
}

/// The full transformation monoid on three points (27 elements). Element `f` has index
/// `f(0) + 3·f(1) + 9·f(2)`, and `(f·g)(i) = g(f(i))`.
pub fn transformation_monoid() -> Arc<Platform> {
    let decode = |v: u32| [(v % 3) as usize, ((v / 3) % 3) as usize, (v / 9) as usize];
    let encode = |f: [usize; 3]| (f[0] + 3 * f[1] + 9 * f[2]) as u32;
    let identity = encode([0, 1, 2]);
    let table = CayleyTable::from_fn(27, identity, |a, b| {
        let (fa, fb) = (decode(a), decode(b));
        encode([fb[fa[0]], fb[fa[1]], fb[fa[2]]])
    })
    .expect("valid table");
    Arc::new(Platform::Cayley(table))
}

/// Endomorphisms of [`transformation_monoid`]: conjugation by each of the six
/// permutations, plus the constant maps onto each idempotent.
pub fn transformation_endomorphisms(platform: &Platform) -> Vec<Endomorphism> {
    let t = platform.cayley().expect("cayley platform");
    let mut out = Vec::new();
    for perm in s3_perms() {
        let h = t.element(perm[0] as u32 + 3 * perm[1] as u32 + 9 * perm[2] as u32).unwrap();
        out.push(Endomorphism::inner(platform, h).unwrap());
    }
    for e in 0..t.size() {
        if t.product(e, e) == e {
            out.push(Endomorphism::table(vec![e; t.size() as usize]));
        }
    }
    out
}

/// `M_2(GF(4))` with the Frobenius endomorphism and `g = [[x, 1], [0, 1]]`.
pub fn gf4_frobenius() -> Pair {
    let platform = Arc::new(Platform::Matrix(MatrixSemigroup::new(2, Ring::galois(2, 2).unwrap()).unwrap()));
    let g = platform.matrix().unwrap().element(&[2, 1, 0, 1]).unwrap();
    let phi = Endomorphism::frobenius(&platform, 1).unwrap();
    Pair::new(platform, g, phi).expect("fixture")
}

/// A larger-period monogenic fixture used to exercise the solvers at `r` in the hundreds.
pub fn long_cycle() -> Pair {
    monogenic(4, 250)
}

/// Every named fixture.
pub fn all() -> Vec<Fixture> {
    vec![
        Fixture { name: "tail-n3-r2", pair: tail_n3_r2(), designed: Some((3, 2)) },
        Fixture { name: "unipotent-z5", pair: unipotent_z5(), designed: Some((1, 5)) },
        Fixture { name: "idempotent", pair: idempotent(), designed: Some((1, 1)) },
        Fixture { name: "m3-z101-inner", pair: m3_z101_inner(), designed: Some((1, 60)) },
        Fixture { name: "s3-sign", pair: s3_sign(), designed: None },
        Fixture { name: "gf4-frobenius", pair: gf4_frobenius(), designed: None },
        Fixture { name: "monogenic-7-13", pair: monogenic(7, 13), designed: Some((7, 13)) },
        Fixture { name: "long-cycle", pair: long_cycle(), designed: Some((4, 250)) },
    ]
}

/// Fixtures whose platforms can be enumerated exhaustively.
pub fn enumerable() -> Vec<Fixture> {
    all().into_iter().filter(|f| f.pair.platform().is_enumerable()).collect()
}

/// Every `(g, φ)` on the transformation monoid, over all 27 choices of `g` and every
/// endomorphism from [`transformation_endomorphisms`].
pub fn transformation_pairs() -> Vec<Pair> {
    let platform = transformation_monoid();
    let endos = transformation_endomorphisms(&platform);
    let elements = platform.elements().unwrap();
    let mut out = Vec::new();
    for phi in &endos {
        for g in &elements {
            out.push(Pair::new(platform.clone(), g.clone(), phi.clone()).unwrap());
        }
    }
    out
}

fn random_invertible(platform: &Platform, rng: &mut impl rand::Rng) -> Element {
    loop {
        let h = platform.random_element(rng);
        if let Ok(Some(_)) = platform.unit_inverse(&h) {
            return h;
        }
    }
}

fn s3_endomorphisms(platform: &Platform) -> Vec<Endomorphism> {
    let mut out = vec![
        Endomorphism::identity(platform),
        Endomorphism::table(vec![0, 1, 1, 1, 0, 0]),
        Endomorphism::table(vec![0; 6]),
    ];
    for h in platform.elements().unwrap() {
        out.push(Endomorphism::inner(platform, h).unwrap());
    }
    out
}

/// A random pair on one of the enumerable platforms: random `g` and a random endomorphism
/// from that platform's family.
pub fn random_enumerable(rng: &mut impl rand::Rng) -> Pair {
    let (platform, endo) = match rng.gen_range(0..6) {
        0 => {
            let platform = transformation_monoid();
            let endos = transformation_endomorphisms(&platform);
            let endo = endos[rng.gen_range(0..endos.len())].clone();
            (platform, endo)
        }
        1 => {
            let platform = s3_sign().platform_arc().clone();
            let endos = s3_endomorphisms(&platform);
            let endo = endos[rng.gen_range(0..endos.len())].clone();
            (platform, endo)
        }
        2 => {
            let platform = unipotent_z5().platform_arc().clone();
            let endo = if rng.gen_bool(0.3) {
                Endomorphism::identity(&platform)
            } else {
                Endomorphism::inner(&platform, random_invertible(&platform, rng)).unwrap()
            };
            (platform, endo)
        }
        3 => {
            let platform = gf4_frobenius().platform_arc().clone();
            let endo = if rng.gen_bool(0.5) {
                Endomorphism::frobenius(&platform, 1).unwrap()
            } else {
                Endomorphism::inner(&platform, random_invertible(&platform, rng)).unwrap()
            };
            (platform, endo)
        }
        4 => {
            let platform = tail_n3_r2().platform_arc().clone();
            let endo = Endomorphism::identity(&platform);
            (platform, endo)
        }
        _ => {
            let platform = monogenic(7, 13).platform_arc().clone();
            let endo = Endomorphism::identity(&platform);
            (platform, endo)
        }
    };
    let g = platform.random_element(rng);
    Pair::new(platform, g, endo).expect("fixture")
}
