//! Coefficient rings for matrix platforms: `Z_m` and small Galois fields.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest Galois field order supported (log/antilog tables are kept in memory).
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ring {
    /// Integers modulo `m`.
    Modular { modulus: u32 },
    /// `GF(p^k)`, elements encoded as base-`p` digit strings (constant term first).
    Galois(Arc<GaloisField>),
}

impl Ring {
    pub fn modular(modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidPlatform(format!("modulus {modulus} must be at least 2")));
        }
        Ok(Ring::Modular { modulus })
    }

    pub fn galois(characteristic: u32, degree: u32) -> Result<Self> {
        Ok(Ring::Galois(Arc::new(GaloisField::new(characteristic, degree)?)))
    }

    /// Number of ring elements; entries live in `0..order`.
    pub fn order(&self) -> u32 {
        match self {
            Ring::Modular { modulus } => *modulus,
            Ring::Galois(f) => f.order,
        }
    }

    /// Characteristic when the ring is a field, `None` for composite `Z_m`.
    pub fn field_characteristic(&self) -> Option<u32> {
        match self {
            Ring::Modular { modulus } if is_prime(*modulus) => Some(*modulus),
            Ring::Modular { .. } => None,
            Ring::Galois(f) => Some(f.characteristic),
        }
    }

    /// Extension degree over the prime field (1 for `Z_m`).
    pub fn degree(&self) -> u32 {
        match self {
            Ring::Modular { .. } => 1,
            Ring::Galois(f) => f.degree,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            Ring::Modular { modulus } => ((a as u64 + b as u64) % *modulus as u64) as u32,
            Ring::Galois(f) => f.add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self {
            Ring::Modular { modulus } => {
                if a == 0 {
                    0
                } else {
                    modulus - a
                }
            }
            Ring::Galois(f) => f.neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            Ring::Modular { modulus } => ((a as u64 * b as u64) % *modulus as u64) as u32,
            Ring::Galois(f) => f.mul(a, b),
        }
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: u32) -> Option<u32> {
        match self {
            Ring::Modular { modulus } => mod_inverse(a as u64, *modulus as u64).map(|v| v as u32),
            Ring::Galois(f) => f.inv(a),
        }
    }

    /// `a^(p^t)` where `p` is the characteristic. Identity on prime fields.
    pub fn frobenius(&self, a: u32, t: u64) -> u32 {
        match self {
            Ring::Modular { .. } => a,
            Ring::Galois(f) => f.frobenius(a, t),
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct GaloisField {
    characteristic: u32,
    degree: u32,
    order: u32,
    /// Low-order coefficients of the monic primitive modulus polynomial.
    modulus_poly: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPlatform(format!("field characteristic {p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidPlatform("extension degree must be positive".into()));
        }
        let order = (p as u64)
            .checked_pow(k)
            .filter(|q| *q <= MAX_FIELD_ORDER as u64)
            .ok_or_else(|| Error::InvalidPlatform(format!("field order {p}^{k} exceeds {MAX_FIELD_ORDER}")))?
            as u32;

        // Search monic degree-k polynomials in lexicographic order for one whose root x
        // generates the multiplicative group.
        for candidate in 0..order {
            let poly = digits(candidate, p, k);
            if poly[0] == 0 {
                continue;
            }
            if let Some(exp) = primitive_powers(&poly, p, order) {
                let mut log = vec![0u32; order as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                return Ok(GaloisField { characteristic: p, degree: k, order, modulus_poly: poly, exp, log });
            }
        }
        Err(Error::InvalidPlatform(format!("no primitive polynomial found for GF({p}^{k})")))
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn modulus_poly(&self) -> &[u32] {
        &self.modulus_poly
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.characteristic;
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
        for _ in 0..self.degree {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn neg(&self, a: u32) -> u32 {
        let p = self.characteristic;
        if p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        for _ in 0..self.degree {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order as u64 - 1;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[e as usize]
    }

    fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order as u64 - 1;
        let e = (n - self.log[a as usize] as u64) % n;
        Some(self.exp[e as usize])
    }

    fn frobenius(&self, a: u32, t: u64) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = self.order as u64 - 1;
        let shift = pow_mod(self.characteristic as u64, t % self.degree as u64, n);
        self.exp[((self.log[a as usize] as u64 * shift) % n) as usize]
    }
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn from_digits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Powers `x^0, x^1, ..., x^(q-2)` modulo the monic polynomial with low coefficients
/// `poly`, or `None` if `x` is not a generator.
fn primitive_powers(poly: &[u32], p: u32, order: u32) -> Option<Vec<u32>> {
    let k = poly.len();
    let mut seen = vec![false; order as usize];
    let mut cur = vec![0u32; k];
    cur[0] = 1;
    let mut exp = Vec::with_capacity(order as usize - 1);
    for _ in 0..order - 1 {
        let v = from_digits(&cur, p);
        if v == 0 || seen[v as usize] {
            return None;
        }
        seen[v as usize] = true;
        exp.push(v);
        // cur <- cur * x mod poly
        let top = cur[k - 1];
        for i in (1..k).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..k {
            cur[i] = (cur[i] + (p - poly[i]) % p * top) % p;
        }
    }
    (from_digits(&cur, p) == 1).then_some(exp)
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}
