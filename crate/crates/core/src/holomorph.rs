//! Holomorph arithmetic on a fixed base pair `(g, φ)`.
//!
//! The semidirect exponent `s(g, φ, x) = φ^(x-1)(g) · … · φ(g) · g` is the first
//! component of the holomorph power `(g, φ)^x`, so it can be evaluated with
//! square-and-multiply. The shift operator `i ∗ a = φ^i(a) · s(g, φ, i)` adds `i` to the
//! hidden exponent of `a`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::platform::{Element, Endomorphism, Platform};

/// A public base pair `(g, φ)` over a platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    platform: Arc<Platform>,
    g: Element,
    endo: Endomorphism,
}

/// A holomorph element `(a, φ^k)` with the endomorphism power kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolomorphPoint {
    pub element: Element,
    pub endo_power: u64,
}

impl Pair {
    pub fn new(platform: Arc<Platform>, g: Element, endo: Endomorphism) -> Result<Self> {
        platform.check(&g)?;
        endo.check(&platform)?;
        Ok(Pair { platform, g, endo })
    }

    pub fn platform(&self) -> &Platform {
        &self.platform
    }

    pub fn platform_arc(&self) -> &Arc<Platform> {
        &self.platform
    }

    pub fn g(&self) -> &Element {
        &self.g
    }

    pub fn endo(&self) -> &Endomorphism {
        &self.endo
    }

    /// `(identity, φ^0)`.
    pub fn identity_point(&self) -> HolomorphPoint {
        HolomorphPoint { element: self.platform.identity(), endo_power: 0 }
    }

    /// `(g, φ)`.
    pub fn generator_point(&self) -> HolomorphPoint {
        HolomorphPoint { element: self.g.clone(), endo_power: 1 }
    }

    /// `(a_p, φ^(k_p)) · (a_q, φ^(k_q)) = (φ^(k_q)(a_p) · a_q, φ^(k_p + k_q))`.
    pub fn holomorph_mul(&self, p: &HolomorphPoint, q: &HolomorphPoint) -> Result<HolomorphPoint> {
        self.platform.check(&p.element)?;
        self.platform.check(&q.element)?;
        let endo_power = p
            .endo_power
            .checked_add(q.endo_power)
            .ok_or_else(|| Error::Precondition("endomorphism power overflows u64".into()))?;
        Ok(self.mul_points(p, q, endo_power))
    }

    fn mul_points(&self, p: &HolomorphPoint, q: &HolomorphPoint, endo_power: u64) -> HolomorphPoint {
        let twisted = self.endo.apply_unchecked(&self.platform, q.endo_power, &p.element);
        HolomorphPoint { element: self.platform.mul_unchecked(&twisted, &q.element), endo_power }
    }

    /// `(g, φ)^x` by square-and-multiply; `x = 0` gives the identity point.
    pub fn holomorph_pow(&self, x: u64) -> HolomorphPoint {
        // φ need not fix the identity, so the accumulator starts at the first factor.
        let mut acc: Option<HolomorphPoint> = None;
        let mut base = self.generator_point();
        let mut k = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => {
                        let power = a.endo_power + base.endo_power;
                        self.mul_points(&a, &base, power)
                    }
                });
            }
            k >>= 1;
            if k > 0 {
                let power = base.endo_power * 2;
                base = self.mul_points(&base, &base, power);
            }
        }
        acc.unwrap_or_else(|| self.identity_point())
    }

    /// `s(g, φ, x)` for `x ≥ 1`, in `O(log x)` holomorph multiplications.
    pub fn s_eval(&self, x: u64) -> Result<Element> {
        if x == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(self.s_at(x))
    }

    /// `s(g, φ, x)` extended with `s(g, φ, 0) = identity`.
    pub(crate) fn s_at(&self, x: u64) -> Element {
        self.holomorph_pow(x).element
    }

    /// `i ∗ a = φ^i(a) · s(g, φ, i)`; `0 ∗ a = a`.
    pub fn star(&self, i: u64, a: &Element) -> Result<Element> {
        self.platform.check(a)?;
        Ok(self.star_at(i, a))
    }

    pub(crate) fn star_at(&self, i: u64, a: &Element) -> Element {
        if i == 0 {
            return a.clone();
        }
        let shifted = self.endo.apply_unchecked(&self.platform, i, a);
        self.platform.mul_unchecked(&shifted, &self.s_at(i))
    }

    /// `i ∗ a` with `s(g, φ, i)` already known.
    pub(crate) fn star_with(&self, i: u64, s_i: &Element, a: &Element) -> Element {
        let shifted = self.endo.apply_unchecked(&self.platform, i, a);
        self.platform.mul_unchecked(&shifted, s_i)
    }

    /// `φ(a) · g`, the self-map taking `s(g, φ, i)` to `s(g, φ, i + 1)`.
    pub fn iterate_next(&self, a: &Element) -> Result<Element> {
        self.platform.check(a)?;
        Ok(self.step(a))
    }

    #[inline]
    pub(crate) fn step(&self, a: &Element) -> Element {
        let shifted = self.endo.apply_unchecked(&self.platform, 1, a);
        self.platform.mul_unchecked(&shifted, &self.g)
    }
}
