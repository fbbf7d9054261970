//! Amplitude-level kernels for period finding. State vectors are transformed by the DFT over
//! `Z_M` and sampled by the Born rule; continued fractions turn outcomes into periods.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Normalization tolerance for amplitude vectors.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A normalized complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    amps: Vec<Complex64>,
}

impl AmplitudeVector {
    /// Wraps `amps`, requiring a non-empty vector of unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidQuantumConfig("empty amplitude vector".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidQuantumConfig(format!("squared norm {norm} is not 1")));
        }
        Ok(AmplitudeVector { amps })
    }

    /// `|k⟩` in dimension `m`.
    pub fn basis(m: usize, k: usize) -> Result<Self> {
        if k >= m {
            return Err(Error::InvalidQuantumConfig(format!("basis index {k} out of range for length {m}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); m];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(AmplitudeVector { amps })
    }

    /// The uniform superposition of dimension `m`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidQuantumConfig("empty amplitude vector".into()));
        }
        let a = 1.0 / (m as f64).sqrt();
        Ok(AmplitudeVector { amps: vec![Complex64::new(a, 0.0); m] })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// The uniform superposition over `{x0 + j·step < m}`, with `⌈(m − x0)/step⌉` terms.
pub fn collapsed_state(x0: usize, step: usize, m: usize) -> Result<AmplitudeVector> {
    if step == 0 || x0 >= m {
        return Err(Error::InvalidQuantumConfig(format!("empty support: x0={x0} step={step} M={m}")));
    }
    let support: Vec<usize> = (x0..m).step_by(step).collect();
    support_state(&support, m)
}

/// The uniform superposition over an arbitrary support set in dimension `m`.
pub fn support_state(support: &[usize], m: usize) -> Result<AmplitudeVector> {
    if support.is_empty() {
        return Err(Error::InvalidQuantumConfig("empty support".into()));
    }
    let a = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); m];
    for &k in support {
        if k >= m {
            return Err(Error::InvalidQuantumConfig(format!("support index {k} out of range for length {m}")));
        }
        amps[k] = a;
    }
    Ok(AmplitudeVector { amps })
}

/// `out[k] = (1/√M) Σ_j v[j]·exp(2πi·jk/M)`.
pub fn dft(v: &AmplitudeVector) -> Result<AmplitudeVector> {
    let m = v.len();
    if !m.is_power_of_two() {
        return Err(Error::InvalidQuantumConfig(format!("DFT length {m} is not a power of two")));
    }
    let mut buf = v.amps.clone();
    // rustfft's inverse transform carries the positive exponent and no scaling.
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / (m as f64).sqrt();
    for a in &mut buf {
        *a *= scale;
    }
    Ok(AmplitudeVector { amps: buf })
}

/// Draws `k` with probability `|v[k]|²`.
pub fn sample<R: Rng + ?Sized>(v: &AmplitudeVector, rng: &mut R) -> usize {
    let probs = v.probabilities();
    let total: f64 = probs.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

/// The integers closest to `j·M/r` for `j < r`, deduplicated and sorted.
pub fn nearest_multiples(m: usize, r: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..r)
        .map(|j| {
            let num = 2 * j as u128 * m as u128 + r as u128;
            ((num / (2 * r as u128)) as usize) % m
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Total probability on the integers closest to multiples of `M/r`.
pub fn mass_near_multiples(v: &AmplitudeVector, r: usize) -> f64 {
    nearest_multiples(v.len(), r).into_iter().map(|k| v.amps[k].norm_sqr()).sum()
}

/// A convergent `numerator/denominator` of a continued-fraction expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convergent {
    pub numerator: u64,
    pub denominator: u64,
}

/// All convergents of `a/m` in order of strictly increasing denominator.
pub fn convergents(a: u64, m: u64) -> Vec<Convergent> {
    assert!(m > 0, "zero denominator");
    let (mut num, mut den) = (a, m);
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let mut out = Vec::new();
    // a/m = [q0; q1, q2, ...]
    loop {
        let q = (num / den) as u128;
        let (h_next, k_next) = (q * h + h_prev, q * k + k_prev);
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        let c = Convergent { numerator: h as u64, denominator: k as u64 };
        if out.last().is_none_or(|p: &Convergent| p.denominator < c.denominator) {
            out.push(c);
        } else if let Some(p) = out.last_mut() {
            *p = c;
        }
        let rem = num % den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    out
}

/// Convergent denominators of `a/m` that do not exceed `bound`.
pub fn continued_fraction_denominators(a: u64, m: u64, bound: u64) -> Vec<u64> {
    convergents(a, m).into_iter().map(|c| c.denominator).filter(|&d| d <= bound).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collapsed_state_support() {
        let v = collapsed_state(3, 4, 16).unwrap();
        for (k, a) in v.amplitudes().iter().enumerate() {
            let expect = if k % 4 == 3 { 0.5 } else { 0.0 };
            assert!((a.re - expect).abs() < 1e-12 && a.im == 0.0);
        }
        let full = collapsed_state(0, 1, 8).unwrap();
        assert_eq!(full, AmplitudeVector::uniform(8).unwrap());
        assert!(collapsed_state(16, 4, 16).is_err());
        assert!(collapsed_state(0, 0, 16).is_err());
    }

    #[test]
    fn dft_of_delta_and_uniform() {
        let d = dft(&AmplitudeVector::basis(8, 0).unwrap()).unwrap();
        for a in d.amplitudes() {
            assert!((a - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12);
        }
        let back = dft(&AmplitudeVector::uniform(8).unwrap()).unwrap();
        assert!((back.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(dft(&AmplitudeVector::uniform(6).unwrap()).is_err());
    }

    #[test]
    fn dft_sign_convention() {
        // |1⟩ maps to (1/√M) e^{+2πik/M}.
        let m = 16;
        let out = dft(&AmplitudeVector::basis(m, 1).unwrap()).unwrap();
        for (k, a) in out.amplitudes().iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let expect = Complex64::new(theta.cos(), theta.sin()) / (m as f64).sqrt();
            assert!((a - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_divisor_peaks() {
        let v = dft(&collapsed_state(0, 4, 16).unwrap()).unwrap();
        for (k, p) in v.probabilities().iter().enumerate() {
            let expect = if k % 4 == 0 { 0.25 } else { 0.0 };
            assert!((p - expect).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn sample_delta_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = AmplitudeVector::basis(16, 7).unwrap();
        for _ in 0..100 {
            assert_eq!(sample(&v, &mut rng), 7);
        }
    }

    #[test]
    fn sample_uniform_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = AmplitudeVector::uniform(4).unwrap();
        let draws = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[sample(&v, &mut rng)] += 1;
        }
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - 2500.0).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn continued_fraction_examples() {
        assert_eq!(continued_fraction_denominators(0, 16, 100), vec![1]);
        assert_eq!(continued_fraction_denominators(5, 16, 100), vec![1, 3, 16]);
        assert_eq!(continued_fraction_denominators(5, 16, 10), vec![1, 3]);
        let c = convergents(5, 16);
        assert_eq!(c[1], Convergent { numerator: 1, denominator: 3 });
        assert_eq!(c[2], Convergent { numerator: 5, denominator: 16 });
    }

    #[test]
    fn nearest_multiples_rounding() {
        assert_eq!(nearest_multiples(16, 4), vec![0, 4, 8, 12]);
        // 16/3 = 5.33, 32/3 = 10.67
        assert_eq!(nearest_multiples(16, 3), vec![0, 5, 11]);
    }
}
