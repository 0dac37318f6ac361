//! Iterative radix-2 FFT with precomputed twiddles.
//!
//! Sizes are restricted to powers of two; every caller in this crate needs
//! exactly that, and it keeps the executed multiplication count equal to the
//! textbook `2·N·log2(N)` model that the complexity accounting uses.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::rc::Rc;

use num_complex::Complex64;

use crate::metering::{self, MulClass};
use crate::{Error, Result};

/// A reusable transform plan for one power-of-two size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    log2n: u32,
    // twiddles[k] = exp(-2πi k / n) for k < n/2
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        super::require_power_of_two(n, "FFT size")?;
        let twiddles = (0..n / 2)
            .map(|k| {
                let (s, c) = (-TAU * k as f64 / n as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Ok(FftPlan {
            n,
            log2n: n.trailing_zeros(),
            twiddles,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward DFT.
    pub fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        Ok(self.transform(x, false))
    }

    /// Inverse DFT scaled by 1/N, so `inverse(forward(x)) == x`.
    pub fn inverse(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        let mut out = self.transform(x, true);
        let scale = 1.0 / self.n as f64;
        for v in &mut out {
            *v *= scale;
        }
        metering::record(MulClass::InverseScale, 2 * self.n as u64);
        Ok(out)
    }

    fn check_len(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "FFT plan is for {} points, input has {}",
                self.n,
                x.len()
            )));
        }
        Ok(())
    }

    fn transform(&self, x: &[Complex64], conjugate_twiddles: bool) -> Vec<Complex64> {
        let n = self.n;
        let mut a = x.to_vec();
        bit_reverse_permute(&mut a, self.log2n);

        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let mut w = self.twiddles[j * stride];
                    if conjugate_twiddles {
                        w = w.conj();
                    }
                    let t = w * a[start + half + j];
                    let u = a[start + j];
                    a[start + j] = u + t;
                    a[start + half + j] = u - t;
                }
            }
            len <<= 1;
        }
        // (n/2)·log2(n) butterflies, one complex multiply (4 real) each.
        metering::record(MulClass::Fft, 2 * n as u64 * self.log2n as u64);
        a
    }
}

fn bit_reverse_permute(a: &mut [Complex64], log2n: u32) {
    if log2n == 0 {
        return;
    }
    let n = a.len();
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - log2n)) & (n - 1);
        if j > i {
            a.swap(i, j);
        }
    }
}

thread_local! {
    static PLAN_CACHE: RefCell<HashMap<usize, Rc<FftPlan>>> = RefCell::new(HashMap::new());
}

/// Run `f` with a cached plan for size `n`.
pub(crate) fn with_plan<R>(n: usize, f: impl FnOnce(&FftPlan) -> R) -> Result<R> {
    let plan = PLAN_CACHE.with(|cache| -> Result<Rc<FftPlan>> {
        let mut cache = cache.borrow_mut();
        if let Some(p) = cache.get(&n) {
            return Ok(Rc::clone(p));
        }
        let p = Rc::new(FftPlan::new(n)?);
        cache.insert(n, Rc::clone(&p));
        Ok(p)
    })?;
    Ok(f(&plan))
}

/// One-shot unnormalized forward DFT of a power-of-two-length input.
pub fn dft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    with_plan(x.len(), |plan| plan.forward(x))?
}

/// One-shot inverse of [`dft`] (scaled by 1/N).
pub fn idft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    with_plan(x.len(), |plan| plan.inverse(x))?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metering;

    fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|m| x[m] * Complex64::cis(-TAU * (k * m) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn rand_signal(n: usize, seed: u64) -> Vec<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![Complex64::new(0.0, 0.0); 4];
        x[0] = Complex64::new(1.0, 0.0);
        let y = dft(&x).unwrap();
        for v in y {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_concentrates_in_dc() {
        let x = vec![Complex64::new(1.0, 0.0); 4];
        let y = dft(&x).unwrap();
        assert!((y[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for v in &y[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_summation() {
        for &n in &[2usize, 8, 64] {
            let x = rand_signal(n, n as u64);
            let got = dft(&x).unwrap();
            let want = direct_dft(&x);
            let err: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).sum();
            let norm: f64 = want.iter().map(|v| v.norm()).sum();
            assert!(err / norm < 1e-10, "n={n}: relative error {}", err / norm);
        }
    }

    #[test]
    fn inverse_round_trips() {
        let x = rand_signal(128, 3);
        let y = idft(&dft(&x).unwrap()).unwrap();
        let err: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).sum();
        let norm: f64 = x.iter().map(|v| v.norm()).sum();
        assert!(err / norm < 1e-10);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let x = vec![Complex64::new(1.0, 0.0); 12];
        assert!(matches!(dft(&x), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn executed_multiplications_match_radix2_model() {
        let x = rand_signal(512, 9);
        metering::reset();
        dft(&x).unwrap();
        assert_eq!(metering::snapshot().fft, 2 * 512 * 9);
    }
}
