//! Chirp-Z transform over a linear frequency grid, via Bluestein's
//! reformulation as a circular convolution.
//!
//! Output point m is `Σ_n x[n]·exp(-j2π(f_start + m·f_step)·n·t_s)`. Writing
//! `n·m = (n² + m² − (m−n)²)/2` turns the sum into a convolution of the
//! chirp-premultiplied input with a fixed chirp kernel, which is evaluated
//! with FFTs of length `L = 2^ceil(log2(N1+N2−1))` — the smallest power of
//! two that makes the circular convolution equal the linear one.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use num_complex::Complex64;

use crate::metering::{self, MulClass};
use crate::{Error, Result};

/// Precomputed chirp tables for one `(n_in, n_out, f_step, t_s)` geometry.
/// `f_start` stays a per-evaluation parameter, so one plan serves a fine
/// search band centered anywhere.
#[derive(Debug, Clone)]
pub struct CztPlan {
    n_in: usize,
    n_out: usize,
    conv_len: usize,
    /// f_step · t_s, the chirp rate in cycles per sample².
    c: f64,
    t_s: f64,
    /// FFT of the wrapped chirp kernel exp(+jπ c n²).
    kernel_fft: Vec<Complex64>,
    /// exp(-jπ c m²) for m < n_out.
    post_chirp: Vec<Complex64>,
}

impl CztPlan {
    pub fn new(n_in: usize, n_out: usize, f_step: f64, t_s: f64) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::InvalidArgument(
                "chirp-Z transform needs non-empty input and output".into(),
            ));
        }
        if f_step <= 0.0 || f_step.is_nan() || t_s <= 0.0 || t_s.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "chirp-Z transform needs positive f_step and t_s, got {f_step} and {t_s}"
            )));
        }
        let conv_len = (n_in + n_out - 1).next_power_of_two();
        let c = f_step * t_s;

        // Kernel v(n) = exp(+jπ c n²) for n in (-(n_in-1))..=(n_out-1),
        // wrapped into an L-point circular buffer.
        let mut kernel = vec![Complex64::new(0.0, 0.0); conv_len];
        for (n, slot) in kernel.iter_mut().take(n_out).enumerate() {
            *slot = chirp(c, n as f64, 1.0);
        }
        for n in 1..n_in {
            kernel[conv_len - n] = chirp(c, n as f64, 1.0);
        }
        let kernel_fft = super::fft::with_plan(conv_len, |plan| plan.forward(&kernel))??;

        let post_chirp = (0..n_out).map(|m| chirp(c, m as f64, -1.0)).collect();

        Ok(CztPlan {
            n_in,
            n_out,
            conv_len,
            c,
            t_s,
            kernel_fft,
            post_chirp,
        })
    }

    /// The internal circular-convolution length `L`.
    pub fn conv_len(&self) -> usize {
        self.conv_len
    }

    /// Evaluate the transform of `x` on the grid starting at `f_start`.
    pub fn evaluate(&self, x: &[Complex64], f_start: f64) -> Result<Vec<Complex64>> {
        if x.len() != self.n_in {
            return Err(Error::InvalidArgument(format!(
                "chirp-Z plan is for {} input points, got {}",
                self.n_in,
                x.len()
            )));
        }

        // u(n) = x[n] · exp(-j(2π f_start t_s n + π c n²))
        let a = f_start * self.t_s;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.conv_len];
        for (n, (slot, xv)) in buf.iter_mut().zip(x).enumerate() {
            let nf = n as f64;
            let phase = (2.0 * a * nf + self.c * nf * nf).rem_euclid(2.0);
            *slot = xv * Complex64::cis(-PI * phase);
        }
        metering::record(MulClass::Pointwise, 4 * self.n_in as u64);

        let mut spectrum = super::fft::with_plan(self.conv_len, |plan| plan.forward(&buf))??;
        for (s, k) in spectrum.iter_mut().zip(&self.kernel_fft) {
            *s *= k;
        }
        metering::record(MulClass::Pointwise, 4 * self.conv_len as u64);
        let conv = super::fft::with_plan(self.conv_len, |plan| plan.inverse(&spectrum))??;

        let out = conv[..self.n_out]
            .iter()
            .zip(&self.post_chirp)
            .map(|(v, p)| v * p)
            .collect();
        metering::record(MulClass::Pointwise, 4 * self.n_out as u64);
        Ok(out)
    }
}

/// exp(sign · jπ c n²), with the quadratic phase reduced modulo one turn
/// before evaluation.
fn chirp(c: f64, n: f64, sign: f64) -> Complex64 {
    let phase = (c * n * n).rem_euclid(2.0);
    Complex64::cis(sign * PI * phase)
}

/// Cache key: (input length, output length, f_step bits, t_s bits).
type PlanKey = (usize, usize, u64, u64);

thread_local! {
    static CZT_CACHE: RefCell<HashMap<PlanKey, Rc<CztPlan>>> = RefCell::new(HashMap::new());
}

/// Chirp-Z transform of `x`: `n_out` spectral values on the grid
/// `f_start + m·f_step`, `m ∈ [0, n_out)`, for samples spaced `t_s` seconds.
///
/// Plans are cached per thread keyed on `(len, n_out, f_step, t_s)`, so
/// repeated fine-stage searches reuse their chirp tables.
pub fn czt(
    x: &[Complex64],
    f_start: f64,
    f_step: f64,
    n_out: usize,
    t_s: f64,
) -> Result<Vec<Complex64>> {
    let key = (x.len(), n_out, f_step.to_bits(), t_s.to_bits());
    let plan = CZT_CACHE.with(|cache| -> Result<Rc<CztPlan>> {
        let mut cache = cache.borrow_mut();
        if let Some(p) = cache.get(&key) {
            return Ok(Rc::clone(p));
        }
        let p = Rc::new(CztPlan::new(x.len(), n_out, f_step, t_s)?);
        cache.insert(key, Rc::clone(&p));
        Ok(p)
    })?;
    plan.evaluate(x, f_start)
}
