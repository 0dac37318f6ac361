//! Shared helpers for the integration suites: direct-summation transform
//! oracles and signal builders. The oracles are deliberately naive O(N·M)
//! loops with no shared code with the library's transform implementations.

use foe_core::channel::apply_carrier;
use foe_core::qam::SymbolSequence;
use foe_core::Complex64;
use std::f64::consts::TAU;

/// O(N²) forward DFT by direct summation.
pub fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|m| x[m] * Complex64::cis(-TAU * (k as f64) * (m as f64) / n as f64))
                .sum()
        })
        .collect()
}

/// Direct evaluation of the chirp-Z grid `f_start + m·f_step`.
pub fn direct_czt(
    x: &[Complex64],
    f_start: f64,
    f_step: f64,
    n_out: usize,
    t_s: f64,
) -> Vec<Complex64> {
    (0..n_out)
        .map(|m| {
            let f = f_start + m as f64 * f_step;
            x.iter()
                .enumerate()
                .map(|(n, v)| v * Complex64::cis(-TAU * f * n as f64 * t_s))
                .sum()
        })
        .collect()
}

/// L2 relative error between two complex vectors.
pub fn rel_err(got: &[Complex64], want: &[Complex64]) -> f64 {
    let err: f64 = got.iter().zip(want).map(|(a, b)| (a - b).norm_sqr()).sum();
    let norm: f64 = want.iter().map(|v| v.norm_sqr()).sum();
    (err / norm).sqrt()
}

/// A unit-amplitude complex exponential at offset `f_d`, `count` symbols at
/// `1/t_s` Baud.
pub fn pure_tone(count: usize, f_d: f64, t_s: f64, phase: f64) -> SymbolSequence {
    let carrier = SymbolSequence::new(vec![Complex64::new(1.0, 0.0); count], t_s).unwrap();
    apply_carrier(&carrier, f_d, phase)
}
