//! Transform kernels shared by all estimators: a radix-2 FFT, the all-phase
//! FFT (window, fold, DFT), a Bluestein chirp-Z transform for narrow-band
//! fine grids, and a mix/decimate/FFT zoom refinement stage.

mod apfft;
mod czt;
mod fft;
mod zoom;

pub use apfft::{apfft, AllPhaseWindow, ApFftSpectrum};
pub use czt::{czt, CztPlan};
pub use fft::{dft, idft, FftPlan};
pub use zoom::zoom_refine;

use num_complex::Complex64;

/// Locate the magnitude argmax of a spectrum, reporting it as a signed bin in
/// `[-n/2, n/2)`. Bins are scanned in the order `0, 1, -1, 2, -2, …, -n/2`,
/// and only a strictly larger magnitude displaces the current best, so ties
/// resolve toward the smaller |bin| (and to the positive bin between `±k`).
///
/// Returns `(signed_bin, magnitude)`.
pub fn signed_argmax(bins: &[Complex64]) -> (i64, f64) {
    signed_argmax_by(bins.len(), |idx| bins[idx].norm())
}

/// [`signed_argmax`] over an arbitrary per-index magnitude, same scan order
/// and tie-breaking.
pub fn signed_argmax_by(n: usize, magnitude: impl Fn(usize) -> f64) -> (i64, f64) {
    debug_assert!(n > 0);
    let half = (n / 2) as i64;
    let mut best_k = 0i64;
    let mut best_mag = magnitude(0);
    let consider = |k: i64, best_k: &mut i64, best_mag: &mut f64| {
        let mag = magnitude(signed_bin_index(k, n));
        if mag > *best_mag {
            *best_mag = mag;
            *best_k = k;
        }
    };
    for k in 1..half {
        consider(k, &mut best_k, &mut best_mag);
        consider(-k, &mut best_k, &mut best_mag);
    }
    if half > 0 {
        consider(-half, &mut best_k, &mut best_mag);
    }
    (best_k, best_mag)
}

/// Map a signed bin in `[-n/2, n/2)` (or any congruent value) to the storage
/// index of an `n`-point spectrum.
pub fn signed_bin_index(k: i64, n: usize) -> usize {
    let n = n as i64;
    (k.rem_euclid(n)) as usize
}

pub(crate) fn require_power_of_two(n: usize, what: &str) -> crate::Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(crate::Error::InvalidArgument(format!(
            "{what} must be a power of two, got {n}"
        )));
    }
    Ok(())
}
