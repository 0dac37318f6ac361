//! Zoom refinement around a coarse spectral peak: mix the band of interest
//! down to baseband, low-pass with a 2-tap averager, decimate by two, take a
//! half-size FFT, and interpolate the peak to sub-bin accuracy.
//!
//! The per-call budget in real multiplications is `4·N1` for the mix,
//! `4·N1` for the filter, and `2·N2·log2(N2)` for the FFT; the O(1) peak
//! interpolation is not charged.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::metering::{self, MulClass};
use crate::spectral::{signed_argmax, signed_bin_index};
use crate::{Error, Result};

/// Refine a tone frequency near `f_center` from `x` (N1 samples spaced `t_s`
/// seconds), returning the interpolated peak frequency in Hz.
///
/// Requires `N1 = 2·n_out`. The decimated FFT has the same bin width as an
/// N1-point transform of the original record, `1/(N1·t_s)`; sub-bin accuracy
/// comes from magnitude-ratio interpolation of the peak and its two
/// neighbors, which is exact for the rectangular-window Dirichlet kernel.
pub fn zoom_refine(x: &[Complex64], f_center: f64, n_out: usize, t_s: f64) -> Result<f64> {
    let n_in = x.len();
    if n_in != 2 * n_out {
        return Err(Error::InvalidArgument(format!(
            "zoom refinement needs N1 = 2·N2, got N1={n_in}, N2={n_out}"
        )));
    }
    super::require_power_of_two(n_out, "zoom output size")?;
    if t_s <= 0.0 || t_s.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "sample duration must be positive, got {t_s}"
        )));
    }

    // Mix f_center down to DC.
    let mixed: Vec<Complex64> = x
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let phase = (f_center * t_s * n as f64).rem_euclid(1.0);
            v * Complex64::cis(-TAU * phase)
        })
        .collect();
    metering::record(MulClass::Mix, 4 * n_in as u64);

    // 2-tap averaging low-pass z(n) = 0.5·y(n) + 0.5·y(n-1), applied
    // circularly over the block; only the first sample sees the wrap.
    let mut filtered = Vec::with_capacity(n_in);
    filtered.push(0.5 * mixed[0] + 0.5 * mixed[n_in - 1]);
    for n in 1..n_in {
        filtered.push(0.5 * mixed[n] + 0.5 * mixed[n - 1]);
    }
    metering::record(MulClass::Filter, 4 * n_in as u64);

    // Decimate by two and transform; sample spacing is now 2·t_s.
    let decimated: Vec<Complex64> = filtered.iter().step_by(2).copied().collect();
    let bins = super::fft::with_plan(n_out, |plan| plan.forward(&decimated))??;

    let (peak, peak_mag) = signed_argmax(&bins);
    if peak_mag == 0.0 {
        return Err(Error::DegenerateInput(
            "zoom band has an all-zero spectrum".into(),
        ));
    }

    let left = bins[signed_bin_index(peak - 1, n_out)].norm();
    let right = bins[signed_bin_index(peak + 1, n_out)].norm();
    let frac = dirichlet_fraction(left, peak_mag, right);

    let bin_width = 1.0 / (n_in as f64 * t_s);
    Ok(f_center + (peak as f64 + frac) * bin_width)
}

/// Fractional peak offset from three adjacent bin magnitudes of a Dirichlet
/// kernel. With the tone at `delta` from the center bin, the larger neighbor
/// obeys `|Y±1|/|Y0| = |delta|/(1−|delta|)`, so `delta = r/(1+r)`.
fn dirichlet_fraction(left: f64, center: f64, right: f64) -> f64 {
    if right >= left {
        let r = right / center;
        r / (1.0 + r)
    } else {
        let r = left / center;
        -r / (1.0 + r)
    }
}
