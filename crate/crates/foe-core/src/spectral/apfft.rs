//! All-phase FFT: an N-bin spectrum of a 2N−1 sample stretch whose bin
//! phases all equal the phase of the central sample.
//!
//! The 2N−1 samples around the sample of interest are weighted by a
//! convolution window, the weighted samples an interval of N apart are added
//! to fold the stretch down to N values, and an N-point DFT of the fold is
//! taken. Because the DFT exponential is N-periodic, the fold is exact: the
//! result equals the windowed 2N−1-point spectrum evaluated on the N-bin
//! grid. With the triangular window (the normalized self-convolution of a
//! length-N rectangular window) a pure tone produces a squared Dirichlet
//! magnitude profile, and — the property everything else here builds on —
//! every bin carries the central sample's phase exactly, for any fractional
//! bin offset of the tone.

use num_complex::Complex64;

use crate::metering::{self, MulClass};
use crate::{Error, Result};

/// Symmetric window of 2N−1 weights indexed by offset `i ∈ [-(N-1), N-1]`
/// from the central sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AllPhaseWindow {
    n: usize,
    // weights[i + (n-1)] holds w(i)
    weights: Vec<f64>,
}

impl AllPhaseWindow {
    /// Triangular window `w(i) = (N − |i|) / N²`. The weights sum to one and
    /// `w(i) = w(-i)` exactly.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "all-phase window needs a block size of at least 2, got {n}"
            )));
        }
        super::require_power_of_two(n, "all-phase block size")?;
        let denom = (n * n) as f64;
        let weights = (0..2 * n - 1)
            .map(|idx| {
                let offset = idx as i64 - (n as i64 - 1);
                (n as i64 - offset.abs()) as f64 / denom
            })
            .collect();
        Ok(AllPhaseWindow { n, weights })
    }

    /// Block size N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The 2N−1 weights, ordered from offset −(N−1) to N−1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Spectrum produced by [`apfft`].
#[derive(Debug, Clone)]
pub struct ApFftSpectrum {
    /// N complex bins; bin k corresponds to frequency `k / (N·t_s)`.
    pub bins: Vec<Complex64>,
    /// Block size N.
    pub n: usize,
    /// Bin spacing `1 / (N·t_s)` in Hz.
    pub bin_resolution: f64,
}

/// All-phase FFT of 2N−1 samples centered on `x[N-1]`.
///
/// `t_s` is the sample spacing in seconds and only sets the reported
/// `bin_resolution`; the transform itself is dimensionless.
pub fn apfft(x: &[Complex64], window: &AllPhaseWindow, t_s: f64) -> Result<ApFftSpectrum> {
    let n = window.n();
    let need = 2 * n - 1;
    if x.len() != need {
        return Err(Error::InvalidArgument(format!(
            "all-phase FFT of block size {n} needs exactly {need} samples, got {}",
            x.len()
        )));
    }
    if t_s <= 0.0 || t_s.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "sample duration must be positive, got {t_s}"
        )));
    }

    let weights = window.weights();
    let weighted: Vec<Complex64> = x.iter().zip(weights).map(|(v, w)| v * *w).collect();
    metering::record(MulClass::Window, 2 * need as u64);

    // Fold offsets m and m−N onto the same DFT input slot. weighted[n-1+m]
    // holds offset m, weighted[m-1] holds offset m−N.
    let mut folded = Vec::with_capacity(n);
    folded.push(weighted[n - 1]);
    for m in 1..n {
        folded.push(weighted[n - 1 + m] + weighted[m - 1]);
    }

    let bins = super::fft::with_plan(n, |plan| plan.forward(&folded))??;
    Ok(ApFftSpectrum {
        bins,
        n,
        bin_resolution: 1.0 / (n as f64 * t_s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metering;
    use crate::spectral::{dft, signed_argmax, signed_bin_index};
    use std::f64::consts::TAU;

    const T_S: f64 = 1.0 / 28e9;

    /// Tone sampled at offsets −(N−1)..=N−1 from the center, so the central
    /// sample has phase `theta0` by construction.
    fn tone_centered(n: usize, cycles_per_block: f64, amp: f64, theta0: f64) -> Vec<Complex64> {
        (0..2 * n - 1)
            .map(|idx| {
                let i = idx as f64 - (n as f64 - 1.0);
                Complex64::from_polar(amp, TAU * cycles_per_block * i / n as f64 + theta0)
            })
            .collect()
    }

    #[test]
    fn window_n2_matches_formula() {
        let w = AllPhaseWindow::new(2).unwrap();
        assert_eq!(w.weights(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn window_n4_is_triangle_over_16() {
        let w = AllPhaseWindow::new(4).unwrap();
        let want: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0]
            .iter()
            .map(|v| v / 16.0)
            .collect();
        assert_eq!(w.weights(), &want[..]);
        let sum: f64 = w.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_symmetry_and_unit_sum() {
        for &n in &[2usize, 8, 64, 512] {
            let w = AllPhaseWindow::new(n).unwrap();
            let ws = w.weights();
            for i in 0..ws.len() {
                assert_eq!(ws[i], ws[ws.len() - 1 - i]);
            }
            let sum: f64 = ws.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn window_rejects_bad_sizes() {
        assert!(AllPhaseWindow::new(1).is_err());
        assert!(AllPhaseWindow::new(12).is_err());
    }

    #[test]
    fn on_bin_tone_is_a_clean_peak() {
        let n = 64;
        let (amp, theta0) = (1.7, 0.9);
        let x = tone_centered(n, 5.0, amp, theta0);
        let w = AllPhaseWindow::new(n).unwrap();
        let spec = apfft(&x, &w, T_S).unwrap();
        let want = Complex64::from_polar(amp, theta0);
        assert!((spec.bins[5] - want).norm() < 1e-10);
        for (k, bin) in spec.bins.iter().enumerate() {
            if k != 5 {
                assert!(bin.norm() < 1e-10, "bin {k} = {bin}");
            }
        }
        assert!((spec.bin_resolution - 1.0 / (n as f64 * T_S)).abs() < 1.0);
    }

    #[test]
    fn peak_phase_equals_central_sample_phase_off_bin() {
        let n = 256;
        let theta0 = -1.234;
        for &frac in &[-0.45, -0.3, 0.0, 0.3, 0.45] {
            let x = tone_centered(n, 9.0 + frac, 2.0, theta0);
            let w = AllPhaseWindow::new(n).unwrap();
            let spec = apfft(&x, &w, T_S).unwrap();
            let (k, _) = signed_argmax(&spec.bins);
            assert_eq!(k, 9);
            let phase = spec.bins[signed_bin_index(k, n)].arg();
            assert!(
                (phase - theta0).abs() < 1e-9,
                "frac={frac}: phase {phase} vs {theta0}"
            );
        }
    }

    #[test]
    fn magnitude_is_squared_dirichlet() {
        // Ratio of the apFFT peak to the plain-DFT peak of the same tone
        // equals D(delta)/N, with D the Dirichlet kernel.
        let n = 128usize;
        let delta = 0.3;
        let x = tone_centered(n, 7.0 + delta, 1.0, 0.4);
        let w = AllPhaseWindow::new(n).unwrap();
        let ap = apfft(&x, &w, T_S).unwrap();

        let plain = dft(&x[..n]).unwrap();
        let ap_peak = ap.bins[7].norm();
        let dft_peak = plain[7].norm();

        let dirichlet = |d: f64| {
            (std::f64::consts::PI * d).sin()
                / (n as f64 * (std::f64::consts::PI * d / n as f64).sin())
        };
        let want = dirichlet(delta).abs() / n as f64;
        let got = ap_peak / dft_peak;
        assert!(
            (got - want).abs() / want < 1e-9,
            "ratio {got} vs analytic {want}"
        );
    }

    #[test]
    fn sidelobe_suppression_squares_the_dft_ratio() {
        // Half-bin tone: peak-to-first-sidelobe of the apFFT spectrum is the
        // square of the plain DFT's ratio.
        let n = 128usize;
        let x = tone_centered(n, 20.5, 1.0, 0.0);
        let w = AllPhaseWindow::new(n).unwrap();
        let ap = apfft(&x, &w, T_S).unwrap();
        let plain = dft(&x[..n]).unwrap();

        // peak at bin 20 (tie with 21 resolved by magnitude scan order);
        // first sidelobe at bin 19.
        let ap_ratio = ap.bins[20].norm() / ap.bins[19].norm();
        let dft_ratio = plain[20].norm() / plain[19].norm();
        assert!(
            (ap_ratio - dft_ratio * dft_ratio).abs() / ap_ratio < 0.01,
            "apFFT {ap_ratio} vs DFT² {}",
            dft_ratio * dft_ratio
        );
    }

    #[test]
    fn linear_in_the_input() {
        let n = 32;
        let w = AllPhaseWindow::new(n).unwrap();
        let x = tone_centered(n, 3.2, 1.0, 0.3);
        let y = tone_centered(n, 7.9, 0.7, -1.1);
        let (a, b) = (Complex64::new(0.8, -0.2), Complex64::new(-1.3, 0.4));
        let combined: Vec<Complex64> = x.iter().zip(&y).map(|(xv, yv)| a * xv + b * yv).collect();

        let sx = apfft(&x, &w, T_S).unwrap();
        let sy = apfft(&y, &w, T_S).unwrap();
        let sc = apfft(&combined, &w, T_S).unwrap();
        for k in 0..n {
            let want = a * sx.bins[k] + b * sy.bins[k];
            assert!((sc.bins[k] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn windowing_cost_is_2_times_2n_minus_1() {
        let n = 512;
        let x = tone_centered(n, 3.0, 1.0, 0.0);
        let w = AllPhaseWindow::new(n).unwrap();
        metering::reset();
        apfft(&x, &w, T_S).unwrap();
        let counts = metering::snapshot();
        assert_eq!(counts.window, 2 * (2 * n as u64 - 1));
        assert_eq!(counts.fft, 2 * n as u64 * 9);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let w = AllPhaseWindow::new(8).unwrap();
        let x = vec![Complex64::new(1.0, 0.0); 14];
        assert!(matches!(
            apfft(&x, &w, T_S),
            Err(crate::Error::InvalidArgument(_))
        ));
    }
}
