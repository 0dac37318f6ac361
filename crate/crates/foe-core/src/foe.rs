//! The frequency-offset estimators.
//!
//! All spectrum-based estimators share the same front end: 4th-power the
//! received symbols to collapse the modulation into a tone at `4·f_d`, then
//! locate that tone. They differ in how they refine the location beyond the
//! coarse FFT grid:
//!
//! * [`fft_foe`] stops at the coarse bin (picket-fence limited);
//! * [`apfft_foe`] takes the all-phase FFT of two blocks whose centers are N
//!   samples apart; the peak-bin phase difference equals `2π·δ` with `δ` the
//!   fractional bin offset, so one phase subtraction replaces a second
//!   search stage;
//! * [`czt_foe`] scans a chirp-Z fine grid spanning two coarse bins around
//!   the peak;
//! * [`zoomfft_foe`] mixes the peak to baseband, decimates, and interpolates
//!   a half-size FFT;
//! * [`diff_foe`] is the classic differential-phase baseline with no
//!   spectral stage at all.
//!
//! Because the tone sits at four times the offset, every estimator is
//! unambiguous only for `|f_d| ≤ symbol_rate/8`; estimates are reported in
//! that principal range and [`wrapped_error`] compares frequencies modulo
//! the `symbol_rate/4` equivalence that the 4th power imposes.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::metering::{self, MulClass};
use crate::qam::{fourth_power_slice, SymbolSequence};
use crate::spectral::{apfft, signed_argmax, signed_argmax_by, signed_bin_index, AllPhaseWindow};
use crate::{Error, Result};

/// Estimator identifiers used by the harness, CSV output, and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fft,
    ApFft,
    Czt,
    ZoomFft,
    Diff,
}

impl Algorithm {
    /// All five estimators, in the order the harness reports them.
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Fft,
        Algorithm::ApFft,
        Algorithm::Czt,
        Algorithm::ZoomFft,
        Algorithm::Diff,
    ];
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Algorithm::Fft => "fft",
            Algorithm::ApFft => "apfft",
            Algorithm::Czt => "czt",
            Algorithm::ZoomFft => "zoomfft",
            Algorithm::Diff => "diff",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fft" => Ok(Algorithm::Fft),
            "apfft" => Ok(Algorithm::ApFft),
            "czt" => Ok(Algorithm::Czt),
            "zoomfft" => Ok(Algorithm::ZoomFft),
            "diff" => Ok(Algorithm::Diff),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}' (expected fft, apfft, czt, zoomfft, or diff)"
            ))),
        }
    }
}

/// Block sizes for the estimators: `n1` is the first-stage block, `n2` the
/// second-stage size of the two-stage pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub n1: usize,
    pub n2: usize,
}

impl EstimatorParams {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for (n, what) in [(n1, "N1"), (n2, "N2")] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!(
                    "{what} must be a power of two of at least 2, got {n}"
                )));
            }
        }
        Ok(EstimatorParams { n1, n2 })
    }
}

/// Outcome of one estimation.
///
/// `f_coarse` is the coarse-stage tone frequency in the 4th-power domain
/// (`k_hat / (N1·T_s)`, before the division by four). For the spectral
/// estimators `f_hat·4·N1·T_s = k_hat + delta` holds exactly; [`diff_foe`]
/// has no spectral stage and reports `k_hat = 0`, `delta = 0`, and
/// `f_coarse = 4·f_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoeResult {
    pub algorithm: Algorithm,
    /// Estimated frequency offset in Hz, in `(-R_s/8, R_s/8]` (up to half a
    /// bin of slack at the range edge).
    pub f_hat: f64,
    /// Coarse-stage estimate of the 4th-power tone in Hz.
    pub f_coarse: f64,
    /// Signed peak bin in `[-N1/2, N1/2]`; the upper edge is reachable only
    /// by the fine-stage estimators within half a bin of the range boundary.
    pub k_hat: i64,
    /// Fractional bin correction in `(-0.5, 0.5]`.
    pub delta: f64,
}

/// Difference `f_hat − f_d` reduced modulo `symbol_rate/4` into
/// `(-R_s/8, R_s/8]` — the principal error of a 4th-power estimator, which
/// cannot distinguish offsets `symbol_rate/4` apart.
pub fn wrapped_error(f_hat: f64, f_d: f64, symbol_rate: f64) -> f64 {
    let period = symbol_rate / 4.0;
    let mut e = (f_hat - f_d).rem_euclid(period);
    if e > period / 2.0 {
        e -= period;
    }
    e
}

/// Run the estimator selected by `algorithm`.
pub fn estimate(
    algorithm: Algorithm,
    rx: &SymbolSequence,
    params: &EstimatorParams,
) -> Result<FoeResult> {
    match algorithm {
        Algorithm::Fft => fft_foe(rx, params),
        Algorithm::ApFft => apfft_foe(rx, params),
        Algorithm::Czt => czt_foe(rx, params),
        Algorithm::ZoomFft => zoomfft_foe(rx, params),
        Algorithm::Diff => diff_foe(rx),
    }
}

fn require_samples(rx: &SymbolSequence, needed: usize) -> Result<()> {
    if rx.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: rx.len(),
        });
    }
    Ok(())
}

/// 4th power + N1-point FFT + signed argmax. Returns the 4th-powered block
/// so the two-stage estimators can feed their fine stage without repeating
/// the work.
fn coarse_stage(rx: &SymbolSequence, n1: usize) -> Result<(Vec<Complex64>, i64)> {
    require_samples(rx, n1)?;
    let q = fourth_power_slice(&rx.samples[..n1]);
    let bins = crate::spectral::dft(&q)?;
    let (k, mag) = signed_argmax(&bins);
    if mag == 0.0 {
        return Err(Error::DegenerateInput(
            "coarse spectrum is identically zero".into(),
        ));
    }
    Ok((q, k))
}

/// Wrap a phase into `(-π, π]`.
fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Wrap a signed bin into `[-n/2, n/2)`.
fn wrap_bin(k: i64, n: usize) -> i64 {
    let n = n as i64;
    let mut k = k.rem_euclid(n);
    if k >= n / 2 {
        k -= n;
    }
    k
}

/// Express a 4th-power-domain frequency as `(k, delta)` with integer `k` and
/// `delta ∈ (-0.5, 0.5]` such that `position = k + delta` in bins.
fn split_bins(position: f64) -> (i64, f64) {
    let mut k = position.round();
    let mut delta = position - k;
    if delta <= -0.5 {
        // round() sent a half-way-down case up; keep delta half-open.
        k -= 1.0;
        delta += 1.0;
    }
    (k as i64, delta)
}

/// Single-stage FFT estimator: the coarse peak alone, quantized to the
/// `1/(4·N1·T_s)` grid.
pub fn fft_foe(rx: &SymbolSequence, params: &EstimatorParams) -> Result<FoeResult> {
    let n1 = params.n1;
    let (_, k) = coarse_stage(rx, n1)?;
    let t_s = rx.t_s;
    Ok(FoeResult {
        algorithm: Algorithm::Fft,
        f_hat: k as f64 / (4.0 * n1 as f64 * t_s),
        f_coarse: k as f64 / (n1 as f64 * t_s),
        k_hat: k,
        delta: 0.0,
    })
}

/// Two-block all-phase FFT estimator.
///
/// Consumes `3·N1 − 1` symbols: two overlapping 2N1−1 windows whose central
/// samples are N1 apart. The combined power of the two spectra supplies the
/// coarse peak; the phase of that bin in the two blocks differs by exactly
/// `2π·4·f_d·N1·T_s (mod 2π) = 2π·δ`, which recovers the fractional bin.
/// The phase is read from the sum of the peak bin and its stronger
/// neighbor: every bin of an all-phase spectrum carries the central
/// sample's phase behind a non-negative kernel gain, so the pairing leaves
/// noise-free phases untouched while roughly halving the additive-noise
/// jitter when the tone sits between two bins.
///
/// A phase difference over a delay of N1 samples measures the tone position
/// only modulo one bin, so near a half-bin boundary, noise can push the
/// measured `δ` across the wrap and leave it attached to the wrong integer
/// bin — a full-bin error — and the argmax itself can step to the neighbor
/// bin. The integer bin is therefore resolved against the phase of the
/// lag-N1/4 autocorrelation of the 4th-powered block, which locates the
/// tone unambiguously over a ±2-bin span. Noise-free estimates are
/// unaffected.
pub fn apfft_foe(rx: &SymbolSequence, params: &EstimatorParams) -> Result<FoeResult> {
    let n = params.n1;
    require_samples(rx, 3 * n - 1)?;
    let t_s = rx.t_s;

    let q = fourth_power_slice(&rx.samples[..3 * n - 1]);
    let window = AllPhaseWindow::new(n)?;
    let block1 = apfft(&q[..2 * n - 1], &window, t_s)?;
    let block2 = apfft(&q[n..3 * n - 1], &window, t_s)?;

    // Combined two-block power for the peak search: a self-noise fade deep
    // enough to bury the tone must then hit both half-overlapped blocks at
    // once.
    let power = |idx: usize| block1.bins[idx].norm_sqr() + block2.bins[idx].norm_sqr();
    let (k_peak, peak_mag) = signed_argmax_by(n, power);
    if peak_mag == 0.0 {
        return Err(Error::DegenerateInput(
            "all-phase spectrum is identically zero".into(),
        ));
    }

    // Peak bin plus its stronger neighbor, the same pair in both blocks so
    // the phase difference compares like with like.
    let idx = signed_bin_index(k_peak, n);
    let left = signed_bin_index(k_peak - 1, n);
    let right = signed_bin_index(k_peak + 1, n);
    let adj = if power(right) >= power(left) {
        right
    } else {
        left
    };
    let theta_0 = (block1.bins[idx] + block1.bins[adj]).arg();
    let theta_n = (block2.bins[idx] + block2.bins[adj]).arg();
    let delta = wrap_phase(theta_n - theta_0) / TAU;

    let k_hat = wrap_bin(resolve_integer_bin(&q, k_peak, delta, n), n);

    let scale = 4.0 * n as f64 * t_s;
    Ok(FoeResult {
        algorithm: Algorithm::ApFft,
        f_hat: (k_hat as f64 + delta) / scale,
        f_coarse: k_hat as f64 / (n as f64 * t_s),
        k_hat,
        delta,
    })
}

/// Pick the integer bin `k_peak + c`, `c ∈ {-1, 0, +1}`, most consistent
/// with the lag-L autocorrelation phase of the 4th-powered sequence.
///
/// `arg Σ q[m+L]·conj(q[m]) = 2π·position·L/N (mod 2π)` locates the tone
/// modulo `N/L` bins; with `L = N/4` that is a ±2-bin unambiguous span —
/// enough to arbitrate the ±1-bin ambiguity of the phase-difference stage,
/// and far more robust than magnitude ratios of individual bins.
fn resolve_integer_bin(q: &[Complex64], k_peak: i64, delta: f64, n: usize) -> i64 {
    let lag = (n / 4).max(1);
    let span = n as f64 / lag as f64;
    let sum: Complex64 = q.windows(lag + 1).map(|w| w[lag] * w[0].conj()).sum();
    metering::record(MulClass::Pointwise, 4 * (q.len() - lag) as u64);
    if sum.norm() == 0.0 {
        return k_peak;
    }
    let measured = sum.arg() / TAU * span;
    let dist = |candidate: f64| {
        let mut d = (candidate - measured).rem_euclid(span);
        if d > span / 2.0 {
            d -= span;
        }
        d.abs()
    };
    [k_peak - 1, k_peak, k_peak + 1]
        .into_iter()
        .min_by(|a, b| {
            dist(*a as f64 + delta)
                .partial_cmp(&dist(*b as f64 + delta))
                .unwrap()
        })
        .unwrap()
}

/// FFT coarse stage + chirp-Z fine grid spanning two coarse bins centered on
/// the peak, with `N2` points of spacing `2/(N1·N2·T_s)`.
pub fn czt_foe(rx: &SymbolSequence, params: &EstimatorParams) -> Result<FoeResult> {
    let n1 = params.n1;
    let n2 = params.n2;
    let (q, k) = coarse_stage(rx, n1)?;
    let t_s = rx.t_s;

    let coarse_bin = 1.0 / (n1 as f64 * t_s);
    let f_center = k as f64 * coarse_bin;
    let f_step = 2.0 * coarse_bin / n2 as f64;
    let f_start = f_center - coarse_bin;

    let fine = crate::spectral::czt(&q, f_start, f_step, n2, t_s)?;
    let (m, mag) = fine
        .iter()
        .enumerate()
        .map(|(m, v)| (m, v.norm()))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    if mag == 0.0 {
        return Err(Error::DegenerateInput(
            "fine-stage spectrum is identically zero".into(),
        ));
    }

    let f4 = f_start + m as f64 * f_step;
    let position = wrap_bin_position(f4 * n1 as f64 * t_s, n1);
    let (k_hat, delta) = split_bins(position);
    let scale = 4.0 * n1 as f64 * t_s;
    Ok(FoeResult {
        algorithm: Algorithm::Czt,
        f_hat: (k_hat as f64 + delta) / scale,
        f_coarse: k as f64 * coarse_bin,
        k_hat,
        delta,
    })
}

/// FFT coarse stage + zoom refinement around the peak. Requires
/// `N1 = 2·N2`.
pub fn zoomfft_foe(rx: &SymbolSequence, params: &EstimatorParams) -> Result<FoeResult> {
    let n1 = params.n1;
    let n2 = params.n2;
    if n1 != 2 * n2 {
        return Err(Error::InvalidArgument(format!(
            "zoom estimator needs N1 = 2·N2, got N1={n1}, N2={n2}"
        )));
    }
    let (q, k) = coarse_stage(rx, n1)?;
    let t_s = rx.t_s;

    let coarse_bin = 1.0 / (n1 as f64 * t_s);
    let f4 = crate::spectral::zoom_refine(&q, k as f64 * coarse_bin, n2, t_s)?;

    let position = wrap_bin_position(f4 * n1 as f64 * t_s, n1);
    let (k_hat, delta) = split_bins(position);
    let scale = 4.0 * n1 as f64 * t_s;
    Ok(FoeResult {
        algorithm: Algorithm::ZoomFft,
        f_hat: (k_hat as f64 + delta) / scale,
        f_coarse: k as f64 * coarse_bin,
        k_hat,
        delta,
    })
}

/// Wrap a 4th-power-domain position in bins into `[-n/2, n/2]`-centered
/// principal range `(-n/2 - 1/2, n/2 + 1/2]` consistent with `split_bins`
/// producing `k ∈ [-n/2, n/2)`.
fn wrap_bin_position(position: f64, n: usize) -> f64 {
    let n = n as f64;
    let mut p = position.rem_euclid(n);
    if p >= n / 2.0 {
        p -= n;
    }
    p
}

/// Differential-phase baseline:
/// `f_hat = arg(Σ_n (rx[n+1]·conj(rx[n]))⁴) / (8π·T_s)`.
pub fn diff_foe(rx: &SymbolSequence) -> Result<FoeResult> {
    require_samples(rx, 2)?;
    let sum: Complex64 = rx
        .samples
        .windows(2)
        .map(|w| {
            let d = w[1] * w[0].conj();
            let sq = d * d;
            sq * sq
        })
        .sum();
    let f_hat = sum.arg() / (TAU * 4.0 * rx.t_s);
    Ok(FoeResult {
        algorithm: Algorithm::Diff,
        f_hat,
        f_coarse: 4.0 * f_hat,
        k_hat: 0,
        delta: 0.0,
    })
}
