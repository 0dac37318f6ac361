//! Channel impairments: carrier frequency offset rotation, Wiener laser
//! phase noise, and OSNR-calibrated additive white Gaussian noise.
//!
//! One sample per symbol throughout. OSNR is converted to per-symbol SNR on
//! the single-polarization convention over a configurable reference
//! bandwidth (0.1 nm ≈ 12.5 GHz by default).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::qam::SymbolSequence;
use crate::{Error, Result};

/// Default OSNR reference bandwidth in Hz (0.1 nm at 1550 nm).
pub const DEFAULT_REFERENCE_BANDWIDTH: f64 = 12.5e9;

/// Bundle of channel settings validated as a whole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Carrier frequency offset in Hz.
    pub f_d: f64,
    /// Symbol rate in Baud.
    pub symbol_rate: f64,
    /// Transmitter + local-oscillator linewidth sum in Hz.
    pub combined_linewidth: f64,
    /// OSNR in dB over `reference_bandwidth`; `None` disables AWGN.
    pub osnr_db: Option<f64>,
    /// OSNR reference bandwidth in Hz.
    pub reference_bandwidth: f64,
}

impl ChannelParams {
    pub fn new(
        f_d: f64,
        symbol_rate: f64,
        combined_linewidth: f64,
        osnr_db: Option<f64>,
    ) -> Result<Self> {
        let params = ChannelParams {
            f_d,
            symbol_rate,
            combined_linewidth,
            osnr_db,
            reference_bandwidth: DEFAULT_REFERENCE_BANDWIDTH,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbol_rate <= 0.0 || self.symbol_rate.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "symbol rate must be positive, got {}",
                self.symbol_rate
            )));
        }
        if self.combined_linewidth < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "linewidth cannot be negative, got {}",
                self.combined_linewidth
            )));
        }
        if self.reference_bandwidth <= 0.0 || self.reference_bandwidth.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "reference bandwidth must be positive, got {}",
                self.reference_bandwidth
            )));
        }
        if self.f_d.abs() >= self.symbol_rate / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "|f_d| = {} exceeds half the symbol rate",
                self.f_d.abs()
            )));
        }
        Ok(())
    }

    /// Symbol duration in seconds.
    pub fn t_s(&self) -> f64 {
        1.0 / self.symbol_rate
    }
}

/// Rotate sample n by `exp(j(2π f_d n T_s + initial_phase))`, n starting
/// at 0. Magnitudes are preserved exactly.
pub fn apply_carrier(seq: &SymbolSequence, f_d: f64, initial_phase: f64) -> SymbolSequence {
    let t_s = seq.t_s;
    let samples = seq
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let cycles = (f_d * t_s * n as f64).rem_euclid(1.0);
            s * Complex64::cis(TAU * cycles + initial_phase)
        })
        .collect();
    SymbolSequence { samples, t_s }
}

/// Multiply sample n by `exp(jφ_n)` where `φ_0 = 0` and the increments
/// `φ_{n+1} − φ_n` are i.i.d. zero-mean Gaussian with variance
/// `2π·combined_linewidth·T_s` — a discrete Wiener process.
pub fn apply_phase_noise(
    seq: &SymbolSequence,
    combined_linewidth: f64,
    seed: u64,
) -> Result<SymbolSequence> {
    if combined_linewidth < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "linewidth cannot be negative, got {combined_linewidth}"
        )));
    }
    if combined_linewidth == 0.0 {
        return Ok(seq.clone());
    }
    let sigma = (TAU * combined_linewidth * seq.t_s).sqrt();
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("phase noise setup: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut phase = 0.0;
    let samples = seq
        .samples
        .iter()
        .map(|s| {
            let out = s * Complex64::cis(phase);
            phase += normal.sample(&mut rng);
            out
        })
        .collect();
    SymbolSequence::new(samples, seq.t_s)
}

/// Convert OSNR (dB over `reference_bandwidth`) to linear per-symbol SNR:
/// `10^(osnr/10) · reference_bandwidth / symbol_rate`, single polarization.
pub fn osnr_to_snr(osnr_db: f64, symbol_rate: f64, reference_bandwidth: f64) -> Result<f64> {
    if symbol_rate <= 0.0 || symbol_rate.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "symbol rate must be positive, got {symbol_rate}"
        )));
    }
    if reference_bandwidth <= 0.0 || reference_bandwidth.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "reference bandwidth must be positive, got {reference_bandwidth}"
        )));
    }
    Ok(10f64.powf(osnr_db / 10.0) * reference_bandwidth / symbol_rate)
}

/// Add circular complex Gaussian noise with per-sample variance
/// `1/snr_linear`, split evenly between the real and imaginary parts.
/// An infinite SNR passes the input through untouched.
pub fn add_awgn(seq: &SymbolSequence, snr_linear: f64, seed: u64) -> Result<SymbolSequence> {
    if snr_linear.is_infinite() && snr_linear > 0.0 {
        return Ok(seq.clone());
    }
    if snr_linear <= 0.0 || snr_linear.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "linear SNR must be positive, got {snr_linear}"
        )));
    }
    let sigma = (0.5 / snr_linear).sqrt();
    let normal =
        Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("AWGN setup: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let samples = seq
        .samples
        .iter()
        .map(|s| {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            s + Complex64::new(re, im)
        })
        .collect();
    SymbolSequence::new(samples, seq.t_s)
}
