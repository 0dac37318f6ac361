//! Frequency-offset estimation (FOE) for M-QAM coherent optical receivers.
//!
//! A coherent receiver sees every symbol rotated by the frequency mismatch
//! between the transmitter laser and the local oscillator. Raising the
//! received M-QAM symbols to the 4th power collapses the modulation into a
//! single tone at four times the frequency offset; locating that tone is the
//! FOE problem. This crate implements five estimators around that idea:
//!
//! * [`foe::fft_foe`] — single-stage FFT peak search (picket-fence limited),
//! * [`foe::apfft_foe`] — all-phase FFT over two blocks: the peak-bin phase
//!   difference between blocks recovers the fractional bin offset, giving
//!   fine accuracy for the cost of one extra windowing pass,
//! * [`foe::czt_foe`] — FFT coarse search plus a chirp-Z fine grid,
//! * [`foe::zoomfft_foe`] — FFT coarse search plus a mix/decimate/FFT zoom,
//! * [`foe::diff_foe`] — differential-phase baseline.
//!
//! Supporting modules: [`qam`] (constellations, symbol generation, the
//! 4th-power transform), [`channel`] (carrier rotation, Wiener laser phase
//! noise, OSNR-calibrated AWGN), [`spectral`] (FFT, all-phase FFT, Bluestein
//! chirp-Z, zoom refinement), [`complexity`] (closed-form real-multiplication
//! accounting), [`harness`] (deterministic Monte-Carlo MSE sweeps with CSV
//! output), [`io`] (IQ sample files), and [`metering`] (instrumented
//! multiplication counts).
//!
//! # Example
//!
//! ```
//! use foe_core::channel::apply_carrier;
//! use foe_core::foe::{apfft_foe, EstimatorParams};
//! use foe_core::qam::{build_constellation, generate_symbols, ModulationFormat};
//!
//! let t_s = 1.0 / 28e9; // 28 GBaud
//! let constellation = build_constellation(ModulationFormat::Qam16);
//! let symbols = generate_symbols(&constellation, 3 * 512 - 1, t_s, 7).unwrap();
//! let rx = apply_carrier(&symbols, 1.0e9, 0.3);
//!
//! let params = EstimatorParams::new(512, 256).unwrap();
//! let result = apfft_foe(&rx, &params).unwrap();
//! // Modulation self-noise limits a single 16QAM block to ~1 MHz here.
//! assert!((result.f_hat - 1.0e9).abs() < 3e6);
//! ```

pub mod channel;
pub mod complexity;
mod error;
pub mod foe;
pub mod harness;
pub mod io;
pub mod metering;
pub mod qam;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A single baseband IQ sample.
pub type ComplexSample = Complex64;

pub use channel::ChannelParams;
pub use complexity::ComplexityReport;
pub use foe::{Algorithm, EstimatorParams, FoeResult};
pub use harness::{SignalSource, SweepConfig, TrialRecord};
pub use qam::{Constellation, ModulationFormat, SymbolSequence};
