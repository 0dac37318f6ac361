//! Input builders shared by the benchmarks: received sequences at the
//! flagship operating point (28 GBaud, 100 kHz per-laser linewidth).

use foe_core::channel::{add_awgn, apply_carrier, apply_phase_noise, osnr_to_snr};
use foe_core::qam::{build_constellation, generate_symbols, ModulationFormat, SymbolSequence};

pub const SYMBOL_RATE: f64 = 28e9;

/// A noisy received sequence of `count` symbols at 25 dB OSNR with a
/// 1.1 GHz offset.
pub fn received(format: ModulationFormat, count: usize, seed: u64) -> SymbolSequence {
    let t_s = 1.0 / SYMBOL_RATE;
    let constellation = build_constellation(format);
    let symbols = generate_symbols(&constellation, count, t_s, seed).unwrap();
    let tx = apply_carrier(&symbols, 1.1e9, 0.3);
    let pn = apply_phase_noise(&tx, 2e5, seed ^ 0xA5).unwrap();
    let snr = osnr_to_snr(25.0, SYMBOL_RATE, 12.5e9).unwrap();
    add_awgn(&pn, snr, seed ^ 0x5A).unwrap()
}
