//! Instrumented counting of the real multiplications executed by the DSP
//! kernels, on the usual accounting convention: one complex × complex
//! multiply is 4 real multiplications, one complex × real multiply is 2.
//!
//! Counters are thread-local; [`reset`] and [`snapshot`] bracket a region of
//! interest on the current thread. Plan setup (twiddle and chirp tables) is
//! deliberately not counted — it is precomputation that a deployed receiver
//! amortizes away — so the counts line up with per-block algorithm budgets.
//!
//! The FFT used throughout is a plain radix-2 loop that multiplies every
//! butterfly, including unit twiddles, so an N-point transform executes
//! exactly `2·N·log2(N)` real multiplications — the textbook radix-2 figure.

use std::cell::RefCell;

/// What a counted multiplication was spent on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulClass {
    /// Element-wise 4th power of symbols (6 per sample).
    FourthPower,
    /// All-phase window application (2 per sample, real weight × complex).
    Window,
    /// FFT butterflies (2·N·log2 N per N-point transform).
    Fft,
    /// The 1/N scaling of an inverse FFT (2 per sample).
    InverseScale,
    /// Mixing a signal down by a carrier (4 per sample).
    Mix,
    /// Time-domain filtering (4 per sample for the 2-tap averager).
    Filter,
    /// Chirp pre/post products and spectrum pointwise products (4 each).
    Pointwise,
}

/// Per-class totals captured by [`snapshot`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MulCounts {
    pub fourth_power: u64,
    pub window: u64,
    pub fft: u64,
    pub inverse_scale: u64,
    pub mix: u64,
    pub filter: u64,
    pub pointwise: u64,
}

impl MulCounts {
    /// Sum over all classes.
    pub fn total(&self) -> u64 {
        self.fourth_power
            + self.window
            + self.fft
            + self.inverse_scale
            + self.mix
            + self.filter
            + self.pointwise
    }
}

thread_local! {
    static COUNTS: RefCell<MulCounts> = const { RefCell::new(MulCounts {
        fourth_power: 0,
        window: 0,
        fft: 0,
        inverse_scale: 0,
        mix: 0,
        filter: 0,
        pointwise: 0,
    }) };
}

/// Zero the current thread's counters.
pub fn reset() {
    COUNTS.with(|c| *c.borrow_mut() = MulCounts::default());
}

/// Read the current thread's counters.
pub fn snapshot() -> MulCounts {
    COUNTS.with(|c| *c.borrow())
}

pub(crate) fn record(class: MulClass, n: u64) {
    COUNTS.with(|c| {
        let mut counts = c.borrow_mut();
        match class {
            MulClass::FourthPower => counts.fourth_power += n,
            MulClass::Window => counts.window += n,
            MulClass::Fft => counts.fft += n,
            MulClass::InverseScale => counts.inverse_scale += n,
            MulClass::Mix => counts.mix += n,
            MulClass::Filter => counts.filter += n,
            MulClass::Pointwise => counts.pointwise += n,
        }
    });
}
