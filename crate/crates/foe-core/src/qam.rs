//! Square M-QAM constellations, random symbol generation, and the 4th-power
//! modulation-removal transform.
//!
//! Raising a square-QAM symbol to the 4th power maps every constellation
//! point into the same half-plane sector: the ensemble mean of `s⁴` is a
//! non-zero (negative real) constant, so a stream of modulated symbols with
//! a carrier offset `f_d` turns into a noisy tone at `4·f_d`. Constellations
//! here are normalized to unit mean power; on the raw `{±1,±3}` grid the
//! 16-QAM mean of the 4th powers is −68, which the normalization scales to
//! −0.68.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metering::{self, MulClass};
use crate::{Error, Result};

/// Supported square-QAM orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum ModulationFormat {
    Qam16,
    Qam64,
}

impl ModulationFormat {
    /// Constellation size M.
    pub fn order(self) -> usize {
        match self {
            ModulationFormat::Qam16 => 16,
            ModulationFormat::Qam64 => 64,
        }
    }

    fn levels(self) -> &'static [f64] {
        match self {
            ModulationFormat::Qam16 => &[-3.0, -1.0, 1.0, 3.0],
            ModulationFormat::Qam64 => &[-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0],
        }
    }
}

impl TryFrom<u32> for ModulationFormat {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        match value {
            16 => Ok(ModulationFormat::Qam16),
            64 => Ok(ModulationFormat::Qam64),
            other => Err(Error::InvalidArgument(format!(
                "unsupported modulation order {other}; expected 16 or 64"
            ))),
        }
    }
}

impl From<ModulationFormat> for u32 {
    fn from(value: ModulationFormat) -> u32 {
        value.order() as u32
    }
}

impl std::fmt::Display for ModulationFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}QAM", self.order())
    }
}

/// A unit-mean-power constellation together with its 4th-order moment — the
/// amplitude of the tone that the 4th-power transform produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub format: ModulationFormat,
    pub points: Vec<Complex64>,
    /// Average of `point⁴` over the constellation; negative real for square
    /// QAM.
    pub fourth_moment: Complex64,
}

/// Build the normalized square-grid constellation for `format`.
pub fn build_constellation(format: ModulationFormat) -> Constellation {
    let levels = format.levels();
    let mean_sq: f64 = 2.0 * levels.iter().map(|l| l * l).sum::<f64>() / levels.len() as f64;
    let scale = 1.0 / mean_sq.sqrt();

    let points: Vec<Complex64> = levels
        .iter()
        .flat_map(|&re| {
            levels
                .iter()
                .map(move |&im| Complex64::new(re * scale, im * scale))
        })
        .collect();

    let fourth_moment = points
        .iter()
        .map(|p| {
            let sq = p * p;
            sq * sq
        })
        .sum::<Complex64>()
        / points.len() as f64;

    Constellation {
        format,
        points,
        fourth_moment,
    }
}

/// An ordered run of complex samples spaced `t_s` seconds apart.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    pub samples: Vec<Complex64>,
    /// Symbol duration in seconds.
    pub t_s: f64,
}

impl SymbolSequence {
    pub fn new(samples: Vec<Complex64>, t_s: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "a symbol sequence cannot be empty".into(),
            ));
        }
        if t_s <= 0.0 || !t_s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "symbol duration must be positive and finite, got {t_s}"
            )));
        }
        Ok(SymbolSequence { samples, t_s })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draw `count` symbols i.i.d. uniformly from the constellation. The same
/// seed reproduces the same sequence bit-exactly.
pub fn generate_symbols(
    constellation: &Constellation,
    count: usize,
    t_s: f64,
    seed: u64,
) -> Result<SymbolSequence> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "symbol count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..count)
        .map(|_| constellation.points[rng.random_range(0..constellation.points.len())])
        .collect();
    SymbolSequence::new(samples, t_s)
}

/// Element-wise 4th power.
pub fn fourth_power(seq: &SymbolSequence) -> SymbolSequence {
    SymbolSequence {
        samples: fourth_power_slice(&seq.samples),
        t_s: seq.t_s,
    }
}

/// 4th power via two complex squarings, each costing three real
/// multiplications (re², im², re·im) — six per sample, matching the
/// first-stage complexity budget.
pub(crate) fn fourth_power_slice(xs: &[Complex64]) -> Vec<Complex64> {
    let out = xs
        .iter()
        .map(|x| {
            let sq = square(*x);
            square(sq)
        })
        .collect();
    metering::record(MulClass::FourthPower, 6 * xs.len() as u64);
    out
}

fn square(x: Complex64) -> Complex64 {
    let re2 = x.re * x.re;
    let im2 = x.im * x.im;
    let cross = x.re * x.im;
    Complex64::new(re2 - im2, cross + cross)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constellation_has_unit_mean_power() {
        for format in [ModulationFormat::Qam16, ModulationFormat::Qam64] {
            let c = build_constellation(format);
            assert_eq!(c.points.len(), format.order());
            let mean_power: f64 =
                c.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / c.points.len() as f64;
            assert!((mean_power - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_moments_match_the_grid_identities() {
        // Independent closed forms: on per-axis levels L with mean square
        // m2 = E[a²] and fourth moment m4 = E[a⁴], the grid's mean 4th power
        // is 2·m4 − 6·m2², and the unit-power normalization divides by the
        // squared mean power (2·m2)².
        let c16 = build_constellation(ModulationFormat::Qam16);
        // 16QAM raw grid: 2·41 − 6·25 = −68 over mean power 10.
        assert!((c16.fourth_moment.re - (-0.68)).abs() < 1e-12);
        assert!(c16.fourth_moment.im.abs() < 1e-12);
        let raw = c16.fourth_moment.re * 100.0;
        assert!((raw - (-68.0)).abs() < 1e-9);

        let c64 = build_constellation(ModulationFormat::Qam64);
        // 64QAM raw grid: 2·777 − 6·441 = −1092 over mean power 42.
        assert!((c64.fourth_moment.re - (-1092.0 / 1764.0)).abs() < 1e-12);
        assert!(c64.fourth_moment.im.abs() < 1e-12);
    }

    #[test]
    fn fourth_moment_is_strictly_negative_real() {
        for format in [ModulationFormat::Qam16, ModulationFormat::Qam64] {
            let c = build_constellation(format);
            assert!(c.fourth_moment.re < 0.0);
        }
    }

    #[test]
    fn unsupported_order_is_rejected() {
        assert!(ModulationFormat::try_from(32).is_err());
        assert!(ModulationFormat::try_from(16).is_ok());
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let c = build_constellation(ModulationFormat::Qam16);
        let a = generate_symbols(&c, 4, 1e-9, 1).unwrap();
        let b = generate_symbols(&c, 4, 1e-9, 1).unwrap();
        assert_eq!(a, b);
        let c2 = generate_symbols(&c, 4, 1e-9, 2).unwrap();
        assert_ne!(a, c2);
    }

    #[test]
    fn sample_mean_power_approaches_one() {
        let c = build_constellation(ModulationFormat::Qam16);
        let seq = generate_symbols(&c, 100_000, 1e-9, 42).unwrap();
        let mean: f64 = seq.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / seq.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean power {mean}");
    }

    #[test]
    fn single_draw_is_a_constellation_point() {
        let c = build_constellation(ModulationFormat::Qam64);
        let seq = generate_symbols(&c, 1, 1e-9, 9).unwrap();
        assert!(c.points.contains(&seq.samples[0]));
    }

    #[test]
    fn i_to_the_fourth_is_one() {
        let seq = SymbolSequence::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            1e-9,
        )
        .unwrap();
        let out = fourth_power(&seq);
        assert!((out.samples[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((out.samples[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(out.t_s, seq.t_s);
    }

    #[test]
    fn zeros_stay_zero() {
        let seq = SymbolSequence::new(vec![Complex64::new(0.0, 0.0); 5], 1e-9).unwrap();
        let out = fourth_power(&seq);
        assert!(out.samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn fourth_power_mean_approaches_the_moment() {
        let c = build_constellation(ModulationFormat::Qam16);
        let seq = generate_symbols(&c, 100_000, 1e-9, 7).unwrap();
        let out = fourth_power(&seq);
        let mean = out.samples.iter().sum::<Complex64>() / out.len() as f64;
        assert!(
            (mean - c.fourth_moment).norm() < 0.02 * c.fourth_moment.norm(),
            "mean {mean} vs moment {}",
            c.fourth_moment
        );
    }

    #[test]
    fn magnitude_of_fourth_power_is_fourth_power_of_magnitude() {
        let c = build_constellation(ModulationFormat::Qam64);
        for p in &c.points {
            let q = fourth_power_slice(&[*p])[0];
            assert!((q.norm() - p.norm().powi(4)).abs() < 1e-14);
        }
    }

    #[test]
    fn fourth_power_commutes_with_conjugation() {
        let c = build_constellation(ModulationFormat::Qam16);
        let seq = generate_symbols(&c, 64, 1e-9, 3).unwrap();
        let conj_first: Vec<Complex64> =
            fourth_power_slice(&seq.samples.iter().map(|s| s.conj()).collect::<Vec<_>>());
        let conj_last: Vec<Complex64> = fourth_power_slice(&seq.samples)
            .iter()
            .map(|s| s.conj())
            .collect();
        assert_eq!(conj_first, conj_last);
    }

    #[test]
    fn metered_cost_is_six_per_sample() {
        metering::reset();
        fourth_power_slice(&[Complex64::new(0.3, -0.7); 100]);
        assert_eq!(metering::snapshot().fourth_power, 600);
    }
}
