//! Deterministic Monte-Carlo sweeps of estimator accuracy.
//!
//! Each trial builds one received sequence — symbols (or a pure tone),
//! carrier rotation with a random initial phase, Wiener phase noise, AWGN —
//! runs every configured estimator on that same sequence, and records the
//! normalized squared error `((f_hat − f_d)·T_s)²` per estimator, with the
//! difference taken modulo the 4th-power ambiguity of `symbol_rate/4`.
//!
//! Reproducibility: each trial's randomness comes from a ChaCha8 stream
//! derived from `(master_seed; offset index, OSNR index, trial index)`, so
//! sweeps produce byte-identical CSV regardless of how trials are scheduled
//! across threads.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    add_awgn, apply_carrier, apply_phase_noise, osnr_to_snr, DEFAULT_REFERENCE_BANDWIDTH,
};
use crate::foe::{estimate, wrapped_error, Algorithm, EstimatorParams, FoeResult};
use crate::qam::{build_constellation, generate_symbols, ModulationFormat, SymbolSequence};
use crate::{Complex64, Error, Result};

/// What the transmitter sends in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignalSource {
    /// Random QAM symbols in the configured format.
    #[default]
    Qam,
    /// A unit-amplitude carrier with no modulation. The 4th-power front end
    /// is exact on this input, which isolates channel effects from
    /// modulation self-noise.
    Tone,
}

/// The offset grid of a sweep: an explicit list or `min..=max` in `step`
/// increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetSpec {
    List(Vec<f64>),
    Grid { min: f64, max: f64, step: f64 },
}

impl OffsetSpec {
    pub fn expand(&self) -> Result<Vec<f64>> {
        match self {
            OffsetSpec::List(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument("offset list is empty".into()));
                }
                Ok(values.clone())
            }
            OffsetSpec::Grid { min, max, step } => {
                if *step <= 0.0 || step.is_nan() || max < min {
                    return Err(Error::InvalidArgument(format!(
                        "bad offset grid: min={min}, max={max}, step={step}"
                    )));
                }
                let count = ((max - min) / step + 0.5).floor() as usize + 1;
                Ok((0..count).map(|i| min + i as f64 * step).collect())
            }
        }
    }
}

/// Full description of a Monte-Carlo sweep. Serializes to/from the JSON
/// config-file format one-to-one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub format: ModulationFormat,
    pub symbol_rate: f64,
    /// Per-laser linewidth in Hz; transmitter and LO contribute equally, so
    /// the channel sees twice this value.
    pub linewidth_per_laser: f64,
    pub algorithms: Vec<Algorithm>,
    pub n1: usize,
    pub n2: usize,
    pub offsets: OffsetSpec,
    /// OSNR points in dB; `null` entries disable AWGN for that point.
    pub osnr_values: Vec<Option<f64>>,
    pub trials_per_point: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub source: SignalSource,
    #[serde(default = "default_reference_bandwidth")]
    pub reference_bandwidth: f64,
}

fn default_reference_bandwidth() -> f64 {
    DEFAULT_REFERENCE_BANDWIDTH
}

impl SweepConfig {
    /// Desk-scale defaults: the full ±R_s/8 grid in 200 MHz steps, 100
    /// trials per point, all five estimators.
    pub fn desk_scale(format: ModulationFormat) -> SweepConfig {
        let (n1, n2) = match format {
            ModulationFormat::Qam16 => (512, 256),
            ModulationFormat::Qam64 => (1024, 512),
        };
        SweepConfig {
            format,
            symbol_rate: 28e9,
            linewidth_per_laser: 1e5,
            algorithms: Algorithm::ALL.to_vec(),
            n1,
            n2,
            offsets: OffsetSpec::Grid {
                min: -3.5e9,
                max: 3.5e9,
                step: 2e8,
            },
            osnr_values: vec![Some(25.0)],
            trials_per_point: 100,
            master_seed: 1,
            source: SignalSource::Qam,
            reference_bandwidth: DEFAULT_REFERENCE_BANDWIDTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        EstimatorParams::new(self.n1, self.n2)?;
        if self.symbol_rate <= 0.0 || self.symbol_rate.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "symbol rate must be positive, got {}",
                self.symbol_rate
            )));
        }
        if self.linewidth_per_laser < 0.0 {
            return Err(Error::InvalidArgument(
                "linewidth cannot be negative".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one algorithm is required".into(),
            ));
        }
        if self.trials_per_point == 0 {
            return Err(Error::InvalidArgument(
                "trials_per_point must be at least 1".into(),
            ));
        }
        if self.osnr_values.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one OSNR point is required".into(),
            ));
        }
        let limit = self.symbol_rate / 8.0;
        for f_d in self.offsets.expand()? {
            if f_d.abs() > limit {
                return Err(Error::InvalidArgument(format!(
                    "offset {f_d} Hz is outside the ±{limit} Hz estimation range"
                )));
            }
        }
        Ok(())
    }

    fn t_s(&self) -> f64 {
        1.0 / self.symbol_rate
    }

    fn trial_symbols(&self) -> usize {
        3 * self.n1 - 1
    }
}

/// One estimator's outcome on one trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub f_d_true: f64,
    pub osnr_db: Option<f64>,
    pub f_hat: f64,
    /// `((f_hat − f_d)·T_s)²`, the error wrapped modulo `symbol_rate/4`.
    pub normalized_sq_error: f64,
}

/// A trial outcome per algorithm: either a record or the estimator error
/// (counted as a failed trial by the sweeps).
pub type TrialOutcome = (Algorithm, std::result::Result<TrialRecord, Error>);

/// ChaCha stream id for a trial: 16 bits of offset index, 8 bits of OSNR
/// index, 40 bits of trial index.
fn trial_stream(offset_index: usize, osnr_index: usize, trial_index: u64) -> u64 {
    ((offset_index as u64) << 48)
        | ((osnr_index as u64 & 0xff) << 40)
        | (trial_index & 0xff_ffff_ffff)
}

/// Run one trial: build the received sequence for the indexed grid point and
/// run every configured estimator on it.
pub fn run_trial(
    config: &SweepConfig,
    offset_index: usize,
    osnr_index: usize,
    trial_index: u64,
) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    let offsets = config.offsets.expand()?;
    let f_d = *offsets.get(offset_index).ok_or_else(|| {
        Error::InvalidArgument(format!("offset index {offset_index} out of range"))
    })?;
    let osnr_db = *config
        .osnr_values
        .get(osnr_index)
        .ok_or_else(|| Error::InvalidArgument(format!("OSNR index {osnr_index} out of range")))?;

    let t_s = config.t_s();
    let count = config.trial_symbols();
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(trial_stream(offset_index, osnr_index, trial_index));

    let initial_phase = rng.random_range(0.0..TAU);
    let symbol_seed = rng.next_u64();
    let phase_noise_seed = rng.next_u64();
    let awgn_seed = rng.next_u64();

    let symbols = match config.source {
        SignalSource::Qam => {
            let constellation = build_constellation(config.format);
            generate_symbols(&constellation, count, t_s, symbol_seed)?
        }
        SignalSource::Tone => SymbolSequence::new(vec![Complex64::new(1.0, 0.0); count], t_s)?,
    };

    let with_carrier = apply_carrier(&symbols, f_d, initial_phase);
    let with_phase_noise = apply_phase_noise(
        &with_carrier,
        2.0 * config.linewidth_per_laser,
        phase_noise_seed,
    )?;
    let rx = match osnr_db {
        Some(db) => {
            let snr = osnr_to_snr(db, config.symbol_rate, config.reference_bandwidth)?;
            add_awgn(&with_phase_noise, snr, awgn_seed)?
        }
        None => with_phase_noise,
    };

    let params = EstimatorParams::new(config.n1, config.n2)?;
    let outcomes = config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let outcome = estimate(algorithm, &rx, &params).map(|result: FoeResult| {
                let err = wrapped_error(result.f_hat, f_d, config.symbol_rate) * t_s;
                TrialRecord {
                    algorithm,
                    f_d_true: f_d,
                    osnr_db,
                    f_hat: result.f_hat,
                    normalized_sq_error: err * err,
                }
            });
            (algorithm, outcome)
        })
        .collect();
    Ok(outcomes)
}

/// One row of an offset sweep: MSE per `(offset, algorithm)` at the sweep's
/// single OSNR point (the first entry of `osnr_values`).
#[derive(Debug, Clone, Serialize)]
pub struct OffsetSweepRow {
    pub algorithm: Algorithm,
    pub f_d_hz: f64,
    pub osnr_db: Option<f64>,
    pub trials: u64,
    pub failures: u64,
    pub mse_normalized: f64,
}

/// One row of an OSNR sweep: MSE per `(OSNR, algorithm)` aggregated over the
/// whole offset grid.
#[derive(Debug, Clone, Serialize)]
pub struct OsnrSweepRow {
    pub algorithm: Algorithm,
    pub osnr_db: Option<f64>,
    pub trials: u64,
    pub failures: u64,
    pub mse_normalized: f64,
}

#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    ok: u64,
    failed: u64,
}

impl Accumulator {
    fn push(&mut self, outcome: &std::result::Result<TrialRecord, Error>) {
        match outcome {
            Ok(record) => {
                self.sum += record.normalized_sq_error;
                self.ok += 1;
            }
            Err(_) => self.failed += 1,
        }
    }

    fn mse(&self) -> f64 {
        self.sum / self.ok as f64
    }
}

/// Run all trials of a sweep in parallel, returning per-trial outcomes in
/// trial order (independent of the thread schedule).
fn collect_trials(
    config: &SweepConfig,
    jobs: &[(usize, usize, u64)],
) -> Result<Vec<Vec<TrialOutcome>>> {
    jobs.par_iter()
        .map(|&(oi, si, ti)| run_trial(config, oi, si, ti))
        .collect()
}

/// Mean normalized squared error per offset point and algorithm, at the
/// first configured OSNR value.
pub fn sweep_offsets(config: &SweepConfig) -> Result<Vec<OffsetSweepRow>> {
    config.validate()?;
    let offsets = config.offsets.expand()?;
    let osnr_db = config.osnr_values[0];
    let trials = config.trials_per_point;

    let jobs: Vec<(usize, usize, u64)> = (0..offsets.len())
        .flat_map(|oi| (0..trials).map(move |ti| (oi, 0, ti)))
        .collect();
    let outcomes = collect_trials(config, &jobs)?;

    let n_algos = config.algorithms.len();
    let mut acc = vec![Accumulator::default(); offsets.len() * n_algos];
    for ((oi, _, _), trial) in jobs.iter().zip(&outcomes) {
        for (ai, (_, outcome)) in trial.iter().enumerate() {
            acc[oi * n_algos + ai].push(outcome);
        }
    }

    let mut rows = Vec::with_capacity(offsets.len() * n_algos);
    for (oi, &f_d) in offsets.iter().enumerate() {
        for (ai, &algorithm) in config.algorithms.iter().enumerate() {
            let a = acc[oi * n_algos + ai];
            rows.push(OffsetSweepRow {
                algorithm,
                f_d_hz: f_d,
                osnr_db,
                trials,
                failures: a.failed,
                mse_normalized: a.mse(),
            });
        }
    }
    Ok(rows)
}

/// Mean normalized squared error per OSNR point and algorithm, averaged over
/// the whole offset grid.
pub fn sweep_osnr(config: &SweepConfig) -> Result<Vec<OsnrSweepRow>> {
    config.validate()?;
    let offsets = config.offsets.expand()?;
    let trials = config.trials_per_point;

    let jobs: Vec<(usize, usize, u64)> = (0..config.osnr_values.len())
        .flat_map(|si| {
            (0..offsets.len()).flat_map(move |oi| (0..trials).map(move |ti| (oi, si, ti)))
        })
        .collect();
    let outcomes = collect_trials(config, &jobs)?;

    let n_algos = config.algorithms.len();
    let mut acc = vec![Accumulator::default(); config.osnr_values.len() * n_algos];
    for ((_, si, _), trial) in jobs.iter().zip(&outcomes) {
        for (ai, (_, outcome)) in trial.iter().enumerate() {
            acc[si * n_algos + ai].push(outcome);
        }
    }

    let trials_per_row = trials * offsets.len() as u64;
    let mut rows = Vec::with_capacity(config.osnr_values.len() * n_algos);
    for (si, &osnr_db) in config.osnr_values.iter().enumerate() {
        for (ai, &algorithm) in config.algorithms.iter().enumerate() {
            let a = acc[si * n_algos + ai];
            rows.push(OsnrSweepRow {
                algorithm,
                osnr_db,
                trials: trials_per_row,
                failures: a.failed,
                mse_normalized: a.mse(),
            });
        }
    }
    Ok(rows)
}

fn fmt_osnr(osnr_db: Option<f64>) -> String {
    match osnr_db {
        Some(db) => format!("{db:e}"),
        None => "inf".to_string(),
    }
}

/// CSV encoding of an offset sweep:
/// `algorithm,f_d_hz,osnr_db,trials,failures,mse_normalized`.
pub fn offset_sweep_csv(rows: &[OffsetSweepRow]) -> String {
    let mut out = String::from("algorithm,f_d_hz,osnr_db,trials,failures,mse_normalized\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{},{},{},{:e}\n",
            r.algorithm,
            r.f_d_hz,
            fmt_osnr(r.osnr_db),
            r.trials,
            r.failures,
            r.mse_normalized
        ));
    }
    out
}

/// CSV encoding of an OSNR sweep:
/// `algorithm,osnr_db,trials,failures,mse_normalized`.
pub fn osnr_sweep_csv(rows: &[OsnrSweepRow]) -> String {
    let mut out = String::from("algorithm,osnr_db,trials,failures,mse_normalized\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:e}\n",
            r.algorithm,
            fmt_osnr(r.osnr_db),
            r.trials,
            r.failures,
            r.mse_normalized
        ));
    }
    out
}

/// Read IQ samples from `path` and run one estimator on them.
pub fn estimate_from_file(
    path: &Path,
    algorithm: Algorithm,
    params: &EstimatorParams,
    symbol_rate: f64,
) -> Result<FoeResult> {
    let samples = crate::io::read_iq(path)?;
    let rx = SymbolSequence::new(samples, 1.0 / symbol_rate)?;
    estimate(algorithm, &rx, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            format: ModulationFormat::Qam16,
            symbol_rate: 28e9,
            linewidth_per_laser: 1e5,
            algorithms: Algorithm::ALL.to_vec(),
            n1: 128,
            n2: 64,
            offsets: OffsetSpec::List(vec![-1.3e9, 0.0, 0.9e9]),
            osnr_values: vec![Some(20.0)],
            trials_per_point: 4,
            master_seed: 11,
            source: SignalSource::Qam,
            reference_bandwidth: DEFAULT_REFERENCE_BANDWIDTH,
        }
    }

    #[test]
    fn grid_expansion_counts_points_inclusively() {
        let grid = OffsetSpec::Grid {
            min: -3.5e9,
            max: 3.5e9,
            step: 2e8,
        };
        let points = grid.expand().unwrap();
        assert_eq!(points.len(), 36);
        assert_eq!(points[0], -3.5e9);
        assert!((points[35] - 3.5e9).abs() < 1.0);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = tiny_config();
        let a = run_trial(&cfg, 1, 0, 2).unwrap();
        let b = run_trial(&cfg, 1, 0, 2).unwrap();
        for ((alg_a, out_a), (alg_b, out_b)) in a.iter().zip(&b) {
            assert_eq!(alg_a, alg_b);
            let (ra, rb) = (out_a.as_ref().unwrap(), out_b.as_ref().unwrap());
            assert_eq!(ra.f_hat, rb.f_hat);
            assert_eq!(ra.normalized_sq_error, rb.normalized_sq_error);
        }
    }

    #[test]
    fn different_trial_indices_differ() {
        let cfg = tiny_config();
        let a = run_trial(&cfg, 0, 0, 0).unwrap();
        let b = run_trial(&cfg, 0, 0, 1).unwrap();
        let fa = a[1].1.as_ref().unwrap().f_hat;
        let fb = b[1].1.as_ref().unwrap().f_hat;
        assert_ne!(fa, fb);
    }

    #[test]
    fn noise_free_tone_trial_is_essentially_exact() {
        let mut cfg = tiny_config();
        cfg.source = SignalSource::Tone;
        cfg.linewidth_per_laser = 0.0;
        cfg.osnr_values = vec![None];
        cfg.n1 = 512;
        cfg.n2 = 256;
        let outcomes = run_trial(&cfg, 2, 0, 0).unwrap();
        let apfft = outcomes
            .iter()
            .find(|(a, _)| *a == Algorithm::ApFft)
            .unwrap();
        let record = apfft.1.as_ref().unwrap();
        assert!(
            record.normalized_sq_error < 1e-18,
            "error {}",
            record.normalized_sq_error
        );
    }

    #[test]
    fn all_algorithms_see_the_same_received_sequence() {
        // Noise-free and on the coarse grid, the FFT-based stages must agree
        // on the peak bin because they run on identical samples.
        let mut cfg = tiny_config();
        cfg.source = SignalSource::Tone;
        cfg.linewidth_per_laser = 0.0;
        cfg.osnr_values = vec![None];
        let on_bin = 20.0 / (4.0 * cfg.n1 as f64 / cfg.symbol_rate);
        cfg.offsets = OffsetSpec::List(vec![on_bin]);
        let outcomes = run_trial(&cfg, 0, 0, 0).unwrap();
        let f_hats: Vec<f64> = outcomes
            .iter()
            .filter(|(a, _)| *a != Algorithm::Diff)
            .map(|(_, o)| o.as_ref().unwrap().f_hat)
            .collect();
        for pair in f_hats.windows(2) {
            assert!((pair[0] - pair[1]).abs() < 1.0);
        }
    }

    #[test]
    fn offset_sweep_row_count_and_order() {
        let cfg = tiny_config();
        let rows = sweep_offsets(&cfg).unwrap();
        assert_eq!(rows.len(), 3 * cfg.algorithms.len());
        assert_eq!(rows[0].f_d_hz, -1.3e9);
        assert_eq!(rows[0].algorithm, Algorithm::Fft);
        assert_eq!(rows[1].algorithm, Algorithm::ApFft);
        for r in &rows {
            assert_eq!(r.trials, 4);
            assert_eq!(r.failures, 0);
            assert!(r.mse_normalized.is_finite());
            assert!(r.mse_normalized >= 0.0);
        }
    }

    #[test]
    fn osnr_sweep_row_count() {
        let mut cfg = tiny_config();
        cfg.osnr_values = vec![Some(15.0), Some(25.0)];
        cfg.trials_per_point = 2;
        let rows = sweep_osnr(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * cfg.algorithms.len());
        for r in &rows {
            assert_eq!(r.trials, 2 * 3);
        }
    }

    #[test]
    fn sweeps_are_thread_count_independent() {
        let cfg = tiny_config();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let csv1 = pool1.install(|| offset_sweep_csv(&sweep_offsets(&cfg).unwrap()));
        let csv4 = pool4.install(|| offset_sweep_csv(&sweep_offsets(&cfg).unwrap()));
        assert_eq!(csv1, csv4);
    }

    #[test]
    fn offsets_outside_the_range_are_rejected() {
        let mut cfg = tiny_config();
        cfg.offsets = OffsetSpec::List(vec![4.0e9]);
        assert!(matches!(
            sweep_offsets(&cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn csv_headers_match_the_schema() {
        let cfg = tiny_config();
        let rows = sweep_offsets(&cfg).unwrap();
        let csv = offset_sweep_csv(&rows);
        assert!(csv.starts_with("algorithm,f_d_hz,osnr_db,trials,failures,mse_normalized\n"));
        assert_eq!(csv.lines().count(), 1 + rows.len());
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with("fft,-1.3e9,2e1,4,0,"), "{first}");
    }

    #[test]
    fn estimate_from_file_round_trips() {
        let t_s = 1.0 / 28e9;
        let count = 3 * 512 - 1;
        let carrier = SymbolSequence::new(vec![Complex64::new(1.0, 0.0); count], t_s).unwrap();
        let tx = apply_carrier(&carrier, 1.0e9, 0.2);
        let mut path = std::env::temp_dir();
        path.push(format!("foe-harness-test-{}.iq", std::process::id()));
        crate::io::write_iq(&path, &tx.samples).unwrap();

        let params = EstimatorParams::new(512, 256).unwrap();
        let result = estimate_from_file(&path, Algorithm::ApFft, &params, 28e9).unwrap();
        assert!((result.f_hat - 1.0e9).abs() < 1.0);

        // Truncated file: enough bytes to parse but too few samples.
        let samples = crate::io::read_iq(&path).unwrap();
        crate::io::write_iq(&path, &samples[..600]).unwrap();
        let err = estimate_from_file(&path, Algorithm::ApFft, &params, 28e9).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientSamples {
                needed: 1535,
                got: 600
            }
        ));
        std::fs::remove_file(&path).ok();
    }
}
