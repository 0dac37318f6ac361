//! `foe` — frequency-offset estimation toolkit for M-QAM coherent receivers.
//!
//! Subcommands: `complexity` (multiplication-count report), `sweep-offset`
//! and `sweep-osnr` (Monte-Carlo MSE sweeps to CSV), `estimate` (run one
//! estimator on an IQ file), `gen-tone` (synthetic fixture generator).
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error. Data goes to
//! stdout or `--out`; diagnostics go to stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use foe_core::channel::apply_carrier;
use foe_core::complexity::build_report;
use foe_core::foe::{Algorithm, EstimatorParams};
use foe_core::harness::{
    estimate_from_file, offset_sweep_csv, osnr_sweep_csv, sweep_offsets, sweep_osnr, OffsetSpec,
    SignalSource, SweepConfig,
};
use foe_core::qam::{build_constellation, generate_symbols, ModulationFormat, SymbolSequence};
use foe_core::Complex64;

#[derive(Parser)]
#[command(
    name = "foe",
    version,
    about = "Frequency-offset estimation for M-QAM coherent receivers",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the per-block real-multiplication counts of the three
    /// estimation pipelines for one (N1, N2) parameter set.
    Complexity(ComplexityArgs),
    /// Monte-Carlo sweep of MSE versus frequency offset (CSV). Defaults to
    /// desk scale: 28 GBaud, 100 kHz lasers, ±3.5 GHz in 200 MHz steps,
    /// 100 trials per point, all five estimators.
    SweepOffset(SweepArgs),
    /// Monte-Carlo sweep of MSE versus OSNR, averaged over the offset grid
    /// (CSV). Same desk-scale defaults as sweep-offset.
    SweepOsnr(SweepArgs),
    /// Run one estimator on an IQ sample file and print the result as JSON.
    Estimate(EstimateArgs),
    /// Generate a synthetic IQ fixture: a pure tone or a modulated carrier.
    GenTone(GenToneArgs),
}

#[derive(Args)]
struct ComplexityArgs {
    /// First-stage block size (power of two).
    #[arg(long)]
    n1: u64,
    /// Second-stage size (power of two).
    #[arg(long)]
    n2: u64,
    /// Report encoding.
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core). Results are identical for
    /// any thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Modulation order (16 or 64).
    #[arg(long)]
    format: Option<u32>,
    /// Symbol rate in Baud.
    #[arg(long)]
    symbol_rate: Option<f64>,
    /// Per-laser linewidth in Hz.
    #[arg(long)]
    linewidth: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    /// Comma-separated estimators (fft,apfft,czt,zoomfft,diff).
    #[arg(long, value_delimiter = ',', value_parser = Algorithm::from_str)]
    algos: Option<Vec<Algorithm>>,
    /// Offset grid `min:max:step` in Hz, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    offsets: Option<String>,
    /// Comma-separated OSNR points in dB; `none` disables AWGN.
    #[arg(long)]
    osnr: Option<String>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Transmitted signal: QAM symbols or an unmodulated tone.
    #[arg(long, value_enum)]
    source: Option<SourceArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    Qam,
    Tone,
}

#[derive(Args)]
struct EstimateArgs {
    /// Estimator to run.
    #[arg(long, value_parser = Algorithm::from_str)]
    algo: Algorithm,
    #[arg(long, default_value_t = 512)]
    n1: usize,
    /// Defaults to n1/2.
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long, default_value_t = 28e9)]
    symbol_rate: f64,
    /// IQ file: f64le pairs, or two-column CSV when the extension is .csv.
    file: PathBuf,
}

#[derive(Args)]
struct GenToneArgs {
    /// Tone frequency offset in Hz (negative values: use `--freq=-2e9`).
    #[arg(long, allow_hyphen_values = true)]
    freq: f64,
    /// Number of samples.
    #[arg(long)]
    count: usize,
    /// Output IQ file (binary f64le, or CSV when the extension is .csv).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 28e9)]
    symbol_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Initial carrier phase in radians.
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    /// Modulate with random QAM symbols of this order instead of a pure
    /// carrier.
    #[arg(long)]
    qam: Option<u32>,
    /// Symbol seed for --qam.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Complexity(args) => complexity(args),
        Command::SweepOffset(args) => sweep(args, Sweep::Offset),
        Command::SweepOsnr(args) => sweep(args, Sweep::Osnr),
        Command::Estimate(args) => estimate(args),
        Command::GenTone(args) => gen_tone(args),
    }
}

fn complexity(args: ComplexityArgs) -> anyhow::Result<()> {
    let report = build_report(args.n1, args.n2)?;
    match args.format {
        ReportFormat::Table => println!("{report}"),
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        ReportFormat::Csv => {
            let mut out = String::from(
                "n1,n2,mul_czt,mul_zoomfft,mul_apfft,reduction_vs_czt,reduction_vs_zoomfft\n",
            );
            writeln!(
                out,
                "{},{},{},{},{},{:.4},{:.4}",
                report.n1,
                report.n2,
                report.mul_czt,
                report.mul_zoomfft,
                report.mul_apfft,
                report.reduction_vs_czt,
                report.reduction_vs_zoomfft
            )?;
            print!("{out}");
        }
    }
    Ok(())
}

enum Sweep {
    Offset,
    Osnr,
}

fn sweep(args: SweepArgs, kind: Sweep) -> anyhow::Result<()> {
    let cfg = build_sweep_config(&args)?;
    let run = || -> anyhow::Result<String> {
        Ok(match kind {
            Sweep::Offset => offset_sweep_csv(&sweep_offsets(&cfg)?),
            Sweep::Osnr => osnr_sweep_csv(&sweep_osnr(&cfg)?),
        })
    };
    let csv = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("building thread pool")?;
            pool.install(run)?
        }
        None => run()?,
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} bytes to {}", csv.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn build_sweep_config(args: &SweepArgs) -> anyhow::Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SweepConfig::desk_scale(ModulationFormat::Qam16),
    };

    if let Some(order) = args.format {
        cfg.format = ModulationFormat::try_from(order)?;
        // Keep the block sizes in step with the format unless given
        // explicitly below.
        if args.config.is_none() && args.n1.is_none() {
            let defaults = SweepConfig::desk_scale(cfg.format);
            cfg.n1 = defaults.n1;
            cfg.n2 = defaults.n2;
        }
    }
    if let Some(v) = args.symbol_rate {
        cfg.symbol_rate = v;
    }
    if let Some(v) = args.linewidth {
        cfg.linewidth_per_laser = v;
    }
    if let Some(v) = args.n1 {
        cfg.n1 = v;
    }
    if let Some(v) = args.n2 {
        cfg.n2 = v;
    }
    if let Some(v) = &args.algos {
        cfg.algorithms = v.clone();
    }
    if let Some(spec) = &args.offsets {
        cfg.offsets = parse_offsets(spec)?;
    }
    if let Some(list) = &args.osnr {
        cfg.osnr_values = parse_osnr_list(list)?;
    }
    if let Some(v) = args.trials {
        cfg.trials_per_point = v;
    }
    if let Some(v) = args.master_seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.source {
        cfg.source = match v {
            SourceArg::Qam => SignalSource::Qam,
            SourceArg::Tone => SignalSource::Tone,
        };
    }
    Ok(cfg)
}

fn parse_offsets(spec: &str) -> anyhow::Result<OffsetSpec> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("offset grid must be min:max:step, got '{spec}'");
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad offset value '{s}'"))
        };
        Ok(OffsetSpec::Grid {
            min: parse(parts[0])?,
            max: parse(parts[1])?,
            step: parse(parts[2])?,
        })
    } else {
        let values = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad offset value '{s}'"))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        Ok(OffsetSpec::List(values))
    }
}

fn parse_osnr_list(list: &str) -> anyhow::Result<Vec<Option<f64>>> {
    list.split(',')
        .map(|s| {
            let s = s.trim();
            if s.eq_ignore_ascii_case("none") || s.eq_ignore_ascii_case("inf") {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .with_context(|| format!("bad OSNR value '{s}'"))
            }
        })
        .collect()
}

fn estimate(args: EstimateArgs) -> anyhow::Result<()> {
    let n2 = args.n2.unwrap_or(args.n1 / 2);
    let params = EstimatorParams::new(args.n1, n2)?;
    let result = estimate_from_file(&args.file, args.algo, &params, args.symbol_rate)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn gen_tone(args: GenToneArgs) -> anyhow::Result<()> {
    let t_s = 1.0 / args.symbol_rate;
    let base = match args.qam {
        Some(order) => {
            let constellation = build_constellation(ModulationFormat::try_from(order)?);
            let mut seq = generate_symbols(&constellation, args.count, t_s, args.seed)?;
            for s in &mut seq.samples {
                *s *= args.amplitude;
            }
            seq
        }
        None => SymbolSequence::new(vec![Complex64::new(args.amplitude, 0.0); args.count], t_s)?,
    };
    let tx = apply_carrier(&base, args.freq, args.phase);
    foe_core::io::write_iq(&args.out, &tx.samples)?;
    eprintln!("wrote {} samples to {}", args.count, args.out.display());
    Ok(())
}
