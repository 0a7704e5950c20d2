//! `bisense` — synthesize, compensate, extract and evaluate bistatic SISO
//! CSI sensing features from the command line.
//!
//! Subcommands: `simulate`, `extract`, `baseline`, `augment`, `evaluate`,
//! `bench`. Outputs are deterministic for a fixed (config, seed). Failures
//! print one machine-parsable line to stderr:
//! `error: kind=<kind> msg="<description>"` and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Array3;

use bisense_core::baselines::{cacc, casr, simulate_dual, ula_companion_scene};
use bisense_core::bench::{bench_pipeline, bench_scaling, BenchConfig};
use bisense_core::error::Error;
use bisense_core::extract::{
    compress_delay, estimate_peak, extract_frame, extract_frame_matched, DelayDopplerFrame,
    FeatureTensor,
};
use bisense_core::geometry::{augment_tensor, AugmentKind, AugmentationSpec};
use bisense_core::io::{
    export_map_csv, export_map_pgm, read_csi, read_tensor, write_csi, write_tensor, EvalReport,
    SceneConfig,
};
use bisense_core::metrics::{mirror_ratio, range_error_cdf};
use bisense_core::sim::{generate_csi, random_impairment, split_cpis};

#[derive(Parser)]
#[command(name = "bisense", version, about = "Bistatic SISO CSI sensing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic CSI capture from a scene config.
    Simulate {
        /// Scene configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output CSI capture (.wcsi).
        #[arg(long)]
        out: PathBuf,
        /// Noise seed (clock impairments draw from the config seed).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extract a delay-Doppler-time tensor from a CSI capture.
    Extract {
        /// Input CSI capture (.wcsi).
        #[arg(long, value_name = "FILE", visible_alias = "in")]
        input: PathBuf,
        /// Config providing the [extraction] parameters.
        #[arg(long)]
        config: PathBuf,
        /// Output tensor (.wddt).
        #[arg(long)]
        out: PathBuf,
        /// Also export the delay-compressed Doppler-time map as CSV.
        #[arg(long)]
        map_csv: Option<PathBuf>,
        /// Also export the delay-compressed Doppler-time map as 16-bit PGM.
        #[arg(long)]
        map_pgm: Option<PathBuf>,
    },
    /// Run a two-antenna baseline (CACC or CASR) on a synthetic dual scene.
    Baseline {
        #[arg(long, value_enum)]
        method: BaselineMethod,
        /// Scene configuration; antenna B uses per-path half-wavelength
        /// phase offsets with AoAs drawn from --aoa-seed.
        #[arg(long)]
        config: PathBuf,
        /// Output tensor (.wddt).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        aoa_seed: u64,
        /// Noise seed shared by both antennas.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the plain matched-filter (2D FFT) tail instead of MVDR.
        #[arg(long, default_value_t = false)]
        plain_fft: bool,
    },
    /// Apply one augmentation to a tensor file.
    Augment {
        #[arg(long, value_name = "FILE", visible_alias = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        kind: AugmentKindArg,
        /// Translate/time-shift: signed bins. Scale: factor. Noise: power.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        amount: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate per-CPI peaks from a tensor and compare against scene truth.
    Evaluate {
        #[arg(long, value_name = "FILE", visible_alias = "in")]
        input: PathBuf,
        /// Scene config providing ground truth (first dynamic path).
        #[arg(long)]
        truth: PathBuf,
    },
    /// Measure single-threaded per-CPI extraction latency.
    Bench {
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 32)]
        delay_bins: usize,
        /// Also report latency over delay-bin sweeps {8,16,32,64}.
        #[arg(long, default_value_t = false)]
        scaling: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    Cacc,
    Casr,
}

#[derive(Clone, Copy, ValueEnum)]
enum AugmentKindArg {
    Translate,
    Scale,
    Mirror,
    TimeShift,
    Noise,
}

impl From<AugmentKindArg> for AugmentKind {
    fn from(k: AugmentKindArg) -> Self {
        match k {
            AugmentKindArg::Translate => AugmentKind::Translate,
            AugmentKindArg::Scale => AugmentKind::AffineScale,
            AugmentKindArg::Mirror => AugmentKind::Mirror,
            AugmentKindArg::TimeShift => AugmentKind::TimeShift,
            AugmentKindArg::Noise => AugmentKind::Noise,
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidScene(_) | Error::InvalidConfig(_) | Error::InvalidAugmentation(_) => "config",
        Error::Io(_) => "io",
        Error::BadMagic { .. } | Error::VersionMismatch { .. } | Error::TruncatedPayload { .. } => {
            "format"
        }
        _ => "numeric",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: kind={} msg=\"{}\"", error_kind(&e), e);
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let cfg = SceneConfig::from_path(&config)?;
            let scene = cfg.to_scene()?;
            let frame = generate_csi(&scene, seed)?;
            write_csi(&out, &frame, cfg.grid.carrier_hz)?;
            println!("wrote={} subcarriers={} symbols={}", out.display(), frame.num_subcarriers(), frame.num_symbols());
            Ok(())
        }
        Command::Extract { input, config, out, map_csv, map_pgm } => {
            let cfg = SceneConfig::from_path(&config)?;
            let extract_cfg = cfg.extraction.to_extract_config()?;
            let grid = cfg.extraction.delay_grid()?;
            let (frame, _carrier) = read_csi(&input)?;
            let cpis = split_cpis(&frame, extract_cfg.cpi_symbols, extract_cfg.cpi_stride);
            if cpis.is_empty() {
                return Err(Error::EmptyInput(format!(
                    "capture has {} symbols, need at least one CPI of {}",
                    frame.num_symbols(),
                    extract_cfg.cpi_symbols
                )));
            }
            let tensor = bisense_core::extract::extract_tensor(&cpis, &grid, &extract_cfg)?;
            write_tensor(&out, &tensor)?;
            if let Some(path) = map_csv {
                export_map_csv(&compress_delay(&tensor), &path)?;
            }
            if let Some(path) = map_pgm {
                export_map_pgm(&compress_delay(&tensor), &path)?;
            }
            let (ld, lf, lt) = tensor.data.dim();
            println!("wrote={} delay_bins={ld} doppler_bins={lf} cpis={lt}", out.display());
            Ok(())
        }
        Command::Baseline { method, config, out, aoa_seed, seed, plain_fft } => {
            let cfg = SceneConfig::from_path(&config)?;
            let extract_cfg = cfg.extraction.to_extract_config()?;
            let grid = cfg.extraction.delay_grid()?;
            let scene_a = cfg.to_scene()?;
            let scene_b = ula_companion_scene(&scene_a, aoa_seed);
            let impairment = {
                let mut imp = if cfg.impairment.enabled {
                    random_impairment(cfg.grid.symbols, cfg.impairment.to_scale_s, cfg.impairment.seed)
                } else {
                    bisense_core::sim::ClockImpairment::none(cfg.grid.symbols)
                };
                imp.noise_power = scene_a.impairment.noise_power;
                imp
            };
            let dual = simulate_dual(&scene_a, &scene_b, &impairment, seed)?;
            let cpis_a = split_cpis(&dual.antenna_a, extract_cfg.cpi_symbols, extract_cfg.cpi_stride);
            let cpis_b = split_cpis(&dual.antenna_b, extract_cfg.cpi_symbols, extract_cfg.cpi_stride);
            if cpis_a.is_empty() {
                return Err(Error::EmptyInput("capture shorter than one CPI".into()));
            }

            let mut maps: Vec<DelayDopplerFrame> = Vec::with_capacity(cpis_a.len());
            for (ca, cb) in cpis_a.iter().zip(cpis_b.iter()) {
                let pair = bisense_core::baselines::DualAntennaFrame {
                    antenna_a: ca.clone(),
                    antenna_b: cb.clone(),
                };
                let matrix = match method {
                    BaselineMethod::Cacc => cacc(&pair),
                    BaselineMethod::Casr => casr(&pair)?,
                };
                let map = if plain_fft {
                    extract_frame_matched(&matrix, &grid, &ca.grid.frequencies, ca.grid.sample_rate(), &extract_cfg)?
                } else {
                    extract_frame(&matrix, &grid, &ca.grid.frequencies, ca.grid.sample_rate(), &extract_cfg)?
                };
                maps.push(map);
            }
            let (ld, lf) = maps[0].magnitudes.dim();
            let mut data = Array3::<f64>::zeros((ld, lf, maps.len()));
            for (t, map) in maps.iter().enumerate() {
                for d in 0..ld {
                    for f in 0..lf {
                        data[(d, f, t)] = map.magnitudes[(d, f)];
                    }
                }
            }
            let dt = cfg.grid.symbol_interval_s;
            let tensor = FeatureTensor {
                data,
                delay_grid: grid,
                doppler_axis: maps[0].doppler_axis.clone(),
                cpi_times: (0..maps.len()).map(|t| (t * extract_cfg.cpi_stride) as f64 * dt).collect(),
                cpi_stride: extract_cfg.cpi_stride,
            };
            write_tensor(&out, &tensor)?;
            println!("wrote={} cpis={}", out.display(), maps.len());
            Ok(())
        }
        Command::Augment { input, out, kind, amount, seed } => {
            let tensor = read_tensor(&input)?;
            let spec = AugmentationSpec { kind: kind.into(), magnitude: amount, seed };
            let augmented = augment_tensor(&tensor, &spec)?;
            write_tensor(&out, &augmented)?;
            println!("wrote={}", out.display());
            Ok(())
        }
        Command::Evaluate { input, truth } => {
            let cfg = SceneConfig::from_path(&truth)?;
            let (truth_range, truth_doppler) = cfg.truth().ok_or_else(|| {
                Error::InvalidConfig("truth config needs one static and one dynamic path".into())
            })?;
            let tensor = read_tensor(&input)?;
            let (_, _, lt) = tensor.data.dim();
            let mut range_pairs = Vec::with_capacity(lt);
            let mut doppler_pairs = Vec::with_capacity(lt);
            let mut mirror_db = Vec::with_capacity(lt);
            for t in 0..lt {
                let map = DelayDopplerFrame {
                    magnitudes: tensor.data.index_axis(ndarray::Axis(2), t).to_owned(),
                    doppler_axis: tensor.doppler_axis.clone(),
                    grid: tensor.delay_grid.clone(),
                };
                let peak = estimate_peak(&map, cfg.extraction.dc_exclusion_bins)?;
                range_pairs.push((peak.range_m, truth_range));
                doppler_pairs.push((peak.doppler_hz, truth_doppler));
                let row: Vec<f64> = map.magnitudes.row(peak.delay_bin).to_vec();
                mirror_db.push(mirror_ratio(&row, &map.doppler_axis, truth_doppler)?);
            }
            let report = EvalReport {
                percentiles: range_error_cdf(&range_pairs)?,
                range_pairs,
                doppler_pairs,
                mirror_db,
                latency: None,
            };
            report.validate()?;
            print!("{}", report.to_key_values());
            Ok(())
        }
        Command::Bench { reps, delay_bins, scaling } => {
            let stats = bench_pipeline(&BenchConfig { repetitions: reps, warmup: 10, delay_bins })?;
            println!("latency_mean_ms={:.4}", stats.mean_ms);
            println!("latency_std_ms={:.4}", stats.std_ms);
            println!("latency_median_ms={:.4}", stats.median_ms);
            println!("latency_samples={}", stats.samples_ms.len());
            if scaling {
                for (bins, s) in bench_scaling(&[8, 16, 32, 64], reps.max(10))? {
                    println!("scaling.{bins}.median_ms={:.4}", s.median_ms);
                }
            }
            Ok(())
        }
    }
}
