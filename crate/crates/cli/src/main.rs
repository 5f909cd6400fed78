//! Command-line driver for the Max-Cut benchmarking pipeline.

mod config;
mod csvio;
mod pipeline;
mod runfile;
mod stages;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, GenRequest};
use cutbench_core::gen::WeightScheme;
use cutbench_core::gw::{self, GwReport};
use cutbench_core::name::ModelParams;
use cutbench_core::stats::best_so_far;
use pipeline::ValidationErrors;
use stages::OutLayout;

#[derive(Parser)]
#[command(
    name = "cutbench",
    version,
    about = "Benchmark black-box QAOA sampling against Goemans-Williamson on Max-Cut"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Master seed; every stage derives its own stream from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (recorded in output metadata).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate guarded random instances and a manifest.
    Generate {
        #[command(flatten)]
        common: CommonFlags,
        /// Graph model: er, ba, or cws.
        #[arg(long)]
        model: String,
        /// Vertex count.
        #[arg(long)]
        n: usize,
        /// Edge probability (er) or rewiring probability (cws).
        #[arg(long)]
        p: Option<f64>,
        /// Ring degree (cws), must be even.
        #[arg(long)]
        k: Option<u32>,
        /// Attachment count (ba).
        #[arg(long)]
        m: Option<u32>,
        /// Number of accepted instances to emit.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Edge weight scheme: unit or uniform.
        #[arg(long, default_value = "unit")]
        weights: String,
        /// Guard thresholds file (flat key = value).
        #[arg(long)]
        guards: Option<PathBuf>,
        /// Candidate budget per instance.
        #[arg(long, default_value_t = 10_000)]
        attempts: u64,
    },
    /// Exact brute-force profile of instances (optimum, counts, percentile).
    BruteForce {
        #[command(flatten)]
        common: CommonFlags,
        /// Instance GML files.
        #[arg(long, required = true)]
        instance: Vec<PathBuf>,
    },
    /// Solve the GW relaxation, report thresholds, sample roundings.
    SolveGw {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long, required = true)]
        instance: Vec<PathBuf>,
        /// Hyperplane sample budget K.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Simulate QAOA and record per-shot cut values as a run matrix.
    SimulateQaoa {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        instance: PathBuf,
        /// Independent runs R.
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// Shots per run N; 0 derives floor(2^(n/2)).
        #[arg(long, default_value_t = 0)]
        shots: usize,
        /// Circuit depth p.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Cost angle per layer (repeat for depth > 1).
        #[arg(long = "gamma")]
        gammas: Vec<f64>,
        /// Mixer angle per layer (repeat for depth > 1).
        #[arg(long = "beta")]
        betas: Vec<f64>,
        /// Also export the matrix as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Percentile and threshold curves from a stored run matrix.
    Stats {
        #[command(flatten)]
        common: CommonFlags,
        /// Run matrix file (.runs.bin).
        #[arg(long)]
        matrix: PathBuf,
        /// GW report CSV for the same instance.
        #[arg(long)]
        gw: PathBuf,
        /// Oracle profile CSV for the same instance.
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Pool normalized run matrices from a pipeline directory.
    Aggregate {
        #[command(flatten)]
        common: CommonFlags,
        /// Pipeline output directory to scan.
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// pooled (percentiles over the pooled run set) or mean-curves
        /// (average of per-instance curves).
        #[arg(long, default_value = "pooled")]
        method: String,
    },
    /// Run the full pipeline from a configuration file.
    Run {
        /// Configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (not part of the config hash).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a configuration file and echo the effective settings.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if err.downcast_ref::<ValidationErrors>().is_some() {
                eprintln!("{err:#}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {err:#}");
                ExitCode::from(3)
            }
        }
    }
}

fn load_config_file(path: &Path) -> Result<(ExperimentConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let (mut config, notes) = ExperimentConfig::parse(&text)
        .map_err(|e| -> anyhow::Error { ValidationErrors(vec![format!("{e:#}")]).into() })?;
    config.base_dir = path.parent().map(Path::to_path_buf);
    Ok((config, notes))
}

fn base_config(common: &CommonFlags) -> ExperimentConfig {
    ExperimentConfig {
        seed: common.seed,
        workers: common.workers,
        ..ExperimentConfig::default()
    }
}

fn parse_guards_file(config: &mut ExperimentConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading guards {}", path.display()))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("guards line {}: expected key = value", idx + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let ctx = || format!("guards line {} ({key})", idx + 1);
        match key {
            "max_alpha" => config.guard_max_alpha = value.parse().with_context(ctx)?,
            "percentile" => {
                config.guard_percentile = if value == "auto" {
                    None
                } else {
                    Some(value.parse().with_context(ctx)?)
                }
            }
            "min_count" => config.guard_min_count = value.parse().with_context(ctx)?,
            "max_count" => config.guard_max_count = value.parse().with_context(ctx)?,
            other => bail!("guards line {}: unknown key {other:?}", idx + 1),
        }
    }
    Ok(())
}

fn model_from_flags(
    model: &str,
    p: Option<f64>,
    k: Option<u32>,
    m: Option<u32>,
) -> Result<ModelParams> {
    let params = match model {
        "er" => ModelParams::Er {
            p: p.context("er needs --p")?,
        },
        "ba" => ModelParams::Ba {
            m: m.context("ba needs --m")?,
        },
        "cws" => ModelParams::Cws {
            k: k.context("cws needs --k")?,
            p: p.context("cws needs --p")?,
        },
        other => bail!("unknown model {other:?} (expected er, ba, or cws)"),
    };
    Ok(params)
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            common,
            model,
            n,
            p,
            k,
            m,
            count,
            weights,
            guards,
            attempts,
        } => {
            let mut config = base_config(&common);
            config.weights = WeightScheme::parse(&weights).map_err(|e| anyhow!("{e}"))?;
            config.attempts = attempts;
            if let Some(path) = &guards {
                parse_guards_file(&mut config, path)?;
            }
            config.generate = vec![GenRequest {
                n,
                model: model_from_flags(&model, p, k, m)?,
                count,
            }];
            pipeline::ensure_valid(&config)?;
            let layout = OutLayout::new(&common.out);
            let generated = stages::stage_generate(&config, &layout)?;
            for inst in &generated {
                println!("accepted {}", inst.id);
            }
            println!(
                "wrote {} instances and manifest under {}",
                generated.len(),
                common.out.display()
            );
            Ok(())
        }
        Command::BruteForce { common, instance } => {
            let mut config = base_config(&common);
            config.instances = instance.clone();
            let layout = OutLayout::new(&common.out);
            for path in &instance {
                let inst = stages::load_graph(path)?;
                let analysis = stages::analyze_instance(&config, &inst)?;
                stages::write_profile_csv(&config, &layout, &inst, &analysis)?;
                println!(
                    "{}: c_max = {}, profile at {}",
                    inst.id,
                    analysis.profile.c_max,
                    layout.profile_csv(&inst.id).display()
                );
            }
            Ok(())
        }
        Command::SolveGw {
            common,
            instance,
            samples,
        } => {
            let mut config = base_config(&common);
            config.instances = instance.clone();
            config.gw_samples = samples;
            let layout = OutLayout::new(&common.out);
            for path in &instance {
                let inst = stages::load_graph(path)?;
                let analysis = stages::analyze_instance(&config, &inst)?;
                let stats = stages::stage_gw_sampling(&config, &layout, &inst, &analysis)?;
                println!(
                    "{}: sdp = {}, expected alpha = {:.4}, mean sampled cut = {:.4} over K = {}",
                    inst.id,
                    analysis.report.sdp_value,
                    analysis.report.expected_alpha,
                    stats.mean(),
                    stats.samples
                );
            }
            Ok(())
        }
        Command::SimulateQaoa {
            common,
            instance,
            runs,
            shots,
            depth,
            gammas,
            betas,
            csv,
        } => {
            let mut config = base_config(&common);
            config.instances = vec![instance.clone()];
            config.runs = runs;
            config.shots = shots;
            config.depth = depth;
            if !gammas.is_empty() {
                config.gammas = gammas;
            }
            if !betas.is_empty() {
                config.betas = betas;
            }
            pipeline::ensure_valid(&config)?;
            let layout = OutLayout::new(&common.out);
            let inst = stages::load_graph(&instance)?;
            let matrix = stages::stage_qaoa(&config, &layout, &inst, csv)?;
            println!(
                "{}: {} runs x {} shots -> {}",
                inst.id,
                matrix.rows(),
                matrix.cols(),
                layout.runs_bin(&inst.id).display()
            );
            Ok(())
        }
        Command::Stats {
            common,
            matrix,
            gw,
            profile,
            bootstrap,
            level,
        } => {
            let mut config = base_config(&common);
            config.bootstrap = bootstrap;
            config.level = level;
            let layout = OutLayout::new(&common.out);
            let matrix = runfile::read(&matrix)?;
            let report = read_report(&gw, &profile, matrix.instance())?;
            stages::stage_stats(&config, &layout, matrix.instance(), &matrix, &report)?;
            println!(
                "{}: curves at {}",
                matrix.instance(),
                layout.pcurves_csv(matrix.instance()).display()
            );
            Ok(())
        }
        Command::Aggregate {
            common,
            dir,
            bootstrap,
            level,
            method,
        } => {
            let method = stages::AggregateMethod::parse(&method)?;
            let mut config = base_config(&common);
            config.bootstrap = bootstrap;
            config.level = level;
            let source = OutLayout::new(&dir);
            let qaoa_dir = dir.join("qaoa");
            let mut bins: Vec<PathBuf> = std::fs::read_dir(&qaoa_dir)
                .with_context(|| format!("scanning {}", qaoa_dir.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.to_string_lossy().ends_with(".runs.bin"))
                .collect();
            bins.sort();
            if bins.is_empty() {
                bail!("no run matrices under {}", qaoa_dir.display());
            }
            let mut items = Vec::new();
            for bin in &bins {
                let matrix = runfile::read(bin)?;
                let (c_max, expected_alpha) =
                    stages::read_instance_summaries(&source, matrix.instance())?;
                items.push((best_so_far(&matrix), c_max, expected_alpha));
            }
            let out_path = common.out.join("aggregate.csv");
            match method {
                stages::AggregateMethod::Pooled => {
                    stages::stage_aggregate(&config, &out_path, &items)?
                }
                stages::AggregateMethod::MeanCurves => {
                    stages::stage_aggregate_mean_curves(&config, &out_path, &items)?
                }
            }
            println!(
                "aggregated {} instances -> {}",
                items.len(),
                out_path.display()
            );
            Ok(())
        }
        Command::Run {
            config: config_path,
            out,
            seed,
            workers,
        } => {
            let (mut config, notes) = load_config_file(&config_path)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(workers) = workers {
                config.workers = workers;
            }
            pipeline::run_pipeline(&config, &notes, &out)?;
            println!("pipeline complete: {}", out.display());
            Ok(())
        }
        Command::Validate {
            config: config_path,
        } => {
            let (config, notes) = load_config_file(&config_path)?;
            pipeline::ensure_valid(&config)?;
            print!("{}", pipeline::describe(&config, &notes));
            println!("# ok");
            Ok(())
        }
    }
}

/// Rebuild the threshold report from the CSVs earlier stages wrote.
fn read_report(gw_csv: &Path, profile_csv: &Path, expect_instance: &str) -> Result<GwReport> {
    let gw_data = csvio::CsvData::read(gw_csv)?;
    let profile = csvio::CsvData::read(profile_csv)?;
    for data in [&gw_data, &profile] {
        if let Some((_, id)) = data.comments.iter().find(|(k, _)| k == "instance") {
            if id != expect_instance {
                bail!("input produced for instance {id:?}, run matrix is {expect_instance:?}");
            }
        }
    }
    let c_max = profile.f64_at(0, profile.column("c_max")?)?;
    Ok(GwReport {
        sdp_value: gw_data.f64_at(0, gw_data.column("sdp_value")?)?,
        expected_cut: gw_data.f64_at(0, gw_data.column("expected_cut")?)?,
        expected_alpha: gw_data.f64_at(0, gw_data.column("expected_alpha")?)?,
        lower_bound: gw_data.f64_at(0, gw_data.column("lower_bound")?)?,
        lower_bound_sdp: gw_data.f64_at(0, gw_data.column("lower_bound_sdp")?)?,
        alpha_gw: gw::alpha_gw(),
        c_max,
    })
}
