//! Full pipeline orchestration: generate, brute-force, solve, simulate,
//! stats, aggregate, all under one configuration.
//!
//! Instances run in parallel up to the configured worker limit; stages
//! within an instance run in order. All cross-stage data flows through
//! completed files, stages never look at other instances, and a rerun with
//! the same configuration overwrites every file with identical bytes.

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use cutbench_core::stats::BestSoFarMatrix;

use crate::config::ExperimentConfig;
use crate::stages::{self, OutLayout};

/// Configuration problems; the caller exits with the validation code.
#[derive(Debug)]
pub struct ValidationErrors(pub Vec<String>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "configuration invalid:")?;
        for error in &self.0 {
            writeln!(f, "  - {error}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

pub fn ensure_valid(config: &ExperimentConfig) -> Result<()> {
    let errors = config.validate();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ValidationErrors(errors).into())
    }
}

/// Echo the effective configuration, with notes about filled defaults.
pub fn describe(config: &ExperimentConfig, notes: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&config.echo());
    if !notes.is_empty() {
        out.push('\n');
        for note in notes {
            out.push_str(&format!("# note: {note}\n"));
        }
    }
    out.push_str(&format!("# config_hash = {}\n", config.hash_hex()));
    out
}

struct StageGuard<'a> {
    instance: &'a str,
    stage: &'a str,
}

impl StageGuard<'_> {
    fn wrap<T>(&self, result: Result<T>) -> Result<T> {
        result
            .with_context(|| format!("stage {} failed for instance {}", self.stage, self.instance))
    }
}

fn instance_pipeline(
    config: &ExperimentConfig,
    layout: &OutLayout,
    inst: &stages::PreparedInstance,
) -> Result<(BestSoFarMatrix, f64, f64)> {
    let analysis = StageGuard {
        instance: &inst.id,
        stage: "brute-force",
    }
    .wrap(stages::analyze_instance(config, inst))?;
    StageGuard {
        instance: &inst.id,
        stage: "brute-force",
    }
    .wrap(stages::write_profile_csv(config, layout, inst, &analysis))?;
    StageGuard {
        instance: &inst.id,
        stage: "solve-gw",
    }
    .wrap(stages::stage_gw_sampling(config, layout, inst, &analysis).map(|_| ()))?;
    let matrix = StageGuard {
        instance: &inst.id,
        stage: "simulate-qaoa",
    }
    .wrap(stages::stage_qaoa(config, layout, inst, false))?;
    let bsf = StageGuard {
        instance: &inst.id,
        stage: "stats",
    }
    .wrap(stages::stage_stats(
        config,
        layout,
        &inst.id,
        &matrix,
        &analysis.report,
    ))?;
    Ok((bsf, analysis.profile.c_max, analysis.report.expected_alpha))
}

/// Run everything. Produces, per instance: GML, oracle profile, GW report
/// and `E_K` table, run matrix with metadata, percentile and threshold
/// curves; plus the manifest (when generating), the configuration echo,
/// and the cross-instance aggregate.
pub fn run_pipeline(config: &ExperimentConfig, notes: &[String], out: &Path) -> Result<()> {
    ensure_valid(config)?;
    let layout = OutLayout::new(out);
    crate::csvio::write_atomic(&layout.config_echo(), describe(config, notes).as_bytes())?;

    let instances = stages::prepare_instances(config, &layout).context("stage generate failed")?;
    if instances.is_empty() {
        return Err(anyhow!("no instances to process"));
    }

    // Instances in parallel; stages within an instance in order.
    let results = stages::parallel_map(instances.len(), config.workers, |idx| {
        instance_pipeline(config, &layout, &instances[idx])
    })?;

    let items: Vec<(BestSoFarMatrix, f64, f64)> = results.into_iter().collect();
    stages::stage_aggregate(config, &layout.aggregate_csv(), &items)
        .context("stage aggregate failed")?;
    Ok(())
}
