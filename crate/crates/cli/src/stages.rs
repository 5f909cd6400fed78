//! Pipeline stages and their output files.
//!
//! Each stage reads a graph (and earlier stage results), computes, and
//! writes files under a fixed output layout. Work inside a stage is
//! deterministic for a fixed configuration: randomness comes from counter
//! streams keyed by `(seed, stage label, index)`, and worker parallelism
//! only changes scheduling, never results, except for GW sampling where
//! the sample partition is part of the configuration (worker count is
//! hashed and recorded).

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use cutbench_core::gen::{self, GenSpec, GeneratedInstance};
use cutbench_core::gml;
use cutbench_core::graph::WeightedGraph;
use cutbench_core::gw::{self, GwFactorization, GwReport, SamplingStats};
use cutbench_core::oracle::{self, InstanceProfile};
use cutbench_core::qaoa::{self, QaoaParams, SampleMethod};
use cutbench_core::rng::{derive_stream, CounterRng};
use cutbench_core::stats::{self, BestSoFarMatrix, RunMatrix};

use crate::config::ExperimentConfig;
use crate::csvio::{fmt_f64, CsvData, CsvFile};
use crate::runfile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory layout used by the pipeline and the standalone
/// subcommands alike.
#[derive(Debug, Clone)]
pub struct OutLayout {
    pub root: PathBuf,
}

impl OutLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn config_echo(&self) -> PathBuf {
        self.root.join("config.txt")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.csv")
    }

    pub fn gml(&self, id: &str) -> PathBuf {
        self.root.join("instances").join(format!("{id}.gml"))
    }

    pub fn profile_csv(&self, id: &str) -> PathBuf {
        self.root.join("oracle").join(format!("{id}.profile.csv"))
    }

    pub fn gw_csv(&self, id: &str) -> PathBuf {
        self.root.join("gw").join(format!("{id}.gw.csv"))
    }

    pub fn ek_csv(&self, id: &str) -> PathBuf {
        self.root.join("gw").join(format!("{id}.ek.csv"))
    }

    pub fn runs_bin(&self, id: &str) -> PathBuf {
        self.root.join("qaoa").join(format!("{id}.runs.bin"))
    }

    pub fn runs_csv(&self, id: &str) -> PathBuf {
        self.root.join("qaoa").join(format!("{id}.runs.csv"))
    }

    pub fn meta_csv(&self, id: &str) -> PathBuf {
        self.root.join("qaoa").join(format!("{id}.meta.csv"))
    }

    pub fn pcurves_csv(&self, id: &str) -> PathBuf {
        self.root.join("stats").join(format!("{id}.pcurves.csv"))
    }

    pub fn threshold_csv(&self, id: &str) -> PathBuf {
        self.root.join("stats").join(format!("{id}.threshold.csv"))
    }

    pub fn aggregate_csv(&self) -> PathBuf {
        self.root.join("aggregate.csv")
    }
}

/// Provenance lines stamped at the top of every output file.
pub fn stamp(csv: &mut CsvFile, config: &ExperimentConfig) {
    csv.comment("cutbench", VERSION);
    csv.comment("config_hash", config.hash_hex());
    csv.comment("seed", config.seed);
    csv.comment("workers", config.workers);
}

/// Run `f` over `0..count` on up to `workers` threads, collecting results
/// in index order.
pub fn parallel_map<R: Send>(
    count: usize,
    workers: usize,
    f: impl Fn(usize) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let workers = workers.max(1).min(count.max(1));
    let results: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..count).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= count {
                    break;
                }
                let result = f(idx);
                results.lock().unwrap()[idx] = Some(result);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(idx, r)| r.unwrap_or_else(|| Err(anyhow!("task {idx} produced no result"))))
        .collect()
}

/// An instance ready for the per-instance stages.
#[derive(Debug, Clone)]
pub struct PreparedInstance {
    pub id: String,
    pub graph: WeightedGraph,
}

pub fn load_graph(path: &Path) -> Result<PreparedInstance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance {}", path.display()))?;
    let graph =
        gml::parse_gml(&text).map_err(|e| anyhow!("parsing instance {}: {e}", path.display()))?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("instance path {} has no usable stem", path.display()))?
        .to_string();
    Ok(PreparedInstance { id, graph })
}

/// Generate all requested instances, writing their GML files and the
/// manifest. Sequential task ids; candidate attempts continue across
/// instances of the same request so repeats cannot collide.
pub fn stage_generate(
    config: &ExperimentConfig,
    layout: &OutLayout,
) -> Result<Vec<PreparedInstance>> {
    if config.generate.is_empty() {
        return Ok(Vec::new());
    }
    let mut manifest = CsvFile::new();
    stamp(&mut manifest, config);
    let mut prepared = Vec::new();
    let mut task_id = 0u64;
    let mut manifest_rows: Vec<Vec<String>> = Vec::new();
    for (request_idx, request) in config.generate.iter().enumerate() {
        let guards = config.guard_config_for(request.n);
        let spec = GenSpec {
            n: request.n,
            model: request.model,
            weights: config.weights,
            seed: derive_stream(config.seed, "gen-request", request_idx as u64),
        };
        let mut attempt_start = 0u64;
        for _ in 0..request.count {
            let inst = generate_from(
                &spec,
                &guards,
                task_id,
                attempt_start,
                config.attempts,
                config.enum_cap,
            )?;
            attempt_start = inst.attempt + 1;
            task_id += 1;
            let id = inst.name.to_string();
            crate::csvio::write_atomic(&layout.gml(&id), gml::write_gml(&inst.graph).as_bytes())?;
            manifest_rows.push(vec![
                id.clone(),
                inst.accepted_seed.to_string(),
                fmt_f64(inst.profile.c_max),
                fmt_f64(inst.report.expected_alpha),
                fmt_f64(inst.percentile_value),
                inst.count_above_expectation.to_string(),
            ]);
            prepared.push(PreparedInstance {
                id,
                graph: inst.graph,
            });
        }
    }
    manifest.header(&[
        "instance",
        "seed",
        "c_max",
        "expected_alpha",
        "p999",
        "count_above",
    ]);
    for row in manifest_rows {
        manifest.row(&row);
    }
    manifest.write(&layout.manifest())?;
    Ok(prepared)
}

fn generate_from(
    spec: &GenSpec,
    guards: &gen::GuardConfig,
    task_id: u64,
    attempt_start: u64,
    budget: u64,
    enum_cap: usize,
) -> Result<GeneratedInstance> {
    gen::generate_instance(
        spec,
        guards,
        task_id,
        attempt_start..attempt_start + budget,
        enum_cap,
    )
    .map_err(|e| anyhow!("generating {} instance: {e}", spec.model.model()))
}

/// Load configured instance files and copy their canonical GML into the
/// output tree, then append generated ones.
pub fn prepare_instances(
    config: &ExperimentConfig,
    layout: &OutLayout,
) -> Result<Vec<PreparedInstance>> {
    let mut prepared = Vec::new();
    for path in config.resolved_instances() {
        let inst = load_graph(&path)?;
        crate::csvio::write_atomic(
            &layout.gml(&inst.id),
            gml::write_gml(&inst.graph).as_bytes(),
        )?;
        prepared.push(inst);
    }
    prepared.extend(stage_generate(config, layout)?);
    let mut ids: Vec<&str> = prepared.iter().map(|p| p.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != prepared.len() {
        bail!("duplicate instance ids in configuration");
    }
    Ok(prepared)
}

/// Exact oracle results plus the GW pipeline outputs for one instance.
/// Above the exact-list cap the percentile comes from the streamed
/// histogram (a conservative upper bound) and the count stays exact.
pub struct InstanceAnalysis {
    pub gw_seed: u64,
    pub profile: InstanceProfile,
    pub fact: GwFactorization,
    pub report: GwReport,
    pub hardness_percentile: f64,
    pub percentile_value: f64,
    pub count_above_expectation: u64,
    pub distinct_cuts: u64,
}

pub fn analyze_instance(
    config: &ExperimentConfig,
    inst: &PreparedInstance,
) -> Result<InstanceAnalysis> {
    let n = inst.graph.n();
    let gw_seed = derive_stream(config.seed, &format!("gw-solve/{}", inst.id), 0);
    let fact = gw::solve_sdp_with_retries(&inst.graph, &config.solve_config(gw_seed), 2)
        .map_err(|e| anyhow!("solving SDP for {}: {e}", inst.id))?;
    let q = config.guard_config_for(n).hardness_percentile;
    let wrap = |e: cutbench_core::Error| anyhow!("profiling {}: {e}", inst.id);
    if n <= oracle::EXACT_LIST_CAP {
        let (dist, profile) = oracle::enumerate_full(&inst.graph, config.enum_cap).map_err(wrap)?;
        let report = GwReport::new(&fact, &inst.graph, profile.c_max).map_err(wrap)?;
        let percentile_value = dist.percentile(q).map_err(wrap)?;
        let count = dist.count_above(report.expected_cut) as u64;
        Ok(InstanceAnalysis {
            gw_seed,
            profile,
            fact,
            report,
            hardness_percentile: q,
            percentile_value,
            count_above_expectation: count,
            distinct_cuts: dist.len() as u64,
        })
    } else {
        let expected = gw::expected_cut(&fact, &inst.graph).map_err(wrap)?;
        let streamed = oracle::stream_profile(&inst.graph, &[expected], 1 << 16, config.enum_cap)
            .map_err(wrap)?;
        let profile = streamed.clone().into_profile(&inst.graph);
        let report = GwReport::new(&fact, &inst.graph, profile.c_max).map_err(wrap)?;
        let percentile_value = streamed.percentile_upper(q).map_err(wrap)?;
        Ok(InstanceAnalysis {
            gw_seed,
            profile,
            fact,
            report,
            hardness_percentile: q,
            percentile_value,
            count_above_expectation: streamed.count_above_threshold(0),
            distinct_cuts: streamed.cuts_seen(),
        })
    }
}

/// Write the oracle profile record.
pub fn write_profile_csv(
    config: &ExperimentConfig,
    layout: &OutLayout,
    inst: &PreparedInstance,
    analysis: &InstanceAnalysis,
) -> Result<()> {
    let mut csv = CsvFile::new();
    stamp(&mut csv, config);
    csv.comment("instance", &inst.id);
    csv.comment("hardness_percentile", fmt_f64(analysis.hardness_percentile));
    csv.comment("distinct_cuts", analysis.distinct_cuts);
    csv.header(&[
        "instance",
        "c_max",
        "count_above_gw_expectation",
        "p999_value",
    ]);
    csv.row(&[
        inst.id.clone(),
        fmt_f64(analysis.profile.c_max),
        analysis.count_above_expectation.to_string(),
        fmt_f64(analysis.percentile_value),
    ]);
    csv.write(&layout.profile_csv(&inst.id))
}

/// Run the hyperplane-sampling budget, split across workers with
/// per-worker streams, and write the GW report plus the `E_K` table.
pub fn stage_gw_sampling(
    config: &ExperimentConfig,
    layout: &OutLayout,
    inst: &PreparedInstance,
    analysis: &InstanceAnalysis,
) -> Result<SamplingStats> {
    let targets = gw::standard_targets(
        analysis.profile.c_max,
        analysis.report.expected_cut,
        analysis.report.lower_bound,
    );
    let workers = config.workers.min(config.gw_samples.max(1) as usize).max(1);
    let base = config.gw_samples / workers as u64;
    let extra = config.gw_samples % workers as u64;
    let parts = parallel_map(workers, workers, |w| {
        let quota = base + u64::from((w as u64) < extra);
        let mut stats = SamplingStats::new(targets.clone());
        let mut rng =
            CounterRng::from_seed(config.seed, &format!("gw-sample/{}", inst.id), w as u64);
        gw::sample_roundings(&analysis.fact, &inst.graph, &mut stats, quota, &mut rng)
            .map_err(|e| anyhow!("sampling roundings for {}: {e}", inst.id))?;
        Ok(stats)
    })?;
    let mut merged = SamplingStats::new(targets);
    for part in &parts {
        merged = merged.merge(part);
    }

    let mut report_csv = CsvFile::new();
    stamp(&mut report_csv, config);
    csv_gw_report(&mut report_csv, inst, analysis);
    report_csv.write(&layout.gw_csv(&inst.id))?;

    let mut ek = CsvFile::new();
    stamp(&mut ek, config);
    ek.comment("instance", &inst.id);
    ek.comment("samples", merged.samples);
    ek.comment("mean_cut", fmt_f64(merged.mean()));
    ek.comment("sample_std", fmt_f64(merged.sample_std()));
    ek.comment("best_value", fmt_f64(merged.best_value()));
    ek.comment(
        "gw_expectation_alpha",
        fmt_f64(analysis.report.expected_alpha),
    );
    ek.comment("gw_lower_bound_alpha", fmt_f64(analysis.report.alpha_gw));
    ek.comment("c_max", fmt_f64(analysis.profile.c_max));
    ek.header(&["alpha", "S_alpha", "E_K"]);
    for (idx, target) in merged.targets.iter().enumerate() {
        let expectation = match merged.expected_samples(idx) {
            Some(v) => fmt_f64(v),
            None => "inf".to_string(),
        };
        ek.row(&[fmt_f64(target.alpha), target.hits.to_string(), expectation]);
    }
    ek.write(&layout.ek_csv(&inst.id))?;
    Ok(merged)
}

fn csv_gw_report(csv: &mut CsvFile, inst: &PreparedInstance, analysis: &InstanceAnalysis) {
    csv.comment("instance", &inst.id);
    csv.comment("gw_solve_seed", analysis.gw_seed);
    csv.comment("rank", analysis.fact.rank());
    csv.comment("solve_iterations", analysis.fact.iterations());
    csv.comment("solve_residual", fmt_f64(analysis.fact.solve_residual()));
    csv.comment("alpha_gw", fmt_f64(analysis.report.alpha_gw));
    csv.header(&[
        "instance",
        "sdp_value",
        "expected_cut",
        "expected_alpha",
        "lower_bound",
        "lower_bound_sdp",
    ]);
    csv.row(&[
        inst.id.clone(),
        fmt_f64(analysis.report.sdp_value),
        fmt_f64(analysis.report.expected_cut),
        fmt_f64(analysis.report.expected_alpha),
        fmt_f64(analysis.report.lower_bound),
        fmt_f64(analysis.report.lower_bound_sdp),
    ]);
}

/// Simulate the configured QAOA circuit once, then draw `runs x shots`
/// measurement outcomes (one counter stream per run) into a run matrix.
pub fn stage_qaoa(
    config: &ExperimentConfig,
    layout: &OutLayout,
    inst: &PreparedInstance,
    write_csv: bool,
) -> Result<RunMatrix> {
    let n = inst.graph.n();
    let shots = config.shots_for(n);
    if (shots as u128) > (1u128 << (n - 1)) {
        bail!(
            "instance {}: shot budget {shots} exceeds 2^(n-1) distinct cuts",
            inst.id
        );
    }
    let params = QaoaParams::new(config.gammas.clone(), config.betas.clone())
        .map_err(|e| anyhow!("qaoa parameters: {e}"))?;
    let state = qaoa::build_state(&inst.graph, &params, config.sim_cap)
        .map_err(|e| anyhow!("simulating {}: {e}", inst.id))?;
    let table = qaoa::CostTable::build(&inst.graph);
    let method = SampleMethod::for_budget(shots as u64, n);

    let rows = parallel_map(config.runs, config.workers, |run| {
        let mut rng =
            CounterRng::from_seed(config.seed, &format!("qaoa-shots/{}", inst.id), run as u64);
        let record = qaoa::sample_shots_with(&state, &table, shots as u64, &mut rng, method)
            .map_err(|e| anyhow!("sampling shots for {}: {e}", inst.id))?;
        Ok(record.shots.iter().map(|s| s.value).collect::<Vec<f64>>())
    })?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let mut matrix = RunMatrix::new(inst.id.clone(), config.runs, shots, values)
        .map_err(|e| anyhow!("assembling run matrix for {}: {e}", inst.id))?;
    matrix.push_meta("config_hash", config.hash_hex());
    matrix.push_meta("seed", config.seed.to_string());
    matrix.push_meta("runs", config.runs.to_string());
    matrix.push_meta("shots", shots.to_string());
    matrix.push_meta("depth", config.depth.to_string());
    matrix.push_meta(
        "gamma",
        config
            .gammas
            .iter()
            .map(|g| fmt_f64(*g))
            .collect::<Vec<_>>()
            .join(","),
    );
    matrix.push_meta(
        "beta",
        config
            .betas
            .iter()
            .map(|b| fmt_f64(*b))
            .collect::<Vec<_>>()
            .join(","),
    );
    matrix.push_meta("sampler", method.name());
    matrix.push_meta("workers", config.workers.to_string());

    runfile::write(&layout.runs_bin(&inst.id), &matrix)?;
    if write_csv {
        crate::csvio::write_atomic(
            &layout.runs_csv(&inst.id),
            runfile::to_csv(&matrix).as_bytes(),
        )?;
    }

    let mut meta = CsvFile::new();
    stamp(&mut meta, config);
    meta.header(&["key", "value"]);
    meta.row(&["instance".into(), inst.id.clone()]);
    meta.row(&["n".into(), n.to_string()]);
    meta.row(&["edges".into(), inst.graph.edge_count().to_string()]);
    for (k, v) in matrix.meta() {
        meta.row(&[k.clone(), v.clone()]);
    }
    meta.row(&[
        "params_source".into(),
        "declared configuration; no per-instance tuning".into(),
    ]);
    meta.write(&layout.meta_csv(&inst.id))?;
    Ok(matrix)
}

/// Threshold set used for the per-instance crossing curves.
pub fn threshold_set(report: &GwReport) -> [(String, f64); 4] {
    [
        ("pct_gt_lower_bound".to_string(), report.lower_bound),
        ("pct_gt_0.9cmax".to_string(), 0.9 * report.c_max),
        ("pct_gt_gw_expectation".to_string(), report.expected_cut),
        ("pct_gt_0.99cmax".to_string(), 0.99 * report.c_max),
    ]
}

/// Percentile curves with bootstrap bands plus threshold-crossing curves.
pub fn stage_stats(
    config: &ExperimentConfig,
    layout: &OutLayout,
    inst_id: &str,
    matrix: &RunMatrix,
    report: &GwReport,
) -> Result<BestSoFarMatrix> {
    let bsf = stats::best_so_far(matrix);
    let seed90 = derive_stream(config.seed, &format!("stats/{inst_id}"), 90);
    let seed99 = derive_stream(config.seed, &format!("stats/{inst_id}"), 99);
    let p90 = stats::bootstrap_ci(&bsf, 90.0, config.bootstrap, config.level, seed90)
        .map_err(|e| anyhow!("bootstrap for {inst_id}: {e}"))?;
    let p99 = stats::bootstrap_ci(&bsf, 99.0, config.bootstrap, config.level, seed99)
        .map_err(|e| anyhow!("bootstrap for {inst_id}: {e}"))?;

    let mut curves = CsvFile::new();
    stamp(&mut curves, config);
    curves.comment("instance", inst_id);
    curves.comment("bootstrap_replicates", config.bootstrap);
    curves.comment("confidence_level", fmt_f64(config.level));
    curves.header(&["s", "p90", "p90_lo", "p90_hi", "p99", "p99_lo", "p99_hi"]);
    let b90 = p90.bands.as_ref().expect("bootstrap_ci always sets bands");
    let b99 = p99.bands.as_ref().expect("bootstrap_ci always sets bands");
    for s in 0..bsf.cols() {
        curves.row(&[
            (s + 1).to_string(),
            fmt_f64(p90.points[s]),
            fmt_f64(b90.low[s]),
            fmt_f64(b90.high[s]),
            fmt_f64(p99.points[s]),
            fmt_f64(b99.low[s]),
            fmt_f64(b99.high[s]),
        ]);
    }
    curves.write(&layout.pcurves_csv(inst_id))?;

    let thresholds = threshold_set(report);
    let curves: Vec<_> = thresholds
        .iter()
        .map(|(label, t)| stats::threshold_curve(&bsf, *t, label))
        .collect();
    let mut csv = CsvFile::new();
    stamp(&mut csv, config);
    csv.comment("instance", inst_id);
    for (label, t) in &thresholds {
        csv.comment(label, fmt_f64(*t));
    }
    let mut header = vec!["s"];
    header.extend(thresholds.iter().map(|(label, _)| label.as_str()));
    csv.header(&header);
    for s in 0..bsf.cols() {
        let mut row = vec![(s + 1).to_string()];
        row.extend(curves.iter().map(|c| fmt_f64(c.fractions[s])));
        csv.row(&row);
    }
    csv.write(&layout.threshold_csv(inst_id))?;
    Ok(bsf)
}

/// How the cross-instance figure is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMethod {
    /// Percentiles over the pooled, ratio-normalized run set (default).
    Pooled,
    /// Pointwise average of the per-instance normalized curves, offered
    /// for comparison; points and band edges are averaged alike.
    MeanCurves,
}

impl AggregateMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(AggregateMethod::Pooled),
            "mean-curves" => Ok(AggregateMethod::MeanCurves),
            other => bail!("unknown aggregate method {other:?} (expected pooled or mean-curves)"),
        }
    }
}

/// Pool normalized runs across instances and write the aggregate curves.
pub fn stage_aggregate(
    config: &ExperimentConfig,
    out_path: &Path,
    items: &[(BestSoFarMatrix, f64, f64)],
) -> Result<()> {
    let inputs: Vec<stats::InstanceCurves<'_>> = items
        .iter()
        .map(|(bsf, c_max, expected_alpha)| stats::InstanceCurves {
            bsf,
            c_max: *c_max,
            expected_alpha: *expected_alpha,
        })
        .collect();
    let seed = derive_stream(config.seed, "aggregate", 0);
    let agg = stats::aggregate_instances(&inputs, config.bootstrap, config.level, seed)
        .map_err(|e| anyhow!("aggregating: {e}"))?;
    let mut csv = CsvFile::new();
    stamp(&mut csv, config);
    csv.comment("method", "pooled");
    csv.comment("pooled_runs", agg.pooled_runs);
    csv.comment("instances", items.len());
    csv.comment("min_gw_expectation_alpha", fmt_f64(agg.min_expected_alpha));
    csv.comment("max_gw_expectation_alpha", fmt_f64(agg.max_expected_alpha));
    csv.comment("bootstrap_replicates", config.bootstrap);
    csv.comment("confidence_level", fmt_f64(config.level));
    csv.header(&["s", "p90", "p90_lo", "p90_hi", "p99", "p99_lo", "p99_hi"]);
    let b90 = agg.p90.bands.as_ref().expect("aggregate always has bands");
    let b99 = agg.p99.bands.as_ref().expect("aggregate always has bands");
    for s in 0..agg.shots {
        csv.row(&[
            (s + 1).to_string(),
            fmt_f64(agg.p90.points[s]),
            fmt_f64(b90.low[s]),
            fmt_f64(b90.high[s]),
            fmt_f64(agg.p99.points[s]),
            fmt_f64(b99.low[s]),
            fmt_f64(b99.high[s]),
        ]);
    }
    csv.write(out_path)
}

/// The alternative aggregate: bootstrap each instance's normalized curves,
/// truncate to the shortest budget, and average points and bands pointwise.
pub fn stage_aggregate_mean_curves(
    config: &ExperimentConfig,
    out_path: &Path,
    items: &[(BestSoFarMatrix, f64, f64)],
) -> Result<()> {
    if items.is_empty() {
        bail!("no instances to aggregate");
    }
    let cols = items.iter().map(|(bsf, _, _)| bsf.cols()).min().unwrap();
    // points, low, high for p90 then p99.
    let mut sums = vec![[0.0f64; 6]; cols];
    for (idx, (bsf, c_max, _)) in items.iter().enumerate() {
        if !(*c_max > 0.0) {
            bail!("instance {} has non-positive c_max", bsf.instance());
        }
        for (slot, q) in [(0usize, 90.0), (3usize, 99.0)] {
            let seed = derive_stream(config.seed, "aggregate-mean", (idx * 2 + slot / 3) as u64);
            let curve = stats::bootstrap_ci(bsf, q, config.bootstrap, config.level, seed)
                .map_err(|e| anyhow!("aggregating {}: {e}", bsf.instance()))?;
            let bands = curve
                .bands
                .as_ref()
                .expect("bootstrap_ci always sets bands");
            for s in 0..cols {
                sums[s][slot] += curve.points[s] / c_max;
                sums[s][slot + 1] += bands.low[s] / c_max;
                sums[s][slot + 2] += bands.high[s] / c_max;
            }
        }
    }
    let scale = 1.0 / items.len() as f64;
    let min_alpha = items
        .iter()
        .map(|(_, _, a)| *a)
        .fold(f64::INFINITY, f64::min);
    let max_alpha = items
        .iter()
        .map(|(_, _, a)| *a)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut csv = CsvFile::new();
    stamp(&mut csv, config);
    csv.comment("method", "mean-curves");
    csv.comment("instances", items.len());
    csv.comment("min_gw_expectation_alpha", fmt_f64(min_alpha));
    csv.comment("max_gw_expectation_alpha", fmt_f64(max_alpha));
    csv.comment("bootstrap_replicates", config.bootstrap);
    csv.comment("confidence_level", fmt_f64(config.level));
    csv.header(&["s", "p90", "p90_lo", "p90_hi", "p99", "p99_lo", "p99_hi"]);
    for (s, sum) in sums.iter().enumerate() {
        csv.row(&[
            (s + 1).to_string(),
            fmt_f64(sum[0] * scale),
            fmt_f64(sum[1] * scale),
            fmt_f64(sum[2] * scale),
            fmt_f64(sum[3] * scale),
            fmt_f64(sum[4] * scale),
            fmt_f64(sum[5] * scale),
        ]);
    }
    csv.write(out_path)
}

/// Read back `(c_max, expected_alpha)` for an instance from its profile
/// and GW report files.
pub fn read_instance_summaries(layout: &OutLayout, id: &str) -> Result<(f64, f64)> {
    let profile = CsvData::read(&layout.profile_csv(id))?;
    let c_max = profile.f64_at(0, profile.column("c_max")?)?;
    let gw = CsvData::read(&layout.gw_csv(id))?;
    let expected_alpha = gw.f64_at(0, gw.column("expected_alpha")?)?;
    Ok((c_max, expected_alpha))
}
