//! Flat key-value experiment configuration.
//!
//! One `key = value` pair per line, `#` comments, two repeatable keys
//! (`instance` for existing GML files, `generate` for generation requests).
//! Parsing fills documented defaults and reports which were filled; the
//! canonical echo of the effective configuration is hashed (FNV-1a) and
//! stamped into every output artifact, so artifacts can be traced to the
//! exact settings that produced them. Output location is deliberately not
//! part of the echo: the same experiment written to two directories yields
//! identical bytes.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cutbench_core::gen::{GenSpec, GuardConfig, WeightScheme};
use cutbench_core::gw::SolveConfig;
use cutbench_core::name::ModelParams;
use cutbench_core::oracle;
use cutbench_core::qaoa;

/// One `generate = ...` request.
#[derive(Debug, Clone, PartialEq)]
pub struct GenRequest {
    pub n: usize,
    pub model: ModelParams,
    pub count: usize,
}

/// Effective experiment settings after defaults are filled.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub workers: usize,
    pub runs: usize,
    /// 0 means "derive per instance": `floor(2^(n/2))` shots.
    pub shots: usize,
    pub depth: usize,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gw_samples: u64,
    /// 0 means the solver's default rank.
    pub gw_rank: usize,
    pub gw_tol: f64,
    pub gw_max_iters: u64,
    pub guard_max_alpha: f64,
    /// `None` means "scaled to the instance size".
    pub guard_percentile: Option<f64>,
    /// 0 means "the vertex count".
    pub guard_min_count: usize,
    pub guard_max_count: usize,
    pub weights: WeightScheme,
    pub enum_cap: usize,
    pub sim_cap: usize,
    pub attempts: u64,
    pub bootstrap: usize,
    pub level: f64,
    pub instances: Vec<PathBuf>,
    pub generate: Vec<GenRequest>,
    /// Directory relative instance paths resolve against (the config
    /// file's directory). Not part of the echo or the hash.
    pub base_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            workers: 1,
            runs: 50,
            shots: 0,
            depth: 1,
            gammas: vec![0.5],
            betas: vec![0.5],
            gw_samples: 100_000,
            gw_rank: 0,
            gw_tol: 1e-8,
            gw_max_iters: 100_000,
            guard_max_alpha: 0.97,
            guard_percentile: None,
            guard_min_count: 0,
            guard_max_count: 128,
            weights: WeightScheme::Unit,
            enum_cap: oracle::DEFAULT_ENUM_CAP,
            sim_cap: qaoa::DEFAULT_SIM_CAP,
            attempts: 10_000,
            bootstrap: 1000,
            level: 0.95,
            instances: Vec::new(),
            generate: Vec::new(),
            base_dir: None,
        }
    }
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid number {f:?}"))
        })
        .collect()
}

fn parse_generate(value: &str) -> Result<GenRequest> {
    let mut tokens = value.split_whitespace();
    let model_token = tokens.next().context("empty generate request")?;
    let mut n: Option<usize> = None;
    let mut p: Option<f64> = None;
    let mut k: Option<u32> = None;
    let mut m: Option<u32> = None;
    let mut count = 1usize;
    for token in tokens {
        let (key, val) = token
            .split_once('=')
            .with_context(|| format!("expected key=value, found {token:?}"))?;
        match key {
            "n" => n = Some(val.parse().with_context(|| format!("invalid n {val:?}"))?),
            "p" => p = Some(val.parse().with_context(|| format!("invalid p {val:?}"))?),
            "k" => k = Some(val.parse().with_context(|| format!("invalid k {val:?}"))?),
            "m" => m = Some(val.parse().with_context(|| format!("invalid m {val:?}"))?),
            "count" => {
                count = val
                    .parse()
                    .with_context(|| format!("invalid count {val:?}"))?
            }
            other => bail!("unknown generate field {other:?}"),
        }
    }
    let n = n.context("generate request needs n=<vertices>")?;
    let model = match model_token {
        "er" => ModelParams::Er {
            p: p.context("er needs p=<probability>")?,
        },
        "ba" => ModelParams::Ba {
            m: m.context("ba needs m=<attachments>")?,
        },
        "cws" => ModelParams::Cws {
            k: k.context("cws needs k=<ring degree>")?,
            p: p.context("cws needs p=<rewiring probability>")?,
        },
        other => bail!("unknown model {other:?} (expected er, ba, or cws)"),
    };
    Ok(GenRequest { n, model, count })
}

fn format_generate(request: &GenRequest) -> String {
    match request.model {
        ModelParams::Er { p } => format!("er n={} p={} count={}", request.n, p, request.count),
        ModelParams::Ba { m } => format!("ba n={} m={} count={}", request.n, m, request.count),
        ModelParams::Cws { k, p } => {
            format!(
                "cws n={} k={} p={} count={}",
                request.n, k, p, request.count
            )
        }
    }
}

impl ExperimentConfig {
    /// Parse configuration text. Returns the effective config plus notes
    /// naming each key that was filled with its default.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut config = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", idx + 1))?;
            let key = key.trim();
            let value = value.trim();
            let repeatable = matches!(key, "instance" | "generate");
            if !repeatable && seen.iter().any(|s| s == key) {
                bail!("line {}: duplicate key {key:?}", idx + 1);
            }
            seen.push(key.to_string());
            let ctx = || format!("line {} ({key})", idx + 1);
            match key {
                "seed" => config.seed = value.parse().with_context(ctx)?,
                "workers" => config.workers = value.parse().with_context(ctx)?,
                "runs" => config.runs = value.parse().with_context(ctx)?,
                "shots" => config.shots = value.parse().with_context(ctx)?,
                "depth" => config.depth = value.parse().with_context(ctx)?,
                "gamma" => config.gammas = parse_f64_list(value).with_context(ctx)?,
                "beta" => config.betas = parse_f64_list(value).with_context(ctx)?,
                "gw_samples" => config.gw_samples = value.parse().with_context(ctx)?,
                "gw_rank" => config.gw_rank = value.parse().with_context(ctx)?,
                "gw_tol" => config.gw_tol = value.parse().with_context(ctx)?,
                "gw_max_iters" => config.gw_max_iters = value.parse().with_context(ctx)?,
                "guard_max_alpha" => config.guard_max_alpha = value.parse().with_context(ctx)?,
                "guard_percentile" => {
                    config.guard_percentile = if value == "auto" {
                        None
                    } else {
                        Some(value.parse().with_context(ctx)?)
                    }
                }
                "guard_min_count" => config.guard_min_count = value.parse().with_context(ctx)?,
                "guard_max_count" => config.guard_max_count = value.parse().with_context(ctx)?,
                "weights" => {
                    config.weights = WeightScheme::parse(value)
                        .map_err(|e| anyhow::anyhow!("line {} ({key}): {e}", idx + 1))?
                }
                "enum_cap" => config.enum_cap = value.parse().with_context(ctx)?,
                "sim_cap" => config.sim_cap = value.parse().with_context(ctx)?,
                "attempts" => config.attempts = value.parse().with_context(ctx)?,
                "bootstrap" => config.bootstrap = value.parse().with_context(ctx)?,
                "level" => config.level = value.parse().with_context(ctx)?,
                "instance" => config.instances.push(PathBuf::from(value)),
                "generate" => config
                    .generate
                    .push(parse_generate(value).with_context(ctx)?),
                other => bail!("line {}: unknown key {other:?}", idx + 1),
            }
        }
        let defaults = ExperimentConfig::default();
        let mut notes = Vec::new();
        let mut note = |key: &str, value: String| {
            if !seen.iter().any(|s| s == key) {
                notes.push(format!("{key} not set; using default {value}"));
            }
        };
        note("seed", defaults.seed.to_string());
        note("runs", defaults.runs.to_string());
        note("shots", "0 (floor(2^(n/2)) per instance)".into());
        note("gamma", "0.5".into());
        note("beta", "0.5".into());
        note("gw_samples", defaults.gw_samples.to_string());
        Ok((config, notes))
    }

    /// Canonical text form of the effective configuration.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let gamma = self
            .gammas
            .iter()
            .map(|g| crate::csvio::fmt_f64(*g))
            .collect::<Vec<_>>()
            .join(",");
        let beta = self
            .betas
            .iter()
            .map(|b| crate::csvio::fmt_f64(*b))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "workers = {}", self.workers);
        let _ = writeln!(out, "runs = {}", self.runs);
        let _ = writeln!(out, "shots = {}", self.shots);
        let _ = writeln!(out, "depth = {}", self.depth);
        let _ = writeln!(out, "gamma = {gamma}");
        let _ = writeln!(out, "beta = {beta}");
        let _ = writeln!(out, "gw_samples = {}", self.gw_samples);
        let _ = writeln!(out, "gw_rank = {}", self.gw_rank);
        let _ = writeln!(out, "gw_tol = {}", crate::csvio::fmt_f64(self.gw_tol));
        let _ = writeln!(out, "gw_max_iters = {}", self.gw_max_iters);
        let _ = writeln!(
            out,
            "guard_max_alpha = {}",
            crate::csvio::fmt_f64(self.guard_max_alpha)
        );
        let _ = writeln!(
            out,
            "guard_percentile = {}",
            self.guard_percentile
                .map(|q| crate::csvio::fmt_f64(q))
                .unwrap_or_else(|| "auto".into())
        );
        let _ = writeln!(out, "guard_min_count = {}", self.guard_min_count);
        let _ = writeln!(out, "guard_max_count = {}", self.guard_max_count);
        let _ = writeln!(out, "weights = {}", self.weights.name());
        let _ = writeln!(out, "enum_cap = {}", self.enum_cap);
        let _ = writeln!(out, "sim_cap = {}", self.sim_cap);
        let _ = writeln!(out, "attempts = {}", self.attempts);
        let _ = writeln!(out, "bootstrap = {}", self.bootstrap);
        let _ = writeln!(out, "level = {}", crate::csvio::fmt_f64(self.level));
        for path in &self.instances {
            let _ = writeln!(out, "instance = {}", path.display());
        }
        for request in &self.generate {
            let _ = writeln!(out, "generate = {}", format_generate(request));
        }
        out
    }

    /// FNV-1a hash of the canonical echo; stamped into every artifact.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.echo().as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash())
    }

    /// All violations, each naming the offending key.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.runs == 0 {
            errors.push("runs: must be at least 1".into());
        }
        if self.depth == 0 {
            errors.push("depth: must be at least 1".into());
        }
        if self.gammas.len() != self.depth {
            errors.push(format!(
                "gamma: {} angles for depth {}",
                self.gammas.len(),
                self.depth
            ));
        }
        if self.betas.len() != self.depth {
            errors.push(format!(
                "beta: {} angles for depth {}",
                self.betas.len(),
                self.depth
            ));
        }
        if self.gw_samples == 0 {
            errors.push("gw_samples: must be at least 1".into());
        }
        if !(self.gw_tol > 0.0) {
            errors.push("gw_tol: must be positive".into());
        }
        if self.gw_max_iters == 0 {
            errors.push("gw_max_iters: must be at least 1".into());
        }
        if self.workers == 0 {
            errors.push("workers: must be at least 1".into());
        }
        if self.attempts == 0 {
            errors.push("attempts: must be at least 1".into());
        }
        if self.bootstrap < 100 {
            errors.push("bootstrap: needs at least 100 replicates".into());
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            errors.push("level: must lie in (0, 1)".into());
        }
        if let Err(e) = self.guard_config_for(2).validate() {
            errors.push(format!("guards: {e}"));
        }
        if self.instances.is_empty() && self.generate.is_empty() {
            errors.push("instance/generate: at least one instance source required".into());
        }
        for request in &self.generate {
            if request.count == 0 {
                errors.push(format!(
                    "generate: zero count in {}",
                    format_generate(request)
                ));
            }
            let spec = GenSpec {
                n: request.n,
                model: request.model,
                weights: self.weights,
                seed: self.seed,
            };
            if let Err(e) = spec.validate() {
                errors.push(format!("generate: {e}"));
            }
            self.check_shot_bound(request.n, &mut errors);
        }
        for path in self.resolved_instances() {
            match std::fs::read_to_string(&path) {
                Err(e) => errors.push(format!("instance {}: {e}", path.display())),
                Ok(text) => match cutbench_core::gml::parse_gml(&text) {
                    Err(e) => errors.push(format!("instance {}: {e}", path.display())),
                    Ok(graph) => self.check_shot_bound(graph.n(), &mut errors),
                },
            }
        }
        errors
    }

    fn check_shot_bound(&self, n: usize, errors: &mut Vec<String>) {
        let distinct = 1u128 << (n - 1);
        if self.shots as u128 > distinct {
            errors.push(format!(
                "shots: {} exceeds the 2^(n-1) = {distinct} distinct cuts of an n = {n} instance",
                self.shots
            ));
        }
        if self.shots == 0 && Self::derived_shots(n) as u128 > distinct {
            errors.push(format!(
                "shots: derived budget {} exceeds 2^(n-1) for n = {n}",
                Self::derived_shots(n)
            ));
        }
    }

    fn derived_shots(n: usize) -> usize {
        (1u64 << n).isqrt() as usize
    }

    /// Instance paths with relative ones resolved against `base_dir`.
    pub fn resolved_instances(&self) -> Vec<PathBuf> {
        self.instances
            .iter()
            .map(|path| match (&self.base_dir, path.is_relative()) {
                (Some(base), true) => base.join(path),
                _ => path.clone(),
            })
            .collect()
    }

    /// Shot budget for an instance of size `n`: explicit, or
    /// `floor(2^(n/2))`.
    pub fn shots_for(&self, n: usize) -> usize {
        if self.shots > 0 {
            self.shots
        } else {
            Self::derived_shots(n)
        }
    }

    pub fn guard_config_for(&self, n: usize) -> GuardConfig {
        let mut guards = match self.guard_percentile {
            Some(q) => GuardConfig {
                hardness_percentile: q,
                ..GuardConfig::reference()
            },
            None => GuardConfig::scaled_for(n),
        };
        guards.max_expected_alpha = self.guard_max_alpha;
        guards.min_count = (self.guard_min_count > 0).then_some(self.guard_min_count);
        guards.max_count = self.guard_max_count;
        guards
    }

    pub fn solve_config(&self, seed: u64) -> SolveConfig {
        SolveConfig {
            rank: (self.gw_rank > 0).then_some(self.gw_rank),
            tol: self.gw_tol,
            max_iters: self.gw_max_iters,
            seed,
        }
    }
}
