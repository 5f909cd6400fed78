//! Per-shot statistics: best-so-far transforms, percentile curves with
//! bootstrap confidence bands, threshold-crossing fractions, and pooling
//! across instances.
//!
//! A run matrix holds the raw cut value of shot `s` in run `r`. All curves
//! derive from its best-so-far transform (prefix maxima per run), matching
//! the post-processing of a sampler that keeps the best bitstring seen.
//! Percentiles use the same nearest-rank estimator as the exact oracle.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::oracle::percentile_nearest_rank;
use crate::rng::CounterRng;

/// Raw per-shot cut values: `rows` runs of `cols` shots each.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMatrix {
    instance: String,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    meta: Vec<(String, String)>,
}

impl RunMatrix {
    pub fn new(instance: String, rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParam("run matrix must be non-empty".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        Ok(Self {
            instance,
            rows,
            cols,
            values,
            meta: Vec::new(),
        })
    }

    pub fn instance(&self) -> &str {
        &self.instance
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ordered key-value metadata carried into the persisted form.
    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }
}

/// Prefix maxima of a run matrix: entry `(r, s)` is the best cut value run
/// `r` saw among its first `s + 1` shots. Rows are nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSoFarMatrix {
    instance: String,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl BestSoFarMatrix {
    pub fn instance(&self) -> &str {
        &self.instance
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }
}

/// Best-so-far transform.
pub fn best_so_far(matrix: &RunMatrix) -> BestSoFarMatrix {
    let mut values = Vec::with_capacity(matrix.values.len());
    for r in 0..matrix.rows {
        let mut best = f64::NEG_INFINITY;
        for &v in matrix.row(r) {
            best = best.max(v);
            values.push(best);
        }
    }
    BestSoFarMatrix {
        instance: matrix.instance.clone(),
        rows: matrix.rows,
        cols: matrix.cols,
        values,
    }
}

/// Confidence bands around a percentile curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Bands {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    pub replicates: usize,
    pub level: f64,
}

/// `P_q(s)` for each shot index, optionally with bootstrap bands.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileCurve {
    pub q: f64,
    pub points: Vec<f64>,
    pub bands: Option<Bands>,
}

fn column_percentile(bsf: &BestSoFarMatrix, col: usize, q: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    for r in 0..bsf.rows {
        scratch.push(bsf.row(r)[col]);
    }
    scratch.sort_unstable_by(f64::total_cmp);
    percentile_nearest_rank(scratch, q).expect("q validated by caller")
}

/// Nearest-rank percentile of each best-so-far column, `0 < q <= 100`.
pub fn percentile_curve(bsf: &BestSoFarMatrix, q: f64) -> Result<PercentileCurve> {
    if !(q > 0.0 && q <= 100.0) {
        return Err(Error::InvalidParam(alloc::format!(
            "curve percentile {q} outside (0, 100]"
        )));
    }
    let mut scratch = Vec::with_capacity(bsf.rows);
    let points = (0..bsf.cols)
        .map(|s| column_percentile(bsf, s, q, &mut scratch))
        .collect();
    Ok(PercentileCurve {
        q,
        points,
        bands: None,
    })
}

/// Percentile curve with nonparametric bootstrap bands: `replicates`
/// resamples of the run set with replacement, per-column percentile
/// recomputed, band edges taken as the empirical `(1 - level)/2` and
/// `1 - (1 - level)/2` quantiles of the replicate values.
pub fn bootstrap_ci(
    bsf: &BestSoFarMatrix,
    q: f64,
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<PercentileCurve> {
    if replicates < 100 {
        return Err(Error::InvalidParam(alloc::format!(
            "bootstrap needs at least 100 replicates, got {replicates}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParam(alloc::format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let mut curve = percentile_curve(bsf, q)?;

    // Each replicate resamples whole runs once; the same row multiset is
    // used for every column.
    let rows = bsf.rows;
    let mut resampled_rows = Vec::with_capacity(replicates * rows);
    for b in 0..replicates {
        let mut rng = CounterRng::from_seed(seed, "bootstrap-replicate", b as u64);
        for _ in 0..rows {
            resampled_rows.push(rng.below(rows as u64) as usize);
        }
    }

    let q_low = 100.0 * (1.0 - level) / 2.0;
    let q_high = 100.0 - q_low;
    let mut low = Vec::with_capacity(bsf.cols);
    let mut high = Vec::with_capacity(bsf.cols);
    let mut column = Vec::with_capacity(rows);
    let mut replicate_values = Vec::with_capacity(replicates);
    let mut gathered = Vec::with_capacity(rows);
    for s in 0..bsf.cols {
        column.clear();
        for r in 0..rows {
            column.push(bsf.row(r)[s]);
        }
        replicate_values.clear();
        for b in 0..replicates {
            let indices = &resampled_rows[b * rows..(b + 1) * rows];
            gathered.clear();
            gathered.extend(indices.iter().map(|&r| column[r]));
            gathered.sort_unstable_by(f64::total_cmp);
            replicate_values.push(percentile_nearest_rank(&gathered, q)?);
        }
        replicate_values.sort_unstable_by(f64::total_cmp);
        low.push(percentile_nearest_rank(&replicate_values, q_low)?);
        high.push(percentile_nearest_rank(&replicate_values, q_high)?);
    }
    curve.bands = Some(Bands {
        low,
        high,
        replicates,
        level,
    });
    Ok(curve)
}

/// Percentage of runs whose best-so-far strictly exceeds a threshold, per
/// shot index.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub threshold: f64,
    pub label: String,
    /// Values in `[0, 100]`, nondecreasing.
    pub fractions: Vec<f64>,
}

pub fn threshold_curve(bsf: &BestSoFarMatrix, threshold: f64, label: &str) -> ThresholdCurve {
    let mut fractions = Vec::with_capacity(bsf.cols);
    for s in 0..bsf.cols {
        let hits = (0..bsf.rows).filter(|&r| bsf.row(r)[s] > threshold).count();
        fractions.push(100.0 * hits as f64 / bsf.rows as f64);
    }
    ThresholdCurve {
        threshold,
        label: label.into(),
        fractions,
    }
}

/// One instance's contribution to the cross-instance aggregate.
#[derive(Debug, Clone)]
pub struct InstanceCurves<'a> {
    pub bsf: &'a BestSoFarMatrix,
    pub c_max: f64,
    pub expected_alpha: f64,
}

/// Pooled cross-instance curves over ratio-normalized runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurves {
    pub p90: PercentileCurve,
    pub p99: PercentileCurve,
    pub min_expected_alpha: f64,
    pub max_expected_alpha: f64,
    pub pooled_runs: usize,
    pub shots: usize,
}

/// Pool runs across instances after dividing each instance's values by its
/// `c_max`; shot budgets are truncated to the shortest. Percentiles are
/// taken over the pooled run set, with bootstrap bands.
pub fn aggregate_instances(
    instances: &[InstanceCurves<'_>],
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<AggregateCurves> {
    if instances.is_empty() {
        return Err(Error::InvalidParam("no instances to aggregate".into()));
    }
    let cols = instances.iter().map(|c| c.bsf.cols).min().unwrap();
    let rows: usize = instances.iter().map(|c| c.bsf.rows).sum();
    let mut values = Vec::with_capacity(rows * cols);
    for inst in instances {
        if !(inst.c_max > 0.0) {
            return Err(Error::InvalidParam(alloc::format!(
                "instance {} has non-positive c_max",
                inst.bsf.instance()
            )));
        }
        for r in 0..inst.bsf.rows {
            values.extend(inst.bsf.row(r)[..cols].iter().map(|v| v / inst.c_max));
        }
    }
    let pooled = BestSoFarMatrix {
        instance: "aggregate".into(),
        rows,
        cols,
        values,
    };
    let p90 = bootstrap_ci(&pooled, 90.0, replicates, level, seed)?;
    let p99 = bootstrap_ci(&pooled, 99.0, replicates, level, seed)?;
    let min_alpha = instances
        .iter()
        .map(|c| c.expected_alpha)
        .fold(f64::INFINITY, f64::min);
    let max_alpha = instances
        .iter()
        .map(|c| c.expected_alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AggregateCurves {
        p90,
        p99,
        min_expected_alpha: min_alpha,
        max_expected_alpha: max_alpha,
        pooled_runs: rows,
        shots: cols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn matrix(rows: &[&[f64]]) -> RunMatrix {
        let cols = rows[0].len();
        let values: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        RunMatrix::new("test".to_string(), rows.len(), cols, values).unwrap()
    }

    #[test]
    fn best_so_far_examples() {
        let bsf = best_so_far(&matrix(&[&[1.0, 3.0, 2.0, 5.0]]));
        assert_eq!(bsf.row(0), &[1.0, 3.0, 3.0, 5.0]);
        let bsf = best_so_far(&matrix(&[&[2.0, 2.0, 2.0]]));
        assert_eq!(bsf.row(0), &[2.0, 2.0, 2.0]);
        let bsf = best_so_far(&matrix(&[&[5.0, 4.0, 3.0]]));
        assert_eq!(bsf.row(0), &[5.0, 5.0, 5.0]);
    }

    #[test]
    fn rows_are_monotone_with_max_at_end() {
        let m = matrix(&[&[1.0, 0.5, 2.0, 1.5], &[3.0, 0.0, 0.0, 4.0]]);
        let bsf = best_so_far(&m);
        for r in 0..bsf.rows() {
            let row = bsf.row(r);
            for pair in row.windows(2) {
                assert!(pair[0] <= pair[1]);
            }
            let raw_max = m.row(r).iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            assert_eq!(*row.last().unwrap(), raw_max);
        }
    }

    #[test]
    fn percentile_curve_examples() {
        // All rows identical: the curve is that row.
        let m = matrix(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        let bsf = best_so_far(&m);
        let curve = percentile_curve(&bsf, 90.0).unwrap();
        assert_eq!(curve.points, vec![1.0, 2.0, 3.0]);

        // Ten rows with column values 1..10: q = 90 picks the 9th smallest.
        let rows: Vec<Vec<f64>> = (1..=10).map(|v| vec![v as f64]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let bsf = best_so_far(&matrix(&refs));
        assert_eq!(percentile_curve(&bsf, 90.0).unwrap().points, vec![9.0]);
        assert_eq!(percentile_curve(&bsf, 100.0).unwrap().points, vec![10.0]);

        assert!(percentile_curve(&bsf, 0.0).is_err());
        assert!(percentile_curve(&bsf, 100.5).is_err());
    }

    #[test]
    fn percentile_order_and_monotonicity() {
        let m = matrix(&[
            &[1.0, 4.0, 4.0, 9.0],
            &[2.0, 2.0, 7.0, 7.0],
            &[0.5, 3.0, 3.0, 3.0],
            &[1.5, 1.5, 8.0, 8.0],
        ]);
        let bsf = best_so_far(&m);
        let p50 = percentile_curve(&bsf, 50.0).unwrap();
        let p90 = percentile_curve(&bsf, 90.0).unwrap();
        for s in 0..bsf.cols() {
            assert!(p50.points[s] <= p90.points[s]);
        }
        for pair in p90.points.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        // At the last shot the curve is the percentile of per-run maxima.
        let mut maxima: Vec<f64> = (0..bsf.rows())
            .map(|r| *bsf.row(r).last().unwrap())
            .collect();
        maxima.sort_unstable_by(f64::total_cmp);
        assert_eq!(
            *p90.points.last().unwrap(),
            percentile_nearest_rank(&maxima, 90.0).unwrap()
        );
    }

    #[test]
    fn bootstrap_zero_width_on_constant_matrix() {
        let m = matrix(&[&[2.0, 2.0], &[2.0, 2.0], &[2.0, 2.0]]);
        let bsf = best_so_far(&m);
        let curve = bootstrap_ci(&bsf, 90.0, 200, 0.95, 7).unwrap();
        let bands = curve.bands.unwrap();
        assert_eq!(bands.low, curve.points);
        assert_eq!(bands.high, curve.points);
    }

    #[test]
    fn bootstrap_deterministic_and_contains_points() {
        let mut rng = CounterRng::from_seed(3, "stats-synth", 0);
        let rows = 60;
        let cols = 24;
        let values: Vec<f64> = (0..rows * cols).map(|_| rng.uniform() * 10.0).collect();
        let m = RunMatrix::new("synth".into(), rows, cols, values).unwrap();
        let bsf = best_so_far(&m);

        let a = bootstrap_ci(&bsf, 90.0, 300, 0.95, 11).unwrap();
        let b = bootstrap_ci(&bsf, 90.0, 300, 0.95, 11).unwrap();
        assert_eq!(a, b);

        let bands = a.bands.as_ref().unwrap();
        for s in 0..cols {
            assert!(bands.low[s] <= a.points[s] && a.points[s] <= bands.high[s]);
        }
        assert!(bootstrap_ci(&bsf, 90.0, 99, 0.95, 1).is_err());
        assert!(bootstrap_ci(&bsf, 90.0, 300, 1.0, 1).is_err());
    }

    #[test]
    fn bootstrap_coverage_on_iid_rows() {
        // 200 i.i.d. runs; the point curve should sit inside the band at
        // (at least) 95% of columns.
        let mut rng = CounterRng::from_seed(5, "stats-coverage", 0);
        let rows = 200;
        let cols = 30;
        let values: Vec<f64> = (0..rows * cols).map(|_| rng.normal()).collect();
        let m = RunMatrix::new("iid".into(), rows, cols, values).unwrap();
        let bsf = best_so_far(&m);
        let curve = bootstrap_ci(&bsf, 90.0, 400, 0.95, 13).unwrap();
        let bands = curve.bands.unwrap();
        let inside = (0..cols)
            .filter(|&s| bands.low[s] <= curve.points[s] && curve.points[s] <= bands.high[s])
            .count();
        assert!(inside as f64 >= 0.95 * cols as f64, "{inside}/{cols}");
    }

    #[test]
    fn threshold_curve_examples() {
        let bsf = best_so_far(&matrix(&[&[1.0, 3.0], &[2.0, 2.0]]));
        let curve = threshold_curve(&bsf, 1.5, "mid");
        assert_eq!(curve.fractions, vec![50.0, 100.0]);
        let below = threshold_curve(&bsf, 0.0, "below");
        assert_eq!(below.fractions, vec![100.0, 100.0]);
        let above = threshold_curve(&bsf, 3.0, "above");
        assert_eq!(above.fractions, vec![0.0, 0.0]);
        for pair in curve.fractions.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
    }

    #[test]
    fn aggregate_single_instance_matches_own_curves() {
        let m = matrix(&[&[1.0, 2.0, 4.0], &[2.0, 2.0, 2.0], &[0.0, 3.0, 3.0]]);
        let bsf = best_so_far(&m);
        let c_max = 4.0;
        let agg = aggregate_instances(
            &[InstanceCurves {
                bsf: &bsf,
                c_max,
                expected_alpha: 0.9,
            }],
            150,
            0.95,
            3,
        )
        .unwrap();
        let own = percentile_curve(&bsf, 90.0).unwrap();
        for (a, b) in agg.p90.points.iter().zip(&own.points) {
            assert!((a - b / c_max).abs() < 1e-12);
        }
        assert_eq!(agg.min_expected_alpha, 0.9);
        assert_eq!(agg.max_expected_alpha, 0.9);

        // Two identical normalized instances leave the curve unchanged.
        let twice = aggregate_instances(
            &[
                InstanceCurves {
                    bsf: &bsf,
                    c_max,
                    expected_alpha: 0.85,
                },
                InstanceCurves {
                    bsf: &bsf,
                    c_max,
                    expected_alpha: 0.95,
                },
            ],
            150,
            0.95,
            3,
        )
        .unwrap();
        assert_eq!(twice.p90.points, agg.p90.points);
        assert_eq!(twice.min_expected_alpha, 0.85);
        assert_eq!(twice.max_expected_alpha, 0.95);
        for s in 0..twice.shots {
            assert!(twice.p99.points[s] >= twice.p90.points[s]);
        }
    }

    #[test]
    fn aggregate_truncates_to_shortest_budget() {
        let a = best_so_far(&matrix(&[&[1.0, 2.0, 3.0, 4.0]]));
        let b = best_so_far(&matrix(&[&[2.0, 2.0]]));
        let agg = aggregate_instances(
            &[
                InstanceCurves {
                    bsf: &a,
                    c_max: 4.0,
                    expected_alpha: 0.9,
                },
                InstanceCurves {
                    bsf: &b,
                    c_max: 2.0,
                    expected_alpha: 0.9,
                },
            ],
            150,
            0.95,
            1,
        )
        .unwrap();
        assert_eq!(agg.shots, 2);
        assert_eq!(agg.pooled_runs, 2);
    }

    #[test]
    fn run_matrix_validation() {
        assert!(RunMatrix::new("x".into(), 0, 3, vec![]).is_err());
        assert!(RunMatrix::new("x".into(), 2, 2, vec![1.0; 3]).is_err());
        assert!(aggregate_instances(&[], 150, 0.95, 0).is_err());
    }
}
