//! Brute-force enumeration of all `2^(n-1)` distinct cuts.
//!
//! Cuts are walked in Gray-code order so each step flips a single vertex
//! and updates the running cut value from that vertex's incident edges,
//! `O(deg)` per cut instead of `O(|E|)`. The walk either materializes the
//! full sorted value list (small `n`) or streams into a histogram plus
//! exact counters for caller-supplied thresholds (large `n`). Ranges of
//! the cut index space can be walked independently and merged, so parallel
//! enumeration gives the same answer as a single pass.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Cut, WeightedGraph};
use crate::math;

/// Largest `n` for which the full sorted value list is materialized
/// (`2^23` values, ~64 MiB).
pub const EXACT_LIST_CAP: usize = 24;

/// Default cap on any enumeration, streamed included.
pub const DEFAULT_ENUM_CAP: usize = 30;

/// Re-evaluate the running value directly this often to stop incremental
/// rounding drift from accumulating over long walks.
const RESYNC_INTERVAL: u64 = 1 << 16;

/// Walk canonical cut indices `lo..hi` in Gray-code order, calling
/// `visit(index, assignment_bits, cut_value)` for each.
fn gray_walk<F: FnMut(u64, u64, f64)>(graph: &WeightedGraph, lo: u64, hi: u64, mut visit: F) {
    if lo >= hi {
        return;
    }
    let adj = graph.adjacency();
    // Vertex 0 is pinned to the +1 side; index bits drive vertices 1..n.
    let mut bits = (lo ^ (lo >> 1)) << 1;
    let mut value = graph.cut_value_bits(bits);
    visit(lo, bits, value);
    for c in (lo + 1)..hi {
        let flipped = c.trailing_zeros() as usize + 1;
        let side = (bits >> flipped) & 1;
        let mut delta = 0.0;
        for &(u, w) in &adj[flipped] {
            if (bits >> u) & 1 == side {
                delta += w;
            } else {
                delta -= w;
            }
        }
        bits ^= 1 << flipped;
        value += delta;
        if (c - lo) % RESYNC_INTERVAL == 0 {
            value = graph.cut_value_bits(bits);
        }
        visit(c, bits, value);
    }
}

/// The exact multiset of all distinct cut values, sorted nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CutDistribution {
    values: Vec<f64>,
    n: usize,
}

impl CutDistribution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("distribution is nonempty")
    }

    /// Nearest-rank percentile, `q` in `[0, 100]`.
    pub fn percentile(&self, q: f64) -> Result<f64> {
        percentile_nearest_rank(&self.values, q)
    }

    /// Number of cut values strictly above `t`.
    pub fn count_above(&self, t: f64) -> usize {
        count_above_sorted(&self.values, t)
    }
}

/// Nearest-rank percentile of a sorted slice: the value at 1-based index
/// `ceil(q/100 * len)`, clamped into range.
pub fn percentile_nearest_rank(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InvalidParam("percentile of empty list".into()));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::InvalidParam(alloc::format!(
            "percentile {q} outside [0, 100]"
        )));
    }
    let len = sorted.len();
    let rank = math::ceil(q / 100.0 * len as f64) as usize;
    Ok(sorted[rank.clamp(1, len) - 1])
}

/// Number of entries of a sorted slice strictly above `t`.
pub fn count_above_sorted(sorted: &[f64], t: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v <= t)
}

/// Enumerate the exact cut-value distribution of `graph`.
///
/// Refuses `n` above `cap` or above [`EXACT_LIST_CAP`]; use
/// [`stream_profile`] for larger instances.
pub fn enumerate_distribution(graph: &WeightedGraph, cap: usize) -> Result<CutDistribution> {
    enumerate_full(graph, cap).map(|(dist, _)| dist)
}

/// One walk producing both the sorted distribution and the extrema profile.
pub fn enumerate_full(
    graph: &WeightedGraph,
    cap: usize,
) -> Result<(CutDistribution, InstanceProfile)> {
    let n = graph.n();
    let cap = cap.min(EXACT_LIST_CAP);
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    let count = 1u64 << (n - 1);
    let mut values = Vec::with_capacity(count as usize);
    let mut max_value = f64::NEG_INFINITY;
    let mut argmax_bits = 0u64;
    gray_walk(graph, 0, count, |_, bits, v| {
        values.push(v);
        if v > max_value {
            max_value = v;
            argmax_bits = bits;
        }
    });
    values.sort_unstable_by(f64::total_cmp);
    let profile = InstanceProfile {
        c_max: graph.cut_value_bits(argmax_bits),
        c_min: 0.0,
        argmax_cut: Cut::from_bits(argmax_bits, n),
    };
    Ok((CutDistribution { values, n }, profile))
}

/// Exact extrema of an instance: positive weights pin the minimum at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceProfile {
    pub c_max: f64,
    pub c_min: f64,
    pub argmax_cut: Cut,
}

/// Find the Max-Cut value and a cut attaining it by full enumeration.
pub fn max_cut(graph: &WeightedGraph, cap: usize) -> Result<InstanceProfile> {
    let streamed = stream_profile(graph, &[], 0, cap)?;
    Ok(streamed.into_profile(graph))
}

/// Associatively mergeable enumeration summary: exact maximum, exact counts
/// strictly above each registered threshold, and an optional fixed-resolution
/// histogram over `[0, total_weight]`.
#[derive(Debug, Clone)]
pub struct StreamedProfile {
    n: usize,
    total_weight: f64,
    thresholds: Vec<f64>,
    counts_above: Vec<u64>,
    bins: Vec<u64>,
    cuts_seen: u64,
    max_value: f64,
    argmax_bits: u64,
}

impl StreamedProfile {
    pub fn cuts_seen(&self) -> u64 {
        self.cuts_seen
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn argmax_cut(&self) -> Cut {
        Cut::from_bits(self.argmax_bits, self.n)
    }

    /// Exact count strictly above the `idx`-th registered threshold.
    pub fn count_above_threshold(&self, idx: usize) -> u64 {
        self.counts_above[idx]
    }

    /// Upper bound on the nearest-rank percentile from the histogram: the
    /// upper edge of the bin holding the rank. Conservative for
    /// "percentile below threshold" checks.
    pub fn percentile_upper(&self, q: f64) -> Result<f64> {
        if self.bins.is_empty() {
            return Err(Error::InvalidParam(
                "streamed profile was built without a histogram".into(),
            ));
        }
        if !(0.0..=100.0).contains(&q) {
            return Err(Error::InvalidParam(alloc::format!(
                "percentile {q} outside [0, 100]"
            )));
        }
        let rank = (math::ceil(q / 100.0 * self.cuts_seen as f64) as u64).clamp(1, self.cuts_seen);
        let mut cumulative = 0u64;
        for (b, &count) in self.bins.iter().enumerate() {
            cumulative += count;
            if cumulative >= rank {
                let width = self.total_weight / self.bins.len() as f64;
                return Ok((b as f64 + 1.0) * width);
            }
        }
        Ok(self.total_weight)
    }

    /// Merge two summaries of disjoint index ranges. Ties on the maximum
    /// keep the lowest canonical index, so the result does not depend on
    /// merge order.
    pub fn merge(mut self, other: &StreamedProfile) -> StreamedProfile {
        debug_assert_eq!(self.thresholds, other.thresholds);
        debug_assert_eq!(self.bins.len(), other.bins.len());
        for (a, b) in self.counts_above.iter_mut().zip(&other.counts_above) {
            *a += b;
        }
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.cuts_seen += other.cuts_seen;
        if other.max_value > self.max_value
            || (other.max_value == self.max_value && other.argmax_bits < self.argmax_bits)
        {
            self.max_value = other.max_value;
            self.argmax_bits = other.argmax_bits;
        }
        self
    }

    /// Finish into a profile, re-evaluating the maximum directly so `c_max`
    /// is an exact edge-order sum rather than an incremental one.
    pub fn into_profile(self, graph: &WeightedGraph) -> InstanceProfile {
        InstanceProfile {
            c_max: graph.cut_value_bits(self.argmax_bits),
            c_min: 0.0,
            argmax_cut: Cut::from_bits(self.argmax_bits, self.n),
        }
    }
}

/// Stream the full cut index space. `bins = 0` disables the histogram.
pub fn stream_profile(
    graph: &WeightedGraph,
    thresholds: &[f64],
    bins: usize,
    cap: usize,
) -> Result<StreamedProfile> {
    let n = graph.n();
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(stream_profile_range(
        graph,
        0,
        1u64 << (n - 1),
        thresholds,
        bins,
    ))
}

/// Stream one range `lo..hi` of canonical cut indices; results from
/// disjoint ranges combine with [`StreamedProfile::merge`].
pub fn stream_profile_range(
    graph: &WeightedGraph,
    lo: u64,
    hi: u64,
    thresholds: &[f64],
    bins: usize,
) -> StreamedProfile {
    let total_weight = graph.total_weight();
    let mut profile = StreamedProfile {
        n: graph.n(),
        total_weight,
        thresholds: thresholds.to_vec(),
        counts_above: alloc::vec![0; thresholds.len()],
        bins: alloc::vec![0; bins],
        cuts_seen: 0,
        max_value: f64::NEG_INFINITY,
        argmax_bits: u64::MAX,
    };
    let bin_scale = if bins > 0 && total_weight > 0.0 {
        bins as f64 / total_weight
    } else {
        0.0
    };
    gray_walk(graph, lo, hi, |_, bits, value| {
        profile.cuts_seen += 1;
        if value > profile.max_value {
            profile.max_value = value;
            profile.argmax_bits = bits;
        }
        for (count, &t) in profile.counts_above.iter_mut().zip(thresholds) {
            if value > t {
                *count += 1;
            }
        }
        if bins > 0 {
            let b = (value * bin_scale) as usize;
            profile.bins[b.min(bins - 1)] += 1;
        }
    });
    profile
}
