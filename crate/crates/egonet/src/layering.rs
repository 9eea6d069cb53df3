//! Optimal one-dimensional clustering and circle construction.
//!
//! Ties are grouped by normalized contact frequency with an exact dynamic
//! program over contiguous partitions of the sorted values (the 1D analogue
//! of k-means, which is optimal in one dimension). On top of the clustering
//! sit model selection via AIC, the construction of inclusive circles and
//! exclusive rings, population-level aggregation, and the mapping of circle
//! hierarchies onto the named layers known from offline social networks.

use crate::stats::{kahan_sum, mean_ci95, Moments2};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LayeringError {
    #[error("cannot split {n} values into {k} clusters")]
    BadArity { k: usize, n: usize },
    #[error("input contains a non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("no circle hierarchy with {circles} circles maps onto the offline layers (need 4 or 5)")]
    Unmappable { circles: usize },
    #[error("mismatched lengths: {left} values vs {right} frequencies")]
    LengthMismatch { left: usize, right: usize },
}

/// Size, mean and within-cluster sum of squares of one cluster, in
/// ascending value order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterStats {
    pub size: usize,
    pub mean: f64,
    pub within_ss: f64,
}

/// An optimal contiguous partition of a value set into `k` clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSolution {
    pub k: usize,
    /// Cluster index (0 = lowest values) for every input position.
    pub assignment: Vec<usize>,
    /// `boundaries[j]` is the index, in ascending sorted order, of the first
    /// element of cluster `j + 1`; empty for `k = 1`.
    pub boundaries: Vec<usize>,
    /// Per-cluster statistics in ascending value order.
    pub clusters: Vec<ClusterStats>,
    /// Sum of within-cluster sums of squares.
    pub total_within_ss: f64,
    /// Total sum of squares around the global mean.
    pub ss_tot: f64,
}

impl ClusterSolution {
    /// All values equal: no variance to explain.
    pub fn is_degenerate(&self) -> bool {
        self.ss_tot == 0.0
    }
}

/// Fraction of total variance captured by the partition,
/// `(ss_tot - total_within_ss) / ss_tot`. Defined as 1 for degenerate
/// (all-equal) inputs.
pub fn explained_variance(sol: &ClusterSolution) -> f64 {
    if sol.is_degenerate() {
        return 1.0;
    }
    (sol.ss_tot - sol.total_within_ss) / sol.ss_tot
}

/// Variance floor used inside the AIC likelihood so that single-value
/// clusters have a finite density.
pub const AIC_VARIANCE_FLOOR: f64 = 1e-6;

/// Akaike information criterion of a partition: `-2 L + 2 q` with
/// `q = 2k` parameters (a mean and a variance per cluster).
///
/// `L` is the hard-assignment Gaussian classification log-likelihood: each
/// cluster contributes its points' log-density under a normal with the
/// cluster's mean and (floored) maximum-likelihood variance, plus the
/// multinomial log-weight `n_j ln(n_j / n)` of the assignment itself. The
/// weight term keeps the criterion from rewarding the carving of tiny
/// clusters whose floored variance would otherwise mint free likelihood.
pub fn aic(sol: &ClusterSolution) -> f64 {
    let n: usize = sol.clusters.iter().map(|c| c.size).sum();
    let n_f = n as f64;
    let mut log_l = 0.0f64;
    for c in &sol.clusters {
        let size = c.size as f64;
        let var = (c.within_ss / size).max(AIC_VARIANCE_FLOOR);
        log_l += -0.5 * size * (2.0 * std::f64::consts::PI * var).ln()
            - c.within_ss / (2.0 * var)
            + size * (size / n_f).ln();
    }
    -2.0 * log_l + 2.0 * (2 * sol.k) as f64
}

/// Exact optimal clustering of `values` into `k` contiguous groups.
///
/// Equal-cost partitions resolve toward the smallest leading cluster. Fails
/// when `k` is zero or exceeds the number of values, or on non-finite input.
pub fn ckmeans_1d(values: &[f64], k: usize) -> Result<ClusterSolution, LayeringError> {
    let mut sweep = ckmeans_sweep(values, k)?;
    if sweep.len() < k {
        return Err(LayeringError::BadArity {
            k,
            n: values.len(),
        });
    }
    Ok(sweep.swap_remove(k - 1))
}

/// Optimal clusterings for every `k` from 1 to `min(k_max, n)` in one
/// dynamic-programming pass. Solutions share the same sorted order, so the
/// whole sweep costs little more than the largest single `k`.
pub fn ckmeans_sweep(values: &[f64], k_max: usize) -> Result<Vec<ClusterSolution>, LayeringError> {
    let n = values.len();
    if k_max == 0 || n == 0 {
        return Err(LayeringError::BadArity { k: k_max, n });
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(LayeringError::NonFinite { index: i });
        }
    }
    let k_cap = k_max.min(n);

    // stable sort keeps duplicate handling deterministic
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .expect("finite values")
    });
    let sorted: Vec<f64> = order.iter().map(|&i| values[i as usize]).collect();

    // prefix sums of values shifted by the median keep the cancellation in
    // the within-ss formula benign
    let shift = sorted[n / 2];
    let mut s = vec![0.0f64; n + 1];
    let mut s2 = vec![0.0f64; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        let d = v - shift;
        s[i + 1] = s[i] + d;
        s2[i + 1] = s2[i] + d * d;
    }
    let ss = |j: usize, i: usize| -> f64 {
        let cnt = (i - j + 1) as f64;
        let sum = s[i + 1] - s[j];
        let sumsq = s2[i + 1] - s2[j];
        (sumsq - sum * sum / cnt).max(0.0)
    };

    // rows of the DP: cost of clustering the prefix ending at i into m+1
    // clusters, plus the start index of the last cluster for backtracking
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(k_cap);
    let mut d_prev: Vec<f64> = (0..n).map(|i| ss(0, i)).collect();
    back.push(vec![0u32; n]);
    let mut d_cur = vec![0.0f64; n];

    for m in 1..k_cap {
        let mut row = vec![0u32; n];
        fill_row(m, n - 1, m, n - 1, &d_prev, &mut d_cur, &mut row, &ss);
        back.push(row);
        std::mem::swap(&mut d_prev, &mut d_cur);
    }

    // backtrack every k and recompute exact cluster statistics two-pass
    let ss_tot = segment_stats(&sorted, 0, n).within_ss;
    let mut out = Vec::with_capacity(k_cap);
    for k in 1..=k_cap {
        let mut starts = vec![0usize; k];
        let mut i = n - 1;
        for m in (0..k).rev() {
            let j = back[m][i] as usize;
            starts[m] = j;
            if m > 0 {
                i = j - 1;
            }
        }
        let mut clusters = Vec::with_capacity(k);
        let mut position_cluster = vec![0usize; n];
        for (c, &lo) in starts.iter().enumerate() {
            let hi = if c + 1 < k { starts[c + 1] } else { n };
            clusters.push(segment_stats(&sorted, lo, hi));
            position_cluster[lo..hi].fill(c);
        }
        let mut assignment = vec![0usize; n];
        for (p, &orig) in order.iter().enumerate() {
            assignment[orig as usize] = position_cluster[p];
        }
        let total_within_ss = kahan_sum(clusters.iter().map(|c| c.within_ss));
        out.push(ClusterSolution {
            k,
            assignment,
            boundaries: starts[1..].to_vec(),
            clusters,
            total_within_ss,
            ss_tot,
        });
    }
    Ok(out)
}

/// Fills one DP row by divide and conquer over the monotone argmin: the
/// within-ss cost satisfies the concave Monge condition, so the (smallest)
/// optimal split position never decreases with `i`. Candidates are scanned
/// in ascending order with strict improvement, keeping the smallest argmin
/// and thereby the smallest leading cluster on ties.
#[allow(clippy::too_many_arguments)]
fn fill_row(
    ilo: usize,
    ihi: usize,
    jlo: usize,
    jhi: usize,
    d_prev: &[f64],
    d_cur: &mut [f64],
    row: &mut [u32],
    ss: &impl Fn(usize, usize) -> f64,
) {
    if ilo > ihi {
        return;
    }
    let mid = ilo + (ihi - ilo) / 2;
    let mut best = f64::INFINITY;
    let mut arg = jlo;
    for j in jlo..=jhi.min(mid) {
        let cost = d_prev[j - 1] + ss(j, mid);
        if cost < best {
            best = cost;
            arg = j;
        }
    }
    d_cur[mid] = best;
    row[mid] = arg as u32;
    if mid > ilo {
        fill_row(ilo, mid - 1, jlo, arg, d_prev, d_cur, row, ss);
    }
    if mid < ihi {
        fill_row(mid + 1, ihi, arg, jhi, d_prev, d_cur, row, ss);
    }
}

fn segment_stats(sorted: &[f64], lo: usize, hi: usize) -> ClusterStats {
    let seg = &sorted[lo..hi];
    let size = seg.len();
    let mean = kahan_sum(seg.iter().copied()) / size as f64;
    let within_ss = kahan_sum(seg.iter().map(|v| (v - mean) * (v - mean)));
    ClusterStats {
        size,
        mean,
        within_ss,
    }
}

/// Number of clusters minimizing the AIC over `k = 1..=min(k_max, n)`;
/// ties resolve toward the smallest `k`.
pub fn optimal_k(values: &[f64], k_max: usize) -> Result<usize, LayeringError> {
    let sweep = ckmeans_sweep(values, k_max)?;
    Ok(select_k(&sweep))
}

/// Argmin of the AIC over a sweep of solutions; smallest `k` wins ties.
pub fn select_k(solutions: &[ClusterSolution]) -> usize {
    let mut best_k = solutions[0].k;
    let mut best_aic = aic(&solutions[0]);
    for sol in &solutions[1..] {
        let a = aic(sol);
        if a < best_aic {
            best_aic = a;
            best_k = sol.k;
        }
    }
    best_k
}

/// One inclusive circle or exclusive ring: member count and the lowest raw
/// contact frequency among members (contacts/month).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Layer {
    pub size: usize,
    pub min_frequency: f64,
}

/// The layered view of one ego network.
///
/// `circles[i]` is the union of the `i + 1` highest-frequency clusters
/// (innermost first), `rings[i]` the corresponding set difference, and
/// `ring_of[t]` the ring index of input tie `t`. Circle minimum frequencies
/// decrease outward.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSet {
    pub circles: Vec<Layer>,
    pub rings: Vec<Layer>,
    pub ring_of: Vec<usize>,
}

impl CircleSet {
    pub fn sizes(&self) -> Vec<f64> {
        self.circles.iter().map(|c| c.size as f64).collect()
    }
}

/// Builds inclusive circles from a cluster solution.
///
/// `raw_frequencies` must parallel the values the solution was computed on
/// (the clustering is usually run on normalized frequencies while reports
/// quote raw contacts/month). Clusters are ordered by descending mean, so
/// circle 0 contains the strongest ties.
pub fn build_circles(
    sol: &ClusterSolution,
    raw_frequencies: &[f64],
) -> Result<CircleSet, LayeringError> {
    if raw_frequencies.len() != sol.assignment.len() {
        return Err(LayeringError::LengthMismatch {
            left: sol.assignment.len(),
            right: raw_frequencies.len(),
        });
    }
    let k = sol.k;
    // cluster index c (ascending values) maps to ring index k-1-c
    let mut ring_size = vec![0usize; k];
    let mut ring_min = vec![f64::INFINITY; k];
    let mut ring_of = Vec::with_capacity(sol.assignment.len());
    for (&c, &raw) in sol.assignment.iter().zip(raw_frequencies) {
        let ring = k - 1 - c;
        ring_size[ring] += 1;
        if raw < ring_min[ring] {
            ring_min[ring] = raw;
        }
        ring_of.push(ring);
    }
    let rings: Vec<Layer> = ring_size
        .iter()
        .zip(&ring_min)
        .map(|(&size, &min_frequency)| Layer {
            size,
            min_frequency,
        })
        .collect();
    let mut circles = Vec::with_capacity(k);
    let mut cum = 0usize;
    for ring in &rings {
        cum += ring.size;
        // the newest ring holds the lowest frequencies, so its minimum is
        // the circle's minimum
        circles.push(Layer {
            size: cum,
            min_frequency: ring.min_frequency,
        });
    }
    Ok(CircleSet {
        circles,
        rings,
        ring_of,
    })
}

/// Ratios between hierarchically adjacent circle sizes,
/// `sizes[i + 1] / sizes[i]`; empty for a single circle.
pub fn scaling_factors(sizes: &[f64]) -> Vec<f64> {
    sizes.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Names of the offline social layers, innermost first.
pub const CIRCLE_NAMES: [&str; 5] = [
    "super support clique",
    "support clique",
    "sympathy group",
    "affinity group",
    "active network",
];

/// Mean cumulative layer sizes reported for offline ego networks,
/// corresponding to the last four entries of [`CIRCLE_NAMES`].
pub const OFFLINE_CIRCLE_SIZES: [f64; 4] = [4.6, 14.3, 42.6, 132.5];

/// A circle hierarchy aligned with the named offline layers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfflineMapping {
    pub names: Vec<&'static str>,
    pub sizes: Vec<f64>,
    /// Uniform rescaling factor making the outermost circle match the
    /// requested reference size, when one was given.
    pub factor: Option<f64>,
    pub scaled_sizes: Option<Vec<f64>>,
}

/// Maps a circle hierarchy onto the named offline layers.
///
/// Five circles map onto all five names; four circles onto the outer four
/// (such hierarchies lack the innermost "super support clique"). Any other
/// count has no offline counterpart and is reported as unmappable. With
/// `reference_outer` set, sizes are uniformly rescaled so the outermost
/// circle matches the reference (offline studies put the active network at
/// [`OFFLINE_CIRCLE_SIZES`]'s last entry, 132.5).
pub fn map_to_offline(
    sizes: &[f64],
    reference_outer: Option<f64>,
) -> Result<OfflineMapping, LayeringError> {
    let names: Vec<&'static str> = match sizes.len() {
        5 => CIRCLE_NAMES.to_vec(),
        4 => CIRCLE_NAMES[1..].to_vec(),
        n => return Err(LayeringError::Unmappable { circles: n }),
    };
    let factor = reference_outer.map(|r| r / sizes[sizes.len() - 1]);
    let scaled_sizes = factor.map(|f| sizes.iter().map(|s| s * f).collect());
    Ok(OfflineMapping {
        names,
        sizes: sizes.to_vec(),
        factor,
        scaled_sizes,
    })
}

/// Inclusive empirical survival function: for every distinct value `x`, the
/// share of samples with value `>= x`, in ascending value order.
pub fn aggregate_ccdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if out.last().map(|&(x, _)| x == v).unwrap_or(false) {
            continue;
        }
        out.push((v, (sorted.len() - i) as f64 / n));
    }
    out
}

// ---------------------------------------------------------------------------
// Population-level aggregation
// ---------------------------------------------------------------------------

/// Per-ego layering outcome carried into population aggregation.
///
/// `circle_sizes` and `circle_min_freqs` come from the fixed-`k` clustering
/// and stay empty for egos with fewer active ties than the fixed `k`; those
/// egos still contribute to the `kstar` distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoLayerRecord {
    pub kstar: usize,
    pub active_ties: usize,
    pub circle_sizes: Vec<f64>,
    pub circle_min_freqs: Vec<f64>,
}

/// One stratum of the optimal-cluster-count distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KstarRow {
    pub k: usize,
    pub count: usize,
    pub share: f64,
    pub mean_size: f64,
    pub ci95_size: f64,
}

/// Population statistics of one circle under the fixed-`k` clustering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleRow {
    /// 1-based circle index, innermost first.
    pub circle: usize,
    pub mean_min_freq: f64,
    pub ci95_min_freq: f64,
    pub mean_size: f64,
    pub ci95_size: f64,
    /// Ratio of this circle's mean size to the previous circle's; absent on
    /// the innermost circle.
    pub scaling_factor: Option<f64>,
    pub ci95_scaling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationSummary {
    pub egos: usize,
    /// Egos with at least `fixed_k` active ties, i.e. those contributing to
    /// the circle table.
    pub egos_in_circles: usize,
    pub fixed_k: usize,
    pub kstar: Vec<KstarRow>,
    pub circles: Vec<CircleRow>,
}

/// Aggregates per-ego layer records into population rows.
///
/// Records are reduced in their given order with compensated summation, so
/// the result is identical no matter how many workers produced the records.
/// Population scaling factors are ratios of adjacent mean circle sizes —
/// the form that is invariant under uniform random subsampling of ties —
/// with delta-method confidence intervals.
pub fn population_summary(records: &[EgoLayerRecord], fixed_k: usize) -> PopulationSummary {
    let egos = records.len();

    let max_k = records.iter().map(|r| r.kstar).max().unwrap_or(0);
    let mut kstar = Vec::new();
    for k in 1..=max_k {
        let sizes: Vec<f64> = records
            .iter()
            .filter(|r| r.kstar == k)
            .map(|r| r.active_ties as f64)
            .collect();
        if sizes.is_empty() {
            continue;
        }
        let (mean_size, ci95_size) = mean_ci95(&sizes);
        kstar.push(KstarRow {
            k,
            count: sizes.len(),
            share: sizes.len() as f64 / egos as f64,
            mean_size,
            ci95_size,
        });
    }

    let with_circles: Vec<&EgoLayerRecord> = records
        .iter()
        .filter(|r| r.circle_sizes.len() == fixed_k)
        .collect();
    let n_c = with_circles.len();
    let mut circles = Vec::new();
    for i in 0..fixed_k {
        if n_c == 0 {
            break;
        }
        let sizes: Vec<f64> = with_circles.iter().map(|r| r.circle_sizes[i]).collect();
        let freqs: Vec<f64> = with_circles.iter().map(|r| r.circle_min_freqs[i]).collect();
        let (mean_size, ci95_size) = mean_ci95(&sizes);
        let (mean_min_freq, ci95_min_freq) = mean_ci95(&freqs);
        let (scaling_factor, ci95_scaling) = if i == 0 {
            (None, None)
        } else {
            let mut m = Moments2::new();
            for r in &with_circles {
                m.add(r.circle_sizes[i - 1], r.circle_sizes[i]);
            }
            let (ratio, ci) = ratio_of_means_ci(&m);
            (Some(ratio), Some(ci))
        };
        circles.push(CircleRow {
            circle: i + 1,
            mean_min_freq,
            ci95_min_freq,
            mean_size,
            ci95_size,
            scaling_factor,
            ci95_scaling,
        });
    }

    PopulationSummary {
        egos,
        egos_in_circles: n_c,
        fixed_k,
        kstar,
        circles,
    }
}

/// Delta-method 95% interval half-width for the ratio of means `ȳ / x̄`
/// of paired samples.
fn ratio_of_means_ci(m: &Moments2) -> (f64, f64) {
    let n = m.n as f64;
    let mx = m.mean_x();
    let my = m.mean_y();
    let ratio = my / mx;
    if m.n < 2 {
        return (ratio, 0.0);
    }
    let vx = m.ss_x() / (n - 1.0);
    let vy = m.ss_y() / (n - 1.0);
    let cxy = m.ss_xy() / (n - 1.0);
    let rel_var = vy / (my * my) + vx / (mx * mx) - 2.0 * cxy / (mx * my);
    let var = (ratio * ratio * rel_var / n).max(0.0);
    (ratio, 1.96 * var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::brute_force_kmeans;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_bands_split_where_expected() {
        let sol = ckmeans_1d(&[1.0, 2.0, 10.0, 11.0], 2).unwrap();
        assert_relative_eq!(sol.total_within_ss, 1.0);
        assert_eq!(sol.boundaries, vec![2]);
        assert_eq!(sol.assignment, vec![0, 0, 1, 1]);
        assert_relative_eq!(sol.clusters[0].mean, 1.5);
        assert_relative_eq!(sol.clusters[1].mean, 10.5);
    }

    #[test]
    fn all_equal_values_have_zero_ss() {
        let sol = ckmeans_1d(&[5.0, 5.0, 5.0], 1).unwrap();
        assert_eq!(sol.total_within_ss, 0.0);
        assert!(sol.is_degenerate());
        assert_relative_eq!(explained_variance(&sol), 1.0);
    }

    #[test]
    fn singletons_when_k_equals_n() {
        let sol = ckmeans_1d(&[0.0, 10.0], 2).unwrap();
        assert_eq!(sol.total_within_ss, 0.0);
        assert_eq!(sol.clusters.len(), 2);
        assert_eq!(sol.clusters[0].size, 1);
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            ckmeans_1d(&[1.0, 2.0, 3.0], 4),
            Err(LayeringError::BadArity { k: 4, n: 3 })
        ));
        assert!(matches!(
            ckmeans_1d(&[], 1),
            Err(LayeringError::BadArity { .. })
        ));
        assert!(matches!(
            ckmeans_1d(&[1.0, f64::NAN], 1),
            Err(LayeringError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn assignment_respects_input_order() {
        // unsorted input: assignment must be reported in input positions
        let sol = ckmeans_1d(&[10.0, 1.0, 11.0, 2.0], 2).unwrap();
        assert_eq!(sol.assignment, vec![1, 0, 1, 0]);
    }

    #[test]
    fn ties_prefer_the_smallest_leading_cluster() {
        let sol = ckmeans_1d(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(sol.boundaries, vec![1]);
        assert_relative_eq!(sol.total_within_ss, 0.5);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..300 {
            let n = rng.random_range(1..=12);
            let k = rng.random_range(1..=n.min(5));
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
            let sol = ckmeans_1d(&values, k).unwrap();
            let (oracle_ss, _) = brute_force_kmeans(&values, k).unwrap();
            assert!(
                (sol.total_within_ss - oracle_ss).abs() <= 1e-9,
                "case {case}: dp {} vs oracle {} on {:?} k={}",
                sol.total_within_ss,
                oracle_ss,
                values,
                k
            );
        }
    }

    #[test]
    fn explained_variance_of_two_band_example() {
        let sol = ckmeans_1d(&[1.0, 2.0, 10.0, 11.0], 2).unwrap();
        // total ss around mean 6 is 82, within-ss 1: 81/82
        assert_relative_eq!(explained_variance(&sol), 81.0 / 82.0, max_relative = 1e-12);
    }

    #[test]
    fn sweep_is_monotone_in_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.0)).collect();
        let sweep = ckmeans_sweep(&values, 12).unwrap();
        for pair in sweep.windows(2) {
            assert!(pair[1].total_within_ss <= pair[0].total_within_ss + 1e-9);
            assert!(explained_variance(&pair[1]) + 1e-9 >= explained_variance(&pair[0]));
        }
    }

    #[test]
    fn aic_single_value_closed_form() {
        let sol = ckmeans_1d(&[3.7], 1).unwrap();
        // -2 ln N(x; x, floor) + 4
        let expect = (2.0 * std::f64::consts::PI * AIC_VARIANCE_FLOOR).ln() + 4.0;
        assert_relative_eq!(aic(&sol), expect, max_relative = 1e-12);
    }

    #[test]
    fn aic_prefers_true_two_cluster_structure() {
        let values = [0.0, 0.0, 0.0, 10.0, 10.0, 10.0];
        let k1 = aic(&ckmeans_1d(&values, 1).unwrap());
        let k2 = aic(&ckmeans_1d(&values, 2).unwrap());
        assert!(k2 < k1, "AIC(k=2)={k2} should beat AIC(k=1)={k1}");
    }

    #[test]
    fn optimal_k_recovers_three_planted_bands() {
        // bands tighter than the variance floor behave as atoms: the
        // selection criterion neither splits nor merges them
        let mut values = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &center in &[0.05f64, 0.45, 1.0] {
            for _ in 0..8 {
                values.push(center + 5e-4 * rng.random_range(-1.0..1.0));
            }
        }
        assert_eq!(optimal_k(&values, 20).unwrap(), 3);
    }

    #[test]
    fn optimal_k_degenerate_inputs() {
        assert_eq!(optimal_k(&[4.2; 9], 20).unwrap(), 1);
        // k range capped at n
        assert!(optimal_k(&[1.0, 5.0], 20).unwrap() <= 2);
    }

    #[test]
    fn circles_accumulate_rings() {
        let normalized = [1.0, 0.9, 0.3, 0.28, 0.25];
        let raw = [10.0, 9.0, 3.0, 2.8, 2.5];
        let sol = ckmeans_1d(&normalized, 2).unwrap();
        let set = build_circles(&sol, &raw).unwrap();
        assert_eq!(set.circles.len(), 2);
        assert_eq!(set.circles[0].size, 2);
        assert_eq!(set.circles[1].size, 5);
        assert_relative_eq!(set.circles[0].min_frequency, 9.0);
        assert_relative_eq!(set.circles[1].min_frequency, 2.5);
        assert_eq!(set.rings[1].size, 3);
        assert_eq!(set.ring_of, vec![0, 0, 1, 1, 1]);
        // circle minima strictly decrease outward
        assert!(set.circles[0].min_frequency > set.circles[1].min_frequency);
    }

    #[test]
    fn scaling_factor_examples() {
        let f = scaling_factors(&[5.0, 15.0, 45.0]);
        assert_eq!(f.len(), 2);
        assert_relative_eq!(f[0], 3.0);
        assert_relative_eq!(f[1], 3.0);
        assert!(scaling_factors(&[7.0]).is_empty());

        // reference five-circle hierarchy reproduces its published factors
        let f = scaling_factors(&[1.66, 5.06, 12.87, 32.66, 97.47]);
        for (got, want) in f.iter().zip(&[3.04, 2.55, 2.54, 2.98]) {
            assert!((got - want).abs() < 0.01, "{got} vs {want}");
        }

        // the offline reference hierarchy gives factors close to 3
        let f = scaling_factors(&OFFLINE_CIRCLE_SIZES);
        for (got, want) in f.iter().zip(&[3.10, 2.98, 3.11]) {
            assert!((got - want).abs() < 0.01, "{got} vs {want}");
        }
    }

    #[test]
    fn aic_penalty_is_four_per_extra_cluster() {
        // same fitted clusters, one more nominal cluster: only the 2q
        // penalty moves
        let sol = ckmeans_1d(&[1.0, 2.0, 10.0, 11.0], 2).unwrap();
        let mut inflated = sol.clone();
        inflated.k += 1;
        assert_relative_eq!(aic(&inflated) - aic(&sol), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn offline_mapping_names_and_rescale() {
        let m = map_to_offline(&[1.0, 3.0, 9.0, 27.0, 81.0], None).unwrap();
        assert_eq!(m.names, CIRCLE_NAMES.to_vec());
        assert!(m.factor.is_none());

        // four-circle hierarchies miss the innermost layer; rescaling the
        // outermost circle to the offline active network of 132.5 gives the
        // familiar correction factor of about 2.63
        let sizes = [1.79, 5.83, 17.05, 50.46];
        let m = map_to_offline(&sizes, Some(OFFLINE_CIRCLE_SIZES[3])).unwrap();
        assert_eq!(m.names[0], "support clique");
        let f = m.factor.unwrap();
        assert!((f - 2.63).abs() < 0.005, "factor {f}");
        assert_relative_eq!(m.scaled_sizes.unwrap()[3], 132.5, max_relative = 1e-12);

        assert!(matches!(
            map_to_offline(&[1.0, 2.0, 3.0], None),
            Err(LayeringError::Unmappable { circles: 3 })
        ));
    }

    #[test]
    fn ccdf_is_inclusive_survival() {
        let c = aggregate_ccdf(&[0.5, 1.0]);
        assert_eq!(c, vec![(0.5, 1.0), (1.0, 0.5)]);
        let c = aggregate_ccdf(&[2.0, 2.0, 1.0]);
        assert_eq!(c, vec![(1.0, 1.0), (2.0, 2.0 / 3.0)]);
        assert!(aggregate_ccdf(&[]).is_empty());
    }

    #[test]
    fn population_summary_concentrates_kstar_mass() {
        let records: Vec<EgoLayerRecord> = (0..10)
            .map(|i| EgoLayerRecord {
                kstar: 4,
                active_ties: 50 + i,
                circle_sizes: vec![1.0, 4.0, 12.0, 30.0],
                circle_min_freqs: vec![20.0, 8.0, 3.0, 1.0],
            })
            .collect();
        let summary = population_summary(&records, 4);
        assert_eq!(summary.kstar.len(), 1);
        assert_eq!(summary.kstar[0].k, 4);
        assert_relative_eq!(summary.kstar[0].share, 1.0);
        assert_eq!(summary.egos_in_circles, 10);
        assert_relative_eq!(summary.circles[1].scaling_factor.unwrap(), 4.0);
        assert_relative_eq!(summary.circles[1].ci95_scaling.unwrap(), 0.0);
    }

    #[test]
    fn population_summary_skips_small_egos_in_circle_table() {
        let records = vec![
            EgoLayerRecord {
                kstar: 2,
                active_ties: 3,
                circle_sizes: vec![],
                circle_min_freqs: vec![],
            },
            EgoLayerRecord {
                kstar: 5,
                active_ties: 80,
                circle_sizes: vec![2.0, 6.0, 14.0, 34.0, 80.0],
                circle_min_freqs: vec![18.0, 9.0, 4.0, 1.5, 0.2],
            },
        ];
        let summary = population_summary(&records, 5);
        assert_eq!(summary.egos, 2);
        assert_eq!(summary.egos_in_circles, 1);
        assert_eq!(summary.kstar.len(), 2);
    }

    #[test]
    fn clustering_invariant_under_positive_affine_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let n = rng.random_range(3..30);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            let k = rng.random_range(1..=n.min(6));
            let c: f64 = rng.random_range(0.1..5.0);
            let b: f64 = rng.random_range(-10.0..10.0);
            let mapped: Vec<f64> = values.iter().map(|v| c * v + b).collect();
            let sol = ckmeans_1d(&values, k).unwrap();
            let sol_mapped = ckmeans_1d(&mapped, k).unwrap();
            // the optimal cost scales by c^2; the original partition stays
            // optimal for the transformed data
            assert_relative_eq!(
                sol_mapped.total_within_ss,
                c * c * sol.total_within_ss,
                max_relative = 1e-6,
                epsilon = 1e-9
            );
        }
    }
}
