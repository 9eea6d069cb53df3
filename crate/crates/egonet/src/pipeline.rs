//! Orchestration of the per-ego analysis into population-level results.
//!
//! Egos are processed in fixed-size batches: each batch is mapped in
//! parallel (an order-preserving collect), then every per-ego result is
//! folded into the population accumulators serially, in input order. The
//! fold sequence therefore never depends on the worker count, which makes
//! the rendered reports byte-identical whether the pipeline runs on one
//! thread or many.

use crate::diffusion::{
    DiffusionAccumulator, RingFitRow, RingVolumeRow, VolumeAccumulator, DEFAULT_RINGS,
};
use crate::layering::{
    aggregate_ccdf, build_circles, ckmeans_sweep, population_summary, select_k, EgoLayerRecord,
    PopulationSummary,
};
use crate::model::EgoNetwork;
use rayon::prelude::*;

/// Knobs of the per-ego analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Largest cluster count tried when selecting the optimal one.
    pub k_max: usize,
    /// Cluster count used for the population circle table.
    pub fixed_k: usize,
    /// Ring count used for diffusion stratification.
    pub rings: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            k_max: 20,
            fixed_k: 5,
            rings: DEFAULT_RINGS,
        }
    }
}

/// Population-level results of one analysis run.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub layers: PopulationSummary,
    /// Survival function of normalized contact frequencies over all active
    /// ties.
    pub ccdf: Vec<(f64, f64)>,
    pub diffusion: Vec<RingFitRow>,
    pub volumes: Vec<RingVolumeRow>,
    /// Egos contributing diffusion pairs.
    pub diffusion_egos: usize,
    /// Egos without reply or retweet activity, excluded from diffusion.
    pub diffusion_excluded: usize,
    /// Diffusion-eligible egos with too few active ties for ring rows.
    pub ring_excluded: usize,
    pub total_links: usize,
    pub active_links: usize,
}

/// Layers one ego: optimal cluster count over `1..=k_max` and, when the
/// ego has at least `fixed_k` active ties, the fixed-`k` circle sizes and
/// minimum frequencies. Returns `None` for egos without active ties.
pub fn layer_record(net: &EgoNetwork, k_max: usize, fixed_k: usize) -> Option<EgoLayerRecord> {
    let values: Vec<f64> = net.active_ties().map(|t| t.normalized_frequency).collect();
    let raw: Vec<f64> = net.active_ties().map(|t| t.frequency).collect();
    let n = values.len();
    if n == 0 {
        return None;
    }
    let sweep = ckmeans_sweep(&values, k_max.min(n)).ok()?;
    let kstar = select_k(&sweep);
    let (circle_sizes, circle_min_freqs) = if fixed_k >= 1 && fixed_k <= sweep.len() {
        let circles = build_circles(&sweep[fixed_k - 1], &raw).ok()?;
        let min_freqs = circles.circles.iter().map(|c| c.min_frequency).collect();
        (circles.sizes(), min_freqs)
    } else {
        (Vec::new(), Vec::new())
    };
    Some(EgoLayerRecord {
        kstar,
        active_ties: n,
        circle_sizes,
        circle_min_freqs,
    })
}

struct EgoOutcome {
    record: Option<EgoLayerRecord>,
    diffusion: DiffusionAccumulator,
    volume: VolumeAccumulator,
    diffusion_ok: bool,
    ring_ok: bool,
    normalized: Vec<f64>,
    links: usize,
}

const BATCH: usize = 4096;

/// Runs the full per-ego analysis over a population and reduces it to
/// population tables. Results are independent of the rayon worker count.
pub fn analyze(nets: &[EgoNetwork], opts: &AnalysisOptions) -> Analysis {
    analyze_batched(nets, opts, BATCH)
}

fn analyze_batched(nets: &[EgoNetwork], opts: &AnalysisOptions, batch: usize) -> Analysis {
    let opts = *opts;
    let mut records: Vec<EgoLayerRecord> = Vec::new();
    let mut diffusion = DiffusionAccumulator::new(opts.rings);
    let mut volume = VolumeAccumulator::new(opts.rings);
    let mut normalized: Vec<f64> = Vec::new();
    let mut diffusion_egos = 0usize;
    let mut diffusion_excluded = 0usize;
    let mut ring_excluded = 0usize;
    let mut total_links = 0usize;

    for chunk in nets.chunks(batch.max(1)) {
        let outcomes: Vec<EgoOutcome> = chunk
            .par_iter()
            .map(|net| {
                let record = layer_record(net, opts.k_max, opts.fixed_k);
                let mut diff = DiffusionAccumulator::new(opts.rings);
                let diffusion_ok = diff.add_network(net).is_ok();
                let mut vol = VolumeAccumulator::new(opts.rings);
                let ring_ok = vol.add_network(net).is_ok();
                EgoOutcome {
                    record,
                    diffusion: diff,
                    volume: vol,
                    diffusion_ok,
                    ring_ok,
                    normalized: net
                        .active_ties()
                        .map(|t| t.normalized_frequency)
                        .collect(),
                    links: net.ties.len(),
                }
            })
            .collect();
        // one ego at a time, in input order, regardless of batch size
        for o in outcomes {
            if let Some(r) = o.record {
                records.push(r);
            }
            if o.diffusion_ok {
                diffusion_egos += 1;
                diffusion.merge(&o.diffusion);
                if !o.ring_ok {
                    ring_excluded += 1;
                }
            } else {
                diffusion_excluded += 1;
            }
            if o.ring_ok {
                volume.merge(&o.volume);
            }
            total_links += o.links;
            normalized.extend_from_slice(&o.normalized);
        }
    }

    let active_links = normalized.len();
    Analysis {
        layers: population_summary(&records, opts.fixed_k),
        ccdf: aggregate_ccdf(&normalized),
        diffusion: diffusion.report(),
        volumes: volume.report(),
        diffusion_egos,
        diffusion_excluded,
        ring_excluded,
        total_links,
        active_links,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::{generate_population, DiffusionSpec, LayerSpec};

    fn population(n: usize) -> Vec<EgoNetwork> {
        generate_population(&LayerSpec::default(), Some(&DiffusionSpec::default()), n, 9)
            .into_iter()
            .map(|p| p.net)
            .collect()
    }

    #[test]
    fn layer_record_builds_cumulative_circles() {
        let nets = population(1);
        let rec = layer_record(&nets[0], 20, 5).unwrap();
        assert_eq!(rec.circle_sizes.len(), 5);
        assert!(rec
            .circle_sizes
            .windows(2)
            .all(|w| w[0] <= w[1]));
        assert_eq!(rec.circle_sizes[4] as usize, rec.active_ties);
        assert!(rec
            .circle_min_freqs
            .windows(2)
            .all(|w| w[0] > w[1]));
        assert!(rec.kstar >= 1 && rec.kstar <= 20);
    }

    #[test]
    fn small_egos_skip_the_circle_table_but_report_kstar() {
        let mut nets = population(1);
        nets[0].ties.truncate(3);
        let rec = layer_record(&nets[0], 20, 5).unwrap();
        assert!(rec.circle_sizes.is_empty());
        assert!(rec.kstar >= 1 && rec.kstar <= 3);
    }

    #[test]
    fn analysis_counts_are_consistent() {
        let nets = population(40);
        let a = analyze(&nets, &AnalysisOptions::default());
        assert_eq!(a.layers.egos, 40);
        assert_eq!(a.diffusion_egos + a.diffusion_excluded, 40);
        assert_eq!(
            a.total_links,
            nets.iter().map(|n| n.ties.len()).sum::<usize>()
        );
        assert_eq!(a.active_links, a.total_links); // planted ties are all active
        assert_eq!(a.diffusion.len(), 18);
        assert_eq!(a.volumes.len(), 5);
        // the survival function starts at 1 and decreases to the share of
        // maximal ties
        assert_eq!(a.ccdf.first().map(|&(_, p)| p), Some(1.0));
        assert!(a.ccdf.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        assert_eq!(a.ccdf.last().map(|&(x, _)| x), Some(1.0));
    }

    #[test]
    fn batch_size_does_not_change_the_result() {
        let nets = population(25);
        let opts = AnalysisOptions::default();
        let small = analyze_batched(&nets, &opts, 3);
        let large = analyze_batched(&nets, &opts, 1000);
        assert_eq!(small, large);
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let nets = population(30);
        let opts = AnalysisOptions::default();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| analyze(&nets, &opts));
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| analyze(&nets, &opts));
        assert_eq!(serial, parallel);
    }
}
