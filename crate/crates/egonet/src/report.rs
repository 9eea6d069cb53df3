//! Rendering of analysis results to CSV tables and a JSON run summary.
//!
//! Every CSV starts with a header row naming its columns. Numbers print in
//! the shortest form that parses back to the identical value, so rendered
//! reports are byte-stable across runs and worker counts; cells without a
//! defined value stay empty.

use crate::diffusion::{ActivityCorrelations, RingFitRow, RingVolumeRow};
use crate::layering::{OfflineMapping, PopulationSummary, OFFLINE_CIRCLE_SIZES};
use serde::Serialize;
use std::collections::BTreeMap;

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Distribution of the optimal cluster count over the population:
/// `k,count,share,mean_size,ci95_size`.
pub fn kstar_density_csv(summary: &PopulationSummary) -> String {
    let mut out = String::from("k,count,share,mean_size,ci95_size\n");
    for row in &summary.kstar {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k, row.count, row.share, row.mean_size, row.ci95_size
        ));
    }
    out
}

/// Population circle table under the fixed clustering:
/// `circle,mean_min_freq,ci95_min_freq,mean_size,ci95_size,scaling_factor,ci95_scaling`.
pub fn circles_csv(summary: &PopulationSummary) -> String {
    let mut out =
        String::from("circle,mean_min_freq,ci95_min_freq,mean_size,ci95_size,scaling_factor,ci95_scaling\n");
    for row in &summary.circles {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.circle,
            row.mean_min_freq,
            row.ci95_min_freq,
            row.mean_size,
            row.ci95_size,
            cell(row.scaling_factor),
            cell(row.ci95_scaling)
        ));
    }
    out
}

/// Header of [`mapping_csv`], exposed so callers can emit an empty table
/// when a circle hierarchy has no offline counterpart.
pub const MAPPING_HEADER: &str = "name,measured_size,scale_factor,scaled_size,reference_size\n";

/// Measured circles against the offline reference model:
/// `name,measured_size,scale_factor,scaled_size,reference_size`. Circles
/// without an offline counterpart leave the reference empty.
pub fn mapping_csv(mapping: &OfflineMapping) -> String {
    let mut out = String::from(MAPPING_HEADER);
    let pad = mapping.names.len().saturating_sub(OFFLINE_CIRCLE_SIZES.len());
    for (i, name) in mapping.names.iter().enumerate() {
        let reference = i.checked_sub(pad).map(|j| OFFLINE_CIRCLE_SIZES[j]);
        let scaled = mapping.scaled_sizes.as_ref().map(|s| s[i]);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            name,
            mapping.sizes[i],
            cell(mapping.factor),
            cell(scaled),
            cell(reference)
        ));
    }
    out
}

/// Ring-stratified correlation and fit table: `ring,class,n,r,beta,alpha`.
pub fn rings_diffusion_csv(rows: &[RingFitRow]) -> String {
    let mut out = String::from("ring,class,n,r,beta,alpha\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.ring,
            row.class,
            row.n,
            cell(row.r),
            cell(row.beta),
            cell(row.alpha)
        ));
    }
    out
}

/// Per-ring retweet volumes:
/// `ring,mean_retweets_per_link,mean_retweets_per_ego`.
pub fn ring_volumes_csv(rows: &[RingVolumeRow]) -> String {
    let mut out = String::from("ring,mean_retweets_per_link,mean_retweets_per_ego\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.ring, row.mean_retweets_per_link, row.mean_retweets_per_ego
        ));
    }
    out
}

/// Aggregated survival function of normalized contact frequencies:
/// `normalized_frequency,ccdf`.
pub fn ccdf_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("normalized_frequency,ccdf\n");
    for &(x, p) in points {
        out.push_str(&format!("{x},{p}\n"));
    }
    out
}

/// Scalar metadata of one pipeline run, written as `summary.json`.
///
/// `discards` collects the named drop tallies of ingest and analysis;
/// `timings_ms` the wall-clock duration of each stage. Timings vary
/// between runs, which is why determinism checks compare the CSV reports,
/// not this file.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub format: String,
    pub egos_ingested: usize,
    pub egos_eligible: usize,
    pub egos_in_circles: usize,
    pub links: usize,
    pub active_links: usize,
    pub diffusion_egos: usize,
    pub discards: BTreeMap<String, usize>,
    pub k_max: usize,
    pub fixed_k: usize,
    pub rings: usize,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activity: Option<ActivityCorrelations>,
    pub timings_ms: BTreeMap<String, u64>,
}

pub fn summary_json(summary: &RunSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}
