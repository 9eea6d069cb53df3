//! One-hop information-diffusion measures over ego networks.
//!
//! For every link the module derives an ego-normalized reply frequency
//! (tie strength) and retweet frequency (information flow), stratifies ties
//! into five social rings, and reduces the pairs into the per-ring
//! correlation/regression and retweet-volume reports. All reductions run on
//! moment sums with compensated summation, so results do not depend on how
//! the per-ego work was partitioned.

use crate::layering::ckmeans_1d;
use crate::model::{AccountId, AlterClass, EgoNetwork, TieRecord};
use crate::stats::Moments2;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiffusionError {
    #[error("ego {0} sent no replies and is excluded from diffusion analysis")]
    NoReplies(AccountId),
    #[error("ego {0} made no retweets and is excluded from diffusion analysis")]
    NoRetweets(AccountId),
    #[error("ego {ego} has {active} active ties, fewer than the {k} needed for ring assignment")]
    TooFewActiveTies {
        ego: AccountId,
        active: usize,
        k: usize,
    },
    #[error("correlation undefined: {0} variance is zero")]
    ZeroVariance(&'static str),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// Number of social rings used for diffusion stratification unless
/// overridden for synthetic studies.
pub const DEFAULT_RINGS: usize = 5;

/// Row label of ring `i` (1-based, innermost first).
pub fn ring_label(ring: usize) -> String {
    format!("R{ring}")
}

/// Label of the whole-network row: the outermost circle, containing every
/// active tie.
pub fn whole_net_label(rings: usize) -> String {
    format!("C{rings}")
}

/// Alter-class column labels of the ring-stratified report.
pub const CLASS_LABELS: [&str; 3] = ["all", "socially_relevant", "other"];

/// The two diffusion measures of one link, with its ring and alter class.
///
/// `ring` is 1-based (1 = innermost) and absent for ties of egos too small
/// for ring assignment; such pairs still enter the whole-network row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionPair {
    pub frep: f64,
    pub fret: f64,
    pub ring: Option<usize>,
    pub alter_class: AlterClass,
}

/// Pearson correlation and ordinary-least-squares line of a pooled sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub n: usize,
    pub r: f64,
    pub beta: f64,
    pub alpha: f64,
}

/// Ego-normalized reply frequency of one tie: the link's reply rate
/// relative to the ego's overall reply output,
/// `(rep / l) * (lt / reptot)`.
pub fn frep(net: &EgoNetwork, tie: &TieRecord) -> Result<f64, DiffusionError> {
    if net.total_replies == 0 {
        return Err(DiffusionError::NoReplies(net.ego));
    }
    Ok((tie.reply_count as f64 / tie.link_lifespan) * (net.ego_lifespan / net.total_replies as f64))
}

/// Ego-normalized retweet frequency of one tie,
/// `(ret / lret) * (lt / rettot)`.
///
/// `lret` is the link lifespan or, when the ego's first retweet of the
/// alter predates the link itself, the longer span since that retweet.
/// Without any such retweet the count is zero and so is the frequency.
pub fn fret(net: &EgoNetwork, tie: &TieRecord) -> Result<f64, DiffusionError> {
    if net.total_retweets == 0 {
        return Err(DiffusionError::NoRetweets(net.ego));
    }
    let lret = tie.link_lifespan.max(tie.retweet_lifespan);
    Ok((tie.retweet_count as f64 / lret) * (net.ego_lifespan / net.total_retweets as f64))
}

/// Assigns every tie of the network to one of `k` social rings by exact
/// clustering of the active ties' frequencies.
///
/// Returns one entry per tie, aligned with `net.ties`: `Some(ring)` with a
/// 1-based ring index (1 = highest-frequency cluster) for active ties,
/// `None` for inactive ones. Egos with fewer than `k` active ties cannot be
/// stratified and are reported as errors; their links still belong in
/// whole-network statistics.
pub fn assign_rings(net: &EgoNetwork, k: usize) -> Result<Vec<Option<usize>>, DiffusionError> {
    let active: Vec<usize> = (0..net.ties.len())
        .filter(|&i| net.ties[i].is_active())
        .collect();
    if active.len() < k {
        return Err(DiffusionError::TooFewActiveTies {
            ego: net.ego,
            active: active.len(),
            k,
        });
    }
    let values: Vec<f64> = active
        .iter()
        .map(|&i| net.ties[i].normalized_frequency)
        .collect();
    let sol = ckmeans_1d(&values, k).expect("active count checked against k");
    let mut out = vec![None; net.ties.len()];
    for (pos, &tie_idx) in active.iter().enumerate() {
        // clusters are in ascending frequency order; ring 1 is the fastest
        out[tie_idx] = Some(k - sol.assignment[pos]);
    }
    Ok(out)
}

/// Pearson correlation coefficient from accumulated moments.
pub fn pearson(m: &Moments2) -> Result<f64, DiffusionError> {
    if m.n < 2 || m.ss_x() <= 0.0 {
        return Err(DiffusionError::ZeroVariance("x"));
    }
    if m.ss_y() <= 0.0 {
        return Err(DiffusionError::ZeroVariance("y"));
    }
    Ok(m.ss_xy() / (m.ss_x() * m.ss_y()).sqrt())
}

/// Ordinary-least-squares `(beta, alpha)` of `y = alpha + beta * x` from
/// accumulated moments. A constant `y` yields a flat line (`beta = 0`); a
/// constant `x` leaves the slope undefined and is an error.
pub fn linear_fit(m: &Moments2) -> Result<(f64, f64), DiffusionError> {
    if m.n < 2 || m.ss_x() <= 0.0 {
        return Err(DiffusionError::ZeroVariance("x"));
    }
    let beta = m.ss_xy() / m.ss_x();
    let alpha = m.mean_y() - beta * m.mean_x();
    Ok((beta, alpha))
}

impl FitResult {
    /// Correlation and fit of a pooled sample; requires at least three
    /// points and spread in both coordinates.
    pub fn from_moments(m: &Moments2) -> Result<FitResult, DiffusionError> {
        if m.n < 3 {
            return Err(DiffusionError::TooFewSamples {
                needed: 3,
                got: m.n as usize,
            });
        }
        let r = pearson(m)?;
        let (beta, alpha) = linear_fit(m)?;
        Ok(FitResult {
            n: m.n as usize,
            r,
            beta,
            alpha,
        })
    }
}

/// Pearson correlation and least-squares line of `(x, y)` pairs pooled
/// across ego networks.
pub fn correlation_and_fit(
    pairs: impl IntoIterator<Item = (f64, f64)>,
) -> Result<FitResult, DiffusionError> {
    let mut m = Moments2::new();
    for (x, y) in pairs {
        m.add(x, y);
    }
    FitResult::from_moments(&m)
}

/// One row of the ring-stratified diffusion report. Fit fields are absent
/// when the cell has fewer than three pairs or no spread to correlate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingFitRow {
    pub ring: String,
    pub class: String,
    pub n: usize,
    pub r: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
}

/// Streaming accumulator for the ring-stratified diffusion report:
/// moment sums for rows R1..R5 plus the whole network, by alter-class
/// column. Per-ego accumulators merge associatively, so populations can be
/// processed in any partitioning.
#[derive(Debug, Clone)]
pub struct DiffusionAccumulator {
    rings: usize,
    cells: Vec<[Moments2; CLASS_LABELS.len()]>,
}

impl Default for DiffusionAccumulator {
    fn default() -> Self {
        Self::new(DEFAULT_RINGS)
    }
}

impl DiffusionAccumulator {
    pub fn new(rings: usize) -> Self {
        DiffusionAccumulator {
            rings,
            cells: vec![Default::default(); rings + 1],
        }
    }

    /// Adds one link's pair to its ring row (if any) and the whole-network
    /// row. The class columns take only classified ties; `all` takes every
    /// tie.
    pub fn add_pair(&mut self, pair: &DiffusionPair) {
        let mut rows = [None, Some(self.rings)];
        if let Some(ring) = pair.ring {
            rows[0] = Some(ring - 1);
        }
        let class_col = match pair.alter_class {
            AlterClass::SociallyRelevant => Some(1),
            AlterClass::Other => Some(2),
            AlterClass::Unknown => None,
        };
        for row in rows.into_iter().flatten() {
            self.cells[row][0].add(pair.frep, pair.fret);
            if let Some(col) = class_col {
                self.cells[row][col].add(pair.frep, pair.fret);
            }
        }
    }

    /// Builds the diffusion pairs of one network and adds them. Egos
    /// without replies or without retweets are excluded (reported as
    /// errors); egos too small for ring stratification contribute to the
    /// whole-network row only.
    pub fn add_network(&mut self, net: &EgoNetwork) -> Result<(), DiffusionError> {
        for pair in network_pairs(net, self.rings)? {
            self.add_pair(&pair);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &DiffusionAccumulator) {
        debug_assert_eq!(self.rings, other.rings);
        for (mine, theirs) in self.cells.iter_mut().zip(&other.cells) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                m.merge(t);
            }
        }
    }

    /// Renders the report rows: one per ring then the whole network, each
    /// crossed with the three alter-class columns.
    pub fn report(&self) -> Vec<RingFitRow> {
        let mut rows = Vec::with_capacity(self.cells.len() * CLASS_LABELS.len());
        for (row_idx, row) in self.cells.iter().enumerate() {
            let ring = if row_idx < self.rings {
                ring_label(row_idx + 1)
            } else {
                whole_net_label(self.rings)
            };
            for (col, m) in row.iter().enumerate() {
                let fit = FitResult::from_moments(m).ok();
                rows.push(RingFitRow {
                    ring: ring.clone(),
                    class: CLASS_LABELS[col].to_string(),
                    n: m.n as usize,
                    r: fit.map(|f| f.r),
                    beta: fit.map(|f| f.beta),
                    alpha: fit.map(|f| f.alpha),
                });
            }
        }
        rows
    }

    /// Pair count of the (ring row, class column) cell; the whole network
    /// is the row at index `rings`.
    pub fn cell_count(&self, row: usize, col: usize) -> usize {
        self.cells[row][col].n as usize
    }
}

/// Diffusion pairs of every active tie of one network, with rings assigned
/// when the ego is large enough.
pub fn network_pairs(net: &EgoNetwork, rings: usize) -> Result<Vec<DiffusionPair>, DiffusionError> {
    if net.total_replies == 0 {
        return Err(DiffusionError::NoReplies(net.ego));
    }
    if net.total_retweets == 0 {
        return Err(DiffusionError::NoRetweets(net.ego));
    }
    let rings = assign_rings(net, rings).ok();
    let mut pairs = Vec::new();
    for (idx, tie) in net.ties.iter().enumerate() {
        if !tie.is_active() {
            continue;
        }
        pairs.push(DiffusionPair {
            frep: frep(net, tie)?,
            fret: fret(net, tie)?,
            ring: rings.as_ref().and_then(|r| r[idx]),
            alter_class: tie.alter_class,
        });
    }
    Ok(pairs)
}

/// Ring-stratified correlation/fit table over a population: rows R1..R5
/// plus the whole network, columns for all / socially relevant / other
/// alters. Egos without reply or retweet activity are skipped.
pub fn ring_diffusion_report(nets: &[EgoNetwork], rings: usize) -> Vec<RingFitRow> {
    let mut acc = DiffusionAccumulator::new(rings);
    for net in nets {
        let _ = acc.add_network(net);
    }
    acc.report()
}

/// One row of the retweet-volume report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingVolumeRow {
    pub ring: String,
    pub mean_retweets_per_link: f64,
    pub mean_retweets_per_ego: f64,
}

/// Streaming accumulator for per-ring retweet volumes.
#[derive(Debug, Clone)]
pub struct VolumeAccumulator {
    links: Vec<u64>,
    retweets: Vec<u64>,
    egos: u64,
}

impl Default for VolumeAccumulator {
    fn default() -> Self {
        Self::new(DEFAULT_RINGS)
    }
}

impl VolumeAccumulator {
    pub fn new(rings: usize) -> Self {
        VolumeAccumulator {
            links: vec![0; rings],
            retweets: vec![0; rings],
            egos: 0,
        }
    }

    /// Adds one ring-stratified ego. Egos too small for ring assignment
    /// are skipped (their error is propagated for tallying).
    pub fn add_network(&mut self, net: &EgoNetwork) -> Result<(), DiffusionError> {
        let rings = assign_rings(net, self.links.len())?;
        self.egos += 1;
        for (tie, ring) in net.ties.iter().zip(&rings) {
            if let Some(ring) = ring {
                self.links[ring - 1] += 1;
                self.retweets[ring - 1] += tie.retweet_count;
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &VolumeAccumulator) {
        debug_assert_eq!(self.links.len(), other.links.len());
        for i in 0..self.links.len() {
            self.links[i] += other.links[i];
            self.retweets[i] += other.retweets[i];
        }
        self.egos += other.egos;
    }

    /// Mean retweets per link and per ego network, by ring. The per-ego
    /// figure is the per-link mean scaled by the ring's mean size, i.e.
    /// the ring's total retweet volume per ego.
    pub fn report(&self) -> Vec<RingVolumeRow> {
        (0..self.links.len())
            .map(|i| {
                let per_link = if self.links[i] > 0 {
                    self.retweets[i] as f64 / self.links[i] as f64
                } else {
                    0.0
                };
                let per_ego = if self.egos > 0 {
                    self.retweets[i] as f64 / self.egos as f64
                } else {
                    0.0
                };
                RingVolumeRow {
                    ring: ring_label(i + 1),
                    mean_retweets_per_link: per_link,
                    mean_retweets_per_ego: per_ego,
                }
            })
            .collect()
    }
}

/// Per-ring mean retweets per link and per ego network over a population
/// of ring-stratifiable egos.
pub fn ring_volume_report(nets: &[EgoNetwork], rings: usize) -> Vec<RingVolumeRow> {
    let mut acc = VolumeAccumulator::new(rings);
    for net in nets {
        let _ = acc.add_network(net);
    }
    acc.report()
}

/// Per-ego activity profile for the population-level correlations.
///
/// `activity` is the sum of the ego's contact frequencies; `tweets` and
/// `retweets` count the ego's output; `received_retweets` counts retweets
/// of the ego's tweets by others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EgoActivity {
    pub ego: AccountId,
    pub activity: f64,
    pub tweets: f64,
    pub retweets: f64,
    pub received_retweets: f64,
}

/// The four population correlations between ego activity and output.
///
/// `activity_tweets` correlates activity with tweet counts (plus its
/// log-log variant), `activity_retweets_log` with retweets made by the
/// ego, and `activity_popularity` with the mean retweets each of the ego's
/// tweets received. Log variants drop non-positive values; the popularity
/// column drops egos without tweets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActivityCorrelations {
    pub activity_tweets: f64,
    pub activity_tweets_log: f64,
    pub activity_retweets_log: f64,
    pub activity_popularity: f64,
}

pub fn activity_correlations(
    activities: &[EgoActivity],
) -> Result<ActivityCorrelations, DiffusionError> {
    if activities.len() < 3 {
        return Err(DiffusionError::TooFewSamples {
            needed: 3,
            got: activities.len(),
        });
    }
    let corr = |points: &mut dyn Iterator<Item = (f64, f64)>| -> Result<f64, DiffusionError> {
        let mut m = Moments2::new();
        for (x, y) in points {
            m.add(x, y);
        }
        if m.n < 3 {
            return Err(DiffusionError::TooFewSamples {
                needed: 3,
                got: m.n as usize,
            });
        }
        pearson(&m)
    };
    let activity_tweets = corr(&mut activities.iter().map(|a| (a.activity, a.tweets)))?;
    let activity_tweets_log = corr(
        &mut activities
            .iter()
            .filter(|a| a.activity > 0.0 && a.tweets > 0.0)
            .map(|a| (a.activity.ln(), a.tweets.ln())),
    )?;
    let activity_retweets_log = corr(
        &mut activities
            .iter()
            .filter(|a| a.activity > 0.0 && a.retweets > 0.0)
            .map(|a| (a.activity.ln(), a.retweets.ln())),
    )?;
    let activity_popularity = corr(
        &mut activities
            .iter()
            .filter(|a| a.tweets > 0.0)
            .map(|a| (a.activity, a.received_retweets / a.tweets)),
    )?;
    Ok(ActivityCorrelations {
        activity_tweets,
        activity_tweets_log,
        activity_retweets_log,
        activity_popularity,
    })
}
