//! Seeded synthetic populations with planted layer and diffusion structure.
//!
//! The generator plants known ground truth so the analysis side of the crate
//! can be checked end to end: tie frequencies are drawn log-normally around
//! per-ring band means, ring sizes are Poisson around their expectations,
//! and retweet counts follow a per-ring linear law on top of the reply
//! frequencies. Everything is driven by a ChaCha8 stream seeded from
//! `mix_seed(base_seed, ego_id)`, so populations are reproducible ego by
//! ego regardless of generation order.
//!
//! The module also hosts deliberately naive oracles used by the test suite:
//! [`brute_force_kmeans`] enumerates every contiguous partition, and
//! [`generate_window_counts`] produces windowed interaction counts from a
//! known link birth time.

use crate::model::{AccountId, AlterClass, EgoNetwork, TieRecord, WindowConfig, WindowCounts};
use crate::tie_strength::{normalize_ego_frequencies, RelationshipClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("brute-force clustering limited to 16 values, got {n}")]
    BruteForceTooLarge { n: usize },
    #[error("cannot split {n} values into {k} clusters")]
    BadArity { k: usize, n: usize },
    #[error("ego {ego} has no replies; reply frequencies are undefined")]
    NoReplies { ego: AccountId },
    #[error("spec file: {0}")]
    BadSpecFile(String),
    #[error("spec: {0}")]
    BadSpec(String),
}

/// Mixes a base seed with a per-ego identifier into an independent stream
/// seed, using the SplitMix64 finalizer. The mixing is a documented part of
/// the output contract: fixtures generated from `(base, id)` are stable
/// across runs and platforms.
pub fn mix_seed(base: u64, id: u64) -> u64 {
    splitmix64(base ^ splitmix64(id))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// Planted shape of one ring: expected number of ties, band mean contact
/// frequency (contacts/month) and log-normal dispersion of the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec {
    pub size: f64,
    pub freq: f64,
    pub sigma: f64,
}

/// Planted layer structure of a synthetic ego network.
///
/// Defaults mirror the five-layer structure measured on a large
/// micro-blogging platform: cumulative circle sizes
/// {1.66, 5.06, 12.87, 32.66, 97.47} and circle minimum frequencies
/// {20.55, 8.91, 3.98, 1.36, 0.18} contacts/month, used here as ring sizes
/// (set differences) and band means.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub rings: Vec<RingSpec>,
    /// Months from ego account creation to download.
    pub ego_lifespan: f64,
    /// Lower bound of per-link lifespans, drawn uniformly up to `ego_lifespan`.
    pub min_link_lifespan: f64,
    /// Probability that an alter is a broadcast-style ("other") account.
    pub other_share: f64,
}

impl Default for LayerSpec {
    fn default() -> Self {
        let sizes = [1.66, 3.40, 7.81, 19.79, 64.81];
        let freqs = [20.55, 8.91, 3.98, 1.36, 0.18];
        LayerSpec {
            rings: sizes
                .iter()
                .zip(&freqs)
                .map(|(&size, &freq)| RingSpec {
                    size,
                    freq,
                    sigma: 0.3,
                })
                .collect(),
            ego_lifespan: 36.0,
            min_link_lifespan: 6.0,
            other_share: 0.28,
        }
    }
}

impl LayerSpec {
    /// Parses the `key=value` spec format: `ring<i>.size`, `ring<i>.freq`,
    /// `ring<i>.sigma` (1-based, contiguous), plus optional `ego_lifespan`,
    /// `min_link_lifespan` and `other_share`.
    pub fn from_key_values(text: &str) -> Result<Self, SynthError> {
        let mut base = LayerSpec::default();
        let mut rings: Vec<RingSpec> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_key_value(line, lineno)?;
            if let Some(rest) = key.strip_prefix("ring") {
                let (idx, field) = parse_ring_key(rest, lineno)?;
                while rings.len() < idx {
                    rings.push(RingSpec {
                        size: f64::NAN,
                        freq: f64::NAN,
                        sigma: 0.3,
                    });
                }
                let ring = &mut rings[idx - 1];
                match field {
                    "size" => ring.size = value,
                    "freq" => ring.freq = value,
                    "sigma" => ring.sigma = value,
                    _ => {
                        return Err(SynthError::BadSpecFile(format!(
                            "line {}: unknown ring field {:?}",
                            lineno + 1,
                            field
                        )))
                    }
                }
            } else {
                match key {
                    "ego_lifespan" => base.ego_lifespan = value,
                    "min_link_lifespan" => base.min_link_lifespan = value,
                    "other_share" => base.other_share = value,
                    _ => {
                        return Err(SynthError::BadSpecFile(format!(
                            "line {}: unknown key {:?}",
                            lineno + 1,
                            key
                        )))
                    }
                }
            }
        }
        if !rings.is_empty() {
            for (i, r) in rings.iter().enumerate() {
                if !(r.size.is_finite() && r.freq.is_finite()) {
                    return Err(SynthError::BadSpecFile(format!(
                        "ring{} is missing size or freq",
                        i + 1
                    )));
                }
            }
            base.rings = rings;
        }
        Ok(base)
    }
}

/// Planted one-hop diffusion law, per ring: `fret = alpha + beta * frep`
/// plus Gaussian noise of standard deviation `sigma`.
///
/// Default slopes and intercepts follow per-ring fits measured for socially
/// relevant alters on a large micro-blogging platform.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSpec {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Denominator used to turn planted retweet frequencies into integer
    /// counts; larger values mean finer count resolution.
    pub total_retweets: f64,
}

impl Default for DiffusionSpec {
    fn default() -> Self {
        DiffusionSpec {
            alpha: vec![0.03, 0.02, 0.03, 0.06, 0.09],
            beta: vec![0.74, 0.76, 0.80, 0.85, 0.99],
            sigma: vec![0.05; 5],
            total_retweets: 10_000.0,
        }
    }
}

impl DiffusionSpec {
    /// Parses the `key=value` spec format: `ring<i>.alpha`, `ring<i>.beta`,
    /// `ring<i>.sigma` (1-based, contiguous) and optional `total_retweets`.
    pub fn from_key_values(text: &str) -> Result<Self, SynthError> {
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut sigma: Vec<f64> = Vec::new();
        let mut out = DiffusionSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_key_value(line, lineno)?;
            if let Some(rest) = key.strip_prefix("ring") {
                let (idx, field) = parse_ring_key(rest, lineno)?;
                let ensure = |v: &mut Vec<f64>, fill: f64| {
                    while v.len() < idx {
                        v.push(fill);
                    }
                };
                match field {
                    "alpha" => {
                        ensure(&mut alpha, f64::NAN);
                        alpha[idx - 1] = value;
                    }
                    "beta" => {
                        ensure(&mut beta, f64::NAN);
                        beta[idx - 1] = value;
                    }
                    "sigma" => {
                        ensure(&mut sigma, 0.05);
                        sigma[idx - 1] = value;
                    }
                    _ => {
                        return Err(SynthError::BadSpecFile(format!(
                            "line {}: unknown ring field {:?}",
                            lineno + 1,
                            field
                        )))
                    }
                }
            } else if key == "total_retweets" {
                out.total_retweets = value;
            } else {
                return Err(SynthError::BadSpecFile(format!(
                    "line {}: unknown key {:?}",
                    lineno + 1,
                    key
                )));
            }
        }
        if !alpha.is_empty() || !beta.is_empty() {
            if alpha.len() != beta.len() || alpha.iter().chain(&beta).any(|v| v.is_nan()) {
                return Err(SynthError::BadSpecFile(
                    "every ring needs both alpha and beta".to_string(),
                ));
            }
            while sigma.len() < alpha.len() {
                sigma.push(0.05);
            }
            out.alpha = alpha;
            out.beta = beta;
            out.sigma = sigma;
        }
        Ok(out)
    }
}

fn split_key_value(line: &str, lineno: usize) -> Result<(&str, f64), SynthError> {
    let (key, value) = line.split_once('=').ok_or_else(|| {
        SynthError::BadSpecFile(format!(
            "line {}: expected key=value, got {:?}",
            lineno + 1,
            line
        ))
    })?;
    let value: f64 = value.trim().parse().map_err(|_| {
        SynthError::BadSpecFile(format!(
            "line {}: {:?} is not a number",
            lineno + 1,
            value.trim()
        ))
    })?;
    Ok((key.trim(), value))
}

fn parse_ring_key(rest: &str, lineno: usize) -> Result<(usize, &str), SynthError> {
    let (idx, field) = rest.split_once('.').ok_or_else(|| {
        SynthError::BadSpecFile(format!("line {}: ring key needs an index", lineno + 1))
    })?;
    let idx: usize = idx.parse().map_err(|_| {
        SynthError::BadSpecFile(format!("line {}: bad ring index {:?}", lineno + 1, idx))
    })?;
    if idx == 0 {
        return Err(SynthError::BadSpecFile(format!(
            "line {}: ring indices are 1-based",
            lineno + 1
        )));
    }
    Ok((idx, field))
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// A generated ego network together with its planted ground truth: the ring
/// index (0 = innermost) each tie was drawn from.
#[derive(Debug, Clone)]
pub struct PlantedEgo {
    pub net: EgoNetwork,
    pub rings: Vec<usize>,
}

/// Draws one ego network from the planted layer spec.
///
/// Ring sizes are Poisson around their expectations, clamped to at least
/// one tie so every planted ring is inhabited. Tie frequencies are the band
/// mean times `exp(sigma * z)` with standard normal `z`; with `sigma = 0`
/// every tie's frequency equals its band mean exactly. Link lifespans are
/// uniform between `min_link_lifespan` and the ego lifespan, and reply
/// counts are the rounded product of frequency and lifespan. Frequencies
/// are normalized before returning, so the network is ready for layering.
pub fn generate_ego_network(spec: &LayerSpec, ego: AccountId, seed: u64) -> PlantedEgo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ties = Vec::new();
    let mut rings = Vec::new();
    let mut total_replies = 0u64;

    for (ring_idx, ring) in spec.rings.iter().enumerate() {
        let size = if ring.size > 0.0 {
            let draw: f64 = Poisson::new(ring.size)
                .expect("positive ring size")
                .sample(&mut rng);
            (draw as usize).max(1)
        } else {
            1
        };
        for tie_idx in 0..size {
            let z: f64 = rng.sample(StandardNormal);
            let frequency = ring.freq * (ring.sigma * z).exp();
            let lifespan = rng.random_range(spec.min_link_lifespan..=spec.ego_lifespan);
            let reply_count = (frequency * lifespan).round() as u64;
            let alter_class = if rng.random_range(0.0..1.0) < spec.other_share {
                AlterClass::Other
            } else {
                AlterClass::SociallyRelevant
            };
            total_replies += reply_count;
            ties.push(TieRecord {
                ego,
                alter: synthetic_alter_id(ego, ties.len()),
                frequency,
                normalized_frequency: 0.0,
                link_lifespan: lifespan,
                reply_count,
                retweet_count: 0,
                retweet_lifespan: 0.0,
                alter_class,
            });
            rings.push(ring_idx);
            let _ = tie_idx;
        }
    }

    let total_interactions = total_replies;
    let mut net = EgoNetwork {
        ego,
        ego_lifespan: spec.ego_lifespan,
        ties,
        total_replies,
        total_retweets: 0,
        total_interactions,
    };
    normalize_ego_frequencies(&mut net).expect("planted frequencies are positive");
    PlantedEgo { net, rings }
}

/// Alter identifiers are unique per ego and disjoint from ego identifiers
/// for populations of fewer than 2^24 egos.
fn synthetic_alter_id(ego: AccountId, index: usize) -> AccountId {
    AccountId(((ego.0 + 1) << 24) + index as u64 + 1)
}

/// Plants retweet counts on a generated ego following the per-ring law.
///
/// For each tie the normalized reply frequency `frep` is computed from the
/// generated counts, a retweet frequency `fret = alpha_r + beta_r * frep +
/// sigma_r * z` is drawn, and converted back to an integer retweet count via
/// the tie lifespan (rounded, floored at zero). The network's
/// `total_retweets` is set to the same conversion denominator so that the
/// analysis side recovers the planted frequencies from the counts.
pub fn generate_diffusion(
    planted: &mut PlantedEgo,
    spec: &DiffusionSpec,
    seed: u64,
) -> Result<(), SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = &mut planted.net;
    if net.total_replies == 0 {
        return Err(SynthError::NoReplies { ego: net.ego });
    }
    let lt = net.ego_lifespan;
    let reptot = net.total_replies as f64;
    let rettot = spec.total_retweets;
    let last = spec.beta.len() - 1;

    for (tie, &ring) in net.ties.iter_mut().zip(&planted.rings) {
        let r = ring.min(last);
        let frep = (tie.reply_count as f64 / tie.link_lifespan) * (lt / reptot);
        let z: f64 = rng.sample(StandardNormal);
        let fret = spec.alpha[r] + spec.beta[r] * frep + spec.sigma[r] * z;
        let count = (fret * tie.link_lifespan * rettot / lt).round();
        tie.retweet_count = if count > 0.0 { count as u64 } else { 0 };
        tie.retweet_lifespan = 0.0;
    }
    net.total_retweets = rettot.round() as u64;
    Ok(())
}

/// Generates a population of `n_egos` planted egos with ids `1..=n_egos`.
///
/// Each ego draws from its own `mix_seed(base_seed, id)` stream (and, when a
/// diffusion spec is given, a second stream salted with `DIFFUSION_SALT`),
/// so the output is independent of generation order and worker count.
pub fn generate_population(
    layer: &LayerSpec,
    diffusion: Option<&DiffusionSpec>,
    n_egos: usize,
    base_seed: u64,
) -> Vec<PlantedEgo> {
    use rayon::prelude::*;
    (1..=n_egos as u64)
        .into_par_iter()
        .map(|id| generate_planted_ego(layer, diffusion, AccountId(id), base_seed))
        .collect()
}

/// Salt xor-ed into the base seed for the diffusion stream, so structural
/// and diffusion draws never share a stream.
pub const DIFFUSION_SALT: u64 = 0xD1FF_05E5_0000_0001;

/// Generates a single planted ego the same way [`generate_population`] does.
pub fn generate_planted_ego(
    layer: &LayerSpec,
    diffusion: Option<&DiffusionSpec>,
    ego: AccountId,
    base_seed: u64,
) -> PlantedEgo {
    let mut planted = generate_ego_network(layer, ego, mix_seed(base_seed, ego.0));
    if let Some(dspec) = diffusion {
        generate_diffusion(&mut planted, dspec, mix_seed(base_seed ^ DIFFUSION_SALT, ego.0))
            .expect("planted egos have replies");
    }
    planted
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Exhaustively finds the optimal contiguous partition of `values` into `k`
/// clusters, minimizing total within-cluster sum of squared deviations.
///
/// Returns `(total_within_ss, boundaries)` where `boundaries[j]` is the
/// index (in ascending sorted order) of the first element of cluster `j+1`.
/// Ties are broken toward the lexicographically smallest boundary vector,
/// i.e. the smallest leading cluster. Guard-railed to at most 16 values —
/// this is a reference oracle, not a production path.
pub fn brute_force_kmeans(values: &[f64], k: usize) -> Result<(f64, Vec<usize>), SynthError> {
    let n = values.len();
    if n > 16 {
        return Err(SynthError::BruteForceTooLarge { n });
    }
    if k == 0 || k > n {
        return Err(SynthError::BadArity { k, n });
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));

    let segment_ss = |lo: usize, hi: usize| -> f64 {
        // two-pass mean / squared deviations, deliberately naive
        let seg = &sorted[lo..hi];
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        seg.iter().map(|v| (v - mean) * (v - mean)).sum()
    };

    let mut best_ss = f64::INFINITY;
    let mut best_bounds: Vec<usize> = Vec::new();
    let mut bounds = vec![0usize; k - 1];

    // Enumerate all ascending (k-1)-subsets of {1, .., n-1} in lexicographic
    // order; strict improvement keeps the first (smallest) optimum.
    fn enumerate(
        bounds: &mut Vec<usize>,
        depth: usize,
        start: usize,
        n: usize,
        segment_ss: &dyn Fn(usize, usize) -> f64,
        best_ss: &mut f64,
        best_bounds: &mut Vec<usize>,
    ) {
        let k1 = bounds.len();
        if depth == k1 {
            let mut ss = 0.0;
            let mut lo = 0;
            for &b in bounds.iter() {
                ss += segment_ss(lo, b);
                lo = b;
            }
            ss += segment_ss(lo, n);
            if ss < *best_ss {
                *best_ss = ss;
                *best_bounds = bounds.clone();
            }
            return;
        }
        // leave room for the remaining boundaries
        for b in start..=(n - (k1 - depth)) {
            bounds[depth] = b;
            enumerate(bounds, depth + 1, b + 1, n, segment_ss, best_ss, best_bounds);
        }
    }
    enumerate(
        &mut bounds,
        0,
        1,
        n,
        &segment_ss,
        &mut best_ss,
        &mut best_bounds,
    );
    Ok((best_ss, best_bounds))
}

/// The class window a link born `birth` months before download belongs to,
/// or `None` when the birth lies outside the observation period.
pub fn birth_window(birth: f64, cfg: &WindowConfig) -> Option<RelationshipClass> {
    if birth <= 0.0 || birth > cfg.w4 {
        return None;
    }
    for k in 1..=4 {
        if birth <= cfg.spans()[k - 1] {
            return RelationshipClass::from_k(k).map(Some).unwrap();
        }
    }
    None
}

/// Draws windowed interaction counts for a link born `birth` months before
/// download with a homogeneous Poisson interaction rate per month.
///
/// Interactions can only fall in the observed part of each window, i.e. in
/// `(w_{j-1}, w_j)` intersected with `(0, birth)`; the cumulative counts are
/// monotone by construction and windows beyond the birth stay flat, so the
/// counts are consistent with the link's true class.
pub fn generate_window_counts(
    birth: f64,
    rate: f64,
    cfg: &WindowConfig,
    seed: u64,
) -> WindowCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spans = cfg.spans();
    let mut cumulative = 0u64;
    let mut out = [0u64; 4];
    let mut prev = 0.0f64;
    for (j, &w) in spans.iter().enumerate() {
        let len = (w.min(birth) - prev).max(0.0);
        if len > 0.0 && rate > 0.0 {
            let draw: f64 = Poisson::new(rate * len)
                .expect("positive mean")
                .sample(&mut rng);
            cumulative += draw as u64;
        }
        out[j] = cumulative;
        prev = w;
    }
    WindowCounts::new(out[0], out[1], out[2], out[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tie_strength::classify_relationship;
    use approx::assert_relative_eq;

    #[test]
    fn mix_seed_separates_egos_and_bases() {
        assert_eq!(mix_seed(42, 1), mix_seed(42, 1));
        assert_ne!(mix_seed(42, 1), mix_seed(42, 2));
        assert_ne!(mix_seed(42, 1), mix_seed(43, 1));
        // SplitMix64 published test vector: state 0 steps to this output.
        assert_eq!(super::splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = LayerSpec::default();
        let a = generate_ego_network(&spec, AccountId(7), 1234);
        let b = generate_ego_network(&spec, AccountId(7), 1234);
        assert_eq!(a.net, b.net);
        assert_eq!(a.rings, b.rings);
        let c = generate_ego_network(&spec, AccountId(7), 1235);
        assert_ne!(a.net, c.net);
    }

    #[test]
    fn zero_dispersion_reproduces_band_means_exactly() {
        let mut spec = LayerSpec::default();
        for ring in &mut spec.rings {
            ring.sigma = 0.0;
        }
        let planted = generate_ego_network(&spec, AccountId(1), 99);
        for (tie, &ring) in planted.net.ties.iter().zip(&planted.rings) {
            assert_eq!(tie.frequency, spec.rings[ring].freq);
        }
    }

    #[test]
    fn every_planted_ring_is_inhabited() {
        let spec = LayerSpec::default();
        for seed in 0..50 {
            let planted = generate_ego_network(&spec, AccountId(1), seed);
            for r in 0..spec.rings.len() {
                assert!(planted.rings.contains(&r), "seed {seed} left ring {r} empty");
            }
        }
    }

    #[test]
    fn planted_network_is_structurally_valid() {
        let planted = generate_planted_ego(
            &LayerSpec::default(),
            Some(&DiffusionSpec::default()),
            AccountId(3),
            77,
        );
        assert!(crate::model::validate(&planted.net).is_empty());
        assert_eq!(planted.net.ties.len(), planted.rings.len());
    }

    #[test]
    fn diffusion_with_zero_noise_recovers_the_linear_law() {
        let layer = LayerSpec::default();
        let dspec = DiffusionSpec {
            sigma: vec![0.0; 5],
            total_retweets: 1e6, // fine count resolution
            ..DiffusionSpec::default()
        };
        let mut planted = generate_ego_network(&layer, AccountId(5), 11);
        generate_diffusion(&mut planted, &dspec, 12).unwrap();
        let net = &planted.net;
        let lt = net.ego_lifespan;
        for (tie, &ring) in net.ties.iter().zip(&planted.rings) {
            let frep = (tie.reply_count as f64 / tie.link_lifespan) * (lt / net.total_replies as f64);
            let fret =
                (tie.retweet_count as f64 / tie.link_lifespan) * (lt / net.total_retweets as f64);
            let expect = dspec.alpha[ring] + dspec.beta[ring] * frep;
            assert_relative_eq!(fret, expect, max_relative = 1e-2);
        }
    }

    #[test]
    fn population_generation_is_order_independent() {
        let layer = LayerSpec::default();
        let pop = generate_population(&layer, None, 8, 42);
        assert_eq!(pop.len(), 8);
        for (i, p) in pop.iter().enumerate() {
            let solo = generate_planted_ego(&layer, None, AccountId(i as u64 + 1), 42);
            assert_eq!(p.net, solo.net);
        }
    }

    #[test]
    fn brute_force_matches_hand_worked_example() {
        let (ss, bounds) = brute_force_kmeans(&[1.0, 2.0, 10.0, 11.0], 2).unwrap();
        assert_relative_eq!(ss, 1.0);
        assert_eq!(bounds, vec![2]);
    }

    #[test]
    fn brute_force_trivial_arities() {
        let (ss, bounds) = brute_force_kmeans(&[5.0, 5.0, 5.0], 1).unwrap();
        assert_relative_eq!(ss, 0.0);
        assert!(bounds.is_empty());
        let (ss, bounds) = brute_force_kmeans(&[3.0, 1.0, 2.0], 3).unwrap();
        assert_relative_eq!(ss, 0.0);
        assert_eq!(bounds, vec![1, 2]);
    }

    #[test]
    fn brute_force_ties_prefer_small_leading_cluster() {
        // {1,2,3} with k=2: both splits cost 0.5; the smaller leading
        // cluster {1} wins.
        let (ss, bounds) = brute_force_kmeans(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_relative_eq!(ss, 0.5);
        assert_eq!(bounds, vec![1]);
    }

    #[test]
    fn brute_force_guards() {
        let many: Vec<f64> = (0..17).map(|i| i as f64).collect();
        assert_eq!(
            brute_force_kmeans(&many, 2),
            Err(SynthError::BruteForceTooLarge { n: 17 })
        );
        assert_eq!(
            brute_force_kmeans(&[1.0], 2),
            Err(SynthError::BadArity { k: 2, n: 1 })
        );
    }

    #[test]
    fn window_counts_for_young_links_are_flat() {
        // A link half a month old only accumulates interactions inside the
        // innermost window, so all four counts agree: class C1.
        let cfg = WindowConfig::default();
        let c = generate_window_counts(0.5, 10.0, &cfg, 3);
        assert!(c.is_monotone());
        assert_eq!(c.n1, c.n4);
        assert!(c.n4 > 0, "rate 10/month over half a month should interact");
        assert_eq!(classify_relationship(&c).unwrap(), RelationshipClass::C1);
    }

    #[test]
    fn window_counts_zero_rate_is_inactive() {
        let cfg = WindowConfig::default();
        let c = generate_window_counts(20.0, 0.0, &cfg, 3);
        assert_eq!(c.as_array(), [0, 0, 0, 0]);
    }

    #[test]
    fn window_counts_never_grow_beyond_birth() {
        let cfg = WindowConfig::default();
        for seed in 0..30 {
            // birth at 9 months: windows at 12 and 43 months see nothing new
            let c = generate_window_counts(9.0, 5.0, &cfg, seed);
            assert!(c.is_monotone());
            assert_eq!(c.n3, c.n4);
        }
    }

    #[test]
    fn birth_window_boundaries_are_inclusive_above() {
        let cfg = WindowConfig::default();
        assert_eq!(birth_window(1.0, &cfg), Some(RelationshipClass::C1));
        assert_eq!(birth_window(1.0001, &cfg), Some(RelationshipClass::C2));
        assert_eq!(birth_window(43.0, &cfg), Some(RelationshipClass::C4));
        assert_eq!(birth_window(44.0, &cfg), None);
        assert_eq!(birth_window(0.0, &cfg), None);
    }

    #[test]
    fn layer_spec_round_trips_through_key_values() {
        let text = "ring1.size=2.0\nring1.freq=10.0\nring1.sigma=0.1\n\
                    ring2.size=5.0\nring2.freq=1.0\nego_lifespan=24\nother_share=0.5\n";
        let spec = LayerSpec::from_key_values(text).unwrap();
        assert_eq!(spec.rings.len(), 2);
        assert_relative_eq!(spec.rings[0].freq, 10.0);
        assert_relative_eq!(spec.rings[1].sigma, 0.3); // default kept
        assert_relative_eq!(spec.ego_lifespan, 24.0);
        assert_relative_eq!(spec.other_share, 0.5);
    }

    #[test]
    fn diffusion_spec_parser_requires_matched_pairs() {
        let err = DiffusionSpec::from_key_values("ring1.alpha=0.1").unwrap_err();
        assert!(matches!(err, SynthError::BadSpecFile(_)));
        let ok = DiffusionSpec::from_key_values(
            "ring1.alpha=0.1\nring1.beta=0.9\ntotal_retweets=500\n",
        )
        .unwrap();
        assert_eq!(ok.beta, vec![0.9]);
        assert_relative_eq!(ok.total_retweets, 500.0);
        assert_eq!(ok.sigma, vec![0.05]);
    }
}
