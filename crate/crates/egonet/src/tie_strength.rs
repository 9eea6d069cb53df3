//! Tie-strength estimation: contact frequencies in contacts per month.
//!
//! Two routes produce the same `frequency` field on a [`TieRecord`]:
//!
//! * **Windowed counts** ([`WindowCounts`]): the link's birth window is
//!   inferred from which nested windows show equal counts
//!   ([`classify_relationship`]), a duration is estimated inside that window
//!   from the growth ratio of the counts ([`estimate_duration`]), and the
//!   frequency is the total count over the estimated duration with a
//!   class-specific correction factor ([`contact_frequency`]).
//! * **Event logs**: the frequency is the number of replies the ego sent to
//!   the alter divided by the link lifespan ([`reply_frequency`]).
//!
//! [`TieRecord`]: crate::model::TieRecord

use crate::model::{AccountId, EgoNetwork, InteractionEvent, InteractionKind, WindowConfig, WindowCounts};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TieStrengthError {
    /// The link shows no interaction at all over the longest window.
    #[error("inactive link: no interactions in the outermost window")]
    InactiveLink,
    /// No mention or reply was ever exchanged between the two accounts.
    #[error("no link between {ego} and {alter}: no mention or reply exchanged")]
    NoLink { ego: AccountId, alter: AccountId },
    /// The link was born exactly at download time, leaving no observation span.
    #[error("zero link lifespan between {ego} and {alter}")]
    ZeroLifespan { ego: AccountId, alter: AccountId },
    /// Every tie of the ego has zero frequency, so normalization is undefined.
    #[error("degenerate ego {ego}: all tie frequencies are zero")]
    DegenerateEgo { ego: AccountId },
    /// Calibration target outside the open duration window of the class.
    #[error("calibration target {target} outside open window ({lower}, {upper})")]
    TargetOutOfRange { target: f64, lower: f64, upper: f64 },
    /// The calibration sample cannot reach the requested mean duration.
    #[error("calibration target {target} unattainable for this sample (supremum {supremum})")]
    TargetUnattainable { target: f64, supremum: f64 },
    /// Empty calibration sample.
    #[error("empty calibration sample")]
    EmptySample,
    #[error("calibration constants file: {0}")]
    BadConstantsFile(String),
}

/// Relationship class: which nested window the link was born in.
///
/// `C1` links appeared within the innermost window, `C4` links are older
/// than the third window. The class index `k` runs 1 to 4, innermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationshipClass {
    C1,
    C2,
    C3,
    C4,
}

impl RelationshipClass {
    /// 1-based class index.
    pub fn k(self) -> usize {
        match self {
            RelationshipClass::C1 => 1,
            RelationshipClass::C2 => 2,
            RelationshipClass::C3 => 3,
            RelationshipClass::C4 => 4,
        }
    }

    pub fn from_k(k: usize) -> Option<Self> {
        match k {
            1 => Some(RelationshipClass::C1),
            2 => Some(RelationshipClass::C2),
            3 => Some(RelationshipClass::C3),
            4 => Some(RelationshipClass::C4),
            _ => None,
        }
    }

    pub const ALL: [RelationshipClass; 4] = [
        RelationshipClass::C1,
        RelationshipClass::C2,
        RelationshipClass::C3,
        RelationshipClass::C4,
    ];
}

/// Constants of the windowed frequency estimator.
///
/// * `a[k-1]` — shape constant of class `k`'s duration curve, normally set
///   by [`calibrate_a`] so that mean estimated durations hit `target[k-1]`.
/// * `m[k-1]` — multiplicative correction applied to class `k` frequencies;
///   young links overestimate their long-run contact rate, so the two
///   youngest classes are damped.
/// * `floor` — substitute for a zero denominator count when computing
///   interaction ratios.
/// * `target[k-1]` — mean estimated duration aimed at during calibration,
///   defaulting to the midpoint of each class window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConstants {
    pub a: [f64; 4],
    pub m: [f64; 4],
    pub floor: f64,
    pub target: [f64; 4],
}

impl CalibrationConstants {
    /// Defaults for a given window configuration: neutral shape constants,
    /// damping factors 0.18 / 0.82 for the two youngest classes, a zero-count
    /// floor of 0.3 and window midpoints as duration targets.
    pub fn default_for(cfg: &WindowConfig) -> Self {
        let mut target = [0.0; 4];
        for k in 1..=4 {
            let (lo, hi) = cfg.class_window(k);
            target[k - 1] = 0.5 * (lo + hi);
        }
        CalibrationConstants {
            a: [1.0; 4],
            m: [0.18, 0.82, 1.0, 1.0],
            floor: 0.3,
            target,
        }
    }

    /// Parses the `key=value` constants format. Valid keys are `a1..a4`,
    /// `m1..m4`, `floor` and `target1..target4`; unknown keys are rejected.
    /// Missing keys keep their defaults from `base`.
    pub fn from_key_values(text: &str, base: Self) -> Result<Self, TieStrengthError> {
        let mut out = base;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                TieStrengthError::BadConstantsFile(format!(
                    "line {}: expected key=value, got {:?}",
                    lineno + 1,
                    line
                ))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                TieStrengthError::BadConstantsFile(format!(
                    "line {}: {:?} is not a number",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            let slot = |arr: &mut [f64; 4], idx: usize| arr[idx - 1] = value;
            match key {
                "a1" | "a2" | "a3" | "a4" => slot(&mut out.a, key[1..].parse().unwrap()),
                "m1" | "m2" | "m3" | "m4" => slot(&mut out.m, key[1..].parse().unwrap()),
                "floor" => out.floor = value,
                "target1" | "target2" | "target3" | "target4" => {
                    slot(&mut out.target, key[6..].parse().unwrap())
                }
                _ => {
                    return Err(TieStrengthError::BadConstantsFile(format!(
                        "line {}: unknown key {:?}",
                        lineno + 1,
                        key
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Serializes to the `key=value` constants format.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        for k in 0..4 {
            s.push_str(&format!("a{}={}\n", k + 1, self.a[k]));
        }
        for k in 0..4 {
            s.push_str(&format!("m{}={}\n", k + 1, self.m[k]));
        }
        s.push_str(&format!("floor={}\n", self.floor));
        for k in 0..4 {
            s.push_str(&format!("target{}={}\n", k + 1, self.target[k]));
        }
        s
    }
}

impl Default for CalibrationConstants {
    fn default() -> Self {
        CalibrationConstants::default_for(&WindowConfig::default())
    }
}

/// Infers the link's birth window from its nested interaction counts.
///
/// The counts must be monotone (`n1 <= n2 <= n3 <= n4`, guaranteed by the
/// parser). A strict increase between two windows proves the link already
/// existed in the wider window; the class is the innermost window whose
/// count equals the total. Links with `n4 == 0` never interacted and have
/// no class.
pub fn classify_relationship(c: &WindowCounts) -> Result<RelationshipClass, TieStrengthError> {
    debug_assert!(c.is_monotone(), "window counts must be monotone");
    if c.n4 == 0 {
        return Err(TieStrengthError::InactiveLink);
    }
    Ok(if c.n3 < c.n4 {
        RelationshipClass::C4
    } else if c.n2 < c.n3 {
        RelationshipClass::C3
    } else if c.n1 < c.n2 {
        RelationshipClass::C2
    } else {
        RelationshipClass::C1
    })
}

/// Growth ratio of the counts across the link's birth window.
///
/// For class `k > 1` this is `n_k / n_{k-1} - 1`, with the zero-count
/// `floor` substituted when the denominator count is zero. Class 1 links
/// have no inner reference window; their ratio is defined as 1.
pub fn interaction_ratio(c: &WindowCounts, class: RelationshipClass, floor: f64) -> f64 {
    let k = class.k();
    if k == 1 {
        return 1.0;
    }
    let counts = c.as_array();
    let num = counts[k - 1] as f64;
    let den = counts[k - 2] as f64;
    let den = if den == 0.0 { floor } else { den };
    num / den - 1.0
}

/// Estimated link duration inside the class window.
///
/// Maps the growth ratio `h` into the open interval
/// `(w_{k-1}, w_k)` through the saturating curve
/// `w_{k-1} + (w_k - w_{k-1}) * h / (h + a_k)`: a large growth ratio means
/// most interactions fall in the birth window itself, so the link is close
/// to the window's far edge.
pub fn estimate_duration(
    h: f64,
    class: RelationshipClass,
    cfg: &WindowConfig,
    cal: &CalibrationConstants,
) -> f64 {
    let (lo, hi) = cfg.class_window(class.k());
    let a = cal.a[class.k() - 1];
    lo + (hi - lo) * h / (h + a)
}

fn mean_duration(h_sample: &[f64], lo: f64, hi: f64, a: f64) -> f64 {
    let span = hi - lo;
    let sum = crate::stats::kahan_sum(h_sample.iter().map(|&h| h / (h + a)));
    lo + span * sum / h_sample.len() as f64
}

/// Solves for the shape constant `a_k` that makes the mean estimated
/// duration of `h_sample` equal `target`.
///
/// The mean duration is continuous and strictly decreasing in `a`, so the
/// root is found by bracketing and bisection; the returned constant
/// reproduces the target within `1e-9` months. The target must lie strictly
/// inside the class window and be reachable for the sample (a sample
/// containing zero ratios cannot reach the upper window edge).
pub fn calibrate_a(
    h_sample: &[f64],
    class: RelationshipClass,
    cfg: &WindowConfig,
    target: f64,
) -> Result<f64, TieStrengthError> {
    const TOL: f64 = 1e-9;
    if h_sample.is_empty() {
        return Err(TieStrengthError::EmptySample);
    }
    let (lo, hi) = cfg.class_window(class.k());
    if !(target > lo && target < hi) {
        return Err(TieStrengthError::TargetOutOfRange {
            target,
            lower: lo,
            upper: hi,
        });
    }
    // Supremum of the attainable mean (a -> 0): each positive ratio saturates
    // at the far window edge, zero ratios stay at the near edge.
    let positive = h_sample.iter().filter(|&&h| h > 0.0).count();
    let supremum = lo + (hi - lo) * positive as f64 / h_sample.len() as f64;
    if target >= supremum - TOL {
        return Err(TieStrengthError::TargetUnattainable { target, supremum });
    }

    let mut a_lo = 1e-15; // mean near supremum
    let mut a_hi = 1.0;
    while mean_duration(h_sample, lo, hi, a_hi) > target {
        a_hi *= 2.0;
        if a_hi > 1e18 {
            return Err(TieStrengthError::TargetUnattainable { target, supremum });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        let mean = mean_duration(h_sample, lo, hi, mid);
        if (mean - target).abs() <= TOL {
            return Ok(mid);
        }
        if mean > target {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    Ok(0.5 * (a_lo + a_hi))
}

/// Contact frequency of a windowed link: total interactions over the
/// estimated duration, then damped by the class factor.
///
/// Returns `(raw, scaled)` where `raw = n4 / duration` and
/// `scaled = raw * m_k` is the value stored on the tie.
pub fn contact_frequency(
    c: &WindowCounts,
    duration: f64,
    class: RelationshipClass,
    cal: &CalibrationConstants,
) -> (f64, f64) {
    let raw = c.n4 as f64 / duration;
    (raw, raw * cal.m[class.k() - 1])
}

/// Contact frequency of an event-log link: replies the ego sent to the
/// alter divided by the link lifespan.
///
/// The link exists if at least one mention or reply was exchanged between
/// the pair in either direction; its lifespan runs from the first such event
/// to download. Returns `(frequency, link_lifespan)`.
pub fn reply_frequency(
    events: &[InteractionEvent],
    ego: AccountId,
    alter: AccountId,
) -> Result<(f64, f64), TieStrengthError> {
    let mut lifespan = f64::NEG_INFINITY;
    let mut replies = 0u64;
    let mut linked = false;
    for e in events {
        let forward = e.source == ego && e.target == alter;
        let backward = e.source == alter && e.target == ego;
        if !(forward || backward) {
            continue;
        }
        match e.kind {
            InteractionKind::Reply | InteractionKind::Mention => {
                linked = true;
                if e.timestamp > lifespan {
                    lifespan = e.timestamp;
                }
                if forward && e.kind == InteractionKind::Reply {
                    replies += 1;
                }
            }
            _ => {}
        }
    }
    if !linked {
        return Err(TieStrengthError::NoLink { ego, alter });
    }
    if lifespan <= 0.0 {
        return Err(TieStrengthError::ZeroLifespan { ego, alter });
    }
    Ok((replies as f64 / lifespan, lifespan))
}

/// Fills `normalized_frequency` on every tie: frequency divided by the
/// ego's maximum frequency, so values lie in `[0, 1]` with at least one 1.
///
/// Fails when the network has no tie with positive frequency, since the
/// normalization would be undefined.
pub fn normalize_ego_frequencies(net: &mut EgoNetwork) -> Result<(), TieStrengthError> {
    let max = net
        .ties
        .iter()
        .map(|t| t.frequency)
        .fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Err(TieStrengthError::DegenerateEgo { ego: net.ego });
    }
    for tie in &mut net.ties {
        tie.normalized_frequency = tie.frequency / max;
    }
    Ok(())
}
