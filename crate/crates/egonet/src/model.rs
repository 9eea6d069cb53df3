//! Shared data types for ego-network analysis.
//!
//! An *ego network* is the star graph around one account (the ego): one
//! [`TieRecord`] per alter, carrying interaction counts, lifespans and the
//! estimated contact frequency for that relationship. All durations are
//! expressed in months, with the data-set download instant as the zero point
//! and time counted backwards from it: a timestamp of `2.5` means two and a
//! half months before download.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Stable numeric identifier of an account (ego or alter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountId(pub u64);

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Kind of a directed interaction between two accounts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Reply,
    Mention,
    Retweet,
    Post,
    Comment,
}

impl InteractionKind {
    /// Canonical lower-case name, as used in the event-log CSV format.
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::Reply => "reply",
            InteractionKind::Mention => "mention",
            InteractionKind::Retweet => "retweet",
            InteractionKind::Post => "post",
            InteractionKind::Comment => "comment",
        }
    }

    /// Parses the canonical lower-case name.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "reply" => Some(InteractionKind::Reply),
            "mention" => Some(InteractionKind::Mention),
            "retweet" => Some(InteractionKind::Retweet),
            "post" => Some(InteractionKind::Post),
            "comment" => Some(InteractionKind::Comment),
            _ => None,
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One directed interaction drawn from an event log.
///
/// `timestamp` is in months before download. Retweet events carry the
/// account that authored the forwarded content in `original_author`; for all
/// other kinds the field is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub source: AccountId,
    pub target: AccountId,
    pub kind: InteractionKind,
    pub timestamp: f64,
    pub original_author: Option<AccountId>,
}

/// Cumulative interaction counts over nested trailing windows.
///
/// `n1..n4` count the interactions a link accumulated in the last
/// [`WindowConfig::w1`] through [`WindowConfig::w4`] months. Because the
/// windows nest, `n1 <= n2 <= n3 <= n4` always holds for well-formed data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCounts {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub n4: u64,
}

impl WindowCounts {
    pub fn new(n1: u64, n2: u64, n3: u64, n4: u64) -> Self {
        WindowCounts { n1, n2, n3, n4 }
    }

    /// Counts ordered innermost window first.
    pub fn as_array(&self) -> [u64; 4] {
        [self.n1, self.n2, self.n3, self.n4]
    }

    /// True when the nesting property `n1 <= n2 <= n3 <= n4` holds.
    pub fn is_monotone(&self) -> bool {
        self.n1 <= self.n2 && self.n2 <= self.n3 && self.n3 <= self.n4
    }
}

/// Spans of the nested observation windows, in months.
///
/// Defaults follow the common social-platform setup of one month, six
/// months, one year and the full observation period of 43 months.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            w1: 1.0,
            w2: 6.0,
            w3: 12.0,
            w4: 43.0,
        }
    }
}

impl WindowConfig {
    /// Window spans ordered innermost first.
    pub fn spans(&self) -> [f64; 4] {
        [self.w1, self.w2, self.w3, self.w4]
    }

    /// `(lower, upper)` bounds of the window a link of class `k` (1-based)
    /// was born in; the lower bound of the innermost class is zero.
    pub fn class_window(&self, k: usize) -> (f64, f64) {
        let spans = self.spans();
        let lower = if k <= 1 { 0.0 } else { spans[k - 2] };
        (lower, spans[k - 1])
    }
}

/// Coarse category of an alter account, used to stratify diffusion reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlterClass {
    /// Account whose communication pattern looks like a person keeping
    /// social relationships.
    SociallyRelevant,
    /// Broadcast-style account (bots, feeds, institutional accounts).
    Other,
    /// No profile statistics available to decide.
    Unknown,
}

impl AlterClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AlterClass::SociallyRelevant => "socially_relevant",
            AlterClass::Other => "other",
            AlterClass::Unknown => "unknown",
        }
    }
}

/// One ego-alter relationship with its interaction summary.
///
/// `frequency` is the estimated contact frequency in contacts per month;
/// `normalized_frequency` is that value divided by the maximum frequency in
/// the same ego network, so it lies in `[0, 1]`. `retweet_lifespan` is the
/// span from the ego's first retweet of the alter's content to download and
/// is zero when the ego never retweeted the alter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieRecord {
    pub ego: AccountId,
    pub alter: AccountId,
    pub frequency: f64,
    pub normalized_frequency: f64,
    pub link_lifespan: f64,
    pub reply_count: u64,
    pub retweet_count: u64,
    pub retweet_lifespan: f64,
    pub alter_class: AlterClass,
}

impl TieRecord {
    /// A tie is active when its estimated contact frequency is positive.
    pub fn is_active(&self) -> bool {
        self.frequency > 0.0
    }
}

/// The star network around one ego.
///
/// `ego_lifespan` is the time from the ego's appearance (account creation or
/// first observed interaction) to download. `total_replies` must equal the
/// sum of per-tie reply counts; `total_retweets` is the denominator used to
/// normalize retweet frequencies and `total_interactions` the overall
/// activity used by the eligibility filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoNetwork {
    pub ego: AccountId,
    pub ego_lifespan: f64,
    pub ties: Vec<TieRecord>,
    pub total_replies: u64,
    pub total_retweets: u64,
    pub total_interactions: u64,
}

impl EgoNetwork {
    /// Ties with a positive contact frequency.
    pub fn active_ties(&self) -> impl Iterator<Item = &TieRecord> {
        self.ties.iter().filter(|t| t.is_active())
    }

    /// Number of active ties; the network size used in layer reports.
    pub fn active_count(&self) -> usize {
        self.active_ties().count()
    }
}

/// One structural problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Field or invariant that failed, e.g. `"total_replies"`.
    pub field: String,
    /// Alter involved, when the problem is tied to a single relationship.
    pub alter: Option<AccountId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alter {
            Some(a) => write!(f, "{} (alter {}): {}", self.field, a, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

fn violation(field: &str, alter: Option<AccountId>, message: String) -> Violation {
    Violation {
        field: field.to_string(),
        alter,
        message,
    }
}

/// Checks the structural invariants of an ego network and returns every
/// violation found. The function is pure: it never mutates the network and
/// an empty result means the network is well-formed.
///
/// Checked invariants:
/// * `ego_lifespan` is finite and strictly positive,
/// * at most one tie per alter, and no self-ties,
/// * per tie: finite non-negative `frequency`, `normalized_frequency` in
///   `[0, 1]`, strictly positive `link_lifespan`, non-negative
///   `retweet_lifespan`, and the tie's `ego` matching the network's,
/// * `total_replies` equals the sum of per-tie reply counts.
pub fn validate(net: &EgoNetwork) -> Vec<Violation> {
    let mut out = Vec::new();

    if !(net.ego_lifespan.is_finite() && net.ego_lifespan > 0.0) {
        out.push(violation(
            "ego_lifespan",
            None,
            format!("must be finite and > 0, got {}", net.ego_lifespan),
        ));
    }

    let mut seen = std::collections::HashSet::new();
    let mut reply_sum: u64 = 0;
    for tie in &net.ties {
        let alter = Some(tie.alter);
        if tie.ego != net.ego {
            out.push(violation(
                "ties.ego",
                alter,
                format!("tie belongs to ego {}, network is for {}", tie.ego, net.ego),
            ));
        }
        if tie.alter == net.ego {
            out.push(violation(
                "ties.alter",
                alter,
                "self-tie: alter equals ego".to_string(),
            ));
        }
        if !seen.insert(tie.alter) {
            out.push(violation(
                "ties.alter",
                alter,
                "duplicate tie for this alter".to_string(),
            ));
        }
        if !(tie.frequency.is_finite() && tie.frequency >= 0.0) {
            out.push(violation(
                "ties.frequency",
                alter,
                format!("must be finite and >= 0, got {}", tie.frequency),
            ));
        }
        if !(tie.normalized_frequency.is_finite()
            && (0.0..=1.0).contains(&tie.normalized_frequency))
        {
            out.push(violation(
                "ties.normalized_frequency",
                alter,
                format!("must lie in [0, 1], got {}", tie.normalized_frequency),
            ));
        }
        if !(tie.link_lifespan.is_finite() && tie.link_lifespan > 0.0) {
            out.push(violation(
                "ties.link_lifespan",
                alter,
                format!("must be finite and > 0, got {}", tie.link_lifespan),
            ));
        }
        if !(tie.retweet_lifespan.is_finite() && tie.retweet_lifespan >= 0.0) {
            out.push(violation(
                "ties.retweet_lifespan",
                alter,
                format!("must be finite and >= 0, got {}", tie.retweet_lifespan),
            ));
        }
        reply_sum = reply_sum.saturating_add(tie.reply_count);
    }

    if reply_sum != net.total_replies {
        out.push(violation(
            "total_replies",
            None,
            format!(
                "declared {} but per-tie reply counts sum to {}",
                net.total_replies, reply_sum
            ),
        ));
    }

    out
}
