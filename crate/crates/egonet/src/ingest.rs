//! Parsers and assemblers for the interaction-log input formats.
//!
//! Three CSV formats are understood: a windowed interaction graph
//! (`ego,alter,n1,n2,n3,n4`), a timestamped event log
//! (`source,target,kind,months_before_download[,original_author]`) and an
//! optional per-account statistics table. A social-graph edge list can
//! accompany the windowed format to prune links that have no declared
//! relationship. Each parser has a serializer mirror, so accepted data
//! round-trips exactly; generated populations are emitted through the same
//! mirrors.
//!
//! Assembly turns parsed rows into [`EgoNetwork`] collections: the windowed
//! path calibrates the duration model per relationship class before
//! computing contact frequencies, the event path derives reply rates and
//! retweet attributions directly from the log.

use crate::diffusion::EgoActivity;
use crate::model::{
    AccountId, AlterClass, EgoNetwork, InteractionEvent, InteractionKind, TieRecord, WindowConfig,
    WindowCounts,
};
use crate::stats::kahan_sum;
use crate::tie_strength::{
    calibrate_a, classify_relationship, contact_frequency, estimate_duration, interaction_ratio,
    normalize_ego_frequencies, CalibrationConstants, RelationshipClass, TieStrengthError,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header {expected:?}, got {got:?}")]
    BadHeader { expected: String, got: String },
    #[error("line {line}: {message}")]
    BadRow { line: u64, message: String },
    #[error("line {line}: window counts {counts:?} are not monotone")]
    NonMonotone { line: u64, counts: [u64; 4] },
    #[error("line {line}: unknown interaction kind {kind:?}")]
    UnknownKind { line: u64, kind: String },
    #[error("line {line}: negative timestamp {value}")]
    NegativeTimestamp { line: u64, value: f64 },
    #[error(transparent)]
    TieStrength(#[from] TieStrengthError),
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Checks that the header starts with the required column names, optionally
/// followed by the allowed trailing columns.
fn check_header(
    rdr: &mut csv::Reader<&[u8]>,
    required: &[&str],
    optional: &[&str],
) -> Result<(), IngestError> {
    let got: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    let ok = got.len() >= required.len()
        && got.len() <= required.len() + optional.len()
        && got.iter().zip(required).all(|(g, r)| g == r)
        && got[required.len()..]
            .iter()
            .zip(optional)
            .all(|(g, o)| g == o);
    if ok {
        Ok(())
    } else {
        Err(IngestError::BadHeader {
            expected: required.join(","),
            got: got.join(","),
        })
    }
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn field<'a>(
    rec: &'a csv::StringRecord,
    idx: usize,
    name: &str,
    line: u64,
) -> Result<&'a str, IngestError> {
    rec.get(idx).ok_or_else(|| IngestError::BadRow {
        line,
        message: format!("missing field {name}"),
    })
}

fn field_u64(
    rec: &csv::StringRecord,
    idx: usize,
    name: &str,
    line: u64,
) -> Result<u64, IngestError> {
    let raw = field(rec, idx, name, line)?;
    raw.parse().map_err(|_| IngestError::BadRow {
        line,
        message: format!("{name} must be an unsigned integer, got {raw:?}"),
    })
}

fn field_f64(
    rec: &csv::StringRecord,
    idx: usize,
    name: &str,
    line: u64,
) -> Result<f64, IngestError> {
    let raw = field(rec, idx, name, line)?;
    let value: f64 = raw.parse().map_err(|_| IngestError::BadRow {
        line,
        message: format!("{name} must be a number, got {raw:?}"),
    })?;
    if !value.is_finite() {
        return Err(IngestError::BadRow {
            line,
            message: format!("{name} must be finite, got {raw:?}"),
        });
    }
    Ok(value)
}

fn undirected(a: AccountId, b: AccountId) -> (AccountId, AccountId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected edge set declaring which links are backed by an explicit
/// relationship; used to prune interaction rows without one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SocialGraph {
    edges: BTreeSet<(AccountId, AccountId)>,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: AccountId, b: AccountId) {
        self.edges.insert(undirected(a, b));
    }

    pub fn contains(&self, a: AccountId, b: AccountId) -> bool {
        self.edges.contains(&undirected(a, b))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ego,alter\n");
        for (a, b) in &self.edges {
            out.push_str(&format!("{a},{b}\n"));
        }
        out
    }
}

/// Parses the `ego,alter` edge list format.
pub fn parse_social_graph(text: &str) -> Result<SocialGraph, IngestError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["ego", "alter"], &[])?;
    let mut graph = SocialGraph::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let a = AccountId(field_u64(&rec, 0, "ego", line)?);
        let b = AccountId(field_u64(&rec, 1, "alter", line)?);
        graph.insert(a, b);
    }
    Ok(graph)
}

/// One undirected link with its pooled window counts; `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowLink {
    pub a: AccountId,
    pub b: AccountId,
    pub counts: WindowCounts,
}

/// Parsed windowed interaction graph: one entry per undirected link plus
/// the number of rows pruned for lacking a social-graph edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowGraph {
    pub links: Vec<WindowLink>,
    pub discarded: usize,
}

/// Parses the `ego,alter,n1,n2,n3,n4` windowed format.
///
/// Rows whose counts violate the window nesting `n1 <= n2 <= n3 <= n4` are
/// rejected with their line number. Rows naming the same undirected link
/// (in either direction) pool by summing counts. When a social graph is
/// supplied, rows without a corresponding edge are dropped and tallied in
/// `discarded` instead of ingested.
pub fn parse_window_graph(
    text: &str,
    social: Option<&SocialGraph>,
) -> Result<WindowGraph, IngestError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["ego", "alter", "n1", "n2", "n3", "n4"], &[])?;
    let mut pooled: BTreeMap<(AccountId, AccountId), WindowCounts> = BTreeMap::new();
    let mut discarded = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let ego = AccountId(field_u64(&rec, 0, "ego", line)?);
        let alter = AccountId(field_u64(&rec, 1, "alter", line)?);
        if ego == alter {
            return Err(IngestError::BadRow {
                line,
                message: format!("self link on account {ego}"),
            });
        }
        let counts = WindowCounts::new(
            field_u64(&rec, 2, "n1", line)?,
            field_u64(&rec, 3, "n2", line)?,
            field_u64(&rec, 4, "n3", line)?,
            field_u64(&rec, 5, "n4", line)?,
        );
        if !counts.is_monotone() {
            return Err(IngestError::NonMonotone {
                line,
                counts: counts.as_array(),
            });
        }
        if let Some(social) = social {
            if !social.contains(ego, alter) {
                discarded += 1;
                continue;
            }
        }
        let entry = pooled
            .entry(undirected(ego, alter))
            .or_insert(WindowCounts::new(0, 0, 0, 0));
        entry.n1 += counts.n1;
        entry.n2 += counts.n2;
        entry.n3 += counts.n3;
        entry.n4 += counts.n4;
    }
    let links = pooled
        .into_iter()
        .map(|((a, b), counts)| WindowLink { a, b, counts })
        .collect();
    Ok(WindowGraph { links, discarded })
}

/// Serializes a window graph back to its CSV format.
pub fn window_graph_to_csv(graph: &WindowGraph) -> String {
    let mut out = String::from("ego,alter,n1,n2,n3,n4\n");
    for link in &graph.links {
        let c = link.counts;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            link.a, link.b, c.n1, c.n2, c.n3, c.n4
        ));
    }
    out
}

/// Parses the `source,target,kind,months_before_download[,original_author]`
/// event-log format.
///
/// Timestamps count months backwards from the download instant and must be
/// non-negative. Retweet rows must carry the account that authored the
/// forwarded content; any other kind must leave that field empty.
pub fn parse_event_log(text: &str) -> Result<Vec<InteractionEvent>, IngestError> {
    let mut rdr = reader(text);
    check_header(
        &mut rdr,
        &["source", "target", "kind", "months_before_download"],
        &["original_author"],
    )?;
    let mut events = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let source = AccountId(field_u64(&rec, 0, "source", line)?);
        let target = AccountId(field_u64(&rec, 1, "target", line)?);
        let kind_raw = field(&rec, 2, "kind", line)?;
        let kind = InteractionKind::parse(kind_raw).ok_or_else(|| IngestError::UnknownKind {
            line,
            kind: kind_raw.to_string(),
        })?;
        let timestamp = field_f64(&rec, 3, "months_before_download", line)?;
        if timestamp < 0.0 {
            return Err(IngestError::NegativeTimestamp {
                line,
                value: timestamp,
            });
        }
        let author_raw = rec.get(4).unwrap_or("");
        let original_author = if kind == InteractionKind::Retweet {
            if author_raw.is_empty() {
                return Err(IngestError::BadRow {
                    line,
                    message: "retweet row must carry original_author".to_string(),
                });
            }
            Some(AccountId(field_u64(&rec, 4, "original_author", line)?))
        } else {
            if !author_raw.is_empty() {
                return Err(IngestError::BadRow {
                    line,
                    message: format!("original_author only applies to retweets, got {author_raw:?}"),
                });
            }
            None
        };
        events.push(InteractionEvent {
            source,
            target,
            kind,
            timestamp,
            original_author,
        });
    }
    Ok(events)
}

/// Serializes events back to the log format. Timestamps print in the
/// shortest form that parses back to the identical value.
pub fn event_log_to_csv(events: &[InteractionEvent]) -> String {
    let mut out = String::from("source,target,kind,months_before_download,original_author\n");
    for e in events {
        let author = e.original_author.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.source, e.target, e.kind, e.timestamp, author
        ));
    }
    out
}

/// Per-account profile statistics used for eligibility and alter
/// classification. `created_months_before_download` is absent when the
/// account's creation date is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccountStats {
    pub id: AccountId,
    pub created_months_before_download: Option<f64>,
    pub tweets: u64,
    pub following: u64,
    pub followers: u64,
    pub reply_ratio: f64,
    pub mention_ratio: f64,
}

/// Parses the account statistics table. Duplicate ids are rejected.
pub fn parse_accounts(text: &str) -> Result<Vec<AccountStats>, IngestError> {
    let mut rdr = reader(text);
    check_header(
        &mut rdr,
        &[
            "id",
            "created_months_before_download",
            "tweets",
            "following",
            "followers",
            "reply_ratio",
            "mention_ratio",
        ],
        &[],
    )?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let id = AccountId(field_u64(&rec, 0, "id", line)?);
        if !seen.insert(id) {
            return Err(IngestError::BadRow {
                line,
                message: format!("duplicate account id {id}"),
            });
        }
        let created_raw = field(&rec, 1, "created_months_before_download", line)?;
        let created_months_before_download = if created_raw.is_empty() {
            None
        } else {
            Some(field_f64(&rec, 1, "created_months_before_download", line)?)
        };
        out.push(AccountStats {
            id,
            created_months_before_download,
            tweets: field_u64(&rec, 2, "tweets", line)?,
            following: field_u64(&rec, 3, "following", line)?,
            followers: field_u64(&rec, 4, "followers", line)?,
            reply_ratio: field_f64(&rec, 5, "reply_ratio", line)?,
            mention_ratio: field_f64(&rec, 6, "mention_ratio", line)?,
        });
    }
    Ok(out)
}

/// Serializes account statistics back to their CSV format.
pub fn accounts_to_csv(accounts: &[AccountStats]) -> String {
    let mut out = String::from(
        "id,created_months_before_download,tweets,following,followers,reply_ratio,mention_ratio\n",
    );
    for a in accounts {
        let created = a
            .created_months_before_download
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.id, created, a.tweets, a.following, a.followers, a.reply_ratio, a.mention_ratio
        ));
    }
    out
}

/// Indexes account statistics by id for assembly lookups.
pub fn index_accounts(accounts: &[AccountStats]) -> HashMap<AccountId, AccountStats> {
    accounts.iter().map(|a| (a.id, *a)).collect()
}

/// Minimum-activity filter deciding which egos enter the analysis.
///
/// An ego qualifies when its account is at least `min_account_age` months
/// old and it averaged `min_monthly_interactions` interactions per month
/// over its lifespan; both bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoEligibilityRule {
    pub min_account_age: f64,
    pub min_monthly_interactions: f64,
}

impl Default for EgoEligibilityRule {
    fn default() -> Self {
        EgoEligibilityRule {
            min_account_age: 6.0,
            min_monthly_interactions: 10.0,
        }
    }
}

impl EgoEligibilityRule {
    pub fn is_eligible(&self, net: &EgoNetwork) -> bool {
        net.ego_lifespan >= self.min_account_age
            && net.total_interactions as f64 / net.ego_lifespan >= self.min_monthly_interactions
    }
}

/// Keeps only egos passing the eligibility rule.
pub fn select_eligible_egos(nets: Vec<EgoNetwork>, rule: &EgoEligibilityRule) -> Vec<EgoNetwork> {
    nets.into_iter().filter(|n| rule.is_eligible(n)).collect()
}

/// Threshold rule separating broadcast-style accounts from people.
///
/// An account is classed `Other` when it rarely replies (reply ratio below
/// `max_reply_ratio`) while being followed far more than it follows
/// (followers/following above `min_follower_ratio`); everything else with
/// known statistics is `SociallyRelevant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlterClassRule {
    pub max_reply_ratio: f64,
    pub min_follower_ratio: f64,
}

impl Default for AlterClassRule {
    fn default() -> Self {
        AlterClassRule {
            max_reply_ratio: 0.05,
            min_follower_ratio: 10.0,
        }
    }
}

/// Classifies one alter from its statistics; accounts without statistics
/// stay `Unknown`.
pub fn classify_alter(stats: Option<&AccountStats>, rule: &AlterClassRule) -> AlterClass {
    let Some(stats) = stats else {
        return AlterClass::Unknown;
    };
    let follower_ratio = if stats.following == 0 {
        if stats.followers == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        stats.followers as f64 / stats.following as f64
    };
    if stats.reply_ratio < rule.max_reply_ratio && follower_ratio > rule.min_follower_ratio {
        AlterClass::Other
    } else {
        AlterClass::SociallyRelevant
    }
}

/// Result of assembling a windowed interaction graph.
#[derive(Debug, Clone)]
pub struct WindowedAssembly {
    /// One network per account with at least one active link, sorted by ego
    /// id with ties sorted by alter id.
    pub nets: Vec<EgoNetwork>,
    /// The constants actually used, with shape parameters calibrated on
    /// this data set.
    pub calibration: CalibrationConstants,
    /// Accounts whose links were all inactive; they form no network.
    pub dropped_inactive_egos: usize,
}

/// Assembles ego networks from a windowed graph.
///
/// Every link classifies into a relationship class by its count pattern;
/// per class, the duration-curve shape constant is calibrated so mean
/// estimated durations hit the configured targets. Each link then receives
/// an estimated birth date and contact frequency, and contributes one tie
/// to the network of each endpoint. An ego's lifespan is the age of its
/// oldest active link. Links that never interacted stay in the network as
/// inactive ties spanning the full observation window.
pub fn assemble_windowed(
    graph: &WindowGraph,
    cfg: &WindowConfig,
    base: CalibrationConstants,
    accounts: &HashMap<AccountId, AccountStats>,
    class_rule: &AlterClassRule,
) -> Result<WindowedAssembly, IngestError> {
    struct Derived {
        class: Option<RelationshipClass>,
        h: f64,
    }
    let derived: Vec<Derived> = graph
        .links
        .iter()
        .map(|link| match classify_relationship(&link.counts) {
            Ok(class) => Derived {
                class: Some(class),
                h: interaction_ratio(&link.counts, class, base.floor),
            },
            Err(_) => Derived { class: None, h: 0.0 },
        })
        .collect();

    let mut samples: [Vec<f64>; 4] = Default::default();
    for d in &derived {
        if let Some(class) = d.class {
            samples[class.k() - 1].push(d.h);
        }
    }
    let mut calibration = base;
    for k in 1..=4 {
        if !samples[k - 1].is_empty() {
            let class = RelationshipClass::from_k(k).expect("k in 1..=4");
            calibration.a[k - 1] =
                calibrate_a(&samples[k - 1], class, cfg, calibration.target[k - 1])?;
        }
    }

    struct LinkValue {
        frequency: f64,
        duration: f64,
        interactions: u64,
    }
    let values: Vec<LinkValue> = graph
        .links
        .iter()
        .zip(&derived)
        .map(|(link, d)| match d.class {
            Some(class) => {
                let duration = estimate_duration(d.h, class, cfg, &calibration);
                let (_, frequency) = contact_frequency(&link.counts, duration, class, &calibration);
                LinkValue {
                    frequency,
                    duration,
                    interactions: link.counts.n4,
                }
            }
            None => LinkValue {
                frequency: 0.0,
                duration: cfg.w4,
                interactions: 0,
            },
        })
        .collect();

    let mut per_ego: BTreeMap<AccountId, Vec<(AccountId, usize)>> = BTreeMap::new();
    for (idx, link) in graph.links.iter().enumerate() {
        per_ego.entry(link.a).or_default().push((link.b, idx));
        per_ego.entry(link.b).or_default().push((link.a, idx));
    }

    let mut nets = Vec::new();
    let mut dropped_inactive_egos = 0usize;
    for (ego, mut neighbors) in per_ego {
        neighbors.sort_by_key(|&(alter, _)| alter);
        let ego_lifespan = neighbors
            .iter()
            .filter(|&&(_, i)| values[i].frequency > 0.0)
            .map(|&(_, i)| values[i].duration)
            .fold(0.0f64, f64::max);
        if ego_lifespan <= 0.0 {
            dropped_inactive_egos += 1;
            continue;
        }
        let ties: Vec<TieRecord> = neighbors
            .iter()
            .map(|&(alter, i)| TieRecord {
                ego,
                alter,
                frequency: values[i].frequency,
                normalized_frequency: 0.0,
                link_lifespan: values[i].duration,
                reply_count: values[i].interactions,
                retweet_count: 0,
                retweet_lifespan: 0.0,
                alter_class: classify_alter(accounts.get(&alter), class_rule),
            })
            .collect();
        let total_replies = ties.iter().map(|t| t.reply_count).sum();
        let mut net = EgoNetwork {
            ego,
            ego_lifespan,
            ties,
            total_replies,
            total_retweets: 0,
            total_interactions: total_replies,
        };
        normalize_ego_frequencies(&mut net).expect("ego has an active tie");
        nets.push(net);
    }
    Ok(WindowedAssembly {
        nets,
        calibration,
        dropped_inactive_egos,
    })
}

/// Result of assembling an event log.
#[derive(Debug, Clone)]
pub struct EventAssembly {
    /// One network per account with at least one positive reply rate,
    /// sorted by ego id with ties sorted by alter id.
    pub nets: Vec<EgoNetwork>,
    /// Activity profile of each kept ego, aligned with `nets`.
    pub activities: Vec<EgoActivity>,
    /// Accounts with links but no outgoing replies on any of them.
    pub dropped_degenerate_egos: usize,
    /// Links whose only interactions happened at the download instant,
    /// leaving them without a measurable lifespan.
    pub dropped_zero_lifespan_links: usize,
}

/// Assembles ego networks and activity profiles from an event log.
///
/// A link exists between two accounts once either mentions or replies to
/// the other; its lifespan runs from the first such event to download, and
/// each direction's tie strength is that side's reply count over the
/// lifespan. Retweets attach to the tie toward the forwarded content's
/// author and also feed the ego's retweet total whether or not such a tie
/// exists. An ego's lifespan comes from its account-creation date when
/// known and from its first observed event otherwise, never shorter than
/// its oldest link.
pub fn assemble_events(
    events: &[InteractionEvent],
    accounts: &HashMap<AccountId, AccountStats>,
    class_rule: &AlterClassRule,
) -> EventAssembly {
    #[derive(Default)]
    struct PairAgg {
        lifespan: f64,
        // replies sent by the smaller-id endpoint, then by the larger one
        fwd_replies: u64,
        rev_replies: u64,
    }
    #[derive(Default, Clone, Copy)]
    struct Outgoing {
        total: u64,
        replies: u64,
        retweets: u64,
        posts: u64,
    }
    let mut pairs: BTreeMap<(AccountId, AccountId), PairAgg> = BTreeMap::new();
    let mut retweets: BTreeMap<(AccountId, AccountId), (u64, f64)> = BTreeMap::new();
    let mut outgoing: BTreeMap<AccountId, Outgoing> = BTreeMap::new();
    let mut first_seen: BTreeMap<AccountId, f64> = BTreeMap::new();
    let mut received: BTreeMap<AccountId, u64> = BTreeMap::new();

    for e in events {
        for account in [e.source, e.target] {
            let seen = first_seen.entry(account).or_insert(0.0);
            *seen = seen.max(e.timestamp);
        }
        let out = outgoing.entry(e.source).or_default();
        out.total += 1;
        match e.kind {
            InteractionKind::Reply | InteractionKind::Mention => {
                if e.kind == InteractionKind::Reply {
                    out.replies += 1;
                }
                if e.source != e.target {
                    let key = undirected(e.source, e.target);
                    let agg = pairs.entry(key).or_default();
                    agg.lifespan = agg.lifespan.max(e.timestamp);
                    if e.kind == InteractionKind::Reply {
                        if e.source == key.0 {
                            agg.fwd_replies += 1;
                        } else {
                            agg.rev_replies += 1;
                        }
                    }
                }
            }
            InteractionKind::Retweet => {
                out.retweets += 1;
                if let Some(author) = e.original_author {
                    let entry = retweets.entry((e.source, author)).or_insert((0, 0.0));
                    entry.0 += 1;
                    entry.1 = entry.1.max(e.timestamp);
                    *received.entry(author).or_default() += 1;
                }
            }
            InteractionKind::Post | InteractionKind::Comment => {
                if e.kind == InteractionKind::Post {
                    out.posts += 1;
                }
            }
        }
    }

    let mut per_ego: BTreeMap<AccountId, Vec<TieRecord>> = BTreeMap::new();
    let mut dropped_zero_lifespan_links = 0usize;
    for (&(a, b), agg) in &pairs {
        if agg.lifespan <= 0.0 {
            dropped_zero_lifespan_links += 1;
            continue;
        }
        for (ego, alter, replies) in [(a, b, agg.fwd_replies), (b, a, agg.rev_replies)] {
            let (retweet_count, retweet_lifespan) =
                retweets.get(&(ego, alter)).copied().unwrap_or((0, 0.0));
            per_ego.entry(ego).or_default().push(TieRecord {
                ego,
                alter,
                frequency: replies as f64 / agg.lifespan,
                normalized_frequency: 0.0,
                link_lifespan: agg.lifespan,
                reply_count: replies,
                retweet_count,
                retweet_lifespan,
                alter_class: classify_alter(accounts.get(&alter), class_rule),
            });
        }
    }

    let mut nets = Vec::new();
    let mut activities = Vec::new();
    let mut dropped_degenerate_egos = 0usize;
    for (ego, mut ties) in per_ego {
        ties.sort_by_key(|t| t.alter);
        if !ties.iter().any(|t| t.frequency > 0.0) {
            dropped_degenerate_egos += 1;
            continue;
        }
        let oldest_link = ties.iter().map(|t| t.link_lifespan).fold(0.0f64, f64::max);
        let account = accounts.get(&ego);
        let ego_lifespan = account
            .and_then(|a| a.created_months_before_download)
            .unwrap_or_else(|| first_seen.get(&ego).copied().unwrap_or(0.0))
            .max(oldest_link);
        let out = outgoing.get(&ego).copied().unwrap_or_default();
        let total_replies = ties.iter().map(|t| t.reply_count).sum();
        let mut net = EgoNetwork {
            ego,
            ego_lifespan,
            ties,
            total_replies,
            total_retweets: out.retweets,
            total_interactions: out.total,
        };
        normalize_ego_frequencies(&mut net).expect("ego has a positive reply rate");
        activities.push(EgoActivity {
            ego,
            activity: kahan_sum(net.ties.iter().map(|t| t.frequency)),
            tweets: account.map_or(out.posts as f64, |a| a.tweets as f64),
            retweets: out.retweets as f64,
            received_retweets: received.get(&ego).copied().unwrap_or(0) as f64,
        });
        nets.push(net);
    }
    EventAssembly {
        nets,
        activities,
        dropped_degenerate_egos,
        dropped_zero_lifespan_links,
    }
}

/// Projects networks onto the windowed CSV format: each tie becomes one
/// row whose window counts are the expected interactions of a
/// constant-rate link alive for its lifespan.
pub fn window_graph_from_nets(nets: &[EgoNetwork], cfg: &WindowConfig) -> WindowGraph {
    let spans = cfg.spans();
    let mut pooled: BTreeMap<(AccountId, AccountId), WindowCounts> = BTreeMap::new();
    for net in nets {
        for tie in &net.ties {
            let n: Vec<u64> = spans
                .iter()
                .map(|&w| (tie.frequency * w.min(tie.link_lifespan)).round() as u64)
                .collect();
            pooled.insert(
                undirected(tie.ego, tie.alter),
                WindowCounts::new(n[0], n[1], n[2], n[3]),
            );
        }
    }
    WindowGraph {
        links: pooled
            .into_iter()
            .map(|((a, b), counts)| WindowLink { a, b, counts })
            .collect(),
        discarded: 0,
    }
}

/// Projects networks onto the event-log format.
///
/// Each tie opens with a mention at its birth instant, spreads its replies
/// evenly across the lifespan, and spreads its retweets across the retweet
/// span, attributed to the alter. Re-assembling the output reproduces the
/// per-tie frequencies, lifespans and retweet counts.
pub fn events_from_nets(nets: &[EgoNetwork]) -> Vec<InteractionEvent> {
    let mut events = Vec::new();
    for net in nets {
        for tie in &net.ties {
            events.push(InteractionEvent {
                source: tie.ego,
                target: tie.alter,
                kind: InteractionKind::Mention,
                timestamp: tie.link_lifespan,
                original_author: None,
            });
            let n = tie.reply_count;
            for i in 1..=n {
                events.push(InteractionEvent {
                    source: tie.ego,
                    target: tie.alter,
                    kind: InteractionKind::Reply,
                    timestamp: tie.link_lifespan * i as f64 / (n + 1) as f64,
                    original_author: None,
                });
            }
            let span = if tie.retweet_lifespan > 0.0 {
                tie.retweet_lifespan
            } else {
                tie.link_lifespan
            };
            let rc = tie.retweet_count;
            for i in 1..=rc {
                events.push(InteractionEvent {
                    source: tie.ego,
                    target: tie.alter,
                    kind: InteractionKind::Retweet,
                    timestamp: span * i as f64 / (rc + 1) as f64,
                    original_author: Some(tie.alter),
                });
            }
        }
    }
    events
}

/// Emits account rows consistent with the networks' alter classes: alters
/// classified as broadcast accounts get low reply ratios and lopsided
/// follower counts, socially relevant alters get balanced profiles, and
/// unknown alters get no row. Ego rows carry the lifespan as creation
/// date.
pub fn accounts_from_nets(nets: &[EgoNetwork]) -> Vec<AccountStats> {
    let mut rows: BTreeMap<AccountId, AccountStats> = BTreeMap::new();
    for net in nets {
        for tie in &net.ties {
            let stats = match tie.alter_class {
                AlterClass::SociallyRelevant => AccountStats {
                    id: tie.alter,
                    created_months_before_download: None,
                    tweets: 50,
                    following: 100,
                    followers: 100,
                    reply_ratio: 0.18,
                    mention_ratio: 0.5,
                },
                AlterClass::Other => AccountStats {
                    id: tie.alter,
                    created_months_before_download: None,
                    tweets: 1000,
                    following: 10,
                    followers: 500,
                    reply_ratio: 0.01,
                    mention_ratio: 0.1,
                },
                AlterClass::Unknown => continue,
            };
            rows.entry(tie.alter).or_insert(stats);
        }
    }
    for net in nets {
        rows.insert(
            net.ego,
            AccountStats {
                id: net.ego,
                created_months_before_download: Some(net.ego_lifespan),
                tweets: net.total_interactions,
                following: 100,
                followers: 100,
                reply_ratio: 0.2,
                mention_ratio: 0.5,
            },
        );
    }
    rows.into_values().collect()
}

/// The undirected link set of a population.
pub fn social_graph_from_nets(nets: &[EgoNetwork]) -> SocialGraph {
    let mut graph = SocialGraph::new();
    for net in nets {
        for tie in &net.ties {
            graph.insert(tie.ego, tie.alter);
        }
    }
    graph
}
