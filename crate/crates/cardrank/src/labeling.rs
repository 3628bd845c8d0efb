//! Label derivation strategies: turning page-level reformulation outcomes
//! into per-card, per-card-pair, and per-ranking training labels.
//!
//! Pointwise strategies attach a value to each (QPV, card); the pairwise
//! strategy attaches a preference to each ordered card pair; the listwise
//! strategy labels the whole shown ranking. CTR and imported human
//! judgments are the click-based and editorial baselines.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpv::{Qpv, ReformulationPair};

/// Labeling strategy identifiers, named as in the CLI (`npl`, `dpl`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Naive pointwise: the page outcome, copied to every card.
    Npl,
    /// Discounted pointwise: the page outcome with a 1/ln(1+rank) weight.
    Dpl,
    /// Movement-based pointwise: rank changes across a reformulation pair.
    Mpl,
    /// Approximated pairwise, broken down to pointwise values.
    Apl,
    /// Listwise: the outcome attached to the whole ranking.
    Ll,
    /// Learning-to-label credits from the per-query logistic model.
    Ltl,
    /// Click-through rate over card links.
    Ctr,
    /// Imported editorial judgments.
    Human,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Npl,
        Strategy::Dpl,
        Strategy::Mpl,
        Strategy::Apl,
        Strategy::Ll,
        Strategy::Ltl,
        Strategy::Ctr,
        Strategy::Human,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Npl => "npl",
            Strategy::Dpl => "dpl",
            Strategy::Mpl => "mpl",
            Strategy::Apl => "apl",
            Strategy::Ll => "ll",
            Strategy::Ltl => "ltl",
            Strategy::Ctr => "ctr",
            Strategy::Human => "human",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// A training label for one (QPV, card).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardLabel {
    /// Empty for labels not tied to a QPV (human judgments).
    pub qpv_id: String,
    pub query: String,
    pub card_type: String,
    pub label: f64,
    pub strategy: Strategy,
}

/// A preference label for one ordered card pair within a QPV. `preferred`
/// is the higher-ranked card of the pair in the source QPV.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLabel {
    pub qpv_id: String,
    pub query: String,
    pub preferred: String,
    pub other: String,
    pub label: i8,
}

/// A label for a whole shown ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ListLabel {
    pub qpv_id: String,
    pub query: String,
    pub ranking: Vec<String>,
    pub label: i8,
}

/// Default values for cards that appear in or disappear from the list
/// across a reformulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovementConfig {
    pub d_plus: f64,
    pub d_minus: f64,
}

impl Default for MovementConfig {
    fn default() -> Self {
        MovementConfig {
            d_plus: 1.0,
            d_minus: -1.0,
        }
    }
}

impl MovementConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_plus > 0.0) || !(self.d_minus < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "movement defaults must satisfy d_plus > 0 > d_minus (got {}, {})",
                self.d_plus, self.d_minus
            )));
        }
        Ok(())
    }
}

/// Which satisfied QPVs receive positive pointwise labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivePolicy {
    /// Every satisfied QPV (the strategy's definition).
    #[default]
    All,
    /// Only satisfied QPVs that resolved a reformulation chain.
    PostReform,
}

/// Sign rule for breaking a negative pair preference down to pointwise
/// labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AplSignRule {
    /// A -1 pair gives the preferred card -1 and the other +1.
    #[default]
    Definition,
    /// Compatibility mode: always +1 for preferred, -1 for the other,
    /// regardless of the pair label.
    PreferredAlwaysPositive,
}

fn is_positive_emitter(qpv: &Qpv, policy: PositivePolicy, successors: &BTreeMap<&str, ()>) -> bool {
    if qpv.reformulated {
        return false;
    }
    match policy {
        PositivePolicy::All => true,
        PositivePolicy::PostReform => successors.contains_key(qpv.qpv_id.as_str()),
    }
}

fn pointwise_emission<'a, F>(
    qpvs: &'a [Qpv],
    pairs: &[ReformulationPair<'a>],
    policy: PositivePolicy,
    strategy: Strategy,
    value: F,
) -> Vec<CardLabel>
where
    F: Fn(&Qpv, u32) -> f64,
{
    let priors: BTreeMap<&str, ()> = pairs.iter().map(|p| (p.prior.qpv_id.as_str(), ())).collect();
    let successors: BTreeMap<&str, ()> = pairs
        .iter()
        .map(|p| (p.successor.qpv_id.as_str(), ()))
        .collect();

    let mut labels = Vec::new();
    for qpv in qpvs {
        let emit = if qpv.reformulated {
            // Only the terminal negative of a chain carries labels.
            priors.contains_key(qpv.qpv_id.as_str())
        } else {
            is_positive_emitter(qpv, policy, &successors)
        };
        if !emit {
            continue;
        }
        for card in qpv.ranked_cards() {
            labels.push(CardLabel {
                qpv_id: qpv.qpv_id.clone(),
                query: qpv.query.clone(),
                card_type: card.card_type.clone(),
                label: value(qpv, card.rank),
                strategy,
            });
        }
    }
    labels
}

/// Naive pointwise labeling: every card of a satisfied QPV gets +1; every
/// card of a chain's terminal reformulated QPV gets -1.
pub fn label_naive_pointwise(
    qpvs: &[Qpv],
    pairs: &[ReformulationPair<'_>],
    policy: PositivePolicy,
) -> Vec<CardLabel> {
    pointwise_emission(qpvs, pairs, policy, Strategy::Npl, |qpv, _| qpv.outcome())
}

/// The 1/ln(1+rank) position discount shared by discounted pointwise
/// labeling and listwise feature aggregation.
pub fn rank_discount(rank: u32) -> f64 {
    1.0 / (1.0 + rank as f64).ln()
}

/// Discounted pointwise labeling: same emission rule as naive pointwise,
/// with the outcome weighted by 1/ln(1+rank).
pub fn label_discounted_pointwise(
    qpvs: &[Qpv],
    pairs: &[ReformulationPair<'_>],
    policy: PositivePolicy,
) -> Vec<CardLabel> {
    pointwise_emission(qpvs, pairs, policy, Strategy::Dpl, |qpv, rank| {
        qpv.outcome() * rank_discount(rank)
    })
}

/// Movement-based pointwise labeling over reformulation pairs.
///
/// For every card in the union of the pair's card sets, one label on the
/// successor QPV: the rank difference (prior minus successor) when the card
/// is in both lists, `d_plus` when it newly appeared, `d_minus` when it
/// disappeared.
pub fn label_movement_pointwise(
    pairs: &[ReformulationPair<'_>],
    config: &MovementConfig,
) -> Vec<CardLabel> {
    let mut labels = Vec::new();
    for pair in pairs {
        let succ = pair.successor;
        let prior_ranks: BTreeMap<&str, u32> = pair
            .prior
            .cards
            .iter()
            .map(|c| (c.card_type.as_str(), c.rank))
            .collect();
        let mut push = |card_type: &str, label: f64| {
            labels.push(CardLabel {
                qpv_id: succ.qpv_id.clone(),
                query: succ.query.clone(),
                card_type: card_type.to_string(),
                label,
                strategy: Strategy::Mpl,
            });
        };
        for card in succ.ranked_cards() {
            match prior_ranks.get(card.card_type.as_str()) {
                Some(&prior_rank) => {
                    push(&card.card_type, prior_rank as f64 - card.rank as f64)
                }
                None => push(&card.card_type, config.d_plus),
            }
        }
        for card in pair.prior.ranked_cards() {
            if succ.card(&card.card_type).is_none() {
                push(&card.card_type, config.d_minus);
            }
        }
    }
    labels
}

/// Pairwise labeling: for each QPV with K cards, K(K-1)/2 pair labels, one
/// per rank-ordered card pair, all carrying the page outcome.
pub fn label_pairwise(qpvs: &[Qpv]) -> Vec<PairLabel> {
    let mut labels = Vec::new();
    for qpv in qpvs {
        let outcome = if qpv.reformulated { -1 } else { 1 };
        let ranked = qpv.ranked_cards();
        for i in 0..ranked.len() {
            for j in i + 1..ranked.len() {
                labels.push(PairLabel {
                    qpv_id: qpv.qpv_id.clone(),
                    query: qpv.query.clone(),
                    preferred: ranked[i].card_type.clone(),
                    other: ranked[j].card_type.clone(),
                    label: outcome,
                });
            }
        }
    }
    labels
}

/// Approximated pairwise labeling: each pair preference is broken down to
/// two pointwise labels. With `combine`, labels for the same (QPV, card)
/// are summed into one.
pub fn label_approx_pairwise(qpvs: &[Qpv], combine: bool, sign_rule: AplSignRule) -> Vec<CardLabel> {
    let mut labels = Vec::new();
    for qpv in qpvs {
        let single = [qpv.clone()];
        let pairs = label_pairwise(&single);
        let mut per_card: BTreeMap<&str, f64> = BTreeMap::new();
        let mut uncombined: Vec<(String, f64)> = Vec::new();
        for pair in &pairs {
            let preferred_value = match (pair.label, sign_rule) {
                (l, AplSignRule::Definition) => f64::from(l),
                (_, AplSignRule::PreferredAlwaysPositive) => 1.0,
            };
            for (card, value) in [
                (pair.preferred.as_str(), preferred_value),
                (pair.other.as_str(), -preferred_value),
            ] {
                if combine {
                    *per_card.entry(card).or_default() += value;
                } else {
                    uncombined.push((card.to_string(), value));
                }
            }
        }
        let make = |card_type: String, label: f64| CardLabel {
            qpv_id: qpv.qpv_id.clone(),
            query: qpv.query.clone(),
            card_type,
            label,
            strategy: Strategy::Apl,
        };
        if combine {
            // Emit in rank order of the source QPV.
            for card in qpv.ranked_cards() {
                if let Some(&value) = per_card.get(card.card_type.as_str()) {
                    labels.push(make(card.card_type.clone(), value));
                }
            }
        } else {
            labels.extend(uncombined.into_iter().map(|(c, v)| make(c, v)));
        }
    }
    labels
}

/// Listwise labeling: one label per QPV carrying the outcome and the full
/// shown ranking.
pub fn label_listwise(qpvs: &[Qpv]) -> Vec<ListLabel> {
    qpvs.iter()
        .map(|qpv| ListLabel {
            qpv_id: qpv.qpv_id.clone(),
            query: qpv.query.clone(),
            ranking: qpv.ranking(),
            label: if qpv.reformulated { -1 } else { 1 },
        })
        .collect()
}

/// CTR labeling: per (query, card), link clicks normalized by links shown,
/// pooled over all QPVs of the query. Cards that never show links get 0.
/// One label per (query, card, QPV) carrying the pooled value.
pub fn label_ctr(qpvs: &[Qpv]) -> Vec<CardLabel> {
    let mut pooled: BTreeMap<(&str, &str), (u64, u64)> = BTreeMap::new(); // (links, clicks)
    for qpv in qpvs {
        for card in &qpv.cards {
            let entry = pooled
                .entry((qpv.query.as_str(), card.card_type.as_str()))
                .or_default();
            entry.0 += u64::from(card.num_links);
            entry.1 += u64::from(card.num_link_clicks);
        }
    }
    let mut labels = Vec::new();
    for qpv in qpvs {
        for card in qpv.ranked_cards() {
            let &(links, clicks) = pooled
                .get(&(qpv.query.as_str(), card.card_type.as_str()))
                .expect("pooled stats cover every shown card");
            let label = if links == 0 {
                0.0
            } else {
                clicks as f64 / links as f64
            };
            labels.push(CardLabel {
                qpv_id: qpv.qpv_id.clone(),
                query: qpv.query.clone(),
                card_type: card.card_type.clone(),
                label,
                strategy: Strategy::Ctr,
            });
        }
    }
    labels
}

/// Map a judgment grade to its numeric label.
pub fn grade_value(grade: &str) -> Option<f64> {
    match grade {
        "Excellent" => Some(2.0),
        "Good" => Some(1.0),
        "Neutral" => Some(0.0),
        "Poor" => Some(-1.0),
        "Very Poor" => Some(-2.0),
        _ => None,
    }
}

/// Import human judgments from a 3-column TSV (query, card_type, grade).
///
/// Judgments are query-card level, so `qpv_id` is left empty. Unknown
/// grades are errors carrying the 1-based line number.
pub fn import_human_judgments<R: BufRead>(reader: R) -> Result<Vec<CardLabel>> {
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::ParseLine {
                line: idx + 1,
                reason: format!("expected 3 tab-separated columns, got {}", fields.len()),
            });
        }
        let label = grade_value(fields[2]).ok_or_else(|| Error::UnknownGrade {
            line: idx + 1,
            grade: fields[2].to_string(),
        })?;
        labels.push(CardLabel {
            qpv_id: String::new(),
            query: fields[0].to_string(),
            card_type: fields[1].to_string(),
            label,
            strategy: Strategy::Human,
        });
    }
    Ok(labels)
}

// ── Label file I/O ──────────────────────────────────────────────────────
//
// One JSON object per line: `qpv_id`, `query`, then `card_type`, or
// `preferred`/`other`, or a `ranking` array, plus `label` and `strategy`.

pub fn write_card_labels<W: Write>(labels: &[CardLabel], mut writer: W) -> Result<()> {
    for label in labels {
        serde_json::to_writer(&mut writer, label)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_card_labels<R: BufRead>(reader: R) -> Result<Vec<CardLabel>> {
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        labels.push(serde_json::from_str(&line).map_err(|e| Error::ParseLine {
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(labels)
}

#[derive(Serialize)]
struct PairRecord<'a> {
    qpv_id: &'a str,
    query: &'a str,
    preferred: &'a str,
    other: &'a str,
    label: i8,
    strategy: &'static str,
}

pub fn write_pair_labels<W: Write>(labels: &[PairLabel], mut writer: W) -> Result<()> {
    for label in labels {
        let record = PairRecord {
            qpv_id: &label.qpv_id,
            query: &label.query,
            preferred: &label.preferred,
            other: &label.other,
            label: label.label,
            strategy: "pairwise",
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ListRecord<'a> {
    qpv_id: &'a str,
    query: &'a str,
    ranking: &'a [String],
    label: i8,
    strategy: &'static str,
}

pub fn write_list_labels<W: Write>(labels: &[ListLabel], mut writer: W) -> Result<()> {
    for label in labels {
        let record = ListRecord {
            qpv_id: &label.qpv_id,
            query: &label.query,
            ranking: &label.ranking,
            label: label.label,
            strategy: "ll",
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
