//! Query-page-view (QPV) log model: domain types, line-delimited JSON
//! parsing/serialization, and chaining of sessions into reformulation pairs.
//!
//! A QPV is one rendering of a results page: a query, an ordered card list
//! with view/click observations, and the page outcome. `reformulated = true`
//! encodes the negative outcome (the user reissued a similar query, or
//! abandoned the session unsatisfied); `reformulated = false` encodes the
//! positive outcome. How the flag was derived is the log producer's concern;
//! this crate reads it as given.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One card shown on a results page, with its observed interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardObservation {
    pub card_type: String,
    /// Position on the page, 1-based.
    pub rank: u32,
    pub viewed: bool,
    pub clicked: bool,
    /// Links shown on the card; 0 for link-less cards (weather and the like).
    pub num_links: u32,
    pub num_link_clicks: u32,
}

/// One query-page-view event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qpv {
    pub qpv_id: String,
    pub session_id: String,
    pub timestamp_ms: i64,
    pub query: String,
    pub reformulated: bool,
    pub cards: Vec<CardObservation>,
}

impl Qpv {
    /// The page outcome as a regression target: +1 satisfied, -1 reformulated.
    pub fn outcome(&self) -> f64 {
        if self.reformulated {
            -1.0
        } else {
            1.0
        }
    }

    /// Cards in rank order (the stored order is not guaranteed).
    pub fn ranked_cards(&self) -> Vec<&CardObservation> {
        let mut cards: Vec<&CardObservation> = self.cards.iter().collect();
        cards.sort_by_key(|c| c.rank);
        cards
    }

    /// Card types in rank order.
    pub fn ranking(&self) -> Vec<String> {
        self.ranked_cards()
            .into_iter()
            .map(|c| c.card_type.clone())
            .collect()
    }

    /// The observation for `card_type`, if shown on this page.
    pub fn card(&self, card_type: &str) -> Option<&CardObservation> {
        self.cards.iter().find(|c| c.card_type == card_type)
    }

    /// Check all structural invariants; errors name the offending QPV.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidQpv {
                qpv_id: self.qpv_id.clone(),
                reason,
            })
        };
        if self.cards.is_empty() {
            return fail("card list is empty".into());
        }
        let mut ranks: Vec<u32> = self.cards.iter().map(|c| c.rank).collect();
        ranks.sort_unstable();
        for (i, &r) in ranks.iter().enumerate() {
            let expected = i as u32 + 1;
            if r != expected {
                return fail(if ranks.iter().filter(|&&x| x == r).count() > 1 {
                    format!("duplicate rank {r}")
                } else {
                    format!("ranks are not the contiguous sequence 1..{}", self.cards.len())
                });
            }
        }
        let mut seen = HashSet::new();
        for card in &self.cards {
            if !seen.insert(card.card_type.as_str()) {
                return fail(format!("duplicate card type {:?}", card.card_type));
            }
            if card.num_link_clicks > card.num_links {
                return fail(format!(
                    "card {:?} has {} link clicks but only {} links",
                    card.card_type, card.num_link_clicks, card.num_links
                ));
            }
            if card.clicked && !card.viewed {
                return fail(format!("card {:?} clicked but not viewed", card.card_type));
            }
            if card.clicked && card.num_links > 0 && card.num_link_clicks == 0 {
                return fail(format!(
                    "card {:?} clicked with links shown but zero link clicks",
                    card.card_type
                ));
            }
        }
        Ok(())
    }
}

/// A terminal (reformulated, satisfied) adjacency within one session: the
/// last negative QPV of a chain and the positive QPV that resolved it.
/// Earlier negatives of a longer chain carry no pair.
#[derive(Debug, Clone, Copy)]
pub struct ReformulationPair<'a> {
    pub prior: &'a Qpv,
    pub successor: &'a Qpv,
}

/// Parse a line-delimited JSON QPV log.
///
/// Unknown fields are ignored; missing required fields are reported with the
/// 1-based line number; invariant violations are reported with the QPV id.
/// QPVs are returned in input order.
pub fn parse_qpv_log<R: BufRead>(reader: R) -> Result<Vec<Qpv>> {
    let mut qpvs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let qpv: Qpv = serde_json::from_str(&line).map_err(|e| Error::ParseLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        qpv.validate().map_err(|e| match e {
            Error::InvalidQpv { qpv_id, reason } => Error::InvalidQpv {
                qpv_id,
                reason: format!("{reason} (line {})", idx + 1),
            },
            other => other,
        })?;
        qpvs.push(qpv);
    }
    Ok(qpvs)
}

/// Serialize QPVs as line-delimited JSON in the log's canonical field order.
pub fn write_qpv_log<W: Write>(qpvs: &[Qpv], mut writer: W) -> Result<()> {
    for qpv in qpvs {
        serde_json::to_writer(&mut writer, qpv)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Chain sessions into reformulation pairs.
///
/// Input order is irrelevant: QPVs are grouped by session and sorted by
/// timestamp. For every adjacent (negative, positive) QPV pair the terminal
/// pair of the chain is emitted; earlier negatives and trailing negatives
/// (abandonment) produce nothing. Two QPVs of one session sharing a
/// timestamp is an error because their order would be undefined.
pub fn chain_sessions(qpvs: &[Qpv]) -> Result<Vec<ReformulationPair<'_>>> {
    let mut sessions: BTreeMap<&str, Vec<&Qpv>> = BTreeMap::new();
    for qpv in qpvs {
        sessions.entry(&qpv.session_id).or_default().push(qpv);
    }
    let mut pairs = Vec::new();
    for (session_id, members) in &mut sessions {
        members.sort_by_key(|q| q.timestamp_ms);
        for window in members.windows(2) {
            if window[0].timestamp_ms == window[1].timestamp_ms {
                return Err(Error::TimestampTie {
                    session_id: (*session_id).to_string(),
                    timestamp_ms: window[0].timestamp_ms,
                });
            }
            if window[0].reformulated && !window[1].reformulated {
                pairs.push(ReformulationPair {
                    prior: window[0],
                    successor: window[1],
                });
            }
        }
    }
    Ok(pairs)
}
