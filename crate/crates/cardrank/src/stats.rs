//! Descriptive statistics over a QPV log: reformulation-ratio histogram,
//! cards-per-page distribution, and label splits per card count and per
//! card group.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpv::Qpv;

/// Positive/negative percentage split of the QPVs in one bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSplit {
    pub positive_pct: f64,
    pub negative_pct: f64,
}

/// Label split for one (query, shown card tuple) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardGroupSplit {
    pub query: String,
    pub group: Vec<String>,
    pub num_qpvs: u64,
    pub positive_pct: f64,
    pub negative_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub num_qpvs: u64,
    pub num_distinct_queries: u64,
    pub num_card_types: u64,
    /// Per-query reformulated-QPV ratio, bucketed at 0.01 resolution
    /// (keys are the bucket centers formatted with two decimals).
    pub reformulation_ratio_histogram: BTreeMap<String, u64>,
    /// Percentage of QPVs showing exactly K cards.
    pub cards_per_qpv_distribution: BTreeMap<usize, f64>,
    /// Positive/negative percentage among QPVs showing exactly K cards.
    pub label_split_per_card_count: BTreeMap<usize, LabelSplit>,
    /// Positive/negative percentage per (query, card group), sorted by
    /// query then group.
    pub card_group_label_split: Vec<CardGroupSplit>,
}

fn pct(part: u64, total: u64) -> f64 {
    100.0 * part as f64 / total as f64
}

/// Compute a [`StatsReport`] for a non-empty log. Deterministic for a given
/// input.
pub fn compute_stats(qpvs: &[Qpv]) -> Result<StatsReport> {
    if qpvs.is_empty() {
        return Err(Error::EmptyInput("cannot compute stats for an empty log"));
    }

    let mut per_query: BTreeMap<&str, (u64, u64)> = BTreeMap::new(); // (qpvs, reformulated)
    let mut card_types: BTreeSet<&str> = BTreeSet::new();
    let mut per_count: BTreeMap<usize, (u64, u64)> = BTreeMap::new(); // (qpvs, positive)
    let mut per_group: BTreeMap<(&str, Vec<String>), (u64, u64)> = BTreeMap::new();

    for qpv in qpvs {
        let entry = per_query.entry(&qpv.query).or_default();
        entry.0 += 1;
        entry.1 += u64::from(qpv.reformulated);

        for card in &qpv.cards {
            card_types.insert(&card.card_type);
        }

        let count = per_count.entry(qpv.cards.len()).or_default();
        count.0 += 1;
        count.1 += u64::from(!qpv.reformulated);

        let group = per_group.entry((&qpv.query, qpv.ranking())).or_default();
        group.0 += 1;
        group.1 += u64::from(!qpv.reformulated);
    }

    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    for &(total, reformulated) in per_query.values() {
        let ratio = reformulated as f64 / total as f64;
        *histogram.entry(format!("{ratio:.2}")).or_default() += 1;
    }

    let num_qpvs = qpvs.len() as u64;
    let cards_per_qpv_distribution = per_count
        .iter()
        .map(|(&k, &(n, _))| (k, pct(n, num_qpvs)))
        .collect();
    let label_split_per_card_count = per_count
        .iter()
        .map(|(&k, &(n, pos))| {
            (
                k,
                LabelSplit {
                    positive_pct: pct(pos, n),
                    negative_pct: pct(n - pos, n),
                },
            )
        })
        .collect();
    let card_group_label_split = per_group
        .iter()
        .map(|((query, group), &(n, pos))| CardGroupSplit {
            query: (*query).to_string(),
            group: group.clone(),
            num_qpvs: n,
            positive_pct: pct(pos, n),
            negative_pct: pct(n - pos, n),
        })
        .collect();

    Ok(StatsReport {
        num_qpvs,
        num_distinct_queries: per_query.len() as u64,
        num_card_types: card_types.len() as u64,
        reformulation_ratio_histogram: histogram,
        cards_per_qpv_distribution,
        label_split_per_card_count,
        card_group_label_split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpv::test_fixtures::qpv;

    fn ten_qpvs_three_reformulated() -> Vec<Qpv> {
        (0..10)
            .map(|i| {
                qpv(
                    &format!("p{i}"),
                    &format!("s{i}"),
                    i,
                    "q",
                    i < 3,
                    &["c1", "c2"],
                )
            })
            .collect()
    }

    #[test]
    fn empty_log_is_an_error() {
        assert!(compute_stats(&[]).is_err());
    }

    #[test]
    fn ratio_histogram_buckets_per_query() {
        let report = compute_stats(&ten_qpvs_three_reformulated()).unwrap();
        assert_eq!(report.reformulation_ratio_histogram.get("0.30"), Some(&1));
        assert_eq!(report.num_distinct_queries, 1);
        let total: u64 = report.reformulation_ratio_histogram.values().sum();
        assert_eq!(total, report.num_distinct_queries);
    }

    #[test]
    fn degenerate_card_count_distribution() {
        let report = compute_stats(&ten_qpvs_three_reformulated()).unwrap();
        assert_eq!(report.cards_per_qpv_distribution.len(), 1);
        assert_eq!(report.cards_per_qpv_distribution[&2], 100.0);
    }

    #[test]
    fn label_splits_sum_to_one_hundred() {
        let mut qpvs = ten_qpvs_three_reformulated();
        qpvs.push(qpv("extra", "sx", 99, "q2", true, &["c1", "c2", "c3"]));
        let report = compute_stats(&qpvs).unwrap();
        for split in report.label_split_per_card_count.values() {
            assert!((split.positive_pct + split.negative_pct - 100.0).abs() < 0.01);
        }
        for group in &report.card_group_label_split {
            assert!((group.positive_pct + group.negative_pct - 100.0).abs() < 0.01);
        }
        let dist_total: f64 = report.cards_per_qpv_distribution.values().sum();
        assert!((dist_total - 100.0).abs() < 0.01);
        assert_eq!(report.num_card_types, 3);
    }

    #[test]
    fn card_groups_distinguish_order() {
        let qpvs = vec![
            qpv("a", "s1", 1, "q", false, &["c1", "c2"]),
            qpv("b", "s2", 1, "q", true, &["c2", "c1"]),
        ];
        let report = compute_stats(&qpvs).unwrap();
        assert_eq!(report.card_group_label_split.len(), 2);
        assert_eq!(report.card_group_label_split[0].positive_pct, 100.0);
        assert_eq!(report.card_group_label_split[1].negative_pct, 100.0);
    }
}
