//! Property tests for labeling invariants and log round-trips over
//! randomized valid QPVs.

use proptest::prelude::*;

use cardrank::labeling::{
    label_approx_pairwise, label_ctr, label_discounted_pointwise, label_movement_pointwise,
    label_naive_pointwise, label_pairwise, AplSignRule, CardLabel, MovementConfig, PositivePolicy,
};
use cardrank::qpv::{chain_sessions, parse_qpv_log, write_qpv_log, CardObservation, Qpv};

const CARD_POOL: [&str; 8] = ["c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7"];

/// One valid card observation, given its 1-based rank.
fn arb_card(rank: u32, card_type: String) -> impl Strategy<Value = CardObservation> {
    (any::<bool>(), any::<bool>(), 0u32..9).prop_map(move |(viewed, clicked, links)| {
        let clicked = clicked && viewed;
        let num_link_clicks = if clicked && links > 0 { 1 + links / 3 } else { 0 };
        CardObservation {
            card_type: card_type.clone(),
            rank,
            viewed,
            clicked,
            num_links: links,
            num_link_clicks,
        }
    })
}

/// A valid QPV with 1..=5 distinct cards at contiguous ranks.
fn arb_qpv(tag: usize) -> impl Strategy<Value = Qpv> {
    (2usize..=5, any::<bool>(), Just(tag)).prop_flat_map(|(k, reformulated, tag)| {
        let subset = proptest::sample::subsequence(CARD_POOL.to_vec(), k);
        (subset.prop_shuffle(), Just(reformulated), Just(tag)).prop_flat_map(
            |(cards, reformulated, tag)| {
                let card_strategies: Vec<_> = cards
                    .iter()
                    .enumerate()
                    .map(|(i, ct)| arb_card(i as u32 + 1, ct.to_string()))
                    .collect();
                // Sessions are shared (tag % 4) so chains with negative
                // priors actually occur; timestamps stay distinct per tag.
                card_strategies.prop_map(move |cards| Qpv {
                    qpv_id: format!("p{tag}"),
                    session_id: format!("s{}", tag % 4),
                    timestamp_ms: tag as i64,
                    query: format!("q{}", tag % 3),
                    reformulated,
                    cards,
                })
            },
        )
    })
}

fn arb_log(max: usize) -> impl Strategy<Value = Vec<Qpv>> {
    (1..=max).prop_flat_map(|n| (0..n).map(arb_qpv).collect::<Vec<_>>())
}

fn sorted_triples(labels: &[CardLabel]) -> Vec<(String, String, String)> {
    let mut keys: Vec<(String, String, String)> = labels
        .iter()
        .map(|l| (l.qpv_id.clone(), l.card_type.clone(), format!("{:.12}", l.label)))
        .collect();
    keys.sort();
    keys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_write_round_trip(qpvs in arb_log(12)) {
        for qpv in &qpvs {
            prop_assert!(qpv.validate().is_ok());
        }
        let mut buf = Vec::new();
        write_qpv_log(&qpvs, &mut buf).unwrap();
        let parsed = parse_qpv_log(&buf[..]).unwrap();
        prop_assert_eq!(&parsed, &qpvs);
        let mut buf2 = Vec::new();
        write_qpv_log(&parsed, &mut buf2).unwrap();
        prop_assert_eq!(buf, buf2);
    }

    #[test]
    fn npl_and_dpl_emit_the_same_set_with_matching_signs(qpvs in arb_log(12)) {
        let pairs = chain_sessions(&qpvs).unwrap();
        let npl = label_naive_pointwise(&qpvs, &pairs, PositivePolicy::All);
        let dpl = label_discounted_pointwise(&qpvs, &pairs, PositivePolicy::All);
        prop_assert_eq!(npl.len(), dpl.len());
        for (n, d) in npl.iter().zip(&dpl) {
            prop_assert_eq!(&n.qpv_id, &d.qpv_id);
            prop_assert_eq!(&n.card_type, &d.card_type);
            prop_assert_eq!(n.label.signum(), d.label.signum());
        }
    }

    #[test]
    fn dpl_magnitudes_strictly_decrease_in_rank(qpvs in arb_log(8)) {
        let pairs = chain_sessions(&qpvs).unwrap();
        let dpl = label_discounted_pointwise(&qpvs, &pairs, PositivePolicy::All);
        // Labels are emitted per QPV in rank order.
        for window in dpl.windows(2) {
            if window[0].qpv_id == window[1].qpv_id {
                prop_assert!(window[0].label.abs() > window[1].label.abs());
            }
        }
    }

    #[test]
    fn pair_and_apl_counts_follow_k(qpv in arb_qpv(0)) {
        let k = qpv.cards.len();
        let qpvs = vec![qpv];
        prop_assert_eq!(label_pairwise(&qpvs).len(), k * (k - 1) / 2);
        let uncombined = label_approx_pairwise(&qpvs, false, AplSignRule::Definition);
        prop_assert_eq!(uncombined.len(), k * (k - 1));
        let combined = label_approx_pairwise(&qpvs, true, AplSignRule::Definition);
        prop_assert_eq!(combined.len(), k);
        let total: f64 = combined.iter().map(|l| l.label).sum();
        prop_assert_eq!(total, 0.0);
    }

    #[test]
    fn apl_combined_is_antisymmetric_under_reversal(qpv in arb_qpv(0)) {
        let mut reversed = qpv.clone();
        let k = reversed.cards.len() as u32;
        for card in &mut reversed.cards {
            card.rank = k + 1 - card.rank;
        }
        let forward = label_approx_pairwise(&[qpv], true, AplSignRule::Definition);
        let backward = label_approx_pairwise(&[reversed], true, AplSignRule::Definition);
        for f in &forward {
            let b = backward
                .iter()
                .find(|b| b.card_type == f.card_type)
                .expect("same card set");
            prop_assert_eq!(f.label, -b.label);
        }
    }

    #[test]
    fn labeling_is_input_order_independent(qpvs in arb_log(10), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = qpvs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));

        let pairs_a = chain_sessions(&qpvs).unwrap();
        let pairs_b = chain_sessions(&shuffled).unwrap();
        let npl_a = label_naive_pointwise(&qpvs, &pairs_a, PositivePolicy::All);
        let npl_b = label_naive_pointwise(&shuffled, &pairs_b, PositivePolicy::All);
        prop_assert_eq!(sorted_triples(&npl_a), sorted_triples(&npl_b));

        let apl_a = label_approx_pairwise(&qpvs, true, AplSignRule::Definition);
        let apl_b = label_approx_pairwise(&shuffled, true, AplSignRule::Definition);
        prop_assert_eq!(sorted_triples(&apl_a), sorted_triples(&apl_b));

        let ctr_a = label_ctr(&qpvs);
        let ctr_b = label_ctr(&shuffled);
        prop_assert_eq!(sorted_triples(&ctr_a), sorted_triples(&ctr_b));
    }
}

/// Movement labels over a permuted pair sum to zero: rank differences of a
/// permutation cancel.
#[test]
fn movement_labels_sum_to_zero_for_equal_card_sets() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
    for trial in 0..200 {
        let k = 2 + trial % 4;
        let mut cards: Vec<&str> = CARD_POOL[..k].to_vec();
        let prior: Vec<(&str, bool, bool)> = cards.iter().map(|&c| (c, true, false)).collect();
        cards.shuffle(&mut rng);
        let successor: Vec<(&str, bool, bool)> = cards.iter().map(|&c| (c, true, false)).collect();

        let make = |id: &str, ts: i64, neg: bool, spec: &[(&str, bool, bool)]| Qpv {
            qpv_id: id.into(),
            session_id: "s".into(),
            timestamp_ms: ts,
            query: "q".into(),
            reformulated: neg,
            cards: spec
                .iter()
                .enumerate()
                .map(|(i, &(ct, viewed, _))| CardObservation {
                    card_type: ct.into(),
                    rank: i as u32 + 1,
                    viewed,
                    clicked: false,
                    num_links: 0,
                    num_link_clicks: 0,
                })
                .collect(),
        };
        let qpvs = vec![make("a", 1, true, &prior), make("b", 2, false, &successor)];
        let pairs = chain_sessions(&qpvs).unwrap();
        let labels = label_movement_pointwise(&pairs, &MovementConfig::default());
        assert_eq!(labels.len(), k);
        let total: f64 = labels.iter().map(|l| l.label).sum();
        assert_eq!(total, 0.0, "trial {trial}");
    }
}
