mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use systematicity::probes::{build_consistency_probe, gold_predictions};
use systematicity::relations::Relation;
use systematicity::scoring::{
    aggregate, consistency_rate, format_table, score, write_aggregate_csv, write_block_csv, AggregateScore,
    BlockScore, Grouping, ScoreItem, ScoringError, OVERALL,
};

use common::mini_bundle;

fn balanced(blocks: u32, per_relation: usize) -> Vec<ScoreItem> {
    let mut out = Vec::new();
    for b in 0..blocks {
        for r in Relation::ALL {
            for k in 0..per_relation {
                out.push(ScoreItem {
                    item_id: format!("{b}-{r}-{k}"),
                    block_id: b,
                    gold: r,
                    relation: r,
                    perturbation: None,
                });
            }
        }
    }
    out
}

#[test]
fn gold_predictions_score_perfectly() {
    let b = mini_bundle();
    let items: Vec<ScoreItem> = b.holdout.iter().map(ScoreItem::from).collect();
    let gold = gold_predictions(&b.holdout);
    for grouping in [Grouping::Overall, Grouping::ByRelation] {
        let r = score(&items, &gold, grouping).unwrap();
        assert_eq!(r.coverage.missing(), 0);
        for a in &r.aggregates {
            assert_eq!((a.mean_accuracy, a.sd_accuracy), (1.0, 0.0), "{}", a.group_key);
            // rare relations need not occur in every block
            assert!(a.n_blocks <= b.config.n_training_blocks);
            if a.group_key == OVERALL {
                assert_eq!(a.n_blocks, b.config.n_training_blocks);
            }
        }
    }
    let text = format_table("holdout", &score(&items, &gold, Grouping::Overall).unwrap().aggregates);
    assert!(text.contains("100.00 ± 0.00"), "{text}");
}

#[test]
fn constant_predictor_on_balanced_items() {
    let items = balanced(3, 5);
    let preds: HashMap<String, Relation> = items.iter().map(|i| (i.item_id.clone(), Relation::Forward)).collect();
    let r = score(&items, &preds, Grouping::Overall).unwrap();
    assert_eq!(r.blocks.len(), 3);
    for blk in &r.blocks {
        assert_eq!((blk.n_items, blk.n_correct), (35, 5));
    }
    assert!((r.aggregates[0].mean_accuracy - 1.0 / 7.0).abs() < 1e-12);
    assert_eq!(r.aggregates[0].sd_accuracy, 0.0);

    let by_rel = score(&items, &preds, Grouping::ByRelation).unwrap();
    assert_eq!(by_rel.aggregates.len(), 7);
    for a in &by_rel.aggregates {
        let want = if a.group_key == "forward" { 1.0 } else { 0.0 };
        assert_eq!(a.mean_accuracy, want, "{}", a.group_key);
    }
}

#[test]
fn by_relation_counts_add_up_to_overall() {
    let b = mini_bundle();
    let items: Vec<ScoreItem> = b.validation.iter().map(ScoreItem::from).collect();
    let preds: HashMap<String, Relation> = items
        .iter()
        .enumerate()
        .map(|(k, i)| (i.item_id.clone(), if k % 3 == 0 { Relation::Cover } else { i.gold }))
        .collect();
    let overall = score(&items, &preds, Grouping::Overall).unwrap();
    let by_rel = score(&items, &preds, Grouping::ByRelation).unwrap();
    for blk in &overall.blocks {
        let parts: Vec<&BlockScore> = by_rel.blocks.iter().filter(|p| p.block_id == blk.block_id).collect();
        assert_eq!(parts.iter().map(|p| p.n_items).sum::<usize>(), blk.n_items);
        assert_eq!(parts.iter().map(|p| p.n_correct).sum::<usize>(), blk.n_correct);
    }
}

#[test]
fn order_blind_predictor_fails_only_asymmetric_relations() {
    let b = mini_bundle();
    let gold = gold_predictions(&b.jabberwocky);
    let set = build_consistency_probe(&b.jabberwocky, &b.lexicon, &gold).unwrap();
    // the same answer for both orders of a pair
    let second: HashMap<String, Relation> = set
        .items
        .iter()
        .map(|p| (p.target_item_id.clone(), p.source_gold))
        .collect();
    let r = consistency_rate(&set.items, &gold, &second, Grouping::ByRelation);
    assert_eq!(r.aggregates.len(), 7);
    for a in &r.aggregates {
        let rel: Relation = a.group_key.parse().unwrap();
        let want = if rel.is_symmetric() { 1.0 } else { 0.0 };
        assert_eq!((a.mean_accuracy, a.sd_accuracy), (want, 0.0), "{rel}");
    }
    let gold_rate = consistency_rate(&set.items, &gold, &gold, Grouping::Overall);
    assert_eq!(gold_rate.aggregates[0].mean_accuracy, 1.0);
    assert_eq!(gold_rate.coverage.missing(), 0);
}

#[test]
fn unknown_predictions_are_rejected() {
    let items = balanced(1, 1);
    let preds = HashMap::from([("nope".to_string(), Relation::Cover)]);
    let err = score(&items, &preds, Grouping::Overall).unwrap_err();
    assert!(matches!(&err, ScoringError::UnknownItems(ids) if ids == &["nope".to_string()]));
    assert!("by_block".parse::<Grouping>().is_err());
}

#[test]
fn missing_predictions_lower_coverage_not_accuracy() {
    let items = balanced(2, 10);
    let preds: HashMap<String, Relation> = items
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 10 != 0)
        .map(|(_, i)| (i.item_id.clone(), i.gold))
        .collect();
    let r = score(&items, &preds, Grouping::Overall).unwrap();
    assert_eq!(r.coverage.missing(), 14);
    assert!((r.coverage.fraction() - 0.9).abs() < 1e-12);
    assert_eq!(r.aggregates[0].mean_accuracy, 1.0);
}

#[test]
fn csv_round_trip_reproduces_aggregates() {
    let b = mini_bundle();
    let items: Vec<ScoreItem> = b.train.iter().map(ScoreItem::from).collect();
    let preds: HashMap<String, Relation> = items
        .iter()
        .enumerate()
        .map(|(k, i)| (i.item_id.clone(), if k % (5 + i.block_id as usize) == 0 { Relation::Negation } else { i.gold }))
        .collect();
    let r = score(&items, &preds, Grouping::ByRelation).unwrap();
    let mut blocks_csv = Vec::new();
    write_block_csv(&r.blocks, &mut blocks_csv).unwrap();
    let blocks: Vec<BlockScore> = csv::Reader::from_reader(blocks_csv.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(blocks, r.blocks);
    assert_eq!(aggregate(&blocks), r.aggregates);

    let mut agg_csv = Vec::new();
    write_aggregate_csv(&r.aggregates, &mut agg_csv).unwrap();
    let back: Vec<AggregateScore> = csv::Reader::from_reader(agg_csv.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back, r.aggregates);
    assert!(r.aggregates.iter().any(|a| a.sd_accuracy > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn item_order_does_not_matter(seed in any::<u64>(), wrong in 0usize..7) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let items = balanced(4, 3);
        let preds: HashMap<String, Relation> = items
            .iter()
            .enumerate()
            .map(|(k, i)| (i.item_id.clone(), if k % 7 == wrong { Relation::ALL[wrong] } else { i.gold }))
            .collect();
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        for g in [Grouping::Overall, Grouping::ByRelation] {
            prop_assert_eq!(score(&items, &preds, g).unwrap(), score(&shuffled, &preds, g).unwrap());
        }
    }

    #[test]
    fn aggregate_is_mean_and_sample_sd(accs in proptest::collection::vec(0u32..=100, 1..12)) {
        let blocks: Vec<BlockScore> = accs
            .iter()
            .enumerate()
            .map(|(b, &c)| BlockScore {
                block_id: b as u32,
                group_key: OVERALL.into(),
                n_items: 100,
                n_correct: c as usize,
                accuracy: f64::from(c) / 100.0,
            })
            .collect();
        let a = &aggregate(&blocks)[0];
        let n = accs.len() as f64;
        let mean = accs.iter().map(|&c| f64::from(c) / 100.0).sum::<f64>() / n;
        prop_assert!((a.mean_accuracy - mean).abs() < 1e-12);
        // sum of squared pairwise differences equals 2n times the sum of squared deviations
        let pairwise: f64 = accs
            .iter()
            .flat_map(|&x| accs.iter().map(move |&y| (f64::from(x) - f64::from(y)) / 100.0))
            .map(|d| d * d)
            .sum();
        let sd = if accs.len() == 1 { 0.0 } else { (pairwise / (2.0 * n * (n - 1.0))).sqrt() };
        prop_assert!((a.sd_accuracy - sd).abs() < 1e-9);
        prop_assert_eq!(a.n_blocks, accs.len());
    }
}
