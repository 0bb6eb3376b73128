mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use systematicity::language::SentencePair;
use systematicity::relations::Relation;
use systematicity::sampler::{
    build_lexicon, child_rng, close_for_probes, sample_block_items, DatasetItem, Parallelism, Provenance,
    SamplerError, Split, TUPLES_PER_BLOCK,
};
use systematicity::semantics::label_pair;

use common::{lexicon, mini_bundle, mini_config, pair, table};

fn one_block_sample(seed: u64) -> Vec<DatasetItem> {
    let config = mini_config();
    let lex = build_lexicon(&config).unwrap();
    let block = lex.block(0).unwrap();
    let mut rng = child_rng(seed, "test", 0);
    let (items, skipped) = sample_block_items(block, &lex, table(), &config, Split::Train, &mut rng).unwrap();
    assert_eq!(skipped, 0);
    items
}

#[test]
fn one_pair_per_tuple_covers_every_tuple_once() {
    let items = one_block_sample(3);
    assert_eq!(items.len(), TUPLES_PER_BLOCK);
    let ids: HashSet<_> = items.iter().map(|i| &i.item_id).collect();
    assert_eq!(ids.len(), TUPLES_PER_BLOCK);
    let tuples: HashSet<_> = items
        .iter()
        .map(|i| (i.premise.noun, i.hypothesis.noun, i.premise.verb, i.hypothesis.verb))
        .collect();
    assert_eq!(tuples.len(), TUPLES_PER_BLOCK);
    for rank in 0..6u8 {
        let n = items.iter().filter(|i| i.premise.noun.rank == rank).count();
        assert_eq!(n * 6, TUPLES_PER_BLOCK);
    }
}

#[test]
fn same_seed_same_items() {
    assert_eq!(one_block_sample(11), one_block_sample(11));
    assert_ne!(one_block_sample(11), one_block_sample(12));
}

#[test]
fn too_many_pairs_per_tuple_is_reported() {
    let mut config = mini_config();
    config.pairs_per_open_class_combo = config.pair_fillings() + 1;
    let lex = build_lexicon(&config).unwrap();
    let block = lex.block(0).unwrap();
    let err = sample_block_items(block, &lex, table(), &config, Split::Train, &mut child_rng(0, "x", 0)).unwrap_err();
    assert!(matches!(err, SamplerError::Exhausted { block: 0, .. }), "{err}");
}

#[test]
fn splits_have_planned_sizes() {
    let b = mini_bundle();
    let planned = b.config.planned_counts();
    assert_eq!(b.train.len(), planned.train);
    assert_eq!(b.validation.len(), planned.validation);
    assert_eq!(b.holdout.len(), planned.holdout);
    let originals = b.jabberwocky.iter().filter(|i| i.provenance == Provenance::Original).count();
    assert_eq!(originals, planned.jabberwocky_original);
    for split in Split::ALL {
        assert!(b.split(split).iter().all(|i| i.split == split));
    }
}

#[test]
fn every_item_lies_in_one_block_and_carries_table_gold() {
    let b = mini_bundle();
    for split in Split::ALL {
        for item in b.split(split) {
            let p = item.pair();
            assert!(p.is_single_block());
            assert_eq!(p.block(), item.block_id);
            assert_eq!(label_pair(&p, &b.table).unwrap(), item.gold);
        }
    }
}

#[test]
fn holdout_is_disjoint_from_training_pool() {
    let b = mini_bundle();
    let pool: HashSet<SentencePair> = b.train.iter().chain(&b.validation).map(DatasetItem::pair).collect();
    assert!(b.holdout.iter().all(|i| !pool.contains(&i.pair())));
    let ids: HashSet<&str> = b.train.iter().chain(&b.validation).map(|i| i.item_id.as_str()).collect();
    assert!(b.holdout.iter().all(|i| !ids.contains(i.item_id.as_str())));
}

#[test]
fn jabberwocky_words_never_appear_in_training() {
    let b = mini_bundle();
    let tokens = |items: &[DatasetItem]| -> BTreeSet<String> {
        items
            .iter()
            .flat_map(|i| {
                let r = i.to_record(&b.lexicon);
                r.premise_tokens.into_iter().chain(r.hypothesis_tokens)
            })
            .collect()
    };
    let seen: BTreeSet<String> = [&b.train, &b.validation, &b.holdout]
        .into_iter()
        .flat_map(|s| tokens(s))
        .collect();
    let jabber = tokens(&b.jabberwocky);
    let n_train = b.config.n_training_blocks as u32;
    let open: BTreeSet<&str> = b
        .lexicon
        .blocks()
        .filter(|blk| blk.id >= n_train)
        .flat_map(|blk| blk.nouns.words().iter().chain(blk.verbs.words()))
        .map(String::as_str)
        .collect();
    assert_eq!(open.len(), 12 * b.config.n_jabberwocky_blocks);
    assert!(open.iter().all(|w| jabber.contains(*w)));
    assert!(open.iter().all(|w| !seen.contains(*w)));
}

#[test]
fn training_covers_all_relations() {
    let b = mini_bundle();
    let rels: BTreeSet<Relation> = b.train.iter().map(|i| i.gold).collect();
    assert_eq!(rels.len(), 7);
}

#[test]
fn validation_is_a_fraction_of_the_pool() {
    let b = mini_bundle();
    let pool = b.train.len() + b.validation.len();
    let expected = (pool as f64 * b.config.validation_fraction).round() as usize;
    assert_eq!(b.validation.len(), expected);
    let mut ids: Vec<&str> = b.train.iter().chain(&b.validation).map(|i| i.item_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), pool);
}

#[test]
fn records_round_trip() {
    let b = mini_bundle();
    for item in b.jabberwocky.iter().take(500) {
        let rec = item.to_record(&b.lexicon);
        assert_eq!(&DatasetItem::from_record(&rec, &b.lexicon).unwrap(), item);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<systematicity::sampler::ItemRecord>(&json).unwrap(), rec);
    }
    let mut bad = b.train[0].to_record(&b.lexicon);
    bad.item_id = "0000000000000000".into();
    assert!(DatasetItem::from_record(&bad, &b.lexicon).is_err());
    let mut moved = b.train[0].to_record(&b.lexicon);
    moved.block_id += 1;
    assert!(DatasetItem::from_record(&moved, &b.lexicon).is_err());
}

#[test]
fn closure_adds_reversals_and_class_changing_edits() {
    let source = pair("all blickets wug", "all blickets move");
    let gold = label_pair(&source, table()).unwrap();
    let item = DatasetItem::new(lexicon(), Split::Jabberwocky, source, gold, Provenance::Original);
    let (closed, stats) = close_for_probes(vec![item], lexicon(), table(), Parallelism::Serial).unwrap();
    let by_pair: HashMap<SentencePair, &DatasetItem> = closed.iter().map(|i| (i.pair(), i)).collect();

    let rev = &by_pair[&source.reversed()];
    assert_eq!(rev.provenance, Provenance::Reversal);
    assert_eq!(rev.gold, gold.converse());
    let edited = &by_pair[&pair("some blickets wug", "all blickets move")];
    assert_eq!(edited.provenance, Provenance::Perturbation);
    assert_ne!(edited.gold, gold);
    assert_eq!(stats.reversals, 1);
    assert_eq!(stats.perturbations + 2, closed.len());
    assert!(closed.iter().skip(2).all(|i| i.gold != gold && i.provenance == Provenance::Perturbation));
}

#[test]
fn closure_is_idempotent() {
    let b = mini_bundle();
    let (again, stats) = close_for_probes(b.jabberwocky.clone(), &b.lexicon, &b.table, Parallelism::Parallel).unwrap();
    assert_eq!(again, b.jabberwocky);
    assert_eq!((stats.reversals, stats.perturbations), (0, 0));
    let unique: HashSet<SentencePair> = b.jabberwocky.iter().map(DatasetItem::pair).collect();
    assert_eq!(unique.len(), b.jabberwocky.len());
    for item in b.jabberwocky.iter().filter(|i| i.provenance == Provenance::Original) {
        assert!(unique.contains(&item.pair().reversed()));
    }
}
