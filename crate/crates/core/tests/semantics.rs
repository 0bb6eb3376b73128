mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use systematicity::language::{ClosedClassInventory, Quantifier, Sentence, SentencePair, Word};
use systematicity::relations::Relation;
use systematicity::semantics::check::random_pair;
use systematicity::semantics::{
    build_table, label_pair, label_pair_oracle, project_relation, ChainMode, OracleOptions, RelationTable,
    SemanticsError, SkeletonSpace,
};

use common::{pair, table};

fn strict() -> OracleOptions {
    OracleOptions {
        chain: ChainMode::Strict,
        ..OracleOptions::default()
    }
}

fn space() -> SkeletonSpace {
    SkeletonSpace::from(&ClosedClassInventory::default())
}

fn distribution(t: &RelationTable) -> BTreeMap<Relation, usize> {
    let mut d = BTreeMap::new();
    for (_, r) in t.entries() {
        *d.entry(*r).or_default() += 1;
    }
    d
}

#[test]
fn stable_across_domain_sizes_and_chain_modes() {
    let base = table();
    let at45 = build_table(&space(), &[4, 5], &OracleOptions::default()).unwrap();
    let strict45 = build_table(&space(), &[4, 5], &strict()).unwrap();
    let labels = |t: &RelationTable| t.entries().map(|(k, v)| (*k, *v)).collect::<Vec<_>>();
    assert_eq!(labels(base), labels(&at45));
    assert_eq!(labels(base), labels(&strict45));
}

#[test]
fn strict_chains_are_unstable_at_domain_three() {
    let err = build_table(&space(), &[3, 4], &strict()).unwrap_err();
    let SemanticsError::Unstable(keys) = err else { panic!("expected instability, got {err}") };
    assert_eq!(keys.len(), 176);
    assert!(keys.contains(&"all.-.-.-/all.-.-.neg/noun=forward/verb=forward/pre=both_absent/post=both_absent [3:reverse,4:alternation]".to_string()));
}

#[test]
fn relation_distribution_is_pinned() {
    let d = distribution(table());
    let expected = [
        (Relation::Equivalence, 64),
        (Relation::Forward, 560),
        (Relation::Reverse, 560),
        (Relation::Negation, 64),
        (Relation::Alternation, 560),
        (Relation::Cover, 560),
        (Relation::Independence, 12_032),
    ];
    assert_eq!(d, expected.into_iter().collect());
    assert_eq!(table().len(), 14_400);
}

#[test]
fn worked_labels() {
    assert_eq!(label_pair(&pair("no blickets wug", "all blickets wug"), table()).unwrap(), Relation::Alternation);
    let s = pair("notall red blickets that bark don't wug", "notall red blickets that bark don't wug");
    assert_eq!(label_pair(&s, table()).unwrap(), Relation::Equivalence);
    let up = pair("some blickets wug", "some blickets move");
    assert_eq!(project_relation(&up), Some(Relation::Forward));
    assert_eq!(label_pair_oracle(&up, 4, &OracleOptions::default()).unwrap(), Relation::Forward);
}

#[test]
fn table_file_round_trip_and_checks() {
    let t = table();
    let json = t.to_json();
    let back = RelationTable::from_json(&json).unwrap();
    assert_eq!(&back, t);
    assert!(back.ensure_config(&space(), ChainMode::Inclusive).is_ok());
    assert!(back.ensure_config(&space(), ChainMode::Strict).is_err());
    let tampered = json.replacen("\"chain\": \"inclusive\"", "\"chain\": \"strict\"", 1);
    assert!(matches!(RelationTable::from_json(&tampered), Err(SemanticsError::TableFormat(_))));
    let mut small = space();
    small.quantifiers = vec![Quantifier::All];
    assert!(back.ensure_config(&small, ChainMode::Inclusive).is_err());
}

#[test]
fn missing_skeleton_is_named() {
    let mut one = space();
    one.quantifiers = vec![Quantifier::All];
    one.premodifiers = 0;
    one.postmodifiers = 0;
    one.negation = false;
    let t = build_table(&one, &[3, 4], &OracleOptions::default()).unwrap();
    let err = label_pair(&pair("some blickets wug", "all blickets wug"), &t).unwrap_err();
    assert!(err.to_string().contains("some.-.-.-/all.-.-.-"), "{err}");
}

fn relabel(s: &Sentence, block: u32, ranks: &[u8; 6]) -> Sentence {
    Sentence {
        noun: Word::new(block, ranks[s.noun.rank as usize]),
        verb: Word::new(block, ranks[s.verb.rank as usize]),
        ..*s
    }
}

fn arb_pair() -> impl Strategy<Value = SentencePair> {
    (any::<u64>(), 0u32..50).prop_map(|(seed, block)| {
        random_pair(&ClosedClassInventory::default(), block, &mut ChaCha8Rng::seed_from_u64(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn converse_law(p in arb_pair()) {
        let fwd = label_pair(&p, table()).unwrap();
        let rev = label_pair(&p.reversed(), table()).unwrap();
        prop_assert_eq!(rev, fwd.converse());
        prop_assert_eq!(label_pair_oracle(&p.reversed(), 3, &OracleOptions::default()).unwrap(), fwd.converse());
    }

    #[test]
    fn projection_is_sound(p in arb_pair(), same_frame in any::<bool>()) {
        let p = if same_frame {
            let h = Sentence { noun: p.hypothesis.noun, verb: p.hypothesis.verb, ..p.premise };
            SentencePair::new(p.premise, h)
        } else {
            p
        };
        if let Some(r) = project_relation(&p) {
            prop_assert_eq!(r, label_pair(&p, table()).unwrap());
            prop_assert_eq!(r, label_pair_oracle(&p, 4, &OracleOptions::default()).unwrap());
        }
    }

    #[test]
    fn open_class_words_are_interchangeable(p in arb_pair(), block in 50u32..1000) {
        let identity = [0, 1, 2, 3, 4, 5];
        let moved = SentencePair::new(relabel(&p.premise, block, &identity), relabel(&p.hypothesis, block, &identity));
        let opts = OracleOptions::default();
        prop_assert_eq!(label_pair_oracle(&moved, 3, &opts).unwrap(), label_pair_oracle(&p, 3, &opts).unwrap());
        prop_assert_eq!(label_pair(&moved, table()).unwrap(), label_pair(&p, table()).unwrap());
    }

    #[test]
    fn taxonomy_distance_does_not_matter(p in arb_pair(), gaps in proptest::array::uniform6(0u8..3)) {
        // an order-preserving respacing of the six ranks
        let mut ranks = [0u8; 6];
        let mut next = 0u8;
        for (i, g) in gaps.iter().enumerate() {
            next += g + u8::from(i > 0);
            ranks[i] = next;
        }
        let b = p.block();
        let spaced = SentencePair::new(relabel(&p.premise, b, &ranks), relabel(&p.hypothesis, b, &ranks));
        let opts = OracleOptions::default();
        prop_assert_eq!(label_pair_oracle(&spaced, 4, &opts).unwrap(), label_pair_oracle(&p, 4, &opts).unwrap());
    }
}
