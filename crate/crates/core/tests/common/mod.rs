#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::OnceLock;

use systematicity::language::{example_lexicon, Lexicon, Sentence, SentencePair};
use systematicity::relations::Relation;
use systematicity::sampler::{generate_condition, Condition, DatasetBundle, GenerationConfig, Parallelism};
use systematicity::semantics::{build_table, OracleOptions, RelationTable};

pub fn mini_config() -> GenerationConfig {
    GenerationConfig::preset(Condition::Mini, 7)
}

/// Default-space table built at domain sizes {3, 4}.
pub fn table() -> &'static RelationTable {
    static TABLE: OnceLock<RelationTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let c = mini_config();
        build_table(&c.skeleton_space(), &c.domain_sizes, &OracleOptions::default()).unwrap()
    })
}

/// The mini condition at seed 7.
pub fn mini_bundle() -> &'static DatasetBundle {
    static BUNDLE: OnceLock<DatasetBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| generate_condition(&mini_config(), Some(table().clone()), Parallelism::Parallel).unwrap())
}

pub fn lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(example_lexicon)
}

/// Parses a sentence of the example lexicon (blickets, wug, ...).
pub fn sentence(text: &str) -> Sentence {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    lexicon().parse(&tokens).unwrap()
}

pub fn pair(premise: &str, hypothesis: &str) -> SentencePair {
    SentencePair::new(sentence(premise), sentence(hypothesis))
}

/// Closed-class slots in which two sentences differ, plus whether their
/// open-class words differ.
pub fn slot_differences(a: &Sentence, b: &Sentence) -> (usize, bool) {
    let closed = usize::from(a.quantifier != b.quantifier)
        + usize::from(a.premodifier != b.premodifier)
        + usize::from(a.postmodifier != b.postmodifier)
        + usize::from(a.negated != b.negated);
    (closed, a.noun != b.noun || a.verb != b.verb)
}

pub fn gold_map<'a>(pairs: impl IntoIterator<Item = (&'a str, Relation)>) -> HashMap<String, Relation> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
