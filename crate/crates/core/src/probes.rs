//! The three systematicity probes over jabberwocky items: closed-class
//! perturbation, identical open-class words, and order consistency.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::language::{Lexicon, SentencePair, Slot};
use crate::relations::Relation;
use crate::sampler::{single_edit_pairs, DatasetItem, Provenance};
use crate::semantics::{label_pair, RelationTable, SemanticsError};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("{probe} target of item {source_id} is not in the dataset ({target}); run the probe closure when generating")]
    MissingTarget {
        probe: ProbeKind,
        source_id: String,
        target: String,
    },
    #[error("item {item_id} has conflicting predictions {first} and {second}")]
    ConflictingPrediction {
        item_id: String,
        first: Relation,
        second: Relation,
    },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// One line of a predictions file. Extra fields are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub item_id: String,
    pub predicted: Relation,
    #[serde(default)]
    pub model_id: String,
}

/// Predictions keyed by item id; repeated ids must agree.
pub fn prediction_map<'a>(
    records: impl IntoIterator<Item = &'a PredictionRecord>,
) -> Result<HashMap<String, Relation>, ProbeError> {
    let mut map = HashMap::new();
    for r in records {
        if let Some(&first) = map.get(&r.item_id) {
            if first != r.predicted {
                return Err(ProbeError::ConflictingPrediction {
                    item_id: r.item_id.clone(),
                    first,
                    second: r.predicted,
                });
            }
        }
        map.insert(r.item_id.clone(), r.predicted);
    }
    Ok(map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Perturbation,
    IdenticalOpenClass,
    Consistency,
}

impl ProbeKind {
    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::Perturbation => "perturbation",
            ProbeKind::IdenticalOpenClass => "identical_open_class",
            ProbeKind::Consistency => "consistency",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Premise,
    Hypothesis,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Premise => "premise",
            Side::Hypothesis => "hypothesis",
        }
    }
}

/// A class of single closed-class edits: where, which words, and the gold
/// relation before and after.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PerturbationType {
    pub side: Side,
    pub slot: Slot,
    pub word_before: String,
    pub word_after: String,
    pub relation_before: Relation,
    pub relation_after: Relation,
}

impl PerturbationType {
    /// `side:slot:before>after:relation_before>relation_after`.
    pub fn key(&self) -> String {
        let slot = match self.slot {
            Slot::Quantifier => "quantifier",
            Slot::Premodifier => "premodifier",
            Slot::Postmodifier => "postmodifier",
            Slot::Negation => "negation",
        };
        format!(
            "{}:{slot}:{}>{}:{}>{}",
            self.side.name(),
            self.word_before,
            self.word_after,
            self.relation_before,
            self.relation_after
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeItem {
    pub probe: ProbeKind,
    pub source_item_id: String,
    pub target_item_id: String,
    pub block_id: u32,
    pub source_gold: Relation,
    pub target_gold: Relation,
    pub perturbation_type: Option<PerturbationType>,
}

/// One JSONL line of a probe file. `item_id`, the tokens and `gold` describe
/// the target, so the file can be fed to a model like a split file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe: ProbeKind,
    pub item_id: String,
    pub source_item_id: String,
    pub block_id: u32,
    pub premise_tokens: Vec<String>,
    pub hypothesis_tokens: Vec<String>,
    pub gold: Relation,
    pub source_gold: Relation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_type: Option<PerturbationType>,
}

impl ProbeItem {
    pub fn to_record(&self, target: &DatasetItem, lexicon: &Lexicon) -> ProbeRecord {
        let rec = target.to_record(lexicon);
        ProbeRecord {
            probe: self.probe,
            item_id: self.target_item_id.clone(),
            source_item_id: self.source_item_id.clone(),
            block_id: self.block_id,
            premise_tokens: rec.premise_tokens,
            hypothesis_tokens: rec.hypothesis_tokens,
            gold: self.target_gold,
            source_gold: self.source_gold,
            perturbation_type: self.perturbation_type.clone(),
        }
    }
}

impl From<&ProbeRecord> for ProbeItem {
    fn from(r: &ProbeRecord) -> Self {
        Self {
            probe: r.probe,
            source_item_id: r.source_item_id.clone(),
            target_item_id: r.item_id.clone(),
            block_id: r.block_id,
            source_gold: r.source_gold,
            target_gold: r.gold,
            perturbation_type: r.perturbation_type.clone(),
        }
    }
}

/// How many candidate sources had a first-pass prediction, and how many of
/// those were correct.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCoverage {
    pub sources: usize,
    pub predicted: usize,
    pub correct: usize,
}

impl ProbeCoverage {
    pub fn missing(&self) -> usize {
        self.sources - self.predicted
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProbeSet {
    pub items: Vec<ProbeItem>,
    pub coverage: ProbeCoverage,
}

fn index(items: &[DatasetItem]) -> HashMap<SentencePair, &DatasetItem> {
    items.iter().map(|i| (i.pair(), i)).collect()
}

/// Original items whose first-pass prediction is correct. Items without a
/// prediction are skipped and counted as missing.
fn correct_sources<'a>(
    items: &'a [DatasetItem],
    predictions: &HashMap<String, Relation>,
    coverage: &mut ProbeCoverage,
) -> Vec<&'a DatasetItem> {
    let mut out = Vec::new();
    for item in items.iter().filter(|i| i.provenance == Provenance::Original) {
        coverage.sources += 1;
        let Some(&p) = predictions.get(&item.item_id) else { continue };
        coverage.predicted += 1;
        if p == item.gold {
            coverage.correct += 1;
            out.push(item);
        }
    }
    out
}

/// For each correctly classified original item, one probe item per single
/// closed-class edit (one slot, one side) that changes the gold class.
pub fn build_perturbation_probe(
    items: &[DatasetItem],
    lexicon: &Lexicon,
    table: &RelationTable,
    predictions: &HashMap<String, Relation>,
) -> Result<ProbeSet, ProbeError> {
    let by_pair = index(items);
    let inv = lexicon.inventory();
    let mut set = ProbeSet::default();
    for source in correct_sources(items, predictions, &mut set.coverage) {
        let pair = source.pair();
        for (side, slot, edited) in single_edit_pairs(inv, &pair) {
            let gold = label_pair(&edited, table)?;
            if gold == source.gold {
                continue;
            }
            let target = by_pair.get(&edited).ok_or_else(|| ProbeError::MissingTarget {
                probe: ProbeKind::Perturbation,
                source_id: source.item_id.clone(),
                target: format!(
                    "{} / {}",
                    lexicon.render_string(&edited.premise),
                    lexicon.render_string(&edited.hypothesis)
                ),
            })?;
            let (before, after) = match side {
                Side::Premise => (&pair.premise, &edited.premise),
                Side::Hypothesis => (&pair.hypothesis, &edited.hypothesis),
            };
            set.items.push(ProbeItem {
                probe: ProbeKind::Perturbation,
                source_item_id: source.item_id.clone(),
                target_item_id: target.item_id.clone(),
                block_id: source.block_id,
                source_gold: source.gold,
                target_gold: target.gold,
                perturbation_type: Some(PerturbationType {
                    side,
                    slot,
                    word_before: inv.slot_word(before, slot).to_string(),
                    word_after: inv.slot_word(after, slot).to_string(),
                    relation_before: source.gold,
                    relation_after: target.gold,
                }),
            });
        }
    }
    Ok(set)
}

/// Items whose premise and hypothesis share both noun and verb.
pub fn build_identical_open_class_probe(items: &[DatasetItem]) -> ProbeSet {
    let items = items
        .iter()
        .filter(|i| i.premise.noun == i.hypothesis.noun && i.premise.verb == i.hypothesis.verb)
        .map(|i| ProbeItem {
            probe: ProbeKind::IdenticalOpenClass,
            source_item_id: i.item_id.clone(),
            target_item_id: i.item_id.clone(),
            block_id: i.block_id,
            source_gold: i.gold,
            target_gold: i.gold,
            perturbation_type: None,
        })
        .collect::<Vec<_>>();
    let n = items.len();
    ProbeSet {
        items,
        coverage: ProbeCoverage {
            sources: n,
            predicted: n,
            correct: n,
        },
    }
}

/// For each correctly classified original item, its reversed-order pair.
pub fn build_consistency_probe(
    items: &[DatasetItem],
    lexicon: &Lexicon,
    predictions: &HashMap<String, Relation>,
) -> Result<ProbeSet, ProbeError> {
    let by_pair = index(items);
    let mut set = ProbeSet::default();
    for source in correct_sources(items, predictions, &mut set.coverage) {
        let reversed = source.pair().reversed();
        let target = by_pair.get(&reversed).ok_or_else(|| ProbeError::MissingTarget {
            probe: ProbeKind::Consistency,
            source_id: source.item_id.clone(),
            target: format!(
                "{} / {}",
                lexicon.render_string(&reversed.premise),
                lexicon.render_string(&reversed.hypothesis)
            ),
        })?;
        set.items.push(ProbeItem {
            probe: ProbeKind::Consistency,
            source_item_id: source.item_id.clone(),
            target_item_id: target.item_id.clone(),
            block_id: source.block_id,
            source_gold: source.gold,
            target_gold: target.gold,
            perturbation_type: None,
        });
    }
    Ok(set)
}

/// Gold labels as predictions, for self-tests of the probe pipeline.
pub fn gold_predictions(items: &[DatasetItem]) -> HashMap<String, Relation> {
    items.iter().map(|i| (i.item_id.clone(), i.gold)).collect()
}
