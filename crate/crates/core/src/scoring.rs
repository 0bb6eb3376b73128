//! Per-block accuracy and mean/sd aggregates across blocks.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::probes::{PerturbationType, ProbeItem, ProbeRecord};
use crate::relations::Relation;
use crate::sampler::{DatasetItem, ItemRecord};

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("{} prediction(s) reference unknown items: {}", .0.len(), preview(.0))]
    UnknownItems(Vec<String>),
    #[error("unknown grouping '{0}' (expected overall, by_relation or by_perturbation_type)")]
    UnknownGrouping(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn preview(ids: &[String]) -> String {
    let mut s = ids.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > 10 {
        s.push_str(", ...");
    }
    s
}

pub const OVERALL: &str = "overall";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    Overall,
    ByRelation,
    ByPerturbationType,
}

impl FromStr for Grouping {
    type Err = ScoringError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "overall" => Ok(Grouping::Overall),
            "by_relation" => Ok(Grouping::ByRelation),
            "by_perturbation_type" => Ok(Grouping::ByPerturbationType),
            _ => Err(ScoringError::UnknownGrouping(s.to_string())),
        }
    }
}

/// What scoring needs to know about one item.
///
/// `relation` is the relation an item is reported under: its gold label for
/// dataset items and the source item's gold label for probe items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreItem {
    pub item_id: String,
    pub block_id: u32,
    pub gold: Relation,
    pub relation: Relation,
    pub perturbation: Option<PerturbationType>,
}

impl From<&DatasetItem> for ScoreItem {
    fn from(i: &DatasetItem) -> Self {
        Self {
            item_id: i.item_id.clone(),
            block_id: i.block_id,
            gold: i.gold,
            relation: i.gold,
            perturbation: None,
        }
    }
}

impl From<&ItemRecord> for ScoreItem {
    fn from(r: &ItemRecord) -> Self {
        Self {
            item_id: r.item_id.clone(),
            block_id: r.block_id,
            gold: r.gold,
            relation: r.gold,
            perturbation: None,
        }
    }
}

impl From<&ProbeItem> for ScoreItem {
    fn from(p: &ProbeItem) -> Self {
        Self {
            item_id: p.target_item_id.clone(),
            block_id: p.block_id,
            gold: p.target_gold,
            relation: p.source_gold,
            perturbation: p.perturbation_type.clone(),
        }
    }
}

impl From<&ProbeRecord> for ScoreItem {
    fn from(r: &ProbeRecord) -> Self {
        Self::from(&ProbeItem::from(r))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockScore {
    pub block_id: u32,
    pub group_key: String,
    pub n_items: usize,
    pub n_correct: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateScore {
    pub group_key: String,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub n_blocks: usize,
}

/// Items seen against items that had a prediction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub n_items: usize,
    pub n_scored: usize,
}

impl Coverage {
    pub fn missing(&self) -> usize {
        self.n_items - self.n_scored
    }

    pub fn fraction(&self) -> f64 {
        if self.n_items == 0 {
            1.0
        } else {
            self.n_scored as f64 / self.n_items as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreReport {
    pub blocks: Vec<BlockScore>,
    pub aggregates: Vec<AggregateScore>,
    pub coverage: Coverage,
    /// Perturbation types seen, keyed by their group key.
    pub perturbation_types: BTreeMap<String, PerturbationType>,
}

/// Mean and sample standard deviation; the sd of a single value is 0.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Unweighted mean and sample sd of block accuracies, per group.
pub fn aggregate(blocks: &[BlockScore]) -> Vec<AggregateScore> {
    let mut by_group: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for b in blocks {
        by_group.entry(&b.group_key).or_default().push(b.accuracy);
    }
    by_group
        .into_iter()
        .map(|(key, accs)| {
            let (mean, sd) = mean_sd(&accs);
            AggregateScore {
                group_key: key.to_string(),
                mean_accuracy: mean,
                sd_accuracy: sd,
                n_blocks: accs.len(),
            }
        })
        .collect()
}

fn group_key(item: &ScoreItem, grouping: Grouping) -> String {
    match grouping {
        Grouping::Overall => OVERALL.to_string(),
        Grouping::ByRelation => item.relation.name().to_string(),
        Grouping::ByPerturbationType => item
            .perturbation
            .as_ref()
            .map_or_else(|| "none".to_string(), PerturbationType::key),
    }
}

#[derive(Default)]
struct Tally {
    n_items: usize,
    n_correct: usize,
}

fn finish(tallies: BTreeMap<(String, u32), Tally>, coverage: Coverage) -> ScoreReport {
    let mut blocks = Vec::new();
    for ((group_key, block_id), t) in tallies {
        if t.n_items == 0 {
            log::warn!("group {group_key} in block {block_id} has no scored items; dropped");
            continue;
        }
        blocks.push(BlockScore {
            block_id,
            group_key,
            n_items: t.n_items,
            n_correct: t.n_correct,
            accuracy: t.n_correct as f64 / t.n_items as f64,
        });
    }
    let aggregates = aggregate(&blocks);
    ScoreReport {
        blocks,
        aggregates,
        coverage,
        perturbation_types: BTreeMap::new(),
    }
}

/// Accuracy of `predictions` on `items`, per block and group.
///
/// Every prediction must name a known item. Items without a prediction are
/// left out and counted in the coverage.
pub fn score(
    items: &[ScoreItem],
    predictions: &HashMap<String, Relation>,
    grouping: Grouping,
) -> Result<ScoreReport, ScoringError> {
    let known: std::collections::HashSet<&str> = items.iter().map(|i| i.item_id.as_str()).collect();
    let mut unknown: Vec<String> = predictions
        .keys()
        .filter(|id| !known.contains(id.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        unknown.sort();
        return Err(ScoringError::UnknownItems(unknown));
    }

    let mut coverage = Coverage::default();
    let mut tallies: BTreeMap<(String, u32), Tally> = BTreeMap::new();
    let mut types = BTreeMap::new();
    for item in items {
        coverage.n_items += 1;
        let key = group_key(item, grouping);
        if let (Grouping::ByPerturbationType, Some(t)) = (grouping, &item.perturbation) {
            types.entry(key.clone()).or_insert_with(|| t.clone());
        }
        let tally = tallies.entry((key, item.block_id)).or_default();
        if let Some(&p) = predictions.get(&item.item_id) {
            coverage.n_scored += 1;
            tally.n_items += 1;
            tally.n_correct += usize::from(p == item.gold);
        }
    }
    let mut report = finish(tallies, coverage);
    report.perturbation_types = types;
    Ok(report)
}

/// P(target correct | source correct) per block, grouped by source relation
/// under `Grouping::ByRelation`.
///
/// A probe item counts when its source is correct in `first_pass` and its
/// target has a prediction in `second_pass`; the rest are coverage misses.
pub fn consistency_rate(
    probe_items: &[ProbeItem],
    first_pass: &HashMap<String, Relation>,
    second_pass: &HashMap<String, Relation>,
    grouping: Grouping,
) -> ScoreReport {
    let mut coverage = Coverage::default();
    let mut tallies: BTreeMap<(String, u32), Tally> = BTreeMap::new();
    for p in probe_items {
        coverage.n_items += 1;
        let tally = tallies
            .entry((group_key(&ScoreItem::from(p), grouping), p.block_id))
            .or_default();
        let source_ok = first_pass.get(&p.source_item_id) == Some(&p.source_gold);
        let Some(&target) = second_pass.get(&p.target_item_id) else { continue };
        if !source_ok {
            continue;
        }
        coverage.n_scored += 1;
        tally.n_items += 1;
        tally.n_correct += usize::from(target == p.target_gold);
    }
    finish(tallies, coverage)
}

pub fn write_block_csv<W: io::Write>(blocks: &[BlockScore], out: W) -> Result<(), ScoringError> {
    let mut w = csv::Writer::from_writer(out);
    for b in blocks {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: io::Write>(aggregates: &[AggregateScore], out: W) -> Result<(), ScoringError> {
    let mut w = csv::Writer::from_writer(out);
    for a in aggregates {
        w.serialize(a)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FigureRow<'a> {
    group_key: &'a str,
    side: &'a str,
    word_before: &'a str,
    word_after: &'a str,
    relation_before: &'a str,
    relation_after: &'a str,
    mean_accuracy: f64,
    sd_accuracy: f64,
    n_blocks: usize,
}

/// One row per perturbation type: its fields and the mean and sd of block
/// accuracy, ready for a mean-vs-sd scatter plot.
pub fn write_figure_csv<W: io::Write>(report: &ScoreReport, out: W) -> Result<(), ScoringError> {
    let mut w = csv::Writer::from_writer(out);
    for a in &report.aggregates {
        let Some(t) = report.perturbation_types.get(&a.group_key) else { continue };
        w.serialize(FigureRow {
            group_key: &a.group_key,
            side: t.side.name(),
            word_before: &t.word_before,
            word_after: &t.word_after,
            relation_before: t.relation_before.name(),
            relation_after: t.relation_after.name(),
            mean_accuracy: a.mean_accuracy,
            sd_accuracy: a.sd_accuracy,
            n_blocks: a.n_blocks,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned text table of `mean ± sd` in percent, two decimals.
pub fn format_table(title: &str, aggregates: &[AggregateScore]) -> String {
    let rows: Vec<(String, String, String)> = aggregates
        .iter()
        .map(|a| {
            (
                a.group_key.clone(),
                format!("{:.2} ± {:.2}", 100.0 * a.mean_accuracy, 100.0 * a.sd_accuracy),
                a.n_blocks.to_string(),
            )
        })
        .collect();
    let header = ("group", "accuracy", "blocks");
    let w0 = rows.iter().map(|r| r.0.chars().count()).chain([header.0.len()]).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.chars().count()).chain([header.1.len()]).max().unwrap_or(0);
    let w2 = rows.iter().map(|r| r.2.len()).chain([header.2.len()]).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "{:<w0$}  {:>w1$}  {:>w2$}", header.0, header.1, header.2);
    let _ = writeln!(s, "{}", "-".repeat(w0 + w1 + w2 + 4));
    for (g, acc, n) in rows {
        let _ = writeln!(s, "{g:<w0$}  {acc:>w1$}  {n:>w2$}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, block: u32, gold: Relation) -> ScoreItem {
        ScoreItem {
            item_id: id.into(),
            block_id: block,
            gold,
            relation: gold,
            perturbation: None,
        }
    }

    #[test]
    fn mean_sd_is_sample_sd() {
        let (m, sd) = mean_sd(&[0.5, 1.0]);
        assert_eq!(m, 0.75);
        // sqrt(((0.25)^2 * 2) / 1)
        assert!((sd - 0.125f64.sqrt()).abs() < 1e-12);
        assert_eq!(mean_sd(&[0.3]), (0.3, 0.0));
    }

    #[test]
    fn per_block_then_across_blocks() {
        let items = vec![
            item("a", 0, Relation::Forward),
            item("b", 0, Relation::Reverse),
            item("c", 1, Relation::Forward),
            item("d", 1, Relation::Cover),
        ];
        let preds: HashMap<String, Relation> = [("a", Relation::Forward), ("b", Relation::Forward), ("c", Relation::Forward)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let r = score(&items, &preds, Grouping::Overall).unwrap();
        assert_eq!(r.coverage, Coverage { n_items: 4, n_scored: 3 });
        assert_eq!(r.blocks.len(), 2);
        assert_eq!(r.blocks[0].accuracy, 0.5);
        assert_eq!(r.blocks[1].accuracy, 1.0);
        assert_eq!(r.aggregates[0].mean_accuracy, 0.75);

        let r = score(&items, &preds, Grouping::ByRelation).unwrap();
        // cover in block 1 has no prediction and is dropped
        assert!(r.blocks.iter().all(|b| b.group_key != "cover"));
        let keys: Vec<_> = r.aggregates.iter().map(|a| a.group_key.as_str()).collect();
        assert_eq!(keys, ["forward", "reverse"]);
    }

    #[test]
    fn unknown_prediction_ids_fail_the_join() {
        let items = vec![item("a", 0, Relation::Forward)];
        let preds: HashMap<String, Relation> = [("zz".to_string(), Relation::Forward)].into();
        let err = score(&items, &preds, Grouping::Overall).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn table_formatting() {
        let t = format_table(
            "holdout",
            &[AggregateScore {
                group_key: "overall".into(),
                mean_accuracy: 0.951,
                sd_accuracy: 0.0021,
                n_blocks: 20,
            }],
        );
        assert!(t.contains("95.10 ± 0.21"), "{t}");
        assert!(t.starts_with("holdout\n"));
    }

    #[test]
    fn grouping_names() {
        assert_eq!("by_relation".parse::<Grouping>().unwrap(), Grouping::ByRelation);
        assert!("relation".parse::<Grouping>().is_err());
    }
}
