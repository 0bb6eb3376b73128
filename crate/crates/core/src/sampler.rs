//! Dataset generation: training, holdout and jabberwocky blocks, the
//! validation split, and closure of the jabberwocky set under the probe edits.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::language::{
    build_block, Block, BlockRole, ClosedClassInventory, Gensym, LanguageError, Lexicon, Sentence,
    SentencePair, TAXONOMY_SIZE,
};
use crate::relations::Relation;
use crate::semantics::world::MAX_DOMAIN;
use crate::semantics::{
    build_table, label_pair, ChainMode, OracleOptions, RelationTable, SemanticsError, SkeletonSpace,
};

/// Ordered open-class tuples per block: ⟨noun1, noun2, verb1, verb2⟩.
pub const TUPLES_PER_BLOCK: usize = TAXONOMY_SIZE.pow(4);

/// Resampling attempts before a colliding draw is skipped.
pub const MAX_RETRIES: usize = 64;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid config: {field}: {message}")]
    Config { field: &'static str, message: String },
    #[error("block {block}: {requested} pairs requested for one open-class tuple, only {available} distinct fillings exist")]
    Exhausted {
        block: u32,
        requested: usize,
        available: usize,
    },
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn config_error(field: &'static str, message: impl Into<String>) -> SamplerError {
    SamplerError::Config {
        field,
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Mini,
    Small,
    Large,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub condition: Condition,
    pub n_training_blocks: usize,
    pub n_jabberwocky_blocks: usize,
    pub pairs_per_open_class_combo: usize,
    pub validation_fraction: f64,
    pub seed: u64,
    pub holdout_size_per_block: usize,
    pub domain_sizes: Vec<usize>,
    #[serde(default)]
    pub chain: ChainMode,
    #[serde(default)]
    pub inventory: ClosedClassInventory,
}

impl GenerationConfig {
    /// Built-in settings for a named condition. `Custom` starts from the
    /// small condition's values.
    pub fn preset(condition: Condition, seed: u64) -> Self {
        let (train, jabberwocky, pairs) = match condition {
            Condition::Mini => (4, 2, 1),
            Condition::Small | Condition::Custom => (20, 20, 2),
            Condition::Large => (185, 20, 2),
        };
        Self {
            condition,
            n_training_blocks: train,
            n_jabberwocky_blocks: jabberwocky,
            pairs_per_open_class_combo: pairs,
            validation_fraction: 0.2,
            seed,
            holdout_size_per_block: TUPLES_PER_BLOCK,
            domain_sizes: vec![3, 4],
            chain: ChainMode::default(),
            inventory: ClosedClassInventory::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let positive = [
            ("n_training_blocks", self.n_training_blocks),
            ("n_jabberwocky_blocks", self.n_jabberwocky_blocks),
            ("pairs_per_open_class_combo", self.pairs_per_open_class_combo),
            ("holdout_size_per_block", self.holdout_size_per_block),
        ];
        for (field, n) in positive {
            if n == 0 {
                return Err(config_error(field, "must be positive"));
            }
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(config_error(
                "validation_fraction",
                format!("{} is not in (0, 1)", self.validation_fraction),
            ));
        }
        if self.domain_sizes.len() < 2 {
            return Err(config_error("domain_sizes", "needs at least 2 entries"));
        }
        if let Some(d) = self.domain_sizes.iter().find(|&&d| !(3..=MAX_DOMAIN).contains(&d)) {
            return Err(config_error("domain_sizes", format!("{d} is outside 3..={MAX_DOMAIN}")));
        }
        self.inventory
            .validate()
            .map_err(|e| config_error("inventory", e.to_string()))?;
        let fillings = self.pair_fillings();
        if self.pairs_per_open_class_combo > fillings {
            return Err(config_error(
                "pairs_per_open_class_combo",
                format!("{} exceeds the {fillings} distinct fillings per tuple", self.pairs_per_open_class_combo),
            ));
        }
        let blocks = self.n_training_blocks + self.n_jabberwocky_blocks;
        if u32::try_from(blocks).is_err() {
            return Err(config_error("n_training_blocks", "too many blocks"));
        }
        Ok(())
    }

    /// Distinct closed-class fillings of a pair for one open-class tuple.
    pub fn pair_fillings(&self) -> usize {
        self.inventory.frame_count().pow(2)
    }

    pub fn skeleton_space(&self) -> SkeletonSpace {
        SkeletonSpace::from(&self.inventory)
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            chain: self.chain,
            ..OracleOptions::default()
        }
    }

    /// Item counts the config implies when no draw is skipped.
    pub fn planned_counts(&self) -> PlannedCounts {
        let per_block = TUPLES_PER_BLOCK * self.pairs_per_open_class_combo;
        let pool = self.n_training_blocks * per_block;
        let validation = validation_count(pool, self.validation_fraction);
        PlannedCounts {
            train: pool - validation,
            validation,
            holdout: self.n_training_blocks * self.holdout_size_per_block,
            jabberwocky_original: self.n_jabberwocky_blocks * per_block,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedCounts {
    pub train: usize,
    pub validation: usize,
    pub holdout: usize,
    pub jabberwocky_original: usize,
}

fn validation_count(pool: usize, fraction: f64) -> usize {
    ((pool as f64) * fraction).round() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Holdout,
    Jabberwocky,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Validation, Split::Holdout, Split::Jabberwocky];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Holdout => "holdout",
            Split::Jabberwocky => "jabberwocky",
        }
    }
}

/// Whether an item was sampled or added by [`close_for_probes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    Reversal,
    Perturbation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetItem {
    pub item_id: String,
    pub block_id: u32,
    pub split: Split,
    pub premise: Sentence,
    pub hypothesis: Sentence,
    pub gold: Relation,
    pub provenance: Provenance,
}

/// One JSONL line of a split file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub item_id: String,
    pub block_id: u32,
    pub split: Split,
    pub premise_tokens: Vec<String>,
    pub hypothesis_tokens: Vec<String>,
    pub gold: Relation,
    pub provenance: Provenance,
}

/// Content hash of a rendered pair: first 16 hex digits of
/// SHA-256 over `premise|hypothesis|block`.
pub fn item_id(premise: &str, hypothesis: &str, block: u32) -> String {
    let digest = Sha256::digest(format!("{premise}|{hypothesis}|{block}").as_bytes());
    hex::encode(&digest[..8])
}

impl DatasetItem {
    pub fn new(
        lexicon: &Lexicon,
        split: Split,
        pair: SentencePair,
        gold: Relation,
        provenance: Provenance,
    ) -> Self {
        let block_id = pair.block();
        let id = item_id(
            &lexicon.render_string(&pair.premise),
            &lexicon.render_string(&pair.hypothesis),
            block_id,
        );
        Self {
            item_id: id,
            block_id,
            split,
            premise: pair.premise,
            hypothesis: pair.hypothesis,
            gold,
            provenance,
        }
    }

    pub fn pair(&self) -> SentencePair {
        SentencePair::new(self.premise, self.hypothesis)
    }

    pub fn to_record(&self, lexicon: &Lexicon) -> ItemRecord {
        let tokens = |s: &Sentence| lexicon.render(s).into_iter().map(String::from).collect();
        ItemRecord {
            item_id: self.item_id.clone(),
            block_id: self.block_id,
            split: self.split,
            premise_tokens: tokens(&self.premise),
            hypothesis_tokens: tokens(&self.hypothesis),
            gold: self.gold,
            provenance: self.provenance,
        }
    }

    /// Parses the tokens back into sentences; the id and block must match
    /// the content.
    pub fn from_record(record: &ItemRecord, lexicon: &Lexicon) -> Result<Self, LanguageError> {
        let pair = SentencePair::new(
            lexicon.parse(&record.premise_tokens)?,
            lexicon.parse(&record.hypothesis_tokens)?,
        );
        if !pair.is_single_block() || pair.block() != record.block_id {
            return Err(LanguageError::InvalidSentence(format!(
                "item {} does not lie in block {}",
                record.item_id, record.block_id
            )));
        }
        let item = Self::new(lexicon, record.split, pair, record.gold, record.provenance);
        if item.item_id != record.item_id {
            return Err(LanguageError::InvalidSentence(format!(
                "item id {} does not match its content (expected {})",
                record.item_id, item.item_id
            )));
        }
        Ok(item)
    }
}

/// Seed for the stream `name` of entity `id`, derived from the master seed.
pub fn child_seed(master: u64, name: &str, id: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(name.as_bytes());
    h.update([0]);
    h.update(id.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn child_rng(master: u64, name: &str, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, name, id))
}

/// All ⟨noun1, noun2, verb1, verb2⟩ rank tuples in lexicographic order.
pub fn open_class_tuples() -> impl Iterator<Item = [u8; 4]> {
    let n = TAXONOMY_SIZE as u8;
    (0..n).flat_map(move |a| {
        (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |d| [a, b, c, d])))
    })
}

/// Fills the closed-class slots of a sentence uniformly at random.
pub fn random_frame<R: Rng>(
    inv: &ClosedClassInventory,
    rng: &mut R,
    noun: crate::language::Word,
    verb: crate::language::Word,
) -> Sentence {
    let quantifier = *inv.quantifiers.choose(rng).expect("non-empty quantifiers");
    let optional = |rng: &mut R, n: usize| {
        let k = rng.gen_range(0..=n);
        (k > 0).then(|| (k - 1) as u8)
    };
    let premodifier = optional(rng, inv.premodifiers.len());
    let postmodifier = optional(rng, inv.postmodifiers.len());
    Sentence {
        quantifier,
        premodifier,
        noun,
        postmodifier,
        negated: rng.gen_bool(0.5),
        verb,
    }
}

/// Sampled pairs for one block together with the number of draws skipped
/// after [`MAX_RETRIES`] collisions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockSample {
    pub pairs: Vec<SentencePair>,
    pub skipped: usize,
}

/// Draws `per_tuple[i]` pairs for tuple `i`, avoiding every pair in `seen`
/// and adding each accepted pair to it.
fn sample_pairs<R: Rng>(
    block: &Block,
    inv: &ClosedClassInventory,
    per_tuple: impl Fn(usize) -> usize,
    seen: &mut HashSet<SentencePair>,
    rng: &mut R,
) -> BlockSample {
    let mut out = BlockSample::default();
    for (i, [n1, n2, v1, v2]) in open_class_tuples().enumerate() {
        for _ in 0..per_tuple(i) {
            let drawn = (0..=MAX_RETRIES).find_map(|_| {
                let pair = SentencePair::new(
                    random_frame(inv, rng, block.noun(n1), block.verb(v1)),
                    random_frame(inv, rng, block.noun(n2), block.verb(v2)),
                );
                seen.insert(pair).then_some(pair)
            });
            match drawn {
                Some(pair) => out.pairs.push(pair),
                None => out.skipped += 1,
            }
        }
    }
    out
}

fn check_capacity(block: &Block, config: &GenerationConfig, per_tuple: usize) -> Result<(), SamplerError> {
    let available = config.pair_fillings();
    if per_tuple > available {
        return Err(SamplerError::Exhausted {
            block: block.id,
            requested: per_tuple,
            available,
        });
    }
    Ok(())
}

/// `pairs_per_open_class_combo` distinct pairs for every open-class tuple of
/// `block`, labeled through `table`.
pub fn sample_block_items<R: Rng>(
    block: &Block,
    lexicon: &Lexicon,
    table: &RelationTable,
    config: &GenerationConfig,
    split: Split,
    rng: &mut R,
) -> Result<(Vec<DatasetItem>, usize), SamplerError> {
    let per_tuple = config.pairs_per_open_class_combo;
    check_capacity(block, config, per_tuple)?;
    let mut seen = HashSet::new();
    let sample = sample_pairs(block, &config.inventory, |_| per_tuple, &mut seen, rng);
    let items = label_all(lexicon, table, split, Provenance::Original, sample.pairs)?;
    Ok((items, sample.skipped))
}

fn label_all(
    lexicon: &Lexicon,
    table: &RelationTable,
    split: Split,
    provenance: Provenance,
    pairs: Vec<SentencePair>,
) -> Result<Vec<DatasetItem>, SamplerError> {
    pairs
        .into_iter()
        .map(|p| Ok(DatasetItem::new(lexicon, split, p, label_pair(&p, table)?, provenance)))
        .collect()
}

struct TrainingBlock {
    pool: Vec<DatasetItem>,
    holdout: Vec<DatasetItem>,
    skipped_pool: usize,
    skipped_holdout: usize,
}

fn sample_training_block(
    block: &Block,
    lexicon: &Lexicon,
    table: &RelationTable,
    config: &GenerationConfig,
) -> Result<TrainingBlock, SamplerError> {
    let per_tuple = config.pairs_per_open_class_combo;
    let holdout_size = config.holdout_size_per_block;
    // holdout tuples are visited round-robin
    let holdout_per_tuple = |i: usize| holdout_size / TUPLES_PER_BLOCK + usize::from(i < holdout_size % TUPLES_PER_BLOCK);
    check_capacity(block, config, per_tuple + holdout_per_tuple(0))?;

    let id = u64::from(block.id);
    let mut seen = HashSet::new();
    let mut rng = child_rng(config.seed, "train", id);
    let pool = sample_pairs(block, &config.inventory, |_| per_tuple, &mut seen, &mut rng);
    let mut rng = child_rng(config.seed, "holdout", id);
    let holdout = sample_pairs(block, &config.inventory, holdout_per_tuple, &mut seen, &mut rng);
    Ok(TrainingBlock {
        pool: label_all(lexicon, table, Split::Train, Provenance::Original, pool.pairs)?,
        holdout: label_all(lexicon, table, Split::Holdout, Provenance::Original, holdout.pairs)?,
        skipped_pool: pool.skipped,
        skipped_holdout: holdout.skipped,
    })
}

/// Counters reported alongside a generated bundle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub skipped_train: usize,
    pub skipped_holdout: usize,
    pub skipped_jabberwocky: usize,
    pub closure_reversals: usize,
    pub closure_perturbations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Parallel,
    Serial,
}

/// Everything one generation run produces.
#[derive(Clone, Debug)]
pub struct DatasetBundle {
    pub config: GenerationConfig,
    pub lexicon: Lexicon,
    pub table: RelationTable,
    pub train: Vec<DatasetItem>,
    pub validation: Vec<DatasetItem>,
    pub holdout: Vec<DatasetItem>,
    pub jabberwocky: Vec<DatasetItem>,
    pub stats: GenerationStats,
}

impl DatasetBundle {
    pub fn split(&self, split: Split) -> &[DatasetItem] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Holdout => &self.holdout,
            Split::Jabberwocky => &self.jabberwocky,
        }
    }
}

fn map_blocks<T, F>(blocks: &[Block], mode: Parallelism, f: F) -> Result<Vec<T>, SamplerError>
where
    T: Send,
    F: Fn(&Block) -> Result<T, SamplerError> + Sync,
{
    match mode {
        Parallelism::Parallel => blocks.par_iter().map(&f).collect(),
        Parallelism::Serial => blocks.iter().map(&f).collect(),
    }
}

/// Builds the lexicon for a config: training blocks take ids
/// `0..n_training_blocks`, jabberwocky blocks the ids after them.
pub fn build_lexicon(config: &GenerationConfig) -> Result<Lexicon, SamplerError> {
    let mut gensym = Gensym::new();
    let n_train = config.n_training_blocks as u32;
    let total = n_train + config.n_jabberwocky_blocks as u32;
    let blocks = (0..total)
        .map(|id| {
            let role = if id < n_train { BlockRole::Training } else { BlockRole::Jabberwocky };
            build_block(id, role, &mut gensym)
        })
        .collect();
    Ok(Lexicon::new(config.inventory.clone(), blocks)?)
}

/// Generates every split of a condition. With `table` given, it is reused
/// after checking it matches the config; otherwise it is built.
pub fn generate_condition(
    config: &GenerationConfig,
    table: Option<RelationTable>,
    mode: Parallelism,
) -> Result<DatasetBundle, SamplerError> {
    config.validate()?;
    let space = config.skeleton_space();
    let table = match table {
        Some(t) => {
            t.ensure_config(&space, config.chain)?;
            t
        }
        None => build_table(&space, &config.domain_sizes, &config.oracle_options())?,
    };
    let lexicon = build_lexicon(config)?;
    let (training, jabberwocky): (Vec<Block>, Vec<Block>) =
        lexicon.blocks().cloned().partition(|b| b.role == BlockRole::Training);

    let trained = map_blocks(&training, mode, |b| sample_training_block(b, &lexicon, &table, config))?;
    let jabber = map_blocks(&jabberwocky, mode, |b| {
        let mut rng = child_rng(config.seed, "jabberwocky", u64::from(b.id));
        sample_block_items(b, &lexicon, &table, config, Split::Jabberwocky, &mut rng)
    })?;

    let mut stats = GenerationStats::default();
    let mut pool = Vec::new();
    let mut holdout = Vec::new();
    for tb in trained {
        stats.skipped_train += tb.skipped_pool;
        stats.skipped_holdout += tb.skipped_holdout;
        pool.extend(tb.pool);
        holdout.extend(tb.holdout);
    }
    let (train, validation) = split_validation(pool, config);

    let mut originals = Vec::new();
    for (items, skipped) in jabber {
        stats.skipped_jabberwocky += skipped;
        originals.extend(items);
    }
    let (jabberwocky, closure) = close_for_probes(originals, &lexicon, &table, mode)?;
    stats.closure_reversals = closure.reversals;
    stats.closure_perturbations = closure.perturbations;

    Ok(DatasetBundle {
        config: config.clone(),
        lexicon,
        table,
        train,
        validation,
        holdout,
        jabberwocky,
        stats,
    })
}

/// Moves a seeded uniform random `validation_fraction` of the pool to the
/// validation split; both splits keep pool order.
fn split_validation(pool: Vec<DatasetItem>, config: &GenerationConfig) -> (Vec<DatasetItem>, Vec<DatasetItem>) {
    let n_val = validation_count(pool.len(), config.validation_fraction);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut child_rng(config.seed, "validation", 0));
    let mut is_val = vec![false; pool.len()];
    for &i in &order[..n_val] {
        is_val[i] = true;
    }
    let (mut train, mut validation) = (Vec::new(), Vec::new());
    for (mut item, v) in pool.into_iter().zip(is_val) {
        if v {
            item.split = Split::Validation;
            validation.push(item);
        } else {
            train.push(item);
        }
    }
    (train, validation)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClosureStats {
    pub reversals: usize,
    pub perturbations: usize,
}

/// Pairs reachable from `pair` by one closed-class edit on one side.
pub fn single_edit_pairs(
    inv: &ClosedClassInventory,
    pair: &SentencePair,
) -> impl Iterator<Item = (crate::probes::Side, crate::language::Slot, SentencePair)> {
    use crate::probes::Side;
    let premise = inv
        .single_edits(&pair.premise)
        .into_iter()
        .map(|(slot, s)| (Side::Premise, slot, SentencePair::new(s, pair.hypothesis)));
    let hypothesis = inv
        .single_edits(&pair.hypothesis)
        .into_iter()
        .map(|(slot, s)| (Side::Hypothesis, slot, SentencePair::new(pair.premise, s)));
    premise.chain(hypothesis).collect::<Vec<_>>().into_iter()
}

/// Extends `items` with, for every original item, its reversal and each
/// single-edit variant whose gold class differs, unless already present.
///
/// Only original items seed the closure, so applying it again adds nothing.
/// Added items keep the split of their source.
pub fn close_for_probes(
    items: Vec<DatasetItem>,
    lexicon: &Lexicon,
    table: &RelationTable,
    mode: Parallelism,
) -> Result<(Vec<DatasetItem>, ClosureStats), SamplerError> {
    let mut by_block: Vec<Vec<DatasetItem>> = Vec::new();
    for item in items {
        match by_block.last_mut() {
            Some(group) if group[0].block_id == item.block_id => group.push(item),
            _ => by_block.push(vec![item]),
        }
    }
    let close = |group: &Vec<DatasetItem>| close_group(group, lexicon, table);
    let added: Vec<(Vec<DatasetItem>, ClosureStats)> = match mode {
        Parallelism::Parallel => by_block.par_iter().map(close).collect::<Result<_, _>>()?,
        Parallelism::Serial => by_block.iter().map(close).collect::<Result<_, _>>()?,
    };
    let mut stats = ClosureStats::default();
    let mut out = Vec::new();
    for (group, (extra, s)) in by_block.into_iter().zip(added) {
        stats.reversals += s.reversals;
        stats.perturbations += s.perturbations;
        out.extend(group);
        out.extend(extra);
    }
    Ok((out, stats))
}

fn close_group(
    group: &[DatasetItem],
    lexicon: &Lexicon,
    table: &RelationTable,
) -> Result<(Vec<DatasetItem>, ClosureStats), SamplerError> {
    let mut present: HashSet<SentencePair> = group.iter().map(DatasetItem::pair).collect();
    let mut stats = ClosureStats::default();
    let mut extra = Vec::new();
    for item in group.iter().filter(|i| i.provenance == Provenance::Original) {
        let reversed = item.pair().reversed();
        if present.insert(reversed) {
            let gold = label_pair(&reversed, table)?;
            extra.push(DatasetItem::new(lexicon, item.split, reversed, gold, Provenance::Reversal));
            stats.reversals += 1;
        }
        for (_, _, edited) in single_edit_pairs(lexicon.inventory(), &item.pair()) {
            let gold = label_pair(&edited, table)?;
            if gold != item.gold && present.insert(edited) {
                extra.push(DatasetItem::new(lexicon, item.split, edited, gold, Provenance::Perturbation));
                stats.perturbations += 1;
            }
        }
    }
    Ok((extra, stats))
}
