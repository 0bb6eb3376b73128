//! Command-line front end: generate, validate-oracle, probe, score and
//! gold-predictions, communicating only through files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::language::{LanguageError, Lexicon, LexiconManifest};
use crate::probes::{
    build_consistency_probe, build_identical_open_class_probe, build_perturbation_probe, prediction_map,
    PredictionRecord, ProbeError, ProbeItem, ProbeKind, ProbeRecord, ProbeSet,
};
use crate::relations::Relation;
use crate::sampler::{
    generate_condition, Condition, DatasetBundle, DatasetItem, GenerationConfig, GenerationStats, ItemRecord,
    Parallelism, PlannedCounts, SamplerError, Split,
};
use crate::scoring::{
    consistency_rate, format_table, score, write_aggregate_csv, write_block_csv, write_figure_csv, Grouping,
    ScoreItem, ScoreReport, ScoringError,
};
use crate::semantics::{
    build_table, check_random_pairs, check_skeletons, ChainMode, OracleOptions, RelationTable, SemanticsError,
    SkeletonSpace,
};

pub const MANIFEST_FORMAT: &str = "run-manifest";
pub const MANIFEST_VERSION: u32 = 1;
pub const LEXICON_FORMAT: &str = "lexicon";

/// Files of a generated bundle, in the order they are written.
pub const BUNDLE_FILES: [&str; 7] = [
    "config.json",
    "lexicon.json",
    "relation_table.json",
    "train.jsonl",
    "validation.jsonl",
    "holdout.jsonl",
    "jabberwocky.jsonl",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Sampler(SamplerError::Config { .. }) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "systematicity", version, about = "Natural-logic NLI data, systematicity probes and scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset bundle.
    Generate(GenerateArgs),
    /// Check the relation table against the oracle, the converse law and projection.
    ValidateOracle(ValidateArgs),
    /// Build a probe set from a bundle.
    Probe(ProbeArgs),
    /// Score predictions against an item or probe file.
    Score(ScoreArgs),
    /// Write gold labels as a predictions file.
    GoldPredictions(GoldArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConditionArg {
    Mini,
    Small,
    Large,
    Custom,
}

impl From<ConditionArg> for Condition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Mini => Condition::Mini,
            ConditionArg::Small => Condition::Small,
            ConditionArg::Large => Condition::Large,
            ConditionArg::Custom => Condition::Custom,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChainArg {
    Strict,
    Inclusive,
}

impl From<ChainArg> for ChainMode {
    fn from(c: ChainArg) -> Self {
        match c {
            ChainArg::Strict => ChainMode::Strict,
            ChainArg::Inclusive => ChainMode::Inclusive,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Built-in condition; flags below override its values.
    #[arg(long, value_enum)]
    pub condition: Option<ConditionArg>,
    /// JSON generation config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, required_unless_present = "dry_run")]
    pub out: Option<PathBuf>,
    /// Reuse a relation table file instead of building one.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Sample blocks on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Validate the config and print planned counts without writing files.
    #[arg(long)]
    pub dry_run: bool,
    #[arg(long)]
    pub training_blocks: Option<usize>,
    #[arg(long)]
    pub jabberwocky_blocks: Option<usize>,
    #[arg(long)]
    pub pairs_per_combo: Option<usize>,
    #[arg(long)]
    pub holdout_size: Option<usize>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// Comma-separated domain sizes for the table build.
    #[arg(long, value_delimiter = ',')]
    pub domain_sizes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub chain: Option<ChainArg>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Random pairs to check against the oracle.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Check this table file instead of building one.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    pub domain_sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "inclusive")]
    pub chain: ChainArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProbeName {
    IdenticalOpenClass,
    Perturbation,
    Consistency,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(value_enum)]
    pub probe: ProbeName,
    /// Bundle directory written by `generate`.
    #[arg(long)]
    pub bundle: PathBuf,
    /// First-pass predictions on the jabberwocky split.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Output JSONL file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GroupingArg {
    Overall,
    #[value(name = "by_relation", alias = "by-relation")]
    ByRelation,
    #[value(name = "by_perturbation_type", alias = "by-perturbation-type")]
    ByPerturbationType,
}

impl From<GroupingArg> for Grouping {
    fn from(g: GroupingArg) -> Self {
        match g {
            GroupingArg::Overall => Grouping::Overall,
            GroupingArg::ByRelation => Grouping::ByRelation,
            GroupingArg::ByPerturbationType => Grouping::ByPerturbationType,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Split or probe JSONL file.
    #[arg(long)]
    pub items: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Predictions on consistency targets; defaults to --predictions.
    #[arg(long)]
    pub second_pass: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "overall")]
    pub grouping: GroupingArg,
    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GoldArgs {
    /// Split or probe JSONL file.
    #[arg(long)]
    pub items: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "gold")]
    pub model_id: String,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::ValidateOracle(a) => cmd_validate_oracle(&a),
        Command::Probe(a) => cmd_probe(&a),
        Command::Score(a) => cmd_score(&a),
        Command::GoldPredictions(a) => cmd_gold_predictions(&a),
    }
}

// ---- file helpers ----

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let write = || -> io::Result<()> {
        let mut f = BufWriter::new(fs::File::create(&tmp)?);
        f.write_all(bytes)?;
        f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(io_err(path))
}

pub fn jsonl_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut out, &row).expect("record serializes");
        out.push(b'\n');
    }
    out
}

fn pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("value serializes");
    out.push(b'\n');
    out
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(row);
    }
    Ok(out)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        line: 0,
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

// ---- generate ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub holdout: usize,
    pub jabberwocky: usize,
    pub jabberwocky_original: usize,
}

/// Everything needed to reproduce a bundle, plus hashes of what was written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub condition: Condition,
    pub n_training_blocks: usize,
    pub n_jabberwocky_blocks: usize,
    pub config: GenerationConfig,
    pub planned: PlannedCounts,
    pub counts: SplitCounts,
    pub stats: GenerationStats,
    pub files: BTreeMap<String, FileEntry>,
    /// Seconds since the Unix epoch when the bundle was written.
    pub created_unix: u64,
}

fn resolve_config(a: &GenerateArgs) -> Result<GenerationConfig, CliError> {
    let mut config = match (&a.config, a.condition) {
        (Some(path), _) => {
            let mut c: GenerationConfig = read_json(path).map_err(|e| CliError::Config(e.to_string()))?;
            if let Some(cond) = a.condition {
                c.condition = cond.into();
            }
            c
        }
        (None, Some(cond)) => GenerationConfig::preset(cond.into(), 0),
        (None, None) => return Err(CliError::Config("one of --condition or --config is required".into())),
    };
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let overrides = [
        (a.training_blocks, &mut config.n_training_blocks),
        (a.jabberwocky_blocks, &mut config.n_jabberwocky_blocks),
        (a.pairs_per_combo, &mut config.pairs_per_open_class_combo),
        (a.holdout_size, &mut config.holdout_size_per_block),
    ];
    for (flag, field) in overrides {
        if let Some(v) = flag {
            *field = v;
        }
    }
    if let Some(f) = a.validation_fraction {
        config.validation_fraction = f;
    }
    if let Some(d) = &a.domain_sizes {
        config.domain_sizes = d.clone();
    }
    if let Some(c) = a.chain {
        config.chain = c.into();
    }
    config.validate()?;
    Ok(config)
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let config = resolve_config(a)?;
    let planned = config.planned_counts();
    if a.dry_run {
        println!("{}", serde_json::to_string_pretty(&config).expect("config serializes"));
        println!(
            "planned: {} training blocks, {} jabberwocky blocks; train {}, validation {}, holdout {}, jabberwocky (before closure) {}",
            config.n_training_blocks,
            config.n_jabberwocky_blocks,
            planned.train,
            planned.validation,
            planned.holdout,
            planned.jabberwocky_original
        );
        return Ok(());
    }
    let out = a.out.as_deref().expect("clap requires --out without --dry-run");
    let table = a
        .table
        .as_deref()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            Ok::<_, CliError>(RelationTable::from_json(&text)?)
        })
        .transpose()?;
    let mode = if a.serial { Parallelism::Serial } else { Parallelism::Parallel };
    let bundle = generate_condition(&config, table, mode)?;
    let manifest = write_bundle(&bundle, out)?;
    println!(
        "wrote {}: train {}, validation {}, holdout {}, jabberwocky {} ({} sampled)",
        out.display(),
        manifest.counts.train,
        manifest.counts.validation,
        manifest.counts.holdout,
        manifest.counts.jabberwocky,
        manifest.counts.jabberwocky_original
    );
    let skipped = bundle.stats.skipped_train + bundle.stats.skipped_holdout + bundle.stats.skipped_jabberwocky;
    if skipped > 0 {
        log::warn!("{skipped} draws skipped after repeated collisions");
    }
    Ok(())
}

/// Writes every bundle file and the manifest into `dir`.
pub fn write_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<RunManifest, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let lex = &bundle.lexicon;
    let records = |items: &[DatasetItem]| jsonl_bytes(items.iter().map(|i| i.to_record(lex)));
    let contents: Vec<(&str, Vec<u8>)> = vec![
        ("config.json", pretty_json(&bundle.config)),
        ("lexicon.json", pretty_json(&lex.to_manifest())),
        ("relation_table.json", bundle.table.to_json().into_bytes()),
        ("train.jsonl", records(&bundle.train)),
        ("validation.jsonl", records(&bundle.validation)),
        ("holdout.jsonl", records(&bundle.holdout)),
        ("jabberwocky.jsonl", records(&bundle.jabberwocky)),
    ];
    let mut files = BTreeMap::new();
    for (name, bytes) in &contents {
        write_atomic(&dir.join(name), bytes)?;
        files.insert(
            name.to_string(),
            FileEntry {
                sha256: sha256_hex(bytes),
                bytes: bytes.len(),
            },
        );
    }
    let config = &bundle.config;
    let manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        condition: config.condition,
        n_training_blocks: config.n_training_blocks,
        n_jabberwocky_blocks: config.n_jabberwocky_blocks,
        config: config.clone(),
        planned: config.planned_counts(),
        counts: SplitCounts {
            train: bundle.train.len(),
            validation: bundle.validation.len(),
            holdout: bundle.holdout.len(),
            jabberwocky: bundle.jabberwocky.len(),
            jabberwocky_original: bundle
                .jabberwocky
                .iter()
                .filter(|i| i.provenance == crate::sampler::Provenance::Original)
                .count(),
        },
        stats: bundle.stats,
        files,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    write_atomic(&dir.join("manifest.json"), &pretty_json(&manifest))?;
    Ok(manifest)
}

/// A bundle read back from disk.
pub struct LoadedBundle {
    pub config: GenerationConfig,
    pub lexicon: Lexicon,
    pub table: RelationTable,
    pub splits: BTreeMap<Split, Vec<DatasetItem>>,
}

impl LoadedBundle {
    pub fn split(&self, split: Split) -> &[DatasetItem] {
        self.splits.get(&split).map_or(&[], Vec::as_slice)
    }
}

pub fn load_bundle(dir: &Path) -> Result<LoadedBundle, CliError> {
    let config: GenerationConfig = read_json(&dir.join("config.json"))?;
    let manifest: LexiconManifest = read_json(&dir.join("lexicon.json"))?;
    if manifest.format != LEXICON_FORMAT {
        return Err(CliError::Validation(format!("lexicon.json has format '{}'", manifest.format)));
    }
    let lexicon = Lexicon::from_manifest(manifest)?;
    let table_path = dir.join("relation_table.json");
    let table = RelationTable::from_json(&fs::read_to_string(&table_path).map_err(io_err(&table_path))?)?;
    let mut splits = BTreeMap::new();
    for split in Split::ALL {
        let path = dir.join(format!("{}.jsonl", split.name()));
        let records: Vec<ItemRecord> = read_jsonl(&path)?;
        let items = records
            .iter()
            .map(|r| DatasetItem::from_record(r, &lexicon))
            .collect::<Result<Vec<_>, _>>()?;
        splits.insert(split, items);
    }
    Ok(LoadedBundle {
        config,
        lexicon,
        table,
        splits,
    })
}

// ---- validate-oracle ----

fn cmd_validate_oracle(a: &ValidateArgs) -> Result<(), CliError> {
    if a.domain_sizes.len() < 2 {
        return Err(CliError::Config("--domain-sizes needs at least 2 entries".into()));
    }
    let opts = OracleOptions {
        chain: a.chain.into(),
        ..OracleOptions::default()
    };
    let inventory = crate::language::ClosedClassInventory::default();
    let table = match &a.table {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            RelationTable::from_json(&text)?
        }
        None => match build_table(&SkeletonSpace::from(&inventory), &a.domain_sizes, &opts) {
            Ok(t) => t,
            Err(SemanticsError::Unstable(keys)) => {
                for k in keys.iter().take(20) {
                    println!("unstable: {k}");
                }
                return Err(CliError::Validation(format!(
                    "{} skeleton(s) change label across domain sizes",
                    keys.len()
                )));
            }
            Err(e) => return Err(e.into()),
        },
    };
    let opts = OracleOptions {
        chain: table.chain(),
        ..opts
    };
    let skeletons = check_skeletons(&table, table.space(), &a.domain_sizes, &opts)?;
    let random = check_random_pairs(&table, &inventory, a.pairs, a.seed, &a.domain_sizes, &opts)?;
    println!("skeletons checked: {}", skeletons.skeletons);
    println!("converse pairs checked: {}", skeletons.converse_checked);
    println!("projection applicable: {}", skeletons.projection_applicable);
    println!("random pairs checked: {}", random.random_pairs);
    let violations: Vec<_> = skeletons.violations.iter().chain(&random.violations).collect();
    println!("violations: {}", violations.len());
    for v in violations.iter().take(50) {
        println!("  {v}");
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} violation(s)", violations.len())))
    }
}

// ---- probe ----

fn load_predictions(path: &Path) -> Result<HashMap<String, Relation>, CliError> {
    let records: Vec<PredictionRecord> = read_jsonl(path)?;
    Ok(prediction_map(&records)?)
}

fn cmd_probe(a: &ProbeArgs) -> Result<(), CliError> {
    let bundle = load_bundle(&a.bundle)?;
    let items = bundle.split(Split::Jabberwocky);
    let predictions = || {
        a.predictions
            .as_deref()
            .ok_or_else(|| CliError::Config("this probe needs --predictions (first-pass predictions)".into()))
            .and_then(load_predictions)
    };
    let set: ProbeSet = match a.probe {
        ProbeName::IdenticalOpenClass => build_identical_open_class_probe(items),
        ProbeName::Perturbation => build_perturbation_probe(items, &bundle.lexicon, &bundle.table, &predictions()?)?,
        ProbeName::Consistency => build_consistency_probe(items, &bundle.lexicon, &predictions()?)?,
    };
    let by_id: HashMap<&str, &DatasetItem> = items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let records = set.items.iter().map(|p| p.to_record(by_id[p.target_item_id.as_str()], &bundle.lexicon));
    write_atomic(&a.out, &jsonl_bytes(records))?;
    let c = set.coverage;
    println!(
        "{} probe items; sources {}, with prediction {}, correct {}",
        set.items.len(),
        c.sources,
        c.predicted,
        c.correct
    );
    if c.missing() > 0 {
        log::warn!("{} of {} sources have no prediction and were excluded", c.missing(), c.sources);
    }
    Ok(())
}

// ---- score ----

/// A split or probe file, told apart by the `probe` field.
pub enum ItemFile {
    Items(Vec<ItemRecord>),
    Probes(Vec<ProbeRecord>),
}

fn from_rows<T: DeserializeOwned>(path: &Path, rows: Vec<serde_json::Value>) -> Result<Vec<T>, CliError> {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| {
            serde_json::from_value(r).map_err(|source| CliError::Json {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

pub fn read_item_file(path: &Path) -> Result<ItemFile, CliError> {
    let rows: Vec<serde_json::Value> = read_jsonl(path)?;
    if rows.first().is_some_and(|r| r.get("probe").is_some()) {
        Ok(ItemFile::Probes(from_rows(path, rows)?))
    } else {
        Ok(ItemFile::Items(from_rows(path, rows)?))
    }
}

fn cmd_score(a: &ScoreArgs) -> Result<(), CliError> {
    let grouping = Grouping::from(a.grouping);
    let predictions = load_predictions(&a.predictions)?;
    let file = read_item_file(&a.items)?;
    let consistency: Option<Vec<ProbeItem>> = match &file {
        ItemFile::Probes(rows) if rows.iter().all(|r| r.probe == ProbeKind::Consistency) && !rows.is_empty() => {
            Some(rows.iter().map(ProbeItem::from).collect())
        }
        _ => None,
    };
    let report = match (consistency, &a.second_pass) {
        (Some(probes), second) => {
            let second_pass = match second {
                Some(p) => {
                    let sp = load_predictions(p)?;
                    let targets: HashSet<&str> = probes.iter().map(|p| p.target_item_id.as_str()).collect();
                    let mut unknown: Vec<String> =
                        sp.keys().filter(|k| !targets.contains(k.as_str())).cloned().collect();
                    if !unknown.is_empty() {
                        unknown.sort();
                        return Err(ScoringError::UnknownItems(unknown).into());
                    }
                    sp
                }
                None => predictions.clone(),
            };
            consistency_rate(&probes, &predictions, &second_pass, grouping)
        }
        (None, Some(_)) => {
            return Err(CliError::Config("--second-pass applies only to consistency probe files".into()));
        }
        (None, None) => {
            let items: Vec<ScoreItem> = match &file {
                ItemFile::Items(rows) => rows.iter().map(ScoreItem::from).collect(),
                ItemFile::Probes(rows) => rows.iter().map(ScoreItem::from).collect(),
            };
            score(&items, &predictions, grouping)?
        }
    };
    write_report(&report, grouping, &a.items, &a.out)
}

fn write_report(report: &ScoreReport, grouping: Grouping, items: &Path, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut blocks = Vec::new();
    write_block_csv(&report.blocks, &mut blocks)?;
    write_atomic(&out.join("block_scores.csv"), &blocks)?;
    let mut aggregates = Vec::new();
    write_aggregate_csv(&report.aggregates, &mut aggregates)?;
    write_atomic(&out.join("aggregate_scores.csv"), &aggregates)?;
    if grouping == Grouping::ByPerturbationType {
        let mut fig = Vec::new();
        write_figure_csv(report, &mut fig)?;
        write_atomic(&out.join("figure.csv"), &fig)?;
    }
    let title = items.file_name().map_or_else(|| "scores".into(), |n| n.to_string_lossy().into_owned());
    let table = format_table(&title, &report.aggregates);
    write_atomic(&out.join("table.txt"), table.as_bytes())?;
    print!("{table}");
    let c = report.coverage;
    println!("coverage: {} of {} items scored", c.n_scored, c.n_items);
    if c.missing() > 0 {
        log::warn!(
            "{} of {} items have no prediction ({:.1}% coverage); scores use covered items only",
            c.missing(),
            c.n_items,
            100.0 * c.fraction()
        );
    }
    Ok(())
}

// ---- gold-predictions ----

fn cmd_gold_predictions(a: &GoldArgs) -> Result<(), CliError> {
    let rows: Vec<(String, Relation)> = match read_item_file(&a.items)? {
        ItemFile::Items(rows) => rows.into_iter().map(|r| (r.item_id, r.gold)).collect(),
        ItemFile::Probes(rows) => rows.into_iter().map(|r| (r.item_id, r.gold)).collect(),
    };
    let mut seen = HashSet::new();
    let records = rows
        .into_iter()
        .filter(|(id, _)| seen.insert(id.clone()))
        .map(|(item_id, predicted)| PredictionRecord {
            item_id,
            predicted,
            model_id: a.model_id.clone(),
        })
        .collect::<Vec<_>>();
    write_atomic(&a.out, &jsonl_bytes(&records))?;
    println!("wrote {} predictions to {}", records.len(), a.out.display());
    Ok(())
}
