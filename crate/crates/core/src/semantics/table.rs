//! Memoized gold labels keyed by [`Skeleton`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::language::SentencePair;
use crate::relations::Relation;

use super::oracle::{label_pair_oracle, OracleOptions};
use super::skeleton::{Skeleton, SkeletonSpace};
use super::world::ChainMode;
use super::SemanticsError;

pub const TABLE_FORMAT: &str = "relation-table";
pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTable {
    space: SkeletonSpace,
    chain: ChainMode,
    domain_sizes: Vec<usize>,
    entries: BTreeMap<Skeleton, Relation>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    format: String,
    version: u32,
    config_hash: String,
    space: SkeletonSpace,
    chain: ChainMode,
    domain_sizes: Vec<usize>,
    entries: BTreeMap<String, Relation>,
}

/// Hex SHA-256 of the canonical JSON of a skeleton space and chain mode.
pub fn config_hash(space: &SkeletonSpace, chain: ChainMode) -> String {
    let json = serde_json::to_vec(&(space, chain)).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

impl RelationTable {
    pub fn from_entries(
        space: SkeletonSpace,
        chain: ChainMode,
        domain_sizes: Vec<usize>,
        entries: BTreeMap<Skeleton, Relation>,
    ) -> Self {
        Self {
            space,
            chain,
            domain_sizes,
            entries,
        }
    }

    pub fn space(&self) -> &SkeletonSpace {
        &self.space
    }

    pub fn chain(&self) -> ChainMode {
        self.chain
    }

    pub fn domain_sizes(&self) -> &[usize] {
        &self.domain_sizes
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, skeleton: &Skeleton) -> Option<Relation> {
        self.entries.get(skeleton).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Skeleton, &Relation)> {
        self.entries.iter()
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.space, self.chain)
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            format: TABLE_FORMAT.into(),
            version: TABLE_VERSION,
            config_hash: self.config_hash(),
            space: self.space.clone(),
            chain: self.chain,
            domain_sizes: self.domain_sizes.clone(),
            entries: self.entries.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self, SemanticsError> {
        let file: TableFile =
            serde_json::from_str(json).map_err(|e| SemanticsError::TableFormat(e.to_string()))?;
        if file.format != TABLE_FORMAT || file.version != TABLE_VERSION {
            return Err(SemanticsError::TableFormat(format!(
                "expected {TABLE_FORMAT} v{TABLE_VERSION}, found {} v{}",
                file.format, file.version
            )));
        }
        if file.config_hash != config_hash(&file.space, file.chain) {
            return Err(SemanticsError::TableFormat("config hash does not match contents".into()));
        }
        let mut entries = BTreeMap::new();
        for (k, v) in file.entries {
            entries.insert(k.parse::<Skeleton>()?, v);
        }
        Ok(Self {
            space: file.space,
            chain: file.chain,
            domain_sizes: file.domain_sizes,
            entries,
        })
    }

    /// Fails unless this table was built for `space` under `chain`.
    pub fn ensure_config(&self, space: &SkeletonSpace, chain: ChainMode) -> Result<(), SemanticsError> {
        if &self.space != space || self.chain != chain {
            return Err(SemanticsError::TableFormat(format!(
                "table built for config {}, expected {}",
                self.config_hash(),
                config_hash(space, chain)
            )));
        }
        Ok(())
    }
}

/// Labels every skeleton in `space` with the oracle at each domain size.
pub fn build_table(
    space: &SkeletonSpace,
    domain_sizes: &[usize],
    opts: &OracleOptions,
) -> Result<RelationTable, SemanticsError> {
    if domain_sizes.len() < 2 {
        return Err(SemanticsError::TooFewDomainSizes(domain_sizes.len()));
    }
    let labeled: Vec<(Skeleton, Vec<Relation>)> = space
        .skeletons()
        .into_par_iter()
        .map(|sk| {
            let rep = sk.representative();
            let rels = domain_sizes
                .iter()
                .map(|&d| label_pair_oracle(&rep, d, opts))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((sk, rels))
        })
        .collect::<Result<_, SemanticsError>>()?;

    let mut unstable = Vec::new();
    let mut entries = BTreeMap::new();
    for (sk, rels) in labeled {
        if rels.iter().any(|r| *r != rels[0]) {
            let by_size = domain_sizes
                .iter()
                .zip(&rels)
                .map(|(d, r)| format!("{d}:{r}"))
                .collect::<Vec<_>>()
                .join(",");
            unstable.push(format!("{sk} [{by_size}]"));
        } else {
            entries.insert(sk, rels[0]);
        }
    }
    if !unstable.is_empty() {
        return Err(SemanticsError::Unstable(unstable));
    }
    Ok(RelationTable {
        space: space.clone(),
        chain: opts.chain,
        domain_sizes: domain_sizes.to_vec(),
        entries,
    })
}

/// Gold relation of `pair` read from the table.
pub fn label_pair(pair: &SentencePair, table: &RelationTable) -> Result<Relation, SemanticsError> {
    let sk = Skeleton::of(pair);
    table
        .get(&sk)
        .ok_or_else(|| SemanticsError::MissingSkeleton(sk.to_string()))
}
