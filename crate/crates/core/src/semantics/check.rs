//! Cross-checks between the oracle, a relation table and projection.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::language::{ClosedClassInventory, SentencePair, Word, TAXONOMY_SIZE};
use crate::relations::Relation;
use crate::sampler::{child_rng, random_frame};

use super::oracle::{label_pair_oracle, OracleOptions};
use super::projection::project_relation;
use super::skeleton::{Skeleton, SkeletonSpace};
use super::table::{label_pair, RelationTable};
use super::SemanticsError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Missing { key: String },
    Unstable { key: String, labels: Vec<(usize, Relation)> },
    Mismatch { key: String, table: Relation, oracle: Relation, domain_size: usize },
    Converse { key: String, forward: Relation, reversed: Relation },
    Projection { key: String, projected: Relation, table: Relation },
    RandomPair { index: usize, key: String, table: Relation, oracle: Relation, domain_size: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing { key } => write!(f, "missing: {key}"),
            Violation::Unstable { key, labels } => {
                let l: Vec<String> = labels.iter().map(|(d, r)| format!("{d}:{r}")).collect();
                write!(f, "unstable: {key} [{}]", l.join(","))
            }
            Violation::Mismatch { key, table, oracle, domain_size } => {
                write!(f, "mismatch: {key} table={table} oracle@{domain_size}={oracle}")
            }
            Violation::Converse { key, forward, reversed } => {
                write!(f, "converse: {key} is {forward} but its reversal is {reversed}")
            }
            Violation::Projection { key, projected, table } => {
                write!(f, "projection: {key} projects to {projected}, table says {table}")
            }
            Violation::RandomPair { index, key, table, oracle, domain_size } => {
                write!(f, "random pair {index}: {key} table={table} oracle@{domain_size}={oracle}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub skeletons: usize,
    pub converse_checked: usize,
    pub projection_applicable: usize,
    pub random_pairs: usize,
    pub violations: Vec<Violation>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A uniformly random single-block pair over block `block`.
pub fn random_pair<R: Rng>(inv: &ClosedClassInventory, block: u32, rng: &mut R) -> SentencePair {
    let word = |rng: &mut R| Word::new(block, rng.gen_range(0..TAXONOMY_SIZE as u8));
    let (n1, v1, n2, v2) = (word(rng), word(rng), word(rng), word(rng));
    SentencePair::new(random_frame(inv, rng, n1, v1), random_frame(inv, rng, n2, v2))
}

/// Checks every skeleton of `space`: the table entry exists, the oracle gives
/// the same label at every domain size and that label is the table's; the
/// reversed skeleton carries the converse label; projection, where it
/// applies, agrees.
pub fn check_skeletons(
    table: &RelationTable,
    space: &SkeletonSpace,
    domain_sizes: &[usize],
    opts: &OracleOptions,
) -> Result<OracleReport, SemanticsError> {
    let skeletons = space.skeletons();
    let per_skeleton: Vec<(Vec<Violation>, bool, bool)> = skeletons
        .par_iter()
        .map(|sk| check_one(sk, table, domain_sizes, opts))
        .collect::<Result<_, _>>()?;
    let mut report = OracleReport {
        skeletons: skeletons.len(),
        ..Default::default()
    };
    for (v, converse, projected) in per_skeleton {
        report.violations.extend(v);
        report.converse_checked += usize::from(converse);
        report.projection_applicable += usize::from(projected);
    }
    Ok(report)
}

fn check_one(
    sk: &Skeleton,
    table: &RelationTable,
    domain_sizes: &[usize],
    opts: &OracleOptions,
) -> Result<(Vec<Violation>, bool, bool), SemanticsError> {
    let key = sk.to_string();
    let Some(entry) = table.get(sk) else {
        return Ok((vec![Violation::Missing { key }], false, false));
    };
    let mut out = Vec::new();
    let rep = sk.representative();
    let labels = domain_sizes
        .iter()
        .map(|&d| Ok((d, label_pair_oracle(&rep, d, opts)?)))
        .collect::<Result<Vec<_>, SemanticsError>>()?;
    if labels.iter().any(|(_, r)| *r != labels[0].1) {
        out.push(Violation::Unstable {
            key: key.clone(),
            labels: labels.clone(),
        });
    }
    for &(d, r) in &labels {
        if r != entry {
            out.push(Violation::Mismatch {
                key: key.clone(),
                table: entry,
                oracle: r,
                domain_size: d,
            });
        }
    }
    let reversed = table.get(&sk.reversed());
    if let Some(rev) = reversed {
        if rev != entry.converse() {
            out.push(Violation::Converse {
                key: key.clone(),
                forward: entry,
                reversed: rev,
            });
        }
    }
    let projected = project_relation(&rep);
    if let Some(p) = projected {
        if p != entry {
            out.push(Violation::Projection {
                key,
                projected: p,
                table: entry,
            });
        }
    }
    Ok((out, reversed.is_some(), projected.is_some()))
}

/// Compares the table label with the oracle at every domain size on `n`
/// random pairs drawn from a seeded stream. Pairs spread over blocks 0..8.
pub fn check_random_pairs(
    table: &RelationTable,
    inv: &ClosedClassInventory,
    n: usize,
    seed: u64,
    domain_sizes: &[usize],
    opts: &OracleOptions,
) -> Result<OracleReport, SemanticsError> {
    let mut rng = child_rng(seed, "validate-oracle", 0);
    let pairs: Vec<SentencePair> = (0..n)
        .map(|_| {
            let block = rng.gen_range(0..8);
            random_pair(inv, block, &mut rng)
        })
        .collect();
    let found: Vec<Vec<Violation>> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, pair)| {
            let t = label_pair(pair, table)?;
            let mut v = Vec::new();
            for &d in domain_sizes {
                let o = label_pair_oracle(pair, d, opts)?;
                if o != t {
                    v.push(Violation::RandomPair {
                        index,
                        key: Skeleton::of(pair).to_string(),
                        table: t,
                        oracle: o,
                        domain_size: d,
                    });
                }
            }
            Ok(v)
        })
        .collect::<Result<_, SemanticsError>>()?;
    Ok(OracleReport {
        random_pairs: n,
        violations: found.into_iter().flatten().collect(),
        ..Default::default()
    })
}
