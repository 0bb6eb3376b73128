//! Gold natural-logic labels for sentence pairs.
//!
//! Three routes agree on every pair: the finite-model [`oracle`], the
//! skeleton-keyed [`RelationTable`] built from it, and (where it applies)
//! monotonicity [`projection`].

pub mod check;
pub mod oracle;
pub mod projection;
pub mod skeleton;
pub mod table;
pub mod world;

use thiserror::Error;

pub use check::{check_random_pairs, check_skeletons, OracleReport, Violation};
pub use oracle::{label_pair_oracle, OracleOptions, DEFAULT_WORLD_CAP};
pub use projection::project_relation;
pub use skeleton::{Frame, LexRel, ModifierMatch, Skeleton, SkeletonSpace};
pub use table::{build_table, label_pair, RelationTable};
pub use world::{evaluate, Atom, ChainMode, World};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("no extension for {0:?} in world")]
    MissingExtension(Atom),
    #[error("domain size {0} is outside 1..=64")]
    DomainSize(usize),
    #[error("entity {id} is outside a domain of size {domain_size}")]
    EntityOutOfRange { id: usize, domain_size: usize },
    #[error("no world over {domain_size} entities satisfies the constraints")]
    Infeasible { domain_size: usize },
    #[error("enumeration needs {worlds} worlds, above the cap of {cap}")]
    ComplexityGuard { worlds: u64, cap: u64 },
    #[error("relation table has no entry for skeleton {0}")]
    MissingSkeleton(String),
    #[error("relation differs across domain sizes for {} skeleton(s): {}", .0.len(), .0.join("; "))]
    Unstable(Vec<String>),
    #[error("table build needs at least 2 domain sizes, got {0}")]
    TooFewDomainSizes(usize),
    #[error("bad skeleton key '{0}'")]
    BadSkeletonKey(String),
    #[error("relation table file: {0}")]
    TableFormat(String),
}
