//! The seven natural-logic relations and their set-theoretic classifier.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("world id {id} in {side} is outside the universe")]
    UniverseViolation { side: &'static str, id: u64 },
    #[error("unknown relation name '{0}'")]
    UnknownName(String),
    #[error("relation code {0} is out of range 0..=6")]
    UnknownCode(u64),
}

/// A natural-logic relation between two expressions.
///
/// Variants are declared in canonical order; [`Relation::code`] follows it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `x ≡ y`
    Equivalence,
    /// `x ⊏ y`
    Forward,
    /// `x ⊐ y`
    Reverse,
    /// `x ^ y`
    Negation,
    /// `x | y`
    Alternation,
    /// `x ⌣ y`
    Cover,
    /// `x # y`
    Independence,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::Equivalence,
        Relation::Forward,
        Relation::Reverse,
        Relation::Negation,
        Relation::Alternation,
        Relation::Cover,
        Relation::Independence,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u64) -> Result<Self, RelationError> {
        usize::try_from(code)
            .ok()
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or(RelationError::UnknownCode(code))
    }

    /// Canonical ASCII name used in every file format.
    pub fn name(self) -> &'static str {
        match self {
            Relation::Equivalence => "equivalence",
            Relation::Forward => "forward",
            Relation::Reverse => "reverse",
            Relation::Negation => "negation",
            Relation::Alternation => "alternation",
            Relation::Cover => "cover",
            Relation::Independence => "independence",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equivalence => "≡",
            Relation::Forward => "⊏",
            Relation::Reverse => "⊐",
            Relation::Negation => "^",
            Relation::Alternation => "|",
            Relation::Cover => "⌣",
            Relation::Independence => "#",
        }
    }

    /// The relation that holds once the two expressions swap places.
    pub fn converse(self) -> Self {
        match self {
            Relation::Forward => Relation::Reverse,
            Relation::Reverse => Relation::Forward,
            other => other,
        }
    }

    pub fn is_symmetric(self) -> bool {
        self.converse() == self
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.name() == needle || r.symbol() == needle)
            .ok_or_else(|| RelationError::UnknownName(s.to_string()))
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Relation {
    /// Accepts either the canonical name or the integer code.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Code(u64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(name) => name.parse().map_err(serde::de::Error::custom),
            Repr::Code(code) => Relation::from_code(code).map_err(serde::de::Error::custom),
        }
    }
}

/// Two extensions over a shared finite universe of world ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionPair {
    x: BTreeSet<u64>,
    y: BTreeSet<u64>,
    universe: BTreeSet<u64>,
}

impl ExtensionPair {
    pub fn new(
        x: BTreeSet<u64>,
        y: BTreeSet<u64>,
        universe: BTreeSet<u64>,
    ) -> Result<Self, RelationError> {
        for (side, set) in [("x", &x), ("y", &y)] {
            if let Some(&id) = set.iter().find(|id| !universe.contains(id)) {
                return Err(RelationError::UniverseViolation { side, id });
            }
        }
        Ok(Self { x, y, universe })
    }

    pub fn from_slices(x: &[u64], y: &[u64], universe: &[u64]) -> Result<Self, RelationError> {
        Self::new(
            x.iter().copied().collect(),
            y.iter().copied().collect(),
            universe.iter().copied().collect(),
        )
    }

    pub fn x(&self) -> &BTreeSet<u64> {
        &self.x
    }

    pub fn y(&self) -> &BTreeSet<u64> {
        &self.y
    }

    pub fn universe(&self) -> &BTreeSet<u64> {
        &self.universe
    }

    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            universe: self.universe.clone(),
        }
    }
}

/// Classifies the pair by the set-theoretic definitions, checked in order;
/// independence is the residual case.
pub fn classify(ep: &ExtensionPair) -> Relation {
    let (x, y) = (&ep.x, &ep.y);
    if x == y {
        return Relation::Equivalence;
    }
    if x.is_subset(y) {
        return Relation::Forward;
    }
    if x.is_superset(y) {
        return Relation::Reverse;
    }
    let disjoint = x.is_disjoint(y);
    let exhaustive = ep.universe.iter().all(|w| x.contains(w) || y.contains(w));
    match (disjoint, exhaustive) {
        (true, true) => Relation::Negation,
        (true, false) => Relation::Alternation,
        (false, true) => Relation::Cover,
        (false, false) => Relation::Independence,
    }
}
