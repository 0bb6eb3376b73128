//! Finite models and sentence truth.

use serde::{Deserialize, Serialize};

use crate::language::{Quantifier, Sentence, Word};

use super::SemanticsError;

/// Largest domain a [`World`] can hold; extensions are `u64` bitsets.
pub const MAX_DOMAIN: usize = 64;

/// How taxonomy neighbors in scope must nest.
///
/// Both modes give every skeleton the same label once the domain is large
/// enough. `Strict` needs a larger domain before labels settle: a pair using
/// ranks 0 and 1 of both the noun and verb chains under negation needs four
/// entities to make both sentences satisfiable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// `extension(lower) ⊊ extension(higher)`.
    Strict,
    /// `extension(lower) ⊆ extension(higher)`.
    #[default]
    Inclusive,
}

/// A symbol that receives an extension in a world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Noun(Word),
    Verb(Word),
    Premodifier(u8),
    Postmodifier(u8),
}

impl Atom {
    fn is_open_class(self) -> bool {
        matches!(self, Atom::Noun(_) | Atom::Verb(_))
    }

    /// True when `self` sits strictly below `other` in a taxonomy.
    pub(crate) fn below(self, other: Atom) -> bool {
        match (self, other) {
            (Atom::Noun(a), Atom::Noun(b)) | (Atom::Verb(a), Atom::Verb(b)) => {
                a.block == b.block && a.rank < b.rank
            }
            _ => false,
        }
    }
}

/// The atoms a sentence needs extensions for, in slot order.
pub fn sentence_atoms(s: &Sentence) -> impl Iterator<Item = Atom> {
    [
        Some(Atom::Noun(s.noun)),
        s.premodifier.map(Atom::Premodifier),
        s.postmodifier.map(Atom::Postmodifier),
        Some(Atom::Verb(s.verb)),
    ]
    .into_iter()
    .flatten()
}

/// A domain `{0, .., n-1}` with an extension (bitset over the domain) for
/// each atom in scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    domain_size: usize,
    extensions: Vec<(Atom, u64)>,
}

impl World {
    pub fn new(domain_size: usize) -> Result<Self, SemanticsError> {
        if domain_size == 0 || domain_size > MAX_DOMAIN {
            return Err(SemanticsError::DomainSize(domain_size));
        }
        Ok(Self {
            domain_size,
            extensions: Vec::new(),
        })
    }

    /// Builds a world from explicit member lists; entity ids must be below `domain_size`.
    pub fn from_members<I>(domain_size: usize, members: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = (Atom, Vec<usize>)>,
    {
        let mut w = Self::new(domain_size)?;
        for (atom, ids) in members {
            let mut mask = 0u64;
            for id in ids {
                if id >= domain_size {
                    return Err(SemanticsError::EntityOutOfRange { id, domain_size });
                }
                mask |= 1 << id;
            }
            w.set(atom, mask);
        }
        Ok(w)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn domain_mask(&self) -> u64 {
        if self.domain_size == MAX_DOMAIN {
            u64::MAX
        } else {
            (1u64 << self.domain_size) - 1
        }
    }

    /// Sets (or replaces) the extension of `atom`, clipped to the domain.
    pub fn set(&mut self, atom: Atom, extension: u64) {
        let ext = extension & self.domain_mask();
        match self.extensions.iter_mut().find(|(a, _)| *a == atom) {
            Some(slot) => slot.1 = ext,
            None => self.extensions.push((atom, ext)),
        }
    }

    pub(crate) fn set_index(&mut self, index: usize, extension: u64) {
        self.extensions[index].1 = extension;
    }

    pub fn extension(&self, atom: Atom) -> Option<u64> {
        self.extensions.iter().find(|(a, _)| *a == atom).map(|&(_, e)| e)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.extensions.iter().map(|&(a, _)| a)
    }

    fn ext(&self, atom: Atom) -> Result<u64, SemanticsError> {
        self.extension(atom).ok_or(SemanticsError::MissingExtension(atom))
    }

    /// Intersection of the noun with whichever modifiers are present.
    pub fn restrictor(&self, s: &Sentence) -> Result<u64, SemanticsError> {
        let mut r = self.ext(Atom::Noun(s.noun))?;
        if let Some(p) = s.premodifier {
            r &= self.ext(Atom::Premodifier(p))?;
        }
        if let Some(p) = s.postmodifier {
            r &= self.ext(Atom::Postmodifier(p))?;
        }
        Ok(r)
    }

    /// The verb extension, complemented in the domain under negation.
    pub fn scope(&self, s: &Sentence) -> Result<u64, SemanticsError> {
        let v = self.ext(Atom::Verb(s.verb))?;
        Ok(if s.negated { !v & self.domain_mask() } else { v })
    }

    /// Open-class extensions are non-empty and every taxonomy pair in scope
    /// nests as `chain` requires.
    pub fn satisfies_invariants(&self, chain: ChainMode) -> bool {
        let open = || self.extensions.iter().filter(|(a, _)| a.is_open_class());
        for &(a, ea) in open() {
            if ea == 0 {
                return false;
            }
            for &(b, eb) in open() {
                if a.below(b) && (ea & !eb != 0 || (chain == ChainMode::Strict && ea == eb)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Truth of `s` in `w`.
pub fn evaluate(s: &Sentence, w: &World) -> Result<bool, SemanticsError> {
    let r = w.restrictor(s)?;
    let scope = w.scope(s)?;
    Ok(match s.quantifier {
        Quantifier::All => r & !scope == 0,
        Quantifier::Some => r & scope != 0,
        Quantifier::No => r & scope == 0,
        Quantifier::NotAll => r & !scope != 0,
    })
}
