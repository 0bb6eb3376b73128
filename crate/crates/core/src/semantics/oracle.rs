//! Brute-force gold labels by finite-model enumeration.
//!
//! A pair is labeled by enumerating every world over a fixed domain, taking
//! the set of worlds where each sentence is true, and classifying the two sets
//! against the set of all worlds.
//!
//! Enumeration runs over worlds up to renaming and duplication of entities.
//! Quantified truth and the world invariants only ask whether some entity
//! of a given kind exists, so two entities that agree on membership in every
//! open-class atom and in both sentences' restrictors and scopes are
//! interchangeable. Each world is therefore determined (for our purposes) by
//! the set of entity classes it contains, and any set of at most
//! `domain_size` classes is realized by a concrete world of that size, which
//! is what gets built and evaluated.

use std::collections::BTreeSet;

use crate::language::SentencePair;
use crate::relations::{classify, ExtensionPair, Relation};

use super::world::{evaluate, sentence_atoms, Atom, ChainMode, World};
use super::SemanticsError;

/// Default cap on candidate worlds per labeled pair.
pub const DEFAULT_WORLD_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub world_cap: u64,
    pub chain: ChainMode,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            world_cap: DEFAULT_WORLD_CAP,
            chain: ChainMode::default(),
        }
    }
}

/// Which truth-value combinations of (premise, hypothesis) some world realizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TruthProfile {
    /// Indexed by `2 * premise + hypothesis`; holds a witness world id.
    witnesses: [Option<u64>; 4],
    pub worlds_evaluated: u64,
    pub worlds_valid: u64,
}

impl TruthProfile {
    fn record(&mut self, premise: bool, hypothesis: bool, world_id: u64) {
        let slot = &mut self.witnesses[2 * premise as usize + hypothesis as usize];
        slot.get_or_insert(world_id);
    }

    fn complete(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }

    pub fn realizes(&self, premise: bool, hypothesis: bool) -> bool {
        self.witnesses[2 * premise as usize + hypothesis as usize].is_some()
    }

    /// Premise and hypothesis extensions restricted to one witness world per
    /// realized combination; classification depends on nothing else.
    pub fn extension_pair(&self) -> ExtensionPair {
        let mut x = BTreeSet::new();
        let mut y = BTreeSet::new();
        let mut universe = BTreeSet::new();
        for (i, w) in self.witnesses.iter().enumerate() {
            if let Some(id) = *w {
                universe.insert(id);
                if i & 2 != 0 {
                    x.insert(id);
                }
                if i & 1 != 0 {
                    y.insert(id);
                }
            }
        }
        ExtensionPair::new(x, y, universe).expect("witnesses lie in the universe")
    }
}

/// Gold relation of `pair` over worlds with `domain_size` entities.
///
/// Atoms in scope are exactly those occurring in the pair; when both nouns (or
/// both verbs) come from one taxonomy, the inclusion between them is imposed
/// as `opts.chain` says. Words from different blocks are unconstrained.
pub fn label_pair_oracle(
    pair: &SentencePair,
    domain_size: usize,
    opts: &OracleOptions,
) -> Result<Relation, SemanticsError> {
    let profile = truth_profile(pair, domain_size, opts)?;
    if profile.worlds_valid == 0 {
        return Err(SemanticsError::Infeasible { domain_size });
    }
    Ok(classify(&profile.extension_pair()))
}

pub fn truth_profile(
    pair: &SentencePair,
    domain_size: usize,
    opts: &OracleOptions,
) -> Result<TruthProfile, SemanticsError> {
    let atoms: Vec<Atom> = sentence_atoms(&pair.premise)
        .chain(sentence_atoms(&pair.hypothesis))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut world = World::new(domain_size)?;
    for &a in &atoms {
        world.set(a, 0);
    }

    let classes = entity_classes(pair, &atoms)?;
    let max_support = domain_size.min(classes.len());
    let candidates: u64 = (1..=max_support)
        .map(|k| binomial(classes.len() as u64, k as u64))
        .fold(0u64, u64::saturating_add);
    if candidates > opts.world_cap {
        return Err(SemanticsError::ComplexityGuard {
            worlds: candidates,
            cap: opts.world_cap,
        });
    }

    let mut profile = TruthProfile::default();
    let mut entity_types = vec![0u16; domain_size];
    for support in 1..=max_support {
        let mut combo: Vec<usize> = (0..support).collect();
        loop {
            // entities past the support duplicate the first class
            for (e, slot) in entity_types.iter_mut().enumerate() {
                *slot = classes[if e < support { combo[e] } else { combo[0] }];
            }
            for (i, _) in atoms.iter().enumerate() {
                let ext = entity_types
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t & (1 << i) != 0)
                    .fold(0u64, |m, (e, _)| m | 1 << e);
                world.set_index(i, ext);
            }
            let id = profile.worlds_evaluated;
            profile.worlds_evaluated += 1;
            if world.satisfies_invariants(opts.chain) {
                profile.worlds_valid += 1;
                let p = evaluate(&pair.premise, &world)?;
                let h = evaluate(&pair.hypothesis, &world)?;
                profile.record(p, h, id);
                if profile.complete() {
                    return Ok(profile);
                }
            }
            if !next_combination(&mut combo, classes.len()) {
                break;
            }
        }
    }
    Ok(profile)
}

/// Representative membership masks (bit `i` = member of `atoms[i]`), one per
/// class of interchangeable entities.
fn entity_classes(pair: &SentencePair, atoms: &[Atom]) -> Result<Vec<u16>, SemanticsError> {
    let n = atoms.len();
    debug_assert!(n <= 16);
    let open_mask: u16 = atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| matches!(a, Atom::Noun(_) | Atom::Verb(_)))
        .fold(0, |m, (i, _)| m | 1 << i);
    let mut single = World::new(1)?;
    for &a in atoms {
        single.set(a, 0);
    }
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    'types: for t in 0u32..(1 << n) {
        let t = t as u16;
        // an entity in a lower taxonomy word is in every higher one
        for (i, a) in atoms.iter().enumerate() {
            for (j, b) in atoms.iter().enumerate() {
                if a.below(*b) && t & (1 << i) != 0 && t & (1 << j) == 0 {
                    continue 'types;
                }
            }
        }
        for i in 0..n {
            single.set_index(i, ((t >> i) & 1) as u64);
        }
        let key = (
            t & open_mask,
            single.restrictor(&pair.premise)?,
            single.scope(&pair.premise)?,
            single.restrictor(&pair.hypothesis)?,
            single.scope(&pair.hypothesis)?,
        );
        if seen.insert(key) {
            reps.push(t);
        }
    }
    Ok(reps)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
