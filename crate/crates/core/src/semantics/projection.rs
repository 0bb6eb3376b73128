//! Relation of a pair computed from its parts by monotonicity projection.
//!
//! Applies only when both sentences share quantifier and negation. The
//! restrictor and scope positions each get a lexical relation, which is
//! projected through the quantifier's monotonicity in that position and the
//! two results are joined.

use crate::language::{Quantifier, SentencePair};
use crate::relations::Relation;

use super::skeleton::LexRel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Upward,
    Downward,
}

impl Monotonicity {
    fn flip(self) -> Self {
        match self {
            Monotonicity::Upward => Monotonicity::Downward,
            Monotonicity::Downward => Monotonicity::Upward,
        }
    }

    fn project(self, r: Relation) -> Relation {
        match self {
            Monotonicity::Upward => r,
            Monotonicity::Downward => r.converse(),
        }
    }
}

/// Monotonicity of (restrictor, scope).
pub fn signature(q: Quantifier) -> (Monotonicity, Monotonicity) {
    use Monotonicity::*;
    match q {
        Quantifier::All => (Downward, Upward),
        Quantifier::Some => (Upward, Upward),
        Quantifier::No => (Downward, Downward),
        Quantifier::NotAll => (Upward, Downward),
    }
}

fn lexical(rel: LexRel) -> Option<Relation> {
    match rel {
        LexRel::Same => Some(Relation::Equivalence),
        LexRel::Forward => Some(Relation::Forward),
        LexRel::Reverse => Some(Relation::Reverse),
        LexRel::Unrelated => None,
    }
}

/// Relation between the two restrictors (noun ∩ modifiers), when it is one
/// of ≡, ⊏, ⊐.
fn restrictor_relation(pair: &SentencePair) -> Option<Relation> {
    let (p, h) = (&pair.premise, &pair.hypothesis);
    let noun = lexical(LexRel::between(p.noun, h.noun))?;
    // A restrictor is contained in another when its noun is no more general
    // and it carries every modifier the other carries.
    let covers = |outer: Option<u8>, inner: Option<u8>| outer.is_none() || outer == inner;
    let p_sub_h = matches!(noun, Relation::Equivalence | Relation::Forward)
        && covers(h.premodifier, p.premodifier)
        && covers(h.postmodifier, p.postmodifier);
    let h_sub_p = matches!(noun, Relation::Equivalence | Relation::Reverse)
        && covers(p.premodifier, h.premodifier)
        && covers(p.postmodifier, h.postmodifier);
    match (p_sub_h, h_sub_p) {
        (true, true) => Some(Relation::Equivalence),
        (true, false) => Some(Relation::Forward),
        (false, true) => Some(Relation::Reverse),
        (false, false) => None,
    }
}

fn join(a: Relation, b: Relation) -> Option<Relation> {
    match (a, b) {
        (Relation::Equivalence, r) | (r, Relation::Equivalence) => Some(r),
        (a, b) if a == b => Some(a),
        _ => None,
    }
}

/// `None` when quantifier or negation differ, or when the parts do not
/// determine the whole.
pub fn project_relation(pair: &SentencePair) -> Option<Relation> {
    let (p, h) = (&pair.premise, &pair.hypothesis);
    if p.quantifier != h.quantifier || p.negated != h.negated {
        return None;
    }
    let (restrictor_mono, mut scope_mono) = signature(p.quantifier);
    if p.negated {
        scope_mono = scope_mono.flip();
    }
    let restrictor = restrictor_mono.project(restrictor_relation(pair)?);
    let scope = scope_mono.project(lexical(LexRel::between(p.verb, h.verb))?);
    join(restrictor, scope)
}
