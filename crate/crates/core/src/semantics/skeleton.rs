//! Semantic skeletons: everything about a sentence pair that its gold
//! relation can depend on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::language::{ClosedClassInventory, Quantifier, Sentence, SentencePair, Word};

use super::SemanticsError;

/// Closed-class shape of one sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    pub quantifier: Quantifier,
    pub premodified: bool,
    pub postmodified: bool,
    pub negated: bool,
}

impl Frame {
    pub fn of(s: &Sentence) -> Self {
        Self {
            quantifier: s.quantifier,
            premodified: s.premodifier.is_some(),
            postmodified: s.postmodifier.is_some(),
            negated: s.negated,
        }
    }
}

/// Taxonomic relation of the premise word to the hypothesis word.
/// Distance along the chain is deliberately not recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexRel {
    Same,
    /// premise word ⊏ hypothesis word
    Forward,
    /// premise word ⊐ hypothesis word
    Reverse,
    Unrelated,
}

impl LexRel {
    pub fn between(premise: Word, hypothesis: Word) -> Self {
        if premise.block != hypothesis.block {
            LexRel::Unrelated
        } else if premise.rank == hypothesis.rank {
            LexRel::Same
        } else if premise.rank < hypothesis.rank {
            LexRel::Forward
        } else {
            LexRel::Reverse
        }
    }

    fn name(self) -> &'static str {
        match self {
            LexRel::Same => "same",
            LexRel::Forward => "forward",
            LexRel::Reverse => "reverse",
            LexRel::Unrelated => "unrelated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModifierMatch {
    BothAbsent,
    Same,
    Different,
    PremiseOnly,
    HypothesisOnly,
}

impl ModifierMatch {
    pub fn between(premise: Option<u8>, hypothesis: Option<u8>) -> Self {
        match (premise, hypothesis) {
            (None, None) => ModifierMatch::BothAbsent,
            (Some(a), Some(b)) if a == b => ModifierMatch::Same,
            (Some(_), Some(_)) => ModifierMatch::Different,
            (Some(_), None) => ModifierMatch::PremiseOnly,
            (None, Some(_)) => ModifierMatch::HypothesisOnly,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModifierMatch::BothAbsent => "both_absent",
            ModifierMatch::Same => "same",
            ModifierMatch::Different => "different",
            ModifierMatch::PremiseOnly => "premise_only",
            ModifierMatch::HypothesisOnly => "hypothesis_only",
        }
    }

    /// Representative premise/hypothesis modifier indices.
    fn representative(self) -> (Option<u8>, Option<u8>) {
        match self {
            ModifierMatch::BothAbsent => (None, None),
            ModifierMatch::Same => (Some(0), Some(0)),
            ModifierMatch::Different => (Some(0), Some(1)),
            ModifierMatch::PremiseOnly => (Some(0), None),
            ModifierMatch::HypothesisOnly => (None, Some(0)),
        }
    }

    fn options(premise: bool, hypothesis: bool, inventory_size: usize) -> Vec<Self> {
        match (premise, hypothesis) {
            (false, false) => vec![ModifierMatch::BothAbsent],
            (true, false) => vec![ModifierMatch::PremiseOnly],
            (false, true) => vec![ModifierMatch::HypothesisOnly],
            (true, true) if inventory_size >= 2 => vec![ModifierMatch::Same, ModifierMatch::Different],
            (true, true) => vec![ModifierMatch::Same],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Skeleton {
    pub premise: Frame,
    pub hypothesis: Frame,
    pub noun: LexRel,
    pub verb: LexRel,
    pub premodifier: ModifierMatch,
    pub postmodifier: ModifierMatch,
}

impl Skeleton {
    pub fn of(pair: &SentencePair) -> Self {
        let (p, h) = (&pair.premise, &pair.hypothesis);
        Self {
            premise: Frame::of(p),
            hypothesis: Frame::of(h),
            noun: LexRel::between(p.noun, h.noun),
            verb: LexRel::between(p.verb, h.verb),
            premodifier: ModifierMatch::between(p.premodifier, h.premodifier),
            postmodifier: ModifierMatch::between(p.postmodifier, h.postmodifier),
        }
    }

    /// A concrete pair with this skeleton, built from ranks 0 and 1 of block 0
    /// (block 1 for the hypothesis side of an unrelated word).
    pub fn representative(&self) -> SentencePair {
        let words = |rel: LexRel| match rel {
            LexRel::Same => (Word::new(0, 0), Word::new(0, 0)),
            LexRel::Forward => (Word::new(0, 0), Word::new(0, 1)),
            LexRel::Reverse => (Word::new(0, 1), Word::new(0, 0)),
            LexRel::Unrelated => (Word::new(0, 0), Word::new(1, 0)),
        };
        let (pn, hn) = words(self.noun);
        let (pv, hv) = words(self.verb);
        let (ppre, hpre) = self.premodifier.representative();
        let (ppost, hpost) = self.postmodifier.representative();
        let sentence = |f: &Frame, noun, verb, premodifier, postmodifier| Sentence {
            quantifier: f.quantifier,
            premodifier,
            noun,
            postmodifier,
            negated: f.negated,
            verb,
        };
        SentencePair::new(
            sentence(&self.premise, pn, pv, ppre, ppost),
            sentence(&self.hypothesis, hn, hv, hpre, hpost),
        )
    }

    pub fn reversed(&self) -> Self {
        Skeleton::of(&self.representative().reversed())
    }
}

fn frame_key(f: &Frame) -> String {
    format!(
        "{}.{}.{}.{}",
        f.quantifier.token(),
        if f.premodified { "pre" } else { "-" },
        if f.postmodified { "post" } else { "-" },
        if f.negated { "neg" } else { "-" },
    )
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/noun={}/verb={}/pre={}/post={}",
            frame_key(&self.premise),
            frame_key(&self.hypothesis),
            self.noun.name(),
            self.verb.name(),
            self.premodifier.name(),
            self.postmodifier.name()
        )
    }
}

impl FromStr for Skeleton {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SemanticsError::BadSkeletonKey(s.to_string());
        let parts: Vec<&str> = s.split('/').collect();
        let [pf, hf, noun, verb, pre, post] = parts.as_slice() else {
            return Err(bad());
        };
        let frame = |k: &str| -> Option<Frame> {
            let f: Vec<&str> = k.split('.').collect();
            let [q, pre, post, neg] = f.as_slice() else {
                return None;
            };
            let quantifier = Quantifier::ALL.into_iter().find(|x| x.token() == *q)?;
            let flag = |v: &str, on: &str| match v {
                "-" => Some(false),
                v if v == on => Some(true),
                _ => None,
            };
            Some(Frame {
                quantifier,
                premodified: flag(pre, "pre")?,
                postmodified: flag(post, "post")?,
                negated: flag(neg, "neg")?,
            })
        };
        fn field<'a>(kv: &'a str, key: &str) -> Option<&'a str> {
            kv.strip_prefix(key).and_then(|v| v.strip_prefix('='))
        }
        let lex = |v: &str| {
            [LexRel::Same, LexRel::Forward, LexRel::Reverse, LexRel::Unrelated]
                .into_iter()
                .find(|r| r.name() == v)
        };
        let modm = |v: &str| {
            [
                ModifierMatch::BothAbsent,
                ModifierMatch::Same,
                ModifierMatch::Different,
                ModifierMatch::PremiseOnly,
                ModifierMatch::HypothesisOnly,
            ]
            .into_iter()
            .find(|m| m.name() == v)
        };
        Some(Skeleton {
            premise: frame(pf).ok_or_else(bad)?,
            hypothesis: frame(hf).ok_or_else(bad)?,
            noun: field(noun, "noun").and_then(lex).ok_or_else(bad)?,
            verb: field(verb, "verb").and_then(lex).ok_or_else(bad)?,
            premodifier: field(pre, "pre").and_then(modm).ok_or_else(bad)?,
            postmodifier: field(post, "post").and_then(modm).ok_or_else(bad)?,
        })
        .filter(Skeleton::is_consistent)
        .ok_or_else(bad)
    }
}

impl Skeleton {
    /// Modifier matches agree with the frames' presence flags.
    pub fn is_consistent(&self) -> bool {
        let agrees = |m: ModifierMatch, p: bool, h: bool| {
            let (rp, rh) = m.representative();
            rp.is_some() == p && rh.is_some() == h
        };
        agrees(self.premodifier, self.premise.premodified, self.hypothesis.premodified)
            && agrees(self.postmodifier, self.premise.postmodified, self.hypothesis.postmodified)
    }
}

/// The closed-class choices that determine which skeletons are reachable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonSpace {
    pub quantifiers: Vec<Quantifier>,
    pub premodifiers: usize,
    pub postmodifiers: usize,
    pub negation: bool,
    /// Whether nouns/verbs from different taxonomies may be paired.
    #[serde(default)]
    pub unrelated_words: bool,
}

impl From<&ClosedClassInventory> for SkeletonSpace {
    fn from(inv: &ClosedClassInventory) -> Self {
        Self {
            quantifiers: inv.quantifiers.clone(),
            premodifiers: inv.premodifiers.len(),
            postmodifiers: inv.postmodifiers.len(),
            negation: true,
            unrelated_words: false,
        }
    }
}

impl SkeletonSpace {
    fn frames(&self) -> Vec<Frame> {
        let flags = |allowed: bool| if allowed { vec![false, true] } else { vec![false] };
        let mut out = Vec::new();
        for &quantifier in &self.quantifiers {
            for &premodified in &flags(self.premodifiers > 0) {
                for &postmodified in &flags(self.postmodifiers > 0) {
                    for &negated in &flags(self.negation) {
                        out.push(Frame {
                            quantifier,
                            premodified,
                            postmodified,
                            negated,
                        });
                    }
                }
            }
        }
        out
    }

    /// Every skeleton a pair drawn from this space can have, in sorted order.
    pub fn skeletons(&self) -> Vec<Skeleton> {
        let mut rels = vec![LexRel::Same, LexRel::Forward, LexRel::Reverse];
        if self.unrelated_words {
            rels.push(LexRel::Unrelated);
        }
        let frames = self.frames();
        let mut out = Vec::new();
        for premise in &frames {
            for hypothesis in &frames {
                let pres = ModifierMatch::options(premise.premodified, hypothesis.premodified, self.premodifiers);
                let posts =
                    ModifierMatch::options(premise.postmodified, hypothesis.postmodified, self.postmodifiers);
                for &noun in &rels {
                    for &verb in &rels {
                        for &premodifier in &pres {
                            for &postmodifier in &posts {
                                out.push(Skeleton {
                                    premise: *premise,
                                    hypothesis: *hypothesis,
                                    noun,
                                    verb,
                                    premodifier,
                                    postmodifier,
                                });
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_space_size() {
        let space = SkeletonSpace::from(&ClosedClassInventory::default());
        // 4 quantifiers and 2 negation states per side; 5 modifier matches per
        // modifier slot summed over presence patterns; 3 x 3 word relations.
        assert_eq!(space.skeletons().len(), 4 * 4 * 2 * 2 * 5 * 5 * 9);
    }

    #[test]
    fn single_quantifier_space() {
        let space = SkeletonSpace {
            quantifiers: vec![Quantifier::All],
            premodifiers: 0,
            postmodifiers: 0,
            negation: false,
            unrelated_words: false,
        };
        assert_eq!(space.skeletons().len(), 9);
    }

    #[test]
    fn keys_round_trip_and_representatives_agree() {
        let space = SkeletonSpace {
            unrelated_words: true,
            ..SkeletonSpace::from(&ClosedClassInventory::default())
        };
        for sk in space.skeletons() {
            let key = sk.to_string();
            assert_eq!(key.parse::<Skeleton>().unwrap(), sk, "{key}");
            assert_eq!(Skeleton::of(&sk.representative()), sk);
        }
        assert!("all.-.-.-/all.-.-.-/noun=same/verb=same/pre=same/post=both_absent"
            .parse::<Skeleton>()
            .is_err());
        assert!("garbage".parse::<Skeleton>().is_err());
    }

    #[test]
    fn lexical_relation_direction() {
        assert_eq!(LexRel::between(Word::new(0, 1), Word::new(0, 4)), LexRel::Forward);
        assert_eq!(LexRel::between(Word::new(0, 4), Word::new(0, 1)), LexRel::Reverse);
        assert_eq!(LexRel::between(Word::new(0, 4), Word::new(3, 4)), LexRel::Unrelated);
    }
}
