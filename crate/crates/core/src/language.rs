//! The artificial language: closed-class inventory, block lexicons with
//! linear taxonomies, the six-slot sentence template, rendering and parsing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of nouns (and of verbs) in every block taxonomy.
pub const TAXONOMY_SIZE: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LanguageError {
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid inventory: {0}")]
    InvalidInventory(String),
    #[error("invalid taxonomy: {0}")]
    InvalidTaxonomy(String),
    #[error("symbol '{symbol}' belongs to both {first} and {second}")]
    CategoryClash {
        symbol: String,
        first: String,
        second: String,
    },
    #[error("duplicate block id {0}")]
    DuplicateBlock(u32),
    #[error("unknown block id {0}")]
    UnknownBlock(u32),
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    All,
    Some,
    No,
    #[serde(rename = "notall")]
    NotAll,
}

impl Quantifier {
    pub const ALL: [Quantifier; 4] = [
        Quantifier::All,
        Quantifier::Some,
        Quantifier::No,
        Quantifier::NotAll,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Quantifier::All => "all",
            Quantifier::Some => "some",
            Quantifier::No => "no",
            Quantifier::NotAll => "notall",
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Closed-class words shared by every block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedClassInventory {
    pub quantifiers: Vec<Quantifier>,
    pub premodifiers: Vec<String>,
    /// Each postmodifier is one template slot filler; it may render as
    /// several whitespace-separated tokens.
    pub postmodifiers: Vec<String>,
    pub negation: String,
    pub epsilon: String,
}

impl Default for ClosedClassInventory {
    fn default() -> Self {
        Self {
            quantifiers: Quantifier::ALL.to_vec(),
            premodifiers: vec!["red".into(), "brown".into(), "small".into()],
            postmodifiers: vec!["that bark".into(), "with spots".into(), "near water".into()],
            negation: "don't".into(),
            epsilon: "<eps>".into(),
        }
    }
}

/// One of the four closed-class positions of the template.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Quantifier,
    Premodifier,
    Postmodifier,
    Negation,
}

impl ClosedClassInventory {
    pub fn validate(&self) -> Result<(), LanguageError> {
        let bad = |m: &str| Err(LanguageError::InvalidInventory(m.to_string()));
        if self.quantifiers.is_empty() {
            return bad("quantifier list is empty");
        }
        let mut seen_q = self.quantifiers.clone();
        seen_q.sort();
        seen_q.dedup();
        if seen_q.len() != self.quantifiers.len() {
            return bad("duplicate quantifier");
        }
        if self.premodifiers.len() > u8::MAX as usize || self.postmodifiers.len() > u8::MAX as usize
        {
            return bad("too many modifiers");
        }
        let mut owner: HashMap<String, &'static str> = HashMap::new();
        let mut register = |word: &str, category: &'static str| -> Result<(), LanguageError> {
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(LanguageError::InvalidInventory(format!("bad token '{word}'")));
            }
            match owner.get(word) {
                // parts of multi-token postmodifiers may repeat
                Some(&prev) if prev == category && category == "postmodifier" => Ok(()),
                Some(&prev) => Err(LanguageError::CategoryClash {
                    symbol: word.to_string(),
                    first: prev.to_string(),
                    second: category.to_string(),
                }),
                None => {
                    owner.insert(word.to_string(), category);
                    Ok(())
                }
            }
        };
        for q in &self.quantifiers {
            register(q.token(), "quantifier")?;
        }
        for p in &self.premodifiers {
            register(p, "premodifier")?;
        }
        for p in &self.postmodifiers {
            let parts: Vec<&str> = p.split_whitespace().collect();
            if parts.is_empty() {
                return bad("empty postmodifier");
            }
            for part in parts {
                register(part, "postmodifier")?;
            }
        }
        let mut dup = self.postmodifiers.clone();
        dup.sort();
        dup.dedup();
        if dup.len() != self.postmodifiers.len() {
            return bad("duplicate postmodifier");
        }
        register(&self.negation, "negation")?;
        if owner.contains_key(self.epsilon.as_str()) {
            return bad("epsilon collides with a lexical symbol");
        }
        Ok(())
    }

    pub fn premodifier_name(&self, idx: Option<u8>) -> &str {
        idx.map_or(self.epsilon.as_str(), |i| self.premodifiers[i as usize].as_str())
    }

    pub fn postmodifier_name(&self, idx: Option<u8>) -> &str {
        idx.map_or(self.epsilon.as_str(), |i| self.postmodifiers[i as usize].as_str())
    }

    /// The word filling `slot` in `s`, or epsilon for an empty optional slot.
    pub fn slot_word(&self, s: &Sentence, slot: Slot) -> &str {
        match slot {
            Slot::Quantifier => s.quantifier.token(),
            Slot::Premodifier => self.premodifier_name(s.premodifier),
            Slot::Postmodifier => self.postmodifier_name(s.postmodifier),
            Slot::Negation if s.negated => &self.negation,
            Slot::Negation => &self.epsilon,
        }
    }

    /// Number of distinct closed-class fillings of one sentence frame.
    pub fn frame_count(&self) -> usize {
        self.quantifiers.len() * (self.premodifiers.len() + 1) * (self.postmodifiers.len() + 1) * 2
    }

    /// Every sentence reachable from `s` by changing exactly one closed-class
    /// slot, including insertion and deletion of optional slots.
    pub fn single_edits(&self, s: &Sentence) -> Vec<(Slot, Sentence)> {
        let mut out = Vec::new();
        for &q in &self.quantifiers {
            if q != s.quantifier {
                out.push((Slot::Quantifier, Sentence { quantifier: q, ..*s }));
            }
        }
        let options = |n: usize| std::iter::once(None).chain((0..n as u8).map(Some));
        for p in options(self.premodifiers.len()) {
            if p != s.premodifier {
                out.push((Slot::Premodifier, Sentence { premodifier: p, ..*s }));
            }
        }
        for p in options(self.postmodifiers.len()) {
            if p != s.postmodifier {
                out.push((Slot::Postmodifier, Sentence { postmodifier: p, ..*s }));
            }
        }
        out.push((Slot::Negation, Sentence { negated: !s.negated, ..*s }));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockRole {
    Training,
    Jabberwocky,
}

/// An open-class word: a block and its position in that block's taxonomy.
/// Rank 0 is the most specific word; rank `i` is strictly contained in `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub block: u32,
    pub rank: u8,
}

impl Word {
    pub fn new(block: u32, rank: u8) -> Self {
        Self { block, rank }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Taxonomy {
    words: Vec<String>,
}

impl Taxonomy {
    pub fn new(words: Vec<String>) -> Result<Self, LanguageError> {
        if words.len() != TAXONOMY_SIZE {
            return Err(LanguageError::InvalidTaxonomy(format!(
                "expected {TAXONOMY_SIZE} words, got {}",
                words.len()
            )));
        }
        let mut sorted = words.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != words.len() {
            return Err(LanguageError::InvalidTaxonomy("repeated word".into()));
        }
        if let Some(w) = words.iter().find(|w| w.is_empty() || w.chars().any(char::is_whitespace)) {
            return Err(LanguageError::InvalidTaxonomy(format!("bad word '{w}'")));
        }
        Ok(Self { words })
    }

    /// Words from most specific to most general.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, rank: u8) -> &str {
        &self.words[rank as usize]
    }
}

impl TryFrom<Vec<String>> for Taxonomy {
    type Error = LanguageError;
    fn try_from(words: Vec<String>) -> Result<Self, Self::Error> {
        Taxonomy::new(words)
    }
}

impl From<Taxonomy> for Vec<String> {
    fn from(t: Taxonomy) -> Self {
        t.words
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: u32,
    pub role: BlockRole,
    pub nouns: Taxonomy,
    pub verbs: Taxonomy,
}

impl Block {
    pub fn noun(&self, rank: u8) -> Word {
        Word::new(self.id, rank)
    }

    pub fn verb(&self, rank: u8) -> Word {
        Word::new(self.id, rank)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpenClass {
    Noun,
    Verb,
}

/// Supplies globally fresh open-class symbols.
pub trait SymbolSource {
    fn fresh(&mut self, class: OpenClass, block: u32) -> String;
}

/// Deterministic gensym: `n{block}_{k}` for nouns and `v{block}_{k}` for
/// verbs, with `k` counting up per block and class so symbols never repeat.
#[derive(Debug, Default)]
pub struct Gensym {
    counters: HashMap<(u32, bool), u32>,
}

impl Gensym {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SymbolSource for Gensym {
    fn fresh(&mut self, class: OpenClass, block: u32) -> String {
        let is_noun = class == OpenClass::Noun;
        let k = self.counters.entry((block, is_noun)).or_insert(0);
        let sym = format!("{}{block}_{k}", if is_noun { 'n' } else { 'v' });
        *k += 1;
        sym
    }
}

/// Builds a block whose taxonomy order is the generation order of its symbols.
pub fn build_block(id: u32, role: BlockRole, source: &mut impl SymbolSource) -> Block {
    let mut draw = |class| (0..TAXONOMY_SIZE).map(|_| source.fresh(class, id)).collect::<Vec<_>>();
    let nouns = draw(OpenClass::Noun);
    let verbs = draw(OpenClass::Verb);
    Block {
        id,
        role,
        nouns: Taxonomy::new(nouns).expect("symbol source returned repeated symbols"),
        verbs: Taxonomy::new(verbs).expect("symbol source returned repeated symbols"),
    }
}

/// A sentence of the template
/// `quantifier [premodifier] noun [postmodifier] [negation] verb`.
///
/// Modifiers are indices into the inventory lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence {
    pub quantifier: Quantifier,
    pub premodifier: Option<u8>,
    pub noun: Word,
    pub postmodifier: Option<u8>,
    pub negated: bool,
    pub verb: Word,
}

impl Sentence {
    /// The bare `quantifier noun verb` sentence.
    pub fn simple(quantifier: Quantifier, noun: Word, verb: Word) -> Self {
        Self {
            quantifier,
            premodifier: None,
            noun,
            postmodifier: None,
            negated: false,
            verb,
        }
    }

    pub fn with_premodifier(self, idx: u8) -> Self {
        Self { premodifier: Some(idx), ..self }
    }

    pub fn with_postmodifier(self, idx: u8) -> Self {
        Self { postmodifier: Some(idx), ..self }
    }

    pub fn negate(self) -> Self {
        Self { negated: true, ..self }
    }

    pub fn block(&self) -> u32 {
        self.noun.block
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentencePair {
    pub premise: Sentence,
    pub hypothesis: Sentence,
}

impl SentencePair {
    pub fn new(premise: Sentence, hypothesis: Sentence) -> Self {
        Self { premise, hypothesis }
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.hypothesis, self.premise)
    }

    pub fn block(&self) -> u32 {
        self.premise.block()
    }

    pub fn is_single_block(&self) -> bool {
        let b = self.block();
        [self.premise.verb, self.hypothesis.noun, self.hypothesis.verb]
            .iter()
            .all(|w| w.block == b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TokenRole {
    Quantifier(Quantifier),
    Premodifier(u8),
    PostmodifierPart,
    Negation,
    Noun(Word),
    Verb(Word),
}

/// Closed-class inventory together with a set of blocks; the unit that
/// renders and parses sentences.
#[derive(Clone, Debug)]
pub struct Lexicon {
    inventory: ClosedClassInventory,
    blocks: BTreeMap<u32, Block>,
    tokens: HashMap<String, TokenRole>,
    postmodifier_tokens: Vec<Vec<String>>,
}

/// On-disk form of a [`Lexicon`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LexiconManifest {
    pub format: String,
    pub version: u32,
    pub inventory: ClosedClassInventory,
    pub blocks: Vec<Block>,
}

impl Lexicon {
    pub fn new(inventory: ClosedClassInventory, blocks: Vec<Block>) -> Result<Self, LanguageError> {
        inventory.validate()?;
        let mut tokens = HashMap::new();
        let category = |r: &TokenRole| match r {
            TokenRole::Quantifier(_) => "quantifier",
            TokenRole::Premodifier(_) => "premodifier",
            TokenRole::PostmodifierPart => "postmodifier",
            TokenRole::Negation => "negation",
            TokenRole::Noun(_) => "noun",
            TokenRole::Verb(_) => "verb",
        };
        for &q in &inventory.quantifiers {
            tokens.insert(q.token().to_string(), TokenRole::Quantifier(q));
        }
        for (i, p) in inventory.premodifiers.iter().enumerate() {
            tokens.insert(p.clone(), TokenRole::Premodifier(i as u8));
        }
        let postmodifier_tokens: Vec<Vec<String>> = inventory
            .postmodifiers
            .iter()
            .map(|p| p.split_whitespace().map(str::to_string).collect())
            .collect();
        for part in postmodifier_tokens.iter().flatten() {
            tokens.insert(part.clone(), TokenRole::PostmodifierPart);
        }
        tokens.insert(inventory.negation.clone(), TokenRole::Negation);

        let mut by_id = BTreeMap::new();
        for block in blocks {
            let id = block.id;
            let open = block
                .nouns
                .words()
                .iter()
                .enumerate()
                .map(|(r, w)| (w, TokenRole::Noun(Word::new(id, r as u8))))
                .chain(
                    block
                        .verbs
                        .words()
                        .iter()
                        .enumerate()
                        .map(|(r, w)| (w, TokenRole::Verb(Word::new(id, r as u8)))),
                );
            for (w, role) in open {
                if w == &inventory.epsilon {
                    return Err(LanguageError::InvalidInventory(format!(
                        "epsilon '{w}' used as an open-class word"
                    )));
                }
                if let Some(prev) = tokens.insert(w.clone(), role) {
                    return Err(LanguageError::CategoryClash {
                        symbol: w.clone(),
                        first: category(&prev).to_string(),
                        second: category(&role).to_string(),
                    });
                }
            }
            if by_id.insert(id, block).is_some() {
                return Err(LanguageError::DuplicateBlock(id));
            }
        }
        Ok(Self {
            inventory,
            blocks: by_id,
            tokens,
            postmodifier_tokens,
        })
    }

    pub fn from_manifest(m: LexiconManifest) -> Result<Self, LanguageError> {
        Self::new(m.inventory, m.blocks)
    }

    pub fn to_manifest(&self) -> LexiconManifest {
        LexiconManifest {
            format: "lexicon".into(),
            version: 1,
            inventory: self.inventory.clone(),
            blocks: self.blocks.values().cloned().collect(),
        }
    }

    pub fn inventory(&self) -> &ClosedClassInventory {
        &self.inventory
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    pub fn block(&self, id: u32) -> Result<&Block, LanguageError> {
        self.blocks.get(&id).ok_or(LanguageError::UnknownBlock(id))
    }

    pub fn noun_symbol(&self, w: Word) -> &str {
        self.blocks[&w.block].nouns.word(w.rank)
    }

    pub fn verb_symbol(&self, w: Word) -> &str {
        self.blocks[&w.block].verbs.word(w.rank)
    }

    /// Checks category and range constraints of a sentence against this lexicon.
    pub fn check(&self, s: &Sentence) -> Result<(), LanguageError> {
        let inv = &self.inventory;
        let fail = |m: String| Err(LanguageError::InvalidSentence(m));
        if !inv.quantifiers.contains(&s.quantifier) {
            return fail(format!("quantifier '{}' not in inventory", s.quantifier));
        }
        if s.premodifier.is_some_and(|p| p as usize >= inv.premodifiers.len()) {
            return fail("premodifier index out of range".into());
        }
        if s.postmodifier.is_some_and(|p| p as usize >= inv.postmodifiers.len()) {
            return fail("postmodifier index out of range".into());
        }
        if s.noun.block != s.verb.block {
            return fail("noun and verb come from different blocks".into());
        }
        self.block(s.noun.block)?;
        if s.noun.rank as usize >= TAXONOMY_SIZE || s.verb.rank as usize >= TAXONOMY_SIZE {
            return fail("taxonomy rank out of range".into());
        }
        Ok(())
    }

    /// Tokens of the filled slots in template order.
    pub fn render(&self, s: &Sentence) -> Vec<&str> {
        let mut out = Vec::with_capacity(7);
        out.push(s.quantifier.token());
        if let Some(p) = s.premodifier {
            out.push(self.inventory.premodifiers[p as usize].as_str());
        }
        out.push(self.noun_symbol(s.noun));
        if let Some(p) = s.postmodifier {
            out.extend(self.postmodifier_tokens[p as usize].iter().map(String::as_str));
        }
        if s.negated {
            out.push(self.inventory.negation.as_str());
        }
        out.push(self.verb_symbol(s.verb));
        out
    }

    pub fn render_string(&self, s: &Sentence) -> String {
        self.render(s).join(" ")
    }

    pub fn parse<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Sentence, LanguageError> {
        let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let mut pos = 0;
        let role_at = |pos: usize| -> Result<Option<TokenRole>, LanguageError> {
            match toks.get(pos) {
                None => Ok(None),
                Some(t) => self
                    .tokens
                    .get(*t)
                    .copied()
                    .map(Some)
                    .ok_or_else(|| LanguageError::UnknownSymbol(t.to_string())),
            }
        };
        let expected = |pos: usize, what: &str| LanguageError::Parse {
            position: pos,
            message: match toks.get(pos) {
                Some(t) => format!("expected {what}, found '{t}'"),
                None => format!("expected {what}, found end of sentence"),
            },
        };

        let quantifier = match role_at(pos)? {
            Some(TokenRole::Quantifier(q)) => q,
            _ => return Err(expected(pos, "quantifier")),
        };
        pos += 1;
        let mut premodifier = None;
        if let Some(TokenRole::Premodifier(p)) = role_at(pos)? {
            premodifier = Some(p);
            pos += 1;
        }
        let noun = match role_at(pos)? {
            Some(TokenRole::Noun(w)) => w,
            _ => return Err(expected(pos, "noun")),
        };
        pos += 1;
        let mut postmodifier = None;
        if let Some(TokenRole::PostmodifierPart) = role_at(pos)? {
            let rest = &toks[pos..];
            let best = self
                .postmodifier_tokens
                .iter()
                .enumerate()
                .filter(|(_, seq)| rest.len() >= seq.len() && seq.iter().zip(rest).all(|(a, b)| a == b))
                .max_by_key(|(_, seq)| seq.len());
            match best {
                Some((i, seq)) => {
                    postmodifier = Some(i as u8);
                    pos += seq.len();
                }
                None => return Err(expected(pos, "postmodifier")),
            }
        }
        let mut negated = false;
        if let Some(TokenRole::Negation) = role_at(pos)? {
            negated = true;
            pos += 1;
        }
        let verb = match role_at(pos)? {
            Some(TokenRole::Verb(w)) => w,
            _ => return Err(expected(pos, "verb")),
        };
        pos += 1;
        if pos != toks.len() {
            return Err(expected(pos, "end of sentence"));
        }
        if noun.block != verb.block {
            return Err(LanguageError::Parse {
                position: pos - 1,
                message: "noun and verb come from different blocks".into(),
            });
        }
        Ok(Sentence {
            quantifier,
            premodifier,
            noun,
            postmodifier,
            negated,
            verb,
        })
    }

    /// Readable English-like rendering for documentation and demos.
    pub fn render_readable(&self, s: &Sentence) -> String {
        let mut out = vec![s.quantifier.token().to_string()];
        if let Some(p) = s.premodifier {
            out.push(self.inventory.premodifiers[p as usize].clone());
        }
        out.push(readable_alias(OpenClass::Noun, s.noun));
        if let Some(p) = s.postmodifier {
            out.push(self.inventory.postmodifiers[p as usize].clone());
        }
        if s.negated {
            out.push(self.inventory.negation.clone());
        }
        out.push(readable_alias(OpenClass::Verb, s.verb));
        out.join(" ")
    }
}

const FIRST_NOUNS: [&str; TAXONOMY_SIZE] = ["puppies", "dogs", "mammals", "animals", "creatures", "beings"];
const FIRST_VERBS: [&str; TAXONOMY_SIZE] = ["sprint", "run", "move", "act", "exist", "occur"];
const ONSETS: [&str; 8] = ["bl", "w", "d", "gl", "f", "z", "tr", "m"];
const NUCLEI: [&str; 5] = ["i", "u", "a", "o", "e"];
const CODAS: [&str; 4] = ["ck", "g", "x", "p"];

/// English-like alias for an open-class word. Block 0 uses real words in a
/// plausible taxonomy; other blocks get deterministic pseudo-words.
pub fn readable_alias(class: OpenClass, w: Word) -> String {
    if w.block == 0 {
        let table = match class {
            OpenClass::Noun => FIRST_NOUNS,
            OpenClass::Verb => FIRST_VERBS,
        };
        return table[w.rank as usize].to_string();
    }
    let mut n = (w.block as usize) * TAXONOMY_SIZE + w.rank as usize;
    let mut word = String::new();
    loop {
        word.push_str(ONSETS[n % ONSETS.len()]);
        n /= ONSETS.len();
        word.push_str(NUCLEI[n % NUCLEI.len()]);
        n /= NUCLEI.len();
        word.push_str(CODAS[n % CODAS.len()]);
        n /= CODAS.len();
        if n == 0 {
            break;
        }
    }
    match class {
        OpenClass::Noun => format!("{word}ets"),
        OpenClass::Verb => word,
    }
}

/// A one-block lexicon spelled with the English and nonce words of the
/// worked examples. Noun ranks: blockets ⊏ blickets ⊏ pigs ⊏ dogs ⊏ mammals
/// ⊏ animals; verb ranks: wug ⊏ run ⊏ growl ⊏ move ⊏ act ⊏ exist.
pub fn example_lexicon() -> Lexicon {
    let words = |ws: [&str; TAXONOMY_SIZE]| Taxonomy::new(ws.iter().map(|w| w.to_string()).collect());
    let block = Block {
        id: 0,
        role: BlockRole::Jabberwocky,
        nouns: words(["blockets", "blickets", "pigs", "dogs", "mammals", "animals"]).unwrap(),
        verbs: words(["wug", "run", "growl", "move", "act", "exist"]).unwrap(),
    };
    Lexicon::new(ClosedClassInventory::default(), vec![block]).expect("example lexicon is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_block_uses_gensym_order() {
        let mut g = Gensym::new();
        let b0 = build_block(0, BlockRole::Training, &mut g);
        assert_eq!(b0.nouns.words(), ["n0_0", "n0_1", "n0_2", "n0_3", "n0_4", "n0_5"]);
        assert_eq!(b0.verbs.word(5), "v0_5");
        let b1 = build_block(1, BlockRole::Jabberwocky, &mut g);
        let all0: Vec<_> = b0.nouns.words().iter().chain(b0.verbs.words()).collect();
        assert!(b1.nouns.words().iter().chain(b1.verbs.words()).all(|w| !all0.contains(&w)));
        // Reusing a block id still yields fresh symbols.
        let again = build_block(0, BlockRole::Training, &mut g);
        assert_eq!(again.nouns.word(0), "n0_6");
    }

    #[test]
    fn readable_aliases_keep_taxonomy_examples() {
        let n = |r| readable_alias(OpenClass::Noun, Word::new(0, r));
        assert_eq!((n(1).as_str(), n(2).as_str(), n(3).as_str()), ("dogs", "mammals", "animals"));
        let mut seen = std::collections::HashSet::new();
        for b in 0..50 {
            for r in 0..6 {
                assert!(seen.insert(readable_alias(OpenClass::Noun, Word::new(b, r))));
                assert!(seen.insert(readable_alias(OpenClass::Verb, Word::new(b, r))));
            }
        }
    }

    #[test]
    fn render_examples() {
        let lex = example_lexicon();
        let blickets = Word::new(0, 1);
        let wug = Word::new(0, 0);
        let s = Sentence::simple(Quantifier::All, blickets, wug);
        assert_eq!(lex.render(&s), ["all", "blickets", "wug"]);

        let dogs = Word::new(0, 3);
        let run = Word::new(0, 1);
        let s = Sentence::simple(Quantifier::All, dogs, run)
            .with_premodifier(1)
            .with_postmodifier(0)
            .negate();
        assert_eq!(lex.render(&s), ["all", "brown", "dogs", "that", "bark", "don't", "run"]);
        assert_eq!(lex.parse(&lex.render(&s)).unwrap(), s);
    }

    #[test]
    fn parse_examples() {
        let lex = example_lexicon();
        let s = lex.parse(&["some", "blickets", "don't", "wug"]).unwrap();
        assert_eq!(s, Sentence::simple(Quantifier::Some, Word::new(0, 1), Word::new(0, 0)).negate());
        let s = lex.parse(&["all", "blickets", "wug"]).unwrap();
        assert_eq!(s, Sentence::simple(Quantifier::All, Word::new(0, 1), Word::new(0, 0)));
        assert!(matches!(lex.parse(&["wug", "all"]), Err(LanguageError::Parse { position: 0, .. })));
        assert_eq!(
            lex.parse(&["all", "florps", "wug"]),
            Err(LanguageError::UnknownSymbol("florps".into()))
        );
        assert!(lex.parse(&["all", "blickets", "that", "wug"]).is_err());
        assert!(lex.parse(&["all", "blickets", "wug", "wug"]).is_err());
        assert!(lex.parse::<&str>(&[]).is_err());
    }

    #[test]
    fn category_clash_is_rejected() {
        let mut g = Gensym::new();
        let mut b = build_block(0, BlockRole::Training, &mut g);
        b.verbs = Taxonomy::new(vec!["some".into(), "a".into(), "b".into(), "c".into(), "d".into(), "e".into()]).unwrap();
        assert!(matches!(
            Lexicon::new(ClosedClassInventory::default(), vec![b]),
            Err(LanguageError::CategoryClash { .. })
        ));
        let b0 = build_block(0, BlockRole::Training, &mut Gensym::new());
        let b0_again = build_block(1, BlockRole::Training, &mut Gensym::new());
        let mut clash = b0_again.clone();
        clash.nouns = b0.nouns.clone();
        assert!(Lexicon::new(ClosedClassInventory::default(), vec![b0, clash]).is_err());
    }

    #[test]
    fn inventory_validation() {
        assert!(ClosedClassInventory::default().validate().is_ok());
        let mut inv = ClosedClassInventory::default();
        inv.quantifiers.clear();
        assert!(inv.validate().is_err());
        let inv = ClosedClassInventory {
            epsilon: "red".into(),
            ..Default::default()
        };
        assert!(inv.validate().is_err());
        let mut inv = ClosedClassInventory::default();
        inv.premodifiers.push("don't".into());
        assert!(inv.validate().is_err());
    }

    #[test]
    fn single_edits_cover_every_slot() {
        let inv = ClosedClassInventory::default();
        let s = Sentence::simple(Quantifier::All, Word::new(0, 0), Word::new(0, 1));
        let edits = inv.single_edits(&s);
        // 3 other quantifiers, 3 premodifier insertions, 3 postmodifier insertions, 1 negation.
        assert_eq!(edits.len(), 10);
        for (slot, t) in &edits {
            assert_ne!(inv.slot_word(&s, *slot), inv.slot_word(t, *slot));
        }
    }

    fn arb_sentence() -> impl Strategy<Value = Sentence> {
        (0usize..4, proptest::option::of(0u8..3), 0u8..6, proptest::option::of(0u8..3), any::<bool>(), 0u8..6, 0u32..3)
            .prop_map(|(q, pre, n, post, neg, v, b)| Sentence {
                quantifier: Quantifier::ALL[q],
                premodifier: pre,
                noun: Word::new(b, n),
                postmodifier: post,
                negated: neg,
                verb: Word::new(b, v),
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(s in arb_sentence()) {
            let mut g = Gensym::new();
            let blocks = (0..3).map(|i| build_block(i, BlockRole::Training, &mut g)).collect();
            let lex = Lexicon::new(ClosedClassInventory::default(), blocks).unwrap();
            let toks = lex.render(&s);
            prop_assert!(toks.len() >= 3 && toks.len() <= 8);
            prop_assert_eq!(lex.parse(&toks).unwrap(), s);
        }
    }
}
