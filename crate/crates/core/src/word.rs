//! Twist words: finite sequences of signed Dehn twists.
//!
//! A word is stored in reading order; the rightmost letter acts first.
//! The textual syntax is whitespace-separated tokens, each a curve symbol
//! with an optional trailing `'` for the left-handed (inverse) twist, e.g.
//! `a4' b2 a4`. On input only, exponent sugar is accepted: `x^k` repeats a
//! single letter and `( ... )^k` repeats a parenthesised group. Exponents are
//! flattened at parse time; the core never stores them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("malformed word `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("no definition for letter `{0}`")]
    UnknownDefinition(String),
    #[error("definition `{0}` refers to itself (directly or through other definitions)")]
    RecursiveDefinition(String),
}

/// Handedness of a twist: `Pos` is right-handed, `Neg` left-handed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// One signed twist. The `curve` is a symbol resolved against the surface
/// model the word lives on (or against a script's conjugate definitions).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistLetter {
    pub curve: String,
    pub sign: Sign,
}

impl TwistLetter {
    pub fn pos(curve: impl Into<String>) -> Self {
        TwistLetter { curve: curve.into(), sign: Sign::Pos }
    }

    pub fn neg(curve: impl Into<String>) -> Self {
        TwistLetter { curve: curve.into(), sign: Sign::Neg }
    }

    pub fn inverse(&self) -> Self {
        TwistLetter { curve: self.curve.clone(), sign: self.sign.flip() }
    }

    /// True when `self` followed by `other` freely cancels.
    pub fn cancels(&self, other: &TwistLetter) -> bool {
        self.curve == other.curve && self.sign != other.sign
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Pos
    }
}

impl fmt::Display for TwistLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}", self.curve),
            Sign::Neg => write!(f, "{}'", self.curve),
        }
    }
}

impl FromStr for TwistLetter {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w: TwistWord = s.parse()?;
        match w.letters() {
            [l] => Ok(l.clone()),
            _ => Err(WordError::Parse { input: s.to_string(), reason: "expected exactly one letter".into() }),
        }
    }
}

/// A finite product of signed twists, possibly empty (the identity).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistWord {
    letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn new(letters: Vec<TwistLetter>) -> Self {
        TwistWord { letters }
    }

    pub fn empty() -> Self {
        TwistWord::default()
    }

    pub fn parse(s: &str) -> Result<Self, WordError> {
        s.parse()
    }

    pub fn letters(&self) -> &[TwistLetter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<TwistLetter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TwistLetter> {
        self.letters.iter()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(TwistLetter::is_positive)
    }

    /// Concatenation `self · other` (other acts first).
    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        TwistWord { letters }
    }

    pub fn pow(&self, k: usize) -> TwistWord {
        let mut letters = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            letters.extend(self.letters.iter().cloned());
        }
        TwistWord { letters }
    }

    /// Sub-word `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> TwistWord {
        TwistWord { letters: self.letters[start..end].to_vec() }
    }

    /// Replace `[start, end)` by `replacement`.
    pub fn splice(&self, start: usize, end: usize, replacement: &TwistWord) -> TwistWord {
        let mut letters = Vec::with_capacity(self.len() - (end - start) + replacement.len());
        letters.extend_from_slice(&self.letters[..start]);
        letters.extend(replacement.letters.iter().cloned());
        letters.extend_from_slice(&self.letters[end..]);
        TwistWord { letters }
    }

    /// Free cancellation of adjacent `x x'` / `x' x` pairs, iterated to a
    /// fixed point. The result contains no cancelling adjacent pair.
    pub fn reduce(&self) -> TwistWord {
        let mut out: Vec<TwistLetter> = Vec::with_capacity(self.len());
        for l in &self.letters {
            if out.last().is_some_and(|last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        TwistWord { letters: out }
    }

    /// Group inverse: reversed order, every sign flipped.
    pub fn invert(&self) -> TwistWord {
        TwistWord { letters: self.letters.iter().rev().map(TwistLetter::inverse).collect() }
    }

    /// Distinct curve symbols occurring in the word.
    pub fn curves(&self) -> BTreeSet<&str> {
        self.letters.iter().map(|l| l.curve.as_str()).collect()
    }

    /// Replace every defined letter by its expansion (inverse expansion for
    /// a left-handed occurrence), recursively.
    pub fn expand_definitions(&self, defs: &DefinitionSet) -> Result<TwistWord, WordError> {
        let mut out = Vec::new();
        for l in &self.letters {
            if defs.contains(&l.curve) {
                let e = defs.expansion_of(&l.curve)?;
                match l.sign {
                    Sign::Pos => out.extend(e.letters),
                    Sign::Neg => out.extend(e.invert().letters),
                }
            } else {
                out.push(l.clone());
            }
        }
        Ok(TwistWord { letters: out })
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<TwistLetter>> for TwistWord {
    fn from(letters: Vec<TwistLetter>) -> Self {
        TwistWord { letters }
    }
}

impl<'a> IntoIterator for &'a TwistWord {
    type Item = &'a TwistLetter;
    type IntoIter = std::slice::Iter<'a, TwistLetter>;

    fn into_iter(self) -> Self::IntoIter {
        self.letters.iter()
    }
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for TwistWord {
    type Err = WordError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| WordError::Parse { input: input.to_string(), reason: reason.to_string() };

        // Lex: parentheses and `^k` are split off as their own tokens.
        let spaced = input.replace('(', " ( ").replace(')', " ) ").replace('^', " ^");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();

        let mut stack: Vec<Vec<TwistLetter>> = vec![Vec::new()];
        // Whether the most recent item pushed onto the current group can take an exponent.
        let mut last_group: Option<Vec<TwistLetter>> = None;
        let mut i = 0;
        while i < tokens.len() {
            let t = tokens[i];
            if t == "(" {
                stack.push(Vec::new());
                last_group = None;
            } else if t == ")" {
                if stack.len() < 2 {
                    return Err(err("unbalanced `)`"));
                }
                let group = stack.pop().expect("checked length");
                stack.last_mut().expect("outer group").extend(group.iter().cloned());
                last_group = Some(group);
            } else if let Some(exp) = t.strip_prefix('^') {
                let k: usize = exp.parse().map_err(|_| err("exponent must be a nonnegative integer"))?;
                let unit = last_group.take().ok_or_else(|| err("exponent without a base"))?;
                let cur = stack.last_mut().expect("current group");
                let base_len = cur.len() - unit.len();
                cur.truncate(base_len);
                for _ in 0..k {
                    cur.extend(unit.iter().cloned());
                }
            } else {
                let (sym, sign) = match t.strip_suffix('\'') {
                    Some(s) => (s, Sign::Neg),
                    None => (t, Sign::Pos),
                };
                if !is_symbol(sym) {
                    return Err(err(&format!("bad token `{t}`")));
                }
                let l = TwistLetter { curve: sym.to_string(), sign };
                stack.last_mut().expect("current group").push(l.clone());
                last_group = Some(vec![l]);
            }
            i += 1;
        }
        if stack.len() != 1 {
            return Err(err("unbalanced `(`"));
        }
        Ok(TwistWord { letters: stack.pop().expect("root group") })
    }
}

impl Serialize for TwistWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TwistWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for TwistLetter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TwistLetter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A named conjugate `w · a · w⁻¹`, i.e. the twist along the image of the
/// curve `a` under the mapping class `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugateDefinition {
    pub name: String,
    pub conjugator: TwistWord,
    pub core: TwistLetter,
}

impl ConjugateDefinition {
    pub fn new(name: impl Into<String>, conjugator: TwistWord, core: TwistLetter) -> Self {
        ConjugateDefinition { name: name.into(), conjugator, core }
    }

    /// The one-level expansion `w a w⁻¹` (may still contain defined letters).
    pub fn expansion(&self) -> TwistWord {
        let mut letters = self.conjugator.letters.clone();
        letters.push(self.core.clone());
        letters.extend(self.conjugator.invert().letters);
        TwistWord { letters }
    }
}

/// The definitions in scope for a script, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefinitionSet {
    defs: BTreeMap<String, ConjugateDefinition>,
}

impl DefinitionSet {
    pub fn new() -> Self {
        DefinitionSet::default()
    }

    pub fn from_defs<I: IntoIterator<Item = ConjugateDefinition>>(defs: I) -> Self {
        DefinitionSet { defs: defs.into_iter().map(|d| (d.name.clone(), d)).collect() }
    }

    pub fn insert(&mut self, def: ConjugateDefinition) {
        self.defs.insert(def.name.clone(), def);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&ConjugateDefinition> {
        self.defs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConjugateDefinition> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Full expansion of a defined letter down to non-defined symbols.
    pub fn expansion_of(&self, name: &str) -> Result<TwistWord, WordError> {
        let mut visiting = Vec::new();
        self.expand_rec(name, &mut visiting)
    }

    fn expand_rec(&self, name: &str, visiting: &mut Vec<String>) -> Result<TwistWord, WordError> {
        if visiting.iter().any(|v| v == name) {
            return Err(WordError::RecursiveDefinition(name.to_string()));
        }
        let def = self.defs.get(name).ok_or_else(|| WordError::UnknownDefinition(name.to_string()))?;
        visiting.push(name.to_string());
        let mut out = Vec::new();
        for l in def.expansion().letters {
            if self.defs.contains_key(&l.curve) {
                let e = self.expand_rec(&l.curve, visiting)?;
                match l.sign {
                    Sign::Pos => out.extend(e.letters),
                    Sign::Neg => out.extend(e.invert().letters),
                }
            } else {
                out.push(l);
            }
        }
        visiting.pop();
        Ok(TwistWord { letters: out })
    }

    /// Check that no definition is (mutually) recursive.
    pub fn check_acyclic(&self) -> Result<(), WordError> {
        for name in self.defs.keys() {
            self.expansion_of(name)?;
        }
        Ok(())
    }
}
