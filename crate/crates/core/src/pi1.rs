//! Action of twists on the free fundamental group of `Σ_{2,1}` and `Σ_{2,2}`.
//!
//! The basepoint lies on the first boundary component, so twists act by
//! automorphisms of a free group. For `Σ_{2,1}` the action is faithful and
//! equality of automorphisms is equality in the mapping class group; for
//! `Σ_{2,2}` the twist along the second boundary component acts trivially,
//! so only the "automorphisms differ" direction is conclusive there.
//!
//! Tables ship inside the atlas document under `pi1_tables`. Each entry lists
//! generator images and inverse images as strings such as `"x1 -> x1 y1"`.
//! Generator `k` abelianizes to the `k`-th basis vector of the model's
//! homology basis, which lets every entry be checked against the
//! transvection of the same curve.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{CurveAtlas, NamedRelation};
use crate::homology::{self, RepMatrix};
use crate::word::{Sign, TwistWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Pi1Error {
    #[error("malformed free-group word `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("no pi_1 table entry for curve `{0}`")]
    MissingTableEntry(String),
    #[error("table entry `{curve}`: {reason}")]
    BadEntry { curve: String, reason: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A freely reduced word in generators `1..=n`; `-k` is the inverse of `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn generator(k: i32) -> Self {
        FreeWord(vec![k])
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduced(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for x in letters {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        FreeWord(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> Self {
        FreeWord::reduced(self.0.iter().chain(&other.0).copied())
    }

    /// Exponent sums, i.e. the image in the abelianization `Z^n`.
    pub fn abelianize(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for &x in &self.0 {
            v[x.unsigned_abs() as usize - 1] += i64::from(x.signum());
        }
        v
    }
}

/// An automorphism given by generator images, together with the images of
/// its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<FreeWord>,
    inverse: Vec<FreeWord>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Self {
        let gens: Vec<FreeWord> = (1..=n as i32).map(FreeWord::generator).collect();
        Automorphism { images: gens.clone(), inverse: gens }
    }

    pub fn new(images: Vec<FreeWord>, inverse: Vec<FreeWord>) -> Self {
        Automorphism { images, inverse }
    }

    /// Inner automorphism `x ↦ g x g⁻¹`.
    pub fn conjugation(n: usize, g: &FreeWord) -> Self {
        let gi = g.inverse();
        let conj = |h: &FreeWord| (1..=n as i32).map(|k| h.concat(&FreeWord::generator(k)).concat(&h.inverse())).collect();
        Automorphism { images: conj(g), inverse: conj(&gi) }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[FreeWord] {
        &self.inverse
    }

    fn substitute(images: &[FreeWord], w: &FreeWord) -> FreeWord {
        let mut letters = Vec::new();
        for &x in w.letters() {
            let img = &images[x.unsigned_abs() as usize - 1];
            if x > 0 {
                letters.extend_from_slice(img.letters());
            } else {
                letters.extend(img.letters().iter().rev().map(|y| -y));
            }
        }
        FreeWord::reduced(letters)
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        Self::substitute(&self.images, w)
    }

    pub fn invert(&self) -> Automorphism {
        Automorphism { images: self.inverse.clone(), inverse: self.images.clone() }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            images: other.images.iter().map(|w| self.apply(w)).collect(),
            inverse: self.inverse.iter().map(|w| Self::substitute(&other.inverse, w)).collect(),
        }
    }

    /// Equality of reduced generator images.
    pub fn same_action(&self, other: &Automorphism) -> bool {
        self.images == other.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, w)| w.letters() == [k as i32 + 1])
    }

    /// Images composed with inverse images give the identity in both orders.
    pub fn inverse_is_consistent(&self) -> bool {
        let n = self.rank();
        (1..=n as i32).all(|k| {
            let g = FreeWord::generator(k);
            Self::substitute(&self.inverse, &self.apply(&g)) == g
                && self.apply(&Self::substitute(&self.inverse, &g)) == g
        })
    }

    /// Abelianization: column `k` holds the exponent sums of the image of
    /// generator `k`.
    pub fn abelianization(&self) -> RepMatrix {
        let n = self.rank();
        let mut m = RepMatrix::zeros(n);
        for (j, w) in self.images.iter().enumerate() {
            for (i, x) in w.abelianize(n).into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistEntryDoc {
    pub images: Vec<String>,
    pub inverse: Vec<String>,
}

/// Serialized form of a [`TwistTable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistTableDoc {
    pub model: String,
    pub generators: Vec<String>,
    pub boundary: String,
    pub twists: BTreeMap<String, TwistEntryDoc>,
}

/// Twist automorphisms for the curves of one model.
#[derive(Clone, Debug)]
pub struct TwistTable {
    model: String,
    generators: Vec<String>,
    boundary: FreeWord,
    entries: BTreeMap<String, Automorphism>,
}

impl TwistTable {
    pub fn from_doc(doc: &TwistTableDoc) -> Result<Self, Pi1Error> {
        let mut table = TwistTable {
            model: doc.model.clone(),
            generators: doc.generators.clone(),
            boundary: FreeWord::empty(),
            entries: BTreeMap::new(),
        };
        table.boundary = table.parse_word(&doc.boundary)?;
        for (curve, e) in &doc.twists {
            let images = table.parse_images(curve, &e.images)?;
            let inverse = table.parse_images(curve, &e.inverse)?;
            table.entries.insert(curve.clone(), Automorphism::new(images, inverse));
        }
        Ok(table)
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// The boundary word `∂` of the basepoint component.
    pub fn boundary(&self) -> &FreeWord {
        &self.boundary
    }

    pub fn curves(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entry(&self, curve: &str) -> Result<&Automorphism, Pi1Error> {
        self.entries.get(curve).ok_or_else(|| Pi1Error::MissingTableEntry(curve.to_string()))
    }

    pub fn covers(&self, w: &TwistWord) -> bool {
        w.iter().all(|l| self.entries.contains_key(&l.curve))
    }

    /// Parse a free word written with this table's generator names.
    pub fn parse_word(&self, s: &str) -> Result<FreeWord, Pi1Error> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let k = self
                .generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| Pi1Error::Parse { input: s.to_string(), reason: format!("unknown generator `{name}`") })?
                as i32
                + 1;
            letters.push(if inv { -k } else { k });
        }
        Ok(FreeWord::reduced(letters))
    }

    fn parse_images(&self, curve: &str, lines: &[String]) -> Result<Vec<FreeWord>, Pi1Error> {
        let mut images: Vec<Option<FreeWord>> = vec![None; self.rank()];
        for line in lines {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Pi1Error::Parse { input: line.clone(), reason: "expected `gen -> word`".into() })?;
            let g = self.parse_word(lhs)?;
            let k = match g.letters() {
                [k] if *k > 0 => *k as usize - 1,
                _ => return Err(Pi1Error::Parse { input: line.clone(), reason: "left side must be one generator".into() }),
            };
            if images[k].replace(self.parse_word(rhs)?).is_some() {
                return Err(Pi1Error::BadEntry { curve: curve.to_string(), reason: format!("generator `{}` given twice", self.generators[k]) });
            }
        }
        images
            .into_iter()
            .enumerate()
            .map(|(k, w)| {
                w.ok_or_else(|| Pi1Error::BadEntry {
                    curve: curve.to_string(),
                    reason: format!("no image for `{}`", self.generators[k]),
                })
            })
            .collect()
    }

    pub fn format_word(&self, w: &FreeWord) -> String {
        let toks: Vec<String> = w
            .letters()
            .iter()
            .map(|&x| {
                let g = &self.generators[x.unsigned_abs() as usize - 1];
                if x < 0 {
                    format!("{g}'")
                } else {
                    g.clone()
                }
            })
            .collect();
        toks.join(" ")
    }

    /// Automorphism of a twist word; the rightmost letter acts first.
    pub fn apply_word(&self, w: &TwistWord) -> Result<Automorphism, Pi1Error> {
        let mut acc = Automorphism::identity(self.rank());
        for l in w {
            let e = self.entry(&l.curve)?;
            acc = match l.sign {
                Sign::Pos => acc.compose(e),
                Sign::Neg => acc.compose(&e.invert()),
            };
        }
        Ok(acc)
    }

    /// Checks both sides of a relation when every letter has a table entry;
    /// `Ok(None)` when the relation involves curves outside the table.
    pub fn check_relation(&self, rel: &NamedRelation) -> Result<Option<bool>, Pi1Error> {
        let defs = rel.definitions();
        let lhs = rel.lhs.expand_definitions(&defs)?;
        let rhs = rel.rhs.expand_definitions(&defs)?;
        if !self.covers(&lhs) || !self.covers(&rhs) {
            return Ok(None);
        }
        Ok(Some(self.apply_word(&lhs)?.same_action(&self.apply_word(&rhs)?)))
    }

    /// Structural self-certification of the table: inverse images, the
    /// boundary word is fixed, and abelianizations match the transvections.
    pub fn validate(&self, atlas: &CurveAtlas, model: &str) -> Vec<String> {
        let mut problems = Vec::new();
        let rank = atlas.model(model).map(|m| m.rank()).unwrap_or(0);
        if rank != self.rank() {
            problems.push(format!("{} generators but H_1 has rank {rank}", self.rank()));
            return problems;
        }
        for (curve, e) in &self.entries {
            if !e.inverse_is_consistent() {
                problems.push(format!("{curve}: inverse images do not invert the images"));
            }
            if e.apply(&self.boundary) != self.boundary {
                problems.push(format!("{curve}: boundary word is not fixed"));
            }
            match homology::transvection(atlas, model, curve, Sign::Pos) {
                Ok(t) if t == e.abelianization() => {}
                Ok(_) => problems.push(format!("{curve}: abelianization differs from the transvection")),
                Err(err) => problems.push(format!("{curve}: {err}")),
            }
        }
        problems
    }
}

impl fmt::Display for TwistTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi_1 table on {} ({} generators, {} twists)", self.model, self.rank(), self.entries.len())
    }
}

/// Replace every occurrence of each substitution's left side by its right
/// side, scanning left to right without overlaps.
pub fn substitute_blocks(w: &TwistWord, substitutions: &[(&TwistWord, &TwistWord)]) -> TwistWord {
    let mut out = Vec::new();
    let letters = w.letters();
    let mut i = 0;
    'scan: while i < letters.len() {
        for (from, to) in substitutions {
            let k = from.len();
            if k > 0 && i + k <= letters.len() && letters[i..i + k] == *from.letters() {
                out.extend_from_slice(to.letters());
                i += k;
                continue 'scan;
            }
        }
        out.push(letters[i].clone());
        i += 1;
    }
    TwistWord::new(out)
}

/// Does the automorphism of `word` equal that of the boundary multitwist of
/// the table's model? `substitutions` rewrite curves without table entries
/// (e.g. a two-holed-torus block) into covered words first.
pub fn verify_section_relation(
    atlas: &CurveAtlas,
    table: &TwistTable,
    word: &TwistWord,
    substitutions: &[&NamedRelation],
) -> Result<bool, Pi1Error> {
    let pairs: Vec<(&TwistWord, &TwistWord)> = substitutions.iter().map(|r| (&r.lhs, &r.rhs)).collect();
    let covered = substitute_blocks(word, &pairs);
    let boundary: TwistWord = match atlas.model(table.model()) {
        Ok(m) => TwistWord::new(m.boundary_curves.iter().map(|b| crate::word::TwistLetter::pos(b.clone())).collect()),
        Err(_) => return Err(Pi1Error::MissingTableEntry(table.model().to_string())),
    };
    Ok(table.apply_word(&covered)?.same_action(&table.apply_word(&boundary)?))
}
