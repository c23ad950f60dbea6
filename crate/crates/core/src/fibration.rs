//! Lefschetz fibrations from positive twist factorizations.
//!
//! A positive word whose capped image is trivial is the global monodromy of
//! a genus-`g` Lefschetz fibration over the sphere, one singular fiber per
//! letter. For `g = 2` the fibration is hyperelliptic and
//!
//! * `χ = 2(2 - 2g) + s = s - 4`,
//! * `σ = -(3/5) n0 - (1/5) s1`,
//!
//! where `n0` counts nonseparating and `s1` separating vanishing cycles.
//! A relation `w = δ1^k1 ⋯ δn^kn` gives `n` disjoint sections with squares
//! `-k1, …, -kn`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::atlas::CurveAtlas;
use crate::homology::{self, HomologyError};
use crate::relation::DerivationScript;
use crate::word::TwistWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("letter `{0}` is left-handed; monodromies are products of right-handed twists")]
    NegativeLetter(String),
    #[error("letter `{0}` is boundary-parallel")]
    BoundaryLetter(String),
    #[error("model `{model}` has no curve `{curve}`")]
    UnknownCurve { model: String, curve: String },
    #[error("signature -({0})/5 is not an integer although the word is a relator")]
    NonIntegerSignature(i64),
    #[error("fiber sum needs {needed} sections on each side, {left} and {right} available")]
    InsufficientSections { needed: usize, left: usize, right: usize },
    #[error("the sum has no summands")]
    EmptySum,
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleClass {
    Nonseparating,
    /// Separating, bounding genus 1 on each side (the only option for g = 2).
    Separating,
}

/// A positive word on a model, with the squares of its known disjoint
/// sections (empty when none are known).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub model: String,
    pub word: TwistWord,
    pub sections: Vec<i64>,
}

impl Factorization {
    /// Checks positivity and that no letter is boundary-parallel.
    pub fn new(atlas: &CurveAtlas, model: &str, word: TwistWord, sections: Vec<i64>) -> Result<Self, FibrationError> {
        for l in &word {
            if !l.is_positive() {
                return Err(FibrationError::NegativeLetter(l.to_string()));
            }
            let rec = atlas
                .curve(model, &l.curve)
                .map_err(|_| FibrationError::UnknownCurve { model: model.to_string(), curve: l.curve.clone() })?;
            if rec.boundary_parallel {
                return Err(FibrationError::BoundaryLetter(l.to_string()));
            }
        }
        Ok(Factorization { model: model.to_string(), word, sections })
    }
}

/// Per-letter tags: a nonzero homology class is nonseparating, a zero
/// class (not boundary-parallel) is separating.
pub fn classify_cycles(atlas: &CurveAtlas, f: &Factorization) -> Result<Vec<CycleClass>, FibrationError> {
    f.word
        .iter()
        .map(|l| {
            let rec = atlas
                .curve(&f.model, &l.curve)
                .map_err(|_| FibrationError::UnknownCurve { model: f.model.clone(), curve: l.curve.clone() })?;
            if rec.boundary_parallel {
                return Err(FibrationError::BoundaryLetter(l.to_string()));
            }
            Ok(if rec.homology_class.iter().any(|&x| x != 0) {
                CycleClass::Nonseparating
            } else {
                CycleClass::Separating
            })
        })
        .collect()
}

/// A signature stored exactly as a multiple of 1/5.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    fifths: i64,
}

impl Signature {
    pub fn from_fifths(fifths: i64) -> Self {
        Signature { fifths }
    }

    pub fn integer(&self) -> Option<i64> {
        (self.fifths % 5 == 0).then_some(self.fifths / 5)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}/5", self.fifths),
        }
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.integer() {
            Some(n) => s.serialize_i64(n),
            None => s.serialize_str(&self.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectionFamily {
    pub count: usize,
    pub square: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibInvariants {
    pub s: usize,
    pub n0: usize,
    pub s1: usize,
    pub euler: i64,
    pub signature: Signature,
    pub sections: Vec<SectionFamily>,
    pub total_space_hint: Option<&'static str>,
}

/// Group section squares into families, most negative square last.
pub fn section_families(squares: &[i64]) -> Vec<SectionFamily> {
    let mut by_square: BTreeMap<std::cmp::Reverse<i64>, usize> = BTreeMap::new();
    for &q in squares {
        *by_square.entry(std::cmp::Reverse(q)).or_insert(0) += 1;
    }
    by_square.into_iter().map(|(q, count)| SectionFamily { count, square: q.0 }).collect()
}

/// The three genus-2 total spaces recognised by `(χ, σ)`.
pub fn total_space_hint(euler: i64, signature: Signature) -> Option<&'static str> {
    match (euler, signature.integer()?) {
        (16, -12) => Some("CP2 # 13 (-CP2)"),
        (26, -18) => Some("K3 # 2 (-CP2)"),
        (36, -24) => Some("Horikawa surface H"),
        _ => None,
    }
}

/// Euler characteristic and (for genus 2) signature of the fibration.
///
/// When the word caps to the identity it is a relator, and a non-integral
/// signature is reported as an error.
pub fn invariants(atlas: &CurveAtlas, f: &Factorization) -> Result<FibInvariants, FibrationError> {
    let classes = classify_cycles(atlas, f)?;
    let genus = i64::from(atlas.model(&f.model).map_err(|_| HomologyError::UnknownModel(f.model.clone()))?.genus);
    let s = classes.len();
    let n0 = classes.iter().filter(|c| **c == CycleClass::Nonseparating).count();
    let s1 = s - n0;
    let euler = 2 * (2 - 2 * genus) + s as i64;
    let signature = Signature::from_fifths(-(3 * n0 as i64 + s1 as i64));
    if signature.integer().is_none() && homology::cap_boundaries(atlas, &f.model, &f.word)?.is_identity() {
        return Err(FibrationError::NonIntegerSignature(3 * n0 as i64 + s1 as i64));
    }
    Ok(FibInvariants {
        s,
        n0,
        s1,
        euler,
        signature,
        sections: section_families(&f.sections),
        total_space_hint: total_space_hint(euler, signature),
    })
}

/// One section per boundary curve of an accepted script; a boundary curve
/// appearing `k` times on the left side gives square `-k`.
pub fn sections_from_relation(script: &DerivationScript) -> Vec<(String, i64)> {
    let mut k: BTreeMap<&str, i64> = BTreeMap::new();
    for l in &script.lhs {
        *k.entry(l.curve.as_str()).or_insert(0) += l.sign.as_i64();
    }
    let mut out: Vec<(String, i64)> = Vec::new();
    for l in &script.lhs {
        if !out.iter().any(|(c, _)| *c == l.curve) {
            out.push((l.curve.clone(), -k[l.curve.as_str()]));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    Contradiction,
    Inconclusive,
}

fn is_square(k: u64) -> bool {
    let r = (k as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|x| x * x == k)
}

/// Blow-down test for `m` disjoint (-1)-sections on a fibration whose total
/// space is `CP2 # k(-CP2)`: blowing all of them down when `m = k` leaves a
/// genus-2 class of square `k` in a lattice where every square is `d²`.
pub fn max_sections_obstruction(m: u64, k: u64) -> Obstruction {
    if m == k && !is_square(k) {
        Obstruction::Contradiction
    } else {
        Obstruction::Inconclusive
    }
}

/// Largest section count this test allows, `k - 1`, when `k` is not a
/// perfect square.
pub fn section_bound(k: u64) -> Option<u64> {
    (k > 0 && !is_square(k)).then_some(k - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberSum {
    pub word: String,
    pub invariants: FibInvariants,
}

/// Fiber sum with identity gluing, sewing `sewn` sections pairwise: the
/// `i`-th section of each side is glued, squares adding. Remaining sections
/// do not survive.
pub fn fiber_sum(
    atlas: &CurveAtlas,
    f1: &Factorization,
    f2: &Factorization,
    sewn: usize,
) -> Result<(Factorization, FiberSum), FibrationError> {
    if f1.sections.len() < sewn || f2.sections.len() < sewn {
        return Err(FibrationError::InsufficientSections { needed: sewn, left: f1.sections.len(), right: f2.sections.len() });
    }
    let i1 = invariants(atlas, f1)?;
    let i2 = invariants(atlas, f2)?;
    let sections: Vec<i64> = f1.sections.iter().zip(&f2.sections).take(sewn).map(|(a, b)| a + b).collect();
    let word = f1.word.concat(&f2.word);
    let f = Factorization { model: f1.model.clone(), word, sections };
    let euler = i1.euler + i2.euler + 4;
    let signature = Signature::from_fifths(i1.signature.fifths + i2.signature.fifths);
    let inv = FibInvariants {
        s: i1.s + i2.s,
        n0: i1.n0 + i2.n0,
        s1: i1.s1 + i2.s1,
        euler,
        signature,
        sections: section_families(&f.sections),
        total_space_hint: total_space_hint(euler, signature),
    };
    Ok((f.clone(), FiberSum { word: f.word.to_string(), invariants: inv }))
}

/// One of the three genus-2 building blocks, with its known disjoint
/// (-1)-sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub name: String,
    pub factorization: Factorization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub section_square: i64,
    pub invariants: FibInvariants,
    /// Invariants recomputed directly from the concatenated word.
    pub direct_euler: i64,
    pub direct_signature: Signature,
}

/// Fiber sum of `p` copies of A, `q` of B and `r` of C, sewing one
/// (-1)-section of every summand into a single section.
pub fn sewn_section_report(
    atlas: &CurveAtlas,
    summands: &[Summand; 3],
    p: usize,
    q: usize,
    r: usize,
) -> Result<SectionReport, FibrationError> {
    let parts: Vec<&Summand> = [(p, &summands[0]), (q, &summands[1]), (r, &summands[2])]
        .into_iter()
        .flat_map(|(k, s)| std::iter::repeat(s).take(k))
        .collect();
    let (first, rest) = parts.split_first().ok_or(FibrationError::EmptySum)?;
    let mut acc = first.factorization.clone();
    acc.sections.truncate(1);
    let mut inv = invariants(atlas, &acc)?;
    for s in rest {
        let (f, sum) = fiber_sum(atlas, &acc, &s.factorization, 1)?;
        acc = f;
        inv = sum.invariants;
    }
    let direct = invariants(atlas, &Factorization { sections: acc.sections.clone(), ..acc.clone() })?;
    Ok(SectionReport {
        p,
        q,
        r,
        section_square: acc.sections.first().copied().unwrap_or(0),
        invariants: inv,
        direct_euler: direct.euler,
        direct_signature: direct.signature,
    })
}

/// Build the summands A, B, C from data: words are the right sides of the
/// closed-surface relations `hyperelliptic`, `chain5`, `chain4` on `closed`;
/// section counts are the numbers of boundary curves of the accepted
/// section relations supplied.
pub fn standard_summands(
    atlas: &CurveAtlas,
    closed: &str,
    words: [&TwistWord; 3],
    section_counts: [usize; 3],
) -> Result<[Summand; 3], FibrationError> {
    let names = ["A", "B", "C"];
    let mk = |i: usize| -> Result<Summand, FibrationError> {
        Ok(Summand {
            name: names[i].to_string(),
            factorization: Factorization::new(atlas, closed, words[i].clone(), vec![-1; section_counts[i]])?,
        })
    };
    Ok([mk(0)?, mk(1)?, mk(2)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstruction_matches_perfect_squares() {
        assert_eq!(max_sections_obstruction(13, 13), Obstruction::Contradiction);
        assert_eq!(max_sections_obstruction(12, 13), Obstruction::Inconclusive);
        assert_eq!(max_sections_obstruction(16, 16), Obstruction::Inconclusive);
        assert_eq!(section_bound(13), Some(12));
        assert_eq!(section_bound(16), None);
    }

    #[test]
    fn signature_display() {
        assert_eq!(Signature::from_fifths(-60).to_string(), "-12");
        assert_eq!(Signature::from_fifths(-3).to_string(), "-3/5");
    }

    #[test]
    fn families_group_by_square() {
        let f = section_families(&[-1, -2, -1]);
        assert_eq!(f, vec![SectionFamily { count: 2, square: -1 }, SectionFamily { count: 1, square: -2 }]);
    }
}
