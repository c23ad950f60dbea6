//! The integral symplectic representation on `H_1(Σ_{g,n})`.
//!
//! Sign convention (fixed here and nowhere else): a right-handed twist along
//! `c` acts by the transvection `x ↦ x + ⟨x, c⟩ c`, where `⟨x, y⟩ = xᵀ J y`
//! and `⟨Ai, Bi⟩ = +1`. A word `l1 l2 … lk` maps to the matrix product
//! `M(l1) M(l2) ⋯ M(lk)` acting on column vectors, so the rightmost letter
//! acts first.
//!
//! All arithmetic is overflow-checked; an overflow is an error, never a
//! silent wraparound.

use std::fmt;

use thiserror::Error;

use crate::atlas::{CurveAtlas, NamedRelation, SurfaceModel};
use crate::word::{DefinitionSet, Sign, TwistWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("model `{model}` has no curve `{curve}`")]
    UnknownCurve { model: String, curve: String },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("integer overflow in homology arithmetic")]
    Overflow,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix does not preserve the intersection form")]
    NotSymplectic,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepMatrix {
    n: usize,
    data: Vec<i64>,
}

impl RepMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        RepMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        RepMatrix { n, data: vec![0; n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, HomologyError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(HomologyError::DimensionMismatch(n, r.len()));
            }
            data.extend(r);
        }
        Ok(RepMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == RepMatrix::identity(self.n)
    }

    pub fn transpose(&self) -> RepMatrix {
        let mut t = RepMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn neg(&self) -> Result<RepMatrix, HomologyError> {
        let data = self.data.iter().map(|x| x.checked_neg().ok_or(HomologyError::Overflow)).collect::<Result<_, _>>()?;
        Ok(RepMatrix { n: self.n, data })
    }

    pub fn mul(&self, other: &RepMatrix) -> Result<RepMatrix, HomologyError> {
        if self.n != other.n {
            return Err(HomologyError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = RepMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let p = a.checked_mul(other.get(k, j)).ok_or(HomologyError::Overflow)?;
                    let s = out.get(i, j).checked_add(p).ok_or(HomologyError::Overflow)?;
                    out.set(i, j, s);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>, HomologyError> {
        if v.len() != self.n {
            return Err(HomologyError::DimensionMismatch(self.n, v.len()));
        }
        (0..self.n)
            .map(|i| {
                (0..self.n).try_fold(0i64, |acc, j| {
                    self.get(i, j).checked_mul(v[j]).and_then(|p| acc.checked_add(p)).ok_or(HomologyError::Overflow)
                })
            })
            .collect()
    }

    /// The leading `k × k` block.
    pub fn leading_block(&self, k: usize) -> RepMatrix {
        let mut out = RepMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// True when `Mᵀ J M = J`.
    pub fn preserves(&self, form: &RepMatrix) -> Result<bool, HomologyError> {
        Ok(self.transpose().mul(form)?.mul(self)? == *form)
    }
}

impl fmt::Display for RepMatrix {
    /// Row-major integer grid, one row per line, columns right-aligned.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The intersection form `J` of a model in the atlas basis.
pub fn intersection_form(model: &SurfaceModel) -> RepMatrix {
    let mut j = RepMatrix::zeros(model.rank());
    for i in 0..model.genus as usize {
        j.set(2 * i, 2 * i + 1, 1);
        j.set(2 * i + 1, 2 * i, -1);
    }
    j
}

/// `⟨x, y⟩ = xᵀ J y`: only the first `2g` coordinates contribute.
pub fn pairing(model: &SurfaceModel, x: &[i64], y: &[i64]) -> Result<i64, HomologyError> {
    let r = model.rank();
    if x.len() != r || y.len() != r {
        return Err(HomologyError::DimensionMismatch(r, x.len().max(y.len())));
    }
    let mut acc = 0i64;
    for i in 0..model.genus as usize {
        let (a, b) = (2 * i, 2 * i + 1);
        let t = x[a]
            .checked_mul(y[b])
            .and_then(|p| x[b].checked_mul(y[a]).and_then(|q| p.checked_sub(q)))
            .ok_or(HomologyError::Overflow)?;
        acc = acc.checked_add(t).ok_or(HomologyError::Overflow)?;
    }
    Ok(acc)
}

/// Matrix of `x ↦ x + s·⟨x, c⟩ c`.
pub fn transvection_of_class(model: &SurfaceModel, c: &[i64], sign: Sign) -> Result<RepMatrix, HomologyError> {
    let r = model.rank();
    let s = sign.as_i64();
    let mut m = RepMatrix::identity(r);
    for j in 0..r {
        let mut e = vec![0i64; r];
        e[j] = 1;
        let k = pairing(model, &e, c)?.checked_mul(s).ok_or(HomologyError::Overflow)?;
        if k == 0 {
            continue;
        }
        for (i, ci) in c.iter().enumerate() {
            let v = m.get(i, j).checked_add(k.checked_mul(*ci).ok_or(HomologyError::Overflow)?).ok_or(HomologyError::Overflow)?;
            m.set(i, j, v);
        }
    }
    Ok(m)
}

fn model_of<'a>(atlas: &'a CurveAtlas, model: &str) -> Result<&'a SurfaceModel, HomologyError> {
    atlas.model(model).map_err(|_| HomologyError::UnknownModel(model.to_string()))
}

/// Transvection of a named atlas curve.
pub fn transvection(atlas: &CurveAtlas, model: &str, curve: &str, sign: Sign) -> Result<RepMatrix, HomologyError> {
    let m = model_of(atlas, model)?;
    let rec = atlas
        .curve(model, curve)
        .map_err(|_| HomologyError::UnknownCurve { model: model.to_string(), curve: curve.to_string() })?;
    transvection_of_class(m, &rec.homology_class, sign)
}

/// Image of a word whose letters are all atlas curves of `model`.
pub fn evaluate_word(atlas: &CurveAtlas, model: &str, w: &TwistWord) -> Result<RepMatrix, HomologyError> {
    let m = model_of(atlas, model)?;
    let mut acc = RepMatrix::identity(m.rank());
    for l in w {
        acc = acc.mul(&transvection(atlas, model, &l.curve, l.sign)?)?;
    }
    debug_assert!(acc.preserves(&intersection_form(m)).unwrap_or(false));
    Ok(acc)
}

/// Like [`evaluate_word`], expanding conjugate definitions first.
pub fn evaluate_with_defs(
    atlas: &CurveAtlas,
    model: &str,
    w: &TwistWord,
    defs: &DefinitionSet,
) -> Result<RepMatrix, HomologyError> {
    evaluate_word(atlas, model, &w.expand_definitions(defs)?)
}

/// Evaluate and also verify `Mᵀ J M = J`.
pub fn evaluate_checked(atlas: &CurveAtlas, model: &str, w: &TwistWord) -> Result<RepMatrix, HomologyError> {
    let m = evaluate_word(atlas, model, w)?;
    if !m.preserves(&intersection_form(model_of(atlas, model)?))? {
        return Err(HomologyError::NotSymplectic);
    }
    Ok(m)
}

/// Project a matrix on `H_1(Σ_{g,n})` to the closed surface `H_1(Σ_g)`.
///
/// Boundary classes span an invariant subspace (every transvection fixes
/// them), so the action on the quotient is the leading `2g × 2g` block.
pub fn cap_matrix(model: &SurfaceModel, m: &RepMatrix) -> RepMatrix {
    m.leading_block(2 * model.genus as usize)
}

/// Image of a word after gluing a disk to every boundary component.
pub fn cap_boundaries(atlas: &CurveAtlas, model: &str, w: &TwistWord) -> Result<RepMatrix, HomologyError> {
    let m = model_of(atlas, model)?;
    Ok(cap_matrix(m, &evaluate_word(atlas, model, w)?))
}

/// True iff both sides of the relation have the same image.
pub fn check_relation(atlas: &CurveAtlas, rel: &NamedRelation) -> Result<bool, HomologyError> {
    let defs = rel.definitions();
    let l = evaluate_with_defs(atlas, &rel.model, &rel.lhs, &defs)?;
    let r = evaluate_with_defs(atlas, &rel.model, &rel.rhs, &defs)?;
    Ok(l == r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_genus2() -> SurfaceModel {
        SurfaceModel { id: "S2".into(), genus: 2, boundary_count: 0, boundary_curves: vec![], notes: String::new() }
    }

    #[test]
    fn transvection_of_a1_moves_only_b1() {
        let m = closed_genus2();
        let t = transvection_of_class(&m, &[1, 0, 0, 0], Sign::Pos).unwrap();
        // Column j is the image of the j-th basis vector; ⟨B1, A1⟩ = -1.
        assert_eq!(t.apply(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(t.apply(&[0, 1, 0, 0]).unwrap(), vec![-1, 1, 0, 0]);
        assert_eq!(t.apply(&[0, 0, 1, 0]).unwrap(), vec![0, 0, 1, 0]);
        assert_eq!(t.apply(&[0, 0, 0, 1]).unwrap(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn inverse_transvection_cancels() {
        let m = closed_genus2();
        let c = [1, 2, -1, 3];
        let p = transvection_of_class(&m, &c, Sign::Pos).unwrap();
        let q = transvection_of_class(&m, &c, Sign::Neg).unwrap();
        assert!(p.mul(&q).unwrap().is_identity());
        assert!(p.preserves(&intersection_form(&m)).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let big = RepMatrix::from_rows(vec![vec![i64::MAX, 0], vec![0, 1]]).unwrap();
        assert_eq!(big.mul(&big), Err(HomologyError::Overflow));
    }

    #[test]
    fn grid_display() {
        let m = RepMatrix::from_rows(vec![vec![1, -1], vec![0, 1]]).unwrap();
        assert_eq!(m.to_string(), " 1 -1\n 0  1");
    }
}
