//! Independent oracles: plain vector arithmetic, written without the
//! library's matrix code.

use twistcalc::{CurveAtlas, TwistWord};

/// `⟨x, y⟩` with `⟨A_i, B_i⟩ = 1` on the first `2g` coordinates.
pub fn pairing(genus: usize, x: &[i64], y: &[i64]) -> i64 {
    (0..genus).map(|i| x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]).sum()
}

/// Act on `x` by the word, rightmost letter first: `x ↦ x + s⟨x, c⟩c`.
pub fn act(atlas: &CurveAtlas, model: &str, w: &TwistWord, x: &[i64]) -> Vec<i64> {
    let g = atlas.model(model).unwrap().genus as usize;
    let mut v = x.to_vec();
    for l in w.letters().iter().rev() {
        let c = &atlas.curve(model, &l.curve).unwrap().homology_class;
        let k = l.sign.as_i64() * pairing(g, &v, c);
        for (vi, ci) in v.iter_mut().zip(c) {
            *vi += k * ci;
        }
    }
    v
}

/// Does the word fix every basis vector?
pub fn acts_trivially(atlas: &CurveAtlas, model: &str, w: &TwistWord) -> bool {
    let r = atlas.model(model).unwrap().rank();
    (0..r).all(|j| {
        let mut e = vec![0; r];
        e[j] = 1;
        act(atlas, model, w, &e) == e
    })
}

/// Euler characteristic of a genus-`g` Lefschetz fibration over the sphere
/// with `s` singular fibers: `χ(S²)·χ(Σ_g) + s`.
pub fn euler(genus: i64, s: i64) -> i64 {
    2 * (2 - 2 * genus) + s
}

/// `(χ, σ)` of `CP² # k(-CP²)`.
pub fn rational_blowup(k: i64) -> (i64, i64) {
    (3 + k, 1 - k)
}

/// `(χ, σ)` of `K3 # k(-CP²)`; K3 has `χ = 24`, `σ = -16`.
pub fn k3_blowup(k: i64) -> (i64, i64) {
    (24 + k, -16 - k)
}

/// `(χ, σ)` of the Horikawa surface fibered by the `(c1 c2 c3 c4)^10` pencil: `c₁² = 0`, `χ_h = 3`
/// (Noether: `χ = 12χ_h - c₁²`, `σ = (c₁² - 2χ)/3`).
pub fn horikawa() -> (i64, i64) {
    let (c1sq, chi_h) = (0, 3);
    let e = 12 * chi_h - c1sq;
    (e, (c1sq - 2 * e) / 3)
}

/// Signature of a genus-2 fibration from its singular fiber counts, by
/// Matsumoto's local signature: `-3/5` per nonseparating, `-1/5` per
/// separating vanishing cycle. `None` if not an integer.
pub fn genus2_signature(n0: i64, s1: i64) -> Option<i64> {
    let fifths = -3 * n0 - s1;
    (fifths % 5 == 0).then_some(fifths / 5)
}
