#![allow(dead_code)]

use std::path::PathBuf;

use twistcalc::relation::DerivationScript;
use twistcalc::{CurveAtlas, TwistWord};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn atlas() -> CurveAtlas {
    CurveAtlas::load(data_dir().join("atlas.json")).expect("shipped atlas loads")
}

pub fn scripts() -> Vec<DerivationScript> {
    DerivationScript::load_dir(data_dir()).expect("shipped scripts load")
}

pub fn w(s: &str) -> TwistWord {
    s.parse().expect("well-formed word")
}

pub mod oracle;
pub mod transcribed;
pub mod props;

use twistcalc::fibration::{self, Summand};
use twistcalc::relation::check_script;

/// A, B, C on the closed model with their known (-1)-section counts: A from
/// the accepted section scripts, B and C from the boundary multitwists of the
/// bounded chain relations.
pub fn summands(atlas: &CurveAtlas, scripts: &[DerivationScript]) -> [Summand; 3] {
    let a = scripts
        .iter()
        .filter(|s| check_script(atlas, s).is_section_relation())
        .map(|s| fibration::sections_from_relation(s).len())
        .max()
        .unwrap_or(0);
    let boundary_len = |id: &str| atlas.relation(id).unwrap().lhs.len();
    let rhs = |id: &str| &atlas.relation(id).unwrap().rhs;
    fibration::standard_summands(
        atlas,
        "S2",
        [rhs("S2.hyperelliptic"), rhs("S2.chain5"), rhs("S2.chain4")],
        [a, boundary_len("S2_2c.chain5"), boundary_len("S2_1.chain4")],
    )
    .unwrap()
}
