mod common;

use common::{atlas, data_dir, oracle, transcribed, w};
use serde_json::Value;
use twistcalc::atlas::{AtlasError, RenamingMap, Violation};
use twistcalc::word::DefinitionSet;
use twistcalc::{CurveAtlas, TwistWord};

fn document() -> Value {
    serde_json::from_str(&std::fs::read_to_string(data_dir().join("atlas.json")).unwrap()).unwrap()
}

fn reload(doc: &Value) -> Result<CurveAtlas, AtlasError> {
    CurveAtlas::from_json(&doc.to_string())
}

fn find<'a>(doc: &'a mut Value, key: &str, pred: impl Fn(&Value) -> bool) -> &'a mut Value {
    doc[key].as_array_mut().unwrap().iter_mut().find(|v| pred(v)).expect("record present")
}

#[test]
fn shipped_atlas_validates() {
    let a = atlas();
    let report = a.validate();
    for v in &report.violations {
        eprintln!("{v}");
    }
    assert!(report.is_ok());
}

#[test]
fn one_holed_model_has_the_expected_curves() {
    let a = atlas();
    let names: Vec<&str> = a.curves("S2_1").unwrap().map(|c| c.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, ["a1", "a2", "a3", "a4", "b1", "b2", "d1"]);
    assert!(a.is_boundary("S2_1", "d1"));
}

#[test]
fn sigma5_and_a10_meet_twice() {
    assert_eq!(atlas().intersection("S2_7", "sigma5", "a10"), Some(2));
    assert_eq!(atlas().intersection("S2_8", "sigma5", "a11"), Some(2));
}

#[test]
fn recorded_intersections_satisfy_parity_and_bound() {
    // Independent of the validator: recompute every algebraic pairing.
    let a = atlas();
    for m in a.models() {
        let g = m.genus as usize;
        for (x, y, i) in a.intersections(&m.id).unwrap().iter() {
            let cx = &a.curve(&m.id, x).unwrap().homology_class;
            let cy = &a.curve(&m.id, y).unwrap().homology_class;
            let p = oracle::pairing(g, cx, cy);
            assert!(p.unsigned_abs() <= u64::from(i), "{}: |<{x},{y}>| = {p} > {i}", m.id);
            assert_eq!((p - i64::from(i)).rem_euclid(2), 0, "{}: parity of ({x}, {y})", m.id);
        }
    }
}

#[test]
fn boundary_classes_pair_trivially_and_sum_to_zero() {
    let a = atlas();
    for m in a.models() {
        let g = m.genus as usize;
        let mut sum = vec![0; m.rank()];
        for d in &m.boundary_curves {
            let cd = &a.curve(&m.id, d).unwrap().homology_class;
            for c in a.curves(&m.id).unwrap() {
                assert_eq!(oracle::pairing(g, cd, &c.homology_class), 0, "{}: {d} vs {}", m.id, c.name);
            }
            sum.iter_mut().zip(cd).for_each(|(s, x)| *s += x);
        }
        assert!(sum.iter().all(|&x| x == 0), "{}: boundary sum {sum:?}", m.id);
        assert_eq!(m.rank(), 2 * m.genus as usize + (m.boundary_count as usize).saturating_sub(1));
    }
}

#[test]
fn relation_with_unknown_curve_is_a_dangling_reference() {
    let mut doc = document();
    let rel = find(&mut doc, "relations", |r| r["id"] == "S2_1.chain4");
    rel["rhs"] = Value::from("a1 zeta");
    assert!(matches!(reload(&doc), Err(AtlasError::DanglingReference { .. })));
}

#[test]
fn parity_violation_is_reported() {
    let mut doc = document();
    let rec = find(&mut doc, "intersections", |r| {
        r["model"] == "S2_1" && ((r["a"] == "a1" && r["b"] == "b1") || (r["a"] == "b1" && r["b"] == "a1"))
    });
    rec["i"] = Value::from(0);
    let report = reload(&doc).unwrap().validate();
    assert!(report.violations.iter().any(|v| matches!(v, Violation::Intersection { model, .. } if model == "S2_1")));
}

#[test]
fn failing_lantern_instance_is_reported() {
    let mut doc = document();
    let sigma = find(&mut doc, "curves", |c| c["model"] == "S2_2" && c["name"] == "sigma");
    let class = sigma["homology_class"].as_array_mut().unwrap();
    class[0] = Value::from(class[0].as_i64().unwrap() + 2);
    let report = reload(&doc).unwrap().validate();
    assert!(report.violations.contains(&Violation::RelationFails { relation: "S2_2.lantern".into() }));
}

#[test]
fn quoted_relations_are_shipped_verbatim() {
    let a = atlas();
    for (id, lhs, rhs) in transcribed::RELATIONS {
        let rel = a.relation(id).unwrap();
        assert_eq!(rel.lhs, w(lhs), "{id} lhs");
        assert_eq!(rel.rhs, w(rhs), "{id} rhs");
    }
}

#[test]
fn three_hole_final_renames_to_the_four_hole_starting_line() {
    let a = atlas();
    let script = common::scripts().into_iter().find(|s| s.name == "s4_3").unwrap();
    let map = a.renaming("S2_3->S2_4").unwrap();
    let renamed = map.apply(&script.final_word).unwrap();
    // delta3 delta4 gamma = a3 b2 (a5 a4 a3 b2)^2 a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7
    assert_eq!(renamed, w("a3 b2 (a5 a4 a3 b2)^2 a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7"));
    assert_eq!(map.apply(&script.lhs).unwrap(), w("d3 d4 gamma"));
    let beta1 = map.apply_definition(&script.defs[0]).unwrap();
    assert_eq!(DefinitionSet::from_defs([beta1]).expansion_of("beta1").unwrap(), w("a1' a2' b1 a2 a1"));
}

#[test]
fn identity_renaming_and_unmapped_curves() {
    let a = atlas();
    let id = RenamingMap::identity("id", "S2_4", a.curves("S2_4").unwrap().map(|c| c.name.clone()));
    let x = w("a3 b2 sigma1 a7'");
    assert_eq!(id.apply(&x).unwrap(), x);
    let map = a.renaming("S2_3->S2_4").unwrap();
    assert!(matches!(map.apply(&w("a1 sigma2")), Err(AtlasError::UnmappedCurve { .. })));
}

#[test]
fn renamings_compose() {
    let a = atlas();
    let (r1, r2) = (a.renaming("S2_4->S2_5").unwrap(), a.renaming("S2_5->S2_6").unwrap());
    let composite = r1.then(r2);
    let x = w("a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 b2 a5 a4' a3 b2 a3 beta2 sigma d1 d3");
    assert_eq!(composite.apply(&x).unwrap(), r2.apply(&r1.apply(&x).unwrap()).unwrap());
    for m in a.renamings() {
        assert!(m.is_injective(), "{}", m.id);
    }
}

#[test]
fn renamings_preserve_recorded_intersections() {
    let a = atlas();
    for m in a.renamings() {
        for (x, y, i) in a.intersections(&m.source).unwrap().iter() {
            if let (Some(fx), Some(fy)) = (m.image(x), m.image(y)) {
                if let Some(j) = a.intersection(&m.target, fx, fy) {
                    assert_eq!(i, j, "{}: i({x}, {y}) vs i({fx}, {fy})", m.id);
                }
            }
        }
    }
}

#[test]
fn empty_word_is_fine_everywhere() {
    let a = atlas();
    let id = a.renaming("S2_3->S2_4").unwrap();
    assert_eq!(id.apply(&TwistWord::empty()).unwrap(), TwistWord::empty());
}
