//! Randomized property suites with a fixed seed. Each suite runs
//! [`CASES`] cases and returns the first failure (after shrinking) as text,
//! so both the `properties` test target and the acceptance report can run
//! them.

use proptest::prelude::*;
use proptest::sample::select;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use twistcalc::homology;
use twistcalc::relation::{apply_rule, step_images, Direction, StepContext};
use twistcalc::word::DefinitionSet;
use twistcalc::{CurveAtlas, DerivationScript, Rule, TwistLetter, TwistWord};

use super::oracle;

pub const CASES: u32 = 1000;
const SEED: [u8; 32] = *b"twist-words-fixed-seed-000000001";

pub fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn finish<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn letter(curves: Vec<String>) -> impl Strategy<Value = TwistLetter> {
    (select(curves), any::<bool>())
        .prop_map(|(c, pos)| if pos { TwistLetter::pos(c) } else { TwistLetter::neg(c) })
}

/// Words of length `0..=max` over the given curves.
pub fn word(curves: Vec<String>, max: usize) -> impl Strategy<Value = TwistWord> {
    prop::collection::vec(letter(curves), 0..=max).prop_map(TwistWord::new)
}

/// Every model with its curve names, in atlas order.
pub fn models(atlas: &CurveAtlas) -> Vec<(String, Vec<String>)> {
    atlas
        .models()
        .map(|m| (m.id.clone(), atlas.curves(&m.id).unwrap().map(|c| c.name.clone()).collect()))
        .collect()
}

/// A model together with a random word over its curves.
fn model_word(atlas: &CurveAtlas, max: usize) -> impl Strategy<Value = (String, TwistWord)> {
    select(models(atlas)).prop_flat_map(move |(m, curves)| (Just(m), word(curves, max)))
}

/// `reduce` is idempotent and leaves no cancelling neighbours.
pub fn reduction_idempotence(atlas: &CurveAtlas) -> Result<(), String> {
    finish(runner().run(&model_word(atlas, 30), |(_, w)| {
        let r = w.reduce();
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(r.letters().windows(2).all(|p| !p[0].cancels(&p[1])));
        prop_assert!(r.len() <= w.len() && (w.len() - r.len()) % 2 == 0);
        Ok(())
    }))
}

/// `w · w⁻¹` reduces to the empty word, inversion is an involution, and the
/// homology image of `w · w⁻¹` is the identity.
pub fn inverse_cancellation(atlas: &CurveAtlas) -> Result<(), String> {
    finish(runner().run(&model_word(atlas, 30), |(m, w)| {
        let inv = w.invert();
        prop_assert!(w.concat(&inv).reduce().is_empty());
        prop_assert!(inv.concat(&w).reduce().is_empty());
        prop_assert_eq!(inv.invert(), w.clone());
        prop_assert!(homology::evaluate_word(atlas, &m, &w.concat(&inv)).unwrap().is_identity());
        Ok(())
    }))
}

/// `evaluate(w₁w₂) = evaluate(w₁)·evaluate(w₂)`, the image preserves the
/// intersection form, and every column matches the vector oracle.
pub fn homomorphism(atlas: &CurveAtlas) -> Result<(), String> {
    let strat = select(models(atlas)).prop_flat_map(|(m, curves)| (Just(m), word(curves.clone(), 15), word(curves, 15)));
    finish(runner().run(&strat, |(m, w1, w2)| {
        let e = |w: &TwistWord| homology::evaluate_word(atlas, &m, w).unwrap();
        let whole = e(&w1.concat(&w2));
        prop_assert_eq!(&whole, &e(&w1).mul(&e(&w2)).unwrap());
        let model = atlas.model(&m).unwrap();
        prop_assert!(whole.preserves(&homology::intersection_form(model)).unwrap());
        let w = w1.concat(&w2);
        for j in 0..model.rank() {
            let mut basis = vec![0; model.rank()];
            basis[j] = 1;
            let col: Vec<i64> = (0..model.rank()).map(|i| whole.get(i, j)).collect();
            prop_assert_eq!(col, oracle::act(atlas, &m, &w, &basis));
        }
        Ok(())
    }))
}

/// For every π₁ table: abelianizing the automorphism of a word gives its
/// homology image, and `apply(w₁w₂) = apply(w₁) ∘ apply(w₂)`.
pub fn abelianization_functoriality(atlas: &CurveAtlas) -> Result<(), String> {
    let tables: Vec<(String, Vec<String>)> =
        atlas.pi1_tables().map(|(m, t)| (m.to_string(), t.curves().map(str::to_string).collect())).collect();
    if tables.is_empty() {
        return Err("the atlas ships no π₁ tables".into());
    }
    let strat = select(tables).prop_flat_map(|(m, curves)| (Just(m), word(curves.clone(), 15), word(curves, 15)));
    finish(runner().run(&strat, |(m, w1, w2)| {
        let table = atlas.pi1_table(&m).unwrap();
        let w = w1.concat(&w2);
        let f = table.apply_word(&w).unwrap();
        prop_assert_eq!(f.abelianization(), homology::evaluate_word(atlas, &m, &w).unwrap());
        let g = table.apply_word(&w1).unwrap().compose(&table.apply_word(&w2).unwrap());
        prop_assert!(f.same_action(&g));
        prop_assert!(f.inverse_is_consistent());
        Ok(())
    }))
}

/// Every braid-licensed pair `(x, y)` recorded for a model.
fn braid_pairs(atlas: &CurveAtlas, model: &str) -> Vec<(String, String)> {
    atlas
        .intersections(model)
        .unwrap()
        .iter()
        .filter(|&(_, _, i)| i == 1)
        .map(|(a, b, _)| (a.to_string(), b.to_string()))
        .collect()
}

#[derive(Clone, Debug)]
enum Move {
    Commute(usize),
    Cancel(usize),
    Insert(usize, TwistLetter),
    /// Plant `x y x` (sign `s`) at the position, then braid it.
    Braid(usize, String, String, bool),
}

/// Accepted elementary steps preserve the homology image. Braid moves are
/// forced by planting an `x y x` pattern for a recorded `i(x, y) = 1` pair,
/// and each planted braid must be accepted in exactly one direction.
pub fn step_soundness(atlas: &CurveAtlas) -> Result<(), String> {
    let with_braids: Vec<(String, Vec<String>, Vec<(String, String)>)> = models(atlas)
        .into_iter()
        .map(|(m, c)| {
            let b = braid_pairs(atlas, &m);
            (m, c, b)
        })
        .filter(|(_, _, b)| !b.is_empty())
        .collect();
    let strat = select(with_braids).prop_flat_map(|(m, curves, pairs)| {
        let mv = prop_oneof![
            (0..16usize).prop_map(Move::Commute),
            (0..16usize).prop_map(Move::Cancel),
            (0..16usize, letter(curves.clone())).prop_map(|(p, l)| Move::Insert(p, l)),
            (0..16usize, select(pairs), any::<bool>(), any::<bool>())
                .prop_map(|(p, (a, b), swap, s)| if swap { Move::Braid(p, b, a, s) } else { Move::Braid(p, a, b, s) }),
        ];
        (Just(m), word(curves, 15), mv)
    });
    finish(runner().run(&strat, |(m, w, mv)| {
        let ctx = StepContext::new(atlas, &m, DefinitionSet::new());
        let image = |w: &TwistWord| homology::evaluate_word(atlas, &m, w).unwrap();
        let (prev, rules) = match mv {
            Move::Commute(p) => (w, vec![Rule::Commute { position: p }]),
            Move::Cancel(p) => (w, vec![Rule::Cancel { position: p }]),
            Move::Insert(p, letter) => (w, vec![Rule::InsertPair { position: p, letter }]),
            Move::Braid(p, x, y, pos) => {
                let p = p.min(w.len());
                let l = |c: &str| if pos { TwistLetter::pos(c) } else { TwistLetter::neg(c) };
                let planted = w.splice(p, p, &TwistWord::new(vec![l(&x), l(&y), l(&x)]));
                let rules = [Direction::Forward, Direction::Backward]
                    .into_iter()
                    .map(|direction| Rule::Braid { position: p, direction })
                    .collect();
                (planted, rules)
            }
        };
        let before = image(&prev);
        let mut accepted = 0;
        for rule in &rules {
            if let Ok(next) = apply_rule(&prev, rule, &ctx) {
                accepted += 1;
                prop_assert_eq!(&image(&next), &before, "{} on `{}` changed the image", rule, prev);
            }
        }
        if rules.len() == 2 && accepted != 1 {
            return Err(TestCaseError::fail(format!("planted braid in `{prev}` accepted {accepted} times")));
        }
        Ok(())
    }))
}

/// Every step of every shipped script preserves the homology image.
pub fn shipped_step_soundness(atlas: &CurveAtlas, scripts: &[DerivationScript]) -> Result<usize, String> {
    let mut steps = 0;
    for s in scripts {
        let images = step_images(atlas, s).map_err(|e| format!("{}: {e}", s.name))?;
        for (i, pair) in images.windows(2).enumerate() {
            if pair[0] != pair[1] {
                return Err(format!("{} step {i} ({}) changes the homology image", s.name, s.steps[i].rule));
            }
        }
        steps += s.steps.len();
    }
    Ok(steps)
}

/// All five suites by name, in a fixed order.
pub fn all(atlas: &CurveAtlas) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("reduction idempotence", reduction_idempotence(atlas)),
        ("inverse cancellation", inverse_cancellation(atlas)),
        ("representation homomorphism", homomorphism(atlas)),
        ("abelianization functoriality", abelianization_functoriality(atlas)),
        ("step soundness", step_soundness(atlas)),
    ]
}

