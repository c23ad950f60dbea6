//! Regenerates `data/s*.script.json` from a compact description of each
//! derivation.
//!
//! Each script is written as a short list of coarse, derivation-level moves
//! (substitute a relation, insert a cancelling pair, fold a definition) and
//! "rewrite this segment into that one" requests. The latter are expanded
//! into explicit Commute/Braid/Cancel steps by
//! [`search_elementary_path`], so the shipped files never need search to be
//! checked.
//!
//! Usage: `author-scripts [DATA_DIR] [TOUCHED_OUT]` (default `data`). With
//! `TOUCHED_OUT`, also writes the curve pairs whose intersection numbers the
//! scripts rely on (one `model a b` line per pair), which is the set the
//! atlas is expected to record.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use twistcalc::relation::{
    apply_rule, check_script, search_elementary_path, verify_shipped_scripts, Direction, SearchBudget, StepContext,
};
use twistcalc::word::DefinitionSet;
use twistcalc::{ConjugateDefinition, CurveAtlas, DerivationScript, DerivationStep, Rule, TwistLetter, TwistWord};

use Direction::{Backward, Forward};

fn w(s: &str) -> TwistWord {
    TwistWord::parse(s).unwrap_or_else(|e| panic!("bad word `{s}`: {e}"))
}

fn letter(s: &str) -> TwistLetter {
    let word = w(s);
    assert_eq!(word.len(), 1, "`{s}` is not a single letter");
    word.letters()[0].clone()
}

fn def(name: &str, conjugator: &str, core: &str) -> ConjugateDefinition {
    ConjugateDefinition::new(name, w(conjugator), letter(core))
}

/// Shift the positions of a step found on a segment to the whole word.
fn offset_rule(rule: Rule, by: usize) -> Rule {
    match rule {
        Rule::Commute { position } => Rule::Commute { position: position + by },
        Rule::Braid { position, direction } => Rule::Braid { position: position + by, direction },
        Rule::Cancel { position } => Rule::Cancel { position: position + by },
        other => panic!("search produced an unexpected rule {other}"),
    }
}

struct Builder<'a> {
    atlas: &'a CurveAtlas,
    name: String,
    model: String,
    lhs: TwistWord,
    defs: Vec<ConjugateDefinition>,
    steps: Vec<DerivationStep>,
    cur: TwistWord,
}

impl<'a> Builder<'a> {
    fn new(atlas: &'a CurveAtlas, name: &str, model: &str, lhs: &str, defs: Vec<ConjugateDefinition>) -> Self {
        Builder {
            atlas,
            name: name.into(),
            model: model.into(),
            lhs: w(lhs),
            defs,
            steps: Vec::new(),
            cur: w(lhs),
        }
    }

    fn ctx(&self) -> StepContext<'_> {
        let mut ctx = StepContext::new(self.atlas, &self.model, DefinitionSet::from_defs(self.defs.clone()));
        ctx.central = self.lhs.iter().all(|l| self.atlas.is_boundary(&self.model, &l.curve));
        ctx
    }

    fn rule(&mut self, rule: Rule) -> &mut Self {
        let next = apply_rule(&self.cur, &rule, &self.ctx())
            .unwrap_or_else(|e| panic!("{}: step {} ({rule}) on `{}`: {e}", self.name, self.steps.len(), self.cur));
        self.steps.push(DerivationStep { rule, result: next.clone() });
        self.cur = next;
        self
    }

    fn find(&self, pattern: &str) -> usize {
        let p = w(pattern);
        self.cur
            .letters()
            .windows(p.len())
            .position(|win| win == p.letters())
            .unwrap_or_else(|| panic!("{}: `{pattern}` does not occur in `{}`", self.name, self.cur))
    }

    fn insert(&mut self, position: usize, l: &str) -> &mut Self {
        self.rule(Rule::InsertPair { position, letter: letter(l) })
    }

    fn commute(&mut self, position: usize) -> &mut Self {
        self.rule(Rule::Commute { position })
    }

    fn cancel(&mut self, position: usize) -> &mut Self {
        self.rule(Rule::Cancel { position })
    }

    fn cancel_at(&mut self, pattern: &str) -> &mut Self {
        let p = self.find(pattern);
        self.cancel(p)
    }

    fn subst(&mut self, relation: &str, position: usize, direction: Direction, rotation: usize) -> &mut Self {
        self.rule(Rule::SubstituteRelation { relation: relation.into(), position, direction, rotation })
    }

    fn fold(&mut self, name: &str, pattern: &str) -> &mut Self {
        let position = self.find(pattern);
        self.rule(Rule::FoldDef { name: name.into(), position })
    }

    fn expand(&mut self, name: &str) -> &mut Self {
        let position = self.find(name);
        self.rule(Rule::ExpandDef { name: name.into(), position })
    }

    fn rotate(&mut self, shift: usize) -> &mut Self {
        self.rule(Rule::CentralRotate { shift })
    }

    /// Move the last letter to the front (legal for central words).
    fn last_to_front(&mut self) -> &mut Self {
        let n = self.cur.len();
        self.rotate(n - 1)
    }

    /// Rewrite the segment `[start, start + len)` into `target` with
    /// elementary moves found by search.
    fn rewrite(&mut self, start: usize, len: usize, target: &str) -> &mut Self {
        let seg = self.cur.slice(start, start + len);
        let to = w(target);
        let found = search_elementary_path(&seg, &to, &self.ctx(), SearchBudget::default())
            .unwrap_or_else(|e| panic!("{}: `{seg}` -> `{to}`: {e}", self.name));
        let (prefix, suffix) = (self.cur.slice(0, start), self.cur.slice(start + len, self.cur.len()));
        for s in found {
            let rule = offset_rule(s.rule, start);
            let expected = prefix.concat(&s.result).concat(&suffix);
            self.rule(rule);
            assert_eq!(self.cur, expected);
        }
        assert_eq!(self.cur.slice(start, start + to.len()), to);
        self
    }

    /// Rewrite the first occurrence of `pattern` into `target`.
    fn rewrite_pat(&mut self, pattern: &str, target: &str) -> &mut Self {
        let start = self.find(pattern);
        self.rewrite(start, w(pattern).len(), target)
    }

    /// Reorder the segment `[start, start + len)` into `target` by adjacent
    /// commutations only (target may contain inverse pairs).
    fn permute(&mut self, start: usize, len: usize, target: &str) -> &mut Self {
        let to = w(target);
        assert_eq!(to.len(), len, "{}: `{target}` is not a permutation", self.name);
        for (i, t) in to.iter().enumerate() {
            let j = (start + i..start + len)
                .find(|&j| self.cur.letters()[j] == *t)
                .unwrap_or_else(|| panic!("{}: `{t}` missing while permuting to `{target}`", self.name));
            for k in (start + i..j).rev() {
                self.commute(k);
            }
        }
        self
    }

    fn permute_pat(&mut self, pattern: &str, target: &str) -> &mut Self {
        let start = self.find(pattern);
        self.permute(start, w(pattern).len(), target)
    }

    /// Rewrite the whole word.
    fn rewrite_all(&mut self, target: &str) -> &mut Self {
        let n = self.cur.len();
        self.rewrite(0, n, target)
    }

    fn expect(&mut self, target: &str) -> &mut Self {
        assert_eq!(self.cur, w(target), "{}: unexpected intermediate word", self.name);
        self
    }

    fn finish(&self) -> DerivationScript {
        DerivationScript {
            name: self.name.clone(),
            model: self.model.clone(),
            lhs: self.lhs.clone(),
            defs: self.defs.clone(),
            steps: self.steps.clone(),
            final_word: self.cur.clone(),
        }
    }
}

/// `d1 = (a1 b1 a2 b2)^10` rearranged into two copies of `a3 a4 X`.
fn s4_1(atlas: &CurveAtlas) -> DerivationScript {
    let x = "b2 a2 b1 a1 a1 b1 a2 b2";
    let half = format!("(a1 b1 a2)^4 {x}");
    let mut b = Builder::new(atlas, "s4_1", "S2_1", "d1", vec![]);
    b.subst("S2_1.chain4", 0, Forward, 0)
        .rewrite(0, 20, &half)
        .rewrite(20, 20, &half)
        .subst("S2_1.two_holed_torus", 0, Backward, 0)
        .subst("S2_1.two_holed_torus", 10, Backward, 0)
        .expect(&format!("a3 a4 {x} a3 a4 {x}"));
    b.finish()
}

fn s4_2(atlas: &CurveAtlas) -> DerivationScript {
    let x = "b2 a2 b1 a1 a1 b1 a2 b2";
    let half = format!("(a1 b1 a2)^4 {x}");
    let mut b = Builder::new(atlas, "s4_2", "S2_2", "d1 d2", vec![]);
    b.insert(0, "a4'")
        .insert(1, "a3'")
        .subst("S2_2.lantern", 2, Forward, 0)
        .subst("S2_2.chain4", 2, Forward, 0)
        .rewrite(2, 20, &half)
        .rewrite(22, 20, &half)
        .subst("S2_2.two_holed_torus", 2, Backward, 0)
        .subst("S2_2.two_holed_torus", 12, Backward, 0)
        .cancel(1)
        .cancel(0)
        .expect(&format!("{x} a3 a4 {x} sigma a5"));
    b.finish()
}

/// Open up `a4 a5` next to the front boundary pair and apply the lantern.
fn lantern_opening(b: &mut Builder, lantern: &str) {
    b.insert(0, "a5'").insert(0, "a4'").commute(1).subst(lantern, 2, Forward, 0);
}

fn s4_3(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![def("beta", "a5' a4'", "b2")];
    let mut b = Builder::new(atlas, "s4_3", "S2_3", "d1 d2 d3", defs);
    lantern_opening(&mut b, "S2_3.lantern");
    b.expect("a4' a5' gamma sigma a6 d3");
    // gamma = (a4 a5 a3 b2)^3 a2' a1'
    b.insert(3, "a1").insert(4, "a2").subst("S2_3.star_gamma", 2, Forward, 0);
    b.last_to_front()
        .rewrite_pat("a2' a1'", "a1' a2'")
        .rewrite_all("a1' a2' d3 a4' a5' (a4 a5 a3 b2)^3 sigma a6")
        .permute_pat("a4' a5' a4", "a4' a4 a5'")
        .cancel_at("a4' a4")
        .cancel_at("a5' a5");
    // d3 = (a1 a2 a3 b1)^3 a5' a4'
    let p = b.find("d3");
    b.insert(p + 1, "a4").insert(p + 2, "a5").subst("S2_3.star_d3", p, Forward, 0);
    b.permute_pat("a1' a2' a1", "a1' a1 a2'")
        .cancel_at("a1' a1")
        .cancel_at("a2' a2")
        .rewrite_pat("a5' a4' a3", "a3 a5' a4'")
        .fold("beta", "a5' a4' b2 a4 a5")
        .expect("a3 b1 (a1 a2 a3 b1)^2 a3 beta a3 b2 a4 a5 a3 b2 sigma a6");
    b.finish()
}

fn s4_4(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![def("beta1", "a1' a2'", "b1"), def("beta2", "a5 a4", "b2")];
    let mut b = Builder::new(atlas, "s4_4", "S2_4", "d1 d2 d3 d4", defs);
    lantern_opening(&mut b, "S2_4.lantern");
    b.rewrite_all("d3 d4 gamma a4' a5' sigma a6")
        .subst("S2_4.three_hole", 0, Forward, 10)
        .rewrite_pat("a5 a4 a3 b2 a4' a5'", "a3 a5 a4 b2 a4' a5'")
        .fold("beta2", "a5 a4 b2 a4' a5'")
        .expect("a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 b2 a5 a4 a3 b2 a3 beta2 sigma a6");
    b.finish()
}

/// Move `a4'` from the right of `P` to its left, where `a4 P = P' a4` holds
/// among positive words: `P a4' = a4' (a4 P) a4' = a4' P' a4 a4'`.
fn pass_inverse_left(b: &mut Builder, p: &str, p_shifted: &str) {
    let at = b.find(&format!("{p} a4'"));
    let n = w(p).len();
    b.insert(at, "a4'");
    b.rewrite(at + 1, n + 1, &format!("{p_shifted} a4"));
    b.cancel(at + 1 + n);
}

fn s4_5(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![def("beta1", "a1' a2'", "b1"), def("beta2", "a8 a4", "b2"), def("beta3", "a4'", "b2")];
    let mut b = Builder::new(atlas, "s4_5", "S2_5", "d1 d2 d3 d4 d5", defs);
    lantern_opening(&mut b, "S2_5.lantern");
    b.rewrite_all("d5 gamma d3 d4 a4' a5' sigma a6")
        .subst("S2_5.four_hole", 0, Forward, 0)
        .permute_pat("a5 a4' a5'", "a4' a5 a5'")
        .cancel_at("a5 a5'")
        .expand("beta2")
        .rewrite_pat("a4' a8' sigma2 a4'", "a4' a4' a8' sigma2");
    pass_inverse_left(&mut b, "b2 a8 a4 a3 b2 a3 a8 a4 b2", "b2 a4 a8 a3 b2 a3 a8 a4 b2");
    b.fold("beta2", "a8 a4 b2 a4' a8'")
        .fold("beta3", "a4' b2 a4")
        .expect("a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 beta3 a8 a3 b2 a3 beta2 sigma2 sigma a6");
    b.finish()
}

fn s4_6(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![
        def("beta1", "a1' a2'", "b1"),
        def("beta2", "a9 a4", "b2"),
        def("beta3", "a4'", "b2"),
        def("beta4", "b2'", "a9"),
    ];
    let mut b = Builder::new(atlas, "s4_6", "S2_6", "d1 d2 d3 d4 d5 d6", defs);
    lantern_opening(&mut b, "S2_6.lantern");
    b.rewrite_all("d6 gamma d3 d4 d5 a4' a5' sigma a6")
        .subst("S2_6.five_hole", 0, Forward, 0)
        .permute_pat("a5 a4' a5'", "a4' a5 a5'")
        .cancel_at("a5 a5'")
        .expand("beta2")
        .rewrite_pat("a4' a9' sigma3 sigma2 a4'", "a4' a4' a9' sigma3 sigma2")
        .expand("beta3");
    pass_inverse_left(&mut b, "b2 a4 a9 a3 b2 a3 a9 a4 b2", "b2 a4 a9 a3 b2 a3 a9 a4 b2");
    b.fold("beta2", "a9 a4 b2 a4' a9'");
    // a4' b2 a4 = b2 a4 b2' (braid lemma), then a3 b2 a3 = b2 a3 b2.
    let p = b.find("a4' a4' b2 a4 a9") + 1;
    b.insert(p + 3, "b2")
        .rewrite(p + 1, 3, "a4 b2 a4")
        .cancel(p)
        .rewrite_pat("a3 b2 a3 beta2", "b2 a3 b2 beta2")
        .fold("beta3", "a4' b2 a4")
        .fold("beta4", "b2' a9 b2")
        .expect("a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 beta3 beta4 a3 b2 beta2 sigma3 sigma2 sigma a6");
    b.finish()
}

/// Shared tail of the n = 7, 8 derivations once the holed-torus, lantern
/// and star relations are in place and `a4` has cancelled: collect
/// `a2' a1' a2' a1'` against the star's first `a1 a2`, fold the conjugate
/// of `b1`, and conjugate `aX'` (X = 10 or 11) round to the front.
fn seven_eight_tail(b: &mut Builder, ax: &str, front: &str) {
    let z = "(a1 a2 a3 b1)^3";
    let start = b.find(&format!("a2' a1' {ax}'"));
    let middle = b.cur.slice(2, start).to_string();
    b.permute(0, start, &format!("{middle} a2' a1'"));
    let p = b.find(&format!("{ax}'"));
    let n = b.cur.len() - p;
    b.permute(p, n, &format!("{z} sigma a7 {ax}'"))
        .cancel_at("a1' a1")
        .cancel_at("a2' a2")
        .rewrite_pat("a2' a1' a3", "a3 a1' a2'")
        .permute_pat("a1' a2' b1 a1 a2", "a1' a2' b1 a2 a1")
        .fold("beta_t", "a1' a2' b1 a2 a1")
        .last_to_front()
        .rewrite_pat(&format!("{ax}' {front}"), &format!("{front} {ax}'"));
    let p = b.find(&format!("{ax}' b2"));
    b.insert(p + 2, ax)
        .fold("beta_t1", &format!("{ax}' b2 {ax}"))
        .fold("beta_t2", &format!("{ax}' sigma5 {ax}"));
}

fn s5_7(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![
        def("beta5", "a6", "b2"),
        def("beta3", "a3", "b2"),
        def("beta_t1", "a10'", "b2"),
        def("beta_t2", "a10'", "sigma5"),
        def("beta_t", "a1' a2'", "b1"),
    ];
    let mut b = Builder::new(atlas, "s5_7", "S2_7", "d1 d2 d3 d4 d5 d6 d7", defs);
    b.rewrite_all("d1 d2 d5 d6 d7 d3 d4")
        .insert(0, "a2'")
        .insert(1, "a1'")
        .insert(9, "a2'")
        .insert(10, "a1'")
        .subst("S2_7.holed_torus", 2, Forward, 0)
        .subst("S2_7.lantern", 16, Forward, 0);
    let g = b.find("gamma");
    b.insert(g, "a10'").insert(g + 1, "a4'").subst("S2_7.star", g + 2, Forward, 0);
    // a4' travels right, round the end, and meets the holed-torus a4.
    let p = b.find("a4'");
    let n = b.cur.len() - p;
    b.rewrite(p, n, "(a1 a2 a3 b1)^3 sigma a7 a4'")
        .last_to_front()
        .permute_pat("a4' a2' a1' a3 a4", "a2' a1' a3 a4' a4")
        .cancel_at("a4' a4");
    seven_eight_tail(&mut b, "a10", "a3 a9");
    b.expect("a3 a9 beta_t1 beta_t2 beta5 sigma3 sigma6 a5 beta3 sigma4 a3 beta_t a3 b1 a1 a2 a3 b1 sigma a7");
    b.finish()
}

fn s5_8(atlas: &CurveAtlas) -> DerivationScript {
    let defs = vec![
        def("beta1", "a5", "b2"),
        def("beta6", "a3", "b2"),
        def("beta_t1", "a11'", "b2"),
        def("beta_t2", "a11'", "sigma5"),
        def("beta_t", "a1' a2'", "b1"),
    ];
    let mut b = Builder::new(atlas, "s5_8", "S2_8", "d1 d2 d3 d4 d5 d6 d7 d8", defs);
    b.rewrite_all("d1 d2 d5 d6 d7 d8 d3 d4")
        .insert(0, "a2'")
        .insert(1, "a1'")
        .insert(10, "a2'")
        .insert(11, "a1'")
        .subst("S2_8.holed_torus", 2, Forward, 0)
        .subst("S2_8.lantern", 16, Forward, 0);
    let g = b.find("gamma");
    b.insert(g, "a11'").insert(g + 1, "a4'").subst("S2_8.star", g + 2, Forward, 0);
    b.permute_pat("a4 a2' a1' a11' a4'", "a2' a1' a11' a4 a4'").cancel_at("a4 a4'");
    seven_eight_tail(&mut b, "a11", "a10");
    b.expect("a10 beta_t1 beta_t2 beta1 sigma3 sigma6 a8 beta6 sigma4 sigma7 a3 beta_t a3 b1 a1 a2 a3 b1 sigma a7");
    b.finish()
}

fn main() -> ExitCode {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let atlas = match CurveAtlas::load(dir.join("atlas.json")) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let builders: [fn(&CurveAtlas) -> DerivationScript; 8] = [s4_1, s4_2, s4_3, s4_4, s4_5, s4_6, s5_7, s5_8];
    let scripts: Vec<DerivationScript> = builders.iter().map(|f| f(&atlas)).collect();
    for s in &scripts {
        let r = check_script(&atlas, s);
        println!(
            "{:5} {:5} steps={:4} len={} section_relation={}",
            s.name,
            s.model,
            s.steps.len(),
            r.final_len,
            r.is_section_relation()
        );
        if let Some(f) = &r.failure {
            eprintln!("{}: {f}", s.name);
            return ExitCode::FAILURE;
        }
        write(&dir, s);
    }
    if let Some(out) = std::env::args().nth(2) {
        let pairs: BTreeSet<_> = scripts.iter().flat_map(|s| touched_pairs(&atlas, s)).collect();
        let text: String = pairs.iter().map(|(m, a, b)| format!("{m} {a} {b}\n")).collect();
        std::fs::write(&out, text).unwrap_or_else(|e| panic!("{out}: {e}"));
    }
    let summary = verify_shipped_scripts(&atlas, &scripts);
    for (id, r) in &summary.derived {
        println!("{id}: {}", r.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.clone()));
    }
    if summary.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Curves under a letter: itself, or its definition's expansion.
fn support(defs: &DefinitionSet, l: &TwistLetter) -> Vec<String> {
    match defs.expansion_of(&l.curve) {
        Ok(e) if defs.contains(&l.curve) => e.iter().map(|x| x.curve.clone()).collect(),
        _ => vec![l.curve.clone()],
    }
}

/// Intersection facts consulted by the Commute/Braid/rotation licenses.
fn touched_pairs(atlas: &CurveAtlas, s: &DerivationScript) -> BTreeSet<(String, String, String)> {
    let defs = s.definitions();
    let mut out = BTreeSet::new();
    let mut add = |x: &TwistLetter, y: &TwistLetter| {
        for a in support(&defs, x) {
            for b in support(&defs, y) {
                if a != b && !atlas.is_boundary(&s.model, &a) && !atlas.is_boundary(&s.model, &b) {
                    let (a, b) = if a < b { (a.clone(), b) } else { (b, a.clone()) };
                    out.insert((s.model.clone(), a, b));
                }
            }
        }
    };
    let mut prev = &s.lhs;
    for step in &s.steps {
        let l = prev.letters();
        match &step.rule {
            Rule::Commute { position } => add(&l[*position], &l[position + 1]),
            Rule::Braid { position, .. } => add(&l[*position], &l[position + 1]),
            Rule::SubstituteRelation { relation, rotation, .. } if *rotation > 0 => {
                let rel = atlas.relation(relation).expect("relation checked above");
                for x in rel.lhs.iter() {
                    for y in rel.rhs.slice(0, *rotation).iter() {
                        add(x, y);
                    }
                }
            }
            _ => {}
        }
        prev = &step.result;
    }
    out
}

fn write(dir: &Path, s: &DerivationScript) {
    let path = dir.join(format!("{}.script.json", s.name));
    std::fs::write(&path, s.to_json_pretty() + "\n").unwrap_or_else(|e| panic!("{}: {e}", path.display()));
}
