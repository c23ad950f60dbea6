//! Derivation scripts: licensed elementary rewrites of twist words.
//!
//! A script states an equation `lhs = w` whose left side is a product of
//! boundary twists (hence central) and rewrites the right side step by step,
//! starting from `lhs` itself. Every step names its rule and carries the full
//! resulting word; checking is purely positional and never searches.
//!
//! Licenses come from the atlas:
//!
//! * `Commute` — the two letters are disjoint (`i = 0` recorded), equal, or
//!   one of them is boundary-parallel. A defined letter commutes with `x`
//!   when every letter of its expansion does.
//! * `Braid` — `x y x ↔ y x y` for curves with `i(x, y) = 1` recorded, all
//!   three letters of one sign. The direction is explicit: `forward` turns
//!   `a b a` into `b a b` where `a < b` in name order, `backward` the reverse.
//! * `SubstituteRelation` — replace an occurrence of a relation side by the
//!   other side. A nonzero `rotation` uses the right side rotated cyclically;
//!   this is legal when every letter of the left side commutes with the part
//!   rotated past it (`L = XY` with `L` commuting with `X` gives `L = YX`).
//! * `CentralRotate` — rotate the whole word; legal because the word equals
//!   the central left side of the script.
//! * `Rename` — apply a renaming declared in the atlas whose source and
//!   target are the script's own model (synonyms only).

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{AtlasError, CurveAtlas, NamedRelation};
use crate::homology::{self, HomologyError, RepMatrix};
use crate::word::{ConjugateDefinition, DefinitionSet, TwistLetter, TwistWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("position {position} out of range for a word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("illegal move: {0}")]
    IllegalLicense(String),
    #[error("pattern not found: {0}")]
    PatternMismatch(String),
    #[error("result mismatch: expected `{expected}`, step claims `{claimed}`")]
    ResultMismatch { expected: String, claimed: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("definition `{0}` differs between the relation and the script")]
    DefinitionMismatch(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{0}")]
    Atlas(String),
}

impl From<AtlasError> for StepError {
    fn from(e: AtlasError) -> Self {
        StepError::Atlas(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// One elementary rewrite. Positions are 0-based letter indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum Rule {
    Commute { position: usize },
    Braid { position: usize, direction: Direction },
    Cancel { position: usize },
    InsertPair { position: usize, letter: TwistLetter },
    SubstituteRelation {
        relation: String,
        position: usize,
        direction: Direction,
        #[serde(default, skip_serializing_if = "is_zero")]
        rotation: usize,
    },
    ExpandDef { name: String, position: usize },
    FoldDef { name: String, position: usize },
    CentralRotate { shift: usize },
    Rename { map: String },
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Commute { .. } => "Commute",
            Rule::Braid { .. } => "Braid",
            Rule::Cancel { .. } => "Cancel",
            Rule::InsertPair { .. } => "InsertPair",
            Rule::SubstituteRelation { .. } => "SubstituteRelation",
            Rule::ExpandDef { .. } => "ExpandDef",
            Rule::FoldDef { .. } => "FoldDef",
            Rule::CentralRotate { .. } => "CentralRotate",
            Rule::Rename { .. } => "Rename",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Commute { position } | Rule::Cancel { position } => write!(f, "{}@{position}", self.name()),
            Rule::Braid { position, direction } => write!(f, "Braid@{position} {direction:?}"),
            Rule::InsertPair { position, letter } => write!(f, "InsertPair@{position} {letter}"),
            Rule::SubstituteRelation { relation, position, direction, rotation } => {
                write!(f, "SubstituteRelation {relation}@{position} {direction:?}")?;
                if *rotation > 0 {
                    write!(f, " rot {rotation}")?;
                }
                Ok(())
            }
            Rule::ExpandDef { name, position } => write!(f, "ExpandDef {name}@{position}"),
            Rule::FoldDef { name, position } => write!(f, "FoldDef {name}@{position}"),
            Rule::CentralRotate { shift } => write!(f, "CentralRotate {shift}"),
            Rule::Rename { map } => write!(f, "Rename {map}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    #[serde(flatten)]
    pub rule: Rule,
    pub result: TwistWord,
}

/// `lhs = final`, proved by rewriting `lhs` through `steps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationScript {
    #[serde(default)]
    pub name: String,
    pub model: String,
    pub lhs: TwistWord,
    #[serde(default)]
    pub defs: Vec<ConjugateDefinition>,
    pub steps: Vec<DerivationStep>,
    #[serde(rename = "final")]
    pub final_word: TwistWord,
}

#[derive(Debug, Error)]
pub enum ScriptLoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed script {path}: {reason}")]
    Parse { path: String, reason: String },
}

impl DerivationScript {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Load a script; an empty `name` defaults to the file stem before
    /// `.script.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScriptLoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScriptLoadError::Io { path: path.display().to_string(), source })?;
        let mut s = Self::from_json(&text)
            .map_err(|e| ScriptLoadError::Parse { path: path.display().to_string(), reason: e.to_string() })?;
        if s.name.is_empty() {
            let file = path.file_name().and_then(|f| f.to_str()).unwrap_or_default();
            s.name = file.strip_suffix(".script.json").unwrap_or(file).to_string();
        }
        Ok(s)
    }

    /// Load every `*.script.json` in a directory, sorted by file name.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<Self>, ScriptLoadError> {
        let dir = dir.as_ref();
        let entries = std::fs::read_dir(dir).map_err(|source| ScriptLoadError::Io { path: dir.display().to_string(), source })?;
        let mut paths: Vec<_> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.file_name().and_then(|f| f.to_str()).is_some_and(|f| f.ends_with(".script.json")))
            .collect();
        paths.sort();
        paths.iter().map(Self::load).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scripts always serialize")
    }

    pub fn definitions(&self) -> DefinitionSet {
        DefinitionSet::from_defs(self.defs.iter().cloned())
    }
}

/// Everything a step check needs besides the word itself.
pub struct StepContext<'a> {
    pub atlas: &'a CurveAtlas,
    pub model: &'a str,
    pub defs: DefinitionSet,
    /// The word being rewritten equals a central element (the script's
    /// boundary multitwist), which licenses `CentralRotate`.
    pub central: bool,
}

impl<'a> StepContext<'a> {
    pub fn new(atlas: &'a CurveAtlas, model: &'a str, defs: DefinitionSet) -> Self {
        StepContext { atlas, model, defs, central: false }
    }

    pub fn for_script(atlas: &'a CurveAtlas, script: &'a DerivationScript) -> Self {
        let central = script.lhs.iter().all(|l| atlas.is_boundary(&script.model, &l.curve));
        StepContext { atlas, model: &script.model, defs: script.definitions(), central }
    }

    /// Curves underlying a letter (its full expansion when defined).
    fn support(&self, l: &TwistLetter) -> Result<Vec<String>, StepError> {
        if self.defs.contains(&l.curve) {
            Ok(self.defs.expansion_of(&l.curve)?.iter().map(|x| x.curve.clone()).collect())
        } else if self.atlas.has_curve(self.model, &l.curve) {
            Ok(vec![l.curve.clone()])
        } else {
            Err(StepError::Atlas(format!("model `{}` has no curve or definition `{}`", self.model, l.curve)))
        }
    }

    fn curves_commute(&self, a: &str, b: &str) -> bool {
        a == b
            || self.atlas.is_boundary(self.model, a)
            || self.atlas.is_boundary(self.model, b)
            || self.atlas.intersection(self.model, a, b) == Some(0)
    }

    /// Whether the twists of two letters are licensed to commute.
    pub fn letters_commute(&self, x: &TwistLetter, y: &TwistLetter) -> Result<bool, StepError> {
        if x.curve == y.curve {
            return Ok(true);
        }
        let (sx, sy) = (self.support(x)?, self.support(y)?);
        Ok(sx.iter().all(|a| sy.iter().all(|b| self.curves_commute(a, b))))
    }

    /// `i(x, y) = 1` is recorded for two distinct atlas curves.
    pub fn curves_braid(&self, a: &str, b: &str) -> bool {
        a != b
            && !self.defs.contains(a)
            && !self.defs.contains(b)
            && self.atlas.intersection(self.model, a, b) == Some(1)
    }
}

fn out_of_range(position: usize, len: usize) -> StepError {
    StepError::PositionOutOfRange { position, len }
}

fn rotate(w: &TwistWord, k: usize) -> TwistWord {
    let l = w.letters();
    if l.is_empty() {
        return w.clone();
    }
    let k = k % l.len();
    TwistWord::new(l[k..].iter().chain(&l[..k]).cloned().collect())
}

fn expansions_agree(a: &DefinitionSet, b: &DefinitionSet, name: &str) -> Result<bool, StepError> {
    Ok(a.expansion_of(name)? == b.expansion_of(name)?)
}

/// Apply a rule to `prev`, checking its license. Returns the rewritten word.
pub fn apply_rule(prev: &TwistWord, rule: &Rule, ctx: &StepContext) -> Result<TwistWord, StepError> {
    let w = prev.letters();
    let len = w.len();
    match rule {
        Rule::Commute { position } => {
            let p = *position;
            if p + 1 >= len {
                return Err(out_of_range(p, len));
            }
            if !ctx.letters_commute(&w[p], &w[p + 1])? {
                return Err(StepError::IllegalLicense(format!("`{}` and `{}` are not known to commute", w[p], w[p + 1])));
            }
            let mut out = w.to_vec();
            out.swap(p, p + 1);
            Ok(TwistWord::new(out))
        }
        Rule::Braid { position, direction } => {
            let p = *position;
            if p + 2 >= len {
                return Err(out_of_range(p, len));
            }
            let (x, y, z) = (&w[p], &w[p + 1], &w[p + 2]);
            if x != z || x.sign != y.sign || x.curve == y.curve {
                return Err(StepError::PatternMismatch(format!("`{x} {y} {z}` is not of the form x y x")));
            }
            if !ctx.curves_braid(&x.curve, &y.curve) {
                return Err(StepError::IllegalLicense(format!("i({}, {}) = 1 is not recorded", x.curve, y.curve)));
            }
            let forward = x.curve < y.curve;
            if forward != (*direction == Direction::Forward) {
                return Err(StepError::IllegalLicense(format!("braid direction {direction:?} does not match `{x} {y} {x}`")));
            }
            let mut out = w.to_vec();
            out[p] = y.clone();
            out[p + 1] = x.clone();
            out[p + 2] = y.clone();
            Ok(TwistWord::new(out))
        }
        Rule::Cancel { position } => {
            let p = *position;
            if p + 1 >= len {
                return Err(out_of_range(p, len));
            }
            if !w[p].cancels(&w[p + 1]) {
                return Err(StepError::PatternMismatch(format!("`{} {}` is not an inverse pair", w[p], w[p + 1])));
            }
            Ok(prev.splice(p, p + 2, &TwistWord::empty()))
        }
        Rule::InsertPair { position, letter } => {
            let p = *position;
            if p > len {
                return Err(out_of_range(p, len));
            }
            ctx.support(letter)?;
            Ok(prev.splice(p, p, &TwistWord::new(vec![letter.clone(), letter.inverse()])))
        }
        Rule::SubstituteRelation { relation, position, direction, rotation } => {
            let rel = ctx.atlas.relation(relation).map_err(|_| StepError::UnknownRelation(relation.clone()))?;
            if rel.model != ctx.model {
                return Err(StepError::IllegalLicense(format!("relation `{relation}` lives on `{}`", rel.model)));
            }
            let rel_defs = rel.definitions();
            for d in &rel.defs {
                if !ctx.defs.contains(&d.name) || !expansions_agree(&rel_defs, &ctx.defs, &d.name)? {
                    return Err(StepError::DefinitionMismatch(d.name.clone()));
                }
            }
            let rhs = if *rotation == 0 {
                rel.rhs.clone()
            } else {
                if *rotation >= rel.rhs.len() {
                    return Err(StepError::IllegalLicense(format!("rotation {rotation} exceeds the relation length")));
                }
                let moved = rel.rhs.slice(0, *rotation);
                for a in rel.lhs.iter() {
                    for b in moved.iter() {
                        if !ctx.letters_commute(a, b)? {
                            return Err(StepError::IllegalLicense(format!(
                                "rotation of `{relation}` needs `{a}` to commute with `{b}`"
                            )));
                        }
                    }
                }
                rotate(&rel.rhs, *rotation)
            };
            let (from, to) = match direction {
                Direction::Forward => (&rel.lhs, &rhs),
                Direction::Backward => (&rhs, &rel.lhs),
            };
            let p = *position;
            if p + from.len() > len {
                return Err(out_of_range(p, len));
            }
            if prev.slice(p, p + from.len()) != *from {
                return Err(StepError::PatternMismatch(format!("`{from}` does not occur at {p}")));
            }
            Ok(prev.splice(p, p + from.len(), to))
        }
        Rule::ExpandDef { name, position } => {
            let p = *position;
            if p >= len {
                return Err(out_of_range(p, len));
            }
            let def = ctx.defs.get(name).ok_or_else(|| WordError::UnknownDefinition(name.clone()))?;
            if w[p].curve != *name {
                return Err(StepError::PatternMismatch(format!("`{}` is not the letter `{name}`", w[p])));
            }
            let e = def.expansion();
            let e = if w[p].is_positive() { e } else { e.invert() };
            Ok(prev.splice(p, p + 1, &e))
        }
        Rule::FoldDef { name, position } => {
            let p = *position;
            let def = ctx.defs.get(name).ok_or_else(|| WordError::UnknownDefinition(name.clone()))?;
            let e = def.expansion();
            if p + e.len() > len {
                return Err(out_of_range(p, len));
            }
            let seg = prev.slice(p, p + e.len());
            let letter = if seg == e {
                TwistLetter::pos(name.clone())
            } else if seg == e.invert() {
                TwistLetter::neg(name.clone())
            } else {
                return Err(StepError::PatternMismatch(format!("`{seg}` is not the expansion of `{name}`")));
            };
            Ok(prev.splice(p, p + e.len(), &TwistWord::new(vec![letter])))
        }
        Rule::CentralRotate { shift } => {
            if !ctx.central {
                return Err(StepError::IllegalLicense("rotation needs a central left-hand side".into()));
            }
            if *shift > len {
                return Err(out_of_range(*shift, len));
            }
            Ok(rotate(prev, *shift))
        }
        Rule::Rename { map } => {
            let r = ctx.atlas.renaming(map)?;
            if r.source != ctx.model || r.target != ctx.model {
                return Err(StepError::IllegalLicense(format!("renaming `{map}` is not a synonym map on `{}`", ctx.model)));
            }
            let renamed = prev
                .iter()
                .map(|l| match r.image(&l.curve) {
                    Some(c) => TwistLetter { curve: c.to_string(), sign: l.sign },
                    None => l.clone(),
                })
                .collect();
            Ok(TwistWord::new(renamed))
        }
    }
}

/// Accept iff the rule is licensed and produces `step.result` verbatim.
pub fn check_step(prev: &TwistWord, step: &DerivationStep, ctx: &StepContext) -> Result<(), StepError> {
    let got = apply_rule(prev, &step.rule, ctx)?;
    if got != step.result {
        return Err(StepError::ResultMismatch { expected: got.to_string(), claimed: step.result.to_string() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFailure {
    pub index: usize,
    pub rule: String,
    pub error: StepError,
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({}): {}", self.index, self.rule, self.error)
    }
}

/// Outcome of checking one script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptReport {
    pub name: String,
    pub model: String,
    pub steps: usize,
    pub failure: Option<StepFailure>,
    pub final_len: usize,
    pub all_positive: bool,
    pub no_boundary: bool,
    /// The expanded final word acts trivially on `H_1(Σ_{g,n})`.
    pub homology_identity: Option<bool>,
    /// The expanded final word caps to the identity on `H_1(Σ_g)`.
    pub capped_identity: Option<bool>,
}

impl ScriptReport {
    pub fn accepted(&self) -> bool {
        self.failure.is_none()
    }

    /// Accepted, 20 right-handed non-boundary letters, trivial on homology.
    pub fn is_section_relation(&self) -> bool {
        self.accepted()
            && self.final_len == 20
            && self.all_positive
            && self.no_boundary
            && self.homology_identity == Some(true)
            && self.capped_identity == Some(true)
    }
}

fn structural_checks(atlas: &CurveAtlas, script: &DerivationScript) -> Result<(), StepError> {
    let model = atlas.model(&script.model)?;
    let mut lhs_curves: Vec<&str> = script.lhs.iter().map(|l| l.curve.as_str()).collect();
    lhs_curves.sort_unstable();
    let mut boundary: Vec<&str> = model.boundary_curves.iter().map(String::as_str).collect();
    boundary.sort_unstable();
    if lhs_curves != boundary || !script.lhs.is_positive() {
        return Err(StepError::IllegalLicense(format!(
            "left side `{}` is not the boundary multitwist of `{}`",
            script.lhs, script.model
        )));
    }
    let defs = script.definitions();
    defs.check_acyclic()?;
    for d in &script.defs {
        if atlas.has_curve(&script.model, &d.name) {
            return Err(StepError::Atlas(format!("definition `{}` collides with a curve name", d.name)));
        }
    }
    Ok(())
}

/// Replay every step of a script from its left side.
pub fn check_script(atlas: &CurveAtlas, script: &DerivationScript) -> ScriptReport {
    let mut report = ScriptReport {
        name: script.name.clone(),
        model: script.model.clone(),
        steps: script.steps.len(),
        failure: None,
        final_len: script.final_word.len(),
        all_positive: script.final_word.is_positive(),
        no_boundary: script.final_word.iter().all(|l| !atlas.is_boundary(&script.model, &l.curve)),
        homology_identity: None,
        capped_identity: None,
    };
    if let Err(error) = structural_checks(atlas, script) {
        report.failure = Some(StepFailure { index: 0, rule: "header".into(), error });
        return report;
    }
    let ctx = StepContext::for_script(atlas, script);
    let mut cur = script.lhs.clone();
    for (i, step) in script.steps.iter().enumerate() {
        if let Err(error) = check_step(&cur, step, &ctx) {
            report.failure = Some(StepFailure { index: i, rule: step.rule.to_string(), error });
            return report;
        }
        cur = step.result.clone();
    }
    if cur != script.final_word {
        report.failure = Some(StepFailure {
            index: script.steps.len(),
            rule: "final".into(),
            error: StepError::ResultMismatch { expected: cur.to_string(), claimed: script.final_word.to_string() },
        });
        return report;
    }
    let defs = ctx.defs;
    if let Ok(m) = homology::evaluate_with_defs(atlas, &script.model, &script.final_word, &defs) {
        report.homology_identity = Some(m.is_identity());
        if let Ok(model) = atlas.model(&script.model) {
            report.capped_identity = Some(homology::cap_matrix(model, &m).is_identity());
        }
    }
    report
}

/// Homology images before and after every step (for soundness checks).
pub fn step_images(atlas: &CurveAtlas, script: &DerivationScript) -> Result<Vec<RepMatrix>, HomologyError> {
    let defs = script.definitions();
    std::iter::once(&script.lhs)
        .chain(script.steps.iter().map(|s| &s.result))
        .map(|w| homology::evaluate_with_defs(atlas, &script.model, w, &defs))
        .collect()
}

/// A derived relation must be exactly the renamed statement of an accepted
/// script: `lhs = r(script.lhs)`, `rhs = r(script.final)`, and each of its
/// definitions expands like the renamed script definition.
pub fn check_derived_relation(
    atlas: &CurveAtlas,
    rel: &NamedRelation,
    scripts: &[DerivationScript],
) -> Result<(), String> {
    let Some(df) = &rel.derived_from else {
        return Ok(());
    };
    let script = scripts
        .iter()
        .find(|s| s.name == df.script)
        .ok_or_else(|| format!("{}: script `{}` is not loaded", rel.id, df.script))?;
    let report = check_script(atlas, script);
    if let Some(f) = report.failure {
        return Err(format!("{}: source script `{}` is rejected at {f}", rel.id, script.name));
    }
    let r = atlas.renaming(&df.renaming).map_err(|e| e.to_string())?;
    if r.source != script.model || r.target != rel.model {
        return Err(format!("{}: renaming `{}` does not map `{}` to `{}`", rel.id, r.id, script.model, rel.model));
    }
    let lhs = r.apply(&script.lhs).map_err(|e| e.to_string())?;
    let rhs = r.apply(&script.final_word).map_err(|e| e.to_string())?;
    if lhs != rel.lhs || rhs != rel.rhs {
        return Err(format!("{}: statement is not the renamed script `{}` (expected `{lhs} = {rhs}`)", rel.id, script.name));
    }
    let renamed = DefinitionSet::from_defs(
        script.defs.iter().map(|d| r.apply_definition(d)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?,
    );
    let own = rel.definitions();
    for d in &rel.defs {
        let a = own.expansion_of(&d.name).map_err(|e| e.to_string())?;
        let b = renamed.expansion_of(&d.name).map_err(|e| format!("{}: {e}", rel.id))?;
        if a != b {
            return Err(format!("{}: definition `{}` expands to `{a}`, renamed script gives `{b}`", rel.id, d.name));
        }
    }
    Ok(())
}

/// Per-script results over the shipped data plus derived-relation checks.
#[derive(Clone, Debug)]
pub struct ShippedSummary {
    pub reports: Vec<ScriptReport>,
    pub derived: Vec<(String, Result<(), String>)>,
}

impl ShippedSummary {
    pub fn all_ok(&self) -> bool {
        self.reports.iter().all(ScriptReport::is_section_relation) && self.derived.iter().all(|(_, r)| r.is_ok())
    }
}

pub fn verify_shipped_scripts(atlas: &CurveAtlas, scripts: &[DerivationScript]) -> ShippedSummary {
    let reports = scripts.iter().map(|s| check_script(atlas, s)).collect();
    let derived = atlas
        .relations()
        .filter(|r| r.derived_from.is_some())
        .map(|r| (r.id.clone(), check_derived_relation(atlas, r, scripts)))
        .collect();
    ShippedSummary { reports, derived }
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_states: 200_000, max_depth: 64 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("no path found within {states} states (depth limit {depth}); this is not a proof that none exists")]
    BudgetExhausted { states: usize, depth: usize },
    #[error("target `{0}` is not freely reduced")]
    TargetNotReduced(String),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Record a rule application: apply it (checking the license) and push the
/// step, updating the working word.
fn push(cur: &mut TwistWord, steps: &mut Vec<DerivationStep>, rule: Rule, ctx: &StepContext) -> Result<(), StepError> {
    let next = apply_rule(cur, &rule, ctx)?;
    steps.push(DerivationStep { rule, result: next.clone() });
    *cur = next;
    Ok(())
}

fn braid_direction(x: &str, y: &str) -> Direction {
    if x < y {
        Direction::Forward
    } else {
        Direction::Backward
    }
}

/// Move an occurrence of `target` to position `at` of `cur` using only
/// commutations and braids, never touching letters before `at`.
///
/// With `x = cur[at]`: if `x` commutes with `target`, bring `target` to
/// `at + 1` and swap; if `x` braids with `target`, bring `target` to
/// `at + 1`, then `x` to `at + 2`, and apply `x t x → t x t`.
fn bring_to_front(
    cur: &mut TwistWord,
    at: usize,
    target: &TwistLetter,
    steps: &mut Vec<DerivationStep>,
    ctx: &StepContext,
    fuel: &mut usize,
) -> bool {
    if *fuel == 0 || at >= cur.len() {
        return false;
    }
    *fuel -= 1;
    let x = cur.letters()[at].clone();
    if x == *target {
        return true;
    }
    let mark = (cur.clone(), steps.len());
    let undo = |cur: &mut TwistWord, steps: &mut Vec<DerivationStep>| {
        *cur = mark.0.clone();
        steps.truncate(mark.1);
    };
    if ctx.letters_commute(&x, target).unwrap_or(false) {
        if bring_to_front(cur, at + 1, target, steps, ctx, fuel)
            && push(cur, steps, Rule::Commute { position: at }, ctx).is_ok()
        {
            return true;
        }
        undo(cur, steps);
        return false;
    }
    if x.sign == target.sign && ctx.curves_braid(&x.curve, &target.curve) {
        if bring_to_front(cur, at + 1, target, steps, ctx, fuel)
            && bring_to_front(cur, at + 2, &x, steps, ctx, fuel)
            && push(cur, steps, Rule::Braid { position: at, direction: braid_direction(&x.curve, &target.curve) }, ctx)
                .is_ok()
        {
            return true;
        }
        undo(cur, steps);
    }
    false
}

/// Greedy transport: make the letters of `cur` agree with `to` from the left.
fn transport(from: &TwistWord, to: &TwistWord, ctx: &StepContext, fuel: usize) -> Option<Vec<DerivationStep>> {
    if from.len() != to.len() {
        return None;
    }
    let mut cur = from.clone();
    let mut steps = Vec::new();
    let mut fuel = fuel;
    for (i, t) in to.iter().enumerate() {
        if !bring_to_front(&mut cur, i, t, &mut steps, ctx, &mut fuel) {
            return None;
        }
    }
    (cur == *to).then_some(steps)
}

/// Freely reduce `w`, recording one `Cancel` per removed pair.
fn cancel_all(w: &TwistWord, ctx: &StepContext) -> (TwistWord, Vec<DerivationStep>) {
    let mut cur = w.clone();
    let mut steps = Vec::new();
    while let Some(p) = cur.letters().windows(2).position(|p| p[0].cancels(&p[1])) {
        push(&mut cur, &mut steps, Rule::Cancel { position: p }, ctx).expect("adjacent inverse pair cancels");
    }
    (cur, steps)
}

/// Neighbors of a reduced word under Commute then Braid, positions
/// ascending; each neighbor is freely reduced with explicit Cancel steps.
fn neighbors(w: &TwistWord, ctx: &StepContext) -> Vec<(TwistWord, Vec<DerivationStep>)> {
    let mut out = Vec::new();
    let l = w.letters();
    let mut emit = |rule: Rule| {
        if let Ok(next) = apply_rule(w, &rule, ctx) {
            let mut steps = vec![DerivationStep { rule, result: next.clone() }];
            let (reduced, cancels) = cancel_all(&next, ctx);
            steps.extend(cancels);
            out.push((reduced, steps));
        }
    };
    for p in 0..l.len().saturating_sub(1) {
        if l[p] != l[p + 1] && ctx.letters_commute(&l[p], &l[p + 1]).unwrap_or(false) {
            emit(Rule::Commute { position: p });
        }
    }
    for p in 0..l.len().saturating_sub(2) {
        if l[p] == l[p + 2] && l[p].sign == l[p + 1].sign && ctx.curves_braid(&l[p].curve, &l[p + 1].curve) {
            emit(Rule::Braid { position: p, direction: braid_direction(&l[p].curve, &l[p + 1].curve) });
        }
    }
    out
}

/// Find a sequence of Commute/Braid/Cancel steps rewriting `from` into `to`.
///
/// First tries the deterministic left-to-right transport; if that fails,
/// runs a breadth-first search over freely reduced words, exploring moves
/// in rule order then ascending position. Results are deterministic for a
/// given budget. Every returned step passes [`check_step`].
pub fn search_elementary_path(
    from: &TwistWord,
    to: &TwistWord,
    ctx: &StepContext,
    budget: SearchBudget,
) -> Result<Vec<DerivationStep>, SearchError> {
    if from == to {
        return Ok(Vec::new());
    }
    if to.reduce() != *to {
        return Err(SearchError::TargetNotReduced(to.to_string()));
    }
    let (start, mut prefix) = cancel_all(from, ctx);
    if let Some(steps) = transport(&start, to, ctx, budget.max_states) {
        prefix.extend(steps);
        return Ok(prefix);
    }

    let mut parent: HashMap<TwistWord, Option<(TwistWord, Vec<DerivationStep>)>> = HashMap::new();
    let mut depth: HashMap<TwistWord, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(start.clone(), None);
    depth.insert(start.clone(), 0);
    queue.push_back(start.clone());
    while let Some(w) = queue.pop_front() {
        if w == *to {
            let mut chunks = Vec::new();
            let mut cur = w;
            while let Some(Some((prev, steps))) = parent.get(&cur) {
                chunks.push(steps.clone());
                cur = prev.clone();
            }
            prefix.extend(chunks.into_iter().rev().flatten());
            return Ok(prefix);
        }
        let d = depth[&w];
        if d >= budget.max_depth {
            continue;
        }
        for (next, steps) in neighbors(&w, ctx) {
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= budget.max_states {
                return Err(SearchError::BudgetExhausted { states: parent.len(), depth: budget.max_depth });
            }
            parent.insert(next.clone(), Some((w.clone(), steps)));
            depth.insert(next.clone(), d + 1);
            queue.push_back(next);
        }
    }
    Err(SearchError::BudgetExhausted { states: parent.len(), depth: budget.max_depth })
}

/// Replay a step list from `from`, returning the index of the first
/// rejected step, if any.
pub fn replay(from: &TwistWord, steps: &[DerivationStep], ctx: &StepContext) -> Result<TwistWord, (usize, StepError)> {
    let mut cur = from.clone();
    for (i, s) in steps.iter().enumerate() {
        check_step(&cur, s, ctx).map_err(|e| (i, e))?;
        cur = s.result.clone();
    }
    Ok(cur)
}

/// Count rule usage in a script (for reports).
pub fn rule_histogram(script: &DerivationScript) -> BTreeMap<&'static str, usize> {
    let mut h = BTreeMap::new();
    for s in &script.steps {
        *h.entry(s.rule.name()).or_insert(0) += 1;
    }
    h
}
