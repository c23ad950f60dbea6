//! Curve atlases: per-surface catalogs of named curves.
//!
//! An atlas document is JSON with the top-level keys `atlas_version` (must be
//! 1), `models`, `curves`, `intersections`, `renamings`, `relations` and
//! `pi1_tables`. Every model uses the homology basis
//! `A1, B1, …, Ag, Bg, D1, …, D(n-1)` with `Dn = -(D1 + … + D(n-1))`, and
//! the intersection form `⟨Ai, Bi⟩ = 1`, zero on boundary classes.
//!
//! Geometric intersection numbers are recorded per unordered pair. A pair
//! that is not recorded licenses neither a commutation nor a braid move: the
//! relation engine fails closed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology;
use crate::pi1::{TwistTable, TwistTableDoc};
use crate::word::{ConjugateDefinition, DefinitionSet, TwistLetter, TwistWord};

pub const ATLAS_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed atlas document: {0}")]
    Parse(String),
    #[error("unsupported atlas_version {0} (expected {ATLAS_VERSION})")]
    UnsupportedVersion(u32),
    #[error("{context}: reference to unknown {kind} `{name}`")]
    DanglingReference { context: String, kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("renaming `{map}` has no image for curve `{curve}`")]
    UnmappedCurve { map: String, curve: String },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no curve `{curve}`")]
    UnknownCurve { model: String, curve: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown renaming `{0}`")]
    UnknownRenaming(String),
    #[error("invalid atlas data: {0}")]
    Invalid(String),
}

/// An oriented connected surface `Σ_{g,n}` (no marked points).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub id: String,
    pub genus: u32,
    pub boundary_count: u32,
    pub boundary_curves: Vec<String>,
    #[serde(default)]
    pub notes: String,
}

impl SurfaceModel {
    /// Rank of `H_1`: `2g + max(n - 1, 0)`.
    pub fn rank(&self) -> usize {
        2 * self.genus as usize + (self.boundary_count as usize).saturating_sub(1)
    }

    pub fn is_boundary(&self, curve: &str) -> bool {
        self.boundary_curves.iter().any(|b| b == curve)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub model: String,
    pub name: String,
    pub boundary_parallel: bool,
    pub homology_class: Vec<i64>,
    /// Model id of the π₁ twist table holding this curve, if any.
    #[serde(skip)]
    pub pi1_twist: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct IntersectionRecord {
    model: String,
    a: String,
    b: String,
    i: u32,
}

/// Geometric intersection numbers keyed by unordered curve pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionTable {
    pairs: BTreeMap<(String, String), u32>,
}

impl IntersectionTable {
    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn insert(&mut self, a: &str, b: &str, i: u32) -> Option<u32> {
        self.pairs.insert(Self::key(a, b), i)
    }

    /// `i(a, b)` if recorded; `i(a, a)` is always 0.
    pub fn get(&self, a: &str, b: &str) -> Option<u32> {
        if a == b {
            return Some(0);
        }
        self.pairs.get(&Self::key(a, b)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.pairs.iter().map(|((a, b), i)| (a.as_str(), b.as_str(), *i))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A figure-to-figure identification of curve (and definition) symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenamingMap {
    pub id: String,
    pub source: String,
    pub target: String,
    pub map: BTreeMap<String, String>,
}

impl RenamingMap {
    pub fn identity(id: &str, model: &str, symbols: impl IntoIterator<Item = String>) -> Self {
        RenamingMap {
            id: id.to_string(),
            source: model.to_string(),
            target: model.to_string(),
            map: symbols.into_iter().map(|s| (s.clone(), s)).collect(),
        }
    }

    pub fn image(&self, symbol: &str) -> Option<&str> {
        self.map.get(symbol).map(String::as_str)
    }

    /// Letterwise renaming; signs are preserved.
    pub fn apply(&self, w: &TwistWord) -> Result<TwistWord, AtlasError> {
        w.iter()
            .map(|l| self.apply_letter(l))
            .collect::<Result<Vec<_>, _>>()
            .map(TwistWord::new)
    }

    pub fn apply_letter(&self, l: &TwistLetter) -> Result<TwistLetter, AtlasError> {
        let curve = self
            .image(&l.curve)
            .ok_or_else(|| AtlasError::UnmappedCurve { map: self.id.clone(), curve: l.curve.clone() })?;
        Ok(TwistLetter { curve: curve.to_string(), sign: l.sign })
    }

    pub fn apply_definition(&self, d: &ConjugateDefinition) -> Result<ConjugateDefinition, AtlasError> {
        let name = self
            .image(&d.name)
            .ok_or_else(|| AtlasError::UnmappedCurve { map: self.id.clone(), curve: d.name.clone() })?;
        Ok(ConjugateDefinition::new(name, self.apply(&d.conjugator)?, self.apply_letter(&d.core)?))
    }

    /// `other ∘ self`: first rename by `self`, then by `other`, on the part
    /// of `self`'s domain whose image lies in `other`'s domain.
    pub fn then(&self, other: &RenamingMap) -> RenamingMap {
        let map = self
            .map
            .iter()
            .filter_map(|(k, v)| other.image(v).map(|t| (k.clone(), t.to_string())))
            .collect();
        RenamingMap {
            id: format!("{}+{}", self.id, other.id),
            source: self.source.clone(),
            target: other.target.clone(),
            map,
        }
    }

    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<&String> = self.map.values().collect();
        images.len() == self.map.len()
    }
}

/// Where a derived relation comes from: an accepted script transported to
/// another model by a renaming.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedFrom {
    pub script: String,
    pub renaming: String,
}

/// A relation instance `lhs = rhs` in the mapping class group of a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRelation {
    pub id: String,
    pub model: String,
    pub kind: String,
    pub lhs: TwistWord,
    pub rhs: TwistWord,
    #[serde(default)]
    pub defs: Vec<ConjugateDefinition>,
    #[serde(default)]
    pub derived_from: Option<DerivedFrom>,
}

impl NamedRelation {
    pub fn definitions(&self) -> DefinitionSet {
        DefinitionSet::from_defs(self.defs.iter().cloned())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtlasDocument {
    atlas_version: u32,
    models: Vec<SurfaceModel>,
    curves: Vec<CurveRecord>,
    intersections: Vec<IntersectionRecord>,
    renamings: Vec<RenamingMap>,
    relations: Vec<NamedRelation>,
    #[serde(default)]
    pi1_tables: Vec<TwistTableDoc>,
}

#[derive(Clone, Debug)]
struct ModelEntry {
    model: SurfaceModel,
    curves: BTreeMap<String, CurveRecord>,
    intersections: IntersectionTable,
}

/// All surface models, curves, tables, renamings and relations of one
/// atlas document, resolved and cross-referenced. Immutable after load.
#[derive(Clone, Debug)]
pub struct CurveAtlas {
    models: BTreeMap<String, ModelEntry>,
    model_order: Vec<String>,
    renamings: BTreeMap<String, RenamingMap>,
    relations: Vec<NamedRelation>,
    pi1_tables: BTreeMap<String, TwistTable>,
}

impl CurveAtlas {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, AtlasError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| AtlasError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, AtlasError> {
        let doc: AtlasDocument = serde_json::from_str(text).map_err(|e| AtlasError::Parse(e.to_string()))?;
        Self::resolve(doc)
    }

    fn resolve(doc: AtlasDocument) -> Result<Self, AtlasError> {
        if doc.atlas_version != ATLAS_VERSION {
            return Err(AtlasError::UnsupportedVersion(doc.atlas_version));
        }
        let mut models = BTreeMap::new();
        let mut model_order = Vec::new();
        for m in doc.models {
            if models.contains_key(&m.id) {
                return Err(AtlasError::Duplicate { kind: "model", name: m.id });
            }
            model_order.push(m.id.clone());
            models.insert(
                m.id.clone(),
                ModelEntry { model: m, curves: BTreeMap::new(), intersections: IntersectionTable::default() },
            );
        }

        for c in doc.curves {
            let entry = models.get_mut(&c.model).ok_or_else(|| AtlasError::DanglingReference {
                context: format!("curve `{}`", c.name),
                kind: "model",
                name: c.model.clone(),
            })?;
            if entry.curves.contains_key(&c.name) {
                return Err(AtlasError::Duplicate { kind: "curve", name: format!("{}/{}", c.model, c.name) });
            }
            entry.curves.insert(c.name.clone(), c);
        }
        for entry in models.values() {
            for b in &entry.model.boundary_curves {
                if !entry.curves.contains_key(b) {
                    return Err(AtlasError::DanglingReference {
                        context: format!("boundary of model `{}`", entry.model.id),
                        kind: "curve",
                        name: b.clone(),
                    });
                }
            }
        }

        for r in doc.intersections {
            let entry = models.get_mut(&r.model).ok_or_else(|| AtlasError::DanglingReference {
                context: format!("intersection ({}, {})", r.a, r.b),
                kind: "model",
                name: r.model.clone(),
            })?;
            for name in [&r.a, &r.b] {
                if !entry.curves.contains_key(name) {
                    return Err(AtlasError::DanglingReference {
                        context: format!("intersection ({}, {}) on `{}`", r.a, r.b, r.model),
                        kind: "curve",
                        name: name.clone(),
                    });
                }
            }
            if entry.intersections.insert(&r.a, &r.b, r.i).is_some() {
                return Err(AtlasError::Duplicate { kind: "intersection", name: format!("{}/({}, {})", r.model, r.a, r.b) });
            }
        }

        let mut renamings = BTreeMap::new();
        for r in doc.renamings {
            for m in [&r.source, &r.target] {
                if !models.contains_key(m) {
                    return Err(AtlasError::DanglingReference {
                        context: format!("renaming `{}`", r.id),
                        kind: "model",
                        name: m.clone(),
                    });
                }
            }
            if renamings.contains_key(&r.id) {
                return Err(AtlasError::Duplicate { kind: "renaming", name: r.id });
            }
            renamings.insert(r.id.clone(), r);
        }

        let mut seen = BTreeSet::new();
        for rel in &doc.relations {
            if !seen.insert(rel.id.clone()) {
                return Err(AtlasError::Duplicate { kind: "relation", name: rel.id.clone() });
            }
            let entry = models.get(&rel.model).ok_or_else(|| AtlasError::DanglingReference {
                context: format!("relation `{}`", rel.id),
                kind: "model",
                name: rel.model.clone(),
            })?;
            let defs = rel.definitions();
            for d in &rel.defs {
                if entry.curves.contains_key(&d.name) {
                    return Err(AtlasError::Invalid(format!(
                        "relation `{}`: definition `{}` collides with a curve name",
                        rel.id, d.name
                    )));
                }
            }
            defs.check_acyclic().map_err(|e| AtlasError::Invalid(format!("relation `{}`: {e}", rel.id)))?;
            let letters = rel.lhs.iter().chain(rel.rhs.iter()).chain(rel.defs.iter().flat_map(|d| {
                d.conjugator.iter().chain(std::iter::once(&d.core))
            }));
            for l in letters {
                if !entry.curves.contains_key(&l.curve) && !defs.contains(&l.curve) {
                    return Err(AtlasError::DanglingReference {
                        context: format!("relation `{}`", rel.id),
                        kind: "curve",
                        name: l.curve.clone(),
                    });
                }
            }
            if let Some(df) = &rel.derived_from {
                if !renamings.contains_key(&df.renaming) {
                    return Err(AtlasError::DanglingReference {
                        context: format!("relation `{}`", rel.id),
                        kind: "renaming",
                        name: df.renaming.clone(),
                    });
                }
            }
        }

        let mut pi1_tables = BTreeMap::new();
        for doc_table in doc.pi1_tables {
            let entry = models.get_mut(&doc_table.model).ok_or_else(|| AtlasError::DanglingReference {
                context: "pi1 table".into(),
                kind: "model",
                name: doc_table.model.clone(),
            })?;
            let table = TwistTable::from_doc(&doc_table).map_err(|e| AtlasError::Invalid(e.to_string()))?;
            for curve in table.curves() {
                let rec = entry.curves.get_mut(curve).ok_or_else(|| AtlasError::DanglingReference {
                    context: format!("pi1 table on `{}`", doc_table.model),
                    kind: "curve",
                    name: curve.to_string(),
                })?;
                rec.pi1_twist = Some(doc_table.model.clone());
            }
            if pi1_tables.insert(doc_table.model.clone(), table).is_some() {
                return Err(AtlasError::Duplicate { kind: "pi1 table", name: doc_table.model });
            }
        }

        Ok(CurveAtlas { models, model_order, renamings, relations: doc.relations, pi1_tables })
    }

    fn entry(&self, model: &str) -> Result<&ModelEntry, AtlasError> {
        self.models.get(model).ok_or_else(|| AtlasError::UnknownModel(model.to_string()))
    }

    /// Models in document order.
    pub fn models(&self) -> impl Iterator<Item = &SurfaceModel> {
        self.model_order.iter().map(move |id| &self.models[id].model)
    }

    pub fn model(&self, id: &str) -> Result<&SurfaceModel, AtlasError> {
        Ok(&self.entry(id)?.model)
    }

    pub fn curve(&self, model: &str, name: &str) -> Result<&CurveRecord, AtlasError> {
        self.entry(model)?
            .curves
            .get(name)
            .ok_or_else(|| AtlasError::UnknownCurve { model: model.to_string(), curve: name.to_string() })
    }

    pub fn has_curve(&self, model: &str, name: &str) -> bool {
        self.models.get(model).is_some_and(|e| e.curves.contains_key(name))
    }

    /// Curves of a model, sorted by name.
    pub fn curves(&self, model: &str) -> Result<impl Iterator<Item = &CurveRecord>, AtlasError> {
        Ok(self.entry(model)?.curves.values())
    }

    pub fn intersections(&self, model: &str) -> Result<&IntersectionTable, AtlasError> {
        Ok(&self.entry(model)?.intersections)
    }

    /// Recorded geometric intersection number, `None` when not recorded.
    pub fn intersection(&self, model: &str, a: &str, b: &str) -> Option<u32> {
        self.models.get(model)?.intersections.get(a, b)
    }

    pub fn is_boundary(&self, model: &str, curve: &str) -> bool {
        self.curve(model, curve).map(|c| c.boundary_parallel).unwrap_or(false)
    }

    /// Relations in document order.
    pub fn relations(&self) -> impl Iterator<Item = &NamedRelation> {
        self.relations.iter()
    }

    pub fn relation(&self, id: &str) -> Result<&NamedRelation, AtlasError> {
        self.relations
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| AtlasError::UnknownRelation(id.to_string()))
    }

    pub fn renamings(&self) -> impl Iterator<Item = &RenamingMap> {
        self.renamings.values()
    }

    pub fn renaming(&self, id: &str) -> Result<&RenamingMap, AtlasError> {
        self.renamings.get(id).ok_or_else(|| AtlasError::UnknownRenaming(id.to_string()))
    }

    pub fn pi1_table(&self, model: &str) -> Option<&TwistTable> {
        self.pi1_tables.get(model)
    }

    pub fn pi1_tables(&self) -> impl Iterator<Item = (&str, &TwistTable)> {
        self.pi1_tables.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Check every structural constraint of the atlas. Violations are
    /// collected, not raised.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for id in &self.model_order {
            self.validate_model(&self.models[id], &mut report);
        }
        for r in self.renamings.values() {
            self.validate_renaming(r, &mut report);
        }
        for rel in &self.relations {
            match homology::check_relation(self, rel) {
                Ok(true) => {}
                Ok(false) => report.push(Violation::RelationFails { relation: rel.id.clone() }),
                Err(e) => report.push(Violation::RelationError { relation: rel.id.clone(), reason: e.to_string() }),
            }
            if let Some(table) = self.pi1_tables.get(&rel.model) {
                match table.check_relation(rel) {
                    Ok(Some(false)) => report.push(Violation::Pi1RelationFails { relation: rel.id.clone() }),
                    Err(e) => report.push(Violation::RelationError { relation: rel.id.clone(), reason: e.to_string() }),
                    _ => {}
                }
            }
        }
        for (model, table) in &self.pi1_tables {
            for reason in table.validate(self, model) {
                report.push(Violation::Pi1Table { model: model.clone(), reason });
            }
        }
        report
    }

    fn validate_model(&self, e: &ModelEntry, report: &mut ValidationReport) {
        let m = &e.model;
        let r = m.rank();
        if m.boundary_curves.len() != m.boundary_count as usize {
            report.push(Violation::Shape {
                model: m.id.clone(),
                reason: format!("{} boundary curves listed, boundary_count is {}", m.boundary_curves.len(), m.boundary_count),
            });
        }
        for c in e.curves.values() {
            if c.homology_class.len() != r {
                report.push(Violation::Shape {
                    model: m.id.clone(),
                    reason: format!("class of `{}` has length {}, rank is {r}", c.name, c.homology_class.len()),
                });
                return;
            }
            if c.boundary_parallel != m.is_boundary(&c.name) {
                report.push(Violation::Shape {
                    model: m.id.clone(),
                    reason: format!("`{}` boundary flag disagrees with the model's boundary list", c.name),
                });
            }
        }
        let pair = |a: &CurveRecord, b: &CurveRecord| homology::pairing(m, &a.homology_class, &b.homology_class);
        let mut sum = vec![0i64; r];
        for b in &m.boundary_curves {
            let bc = &e.curves[b];
            for (s, x) in sum.iter_mut().zip(&bc.homology_class) {
                *s += x;
            }
            for c in e.curves.values() {
                match pair(bc, c) {
                    Ok(0) => {}
                    Ok(p) => report.push(Violation::BoundaryPairing {
                        model: m.id.clone(),
                        boundary: b.clone(),
                        curve: c.name.clone(),
                        pairing: p,
                    }),
                    Err(err) => report.push(Violation::Shape { model: m.id.clone(), reason: err.to_string() }),
                }
            }
        }
        if sum.iter().any(|&x| x != 0) {
            report.push(Violation::BoundarySum { model: m.id.clone() });
        }
        for (a, b, i) in e.intersections.iter() {
            match pair(&e.curves[a], &e.curves[b]) {
                Ok(p) => {
                    let (p_abs, i_geo) = (p.unsigned_abs(), u64::from(i));
                    if p_abs > i_geo || (i_geo - p_abs) % 2 != 0 {
                        report.push(Violation::Intersection {
                            model: m.id.clone(),
                            a: a.to_string(),
                            b: b.to_string(),
                            recorded: i,
                            pairing: p,
                        });
                    }
                }
                Err(err) => report.push(Violation::Shape { model: m.id.clone(), reason: err.to_string() }),
            }
        }
    }

    fn validate_renaming(&self, r: &RenamingMap, report: &mut ValidationReport) {
        let bad = |reason: String| Violation::Renaming { renaming: r.id.clone(), reason };
        if !r.is_injective() {
            report.push(bad("two symbols share an image".into()));
        }
        let (Ok(src), Ok(dst)) = (self.entry(&r.source), self.entry(&r.target)) else {
            return;
        };
        for (k, v) in &r.map {
            match (src.curves.contains_key(k), dst.curves.contains_key(v)) {
                (true, true) | (false, false) => {}
                (true, false) => report.push(bad(format!("curve `{k}` maps to `{v}`, which is not a curve of `{}`", r.target))),
                (false, true) => report.push(bad(format!("definition symbol `{k}` maps onto curve `{v}`"))),
            }
        }
        for (a, b, i) in src.intersections.iter() {
            if let (Some(x), Some(y)) = (r.image(a), r.image(b)) {
                if let Some(j) = dst.intersections.get(x, y) {
                    if i != j {
                        report.push(bad(format!("i({a}, {b}) = {i} but i({x}, {y}) = {j}")));
                    }
                }
            }
        }
    }
}

/// One failed atlas constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Shape { model: String, reason: String },
    BoundaryPairing { model: String, boundary: String, curve: String, pairing: i64 },
    BoundarySum { model: String },
    Intersection { model: String, a: String, b: String, recorded: u32, pairing: i64 },
    Renaming { renaming: String, reason: String },
    RelationFails { relation: String },
    Pi1RelationFails { relation: String },
    RelationError { relation: String, reason: String },
    Pi1Table { model: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { model, reason } => write!(f, "{model}: {reason}"),
            Violation::BoundaryPairing { model, boundary, curve, pairing } => {
                write!(f, "{model}: boundary curve {boundary} pairs to {pairing} with {curve}")
            }
            Violation::BoundarySum { model } => write!(f, "{model}: boundary classes do not sum to zero"),
            Violation::Intersection { model, a, b, recorded, pairing } => write!(
                f,
                "{model}: i({a}, {b}) = {recorded} is incompatible with algebraic intersection {pairing}"
            ),
            Violation::Renaming { renaming, reason } => write!(f, "renaming {renaming}: {reason}"),
            Violation::RelationFails { relation } => write!(f, "relation {relation} fails on H_1"),
            Violation::Pi1RelationFails { relation } => write!(f, "relation {relation} fails on pi_1"),
            Violation::RelationError { relation, reason } => write!(f, "relation {relation}: {reason}"),
            Violation::Pi1Table { model, reason } => write!(f, "pi_1 table {model}: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
