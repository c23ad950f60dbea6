//! Exact calculus of Dehn-twist words on genus-2 surfaces with boundary.
//!
//! The crate is organised around a single currency, the [`TwistWord`]:
//!
//! * [`word`] — parsing, inversion, free reduction and conjugate definitions;
//! * [`atlas`] — per-surface curve catalogs (homology classes, geometric
//!   intersection numbers, boundary flags, renamings, named relations);
//! * [`homology`] — the integral transvection representation on `H_1`;
//! * [`relation`] — derivation scripts, elementary-step checking and bounded
//!   rewrite search;
//! * [`pi1`] — the action on the free fundamental group of `Σ_{2,1}` and
//!   `Σ_{2,2}`, used as an exact (faithful) equality oracle;
//! * [`fibration`] — Lefschetz fibration invariants, sections and fiber sums.
//!
//! Composition convention everywhere: in a word `x y` the rightmost twist
//! `y` acts first.

pub mod atlas;
pub mod fibration;
pub mod homology;
pub mod pi1;
pub mod relation;
pub mod word;

pub use atlas::{CurveAtlas, SurfaceModel};
pub use homology::{HomologyError, RepMatrix};
pub use relation::{DerivationScript, DerivationStep, Rule};
pub use word::{ConjugateDefinition, Sign, TwistLetter, TwistWord};
