//! Exact models for the Chow homology of a relative curve, its Jacobian, and its
//! symmetric powers, as windowed divided-power polynomial algebras over Q.
//!
//! The library builds three interlocking rings for a curve of genus `g` over a
//! base of dimension `d`:
//!
//! - `A`: the Jacobian ring, a free Pontryagin algebra on tautological
//!   generators `psi`, `c2..c_{2g}` (plus point generators), truncated by an
//!   admissibility window, with a second generator system graded by the action
//!   of multiplication-by-N endomorphisms and an exact dictionary between the two.
//! - `A<x>`: the infinite symmetric power, adding one divided-power variable `x`
//!   for the image of the curve's Abel embedding.
//! - `A[t]<u>`: the graded union of finite symmetric powers, with `t` the class
//!   of a base point and `u^[m]` the class of the m-th symmetric power, carried
//!   in either of two coordinate tags related by an exact conversion.
//!
//! On top of the rings sit the operator calculus (derivations in `t` and `u`,
//! projections, section and pushforward maps, a degree-lift solver), closed
//! forms for diagonal and curve classes, identity suites, and emission of
//! divisor relation families in the style of classical special-divisor
//! vanishing results.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals, series
//! are finite by window nilpotency, and every identity check reports `exact`,
//! `holds-mod-psi^k`, or a failing witness.

pub mod algebra;
pub mod combin;
pub mod cycles;
pub mod divisors;
pub mod jacobian;
pub mod report;
pub mod series;
pub mod suites;
pub mod syminf;
pub mod tower;

pub use algebra::{Element, GenTable, Generator, GenKind, Grading, Monomial, Var, Window};
pub use jacobian::{ClassSpec, JacobianRing, ModelConfig};
pub use report::{Record, RunReport, Status};
pub use tower::{Basis, Model, TautExpr, TowerElem};

use thiserror::Error;

/// Errors surfaced by ring construction, arithmetic and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed divided-power coordinates: {0}")]
    CoordMixed(&'static str),
    #[error("divided power of an element with a nonzero unit component")]
    UnitComponent,
    #[error("series argument is not transient in the window: {0}")]
    NonTransient(String),
    #[error("u-cap overflow during substitution (cap {cap})")]
    CapOverflow { cap: u32 },
    #[error("no degree-{degree} lift: unresolved residual `{residual}`{hint}")]
    NoLift {
        degree: u32,
        residual: String,
        hint: String,
    },
    #[error("coordinate conversion did not stabilize within {0} correction passes")]
    ConvertDiverged(u32),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("coordinate tag mismatch: expected {expected}, found {found}")]
    TagMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("JSON: {0}")]
    Json(String),
    #[error("out of declared range: {0}")]
    Range(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
