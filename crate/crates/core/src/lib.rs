//! Exact spanning-set computations for modules of C2-cofinite vertex operator
//! algebras, realized on truncated Virasoro models.
//!
//! The pipeline: build a model ([`virasoro`]), compute the C2 data
//! ([`cofinite`]), then enumerate spanning sets, normalize mode words into
//! them and check spanning ([`spanset`]). [`zhu`] estimates dimensions of
//! Zhu-type quotients. [`syntax`] reads and prints mode-word expressions.

pub mod cofinite;
pub mod error;
pub mod linalg;
pub mod modes;
pub mod scalar;
pub mod spanset;
pub mod syntax;
pub mod virasoro;
pub mod zhu;

pub use cofinite::{compute_constants, CofiniteData};
pub use error::{Error, Result};
pub use linalg::{SparseMatrix, Vector};
pub use modes::{evaluate, Base, Expression, ModeOp, ModeWord, OperatorSum, VecId};
pub use scalar::Scalar;
pub use spanset::{compute_l, normalize, Normalized, Normalizer};
pub use syntax::{format_expression, parse_expression};
pub use virasoro::{
    build_module, build_virasoro_voa, minimal_model_central_charge, ModVec, ModuleKind, ModuleModel, VoaModel, Word,
};
