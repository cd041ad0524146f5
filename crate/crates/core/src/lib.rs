//! Finite-volume simulation of the 1D Saint-Venant-Exner system, validated
//! against an exact unsteady solution valid for the whole family of
//! threshold bedload laws (Grass, Meyer-Peter & Muller, ...).

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exact;
pub mod harness;
pub mod laws;
pub mod mesh;
pub mod schemes;

pub use error::{ExnerError, Result};
pub use exact::{ExactPoint, ExactSolution};
pub use harness::{BenchmarkConfig, ConvergenceReport, OracleReport, RunReport};
pub use laws::{BedloadLaw, EffectiveParams, GrassLaw, SedimentLaw};
pub use mesh::{CellState, ErrorNorms, FieldNorms, FieldSnapshot, Mesh1D, RelaxCellState};
pub use schemes::{BoundaryCondition, BoundaryKind, Integration, Scheme, Solver, StepReport};
