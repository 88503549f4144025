//! Exact arithmetic for component numbers of torsion sections on semistable
//! elliptic surfaces over the projective line.
//!
//! A surface is described by its singular fiber lengths `m_j` (fibers of
//! type `I_{m_j}`) and its arithmetic genus `chi`. A section is described
//! by the component index `k_j` it meets on each singular fiber. All
//! quantities are exact rationals.

pub mod characters;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod numtheory;
pub mod relations;
pub mod solver;
pub mod surface_model;

pub use error::{Error, Result};
pub use exact::{fmt_q, parse_q, QMatrix, Q};
pub use lattice::LatticeBasis;
pub use relations::{RelationId, RelationReport};
pub use solver::{enumerate, verify_group_closure, EnumerationQuery, SolutionSet};
pub use surface_model::{ComponentAssignment, FiberConfiguration};
