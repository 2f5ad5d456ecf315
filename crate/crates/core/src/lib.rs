//! Exact Kazhdan-Lusztig machinery for low-rank Weyl groups.

pub mod asymptotic;
pub mod cache;
pub mod cells;
pub mod coxeter;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod orbits;

pub use cells::{AFunctionTable, CellPartition, Preorder};
pub use coxeter::{Ball, CoxeterDatum, GroupElt, Side, TypeLabel};
pub use error::{Error, Result};
pub use hecke::{Basis, HeckeElt, KLTable};
pub use laurent::LaurentPoly;
