//! Invariants of the coadjoint representation of finite-dimensional Lie
//! algebras given by structure constants.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod invariants;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use expr::Expr;
pub use lie::StructureConstants;
pub use poly::{Monomial, Polynomial};
