//! Exact invariants of elliptic configurations on products of CM elliptic
//! curves and of their pull-backs under diagonal isogenies.

pub mod catalog;
pub mod error;
pub mod format;
pub mod geometry;
pub mod intmat;
pub mod isogeny;
pub mod lattice;
pub mod quad;

pub use error::{Error, Result};
pub use intmat::{Int, IntMatrix};
pub use quad::{FieldTag, OrderRef, QuadInt};
