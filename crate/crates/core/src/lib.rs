//! Piecewise-linear fitting with certified error and compact MILP
//! formulations of the resulting disjunctive constraints.

pub mod biclique;
pub mod blocking;
pub mod conflict;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod milp;
pub mod mesh;
pub mod pipeline;
pub mod sampling;
pub mod solver;
pub mod sths;

pub use error::{Error, Result};
pub use geometry::{Point2, Rect};
pub use mesh::{SetSystem, SimplicialPartition};
