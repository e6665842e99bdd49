//! Numerics for the weighted Liouville problem
//! `-Δu = ((2+α)/2)² |x|^α f(λ, u)` on the unit disk.

// `!(x > 0.0)` is how parameter guards reject NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod conservation;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod morse;
pub mod plane;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use mesh::{Grading, RadialMesh};
pub use model::{Branch, Nonlinearity, ProblemParams, RadialSolution};
