//! Exact computations around Lagrangian subspaces of ∧³W for a 6-dimensional W:
//! degeneracy strata on G(3,6), the local chart at a point, Schubert calculus on
//! G(3,6) and LG(n,2n), and a special-Lagrangian K3 pipeline over prime fields.

pub mod chart;
pub mod chow;
pub mod dual_k3;
pub mod error;
pub mod exterior;
pub mod lagrangian;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod strata;

pub use error::{Error, Result};
pub use scalar::{Field, Fp, Prime, Rational};
