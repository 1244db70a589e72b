//! Exact arithmetic in the ring of Hurwitz series over Q or GF(p), solutions
//! of monic linear homogeneous ODEs by explicit recurrences, and the group of
//! differential automorphisms of the solution space as an explicit matrix
//! group. Works in any characteristic; never needs an algebraic closure.

pub mod diffgalois;
pub mod error;
pub mod hurwitz;
pub mod linalg;
pub mod linode;
pub mod ring;

pub use error::{Error, Result};
pub use hurwitz::{HurwitzSeries, Precision};
pub use linalg::{Matrix, SeriesMatrix};
pub use linode::{LinearOperator, SolutionBasis};
pub use ring::{FieldElem, FieldSpec};
