//! Twist reduction of SU(n)-structures under linear torus actions, with
//! numerical certification of every identity along the way.

pub mod error;
pub mod exterior;
pub mod field;
pub mod poly;
pub mod reduction;
pub mod report;
pub mod scenario;
pub mod search;
pub mod skew;
pub mod torsion;
pub mod torus;
pub mod twist;

pub use error::{Error, Result};
pub use exterior::{Form, MultiIndex, TangentVector, C64, I};
pub use field::{FormField, ScalarField, VectorFieldExpr};
