//! Exact computations for finite abelian covers of the adele class space
//! of `Q`: Artin maps and conductors, Frobenius monodromy over periodic
//! orbits, truncated profinite units, semilocal adeles, finite
//! Bruhat–Schwartz tables, and rank solving for six-term exact sequences.

pub mod arith;
pub mod covers;
pub mod error;
pub mod ktheory;
pub mod extension;
pub mod place;
pub mod profinite;
pub mod rational;
pub mod residue;
pub mod schwartz;
pub mod semilocal;

pub use error::{Error, Result};
