//! Exact verification of explicit isomorphisms between quotients of
//! (twisted) symmetric powers of GL₂(F_q) and induced representations.
//!
//! Everything is computed over finite fields with exact linear algebra:
//! ranks, kernels and subspace equalities, never floating point.

pub mod cli;
pub mod cuspmaps;
pub mod diffop;
pub mod dualnum;
pub mod error;
pub mod gf;
pub mod grp;
pub mod lemmas;
pub mod linalg;
pub mod poly;
pub mod psmaps;
pub mod rep;
pub mod report;
pub mod theta;

pub use error::{Error, Result};
