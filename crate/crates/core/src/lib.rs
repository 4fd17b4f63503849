//! Boundary capacity, quasi-local mass and the Lambda-invariant on
//! rotationally symmetric asymptotically flat 3-manifolds.

// `!(x > 0.0)` rejects NaN along with the out-of-range values, and index
// loops read closer to the formulas than iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod gluing;
pub mod harness;
pub mod numerics;
pub mod quasilocal;
pub mod surface;
pub mod symmetrization;

pub use error::{Error, Result};

// The guide's snippets run as doc-tests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/quasilocal.md")]
    mod quasilocal {}
    #[doc = include_str!("../../../book/src/symmetrization.md")]
    mod symmetrization {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/gluing.md")]
    mod gluing {}
}
