//! Coordinate-projection geometry of finite function classes.
//!
//! Everything here works on the uniform probability space `{0, .., n-1}`:
//! Orlicz `ψ_p` norms, random coordinate projections driven by Bernoulli
//! selectors, Haar rotations and the coordinate Johnson–Lindenstrauss
//! embedding, exact shattering dimension (with a linear-programming route
//! for convex hulls), covering and packing numbers, and Monte-Carlo
//! Gaussian/Rademacher complexities.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line interface live in the `coordproj` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod complexity;
pub mod entropy;
pub mod error;
pub mod lp;
pub mod orlicz;
pub mod rng;
pub mod rotation;
pub mod selector;
pub mod shatter;
pub mod space;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use space::{normalized_lp, project, project_class, CoordinateSubset, FunctionClass, Norm, RealVector};
