//! Complete 3-manifolds with Ricci eigenvalues `(-1, -1, 0)`.
//!
//! The metrics have the form
//!
//! ```text
//! g = (cosh u - h(x) sinh u)^2 dx^2 + (du - f(x) v dx)^2 + (dv + f(x) u dx)^2
//! ```
//!
//! for scalar functions `f` and `h`. The crate evaluates the metric and its
//! adapted frame, checks the curvature and frame identities with an
//! independent finite-difference tensor engine, builds the geodesic
//! foliations of the hyperbolic plane that underlie the non-smooth examples,
//! and verifies the Lyndon length-function axioms for the leaf-crossing count
//! on the free group of rank two.

pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod foliation;
pub mod hyperbolic;
pub mod lyndon;
pub mod metric;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
