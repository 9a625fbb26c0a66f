//! elleig: a multiprecision laboratory for the fundamental Dirichlet
//! eigenvalue of the ellipse.
//!
//! The crate computes the lowest eigenvalue of the Laplacian on an
//! elliptical membrane with a clamped boundary to arbitrary precision
//! (boundary point matching with a symmetry-reduced Fourier-Bessel
//! basis), fits eigenvalue datasets to power series in either
//! eccentricity or the stretch factor, and recovers exact closed forms
//! for the fitted coefficients with an exact-integer LLL relation
//! search.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the
//! `elleig` command-line tool; the library surface mirrors the same
//! building blocks:
//!
//! - [`mp`]: precision contexts, Bessel functions, root refinement
//! - [`geometry`]: ellipse shapes, area conventions, eigenvalue records
//! - [`solver`]: the point-matching eigensolver with its convergence
//!   ladder
//! - [`series`]: interpolating fits, trusted-digit estimates, deflation
//! - [`relation`]: LLL reduction and closed-form recovery
//! - [`pipeline`]: batch runs, data files, and the discovery loop

pub mod error;
pub mod expansions;
pub mod form;
pub mod geometry;
pub mod linalg;
pub mod series;
pub mod solver;
pub mod mp;
pub mod relation;

pub use error::{Error, Result};
