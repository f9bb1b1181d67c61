//! Analysis toolkit for the quasilinear equation
//!
//! ```text
//! div(phi(|grad u|^2) grad u) + psi(u^2) u = 0
//! ```
//!
//! on complete Riemannian manifolds with Ricci curvature bounded below.
//!
//! The library computes the degree bounds of the operator function `phi`,
//! checks the structural conditions under which a logarithmic gradient
//! estimate (and the resulting Harnack inequality and Liouville theorems)
//! holds for a given reaction `psi`, and numerically verifies the estimate
//! on radial solutions in model spaces.
//!
//! ```
//! use philap::families::{PhiSpec, PsiSpec};
//! use philap::verdict::{classify, Verdict};
//!
//! let phi = PhiSpec::ConstantOne;
//! let psi = PsiSpec::DoublePower { m: 1.0, k: 3.0 };
//! match classify(&phi, &psi, 3, true).unwrap() {
//!     Verdict::Liouville { .. } => {}
//!     other => panic!("unexpected verdict {other:?}"),
//! }
//! ```

pub mod cli;
pub mod config;
pub mod coupling;
pub mod degree;
pub mod error;
pub mod ext;
pub mod families;
pub mod intervals;
pub mod radial;
pub mod report;
pub mod scan;
pub mod search;
pub mod verdict;

pub use error::{Error, Result};
pub use ext::ExtReal;
