//! Finite-dimensional quantum statistical inference.
//!
//! States, measurements and instruments on `C^d`; parametric models with
//! their symmetric logarithmic derivative (quantum score) and quantum Fisher
//! information; classical Fisher information of a measurement and the
//! Braunstein–Caves bound; maximum-likelihood estimation; state
//! discrimination; Naimark dilation; and channel tomography through the
//! maximally entangled probe.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inference;
pub mod instruments;
pub mod io;
pub mod label;
pub mod linalg;
pub mod measurements;
pub mod models;
pub mod random;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use label::Label;
pub use linalg::{ComplexMatrix, HermitianEig, Subsystem};
pub use measurements::{Observable, Povm};
pub use states::{BlochVector, DensityMatrix, StateVector};
