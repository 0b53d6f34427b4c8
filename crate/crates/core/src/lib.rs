#![no_std]
//! Covariance-matrix calculus for bosonic Gaussian memory channels.
//!
//! The crate covers the path from an `n`-use channel triad `(d, X, Y)` to
//! its Gaussian Holevo function under a mean-photon constraint:
//!
//! - [`gaussian`]: orderings, symplectic form, covariance matrices,
//!   symplectic eigenvalues and entropy;
//! - [`channel`]: triads, composition, complete positivity, passive unitaries;
//! - [`unravel`]: encodings/decodings that split a memory channel into
//!   independent one-mode channels, and the phase-rotation symmetry test;
//! - [`holevo`]: one-mode Holevo quantities, water-filling, and the
//!   optimal (possibly entangled) Gaussian ensemble;
//! - [`models`]: the correlated-noise and interference channel families.
//!
//! Everything is `no_std` with `alloc`.

extern crate alloc;

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod holevo;
mod linalg;
pub mod models;
pub mod random;
mod simplex;
pub mod unravel;

pub use channel::{compose, GaussianChannel, PhaseRotation, SymplecticOrthogonal, Validity};
pub use error::{Error, Result};
pub use gaussian::{
    entropy, g_function, g_prime, symplectic_eigenvalues, symplectic_form, CovarianceMatrix, GaussianState,
    Ordering,
};
