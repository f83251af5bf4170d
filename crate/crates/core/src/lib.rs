//! Sharp Gabor frame bounds for windows on symplectic lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`symplectic`] – the symplectic group `Sp(d)`: generator matrices,
//!   free factorizations and decomposition into generator chains.
//! * [`lattice`] – lattices `δ^{-1/2d} S ℤ^{2d}` and point enumeration.
//! * [`windows`] – sampled window functions (Gaussians, Hermite functions,
//!   an odd compactly supported bump) on a centered time grid.
//! * [`tfa`] – short-time Fourier transform, ambiguity and Wigner
//!   distributions, symplectic Fourier transform.
//! * [`metaplectic`] – the metaplectic generator operators acting on
//!   sampled windows.
//! * [`framebounds`] – Janssen, Zak and finite-section frame bounds, the
//!   reduction of symplectic lattices to square ones, and the vanishing
//!   lower-bound certificates for even and odd windows.
//! * [`specs`] – textual window/lattice/matrix specs used by the CLI.
//! * [`sampling`] – seeded random symplectic matrices and generator chains.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod framebounds;
pub mod interp;
pub mod lattice;
pub mod metaplectic;
pub mod sampling;
pub mod specs;
pub mod symplectic;
pub mod tfa;
pub mod windows;

pub use error::{Error, Result};
pub use num_complex::Complex64;
