//! Vanishing orders of Helmholtz eigenfunctions at edge and vertex corners.
//!
//! * [`specfun`]: spherical Bessel, associated Legendre and spherical harmonic kernels.
//! * [`geometry`]: boundary conditions, edge and vertex corners, angle rationality.
//! * [`expansion`]: truncated spherical-wave expansions and their boundary traces.
//! * [`vanish`]: guaranteed vanishing orders from corner angles and boundary types.
//! * [`oracle`]: collocation nullspaces and integral decay estimates that check them.
//! * [`scatter`]: fundamental-solution scattering off polyhedra and the two-wave corner test.

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scatter;
pub mod specfun;
pub mod vanish;

pub use error::{Error, Result};
