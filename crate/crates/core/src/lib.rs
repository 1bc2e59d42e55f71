//! Phase-space quantum mechanics on arbitrary constant symplectic structures.
//!
//! Coordinates are always ordered `(x₁, …, xₙ, p₁, …, pₙ)`; a symplectic form
//! `ω(z, z′) = z · Ω⁻¹ z′` is carried by its matrix `Ω`, normalized to
//! `det Ω = 1`.
//!
//! * [`matcore`]: dense kernels (symmetric eigenproblems, SPD roots,
//!   skew-symmetric canonical form, Pfaffian).
//! * [`sympl`]: forms, Darboux matrices, symplectic spectra, Williamson
//!   diagonalization and the constructive searches built on them.
//! * [`gauss`]: Gaussian states, Wigner membership, Narcowich-Wigner
//!   intervals, linear transforms, partial transposition and the region
//!   classification of Gaussians.
//! * [`polygauss`]: exact polynomial×Gaussian algebra, Fock Wigner
//!   functions, KLM positivity checks and non-Gaussian region generators.

pub mod error;
pub mod gauss;
pub mod matcore;
pub mod polygauss;
pub mod sympl;

pub use error::{Error, Result};
pub use gauss::{GaussianState, RegionLabel};
pub use matcore::DenseMatrix;
pub use polygauss::PolyGauss;
pub use sympl::{CovMatrix, DarbouxMatrix, Form, SpectrumResult, WilliamsonFactorization};
