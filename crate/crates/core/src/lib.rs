//! Numerical laboratory for semi-classical spectral projectors `χ_k(T_R)` of
//! Toeplitz operators on model strictly pseudoconvex domains in `ℂⁿ`.
//!
//! The model domains (unit ball, Hermitian ellipsoids) are Reinhardt domains, so the
//! Bergman space has an orthogonal monomial basis and torus-rotation generators act
//! diagonally on it. `χ_k(T_R)` is therefore an exactly computable finite-rank operator,
//! and its kernel can be compared against the geometric predictions for the boundary
//! expansion: growth orders `kⁿ⁺¹` (Bergman) and `kⁿ` (Szegő), the leading
//! coefficients `b₀`, `A₀`, interior and off-diagonal decay, and trace bounds.
//!
//! Module map:
//!
//! * [`geometry`]: defining functions, contact form, Levi form, Reeb-like decomposition.
//! * [`domains`]: model domains, multi-indices, monomial norms and their Monte-Carlo oracle.
//! * [`spectral`]: bump profiles, rotation generators, projector records, Galerkin and
//!   Helffer–Sjöstrand oracles.
//! * [`kernels`]: log-stabilized kernel evaluation and diagonal/off-diagonal scans.
//! * [`asymptotics`]: predicted coefficients, growth-order fits and verdict reports.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the `parallel`
//! feature is enabled and plain iterators otherwise.

pub mod asymptotics;
pub mod domains;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod jet;
pub mod kernels;
pub mod quadrature;
pub mod spectral;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
