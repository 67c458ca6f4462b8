//! Toeplitz operators of torus-rotation generators and their spectral projectors.
//!
//! On a Reinhardt domain the generator `T_λ = Σ λ_j (x_j ∂_{y_j} − y_j ∂_{x_j})` of
//! `z ↦ (e^{iλ_1θ} z_1, …)` preserves volume, so `R = −iT_λ` is formally self-adjoint
//! and acts on holomorphic monomials by `R z^α = ⟨λ, α⟩ z^α`. The Bergman projection
//! fixes holomorphic monomials, so `T_R = BRB` is diagonal in the monomial basis and
//! `χ_k(T_R)` is the finite-rank operator with eigenweights `χ(⟨λ,α⟩ / k)`.

mod chi;
mod galerkin;
mod generator;
mod helffer_sjostrand;
mod projector;

pub use chi::ChiProfile;
pub use galerkin::{galerkin_toeplitz_matrix, GalerkinMatrix, QuadratureSpec};
pub use generator::RotationGenerator;
pub use helffer_sjostrand::{
    chi_by_eigendecomposition, gershgorin_interval, helffer_sjostrand_chi, random_hermitian,
    HelfferSjostrand, HsOutcome,
};
pub use projector::{
    build_boundary_projector, build_projector, exact_cutoff, toeplitz_eigenvalue, ProjectorFamily,
    ProjectorKind, ProjectorRecord, SpectralProjectorRep,
};
