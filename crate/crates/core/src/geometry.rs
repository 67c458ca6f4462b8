//! Boundary geometry of model domains.
//!
//! Points of `ℂⁿ` are carried as real vectors of length `2n` in interleaved order
//! `(x₁, y₁, …, xₙ, yₙ)` with `z_j = x_j + i y_j`. The ambient metric is Euclidean,
//! the volume is Lebesgue measure, and the induced Hermitian pairing on `(1,0)`
//! vectors is `⟨∂/∂z_j | ∂/∂z_k⟩ = δ_jk / 2`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for a point to count as lying on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Gradients shorter than this cannot be normalized.
pub const DEGENERATE_GRADIENT: f64 = 1e-10;

/// Real coordinates of the complex point `z`.
pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect()
}

/// The complex structure: `J∂/∂x = ∂/∂y`, `J∂/∂y = −∂/∂x`.
pub fn apply_j(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for j in 0..v.len() / 2 {
        out[2 * j] = -v[2 * j + 1];
        out[2 * j + 1] = v[2 * j];
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `∂²ρ/∂z_j∂z̄_k` assembled from the real Hessian.
pub fn complex_hessian_from_real(h: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = h.nrows() / 2;
    DMatrix::from_fn(n, n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            0.25 * (h[(xj, xk)] + h[(yj, yk)]),
            0.25 * (h[(xj, yk)] - h[(yj, xk)]),
        )
    })
}

/// A smooth real function on `ℝ²ⁿ` whose negative set is the domain.
pub trait DefiningFunction: Sync {
    /// Complex dimension `n`.
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Euclidean gradient `∇ρ`.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn real_hessian(&self, x: &[f64]) -> DMatrix<f64>;

    fn complex_hessian(&self, x: &[f64]) -> DMatrix<Complex64> {
        complex_hessian_from_real(&self.real_hessian(x))
    }

    /// The row vector `(∂ρ/∂z_1, …, ∂ρ/∂z_n)`.
    fn dz(&self, x: &[f64]) -> Vec<Complex64> {
        let g = self.gradient(x);
        g.chunks_exact(2)
            .map(|p| Complex64::new(0.5 * p[0], -0.5 * p[1]))
            .collect()
    }
}

/// Defining functions that also expose third derivatives, which the normalization
/// `ρ / |∇ρ|` needs for a consistent Hessian.
pub trait RawDefiningFunction: DefiningFunction {
    /// `Σ_c ∂³ρ/∂x_a∂x_b∂x_c · v_c`.
    fn third_contracted(&self, x: &[f64], v: &[f64]) -> DMatrix<f64>;
}

/// `ρ(z) = s · (Σ a_j |z_j|² − 1)`: the ball for `a = 1`, a Hermitian ellipsoid otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianQuadric {
    pub a: Vec<f64>,
    pub scale: f64,
}

impl HermitianQuadric {
    pub fn new(a: Vec<f64>) -> Self {
        HermitianQuadric { a, scale: 1.0 }
    }

    pub fn ball(n: usize) -> Self {
        Self::new(vec![1.0; n])
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }
}

impl DefiningFunction for HermitianQuadric {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let q: f64 = self
            .a
            .iter()
            .enumerate()
            .map(|(j, a)| a * (x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]))
            .sum();
        self.scale * (q - 1.0)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| 2.0 * self.scale * self.a[i / 2] * x[i])
            .collect()
    }

    fn real_hessian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(x.len(), x.len(), |i, j| {
            if i == j {
                2.0 * self.scale * self.a[i / 2]
            } else {
                0.0
            }
        })
    }
}

impl RawDefiningFunction for HermitianQuadric {
    fn third_contracted(&self, x: &[f64], _v: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// `ρ̂ = ρ · g` with `g = |∇ρ|⁻¹`; value, gradient and Hessian follow from the product rule.
#[derive(Debug, Clone)]
pub struct Normalized<D> {
    raw: D,
}

impl<D: RawDefiningFunction> Normalized<D> {
    pub fn raw(&self) -> &D {
        &self.raw
    }

    fn parts(&self, x: &[f64]) -> (f64, Vec<f64>, DMatrix<f64>, f64) {
        let g = self.raw.gradient(x);
        let h = self.raw.real_hessian(x);
        let inv = 1.0 / norm(&g);
        (self.raw.value(x), g, h, inv)
    }
}

pub fn normalize_defining_function<D: RawDefiningFunction>(
    raw: D,
    x: &[f64],
) -> Result<Normalized<D>> {
    if x.len() != 2 * raw.dim() {
        return Err(Error::DimensionMismatch {
            expected: 2 * raw.dim(),
            got: x.len(),
        });
    }
    let n = norm(&raw.gradient(x));
    if n < DEGENERATE_GRADIENT {
        return Err(Error::DegenerateGradient { norm: n });
    }
    Ok(Normalized { raw })
}

impl<D: RawDefiningFunction> DefiningFunction for Normalized<D> {
    fn dim(&self) -> usize {
        self.raw.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (v, _, _, inv) = self.parts(x);
        v * inv
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (v, g, h, inv) = self.parts(x);
        let hg = &h * DVector::from_column_slice(&g);
        // ∇(ρg) = g∇ρ + ρ∇g, ∇g = −g³ H∇ρ
        let c = -inv.powi(3) * v;
        g.iter()
            .zip(hg.iter())
            .map(|(gi, hgi)| inv * gi + c * hgi)
            .collect()
    }

    fn real_hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let (v, g, h, inv) = self.parts(x);
        let gv = DVector::from_column_slice(&g);
        let hg = &h * &gv;
        let grad_inv = &hg * (-inv.powi(3));
        let hess_inv = &hg * hg.transpose() * (3.0 * inv.powi(5))
            - (&h * &h + self.raw.third_contracted(x, &g)) * inv.powi(3);
        &h * inv + &gv * grad_inv.transpose() + &grad_inv * gv.transpose() + hess_inv * v
    }
}

/// ω₀ = −dρ∘J at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactData {
    pub point: Vec<f64>,
    pub omega0: Vec<f64>,
    /// `J(∇ρ)` at the point.
    pub reeb_direction: Vec<f64>,
    pub gradient: Vec<f64>,
}

impl ContactData {
    pub fn apply(&self, v: &[f64]) -> f64 {
        dot(&self.omega0, v)
    }

    /// Orthonormal real basis of `HX = ker dρ ∩ ker ω₀`.
    pub fn hx_basis(&self) -> Vec<Vec<f64>> {
        let dim = self.point.len();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let excluded = [unit(&self.gradient), unit(&self.reeb_direction)];
        for i in 0..dim {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            for e in excluded.iter().chain(basis.iter()) {
                let c = dot(&v, e);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
            }
            let n = norm(&v);
            if n > 1e-8 {
                basis.push(v.iter().map(|a| a / n).collect());
            }
            if basis.len() == dim - 2 {
                break;
            }
        }
        basis
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|a| a / n).collect()
}

fn check_boundary<D: DefiningFunction + ?Sized>(rho: &D, x: &[f64]) -> Result<()> {
    if x.len() != 2 * rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: 2 * rho.dim(),
            got: x.len(),
        });
    }
    let v = rho.value(x);
    if v.abs() > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary { value: v.abs() });
    }
    Ok(())
}

pub fn omega0_at<D: DefiningFunction + ?Sized>(rho: &D, x: &[f64]) -> Result<ContactData> {
    check_boundary(rho, x)?;
    let gradient = rho.gradient(x);
    let dim = x.len();
    let omega0 = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            -dot(&gradient, &apply_j(&e))
        })
        .collect();
    Ok(ContactData {
        point: x.to_vec(),
        omega0,
        reeb_direction: apply_j(&gradient),
        gradient,
    })
}

/// Eigenvalues of the Levi form at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct LeviSpectrum {
    pub point: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub det_levi: f64,
    pub strictly_pseudoconvex: bool,
}

/// Orthonormal frame of `T^{1,0}X` with respect to `⟨·|·⟩`, as coordinate vectors
/// `U = Σ U_j ∂/∂z_j`. Each frame vector has Euclidean coordinate norm `√2`.
pub fn tangent_frame<D: DefiningFunction + ?Sized>(
    rho: &D,
    x: &[f64],
) -> Result<Vec<DVector<Complex64>>> {
    check_boundary(rho, x)?;
    let n = rho.dim();
    let g = rho.dz(x);
    // U ∈ T^{1,0}X  ⇔  Σ U_j g_j = 0  ⇔  U ⟂ conj(g)
    let normal = DVector::from_iterator(n, g.iter().map(|c| c.conj()));
    let normal = &normal / Complex64::new(normal.norm(), 0.0);
    let pivot = (0..n)
        .max_by(|&a, &b| {
            g[a].norm()
                .partial_cmp(&g[b].norm())
                .unwrap()
                .then(b.cmp(&a))
        })
        .unwrap_or(0);
    let mut frame: Vec<DVector<Complex64>> = Vec::with_capacity(n.saturating_sub(1));
    for i in (0..n).filter(|&i| i != pivot) {
        let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
        v[i] = Complex64::new(1.0, 0.0);
        for e in std::iter::once(&normal).chain(frame.iter()) {
            let c = e.dotc(&v);
            v -= e * c;
        }
        let nv = v.norm();
        frame.push(v / Complex64::new(nv, 0.0));
    }
    let s = Complex64::new(std::f64::consts::SQRT_2, 0.0);
    Ok(frame.into_iter().map(|v| v * s).collect())
}

/// Matrix `∂∂̄ρ(U_a, Ū_b)` of the Levi form in the given frame.
pub fn levi_matrix<D: DefiningFunction + ?Sized>(
    rho: &D,
    x: &[f64],
    frame: &[DVector<Complex64>],
) -> DMatrix<Complex64> {
    let h = rho.complex_hessian(x);
    let m = frame.len();
    DMatrix::from_fn(m, m, |a, b| {
        let hu = &h * frame[b].conjugate();
        frame[a].dot(&hu)
    })
}

pub fn levi_spectrum<D: DefiningFunction + ?Sized>(rho: &D, x: &[f64]) -> Result<LeviSpectrum> {
    let frame = tangent_frame(rho, x)?;
    if frame.is_empty() {
        // n = 1: T^{1,0}X = 0 and det is the empty product.
        return Ok(LeviSpectrum {
            point: x.to_vec(),
            eigenvalues: Vec::new(),
            det_levi: 1.0,
            strictly_pseudoconvex: true,
        });
    }
    let l = levi_matrix(rho, x, &frame);
    Ok(spectrum_of(x, l))
}

/// Eigenvalues of a Levi matrix expressed in an arbitrary orthonormal frame.
pub fn spectrum_of(x: &[f64], levi: DMatrix<Complex64>) -> LeviSpectrum {
    let herm = (&levi + levi.adjoint()) * Complex64::new(0.5, 0.0);
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let det_levi = eigenvalues.iter().product();
    LeviSpectrum {
        point: x.to_vec(),
        strictly_pseudoconvex: eigenvalues.iter().all(|&l| l > 0.0),
        eigenvalues,
        det_levi,
    }
}

/// A real vector field on `ℝ²ⁿ`.
pub trait VectorField: Sync {
    fn at(&self, x: &[f64]) -> Vec<f64>;
}

impl<F> VectorField for F
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn at(&self, x: &[f64]) -> Vec<f64> {
        self(x)
    }
}

/// `T = α·J(∇ρ) + Z` with `Z ∈ HX`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebDecomposition {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub z_component: Vec<f64>,
}

pub const TANGENCY_TOL: f64 = 1e-8;

pub fn decompose_reeb_like<F, D>(field: &F, rho: &D, x: &[f64]) -> Result<ReebDecomposition>
where
    F: VectorField + ?Sized,
    D: DefiningFunction + ?Sized,
{
    let contact = omega0_at(rho, x)?;
    let t = field.at(x);
    let normal = dot(&contact.gradient, &t);
    if normal.abs() > TANGENCY_TOL {
        return Err(Error::NotTangent {
            value: normal.abs(),
        });
    }
    let alpha = contact.apply(&t);
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha { alpha });
    }
    let z_component = t
        .iter()
        .zip(&contact.reeb_direction)
        .map(|(ti, ri)| ti - alpha * ri)
        .collect();
    Ok(ReebDecomposition {
        point: x.to_vec(),
        alpha,
        z_component,
    })
}

/// Central finite-difference derivatives. Used only to cross-check the exact paths.
pub mod finite_difference {
    use super::*;

    pub const STEP: f64 = 1e-6;

    pub fn gradient<D: DefiningFunction + ?Sized>(rho: &D, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[i] += STEP;
                m[i] -= STEP;
                (rho.value(&p) - rho.value(&m)) / (2.0 * STEP)
            })
            .collect()
    }

    /// Real Hessian by central differences of the exact-or-FD value.
    pub fn real_hessian<D: DefiningFunction + ?Sized>(rho: &D, x: &[f64], h: f64) -> DMatrix<f64> {
        let d = x.len();
        DMatrix::from_fn(d, d, |i, j| {
            let eval = |si: f64, sj: f64| {
                let mut p = x.to_vec();
                p[i] += si;
                p[j] += sj;
                rho.value(&p)
            };
            (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h)
        })
    }

    pub fn complex_hessian<D: DefiningFunction + ?Sized>(
        rho: &D,
        x: &[f64],
        h: f64,
    ) -> DMatrix<Complex64> {
        complex_hessian_from_real(&real_hessian(rho, x, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_point(n: usize) -> Vec<f64> {
        let mut x = vec![0.0; 2 * n];
        x[0] = 1.0;
        x
    }

    #[test]
    fn metric_convention_on_holomorphic_vectors() {
        // ∂/∂z = (∂x − i∂y)/2 has real components (1/2, −1/2 as imaginary y-part);
        // its Hermitian norm squared is (1/4)(|1|² + |−i|²) = 1/2.
        let d = Complex64::new(0.5, 0.0);
        let dy = Complex64::new(0.0, -0.5);
        let pairing = (d * d.conj() + dy * dy.conj()).re;
        assert!((pairing - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normalize_ball_examples() {
        let x = ball_point(1);
        let rho = normalize_defining_function(HermitianQuadric::ball(1), &x).unwrap();
        assert_eq!(rho.value(&x), 0.0);
        assert!((norm(&rho.gradient(&x)) - 1.0).abs() < 1e-12);
        let z = [0.5, 0.0];
        assert!((rho.value(&z) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn normalize_ellipsoid_at_axis_point() {
        let x = vec![1.0, 0.0, 0.0, 0.0];
        let raw = HermitianQuadric::new(vec![1.0, 4.0]);
        assert!((norm(&raw.gradient(&x)) - 2.0).abs() < 1e-15);
        let fd = finite_difference::gradient(&raw, &x);
        assert!((norm(&fd) - 2.0).abs() < 1e-8);
        let rho = normalize_defining_function(raw, &x).unwrap();
        assert_eq!(rho.value(&x), 0.0);
        assert!((norm(&rho.gradient(&x)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_derivatives_match_finite_differences() {
        let raw = HermitianQuadric::new(vec![1.0, 4.0]);
        let rho = normalize_defining_function(raw, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let p = [0.3, -0.2, 0.25, 0.1];
        let g = rho.gradient(&p);
        let g_fd = finite_difference::gradient(&rho, &p);
        for (a, b) in g.iter().zip(&g_fd) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let h = rho.real_hessian(&p);
        let h_fd = finite_difference::real_hessian(&rho, &p, 1e-4);
        assert!((h - h_fd).amax() < 1e-6);
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        let err = normalize_defining_function(HermitianQuadric::ball(2), &[0.0; 4]).unwrap_err();
        assert!(matches!(err, Error::DegenerateGradient { .. }));
    }

    #[test]
    fn omega0_on_the_disk_is_dy() {
        let x = ball_point(1);
        let rho = normalize_defining_function(HermitianQuadric::ball(1), &x).unwrap();
        let c = omega0_at(&rho, &x).unwrap();
        assert!((c.omega0[0]).abs() < 1e-15);
        assert!((c.omega0[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega0_of_reeb_direction_is_one() {
        let x = vec![0.0, 0.0, 0.0, 1.0];
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &x).unwrap();
        let c = omega0_at(&rho, &x).unwrap();
        assert!((c.apply(&c.reeb_direction) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega0_ellipsoid_matches_symbolic_and_fd() {
        // a = (1,4), z₂ = 1/2: raw ∇ρ = (0,0,4,0), |∇ρ| = 4, ∇ρ̂ = (0,0,1,0), ω₀ = J∇ρ̂ = (0,0,0,1)
        let x = vec![0.0, 0.0, 0.5, 0.0];
        let raw = HermitianQuadric::new(vec![1.0, 4.0]);
        let rho = normalize_defining_function(raw.clone(), &x).unwrap();
        let c = omega0_at(&rho, &x).unwrap();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (a, b) in c.omega0.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let fd = finite_difference::gradient(&rho, &x);
        let fd_omega: Vec<f64> = apply_j(&fd);
        for (a, b) in c.omega0.iter().zip(&fd_omega) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn not_on_boundary_is_rejected() {
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &[1.0, 0.0, 0.0, 0.0])
            .unwrap();
        let err = omega0_at(&rho, &[0.5, 0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NotOnBoundary { .. }));
    }

    #[test]
    fn omega0_annihilates_hx() {
        let x = vec![0.6, 0.0, 0.0, 0.8];
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &x).unwrap();
        let c = omega0_at(&rho, &x).unwrap();
        let basis = c.hx_basis();
        assert_eq!(basis.len(), 2);
        for v in basis {
            assert!(c.apply(&v).abs() <= 1e-10 * norm(&v));
            assert!(dot(&c.gradient, &v).abs() < 1e-12);
            let jv = apply_j(&v);
            assert!(dot(&c.gradient, &jv).abs() < 1e-12);
        }
    }

    #[test]
    fn levi_of_ball_is_identity() {
        for n in 2..=3 {
            let x = ball_point(n);
            let rho = normalize_defining_function(HermitianQuadric::ball(n), &x).unwrap();
            let s = levi_spectrum(&rho, &x).unwrap();
            assert_eq!(s.eigenvalues.len(), n - 1);
            for l in &s.eigenvalues {
                assert!((l - 1.0).abs() < 1e-12);
            }
            assert!((s.det_levi - 1.0).abs() < 1e-12);
            assert!(s.strictly_pseudoconvex);
        }
    }

    #[test]
    fn levi_of_disk_is_empty_product() {
        let x = ball_point(1);
        let rho = normalize_defining_function(HermitianQuadric::ball(1), &x).unwrap();
        let s = levi_spectrum(&rho, &x).unwrap();
        assert!(s.eigenvalues.is_empty());
        assert_eq!(s.det_levi, 1.0);
    }

    #[test]
    fn levi_of_ellipsoid_axis_point() {
        // a = (1,4) at (1,0): |∇ρ_raw| = 2, ∂∂̄ρ̂ = diag(1,4)/2 on T^{1,0}X = span(∂z₂),
        // ⟨∂z₂|∂z₂⟩ = 1/2, so the single eigenvalue is 2 · 4/2 = 4.
        let x = ball_point(2);
        let raw = HermitianQuadric::new(vec![1.0, 4.0]);
        let rho = normalize_defining_function(raw, &x).unwrap();
        let s = levi_spectrum(&rho, &x).unwrap();
        assert!((s.det_levi - 4.0).abs() < 1e-12);
        // finite-difference oracle on the same frame
        let frame = tangent_frame(&rho, &x).unwrap();
        let h_fd = finite_difference::complex_hessian(&rho, &x, 1e-4);
        let m = frame.len();
        let l_fd = DMatrix::from_fn(m, m, |a, b| {
            frame[a].dot(&(&h_fd * frame[b].conjugate()))
        });
        let s_fd = spectrum_of(&x, l_fd);
        assert!((s_fd.det_levi - 4.0).abs() < 1e-5);
    }

    #[test]
    fn rotation_field_on_ball_is_pure_reeb() {
        let x = vec![0.6, 0.0, 0.0, 0.8];
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &x).unwrap();
        let rot = |p: &[f64]| apply_j(p);
        let d = decompose_reeb_like(&rot, &rho, &x).unwrap();
        assert!((d.alpha - 1.0).abs() < 1e-12);
        assert!(norm(&d.z_component) < 1e-12);
    }

    #[test]
    fn weighted_rotation_alpha() {
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &ball_point(2)).unwrap();
        let weights = [1.0, 2.0];
        let field = move |p: &[f64]| {
            let mut v = vec![0.0; p.len()];
            for j in 0..p.len() / 2 {
                v[2 * j] = -weights[j] * p[2 * j + 1];
                v[2 * j + 1] = weights[j] * p[2 * j];
            }
            v
        };
        for &(a, b) in &[(1.0f64, 0.0f64), (0.0, 1.0), (0.6, 0.8)] {
            let x = vec![a, 0.0, 0.0, b];
            let d = decompose_reeb_like(&field, &rho, &x).unwrap();
            let expected = a * a + 2.0 * b * b;
            assert!((d.alpha - expected).abs() < 1e-12);
            assert!((1.0..=2.0).contains(&d.alpha));
            let c = omega0_at(&rho, &x).unwrap();
            assert!(c.apply(&d.z_component).abs() <= 1e-10 * norm(&d.z_component) + 1e-12);
            assert!(dot(&c.gradient, &d.z_component).abs() <= 1e-10 * norm(&d.z_component) + 1e-12);
        }
    }

    #[test]
    fn perturbed_reeb_field_recovers_perturbation() {
        let x = ball_point(2);
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &x).unwrap();
        // ∂/∂x₂ and ∂/∂y₂ span HX at (1,0)
        let pert = vec![0.0, 0.0, 0.3, -0.7];
        let c = omega0_at(&rho, &x).unwrap();
        let field: Vec<f64> = c
            .reeb_direction
            .iter()
            .zip(&pert)
            .map(|(a, b)| a + b)
            .collect();
        let f = move |_: &[f64]| field.clone();
        let d = decompose_reeb_like(&f, &rho, &x).unwrap();
        assert!((d.alpha - 1.0).abs() < 1e-12);
        for (a, b) in d.z_component.iter().zip(&pert) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reeb_errors() {
        let x = ball_point(2);
        let rho = normalize_defining_function(HermitianQuadric::ball(2), &x).unwrap();
        let radial = |p: &[f64]| p.to_vec();
        assert!(matches!(
            decompose_reeb_like(&radial, &rho, &x),
            Err(Error::NotTangent { .. })
        ));
        let backwards = |p: &[f64]| apply_j(p).iter().map(|v| -v).collect::<Vec<_>>();
        assert!(matches!(
            decompose_reeb_like(&backwards, &rho, &x),
            Err(Error::NonPositiveAlpha { .. })
        ));
    }
}
