//! Functional calculus through the Helffer–Sjöstrand formula
//!
//! `f(A) = −(1/π) ∬_ℂ ∂̄f̃(z) (z − A)⁻¹ dx dy`
//!
//! with `f̃(x + iy) = τ(y) Σ_{m≤N} f^{(m)}(x) (iy)^m / m!` an almost-analytic extension.
//! The integral over `y < 0` is the adjoint of the one over `y > 0`, so only the upper
//! half is discretized. `A` is first reduced to a real tridiagonal `T = Q*AQ`, after
//! which each resolvent costs `O(m²)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec;
use crate::quadrature::GaussLegendre;
use crate::spectral::ChiProfile;
use crate::{Error, Result};

pub const MAX_MATRIX_SIZE: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelfferSjostrand {
    /// Order `N` of the almost-analytic extension.
    pub order: usize,
    /// Gauss–Legendre nodes per axis.
    pub nodes: usize,
    /// Enclosure margin as a fraction of the Gershgorin width.
    pub margin: f64,
    /// Height `Y` of the strip as a fraction of the width of `supp χ_k`.
    pub height_fraction: f64,
    /// Nodes with `|∂̄χ̃_k| ≤ threshold` are never flagged.
    pub threshold: f64,
    pub max_refinements: usize,
    /// Upper bound on `nodes²`.
    pub max_nodes: usize,
}

impl Default for HelfferSjostrand {
    fn default() -> Self {
        HelfferSjostrand {
            order: 8,
            nodes: 200,
            margin: 0.2,
            height_fraction: 0.05,
            threshold: 1e-6,
            max_refinements: 6,
            max_nodes: 4_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HsOutcome {
    pub matrix: DMatrix<Complex64>,
    pub nodes_per_axis: usize,
    pub refinements: usize,
}

/// `[min_i (a_ii − Σ_{j≠i}|a_ij|), max_i (a_ii + Σ_{j≠i}|a_ij|)]`.
pub fn gershgorin_interval(a: &DMatrix<Complex64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.nrows() {
        let radius: f64 = (0..a.ncols()).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
        lo = lo.min(a[(i, i)].re - radius);
        hi = hi.max(a[(i, i)].re + radius);
    }
    (lo, hi)
}

fn check_hermitian(a: &DMatrix<Complex64>) -> Result<()> {
    let m = a.nrows();
    if a.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: a.ncols(),
        });
    }
    if m == 0 || m > MAX_MATRIX_SIZE {
        return Err(Error::InvalidArgument(format!(
            "matrix size must be in 1..={MAX_MATRIX_SIZE}, got {m}"
        )));
    }
    let scale = a.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for i in 0..m {
        for j in 0..=i {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
            }
        }
    }
    Ok(())
}

/// Householder reduction `A = Q T Q*` with `T` real symmetric tridiagonal.
fn tridiagonalize(a: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>, DMatrix<Complex64>) {
    let m = a.nrows();
    let mut a = a.clone();
    let mut q = DMatrix::<Complex64>::identity(m, m);
    for k in 0..m.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..m).map(|i| a[(i, k)]).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * norm;
        let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= vn;
        }
        let off = k + 1;
        for col in 0..m {
            let s: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[(off + i, col)]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(off + i, col)] -= vi * s * 2.0;
            }
        }
        for row in 0..m {
            let s: Complex64 = v.iter().enumerate().map(|(i, vi)| a[(row, off + i)] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(row, off + i)] -= s * vi.conj() * 2.0;
            }
            let s: Complex64 = v.iter().enumerate().map(|(i, vi)| q[(row, off + i)] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                q[(row, off + i)] -= s * vi.conj() * 2.0;
            }
        }
    }
    let diag: Vec<f64> = (0..m).map(|i| a[(i, i)].re).collect();
    let mut offdiag = Vec::with_capacity(m.saturating_sub(1));
    let mut phase = vec![Complex64::new(1.0, 0.0); m];
    for i in 0..m.saturating_sub(1) {
        let e = a[(i + 1, i)];
        offdiag.push(e.norm());
        phase[i + 1] = if e.norm() > 0.0 { phase[i] * e / e.norm() } else { phase[i] };
    }
    for (j, p) in phase.iter().enumerate() {
        for row in 0..m {
            q[(row, j)] *= p;
        }
    }
    (diag, offdiag, q)
}

/// Adds `c · (z − T)⁻¹` to the upper triangle of `acc`, returning `‖(z − T)⁻¹‖_F`.
///
/// With `b = z − d` the forward and backward pivots `δ_i`, `η_i` give
/// `G_ii = 1 / (δ_i + η_i − b_i)` and `G_{i,j+1} = e_j G_ij / η_{j+1}`.
fn accumulate_resolvent(
    z: Complex64,
    c: Complex64,
    diag: &[f64],
    off: &[f64],
    fwd: &mut [Complex64],
    bwd: &mut [Complex64],
    acc: &mut [Complex64],
) -> f64 {
    let m = diag.len();
    let b = |i: usize| z - diag[i];
    fwd[0] = b(0);
    for i in 1..m {
        fwd[i] = b(i) - off[i - 1] * off[i - 1] / fwd[i - 1];
    }
    bwd[m - 1] = b(m - 1);
    for i in (0..m - 1).rev() {
        bwd[i] = b(i) - off[i] * off[i] / bwd[i + 1];
    }
    let mut frob = 0.0;
    for i in 0..m {
        let mut g = (fwd[i] + bwd[i] - b(i)).inv();
        acc[i * m + i] += c * g;
        frob += g.norm_sqr();
        for j in i..m - 1 {
            g = g * off[j] / bwd[j + 1];
            acc[i * m + j + 1] += c * g;
            frob += 2.0 * g.norm_sqr();
        }
    }
    frob.sqrt()
}

/// Smooth step equal to 1 on `(−∞, 0]` and 0 on `[1, ∞)`, with its derivative.
fn smooth_step(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (1.0, 0.0);
    }
    if u >= 1.0 {
        return (0.0, 0.0);
    }
    let f = |s: f64| (-1.0 / s).exp();
    let (a, b) = (f(1.0 - u), f(u));
    let (da, db) = (a / ((1.0 - u) * (1.0 - u)), b / (u * u));
    let den = a + b;
    // d/du [a/(a+b)] where a depends on 1 − u
    (a / den, -(da * b + a * db) / (den * den))
}

enum Attempt {
    Done(DMatrix<Complex64>),
    Flagged,
}

impl HelfferSjostrand {
    pub fn apply(&self, a: &DMatrix<Complex64>, chi: &ChiProfile, k: f64) -> Result<HsOutcome> {
        check_hermitian(a)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
        }
        let m = a.nrows();
        let (lo, hi) = gershgorin_interval(a);
        let pad = self.margin * (hi - lo);
        let (x0, x1) = (k * chi.t_min(), k * chi.t_max());
        if x1 <= lo - pad || x0 >= hi + pad {
            return Ok(HsOutcome {
                matrix: DMatrix::zeros(m, m),
                nodes_per_axis: 0,
                refinements: 0,
            });
        }
        let (diag, off, q) = tridiagonalize(a);
        let mut nodes = self.nodes;
        for refinement in 0..=self.max_refinements {
            if (nodes as u128).pow(2) > self.max_nodes as u128 {
                return Err(Error::QuadratureBudgetExceeded {
                    nodes: (nodes as u128).pow(2),
                    budget: self.max_nodes,
                });
            }
            if let Attempt::Done(s) = self.integrate(&diag, &off, chi, k, nodes) {
                let matrix = &q * s * q.adjoint();
                return Ok(HsOutcome {
                    matrix,
                    nodes_per_axis: nodes,
                    refinements: refinement,
                });
            }
            nodes = (nodes * 3).div_ceil(2);
        }
        Err(Error::ResolventIllConditioned {
            refinements: self.max_refinements,
        })
    }

    /// `−(2/π) Re Σ w ∂̄χ̃_k(z) (z − T)⁻¹` over the upper strip.
    fn integrate(&self, diag: &[f64], off: &[f64], chi: &ChiProfile, k: f64, nodes: usize) -> Attempt {
        let m = diag.len();
        let n_ord = self.order;
        let (x0, x1) = (k * chi.t_min(), k * chi.t_max());
        let height = self.height_fraction * (x1 - x0);
        let gl = GaussLegendre::new(nodes);
        let xs = gl.mapped(x0, x1);
        let ys = gl.mapped(0.0, height);
        let cell = ((x1 - x0) / nodes as f64).max(height / nodes as f64);
        let mut fact = vec![1.0; n_ord + 1];
        for i in 1..=n_ord {
            fact[i] = fact[i - 1] * i as f64;
        }
        // (iy)^m / m!, τ(y), τ'(y) per vertical node
        let strip: Vec<(Vec<Complex64>, f64, f64)> = ys
            .iter()
            .map(|&(y, _)| {
                let pow = (0..=n_ord)
                    .map(|p| Complex64::new(0.0, y).powu(p as u32) / fact[p])
                    .collect();
                let (t, dt) = smooth_step((y - 0.5 * height) / (0.5 * height));
                (pow, t, dt / (0.5 * height))
            })
            .collect();

        let partials = exec::map(&xs, |&(x, wx)| {
            let mut d = chi.derivatives(x / k, n_ord + 1);
            let mut s = 1.0;
            for v in d.iter_mut() {
                *v *= s;
                s /= k;
            }
            let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
            let mut fwd = vec![Complex64::new(0.0, 0.0); m];
            let mut bwd = vec![Complex64::new(0.0, 0.0); m];
            for ((pow, tau, dtau), &(y, wy)) in strip.iter().zip(&ys) {
                let taylor: Complex64 = (0..=n_ord).map(|p| pow[p] * d[p]).sum();
                let dbar = (pow[n_ord] * (tau * d[n_ord + 1]) + Complex64::i() * taylor * *dtau) * 0.5;
                if dbar == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let z = Complex64::new(x, y);
                let frob = accumulate_resolvent(z, dbar * (wx * wy), diag, off, &mut fwd, &mut bwd, &mut acc);
                if frob.recip() < cell && dbar.norm() > self.threshold {
                    return None;
                }
            }
            Some(acc)
        });

        let mut total = vec![Complex64::new(0.0, 0.0); m * m];
        for p in partials {
            match p {
                Some(acc) => {
                    for (t, v) in total.iter_mut().zip(acc) {
                        *t += v;
                    }
                }
                None => return Attempt::Flagged,
            }
        }
        let scale = -2.0 / PI;
        Attempt::Done(DMatrix::from_fn(m, m, |i, j| {
            let (r, c) = if i <= j { (i, j) } else { (j, i) };
            Complex64::new(scale * total[r * m + c].re, 0.0)
        }))
    }
}

/// `χ_k(A)` by the Helffer–Sjöstrand formula with default parameters.
pub fn helffer_sjostrand_chi(a: &DMatrix<Complex64>, chi: &ChiProfile, k: f64) -> Result<DMatrix<Complex64>> {
    HelfferSjostrand::default().apply(a, chi, k).map(|o| o.matrix)
}

/// `χ_k(A) = V diag(χ(λ_i/k)) V*` from a Hermitian eigendecomposition.
pub fn chi_by_eigendecomposition(a: &DMatrix<Complex64>, chi: &ChiProfile, k: f64) -> Result<DMatrix<Complex64>> {
    check_hermitian(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let v = &eig.eigenvectors;
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&l| chi.eval_scaled(l, k)).collect();
    let m = a.nrows();
    let mut scaled = v.clone();
    for j in 0..m {
        for i in 0..m {
            scaled[(i, j)] *= w[j];
        }
    }
    Ok(scaled * v.adjoint())
}

/// Random Hermitian `size × size` matrix `Q D Q*` with `Q` unitary and the eigenvalues
/// `D` drawn uniformly from `[lo, hi)`.
pub fn random_hermitian(size: usize, lo: f64, hi: f64, seed: u64) -> DMatrix<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(size, size, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(size, |_, _| {
        Complex64::new(rng.random_range(lo..hi), 0.0)
    }));
    let a = &q * d * q.adjoint();
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}
