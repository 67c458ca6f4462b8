use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{enumerate_multiindices, DomainSpec, MultiIndex};
use crate::exec;
use crate::quadrature::GaussLegendre;
use crate::spectral::RotationGenerator;
use crate::{Error, Result};

/// Largest monomial degree the Galerkin oracle accepts.
pub const MAX_GALERKIN_DEGREE: u32 = 12;

const CHUNK: usize = 2048;

/// Tensor Gauss–Legendre rule in nested polar coordinates, one `(r_j, θ_j)` pair per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub max_nodes: usize,
}

impl QuadratureSpec {
    /// Radial rule exact for the polynomial radial integrands up to degree `D`, angular
    /// rule resolving frequencies up to `D` well below `1e-9`.
    pub fn for_degree(d: u32) -> Self {
        QuadratureSpec {
            radial_nodes: d as usize + 4,
            angular_nodes: 2 * d as usize + 24,
            max_nodes: 10_000_000,
        }
    }

    pub fn node_count(&self, n: usize) -> u128 {
        ((self.radial_nodes * self.angular_nodes) as u128).pow(n as u32)
    }
}

/// Matrix of `(R φ_β | φ_α)` over `|α|, |β| ≤ D`, rows indexed by `α`.
#[derive(Debug, Clone)]
pub struct GalerkinMatrix {
    pub indices: Vec<MultiIndex>,
    pub matrix: DMatrix<Complex64>,
    /// Quadrature value of `‖z^α‖²`, used to normalize the basis.
    pub gram_diagonal: Vec<f64>,
}

impl GalerkinMatrix {
    /// `max |M − M*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    }
}

struct Accumulator {
    cross: DMatrix<Complex64>,
    gram: Vec<f64>,
}

/// Builds the Toeplitz matrix of `R = −iT_λ` in the orthonormal monomial basis by quadrature.
pub fn galerkin_toeplitz_matrix(
    domain: &DomainSpec,
    generator: &RotationGenerator,
    max_degree: u32,
    spec: &QuadratureSpec,
) -> Result<GalerkinMatrix> {
    let n = domain.n();
    if generator.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: generator.n(),
        });
    }
    if max_degree > MAX_GALERKIN_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "Galerkin oracle supports D <= {MAX_GALERKIN_DEGREE}, got {max_degree}"
        )));
    }
    if spec.radial_nodes == 0 || spec.angular_nodes == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node per axis".into()));
    }
    let nodes = spec.node_count(n);
    if nodes > spec.max_nodes as u128 {
        return Err(Error::QuadratureBudgetExceeded {
            nodes,
            budget: spec.max_nodes,
        });
    }
    let indices = enumerate_multiindices(n, max_degree, usize::MAX)?;
    let m = indices.len();
    let radial = GaussLegendre::new(spec.radial_nodes).mapped(0.0, 1.0);
    let angular = GaussLegendre::new(spec.angular_nodes).mapped(0.0, 2.0 * PI);
    let scale: Vec<f64> = domain.coefficients().iter().map(|a| a.sqrt().recip()).collect();
    // the ellipsoid is the image of the unit ball under z_j ↦ z_j / √a_j
    let jacobian: f64 = domain.coefficients().iter().map(|a| a.recip()).product();
    let per_axis = spec.radial_nodes * spec.angular_nodes;
    let total = nodes as usize;
    let chunks = total.div_ceil(CHUNK);

    let node = |mut idx: usize| -> (Vec<Complex64>, f64) {
        let mut z = Vec::with_capacity(n);
        let mut weight = jacobian;
        let mut remaining = 1.0f64;
        for s in &scale {
            let pair = idx % per_axis;
            idx /= per_axis;
            let (u, wu) = radial[pair / spec.angular_nodes];
            let (theta, wt) = angular[pair % spec.angular_nodes];
            let bound = remaining.max(0.0).sqrt();
            let r = bound * u;
            weight *= bound * wu * r * wt;
            remaining -= r * r;
            z.push(Complex64::from_polar(r * s, theta));
        }
        (z, weight)
    };

    let partials = exec::map_range(chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(total);
        let rows = end - start;
        let mut f = DMatrix::<Complex64>::zeros(rows, m);
        let mut rf = DMatrix::<Complex64>::zeros(rows, m);
        for (row, idx) in (start..end).enumerate() {
            let (z, w) = node(idx);
            let sw = w.sqrt();
            for (col, beta) in indices.iter().enumerate() {
                let (v, rv) = generator.apply_to_monomial(beta, &z);
                f[(row, col)] = v * sw;
                rf[(row, col)] = rv * sw;
            }
        }
        let gram = (0..m).map(|col| f.column(col).norm_squared()).collect();
        Accumulator {
            cross: f.ad_mul(&rf),
            gram,
        }
    });

    let mut cross = DMatrix::<Complex64>::zeros(m, m);
    let mut gram = vec![0.0; m];
    for p in partials {
        cross += p.cross;
        for (g, v) in gram.iter_mut().zip(p.gram) {
            *g += v;
        }
    }
    let inv: Vec<f64> = gram.iter().map(|g| g.sqrt().recip()).collect();
    let matrix = DMatrix::from_fn(m, m, |i, j| cross[(i, j)] * (inv[i] * inv[j]));
    Ok(GalerkinMatrix {
        indices,
        matrix,
        gram_diagonal: gram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::monomial_norm_sq;

    #[test]
    fn disc_is_diagonal_with_integer_spectrum() {
        let g = galerkin_toeplitz_matrix(
            &DomainSpec::ball(1),
            &RotationGenerator::uniform(1),
            5,
            &QuadratureSpec::for_degree(5),
        )
        .unwrap();
        for i in 0..6 {
            assert!((g.matrix[(i, i)] - Complex64::new(i as f64, 0.0)).norm() < 1e-8);
        }
        assert!(g.max_off_diagonal() < 1e-8);
        assert!(g.hermiticity_defect() < 1e-10);
    }

    #[test]
    fn gram_diagonal_matches_closed_form() {
        let domain = DomainSpec::ellipsoid(vec![1.0, 4.0]).unwrap();
        let g = galerkin_toeplitz_matrix(
            &domain,
            &RotationGenerator::uniform(2),
            3,
            &QuadratureSpec::for_degree(3),
        )
        .unwrap();
        for (a, &q) in g.indices.iter().zip(&g.gram_diagonal) {
            let exact = monomial_norm_sq(&domain, a).unwrap();
            assert!((q - exact).abs() < 1e-12 * exact, "{a:?}: {q} vs {exact}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let spec = QuadratureSpec {
            max_nodes: 100,
            ..QuadratureSpec::for_degree(3)
        };
        let err = galerkin_toeplitz_matrix(&DomainSpec::ball(2), &RotationGenerator::uniform(2), 3, &spec)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureBudgetExceeded { .. }));
    }
}
