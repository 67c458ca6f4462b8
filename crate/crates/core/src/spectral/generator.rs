use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::MultiIndex;
use crate::geometry::VectorField;
use crate::{Error, Result};

/// Torus-rotation generator `T_λ = Σ λ_j (x_j ∂_{y_j} − y_j ∂_{x_j})` with `λ_j > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationGenerator {
    weights: Vec<f64>,
}

impl RotationGenerator {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("generator needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "rotation weights must be positive, got {w}"
            )));
        }
        Ok(RotationGenerator { weights })
    }

    pub fn uniform(n: usize) -> Self {
        RotationGenerator {
            weights: vec![1.0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|&w| w == self.weights[0])
    }

    /// `⟨λ, α⟩`, the eigenvalue of `T_R` on `z^α`.
    pub fn pairing(&self, alpha: &[u32]) -> f64 {
        self.weights
            .iter()
            .zip(alpha)
            .map(|(l, &a)| l * a as f64)
            .sum()
    }

    /// The flow `z ↦ (e^{iλ_j θ} z_j)`.
    pub fn flow(&self, theta: f64, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(&self.weights)
            .map(|(c, l)| c * Complex64::from_polar(1.0, l * theta))
            .collect()
    }

    /// Values of `z^β` and `(−iT_λ) z^β` at `z`, differentiating the monomial in real
    /// coordinates: `∂_{x_j} z^β = β_j z^{β−e_j}`, `∂_{y_j} z^β = i β_j z^{β−e_j}`.
    pub fn apply_to_monomial(&self, beta: &MultiIndex, z: &[Complex64]) -> (Complex64, Complex64) {
        let powi = |c: Complex64, k: u32| if k == 0 { Complex64::new(1.0, 0.0) } else { c.powu(k) };
        let value: Complex64 = z.iter().zip(beta.alpha()).map(|(&c, &k)| powi(c, k)).product();
        let mut tf = Complex64::new(0.0, 0.0);
        for j in 0..z.len() {
            let bj = beta.alpha()[j];
            if bj == 0 {
                continue;
            }
            let reduced: Complex64 = z
                .iter()
                .zip(beta.alpha())
                .enumerate()
                .map(|(i, (&c, &k))| powi(c, if i == j { k - 1 } else { k }))
                .product();
            let dx = reduced * bj as f64;
            let dy = Complex64::i() * dx;
            let (x, y) = (z[j].re, z[j].im);
            tf += (dy * x - dx * y) * self.weights[j];
        }
        (value, -Complex64::i() * tf)
    }
}

impl VectorField for RotationGenerator {
    fn at(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; x.len()];
        for (j, l) in self.weights.iter().enumerate() {
            v[2 * j] = -l * x[2 * j + 1];
            v[2 * j + 1] = l * x[2 * j];
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        let g = RotationGenerator::uniform(2);
        assert_eq!(g.pairing(&[3, 4]), 7.0);
        let w = RotationGenerator::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(w.pairing(&[3, 4]), 11.0);
        assert_eq!(w.pairing(&[0, 0]), 0.0);
        assert!(RotationGenerator::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn minus_i_t_acts_by_pairing() {
        let g = RotationGenerator::new(vec![1.0, 2.5]).unwrap();
        let z = [Complex64::new(0.3, -0.4), Complex64::new(0.1, 0.7)];
        let beta = MultiIndex::new(vec![3, 2]);
        let (f, rf) = g.apply_to_monomial(&beta, &z);
        let expected = f * g.pairing(beta.alpha());
        assert!((rf - expected).norm() < 1e-14);
    }
}
