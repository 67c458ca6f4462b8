//! Truncated Taylor series ("jets") for exact derivatives of the bump profiles.
//!
//! A jet stores normalized Taylor coefficients `c_m = f^{(m)}(x₀) / m!` up to a fixed
//! order; arithmetic on jets propagates derivatives exactly up to rounding.

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Jet::constant(x0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Jet { coeffs }
    }

    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a0;
        for i in 1..n {
            let s: f64 = (1..=i).map(|j| self.coeffs[j] * out[i - j]).sum();
            out[i] = -s / a0;
        }
        Jet { coeffs: out }
    }

    pub fn exp(&self) -> Jet {
        // e' = a' e  ⇒  i·e_i = Σ_j j·a_j·e_{i-j}
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].exp();
        for i in 1..n {
            let s: f64 = (1..=i)
                .map(|j| j as f64 * self.coeffs[j] * out[i - j])
                .sum();
            out[i] = s / i as f64;
        }
        Jet { coeffs: out }
    }

    /// Derivatives `f^{(m)}(x₀)` for `m = 0..=order`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m > 0 {
                    fact *= m as f64;
                }
                c * fact
            })
            .collect()
    }
}
