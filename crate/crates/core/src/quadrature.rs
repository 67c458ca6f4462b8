//! Gauss–Legendre rules and an adaptive integrator built on them.

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        s * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Adaptive bisection with a 10-point rule compared against its two halves.
#[derive(Debug, Clone)]
pub struct AdaptiveQuadrature {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        AdaptiveQuadrature {
            rule: GaussLegendre::new(10),
            abs_tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl AdaptiveQuadrature {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        AdaptiveQuadrature {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        if a == b {
            return 0.0;
        }
        let whole = self.rule.integrate(a, b, &f);
        self.refine(a, b, whole, self.abs_tol, 0, &f)
    }

    fn refine<F: Fn(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        f: &F,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(a, mid, f);
        let right = self.rule.integrate(mid, b, f);
        // Force a few levels so that a rule blind to a narrow feature still splits.
        if depth >= 3 && ((left + right - whole).abs() <= tol || depth >= self.max_depth) {
            return left + right;
        }
        self.refine(a, mid, left, 0.5 * tol, depth + 1, f)
            + self.refine(mid, b, right, 0.5 * tol, depth + 1, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(6);
        // degree 11 is the highest exact degree for 6 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
        let total: f64 = gl.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rule_converges() {
        let gl = GaussLegendre::new(200);
        let v = gl.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
        for w in gl.weights() {
            assert!(w.is_finite() && *w > 0.0);
        }
    }

    #[test]
    fn adaptive_handles_bump() {
        let q = AdaptiveQuadrature::default();
        let bump = |t: f64| {
            let u = t;
            if u.abs() < 1.0 {
                (-1.0 / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        };
        // reference: ∫_{-1}^{1} exp(-1/(1-u²)) du = 0.4439938161680794
        let v = q.integrate(-1.0, 1.0, bump);
        assert!((v - 0.443_993_816_168_079_4).abs() < 1e-12, "{v}");
    }
}
