//! Log-scaled pairwise summation.

use num_complex::Complex64;

const PAIRWISE_BASE: usize = 16;

/// Pairwise (tree) sum; rounding error grows like `O(log n)`.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    if terms.len() <= PAIRWISE_BASE {
        return terms.iter().sum();
    }
    let (lo, hi) = terms.split_at(terms.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

pub fn pairwise_sum_complex(terms: &[Complex64]) -> Complex64 {
    if terms.len() <= PAIRWISE_BASE {
        return terms.iter().sum();
    }
    let (lo, hi) = terms.split_at(terms.len() / 2);
    pairwise_sum_complex(lo) + pairwise_sum_complex(hi)
}

/// A complex partial sum represented as `exp(shift) · sum`, together with the
/// matching sum of magnitudes `exp(shift) · abs_sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSum {
    pub shift: f64,
    pub sum: Complex64,
    pub abs_sum: f64,
    pub terms: usize,
}

impl ScaledSum {
    pub const EMPTY: ScaledSum = ScaledSum {
        shift: f64::NEG_INFINITY,
        sum: Complex64::new(0.0, 0.0),
        abs_sum: 0.0,
        terms: 0,
    };

    /// Sums terms `exp(log_mag) · e^{i phase}` given as `(log_mag, phase)` pairs.
    pub fn from_log_terms(terms: &[(f64, f64)]) -> Self {
        if terms.is_empty() {
            return Self::EMPTY;
        }
        let shift = terms
            .iter()
            .map(|t| t.0)
            .fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return Self {
                terms: terms.len(),
                ..Self::EMPTY
            };
        }
        let scaled: Vec<Complex64> = terms
            .iter()
            .map(|&(l, phase)| Complex64::from_polar((l - shift).exp(), phase))
            .collect();
        let mags: Vec<f64> = terms.iter().map(|&(l, _)| (l - shift).exp()).collect();
        Self {
            shift,
            sum: pairwise_sum_complex(&scaled),
            abs_sum: pairwise_sum(&mags),
            terms: terms.len(),
        }
    }

    pub fn combine(self, other: ScaledSum) -> ScaledSum {
        if other.shift == f64::NEG_INFINITY {
            return ScaledSum {
                terms: self.terms + other.terms,
                ..self
            };
        }
        if self.shift == f64::NEG_INFINITY {
            return ScaledSum {
                terms: self.terms + other.terms,
                ..other
            };
        }
        let shift = self.shift.max(other.shift);
        let a = (self.shift - shift).exp();
        let b = (other.shift - shift).exp();
        ScaledSum {
            shift,
            sum: self.sum * a + other.sum * b,
            abs_sum: self.abs_sum * a + other.abs_sum * b,
            terms: self.terms + other.terms,
        }
    }

    pub fn value(&self) -> Complex64 {
        if self.shift == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            self.sum * self.shift.exp()
        }
    }

    /// `ln |Σ|`, finite even when the value itself under- or overflows.
    pub fn log_abs(&self) -> f64 {
        if self.shift == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.shift + self.sum.norm().ln()
        }
    }

    /// `ln Σ|term|`.
    pub fn log_abs_sum(&self) -> f64 {
        if self.shift == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.shift + self.abs_sum.ln()
        }
    }
}
