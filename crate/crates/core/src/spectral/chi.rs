use serde::{Deserialize, Serialize};

use crate::jet::Jet;
use crate::quadrature::AdaptiveQuadrature;
use crate::{Error, Result};

/// Smooth bump `t ↦ A · exp(−p / (1 − ((t − c)/r)²))` on `(c − r, c + r)`, zero outside.
///
/// The default profile has `A = 1`, `p = 1`, so `sup χ = χ(c) = e⁻¹`. The support is
/// required to lie in `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiProfile {
    center: f64,
    radius: f64,
    amplitude: f64,
    power: u32,
}

impl ChiProfile {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        Self::validate(center, radius)?;
        Ok(ChiProfile {
            center,
            radius,
            amplitude: 1.0,
            power: 1,
        })
    }

    /// A profile with arbitrary nonzero real amplitude, possibly negative.
    pub fn signed(center: f64, radius: f64, amplitude: f64) -> Result<Self> {
        Self::validate(center, radius)?;
        if !(amplitude.is_finite() && amplitude != 0.0) {
            return Err(Error::InvalidProfile(format!(
                "amplitude must be finite and nonzero, got {amplitude}"
            )));
        }
        Ok(ChiProfile {
            center,
            radius,
            amplitude,
            power: 1,
        })
    }

    fn validate(center: f64, radius: f64) -> Result<()> {
        if !(center.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "center and radius must be finite with radius > 0 (got c = {center}, r = {radius})"
            )));
        }
        if center - radius <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "support in (0,+inf) requires c - r > 0, got c - r = {}",
                center - radius
            )));
        }
        Ok(())
    }

    /// Multiplies the profile by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(ChiProfile {
            amplitude: self.amplitude * factor,
            ..self.clone()
        })
    }

    /// `χ²`, with the same support.
    pub fn squared(&self) -> Self {
        ChiProfile {
            amplitude: self.amplitude * self.amplitude,
            power: 2 * self.power,
            ..self.clone()
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn t_min(&self) -> f64 {
        self.center - self.radius
    }

    pub fn t_max(&self) -> f64 {
        self.center + self.radius
    }

    pub fn is_nonnegative(&self) -> bool {
        self.amplitude > 0.0
    }

    pub fn sup(&self) -> f64 {
        self.amplitude.abs() * (-(self.power as f64)).exp()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.radius;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let base = (-1.0 / (1.0 - u * u)).exp();
        self.amplitude * base.powi(self.power as i32)
    }

    /// `χ_k(λ) = χ(λ / k)`.
    pub fn eval_scaled(&self, lambda: f64, k: f64) -> f64 {
        self.eval(lambda / k)
    }

    /// Derivatives `χ^{(m)}(t)` for `m = 0..=order`, exact up to rounding.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let u0 = (t - self.center) / self.radius;
        if u0.abs() >= 1.0 {
            return vec![0.0; order + 1];
        }
        let u = Jet::variable(u0, order);
        let q = u.mul(&u).scale(-1.0).add_constant(1.0);
        let g = q.recip().scale(-(self.power as f64));
        let du = g.exp().scale(self.amplitude).derivatives();
        let mut s = 1.0;
        du.into_iter()
            .map(|d| {
                let v = d * s;
                s /= self.radius;
                v
            })
            .collect()
    }

    /// `∫ χ(t) tᵖ dt` by adaptive Gauss–Legendre quadrature (absolute tolerance `1e-12`).
    pub fn moment(&self, p: i32) -> f64 {
        AdaptiveQuadrature::default().integrate(self.t_min(), self.t_max(), |t| {
            self.eval(t) * t.powi(p)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_peak() {
        let chi = ChiProfile::new(1.5, 0.5).unwrap();
        assert_eq!(chi.t_min(), 1.0);
        assert_eq!(chi.t_max(), 2.0);
        assert_eq!(chi.eval(1.0), 0.0);
        assert_eq!(chi.eval(2.0), 0.0);
        assert_eq!(chi.eval(0.0), 0.0);
        assert!((chi.eval(1.5) - (-1f64).exp()).abs() < 1e-16);
        assert!((chi.sup() - (-1f64).exp()).abs() < 1e-16);
        for i in 0..1000 {
            let t = 0.5 + 2.0 * i as f64 / 1000.0;
            let v = chi.eval(t);
            assert!((0.0..=chi.sup()).contains(&v));
        }
    }

    #[test]
    fn rejects_support_touching_zero() {
        assert!(ChiProfile::new(0.5, 0.5).is_err());
        assert!(ChiProfile::new(0.4, 0.5).is_err());
        assert!(ChiProfile::new(1.0, 0.0).is_err());
        let msg = ChiProfile::new(0.5, 0.6).unwrap_err().to_string();
        assert!(msg.contains("(0,+inf)"));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let chi = ChiProfile::new(1.5, 0.5).unwrap();
        let h = 1e-5;
        for &t in &[1.2, 1.5, 1.77] {
            let d = chi.derivatives(t, 3);
            assert!((d[0] - chi.eval(t)).abs() < 1e-15);
            let fd1 = (chi.eval(t + h) - chi.eval(t - h)) / (2.0 * h);
            assert!((d[1] - fd1).abs() < 1e-8);
            let d1 = |s: f64| chi.derivatives(s, 1)[1];
            let fd2 = (d1(t + h) - d1(t - h)) / (2.0 * h);
            assert!((d[2] - fd2).abs() < 1e-7 * (1.0 + d[2].abs()));
        }
    }

    #[test]
    fn squared_profile_is_exact_square() {
        let chi = ChiProfile::new(1.5, 0.5).unwrap();
        let sq = chi.squared();
        for i in 0..200 {
            let t = 1.0 + i as f64 / 200.0;
            assert_eq!(sq.eval(t), chi.eval(t) * chi.eval(t));
        }
    }

    #[test]
    fn moments_scale_linearly() {
        let chi = ChiProfile::new(1.5, 0.5).unwrap();
        let two = chi.scaled(2.0).unwrap();
        assert!((two.moment(2) - 2.0 * chi.moment(2)).abs() < 1e-14);
        // ∫ bump = r · 0.44399381616807943782
        assert!((chi.moment(0) - 0.5 * 0.443_993_816_168_079_4).abs() < 1e-12);
    }
}
