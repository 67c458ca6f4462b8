//! Model Reinhardt domains and their monomial bases.
//!
//! For `M = {Σ a_j |z_j|² < 1}` the monomials `z^α` are orthogonal in `L²(M)` and
//!
//! ```text
//! ‖z^α‖²_M = πⁿ α! / (n + |α|)! · Π a_j^{-(α_j + 1)}
//! ```
//!
//! while on the unit sphere `∫ |ζ^α|² dσ = 2πⁿ α! / (n − 1 + |α|)!`.
//! Both closed forms are cross-checked against Monte-Carlo estimates.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::exec;
use crate::geometry::HermitianQuadric;
use crate::{Error, Result};

/// Default cap on the number of enumerated multi-indices.
pub const DEFAULT_INDEX_BUDGET: usize = 10_000_000;

/// Above this total degree norms are evaluated in log space.
const DIRECT_DEGREE_LIMIT: u32 = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Ball { n: usize },
    HermitianEllipsoid { a: Vec<f64> },
}

impl DomainSpec {
    pub fn ball(n: usize) -> Self {
        DomainSpec::Ball { n }
    }

    pub fn ellipsoid(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("ellipsoid needs n >= 1".into()));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "ellipsoid coefficients must be positive, got {bad}"
            )));
        }
        Ok(DomainSpec::HermitianEllipsoid { a })
    }

    pub fn n(&self) -> usize {
        match self {
            DomainSpec::Ball { n } => *n,
            DomainSpec::HermitianEllipsoid { a } => a.len(),
        }
    }

    /// Shape coefficients `a`, equal to all ones for the ball.
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            DomainSpec::Ball { n } => vec![1.0; *n],
            DomainSpec::HermitianEllipsoid { a } => a.clone(),
        }
    }

    /// Ellipsoids with `a = (1, …, 1)` are rewritten as balls.
    pub fn canonical(&self) -> DomainSpec {
        match self {
            DomainSpec::HermitianEllipsoid { a } if a.iter().all(|&v| v == 1.0) => {
                DomainSpec::Ball { n: a.len() }
            }
            other => other.clone(),
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.canonical(), DomainSpec::Ball { .. })
    }

    pub fn defining_function(&self) -> HermitianQuadric {
        HermitianQuadric::new(self.coefficients())
    }

    /// `Σ a_j |z_j|²`.
    pub fn quadratic_form(&self, z: &[Complex64]) -> f64 {
        self.coefficients()
            .iter()
            .zip(z)
            .map(|(a, c)| a * c.norm_sqr())
            .sum()
    }

    /// Radial projection of a nonzero point onto the boundary.
    pub fn project_to_boundary(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let q = self.quadratic_form(z);
        if q <= 0.0 {
            return Err(Error::InvalidArgument("cannot project the origin".into()));
        }
        let s = q.sqrt();
        Ok(z.iter().map(|c| c / s).collect())
    }
}

/// `α ∈ ℕ₀ⁿ` with its cached total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    alpha: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(alpha: Vec<u32>) -> Self {
        let degree = alpha.iter().sum();
        MultiIndex { alpha, degree }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Compositions of `degree` into `parts` nonnegative parts in lexicographically
/// descending order: `(d,0,…,0)` first, `(0,…,0,d)` last.
#[derive(Debug, Clone)]
pub struct LayerIter {
    current: Option<Vec<u32>>,
}

impl LayerIter {
    pub fn new(parts: usize, degree: u32) -> Self {
        let current = if parts == 0 {
            (degree == 0).then(Vec::new)
        } else {
            let mut v = vec![0; parts];
            v[0] = degree;
            Some(v)
        };
        LayerIter { current }
    }
}

impl Iterator for LayerIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let s = out.len();
        if s >= 2 {
            let mut next = out.clone();
            let tail = next[s - 1];
            next[s - 1] = 0;
            if let Some(i) = (0..s - 1).rev().find(|&i| next[i] > 0) {
                next[i] -= 1;
                next[i + 1] = tail + 1;
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

/// `C(d + n − 1, n − 1)`, the number of indices of degree `d`.
pub fn layer_count(n: usize, d: u32) -> u128 {
    binomial(d as u128 + n as u128 - 1, n as u128 - 1)
}

/// `C(D + n, n)`, the number of indices with `|α| ≤ D`.
pub fn total_count(n: usize, max_degree: u32) -> u128 {
    binomial(max_degree as u128 + n as u128, n as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

pub fn multiindex_layer(n: usize, d: u32) -> Vec<MultiIndex> {
    LayerIter::new(n, d).map(MultiIndex::new).collect()
}

/// All `α` with `|α| ≤ max_degree` in graded lexicographic order.
pub fn enumerate_multiindices(
    n: usize,
    max_degree: u32,
    budget: usize,
) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let count = total_count(n, max_degree);
    if count > budget as u128 {
        return Err(Error::CapacityExceeded { count, budget });
    }
    let degrees: Vec<u32> = (0..=max_degree).collect();
    let layers = exec::map(&degrees, |&d| multiindex_layer(n, d));
    Ok(layers.into_iter().flatten().collect())
}

fn check_dim(domain_n: usize, alpha: &MultiIndex) -> Result<()> {
    if alpha.len() != domain_n {
        return Err(Error::DimensionMismatch {
            expected: domain_n,
            got: alpha.len(),
        });
    }
    Ok(())
}

fn ln_multi_factorial(alpha: &MultiIndex) -> f64 {
    alpha.alpha().iter().map(|&a| ln_factorial(a as u64)).sum()
}

/// `ln ‖z^α‖²_M`.
pub fn log_monomial_norm_sq(domain: &DomainSpec, alpha: &MultiIndex) -> Result<f64> {
    let n = domain.n();
    check_dim(n, alpha)?;
    let ball = n as f64 * PI.ln() + ln_multi_factorial(alpha)
        - ln_factorial(n as u64 + alpha.degree() as u64);
    let scale: f64 = domain
        .coefficients()
        .iter()
        .zip(alpha.alpha())
        .map(|(a, &k)| -(k as f64 + 1.0) * a.ln())
        .sum();
    Ok(ball + scale)
}

/// `‖z^α‖²_M = ∫_M |z^α|² dV`.
pub fn monomial_norm_sq(domain: &DomainSpec, alpha: &MultiIndex) -> Result<f64> {
    if alpha.degree() > DIRECT_DEGREE_LIMIT {
        return log_monomial_norm_sq(domain, alpha).map(f64::exp);
    }
    let n = domain.n();
    check_dim(n, alpha)?;
    // πⁿ Π α_j! / (n + |α|)!, accumulated as a product of ratios
    let mut num: Vec<f64> = Vec::new();
    for &k in alpha.alpha() {
        num.extend((2..=k).map(|i| i as f64));
    }
    let mut value = PI.powi(n as i32);
    let den_top = n as u32 + alpha.degree();
    let mut den = (2..=den_top).map(|i| i as f64);
    for m in num {
        value *= m;
        if let Some(d) = den.next() {
            value /= d;
        }
    }
    for d in den {
        value /= d;
    }
    for (a, &k) in domain.coefficients().iter().zip(alpha.alpha()) {
        value *= a.powi(-(k as i32 + 1));
    }
    Ok(value)
}

/// `ln ∫_{S^{2n−1}} |ζ^α|² dσ`.
pub fn log_sphere_monomial_norm_sq(n: usize, alpha: &MultiIndex) -> Result<f64> {
    check_dim(n, alpha)?;
    Ok(2f64.ln() + n as f64 * PI.ln() + ln_multi_factorial(alpha)
        - ln_factorial(n as u64 - 1 + alpha.degree() as u64))
}

pub fn sphere_monomial_norm_sq(n: usize, alpha: &MultiIndex) -> Result<f64> {
    log_sphere_monomial_norm_sq(n, alpha).map(f64::exp)
}

/// `n!/πⁿ · (1 − ⟨z,w⟩)^{−(n+1)}`, the Bergman kernel of the unit ball.
pub fn bergman_kernel_exact_ball(n: usize, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if z.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len().min(w.len()),
        });
    }
    let inner: Complex64 = z.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
    let gap = Complex64::new(1.0, 0.0) - inner;
    if gap.norm() < 1e-12 {
        return Err(Error::NearSingular { gap: gap.norm() });
    }
    let c = ln_factorial(n as u64).exp() / PI.powi(n as i32);
    Ok(gap.powi(-(n as i32 + 1)) * c)
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|value − estimate|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.standard_error == 0.0 {
            if value == self.estimate {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.estimate).abs() / self.standard_error
        }
    }
}

pub const MIN_MC_SAMPLES: usize = 10_000;
const MC_CHUNK: usize = 1 << 16;

/// Uniform rejection sampling in the bounding box; returns `(Σ f, Σ f²)`.
fn mc_box_moments<F>(domain: &DomainSpec, samples: usize, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let a = domain.coefficients();
    let half: Vec<f64> = a.iter().map(|v| 1.0 / v.sqrt()).collect();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts = exec::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut z = vec![Complex64::new(0.0, 0.0); a.len()];
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            for (zj, h) in z.iter_mut().zip(&half) {
                *zj = Complex64::new(
                    rng.random_range(-*h..*h),
                    rng.random_range(-*h..*h),
                );
            }
            if domain.quadratic_form(&z) < 1.0 {
                let v = f(&z);
                s1 += v;
                s2 += v * v;
            }
        }
        (s1, s2)
    });
    parts
        .into_iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

fn box_volume(domain: &DomainSpec) -> f64 {
    domain.coefficients().iter().map(|a| 4.0 / a).product()
}

fn monomial_abs_sq(z: &[Complex64], alpha: &MultiIndex) -> f64 {
    z.iter()
        .zip(alpha.alpha())
        .map(|(c, &k)| c.norm_sqr().powi(k as i32))
        .product()
}

fn finish_estimate(volume: f64, s1: f64, s2: f64, samples: usize, seed: u64) -> McEstimate {
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    McEstimate {
        estimate: volume * mean,
        standard_error: volume * (var / (n - 1.0)).sqrt(),
        samples,
        seed,
    }
}

/// Monte-Carlo oracle for [`monomial_norm_sq`].
pub fn monomial_norm_sq_oracle(
    domain: &DomainSpec,
    alpha: &MultiIndex,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_dim(domain.n(), alpha)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo oracle needs at least {MIN_MC_SAMPLES} samples"
        )));
    }
    let (s1, s2) = mc_box_moments(domain, samples, seed, |z| monomial_abs_sq(z, alpha));
    Ok(finish_estimate(box_volume(domain), s1, s2, samples, seed))
}

/// Monte-Carlo oracle for [`sphere_monomial_norm_sq`].
///
/// Uses homogeneity: for `f` of degree `2|α|`, `∫_B f dV = ∫_S f dσ / (2|α| + 2n)`,
/// so the sphere integral is estimated from a ball estimate without the sphere area.
pub fn sphere_monomial_norm_sq_oracle(
    n: usize,
    alpha: &MultiIndex,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let ball = monomial_norm_sq_oracle(&DomainSpec::ball(n), alpha, samples, seed)?;
    let factor = 2.0 * (alpha.degree() as f64 + n as f64);
    Ok(McEstimate {
        estimate: ball.estimate * factor,
        standard_error: ball.standard_error * factor,
        ..ball
    })
}

/// Cached `ln ‖z^α‖²` for every `|α| ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    domain: DomainSpec,
    cutoff: u32,
    entries: Vec<(MultiIndex, f64)>,
    index: HashMap<MultiIndex, usize>,
}

impl NormTable {
    pub fn build(domain: &DomainSpec, cutoff: u32, budget: usize) -> Result<Self> {
        let indices = enumerate_multiindices(domain.n(), cutoff, budget)?;
        let logs = exec::try_map(&indices, |a| log_monomial_norm_sq(domain, a))?;
        Ok(Self::from_entries(
            domain.clone(),
            cutoff,
            indices.into_iter().zip(logs).collect(),
        ))
    }

    fn from_entries(domain: DomainSpec, cutoff: u32, entries: Vec<(MultiIndex, f64)>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (a, _))| (a.clone(), i))
            .collect();
        NormTable {
            domain,
            cutoff,
            entries,
            index,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(MultiIndex, f64)] {
        &self.entries
    }

    pub fn log_norm_sq(&self, alpha: &MultiIndex) -> Option<f64> {
        self.index.get(alpha).map(|&i| self.entries[i].1)
    }

    pub fn norm_sq(&self, alpha: &MultiIndex) -> Option<f64> {
        self.log_norm_sq(alpha).map(f64::exp)
    }

    /// CSV with columns `alpha_1, …, alpha_n, log_norm_sq`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.domain.n();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|j| format!("alpha_{j}")).collect();
        header.push("log_norm_sq".into());
        w.write_record(&header)?;
        for (a, l) in &self.entries {
            let mut row: Vec<String> = a.alpha().iter().map(|v| v.to_string()).collect();
            row.push(format!("{l:.17e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`NormTable::write_csv`]. Entries are taken as given;
    /// nothing is recomputed, so a corrupted file round-trips as corrupted.
    pub fn read_csv<R: Read>(domain: &DomainSpec, input: R) -> Result<Self> {
        let n = domain.n();
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != n + 1 {
            return Err(Error::MalformedTable(format!(
                "expected {} columns, found {}",
                n + 1,
                headers.len()
            )));
        }
        let mut entries = Vec::new();
        let mut cutoff = 0;
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse_err = |what: &str| Error::MalformedTable(format!("row {}: bad {what}", line + 1));
            let alpha = (0..n)
                .map(|j| rec[j].trim().parse::<u32>().map_err(|_| parse_err("index")))
                .collect::<Result<Vec<u32>>>()?;
            let log: f64 = rec[n].trim().parse().map_err(|_| parse_err("log_norm_sq"))?;
            if !log.is_finite() {
                return Err(parse_err("log_norm_sq"));
            }
            let a = MultiIndex::new(alpha);
            cutoff = cutoff.max(a.degree());
            entries.push((a, log));
        }
        Ok(Self::from_entries(domain.clone(), cutoff, entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        let v = enumerate_multiindices(2, 1, DEFAULT_INDEX_BUDGET).unwrap();
        let alphas: Vec<&[u32]> = v.iter().map(|a| a.alpha()).collect();
        assert_eq!(alphas, vec![&[0, 0][..], &[1, 0], &[0, 1]]);
        assert_eq!(multiindex_layer(3, 4).len(), 15);
        assert_eq!(
            enumerate_multiindices(2, 200, DEFAULT_INDEX_BUDGET).unwrap().len(),
            20301
        );
    }

    #[test]
    fn enumeration_respects_budget() {
        let err = enumerate_multiindices(3, 100, 1000).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }

    #[test]
    fn layer_order_is_descending_lex() {
        let layer: Vec<Vec<u32>> = LayerIter::new(3, 2).collect();
        assert_eq!(
            layer,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(LayerIter::new(1, 5).collect::<Vec<_>>(), vec![vec![5]]);
    }

    #[test]
    fn closed_form_norm_examples() {
        let disk = DomainSpec::ball(1);
        assert!((monomial_norm_sq(&disk, &MultiIndex::zero(1)).unwrap() - PI).abs() < 1e-14);
        for m in 0..10u32 {
            // radial oracle ∫₀¹ r^{2m} 2πr dr = π/(m+1)
            let v = monomial_norm_sq(&disk, &MultiIndex::new(vec![m])).unwrap();
            assert!((v - PI / (m as f64 + 1.0)).abs() < 1e-14);
        }
        let e = DomainSpec::ellipsoid(vec![1.0, 4.0]).unwrap();
        let v = monomial_norm_sq(&e, &MultiIndex::zero(2)).unwrap();
        assert!((v - PI * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn direct_and_log_paths_agree() {
        let d = DomainSpec::ellipsoid(vec![0.5, 2.0, 3.0]).unwrap();
        for alpha in LayerIter::new(3, 12).map(MultiIndex::new) {
            let a = monomial_norm_sq(&d, &alpha).unwrap();
            let b = log_monomial_norm_sq(&d, &alpha).unwrap().exp();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn ball_norms_decrease_in_each_exponent() {
        let t = NormTable::build(&DomainSpec::ball(2), 20, DEFAULT_INDEX_BUDGET).unwrap();
        for (a, l) in t.entries() {
            for j in 0..2 {
                let mut b = a.alpha().to_vec();
                b[j] += 1;
                if let Some(lb) = t.log_norm_sq(&MultiIndex::new(b)) {
                    assert!(lb < *l);
                }
            }
        }
    }

    #[test]
    fn sphere_norm_examples() {
        for m in 0..6 {
            let v = sphere_monomial_norm_sq(1, &MultiIndex::new(vec![m])).unwrap();
            assert!((v - 2.0 * PI).abs() < 1e-13);
        }
        let v = sphere_monomial_norm_sq(2, &MultiIndex::zero(2)).unwrap();
        assert!((v - 2.0 * PI * PI).abs() < 1e-13);
        let v = sphere_monomial_norm_sq(2, &MultiIndex::new(vec![1, 0])).unwrap();
        assert!((v - PI * PI).abs() < 1e-13);
    }

    #[test]
    fn monte_carlo_examples() {
        let est = monomial_norm_sq_oracle(&DomainSpec::ball(1), &MultiIndex::zero(1), 1_000_000, 7)
            .unwrap();
        assert!(est.z_score(PI) < 3.0, "{est:?}");
        let est = monomial_norm_sq_oracle(
            &DomainSpec::ball(2),
            &MultiIndex::new(vec![1, 0]),
            1_000_000,
            8,
        )
        .unwrap();
        assert!(est.z_score(PI * PI / 6.0) < 3.0, "{est:?}");
        let e = DomainSpec::ellipsoid(vec![2.0, 2.0]).unwrap();
        let est = monomial_norm_sq_oracle(&e, &MultiIndex::zero(2), 1_000_000, 9).unwrap();
        assert!(est.z_score(PI * PI / 8.0) < 3.0, "{est:?}");
        let est = sphere_monomial_norm_sq_oracle(2, &MultiIndex::new(vec![1, 0]), 1_000_000, 10)
            .unwrap();
        assert!(est.z_score(PI * PI) < 3.0, "{est:?}");
    }

    #[test]
    fn monte_carlo_is_deterministic_and_checks_samples() {
        let d = DomainSpec::ball(2);
        let a = MultiIndex::new(vec![2, 1]);
        let e1 = monomial_norm_sq_oracle(&d, &a, 200_000, 3).unwrap();
        let e2 = monomial_norm_sq_oracle(&d, &a, 200_000, 3).unwrap();
        assert_eq!(e1, e2);
        assert!(monomial_norm_sq_oracle(&d, &a, 100, 3).is_err());
    }

    #[test]
    fn bergman_closed_form_examples() {
        let zero1 = [Complex64::new(0.0, 0.0)];
        let v = bergman_kernel_exact_ball(1, &zero1, &zero1).unwrap();
        assert!((v.re - 1.0 / PI).abs() < 1e-15);
        let zero2 = [Complex64::new(0.0, 0.0); 2];
        let v = bergman_kernel_exact_ball(2, &zero2, &zero2).unwrap();
        assert!((v.re - 2.0 / (PI * PI)).abs() < 1e-15);
        let half = [Complex64::new(0.5, 0.0)];
        let v = bergman_kernel_exact_ball(1, &half, &half).unwrap();
        assert!((v.re - 16.0 / (9.0 * PI)).abs() < 1e-14);
        let one = [Complex64::new(1.0, 0.0)];
        assert!(matches!(
            bergman_kernel_exact_ball(1, &one, &one),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn monomial_series_converges_to_closed_form() {
        // Σ_{|α|≤200} |z^α|²/‖z^α‖² at |z| = 0.9 in the ball, n = 2
        let d = DomainSpec::ball(2);
        let z = [Complex64::new(0.9 * 0.6, 0.0), Complex64::new(0.0, 0.9 * 0.8)];
        let table = NormTable::build(&d, 200, DEFAULT_INDEX_BUDGET).unwrap();
        let series: f64 = table
            .entries()
            .iter()
            .map(|(a, l)| (2.0 * a.alpha().iter().zip(&z).map(|(&k, c)| k as f64 * c.norm().ln()).sum::<f64>() - l).exp())
            .sum();
        let exact = bergman_kernel_exact_ball(2, &z, &z).unwrap().re;
        assert!(((series - exact) / exact).abs() < 1e-6, "{series} {exact}");
        let half = [Complex64::new(0.5, 0.0)];
        let t1 = NormTable::build(&DomainSpec::ball(1), 200, DEFAULT_INDEX_BUDGET).unwrap();
        let s1: f64 = t1
            .entries()
            .iter()
            .map(|(a, l)| (a.degree() as f64 * 0.25f64.ln() - l).exp())
            .sum();
        let e1 = bergman_kernel_exact_ball(1, &half, &half).unwrap().re;
        assert!(((s1 - e1) / e1).abs() < 1e-10);
    }

    #[test]
    fn norm_table_csv_round_trip() {
        let d = DomainSpec::ellipsoid(vec![1.0, 4.0]).unwrap();
        let t = NormTable::build(&d, 6, DEFAULT_INDEX_BUDGET).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = NormTable::read_csv(&d, buf.as_slice()).unwrap();
        assert_eq!(back.len(), t.len());
        for (a, l) in t.entries() {
            assert_eq!(back.log_norm_sq(a), Some(*l));
        }
        assert!(NormTable::read_csv(&DomainSpec::ball(3), {
            let mut b = Vec::new();
            t.write_csv(&mut b).unwrap();
            b
        }
        .as_slice())
        .is_err());
    }

    #[test]
    fn canonicalization() {
        let e = DomainSpec::ellipsoid(vec![1.0, 1.0]).unwrap();
        assert_eq!(e.canonical(), DomainSpec::ball(2));
        assert!(DomainSpec::ellipsoid(vec![1.0, -1.0]).is_err());
    }
}
