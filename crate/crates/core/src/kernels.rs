//! Schwartz kernels `χ_k(T_R)(z, w) = Σ_α χ(⟨λ,α⟩/k) z^α w̄^α / ‖z^α‖²`.
//!
//! Terms are assembled in log space with the phase `Σ α_j (arg z_j − arg w_j)` carried
//! separately, summed pairwise within a degree layer and accumulated over layers in
//! ascending degree. Coordinates where `z` or `w` vanishes are removed from the index
//! enumeration, which is both the only singular path of the logarithm and a large
//! saving for points on coordinate subspaces.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{total_count, DomainSpec, MultiIndex};
use crate::exec;
use crate::geometry::BOUNDARY_TOL;
use crate::spectral::{ProjectorFamily, ProjectorKind, ProjectorRecord, SpectralProjectorRep};
use crate::summation::ScaledSum;
use crate::{Error, Result};

/// Samples with `|value| < Σ|term| / UNSTABLE_CANCELLATION` are not resolved.
pub const UNSTABLE_CANCELLATION: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub k: f64,
    pub value: Complex64,
    /// `ln |value|`, finite even where `value` under- or overflows.
    pub log_abs_value: f64,
    /// `ln Σ |term|`.
    pub log_abs_sum: f64,
    pub terms_used: usize,
    /// Largest `ln |term|`.
    pub max_term_log: f64,
}

impl KernelSample {
    fn from_sum(z: &[Complex64], w: &[Complex64], k: f64, s: &ScaledSum, max_term_log: f64) -> Self {
        KernelSample {
            z: z.to_vec(),
            w: w.to_vec(),
            k,
            value: s.value(),
            log_abs_value: s.log_abs(),
            log_abs_sum: s.log_abs_sum(),
            terms_used: s.terms,
            max_term_log,
        }
    }

    /// `ln (Σ|term| / |value|)`; the absolute rounding error is about `ε Σ|term|`.
    pub fn cancellation(&self) -> f64 {
        if self.log_abs_sum == f64::NEG_INFINITY {
            0.0
        } else {
            self.log_abs_sum - self.log_abs_value
        }
    }

    /// Rejects samples whose relative accuracy is lost to cancellation.
    pub fn resolved(self) -> Result<Self> {
        let spread = self.cancellation();
        if spread > UNSTABLE_CANCELLATION.ln() {
            return Err(Error::UnstableSummation { spread });
        }
        Ok(self)
    }
}

/// Per-point logarithms with zero coordinates masked out.
struct PointLogs {
    log_abs: Vec<f64>,
    arg: Vec<f64>,
    support: Vec<bool>,
}

impl PointLogs {
    fn pair(z: &[Complex64], w: &[Complex64]) -> Self {
        let support: Vec<bool> = z.iter().zip(w).map(|(a, b)| *a != Complex64::new(0.0, 0.0) && *b != Complex64::new(0.0, 0.0)).collect();
        let log_abs = z
            .iter()
            .zip(w)
            .zip(&support)
            .map(|((a, b), &s)| if s { a.norm().ln() + b.norm().ln() } else { f64::NEG_INFINITY })
            .collect();
        let arg = z.iter().zip(w).map(|(a, b)| a.arg() - b.arg()).collect();
        PointLogs { log_abs, arg, support }
    }

    /// `(ln |weight z^α w̄^α / ‖z^α‖²|, phase)`, or `None` if the term vanishes.
    fn term(&self, r: &ProjectorRecord) -> Option<(f64, f64)> {
        let mut log = r.weight.abs().ln() - r.log_norm_sq;
        let mut phase = if r.weight < 0.0 { PI } else { 0.0 };
        for (j, &a) in r.alpha.alpha().iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !self.support[j] {
                return None;
            }
            log += a as f64 * self.log_abs[j];
            phase += a as f64 * self.arg[j];
        }
        Some((log, phase.rem_euclid(TAU)))
    }
}

fn check_point(kind: ProjectorKind, domain: &DomainSpec, z: &[Complex64]) -> Result<()> {
    if z.len() != domain.n() {
        return Err(Error::DimensionMismatch {
            expected: domain.n(),
            got: z.len(),
        });
    }
    let q = domain.quadratic_form(z);
    match kind {
        ProjectorKind::Bergman if q > 1.0 + BOUNDARY_TOL => Err(Error::OutsideDomain(format!(
            "point has defining value {} > 0",
            q - 1.0
        ))),
        ProjectorKind::Szego if (q - 1.0).abs() > BOUNDARY_TOL => {
            Err(Error::NotOnBoundary { value: q - 1.0 })
        }
        _ => Ok(()),
    }
}

fn sum_layer(logs: &PointLogs, records: &[ProjectorRecord]) -> (ScaledSum, f64) {
    let terms: Vec<(f64, f64)> = records.iter().filter_map(|r| logs.term(r)).collect();
    let max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    (ScaledSum::from_log_terms(&terms), max)
}

fn fold_layers(layers: Vec<(ScaledSum, f64)>) -> (ScaledSum, f64) {
    layers.into_iter().fold((ScaledSum::EMPTY, f64::NEG_INFINITY), |(acc, m), (s, lm)| {
        (acc.combine(s), m.max(lm))
    })
}

/// Evaluates the kernel of a materialized projector.
pub fn kernel_eval(proj: &SpectralProjectorRep, z: &[Complex64], w: &[Complex64]) -> Result<KernelSample> {
    let fam = proj.family();
    check_point(fam.kind(), fam.domain(), z)?;
    check_point(fam.kind(), fam.domain(), w)?;
    let logs = PointLogs::pair(z, w);
    let records = proj.records();
    let mut bounds = vec![0];
    for i in 1..records.len() {
        if records[i].alpha.degree() != records[i - 1].alpha.degree() {
            bounds.push(i);
        }
    }
    bounds.push(records.len());
    let layers = exec::map_range(bounds.len() - 1, |i| sum_layer(&logs, &records[bounds[i]..bounds[i + 1]]));
    let (s, max) = fold_layers(layers);
    Ok(KernelSample::from_sum(z, w, proj.k(), &s, max))
}

/// Evaluates the kernel at parameter `k` without materializing the projector,
/// enumerating only indices supported on the common support of `z` and `w`.
pub fn family_kernel_eval(family: &ProjectorFamily, k: f64, z: &[Complex64], w: &[Complex64]) -> Result<KernelSample> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
    }
    check_point(family.kind(), family.domain(), z)?;
    check_point(family.kind(), family.domain(), w)?;
    let logs = PointLogs::pair(z, w);
    let active = logs.support.iter().filter(|s| **s).count();
    let cutoff = family.cutoff(k);
    if active > 0 {
        let count = total_count(active, cutoff);
        if count > family.budget() as u128 {
            return Err(Error::CapacityExceeded {
                count,
                budget: family.budget(),
            });
        }
    }
    let degrees: Vec<u32> = if active == 0 { Vec::new() } else { (0..=cutoff).collect() };
    let layers = exec::try_map(&degrees, |&d| {
        family
            .layer_records(k, d, Some(&logs.support))
            .map(|recs| sum_layer(&logs, &recs))
    })?;
    let (s, max) = fold_layers(layers);
    Ok(KernelSample::from_sum(z, w, k, &s, max))
}

/// Closed-form degree sum for `λ = (l,…,l)`:
/// `Σ_d χ(ld/k) c_d ⟨z,w⟩_a^d` with `c_d = Π a_j (n+d)!/(πⁿ d!)` on the ellipsoid
/// `Σ a_j|z_j|² < 1` and `c_d = (n−1+d)!/(2πⁿ d!)` on the sphere.
pub fn degree_sum_kernel(family: &ProjectorFamily, k: f64, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    let g = family.generator();
    if !g.is_uniform() {
        return Err(Error::InvalidArgument("degree sum requires equal rotation weights".into()));
    }
    let n = family.n();
    check_point(family.kind(), family.domain(), z)?;
    check_point(family.kind(), family.domain(), w)?;
    let a = family.domain().coefficients();
    let inner: Complex64 = z.iter().zip(w).zip(&a).map(|((zj, wj), aj)| zj * wj.conj() * aj).sum();
    if inner == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (log_r, arg) = (inner.norm().ln(), inner.arg());
    let l = g.weights()[0];
    let chi = family.chi();
    let log_det: f64 = a.iter().map(|x| x.ln()).sum();
    let terms: Vec<(f64, f64)> = (0..=family.cutoff(k))
        .filter_map(|d| {
            let wt = chi.eval_scaled(l * d as f64, k);
            if wt == 0.0 {
                return None;
            }
            let df = d as f64;
            let log_c = match family.kind() {
                ProjectorKind::Bergman => {
                    log_det + ln_rising(df + 1.0, n) - n as f64 * PI.ln()
                }
                ProjectorKind::Szego => ln_rising(df + 1.0, n - 1) - (2.0 * PI.powi(n as i32)).ln(),
            };
            let phase = if wt < 0.0 { PI } else { 0.0 } + df * arg;
            Some((wt.abs().ln() + log_c + df * log_r, phase.rem_euclid(TAU)))
        })
        .collect();
    Ok(ScaledSum::from_log_terms(&terms).value())
}

/// `ln (x (x+1) ⋯ (x+m−1))`.
fn ln_rising(x: f64, m: usize) -> f64 {
    (0..m).map(|i| (x + i as f64).ln()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Diagonal,
    Offdiagonal,
}

impl ScanKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScanKind::Diagonal => "diagonal",
            ScanKind::Offdiagonal => "offdiagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub point_id: String,
    pub k: f64,
    pub value: Complex64,
    pub log_abs_value: f64,
    pub terms_used: usize,
}

/// Kernel values over a `k`-ladder, sorted by `(point, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub kind: ScanKind,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn point_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for r in &self.rows {
            if ids.last() != Some(&r.point_id.as_str()) {
                ids.push(&r.point_id);
            }
        }
        ids
    }

    pub fn rows_for<'a>(&'a self, point_id: &'a str) -> impl Iterator<Item = &'a ScanRow> + 'a {
        self.rows.iter().filter(move |r| r.point_id == point_id)
    }

    /// Header `point_id,k,re_value,im_value,terms_used`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(self.rows.iter(), out)
    }

    pub fn write_point_csv<W: Write>(&self, point_id: &str, out: W) -> Result<()> {
        write_rows(self.rows_for(point_id), out)
    }

    /// Two whitespace-separated columns `k value`: the real part on the diagonal, the
    /// modulus off it.
    pub fn write_plot_data<W: Write>(&self, point_id: &str, mut out: W) -> Result<()> {
        writeln!(out, "# k {}", if self.kind == ScanKind::Diagonal { "re_value" } else { "abs_value" })?;
        for r in self.rows_for(point_id) {
            let v = match self.kind {
                ScanKind::Diagonal => r.value.re,
                ScanKind::Offdiagonal => r.value.norm(),
            };
            writeln!(out, "{} {:.17e}", r.k, v)?;
        }
        Ok(())
    }
}

fn write_rows<'a, W: Write>(rows: impl Iterator<Item = &'a ScanRow>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point_id", "k", "re_value", "im_value", "terms_used"])?;
    for r in rows {
        w.write_record([
            r.point_id.clone(),
            r.k.to_string(),
            format!("{:.17e}", r.value.re),
            format!("{:.17e}", r.value.im),
            r.terms_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn check_ladder(k_ladder: &[f64]) -> Result<()> {
    if k_ladder.is_empty() {
        return Err(Error::InvalidArgument("k ladder is empty".into()));
    }
    if k_ladder.iter().any(|k| !(k.is_finite() && *k > 0.0)) || k_ladder.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("k ladder must be positive and strictly ascending".into()));
    }
    Ok(())
}

fn scan(
    family: &ProjectorFamily,
    kind: ScanKind,
    pairs: &[(String, Vec<Complex64>, Vec<Complex64>)],
    k_ladder: &[f64],
) -> Result<ScanTable> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no points to scan".into()));
    }
    check_ladder(k_ladder)?;
    let cells: Vec<(usize, f64)> = (0..pairs.len()).flat_map(|p| k_ladder.iter().map(move |&k| (p, k))).collect();
    let rows = exec::try_map(&cells, |&(p, k)| {
        let (id, z, w) = &pairs[p];
        family_kernel_eval(family, k, z, w).map(|s| ScanRow {
            point_id: id.clone(),
            k,
            value: s.value,
            log_abs_value: s.log_abs_value,
            terms_used: s.terms_used,
        })
    })?;
    Ok(ScanTable { kind, rows })
}

/// `K(x, x; k)` for every named point and every `k`.
pub fn diagonal_scan(family: &ProjectorFamily, points: &[(String, Vec<Complex64>)], k_ladder: &[f64]) -> Result<ScanTable> {
    let pairs: Vec<_> = points.iter().map(|(id, z)| (id.clone(), z.clone(), z.clone())).collect();
    scan(family, ScanKind::Diagonal, &pairs, k_ladder)
}

/// `K(x, y; k)` for every named pair and every `k`.
pub fn offdiagonal_scan(
    family: &ProjectorFamily,
    pairs: &[(String, Vec<Complex64>, Vec<Complex64>)],
    k_ladder: &[f64],
) -> Result<ScanTable> {
    scan(family, ScanKind::Offdiagonal, pairs, k_ladder)
}

/// The record of `z^α` in `proj`, if it carries weight.
pub fn record_of<'a>(proj: &'a SpectralProjectorRep, alpha: &MultiIndex) -> Option<&'a ProjectorRecord> {
    proj.records().iter().find(|r| &r.alpha == alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ChiProfile, RotationGenerator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family(n: usize) -> ProjectorFamily {
        ProjectorFamily::interior(&DomainSpec::ball(n), &RotationGenerator::uniform(n), &ChiProfile::new(1.5, 0.5).unwrap())
            .unwrap()
    }

    #[test]
    fn sphere_diagonal_matches_degree_sum() {
        let fam = family(2);
        let x = [c(0.6, 0.0), c(0.0, 0.8)];
        let s = family_kernel_eval(&fam, 100.0, &x, &x).unwrap();
        let expected: f64 = (0..=200)
            .map(|d| ChiProfile::new(1.5, 0.5).unwrap().eval(d as f64 / 100.0) * ((d + 1) * (d + 2)) as f64 / (PI * PI))
            .sum();
        assert!((s.value.re - expected).abs() < 1e-10 * expected);
        assert_eq!(s.value.im, 0.0);
        let oracle = degree_sum_kernel(&fam, 100.0, &x, &x).unwrap();
        assert!((oracle.re - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn materialized_and_streaming_agree() {
        let fam = family(2);
        let p = fam.build(30.0).unwrap();
        let z = [c(0.3, 0.2), c(-0.5, 0.4)];
        let w = [c(0.1, -0.6), c(0.2, 0.3)];
        let a = kernel_eval(&p, &z, &w).unwrap();
        let b = family_kernel_eval(&fam, 30.0, &z, &w).unwrap();
        assert!((a.value - b.value).norm() <= 1e-13 * a.value.norm());
        let back = kernel_eval(&p, &w, &z).unwrap();
        assert!((back.value - a.value.conj()).norm() <= 1e-12 * a.value.norm());
    }

    #[test]
    fn exact_zeros() {
        let fam = family(2);
        let zero = [c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(family_kernel_eval(&fam, 50.0, &zero, &zero).unwrap().value, c(0.0, 0.0));
        let x = [c(1.0, 0.0), c(0.0, 0.0)];
        let y = [c(0.0, 0.0), c(1.0, 0.0)];
        let s = family_kernel_eval(&fam, 50.0, &x, &y).unwrap();
        assert_eq!(s.value, c(0.0, 0.0));
        assert_eq!(s.terms_used, 0);
    }

    #[test]
    fn rejects_points_outside() {
        let fam = family(2);
        let z = [c(1.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(family_kernel_eval(&fam, 10.0, &z, &z), Err(Error::OutsideDomain(_))));
        let b = ProjectorFamily::boundary(2, &RotationGenerator::uniform(2), &ChiProfile::new(1.5, 0.5).unwrap()).unwrap();
        let inner = [c(0.5, 0.0), c(0.0, 0.0)];
        assert!(matches!(family_kernel_eval(&b, 10.0, &inner, &inner), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn scan_is_sorted_by_point_then_k() {
        let fam = family(1);
        let pts = vec![("a".to_string(), vec![c(1.0, 0.0)]), ("b".to_string(), vec![c(0.0, 0.5)])];
        let t = diagonal_scan(&fam, &pts, &[10.0, 20.0, 40.0]).unwrap();
        let keys: Vec<(&str, f64)> = t.rows.iter().map(|r| (r.point_id.as_str(), r.k)).collect();
        assert_eq!(keys, vec![("a", 10.0), ("a", 20.0), ("a", 40.0), ("b", 10.0), ("b", 20.0), ("b", 40.0)]);
        assert!(diagonal_scan(&fam, &pts, &[20.0, 10.0]).is_err());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("point_id,k,re_value,im_value,terms_used\n"));
        assert_eq!(text.lines().count(), 7);
    }
}
