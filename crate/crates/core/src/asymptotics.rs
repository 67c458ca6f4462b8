//! Predicted leading coefficients and empirical verdicts on the `k → ∞` behaviour of
//! `χ_k(T_R)`.
//!
//! Predicted constants come from quadrature, empirical ones from exact summation, and
//! only their ratios are judged.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::exec;
use crate::geometry::{
    decompose_reeb_like, levi_spectrum, normalize_defining_function, to_real, DefiningFunction,
    BOUNDARY_TOL,
};
use crate::kernels::family_kernel_eval;
use crate::quadrature::{AdaptiveQuadrature, GaussLegendre};
use crate::spectral::{ChiProfile, ProjectorFamily, ProjectorKind, RotationGenerator};
use crate::{Error, Result};

/// Largest inward depth for which the damping law is tested.
pub const MAX_DAMPING_DEPTH: f64 = 0.05;

/// Deviations `|r − 1|` below this are treated as rounding noise.
const ENVELOPE_FLOOR: f64 = 1e-12;

/// Nodes per axis of the sphere quadrature.
pub const SPHERE_NODES: usize = 64;

/// Boundary quantities entering the leading coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub point: Vec<Complex64>,
    pub b0: f64,
    #[serde(rename = "A0")]
    pub a0: f64,
    pub order_interior: u32,
    pub order_boundary: u32,
    /// `ω₀(T_λ)(x)`.
    pub alpha_at_point: f64,
    pub det_levi: f64,
}

/// `(ω₀(T_λ)(x), det 𝓛ₓ)` at a strictly pseudoconvex boundary point.
pub fn boundary_data(domain: &DomainSpec, generator: &RotationGenerator, x: &[Complex64]) -> Result<(f64, f64)> {
    let n = domain.n();
    if x.len() != n || generator.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().min(generator.n()),
        });
    }
    let xr = to_real(x);
    let rho = normalize_defining_function(domain.defining_function(), &xr)?;
    let v = rho.value(&xr);
    if v.abs() > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary { value: v });
    }
    let levi = levi_spectrum(&rho, &xr)?;
    if !levi.strictly_pseudoconvex {
        return Err(Error::InvalidArgument("point is not strictly pseudoconvex".into()));
    }
    let alpha = decompose_reeb_like(generator, &rho, &xr)?.alpha;
    Ok((alpha, levi.det_levi))
}

/// `∫ χ(tα) tᵖ dt` over `[t_min/α, t_max/α]`.
fn scaled_moment(chi: &ChiProfile, alpha: f64, p: i32) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha { alpha });
    }
    Ok(AdaptiveQuadrature::default().integrate(chi.t_min() / alpha, chi.t_max() / alpha, |t| {
        chi.eval(t * alpha) * t.powi(p)
    }))
}

/// `b₀(x) = π⁻ⁿ det 𝓛ₓ ∫ χ(t α(x)) tⁿ dt`.
pub fn predict_b0(domain: &DomainSpec, x: &[Complex64], chi: &ChiProfile, generator: &RotationGenerator) -> Result<f64> {
    let (alpha, det) = boundary_data(domain, generator, x)?;
    let n = domain.n() as i32;
    Ok(PI.powi(-n) * det * scaled_moment(chi, alpha, n)?)
}

/// `b₀` by the substitution `s = tα`: `π⁻ⁿ det 𝓛ₓ α^{−(n+1)} ∫ χ(s) sⁿ ds`.
pub fn predict_b0_substituted(
    domain: &DomainSpec,
    x: &[Complex64],
    chi: &ChiProfile,
    generator: &RotationGenerator,
) -> Result<f64> {
    let (alpha, det) = boundary_data(domain, generator, x)?;
    let n = domain.n() as i32;
    Ok(PI.powi(-n) * det * alpha.powi(-(n + 1)) * chi.moment(n))
}

/// `A₀(x) = (2πⁿ)⁻¹ det 𝓛ₓ ∫ χ(t α(x)) tⁿ⁻¹ dt`.
pub fn predict_a0(domain: &DomainSpec, x: &[Complex64], chi: &ChiProfile, generator: &RotationGenerator) -> Result<f64> {
    let (alpha, det) = boundary_data(domain, generator, x)?;
    let n = domain.n() as i32;
    Ok(det * scaled_moment(chi, alpha, n - 1)? / (2.0 * PI.powi(n)))
}

pub fn predict(domain: &DomainSpec, x: &[Complex64], chi: &ChiProfile, generator: &RotationGenerator) -> Result<Prediction> {
    let (alpha, det) = boundary_data(domain, generator, x)?;
    let n = domain.n() as i32;
    Ok(Prediction {
        point: x.to_vec(),
        b0: PI.powi(-n) * det * scaled_moment(chi, alpha, n)?,
        a0: det * scaled_moment(chi, alpha, n - 1)? / (2.0 * PI.powi(n)),
        order_interior: n as u32 + 1,
        order_boundary: n as u32,
        alpha_at_point: alpha,
        det_levi: det,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log–log fit.
    pub residual: f64,
}

/// Least squares of `log value` against `log k`.
pub fn fit_growth_order(k_ladder: &[f64], values: &[f64]) -> Result<GrowthFit> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveValue { index, value });
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    fit_log_growth(k_ladder, &logs)
}

/// As [`fit_growth_order`] with values given by their logarithms.
pub fn fit_log_growth(k_ladder: &[f64], log_values: &[f64]) -> Result<GrowthFit> {
    if k_ladder.len() != log_values.len() {
        return Err(Error::DimensionMismatch {
            expected: k_ladder.len(),
            got: log_values.len(),
        });
    }
    if k_ladder.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "growth fit needs at least 4 values, got {}",
            k_ladder.len()
        )));
    }
    check_ladder(k_ladder)?;
    if let Some((index, &value)) = log_values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonPositiveValue { index, value: value.exp() });
    }
    let xs: Vec<f64> = k_ladder.iter().map(|k| k.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = log_values.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(log_values).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(log_values)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(GrowthFit {
        slope,
        intercept,
        residual: (ss / m).sqrt(),
    })
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

/// One clause of a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    /// Human-readable acceptance rule, e.g. `"<= 0.03"`.
    pub rule: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub k_ladder: Vec<f64>,
    /// Exact degree cutoff per ladder entry.
    pub cutoffs: Vec<u32>,
    pub seeds: Vec<u64>,
    pub backend: String,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub claim: String,
    pub empirical: Vec<Series>,
    pub predicted: Vec<NamedValue>,
    pub ratios: Vec<Series>,
    pub fits: Vec<(String, GrowthFit)>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

impl AsymptoticsReport {
    pub fn new(claim: &str, k_ladder: &[f64]) -> Self {
        AsymptoticsReport {
            claim: claim.to_string(),
            empirical: Vec::new(),
            predicted: Vec::new(),
            ratios: Vec::new(),
            fits: Vec::new(),
            checks: Vec::new(),
            verdict: Verdict::Pass,
            provenance: Provenance {
                k_ladder: k_ladder.to_vec(),
                cutoffs: Vec::new(),
                seeds: Vec::new(),
                backend: exec::backend().to_string(),
                threads: exec::threads(),
            },
        }
    }

    pub fn empirical(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.empirical.push(Series { name: name.into(), values });
    }

    pub fn predicted(&mut self, name: impl Into<String>, value: f64) {
        self.predicted.push(NamedValue { name: name.into(), value });
    }

    pub fn ratio(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.ratios.push(Series { name: name.into(), values });
    }

    pub fn fit(&mut self, name: impl Into<String>, fit: GrowthFit) {
        self.fits.push((name.into(), fit));
    }

    /// Records a clause; the verdict fails as soon as one clause does.
    pub fn check(&mut self, name: impl Into<String>, observed: f64, rule: impl Into<String>, passed: bool) {
        if !passed {
            self.verdict = Verdict::Fail;
        }
        self.checks.push(Check {
            name: name.into(),
            observed,
            rule: rule.into(),
            passed,
        });
    }

    /// Appends every series, value and clause of `other`, prefixing names with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: AsymptoticsReport) {
        let tag = |s: String| format!("{prefix}{s}");
        self.empirical.extend(other.empirical.into_iter().map(|s| Series { name: tag(s.name), ..s }));
        self.predicted.extend(other.predicted.into_iter().map(|s| NamedValue { name: tag(s.name), ..s }));
        self.ratios.extend(other.ratios.into_iter().map(|s| Series { name: tag(s.name), ..s }));
        self.fits.extend(other.fits.into_iter().map(|(n, f)| (tag(n), f)));
        for c in other.checks {
            self.check(tag(c.name), c.observed, c.rule, c.passed);
        }
        self.provenance.seeds.extend(other.provenance.seeds);
        if self.provenance.cutoffs.is_empty() {
            self.provenance.cutoffs = other.provenance.cutoffs;
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

fn diagonal_values(family: &ProjectorFamily, z: &[Complex64], k_ladder: &[f64]) -> Result<Vec<(f64, f64)>> {
    exec::try_map(k_ladder, |&k| {
        family_kernel_eval(family, k, z, z)
            .and_then(|s| s.resolved())
            .map(|s| (s.value.re, s.log_abs_value))
    })
}

/// `d ln |K(z,w;k)| / dk` by a central difference with step `h`.
pub fn log_kernel_slope(family: &ProjectorFamily, z: &[Complex64], w: &[Complex64], k: f64, h: f64) -> Result<f64> {
    let hi = family_kernel_eval(family, k + h, z, w)?.resolved()?.log_abs_value;
    let lo = family_kernel_eval(family, k - h, z, w)?.resolved()?.log_abs_value;
    Ok((hi - lo) / (2.0 * h))
}

/// `r(k) = K(x,x;k) / (k^{ord} c₀(x))` for `c₀ = b₀` (interior), `A₀` (boundary).
///
/// Passes if `|r(k_max) − 1| ≤ tol` and `|r(k) − 1|` is non-increasing and stays below
/// `2C/k` for the least-squares `C` of `|r − 1| ≈ C/k`.
pub fn leading_ratio_test(family: &ProjectorFamily, x: &[Complex64], k_ladder: &[f64], tol: f64) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    let pred = predict(family.domain(), x, family.chi(), family.generator())?;
    let (c0, order) = match family.kind() {
        ProjectorKind::Bergman => (pred.b0, pred.order_interior),
        ProjectorKind::Szego => (pred.a0, pred.order_boundary),
    };
    let values = diagonal_values(family, x, k_ladder)?;
    let ratios: Vec<f64> = k_ladder
        .iter()
        .zip(&values)
        .map(|(k, (v, _))| v / (k.powi(order as i32) * c0))
        .collect();
    let mut report = AsymptoticsReport::new("leading", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.empirical("kernel_diagonal", values.iter().map(|v| v.0).collect());
    report.predicted(if family.kind() == ProjectorKind::Bergman { "b0" } else { "A0" }, c0);
    report.predicted("alpha", pred.alpha_at_point);
    report.predicted("det_levi", pred.det_levi);
    report.ratio("r", ratios.clone());
    let top = (ratios[ratios.len() - 1] - 1.0).abs();
    report.check("ratio_at_k_max", top, format!("|r - 1| <= {tol}"), top <= tol);
    let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    // least-squares C in |r − 1| ≈ C/k
    let c_fit = k_ladder.iter().zip(&dev).map(|(k, d)| d / k).sum::<f64>()
        / k_ladder.iter().map(|k| k.powi(-2)).sum::<f64>();
    let decreasing = dev.windows(2).all(|p| p[1] <= p[0] + ENVELOPE_FLOOR);
    let worst = k_ladder
        .iter()
        .zip(&dev)
        .map(|(k, d)| if *d <= ENVELOPE_FLOOR { 0.0 } else { k * d / c_fit })
        .fold(0.0, f64::max);
    let within = decreasing && worst <= 2.0;
    report.predicted("envelope_c", c_fit);
    report.ratio("k_times_deviation", k_ladder.iter().zip(&dev).map(|(k, d)| k * d).collect());
    report.check("c_over_k_envelope", worst, "|r - 1| non-increasing and <= 2C/k, C fitted", within);
    Ok(report)
}

/// Fitted order of `K(x,x;k)` against `expected ± tol` for every point.
pub fn growth_order_test(
    family: &ProjectorFamily,
    points: &[(String, Vec<Complex64>)],
    k_ladder: &[f64],
    expected: f64,
    tol: f64,
) -> Result<AsymptoticsReport> {
    let mut report = AsymptoticsReport::new("growth", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.predicted("order", expected);
    for (id, x) in points {
        let values = diagonal_values(family, x, k_ladder)?;
        let logs: Vec<f64> = values.iter().map(|v| v.1).collect();
        let fit = fit_log_growth(k_ladder, &logs)?;
        report.empirical(format!("{id}:kernel_diagonal"), values.iter().map(|v| v.0).collect());
        report.fit(id.clone(), fit);
        report.check(
            format!("{id}:order"),
            fit.slope,
            format!("within {expected} +- {tol}"),
            (fit.slope - expected).abs() <= tol,
        );
    }
    Ok(report)
}

/// Normalized defining value `ρ(z)/|∇ρ(z)|` and the boundary point on the ray through `z`.
fn normalized_depth(domain: &DomainSpec, z: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    let x = domain.project_to_boundary(z)?;
    let zr = to_real(z);
    let rho = normalize_defining_function(domain.defining_function(), &zr)?;
    Ok((rho.value(&zr), x))
}

fn strictly_decreasing(logs: &[f64]) -> bool {
    logs.windows(2).all(|p| p[1] < p[0])
}

fn decay_checks(report: &mut AsymptoticsReport, id: &str, k_ladder: &[f64], logs: &[f64], orders: &[u32]) {
    if logs.iter().all(|l| *l == f64::NEG_INFINITY) {
        report.check(format!("{id}:identically_zero"), 0.0, "K = 0 for every k", true);
        return;
    }
    for &m in orders {
        let scaled: Vec<f64> = k_ladder.iter().zip(logs).map(|(k, l)| l + m as f64 * k.ln()).collect();
        let worst = scaled.windows(2).map(|p| p[1] - p[0]).fold(f64::NEG_INFINITY, f64::max);
        report.ratio(format!("{id}:log_abs_k{m}"), scaled.clone());
        report.check(
            format!("{id}:k^{m}|K| decreasing"),
            worst,
            "every step of ln(k^N |K|) < 0",
            strictly_decreasing(&scaled),
        );
    }
}

/// Superpolynomial decay of `K(z,z;k)` at an interior point together with the damping
/// rate `d ln K/dk → 2 ρ(z) t_min / α(x)`, `x` the boundary point on the ray through `z`.
pub fn interior_decay_test(
    family: &ProjectorFamily,
    z: &[Complex64],
    k_ladder: &[f64],
    orders: &[u32],
    slope_tol: f64,
) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    let (rho, x) = normalized_depth(family.domain(), z)?;
    if !(rho < 0.0) {
        return Err(Error::OutsideDomain(format!("interior test needs an interior point, rho = {rho}")));
    }
    let (alpha, _) = boundary_data(family.domain(), family.generator(), &x)?;
    let values = diagonal_values(family, z, k_ladder)?;
    let logs: Vec<f64> = values.iter().map(|v| v.1).collect();
    let mut report = AsymptoticsReport::new("interior", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.empirical("kernel_diagonal", values.iter().map(|v| v.0).collect());
    report.empirical("log_kernel_diagonal", logs.clone());
    decay_checks(&mut report, "interior", k_ladder, &logs, orders);
    let k_top = k_ladder[k_ladder.len() - 1];
    let slope = log_kernel_slope(family, z, z, k_top, 0.01 * k_top)?;
    let predicted = 2.0 * rho * family.chi().t_min() / alpha;
    report.predicted("rho", rho);
    report.predicted("damping_slope", predicted);
    report.predicted("observed_slope", slope);
    let dev = (slope / predicted - 1.0).abs();
    report.check("damping_slope", dev, format!("|slope/pred - 1| <= {slope_tol}"), dev <= slope_tol);
    Ok(report)
}

/// `∫ χ(tα) tⁿ e^{2ktρ} dt / ∫ χ(tα) tⁿ dt`.
pub fn damping_prediction(chi: &ChiProfile, alpha: f64, n: usize, rho: f64, k: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha { alpha });
    }
    let q = AdaptiveQuadrature::default();
    let (a, b) = (chi.t_min() / alpha, chi.t_max() / alpha);
    let weight = |t: f64| chi.eval(t * alpha) * t.powi(n as i32);
    // scaled by e^{−2kaρ} so both integrals stay O(1)
    let num = q.integrate(a, b, |t| weight(t) * (2.0 * k * (t - a) * rho).exp());
    let den = q.integrate(a, b, weight);
    Ok(num / den * (2.0 * k * a * rho).exp())
}

/// Normal damping law along the inward ray `z = (1 − s)x`.
pub fn interior_damping_test(
    family: &ProjectorFamily,
    x: &[Complex64],
    depth: f64,
    k_ladder: &[f64],
    tol: f64,
) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    if depth > MAX_DAMPING_DEPTH {
        return Err(Error::DepthTooLarge {
            depth,
            max: MAX_DAMPING_DEPTH,
        });
    }
    if depth < 0.0 {
        return Err(Error::InvalidArgument(format!("depth must be nonnegative, got {depth}")));
    }
    let (alpha, _) = boundary_data(family.domain(), family.generator(), x)?;
    let z: Vec<Complex64> = x.iter().map(|c| c * (1.0 - depth)).collect();
    let rho = if depth == 0.0 { 0.0 } else { normalized_depth(family.domain(), &z)?.0 };
    let at_x = diagonal_values(family, x, k_ladder)?;
    let at_z = diagonal_values(family, &z, k_ladder)?;
    let empirical: Vec<f64> = at_z.iter().zip(&at_x).map(|(a, b)| (a.1 - b.1).exp()).collect();
    let predicted = k_ladder
        .iter()
        .map(|&k| damping_prediction(family.chi(), alpha, family.n(), rho, k))
        .collect::<Result<Vec<f64>>>()?;
    let mut report = AsymptoticsReport::new("interior", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.predicted("depth", depth);
    report.predicted("rho", rho);
    report.empirical("damping_ratio", empirical.clone());
    report.ratio("predicted_damping_ratio", predicted.clone());
    let dev = empirical
        .iter()
        .zip(&predicted)
        .map(|(e, p)| (e / p - 1.0).abs())
        .fold(0.0, f64::max);
    report.check("damping_ratio", dev, format!("max |empirical/predicted - 1| <= {tol}"), dev <= tol);
    if depth > 0.0 {
        let k_top = k_ladder[k_ladder.len() - 1];
        let slope = log_kernel_slope(family, &z, &z, k_top, 0.01 * k_top)?
            - log_kernel_slope(family, x, x, k_top, 0.01 * k_top)?;
        let target = 2.0 * rho * family.chi().t_min() / alpha;
        report.predicted("damping_slope", target);
        report.predicted("observed_slope", slope);
        let d = (slope / target - 1.0).abs();
        report.check("damping_slope", d, format!("|slope/pred - 1| <= {tol}"), d <= tol);
    }
    Ok(report)
}

/// `Tr χ_k(T_R) / kⁿ` stays inside `[m/2, 2M]`, with `m, M` its extremes over the upper
/// half of the ladder, and the fitted order is `n ± order_tol`.
pub fn trace_scan(family: &ProjectorFamily, k_ladder: &[f64], order_tol: f64) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    let n = family.n() as i32;
    let traces = k_ladder.iter().map(|&k| family.trace(k)).collect::<Result<Vec<f64>>>()?;
    let normalized: Vec<f64> = traces.iter().zip(k_ladder).map(|(t, k)| t / k.powi(n)).collect();
    let upper = &normalized[(normalized.len() - 1) / 2..];
    let m = upper.iter().copied().fold(f64::INFINITY, f64::min);
    let big = upper.iter().copied().fold(0.0, f64::max);
    let mut report = AsymptoticsReport::new("trace", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.empirical("trace", traces.clone());
    report.ratio("trace_over_k^n", normalized.clone());
    let inside = normalized.iter().all(|v| *v >= 0.5 * m && *v <= 2.0 * big);
    let lo = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = normalized.iter().copied().fold(0.0, f64::max);
    report.check("bounded_ratio", hi / lo, format!("all in [{:.6e}, {:.6e}]", 0.5 * m, 2.0 * big), inside);
    let fit = fit_growth_order(k_ladder, &traces)?;
    report.fit("trace", fit);
    report.check(
        "trace_order",
        fit.slope,
        format!("within {n} +- {order_tol}"),
        (fit.slope - n as f64).abs() <= order_tol,
    );
    Ok(report)
}

/// `∫_{S^{2n−1}} f dσ` for `f` depending only on `(|x_1|², …, |x_n|²)`, by tensor
/// Gauss–Legendre on the simplex (collapsed coordinates) times the torus volume.
pub fn sphere_integral<F>(n: usize, nodes: usize, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let gl = GaussLegendre::new(nodes).mapped(0.0, 1.0);
    let torus = (2.0 * PI).powi(n as i32) * 2f64.powi(1 - n as i32);
    if n == 1 {
        return torus * f(&[1.0]);
    }
    let dims = n - 1;
    let total = nodes.pow(dims as u32);
    let terms = exec::map_range(total, |mut idx| {
        let mut u = Vec::with_capacity(n);
        let mut remaining = 1.0;
        let mut w = 1.0;
        for _ in 0..dims {
            let (s, ws) = gl[idx % nodes];
            idx /= nodes;
            let uj = remaining * s;
            w *= remaining * ws;
            remaining -= uj;
            u.push(uj);
        }
        u.push(remaining);
        w * f(&u)
    });
    torus * crate::summation::pairwise_sum(&terms)
}

/// `(kⁿ / 2πⁿ) ∫_X det 𝓛ₓ ∫ χ(t α(x)) tⁿ⁻¹ dt dσ(x)` on the unit sphere.
pub fn boundary_trace_prediction(n: usize, generator: &RotationGenerator, chi: &ChiProfile, k: f64) -> Result<f64> {
    let domain = DomainSpec::ball(n);
    let failure = std::sync::Mutex::new(None);
    let integral = sphere_integral(n, SPHERE_NODES, |u| {
        let x: Vec<Complex64> = u.iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect();
        let r = boundary_data(&domain, generator, &x).and_then(|(alpha, det)| {
            scaled_moment(chi, alpha, n as i32 - 1).map(|m| det * m)
        });
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            }
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(k.powi(n as i32) / (2.0 * PI.powi(n as i32)) * integral)
}

/// Exact boundary trace against the sphere-integral prediction at the top of the ladder.
pub fn boundary_trace_test(
    n: usize,
    generator: &RotationGenerator,
    chi: &ChiProfile,
    k_ladder: &[f64],
    tol: f64,
) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    let family = ProjectorFamily::boundary(n, generator, chi)?;
    let traces = k_ladder.iter().map(|&k| family.trace(k)).collect::<Result<Vec<f64>>>()?;
    let predicted = k_ladder
        .iter()
        .map(|&k| boundary_trace_prediction(n, generator, chi, k))
        .collect::<Result<Vec<f64>>>()?;
    let ratios: Vec<f64> = traces.iter().zip(&predicted).map(|(t, p)| t / p).collect();
    let mut report = AsymptoticsReport::new("boundary", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    report.empirical("boundary_trace", traces);
    report.ratio("predicted_trace", predicted);
    report.ratio("empirical_over_predicted", ratios.clone());
    let dev = (ratios[ratios.len() - 1] - 1.0).abs();
    report.check("trace_at_k_max", dev, format!("|ratio - 1| <= {tol}"), dev <= tol);
    Ok(report)
}

/// `k^N |K(x,y;k)|` strictly decreasing over the upper half of the ladder for every `N`
/// in `orders`; identically vanishing pairs pass.
pub fn offdiagonal_decay_test(
    family: &ProjectorFamily,
    pairs: &[(String, Vec<Complex64>, Vec<Complex64>)],
    k_ladder: &[f64],
    orders: &[u32],
) -> Result<AsymptoticsReport> {
    check_ladder(k_ladder)?;
    let start = (k_ladder.len() - 1) / 2;
    let upper = &k_ladder[start..];
    let mut report = AsymptoticsReport::new("offdiag", k_ladder);
    report.provenance.cutoffs = k_ladder.iter().map(|&k| family.cutoff(k)).collect();
    for (id, x, y) in pairs {
        let samples = exec::try_map(k_ladder, |&k| family_kernel_eval(family, k, x, y).and_then(|s| s.resolved()))?;
        report.empirical(format!("{id}:abs_kernel"), samples.iter().map(|s| s.value.norm()).collect());
        let logs: Vec<f64> = samples[start..].iter().map(|s| s.log_abs_value).collect();
        decay_checks(&mut report, id, upper, &logs, orders);
    }
    Ok(report)
}
