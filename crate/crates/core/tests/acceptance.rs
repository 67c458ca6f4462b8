//! End-to-end acceptance run. Every criterion is evaluated at its stated tolerance and
//! reported on one line; the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use toeplitz_core::asymptotics::{
    boundary_trace_test, growth_order_test, interior_decay_test, leading_ratio_test,
    offdiagonal_decay_test, predict_b0, predict_b0_substituted, trace_scan,
};
use toeplitz_core::domains::{monomial_norm_sq, monomial_norm_sq_oracle, DomainSpec, MultiIndex};
use toeplitz_core::kernels::{family_kernel_eval, offdiagonal_scan};
use toeplitz_core::spectral::{
    chi_by_eigendecomposition, galerkin_toeplitz_matrix, helffer_sjostrand_chi, random_hermitian, ChiProfile,
    ProjectorFamily, QuadratureSpec, RotationGenerator,
};
use toeplitz_core::{Complex64, Result};

const LADDER: [f64; 4] = [50.0, 100.0, 200.0, 400.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn chi() -> ChiProfile {
    ChiProfile::new(1.5, 0.5).unwrap()
}

fn interior(n: usize, weights: Vec<f64>) -> ProjectorFamily {
    ProjectorFamily::interior(
        &DomainSpec::ball(n),
        &RotationGenerator::new(weights).unwrap(),
        &chi(),
    )
    .unwrap()
}

fn boundary(n: usize) -> ProjectorFamily {
    ProjectorFamily::boundary(n, &RotationGenerator::uniform(n), &chi()).unwrap()
}

fn sphere_point(n: usize) -> Vec<Complex64> {
    match n {
        1 => vec![c(0.0, 1.0)],
        2 => vec![c(0.6, 0.0), c(0.0, 0.8)],
        _ => vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)],
    }
}

fn leading_order() -> Result<(bool, String)> {
    let start = Instant::now();
    let x = sphere_point(2);
    let report = leading_ratio_test(&interior(2, vec![1.0, 1.0]), &x, &LADDER, 0.03)?;
    let elapsed = start.elapsed().as_secs_f64();
    let r = &report.ratios[0].values;
    let fast = elapsed < 10.0;
    Ok((
        report.passed() && fast,
        format!(
            "r(k) = {:?}, max k|r-1|/C = {:.3}, {:.2} s (< 10 s: {fast})",
            r.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
            report.checks[1].observed,
            elapsed
        ),
    ))
}

fn growth_orders() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let pts = vec![(format!("x{n}"), sphere_point(n))];
        let bergman = growth_order_test(&interior(n, vec![1.0; n]), &pts, &LADDER, (n + 1) as f64, 0.05)?;
        let szego = growth_order_test(&boundary(n), &pts, &LADDER, n as f64, 0.05)?;
        ok &= bergman.passed() && szego.passed();
        parts.push(format!(
            "n={n}: bergman {:.4}, szego {:.4}",
            bergman.fits[0].1.slope, szego.fits[0].1.slope
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn interior_decay() -> Result<(bool, String)> {
    let z: Vec<Complex64> = sphere_point(2).iter().map(|v| v * 0.9).collect();
    let report = interior_decay_test(&interior(2, vec![1.0, 1.0]), &z, &[100.0, 200.0, 400.0], &[8], 0.10)?;
    let slope = report.predicted.iter().find(|v| v.name == "observed_slope").unwrap().value;
    let target = report.predicted.iter().find(|v| v.name == "damping_slope").unwrap().value;
    Ok((
        report.passed(),
        format!("k^8 K decreasing: {}, slope {slope:.5} vs 2 t_min rho = {target:.5}", report.checks[0].passed),
    ))
}

fn offdiagonal_decay() -> Result<(bool, String)> {
    let fam = interior(2, vec![1.0, 1.0]);
    let x = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let y = vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)];
    let orth = vec![c(0.0, 0.0), c(0.0, 1.0)];
    let pairs = vec![("half".to_string(), x.clone(), y), ("orthogonal".to_string(), x, orth)];
    let table = offdiagonal_scan(&fam, &pairs, &LADDER)?;
    let logs: Vec<f64> = table
        .rows_for("half")
        .map(|r| r.log_abs_value + 8.0 * r.k.ln())
        .collect();
    let decreasing = logs.windows(2).all(|p| p[1] < p[0]);
    let zero = table.rows_for("orthogonal").all(|r| r.value == c(0.0, 0.0));
    let report = offdiagonal_decay_test(&fam, &pairs, &LADDER, &[4, 6, 8])?;
    Ok((
        decreasing && zero && report.passed(),
        format!(
            "ln(k^8|K|) = {:?}, orthogonal pair identically 0: {zero}",
            logs.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>()
        ),
    ))
}

fn traces() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=2 {
        let report = trace_scan(&interior(n, vec![1.0; n]), &LADDER, 0.05)?;
        let band = report.checks[0].observed;
        ok &= report.passed() && band <= 4.0;
        parts.push(format!("n={n}: order {:.4}, band {band:.4}", report.fits[0].1.slope));
    }
    let b = boundary_trace_test(2, &RotationGenerator::uniform(2), &chi(), &LADDER, 0.05)?;
    ok &= b.passed();
    parts.push(format!("boundary trace ratio at 400: {:.5}", b.ratios[1].values[3]));
    Ok((ok, parts.join("; ")))
}

fn weighted_generator() -> Result<(bool, String)> {
    let fam = interior(2, vec![1.0, 2.0]);
    let ladder = [50.0, 100.0, 200.0];
    let x1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let x2 = vec![c(0.0, 0.0), c(1.0, 0.0)];
    let r1 = leading_ratio_test(&fam, &x1, &ladder, 0.10)?.ratios[0].values[2];
    let r2 = leading_ratio_test(&fam, &x2, &ladder, 0.10)?.ratios[0].values[2];
    let g = fam.generator();
    let b1 = predict_b0(fam.domain(), &x1, &chi(), g)?;
    let b2 = predict_b0(fam.domain(), &x2, &chi(), g)?;
    let b2s = predict_b0_substituted(fam.domain(), &x2, &chi(), g)?;
    let factor = b2 / b1;
    let ok = (r1 - 1.0).abs() <= 0.10
        && (r2 - 1.0).abs() <= 0.10
        && (factor - 0.125).abs() <= 1e-10
        && (b2 - b2s).abs() <= 1e-10 * b2;
    Ok((ok, format!("r(200) at (1,0): {r1:.5}, at (0,1): {r2:.5}, b0 ratio {factor:.12}")))
}

fn oracles() -> Result<(bool, String)> {
    // (a) closed-form norms against Monte Carlo
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let domains = [
        DomainSpec::ball(1),
        DomainSpec::ball(2),
        DomainSpec::ellipsoid(vec![1.0, 4.0])?,
        DomainSpec::ball(3),
    ];
    let mut worst_z: f64 = 0.0;
    for i in 0..50 {
        let d = &domains[i % domains.len()];
        let alpha = MultiIndex::new((0..d.n()).map(|_| rng.random_range(0..4u32)).collect());
        let mc = monomial_norm_sq_oracle(d, &alpha, 100_000, 7000 + i as u64)?;
        worst_z = worst_z.max(mc.z_score(monomial_norm_sq(d, &alpha)?));
    }
    // (b) Helffer–Sjöstrand against eigendecomposition
    let mut worst_hs: f64 = 0.0;
    for seed in 0..3 {
        let a = random_hermitian(50, 0.0, 30.0, 100 + seed);
        let hs = helffer_sjostrand_chi(&a, &chi(), 10.0)?;
        let ev = chi_by_eigendecomposition(&a, &chi(), 10.0)?;
        worst_hs = worst_hs.max((hs - ev).norm());
    }
    // (c) Galerkin matrix of R in the monomial basis
    let mut worst_off: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    let cases = [
        (DomainSpec::ball(2), RotationGenerator::new(vec![1.0, 2.0])?),
        (DomainSpec::ellipsoid(vec![1.0, 4.0])?, RotationGenerator::uniform(2)),
    ];
    for (d, g) in &cases {
        let gm = galerkin_toeplitz_matrix(d, g, 8, &QuadratureSpec::for_degree(8))?;
        worst_off = worst_off.max(gm.max_off_diagonal()).max(gm.hermiticity_defect());
        for (i, a) in gm.indices.iter().enumerate() {
            let want = g.pairing(a.alpha());
            let got = gm.matrix[(i, i)];
            let dev = if want == 0.0 { got.norm() } else { (got - want).norm() / want };
            worst_diag = worst_diag.max(dev);
        }
    }
    let ok = worst_z <= 4.0 && worst_hs <= 1e-6 && worst_off <= 1e-8 && worst_diag <= 0.01;
    Ok((
        ok,
        format!(
            "max MC z-score {worst_z:.3}, HS vs eig {worst_hs:.2e}, Galerkin off-diag {worst_off:.2e}, diag dev {worst_diag:.2e}"
        ),
    ))
}

fn structure() -> Result<(bool, String)> {
    // truncation exactness
    let fam = interior(2, vec![1.0, 2.0]);
    let exact = fam.build(40.0)?;
    let wider = fam.build_with_cutoff(40.0, exact.cutoff() + 10)?;
    let truncation = exact.records() == wider.records();

    // rotation equivariance
    let z = vec![c(0.3, -0.2), c(0.1, 0.5)];
    let w = vec![c(-0.4, 0.1), c(0.2, 0.6)];
    let base = family_kernel_eval(&fam, 40.0, &z, &w)?.value;
    let g = fam.generator();
    let mut worst_rot: f64 = 0.0;
    for theta in [0.3, 1.7, -2.9] {
        let rz = g.flow(theta, &z);
        let rw = g.flow(theta, &w);
        let v = family_kernel_eval(&fam, 40.0, &rz, &rw)?.value;
        worst_rot = worst_rot.max((v - base).norm() / base.norm());
    }

    // Cauchy–Schwarz and PSD on a 20-point boundary sample
    let fam2 = interior(2, vec![1.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pts: Vec<Vec<Complex64>> = (0..20)
        .map(|_| {
            let v: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            vec![c(v[0] / r, v[1] / r), c(v[2] / r, v[3] / r)]
        })
        .collect();
    let m = pts.len();
    let mut gram = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = family_kernel_eval(&fam2, 50.0, &pts[i], &pts[j])?.value;
        }
    }
    let mut cs = true;
    for i in 0..m {
        for j in 0..m {
            let (kii, kjj) = (gram[(i, i)].re, gram[(j, j)].re);
            cs &= gram[(i, j)].norm_sqr() <= kii * kjj + 1e-10 * (1.0 + kii) * (1.0 + kjj);
        }
    }
    let trace: f64 = (0..m).map(|i| gram[(i, i)].re).sum();
    let herm = (&gram + gram.adjoint()) * c(0.5, 0.0);
    let min_eig = SymmetricEigen::new(herm).eigenvalues.min();
    let psd = min_eig >= -1e-10 * trace;

    // trace linearity under χ ↦ 2χ
    let doubled = fam2.with_chi(&chi().scaled(2.0)?);
    let linear = LADDER
        .iter()
        .all(|&k| doubled.trace(k).unwrap() == 2.0 * fam2.trace(k).unwrap());

    let ok = truncation && worst_rot <= 1e-12 && cs && psd && linear;
    Ok((
        ok,
        format!(
            "truncation {truncation}, rotation dev {worst_rot:.1e}, Cauchy-Schwarz {cs}, min eig/trace {:.1e}, 2x trace exact {linear}",
            min_eig / trace
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<(bool, String)>); 8] = [
        ("leading-order ratio", leading_order),
        ("growth orders", growth_orders),
        ("interior decay", interior_decay),
        ("off-diagonal decay", offdiagonal_decay),
        ("trace bounds", traces),
        ("weighted generator", weighted_generator),
        ("oracle equivalences", oracles),
        ("exactness and structure", structure),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
