use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toeplitz_core::asymptotics::{
    boundary_trace_test, growth_order_test, interior_damping_test, interior_decay_test,
    leading_ratio_test, offdiagonal_decay_test, trace_scan, AsymptoticsReport,
};
use toeplitz_core::domains::{
    log_monomial_norm_sq, monomial_norm_sq, monomial_norm_sq_oracle, DomainSpec, MultiIndex, NormTable,
};
use toeplitz_core::spectral::{
    chi_by_eigendecomposition, galerkin_toeplitz_matrix, helffer_sjostrand_chi, random_hermitian,
    toeplitz_eigenvalue, QuadratureSpec,
};
use toeplitz_core::Complex64;

use crate::config::RunConfig;
use crate::error::CliError;

type Point = (String, Vec<Complex64>);

/// Named boundary points followed by the sampled ones.
pub fn boundary_points(cfg: &RunConfig, seed: u64) -> Result<Vec<Point>, CliError> {
    let mut points = cfg.named_points();
    if let Some(s) = &cfg.sampler {
        let domain = cfg.domain_spec()?;
        points.extend(sample_boundary(&domain, s.boundary_points, seed)?);
    }
    Ok(points)
}

fn sample_boundary(domain: &DomainSpec, count: usize, seed: u64) -> Result<Vec<Point>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.n();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 0.01 {
            continue;
        }
        out.push((format!("sample{}", out.len()), domain.project_to_boundary(&z)?));
    }
    Ok(out)
}

pub fn interior_points(cfg: &RunConfig, boundary: &[Point]) -> Vec<Point> {
    let s = cfg.interior.scale;
    boundary
        .iter()
        .map(|(id, x)| (format!("{id}_interior"), x.iter().map(|c| c * s).collect()))
        .collect()
}

fn leading_tolerance(cfg: &RunConfig) -> Result<f64, CliError> {
    let unweighted_ball = cfg.domain_spec()?.is_ball() && cfg.generator_spec()?.is_uniform();
    Ok(if unweighted_ball {
        cfg.tolerances.leading
    } else {
        cfg.tolerances.leading_weighted
    })
}

pub fn run_suite(name: &str, cfg: &RunConfig, seed: u64) -> Result<AsymptoticsReport, CliError> {
    match name {
        "leading" => leading(cfg, seed),
        "trace" => trace(cfg),
        "interior" => interior(cfg, seed),
        "offdiag" => offdiag(cfg),
        "boundary" => boundary(cfg, seed),
        "oracles" => oracles(cfg, seed),
        other => Err(CliError::Config(format!("unknown suite '{other}'"))),
    }
}

fn leading(cfg: &RunConfig, seed: u64) -> Result<AsymptoticsReport, CliError> {
    let family = cfg.interior_family()?;
    let points = boundary_points(cfg, seed)?;
    let tol = leading_tolerance(cfg)?;
    let mut report = AsymptoticsReport::new("leading", &cfg.k_ladder);
    for (id, x) in &points {
        report.absorb(&format!("{id}:"), leading_ratio_test(&family, x, &cfg.k_ladder, tol)?);
    }
    let order = family.n() as f64 + 1.0;
    let growth = growth_order_test(&family, &points, &cfg.k_ladder, order, cfg.tolerances.order)?;
    report.absorb("growth:", growth);
    Ok(report)
}

fn trace(cfg: &RunConfig) -> Result<AsymptoticsReport, CliError> {
    let family = cfg.interior_family()?;
    let mut report = trace_scan(&family, &cfg.k_ladder, cfg.tolerances.order)?;
    let band = report.checks[0].observed;
    let limit = cfg.tolerances.trace_band;
    report.check("band_factor", band, format!("max/min of Tr/k^n <= {limit}"), band <= limit);
    Ok(report)
}

fn interior(cfg: &RunConfig, seed: u64) -> Result<AsymptoticsReport, CliError> {
    let family = cfg.interior_family()?;
    let boundary = boundary_points(cfg, seed)?;
    let i = &cfg.interior;
    let mut report = AsymptoticsReport::new("interior", &i.k_ladder);
    for (id, z) in interior_points(cfg, &boundary) {
        let r = interior_decay_test(&family, &z, &i.k_ladder, &i.decay_orders, cfg.tolerances.slope)?;
        report.absorb(&format!("{id}:"), r);
    }
    if let Some(depth) = i.damping_depth {
        for (id, x) in &boundary {
            let r = interior_damping_test(&family, x, depth, &i.k_ladder, cfg.tolerances.slope)?;
            report.absorb(&format!("{id}:damping:"), r);
        }
    }
    Ok(report)
}

fn offdiag(cfg: &RunConfig) -> Result<AsymptoticsReport, CliError> {
    let pairs = cfg.named_pairs();
    if pairs.is_empty() {
        return Err(CliError::Config("the offdiag suite needs at least one [[pairs]] entry".into()));
    }
    let family = cfg.interior_family()?;
    Ok(offdiagonal_decay_test(&family, &pairs, &cfg.k_ladder, &[4, 6, 8])?)
}

fn boundary(cfg: &RunConfig, seed: u64) -> Result<AsymptoticsReport, CliError> {
    let family = cfg
        .boundary_family()?
        .ok_or_else(|| CliError::Config("the boundary suite is defined for ball domains only".into()))?;
    let g = cfg.generator_spec()?;
    let tol = if g.is_uniform() {
        cfg.tolerances.boundary_trace
    } else {
        cfg.tolerances.weighted_boundary_trace
    };
    let mut report = boundary_trace_test(family.n(), &g, family.chi(), &cfg.k_ladder, tol)?;
    let points = boundary_points(cfg, seed)?;
    let order = family.n() as f64;
    report.absorb("szego_growth:", growth_order_test(&family, &points, &cfg.k_ladder, order, cfg.tolerances.order)?);
    Ok(report)
}

fn oracles(cfg: &RunConfig, seed: u64) -> Result<AsymptoticsReport, CliError> {
    let o = &cfg.oracles;
    let domain = cfg.domain_spec()?;
    let g = cfg.generator_spec()?;
    let chi = cfg.chi_profile()?;
    let mut report = AsymptoticsReport::new("oracles", &[]);
    let n = domain.n();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z_scores = Vec::with_capacity(o.mc_indices);
    for i in 0..o.mc_indices {
        let alpha = MultiIndex::new((0..n).map(|_| rng.random_range(0..=o.mc_max_exponent)).collect());
        let mc_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let mc = monomial_norm_sq_oracle(&domain, &alpha, o.mc_samples, mc_seed)?;
        z_scores.push(mc.z_score(monomial_norm_sq(&domain, &alpha)?));
        report.provenance.seeds.push(mc_seed);
    }
    let worst_z = z_scores.iter().copied().fold(0.0, f64::max);
    report.empirical("mc_z_scores", z_scores);
    report.check("mc_norms", worst_z, format!("max z-score <= {}", o.mc_z_score), worst_z <= o.mc_z_score);

    let mut hs_errors = Vec::with_capacity(o.hs_matrices);
    for i in 0..o.hs_matrices {
        let hs_seed = seed.wrapping_add(10_000 + i as u64);
        let a = random_hermitian(o.hs_size, o.hs_spectrum[0], o.hs_spectrum[1], hs_seed);
        let hs = helffer_sjostrand_chi(&a, &chi, o.hs_k)?;
        let ev = chi_by_eigendecomposition(&a, &chi, o.hs_k)?;
        hs_errors.push((hs - ev).norm());
        report.provenance.seeds.push(hs_seed);
    }
    let worst_hs = hs_errors.iter().copied().fold(0.0, f64::max);
    report.empirical("hs_frobenius_errors", hs_errors);
    report.check("helffer_sjostrand", worst_hs, format!("Frobenius error <= {:e}", o.hs_tol), worst_hs <= o.hs_tol);

    let d = o.galerkin_degree;
    let spec = QuadratureSpec {
        max_nodes: cfg.budgets.max_quadrature_nodes,
        ..QuadratureSpec::for_degree(d)
    };
    let m = galerkin_toeplitz_matrix(&domain, &g, d, &spec)?;
    let off = m.max_off_diagonal();
    let herm = m.hermiticity_defect();
    let mut rel: f64 = 0.0;
    let mut abs: f64 = 0.0;
    for (i, a) in m.indices.iter().enumerate() {
        let exact = toeplitz_eigenvalue(&g, a);
        let dev = (m.matrix[(i, i)] - Complex64::new(exact, 0.0)).norm();
        abs = abs.max(dev);
        if exact > 0.0 {
            rel = rel.max(dev / exact);
        }
    }
    report.predicted("galerkin_degree", d as f64);
    report.check("galerkin_off_diagonal", off, "max |M_ab| (a != b) <= 1e-8", off <= 1e-8);
    report.check("galerkin_hermiticity", herm, "max |M - M*| <= 1e-10", herm <= 1e-10);
    report.check("galerkin_diagonal_relative", rel, "max |M_aa / <lambda,a> - 1| <= 0.01", rel <= 0.01);
    report.check("galerkin_diagonal_absolute", abs, "max |M_aa - <lambda,a>| <= 1e-6", abs <= 1e-6);

    if let Some(path) = &o.norm_table {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Config(format!("cannot open norm table {}: {e}", path.display())))?;
        let table = NormTable::read_csv(&domain, file)?;
        let mut worst: f64 = 0.0;
        for (alpha, log) in table.entries() {
            let exact = log_monomial_norm_sq(&domain, alpha)?;
            worst = worst.max((log - exact).abs() / exact.abs().max(1.0));
        }
        report.predicted("norm_table_entries", table.len() as f64);
        report.check("norm_table", worst, "max relative deviation of ln-norms <= 1e-12", worst <= 1e-12);
    }
    Ok(report)
}
