use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toeplitz_core::domains::{DomainSpec, DEFAULT_INDEX_BUDGET};
use toeplitz_core::spectral::{ChiProfile, ProjectorFamily, RotationGenerator};
use toeplitz_core::Complex64;

use crate::error::CliError;

pub const SUITES: [&str; 6] = ["leading", "trace", "interior", "offdiag", "boundary", "oracles"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub generator: GeneratorConfig,
    pub chi: ChiConfig,
    pub k_ladder: Vec<f64>,
    #[serde(default)]
    pub points: Vec<PointConfig>,
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
    #[serde(default = "all_suites")]
    pub suites: Vec<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub interior: InteriorConfig,
    #[serde(default)]
    pub oracles: OracleConfig,
    #[serde(default)]
    pub norms: NormsConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum DomainConfig {
    Ball { n: usize },
    Ellipsoid { a: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiConfig {
    pub center: f64,
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Required for a negative amplitude.
    #[serde(default)]
    pub allow_signed: bool,
}

/// A named point given as `[re, im]` pairs per coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub name: String,
    pub z: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub name: String,
    pub z: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
}

/// Random boundary points added to the named ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub boundary_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    pub max_indices: usize,
    pub max_quadrature_nodes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_indices: DEFAULT_INDEX_BUDGET,
            max_quadrature_nodes: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub leading: f64,
    /// Leading-ratio tolerance for weighted generators and non-ball domains.
    pub leading_weighted: f64,
    pub order: f64,
    pub slope: f64,
    pub trace_band: f64,
    pub boundary_trace: f64,
    pub weighted_boundary_trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            leading: 0.03,
            leading_weighted: 0.10,
            order: 0.05,
            slope: 0.10,
            trace_band: 4.0,
            boundary_trace: 0.05,
            weighted_boundary_trace: 0.10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteriorConfig {
    /// Interior points are `scale · x` for every boundary point `x`.
    pub scale: f64,
    pub k_ladder: Vec<f64>,
    pub decay_orders: Vec<u32>,
    /// Depth for the damping-ratio test; skipped when absent.
    pub damping_depth: Option<f64>,
}

impl Default for InteriorConfig {
    fn default() -> Self {
        InteriorConfig {
            scale: 0.9,
            k_ladder: vec![100.0, 200.0, 400.0],
            decay_orders: vec![8],
            damping_depth: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub mc_indices: usize,
    pub mc_samples: usize,
    pub mc_max_exponent: u32,
    pub mc_z_score: f64,
    pub hs_matrices: usize,
    pub hs_size: usize,
    pub hs_spectrum: [f64; 2],
    pub hs_k: f64,
    pub hs_tol: f64,
    pub galerkin_degree: u32,
    /// CSV table written by `norms`, checked entry by entry against the closed form.
    pub norm_table: Option<PathBuf>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mc_indices: 50,
            mc_samples: 100_000,
            mc_max_exponent: 3,
            mc_z_score: 4.0,
            hs_matrices: 3,
            hs_size: 50,
            hs_spectrum: [0.0, 30.0],
            hs_k: 10.0,
            hs_tol: 1e-6,
            galerkin_degree: 8,
            norm_table: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub cutoff: u32,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig { cutoff: 50 }
    }
}

fn one() -> f64 {
    1.0
}

fn all_suites() -> Vec<String> {
    SUITES.iter().map(|s| s.to_string()).collect()
}

/// A parsed config together with the digest of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub path: PathBuf,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        let sha256 = hex(&Sha256::digest(text.as_bytes()));
        Ok(LoadedConfig {
            config,
            path: path.to_path_buf(),
            sha256,
        })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn complex(z: &[[f64; 2]]) -> Vec<Complex64> {
    z.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let domain = self.domain_spec()?;
        let n = domain.n();
        self.generator_spec()?;
        if self.generator.weights.len() != n {
            return bad(format!(
                "generator has {} weights, domain dimension is {n}",
                self.generator.weights.len()
            ));
        }
        self.chi_profile()?;
        check_ladder("k_ladder", &self.k_ladder)?;
        if self.budgets.max_indices == 0 || self.budgets.max_quadrature_nodes == 0 {
            return bad("budgets must be positive".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return bad(format!("unknown suite '{s}', expected one of {SUITES:?}"));
            }
            if !seen.insert(s) {
                return bad(format!("suite '{s}' listed twice"));
            }
        }
        let mut names = BTreeSet::new();
        for p in &self.points {
            if p.z.len() != n {
                return bad(format!("point '{}' has {} coordinates, expected {n}", p.name, p.z.len()));
            }
            check_name(&p.name)?;
            if !names.insert(&p.name) {
                return bad(format!("point name '{}' is not unique", p.name));
            }
            let q = domain.quadratic_form(&complex(&p.z));
            if (q - 1.0).abs() > 1e-8 {
                return bad(format!("point '{}' is not on the boundary (quadratic form {q})", p.name));
            }
        }
        for p in &self.pairs {
            check_name(&p.name)?;
            if p.z.len() != n || p.w.len() != n {
                return bad(format!("pair '{}' must have {n} coordinates per point", p.name));
            }
            if !names.insert(&p.name) {
                return bad(format!("name '{}' is not unique", p.name));
            }
        }
        if self.points.is_empty() && self.sampler.is_none() {
            return bad("at least one boundary point or a sampler is required".into());
        }
        let i = &self.interior;
        if !(i.scale > 0.0 && i.scale < 1.0) {
            return bad(format!("interior.scale must lie in (0, 1), got {}", i.scale));
        }
        check_ladder("interior.k_ladder", &i.k_ladder)?;
        let o = &self.oracles;
        if o.hs_size == 0 || o.hs_size > 200 {
            return bad(format!("oracles.hs_size must lie in 1..=200, got {}", o.hs_size));
        }
        if !(o.hs_spectrum[0] < o.hs_spectrum[1]) {
            return bad("oracles.hs_spectrum must be an increasing pair".into());
        }
        if !(o.hs_k > 0.0) {
            return bad("oracles.hs_k must be positive".into());
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec, CliError> {
        match &self.domain {
            DomainConfig::Ball { n } if *n >= 1 => Ok(DomainSpec::ball(*n)),
            DomainConfig::Ball { n } => Err(CliError::Config(format!("ball dimension must be >= 1, got {n}"))),
            DomainConfig::Ellipsoid { a } => DomainSpec::ellipsoid(a.clone()).map_err(CliError::config),
        }
    }

    pub fn generator_spec(&self) -> Result<RotationGenerator, CliError> {
        RotationGenerator::new(self.generator.weights.clone()).map_err(CliError::config)
    }

    pub fn chi_profile(&self) -> Result<ChiProfile, CliError> {
        let c = &self.chi;
        if c.amplitude < 0.0 && !c.allow_signed {
            return Err(CliError::Config("negative chi amplitude requires chi.allow_signed = true".into()));
        }
        if c.amplitude == 1.0 {
            ChiProfile::new(c.center, c.radius).map_err(CliError::config)
        } else {
            ChiProfile::signed(c.center, c.radius, c.amplitude).map_err(CliError::config)
        }
    }

    pub fn interior_family(&self) -> Result<ProjectorFamily, CliError> {
        Ok(
            ProjectorFamily::interior(&self.domain_spec()?, &self.generator_spec()?, &self.chi_profile()?)
                .map_err(CliError::config)?
                .with_budget(self.budgets.max_indices),
        )
    }

    /// The Szegő family lives on the unit sphere, so it exists only for ball domains.
    pub fn boundary_family(&self) -> Result<Option<ProjectorFamily>, CliError> {
        let domain = self.domain_spec()?;
        if !domain.is_ball() {
            return Ok(None);
        }
        Ok(Some(
            ProjectorFamily::boundary(domain.n(), &self.generator_spec()?, &self.chi_profile()?)
                .map_err(CliError::config)?
                .with_budget(self.budgets.max_indices),
        ))
    }

    pub fn named_points(&self) -> Vec<(String, Vec<Complex64>)> {
        self.points.iter().map(|p| (p.name.clone(), complex(&p.z))).collect()
    }

    pub fn named_pairs(&self) -> Vec<(String, Vec<Complex64>, Vec<Complex64>)> {
        self.pairs
            .iter()
            .map(|p| (p.name.clone(), complex(&p.z), complex(&p.w)))
            .collect()
    }
}

fn check_ladder(name: &str, ladder: &[f64]) -> Result<(), CliError> {
    if ladder.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    if ladder.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
        return Err(CliError::Config(format!("{name} entries must be positive")));
    }
    if ladder.windows(2).any(|p| p[1] <= p[0]) {
        return Err(CliError::Config(format!("{name} must be strictly ascending, got {ladder:?}")));
    }
    Ok(())
}

fn check_name(name: &str) -> Result<(), CliError> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(CliError::Config(format!(
            "name '{name}' must be nonempty and use only [A-Za-z0-9_-]"
        )));
    }
    Ok(())
}
