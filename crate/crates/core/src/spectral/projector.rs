use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domains::{
    log_monomial_norm_sq, log_sphere_monomial_norm_sq, total_count, DomainSpec, LayerIter,
    MultiIndex, DEFAULT_INDEX_BUDGET,
};
use crate::exec;
use crate::spectral::{ChiProfile, RotationGenerator};
use crate::summation::pairwise_sum;
use crate::{Error, Result};

/// Which Hilbert space the projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorKind {
    /// `A²(M)`, holomorphic functions square-integrable on the domain.
    Bergman,
    /// `H²(∂B)`, boundary values of holomorphic functions on the unit sphere.
    Szego,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorRecord {
    pub alpha: MultiIndex,
    /// `⟨λ, α⟩`.
    pub eigenvalue: f64,
    /// `χ(⟨λ, α⟩ / k)`.
    pub weight: f64,
    pub log_norm_sq: f64,
}

/// `⟨λ, α⟩`, the eigenvalue of `T_R` on the monomial `z^α`.
pub fn toeplitz_eigenvalue(generator: &RotationGenerator, alpha: &MultiIndex) -> f64 {
    generator.pairing(alpha.alpha())
}

/// Smallest `D` such that every `α` with `χ(⟨λ,α⟩/k) ≠ 0` has `|α| ≤ D`.
pub fn exact_cutoff(chi: &ChiProfile, generator: &RotationGenerator, k: f64) -> u32 {
    let d = (k * chi.t_max() / generator.min_weight()).ceil();
    d.max(0.0) as u32
}

/// The data defining `χ_k(T_R)` for every `k`: domain, generator, profile and index budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    kind: ProjectorKind,
    domain: DomainSpec,
    generator: RotationGenerator,
    chi: ChiProfile,
    budget: usize,
}

impl ProjectorFamily {
    pub fn interior(
        domain: &DomainSpec,
        generator: &RotationGenerator,
        chi: &ChiProfile,
    ) -> Result<Self> {
        if generator.n() != domain.n() {
            return Err(Error::DimensionMismatch {
                expected: domain.n(),
                got: generator.n(),
            });
        }
        Ok(ProjectorFamily {
            kind: ProjectorKind::Bergman,
            domain: domain.clone(),
            generator: generator.clone(),
            chi: chi.clone(),
            budget: DEFAULT_INDEX_BUDGET,
        })
    }

    /// The family on `H²(S^{2n−1})`.
    pub fn boundary(n: usize, generator: &RotationGenerator, chi: &ChiProfile) -> Result<Self> {
        let mut f = Self::interior(&DomainSpec::ball(n), generator, chi)?;
        f.kind = ProjectorKind::Szego;
        Ok(f)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_chi(&self, chi: &ChiProfile) -> Self {
        ProjectorFamily {
            chi: chi.clone(),
            ..self.clone()
        }
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn generator(&self) -> &RotationGenerator {
        &self.generator
    }

    pub fn chi(&self) -> &ChiProfile {
        &self.chi
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn cutoff(&self, k: f64) -> u32 {
        exact_cutoff(&self.chi, &self.generator, k)
    }

    pub fn log_norm_sq(&self, alpha: &MultiIndex) -> Result<f64> {
        match self.kind {
            ProjectorKind::Bergman => log_monomial_norm_sq(&self.domain, alpha),
            ProjectorKind::Szego => log_sphere_monomial_norm_sq(self.n(), alpha),
        }
    }

    fn check_k(k: f64) -> Result<()> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
        }
        Ok(())
    }

    /// Whether some `α` of degree `d` can lie in the support of `χ_k`.
    fn layer_in_support(&self, k: f64, d: u32) -> bool {
        let lo = self.generator.min_weight() * d as f64;
        let hi = self.generator.max_weight() * d as f64;
        hi > k * self.chi.t_min() && lo < k * self.chi.t_max()
    }

    /// Nonzero records of degree `d`, restricted to indices vanishing outside `support`.
    pub fn layer_records(&self, k: f64, d: u32, support: Option<&[bool]>) -> Result<Vec<ProjectorRecord>> {
        if !self.layer_in_support(k, d) {
            return Ok(Vec::new());
        }
        let n = self.n();
        let active: Vec<usize> = match support {
            Some(s) => (0..n).filter(|&j| s[j]).collect(),
            None => (0..n).collect(),
        };
        if active.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for parts in LayerIter::new(active.len(), d) {
            let mut alpha = vec![0u32; n];
            for (&j, &p) in active.iter().zip(&parts) {
                alpha[j] = p;
            }
            let eigenvalue = self.generator.pairing(&alpha);
            let weight = self.chi.eval_scaled(eigenvalue, k);
            if weight == 0.0 {
                continue;
            }
            let alpha = MultiIndex::new(alpha);
            let log_norm_sq = self.log_norm_sq(&alpha)?;
            out.push(ProjectorRecord {
                alpha,
                eigenvalue,
                weight,
                log_norm_sq,
            });
        }
        Ok(out)
    }

    /// Materializes all indices with `|α| ≤ D` exactly, `D` the exact cutoff.
    pub fn build(&self, k: f64) -> Result<SpectralProjectorRep> {
        self.build_with_cutoff(k, self.cutoff(k))
    }

    /// Materializes with an explicit cutoff; a cutoff below the exact one truncates.
    pub fn build_with_cutoff(&self, k: f64, cutoff: u32) -> Result<SpectralProjectorRep> {
        Self::check_k(k)?;
        let count = total_count(self.n(), cutoff);
        if count > self.budget as u128 {
            return Err(Error::CapacityExceeded {
                count,
                budget: self.budget,
            });
        }
        let degrees: Vec<u32> = (0..=cutoff).collect();
        let layers = exec::try_map(&degrees, |&d| self.layer_records(k, d, None))?;
        Ok(SpectralProjectorRep {
            family: self.clone(),
            k,
            cutoff,
            records: layers.into_iter().flatten().collect(),
        })
    }

    /// `Tr χ_k(T_R) = Σ_α χ(⟨λ,α⟩/k)`, streamed over degree layers.
    pub fn trace(&self, k: f64) -> Result<f64> {
        Self::check_k(k)?;
        let cutoff = self.cutoff(k);
        let n = self.n();
        let degrees: Vec<u32> = (0..=cutoff).collect();
        let per_layer = if self.generator.is_uniform() {
            let l = self.generator.weights()[0];
            exec::map(&degrees, |&d| {
                let w = self.chi.eval_scaled(l * d as f64, k);
                if w == 0.0 {
                    0.0
                } else {
                    w * crate::domains::layer_count(n, d) as f64
                }
            })
        } else {
            exec::map(&degrees, |&d| {
                if !self.layer_in_support(k, d) {
                    return 0.0;
                }
                let terms: Vec<f64> = LayerIter::new(n, d)
                    .map(|a| self.chi.eval_scaled(self.generator.pairing(&a), k))
                    .collect();
                pairwise_sum(&terms)
            })
        };
        Ok(pairwise_sum(&per_layer))
    }
}

/// `χ_k(T_R)` as the list of monomials carrying nonzero weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjectorRep {
    family: ProjectorFamily,
    k: f64,
    cutoff: u32,
    records: Vec<ProjectorRecord>,
}

impl SpectralProjectorRep {
    pub fn family(&self) -> &ProjectorFamily {
        &self.family
    }

    pub fn kind(&self) -> ProjectorKind {
        self.family.kind
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn records(&self) -> &[ProjectorRecord] {
        &self.records
    }

    /// Number of monomials with nonzero weight.
    pub fn rank(&self) -> usize {
        self.records.len()
    }

    pub fn trace(&self) -> f64 {
        let w: Vec<f64> = self.records.iter().map(|r| r.weight).collect();
        pairwise_sum(&w)
    }

    /// Columns `alpha_1..alpha_n, pairing, weight, log_norm_sq`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.family.n();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|j| format!("alpha_{j}")).collect();
        header.extend(["pairing", "weight", "log_norm_sq"].map(String::from));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row: Vec<String> = r.alpha.alpha().iter().map(|a| a.to_string()).collect();
            row.push(format!("{:.17e}", r.eigenvalue));
            row.push(format!("{:.17e}", r.weight));
            row.push(format!("{:.17e}", r.log_norm_sq));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `χ_k(T_R)` on the Bergman space of `domain`.
pub fn build_projector(
    domain: &DomainSpec,
    generator: &RotationGenerator,
    chi: &ChiProfile,
    k: f64,
) -> Result<SpectralProjectorRep> {
    ProjectorFamily::interior(domain, generator, chi)?.build(k)
}

/// `χ_k(T_R)` on the Hardy space of the unit sphere in `ℂⁿ`.
pub fn build_boundary_projector(
    n: usize,
    generator: &RotationGenerator,
    chi: &ChiProfile,
    k: f64,
) -> Result<SpectralProjectorRep> {
    ProjectorFamily::boundary(n, generator, chi)?.build(k)
}
