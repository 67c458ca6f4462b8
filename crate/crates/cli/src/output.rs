use std::fs;
use std::path::Path;

use serde::Serialize;
use toeplitz_core::asymptotics::{AsymptoticsReport, Verdict};
use toeplitz_core::kernels::ScanTable;

use crate::config::{Budgets, LoadedConfig, RunConfig};
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct RunProvenance {
    pub config_file: String,
    pub config_sha256: String,
    pub seed: u64,
    pub budgets: Budgets,
    pub backend: &'static str,
    pub jobs: usize,
}

impl RunProvenance {
    pub fn new(loaded: &LoadedConfig, seed: u64, jobs: usize) -> Self {
        RunProvenance {
            config_file: loaded
                .path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            config_sha256: loaded.sha256.clone(),
            seed,
            budgets: loaded.config.budgets.clone(),
            backend: toeplitz_core::exec::backend(),
            jobs,
        }
    }
}

#[derive(Serialize)]
struct Inputs<'a> {
    domain: &'a crate::config::DomainConfig,
    weights: &'a [f64],
    chi: &'a crate::config::ChiConfig,
    k_ladder: &'a [f64],
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    claim: &'a str,
    verdict: Verdict,
    provenance: &'a RunProvenance,
    inputs: Inputs<'a>,
    report: &'a AsymptoticsReport,
}

pub fn write_report(dir: &Path, cfg: &RunConfig, prov: &RunProvenance, report: &AsymptoticsReport) -> Result<(), CliError> {
    let doc = ReportDocument {
        claim: &report.claim,
        verdict: report.verdict,
        provenance: prov,
        inputs: Inputs {
            domain: &cfg.domain,
            weights: &cfg.generator.weights,
            chi: &cfg.chi,
            k_ladder: &cfg.k_ladder,
        },
        report,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(dir.join(format!("report_{}.json", report.claim)), text)?;
    Ok(())
}

pub fn write_summary(dir: &Path, prov: &RunProvenance, reports: &[AsymptoticsReport]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(|e| CliError::Io(e.to_string()))?;
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["claim", "check", "observed", "rule", "passed", "config_sha256", "seed"]).map_err(io)?;
    for r in reports {
        for c in &r.checks {
            w.write_record([
                r.claim.as_str(),
                c.name.as_str(),
                &format!("{:.17e}", c.observed),
                c.rule.as_str(),
                if c.passed { "true" } else { "false" },
                prov.config_sha256.as_str(),
                &prov.seed.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `scan_<kind>_<point>.csv` and `scan_<kind>_<point>.dat` for every point of `table`.
pub fn write_scan(dir: &Path, table: &ScanTable) -> Result<Vec<String>, CliError> {
    let kind = table.kind.name();
    let mut written = Vec::new();
    for id in table.point_ids() {
        let stem = format!("scan_{kind}_{id}");
        let csv = fs::File::create(dir.join(format!("{stem}.csv")))?;
        table.write_point_csv(id, csv)?;
        let dat = fs::File::create(dir.join(format!("{stem}.dat")))?;
        table.write_plot_data(id, std::io::BufWriter::new(dat))?;
        written.push(stem);
    }
    Ok(written)
}
