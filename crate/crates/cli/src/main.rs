mod config;
mod error;
mod output;
mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use toeplitz_core::asymptotics::{AsymptoticsReport, Verdict};
use toeplitz_core::domains::NormTable;
use toeplitz_core::kernels::{diagonal_scan, offdiagonal_scan};

use config::LoadedConfig;
use error::CliError;
use output::RunProvenance;

/// Verification harness for Toeplitz spectral projectors on pseudoconvex domains.
#[derive(Debug, Parser)]
#[command(name = "toeplitz-lab", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "configs/ball-n2-default.toml")]
    config: PathBuf,

    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (only with the `parallel` feature).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every suite listed in the config.
    Verify,
    /// Tabulate kernel values over the k-ladder.
    Scan {
        #[arg(long, value_enum, default_value_t = ScanArg::Diagonal)]
        kind: ScanArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::Interior)]
        family: FamilyArg,
    },
    /// Run the independent oracle checks only.
    Oracles,
    /// Write the monomial norm table up to the configured cutoff.
    Norms,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanArg {
    Diagonal,
    Offdiagonal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Interior,
    Boundary,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("toeplitz-lab: {e}");
            e.exit_code()
        }
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<usize, CliError> {
    match jobs {
        Some(0) => Err(CliError::Config("--jobs must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(j) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(j)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(1),
        None => Ok(toeplitz_core::exec::threads()),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let jobs = configure_jobs(cli.jobs)?;
    let loaded = LoadedConfig::load(&cli.config)?;
    let cfg = &loaded.config;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    let prov = RunProvenance::new(&loaded, seed, jobs);

    match &cli.command {
        Command::Verify => {
            let reports = cfg
                .suites
                .iter()
                .map(|s| suites::run_suite(s, cfg, seed))
                .collect::<Result<Vec<_>, _>>()?;
            finish(&out, cfg, &prov, &reports)
        }
        Command::Oracles => {
            let report = suites::run_suite("oracles", cfg, seed)?;
            finish(&out, cfg, &prov, &[report])
        }
        Command::Scan { kind, family } => {
            let family = match family {
                FamilyArg::Interior => cfg.interior_family()?,
                FamilyArg::Boundary => cfg
                    .boundary_family()?
                    .ok_or_else(|| CliError::Config("the boundary family is defined for ball domains only".into()))?,
            };
            let table = match kind {
                ScanArg::Diagonal => diagonal_scan(&family, &suites::boundary_points(cfg, seed)?, &cfg.k_ladder)?,
                ScanArg::Offdiagonal => {
                    let pairs = cfg.named_pairs();
                    if pairs.is_empty() {
                        return Err(CliError::Config("an off-diagonal scan needs [[pairs]]".into()));
                    }
                    offdiagonal_scan(&family, &pairs, &cfg.k_ladder)?
                }
            };
            for stem in output::write_scan(&out, &table)? {
                println!("wrote {stem}.csv");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Norms => {
            let table = NormTable::build(&cfg.domain_spec()?, cfg.norms.cutoff, cfg.budgets.max_indices)?;
            let path = out.join("norms.csv");
            table.write_csv(fs::File::create(&path)?)?;
            println!("wrote {} entries to {}", table.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn finish(
    out: &Path,
    cfg: &config::RunConfig,
    prov: &RunProvenance,
    reports: &[AsymptoticsReport],
) -> Result<ExitCode, CliError> {
    for r in reports {
        output::write_report(out, cfg, prov, r)?;
        let failed = r.checks.iter().filter(|c| !c.passed).count();
        println!(
            "{:<10} {:<4} {} checks, {} failed",
            r.claim,
            if r.verdict == Verdict::Pass { "PASS" } else { "FAIL" },
            r.checks.len(),
            failed
        );
    }
    output::write_summary(out, prov, reports)?;
    if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
