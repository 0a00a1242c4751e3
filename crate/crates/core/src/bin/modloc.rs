use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use modloc::harness::{self, check_catalog, Experiment, ExperimentConfig, RunManifest};
use modloc::{ModlocError, Result};

/// Run a named modular-localization experiment and write a JSON manifest plus CSV tables.
#[derive(Debug, Parser)]
#[command(name = "modloc", version)]
struct Cli {
    /// lattice-verify, little-group, induce, localize, huygens, fock-verify or counterexample
    #[arg(value_parser = parse_experiment)]
    experiment: Option<Experiment>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size (refinement experiments also run at twice this size)
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated kappa values
    #[arg(long)]
    kappa: Option<String>,
    /// Number of wedges around the double cone
    #[arg(long)]
    wedges: Option<usize>,
    /// One-particle dimension for the finite-dimensional suites
    #[arg(long)]
    dim: Option<usize>,
    /// Number of seeded subspaces or families
    #[arg(long)]
    families: Option<usize>,
    /// Identity tolerance override
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON configuration file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-run a stored manifest and compare
    #[arg(long, conflicts_with = "experiment")]
    replay: Option<PathBuf>,
    /// List the checks (of one experiment, if given)
    #[arg(long)]
    list: bool,
}

fn parse_experiment(s: &str) -> std::result::Result<Experiment, String> {
    s.parse().map_err(|e: ModlocError| e.to_string())
}

fn parse_kappa(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| ModlocError::ConfigInvalid(format!("bad kappa value '{t}'"))))
        .collect()
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => ExperimentConfig::new(cli.experiment.ok_or_else(|| ModlocError::ConfigInvalid("no experiment given".into()))?),
    };
    if let Some(e) = cli.experiment {
        cfg.experiment = e;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(k) = &cli.kappa {
        cfg.kappa = Some(parse_kappa(k)?);
    }
    cfg.grid = cli.grid.or(cfg.grid);
    cfg.wedges = cli.wedges.or(cfg.wedges);
    cfg.dim = cli.dim.or(cfg.dim);
    cfg.families = cli.families.or(cfg.families);
    cfg.tol = cli.tol.or(cfg.tol);
    cfg.out = cli.out.clone().or(cfg.out);
    cfg.validate()?;
    Ok(cfg)
}

fn print_manifest(m: &RunManifest) {
    for c in &m.checks {
        println!("{} {:<32} {:>12.4e}  {:<28} {:>8.2}s", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.rule, c.runtime_s);
    }
    println!("config {}  digest {}  {:.1}s", &m.config_hash[..12], &m.digest()[..12], m.runtime_s);
}

fn init_threads() {
    if let Some(n) = std::env::var("MODLOC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.list {
        for e in check_catalog().iter().filter(|e| cli.experiment.is_none_or(|x| x == e.experiment)) {
            println!("{:<16} {:<30} {}", e.experiment.name(), e.check, e.description);
        }
        return Ok(());
    }
    if let Some(path) = &cli.replay {
        let stored = RunManifest::read(path)?;
        let r = harness::replay(&stored)?;
        if let Some(w) = &r.version_warning {
            eprintln!("warning: {w}");
            for d in &r.differences {
                eprintln!("  {d}");
            }
        }
        print_manifest(&r.manifest);
        println!("replay digest {} (stored {})", &r.manifest.digest()[..12], &stored.digest()[..12]);
        return r.manifest.ensure_passed();
    }
    let cfg = build_config(cli)?;
    let m = harness::run(&cfg)?;
    print_manifest(&m);
    if let Some(dir) = &cfg.out {
        println!("manifest written to {}", dir.join("manifest.json").display());
    }
    m.ensure_passed()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ ModlocError::CheckFailed(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
