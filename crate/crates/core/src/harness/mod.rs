//! Named, reproducible experiments: configuration, check records, manifests and replay.

mod experiments;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ModlocError, Result};

pub use experiments::{borchers_residual, check_catalog, huygens_report, induce_residuals, kernel_deviation, localize_net, CatalogEntry};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    LatticeVerify,
    LittleGroup,
    Induce,
    Localize,
    Huygens,
    FockVerify,
    Counterexample,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::LatticeVerify,
        Experiment::LittleGroup,
        Experiment::Induce,
        Experiment::Localize,
        Experiment::Huygens,
        Experiment::FockVerify,
        Experiment::Counterexample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::LatticeVerify => "lattice-verify",
            Experiment::LittleGroup => "little-group",
            Experiment::Induce => "induce",
            Experiment::Localize => "localize",
            Experiment::Huygens => "huygens",
            Experiment::FockVerify => "fock-verify",
            Experiment::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ModlocError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ModlocError::ConfigInvalid(format!("unknown experiment '{s}'")))
    }
}

/// Experiment configuration. Unset fields fall back to per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    /// Grid size; refinement experiments also run at twice this size.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub kappa: Option<Vec<f64>>,
    #[serde(default)]
    pub wedges: Option<usize>,
    /// Ambient (one-particle) dimension for the finite-dimensional suites.
    #[serde(default)]
    pub dim: Option<usize>,
    /// Number of seeded subspaces or families.
    #[serde(default)]
    pub families: Option<usize>,
    /// Override for the identity tolerance of the exact suites.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, seed: 0, grid: None, kappa: None, wedges: None, dim: None, families: None, tol: None, out: None }
    }

    /// Parse JSON, rejecting unknown keys, then validate.
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| ModlocError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(ModlocError::ConfigInvalid(m.to_string()));
        if let Some(k) = &self.kappa {
            if k.is_empty() {
                return bad("kappa list is empty");
            }
            if k.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad("kappa values must be finite and non-negative");
            }
        }
        if let Some(g) = self.grid {
            if g < 8 {
                return bad("grid must be at least 8");
            }
            if matches!(self.experiment, Experiment::Huygens) && !g.is_power_of_two() {
                return bad("huygens grid must be a power of two");
            }
        }
        if self.wedges == Some(0) {
            return bad("wedge family must be nonempty");
        }
        if let Some(d) = self.dim {
            let max = match self.experiment {
                Experiment::FockVerify => crate::fock::SECQUANT_MAX_MODES,
                _ => 6,
            };
            if d == 0 || d > max {
                return bad(&format!("dim must lie in 1..={max}"));
            }
        }
        if self.families == Some(0) {
            return bad("families must be positive");
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad("tol must be positive");
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding (output directory excluded).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        hex(&Sha256::digest(serde_json::to_vec(&c).expect("config serializes")))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One executed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Measured quantity (a deviation, or a ratio for refinement checks).
    pub value: f64,
    /// Human-readable acceptance rule, e.g. `< 1e-10` or `ratio >= 2`.
    pub rule: String,
    pub runtime_s: f64,
}

impl CheckResult {
    pub fn below(name: &str, value: f64, tol: f64) -> Self {
        Self { name: name.into(), passed: value.is_finite() && value < tol, value, rule: format!("< {tol:e}"), runtime_s: 0.0 }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value >= bound, value, rule: format!(">= {bound}"), runtime_s: 0.0 }
    }

    pub fn flag(name: &str, passed: bool, rule: &str) -> Self {
        Self { name: name.into(), passed, value: if passed { 1.0 } else { 0.0 }, rule: rule.into(), runtime_s: 0.0 }
    }
}

/// Named CSV table emitted next to the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub runtime_s: f64,
}

impl RunManifest {
    /// Hash over config, version and check outcomes (bit patterns of the values);
    /// runtimes are excluded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.config_hash.as_bytes());
        h.update(self.version.as_bytes());
        for c in &self.checks {
            h.update(c.name.as_bytes());
            h.update(c.value.to_bits().to_le_bytes());
            h.update([c.passed as u8]);
        }
        hex(&h.finalize())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let p = dir.join("manifest.json");
        std::fs::write(&p, serde_json::to_string_pretty(self)?)?;
        Ok(p)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// `CheckFailed` naming the failing checks, if any.
    pub fn ensure_passed(&self) -> Result<()> {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(ModlocError::CheckFailed(failed.join(", ")))
        }
    }
}

/// Execute the configured experiment; writes the manifest and tables when `out` is set.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let start = Instant::now();
    let (checks, tables) = experiments::dispatch(config)?;
    let mut seen = std::collections::HashSet::new();
    for c in &checks {
        assert!(seen.insert(c.name.clone()), "check '{}' recorded twice", c.name);
    }
    let manifest = RunManifest {
        config: config.clone(),
        config_hash: config.hash(),
        version: ARTIFACT_VERSION.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        runtime_s: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &config.out {
        manifest.write(dir)?;
        for t in &tables {
            std::fs::write(dir.join(&t.file), &t.csv)?;
        }
    }
    Ok(manifest)
}

/// Result of re-running a stored manifest.
#[derive(Debug, Clone)]
pub struct Replay {
    pub manifest: RunManifest,
    /// Set when the stored manifest was produced by another artifact version.
    pub version_warning: Option<String>,
    /// Checks whose value or outcome differ (only populated across versions).
    pub differences: Vec<String>,
}

pub fn replay(stored: &RunManifest) -> Result<Replay> {
    if stored.config.hash() != stored.config_hash {
        return Err(ModlocError::Mismatch("stored configuration does not match its hash".into()));
    }
    let mut cfg = stored.config.clone();
    cfg.out = None;
    let fresh = run(&cfg)?;
    let mut differences = Vec::new();
    let names = |m: &RunManifest| m.checks.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
    if names(stored) != names(&fresh) {
        differences.push("different set of checks".to_string());
    }
    for (a, b) in stored.checks.iter().zip(&fresh.checks) {
        if a.value.to_bits() != b.value.to_bits() || a.passed != b.passed {
            differences.push(format!("{}: {:e} -> {:e}", a.name, a.value, b.value));
        }
    }
    if stored.version != ARTIFACT_VERSION {
        let warning = format!("manifest from version {} replayed with {}", stored.version, ARTIFACT_VERSION);
        return Ok(Replay { manifest: fresh, version_warning: Some(warning), differences });
    }
    if !differences.is_empty() {
        return Err(ModlocError::Mismatch(differences.join("; ")));
    }
    Ok(Replay { manifest: fresh, version_warning: None, differences })
}
