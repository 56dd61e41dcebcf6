//! Run configuration, read from TOML.
//!
//! ```toml
//! name = "as-independent-p2"
//! prime = 2
//! backend = "equal-char"        # or "mixed-char"
//! case = "artin_schreier"       # or "kummer"
//! a = "t^(-1)"                  # g defaults to x^p - x - a (AS) or x^p - a (Kummer)
//! # g = "x^2 + x + t^(-1)"
//! # eta = "geom(0, 2, 1)"       # a root of g for the root-eval oracle
//! # oracle = "shortcut"
//!
//! [budget]
//! series = 64
//!
//! [[stage]]
//! degree = 1
//! generator = "as_stepper"
//! steps = 12
//!
//! [output]
//! rho = 2
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coeffs::PrimeChar;
use crate::error::{Error, Result};
use crate::plateau::{AnalysisOptions, StageSpec};
use crate::series::DEFAULT_BUDGET;
use crate::valuation::Case;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    #[serde(rename = "equal-char")]
    EqualChar,
    #[serde(rename = "mixed-char")]
    MixedChar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    RootEval,
    Shortcut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_series_budget")]
    pub series: usize,
    #[serde(default = "default_verify_budget")]
    pub verify: usize,
}

fn default_series_budget() -> usize {
    DEFAULT_BUDGET
}

fn default_verify_budget() -> usize {
    8
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { series: DEFAULT_BUDGET, verify: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_refinements")]
    pub verify_refinements: usize,
}

fn default_window() -> usize {
    3
}

fn default_refinements() -> usize {
    3
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { window: 3, verify_refinements: 3 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub rho: Option<usize>,
    pub pixels_per_unit: Option<u32>,
}

/// `f` and `Q` for the `expand` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandSection {
    pub f: String,
    pub q: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    pub prime: u64,
    pub backend: BackendKind,
    pub case: Option<Case>,
    pub a: Option<String>,
    pub g: Option<String>,
    pub eta: Option<String>,
    pub oracle: Option<OracleKind>,
    #[serde(default)]
    pub budget: Budgets,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default, rename = "stage")]
    pub stages: Vec<StageSpec>,
    #[serde(default)]
    pub output: OutputSection,
    pub cache: Option<PathBuf>,
    pub expand: Option<ExpandSection>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::from_toml(&text)?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.prime_char()?;
        if self.backend == BackendKind::EqualChar && p.get() > i64::MAX as u64 {
            return Err(Error::Backend(format!("p = {p} is too large for the prime-field backend")));
        }
        if self.g.is_none() && (self.case.is_none() || self.a.is_none()) {
            return Err(Error::Config("give either `g` or both `case` and `a`".into()));
        }
        if self.oracle == Some(OracleKind::Shortcut) && self.case.is_none() {
            return Err(Error::Config("the shortcut oracle needs `case`".into()));
        }
        if self.case == Some(Case::Kummer) && self.backend == BackendKind::EqualChar {
            return Err(Error::Backend("the Kummer case needs the mixed-char backend".into()));
        }
        if self.analysis.window == 0 {
            return Err(Error::Config("analysis.window must be positive".into()));
        }
        Ok(())
    }

    pub fn prime_char(&self) -> Result<PrimeChar> {
        PrimeChar::new(self.prime)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("run")
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            window: self.analysis.window,
            verify_refinements: self.analysis.verify_refinements,
            verify_budget: self.budget.verify,
        }
    }

    /// Hash of everything that determines the family values. Step counts and
    /// output locations are left out so a deeper run can resume a shallower
    /// one.
    pub fn input_hash(&self) -> String {
        let mut c = self.clone();
        c.name = None;
        c.output = OutputSection::default();
        c.cache = None;
        c.expand = None;
        for s in &mut c.stages {
            s.steps = 0;
        }
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
