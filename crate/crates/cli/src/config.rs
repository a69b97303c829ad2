//! Run configuration, read from TOML.
//!
//! ```toml
//! output_dir = "out"
//! format = "json"            # or "csv"
//! e0_mode = "outer"          # "outer", "h0", "total", or a number in Hartree
//!
//! [grid]
//! p_max_times_z = 20.0
//! n = 200
//!
//! [tolerances]
//! quadrature = 1e-10
//! bc_energy = 1e-10
//! optimizer_zeta = 1e-5
//! ```
//!
//! Every key is optional.

use std::path::{Path, PathBuf};

use corrfn::surface_integrals::E0Mode;
use corrfn::variational::PipelineConfig;
use corrfn::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub p_max_times_z: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { p_max_times_z: 20.0, n: 200 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quadrature: f64,
    pub bc_energy: f64,
    pub optimizer_zeta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-10,
            bc_energy: 1e-10,
            optimizer_zeta: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum E0Setting {
    Named(String),
    Value(f64),
}

impl Default for E0Setting {
    fn default() -> Self {
        E0Setting::Named("outer".into())
    }
}

impl E0Setting {
    fn mode(&self) -> Result<E0Mode> {
        match self {
            E0Setting::Value(v) if v.is_finite() => Ok(E0Mode::Override(*v)),
            E0Setting::Named(s) if s == "outer" => Ok(E0Mode::OuterLocalEnergy),
            E0Setting::Named(s) if s == "total" => Ok(E0Mode::TotalExpectation),
            E0Setting::Named(s) if s == "h0" => Ok(E0Mode::H0Expectation),
            other => Err(Error::InvalidSpec(format!(
                "e0_mode must be \"outer\", \"h0\", \"total\" or a finite number, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub e0_mode: E0Setting,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            e0_mode: E0Setting::default(),
            output_dir: PathBuf::from("out"),
            format: Format::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                Self::parse(&text)?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidSpec(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.quadrature > 0.0 && t.bc_energy > 0.0 && t.optimizer_zeta > 0.0) {
            return Err(Error::InvalidSpec("tolerances must be positive".into()));
        }
        if self.grid.n < 50 {
            return Err(Error::InvalidSpec(format!("grid.n must be at least 50, got {}", self.grid.n)));
        }
        if !(self.grid.p_max_times_z > 0.0 && self.grid.p_max_times_z.is_finite()) {
            return Err(Error::InvalidSpec("grid.p_max_times_z must be positive".into()));
        }
        self.e0_mode.mode()?;
        Ok(())
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let mut p = PipelineConfig::default();
        p.p_max_times_z = self.grid.p_max_times_z;
        p.n = self.grid.n;
        p.coefficients.quadrature.tolerance = self.tolerances.quadrature;
        p.coefficients.e0 = self.e0_mode.mode()?;
        p.solver.bc_tolerance = self.tolerances.bc_energy;
        p.optimizer.zeta_tolerance = self.tolerances.optimizer_zeta;
        Ok(p)
    }
}
