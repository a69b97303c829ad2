//! Literature energies for heliumlike ions, bundled for reports and
//! comparisons. Nothing in the computation path reads these values.
//!
//! HF values are Clementi-Roetti ground-state energies, CI values are
//! configuration-interaction results (ground states from the MSU wavefunction
//! tables, triplets from Accad, Pekeris and Schiff). The `published_*`
//! columns are earlier correction-function results kept for regression
//! comparison.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variational::{IonState, OptimizationCase};

const TABLE: &str = include_str!("../data/table1_reference.csv");

pub const ION_LABELS: [&str; 10] = ["H-", "He", "Li+", "Be2+", "B3+", "C4+", "N5+", "O6+", "F7+", "Ne8+"];
const ELEMENTS: [&str; 10] = ["H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub z: u32,
    pub ion: String,
    pub state: String,
    pub hf: Option<f64>,
    pub ci: Option<f64>,
    pub published_fixed: Option<f64>,
    pub published_equal: Option<f64>,
    pub published_independent: Option<f64>,
}

impl ReferenceRow {
    pub fn published(&self, case: OptimizationCase) -> Option<f64> {
        match case {
            OptimizationCase::FixedZ => self.published_fixed,
            OptimizationCase::EqualOpt => self.published_equal,
            OptimizationCase::IndependentOpt => self.published_independent,
        }
    }
}

pub fn reference_rows() -> &'static [ReferenceRow] {
    static ROWS: OnceLock<Vec<ReferenceRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        csv::Reader::from_reader(TABLE.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<ReferenceRow>, _>>()
            .expect("bundled reference table is well-formed")
    })
}

pub fn reference(z: u32, state: IonState) -> Option<&'static ReferenceRow> {
    reference_rows()
        .iter()
        .find(|r| r.z == z && r.state == state.key())
}

/// Accepts element symbols (`He`), charged labels (`Be2+`, `H-`) or a bare
/// nuclear charge (`4`).
pub fn parse_ion(label: &str) -> Result<u32> {
    let trimmed = label.trim();
    if let Ok(z) = trimmed.parse::<u32>() {
        if (1..=10).contains(&z) {
            return Ok(z);
        }
    }
    let lower = trimmed.to_ascii_lowercase();
    for (i, (el, lab)) in ELEMENTS.iter().zip(ION_LABELS).enumerate() {
        if lower == el.to_ascii_lowercase() || lower == lab.to_ascii_lowercase() {
            return Ok(i as u32 + 1);
        }
    }
    Err(Error::Unsupported(format!(
        "unknown ion '{label}'; valid ions: {}",
        ION_LABELS.join(", ")
    )))
}

pub fn ion_label(z: u32) -> &'static str {
    ION_LABELS.get(z as usize - 1).copied().unwrap_or("?")
}
