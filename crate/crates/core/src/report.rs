//! Tabulated results with reference comparisons.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::reference::{ion_label, reference};
use crate::variational::{IonResult, IonState, OptimizationCase, ScanEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub z: u32,
    pub ion: String,
    pub state: IonState,
    pub case: OptimizationCase,
    pub zeta1: Option<f64>,
    pub zeta2: Option<f64>,
    pub energy: Option<f64>,
    pub evaluations: Option<usize>,
    pub e_hf_ref: Option<f64>,
    pub e_ci_ref: Option<f64>,
    pub delta_hf: Option<f64>,
    pub delta_ci: Option<f64>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn from_result(r: &IonResult) -> Self {
        Self::build(r.z, r.state, r.case, Some(r), None)
    }

    pub fn from_entry(e: &ScanEntry) -> Self {
        Self::build(e.z, e.state, e.case, e.result.as_ref(), e.error.clone())
    }

    fn build(
        z: u32,
        state: IonState,
        case: OptimizationCase,
        result: Option<&IonResult>,
        error: Option<String>,
    ) -> Self {
        let refs = reference(z, state);
        let hf = refs.and_then(|r| r.hf);
        let ci = refs.and_then(|r| r.ci);
        let energy = result.map(|r| r.energy);
        let delta = |x: Option<f64>| energy.zip(x).map(|(e, x)| e - x);
        Self {
            z,
            ion: ion_label(z).to_string(),
            state,
            case,
            zeta1: result.map(|r| r.zeta1),
            zeta2: result.map(|r| r.zeta2),
            energy,
            evaluations: result.map(|r| r.evaluations),
            e_hf_ref: hf,
            e_ci_ref: ci,
            delta_hf: delta(hf),
            delta_ci: delta(ci),
            error,
        }
    }
}

pub fn write_json<W: std::io::Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn opt5(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.5}")).unwrap_or_default()
}

/// Columns `Z, state, case, zeta1, zeta2, E, E_HF_ref, E_CI_ref`.
pub fn write_csv<W: std::io::Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["Z", "state", "case", "zeta1", "zeta2", "E", "E_HF_ref", "E_CI_ref"])?;
    for r in rows {
        w.write_record([
            r.z.to_string(),
            r.state.key().to_string(),
            r.case.key().to_string(),
            opt5(r.zeta1),
            opt5(r.zeta2),
            opt5(r.energy),
            opt5(r.e_hf_ref),
            opt5(r.e_ci_ref),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text rendering, energies with five decimals.
pub fn render_text(rows: &[ReportRow]) -> String {
    let cell = |x: Option<f64>| x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
    let mut s = format!(
        "{:<6} {:<8} {:<12} {:>9} {:>9} {:>13} {:>13} {:>13} {:>10} {:>10}\n",
        "ion", "state", "case", "zeta1", "zeta2", "E", "E_HF", "E_CI", "E-E_HF", "E-E_CI"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<6} {:<8} {:<12} {:>9} {:>9} {:>13} {:>13} {:>13} {:>10} {:>10}",
            r.ion,
            r.state.key(),
            r.case.key(),
            cell(r.zeta1),
            cell(r.zeta2),
            cell(r.energy),
            cell(r.e_hf_ref),
            cell(r.e_ci_ref),
            cell(r.delta_hf),
            cell(r.delta_ci),
        ));
        if let Some(e) = &r.error {
            s.push_str("  FAILED: ");
            s.push_str(e);
        }
        s.push('\n');
    }
    s
}
