//! Distribution functions derived from a solved χ.

use serde::{Deserialize, Serialize};

use crate::chi_solver::{solve_lowest, ChiSolution, Interaction, SolverSettings};
use crate::error::{Error, Result};
use crate::grid::PGrid;
use crate::orbitals::{OrbitalSpec, PairAnsatz, SpinSymmetry};
use crate::surface_integrals::{compute_coefficients, fmt15, CoefficientOptions, CoefficientTable};

/// `r12` densities with and without χ, and their difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurves {
    pub grid: PGrid,
    pub chi: Vec<f64>,
    pub s: Vec<f64>,
    pub chi_s_chi: Vec<f64>,
    /// Correlation hole `s (χ² - 1)`.
    pub hole: Vec<f64>,
    pub nuclear_charge: u32,
}

impl DistributionCurves {
    /// `|min hole|`.
    pub fn hole_depth(&self) -> f64 {
        -self.hole.iter().copied().fold(0.0, f64::min)
    }

    /// Hole depth per unit of the reduced distance `Z p`.
    pub fn reduced_hole_depth(&self) -> f64 {
        self.hole_depth() / self.nuclear_charge as f64
    }

    pub fn max_chi_deviation(&self) -> f64 {
        self.chi.iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Trapezoid integrals of `s`, `χsχ` and the hole.
    pub fn integrals(&self) -> (f64, f64, f64) {
        (
            self.grid.trapezoid(&self.s),
            self.grid.trapezoid(&self.chi_s_chi),
            self.grid.trapezoid(&self.hole),
        )
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "s", "chi", "chi_s_chi", "hole"])?;
        for (i, p) in self.grid.points().iter().enumerate() {
            w.write_record([
                fmt15(*p),
                fmt15(self.s[i]),
                fmt15(self.chi[i]),
                fmt15(self.chi_s_chi[i]),
                fmt15(self.hole[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn curves(table: &CoefficientTable, sol: &ChiSolution) -> Result<DistributionCurves> {
    if table.grid != sol.grid || sol.chi.len() != table.s.len() {
        return Err(Error::InvalidGrid("coefficient table and χ use different grids".into()));
    }
    let chi_s_chi: Vec<f64> = sol.chi.iter().zip(&table.s).map(|(c, s)| c * s * c).collect();
    let hole = sol.chi.iter().zip(&table.s).map(|(c, s)| s * (c * c - 1.0)).collect();
    Ok(DistributionCurves {
        grid: table.grid,
        chi: sol.chi.clone(),
        s: table.s.clone(),
        chi_s_chi,
        hole,
        nuclear_charge: table.nuclear_charge,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoState {
    pub solution: ChiSolution,
    /// Exact energy of the `1s ns` configuration without repulsion.
    pub exact: f64,
}

/// `−Z²(1 + 1/n²)/2` for `n = 1, 2, 3`.
pub fn exact_noninteracting(z: u32, count: usize) -> Vec<f64> {
    let zz = (z * z) as f64;
    (1..=count)
        .map(|n| -0.5 * zz * (1.0 + 1.0 / (n * n) as f64))
        .collect()
}

/// Lowest three χ states for `φ = 1s(Z)²` with the electron repulsion removed.
pub fn noninteracting_demo(
    z: u32,
    grid: &PGrid,
    options: &CoefficientOptions,
    settings: &SolverSettings,
) -> Result<Vec<DemoState>> {
    if z == 0 {
        return Err(Error::InvalidSpec("nuclear charge must be at least 1".into()));
    }
    let orb = OrbitalSpec::one_s(z as f64)?;
    let ansatz = PairAnsatz::new(orb, orb, SpinSymmetry::Singlet, z)?;
    let table = compute_coefficients(&ansatz, grid, options)?;
    let sols = solve_lowest(&table, 3, Interaction::Off, settings)?;
    Ok(sols
        .into_iter()
        .zip(exact_noninteracting(z, 3))
        .map(|(solution, exact)| DemoState { solution, exact })
        .collect())
}
