//! Finite-difference eigenproblem for the correction function χ(p).
//!
//! Interior rows discretize `-(t/2)χ'' - uχ' + (h + 1/p)χ = Eχ` with central
//! differences. The ghost value at `p = 0` follows the short-range series
//! `χ ∝ 1 + λp/2 + λ²p²/12` (λ = 1 with the Coulomb term, 0 without), and
//! the ghost beyond `p_max` follows the decaying asymptote
//! `χ ∝ exp[(ζ - √(ζ² - E + E0)) p]`, where ζ is the slowest orbital decay
//! rate in φ and `E0` is the large-`p` limit of `h`. The last row depends on `E`, so it is iterated to
//! self-consistency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PGrid;
use crate::surface_integrals::{fmt15, CoefficientTable};
use crate::tridiag::{eigen_tridiagonal, EigenPair, TridiagonalOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    On,
    Off,
}

impl Interaction {
    fn strength(self) -> f64 {
        match self {
            Interaction::On => 1.0,
            Interaction::Off => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Convergence threshold on the boundary energy, Hartree.
    pub bc_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            bc_tolerance: 1e-10,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSolution {
    pub grid: PGrid,
    pub chi: Vec<f64>,
    pub energy: f64,
    pub state_index: usize,
    pub bc_iterations: usize,
    pub normalized: bool,
    /// Eigenvalue after each boundary iteration.
    pub energy_trace: Vec<f64>,
}

impl ChiSolution {
    pub fn nodes(&self) -> usize {
        count_sign_changes(&self.chi)
    }

    /// `∫ χ s χ dp` on the grid.
    pub fn norm_against(&self, s: &[f64]) -> f64 {
        let w: Vec<f64> = self.chi.iter().zip(s).map(|(c, s)| c * s * c).collect();
        self.grid.trapezoid(&w)
    }
}

/// Builds the tridiagonal operator at boundary energy `e_bc`.
pub fn assemble(
    table: &CoefficientTable,
    e_bc: f64,
    interaction: Interaction,
) -> Result<TridiagonalOperator> {
    let grid = &table.grid;
    let n = grid.n;
    let dp = grid.spacing();
    let dp2 = dp * dp;
    let strength = interaction.strength();
    let mut diag = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n - 1);
    let mut upper = Vec::with_capacity(n - 1);
    let mut first_lower = 0.0;
    let mut last_upper = 0.0;
    for i in 0..n {
        let p = grid.point(i);
        let (t, u) = (table.t[i], table.u[i]);
        diag.push(t / dp2 + table.h[i] + strength / p);
        let lo = -t / (2.0 * dp2) + u / (2.0 * dp);
        let up = -t / (2.0 * dp2) - u / (2.0 * dp);
        if i == 0 {
            first_lower = lo;
        } else {
            lower.push(lo);
        }
        if i + 1 == n {
            last_upper = up;
        } else {
            upper.push(up);
        }
    }
    let p1 = grid.point(0);
    let cusp = |p: f64| 1.0 + strength * p / 2.0 + strength * strength * p * p / 12.0;
    diag[0] += first_lower * cusp(0.0) / cusp(p1);

    let zeta = table.zeta_min;
    let discriminant = zeta * zeta - e_bc + reference_energy(table, interaction);
    if discriminant < 0.0 {
        return Err(Error::BoundaryCondition { discriminant });
    }
    let rate = zeta - discriminant.sqrt();
    diag[n - 1] += last_upper * (rate * dp).exp();

    let op = TridiagonalOperator {
        diag,
        lower,
        upper,
        e_bc,
    };
    op.validate()?;
    Ok(op)
}

fn reference_energy(table: &CoefficientTable, interaction: Interaction) -> f64 {
    table.e0 - (1.0 - interaction.strength()) * table.e0_repulsion
}

/// The `k` lowest states, each with its own self-consistent boundary energy.
pub fn solve_lowest(
    table: &CoefficientTable,
    k: usize,
    interaction: Interaction,
    settings: &SolverSettings,
) -> Result<Vec<ChiSolution>> {
    if k == 0 || k > 5 {
        return Err(Error::Unsupported(format!("k must be in 1..=5, got {k}")));
    }
    (0..k)
        .map(|target| solve_state(table, target, k, interaction, settings))
        .collect()
}

fn solve_state(
    table: &CoefficientTable,
    target: usize,
    k: usize,
    interaction: Interaction,
    settings: &SolverSettings,
) -> Result<ChiSolution> {
    let mut e_bc = reference_energy(table, interaction);
    let mut trace = Vec::new();
    let mut last_delta = f64::INFINITY;
    for iteration in 1..=settings.max_iterations {
        let op = assemble(table, e_bc, interaction)?;
        let pairs = eigen_tridiagonal(&op, k)?;
        let pick = pick_by_nodes(&pairs, target);
        let energy = pick.value;
        trace.push(energy);
        last_delta = (energy - e_bc).abs();
        if last_delta < settings.bc_tolerance {
            let chi = normalize_chi(&table.grid, &pick.vector, &table.s);
            return Ok(ChiSolution {
                grid: table.grid,
                chi,
                energy,
                state_index: target,
                bc_iterations: iteration,
                normalized: true,
                energy_trace: trace,
            });
        }
        e_bc = energy;
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iterations,
        last_delta,
        trace,
    })
}

fn pick_by_nodes(pairs: &[EigenPair], target: usize) -> &EigenPair {
    pairs
        .iter()
        .find(|p| count_sign_changes(&p.vector) == target)
        .unwrap_or(&pairs[target])
}

/// Scales χ so that `∫ χ s χ dp = 1` on the grid and `χ(p₁) > 0`.
pub fn normalize_chi(grid: &PGrid, chi: &[f64], s: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = chi.iter().zip(s).map(|(c, s)| c * s * c).collect();
    let norm = grid.trapezoid(&w).sqrt();
    let sign = if chi[0] < 0.0 { -1.0 } else { 1.0 };
    chi.iter().map(|c| sign * c / norm).collect()
}

/// Sign changes, skipping entries negligible against the largest magnitude.
pub fn count_sign_changes(v: &[f64]) -> usize {
    let maxabs = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let floor = 1e-12 * maxabs;
    let mut prev = 0.0f64;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if prev != 0.0 && prev.signum() != x.signum() {
            changes += 1;
        }
        prev = x;
    }
    changes
}

pub fn write_chi_csv<W: std::io::Write>(sol: &ChiSolution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "chi"])?;
    for (i, c) in sol.chi.iter().enumerate() {
        w.write_record([fmt15(sol.grid.point(i)), fmt15(*c)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ChiSummary<'a> {
    energy: f64,
    iterations: usize,
    state_index: usize,
    grid: &'a PGrid,
}

pub fn chi_summary_json(sol: &ChiSolution) -> Result<String> {
    Ok(serde_json::to_string(&ChiSummary {
        energy: sol.energy,
        iterations: sol.bc_iterations,
        state_index: sol.state_index,
        grid: &sol.grid,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbitals::{OrbitalSpec, PairAnsatz, SpinSymmetry};
    use crate::surface_integrals::{compute_coefficients, CoefficientOptions};

    fn table(z: u32, n: usize) -> CoefficientTable {
        let o = OrbitalSpec::one_s(z as f64).unwrap();
        let ans = PairAnsatz::new(o, o, SpinSymmetry::Singlet, z).unwrap();
        let grid = PGrid::for_ion(z, 20.0, n).unwrap();
        compute_coefficients(&ans, &grid, &CoefficientOptions::default()).unwrap()
    }

    fn synthetic(n: usize) -> CoefficientTable {
        let grid = PGrid::new(10.0, n).unwrap();
        CoefficientTable {
            grid,
            s: vec![1.0 / 10.0; n],
            t: vec![2.0; n],
            u: vec![0.0; n],
            h: vec![0.0; n],
            e0: 0.0,
            e0_repulsion: 0.0,
            raw_norm: 1.0,
            nuclear_charge: 1,
            zeta_min: 1.0,
        }
    }

    #[test]
    fn stencil_annihilates_constants_in_interior() {
        let t = synthetic(40);
        let op = assemble(&t, 0.0, Interaction::Off).unwrap();
        let y = op.apply(&vec![1.0; 40]);
        for v in &y[1..39] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn noninteracting_constant_is_eigenvector() {
        let t = table(2, 200);
        let op = assemble(&t, t.e0 - t.e0_repulsion, Interaction::Off).unwrap();
        let y = op.apply(&vec![1.0; 200]);
        for v in &y {
            assert!((v + 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_tends_to_potential_under_refinement() {
        for n in [200, 400] {
            let t = table(2, n);
            let op = assemble(&t, t.e0, Interaction::On).unwrap();
            let dp = t.grid.spacing();
            for i in [10, n / 2, n - 2] {
                let p = t.grid.point(i);
                let rest = op.diag[i] - t.t[i] / (dp * dp);
                assert!((rest - (t.h[i] + 1.0 / p)).abs() < 1e-9);
                assert!(op.diag[i].is_finite());
            }
        }
    }

    #[test]
    fn boundary_error_above_threshold() {
        let t = table(1, 100);
        let err = assemble(&t, t.e0 + 2.0, Interaction::On).unwrap_err();
        assert!(matches!(err, Error::BoundaryCondition { .. }));
    }

    #[test]
    fn helium_fixed_charge_ground_state() {
        let t = table(2, 200);
        let sol = &solve_lowest(&t, 1, Interaction::On, &SolverSettings::default()).unwrap()[0];
        assert!((sol.energy + 2.87940).abs() < 5e-4, "{}", sol.energy);
        assert_eq!(sol.nodes(), 0);
        assert!((sol.norm_against(&t.s) - 1.0).abs() < 1e-10);
        assert!(sol.chi[0] > 0.0);
    }

    #[test]
    fn rejects_out_of_range_k() {
        let t = table(1, 60);
        assert!(solve_lowest(&t, 0, Interaction::On, &SolverSettings::default()).is_err());
        assert!(solve_lowest(&t, 6, Interaction::On, &SolverSettings::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let t = table(1, 100);
        let settings = SolverSettings {
            bc_tolerance: 0.0,
            max_iterations: 3,
        };
        match solve_lowest(&t, 1, Interaction::On, &settings) {
            Err(Error::NoConvergence { iterations, trace, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(trace.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_change_counting() {
        assert_eq!(count_sign_changes(&[1.0, 2.0, 0.5]), 0);
        assert_eq!(count_sign_changes(&[1.0, -2.0, 0.0, 0.5]), 2);
        assert_eq!(count_sign_changes(&[1.0, 1e-20, -1e-20, 1.0]), 0);
    }

    #[test]
    fn chi_exports() {
        let t = table(2, 50);
        let sol = &solve_lowest(&t, 1, Interaction::On, &SolverSettings::default()).unwrap()[0];
        let mut buf = Vec::new();
        write_chi_csv(sol, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 51);
        let json: serde_json::Value = serde_json::from_str(&chi_summary_json(sol).unwrap()).unwrap();
        assert_eq!(json["state_index"], 0);
        assert_eq!(json["grid"]["n"], 50);
    }
}
