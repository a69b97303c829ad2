//! Effective-charge optimization of the lowest χ eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chi_solver::{solve_lowest, ChiSolution, Interaction, SolverSettings};
use crate::error::{Error, Result};
use crate::grid::PGrid;
use crate::optimize::{golden_section, nelder_mead_2d, Minimum, Tolerances};
use crate::orbitals::{OrbitalSpec, PairAnsatz, SpinSymmetry};
use crate::reference::{reference, ReferenceRow};
use crate::surface_integrals::{compute_coefficients, CoefficientOptions, CoefficientTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IonState {
    /// 1¹S₀: symmetric 1s·1s.
    GroundSinglet,
    /// 2³S₁: antisymmetric 1s·2s.
    ExcitedTriplet,
}

impl IonState {
    pub fn key(self) -> &'static str {
        match self {
            IonState::GroundSinglet => "singlet",
            IonState::ExcitedTriplet => "triplet",
        }
    }

    pub fn term(self) -> &'static str {
        match self {
            IonState::GroundSinglet => "1^1S_0",
            IonState::ExcitedTriplet => "2^3S_1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OptimizationCase {
    /// Both effective charges equal to the nuclear charge.
    FixedZ,
    /// One shared effective charge, optimized.
    EqualOpt,
    /// Two independent effective charges, optimized.
    IndependentOpt,
}

impl OptimizationCase {
    pub fn key(self) -> &'static str {
        match self {
            OptimizationCase::FixedZ => "fixed-z",
            OptimizationCase::EqualOpt => "equal",
            OptimizationCase::IndependentOpt => "independent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub zeta_tolerance: f64,
    pub energy_tolerance: f64,
    pub max_evaluations: usize,
    /// Initial step / simplex edge in ζ.
    pub step: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            zeta_tolerance: 1e-5,
            energy_tolerance: 1e-8,
            max_evaluations: 500,
            step: 0.1,
        }
    }
}

/// Everything that controls one energy evaluation and its optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Grid end point times the nuclear charge, Bohr.
    pub p_max_times_z: f64,
    pub n: usize,
    pub coefficients: CoefficientOptions,
    pub solver: SolverSettings,
    pub optimizer: OptimizerSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            p_max_times_z: 20.0,
            n: 200,
            coefficients: CoefficientOptions::default(),
            solver: SolverSettings::default(),
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_points(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn grid(&self, z: u32) -> Result<PGrid> {
        PGrid::for_ion(z, self.p_max_times_z, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonResult {
    pub z: u32,
    pub state: IonState,
    pub case: OptimizationCase,
    pub zeta1: f64,
    pub zeta2: f64,
    pub energy: f64,
    pub evaluations: usize,
}

/// ζ₁ → 1s; ζ₂ → second 1s (singlet) or 2s (triplet).
pub fn build_ansatz(z: u32, state: IonState, zeta1: f64, zeta2: f64) -> Result<PairAnsatz> {
    match state {
        IonState::GroundSinglet => PairAnsatz::new(
            OrbitalSpec::one_s(zeta1)?,
            OrbitalSpec::one_s(zeta2)?,
            SpinSymmetry::Singlet,
            z,
        ),
        IonState::ExcitedTriplet => PairAnsatz::new(
            OrbitalSpec::one_s(zeta1)?,
            OrbitalSpec::two_s(zeta2)?,
            SpinSymmetry::Triplet,
            z,
        ),
    }
}

/// Coefficients and the lowest χ for given effective charges.
pub fn solve_charges(
    z: u32,
    state: IonState,
    zeta1: f64,
    zeta2: f64,
    config: &PipelineConfig,
) -> Result<(CoefficientTable, ChiSolution)> {
    let ansatz = build_ansatz(z, state, zeta1, zeta2)?;
    let table = compute_coefficients(&ansatz, &config.grid(z)?, &config.coefficients)?;
    let mut sols = solve_lowest(&table, 1, Interaction::On, &config.solver)?;
    Ok((table, sols.remove(0)))
}

pub fn energy_of_charges(
    z: u32,
    state: IonState,
    zeta1: f64,
    zeta2: f64,
    config: &PipelineConfig,
) -> Result<f64> {
    solve_charges(z, state, zeta1, zeta2, config).map(|(_, s)| s.energy)
}

/// Below this the orbitals extend far past any grid; treated as infeasible.
const MIN_ZETA: f64 = 0.02;

fn objective(z: u32, state: IonState, a: f64, b: f64, config: &PipelineConfig) -> Result<f64> {
    if a < MIN_ZETA || b < MIN_ZETA {
        return Ok(f64::INFINITY);
    }
    match energy_of_charges(z, state, a, b, config) {
        Err(Error::BoundaryCondition { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

pub fn initial_charges(z: u32, state: IonState) -> (f64, f64) {
    let zf = z as f64;
    match state {
        IonState::GroundSinglet => (zf - 5.0 / 16.0, zf - 5.0 / 16.0),
        IonState::ExcitedTriplet => (zf, zf - 0.5),
    }
}

pub fn optimize(
    z: u32,
    state: IonState,
    case: OptimizationCase,
    config: &PipelineConfig,
) -> Result<IonResult> {
    let zf = z as f64;
    let opt = &config.optimizer;
    let tol = Tolerances {
        x: opt.zeta_tolerance,
        f: opt.energy_tolerance,
        max_evaluations: opt.max_evaluations,
    };
    let finish = |m: Minimum, zeta1: f64, zeta2: f64| -> Result<IonResult> {
        if !m.converged {
            return Err(Error::Optimization {
                evaluations: m.evaluations,
                best_zeta1: zeta1,
                best_zeta2: zeta2,
                best_energy: m.f,
            });
        }
        Ok(IonResult {
            z,
            state,
            case,
            zeta1,
            zeta2,
            energy: m.f,
            evaluations: m.evaluations,
        })
    };
    match (case, state) {
        (OptimizationCase::FixedZ, _) => Ok(IonResult {
            z,
            state,
            case,
            zeta1: zf,
            zeta2: zf,
            energy: energy_of_charges(z, state, zf, zf, config)?,
            evaluations: 1,
        }),
        (OptimizationCase::EqualOpt, IonState::GroundSinglet) => {
            let (x0, _) = initial_charges(z, state);
            let m = golden_section(|x| objective(z, state, x, x, config), x0, opt.step, &tol)?;
            let x = m.x[0];
            finish(m, x, x)
        }
        (OptimizationCase::EqualOpt, IonState::ExcitedTriplet) => Err(Error::Unsupported(
            "a shared effective charge is not defined for the 1s2s triplet".into(),
        )),
        (OptimizationCase::IndependentOpt, IonState::GroundSinglet) => {
            // E(a, b) = E(b, a); search the ordered half-plane a >= b
            let (x0, _) = initial_charges(z, state);
            let m = nelder_mead_2d(
                |v| objective(z, state, v[0].max(v[1]), v[0].min(v[1]), config),
                [x0, x0],
                opt.step,
                &tol,
            )?;
            let (a, b) = (m.x[0].max(m.x[1]), m.x[0].min(m.x[1]));
            finish(m, a, b)
        }
        (OptimizationCase::IndependentOpt, IonState::ExcitedTriplet) => {
            let (a0, b0) = initial_charges(z, state);
            let m = nelder_mead_2d(|v| objective(z, state, v[0], v[1], config), [a0, b0], opt.step, &tol)?;
            let (a, b) = (m.x[0], m.x[1]);
            finish(m, a, b)
        }
    }
}

/// Whether the `(state, case)` pair belongs to the published table layout.
pub fn in_table_layout(z: u32, state: IonState, case: OptimizationCase) -> bool {
    match state {
        IonState::GroundSinglet => true,
        IonState::ExcitedTriplet => z >= 2 && case != OptimizationCase::EqualOpt,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub z: u32,
    pub state: IonState,
    pub case: OptimizationCase,
    pub result: Option<IonResult>,
    pub error: Option<String>,
    pub reference: Option<ReferenceRow>,
}

/// Runs every `(ion, state, case)` cell of the table layout. Failures are
/// recorded per cell; the batch always completes.
pub fn scan_table(
    ions: &[u32],
    states: &[IonState],
    cases: &[OptimizationCase],
    config: &PipelineConfig,
) -> Vec<ScanEntry> {
    let mut cells = Vec::new();
    for &z in ions {
        for &state in states {
            for &case in cases {
                if in_table_layout(z, state, case) {
                    cells.push((z, state, case));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(z, state, case)| {
            let outcome = optimize(z, state, case, config);
            ScanEntry {
                z,
                state,
                case,
                reference: reference(z, state).cloned(),
                error: outcome.as_ref().err().map(|e| e.to_string()),
                result: outcome.ok(),
            }
        })
        .collect()
}
