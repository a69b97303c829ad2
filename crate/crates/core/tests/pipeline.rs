use corrfn::chi_solver::{solve_lowest, Interaction, SolverSettings};
use corrfn::observables::curves;
use corrfn::reference::{parse_ion, reference};
use corrfn::report::{write_csv, write_json, ReportRow};
use corrfn::surface_integrals::{compute_coefficients, CoefficientOptions, E0Mode};
use corrfn::variational::{
    build_ansatz, optimize, scan_table, solve_charges, IonState, OptimizationCase, PipelineConfig,
};
use corrfn::Error;

#[test]
fn helium_singlet_fixed_and_equal() {
    let cfg = PipelineConfig::default();
    let fixed = optimize(2, IonState::GroundSinglet, OptimizationCase::FixedZ, &cfg).unwrap();
    assert!((fixed.energy + 2.87940).abs() < 5e-4, "{}", fixed.energy);
    assert_eq!((fixed.zeta1, fixed.zeta2), (2.0, 2.0));
    let equal = optimize(2, IonState::GroundSinglet, OptimizationCase::EqualOpt, &cfg).unwrap();
    assert!(equal.energy < fixed.energy);
    assert_eq!(equal.zeta1, equal.zeta2);
    assert!(equal.zeta1 < 2.0 && equal.zeta1 > 1.6);
    let published = reference(2, IonState::GroundSinglet).unwrap().published(OptimizationCase::EqualOpt).unwrap();
    assert!((equal.energy - published).abs() < 1e-3);
}

#[test]
fn lithium_triplet_independent_below_fixed() {
    let cfg = PipelineConfig::default();
    let fixed = optimize(3, IonState::ExcitedTriplet, OptimizationCase::FixedZ, &cfg).unwrap();
    let indep = optimize(3, IonState::ExcitedTriplet, OptimizationCase::IndependentOpt, &cfg).unwrap();
    assert!(indep.energy <= fixed.energy);
    // inner 1s charge stays near Z, outer 2s is screened
    assert!((indep.zeta1 - 3.0).abs() < 0.1 && indep.zeta2 < 2.9);
}

#[test]
fn correlation_lowers_energy_below_bare_one_electron_part() {
    let cfg = PipelineConfig::default();
    let ans = build_ansatz(2, IonState::GroundSinglet, 2.0, 2.0).unwrap();
    let t = compute_coefficients(&ans, &cfg.grid(2).unwrap(), &cfg.coefficients).unwrap();
    let off = solve_lowest(&t, 1, Interaction::Off, &SolverSettings::default()).unwrap();
    let on = solve_lowest(&t, 1, Interaction::On, &SolverSettings::default()).unwrap();
    assert!((off[0].energy + 4.0).abs() < 1e-9);
    // repulsion raises the energy by less than the uncorrelated 5Z/8
    let shift = on[0].energy - off[0].energy;
    assert!(shift > 0.0 && shift < 1.25, "{shift}");
}

#[test]
fn helium_curves_have_one_sign_change() {
    let cfg = PipelineConfig::default();
    let r = optimize(2, IonState::GroundSinglet, OptimizationCase::IndependentOpt, &cfg).unwrap();
    let (t, s) = solve_charges(2, r.state, r.zeta1, r.zeta2, &cfg).unwrap();
    let c = curves(&t, &s).unwrap();
    assert!(c.hole[0] < 0.0);
    let changes = c.hole.windows(2).filter(|w| w[0] < 0.0 && w[1] >= 0.0 || w[0] >= 0.0 && w[1] < 0.0).count();
    assert_eq!(changes, 1);
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("p,s,chi,chi_s_chi,hole\n"));
    assert_eq!(text.lines().count(), cfg.n + 1);
}

#[test]
fn e0_modes_agree_on_bound_helium() {
    let cfg = PipelineConfig::default();
    let ans = build_ansatz(2, IonState::GroundSinglet, 1.85, 1.85).unwrap();
    let grid = cfg.grid(2).unwrap();
    let energies: Vec<f64> = [E0Mode::OuterLocalEnergy, E0Mode::H0Expectation, E0Mode::TotalExpectation]
        .into_iter()
        .map(|e0| {
            let t = compute_coefficients(&ans, &grid, &CoefficientOptions { e0, ..Default::default() }).unwrap();
            solve_lowest(&t, 1, Interaction::On, &SolverSettings::default()).unwrap()[0].energy
        })
        .collect();
    for e in &energies[1..] {
        assert!((e - energies[0]).abs() < 1e-4, "{energies:?}");
    }
}

#[test]
fn scan_reports_layout_and_errors() {
    let cfg = PipelineConfig::default();
    let entries = scan_table(
        &[2],
        &[IonState::GroundSinglet, IonState::ExcitedTriplet],
        &[OptimizationCase::FixedZ],
        &cfg,
    );
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e.result.is_some() && e.error.is_none()));
    let rows: Vec<ReportRow> = entries.iter().map(ReportRow::from_entry).collect();
    let mut json = Vec::new();
    write_json(&rows, &mut json).unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 2);
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().next().unwrap(), "Z,state,case,zeta1,zeta2,E,E_HF_ref,E_CI_ref");
}

#[test]
fn invalid_inputs_are_typed_errors() {
    let cfg = PipelineConfig::default();
    assert!(matches!(build_ansatz(2, IonState::GroundSinglet, -1.0, 2.0), Err(Error::InvalidSpec(_))));
    assert!(matches!(cfg.clone().with_points(1).grid(2), Err(Error::InvalidGrid(_))));
    assert!(matches!(
        optimize(2, IonState::ExcitedTriplet, OptimizationCase::EqualOpt, &cfg),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(parse_ion("Xx"), Err(Error::Unsupported(_))));
    assert_eq!(parse_ion("Ne8+").unwrap(), 10);
}
