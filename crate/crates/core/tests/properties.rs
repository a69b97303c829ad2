use corrfn::orbitals::{eval_orbital, pair_value_and_partials, OrbitalSpec, PairAnsatz, SpinSymmetry};
use corrfn::surface_integrals::{coefficients_at, s_oracle_1s1s, CoefficientIntegrand, QuadratureSettings};
use corrfn::surface_sampler::{
    potential, sample_surface, scale_to, ParticleConfiguration, SamplerSettings, SurfaceSpec,
};
use corrfn::tridiag::{eigen_dense, eigen_tridiagonal, TridiagonalOperator};
use corrfn::Error;
use proptest::prelude::*;

fn orbital(two_s: bool, zeta: f64) -> OrbitalSpec {
    if two_s {
        OrbitalSpec::two_s(zeta).unwrap()
    } else {
        OrbitalSpec::one_s(zeta).unwrap()
    }
}

fn symmetry(triplet: bool) -> SpinSymmetry {
    if triplet {
        SpinSymmetry::Triplet
    } else {
        SpinSymmetry::Singlet
    }
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_function_exchange_symmetry(
        z1 in 0.3..4.0f64, z2 in 0.3..4.0f64, s1 in any::<bool>(), s2 in any::<bool>(),
        triplet in any::<bool>(), r1 in 0.0..8.0f64, r2 in 0.0..8.0f64,
    ) {
        let ans = PairAnsatz::new(orbital(s1, z1), orbital(s2, z2), symmetry(triplet), 2);
        prop_assume!(ans.is_ok());
        let ans = ans.unwrap();
        let a = pair_value_and_partials(&ans, r1, r2).unwrap();
        let b = pair_value_and_partials(&ans, r2, r1).unwrap();
        let sign = if triplet { -1.0 } else { 1.0 };
        let scale = a.value.abs().max(1e-300);
        prop_assert!((a.value - sign * b.value).abs() <= 1e-12 * scale.max(1.0));
        prop_assert!((a.d1 - sign * b.d2).abs() <= 1e-10 * a.d1.abs().max(1.0));
        prop_assert!((a.d11 - sign * b.d22).abs() <= 1e-10 * a.d11.abs().max(1.0));
    }

    #[test]
    fn orbital_derivatives_match_finite_differences(zeta in 0.3..5.0f64, two_s in any::<bool>(), r in 0.05..6.0f64) {
        let o = orbital(two_s, zeta);
        let (_, d, dd) = eval_orbital(&o, r).unwrap();
        let h = 1e-4 * r.max(0.1);
        let f = |x| eval_orbital(&o, x).unwrap().0;
        let fd = (f(r + h) - f(r - h)) / (2.0 * h);
        let fdd = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        let scale = zeta.powf(1.5) * zeta * zeta;
        prop_assert!((d - fd).abs() < 1e-6 * scale);
        prop_assert!((dd - fdd).abs() < 1e-4 * scale);
    }

    #[test]
    fn scaling_lands_on_target_surface(a in point(), b in point(), c in point(), p in 0.05..20.0f64, q in 0.05..20.0f64) {
        let cfg = ParticleConfiguration::new(vec![a, b, c]);
        prop_assume!(cfg.is_ok());
        let cfg = cfg.unwrap();
        let once = scale_to(&cfg, p).unwrap();
        prop_assert!((potential(&once).unwrap() - 1.0 / p).abs() < 1e-12 / p);
        let twice = scale_to(&scale_to(&cfg, q).unwrap(), p).unwrap();
        for (x, y) in once.positions.iter().zip(&twice.positions) {
            for k in 0..3 {
                prop_assert!((x[k] - y[k]).abs() < 1e-10 * (1.0 + x[k].abs()));
            }
        }
    }

    #[test]
    fn potential_is_pairwise_sum(pts in prop::collection::vec(point(), 2..6)) {
        let cfg = ParticleConfiguration::new(pts.clone());
        prop_assume!(cfg.is_ok());
        let cfg = cfg.unwrap();
        let mut direct = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
                direct += 1.0 / d;
            }
        }
        let v = potential(&cfg).unwrap();
        prop_assert!((v - direct).abs() < 1e-12 * direct);
        let per: f64 = cfg.particle_potentials().iter().sum();
        prop_assert!((per - 2.0 * v).abs() < 1e-12 * v);
        prop_assert!(cfg.canonical_order().is_canonically_ordered());
    }

    #[test]
    fn sampler_output_is_seed_determined(seed in any::<u64>(), p in 0.2..4.0f64, three in any::<bool>()) {
        let spec = SurfaceSpec::new(if three { 3 } else { 2 }, p).unwrap();
        let a = sample_surface(spec, 20, seed, &SamplerSettings::default()).unwrap();
        let b = sample_surface(spec, 20, seed, &SamplerSettings::default()).unwrap();
        prop_assert_eq!(&a, &b);
        for s in &a.samples {
            prop_assert!((potential(&s.config).unwrap() - 1.0 / p).abs() < 1e-12 / p);
            prop_assert!(s.config.is_canonically_ordered());
            prop_assert!(s.weight > 0.0 && s.weight.is_finite());
        }
    }

    #[test]
    fn tridiagonal_eigenvalues_match_dense(
        diag in prop::collection::vec(-5.0..5.0f64, 3..25),
        seed in prop::collection::vec((0.1..2.0f64, 0.1..2.0f64), 24),
    ) {
        let n = diag.len();
        let lower: Vec<f64> = seed[..n - 1].iter().map(|x| -x.0).collect();
        let upper: Vec<f64> = seed[..n - 1].iter().map(|x| -x.1).collect();
        let op = TridiagonalOperator::new(diag, lower, upper).unwrap();
        let k = n.min(3);
        let fast = eigen_tridiagonal(&op, k).unwrap();
        let dense = eigen_dense(&op, k).unwrap();
        for (a, b) in fast.iter().zip(&dense) {
            prop_assert!((a.value - b.value).abs() < 1e-9 * (1.0 + a.value.abs()));
            let r = op.apply(&a.vector);
            let resid: f64 = r.iter().zip(&a.vector).map(|(x, v)| (x - a.value * v).abs()).fold(0.0, f64::max);
            prop_assert!(resid < 1e-9 * (1.0 + a.value.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coefficients_invariant_under_orbital_swap(
        z1 in 0.5..3.0f64, z2 in 0.5..3.0f64, s1 in any::<bool>(), s2 in any::<bool>(),
        triplet in any::<bool>(), p in 0.05..6.0f64,
    ) {
        let a = PairAnsatz::new(orbital(s1, z1), orbital(s2, z2), symmetry(triplet), 2);
        let b = PairAnsatz::new(orbital(s2, z2), orbital(s1, z1), symmetry(triplet), 2);
        prop_assume!(a.is_ok() && b.is_ok());
        let q = QuadratureSettings::default();
        let ca = coefficients_at(&CoefficientIntegrand::new(&a.unwrap()), p, &q).unwrap();
        let cb = coefficients_at(&CoefficientIntegrand::new(&b.unwrap()), p, &q).unwrap();
        prop_assert!((ca.s_abs - cb.s_abs).abs() < 1e-12 * ca.s_abs.abs().max(1e-300));
        prop_assert!((ca.u - cb.u).abs() < 1e-12 * (1.0 + ca.u.abs()));
        prop_assert!((ca.h - cb.h).abs() < 1e-12 * (1.0 + ca.h.abs()));
    }
}

#[test]
fn identical_triplet_orbitals_rejected() {
    let o = OrbitalSpec::one_s(1.0).unwrap();
    assert!(matches!(PairAnsatz::new(o, o, SpinSymmetry::Triplet, 2), Err(Error::InvalidAnsatz(_))));
}

#[test]
fn two_particle_sampler_reproduces_r12_density() {
    // E|φ|² over the weighted pair samples is the r12 density of φ = 1s(ζ)·1s(ζ)
    let zeta = 2.0;
    let orb = OrbitalSpec::one_s(zeta).unwrap();
    let density = |r: &[f64; 3]| {
        let radial = eval_orbital(&orb, (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()).unwrap().0;
        radial * radial / (4.0 * std::f64::consts::PI)
    };
    // density mass outside r = 3.5 is below 1e-4
    let settings = SamplerSettings { ball_radius: 3.5, ..Default::default() };
    for p in [0.3, 0.8, 1.5] {
        let set = sample_surface(SurfaceSpec::new(2, p).unwrap(), 400_000, 11, &settings).unwrap();
        let values: Vec<f64> = set
            .samples
            .iter()
            .map(|s| s.weight * density(&s.config.positions[0]) * density(&s.config.positions[1]))
            .collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let exact = s_oracle_1s1s(zeta, p);
        assert!((mean - exact).abs() < 5.0 * se, "p={p}: MC {mean} ± {se}, exact {exact}");
        assert!(se < 0.05 * exact, "p={p}: {se} vs {exact}");
    }
}
