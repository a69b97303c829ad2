//! Averages over the constant-`r12` surface for two-electron S states.
//!
//! For radial functions the six-dimensional surface integral at `r12 = p`
//! reduces to
//!
//! ```text
//! ∫_{S(p)} f = (p/2) ∫₀^∞ dr1 ∫_{|r1-p|}^{r1+p} dr2  r1 r2 f(r1, r2)
//! ```
//!
//! where the constant `p/2` already contains all angular factors, so that
//! `∫ s(p) dp = 1` for a normalized pair function. The inner `r2` integral is
//! done exactly term by term; the outer `r1` integral uses composite
//! Gauss-Legendre panels, doubled until the result stops changing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expoly::{factorial, SeparableFn};
use crate::grid::PGrid;
use crate::orbitals::{h0_expectation, repulsion_expectation, OrbitalKind, OrbitalSpec, PairAnsatz};
use crate::quadrature::composite_into;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Relative change between successive panel doublings at convergence.
    pub tolerance: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            initial_panels: 2,
            max_panels: 1024,
        }
    }
}

/// Truncation of the outer integral: `r1 ≤ p + DECAY_E_FOLDS / min(α1 + α2)`.
const DECAY_E_FOLDS: f64 = 80.0;

/// Multi-channel integrand, each channel already multiplied by the
/// Jacobian factor `r1 r2`.
#[derive(Debug, Clone)]
pub struct SurfaceIntegrand {
    groups: Vec<MergedGroup>,
    channels: usize,
    max_deg2: usize,
    min_alpha_sum: f64,
}

#[derive(Debug, Clone)]
struct MergedGroup {
    alpha1: f64,
    alpha2: f64,
    /// `coeffs[channel][a][b]`, dense.
    coeffs: Vec<Vec<Vec<f64>>>,
}

impl SurfaceIntegrand {
    /// Channels given as Jacobian-weighted functions `r1 r2 f_c(r1, r2)`.
    pub fn weighted(channels: &[SeparableFn]) -> Self {
        let mut groups: Vec<MergedGroup> = Vec::new();
        let nch = channels.len();
        for (c, f) in channels.iter().enumerate() {
            for g in &f.groups {
                let idx = match groups
                    .iter()
                    .position(|m| m.alpha1 == g.alpha1 && m.alpha2 == g.alpha2)
                {
                    Some(i) => i,
                    None => {
                        groups.push(MergedGroup {
                            alpha1: g.alpha1,
                            alpha2: g.alpha2,
                            coeffs: vec![Vec::new(); nch],
                        });
                        groups.len() - 1
                    }
                };
                let target = &mut groups[idx].coeffs[c];
                for (a, row) in g.coeffs.iter().enumerate() {
                    if target.len() <= a {
                        target.resize(a + 1, Vec::new());
                    }
                    if target[a].len() < row.len() {
                        target[a].resize(row.len(), 0.0);
                    }
                    for (b, &v) in row.iter().enumerate() {
                        target[a][b] += v;
                    }
                }
            }
        }
        let max_deg2 = channels.iter().map(SeparableFn::max_deg2).max().unwrap_or(0);
        let min_alpha_sum = groups
            .iter()
            .map(|g| g.alpha1 + g.alpha2)
            .fold(f64::INFINITY, f64::min);
        Self {
            groups,
            channels: nch,
            max_deg2,
            min_alpha_sum,
        }
    }

    /// Channels given as plain densities `f_c`; the Jacobian is applied here.
    pub fn from_densities(channels: &[SeparableFn]) -> Self {
        let weighted: Vec<SeparableFn> = channels.iter().map(|f| f.monomial(1.0, 1, 1)).collect();
        Self::weighted(&weighted)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Adds the `r1`-integrand at node `r1` (times `weight`) into `out`.
    fn accumulate(&self, r1: f64, p: f64, weight: f64, out: &mut [f64], moments: &mut Vec<f64>) {
        let lo = (r1 - p).abs();
        let hi = r1 + p;
        for g in &self.groups {
            inner_moments(g.alpha2, lo, hi - lo, self.max_deg2, moments);
            let e1 = weight * (-g.alpha1 * r1).exp();
            for (c, mat) in g.coeffs.iter().enumerate() {
                let mut acc = 0.0;
                let mut r1_pow = 1.0;
                for row in mat {
                    let inner: f64 = row.iter().zip(moments.iter()).map(|(x, m)| x * m).sum();
                    acc += r1_pow * inner;
                    r1_pow *= r1;
                }
                out[c] += e1 * acc;
            }
        }
    }

    /// Outer integral on `[a, b]` with `panels` panels; also returns the sum of
    /// absolute panel contributions per channel (used as the error scale).
    fn outer(&self, a: f64, b: f64, p: f64, panels: usize, total: &mut [f64], scale: &mut [f64]) {
        let h = (b - a) / panels as f64;
        let mut moments = Vec::with_capacity(self.max_deg2 + 1);
        let mut panel = vec![0.0; self.channels];
        for k in 0..panels {
            panel.iter_mut().for_each(|x| *x = 0.0);
            let lo = a + h * k as f64;
            composite_into(lo, lo + h, 1, &mut panel, &mut |x, w, o| {
                self.accumulate(x, p, w, o, &mut moments)
            });
            for c in 0..self.channels {
                total[c] += panel[c];
                scale[c] += panel[c].abs();
            }
        }
    }

    fn integrate_at(&self, p: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let mut total = vec![0.0; self.channels];
        let mut scale = vec![0.0; self.channels];
        let r_max = p + DECAY_E_FOLDS / self.min_alpha_sum;
        self.outer(0.0, p, p, panels, &mut total, &mut scale);
        self.outer(p, r_max, p, panels, &mut total, &mut scale);
        let pref = 0.5 * p;
        total.iter_mut().for_each(|x| *x *= pref);
        scale.iter_mut().for_each(|x| *x *= pref);
        (total, scale)
    }
}

/// `M_b = ∫_lo^{lo+w} x^b e^{-β x} dx` for `b = 0..=deg`, written as
/// `e^{-β lo} Σ_j C(b,j) lo^{b-j} J_j` with `J_j = ∫₀^w x^j e^{-β x} dx`.
/// All terms are non-negative, so no cancellation occurs for short intervals.
fn inner_moments(beta: f64, lo: f64, w: f64, deg: usize, out: &mut Vec<f64>) {
    let mut j = [0.0f64; 32];
    assert!(deg < j.len());
    let y = beta * w;
    let e_y = (-y).exp();
    if y > deg as f64 + 25.0 {
        // upward recurrence is stable once βw exceeds the degree
        j[0] = (1.0 - e_y) / beta;
        let mut wp = 1.0;
        for k in 0..deg {
            wp *= w;
            j[k + 1] = ((k + 1) as f64 * j[k] - wp * e_y) / beta;
        }
    } else {
        // series for the top moment, then downward recurrence
        let top = deg;
        let mut term = 1.0 / (top + 1) as f64;
        let mut sum = term;
        let mut m = 1usize;
        loop {
            term *= y / (top + 1 + m) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            m += 1;
            if m > 2000 {
                break;
            }
        }
        j[top] = w.powi(top as i32 + 1) * e_y * sum;
        for k in (0..top).rev() {
            j[k] = (beta * j[k + 1] + w.powi(k as i32 + 1) * e_y) / (k + 1) as f64;
        }
    }
    out.clear();
    let e_lo = (-beta * lo).exp();
    for b in 0..=deg {
        let mut acc = 0.0;
        let mut binom = 1.0;
        // Σ_{k=0}^{b} C(b,k) lo^{b-k} J_k
        for k in 0..=b {
            if k > 0 {
                binom *= (b - k + 1) as f64 / k as f64;
            }
            acc += binom * lo.powi((b - k) as i32) * j[k];
        }
        out.push(e_lo * acc);
    }
}

/// Surface integral of every channel at `r12 = p`.
pub fn reduce_surface_integral(
    integrand: &SurfaceIntegrand,
    p: f64,
    settings: &QuadratureSettings,
) -> Result<Vec<f64>> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidGrid(format!("surface parameter must be positive, got {p}")));
    }
    let mut panels = settings.initial_panels.max(1);
    let (mut prev, _) = integrand.integrate_at(p, panels);
    let mut estimate = f64::INFINITY;
    while panels * 2 <= settings.max_panels {
        panels *= 2;
        let (cur, scale) = integrand.integrate_at(p, panels);
        estimate = cur
            .iter()
            .zip(&prev)
            .zip(&scale)
            .map(|((c, q), s)| if *s > 0.0 { (c - q).abs() / s } else { 0.0 })
            .fold(0.0, f64::max);
        prev = cur;
        if estimate <= settings.tolerance {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureFailure { p, estimate })
}

/// Coefficients of the averaged equation for χ sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub grid: PGrid,
    /// `r12` probability density of φ, normalized so the grid trapezoid is 1.
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    /// Energy of φ used in the large-`p` boundary condition.
    pub e0: f64,
    /// Part of `e0` due to electron repulsion; dropped when the interaction is off.
    pub e0_repulsion: f64,
    /// Grid trapezoid of the absolute surface measure before normalization.
    pub raw_norm: f64,
    pub nuclear_charge: u32,
    /// Slowest orbital decay rate in φ, sets the asymptotic form of χ.
    pub zeta_min: f64,
}

/// Reference energy `E0` entering the large-`p` boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum E0Mode {
    /// `h(p)` at the outer grid point.
    #[default]
    OuterLocalEnergy,
    /// `⟨φ|H0|φ⟩`, one-electron part only.
    H0Expectation,
    /// `⟨φ|H|φ⟩`, electron repulsion included.
    TotalExpectation,
    Override(f64),
}

impl E0Mode {
    /// `(E0, repulsion part of E0)`; `h_outer` is `h` at the last grid point.
    pub fn evaluate(self, ansatz: &PairAnsatz, h_outer: f64) -> (f64, f64) {
        match self {
            E0Mode::TotalExpectation => {
                let vee = repulsion_expectation(ansatz);
                (h0_expectation(ansatz) + vee, vee)
            }
            E0Mode::H0Expectation => (h0_expectation(ansatz), 0.0),
            E0Mode::OuterLocalEnergy => (h_outer, 0.0),
            E0Mode::Override(e) => (e, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientOptions {
    pub quadrature: QuadratureSettings,
    pub e0: E0Mode,
}

/// Jacobian-weighted channels `[S, X, Y, H]`; the drift coefficient is
/// `u = (p·X + Y/p) / S`.
fn coefficient_integrand(ansatz: &PairAnsatz) -> SurfaceIntegrand {
    let e = ansatz.expansion();
    let z = ansatz.nuclear_charge as f64;
    let phi = &e.value;
    let phi2 = phi.mul(phi);
    let pd1 = phi.mul(&e.d1);
    let pd2 = phi.mul(&e.d2);

    let s = phi2.monomial(1.0, 1, 1);

    let mut x = pd1.monomial(0.5, 0, 1);
    x.add_scaled(&pd2.monomial(0.5, 1, 0), 1.0);

    let mut y = pd1.monomial(0.5, 2, 1);
    y.add_scaled(&pd1.monomial(-0.5, 0, 3), 1.0);
    y.add_scaled(&pd2.monomial(0.5, 1, 2), 1.0);
    y.add_scaled(&pd2.monomial(-0.5, 3, 0), 1.0);
    y.add_scaled(&phi2.monomial(2.0, 1, 1), 1.0);

    let mut lap = e.d11.scaled(-0.5);
    lap.add_scaled(&e.d22, -0.5);
    let mut h = phi.mul(&lap).monomial(1.0, 1, 1);
    h.add_scaled(&pd1.monomial(-1.0, 0, 1), 1.0);
    h.add_scaled(&pd2.monomial(-1.0, 1, 0), 1.0);
    h.add_scaled(&phi2.monomial(-z, 0, 1), 1.0);
    h.add_scaled(&phi2.monomial(-z, 1, 0), 1.0);

    SurfaceIntegrand::weighted(&[s, x, y, h])
}

/// Raw (unnormalized-by-grid) surface measure and coefficient values at one `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCoefficients {
    pub s_abs: f64,
    pub u: f64,
    pub h: f64,
}

pub fn coefficients_at(
    integrand_cache: &CoefficientIntegrand,
    p: f64,
    settings: &QuadratureSettings,
) -> Result<PointCoefficients> {
    let v = reduce_surface_integral(&integrand_cache.0, p, settings)?;
    let (s, x, y, h) = (v[0], v[1], v[2], v[3]);
    if !(s > 0.0) {
        return Err(Error::QuadratureFailure { p, estimate: f64::NAN });
    }
    Ok(PointCoefficients {
        s_abs: s,
        u: (p * x + y / p) / s,
        h: h / s,
    })
}

/// Prepared integrand for repeated coefficient evaluation of one ansatz.
#[derive(Debug, Clone)]
pub struct CoefficientIntegrand(SurfaceIntegrand);

impl CoefficientIntegrand {
    pub fn new(ansatz: &PairAnsatz) -> Self {
        Self(coefficient_integrand(&canonical_labels(ansatz)))
    }
}

/// Every channel is bilinear in φ, so the orbital labels (and the sign they
/// carry for the triplet) can be put in a fixed order. Relabeled ansätze then
/// give bit-identical coefficients.
fn canonical_labels(ansatz: &PairAnsatz) -> PairAnsatz {
    let key = |o: &OrbitalSpec| (o.kind == OrbitalKind::TwoS, o.zeta);
    let mut a = *ansatz;
    if key(&a.orb2).partial_cmp(&key(&a.orb1)) == Some(std::cmp::Ordering::Less) {
        std::mem::swap(&mut a.orb1, &mut a.orb2);
    }
    a
}

/// Samples `s, t, u, h` on every grid point.
pub fn compute_coefficients(
    ansatz: &PairAnsatz,
    grid: &PGrid,
    options: &CoefficientOptions,
) -> Result<CoefficientTable> {
    ansatz.validate()?;
    let integrand = CoefficientIntegrand::new(ansatz);
    let points = grid.points();
    let values: Vec<PointCoefficients> = points
        .par_iter()
        .map(|&p| coefficients_at(&integrand, p, &options.quadrature))
        .collect::<Result<_>>()?;
    let s_abs: Vec<f64> = values.iter().map(|v| v.s_abs).collect();
    let raw_norm = grid.trapezoid(&s_abs);
    let (e0, e0_repulsion) = options.e0.evaluate(ansatz, values[grid.n - 1].h);
    Ok(CoefficientTable {
        grid: *grid,
        s: s_abs.iter().map(|v| v / raw_norm).collect(),
        t: vec![2.0; grid.n],
        u: values.iter().map(|v| v.u).collect(),
        h: values.iter().map(|v| v.h).collect(),
        e0,
        e0_repulsion,
        raw_norm,
        nuclear_charge: ansatz.nuclear_charge,
        zeta_min: ansatz.slowest_decay(),
    })
}

/// Closed-form `r12` density for `φ = 1s(ζ)·1s(ζ)`, built from explicit
/// antiderivatives of `x^k e^{-βx}` and independent of the quadrature path.
pub fn s_oracle_1s1s(zeta: f64, p: f64) -> f64 {
    let beta = 2.0 * zeta;
    // ∫_lo^hi r2 e^{-β r2} dr2 = G(lo) - G(hi), G(x) = e^{-βx}(x/β + 1/β²)
    // inner region r1 < p: lower limit p - r1, polynomial after cancelling e^{-β r1}
    let near = p.powi(3) / (6.0 * beta) + p * p / (2.0 * beta * beta);
    // ∫₀^∞ r1 e^{-2β r1} ((p + r1)/β + 1/β²) dr1, upper limit r1 + p over all r1
    let far_upper = (p / beta + 1.0 / (beta * beta)) * half_line_moment(1, 2.0 * beta)
        + half_line_moment(2, 2.0 * beta) / beta;
    // r1 > p, lower limit r1 - p; substitute x = r1 - p
    let far_lower = half_line_moment(2, 2.0 * beta) / beta
        + (p / beta + 1.0 / (beta * beta)) * half_line_moment(1, 2.0 * beta)
        + (p / (beta * beta)) * half_line_moment(0, 2.0 * beta);
    let radial = (near + far_lower - far_upper) * (-beta * p).exp();
    // (p/2) × (2ζ^{3/2})⁴
    0.5 * p * 16.0 * zeta.powi(6) * radial
}

fn half_line_moment(k: usize, a: f64) -> f64 {
    factorial(k) / a.powi(k as i32 + 1)
}

/// Writes `(p, s, t, u, h)` rows with 15 significant digits.
pub fn write_coefficients_csv<W: std::io::Write>(table: &CoefficientTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "s", "t", "u", "h"])?;
    for (i, p) in table.grid.points().iter().enumerate() {
        w.write_record([
            fmt15(*p),
            fmt15(table.s[i]),
            fmt15(table.t[i]),
            fmt15(table.u[i]),
            fmt15(table.h[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbitals::{OrbitalSpec, SpinSymmetry};

    fn one_s_pair(z1: f64, z2: f64, z: u32) -> PairAnsatz {
        PairAnsatz::new(
            OrbitalSpec::one_s(z1).unwrap(),
            OrbitalSpec::one_s(z2).unwrap(),
            SpinSymmetry::Singlet,
            z,
        )
        .unwrap()
    }

    fn density(ans: &PairAnsatz) -> SurfaceIntegrand {
        let phi = ans.expansion().value;
        SurfaceIntegrand::from_densities(&[phi.mul(&phi)])
    }

    #[test]
    fn inner_moments_match_quadrature() {
        let mut m = Vec::new();
        for &(beta, lo, width) in &[(0.5, 0.0, 0.01), (4.0, 3.0, 2.0), (2.0, 0.2, 40.0), (1e-9, 1.0, 1.0)] {
            inner_moments(beta, lo, width, 6, &mut m);
            for b in 0..=6 {
                let mut q = [0.0];
                composite_into(lo, lo + width, 64, &mut q, &mut |t, w, o| {
                    o[0] += w * t.powi(b as i32) * (-beta * t).exp()
                });
                assert!(((m[b] - q[0]) / q[0]).abs() < 1e-12, "beta={beta} lo={lo} w={width} b={b}");
            }
        }
    }

    #[test]
    fn oracle_matches_symbolic_expression() {
        for &zeta in &[0.7f64, 1.0, 2.0, 6.0] {
            for &p in &[0.05, 0.4, 1.0, 3.0] {
                let zp = zeta * p;
                let expect = zeta.powi(3) * p * p * (3.0 + 6.0 * zp + 4.0 * zp * zp) * (-2.0 * zp).exp() / 6.0;
                assert!(((s_oracle_1s1s(zeta, p) - expect) / expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn oracle_small_p_and_scaling() {
        assert!(s_oracle_1s1s(1.0, 1e-3) < s_oracle_1s1s(1.0, 2e-3));
        let ratio0 = s_oracle_1s1s(2.5, 0.1) / s_oracle_1s1s(1.0, 0.25);
        for &p in &[0.3, 0.8, 2.0, 5.0] {
            let r = s_oracle_1s1s(2.5, p) / s_oracle_1s1s(1.0, 2.5 * p);
            assert!((r - ratio0).abs() < 1e-12 * ratio0);
        }
        assert!((ratio0 - 2.5).abs() < 1e-12);
    }

    #[test]
    fn generic_path_matches_oracle_at_unit_p() {
        let ans = one_s_pair(1.0, 1.0, 1);
        let v = reduce_surface_integral(&density(&ans), 1.0, &QuadratureSettings::default()).unwrap();
        let o = s_oracle_1s1s(1.0, 1.0);
        assert!(((v[0] - o) / o).abs() < 1e-9);
    }

    #[test]
    fn density_integrates_to_one() {
        let ans = one_s_pair(1.3, 1.3, 1);
        let integ = density(&ans);
        // fine trapezoid of the exact-quadrature density
        let n = 4000;
        let pmax = 30.0;
        let dp = pmax / n as f64;
        let mut acc = 0.0;
        for i in 1..=n {
            let p = i as f64 * dp;
            let v = reduce_surface_integral(&integ, p, &QuadratureSettings::default()).unwrap()[0];
            acc += if i == n { 0.5 * v } else { v };
        }
        assert!((acc * dp - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_failure_carries_estimate() {
        let ans = one_s_pair(1.0, 3.0, 2);
        let settings = QuadratureSettings {
            tolerance: 1e-30,
            initial_panels: 1,
            max_panels: 4,
        };
        match reduce_surface_integral(&density(&ans), 0.7, &settings) {
            Err(Error::QuadratureFailure { p, estimate }) => {
                assert_eq!(p, 0.7);
                assert!(estimate.is_finite() && estimate > 0.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn hydrogenic_triplet_has_constant_h_equal_to_limit() {
        for z in [2u32, 5] {
            let zf = z as f64;
            let ans = PairAnsatz::new(
                OrbitalSpec::one_s(zf).unwrap(),
                OrbitalSpec::two_s(zf).unwrap(),
                SpinSymmetry::Triplet,
                z,
            )
            .unwrap();
            let grid = PGrid::for_ion(z, 20.0, 100).unwrap();
            let t = compute_coefficients(&ans, &grid, &CoefficientOptions::default()).unwrap();
            let exact = -0.625 * zf * zf;
            let dev = t.h.iter().map(|h| (h - exact).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-7 * zf * zf, "Z={z}: {dev}");
            assert!((t.e0 - exact).abs() < 1e-12);
            assert_eq!(t.zeta_min, 0.5 * zf);
        }
    }

    #[test]
    fn e0_modes() {
        let ans = one_s_pair(1.4, 0.6, 1);
        let grid = PGrid::for_ion(1, 20.0, 60).unwrap();
        let table = |e0| compute_coefficients(&ans, &grid, &CoefficientOptions { e0, ..Default::default() }).unwrap();
        let h0 = table(E0Mode::H0Expectation);
        let total = table(E0Mode::TotalExpectation);
        assert!((total.e0 - total.e0_repulsion - h0.e0).abs() < 1e-14);
        assert!(total.e0_repulsion > 0.0);
        assert_eq!(table(E0Mode::Override(-0.3)).e0, -0.3);
        let outer = table(E0Mode::OuterLocalEnergy);
        assert_eq!(outer.e0, outer.h[grid.n - 1]);
        assert_eq!(outer.e0_repulsion, 0.0);
        // h flattens out at large p
        let integ = CoefficientIntegrand::new(&ans);
        let q = QuadratureSettings::default();
        let h = |p| coefficients_at(&integ, p, &q).unwrap().h;
        let (d1, d2) = ((h(40.0) - h(20.0)).abs(), (h(80.0) - h(40.0)).abs());
        assert!(d2 < 0.6 * d1, "{d1} {d2}");
    }

    #[test]
    fn hydrogenic_pair_has_constant_h() {
        for z in [1u32, 2, 6, 10] {
            let ans = one_s_pair(z as f64, z as f64, z);
            let grid = PGrid::for_ion(z, 20.0, 200).unwrap();
            let t = compute_coefficients(&ans, &grid, &CoefficientOptions::default()).unwrap();
            let zz = (z * z) as f64;
            let dev = t.h.iter().map(|h| (h + zz).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "Z={z}: {dev}");
            assert!(t.s.iter().all(|&s| s > 0.0));
            assert!(t.t.iter().all(|&x| x == 2.0));
            assert!(t.u.iter().all(|u| u.is_finite()));
            assert!((t.e0 + zz).abs() < 1e-12);
            assert_eq!(t.e0_repulsion, 0.0);
            assert!((t.raw_norm - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn drift_equals_log_derivative_of_density() {
        // u = s'/s follows from the divergence theorem on the surface foliation
        let zeta = 1.6;
        let ans = one_s_pair(zeta, zeta, 2);
        let integ = CoefficientIntegrand::new(&ans);
        for &p in &[0.1, 0.5, 1.0, 2.5] {
            let c = coefficients_at(&integ, p, &QuadratureSettings::default()).unwrap();
            let h = 1e-5;
            let ds = (s_oracle_1s1s(zeta, p + h) - s_oracle_1s1s(zeta, p - h)) / (2.0 * h);
            let expect = ds / s_oracle_1s1s(zeta, p);
            assert!((c.u - expect).abs() < 1e-7 * expect.abs().max(1.0), "p={p}");
        }
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let ans = one_s_pair(2.0, 2.0, 2);
        let grid = PGrid::for_ion(2, 20.0, 60).unwrap();
        let t = compute_coefficients(&ans, &grid, &CoefficientOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_coefficients_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,s,t,u,h");
        assert_eq!(lines.len(), 61);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[2], "2.00000000000000e0");
    }
}
