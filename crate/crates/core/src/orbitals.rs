//! Hydrogenic radial orbitals, the (anti)symmetrized pair function and
//! analytic one-electron expectation values.
//!
//! Radial functions are normalized as `∫ φ(r)² r² dr = 1`; the angular factor
//! `1/√(4π)` is carried by the surface measure instead.
//!
//! Method note: in the radial form of the transformed equation the second
//! first-derivative term of the `dχ/dp` coefficient must involve `∂φ/∂r₂`
//! (the expression is the image of the first one under `r₁ ↔ r₂`). Some
//! printings show `∂φ/∂r₁` there; this crate uses `∂φ/∂r₂`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expoly::{factorial, ExpPoly, SeparableFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitalKind {
    OneS,
    TwoS,
}

/// Hydrogenic orbital with effective charge `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalSpec {
    pub kind: OrbitalKind,
    pub zeta: f64,
}

impl OrbitalSpec {
    pub fn new(kind: OrbitalKind, zeta: f64) -> Result<Self> {
        let spec = Self { kind, zeta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn one_s(zeta: f64) -> Result<Self> {
        Self::new(OrbitalKind::OneS, zeta)
    }

    pub fn two_s(zeta: f64) -> Result<Self> {
        Self::new(OrbitalKind::TwoS, zeta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta.is_finite() && self.zeta > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "effective charge must be positive and finite, got {}",
                self.zeta
            )));
        }
        Ok(())
    }

    /// The orbital as `poly(r)·exp(-alpha r)`.
    pub fn radial(&self) -> ExpPoly {
        let z = self.zeta;
        match self.kind {
            OrbitalKind::OneS => ExpPoly::new(z, vec![2.0 * z.powf(1.5)]),
            OrbitalKind::TwoS => {
                let c = z.powf(1.5) / std::f64::consts::SQRT_2;
                ExpPoly::new(0.5 * z, vec![c, -0.5 * z * c])
            }
        }
    }

    /// Asymptotic decay rate of the orbital, `exp(-rate·r)`.
    pub fn decay_rate(&self) -> f64 {
        self.radial().alpha
    }
}

/// Value, first and second radial derivative of an orbital at `r`.
pub fn eval_orbital(spec: &OrbitalSpec, r: f64) -> Result<(f64, f64, f64)> {
    spec.validate()?;
    if !(r >= 0.0) {
        return Err(Error::InvalidSpec(format!("radius must be non-negative, got {r}")));
    }
    let z = spec.zeta;
    let e = match spec.kind {
        OrbitalKind::OneS => {
            let f = 2.0 * z.powf(1.5) * (-z * r).exp();
            (f, -z * f, z * z * f)
        }
        OrbitalKind::TwoS => {
            let c = z.powf(1.5) / std::f64::consts::SQRT_2 * (-0.5 * z * r).exp();
            (
                c * (1.0 - 0.5 * z * r),
                c * (-z + 0.25 * z * z * r),
                c * (0.75 * z * z - 0.125 * z * z * z * r),
            )
        }
    };
    Ok(e)
}

/// `∫₀^∞ a(r) b(r) r² dr`.
pub fn overlap(a: &OrbitalSpec, b: &OrbitalSpec) -> f64 {
    a.radial().mul(&b.radial()).integrate_half_line(2)
}

/// `⟨a| -½∇² |b⟩` for s-type radial functions.
pub fn kinetic_element(a: &OrbitalSpec, b: &OrbitalSpec) -> f64 {
    let fa = a.radial();
    let fb = b.radial();
    let d1 = fb.derivative();
    let d2 = d1.derivative();
    -0.5 * fa.mul(&d2).integrate_half_line(2) - fa.mul(&d1).integrate_half_line(1)
}

/// `⟨a| 1/r |b⟩`.
pub fn inverse_r_element(a: &OrbitalSpec, b: &OrbitalSpec) -> f64 {
    a.radial().mul(&b.radial()).integrate_half_line(1)
}

/// `⟨a| -½∇² - Z/r |b⟩`.
pub fn one_electron_element(a: &OrbitalSpec, b: &OrbitalSpec, nuclear_charge: f64) -> f64 {
    kinetic_element(a, b) - nuclear_charge * inverse_r_element(a, b)
}

/// `∫₀^∞ f(x)/x · ∫₀^x g(y) dy dx` for radial densities that vanish like `x²`.
fn ordered_coulomb(f: &ExpPoly, g: &ExpPoly) -> f64 {
    let (a, b) = (f.alpha, g.alpha);
    let mut acc = 0.0;
    for (k, &d) in g.coeffs.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        // ∫₀^x y^k e^{-by} dy = k!/b^{k+1} [1 - e^{-bx} Σ_{m≤k} (bx)^m/m!]
        let mut full = 0.0;
        let mut tail = 0.0;
        for (j, &c) in f.coeffs.iter().enumerate().skip(1) {
            full += c * factorial(j - 1) / a.powi(j as i32);
            for m in 0..=k {
                tail += c * b.powi(m as i32) / factorial(m) * factorial(j - 1 + m)
                    / (a + b).powi((j + m) as i32);
            }
        }
        acc += d * factorial(k) / b.powi(k as i32 + 1) * (full - tail);
    }
    acc
}

/// `(ab|cd) = ∫∫ a(1)b(1) c(2)d(2) / r12` for s-type orbitals.
pub fn coulomb_element(a: &OrbitalSpec, b: &OrbitalSpec, c: &OrbitalSpec, d: &OrbitalSpec) -> f64 {
    let rho1 = a.radial().mul(&b.radial()).shift(2);
    let rho2 = c.radial().mul(&d.radial()).shift(2);
    ordered_coulomb(&rho1, &rho2) + ordered_coulomb(&rho2, &rho1)
}

/// `⟨φ| 1/r12 |φ⟩`.
pub fn repulsion_expectation(ansatz: &PairAnsatz) -> f64 {
    let (a, b) = (&ansatz.orb1, &ansatz.orb2);
    let s = ansatz.overlap();
    let sign = ansatz.symmetry.sign();
    (coulomb_element(a, a, b, b) + sign * coulomb_element(a, b, a, b)) / (1.0 + sign * s * s)
}

/// `⟨φ| H |φ⟩` including the electron repulsion.
pub fn total_expectation(ansatz: &PairAnsatz) -> f64 {
    h0_expectation(ansatz) + repulsion_expectation(ansatz)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinSymmetry {
    /// Symmetric spatial part (`+`).
    Singlet,
    /// Antisymmetric spatial part (`−`).
    Triplet,
}

impl SpinSymmetry {
    pub fn sign(self) -> f64 {
        match self {
            SpinSymmetry::Singlet => 1.0,
            SpinSymmetry::Triplet => -1.0,
        }
    }
}

/// `φ(r1, r2) = [a(r1) b(r2) ± b(r1) a(r2)] / √(2(1 ± S²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAnsatz {
    pub orb1: OrbitalSpec,
    pub orb2: OrbitalSpec,
    pub symmetry: SpinSymmetry,
    pub nuclear_charge: u32,
}

/// Pair function and its radial partial derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPartials {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d22: f64,
}

/// The pair function and its partials as exact separable expansions.
#[derive(Debug, Clone)]
pub struct PairExpansion {
    pub value: SeparableFn,
    pub d1: SeparableFn,
    pub d2: SeparableFn,
    pub d11: SeparableFn,
    pub d22: SeparableFn,
}

impl PairAnsatz {
    pub fn new(
        orb1: OrbitalSpec,
        orb2: OrbitalSpec,
        symmetry: SpinSymmetry,
        nuclear_charge: u32,
    ) -> Result<Self> {
        let ansatz = Self {
            orb1,
            orb2,
            symmetry,
            nuclear_charge,
        };
        ansatz.validate()?;
        Ok(ansatz)
    }

    pub fn validate(&self) -> Result<()> {
        self.orb1.validate()?;
        self.orb2.validate()?;
        if self.nuclear_charge == 0 {
            return Err(Error::InvalidAnsatz("nuclear charge must be positive".into()));
        }
        if self.symmetry == SpinSymmetry::Triplet {
            let s = self.overlap();
            if self.orb1 == self.orb2 || 1.0 - s * s < 1e-12 {
                return Err(Error::InvalidAnsatz(
                    "antisymmetric combination of identical orbitals vanishes".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn overlap(&self) -> f64 {
        overlap(&self.orb1, &self.orb2)
    }

    pub fn normalization(&self) -> f64 {
        let s = self.overlap();
        1.0 / (2.0 * (1.0 + self.symmetry.sign() * s * s)).sqrt()
    }

    pub fn zeta_min(&self) -> f64 {
        self.orb1.zeta.min(self.orb2.zeta)
    }

    /// Slowest exponential decay rate among the two orbitals.
    pub fn slowest_decay(&self) -> f64 {
        self.orb1.decay_rate().min(self.orb2.decay_rate())
    }

    pub fn expansion(&self) -> PairExpansion {
        let n = self.normalization();
        let sign = self.symmetry.sign();
        let a = [self.orb1.radial(), self.orb2.radial()];
        let da: Vec<ExpPoly> = a.iter().map(ExpPoly::derivative).collect();
        let dda: Vec<ExpPoly> = da.iter().map(ExpPoly::derivative).collect();
        let combine = |f1: &[ExpPoly], f2: &[ExpPoly]| {
            let mut out = SeparableFn::product(&f1[0], &f2[1]).scaled(n);
            out.add_scaled(&SeparableFn::product(&f1[1], &f2[0]), sign * n);
            out
        };
        PairExpansion {
            value: combine(&a, &a),
            d1: combine(&da, &a),
            d2: combine(&a, &da),
            d11: combine(&dda, &a),
            d22: combine(&a, &dda),
        }
    }
}

/// Pair function value and radial partials at `(r1, r2)`.
pub fn pair_value_and_partials(ansatz: &PairAnsatz, r1: f64, r2: f64) -> Result<PairPartials> {
    ansatz.validate()?;
    let (a1, da1, dda1) = eval_orbital(&ansatz.orb1, r1)?;
    let (b1, db1, ddb1) = eval_orbital(&ansatz.orb2, r1)?;
    let (a2, da2, dda2) = eval_orbital(&ansatz.orb1, r2)?;
    let (b2, db2, ddb2) = eval_orbital(&ansatz.orb2, r2)?;
    let n = ansatz.normalization();
    let s = ansatz.symmetry.sign();
    Ok(PairPartials {
        value: n * (a1 * b2 + s * b1 * a2),
        d1: n * (da1 * b2 + s * db1 * a2),
        d2: n * (a1 * db2 + s * b1 * da2),
        d11: n * (dda1 * b2 + s * ddb1 * a2),
        d22: n * (a1 * ddb2 + s * b1 * dda2),
    })
}

/// `⟨φ| -½∇₁² - ½∇₂² - Z/r₁ - Z/r₂ |φ⟩` in Hartree.
pub fn h0_expectation(ansatz: &PairAnsatz) -> f64 {
    let z = ansatz.nuclear_charge as f64;
    let (a, b) = (&ansatz.orb1, &ansatz.orb2);
    let s = ansatz.overlap();
    let sign = ansatz.symmetry.sign();
    let haa = one_electron_element(a, a, z);
    let hbb = one_electron_element(b, b, z);
    let hab = one_electron_element(a, b, z);
    (haa + hbb + sign * 2.0 * s * hab) / (1.0 + sign * s * s)
}
