use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform interior grid `p_i = i·Δp`, `i = 1..=n`, `Δp = p_max / n`.
/// The origin is excluded because the Coulomb term is singular there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub p_max: f64,
    pub n: usize,
}

impl PGrid {
    pub fn new(p_max: f64, n: usize) -> Result<Self> {
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::InvalidGrid(format!("p_max must be positive, got {p_max}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { p_max, n })
    }

    /// Grid on `0 < p ≤ p_max_times_z / Z`.
    pub fn for_ion(nuclear_charge: u32, p_max_times_z: f64, n: usize) -> Result<Self> {
        Self::new(p_max_times_z / nuclear_charge as f64, n)
    }

    pub fn spacing(&self) -> f64 {
        self.p_max / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Trapezoid rule over `[0, p_max]` for samples on the interior points,
    /// with the integrand taken as zero at the origin.
    ///
    /// Every unit-integral invariant in the crate (density of `r12`,
    /// normalization of χ) goes through this one rule.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n, "sample count must match the grid");
        let last = values[self.n - 1];
        let body: f64 = values[..self.n - 1].iter().sum();
        self.spacing() * (body + 0.5 * last)
    }
}
