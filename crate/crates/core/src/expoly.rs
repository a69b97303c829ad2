//! Polynomial-times-exponential functions in one and two radial variables.
//!
//! Every integrand the two-electron pipeline needs is a finite sum of
//! `r1^a r2^b exp(-alpha1 r1 - alpha2 r2)` terms, so this small algebra is
//! enough to build them exactly from the orbital definitions.

/// `poly(r) * exp(-alpha r)`, with `coeffs[k]` multiplying `r^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

impl ExpPoly {
    pub fn new(alpha: f64, coeffs: Vec<f64>) -> Self {
        Self { alpha, coeffs }
    }

    pub fn eval(&self, r: f64) -> f64 {
        horner(&self.coeffs, r) * (-self.alpha * r).exp()
    }

    pub fn derivative(&self) -> ExpPoly {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] -= self.alpha * c;
            if k > 0 {
                out[k - 1] += k as f64 * c;
            }
        }
        ExpPoly::new(self.alpha, out)
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        ExpPoly::new(self.alpha + other.alpha, poly_mul(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, c: f64) -> ExpPoly {
        ExpPoly::new(self.alpha, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiply by `r^k`.
    pub fn shift(&self, k: usize) -> ExpPoly {
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        ExpPoly::new(self.alpha, coeffs)
    }

    /// Exact `∫₀^∞ r^extra · self(r) dr`.
    pub fn integrate_half_line(&self, extra: usize) -> f64 {
        assert!(self.alpha > 0.0, "half-line integral needs a decaying exponential");
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * factorial(k + extra) / self.alpha.powi((k + extra + 1) as i32))
            .sum()
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// One exponent group of a [`SeparableFn`]: `Σ c[a][b] r1^a r2^b` times
/// `exp(-alpha1 r1 - alpha2 r2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpGroup {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Row-major `(deg1 + 1) x (deg2 + 1)` coefficient matrix.
    pub coeffs: Vec<Vec<f64>>,
}

impl ExpGroup {
    fn deg2(&self) -> usize {
        self.coeffs.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn add_at(&mut self, a: usize, b: usize, c: f64) {
        if self.coeffs.len() <= a {
            self.coeffs.resize(a + 1, Vec::new());
        }
        let row = &mut self.coeffs[a];
        if row.len() <= b {
            row.resize(b + 1, 0.0);
        }
        row[b] += c;
    }
}

/// A function of `(r1, r2)` represented as a sum of exponent groups.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparableFn {
    pub groups: Vec<ExpGroup>,
}

impl SeparableFn {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `f(r1) · g(r2)`.
    pub fn product(f: &ExpPoly, g: &ExpPoly) -> Self {
        let mut group = ExpGroup {
            alpha1: f.alpha,
            alpha2: g.alpha,
            coeffs: Vec::new(),
        };
        for (a, &x) in f.coeffs.iter().enumerate() {
            for (b, &y) in g.coeffs.iter().enumerate() {
                group.add_at(a, b, x * y);
            }
        }
        Self {
            groups: vec![group],
        }
    }

    fn group_mut(&mut self, alpha1: f64, alpha2: f64) -> &mut ExpGroup {
        let idx = match self
            .groups
            .iter()
            .position(|g| g.alpha1 == alpha1 && g.alpha2 == alpha2)
        {
            Some(i) => i,
            None => {
                self.groups.push(ExpGroup {
                    alpha1,
                    alpha2,
                    coeffs: Vec::new(),
                });
                self.groups.len() - 1
            }
        };
        &mut self.groups[idx]
    }

    pub fn add_scaled(&mut self, other: &SeparableFn, c: f64) {
        for g in &other.groups {
            let target = self.group_mut(g.alpha1, g.alpha2);
            for (a, row) in g.coeffs.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    target.add_at(a, b, c * v);
                }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> SeparableFn {
        let mut out = SeparableFn::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, other: &SeparableFn) -> SeparableFn {
        let mut out = SeparableFn::zero();
        for g in &self.groups {
            for h in &other.groups {
                let target = out.group_mut(g.alpha1 + h.alpha1, g.alpha2 + h.alpha2);
                for (a1, row1) in g.coeffs.iter().enumerate() {
                    for (b1, &x) in row1.iter().enumerate() {
                        if x == 0.0 {
                            continue;
                        }
                        for (a2, row2) in h.coeffs.iter().enumerate() {
                            for (b2, &y) in row2.iter().enumerate() {
                                target.add_at(a1 + a2, b1 + b2, x * y);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiply by `c · r1^i · r2^j`.
    pub fn monomial(&self, c: f64, i: usize, j: usize) -> SeparableFn {
        let mut out = SeparableFn::zero();
        for g in &self.groups {
            let target = out.group_mut(g.alpha1, g.alpha2);
            for (a, row) in g.coeffs.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    target.add_at(a + i, b + j, c * v);
                }
            }
        }
        out
    }

    pub fn eval(&self, r1: f64, r2: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let poly: f64 = g
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(a, row)| r1.powi(a as i32) * horner(row, r2))
                    .sum();
                poly * (-g.alpha1 * r1 - g.alpha2 * r2).exp()
            })
            .sum()
    }

    pub fn max_deg2(&self) -> usize {
        self.groups.iter().map(ExpGroup::deg2).max().unwrap_or(0)
    }
}
