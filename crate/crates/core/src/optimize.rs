//! Deterministic derivative-free minimizers.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Width of the final interval / simplex in the parameters.
    pub x: f64,
    /// Spread of objective values across the final interval / simplex.
    pub f: f64,
    pub max_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search, preceded by a downhill expansion from `x0` with
/// initial step `step` to bracket the minimum.
pub fn golden_section<F>(mut f: F, x0: f64, step: f64, tol: &Tolerances) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut evals = 0usize;
    let mut eval = |x: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(x)
    };
    let mut best = (x0, eval(x0, &mut evals)?);
    let out_of_budget = |evals: usize, best: (f64, f64)| Minimum {
        x: vec![best.0],
        f: best.1,
        evaluations: evals,
        converged: false,
    };

    // bracket: a < b < c with f(b) <= f(a), f(c)
    let (mut a, mut fa) = best;
    let (mut b, mut fb) = (x0 + step, eval(x0 + step, &mut evals)?);
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    if fb < best.1 {
        best = (b, fb);
    }
    let mut c = b + (b - a) / INV_PHI;
    let mut fc = eval(c, &mut evals)?;
    while fc < fb {
        if evals >= tol.max_evaluations {
            return Ok(out_of_budget(evals, if fc < best.1 { (c, fc) } else { best }));
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + (b - a) / INV_PHI;
        fc = eval(c, &mut evals)?;
    }
    if fb < best.1 {
        best = (b, fb);
    }
    let _ = fa;
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1, &mut evals)?;
    let mut f2 = eval(x2, &mut evals)?;
    loop {
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
        if hi - lo < tol.x && (f1 - f2).abs() < tol.f {
            return Ok(Minimum {
                x: vec![best.0],
                f: best.1,
                evaluations: evals,
                converged: true,
            });
        }
        if evals >= tol.max_evaluations {
            return Ok(out_of_budget(evals, best));
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1, &mut evals)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2, &mut evals)?;
        }
    }
}

/// Nelder-Mead in two dimensions with an axis-aligned initial simplex.
pub fn nelder_mead_2d<F>(mut f: F, x0: [f64; 2], step: f64, tol: &Tolerances) -> Result<Minimum>
where
    F: FnMut([f64; 2]) -> Result<f64>,
{
    let mut evals = 0usize;
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    for v in [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]] {
        evals += 1;
        simplex.push((v, f(v)?));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0], simplex[2]);
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| (v[0] - best.0[0]).abs().max((v[1] - best.0[1]).abs()))
            .fold(0.0, f64::max);
        if size < tol.x && (worst.1 - best.1).abs() < tol.f {
            return Ok(Minimum {
                x: best.0.to_vec(),
                f: best.1,
                evaluations: evals,
                converged: true,
            });
        }
        if evals >= tol.max_evaluations {
            return Ok(Minimum {
                x: best.0.to_vec(),
                f: best.1,
                evaluations: evals,
                converged: false,
            });
        }
        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (worst.0[0] - centroid[0]),
                centroid[1] + t * (worst.0[1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr)?;
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(xe)?;
            evals += 1;
            simplex[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(-0.5);
                (xc, f(xc)?)
            } else {
                let xc = along(0.5);
                (xc, f(xc)?)
            };
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[2] = (xc, fc);
            } else {
                let b = simplex[0].0;
                for item in simplex.iter_mut().skip(1) {
                    let v = [0.5 * (b[0] + item.0[0]), 0.5 * (b[1] + item.0[1])];
                    *item = (v, f(v)?);
                    evals += 1;
                }
            }
        }
    }
}
