//! Random points on constant interaction potential surfaces
//! `Σ_{i<j} 1/r_ij = 1/p`.
//!
//! The surface for `n` particles is built recursively: the potential is split
//! as `1/p = 1/p_{n-1} + 1/q_n`, a configuration of the first `n - 1`
//! particles is drawn on `S(p_{n-1})`, and the last particle is placed on the
//! locus where its own contribution equals `1/q_n`. For two particles that
//! locus is a sphere around particle 1; for three it is the circle where the
//! spheres of radii `r13` and `r23` meet.
//!
//! The split of `1/p` carries no natural measure. Here `1/q` is drawn uniform
//! in `(0, 1/p)` and `1/r13` uniform in `(0, 1/q)`, and every sample reports
//! its inverse proposal density as a weight so callers can re-weight.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfiguration {
    pub positions: Vec<Vec3>,
}

impl ParticleConfiguration {
    pub fn new(positions: Vec<Vec3>) -> Result<Self> {
        let c = Self { positions };
        c.validate()?;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::InvalidSpec(format!("need at least two particles, got {}", self.n())));
        }
        if self.positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("positions must be finite".into()));
        }
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if distance(&self.positions[i], &self.positions[j]) == 0.0 {
                    return Err(Error::DegenerateConfiguration(i, j));
                }
            }
        }
        Ok(())
    }

    /// `Σ_i 1/r_ik` for every particle `k`.
    pub fn particle_potentials(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = 1.0 / distance(&self.positions[i], &self.positions[j]);
                out[i] += v;
                out[j] += v;
            }
        }
        out
    }

    /// Renumbers particles so that `Σ_i 1/r_il ≤ Σ_i 1/r_ik` whenever `l < k`.
    pub fn canonical_order(&self) -> ParticleConfiguration {
        let v = self.particle_potentials();
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        ParticleConfiguration {
            positions: idx.iter().map(|&i| self.positions[i]).collect(),
        }
    }

    pub fn is_canonically_ordered(&self) -> bool {
        self.particle_potentials().windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub n: usize,
    pub p: f64,
}

impl SurfaceSpec {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidSpec(format!("surface parameter p must be positive, got {p}")));
        }
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported(format!("surface sampling supports n = 2 or 3, got {n}")));
        }
        Ok(Self { n, p })
    }
}

fn distance(a: &Vec3, b: &Vec3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `Σ_{i<j} 1/r_ij`.
pub fn potential(config: &ParticleConfiguration) -> Result<f64> {
    config.validate()?;
    let mut acc = 0.0;
    for i in 0..config.n() {
        for j in i + 1..config.n() {
            acc += 1.0 / distance(&config.positions[i], &config.positions[j]);
        }
    }
    Ok(acc)
}

/// Maps a configuration onto the surface `1/p_target` by uniform scaling.
pub fn scale_to(config: &ParticleConfiguration, p_target: f64) -> Result<ParticleConfiguration> {
    if !(p_target > 0.0 && p_target.is_finite()) {
        return Err(Error::InvalidSpec(format!("target p must be positive, got {p_target}")));
    }
    let factor = p_target * potential(config)?;
    Ok(ParticleConfiguration {
        positions: config
            .positions
            .iter()
            .map(|r| [r[0] * factor, r[1] * factor, r[2] * factor])
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    /// Radius of the ball particle 1 is drawn from, Bohr.
    pub ball_radius: f64,
    /// Attempts allowed per requested sample before giving up.
    pub max_attempts_per_sample: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self {
            ball_radius: 5.0,
            max_attempts_per_sample: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub config: ParticleConfiguration,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub spec: SurfaceSpec,
    pub samples: Vec<SurfaceSample>,
    pub attempts: usize,
    pub rejected: usize,
}

impl SampleSet {
    pub fn rejection_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.rejected as f64 / self.attempts as f64
        }
    }

    /// One JSON object per line: positions, weight and potential.
    pub fn write_jsonl<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            positions: &'a [Vec3],
            weight: f64,
            potential: f64,
        }
        for s in &self.samples {
            let line = Line {
                positions: &s.config.positions,
                weight: s.weight,
                potential: potential(&s.config)?,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    [rho * phi.cos(), rho * phi.sin(), z]
}

fn in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vec3 {
    let r = radius * rng.gen::<f64>().cbrt();
    let u = unit_vector(rng);
    [r * u[0], r * u[1], r * u[2]]
}

fn add_scaled(a: &Vec3, b: &Vec3, c: f64) -> Vec3 {
    [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]]
}

/// Two unit vectors orthogonal to `e` and to each other.
fn orthonormal_pair(e: &Vec3) -> (Vec3, Vec3) {
    let helper = if e[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * e[0] + helper[1] * e[1] + helper[2] * e[2];
    let a = add_scaled(&helper, e, -d);
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let a = [a[0] / na, a[1] / na, a[2] / na];
    let b = [
        e[1] * a[2] - e[2] * a[1],
        e[2] * a[0] - e[0] * a[2],
        e[0] * a[1] - e[1] * a[0],
    ];
    (a, b)
}

/// Particle 1 in the ball, particle 2 on the sphere of radius `r12` around it.
fn draw_pair<R: Rng>(rng: &mut R, r12: f64, settings: &SamplerSettings) -> (Vec3, Vec3, Vec3) {
    let r1 = in_ball(rng, settings.ball_radius);
    let e = unit_vector(rng);
    (r1, add_scaled(&r1, &e, r12), e)
}

fn ball_volume(radius: f64) -> f64 {
    4.0 / 3.0 * PI * radius.powi(3)
}

/// `count` configurations on `S(p)`, renumbered into canonical order.
pub fn sample_surface(
    spec: SurfaceSpec,
    count: usize,
    seed: u64,
    settings: &SamplerSettings,
) -> Result<SampleSet> {
    let spec = SurfaceSpec::new(spec.n, spec.p)?;
    if count == 0 {
        return Err(Error::InvalidSpec("sample count must be at least 1".into()));
    }
    if !(settings.ball_radius > 0.0) {
        return Err(Error::InvalidSpec("ball radius must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let volume = ball_volume(settings.ball_radius);
    let budget = count.saturating_mul(settings.max_attempts_per_sample.max(1));
    let mut samples = Vec::with_capacity(count);
    let mut attempts = 0;
    let mut rejected = 0;
    while samples.len() < count {
        if attempts >= budget {
            return Err(Error::Solver(format!(
                "surface sampler gave up after {attempts} attempts ({rejected} rejected)"
            )));
        }
        attempts += 1;
        let drawn = match spec.n {
            2 => {
                let (r1, r2, _) = draw_pair(&mut rng, spec.p, settings);
                Some((vec![r1, r2], volume * 4.0 * PI * spec.p * spec.p))
            }
            _ => draw_triple(&mut rng, spec.p, settings, volume),
        };
        let Some((positions, weight)) = drawn else {
            rejected += 1;
            continue;
        };
        let config = ParticleConfiguration::new(positions)?;
        // remove rounding drift from the construction
        let config = scale_to(&config, spec.p)?.canonical_order();
        samples.push(SurfaceSample { config, weight });
    }
    Ok(SampleSet {
        spec,
        samples,
        attempts,
        rejected,
    })
}

fn draw_triple<R: Rng>(
    rng: &mut R,
    p: f64,
    settings: &SamplerSettings,
    volume: f64,
) -> Option<(Vec<Vec3>, f64)> {
    let total = 1.0 / p;
    let inv_q: f64 = total * rng.gen_range(f64::EPSILON..1.0);
    let inv_p2 = total - inv_q;
    if !(inv_p2 > 0.0) {
        return None;
    }
    let p2 = 1.0 / inv_p2;
    let inv_r13: f64 = inv_q * rng.gen_range(f64::EPSILON..1.0);
    let inv_r23 = inv_q - inv_r13;
    if !(inv_r23 > 0.0) {
        return None;
    }
    let (r13, r23) = (1.0 / inv_r13, 1.0 / inv_r23);
    if (r13 - r23).abs() >= p2 || r13 + r23 <= p2 {
        return None;
    }
    let (r1, r2, e) = draw_pair(rng, p2, settings);
    let a = (r13 * r13 - r23 * r23 + p2 * p2) / (2.0 * p2);
    let rho = (r13 * r13 - a * a).max(0.0).sqrt();
    let (u, v) = orthonormal_pair(&e);
    let angle: f64 = rng.gen_range(0.0..2.0 * PI);
    let centre = add_scaled(&r1, &e, a);
    let r3 = add_scaled(&add_scaled(&centre, &u, rho * angle.cos()), &v, rho * angle.sin());
    let weight = volume * 4.0 * PI * p2 * p2 * total * inv_q * 2.0 * PI * rho;
    Some((vec![r1, r2, r3], weight))
}
