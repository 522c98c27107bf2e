//! Seeded sampling helpers. Every randomized check in the crate draws from
//! a ChaCha stream seeded by the caller, so identical configurations
//! reproduce identical point sets, fields and reports.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Coord, Field, PointSet};
use crate::octonion::Octonion;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Octonion with coefficients uniform in `[-1, 1]`.
pub fn random_octonion(rng: &mut ChaCha8Rng) -> Octonion {
    let mut c = [0.0; 8];
    for v in c.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    Octonion::new(c)
}

/// Field with independent random octonion values on the given support.
pub fn random_field(support: &Arc<PointSet>, seed: u64) -> Field {
    let mut rng = rng_from_seed(seed);
    let values: Vec<Octonion> = (0..support.len()).map(|_| random_octonion(&mut rng)).collect();
    Field::from_fn(Arc::clone(support), |x| values[support.position(x).unwrap()])
}

/// `n` points drawn without replacement from a sorted pool.
pub fn sample_points(pool: &PointSet, n: usize, rng: &mut ChaCha8Rng) -> Vec<Coord> {
    let mut pts: Vec<Coord> = pool.iter().collect();
    pts.shuffle(rng);
    pts.truncate(n.min(pts.len()));
    pts.sort_unstable();
    pts
}

/// Quadratic octonion polynomial in the physical coordinates,
/// `f(x) = a + sum_l b_l x_l + sum_{l<=m} c_{lm} x_l x_m`.
#[derive(Debug, Clone)]
pub struct QuadraticPoly {
    pub constant: Octonion,
    pub linear: [Octonion; 8],
    pub quadratic: Vec<(usize, usize, Octonion)>,
}

impl QuadraticPoly {
    pub fn random(rng: &mut ChaCha8Rng) -> QuadraticPoly {
        let constant = random_octonion(rng);
        let linear = std::array::from_fn(|_| random_octonion(rng));
        let mut quadratic = Vec::new();
        for l in 0..8 {
            for m in l..8 {
                quadratic.push((l, m, random_octonion(rng)));
            }
        }
        QuadraticPoly {
            constant,
            linear,
            quadratic,
        }
    }

    pub fn eval(&self, x: &[f64; 8]) -> Octonion {
        let mut acc = self.constant;
        for (l, b) in self.linear.iter().enumerate() {
            acc += b.scale(x[l]);
        }
        for (l, m, c) in &self.quadratic {
            acc += c.scale(x[*l] * x[*m]);
        }
        acc
    }
}

/// Deterministic Kronecker (R-sequence) points in the unit cube; a
/// low-discrepancy driver for continuous-set sampling.
pub struct KroneckerSequence {
    state: [f64; 8],
    alpha: [f64; 8],
}

impl KroneckerSequence {
    pub fn new() -> KroneckerSequence {
        // powers of the generalized golden ratio in dimension 8
        let mut phi = 1.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / 9.0);
        }
        let mut alpha = [0.0; 8];
        let mut a = 1.0;
        for v in alpha.iter_mut() {
            a /= phi;
            *v = a;
        }
        KroneckerSequence {
            state: [0.5; 8],
            alpha,
        }
    }

    pub fn next_point(&mut self) -> [f64; 8] {
        for (s, a) in self.state.iter_mut().zip(self.alpha.iter()) {
            *s += a;
            if *s >= 1.0 {
                *s -= 1.0;
            }
        }
        self.state
    }
}

impl Default for KroneckerSequence {
    fn default() -> Self {
        Self::new()
    }
}

/// Standard normal 8-vector from two consecutive cube points (Box-Muller).
fn normal_vector(seq: &mut KroneckerSequence) -> [f64; 8] {
    let u = seq.next_point();
    let v = seq.next_point();
    let mut z = [0.0; 8];
    for i in 0..4 {
        let r = (-2.0 * (1.0 - u[i]).max(1e-300).ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * v[i];
        z[2 * i] = r * t.cos();
        z[2 * i + 1] = r * t.sin();
    }
    z
}

/// Deterministic quasi-uniform points on the sphere `|x - center| = radius`.
pub fn sphere_points(center: &[f64; 8], radius: f64, count: usize) -> Vec<[f64; 8]> {
    let mut seq = KroneckerSequence::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = normal_vector(&mut seq);
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let mut p = [0.0; 8];
        for i in 0..8 {
            p[i] = center[i] + radius * z[i] / norm;
        }
        out.push(p);
    }
    out
}

/// Deterministic quasi-uniform points in the closed ball.
pub fn ball_points(center: &[f64; 8], radius: f64, count: usize) -> Vec<[f64; 8]> {
    let mut seq = KroneckerSequence::new();
    let mut radial = KroneckerSequence::new();
    // decorrelate the radial stream from the angular one
    radial.next_point();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = normal_vector(&mut seq);
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let r = radius * radial.next_point()[0].powf(1.0 / 8.0);
        let mut p = [0.0; 8];
        for i in 0..8 {
            p[i] = center[i] + r * z[i] / norm;
        }
        out.push(p);
    }
    out
}
