//! Discretization of continuous domains, domain-convergence metrics, and
//! scaling-limit experiments for discrete regular approximants.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{BoundaryError, CauchyEngine};
use crate::kernel::{continuous_e, KernelTable};
use crate::lattice::{ball_lattice_points, Coord, Field, LatticeDomain, LatticeError};
use crate::octonion::Octonion;
use crate::sampling::{self, KroneckerSequence};

/// Points used to sample the continuous boundary and closure when the
/// max-min metrics are evaluated.
pub const METRIC_SAMPLES: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConvError {
    #[error("discretization at h = {0} is empty")]
    EmptyDiscretization(f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// Bounded continuous domain with an exact membership predicate.
#[derive(Debug, Clone)]
pub enum ContinuousDomain {
    Ball { center: [f64; 8], radius: f64 },
    Box { corner: [f64; 8], side: f64 },
}

impl ContinuousDomain {
    pub fn ball(center: [f64; 8], radius: f64) -> ContinuousDomain {
        assert!(radius > 0.0);
        ContinuousDomain::Ball { center, radius }
    }

    pub fn contains(&self, x: &[f64; 8]) -> bool {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                dist_sq(x, center) < radius * radius
            }
            ContinuousDomain::Box { corner, side } => x
                .iter()
                .zip(corner.iter())
                .all(|(xi, ci)| *xi > *ci && *xi < ci + side),
        }
    }

    pub fn closure_contains(&self, x: &[f64; 8]) -> bool {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                dist_sq(x, center) <= radius * radius
            }
            ContinuousDomain::Box { corner, side } => x
                .iter()
                .zip(corner.iter())
                .all(|(xi, ci)| *xi >= *ci && *xi <= ci + side),
        }
    }

    pub fn center(&self) -> [f64; 8] {
        match self {
            ContinuousDomain::Ball { center, .. } => *center,
            ContinuousDomain::Box { corner, side } => {
                let mut c = *corner;
                for v in c.iter_mut() {
                    *v += 0.5 * side;
                }
                c
            }
        }
    }

    /// Exact Euclidean distance to the topological boundary.
    pub fn boundary_distance(&self, x: &[f64; 8]) -> f64 {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                (dist_sq(x, center).sqrt() - radius).abs()
            }
            ContinuousDomain::Box { corner, side } => {
                let mut inside_min = f64::MAX;
                let mut out_sq = 0.0;
                let mut outside = false;
                for (xi, ci) in x.iter().zip(corner.iter()) {
                    let lo = xi - ci;
                    let hi = ci + side - xi;
                    if lo < 0.0 {
                        outside = true;
                        out_sq += lo * lo;
                    } else if hi < 0.0 {
                        outside = true;
                        out_sq += hi * hi;
                    } else {
                        inside_min = inside_min.min(lo.min(hi));
                    }
                }
                if outside {
                    out_sq.sqrt()
                } else {
                    inside_min
                }
            }
        }
    }

    /// Distance to the closed domain (zero inside the closure).
    pub fn closure_distance(&self, x: &[f64; 8]) -> f64 {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                (dist_sq(x, center).sqrt() - radius).max(0.0)
            }
            ContinuousDomain::Box { corner, side } => {
                let mut out_sq = 0.0;
                for (xi, ci) in x.iter().zip(corner.iter()) {
                    let lo = xi - ci;
                    let hi = ci + side - xi;
                    if lo < 0.0 {
                        out_sq += lo * lo;
                    } else if hi < 0.0 {
                        out_sq += hi * hi;
                    }
                }
                out_sq.sqrt()
            }
        }
    }

    /// Deterministic quasi-uniform samples of the boundary.
    pub fn boundary_samples(&self, count: usize) -> Vec<[f64; 8]> {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                sampling::sphere_points(center, *radius, count)
            }
            ContinuousDomain::Box { corner, side } => {
                let mut seq = KroneckerSequence::new();
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let u = seq.next_point();
                    let axis = i % 8;
                    let upper = (i / 8) % 2 == 1;
                    let mut p = [0.0; 8];
                    for l in 0..8 {
                        p[l] = corner[l] + u[l] * side;
                    }
                    p[axis] = if upper { corner[axis] + side } else { corner[axis] };
                    out.push(p);
                }
                out
            }
        }
    }

    /// Deterministic quasi-uniform samples of the closure.
    pub fn closure_samples(&self, count: usize) -> Vec<[f64; 8]> {
        match self {
            ContinuousDomain::Ball { center, radius } => {
                sampling::ball_points(center, *radius, count)
            }
            ContinuousDomain::Box { corner, side } => {
                let mut seq = KroneckerSequence::new();
                (0..count)
                    .map(|_| {
                        let u = seq.next_point();
                        let mut p = [0.0; 8];
                        for l in 0..8 {
                            p[l] = corner[l] + u[l] * side;
                        }
                        p
                    })
                    .collect()
            }
        }
    }
}

fn dist_sq(a: &[f64; 8], b: &[f64; 8]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Canonical discretization `B^h = (B /\ h Z^8)^o`: the lattice points of the
/// domain whose full 17-point neighborhood also lies in the domain. Always a
/// subset of `B`. The result may be empty; that is reported by the caller,
/// not fatal here.
pub fn discretize(domain: &ContinuousDomain, h: f64) -> Result<LatticeDomain, LatticeError> {
    let raw: Vec<Coord> = match domain {
        ContinuousDomain::Ball { center, radius } => ball_lattice_points(h, center, *radius),
        ContinuousDomain::Box { corner, side } => {
            // bounding lattice cube filtered by the open-box predicate
            let mut pts = Vec::new();
            let lo: Vec<i64> = corner.iter().map(|c| (c / h).floor() as i64).collect();
            let hi: Vec<i64> = corner.iter().map(|c| ((c + side) / h).ceil() as i64).collect();
            let mut n: Vec<i64> = lo.clone();
            'scan: loop {
                let mut x = [0i64; 8];
                x.copy_from_slice(&n);
                let c = Coord(x);
                if domain.contains(&c.physical(h)) {
                    pts.push(c);
                }
                for l in 0..8 {
                    n[l] += 1;
                    if n[l] <= hi[l] {
                        continue 'scan;
                    }
                    n[l] = lo[l];
                }
                break;
            }
            pts
        }
    };
    let set: HashSet<Coord> = raw.iter().copied().collect();
    let interior: Vec<Coord> = raw
        .into_iter()
        .filter(|x| x.neighborhood().iter().all(|q| set.contains(q)))
        .collect();
    LatticeDomain::new(h, interior)
}

/// The four max-min distances of the domain-convergence definition, in
/// physical units: boundary-to-discrete-boundary, discrete-boundary-to-
/// boundary, closure-to-discretization, discretization-to-closure.
/// Continuous-set maxima are approximated by `METRIC_SAMPLES` deterministic
/// samples; discrete-set maxima are exact.
pub fn domain_metrics(domain: &ContinuousDomain, bh: &LatticeDomain) -> [f64; 4] {
    let h = bh.h();
    let center = domain.center();
    let dbh: Vec<[f64; 8]> = bh.boundary().iter().map(|p| p.physical(h)).collect();
    let vol: Vec<[f64; 8]> = bh.points().iter().map(|p| p.physical(h)).collect();

    let m1 = max_min_distance(&domain.boundary_samples(METRIC_SAMPLES), &dbh, &center);
    let m2 = dbh
        .par_iter()
        .map(|p| domain.boundary_distance(p))
        .reduce(|| 0.0, f64::max);
    let m3 = max_min_distance(&domain.closure_samples(METRIC_SAMPLES), &vol, &center);
    let m4 = vol
        .par_iter()
        .map(|p| domain.closure_distance(p))
        .reduce(|| 0.0, f64::max);
    [m1, m2, m3, m4]
}

/// `max_alpha min_beta |alpha - beta|` with a radial prefilter: a candidate
/// whose distance from the center differs from the sample's by more than the
/// current best cannot improve it.
fn max_min_distance(samples: &[[f64; 8]], set: &[[f64; 8]], center: &[f64; 8]) -> f64 {
    if set.is_empty() {
        return f64::INFINITY;
    }
    let radii: Vec<f64> = set.iter().map(|p| dist_sq(p, center).sqrt()).collect();
    samples
        .par_iter()
        .map(|alpha| {
            let ra = dist_sq(alpha, center).sqrt();
            let mut best = f64::MAX;
            for (p, rp) in set.iter().zip(radii.iter()) {
                if (rp - ra).abs() >= best {
                    continue;
                }
                let d = dist_sq(alpha, p).sqrt();
                if d < best {
                    best = d;
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Continuous test functions for the scaling-limit experiments.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// Constant field; reproduced exactly by the Cauchy integral.
    Constant(Octonion),
    /// Translated continuous kernel `E(. - a)`, regular away from `a`.
    KernelShift { a: [f64; 8] },
    /// `x_0 e_1`, which is not regular; the negative control.
    NonRegular,
}

impl TestFunction {
    pub fn eval(&self, x: &[f64; 8]) -> Octonion {
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::KernelShift { a } => {
                let mut d = *x;
                for (di, ai) in d.iter_mut().zip(a.iter()) {
                    *di -= ai;
                }
                continuous_e(&d)
            }
            TestFunction::NonRegular => Octonion::basis(1).scale(x[0]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Constant(_) => "constant",
            TestFunction::KernelShift { .. } => "kernel-shift",
            TestFunction::NonRegular => "nonregular",
        }
    }
}

/// Discrete regular approximant: the Cauchy integral of the boundary trace
/// of `f`, evaluated at the requested points.
pub fn build_f_h(
    f: &TestFunction,
    bh: &LatticeDomain,
    table: &Arc<KernelTable>,
    eval: &[Coord],
) -> Result<Vec<Octonion>, ConvError> {
    let engine = CauchyEngine::new(Arc::clone(table), bh);
    let trace = Field::from_fn(Arc::new(bh.boundary().clone()), |x| {
        f.eval(&x.physical(bh.h()))
    });
    Ok(engine.cauchy_many(&trace, eval)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    /// max over the continuous boundary of the distance to the discrete one
    pub metric1: f64,
    /// max over the discrete boundary of the distance to the continuous one
    pub metric2: f64,
    /// max over the continuous closure of the distance to the discretization
    pub metric3: f64,
    /// max over the discretization of the distance to the continuous closure
    pub metric4: f64,
    /// `h^8 |B^h \ B|`; zero for the canonical discretization
    pub vol_excess: f64,
    /// sup of `|f - f^h|` over the sampled points of `B^h /\ B`
    pub sup_error: f64,
    /// max of `|D^h f~|` over `B^h /\ B`
    pub dhf_max: f64,
    pub points: usize,
    pub boundary_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub function: String,
    pub sample_count: usize,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("h,metric1,metric2,metric3,metric4,vol_excess,sup_error,dhf_max\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.h,
                r.metric1,
                r.metric2,
                r.metric3,
                r.metric4,
                r.vol_excess,
                r.sup_error,
                r.dhf_max
            ));
        }
        out
    }
}

/// Scaling-limit experiment: for each mesh width, discretize, build the
/// approximant from the boundary trace, and measure the sup error on seeded
/// samples along with the domain metrics and the `|D^h f~|` diagnostic.
///
/// The diagnostic is the max of `|D^h f~|` over a fixed set of physical
/// points, the coarsest discretization in the experiment. A fixed set is
/// what makes the second-order shrink of the difference operator visible;
/// maxima over the per-h discretizations grow their point set toward the
/// domain boundary as h drops and bury the truncation order under the
/// geometry change.
pub fn scaling_error(
    f: &TestFunction,
    domain: &ContinuousDomain,
    hs: &[f64],
    sample_count: usize,
    seed: u64,
    table: &Arc<KernelTable>,
) -> Result<ConvergenceReport, ConvError> {
    let h_ref = hs.iter().copied().fold(0.0f64, f64::max);
    let reference = discretize(domain, h_ref)?;
    if reference.points().is_empty() {
        return Err(ConvError::EmptyDiscretization(h_ref));
    }
    let diag_points: Vec<[f64; 8]> = reference
        .points()
        .iter()
        .map(|p| p.physical(h_ref))
        .collect();

    let mut rows = Vec::new();
    for &h in hs {
        let bh = discretize(domain, h)?;
        if bh.points().is_empty() {
            return Err(ConvError::EmptyDiscretization(h));
        }
        let metrics = domain_metrics(domain, &bh);
        let vol_excess = bh
            .points()
            .iter()
            .filter(|x| !domain.contains(&x.physical(h)))
            .count() as f64
            * h.powi(8);

        // membership intersection with B is computed honestly even though
        // the canonical discretization is always contained in B
        let in_b: Vec<Coord> = bh
            .points()
            .iter()
            .filter(|x| domain.contains(&x.physical(h)))
            .collect();
        let in_b_set = crate::lattice::PointSet::from_points(in_b.clone());

        let mut rng = sampling::rng_from_seed(seed);
        let samples = sampling::sample_points(&in_b_set, sample_count, &mut rng);
        let fh = build_f_h(f, &bh, table, &samples)?;
        let sup_error = samples
            .iter()
            .zip(fh.iter())
            .map(|(x, v)| (f.eval(&x.physical(h)) - *v).norm())
            .fold(0.0, f64::max);

        let dhf_max = diag_points
            .par_iter()
            .map(|x| {
                let mut acc = Octonion::zero();
                for l in 0..8 {
                    let mut fwd = *x;
                    fwd[l] += h;
                    let mut bwd = *x;
                    bwd[l] -= h;
                    acc += Octonion::basis_mul_left(l, (f.eval(&fwd) - f.eval(&bwd)).scale(0.5 / h));
                }
                acc.norm()
            })
            .reduce(|| 0.0, f64::max);

        rows.push(ConvergenceRow {
            h,
            metric1: metrics[0],
            metric2: metrics[1],
            metric3: metrics[2],
            metric4: metrics[3],
            vol_excess,
            sup_error,
            dhf_max,
            points: bh.points().len(),
            boundary_points: bh.boundary().len(),
        });
    }
    Ok(ConvergenceReport {
        function: f.name().to_string(),
        sample_count,
        seed,
        rows,
    })
}
