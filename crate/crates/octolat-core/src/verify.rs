//! Verification suites: each one exercises a theorem-shaped bundle of
//! identities with seeded random data and reports named residuals against
//! pinned tolerances. The CLI maps its `verify` subcommands onto these.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{BoundaryError, CauchyEngine, ExtensionSide, Projection};
use crate::lattice::{Coord, Field, LatticeDomain, PointSet};
use crate::octonion::{self, associator, Octonion};
use crate::operators::{self, DiffMode, Extension};
use crate::sampling::{self, QuadraticPoly};

pub const TOL_ALGEBRA: f64 = 1e-12;
pub const TOL_CALCULUS: f64 = 1e-12;
pub const TOL_POMPEIU: f64 = 1e-6;
pub const TOL_REGULARITY: f64 = 1e-8;
pub const TOL_BRANCH: f64 = 1e-10;
pub const TOL_PROJECTION: f64 = 1e-8;
pub const TOL_CAUCHY_ONE: f64 = 1e-8;
pub const TOL_BOUNDARY_CHAR: f64 = 1e-6;
pub const TOL_EXTERIOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub sample_count: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, sample_count: usize) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            sample_count,
            checks: Vec::new(),
            pass: true,
        }
    }

    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        let pass = residual.is_finite() && residual <= tolerance;
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.to_string(),
            residual,
            tolerance,
            pass,
        });
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// algebra
// ---------------------------------------------------------------------------

/// Composition-algebra identities: the basis sign law in integer arithmetic
/// plus norm composition, alternativity, flexibility, the Moufang laws, and
/// the two associator symmetries the integral theorems depend on.
pub fn algebra_suite(seed: u64, count: usize) -> SuiteReport {
    let mut report = SuiteReport::new("algebra", seed, count);

    // 512 integer sign-law relations; residual counts violations
    let mut violations = 0u32;
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let (s_ij, ij) = octonion::basis_mul(i, j);
                let (s_l, _) = octonion::basis_mul(ij, k);
                let (s_jk, jk) = octonion::basis_mul(j, k);
                let (s_r, _) = octonion::basis_mul(i, jk);
                let actual = s_ij * s_l * s_jk * s_r;
                if octonion::basis_sign(i, j, k) != actual {
                    violations += 1;
                }
                let associative_pattern =
                    i == 0 || j == 0 || i == j || k == 0 || k == i || k == j || k == (i ^ j);
                if (actual == 1) != associative_pattern {
                    violations += 1;
                }
            }
        }
    }
    report.push("basis_sign_law", f64::from(violations), 0.0);

    let mut rng = sampling::rng_from_seed(seed);
    let mut composition = 0.0f64;
    let mut alternativity = 0.0f64;
    let mut flexibility = 0.0f64;
    let mut moufang = 0.0f64;
    for _ in 0..count {
        let a = sampling::random_octonion(&mut rng);
        let b = sampling::random_octonion(&mut rng);
        let c = sampling::random_octonion(&mut rng);
        composition = composition.max(((a * b).norm() - a.norm() * b.norm()).abs());
        alternativity = alternativity
            .max(associator(a, a, b).norm())
            .max(associator(b, a, a).norm());
        flexibility = flexibility.max(associator(a, b, a).norm());
        let aba = (a * b) * a;
        moufang = moufang
            .max((aba * c - a * (b * (a * c))).norm())
            .max((c * aba - ((c * a) * b) * a).norm())
            .max(((a * (b * c)) * a - (a * b) * (c * a)).norm());
    }
    report.push("composition_norm", composition, TOL_ALGEBRA);
    report.push("alternativity", alternativity, TOL_ALGEBRA);
    report.push("flexibility", flexibility, TOL_ALGEBRA);
    report.push("moufang", moufang, TOL_ALGEBRA);

    // conjugate-associator antisymmetry and the left-multiplication
    // symmetrization, over all basis pairs and a random probe
    let mut antisym = 0.0f64;
    let mut symmetrization = 0.0f64;
    for _ in 0..64 {
        let f = sampling::random_octonion(&mut rng);
        for l in 0..8 {
            for t in 0..8 {
                let el = Octonion::basis(l);
                let et = Octonion::basis(t);
                antisym = antisym
                    .max((associator(el.conj(), et, f) + associator(et.conj(), el, f)).norm());
                let lhs = Octonion::basis_mul_left(l, Octonion::conj_basis_mul_left(t, f))
                    + Octonion::basis_mul_left(t, Octonion::conj_basis_mul_left(l, f));
                let rhs = if l == t { f.scale(2.0) } else { Octonion::zero() };
                symmetrization = symmetrization.max((lhs - rhs).norm());
            }
        }
    }
    report.push("conj_associator_antisymmetry", antisym, TOL_ALGEBRA);
    report.push("left_mul_symmetrization", symmetrization, TOL_ALGEBRA);
    report
}

// ---------------------------------------------------------------------------
// calculus (Leibniz, Gauss system, divergence, Stokes)
// ---------------------------------------------------------------------------

fn random_volume_field(domain: &LatticeDomain, seed: u64) -> Field {
    sampling::random_field(&Arc::new(domain.points().clone()), seed)
}

/// Difference-calculus identities on one domain with seeded random fields,
/// everything zero-extended as the integral theorems require.
pub fn calculus_suite(domain: &LatticeDomain, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("calculus", seed, domain.points().len());
    let h = domain.h();
    let h8 = h.powi(8);
    let f = random_volume_field(domain, seed ^ 0xf00d);
    let g = random_volume_field(domain, seed ^ 0xbeef);

    // Gauss system pointwise on the closure
    let mut gauss = 0.0f64;
    for x in domain.closure().iter() {
        let nd = domain.normal_data(x);
        let mut sq = 0.0;
        for l in 0..8 {
            let dp = (domain.chi(x.shifted(l, 1)) - domain.chi(x)) / h;
            let dm = (domain.chi(x) - domain.chi(x.shifted(l, -1))) / h;
            gauss = gauss
                .max((nd.n_plus[l] * nd.weight + dp * h8).abs())
                .max((nd.n_minus[l] * nd.weight + dm * h8).abs());
            sq += nd.n_plus[l] * nd.n_plus[l] + nd.n_minus[l] * nd.n_minus[l];
        }
        let expected = if domain.boundary().contains(x) { 4.0 } else { 0.0 };
        gauss = gauss.max((sq - expected).abs());
    }
    report.push("gauss_system", gauss, TOL_CALCULUS);

    // Divergence Principle, all axes and both signs
    let mut divergence = 0.0f64;
    for l in 0..8 {
        for sign_plus in [true, false] {
            let mut surface = Octonion::zero();
            for x in domain.boundary().iter() {
                let nd = domain.normal_data(x);
                let n = if sign_plus { nd.n_plus[l] } else { nd.n_minus[l] };
                surface += f.value_or_zero(x).scale(n * nd.weight);
            }
            let mode = if sign_plus { DiffMode::Backward } else { DiffMode::Forward };
            let mut volume = Octonion::zero();
            for x in domain.points().iter() {
                volume += diff_zero(&f, x, l, mode, h);
            }
            divergence = divergence.max((surface - volume.scale(h8)).norm());
        }
    }
    report.push("divergence_principle", divergence, TOL_CALCULUS);

    // octonionic divergence corollary: int_dB n f dS = int_B D^h f dV
    let mut surface = Octonion::zero();
    for x in domain.boundary().iter() {
        let nd = domain.normal_data(x);
        surface += (nd.normal_oct * f.value_or_zero(x)).scale(nd.weight);
    }
    let mut volume = Octonion::zero();
    for x in domain.points().iter() {
        let mut d = Octonion::zero();
        for l in 0..8 {
            d += Octonion::basis_mul_left(l, diff_zero(&f, x, l, DiffMode::Central, h));
        }
        volume += d;
    }
    report.push(
        "octonionic_divergence",
        (surface - volume.scale(h8)).norm(),
        TOL_CALCULUS,
    );

    // all eight Leibniz identities pointwise on the closure
    let mut leibniz = 0.0f64;
    for x in domain.closure().iter() {
        for l in 0..8 {
            let fx = f.value_or_zero(x);
            let gx = g.value_or_zero(x);
            let f_fwd = f.value_or_zero(x.shifted(l, 1));
            let f_bwd = f.value_or_zero(x.shifted(l, -1));
            let g_fwd = g.value_or_zero(x.shifted(l, 1));
            let g_bwd = g.value_or_zero(x.shifted(l, -1));
            let dp_f = (f_fwd - fx).scale(1.0 / h);
            let dm_f = (fx - f_bwd).scale(1.0 / h);
            let dp_g = (g_fwd - gx).scale(1.0 / h);
            let dm_g = (gx - g_bwd).scale(1.0 / h);
            let dp_fg = (f_fwd * g_fwd - fx * gx).scale(1.0 / h);
            let dm_fg = (fx * gx - f_bwd * g_bwd).scale(1.0 / h);
            // rule I
            leibniz = leibniz
                .max((dp_fg - (dp_f * gx + f_fwd * dp_g)).norm())
                .max((dp_fg - (dp_f * g_fwd + fx * dp_g)).norm())
                .max((dm_fg - (dm_f * gx + f_bwd * dm_g)).norm())
                .max((dm_fg - (dm_f * g_bwd + fx * dm_g)).norm());
            // rule II, with the shifted differences written out
            let dm_tau_m_g = (g_fwd - gx).scale(1.0 / h); // d^- of g(.+he_l)
            let dm_tau_m_f = (f_fwd - fx).scale(1.0 / h);
            let dp_tau_p_g = (gx - g_bwd).scale(1.0 / h); // d^+ of g(.-he_l)
            let dp_tau_p_f = (fx - f_bwd).scale(1.0 / h);
            leibniz = leibniz
                .max((dp_fg - (dp_f * g_fwd + fx * dm_tau_m_g)).norm())
                .max((dp_fg - (dm_tau_m_f * gx + f_fwd * dp_g)).norm())
                .max((dm_fg - (dm_f * g_bwd + fx * dp_tau_p_g)).norm())
                .max((dm_fg - (dp_tau_p_f * gx + f_bwd * dm_g)).norm());
        }
    }
    report.push("leibniz_identities", leibniz, TOL_CALCULUS);

    // the four Stokes identities: n^+ pairs with d^-, n^- with d^+
    let mut stokes = 0.0f64;
    for l in 0..8 {
        let mut surf_plus = Octonion::zero();
        let mut surf_minus = Octonion::zero();
        for x in domain.boundary().iter() {
            let nd = domain.normal_data(x);
            let prod = f.value_or_zero(x) * g.value_or_zero(x);
            surf_plus += prod.scale(nd.n_plus[l] * nd.weight);
            surf_minus += prod.scale(nd.n_minus[l] * nd.weight);
        }
        let mut v1 = Octonion::zero();
        let mut v2 = Octonion::zero();
        let mut v3 = Octonion::zero();
        let mut v4 = Octonion::zero();
        for x in domain.points().iter() {
            let fx = f.value_or_zero(x);
            let gx = g.value_or_zero(x);
            let tau_p_f = f.value_or_zero(x.shifted(l, -1)); // (tau_{he_l} f)(x)
            let tau_p_g = g.value_or_zero(x.shifted(l, -1));
            let tau_m_f = f.value_or_zero(x.shifted(l, 1)); // (tau_{-he_l} f)(x)
            let tau_m_g = g.value_or_zero(x.shifted(l, 1));
            let dp_f = diff_zero(&f, x, l, DiffMode::Forward, h);
            let dm_f = diff_zero(&f, x, l, DiffMode::Backward, h);
            let dp_g = diff_zero(&g, x, l, DiffMode::Forward, h);
            let dm_g = diff_zero(&g, x, l, DiffMode::Backward, h);
            v1 += dm_f * gx + tau_p_f * dm_g;
            v2 += dm_f * tau_p_g + fx * dm_g;
            v3 += dp_f * gx + tau_m_f * dp_g;
            v4 += dp_f * tau_m_g + fx * dp_g;
        }
        stokes = stokes
            .max((surf_plus - v1.scale(h8)).norm())
            .max((surf_plus - v2.scale(h8)).norm())
            .max((surf_minus - v3.scale(h8)).norm())
            .max((surf_minus - v4.scale(h8)).norm());
    }
    report.push("stokes_identities", stokes, TOL_CALCULUS);

    // operator identities used throughout the proofs
    let mut ops = 0.0f64;
    for x in domain.points().iter() {
        for l in 0..8 {
            // d^+ = d^- tau_{-he_l}
            let dp = diff_zero(&f, x, l, DiffMode::Forward, h);
            let shifted = (f.value_or_zero(x.shifted(l, 1)) - f.value_or_zero(x)).scale(1.0 / h);
            ops = ops.max((dp - shifted).norm());
        }
        // Delta^h = D^h conj(D)^h
        let mut lap = Octonion::zero();
        let mut ddbar = Octonion::zero();
        for l in 0..8 {
            let a = f.value_or_zero(x.shifted(l, 2));
            let b = f.value_or_zero(x.shifted(l, -2));
            lap += (a + b - f.value_or_zero(x).scale(2.0)).scale(0.25 / (h * h));
            let mut inner = Octonion::zero();
            for m in 0..8 {
                let fwd = x.shifted(l, 1);
                let bwd = x.shifted(l, -1);
                let d_fwd = (f.value_or_zero(fwd.shifted(m, 1))
                    - f.value_or_zero(fwd.shifted(m, -1)))
                .scale(0.5 / h);
                let d_bwd = (f.value_or_zero(bwd.shifted(m, 1))
                    - f.value_or_zero(bwd.shifted(m, -1)))
                .scale(0.5 / h);
                inner += Octonion::conj_basis_mul_left(m, (d_fwd - d_bwd).scale(0.5 / h));
            }
            ddbar += Octonion::basis_mul_left(l, inner);
        }
        ops = ops.max((lap - ddbar).norm());
    }
    report.push("operator_identities", ops, TOL_CALCULUS);

    report
}

fn diff_zero(f: &Field, x: Coord, l: usize, mode: DiffMode, h: f64) -> Octonion {
    match mode {
        DiffMode::Forward => (f.value_or_zero(x.shifted(l, 1)) - f.value_or_zero(x)).scale(1.0 / h),
        DiffMode::Backward => {
            (f.value_or_zero(x) - f.value_or_zero(x.shifted(l, -1))).scale(1.0 / h)
        }
        DiffMode::Central => {
            (f.value_or_zero(x.shifted(l, 1)) - f.value_or_zero(x.shifted(l, -1))).scale(0.5 / h)
        }
    }
}

// ---------------------------------------------------------------------------
// boundary-operator suites
// ---------------------------------------------------------------------------

/// Closure plus one exterior layer: the sample pool for evaluation points.
fn sample_pool(domain: &LatticeDomain) -> PointSet {
    domain.closure().dilate()
}

/// Exterior point at Chebyshev distance 2 from the closure, on the low
/// corner; used as the off-domain shift for kernel test fields.
fn exterior_anchor(domain: &LatticeDomain) -> Coord {
    let pts = domain.closure().points();
    let mut min = [i64::MAX; 8];
    for p in pts {
        for l in 0..8 {
            min[l] = min[l].min(p.0[l]);
        }
    }
    let mut a = min;
    a[0] -= 2;
    Coord(a)
}

/// Cauchy-Pompeiu residuals for the three test families, plus the
/// regularity of the Cauchy integral and the Teodorescu right inverse.
pub fn pompeiu_suite(
    engine: &CauchyEngine<'_>,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport, BoundaryError> {
    let domain = engine.domain();
    let mut report = SuiteReport::new("pompeiu", seed, samples);
    let mut rng = sampling::rng_from_seed(seed);
    let pool = sample_pool(domain);
    let sample_pts = sampling::sample_points(&pool, samples, &mut rng);
    engine.ensure_coverage(sample_pts.iter().copied())?;

    let closure = Arc::new(domain.closure().clone());
    let h = domain.h();

    // (a) constants
    let c = sampling::random_octonion(&mut rng);
    let constant = Field::constant(Arc::clone(&closure), c);
    report.push(
        "pompeiu_constant",
        engine.pompeiu_residual(&constant, &sample_pts)?,
        TOL_POMPEIU,
    );

    // (b) a random octonion quadratic
    let poly = QuadraticPoly::random(&mut rng);
    let quadratic = Field::from_fn(Arc::clone(&closure), |x| poly.eval(&x.physical(h)));
    report.push(
        "pompeiu_quadratic",
        engine.pompeiu_residual(&quadratic, &sample_pts)?,
        TOL_POMPEIU,
    );

    // (c) shifted kernel, regular on the closure
    let a = exterior_anchor(domain);
    let table = engine.table();
    let kernel_shift = {
        let mut values = Vec::with_capacity(closure.len());
        for x in closure.iter() {
            values.push(table.eh(x.sub(a), h)?);
        }
        Field::from_values(Arc::clone(&closure), values)
    };
    report.push(
        "pompeiu_kernel_shift",
        engine.pompeiu_residual(&kernel_shift, &sample_pts)?,
        TOL_POMPEIU,
    );

    // regularity of the Cauchy integral on both sides of the boundary
    let trace = sampling::random_field(&Arc::new(domain.boundary().clone()), seed ^ 0xace);
    let interior_pts: Vec<Coord> = domain.interior().iter().collect();
    let exterior_pts: Vec<Coord> = {
        let exterior: PointSet = pool
            .iter()
            .filter(|x| x.neighborhood().iter().all(|q| !domain.contains(*q)))
            .collect();
        sampling::sample_points(&exterior, samples, &mut rng)
    };
    let reg_int = interior_pts
        .par_iter()
        .map(|y| engine.dirac_of_cauchy(&trace, *y).map(|v| v.norm()))
        .collect::<Result<Vec<f64>, BoundaryError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push("cauchy_regular_interior", reg_int, TOL_REGULARITY);
    let reg_ext = exterior_pts
        .par_iter()
        .map(|y| engine.dirac_of_cauchy(&trace, *y).map(|v| v.norm()))
        .collect::<Result<Vec<f64>, BoundaryError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push("cauchy_regular_exterior", reg_ext, TOL_REGULARITY);

    // Teodorescu right inverse on random volume data
    let volume_data = random_volume_field(domain, seed ^ 0xdad);
    let mut right_inverse = 0.0f64;
    for y in &sample_pts {
        let dt = engine.dirac_of_teodorescu(&volume_data, *y)?;
        let expected = volume_data.value_or_zero(*y).scale(domain.chi(*y));
        right_inverse = right_inverse.max((dt - expected).norm());
    }
    report.push("teodorescu_right_inverse", right_inverse, TOL_REGULARITY);

    Ok(report)
}

/// Sokhotski-Plemelj branches, the Cauchy integral of 1, and the projection
/// algebra.
pub fn plemelj_suite(
    engine: &CauchyEngine<'_>,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport, BoundaryError> {
    let domain = engine.domain();
    let mut report = SuiteReport::new("plemelj", seed, samples);
    let mut rng = sampling::rng_from_seed(seed);
    let boundary = Arc::new(domain.boundary().clone());
    engine.ensure_coverage(domain.boundary().iter())?;

    let f = sampling::random_field(&boundary, seed ^ 0x5eed);
    let half = samples.div_ceil(2);
    let inner_samples = sampling::sample_points(domain.inner_boundary(), half, &mut rng);
    let outer_samples = sampling::sample_points(domain.outer_boundary(), half, &mut rng);

    // branch identities C f = (+-f + S f)/2 on the two boundary layers
    let branch = |pts: &[Coord], sign: f64| -> Result<f64, BoundaryError> {
        let mut worst = 0.0f64;
        for y in pts {
            let c = engine.cauchy(&f, *y)?;
            let s = engine.singular(&f, *y)?;
            let rhs = (f.value(*y)?.scale(sign) + s).scale(0.5);
            worst = worst.max((c - rhs).norm());
        }
        Ok(worst)
    };
    report.push("sokhotski_plemelj_inner", branch(&inner_samples, 1.0)?, TOL_BRANCH);
    report.push("sokhotski_plemelj_outer", branch(&outer_samples, -1.0)?, TOL_BRANCH);

    // C(1) = chi_B on the whole boundary
    let ones = Field::constant(Arc::clone(&boundary), Octonion::one());
    let targets: Vec<Coord> = domain.boundary().iter().collect();
    let c_one = engine.cauchy_many(&ones, &targets)?;
    let mut worst = 0.0f64;
    for (y, v) in targets.iter().zip(c_one) {
        worst = worst.max((v - Octonion::real(domain.chi(*y))).norm());
    }
    report.push("cauchy_of_one_is_indicator", worst, TOL_CAUCHY_ONE);

    // projection algebra via one full singular sweep
    let p_field = engine.plemelj_field(&f, Projection::P)?;
    let q_field = f.zip(&p_field, |a, b| a - b)?;
    let mut proj_samples = inner_samples.clone();
    proj_samples.extend_from_slice(&outer_samples);
    let mut pp = 0.0f64;
    let mut qq = 0.0f64;
    let mut pq = 0.0f64;
    let mut qp = 0.0f64;
    let mut partition = 0.0f64;
    for y in &proj_samples {
        let s_p = engine.singular(&p_field, *y)?;
        let p_of_p = (p_field.value(*y)? + s_p).scale(0.5);
        let q_of_p = (p_field.value(*y)? - s_p).scale(0.5);
        let s_q = engine.singular(&q_field, *y)?;
        let p_of_q = (q_field.value(*y)? + s_q).scale(0.5);
        let q_of_q = (q_field.value(*y)? - s_q).scale(0.5);
        pp = pp.max((p_of_p - p_field.value(*y)?).norm());
        qq = qq.max((q_of_q - q_field.value(*y)?).norm());
        pq = pq.max(p_of_q.norm());
        qp = qp.max(q_of_p.norm());
        partition =
            partition.max((p_field.value(*y)? + q_field.value(*y)? - f.value(*y)?).norm());
    }
    report.push("p_idempotent", pp, TOL_PROJECTION);
    report.push("q_idempotent", qq, TOL_PROJECTION);
    report.push("pq_vanishes", pq, TOL_PROJECTION);
    report.push("qp_vanishes", qp, TOL_PROJECTION);
    report.push("partition_of_identity", partition, 1e-13);

    Ok(report)
}

/// Regular extensions and the boundary-value characterization: `P` fixes
/// boundary values of interior regular fields, `Q` fixes exterior ones, and
/// the two extension fields are discrete regular on their sides.
pub fn extension_suite(
    engine: &CauchyEngine<'_>,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport, BoundaryError> {
    let domain = engine.domain();
    let mut report = SuiteReport::new("extension", seed, samples);
    let mut rng = sampling::rng_from_seed(seed);
    let boundary = Arc::new(domain.boundary().clone());

    let h = domain.h();
    engine.ensure_coverage(domain.boundary().iter())?;

    let boundary_samples = sampling::sample_points(domain.boundary(), samples, &mut rng);

    // P fixes the trace of a field regular inside (kernel shifted outside)
    let a_ext = exterior_anchor(domain);
    let f_ext = engine.kernel_shift_boundary_data(a_ext)?;
    let mut p_fix = 0.0f64;
    for y in &boundary_samples {
        let p = engine.plemelj(&f_ext, *y, Projection::P)?;
        p_fix = p_fix.max((p - f_ext.value(*y)?).norm());
    }
    report.push("p_fixes_interior_regular_trace", p_fix, TOL_BOUNDARY_CHAR);

    // Q fixes the trace of a field regular outside (kernel shifted inside)
    if domain.interior().is_empty() {
        report.push("q_fixes_exterior_regular_trace", f64::INFINITY, TOL_BOUNDARY_CHAR);
    } else {
        let a_int = sampling::sample_points(domain.interior(), 1, &mut rng)[0];
        let g_int = engine.kernel_shift_boundary_data(a_int)?;
        let mut q_fix = 0.0f64;
        for y in &boundary_samples {
            let q = engine.plemelj(&g_int, *y, Projection::Q)?;
            q_fix = q_fix.max((q - g_int.value(*y)?).norm());
        }
        report.push("q_fixes_exterior_regular_trace", q_fix, TOL_BOUNDARY_CHAR);
    }

    // constants extend inward: Q(1) = 0
    let ones = Field::constant(Arc::clone(&boundary), Octonion::one());
    let mut q_one = 0.0f64;
    for y in &boundary_samples {
        q_one = q_one.max(engine.plemelj(&ones, *y, Projection::Q)?.norm());
    }
    report.push("q_of_constant_vanishes", q_one, TOL_BRANCH);

    // interior extension of random data: regular on B, boundary values P f
    let f = sampling::random_field(&boundary, seed ^ 0xffee);
    let volume_samples = sampling::sample_points(domain.points(), samples, &mut rng);
    let eval: PointSet = volume_samples
        .iter()
        .flat_map(|x| x.neighborhood())
        .chain(boundary_samples.iter().copied())
        .collect();
    let eval = Arc::new(eval);
    let interior_ext = engine.regular_extension(&f, ExtensionSide::Interior, &eval)?;
    let mut regular = 0.0f64;
    for x in &volume_samples {
        let mut d = Octonion::zero();
        for l in 0..8 {
            let fwd = interior_ext.value(x.shifted(l, 1))?;
            let bwd = interior_ext.value(x.shifted(l, -1))?;
            d += Octonion::basis_mul_left(l, (fwd - bwd).scale(0.5 / h));
        }
        regular = regular.max(d.norm());
    }
    report.push("interior_extension_regular", regular, TOL_REGULARITY);

    let mut matches_p = 0.0f64;
    for y in &boundary_samples {
        let p = engine.plemelj(&f, *y, Projection::P)?;
        matches_p = matches_p.max((interior_ext.value(*y)? - p).norm());
    }
    report.push("interior_extension_boundary_values", matches_p, TOL_BOUNDARY_CHAR);

    // exterior extension: boundary values Q f, regular outside
    let ext_eval = Arc::new(PointSet::from_points(boundary_samples.clone()));
    let exterior_ext = engine.regular_extension(&f, ExtensionSide::Exterior, &ext_eval)?;
    let mut matches_q = 0.0f64;
    for y in &boundary_samples {
        let q = engine.plemelj(&f, *y, Projection::Q)?;
        matches_q = matches_q.max((exterior_ext.value(*y)? - q).norm());
    }
    report.push("exterior_extension_boundary_values", matches_q, TOL_BOUNDARY_CHAR);

    let pool = sample_pool(domain);
    let exterior_interior: PointSet = pool
        .iter()
        .filter(|x| x.neighborhood().iter().all(|q| !domain.contains(*q)))
        .collect();
    let ext_pts = sampling::sample_points(&exterior_interior, samples, &mut rng);
    engine.ensure_coverage(ext_pts.iter().copied())?;
    let volume = Arc::new(domain.points().clone());
    let df = operators::dirac_on(&f, h, &volume, Extension::Zero)?;
    let mut ext_regular = 0.0f64;
    for y in &ext_pts {
        ext_regular = ext_regular.max(engine.dirac_of_teodorescu(&df, *y)?.norm());
    }
    report.push("exterior_extension_regular", ext_regular, TOL_REGULARITY);

    Ok(report)
}

/// Exterior Cauchy formula for a field regular outside and vanishing at
/// infinity: `-C^h f = chi_complement f` for `f = E^h(. - a)`, `a` interior.
pub fn exterior_suite(
    engine: &CauchyEngine<'_>,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport, BoundaryError> {
    let domain = engine.domain();
    let mut report = SuiteReport::new("exterior", seed, samples);
    let mut rng = sampling::rng_from_seed(seed);
    if domain.interior().is_empty() {
        report.push("exterior_cauchy_formula", f64::INFINITY, TOL_EXTERIOR);
        return Ok(report);
    }
    let a = sampling::sample_points(domain.interior(), 1, &mut rng)[0];
    let pool = sample_pool(domain);
    let pts: Vec<Coord> = sampling::sample_points(&pool, samples + 1, &mut rng)
        .into_iter()
        .filter(|y| *y != a)
        .take(samples)
        .collect();
    engine.ensure_coverage(pts.iter().copied())?;

    report.push(
        "exterior_cauchy_formula",
        engine.exterior_cauchy_residual(a, &pts)?,
        TOL_EXTERIOR,
    );

    // split views of the same identity on the two sides
    let f = engine.kernel_shift_boundary_data(a)?;
    let mut interior_side = 0.0f64;
    let mut exterior_side = 0.0f64;
    for y in &pts {
        let c = engine.cauchy(&f, *y)?;
        if domain.contains(*y) {
            interior_side = interior_side.max(c.norm());
        } else {
            let expected = engine.table().eh(y.sub(a), domain.h())?;
            exterior_side = exterior_side.max((-c - expected).norm());
        }
    }
    report.push("vanishes_inside", interior_side, TOL_EXTERIOR);
    report.push("matches_field_outside", exterior_side, TOL_EXTERIOR);

    Ok(report)
}
