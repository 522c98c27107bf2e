//! Acceptance suite: every release criterion as one test, each printing a
//! single pass/fail line (visible with `--nocapture`). Tolerances and
//! runtime budgets are pinned here and never derived at run time.
//!
//! Run with:
//!   cargo test -p octolat-core --test acceptance -- --nocapture

use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use octolat_core::boundary::CauchyEngine;
use octolat_core::convergence::{self, ContinuousDomain, TestFunction};
use octolat_core::kernel::{self, srw, KernelTable};
use octolat_core::lattice::{cube_domain, Coord, LatticeDomain};
use octolat_core::verify;

const SEED: u64 = 1;
const SAMPLES: usize = 25;

/// Shared kernel table for the boundary and convergence criteria. Range 10
/// covers the side-3 box with its sampling shell and the radius-2.2 ball at
/// mesh 1/2.
fn shared_table() -> &'static Arc<KernelTable> {
    static TABLE: OnceLock<Arc<KernelTable>> = OnceLock::new();
    TABLE.get_or_init(|| Arc::new(KernelTable::build(10, 1e-10).expect("shared table build")))
}

fn box3() -> &'static LatticeDomain {
    static DOMAIN: OnceLock<LatticeDomain> = OnceLock::new();
    DOMAIN.get_or_init(|| cube_domain(1.0, 3))
}

fn conclude(criterion: u32, label: &str, pass: bool, details: String) {
    println!(
        "acceptance criterion {criterion:02} ({label}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({label}) failed: {details}");
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

#[test]
fn c01_algebra_identities() {
    let start = Instant::now();
    let report = verify::algebra_suite(SEED, 10_000);
    let elapsed = start.elapsed();
    let in_time = within(elapsed, Duration::from_secs(5));
    conclude(
        1,
        "octonion algebra",
        report.pass && in_time,
        format!(
            "512 sign-law relations exact, max residual {:.3e} (tol 1e-12), {:.2?} (budget 5 s)",
            report.max_residual(),
            elapsed
        ),
    );
}

#[test]
fn c02_calculus_identities() {
    let start = Instant::now();
    let report = verify::calculus_suite(box3(), SEED);
    let elapsed = start.elapsed();
    let in_time = within(elapsed, Duration::from_secs(30));
    conclude(
        2,
        "Leibniz/Gauss/divergence/Stokes on the side-3 box",
        report.pass && in_time,
        format!(
            "max residual {:.3e} (tol 1e-12), {:.2?} (budget 30 s)",
            report.max_residual(),
            elapsed
        ),
    );
}

#[test]
fn c03_kernel_defining_identities() {
    let start = Instant::now();
    let table = KernelTable::build(5, 1e-10).expect("range-5 table");
    let build_time = start.elapsed();
    let report = kernel::check_table(&table, 10, SEED).expect("identity check");
    let pass = report.delta_f1_origin <= 1e-8
        && report.delta_f1_offsite <= 1e-8
        && report.dirac_e1_origin <= 1e-8
        && report.dirac_e1_offsite <= 1e-8
        && report.quarter_identity <= 1e-9
        && within(build_time, Duration::from_secs(60));
    conclude(
        3,
        "discrete fundamental solution identities",
        pass,
        format!(
            "laplacian residuals {:.3e}/{:.3e}, dirac residuals {:.3e}/{:.3e} (tol 1e-8), \
             quarter identity {:.3e} (tol 1e-9), range-5 build {:.2?} (budget 60 s)",
            report.delta_f1_origin,
            report.delta_f1_offsite,
            report.dirac_e1_origin,
            report.dirac_e1_offsite,
            report.quarter_identity,
            build_time
        ),
    );
}

#[test]
fn c04_monte_carlo_oracle() {
    let estimate = srw::srw_green_oracle(10_000_000, SEED);
    let f1_origin = kernel::f1_value(Coord::ORIGIN, 1e-10).expect("f1(0)");
    let oracle = -0.25 * estimate.estimate;
    let diff = (f1_origin - oracle).abs();
    let three_sigma = 3.0 * 0.25 * estimate.std_err;
    conclude(
        4,
        "independent random-walk oracle",
        diff <= three_sigma,
        format!(
            "f1(0) = {f1_origin:.9}, -G(0)/4 = {oracle:.9} +- {:.2e} (1 sigma/4), |diff| {diff:.2e} <= 3 sigma {three_sigma:.2e}, {} walks",
            0.25 * estimate.std_err,
            estimate.walks
        ),
    );
}

#[test]
fn c05_kernel_estimate_scan() {
    let coarse = KernelTable::build(5, 1e-10).expect("tol 1e-10 table");
    let fine = KernelTable::build(5, 5e-11).expect("tol 5e-11 table");
    let scan_a = kernel::kernel_estimate_scan(&coarse, 5).expect("scan");
    let scan_b = kernel::kernel_estimate_scan(&fine, 5).expect("scan");
    let drift = (scan_a.c_empirical - scan_b.c_empirical).abs() / scan_a.c_empirical;
    let pass = scan_a.finite
        && scan_b.finite
        && scan_a.c_empirical.is_finite()
        && drift <= 0.01;
    conclude(
        5,
        "discrete-vs-continuous kernel comparison",
        pass,
        format!(
            "empirical C = {:.6e} at {:?} over 0 < |x|_inf <= 5 (reported, not asserted); \
             tol-halving drift {:.2e} (tol 1e-2)",
            scan_a.c_empirical, scan_a.argmax, drift
        ),
    );
}

#[test]
fn c06_cauchy_pompeiu() {
    let engine = CauchyEngine::new(Arc::clone(shared_table()), box3());
    let start = Instant::now();
    let report = verify::pompeiu_suite(&engine, SAMPLES, SEED).expect("pompeiu suite");
    let elapsed = start.elapsed();
    let residual = |name: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| (c.residual, c.pass))
            .expect("check present")
    };
    let (rc, pc) = residual("pompeiu_constant");
    let (rq, pq) = residual("pompeiu_quadratic");
    let (rk, pk) = residual("pompeiu_kernel_shift");
    let pass = pc && pq && pk && within(elapsed, Duration::from_secs(300));
    conclude(
        6,
        "Cauchy-Pompeiu formula on the side-3 box",
        pass,
        format!(
            "residuals: constant {rc:.3e}, quadratic {rq:.3e}, shifted kernel {rk:.3e} \
             (tol 1e-6, 25 samples), {elapsed:.2?} (budget 5 min)"
        ),
    );
}

#[test]
fn c07_cauchy_regularity_and_right_inverse() {
    let engine = CauchyEngine::new(Arc::clone(shared_table()), box3());
    let report = verify::pompeiu_suite(&engine, SAMPLES, SEED).expect("pompeiu suite");
    let get = |name: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == name)
            .expect("check present")
    };
    let ri = get("cauchy_regular_interior");
    let re = get("cauchy_regular_exterior");
    let ti = get("teodorescu_right_inverse");
    conclude(
        7,
        "Cauchy integral regularity and Teodorescu right inverse",
        ri.pass && re.pass && ti.pass,
        format!(
            "|D(Cf)| interior {:.3e}, exterior {:.3e}; |D(Tf) - chi f| {:.3e} (tol 1e-8)",
            ri.residual, re.residual, ti.residual
        ),
    );
}

#[test]
fn c08_sokhotski_plemelj_and_projections() {
    let engine = CauchyEngine::new(Arc::clone(shared_table()), box3());
    let report = verify::plemelj_suite(&engine, SAMPLES, SEED).expect("plemelj suite");
    let get = |name: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == name)
            .expect("check present")
    };
    let bi = get("sokhotski_plemelj_inner");
    let bo = get("sokhotski_plemelj_outer");
    let c1 = get("cauchy_of_one_is_indicator");
    let pp = get("p_idempotent");
    let qq = get("q_idempotent");
    let pq = get("pq_vanishes");
    let qp = get("qp_vanishes");
    let pass = bi.pass && bo.pass && c1.pass && pp.pass && qq.pass && pq.pass && qp.pass;
    conclude(
        8,
        "Sokhotski-Plemelj and the projection algebra",
        pass,
        format!(
            "branches {:.3e}/{:.3e} (tol 1e-10); C(1)-indicator {:.3e} (tol 1e-8); \
             P^2-P {:.3e}, Q^2-Q {:.3e}, PQ {:.3e}, QP {:.3e} (tol 1e-8)",
            bi.residual, bo.residual, c1.residual, pp.residual, qq.residual, pq.residual, qp.residual
        ),
    );
}

#[test]
fn c09_boundary_value_characterization() {
    let engine = CauchyEngine::new(Arc::clone(shared_table()), box3());
    let ext = verify::extension_suite(&engine, SAMPLES, SEED).expect("extension suite");
    let exterior = verify::exterior_suite(&engine, SAMPLES, SEED).expect("exterior suite");
    let get = |r: &verify::SuiteReport, name: &str| {
        r.checks
            .iter()
            .find(|c| c.name == name)
            .cloned()
            .expect("check present")
    };
    let p_fix = get(&ext, "p_fixes_interior_regular_trace");
    let q_fix = get(&ext, "q_fixes_exterior_regular_trace");
    let ec = get(&exterior, "exterior_cauchy_formula");
    conclude(
        9,
        "boundary values of regular extensions",
        p_fix.pass && q_fix.pass && ec.pass,
        format!(
            "P-fixed point {:.3e}, Q-fixed point {:.3e}, exterior Cauchy formula {:.3e} (tol 1e-6, 25 samples)",
            p_fix.residual, q_fix.residual, ec.residual
        ),
    );
}

#[test]
fn c10_scaling_limit() {
    let start = Instant::now();
    let table = shared_table();
    let domain = ContinuousDomain::ball([0.0; 8], 2.2);
    // the shift point satisfies dist(a, closure) = 5.8 >= 1 and keeps the
    // h = 1 difference stencils inside the Taylor regime of the kernel
    let shift = TestFunction::KernelShift {
        a: [8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    };
    let hs = [1.0, 0.5];
    let regular = convergence::scaling_error(&shift, &domain, &hs, 20, SEED, table)
        .expect("kernel-shift experiment");
    let err_ratio = regular.rows[1].sup_error / regular.rows[0].sup_error;
    let dhf_ratio = regular.rows[0].dhf_max / regular.rows[1].dhf_max;

    let control = convergence::scaling_error(&TestFunction::NonRegular, &domain, &hs, 20, SEED, table)
        .expect("negative control");
    let control_nondecreasing = control.rows[1].sup_error >= control.rows[0].sup_error;

    let elapsed = start.elapsed();
    let pass = err_ratio <= 0.75
        && (3.0..=5.0).contains(&dhf_ratio)
        && control_nondecreasing
        && within(elapsed, Duration::from_secs(1800));
    conclude(
        10,
        "scaling limit on the radius-2.2 ball",
        pass,
        format!(
            "sup-error {:.3e} -> {:.3e} (ratio {err_ratio:.3} <= 0.75); \
             dhf diagnostic {:.3e} -> {:.3e} (shrink {dhf_ratio:.2} in [3,5]); \
             non-regular control {:.3e} -> {:.3e} (non-decreasing: {control_nondecreasing}); \
             {elapsed:.2?} (budget 30 min)",
            regular.rows[0].sup_error,
            regular.rows[1].sup_error,
            regular.rows[0].dhf_max,
            regular.rows[1].dhf_max,
            control.rows[0].sup_error,
            control.rows[1].sup_error
        ),
    );
}

#[test]
fn c11_reproducibility() {
    // kernel files: byte-identical across two independent builds
    let a = KernelTable::build(3, 1e-10).expect("build");
    let b = KernelTable::build(3, 1e-10).expect("build");
    let mut bytes_a = Vec::new();
    let mut bytes_b = Vec::new();
    a.write_to(&mut bytes_a).unwrap();
    b.write_to(&mut bytes_b).unwrap();
    let kernels_match = bytes_a == bytes_b;

    // verification reports: byte-identical JSON across two runs
    let engine = CauchyEngine::new(Arc::clone(shared_table()), box3());
    let r1 = serde_json::to_vec(&verify::pompeiu_suite(&engine, 10, SEED).unwrap()).unwrap();
    let r2 = serde_json::to_vec(&verify::pompeiu_suite(&engine, 10, SEED).unwrap()).unwrap();
    let reports_match = r1 == r2;

    // experiment reports: byte-identical CSV across two runs
    let domain = ContinuousDomain::ball([0.0; 8], 1.3);
    let f = TestFunction::Constant(octolat_core::Octonion::one());
    let c1 = convergence::scaling_error(&f, &domain, &[1.0], 5, SEED, shared_table())
        .unwrap()
        .to_csv();
    let c2 = convergence::scaling_error(&f, &domain, &[1.0], 5, SEED, shared_table())
        .unwrap()
        .to_csv();
    let csv_match = c1 == c2;

    conclude(
        11,
        "reproducibility",
        kernels_match && reports_match && csv_match,
        format!(
            "kernel files identical: {kernels_match} ({} bytes); JSON reports identical: {reports_match}; \
             CSV reports identical: {csv_match}",
            bytes_a.len()
        ),
    );
}
