//! Difference, translation, Dirac and Laplace operators on lattice fields.
//!
//! Operators come in two flavors: the plain form shrinks the support to the
//! largest set on which the stencil stays inside the field, and the `_on`
//! form evaluates on a caller-chosen set, either strictly (off-support reads
//! are errors) or through the explicit zero-extension. Nothing is ever
//! zero-extended silently.

use std::sync::Arc;

use crate::lattice::{Coord, Field, LatticeError, PointSet};
use crate::octonion::Octonion;

/// Which difference quotient to take along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    Forward,
    Backward,
    /// Arithmetic mean of forward and backward.
    Central,
}

/// How to read a field outside its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Off-support reads fail.
    Strict,
    /// Off-support reads produce zero (the zero-extension of the field).
    Zero,
}

fn read(f: &Field, x: Coord, ext: Extension) -> Result<Octonion, LatticeError> {
    match ext {
        Extension::Strict => f.value(x),
        Extension::Zero => Ok(f.value_or_zero(x)),
    }
}

/// Translation `(tau_y f)(x) = f(x - y)`; the support shifts by `+y`.
pub fn translate(f: &Field, y: Coord) -> Field {
    let support = Arc::new(f.support().translate(y));
    Field::from_fn(support, |x| {
        f.value(x.sub(y)).expect("translated support mismatch")
    })
}

fn stencil_ok(f: &Field, x: Coord, l: usize, mode: DiffMode) -> bool {
    let fwd = || f.support().contains(x.shifted(l, 1));
    let bwd = || f.support().contains(x.shifted(l, -1));
    match mode {
        DiffMode::Forward => f.support().contains(x) && fwd(),
        DiffMode::Backward => f.support().contains(x) && bwd(),
        DiffMode::Central => fwd() && bwd(),
    }
}

fn diff_at(f: &Field, x: Coord, l: usize, mode: DiffMode, h: f64, ext: Extension) -> Result<Octonion, LatticeError> {
    match mode {
        DiffMode::Forward => {
            let a = read(f, x.shifted(l, 1), ext)?;
            let b = read(f, x, ext)?;
            Ok((a - b).scale(1.0 / h))
        }
        DiffMode::Backward => {
            let a = read(f, x, ext)?;
            let b = read(f, x.shifted(l, -1), ext)?;
            Ok((a - b).scale(1.0 / h))
        }
        DiffMode::Central => {
            let a = read(f, x.shifted(l, 1), ext)?;
            let b = read(f, x.shifted(l, -1), ext)?;
            Ok((a - b).scale(0.5 / h))
        }
    }
}

/// Difference quotient along axis `l` on the largest valid support.
pub fn diff(f: &Field, l: usize, mode: DiffMode, h: f64) -> Field {
    assert!(l < 8, "axis out of range: {l}");
    let support: PointSet = f
        .support()
        .iter()
        .filter(|x| stencil_ok(f, *x, l, mode))
        .collect();
    let support = Arc::new(support);
    Field::from_fn(support, |x| {
        diff_at(f, x, l, mode, h, Extension::Strict).expect("stencil checked")
    })
}

/// Difference quotient evaluated on a caller-chosen set.
pub fn diff_on(
    f: &Field,
    l: usize,
    mode: DiffMode,
    h: f64,
    on: &Arc<PointSet>,
    ext: Extension,
) -> Result<Field, LatticeError> {
    assert!(l < 8, "axis out of range: {l}");
    let mut values = Vec::with_capacity(on.len());
    for x in on.iter() {
        values.push(diff_at(f, x, l, mode, h, ext)?);
    }
    Ok(Field::from_values(Arc::clone(on), values))
}

fn dirac_at(
    f: &Field,
    x: Coord,
    h: f64,
    ext: Extension,
    conjugated: bool,
) -> Result<Octonion, LatticeError> {
    let mut acc = Octonion::zero();
    for l in 0..8 {
        let d = diff_at(f, x, l, DiffMode::Central, h, ext)?;
        acc += if conjugated {
            Octonion::conj_basis_mul_left(l, d)
        } else {
            Octonion::basis_mul_left(l, d)
        };
    }
    Ok(acc)
}

fn dirac_like(f: &Field, h: f64, conjugated: bool) -> Field {
    let support: PointSet = f
        .support()
        .iter()
        .filter(|x| (0..8).all(|l| stencil_ok(f, *x, l, DiffMode::Central)))
        .collect();
    let support = Arc::new(support);
    Field::from_fn(support, |x| {
        dirac_at(f, x, h, Extension::Strict, conjugated).expect("stencil checked")
    })
}

fn dirac_like_on(
    f: &Field,
    h: f64,
    on: &Arc<PointSet>,
    ext: Extension,
    conjugated: bool,
) -> Result<Field, LatticeError> {
    let mut values = Vec::with_capacity(on.len());
    for x in on.iter() {
        values.push(dirac_at(f, x, h, ext, conjugated)?);
    }
    Ok(Field::from_values(Arc::clone(on), values))
}

/// Discrete Cauchy-Fueter operator `D^h f = sum_l e_l d^h_l f` with central
/// differences and left basis multiplication.
pub fn dirac(f: &Field, h: f64) -> Field {
    dirac_like(f, h, false)
}

pub fn dirac_on(f: &Field, h: f64, on: &Arc<PointSet>, ext: Extension) -> Result<Field, LatticeError> {
    dirac_like_on(f, h, on, ext, false)
}

/// Conjugate Dirac operator, `e_0 d_0 - sum_{l>=1} e_l d_l`.
pub fn conj_dirac(f: &Field, h: f64) -> Field {
    dirac_like(f, h, true)
}

pub fn conj_dirac_on(f: &Field, h: f64, on: &Arc<PointSet>, ext: Extension) -> Result<Field, LatticeError> {
    dirac_like_on(f, h, on, ext, true)
}

fn laplacian_at(f: &Field, x: Coord, h: f64, ext: Extension) -> Result<Octonion, LatticeError> {
    // central-difference composition: (f(x+2he_l) + f(x-2he_l) - 2 f(x)) / (4h^2)
    let mut acc = Octonion::zero();
    let center = read(f, x, ext)?;
    for l in 0..8 {
        let a = read(f, x.shifted(l, 2), ext)?;
        let b = read(f, x.shifted(l, -2), ext)?;
        acc += a + b - center.scale(2.0);
    }
    Ok(acc.scale(0.25 / (h * h)))
}

/// Discrete Laplacian `sum_l d^h_l d^h_l f`.
pub fn laplacian(f: &Field, h: f64) -> Field {
    let support: PointSet = f
        .support()
        .iter()
        .filter(|x| {
            f.support().contains(*x)
                && (0..8).all(|l| {
                    f.support().contains(x.shifted(l, 2)) && f.support().contains(x.shifted(l, -2))
                })
        })
        .collect();
    let support = Arc::new(support);
    Field::from_fn(support, |x| {
        laplacian_at(f, x, h, Extension::Strict).expect("stencil checked")
    })
}

pub fn laplacian_on(f: &Field, h: f64, on: &Arc<PointSet>, ext: Extension) -> Result<Field, LatticeError> {
    let mut values = Vec::with_capacity(on.len());
    for x in on.iter() {
        values.push(laplacian_at(f, x, h, ext)?);
    }
    Ok(Field::from_values(Arc::clone(on), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cube_domain;
    use crate::sampling::random_field;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn box_support(side: u32) -> Arc<PointSet> {
        Arc::new(cube_domain(1.0, side).points().clone())
    }

    /// Support shrunk to points whose `steps`-neighborhood stays inside.
    fn shrink(support: &PointSet, steps: i64) -> Arc<PointSet> {
        Arc::new(
            support
                .iter()
                .filter(|x| {
                    (0..8).all(|l| {
                        (1..=steps).all(|d| {
                            support.contains(x.shifted(l, d)) && support.contains(x.shifted(l, -d))
                        })
                    })
                })
                .collect(),
        )
    }

    #[test]
    fn translation_identities() {
        let support = box_support(3);
        let f = random_field(&support, 7);
        let t0 = translate(&f, Coord::ORIGIN);
        for (x, v) in f.iter() {
            assert_eq!(t0.value(x).unwrap(), v);
        }
        let y = Coord::unit(0);
        let back = translate(&translate(&f, y), y.neg());
        for (x, v) in f.iter() {
            assert_eq!(back.value(x).unwrap(), v);
        }
        let shifted = translate(&f, y);
        assert_eq!(shifted.value(Coord::unit(0)).unwrap(), f.value(Coord::ORIGIN).unwrap());
    }

    #[test]
    fn diff_of_constant_vanishes() {
        let support = box_support(3);
        let f = Field::constant(Arc::clone(&support), Octonion::basis(4).scale(2.5));
        for mode in [DiffMode::Forward, DiffMode::Backward, DiffMode::Central] {
            let d = diff(&f, 2, mode, 1.0);
            assert!(!d.support().is_empty());
            assert!(d.max_norm() <= 1e-15);
        }
    }

    #[test]
    fn diff_of_coordinate_is_one() {
        let support = box_support(3);
        let f = Field::from_fn(Arc::clone(&support), |x| Octonion::real(x.0[0] as f64));
        let d = diff(&f, 0, DiffMode::Forward, 1.0);
        for (_, v) in d.iter() {
            assert!((v - Octonion::one()).norm() <= 1e-15);
        }
        // linear exactness also for h != 1 when sampling x0 = h n0
        let h = 0.5;
        let g = Field::from_fn(Arc::clone(&support), |x| Octonion::real(h * x.0[0] as f64));
        let d = diff(&g, 0, DiffMode::Central, h);
        for (_, v) in d.iter() {
            assert!((v - Octonion::one()).norm() <= 1e-14);
        }
    }

    #[test]
    fn central_is_mean_of_forward_and_backward() {
        let support = box_support(4);
        let f = random_field(&support, 13);
        let inner = shrink(f.support(), 1);
        let c = diff_on(&f, 5, DiffMode::Central, 1.0, &inner, Extension::Strict).unwrap();
        let fw = diff_on(&f, 5, DiffMode::Forward, 1.0, &inner, Extension::Strict).unwrap();
        let bw = diff_on(&f, 5, DiffMode::Backward, 1.0, &inner, Extension::Strict).unwrap();
        for x in inner.iter() {
            let mean = (fw.value(x).unwrap() + bw.value(x).unwrap()).scale(0.5);
            assert!((c.value(x).unwrap() - mean).norm() <= 1e-15);
        }
    }

    #[test]
    fn strict_reads_outside_fail_and_zero_extension_works() {
        let support = box_support(2);
        let f = random_field(&support, 3);
        let on = Arc::new(PointSet::from_points(vec![Coord::ORIGIN]));
        // forward diff at the far corner exits the box
        let corner = Coord([1; 8]);
        let on_corner = Arc::new(PointSet::from_points(vec![corner]));
        assert!(diff_on(&f, 0, DiffMode::Forward, 1.0, &on_corner, Extension::Strict).is_err());
        let z = diff_on(&f, 0, DiffMode::Forward, 1.0, &on_corner, Extension::Zero).unwrap();
        let expected = (Octonion::zero() - f.value(corner).unwrap()).scale(1.0);
        assert!((z.value(corner).unwrap() - expected).norm() <= 1e-15);
        let _ = on;
    }

    /// All eight Leibniz identities on random compactly supported fields.
    #[test]
    fn leibniz_rules() {
        let support = box_support(4);
        let f = random_field(&support, 21);
        let g = random_field(&support, 22);
        let h = 1.0;
        let inner = shrink(f.support(), 1);
        let prod = f.pointwise_mul(&g).unwrap();

        for l in 0..8 {
            let el = |m: DiffMode, field: &Field| {
                diff_on(field, l, m, h, &inner, Extension::Strict).unwrap()
            };
            let tau_m = translate(&f, Coord::unit(l).neg()); // f(. + he_l)
            let tau_p = translate(&f, Coord::unit(l)); // f(. - he_l)
            let tau_m_g = translate(&g, Coord::unit(l).neg());
            let tau_p_g = translate(&g, Coord::unit(l));

            let dp_fg = el(DiffMode::Forward, &prod);
            let dm_fg = el(DiffMode::Backward, &prod);
            let dp_f = el(DiffMode::Forward, &f);
            let dm_f = el(DiffMode::Backward, &f);
            let dp_g = el(DiffMode::Forward, &g);
            let dm_g = el(DiffMode::Backward, &g);

            for x in inner.iter() {
                let fx = f.value(x).unwrap();
                let gx = g.value(x).unwrap();

                // Leibniz rule I
                let r1 = dp_f.value(x).unwrap() * gx + tau_m.value(x).unwrap() * dp_g.value(x).unwrap();
                assert!((dp_fg.value(x).unwrap() - r1).norm() <= 1e-12);
                let r2 = dp_f.value(x).unwrap() * tau_m_g.value(x).unwrap() + fx * dp_g.value(x).unwrap();
                assert!((dp_fg.value(x).unwrap() - r2).norm() <= 1e-12);
                let r3 = dm_f.value(x).unwrap() * gx + tau_p.value(x).unwrap() * dm_g.value(x).unwrap();
                assert!((dm_fg.value(x).unwrap() - r3).norm() <= 1e-12);
                let r4 = dm_f.value(x).unwrap() * tau_p_g.value(x).unwrap() + fx * dm_g.value(x).unwrap();
                assert!((dm_fg.value(x).unwrap() - r4).norm() <= 1e-12);

                // Leibniz rule II: rewrite through shifted differences
                let dm_tau_m_g = diff_on(&tau_m_g, l, DiffMode::Backward, h, &inner, Extension::Strict)
                    .unwrap()
                    .value(x)
                    .unwrap();
                let r5 = dp_f.value(x).unwrap() * tau_m_g.value(x).unwrap() + fx * dm_tau_m_g;
                assert!((dp_fg.value(x).unwrap() - r5).norm() <= 1e-12);
                let dm_tau_m_f = diff_on(&tau_m, l, DiffMode::Backward, h, &inner, Extension::Strict)
                    .unwrap()
                    .value(x)
                    .unwrap();
                let r6 = dm_tau_m_f * gx + tau_m.value(x).unwrap() * dp_g.value(x).unwrap();
                assert!((dp_fg.value(x).unwrap() - r6).norm() <= 1e-12);
                let dp_tau_p_g = diff_on(&tau_p_g, l, DiffMode::Forward, h, &inner, Extension::Strict)
                    .unwrap()
                    .value(x)
                    .unwrap();
                let r7 = dm_f.value(x).unwrap() * tau_p_g.value(x).unwrap() + fx * dp_tau_p_g;
                assert!((dm_fg.value(x).unwrap() - r7).norm() <= 1e-12);
                let dp_tau_p_f = diff_on(&tau_p, l, DiffMode::Forward, h, &inner, Extension::Strict)
                    .unwrap()
                    .value(x)
                    .unwrap();
                let r8 = dp_tau_p_f * gx + tau_p.value(x).unwrap() * dm_g.value(x).unwrap();
                assert!((dm_fg.value(x).unwrap() - r8).norm() <= 1e-12);
            }
        }
    }

    /// `d+ = d- tau_{-he_l}` and `d- = d+ tau_{he_l}` as operator identities.
    #[test]
    fn shift_composition_identities() {
        let support = box_support(4);
        let f = random_field(&support, 31);
        let inner = shrink(f.support(), 1);
        for l in 0..8 {
            let tau_m = translate(&f, Coord::unit(l).neg());
            let tau_p = translate(&f, Coord::unit(l));
            let dp = diff_on(&f, l, DiffMode::Forward, 1.0, &inner, Extension::Strict).unwrap();
            let dm = diff_on(&f, l, DiffMode::Backward, 1.0, &inner, Extension::Strict).unwrap();
            let dm_shift = diff_on(&tau_m, l, DiffMode::Backward, 1.0, &inner, Extension::Strict).unwrap();
            let dp_shift = diff_on(&tau_p, l, DiffMode::Forward, 1.0, &inner, Extension::Strict).unwrap();
            for x in inner.iter() {
                assert!((dp.value(x).unwrap() - dm_shift.value(x).unwrap()).norm() <= 1e-15);
                assert!((dm.value(x).unwrap() - dp_shift.value(x).unwrap()).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn central_differences_commute() {
        let support = box_support(5);
        let f = random_field(&support, 41);
        let inner = shrink(f.support(), 2);
        for l in 0..8 {
            for m in (l + 1)..8 {
                let dl = diff(&f, l, DiffMode::Central, 1.0);
                let dm = diff(&f, m, DiffMode::Central, 1.0);
                let dlm = diff_on(&dl, m, DiffMode::Central, 1.0, &inner, Extension::Strict).unwrap();
                let dml = diff_on(&dm, l, DiffMode::Central, 1.0, &inner, Extension::Strict).unwrap();
                for x in inner.iter() {
                    assert!((dlm.value(x).unwrap() - dml.value(x).unwrap()).norm() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn dirac_of_constant_vanishes() {
        let support = box_support(3);
        let f = Field::constant(Arc::clone(&support), Octonion::basis(6) + Octonion::one());
        assert!(dirac(&f, 1.0).max_norm() <= 1e-15);
        assert!(conj_dirac(&f, 1.0).max_norm() <= 1e-15);
        assert!(laplacian(&f, 1.0).max_norm() <= 1e-15);
    }

    /// `Delta^h f = D^h (conj(D)^h f)` pointwise on random fields.
    #[test]
    fn laplacian_factors_through_dirac_pair() {
        for h in [1.0, 0.5] {
            let support = box_support(5);
            let f = random_field(&support, 55);
            let inner1 = shrink(f.support(), 1);
            let inner2 = shrink(f.support(), 2);
            let db = conj_dirac_on(&f, h, &inner1, Extension::Strict).unwrap();
            let ddb = dirac_on(&db, h, &inner2, Extension::Strict).unwrap();
            let lap = laplacian_on(&f, h, &inner2, Extension::Strict).unwrap();
            for x in inner2.iter() {
                assert!(
                    (ddb.value(x).unwrap() - lap.value(x).unwrap()).norm() <= 1e-12,
                    "factorization fails at {x:?} for h={h}"
                );
            }
        }
    }

    #[test]
    fn laplacian_of_indicator_spike() {
        // h = 1, f = indicator of the origin: the 16-neighbor stencil sees
        // only the center, so the value at 0 is -2*8/4 = -4.
        let pts: Vec<Coord> = (-2..=2)
            .flat_map(|d| (0..8).map(move |l| Coord::ORIGIN.shifted(l, d)))
            .chain([Coord::ORIGIN])
            .collect();
        let support = Arc::new(PointSet::from_points(pts));
        let f = Field::from_fn(Arc::clone(&support), |x| {
            if x == Coord::ORIGIN {
                Octonion::one()
            } else {
                Octonion::zero()
            }
        });
        let on = Arc::new(PointSet::from_points(vec![Coord::ORIGIN]));
        let lap = laplacian_on(&f, 1.0, &on, Extension::Zero).unwrap();
        assert!((lap.value(Coord::ORIGIN).unwrap() - Octonion::real(-4.0)).norm() <= 1e-15);
    }

    #[test]
    fn laplacian_16_point_stencil_at_h1() {
        let support = box_support(5);
        let f = random_field(&support, 77);
        let inner = shrink(f.support(), 2);
        let lap = laplacian_on(&f, 1.0, &inner, Extension::Strict).unwrap();
        for x in inner.iter() {
            let mut acc = Octonion::zero();
            for l in 0..8 {
                acc += f.value(x.shifted(l, 2)).unwrap() + f.value(x.shifted(l, -2)).unwrap()
                    - f.value(x).unwrap().scale(2.0);
            }
            assert!((lap.value(x).unwrap() - acc.scale(0.25)).norm() <= 1e-13);
        }
    }

    #[test]
    fn random_rng_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: f64 = rng.gen_range(-1.0..1.0);
        assert!((-1.0..1.0).contains(&v));
    }
}
