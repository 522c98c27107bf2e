//! Star-product surface kernel and the boundary operators built on it:
//! Cauchy-Bitsadze, Teodorescu, the singular operator, Plemelj projections,
//! regular extensions and the exterior Cauchy formula.
//!
//! All integrals are finite sums. The products `n_l^{+-}(x) s(x)` reduce to
//! `-h^7` times the indicator jumps (an exact identity), so boundary sums
//! run on integer jump patterns; the mesh factors cancel against the `h^-7`
//! of the kernel scaling and only reappear in the Teodorescu volume factor.
//!
//! The star product fixes the grouping: kernel coefficients multiply the
//! already-formed product `e_l f` from the left and are never reassociated.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::{sparse_to_octonion, DenseF1, KernelError, KernelTable};
use crate::lattice::{Coord, Field, JumpPattern, LatticeDomain, LatticeError, PointSet};
use crate::octonion::Octonion;
use crate::operators::{self, Extension};

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{0:?} is not a boundary point")]
    NotBoundaryPoint(Coord),
    #[error("kernel table range {range} cannot reach the requested evaluation points (needs {required})")]
    Coverage { required: i64, range: u32 },
}

/// Which one-sided regular extension to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionSide {
    Interior,
    Exterior,
}

/// Which Plemelj projection to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    P,
    Q,
}

struct BoundarySite {
    coord: [i64; 8],
    jumps: JumpPattern,
}

/// Evaluator for the boundary operators of one domain against one kernel
/// table. Immutable once built; evaluations are pure and run in parallel.
pub struct CauchyEngine<'a> {
    table: Arc<KernelTable>,
    domain: &'a LatticeDomain,
    sites: Vec<BoundarySite>,
    dense: Option<DenseF1>,
}

impl<'a> CauchyEngine<'a> {
    pub fn new(table: Arc<KernelTable>, domain: &'a LatticeDomain) -> CauchyEngine<'a> {
        let sites = domain
            .boundary()
            .iter()
            .map(|x| BoundarySite {
                coord: x.0,
                jumps: domain.jump_pattern(x),
            })
            .collect();
        // dense F1 cache sized for boundary-to-closure differences
        let span = boundary_span(domain);
        let dense = table.dense_block((span + 3) / 2);
        CauchyEngine {
            table,
            domain,
            sites,
            dense,
        }
    }

    pub fn domain(&self) -> &LatticeDomain {
        self.domain
    }

    pub fn table(&self) -> &KernelTable {
        &self.table
    }

    /// Hard coverage check for a set of evaluation points: every kernel read
    /// that a Cauchy sum against this boundary can make must resolve.
    pub fn ensure_coverage<I: IntoIterator<Item = Coord>>(&self, eval: I) -> Result<(), BoundaryError> {
        let mut required = 0i64;
        for y in eval {
            for site in &self.sites {
                let mut span = 0i64;
                for l in 0..8 {
                    span = span.max((y.0[l] - site.coord[l]).abs());
                }
                required = required.max(span + 1);
            }
        }
        if required > i64::from(self.table.range()) {
            return Err(BoundaryError::Coverage {
                required,
                range: self.table.range(),
            });
        }
        Ok(())
    }

    #[inline]
    fn f1_even(&self, x: &[i64; 8]) -> Result<f64, KernelError> {
        if let Some(dense) = &self.dense {
            if let Some(v) = dense.f1_even(x) {
                return Ok(v);
            }
        }
        self.table.f1(Coord(*x))
    }

    /// Sparse `E1` at a raw coordinate difference: `Some((axis, v))` with
    /// `E1 = conj(e_axis) * v`, or `None` when parity kills the value.
    #[inline]
    fn e1_sparse(&self, v: &[i64; 8]) -> Result<Option<(usize, f64)>, KernelError> {
        let mut odd_axis = usize::MAX;
        for (l, c) in v.iter().enumerate() {
            if c & 1 != 0 {
                if odd_axis != usize::MAX {
                    return Ok(None);
                }
                odd_axis = l;
            }
        }
        if odd_axis == usize::MAX {
            return Ok(None);
        }
        let mut fwd = *v;
        fwd[odd_axis] += 1;
        let mut bwd = *v;
        bwd[odd_axis] -= 1;
        let value = 0.5 * (self.f1_even(&fwd)? - self.f1_even(&bwd)?);
        Ok(Some((odd_axis, value)))
    }

    /// `K^h(x, y) * f` for a single boundary point (without the measure
    /// weight); zero whenever `x` is off the boundary.
    pub fn star_apply(&self, x: Coord, y: Coord, f: Octonion) -> Result<Octonion, BoundaryError> {
        let nd = self.domain.normal_data(x);
        let h = self.domain.h();
        let inv_h7 = h.powi(-7);
        let mut acc = Octonion::zero();
        for l in 0..8 {
            if nd.n_minus[l] == 0.0 && nd.n_plus[l] == 0.0 {
                continue;
            }
            let d = y.sub(x);
            let mut coeff = Octonion::zero();
            if let Some((axis, v)) = self.e1_sparse(&d.shifted(l, 1).0)? {
                coeff += sparse_to_octonion(axis, v * nd.n_minus[l] * inv_h7);
            }
            if let Some((axis, v)) = self.e1_sparse(&d.shifted(l, -1).0)? {
                coeff += sparse_to_octonion(axis, v * nd.n_plus[l] * inv_h7);
            }
            if coeff.is_zero() {
                continue;
            }
            let ef = Octonion::basis_mul_left(l, f);
            acc -= 0.5 * (coeff * ef);
        }
        Ok(acc)
    }

    /// One boundary site's contribution to the Cauchy sum at `y`, with the
    /// measure weight already folded in through the jump identity.
    #[inline]
    fn site_term(&self, site: &BoundarySite, y: &[i64; 8], f: Octonion) -> Result<Octonion, KernelError> {
        let mut d = [0i64; 8];
        let mut parity = 0u32;
        for l in 0..8 {
            d[l] = y[l] - site.coord[l];
            parity += (d[l] & 1) as u32;
        }
        // a kernel read at d +- e_l survives only with exactly one odd
        // coordinate, which forces the parity of d to be 0 or 2
        if parity != 0 && parity != 2 {
            return Ok(Octonion::zero());
        }
        let j = site.jumps;
        let mut acc = Octonion::zero();
        for l in 0..8 {
            let bit = 1u8 << l;
            let jm = i64::from(j.minus_pos & bit != 0) - i64::from(j.minus_neg & bit != 0);
            let jp = i64::from(j.plus_pos & bit != 0) - i64::from(j.plus_neg & bit != 0);
            if jm == 0 && jp == 0 {
                continue;
            }
            let mut coeff_axis = usize::MAX;
            let mut coeff_val = 0.0f64;
            if jm != 0 {
                let mut arg = d;
                arg[l] += 1;
                if let Some((axis, v)) = self.e1_sparse(&arg)? {
                    coeff_axis = axis;
                    coeff_val += v * jm as f64;
                }
            }
            if jp != 0 {
                let mut arg = d;
                arg[l] -= 1;
                if let Some((axis, v)) = self.e1_sparse(&arg)? {
                    debug_assert!(coeff_axis == usize::MAX || coeff_axis == axis);
                    coeff_axis = axis;
                    coeff_val += v * jp as f64;
                }
            }
            if coeff_val == 0.0 || coeff_axis == usize::MAX {
                continue;
            }
            // (1/2) [sum of E1 reads] conj(e_axis) (e_l f), fixed grouping
            let ef = Octonion::basis_mul_left(l, f);
            acc += Octonion::conj_basis_mul_left(coeff_axis, ef).scale(0.5 * coeff_val);
        }
        Ok(acc)
    }

    fn boundary_values(&self, f: &Field) -> Result<Vec<Octonion>, BoundaryError> {
        self.sites
            .iter()
            .map(|s| f.value(Coord(s.coord)).map_err(BoundaryError::from))
            .collect()
    }

    fn cauchy_from_values(&self, values: &[Octonion], y: Coord) -> Result<Octonion, KernelError> {
        let mut acc = Octonion::zero();
        for (site, fx) in self.sites.iter().zip(values.iter()) {
            if fx.is_zero() {
                continue;
            }
            acc += self.site_term(site, &y.0, *fx)?;
        }
        Ok(acc)
    }

    /// Discrete Cauchy-Bitsadze integral `C^h f(y)` of boundary data `f`.
    pub fn cauchy(&self, f: &Field, y: Coord) -> Result<Octonion, BoundaryError> {
        let values = self.boundary_values(f)?;
        Ok(self.cauchy_from_values(&values, y)?)
    }

    /// `C^h f` at many points, in parallel, in input order.
    pub fn cauchy_many(&self, f: &Field, ys: &[Coord]) -> Result<Vec<Octonion>, BoundaryError> {
        let values = self.boundary_values(f)?;
        ys.par_iter()
            .map(|y| self.cauchy_from_values(&values, *y).map_err(BoundaryError::from))
            .collect()
    }

    /// Discrete Teodorescu integral `T^h_B g(y)` of volume data `g` on `B`.
    pub fn teodorescu(&self, g: &Field, y: Coord) -> Result<Octonion, BoundaryError> {
        let mut acc = Octonion::zero();
        for x in self.domain.points().iter() {
            let gx = g.value(x)?;
            if gx.is_zero() {
                continue;
            }
            let d = y.sub(x);
            if let Some((axis, v)) = self.e1_sparse(&d.0)? {
                acc += Octonion::conj_basis_mul_left(axis, gx).scale(v);
            }
        }
        Ok(acc.scale(self.domain.h()))
    }

    pub fn teodorescu_many(&self, g: &Field, ys: &[Coord]) -> Result<Vec<Octonion>, BoundaryError> {
        ys.par_iter().map(|y| self.teodorescu(g, *y)).collect()
    }

    /// Singular boundary operator
    /// `S^h f(y) = 2 int K^h(x,y) * (f(x) - f(y)) dS(x) + f(y)`, `y` on the
    /// boundary.
    pub fn singular(&self, f: &Field, y: Coord) -> Result<Octonion, BoundaryError> {
        if !self.domain.boundary().contains(y) {
            return Err(BoundaryError::NotBoundaryPoint(y));
        }
        let values = self.boundary_values(f)?;
        let fy = f.value(y)?;
        Ok(self.singular_from_values(&values, fy, y)?)
    }

    fn singular_from_values(&self, values: &[Octonion], fy: Octonion, y: Coord) -> Result<Octonion, KernelError> {
        let mut acc = Octonion::zero();
        for (site, fx) in self.sites.iter().zip(values.iter()) {
            let diff = *fx - fy;
            if diff.is_zero() {
                continue;
            }
            acc += self.site_term(site, &y.0, diff)?;
        }
        Ok(acc.scale(2.0) + fy)
    }

    /// `S^h f` on the whole boundary as a field (one full sweep, parallel
    /// over target points).
    pub fn singular_field(&self, f: &Field) -> Result<Field, BoundaryError> {
        let values = self.boundary_values(f)?;
        let targets: Vec<Coord> = self.domain.boundary().iter().collect();
        let out: Result<Vec<Octonion>, KernelError> = targets
            .par_iter()
            .enumerate()
            .map(|(i, y)| self.singular_from_values(&values, values[i], *y))
            .collect();
        let support = Arc::new(self.domain.boundary().clone());
        Ok(Field::from_values(support, out?))
    }

    /// Plemelj projection at one boundary point.
    pub fn plemelj(&self, f: &Field, y: Coord, which: Projection) -> Result<Octonion, BoundaryError> {
        let s = self.singular(f, y)?;
        let fy = f.value(y)?;
        Ok(match which {
            Projection::P => (fy + s).scale(0.5),
            Projection::Q => (fy - s).scale(0.5),
        })
    }

    /// Plemelj projection of the whole boundary field.
    pub fn plemelj_field(&self, f: &Field, which: Projection) -> Result<Field, BoundaryError> {
        let s = self.singular_field(f)?;
        Ok(match which {
            Projection::P => f.zip(&s, |a, b| (a + b).scale(0.5))?,
            Projection::Q => f.zip(&s, |a, b| (a - b).scale(0.5))?,
        })
    }

    /// Max Cauchy-Pompeiu residual `|chi_B f - C^h f - T^h_B(D^h f)|` over
    /// the sample points, for `f` defined on the closure. Differences of `f`
    /// read through the zero-extension, which never leaves the closure here.
    pub fn pompeiu_residual(&self, f: &Field, samples: &[Coord]) -> Result<f64, BoundaryError> {
        let volume = Arc::new(self.domain.points().clone());
        let df = operators::dirac_on(f, self.domain.h(), &volume, Extension::Zero)?;
        let c = self.cauchy_many(f, samples)?;
        let t = self.teodorescu_many(&df, samples)?;
        let mut worst = 0.0f64;
        for ((y, cy), ty) in samples.iter().zip(c).zip(t) {
            let lhs = f.value_or_zero(*y).scale(self.domain.chi(*y));
            worst = worst.max((lhs - cy - ty).norm());
        }
        Ok(worst)
    }

    /// One-sided regular extension of boundary data `f`, evaluated on `eval`.
    ///
    /// The interior extension is `f~ - T^h_B(D^h f~)` (boundary values `P f`,
    /// regular on `B`); the exterior one is `T^h_B(D^h f~)` (boundary values
    /// `Q f`, regular outside, vanishing at infinity). `f~` is the
    /// zero-extension of `f` off the boundary.
    pub fn regular_extension(
        &self,
        f: &Field,
        side: ExtensionSide,
        eval: &Arc<PointSet>,
    ) -> Result<Field, BoundaryError> {
        let volume = Arc::new(self.domain.points().clone());
        let df = operators::dirac_on(f, self.domain.h(), &volume, Extension::Zero)?;
        let ys: Vec<Coord> = eval.iter().collect();
        let t = self.teodorescu_many(&df, &ys)?;
        let values: Vec<Octonion> = match side {
            ExtensionSide::Interior => ys
                .iter()
                .zip(t.iter())
                .map(|(y, ty)| f.value_or_zero(*y) - *ty)
                .collect(),
            ExtensionSide::Exterior => t,
        };
        Ok(Field::from_values(Arc::clone(eval), values))
    }

    /// `D^h (C^h f)(y)` by central differences of the Cauchy integral.
    pub fn dirac_of_cauchy(&self, f: &Field, y: Coord) -> Result<Octonion, BoundaryError> {
        let values = self.boundary_values(f)?;
        let h = self.domain.h();
        let mut acc = Octonion::zero();
        for l in 0..8 {
            let fwd = self.cauchy_from_values(&values, y.shifted(l, 1))?;
            let bwd = self.cauchy_from_values(&values, y.shifted(l, -1))?;
            acc += Octonion::basis_mul_left(l, (fwd - bwd).scale(0.5 / h));
        }
        Ok(acc)
    }

    /// `D^h (T^h_B g)(y)` by central differences of the Teodorescu integral.
    pub fn dirac_of_teodorescu(&self, g: &Field, y: Coord) -> Result<Octonion, BoundaryError> {
        let h = self.domain.h();
        let mut acc = Octonion::zero();
        for l in 0..8 {
            let fwd = self.teodorescu(g, y.shifted(l, 1))?;
            let bwd = self.teodorescu(g, y.shifted(l, -1))?;
            acc += Octonion::basis_mul_left(l, (fwd - bwd).scale(0.5 / h));
        }
        Ok(acc)
    }

    /// Boundary restriction of the shifted kernel `E^h(. - a)`.
    pub fn kernel_shift_boundary_data(&self, a: Coord) -> Result<Field, BoundaryError> {
        let support = Arc::new(self.domain.boundary().clone());
        let h = self.domain.h();
        let mut values = Vec::with_capacity(support.len());
        for x in support.iter() {
            values.push(self.table.eh(x.sub(a), h)?);
        }
        Ok(Field::from_values(support, values))
    }

    /// Max residual of the exterior Cauchy formula
    /// `-C^h f(y) = chi_{complement}(y) f(y)` for `f = E^h(. - a)`, `a`
    /// interior.
    pub fn exterior_cauchy_residual(&self, a: Coord, samples: &[Coord]) -> Result<f64, BoundaryError> {
        let f = self.kernel_shift_boundary_data(a)?;
        let c = self.cauchy_many(&f, samples)?;
        let h = self.domain.h();
        let mut worst = 0.0f64;
        for (y, cy) in samples.iter().zip(c) {
            let expected = if self.domain.contains(*y) {
                Octonion::zero()
            } else {
                self.table.eh(y.sub(a), h)?
            };
            worst = worst.max((-cy - expected).norm());
        }
        Ok(worst)
    }
}

fn boundary_span(domain: &LatticeDomain) -> i64 {
    let pts = domain.boundary().points();
    if pts.is_empty() {
        return 0;
    }
    let mut span = 0i64;
    for l in 0..8 {
        let min = pts.iter().map(|p| p.0[l]).min().unwrap();
        let max = pts.iter().map(|p| p.0[l]).max().unwrap();
        span = span.max(max - min);
    }
    span
}
