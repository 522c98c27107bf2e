//! Bounded subsets of the scaled lattice `Z^8_h`: two-layer boundaries,
//! discrete outward normals, boundary measure, and volume/surface sums.
//!
//! Domains store integer lattice coordinates; the physical point is `h * n`.
//! Boundary geometry is derived once at construction from the jump pattern
//! of the indicator function and kept in a compact per-point record.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::octonion::Octonion;

/// Integer lattice coordinate in `Z^8` (lattice units; physical point is `h * n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord(pub [i64; 8]);

impl Coord {
    pub const ORIGIN: Coord = Coord([0; 8]);

    pub fn unit(l: usize) -> Coord {
        assert!(l < 8);
        let mut n = [0i64; 8];
        n[l] = 1;
        Coord(n)
    }

    pub fn shifted(&self, l: usize, by: i64) -> Coord {
        let mut n = self.0;
        n[l] += by;
        Coord(n)
    }

    pub fn add(&self, other: Coord) -> Coord {
        let mut n = self.0;
        for (a, b) in n.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Coord(n)
    }

    pub fn sub(&self, other: Coord) -> Coord {
        let mut n = self.0;
        for (a, b) in n.iter_mut().zip(other.0.iter()) {
            *a -= b;
        }
        Coord(n)
    }

    pub fn neg(&self) -> Coord {
        let mut n = self.0;
        for a in n.iter_mut() {
            *a = -*a;
        }
        Coord(n)
    }

    /// Chebyshev (sup) norm.
    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|v| v.abs()).max().unwrap()
    }

    pub fn norm_sqr(&self) -> i64 {
        self.0.iter().map(|v| v * v).sum()
    }

    /// Physical position for mesh width `h`.
    pub fn physical(&self, h: f64) -> [f64; 8] {
        let mut x = [0.0; 8];
        for (xi, ni) in x.iter_mut().zip(self.0.iter()) {
            *xi = h * (*ni as f64);
        }
        x
    }

    /// Octonion embedding of the physical position.
    pub fn to_octonion(&self, h: f64) -> Octonion {
        Octonion::new(self.physical(h))
    }

    /// The 17-point neighborhood `{x} U {x +/- e_l}` in lattice units.
    pub fn neighborhood(&self) -> Vec<Coord> {
        let mut out = Vec::with_capacity(17);
        out.push(*self);
        for l in 0..8 {
            out.push(self.shifted(l, 1));
            out.push(self.shifted(l, -1));
        }
        out
    }
}

/// Finite, sorted, indexable set of lattice points.
#[derive(Debug, Clone, Default)]
pub struct PointSet {
    points: Vec<Coord>,
    index: HashMap<Coord, u32>,
}

impl PointSet {
    pub fn from_points(mut points: Vec<Coord>) -> Self {
        points.sort_unstable();
        points.dedup();
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i as u32))
            .collect();
        PointSet { points, index }
    }

    pub fn empty() -> Self {
        PointSet::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: Coord) -> bool {
        self.index.contains_key(&x)
    }

    pub fn position(&self, x: Coord) -> Option<usize> {
        self.index.get(&x).map(|i| *i as usize)
    }

    /// Points in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = Coord> + '_ {
        self.points.iter().copied()
    }

    pub fn points(&self) -> &[Coord] {
        &self.points
    }

    /// Set dilated by one axis step (union of all 17-point neighborhoods).
    pub fn dilate(&self) -> PointSet {
        let mut pts = Vec::with_capacity(self.len() * 4);
        for p in self.iter() {
            pts.extend(p.neighborhood());
        }
        PointSet::from_points(pts)
    }

    pub fn translate(&self, y: Coord) -> PointSet {
        PointSet::from_points(self.iter().map(|p| p.add(y)).collect())
    }

    pub fn max_norm_inf(&self) -> i64 {
        self.points.iter().map(|p| p.norm_inf()).max().unwrap_or(0)
    }
}

impl FromIterator<Coord> for PointSet {
    fn from_iter<T: IntoIterator<Item = Coord>>(iter: T) -> Self {
        PointSet::from_points(iter.into_iter().collect())
    }
}

/// Where a point of the closure sits relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    /// `B` minus its boundary.
    Interior,
    /// Boundary layer inside `B`.
    InnerBoundary,
    /// Boundary layer outside `B`.
    OuterBoundary,
}

/// Jump pattern of the indicator function at a boundary point, one bit per
/// axis. `plus_*` encodes the forward difference of the indicator, `minus_*`
/// the backward one; `*_pos`/`*_neg` distinguish the sign of the jump.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JumpPattern {
    pub plus_pos: u8,
    pub plus_neg: u8,
    pub minus_pos: u8,
    pub minus_neg: u8,
}

impl JumpPattern {
    pub fn jump_count(&self) -> u32 {
        self.plus_pos.count_ones()
            + self.plus_neg.count_ones()
            + self.minus_pos.count_ones()
            + self.minus_neg.count_ones()
    }

    pub fn is_boundary(&self) -> bool {
        self.jump_count() > 0
    }
}

/// Discrete normals and boundary measure weight at one boundary point.
#[derive(Debug, Clone, Copy)]
pub struct NormalData {
    pub n_plus: [f64; 8],
    pub n_minus: [f64; 8],
    /// Boundary measure weight `s(x)`.
    pub weight: f64,
    /// Octonionic normal `sum_l (n_l^+ + n_l^-)/2 e_l`.
    pub normal_oct: Octonion,
}

impl NormalData {
    fn from_pattern(p: JumpPattern, h: f64) -> NormalData {
        // d/dx^{+-} of the indicator takes values in {0, +-1/h}; the common
        // 1/h factors cancel in the normals and combine to h^7 in the weight.
        let count = f64::from(p.jump_count());
        let root = count.sqrt();
        let mut n_plus = [0.0; 8];
        let mut n_minus = [0.0; 8];
        let mut oct = [0.0; 8];
        for l in 0..8 {
            let bit = 1u8 << l;
            let dp = f64::from((p.plus_pos & bit != 0) as i8 - (p.plus_neg & bit != 0) as i8);
            let dm = f64::from((p.minus_pos & bit != 0) as i8 - (p.minus_neg & bit != 0) as i8);
            n_plus[l] = -2.0 * dp / root;
            n_minus[l] = -2.0 * dm / root;
            oct[l] = 0.5 * (n_plus[l] + n_minus[l]);
        }
        NormalData {
            n_plus,
            n_minus,
            weight: 0.5 * h.powi(8) * root / h,
            normal_oct: Octonion::new(oct),
        }
    }

    /// All-zero record for points off the boundary (zero-extension).
    pub fn zero() -> NormalData {
        NormalData {
            n_plus: [0.0; 8],
            n_minus: [0.0; 8],
            weight: 0.0,
            normal_oct: Octonion::zero(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("mesh width must be positive, got {0}")]
    NonPositiveMesh(f64),
    #[error("field is not defined at {0:?}")]
    OffSupport(Coord),
    #[error("field support does not cover the requested set")]
    SupportMismatch,
}

/// Bounded lattice domain `B` with its derived boundary decomposition and
/// geometry, all computed eagerly and immutable afterwards.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    h: f64,
    /// Closure `B U dB`, sorted.
    closure: PointSet,
    /// Status of each closure point, aligned with `closure`.
    status: Vec<PointStatus>,
    /// Jump pattern of each closure point (trivial for interior points).
    jumps: Vec<JumpPattern>,
    boundary: PointSet,
    inner_boundary: PointSet,
    outer_boundary: PointSet,
    interior: PointSet,
    points: PointSet,
}

impl LatticeDomain {
    pub fn new(h: f64, points: Vec<Coord>) -> Result<LatticeDomain, LatticeError> {
        if !(h > 0.0) {
            return Err(LatticeError::NonPositiveMesh(h));
        }
        let points = PointSet::from_points(points);

        // Closure candidates: B plus every axis neighbor.
        let mut closure_pts = Vec::with_capacity(points.len() * 2);
        for p in points.iter() {
            closure_pts.extend(p.neighborhood());
        }
        let candidates = PointSet::from_points(closure_pts);

        let mut closure = Vec::new();
        let mut status = Vec::new();
        let mut jumps = Vec::new();
        for x in candidates.iter() {
            let inside = points.contains(x);
            let mut pattern = JumpPattern::default();
            for l in 0..8 {
                let bit = 1u8 << l;
                let fwd = points.contains(x.shifted(l, 1));
                let bwd = points.contains(x.shifted(l, -1));
                // forward difference of the indicator
                if fwd && !inside {
                    pattern.plus_pos |= bit;
                } else if !fwd && inside {
                    pattern.plus_neg |= bit;
                }
                // backward difference of the indicator
                if inside && !bwd {
                    pattern.minus_pos |= bit;
                } else if !inside && bwd {
                    pattern.minus_neg |= bit;
                }
            }
            let on_boundary = pattern.is_boundary();
            if !inside && !on_boundary {
                continue; // outside the closure
            }
            closure.push(x);
            jumps.push(pattern);
            status.push(if !inside {
                PointStatus::OuterBoundary
            } else if on_boundary {
                PointStatus::InnerBoundary
            } else {
                PointStatus::Interior
            });
        }

        let boundary = closure
            .iter()
            .zip(status.iter())
            .filter(|(_, s)| !matches!(s, PointStatus::Interior))
            .map(|(p, _)| *p)
            .collect();
        let inner_boundary = closure
            .iter()
            .zip(status.iter())
            .filter(|(_, s)| matches!(s, PointStatus::InnerBoundary))
            .map(|(p, _)| *p)
            .collect();
        let outer_boundary = closure
            .iter()
            .zip(status.iter())
            .filter(|(_, s)| matches!(s, PointStatus::OuterBoundary))
            .map(|(p, _)| *p)
            .collect();
        let interior = closure
            .iter()
            .zip(status.iter())
            .filter(|(_, s)| matches!(s, PointStatus::Interior))
            .map(|(p, _)| *p)
            .collect();

        Ok(LatticeDomain {
            h,
            closure: PointSet::from_points(closure),
            status,
            jumps,
            boundary,
            inner_boundary,
            outer_boundary,
            interior,
            points,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The domain `B` itself.
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    /// Closure `B U dB`.
    pub fn closure(&self) -> &PointSet {
        &self.closure
    }

    /// Two-layer boundary `dB`.
    pub fn boundary(&self) -> &PointSet {
        &self.boundary
    }

    /// Inner boundary layer `dB /\ B`.
    pub fn inner_boundary(&self) -> &PointSet {
        &self.inner_boundary
    }

    /// Outer boundary layer `dB \ B`.
    pub fn outer_boundary(&self) -> &PointSet {
        &self.outer_boundary
    }

    /// Interior `B \ dB`.
    pub fn interior(&self) -> &PointSet {
        &self.interior
    }

    /// Indicator of `B`.
    pub fn contains(&self, x: Coord) -> bool {
        self.points.contains(x)
    }

    pub fn chi(&self, x: Coord) -> f64 {
        if self.contains(x) {
            1.0
        } else {
            0.0
        }
    }

    pub fn status(&self, x: Coord) -> Option<PointStatus> {
        self.closure.position(x).map(|i| self.status[i])
    }

    pub fn jump_pattern(&self, x: Coord) -> JumpPattern {
        self.closure
            .position(x)
            .map(|i| self.jumps[i])
            .unwrap_or_default()
    }

    /// Normals, measure weight and octonionic normal at `x`; the all-zero
    /// record off the boundary, matching the zero-extension convention.
    pub fn normal_data(&self, x: Coord) -> NormalData {
        let p = self.jump_pattern(x);
        if p.is_boundary() {
            NormalData::from_pattern(p, self.h)
        } else {
            NormalData::zero()
        }
    }

    /// Volume integral `sum_{x in B} f(x) h^8` of a field defined on `B`.
    pub fn volume_integral(&self, f: &Field) -> Result<Octonion, LatticeError> {
        let h8 = self.h.powi(8);
        let mut acc = Octonion::zero();
        for x in self.points.iter() {
            acc += f.value(x)?;
        }
        Ok(acc.scale(h8))
    }

    /// Surface integral `sum_{x in dB} f(x) s(x)` of a field defined on `dB`.
    pub fn surface_integral(&self, f: &Field) -> Result<Octonion, LatticeError> {
        let mut acc = Octonion::zero();
        for x in self.boundary.iter() {
            let nd = self.normal_data(x);
            acc += f.value(x)?.scale(nd.weight);
        }
        Ok(acc)
    }

    /// Total boundary measure `S(dB)`.
    pub fn boundary_measure(&self) -> f64 {
        self.boundary
            .iter()
            .map(|x| self.normal_data(x).weight)
            .sum()
    }
}

/// Finite octonion-valued field: a map from a point set to values.
#[derive(Debug, Clone)]
pub struct Field {
    support: Arc<PointSet>,
    values: Vec<Octonion>,
}

impl Field {
    pub fn from_fn(support: Arc<PointSet>, mut f: impl FnMut(Coord) -> Octonion) -> Field {
        let values = support.iter().map(&mut f).collect();
        Field { support, values }
    }

    /// Values aligned with the support's sorted point order.
    pub fn from_values(support: Arc<PointSet>, values: Vec<Octonion>) -> Field {
        assert_eq!(support.len(), values.len(), "one value per support point");
        Field { support, values }
    }

    pub fn constant(support: Arc<PointSet>, value: Octonion) -> Field {
        let values = vec![value; support.len()];
        Field { support, values }
    }

    pub fn zero(support: Arc<PointSet>) -> Field {
        Field::constant(support, Octonion::zero())
    }

    pub fn support(&self) -> &Arc<PointSet> {
        &self.support
    }

    /// Strict lookup; off-support access is an error.
    pub fn value(&self, x: Coord) -> Result<Octonion, LatticeError> {
        self.support
            .position(x)
            .map(|i| self.values[i])
            .ok_or(LatticeError::OffSupport(x))
    }

    /// Explicit zero-extension of the field to all of the lattice.
    pub fn value_or_zero(&self, x: Coord) -> Octonion {
        self.support
            .position(x)
            .map(|i| self.values[i])
            .unwrap_or_else(Octonion::zero)
    }

    pub fn set(&mut self, x: Coord, v: Octonion) -> Result<(), LatticeError> {
        let i = self
            .support
            .position(x)
            .ok_or(LatticeError::OffSupport(x))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(Octonion) -> Octonion) -> Field {
        Field {
            support: Arc::clone(&self.support),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip(&self, other: &Field, mut f: impl FnMut(Octonion, Octonion) -> Octonion) -> Result<Field, LatticeError> {
        if !Arc::ptr_eq(&self.support, &other.support) && self.support.points() != other.support.points() {
            return Err(LatticeError::SupportMismatch);
        }
        Ok(Field {
            support: Arc::clone(&self.support),
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    /// Pointwise product field (octonion multiplication).
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field, LatticeError> {
        self.zip(other, |a, b| a * b)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coord, Octonion)> + '_ {
        self.support.iter().zip(self.values.iter().copied())
    }
}

/// Domain description file consumed by the CLI.
///
/// ```json
/// {"h": 1.0, "shape": "box", "min": [0,0,0,0,0,0,0,0], "size": [3,3,3,3,3,3,3,3]}
/// {"h": 0.5, "shape": "ball", "center": [0,0,0,0,0,0,0,0], "radius": 2.2}
/// {"h": 1.0, "shape": "explicit", "points": [[0,0,0,0,0,0,0,0], [1,0,0,0,0,0,0,0]]}
/// ```
///
/// Box `min`/`size` and explicit points are in lattice units; the ball's
/// `center` and `radius` are physical and select `|h n - center| < radius`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum DomainSpec {
    Box {
        h: f64,
        min: [i64; 8],
        size: [u32; 8],
    },
    Ball {
        h: f64,
        center: [f64; 8],
        radius: f64,
    },
    Explicit {
        h: f64,
        points: Vec<[i64; 8]>,
    },
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<DomainSpec, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn build(&self) -> Result<LatticeDomain, LatticeError> {
        match self {
            DomainSpec::Box { h, min, size } => {
                let mut pts = vec![Coord(*min)];
                for l in 0..8 {
                    let mut next = Vec::with_capacity(pts.len() * size[l] as usize);
                    for p in &pts {
                        for d in 0..size[l] as i64 {
                            next.push(p.shifted(l, d));
                        }
                    }
                    pts = next;
                }
                LatticeDomain::new(*h, pts)
            }
            DomainSpec::Ball { h, center, radius } => {
                let pts = ball_lattice_points(*h, center, *radius);
                LatticeDomain::new(*h, pts)
            }
            DomainSpec::Explicit { h, points } => {
                LatticeDomain::new(*h, points.iter().map(|p| Coord(*p)).collect())
            }
        }
    }
}

/// Lattice points `n` with `|h n - center| < radius`.
pub fn ball_lattice_points(h: f64, center: &[f64; 8], radius: f64) -> Vec<Coord> {
    let mut pts = Vec::new();
    let lo: Vec<i64> = center
        .iter()
        .map(|c| ((c - radius) / h).floor() as i64)
        .collect();
    let hi: Vec<i64> = center
        .iter()
        .map(|c| ((c + radius) / h).ceil() as i64)
        .collect();
    let r2 = radius * radius;
    let mut n = [0i64; 8];
    fn rec(
        l: usize,
        n: &mut [i64; 8],
        lo: &[i64],
        hi: &[i64],
        h: f64,
        center: &[f64; 8],
        r2: f64,
        partial: f64,
        pts: &mut Vec<Coord>,
    ) {
        if partial >= r2 {
            return;
        }
        if l == 8 {
            pts.push(Coord(*n));
            return;
        }
        for v in lo[l]..=hi[l] {
            n[l] = v;
            let d = h * (v as f64) - center[l];
            rec(l + 1, n, lo, hi, h, center, r2, partial + d * d, pts);
        }
    }
    rec(0, &mut n, &lo, &hi, h, center, r2, 0.0, &mut pts);
    pts
}

/// Convenience constructor for the axis-aligned box `{0, .., side-1}^8` at mesh `h`.
pub fn cube_domain(h: f64, side: u32) -> LatticeDomain {
    DomainSpec::Box {
        h,
        min: [0; 8],
        size: [side; 8],
    }
    .build()
    .expect("box construction cannot fail for positive h")
}
