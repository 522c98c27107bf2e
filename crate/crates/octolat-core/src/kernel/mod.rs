//! Discrete fundamental solutions on `Z^8` and the persistent kernel table.
//!
//! The fundamental solution of the discrete Laplacian has the torus-integral
//! representation whose symbol is the sine sum; writing the reciprocal symbol
//! as an exponential integral and integrating out the eight angles reduces
//! every value to a one-dimensional integral of a product of exponentially
//! scaled modified Bessel functions:
//!
//! `F1(x) = -2 int_0^inf prod_l [e^{-z} I_{x_l/2}(z)] dz`
//!
//! for points with all coordinates even; values at points with any odd
//! coordinate vanish identically. The Dirac-level kernel is the conjugated
//! central gradient of `F1`, so every `E1`/`Eh` value derives from the same
//! table of `F1` values, keyed by the signed-permutation canonical class.

pub mod bessel;
pub mod quad;
pub mod srw;

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::Coord;
use crate::octonion::Octonion;
use crate::sampling;

pub use quad::QuadError;

/// Upper integration limit: the scaled integrand is bounded by `(2 pi z)^-4`,
/// which falls below 1e-16 here.
pub const Z_MAX: f64 = 1e4 / (2.0 * std::f64::consts::PI);

/// Default relative quadrature tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance on the defining identities rechecked from table values.
pub const TOL_IDENTITY: f64 = 1e-8;

/// Tolerance on the exact relation `F1(2 e0) - F1(0) = 1/4`.
pub const TOL_QUARTER: f64 = 1e-9;

/// Surface area of the unit 7-sphere, `2 pi^4 / Gamma(4) = pi^4 / 3`.
pub const OMEGA_7: f64 = 32.46969701133414; // pi^4 / 3

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel table (range {range}) does not cover {point:?}")]
    Coverage { point: Coord, range: u32 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("point {0:?} is not on the mesh of width {1}")]
    NonLattice(String, f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a kernel cache file (bad magic)")]
    BadMagic,
    #[error("unsupported kernel cache version {0}")]
    UnsupportedVersion(u32),
    #[error("kernel cache file is truncated or malformed")]
    Malformed,
}

/// `F1(x)` by direct quadrature; zero at any point with an odd coordinate.
pub fn f1_value(x: Coord, tol: f64) -> Result<f64, KernelError> {
    if x.0.iter().any(|v| v % 2 != 0) {
        return Ok(0.0);
    }
    let mut orders = [0usize; 8];
    for (o, v) in orders.iter_mut().zip(x.0.iter()) {
        *o = (v.unsigned_abs() / 2) as usize;
    }
    Ok(f1_for_orders(&orders, tol)?)
}

fn f1_for_orders(orders: &[usize; 8], tol: f64) -> Result<f64, QuadError> {
    let m_max = *orders.iter().max().unwrap();
    let integrand = |z: f64| {
        let v = bessel::scaled_bessel_i(z, m_max);
        orders.iter().map(|m| v[*m]).product::<f64>()
    };
    let integral = quad::integrate_adaptive(integrand, 0.0, Z_MAX, tol, 1e-300)?;
    Ok(-2.0 * integral)
}

/// Canonical class of a lattice point under coordinate permutations and sign
/// flips: the sorted absolute coordinates. `None` if any coordinate is odd
/// (those classes are identically zero and never stored).
pub fn canonical_class(x: Coord) -> Option<[u16; 8]> {
    if x.0.iter().any(|v| v % 2 != 0) {
        return None;
    }
    let mut k = [0u16; 8];
    for (slot, v) in k.iter_mut().zip(x.0.iter()) {
        // coordinates beyond the key width are far past any table range;
        // saturate so the lookup fails as a coverage error, not a zero
        *slot = u16::try_from(v.unsigned_abs()).unwrap_or(u16::MAX);
    }
    k.sort_unstable();
    Some(k)
}

/// Symmetry-reduced cache of `F1` values with quadrature metadata.
#[derive(Debug, Clone)]
pub struct KernelTable {
    range: u32,
    tol: f64,
    /// Largest even coordinate magnitude stored (`range + 1` rounded down).
    even_max: i64,
    entries: HashMap<[u16; 8], f64>,
}

/// All nondecreasing 8-tuples over the even values `0, 2, .., even_max`.
fn canonical_classes(even_max: i64) -> Vec<[u16; 8]> {
    let values: Vec<u16> = (0..=even_max).step_by(2).map(|v| v as u16).collect();
    let mut out = Vec::new();
    let mut current = [0u16; 8];
    fn rec(values: &[u16], from: usize, slot: usize, current: &mut [u16; 8], out: &mut Vec<[u16; 8]>) {
        if slot == 8 {
            out.push(*current);
            return;
        }
        for (i, v) in values.iter().enumerate().skip(from) {
            current[slot] = *v;
            rec(values, i, slot + 1, current, out);
        }
    }
    rec(&values, 0, 0, &mut current, &mut out);
    out
}

impl KernelTable {
    /// Compute all canonical classes with even coordinates of magnitude up to
    /// `range + 1`. Deterministic for fixed `(range, tol)`.
    pub fn build(range: u32, tol: f64) -> Result<KernelTable, KernelError> {
        let even_max = even_floor(i64::from(range) + 1);
        let classes = canonical_classes(even_max);
        let values: Result<Vec<f64>, QuadError> = classes
            .par_iter()
            .map(|k| {
                let mut orders = [0usize; 8];
                for (o, v) in orders.iter_mut().zip(k.iter()) {
                    *o = (*v / 2) as usize;
                }
                f1_for_orders(&orders, tol)
            })
            .collect();
        let values = values?;
        let entries = classes.into_iter().zip(values).collect();
        Ok(KernelTable {
            range,
            tol,
            even_max,
            entries,
        })
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn class_count(&self) -> usize {
        self.entries.len()
    }

    /// Classes in lexicographic order together with their values.
    pub fn sorted_entries(&self) -> Vec<([u16; 8], f64)> {
        let mut v: Vec<([u16; 8], f64)> = self.entries.iter().map(|(k, w)| (*k, *w)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Does the table hold `F1(x)`? Points with an odd coordinate are always
    /// available (the value is identically zero).
    pub fn covers_f1(&self, x: Coord) -> bool {
        if x.0.iter().any(|v| v % 2 != 0) {
            return true;
        }
        x.norm_inf() <= self.even_max
    }

    /// Does the table support `E1(x)` (all the shifted `F1` reads resolve)?
    pub fn covers_e1(&self, x: Coord) -> bool {
        x.norm_inf() <= i64::from(self.range)
    }

    pub fn f1(&self, x: Coord) -> Result<f64, KernelError> {
        match canonical_class(x) {
            None => Ok(0.0),
            Some(k) => self.entries.get(&k).copied().ok_or(KernelError::Coverage {
                point: x,
                range: self.range,
            }),
        }
    }

    /// `E1(x)` in sparse form: the single axis `l` with a nonzero component
    /// and the real factor `v` such that `E1(x) = conj(e_l) * v`. `None`
    /// when the value vanishes by parity.
    pub fn e1_sparse(&self, x: Coord) -> Result<Option<(usize, f64)>, KernelError> {
        let mut odd_axis = None;
        for (l, v) in x.0.iter().enumerate() {
            if v % 2 != 0 {
                if odd_axis.is_some() {
                    return Ok(None); // two or more odd coordinates
                }
                odd_axis = Some(l);
            }
        }
        let Some(l) = odd_axis else {
            return Ok(None); // all even, including the origin
        };
        let fwd = self.f1(x.shifted(l, 1))?;
        let bwd = self.f1(x.shifted(l, -1))?;
        Ok(Some((l, 0.5 * (fwd - bwd))))
    }

    /// `E1(x)` as an octonion.
    pub fn e1(&self, x: Coord) -> Result<Octonion, KernelError> {
        Ok(match self.e1_sparse(x)? {
            None => Octonion::zero(),
            Some((l, v)) => sparse_to_octonion(l, v),
        })
    }

    /// `Eh(x) = h^-7 E1(x/h)` at the lattice point with integer coordinates `n`.
    pub fn eh(&self, n: Coord, h: f64) -> Result<Octonion, KernelError> {
        Ok(self.e1(n)?.scale(h.powi(-7)))
    }

    /// `Eh` at a physical point, which must lie on the mesh.
    pub fn eh_physical(&self, x: &[f64; 8], h: f64) -> Result<Octonion, KernelError> {
        let mut n = [0i64; 8];
        for (ni, xi) in n.iter_mut().zip(x.iter()) {
            let q = xi / h;
            let r = q.round();
            if (q - r).abs() > 1e-9 {
                return Err(KernelError::NonLattice(format!("{x:?}"), h));
            }
            *ni = r as i64;
        }
        self.eh(Coord(n), h)
    }

    /// Dense array of `F1` over the even cube `|x|_inf <= 2 w_max`, for hot
    /// loops. `None` when the cube is not covered or too large to be worth it.
    pub fn dense_block(&self, w_max: i64) -> Option<DenseF1> {
        if 2 * w_max > self.even_max || w_max < 0 {
            return None;
        }
        let dim = (2 * w_max + 1) as usize;
        let len = (dim as u64).checked_pow(8)?;
        if len > 45_000_000 {
            return None;
        }
        let mut data = vec![0.0f64; len as usize];
        let mut w = [-w_max; 8];
        'fill: for slot in data.iter_mut() {
            let mut x = [0i64; 8];
            for (xi, wi) in x.iter_mut().zip(w.iter()) {
                *xi = 2 * wi;
            }
            *slot = self
                .f1(Coord(x))
                .expect("dense block range checked against table");
            // odometer increment
            for l in 0..8 {
                w[l] += 1;
                if w[l] <= w_max {
                    continue 'fill;
                }
                w[l] = -w_max;
            }
            break;
        }
        Some(DenseF1 { w_max, dim, data })
    }
}

pub(crate) fn sparse_to_octonion(axis: usize, v: f64) -> Octonion {
    let mut c = [0.0; 8];
    c[axis] = if axis == 0 { v } else { -v };
    Octonion::new(c)
}

fn even_floor(v: i64) -> i64 {
    v - (v % 2)
}

/// Dense `F1` view over an even cube; index arithmetic instead of hashing.
#[derive(Debug, Clone)]
pub struct DenseF1 {
    w_max: i64,
    dim: usize,
    data: Vec<f64>,
}

impl DenseF1 {
    /// `F1(x)` for even `x` with `|x|_inf <= 2 w_max`; `None` outside.
    #[inline]
    pub fn f1_even(&self, x: &[i64; 8]) -> Option<f64> {
        let mut idx = 0usize;
        for v in x {
            debug_assert!(v % 2 == 0);
            let w = v / 2 + self.w_max;
            if w < 0 || w >= self.dim as i64 {
                return None;
            }
            idx = idx * self.dim + w as usize;
        }
        Some(self.data[idx])
    }
}

// ---------------------------------------------------------------------------
// binary cache format
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"OCTK";
const VERSION: u32 = 1;

impl KernelTable {
    /// Serialize in the fixed little-endian layout:
    /// magic `OCTK`, u32 version, f64 tol, u32 range, u32 class count, then
    /// per class eight u16 sorted even coordinates and the f64 value.
    pub fn write_to(&self, mut w: impl Write) -> Result<(), KernelError> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.tol.to_le_bytes())?;
        w.write_all(&self.range.to_le_bytes())?;
        w.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for (k, v) in self.sorted_entries() {
            for c in k {
                w.write_all(&c.to_le_bytes())?;
            }
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), KernelError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<KernelTable, KernelError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| KernelError::Malformed)?;
        if &magic != MAGIC {
            return Err(KernelError::BadMagic);
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(KernelError::UnsupportedVersion(version));
        }
        let tol = read_f64(&mut r)?;
        let range = read_u32(&mut r)?;
        let count = read_u32(&mut r)?;
        let mut entries = HashMap::with_capacity(count as usize);
        for _ in 0..count {
            let mut k = [0u16; 8];
            for slot in k.iter_mut() {
                let mut b = [0u8; 2];
                r.read_exact(&mut b).map_err(|_| KernelError::Malformed)?;
                *slot = u16::from_le_bytes(b);
            }
            let v = read_f64(&mut r)?;
            entries.insert(k, v);
        }
        Ok(KernelTable {
            range,
            tol,
            even_max: even_floor(i64::from(range) + 1),
            entries,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<KernelTable, KernelError> {
        let bytes = std::fs::read(path)?;
        KernelTable::read_from(&bytes[..])
    }

    /// CSV dump of the canonical classes, sorted.
    pub fn export_csv(&self, mut w: impl Write) -> Result<(), KernelError> {
        writeln!(w, "c0,c1,c2,c3,c4,c5,c6,c7,f1")?;
        for (k, v) in self.sorted_entries() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{v}",
                k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7]
            )?;
        }
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, KernelError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| KernelError::Malformed)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, KernelError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| KernelError::Malformed)?;
    Ok(f64::from_le_bytes(b))
}

// ---------------------------------------------------------------------------
// defining-identity checks
// ---------------------------------------------------------------------------

/// Residuals of the defining identities, recomputed from table values.
#[derive(Debug, Clone, Serialize)]
pub struct KernelCheckReport {
    pub range: u32,
    pub tol: f64,
    pub class_count: usize,
    /// `|Delta^1 F1(0) - 1|`
    pub delta_f1_origin: f64,
    /// max `|Delta^1 F1(x)|` over the sampled even nonzero points
    pub delta_f1_offsite: f64,
    /// `|D^1 E1(0) - 1|`
    pub dirac_e1_origin: f64,
    /// max `|D^1 E1(x)|` over the sampled nonzero points
    pub dirac_e1_offsite: f64,
    /// `|F1(2 e0) - F1(0) - 1/4|`
    pub quarter_identity: f64,
    pub sample_count: usize,
}

impl KernelCheckReport {
    pub fn pass(&self) -> bool {
        self.delta_f1_origin <= TOL_IDENTITY
            && self.delta_f1_offsite <= TOL_IDENTITY
            && self.dirac_e1_origin <= TOL_IDENTITY
            && self.dirac_e1_offsite <= TOL_IDENTITY
            && self.quarter_identity <= TOL_QUARTER
    }
}

/// `Delta^1 F1(x)` from table values.
pub fn delta1_f1(table: &KernelTable, x: Coord) -> Result<f64, KernelError> {
    let center = table.f1(x)?;
    let mut acc = 0.0;
    for l in 0..8 {
        acc += table.f1(x.shifted(l, 2))? + table.f1(x.shifted(l, -2))? - 2.0 * center;
    }
    Ok(0.25 * acc)
}

/// `D^1 E1(x)` from table values.
pub fn dirac1_e1(table: &KernelTable, x: Coord) -> Result<Octonion, KernelError> {
    let mut acc = Octonion::zero();
    for l in 0..8 {
        let d = (table.e1(x.shifted(l, 1))? - table.e1(x.shifted(l, -1))?).scale(0.5);
        acc += Octonion::basis_mul_left(l, d);
    }
    Ok(acc)
}

/// Re-verify the defining identities at the origin and at seeded sample
/// points away from it.
pub fn check_table(table: &KernelTable, samples: usize, seed: u64) -> Result<KernelCheckReport, KernelError> {
    let mut rng = sampling::rng_from_seed(seed);
    let reach = (i64::from(table.range) - 1).max(1);

    let delta_f1_origin = (delta1_f1(table, Coord::ORIGIN)? - 1.0).abs();
    let dirac_origin = dirac1_e1(table, Coord::ORIGIN)?;
    let dirac_e1_origin = (dirac_origin - Octonion::one()).norm();

    let even_reach = even_floor(reach);
    let mut delta_f1_offsite = 0.0f64;
    let mut dirac_e1_offsite = 0.0f64;
    let mut drawn = 0;
    while drawn < samples {
        // even nonzero point for the Laplacian identity
        let mut even = [0i64; 8];
        for v in even.iter_mut() {
            *v = 2 * rand::Rng::gen_range(&mut rng, -(even_reach / 2)..=(even_reach / 2));
        }
        // arbitrary nonzero point for the Dirac identity
        let mut any = [0i64; 8];
        for v in any.iter_mut() {
            *v = rand::Rng::gen_range(&mut rng, -reach..=reach);
        }
        if even.iter().all(|v| *v == 0) || any.iter().all(|v| *v == 0) {
            continue;
        }
        drawn += 1;
        delta_f1_offsite = delta_f1_offsite.max(delta1_f1(table, Coord(even))?.abs());
        dirac_e1_offsite = dirac_e1_offsite.max(dirac1_e1(table, Coord(any))?.norm());
    }

    let quarter = table.f1(Coord([2, 0, 0, 0, 0, 0, 0, 0]))? - table.f1(Coord::ORIGIN)?;
    Ok(KernelCheckReport {
        range: table.range,
        tol: table.tol,
        class_count: table.class_count(),
        delta_f1_origin,
        delta_f1_offsite,
        dirac_e1_origin,
        dirac_e1_offsite,
        quarter_identity: (quarter - 0.25).abs(),
        sample_count: samples,
    })
}

// ---------------------------------------------------------------------------
// continuous kernel, weight, and the kernel estimate scan
// ---------------------------------------------------------------------------

/// Continuous Dirac kernel `E(x) = (1/omega_7) conj(x) / |x|^8` with
/// `omega_7 = pi^4 / 3` the surface area of the unit 7-sphere.
pub fn continuous_e(x: &[f64; 8]) -> Octonion {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    assert!(r2 > 0.0, "the continuous kernel is singular at the origin");
    let scale = 1.0 / (OMEGA_7 * r2.powi(4));
    let mut c = [0.0; 8];
    c[0] = x[0] * scale;
    for l in 1..8 {
        c[l] = -x[l] * scale;
    }
    Octonion::new(c)
}

/// Bounded weight `omega(n) = prod_l (1 + 2 cos(pi n_l))`, evaluated exactly
/// as `3^{#even} (-1)^{#odd}` on integer points.
pub fn weight_omega(n: Coord) -> f64 {
    let mut w = 1.0f64;
    for v in n.0.iter() {
        w *= if v % 2 == 0 { 3.0 } else { -1.0 };
    }
    w
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelScanReport {
    pub range: u32,
    /// `max |E1(x) - omega(x) E(x)| (|x|^8 + 1)` over `0 < |x|_inf <= range`.
    pub c_empirical: f64,
    pub argmax: [i64; 8],
    pub finite: bool,
}

/// Empirical constant of the discrete-vs-continuous kernel comparison.
pub fn kernel_estimate_scan(table: &KernelTable, range: u32) -> Result<KernelScanReport, KernelError> {
    let r = i64::from(range);
    if !table.covers_e1(Coord([r, 0, 0, 0, 0, 0, 0, 0])) {
        return Err(KernelError::Coverage {
            point: Coord([r; 8]),
            range: table.range,
        });
    }

    let slabs: Vec<i64> = (-r..=r).collect();
    let results: Result<Vec<(f64, [i64; 8], bool)>, KernelError> = slabs
        .par_iter()
        .map(|&x0| {
            let mut best = (f64::MIN, [0i64; 8], true);
            let mut x = [x0, -r, -r, -r, -r, -r, -r, -r];
            'scan: loop {
                if x != [0; 8] {
                    let c = Coord(x);
                    let e1 = table.e1(c)?;
                    let xr = c.physical(1.0);
                    let diff = (e1 - continuous_e(&xr).scale(weight_omega(c))).norm();
                    let r2: f64 = xr.iter().map(|v| v * v).sum();
                    let weight = r2.powi(4) + 1.0;
                    let val = diff * weight;
                    if !val.is_finite() {
                        best.2 = false;
                    }
                    if val > best.0 || (val == best.0 && x < best.1) {
                        best = (val, x, best.2);
                    }
                }
                for l in 1..8 {
                    x[l] += 1;
                    if x[l] <= r {
                        continue 'scan;
                    }
                    x[l] = -r;
                }
                break;
            }
            Ok(best)
        })
        .collect();

    let mut c_empirical = f64::MIN;
    let mut argmax = [0i64; 8];
    let mut finite = true;
    for (v, x, ok) in results? {
        finite &= ok;
        if v > c_empirical || (v == c_empirical && x < argmax) {
            c_empirical = v;
            argmax = x;
        }
    }
    Ok(KernelScanReport {
        range,
        c_empirical,
        argmax,
        finite,
    })
}
