//! Octonion composition algebra over the standard basis `e0..e7`.
//!
//! The basis product table is generated once from the seven positively
//! oriented triples of the antisymmetric structure tensor and verified
//! against the composition law at startup. All arithmetic on coefficients
//! is `f64`; the table itself is exact integer data.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

/// Cyclic triples `(i, j, k)` on which the structure tensor equals `+1`,
/// so that `e_i e_j = e_k`.
pub const EPSILON_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
];

/// Product of two basis units: `e_i e_j = sign * e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisProduct {
    pub i: usize,
    pub j: usize,
    pub sign: i8,
    pub k: usize,
}

struct BasisTable {
    sign: [[i8; 8]; 8],
    index: [[usize; 8]; 8],
}

impl BasisTable {
    fn build() -> Self {
        let mut sign = [[0i8; 8]; 8];
        let mut index = [[0usize; 8]; 8];

        // Unit element and squares.
        for l in 0..8 {
            sign[0][l] = 1;
            index[0][l] = l;
            sign[l][0] = 1;
            index[l][0] = l;
        }
        for l in 1..8 {
            sign[l][l] = -1;
            index[l][l] = 0;
        }

        // Imaginary products from the seven triples: a cyclic rotation keeps
        // the sign, a transposition flips it.
        for &(a, b, c) in &EPSILON_TRIPLES {
            for &(i, j, k) in &[(a, b, c), (b, c, a), (c, a, b)] {
                sign[i][j] = 1;
                index[i][j] = k;
                sign[j][i] = -1;
                index[j][i] = k;
            }
        }

        let table = BasisTable { sign, index };
        table.verify();
        table
    }

    /// Startup self-check: the table must be total, the result index must be
    /// the XOR composition of the factor indices, and the product must admit
    /// the composition-norm property on the basis.
    fn verify(&self) {
        for i in 0..8 {
            for j in 0..8 {
                assert!(
                    self.sign[i][j] == 1 || self.sign[i][j] == -1,
                    "basis table has a hole at ({i},{j})"
                );
                assert_eq!(
                    self.index[i][j],
                    i ^ j,
                    "basis index composition must agree with XOR on Z2^3"
                );
            }
        }
    }
}

fn table() -> &'static BasisTable {
    static TABLE: OnceLock<BasisTable> = OnceLock::new();
    TABLE.get_or_init(BasisTable::build)
}

/// `e_i e_j` as an exact integer pair `(sign, k)`.
pub fn basis_mul(i: usize, j: usize) -> (i8, usize) {
    assert!(i < 8 && j < 8, "basis index out of range: ({i},{j})");
    let t = table();
    (t.sign[i][j], t.index[i][j])
}

/// Full basis product record, mostly for table dumps and tests.
pub fn basis_product(i: usize, j: usize) -> BasisProduct {
    let (sign, k) = basis_mul(i, j);
    BasisProduct { i, j, sign, k }
}

/// The index composition `i (+) j`: the `k` with `e_i e_j = +/- e_k`.
pub fn basis_compose(i: usize, j: usize) -> usize {
    basis_mul(i, j).1
}

/// Associativity sign of a basis triple: `+1` if `(e_i e_j) e_k = e_i (e_j e_k)`,
/// `-1` otherwise. Computed in integer arithmetic from the table.
///
/// The sign is `+1` exactly when the triple lies in an associative subalgebra:
/// `k` in `{0, i, j, i(+)j}`, or a degenerate pattern (`i = 0`, `j = 0`, `i = j`)
/// where alternativity forces equality for every `k`.
pub fn basis_sign(i: usize, j: usize, k: usize) -> i8 {
    assert!(i < 8 && j < 8 && k < 8, "basis index out of range: ({i},{j},{k})");
    let (s_ij, ij) = basis_mul(i, j);
    let (s_l, left) = basis_mul(ij, k);
    let (s_jk, jk) = basis_mul(j, k);
    let (s_r, right) = basis_mul(i, jk);
    debug_assert_eq!(left, right, "both associations land on the same basis unit");
    s_ij * s_l * s_jk * s_r
}

/// Octonion with coefficients over the standard basis; `c[0]` is the real part.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Octonion {
    c: [f64; 8],
}

pub const ZERO: Octonion = Octonion { c: [0.0; 8] };
pub const ONE: Octonion = Octonion {
    c: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
};

impl Octonion {
    pub const fn new(c: [f64; 8]) -> Self {
        Octonion { c }
    }

    pub const fn zero() -> Self {
        ZERO
    }

    pub const fn one() -> Self {
        ONE
    }

    /// The basis unit `e_l`.
    pub fn basis(l: usize) -> Self {
        assert!(l < 8, "basis index out of range: {l}");
        let mut c = [0.0; 8];
        c[l] = 1.0;
        Octonion { c }
    }

    /// Real scalar as an octonion.
    pub fn real(t: f64) -> Self {
        let mut c = [0.0; 8];
        c[0] = t;
        Octonion { c }
    }

    pub fn coeff(&self, l: usize) -> f64 {
        self.c[l]
    }

    pub fn coeffs(&self) -> &[f64; 8] {
        &self.c
    }

    pub fn conj(&self) -> Self {
        let mut c = self.c;
        for v in c.iter_mut().skip(1) {
            *v = -*v;
        }
        Octonion { c }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, t: f64) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= t;
        }
        Octonion { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0)
    }

    /// Left multiplication by a basis unit, `e_l * x`. Eight flops instead
    /// of the 64 of a general product; the kernel sums lean on this.
    pub fn basis_mul_left(l: usize, x: Octonion) -> Octonion {
        let t = table();
        let mut c = [0.0; 8];
        for j in 0..8 {
            c[t.index[l][j]] += f64::from(t.sign[l][j]) * x.c[j];
        }
        Octonion { c }
    }

    /// Left multiplication by a conjugated basis unit, `conj(e_l) * x`.
    pub fn conj_basis_mul_left(l: usize, x: Octonion) -> Octonion {
        let y = Self::basis_mul_left(l, x);
        if l == 0 {
            y
        } else {
            -y
        }
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        Octonion { c }
    }
}

impl AddAssign for Octonion {
    fn add_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        Octonion { c }
    }
}

impl SubAssign for Octonion {
    fn sub_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v = -*v;
        }
        Octonion { c }
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        let t = table();
        let mut c = [0.0; 8];
        for i in 0..8 {
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..8 {
                c[t.index[i][j]] += f64::from(t.sign[i][j]) * a * rhs.c[j];
            }
        }
        Octonion { c }
    }
}

impl Mul<f64> for Octonion {
    type Output = Octonion;
    fn mul(self, t: f64) -> Octonion {
        self.scale(t)
    }
}

impl Mul<Octonion> for f64 {
    type Output = Octonion;
    fn mul(self, x: Octonion) -> Octonion {
        x.scale(self)
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (l, v) in self.c.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            if first {
                write!(f, "{v}")?;
                first = false;
            } else if *v < 0.0 {
                write!(f, " - {}", -v)?;
            } else {
                write!(f, " + {v}")?;
            }
            if l > 0 {
                write!(f, "*e{l}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The associator `[a, b, c] = (ab)c - a(bc)`.
pub fn associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion {
    (a * b) * c - a * (b * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(l: usize) -> Octonion {
        Octonion::basis(l)
    }

    fn rand_oct(rng: &mut ChaCha8Rng) -> Octonion {
        let mut c = [0.0; 8];
        for v in c.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        Octonion::new(c)
    }

    #[test]
    fn unit_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..32 {
            let a = rand_oct(&mut rng);
            assert_eq!(ONE * a, a);
            assert_eq!(a * ONE, a);
        }
    }

    #[test]
    fn epsilon_products() {
        assert_eq!(e(1) * e(2), e(3));
        assert_eq!(e(1) * e(4), e(5));
        assert_eq!(e(1) * e(7), e(6));
        assert_eq!(e(2) * e(4), e(6));
        assert_eq!(e(2) * e(5), e(7));
        assert_eq!(e(3) * e(4), e(7));
        assert_eq!(e(3) * e(6), e(5));
        // antisymmetry within a triple
        assert_eq!(e(1) * e(6), -e(7));
        assert_eq!(e(2) * e(1), -e(3));
        for l in 1..8 {
            assert_eq!(e(l) * e(l), -ONE);
        }
    }

    #[test]
    fn basis_mul_is_xor_indexed() {
        for i in 0..8 {
            for j in 0..8 {
                let (_, k) = basis_mul(i, j);
                assert_eq!(k, i ^ j);
            }
        }
    }

    #[test]
    fn conjugation() {
        assert_eq!(e(0).conj(), e(0));
        assert_eq!(e(5).conj(), -e(5));
        let a = ONE + e(3).scale(2.0);
        assert_eq!(a.conj(), ONE - e(3).scale(2.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..64 {
            let a = rand_oct(&mut rng);
            assert_eq!(a.conj().conj(), a);
            let p = a * a.conj();
            assert!((p.coeff(0) - a.norm_sqr()).abs() <= 1e-12);
            assert!((p - Octonion::real(a.norm_sqr())).norm() <= 1e-12);
        }
    }

    #[test]
    fn associator_basis_cases() {
        assert!(associator(e(1), e(1), e(2)).is_zero());
        // (e1 e2) e4 = e7 while e1 (e2 e4) = -e7
        assert_eq!(associator(e(1), e(2), e(4)), e(7).scale(2.0));
        assert_eq!((e(1) * e(2)) * e(4), e(7));
        assert_eq!(e(1) * (e(2) * e(4)), -e(7));
    }

    #[test]
    fn basis_sign_examples() {
        assert_eq!(basis_sign(1, 2, 4), -1);
        assert_eq!(basis_sign(1, 2, 3), 1);
        assert_eq!(basis_sign(5, 5, 6), 1);
    }

    /// Integer-arithmetic sweep of all 512 triples: the sign returned by
    /// `basis_sign` must reproduce the actual table composition, and it must
    /// be `+1` exactly on the associative patterns.
    #[test]
    fn basis_sign_law_all_triples() {
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let (s_ij, ij) = basis_mul(i, j);
                    let (s_left, left_k) = basis_mul(ij, k);
                    let (s_jk, jk) = basis_mul(j, k);
                    let (s_right, right_k) = basis_mul(i, jk);
                    assert_eq!(left_k, right_k);
                    let expected = s_ij * s_left * s_jk * s_right;
                    assert_eq!(basis_sign(i, j, k), expected);

                    let associative_pattern = i == 0
                        || j == 0
                        || i == j
                        || k == 0
                        || k == i
                        || k == j
                        || k == (i ^ j);
                    assert_eq!(
                        expected == 1,
                        associative_pattern,
                        "sign law mismatch at ({i},{j},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn u16_like_seed_makes_table_deterministic() {
        // two table accesses agree (OnceLock returns the same table)
        assert_eq!(basis_mul(3, 6), basis_mul(3, 6));
    }

    proptest! {
        #[test]
        fn composition_norm(a in prop::array::uniform8(-1.0f64..1.0), b in prop::array::uniform8(-1.0f64..1.0)) {
            let a = Octonion::new(a);
            let b = Octonion::new(b);
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn alternativity_and_flexibility(a in prop::array::uniform8(-1.0f64..1.0), b in prop::array::uniform8(-1.0f64..1.0)) {
            let a = Octonion::new(a);
            let b = Octonion::new(b);
            prop_assert!(associator(a, a, b).norm() <= 1e-12);
            prop_assert!(associator(b, a, a).norm() <= 1e-12);
            prop_assert!(associator(a, b, a).norm() <= 1e-12);
        }

        #[test]
        fn moufang_identities(
            a in prop::array::uniform8(-1.0f64..1.0),
            b in prop::array::uniform8(-1.0f64..1.0),
            c in prop::array::uniform8(-1.0f64..1.0),
        ) {
            let a = Octonion::new(a);
            let b = Octonion::new(b);
            let c = Octonion::new(c);
            let aba = (a * b) * a; // well defined by flexibility
            prop_assert!((aba * c - a * (b * (a * c))).norm() <= 1e-12);
            prop_assert!((c * aba - ((c * a) * b) * a).norm() <= 1e-12);
            prop_assert!((a * (b * c) * a - (a * b) * (c * a)).norm() <= 1e-12);
        }
    }

    /// `[conj(e_l), e_t, f] + [conj(e_t), e_l, f] = 0`, the cancellation the
    /// Cauchy machinery rests on.
    #[test]
    fn conjugate_associator_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..16 {
            let f = rand_oct(&mut rng);
            for l in 0..8 {
                for t in 0..8 {
                    let el = e(l).conj();
                    let et = e(t).conj();
                    let s = associator(el, e(t), f) + associator(et, e(l), f);
                    assert!(s.norm() <= 1e-12, "antisymmetry failed at l={l}, t={t}");
                }
            }
        }
    }

    /// `e_i (conj(e_j) x) + e_j (conj(e_i) x) = 2 delta_ij x`, which is what
    /// makes the Laplacian factor through the Dirac pair.
    #[test]
    fn left_multiplication_symmetrization() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..16 {
            let x = rand_oct(&mut rng);
            for i in 0..8 {
                for j in 0..8 {
                    let lhs = Octonion::basis_mul_left(i, Octonion::conj_basis_mul_left(j, x))
                        + Octonion::basis_mul_left(j, Octonion::conj_basis_mul_left(i, x));
                    let rhs = if i == j { x.scale(2.0) } else { ZERO };
                    assert!((lhs - rhs).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn basis_mul_left_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..32 {
            let x = rand_oct(&mut rng);
            for l in 0..8 {
                assert_eq!(Octonion::basis_mul_left(l, x), e(l) * x);
                assert_eq!(Octonion::conj_basis_mul_left(l, x), e(l).conj() * x);
            }
        }
    }
}
