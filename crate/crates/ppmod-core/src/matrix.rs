//! Dense exact linear algebra, generic over a field given as a context object.
//!
//! The same Gaussian elimination drives everything: rank, kernel, solving,
//! inversion.  Fields are passed explicitly (`&K`) because finite field
//! elements are bare `u32` encodings that only make sense relative to their
//! field's tables.

use num::BigRational;
use num::traits::{One, Zero};

/// A field as a context object; elements are plain values.
pub trait Field {
    type E: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// None exactly for zero.
    fn inv(&self, a: &Self::E) -> Option<Self::E>;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }

    fn from_int(&self, n: i64) -> Self::E {
        let mut acc = self.zero();
        let one = self.one();
        let neg = n < 0;
        for _ in 0..n.unsigned_abs() {
            acc = self.add(&acc, &one);
        }
        if neg {
            self.neg(&acc)
        } else {
            acc
        }
    }
}

/// The rational numbers as a [`Field`] context.
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
}

/// Dense row-major matrix over a [`Field`].
pub struct Mat<K: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<K::E>,
}

// Manual impls: the derives would demand `K: Clone` / `K: PartialEq`, but
// only the element type needs them.
impl<K: Field> Clone for Mat<K> {
    fn clone(&self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.clone() }
    }
}

impl<K: Field> PartialEq for Mat<K> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<K: Field> std::fmt::Debug for Mat<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<K: Field> Mat<K> {
    pub fn zero(k: &K, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![k.zero(); rows * cols],
        }
    }

    pub fn identity(k: &K, n: usize) -> Self {
        let mut m = Mat::zero(k, n, n);
        for i in 0..n {
            m.set(i, i, k.one());
        }
        m
    }

    pub fn from_rows(k: &K, rows: Vec<Vec<K::E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        let _ = k;
        Mat { rows: r, cols: c, data }
    }

    pub fn at(&self, r: usize, c: usize) -> &K::E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K::E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K::E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero_matrix(&self, k: &K) -> bool {
        self.data.iter().all(|x| k.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, k: &K, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mat mul");
        let mut out = Mat::zero(k, self.rows, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.at(r, i);
                if k.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(i, c);
                    if k.is_zero(b) {
                        continue;
                    }
                    let t = k.add(out.at(r, c), &k.mul(a, b));
                    out.set(r, c, t);
                }
            }
        }
        out
    }

    pub fn add(&self, k: &K, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| k.add(a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, k: &K, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| k.sub(a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, k: &K, s: &K::E) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| k.mul(a, s)).collect(),
        }
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, k: &K, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(k, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &base);
            }
            base = base.mul(k, &base);
            e >>= 1;
        }
        acc
    }

    /// Kronecker (tensor) product.
    pub fn kronecker(&self, k: &K, other: &Self) -> Self {
        let mut out = Mat::zero(k, self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.at(r1, c1);
                if k.is_zero(a) {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let v = k.mul(a, other.at(r2, c2));
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, v);
                    }
                }
            }
        }
        out
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, k: &K) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // Find pivot.
            let mut pr = None;
            for rr in r..self.rows {
                if !k.is_zero(self.at(rr, c)) {
                    pr = Some(rr);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            self.swap_rows(r, pr);
            let inv = k.inv(self.at(r, c)).expect("pivot nonzero");
            for cc in c..self.cols {
                let v = k.mul(self.at(r, cc), &inv);
                self.set(r, cc, v);
            }
            for rr in 0..self.rows {
                if rr == r || k.is_zero(self.at(rr, c)) {
                    continue;
                }
                let f = self.at(rr, c).clone();
                for cc in c..self.cols {
                    let v = k.sub(self.at(rr, cc), &k.mul(&f, self.at(r, cc)));
                    self.set(rr, cc, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, k: &K) -> usize {
        let mut m = self.clone();
        m.rref(k).len()
    }

    /// Basis of the right kernel `{x : self * x = 0}`, as matrix rows.
    pub fn kernel_basis(&self, k: &K) -> Mat<K> {
        let mut m = self.clone();
        let pivots = m.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zero(k, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, k.one());
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(i, pc, k.neg(m.at(pr, fc)));
            }
        }
        out
    }

    /// Rows spanning the row space, reduced (a canonical basis of the span).
    pub fn row_basis(&self, k: &K) -> Mat<K> {
        let mut m = self.clone();
        let pivots = m.rref(k);
        let mut out = Mat::zero(k, pivots.len(), self.cols);
        for r in 0..pivots.len() {
            for c in 0..self.cols {
                out.set(r, c, m.at(r, c).clone());
            }
        }
        out
    }

    /// Solves `self * x = rhs` for a single column vector; None if inconsistent.
    pub fn solve(&self, k: &K, rhs: &[K::E]) -> Option<Vec<K::E>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Mat::zero(k, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, rhs[r].clone());
        }
        let pivots = aug.rref(k);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![k.zero(); self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(pr, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self, k: &K) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(k, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, k.one());
        }
        let pivots = aug.rref(k);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut out = Mat::zero(k, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.at(r, n + c).clone());
            }
        }
        Some(out)
    }

    /// Is `v` in the row space?  (Does `x * self = v` have a solution?)
    pub fn row_space_contains(&self, k: &K, v: &[K::E]) -> bool {
        self.transpose().solve(k, v).is_some()
    }

    pub fn mul_vec(&self, k: &K, v: &[K::E]) -> Vec<K::E> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![k.zero(); self.rows];
        for r in 0..self.rows {
            let mut acc = k.zero();
            for c in 0..self.cols {
                if !k.is_zero(self.at(r, c)) && !k.is_zero(&v[c]) {
                    acc = k.add(&acc, &k.mul(self.at(r, c), &v[c]));
                }
            }
            out[r] = acc;
        }
        out
    }

    /// Vertical stack.
    pub fn vstack(k: &K, mats: &[&Mat<K>]) -> Mat<K> {
        let cols = mats.first().map_or(0, |m| m.cols);
        let rows = mats.iter().map(|m| m.rows).sum();
        let mut out = Mat::zero(k, rows, cols);
        let mut r0 = 0;
        for m in mats {
            assert_eq!(m.cols, cols);
            for r in 0..m.rows {
                for c in 0..cols {
                    out.set(r0 + r, c, m.at(r, c).clone());
                }
            }
            r0 += m.rows;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use proptest::prelude::*;

    #[test]
    fn rref_and_kernel_over_f4() {
        let f = build_field(2, 3).unwrap();
        // 3-cycle permutation matrix action minus identity: kernel is the
        // fixed space, dimension 1.
        let mut m = Mat::zero(&*f, 3, 3);
        // permutation (0 1 2): e0 -> e1 -> e2 -> e0, column convention.
        m.set(1, 0, 1);
        m.set(2, 1, 1);
        m.set(0, 2, 1);
        let mi = m.sub(&*f, &Mat::identity(&*f, 3));
        let ker = mi.kernel_basis(&*f);
        assert_eq!(ker.rows, 1);
        // The all-ones vector spans it.
        assert_eq!(ker.row(0), &[1, 1, 1]);
        assert_eq!(m.rank(&*f), 3);
        let inv = m.inverse(&*f).unwrap();
        assert_eq!(m.mul(&*f, &inv), Mat::identity(&*f, 3));
    }

    #[test]
    fn eigenvalues_of_three_cycle_over_f4() {
        // Over F_4 the 3-cycle acts semisimply with eigenvalues 1, w, w^2,
        // each with multiplicity 1 (w = any element of order 3).
        let f = build_field(2, 3).unwrap();
        let mut m = Mat::zero(&*f, 3, 3);
        m.set(1, 0, 1);
        m.set(2, 1, 1);
        m.set(0, 2, 1);
        let w = f.lift_generator;
        assert_eq!(f.mult_order(w), 3);
        for lam in [1u32, w, f.mul(&w, &w)] {
            let shifted = m.sub(&*f, &Mat::identity(&*f, 3).scale(&*f, &lam));
            assert_eq!(shifted.kernel_basis(&*f).rows, 1, "eigenvalue {}", lam);
        }
        // 0 is not an eigenvalue.
        assert_eq!(m.kernel_basis(&*f).rows, 0);
    }

    #[test]
    fn solve_over_rationals() {
        let k = Rationals;
        let m = Mat::from_rows(
            &k,
            vec![
                vec![k.from_int(2), k.from_int(1)],
                vec![k.from_int(1), k.from_int(3)],
            ],
        );
        let sol = m.solve(&k, &[k.from_int(5), k.from_int(10)]).unwrap();
        assert_eq!(sol, vec![k.from_int(1), k.from_int(3)]);
        // Singular system without solution.
        let s = Mat::from_rows(
            &k,
            vec![
                vec![k.from_int(1), k.from_int(1)],
                vec![k.from_int(2), k.from_int(2)],
            ],
        );
        assert!(s.solve(&k, &[k.from_int(1), k.from_int(3)]).is_none());
        assert!(s.inverse(&k).is_none());
    }

    #[test]
    fn kronecker_shapes_and_values() {
        let k = Rationals;
        let a = Mat::from_rows(&k, vec![vec![k.from_int(1), k.from_int(2)]]);
        let b = Mat::from_rows(&k, vec![vec![k.from_int(3)], vec![k.from_int(4)]]);
        let kr = a.kronecker(&k, &b);
        assert_eq!((kr.rows, kr.cols), (2, 2));
        assert_eq!(*kr.at(0, 0), k.from_int(3));
        assert_eq!(*kr.at(1, 1), k.from_int(8));
    }

    proptest! {
        // Rank-nullity on random matrices over F_9, and kernel correctness.
        #[test]
        fn rank_nullity_f9(entries in proptest::collection::vec(0u32..9, 12)) {
            let f = build_field(3, 4).unwrap();
            let m = Mat::<crate::field::Fq> { rows: 3, cols: 4, data: entries };
            let rank = m.rank(&*f);
            let ker = m.kernel_basis(&*f);
            prop_assert_eq!(rank + ker.rows, 4);
            for r in 0..ker.rows {
                let img = m.mul_vec(&*f, ker.row(r));
                prop_assert!(img.iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn inverse_roundtrip_f4(entries in proptest::collection::vec(0u32..4, 9)) {
            let f = build_field(2, 3).unwrap();
            let m = Mat::<crate::field::Fq> { rows: 3, cols: 3, data: entries };
            if let Some(inv) = m.inverse(&*f) {
                prop_assert_eq!(m.mul(&*f, &inv), Mat::identity(&*f, 3));
                prop_assert_eq!(inv.mul(&*f, &m), Mat::identity(&*f, 3));
            } else {
                prop_assert!(m.rank(&*f) < 3);
            }
        }
    }
}
