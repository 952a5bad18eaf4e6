//! The cyclotomic field `Q(zeta_m)` as `Q[x] / Phi_m(x)`.
//!
//! Elements are coefficient vectors of length `phi(m)` with `BigRational`
//! entries, always kept reduced mod the cyclotomic polynomial, so equality is
//! plain coefficient equality.  This is where character-like values live:
//! exact, with no embedding into the complex numbers anywhere.

use std::rc::Rc;

use num::traits::{One, Signed, Zero};
use num::{BigInt, BigRational};

use crate::matrix::{Field, Mat};

/// `Q(zeta_m)` context.
pub struct CycField {
    pub m: u32,
    /// Degree `phi(m)`.
    pub degree: usize,
    /// Monic `Phi_m`, little-endian integer coefficients, length degree+1.
    pub phi: Vec<BigInt>,
    /// `x^(degree + i) mod Phi_m` for i in `0..degree-1`, as coefficient rows.
    reduction: Vec<Vec<BigRational>>,
}

/// An element of `Q(zeta_m)`: coefficients of `1, zeta, ..., zeta^(degree-1)`.
pub type CycElem = Vec<BigRational>;

/// Cyclotomic polynomial `Phi_m` by the recursive quotient
/// `x^m - 1 = prod_(d | m) Phi_d`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    let mut num: Vec<BigInt> = vec![BigInt::from(-1)];
    num.extend(std::iter::repeat_with(BigInt::zero).take(m as usize - 1));
    num.push(BigInt::one()); // x^m - 1
    let mut acc = num;
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            acc = poly_div_exact(&acc, &phi_d);
        }
    }
    acc
}

/// Exact division of integer polynomials (remainder must vanish).
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - db] = c.clone();
        for j in 0..=db {
            let t = &b[j] * &c;
            rem[i - db + j] -= t;
        }
    }
    assert!(rem.iter().all(|x| x.is_zero()), "non-exact poly division");
    quot
}

impl CycField {
    pub fn new(m: u32) -> Rc<CycField> {
        assert!(m >= 1);
        let phi = cyclotomic_polynomial(m);
        let degree = phi.len() - 1;
        // Precompute x^(degree..2*degree-2) mod Phi.
        let mut reduction: Vec<Vec<BigRational>> = Vec::new();
        // x^degree = -(phi[0..degree]) since Phi is monic.
        let base: Vec<BigRational> = phi[..degree]
            .iter()
            .map(|c| BigRational::from_integer(-c.clone()))
            .collect();
        reduction.push(base);
        for _ in 1..degree.max(1) - 1 {
            // multiply previous row by x.
            let prev = reduction.last().unwrap().clone();
            let mut next = vec![BigRational::zero(); degree];
            // shift
            for i in 0..degree - 1 {
                next[i + 1] = prev[i].clone();
            }
            // wrap the top coefficient through x^degree.
            let top = prev[degree - 1].clone();
            if !top.is_zero() {
                for i in 0..degree {
                    next[i] += &top * &reduction[0][i];
                }
            }
            reduction.push(next);
        }
        Rc::new(CycField {
            m,
            degree,
            phi,
            reduction,
        })
    }

    /// `zeta^j` as an element (j arbitrary, reduced mod m).
    pub fn zeta_pow(&self, j: u32) -> CycElem {
        let j = (j % self.m) as usize;
        if j < self.degree {
            let mut v = vec![BigRational::zero(); self.degree];
            v[j] = BigRational::one();
            return v;
        }
        // Build by repeated multiplication by zeta; j < m <= small.
        let mut acc = self.one();
        let zeta = {
            let mut v = vec![BigRational::zero(); self.degree];
            if self.degree == 1 {
                // m = 1 or 2: zeta = 1 or -1.
                v[0] = if self.m == 1 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                };
            } else {
                v[1] = BigRational::one();
            }
            v
        };
        for _ in 0..j {
            acc = self.mul(&acc, &zeta);
        }
        acc
    }

    pub fn from_rational(&self, r: BigRational) -> CycElem {
        let mut v = vec![BigRational::zero(); self.degree];
        v[0] = r;
        v
    }

    /// The rational part if the element is rational, else None.
    pub fn as_rational(&self, a: &CycElem) -> Option<BigRational> {
        if a[1..].iter().all(|c| c.is_zero()) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    /// Field norm via the determinant of multiplication-by-a.
    pub fn norm(&self, a: &CycElem) -> BigRational {
        let k = Rationals;
        let n = self.degree;
        let mut m = Mat::zero(&k, n, n);
        // column j = a * zeta^j.
        let mut cur = a.clone();
        for j in 0..n {
            for i in 0..n {
                m.set(i, j, cur[i].clone());
            }
            cur = self.mul_by_zeta(&cur);
        }
        det(&m)
    }

    fn mul_by_zeta(&self, a: &CycElem) -> CycElem {
        let n = self.degree;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n - 1 {
            out[i + 1] = a[i].clone();
        }
        let top = a[n - 1].clone();
        if !top.is_zero() {
            let red = &self.reduction[0];
            for i in 0..n {
                out[i] += &top * &red[i];
            }
        }
        if n == 1 {
            // Degenerate: zeta is rational.
            let z = if self.m == 1 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            out[0] = &a[0] * z;
        }
        out
    }
}

use crate::matrix::Rationals;

fn det(m: &Mat<Rationals>) -> BigRational {
    // Fraction-free enough for our sizes: plain elimination with pivoting,
    // tracking the product of pivots and swap signs.
    let k = Rationals;
    let n = m.rows;
    let mut a = m.clone();
    let mut acc = BigRational::one();
    let mut sign = false;
    for col in 0..n {
        let mut piv = None;
        for r in col..n {
            if !a.at(r, col).is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else {
            return BigRational::zero();
        };
        if piv != col {
            for c in 0..n {
                let x = a.at(piv, c).clone();
                let y = a.at(col, c).clone();
                a.set(piv, c, y);
                a.set(col, c, x);
            }
            sign = !sign;
        }
        let pv = a.at(col, col).clone();
        acc *= &pv;
        let inv = pv.recip();
        for r in col + 1..n {
            let f = a.at(r, col) * &inv;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = a.at(r, c) - &f * a.at(col, c);
                a.set(r, c, v);
            }
        }
    }
    let _ = k;
    if sign {
        -acc
    } else {
        acc
    }
}

impl Field for CycField {
    type E = CycElem;

    fn zero(&self) -> CycElem {
        vec![BigRational::zero(); self.degree]
    }

    fn one(&self) -> CycElem {
        let mut v = vec![BigRational::zero(); self.degree];
        v[0] = BigRational::one();
        v
    }

    fn is_zero(&self, a: &CycElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &CycElem) -> CycElem {
        a.iter().map(|x| -x).collect()
    }

    fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let n = self.degree;
        let mut conv = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] += x * y;
            }
        }
        let mut out: Vec<BigRational> = conv[..n].to_vec();
        for i in n..2 * n - 1 {
            let c = conv[i].clone();
            if c.is_zero() {
                continue;
            }
            let red = &self.reduction[i - n];
            for j in 0..n {
                out[j] += &c * &red[j];
            }
        }
        out
    }

    fn inv(&self, a: &CycElem) -> Option<CycElem> {
        if self.is_zero(a) {
            return None;
        }
        // Solve (mult-by-a) x = 1 over Q.
        let k = Rationals;
        let n = self.degree;
        let mut m = Mat::zero(&k, n, n);
        let mut cur = a.clone();
        for j in 0..n {
            for i in 0..n {
                m.set(i, j, cur[i].clone());
            }
            cur = self.mul_by_zeta(&cur);
        }
        let mut rhs = vec![BigRational::zero(); n];
        rhs[0] = BigRational::one();
        m.solve(&k, &rhs)
    }

    fn from_int(&self, v: i64) -> CycElem {
        self.from_rational(BigRational::from_integer(v.into()))
    }
}

/// Canonical display string: polynomial in `z` with exact rational
/// coefficients, e.g. `1/2 - z^2`, or `0`.
pub fn cyc_to_string(_f: &CycField, a: &CycElem) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, c) in a.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let coeff = if mag.is_one() && i > 0 {
            String::new()
        } else {
            format!("{}", mag)
        };
        let var = match i {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{}", i),
        };
        let body = match (coeff.is_empty(), var.is_empty()) {
            (true, _) => var.clone(),
            (false, true) => coeff.clone(),
            (false, false) => format!("{}*{}", coeff, var),
        };
        if terms.is_empty() {
            terms.push(if c.is_negative() {
                format!("-{}", body)
            } else {
                body
            });
        } else {
            terms.push(format!(
                " {} {}",
                if c.is_negative() { "-" } else { "+" },
                body
            ));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.concat()
    }
    .replace("  ", " ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_coeffs(m: u32) -> Vec<i64> {
        cyclotomic_polynomial(m)
            .iter()
            .map(|c| {
                use num::ToPrimitive;
                c.to_i64().unwrap()
            })
            .collect()
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        assert_eq!(phi_coeffs(1), vec![-1, 1]);
        assert_eq!(phi_coeffs(2), vec![1, 1]);
        assert_eq!(phi_coeffs(3), vec![1, 1, 1]);
        assert_eq!(phi_coeffs(4), vec![1, 0, 1]);
        assert_eq!(phi_coeffs(6), vec![1, -1, 1]);
        assert_eq!(phi_coeffs(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_has_order_m() {
        for m in [1u32, 2, 3, 4, 6, 8, 12] {
            let f = CycField::new(m);
            let z = f.zeta_pow(1);
            let mut acc = f.one();
            for j in 0..m {
                assert_eq!(acc, f.zeta_pow(j), "zeta^{} in Q(zeta_{})", j, m);
                if m > 1 && j > 0 {
                    assert_ne!(acc, f.one(), "zeta^{} != 1 for 0 < {} < {}", j, j, m);
                }
                acc = f.mul(&acc, &z);
            }
            assert_eq!(acc, f.one(), "zeta^{} = 1", m);
        }
    }

    #[test]
    fn phi_of_zeta_is_zero() {
        for m in [3u32, 4, 6, 8, 12] {
            let f = CycField::new(m);
            let mut acc = f.zero();
            for (j, c) in f.phi.clone().iter().enumerate() {
                let term = f.zeta_pow(j as u32);
                let c_rat = f.from_rational(BigRational::from_integer(c.clone()));
                acc = f.add(&acc, &f.mul(&c_rat, &term));
            }
            assert!(f.is_zero(&acc), "Phi_{}(zeta) = 0", m);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = CycField::new(12);
        let a = {
            let mut v = f.zeta_pow(2);
            v = f.add(&v, &f.from_int(3));
            f.mul(&v, &f.zeta_pow(7))
        };
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn norm_of_zeta_is_plus_minus_one() {
        // Norm table for small m: N(zeta_m) = Phi_m(0) * (-1)^phi(m)... which
        // works out to 1 for every m >= 3 here, and -1 for m = 2.
        for (m, expect) in [(2u32, -1i64), (3, 1), (4, 1), (6, 1), (8, 1), (12, 1)] {
            let f = CycField::new(m);
            let n = f.norm(&f.zeta_pow(1));
            assert_eq!(n, BigRational::from_integer(expect.into()), "m = {}", m);
        }
    }

    #[test]
    fn display_strings() {
        let f = CycField::new(4);
        assert_eq!(cyc_to_string(&f, &f.zero()), "0");
        assert_eq!(cyc_to_string(&f, &f.one()), "1");
        assert_eq!(cyc_to_string(&f, &f.zeta_pow(1)), "z");
        let mut v = f.from_rational(BigRational::new(1.into(), 2.into()));
        v[1] = -BigRational::one();
        assert_eq!(cyc_to_string(&f, &v), "1/2 - z");
    }
}
