//! Small finite fields `F_q` with `q = p^k`, built so that a prescribed
//! multiplicative order `m` divides `q - 1`.
//!
//! Elements are encoded as integers in `0..q`: the encoding of a polynomial
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` over `F_p` is `sum c_i p^i`.  The
//! canonical element ordering used for deterministic choices is this numeric
//! encoding.  Multiplication runs over discrete log tables; addition is
//! digit-wise mod p (with a small table fast path for tiny q).

use std::rc::Rc;

use crate::matrix::Field;
use crate::{Error, Result};

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The p'-part of `n`: remove all factors of p.
pub fn p_prime_part(mut n: u32, p: u32) -> u32 {
    while n % p == 0 {
        n /= p;
    }
    n
}

/// A concrete `F_q` with discrete-log tables and a distinguished generator of
/// the cyclic subgroup of order `m` in `F_q^*`.
pub struct Fq {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    /// Target multiplicative order baked into the construction: `m | q - 1`.
    pub m: u32,
    /// Coefficients of the monic irreducible modulus, degree k (little-endian,
    /// length k+1, leading 1); for k = 1 this is `[0, 1]` meaning x itself is
    /// not used and arithmetic is plain mod p.
    pub modulus: Vec<u32>,
    /// `exp_table[i] = g^i` for the chosen primitive element g, length q-1.
    exp_table: Vec<u32>,
    /// `log_table[x] = i` with `exp_table[i] = x`; log of 0 is undefined (u32::MAX).
    log_table: Vec<u32>,
    /// Addition table when q is small enough, else empty (digit fallback).
    add_table: Vec<u32>,
    /// Encoding of the least element of multiplicative order exactly m
    /// ("the lift generator"): its powers enumerate the order-m subgroup.
    pub lift_generator: u32,
}

impl std::fmt::Debug for Fq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F{}(p={},k={},m={})", self.q, self.p, self.k, self.m)
    }
}

/// Multiplicative order of `a` modulo `m` (gcd(a, m) = 1).
fn mult_order_mod(a: u32, m: u32) -> u32 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = (x * (a % m)) % m;
        k += 1;
        assert!(k <= m, "a is not invertible mod m");
    }
    k
}

/// Polynomial addition of encodings, digit-wise mod p.
fn enc_add(p: u32, a: u32, b: u32) -> u32 {
    let mut out = 0u32;
    let (mut a, mut b) = (a, b);
    let mut place = 1u32;
    while a > 0 || b > 0 {
        let d = (a % p + b % p) % p;
        out += d * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// Multiply two encodings as polynomials mod the modulus.
fn enc_mul(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let k = modulus.len() - 1;
    let digits = |mut x: u32| -> Vec<u32> {
        let mut v = vec![0u32; k];
        for d in v.iter_mut() {
            *d = x % p;
            x /= p;
        }
        v
    };
    let da = digits(a);
    let db = digits(b);
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce: x^k = -(modulus lower part).
    for i in (k..2 * k).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..k {
            let sub = (c * modulus[j]) % p;
            prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
        }
    }
    let mut enc = 0u32;
    let mut place = 1u32;
    for &d in prod.iter().take(k) {
        enc += d * place;
        place *= p;
    }
    enc
}

/// Deterministic irreducibility test for a monic polynomial over F_p:
/// f of degree k is irreducible iff x^(p^k) = x mod f and, for each prime
/// divisor l of k, gcd(x^(p^(k/l)) - x, f) = 1.
fn poly_is_irreducible(p: u32, f: &[u32]) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    let xq = |e: u32| -> Vec<u32> {
        // x^(p^e) mod f by repeated p-th powering.
        let mut cur = vec![0u32, 1]; // x
        for _ in 0..e {
            cur = poly_pow_mod(p, f, &cur, p as u64);
        }
        cur
    };
    // x^(p^k) == x?
    let mut xpk = xq(k as u32);
    poly_trim(&mut xpk);
    if xpk != vec![0, 1] {
        return false;
    }
    let mut primes = Vec::new();
    let mut kk = k as u32;
    let mut d = 2u32;
    while kk > 1 {
        if kk % d == 0 {
            primes.push(d);
            while kk % d == 0 {
                kk /= d;
            }
        }
        d += 1;
    }
    for l in primes {
        let mut g = xq(k as u32 / l);
        // g - x
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly_trim(&mut g);
        if !poly_gcd_is_one(p, &g, f) {
            return false;
        }
    }
    true
}

fn poly_trim(v: &mut Vec<u32>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
}

fn poly_mul_mod(p: u32, f: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(p, &mut prod, f);
    prod
}

fn poly_rem(p: u32, a: &mut Vec<u32>, f: &[u32]) {
    let k = f.len() - 1;
    while a.len() > k {
        let c = *a.last().unwrap();
        let deg = a.len() - 1;
        if c != 0 {
            for j in 0..k {
                let sub = (c * f[j]) % p;
                a[deg - k + j] = (a[deg - k + j] + p - sub) % p;
            }
        }
        a.pop();
    }
    poly_trim(a);
}

fn poly_pow_mod(p: u32, f: &[u32], base: &[u32], mut e: u64) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(p, f, &acc, &b);
        }
        b = poly_mul_mod(p, f, &b, &b);
        e >>= 1;
    }
    acc
}

fn poly_gcd_is_one(p: u32, a: &[u32], b: &[u32]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b (make b monic first)
        let lead = *b.last().unwrap();
        let lead_inv = mod_inverse(lead, p);
        let bm: Vec<u32> = b.iter().map(|&c| c * lead_inv % p).collect();
        let mut r = a.clone();
        while r.len() >= bm.len() && !(r.len() == 1 && r[0] == 0) {
            let c = *r.last().unwrap();
            let deg = r.len() - 1;
            if c != 0 {
                let off = deg - (bm.len() - 1);
                for j in 0..bm.len() {
                    let sub = (c * bm[j]) % p;
                    r[off + j] = (r[off + j] + p - sub) % p;
                }
            }
            r.pop();
            poly_trim(&mut r);
            if r.len() < bm.len() {
                break;
            }
        }
        poly_trim(&mut r);
        a = b;
        b = r;
    }
    a.len() == 1 && a[0] != 0
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // Fermat.
    let mut acc = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Builds the minimal field `F_{p^k}` whose multiplicative group contains an
/// element of order `m`, i.e. k = multiplicative order of p mod m.
pub fn build_field(p: u32, m: u32) -> Result<Rc<Fq>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 || m % p == 0 {
        return Err(Error::FieldConstruction(format!(
            "m = {} must be nonzero and coprime to p = {}",
            m, p
        )));
    }
    let k = if m == 1 { 1 } else { mult_order_mod(p, m) };
    let q_big = (p as u64).checked_pow(k).filter(|&q| q <= 1 << 16);
    let q = match q_big {
        Some(q) => q as u32,
        None => {
            return Err(Error::FieldConstruction(format!(
                "p^k = {}^{} exceeds the supported field size",
                p, k
            )))
        }
    };
    debug_assert!(m == 1 || (q - 1) % m == 0);

    // Deterministic modulus: least monic irreducible of degree k in encoding
    // order of the lower coefficients.
    let modulus = if k == 1 {
        vec![0, 1]
    } else {
        let mut found = None;
        'search: for low_enc in 0..q {
            let mut f = Vec::with_capacity(k as usize + 1);
            let mut x = low_enc;
            for _ in 0..k {
                f.push(x % p);
                x /= p;
            }
            f.push(1);
            if poly_is_irreducible(p, &f) {
                found = Some(f);
                break 'search;
            }
        }
        found.ok_or_else(|| Error::FieldConstruction("no irreducible modulus found".into()))?
    };

    // Primitive element: least encoding with multiplicative order q - 1.
    let order_of = |x: u32| -> u32 {
        let mut acc = x;
        let mut k = 1;
        while acc != 1 {
            acc = enc_mul(p, &modulus, acc, x);
            k += 1;
        }
        k
    };
    let mut primitive = 0;
    for x in 1..q {
        if order_of(x) == q - 1 {
            primitive = x;
            break;
        }
    }
    assert!(primitive != 0, "F_q^* is cyclic; a primitive element exists");

    let mut exp_table = vec![0u32; (q - 1) as usize];
    let mut log_table = vec![u32::MAX; q as usize];
    let mut acc = 1u32;
    for (i, slot) in exp_table.iter_mut().enumerate() {
        *slot = acc;
        log_table[acc as usize] = i as u32;
        acc = enc_mul(p, &modulus, acc, primitive);
    }
    debug_assert_eq!(acc, 1);

    let add_table = if q <= 512 {
        let mut t = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                t[(a * q + b) as usize] = enc_add(p, a, b);
            }
        }
        t
    } else {
        Vec::new()
    };

    // Least element of order exactly m.
    let lift_generator = if m == 1 {
        1
    } else {
        (1..q)
            .filter(|&x| log_table[x as usize] != u32::MAX)
            .filter(|&x| {
                let l = log_table[x as usize];
                // order of g^l is (q-1)/gcd(q-1, l)
                let g = gcd_u32(q - 1, l);
                (q - 1) / g == m
            })
            .min()
            .expect("m | q-1, so an element of order m exists")
    };

    Ok(Rc::new(Fq {
        p,
        k,
        q,
        m,
        modulus,
        exp_table,
        log_table,
        add_table,
        lift_generator,
    }))
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

impl Fq {
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Encoding of the scalar `n mod p` embedded via the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Exponent j in `0..m` with `lift_generator^j = x`, for x in the order-m
    /// subgroup; None if x is outside that subgroup.
    pub fn lift_exponent(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let mut acc = 1u32;
        for j in 0..self.m {
            if acc == x {
                return Some(j);
            }
            acc = enc_mul(self.p, &self.modulus, acc, self.lift_generator);
        }
        None
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, x: u32) -> u32 {
        assert!(x != 0);
        let l = self.log_table[x as usize];
        (self.q - 1) / gcd_u32(self.q - 1, l)
    }
}

impl Field for Fq {
    type E = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        if self.add_table.is_empty() {
            enc_add(self.p, *a, *b)
        } else {
            self.add_table[(a * self.q + b) as usize]
        }
    }

    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            return 0;
        }
        // -(a): digit-wise p - d.
        let mut out = 0u32;
        let mut x = *a;
        let mut place = 1u32;
        while x > 0 {
            let d = x % self.p;
            if d != 0 {
                out += (self.p - d) * place;
            }
            x /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let la = self.log_table[*a as usize] as u64;
        let lb = self.log_table[*b as usize] as u64;
        self.exp_table[((la + lb) % (self.q as u64 - 1)) as usize]
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let l = self.log_table[*a as usize];
        let li = (self.q - 1 - l) % (self.q - 1);
        Some(self.exp_table[li as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Field;

    #[test]
    fn field_parameters_for_corpus() {
        // p = 3, m = 4: need 4 | 3^k - 1, so k = 2, q = 9.
        let f = build_field(3, 4).unwrap();
        assert_eq!((f.k, f.q), (2, 9));
        // p = 2, m = 3: k = 2, q = 4.
        let f = build_field(2, 3).unwrap();
        assert_eq!((f.k, f.q), (2, 4));
        // p = 2, m = 7: k = 3, q = 8.
        let f = build_field(2, 7).unwrap();
        assert_eq!((f.k, f.q), (3, 8));
        // m = 1: prime field.
        let f = build_field(5, 1).unwrap();
        assert_eq!((f.k, f.q), (1, 5));
        assert!(build_field(4, 1).is_err());
        assert!(build_field(3, 6).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_f9() {
        let f = build_field(3, 4).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(&a, &f.neg(&a)), 0);
            assert_eq!(f.mul(&a, &1), a);
            if a != 0 {
                let inv = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), 1);
            }
            for b in f.elements() {
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                for c in f.elements() {
                    assert_eq!(
                        f.mul(&a, &f.add(&b, &c)),
                        f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_fixed_field_is_fp() {
        // In F_9 the squares-of-squares... x^3 = x exactly on F_3.
        let f = build_field(3, 4).unwrap();
        let mut fixed = Vec::new();
        for a in f.elements() {
            let cube = f.mul(&f.mul(&a, &a), &a);
            if cube == a {
                fixed.push(a);
            }
        }
        assert_eq!(fixed, vec![0, 1, 2]);
    }

    #[test]
    fn lift_generator_has_order_m() {
        let f = build_field(3, 4).unwrap();
        assert_eq!(f.mult_order(f.lift_generator), 4);
        // It is the least such element.
        for x in 1..f.lift_generator {
            assert_ne!(f.mult_order(x), 4);
        }
        // Exponents enumerate the subgroup bijectively.
        let mut seen = std::collections::BTreeSet::new();
        let mut acc = 1u32;
        for j in 0..4 {
            assert_eq!(f.lift_exponent(acc), Some(j));
            seen.insert(acc);
            acc = f.mul(&acc, &f.lift_generator);
        }
        assert_eq!(acc, 1);
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn modulus_is_deterministic() {
        let f1 = build_field(3, 4).unwrap();
        let f2 = build_field(3, 4).unwrap();
        assert_eq!(f1.modulus, f2.modulus);
        assert_eq!(f1.lift_generator, f2.lift_generator);
        // Known value: x^2 + 1 is the least irreducible monic quadratic
        // over F_3 (x^2, x^2+x, x^2+2x reducible; x^2+1 has no root).
        assert_eq!(f1.modulus, vec![1, 0, 1]);
    }
}
