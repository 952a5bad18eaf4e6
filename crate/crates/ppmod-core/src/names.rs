//! Best-effort structural names for small groups.
//!
//! Labels in reports should read like "C4" or "Q8" rather than "subgroup #7".
//! For abelian groups the invariant-factor decomposition gives an exact name;
//! for a handful of common nonabelian orders a few cheap invariants (number
//! of involutions, exponent, center size) distinguish the usual suspects.
//! Anything unrecognized falls back to `G<order>`.  Names are labels only and
//! never feed back into the mathematics.

use std::rc::Rc;

use crate::group::{ElemId, Group};

/// A display name for the group, derived from cheap invariants.
pub fn group_name(g: &Rc<Group>) -> String {
    let n = g.order();
    if n == 1 {
        return "1".into();
    }
    if is_abelian(g) {
        return abelian_name(g);
    }
    let invol = (0..n as ElemId).filter(|&e| g.elem_order(e) == 2).count();
    let expo = g.exponent();
    let z = center_order(g);
    match (n, invol, expo, z) {
        (6, 3, 6, 1) => "S3".into(),
        (8, 1, 4, 2) => "Q8".into(),
        (8, 5, 4, 2) => "D8".into(),
        (10, 5, 10, 1) => "D10".into(),
        (12, 3, 6, 1) => "A4".into(),
        (12, 7, 12, 2) => "D12".into(),
        (12, 1, 12, 2) => "Dic3".into(),
        (14, 7, 14, 1) => "D14".into(),
        (16, 9, 4, 4) => "D8xC2".into(),
        (16, 1, 8, 2) => "Q16".into(),
        (18, 9, 6, 1) => "D18".into(),
        (20, 5, 20, 1) => "F20".into(),
        (20, 10, 10, 1) => "D20".into(),
        (21, 0, 21, 1) => "F21".into(),
        (24, 1, 12, 2) => "SL23".into(),
        (24, 9, 12, 1) => "S4".into(),
        (24, 7, 12, 2) => "C2xA4".into(),
        (24, 13, 12, 2) => "D24".into(),
        _ => format!("G{}", n),
    }
}

fn is_abelian(g: &Rc<Group>) -> bool {
    let ids = g.generator_ids();
    ids.iter()
        .all(|&a| ids.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
}

fn center_order(g: &Rc<Group>) -> usize {
    let n = g.order() as ElemId;
    (0..n)
        .filter(|&z| (0..n).all(|a| g.mul(z, a) == g.mul(a, z)))
        .count()
}

/// Invariant factor decomposition of a finite abelian group from its element
/// orders: peel off the largest cyclic factor (order = exponent) repeatedly.
fn abelian_name(g: &Rc<Group>) -> String {
    // Count elements of each order, then deduce invariant factors d_k | ... | d_1
    // greedily: d_1 = exponent; divide out; repeat on the "remaining" counts.
    // For the small groups here it is simpler to factor prime by prime.
    let n = g.order();
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2usize;
    while m > 1 {
        if m % p == 0 {
            primes.push(p as u32);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    // For each prime, the p-part is determined by counts of elements of order
    // dividing p^k; combine per-prime cyclic factor lists by divisibility.
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    for &q in &primes {
        // c_k = number of elements of order dividing q^k.
        let mut counts = vec![1u32];
        loop {
            let k = counts.len() as u32;
            let qk = q.pow(k);
            let c = (0..n as ElemId)
                .filter(|&e| qk % g.elem_order(e) == 0)
                .count() as u32;
            if c == *counts.last().unwrap() {
                break;
            }
            counts.push(c);
        }
        // ranks: r_k = log_q(c_k / c_{k-1}) = number of factors of order >= q^k.
        let mut facs: Vec<u32> = Vec::new();
        let mut ranks: Vec<u32> = Vec::new();
        for k in 1..counts.len() {
            let mut ratio = counts[k] / counts[k - 1];
            let mut r = 0u32;
            while ratio > 1 {
                ratio /= q;
                r += 1;
            }
            ranks.push(r);
        }
        // ranks[k-1] = #factors with order >= q^k; factor of order q^k appears
        // (ranks[k-1] - ranks[k]) times.
        for k in 0..ranks.len() {
            let next = if k + 1 < ranks.len() { ranks[k + 1] } else { 0 };
            for _ in 0..ranks[k].saturating_sub(next) {
                facs.push(q.pow(k as u32 + 1));
            }
        }
        facs.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(facs);
    }
    // Merge by divisibility: i-th invariant factor = product of i-th largest
    // factor from each prime.
    let rows = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut inv_factors = Vec::new();
    for i in 0..rows {
        let mut d = 1u32;
        for fp in &per_prime {
            if i < fp.len() {
                d *= fp[i];
            }
        }
        inv_factors.push(d);
    }
    inv_factors.sort_unstable();
    let parts: Vec<String> = inv_factors.iter().map(|d| format!("C{}", d)).collect();
    parts.join("x")
}

/// Disambiguates a list of base names by appending (a), (b), ... to repeats.
pub fn disambiguate(names: Vec<String>) -> Vec<String> {
    let mut out = names.clone();
    let mut counts: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for n in &names {
        *counts.entry(n.clone()).or_insert(0) += 1;
    }
    let mut seen: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if counts[n] > 1 {
            let k = seen.entry(n.clone()).or_insert(0);
            out[i] = format!("{}({})", n, (b'a' + *k as u8) as char);
            *k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    #[test]
    fn names_of_small_groups() {
        let c6 = Group::from_generators(
            "?",
            5,
            vec![Perm::from_images(vec![1, 0, 3, 4, 2]).unwrap()],
            512,
        )
        .unwrap();
        assert_eq!(group_name(&c6), "C6");

        let v4 = Group::from_generators(
            "?",
            4,
            vec![
                Perm::from_images(vec![1, 0, 2, 3]).unwrap(),
                Perm::from_images(vec![0, 1, 3, 2]).unwrap(),
            ],
            512,
        )
        .unwrap();
        assert_eq!(group_name(&v4), "C2xC2");

        let s3 = Group::from_generators(
            "?",
            3,
            vec![
                Perm::from_images(vec![1, 0, 2]).unwrap(),
                Perm::from_images(vec![1, 2, 0]).unwrap(),
            ],
            512,
        )
        .unwrap();
        assert_eq!(group_name(&s3), "S3");

        let d8 = Group::from_generators(
            "?",
            4,
            vec![
                Perm::from_images(vec![1, 2, 3, 0]).unwrap(),
                Perm::from_images(vec![2, 1, 0, 3]).unwrap(),
            ],
            512,
        )
        .unwrap();
        assert_eq!(group_name(&d8), "D8");
    }

    #[test]
    fn disambiguation() {
        let names = vec!["C2".to_string(), "C2".to_string(), "C4".to_string()];
        assert_eq!(disambiguate(names), vec!["C2(a)", "C2(b)", "C4"]);
    }
}
