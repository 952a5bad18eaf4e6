//! Permutations of `{0, .., degree-1}` in image form.

use crate::{Error, Result};

/// A permutation stored as its image vector: `p.images[i]` is the image of `i`.
///
/// Permutations compare lexicographically on the image vector, which gives the
/// canonical element ordering used everywhere for determinism (the identity is
/// always the minimum).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<u16>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Perm {
    /// Identity permutation on `degree` points.
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from 0-based images, validating bijectivity.
    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if (i as usize) >= n || seen[i as usize] {
                return Err(Error::BadPerm(format!(
                    "images {:?} are not a bijection on 0..{}",
                    images, n
                )));
            }
            seen[i as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from 1-based images as they appear in group files.
    pub fn from_one_based(images: &[u32], degree: usize) -> Result<Self> {
        if images.len() != degree {
            return Err(Error::BadPerm(format!(
                "expected {} images, got {}",
                degree,
                images.len()
            )));
        }
        let mut v = Vec::with_capacity(degree);
        for &i in images {
            if i == 0 || i as usize > degree {
                return Err(Error::BadPerm(format!(
                    "1-based image {} out of range 1..={}",
                    i, degree
                )));
            }
            v.push((i - 1) as u16);
        }
        Perm::from_images(v)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: u16) -> u16 {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    /// `self * other` acts as "apply `other` first, then `self`".
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u16; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u16;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u16 == j)
    }

    /// Multiplicative order.
    pub fn order(&self) -> u32 {
        let mut k = 1u32;
        let mut acc = self.clone();
        while !acc.is_identity() {
            acc = self.compose(&acc);
            k += 1;
        }
        k
    }

    /// Cycle notation for display, e.g. `(1 2 3)(4 5)`; fixed points omitted.
    pub fn cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.images[start] as usize;
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.images[cur] as usize;
            }
            out.push('(');
            out.push_str(
                &cyc.iter()
                    .map(|&x| (x + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        // s = (1 2), t = (2 3) on three points; s*t maps 3 -> 2 -> 1? No:
        // apply t first: 3->2? t sends point index 1<->2 (0-based), s sends 0<->1.
        let s = Perm::from_images(vec![1, 0, 2]).unwrap();
        let t = Perm::from_images(vec![0, 2, 1]).unwrap();
        let st = s.compose(&t);
        assert_eq!(st.images(), &[1, 2, 0]);
        let ts = t.compose(&s);
        assert_eq!(ts.images(), &[2, 0, 1]);
    }

    #[test]
    fn inverse_and_order() {
        let c = Perm::from_images(vec![1, 2, 3, 0]).unwrap();
        assert_eq!(c.order(), 4);
        assert!(c.compose(&c.inverse()).is_identity());
        assert_eq!(c.inverse().images(), &[3, 0, 1, 2]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_one_based(&[1, 2, 4], 3).is_err());
        assert!(Perm::from_one_based(&[0, 1, 2], 3).is_err());
    }

    #[test]
    fn cycle_string_is_one_based() {
        let c = Perm::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        assert_eq!(c.cycle_string(), "(1 2 3)(4 5)");
        assert_eq!(Perm::identity(3).cycle_string(), "()");
    }
}
