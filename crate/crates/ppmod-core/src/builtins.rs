//! Built-in permutation groups used throughout the test corpus and CLI.

use std::rc::Rc;

use serde::Deserialize;

use crate::group::Group;
use crate::perm::Perm;
use crate::{Error, Result};

/// Names accepted by [`builtin_group`].
pub const BUILTIN_NAMES: [&str; 13] = [
    "trivial", "C2", "C3", "C4", "C2xC2", "C6", "S3", "D8", "Q8", "A4", "SL23", "S4", "C3xC3",
];

/// Constructs a built-in group by name.
pub fn builtin_group(name: &str, order_cap: usize) -> Result<Rc<Group>> {
    let mk = |name: &str, degree: usize, gens: Vec<Vec<u16>>| -> Result<Rc<Group>> {
        let perms = gens
            .into_iter()
            .map(Perm::from_images)
            .collect::<Result<Vec<_>>>()?;
        Group::from_generators(name, degree, perms, order_cap)
    };
    match name {
        "trivial" | "1" => Ok(Group::trivial(1)),
        "C2" => mk("C2", 2, vec![vec![1, 0]]),
        "C3" => mk("C3", 3, vec![vec![1, 2, 0]]),
        "C4" => mk("C4", 4, vec![vec![1, 2, 3, 0]]),
        "C2xC2" => mk("C2xC2", 4, vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]]),
        "C6" => mk("C6", 5, vec![vec![1, 0, 3, 4, 2]]),
        "S3" => mk("S3", 3, vec![vec![1, 0, 2], vec![1, 2, 0]]),
        "D8" => mk("D8", 4, vec![vec![1, 2, 3, 0], vec![2, 1, 0, 3]]),
        "A4" => mk("A4", 4, vec![vec![1, 2, 0, 3], vec![1, 0, 3, 2]]),
        "S4" => mk("S4", 4, vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]]),
        "C3xC3" => mk("C3xC3", 6, vec![vec![1, 2, 0, 3, 4, 5], vec![0, 1, 2, 4, 5, 3]]),
        "Q8" => {
            // i = [[0,-1],[1,0]], j = [[1,1],[1,-1]] in SL(2,3); the action on
            // the 8 nonzero vectors of F_3^2 is regular on Q8 = <i, j>.
            let gens = vec![sl2_perm([0, 2, 1, 0]), sl2_perm([1, 1, 1, 2])];
            Group::from_generators("Q8", 8, gens, order_cap)
        }
        "SL23" => {
            // Standard generators: t = [[1,1],[0,1]] of order 3 and
            // s = [[0,-1],[1,0]] of order 4, acting on the nonzero vectors of F_3^2.
            let gens = vec![sl2_perm([1, 1, 0, 1]), sl2_perm([0, 2, 1, 0])];
            Group::from_generators("SL23", 8, gens, order_cap)
        }
        other => Err(Error::UnknownGroup(other.into())),
    }
}

/// The 8 nonzero vectors of F_3^2 in the fixed enumeration order used for the
/// SL(2,3) and Q8 actions.
fn f3_vectors() -> Vec<(u8, u8)> {
    let mut v = Vec::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            if (a, b) != (0, 0) {
                v.push((a, b));
            }
        }
    }
    v
}

/// Permutation of the 8 nonzero vectors induced by the matrix [[a,b],[c,d]]
/// over F_3 (entries given mod 3, row-major).
fn sl2_perm(m: [u8; 4]) -> Perm {
    let vecs = f3_vectors();
    let idx = |v: (u8, u8)| vecs.iter().position(|&w| w == v).unwrap() as u16;
    let images: Vec<u16> = vecs
        .iter()
        .map(|&(x, y)| {
            let nx = (m[0] * x + m[1] * y) % 3;
            let ny = (m[2] * x + m[3] * y) % 3;
            idx((nx, ny))
        })
        .collect();
    Perm::from_images(images).expect("matrix action is a permutation")
}

/// JSON group specification: degree, generators as 1-based image arrays.
#[derive(Debug, Deserialize)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    #[serde(default)]
    pub name: Option<String>,
}

/// Loads a group from a JSON spec string.
pub fn group_from_json(json: &str, order_cap: usize) -> Result<Rc<Group>> {
    let spec: GroupSpec = serde_json::from_str(json)?;
    let gens = spec
        .generators
        .iter()
        .map(|imgs| Perm::from_one_based(imgs, spec.degree))
        .collect::<Result<Vec<_>>>()?;
    let name = spec.name.unwrap_or_else(|| "G".into());
    Group::from_generators(name, spec.degree, gens, order_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders() {
        let expected = [
            ("trivial", 1),
            ("C2", 2),
            ("C3", 3),
            ("C4", 4),
            ("C2xC2", 4),
            ("C6", 6),
            ("S3", 6),
            ("D8", 8),
            ("Q8", 8),
            ("A4", 12),
            ("SL23", 24),
            ("S4", 24),
            ("C3xC3", 9),
        ];
        for (name, order) in expected {
            let g = builtin_group(name, 512).unwrap();
            assert_eq!(g.order(), order, "order of {}", name);
        }
    }

    #[test]
    fn sl23_matches_matrix_enumeration() {
        // Independent oracle: enumerate all 2x2 matrices over F_3 with
        // determinant 1 and compare the permutation set with the built-in.
        let vecs = f3_vectors();
        let mut perms = std::collections::BTreeSet::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    for d in 0..3u8 {
                        if (3 + a * d % 3 + 3 - b * c % 3) % 3 == 1 {
                            let images: Vec<u16> = vecs
                                .iter()
                                .map(|&(x, y)| {
                                    let nx = (a * x + b * y) % 3;
                                    let ny = (c * x + d * y) % 3;
                                    vecs.iter().position(|&w| w == (nx, ny)).unwrap() as u16
                                })
                                .collect();
                            perms.insert(images);
                        }
                    }
                }
            }
        }
        assert_eq!(perms.len(), 24);
        let g = builtin_group("SL23", 512).unwrap();
        let ours: std::collections::BTreeSet<Vec<u16>> = g
            .elements()
            .iter()
            .map(|p| p.images().to_vec())
            .collect();
        assert_eq!(perms, ours);
    }

    #[test]
    fn q8_is_the_quaternion_group() {
        let g = builtin_group("Q8", 512).unwrap();
        assert_eq!(g.order(), 8);
        // Exactly one involution (the center), exponent 4.
        let invol = (0..8u16).filter(|&e| g.elem_order(e) == 2).count();
        assert_eq!(invol, 1);
        assert_eq!(g.exponent(), 4);
        // Q8 sits inside SL23.
        let sl = builtin_group("SL23", 512).unwrap();
        for p in g.elements() {
            assert!(sl.id_of(p).is_some());
        }
    }

    #[test]
    fn group_from_json_roundtrip() {
        let g = group_from_json(
            r#"{"degree": 3, "generators": [[2, 3, 1]], "name": "C3"}"#,
            512,
        )
        .unwrap();
        assert_eq!(g.order(), 3);
        assert!(group_from_json(r#"{"degree": 3, "generators": [[2, 2, 1]]}"#, 512).is_err());
    }

    #[test]
    fn order_cap_enforced() {
        assert!(matches!(
            builtin_group("SL23", 10),
            Err(Error::OrderCap { .. })
        ));
    }
}
