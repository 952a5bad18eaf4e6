//! Finite permutation groups with full multiplication tables.
//!
//! Groups at the scale this crate targets (order <= 512 by default) are stored
//! fully materialized: every element, the whole multiplication table, inverse
//! and order tables, a breadth-first word tree over the generators, and the
//! conjugacy classes.  All downstream algebra leans on these tables, so the
//! one-time cost here buys simple and fast code everywhere else.

use std::collections::HashMap;
use std::rc::Rc;

use crate::perm::Perm;
use crate::{Error, Result};

/// Index of an element within a [`Group`]'s element list.
pub type ElemId = u16;

pub struct Group {
    pub name: String,
    degree: usize,
    gens: Vec<Perm>,
    /// All elements, sorted lexicographically; `elems[0]` is the identity.
    elems: Vec<Perm>,
    index: HashMap<Perm, ElemId>,
    /// Row-major `n * n` table: `mult[a * n + b] = a * b`.
    mult: Vec<ElemId>,
    inv: Vec<ElemId>,
    elem_order: Vec<u32>,
    /// `word[e] = Some((parent, gen))` with `e = parent * gens[gen]`; `None` at the identity.
    word: Vec<Option<(ElemId, u16)>>,
    /// Conjugacy classes sorted by (element order, minimal member); members sorted.
    classes: Vec<Vec<ElemId>>,
    class_of: Vec<usize>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group({}, order {})", self.name, self.order())
    }
}

impl Group {
    /// Enumerates the group generated by `gens` inside `Sym(degree)`.
    ///
    /// Fails if the order exceeds `order_cap`.  The element list is sorted so
    /// that element ids are canonical for the element *set*, independent of
    /// the generating set used to reach it.
    pub fn from_generators(
        name: impl Into<String>,
        degree: usize,
        gens: Vec<Perm>,
        order_cap: usize,
    ) -> Result<Rc<Group>> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::BadGroupSpec(format!(
                    "generator degree {} does not match stated degree {}",
                    g.degree(),
                    degree
                )));
            }
        }
        // Breadth-first closure.
        let id = Perm::identity(degree);
        let mut elems = vec![id.clone()];
        let mut seen: HashMap<Perm, ()> = HashMap::new();
        seen.insert(id, ());
        let mut head = 0;
        while head < elems.len() {
            let cur = elems[head].clone();
            head += 1;
            for g in &gens {
                let next = cur.compose(g);
                if !seen.contains_key(&next) {
                    if elems.len() >= order_cap {
                        return Err(Error::OrderCap {
                            order: elems.len() + 1,
                            cap: order_cap,
                        });
                    }
                    seen.insert(next.clone(), ());
                    elems.push(next);
                }
            }
        }
        elems.sort();
        let n = elems.len();
        let index: HashMap<Perm, ElemId> = elems
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as ElemId))
            .collect();

        let mut mult = vec![0 as ElemId; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = elems[a].compose(&elems[b]);
                mult[a * n + b] = index[&prod];
            }
        }
        let mut inv = vec![0 as ElemId; n];
        for a in 0..n {
            inv[a] = index[&elems[a].inverse()];
        }
        let elem_order: Vec<u32> = elems.iter().map(|p| p.order()).collect();

        // Word tree: breadth-first from the identity, multiplying generators
        // on the right, in sorted-id space.
        let gen_ids: Vec<ElemId> = gens.iter().map(|g| index[g]).collect();
        let mut word = vec![None; n];
        let mut reached = vec![false; n];
        let id_idx = index[&Perm::identity(degree)];
        debug_assert_eq!(id_idx, 0, "identity must sort first");
        reached[id_idx as usize] = true;
        let mut queue = vec![id_idx];
        let mut qhead = 0;
        while qhead < queue.len() {
            let cur = queue[qhead];
            qhead += 1;
            for (gi, &g) in gen_ids.iter().enumerate() {
                let nxt = mult[cur as usize * n + g as usize];
                if !reached[nxt as usize] {
                    reached[nxt as usize] = true;
                    word[nxt as usize] = Some((cur, gi as u16));
                    queue.push(nxt);
                }
            }
        }
        debug_assert!(reached.iter().all(|&r| r));

        // Conjugacy classes.
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<ElemId>> = Vec::new();
        for e in 0..n {
            if class_of[e] != usize::MAX {
                continue;
            }
            let mut members = Vec::new();
            for a in 0..n {
                let c = mult[mult[a * n + e] as usize * n + inv[a] as usize];
                if class_of[c as usize] == usize::MAX {
                    class_of[c as usize] = usize::MAX - 1; // mark
                    members.push(c);
                }
            }
            members.sort();
            let ci = classes.len();
            for &m in &members {
                class_of[m as usize] = ci;
            }
            classes.push(members);
        }
        // Canonical class order: by (element order, minimal member id).
        let mut order_keys: Vec<usize> = (0..classes.len()).collect();
        order_keys.sort_by_key(|&c| (elem_order[classes[c][0] as usize], classes[c][0]));
        let classes: Vec<Vec<ElemId>> = order_keys.iter().map(|&c| classes[c].clone()).collect();
        let mut class_of = vec![0usize; n];
        for (ci, cl) in classes.iter().enumerate() {
            for &m in cl {
                class_of[m as usize] = ci;
            }
        }

        Ok(Rc::new(Group {
            name: name.into(),
            degree,
            gens,
            elems,
            index,
            mult,
            inv,
            elem_order,
            word,
            classes,
            class_of,
        }))
    }

    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> Rc<Group> {
        Group::from_generators("1", degree, vec![], 2).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn generator_ids(&self) -> Vec<ElemId> {
        self.gens.iter().map(|g| self.index[g]).collect()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elems
    }

    pub fn perm(&self, e: ElemId) -> &Perm {
        &self.elems[e as usize]
    }

    pub fn id_of(&self, p: &Perm) -> Option<ElemId> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mult[a as usize * self.elems.len() + b as usize]
    }

    pub fn inverse(&self, a: ElemId) -> ElemId {
        self.inv[a as usize]
    }

    /// `a * b * a^-1`.
    pub fn conj(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul(self.mul(a, b), self.inv[a as usize])
    }

    pub fn elem_order(&self, e: ElemId) -> u32 {
        self.elem_order[e as usize]
    }

    /// Exponent of the group (lcm of element orders).
    pub fn exponent(&self) -> u32 {
        self.elem_order.iter().fold(1u32, |acc, &o| lcm(acc, o))
    }

    pub fn word(&self, e: ElemId) -> Option<(ElemId, u16)> {
        self.word[e as usize]
    }

    pub fn conjugacy_classes(&self) -> &[Vec<ElemId>] {
        &self.classes
    }

    pub fn class_of(&self, e: ElemId) -> usize {
        self.class_of[e as usize]
    }

    /// Representatives (minimal members) of conjugacy classes whose elements
    /// have order coprime to `p`, in canonical class order.
    pub fn p_regular_class_reps(&self, p: u32) -> Vec<ElemId> {
        self.classes
            .iter()
            .map(|cl| cl[0])
            .filter(|&e| self.elem_order(e) % p != 0)
            .collect()
    }

    /// Closure of a set of element ids under multiplication.
    pub fn closure(&self, seed: &[ElemId]) -> Vec<ElemId> {
        let n = self.elems.len();
        let mut inset = vec![false; n];
        let mut list = vec![self.identity()];
        inset[self.identity() as usize] = true;
        for &s in seed {
            if !inset[s as usize] {
                inset[s as usize] = true;
                list.push(s);
            }
        }
        let mut head = 0;
        while head < list.len() {
            let a = list[head];
            head += 1;
            for i in 0..list.len() {
                let b = list[i];
                for prod in [self.mul(a, b), self.mul(b, a)] {
                    if !inset[prod as usize] {
                        inset[prod as usize] = true;
                        list.push(prod);
                    }
                }
            }
        }
        list.sort();
        list
    }

    /// Minimal representatives of the left cosets `g H` of a subgroup given
    /// by its element list, in increasing order.
    pub fn coset_reps_mod(&self, sub_elems: &[ElemId]) -> Vec<ElemId> {
        let n = self.order();
        let mut reps: Vec<ElemId> = (0..n as ElemId)
            .map(|e| {
                sub_elems
                    .iter()
                    .map(|&h| self.mul(e, h))
                    .min()
                    .expect("nonempty subgroup")
            })
            .collect();
        reps.sort();
        reps.dedup();
        reps
    }

    /// A small generating sequence for a subgroup given as a sorted element
    /// list: greedily add the least element not yet generated.
    pub fn small_generating_set(&self, elems: &[ElemId]) -> Vec<ElemId> {
        let mut gens: Vec<ElemId> = Vec::new();
        let mut have = vec![self.identity()];
        for &e in elems {
            if !have.contains(&e) {
                gens.push(e);
                have = self.closure(&gens);
                if have.len() == elems.len() {
                    break;
                }
            }
        }
        gens
    }

    /// Materializes a subgroup (given by its sorted element list) as a group
    /// in its own right, acting on the same points.
    pub fn subgroup_group(self: &Rc<Self>, name: impl Into<String>, elems: &[ElemId]) -> Rc<Group> {
        let gens = self
            .small_generating_set(elems)
            .iter()
            .map(|&e| self.perm(e).clone())
            .collect();
        Group::from_generators(name, self.degree, gens, elems.len() + 1)
            .expect("subgroup closure cannot exceed its own order")
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// A quotient group `G/K` realized by the action of `G` on the left cosets of
/// a normal subgroup `K`, together with the projection and a section.
pub struct QuotientMap {
    pub parent: Rc<Group>,
    pub group: Rc<Group>,
    /// `proj[e]` is the image in the quotient of parent element `e`.
    pub proj: Vec<ElemId>,
    /// `section[q]` is the least parent element mapping onto `q`.
    pub section: Vec<ElemId>,
    /// Sorted element list of the kernel `K` inside the parent.
    pub kernel: Vec<ElemId>,
}

impl QuotientMap {
    /// Builds `G/K`.  `kernel` must be the sorted element list of a normal
    /// subgroup of the parent.
    pub fn new(parent: &Rc<Group>, kernel: &[ElemId], name: impl Into<String>) -> Result<QuotientMap> {
        let n = parent.order();
        let in_k = {
            let mut v = vec![false; n];
            for &k in kernel {
                v[k as usize] = true;
            }
            v
        };
        // Normality check over generators suffices, but the full check is cheap.
        for a in 0..n as ElemId {
            for &k in kernel {
                if !in_k[parent.conj(a, k) as usize] {
                    return Err(Error::NotNormal);
                }
            }
        }
        // Canonical coset labels: minimal member.
        let mut coset_min = vec![ElemId::MAX; n];
        for e in 0..n as ElemId {
            let mut min = ElemId::MAX;
            for &k in kernel {
                min = min.min(parent.mul(e, k));
            }
            coset_min[e as usize] = min;
        }
        let mut labels: Vec<ElemId> = coset_min.clone();
        labels.sort();
        labels.dedup();
        let coset_idx: HashMap<ElemId, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let q = labels.len();

        // Permutation of cosets induced by a parent element.
        let act = |e: ElemId| -> Perm {
            let mut images = vec![0u16; q];
            for (ci, &lab) in labels.iter().enumerate() {
                let img = coset_min[parent.mul(e, lab) as usize];
                images[ci] = coset_idx[&img] as u16;
            }
            Perm::from_images(images).expect("coset action is a permutation")
        };

        let gen_perms: Vec<Perm> = parent.generators().iter().map(|g| {
            act(parent.id_of(g).expect("generator belongs to parent"))
        }).collect();
        let group = Group::from_generators(name, q, gen_perms, q + 1)?;
        if group.order() != q {
            return Err(Error::Internal(format!(
                "coset action of quotient has order {} != index {}",
                group.order(),
                q
            )));
        }
        let mut proj = vec![0 as ElemId; n];
        for e in 0..n as ElemId {
            let p = act(e);
            proj[e as usize] = group
                .id_of(&p)
                .ok_or_else(|| Error::Internal("projection image outside quotient".into()))?;
        }
        let mut section = vec![ElemId::MAX; q];
        for e in 0..n as ElemId {
            let img = proj[e as usize] as usize;
            if section[img] == ElemId::MAX {
                section[img] = e;
            }
        }
        Ok(QuotientMap {
            parent: Rc::clone(parent),
            group,
            proj,
            section,
            kernel: kernel.to_vec(),
        })
    }
}

/// A verified isomorphism between two groups, as an element bijection.
pub struct IsoMap {
    pub src: Rc<Group>,
    pub dst: Rc<Group>,
    pub map: Vec<ElemId>,
    pub inv: Vec<ElemId>,
}

impl IsoMap {
    /// Verifies that `map` (indexed by source element id) is a bijective
    /// homomorphism and packages it.
    pub fn new(src: &Rc<Group>, dst: &Rc<Group>, map: Vec<ElemId>) -> Result<IsoMap> {
        let n = src.order();
        if dst.order() != n || map.len() != n {
            return Err(Error::BadIsomorphism(format!(
                "order mismatch: {} vs {}",
                n,
                dst.order()
            )));
        }
        let mut inv = vec![ElemId::MAX; n];
        for (e, &img) in map.iter().enumerate() {
            if (img as usize) >= n || inv[img as usize] != ElemId::MAX {
                return Err(Error::BadIsomorphism("map is not a bijection".into()));
            }
            inv[img as usize] = e as ElemId;
        }
        for a in 0..n as ElemId {
            for b in 0..n as ElemId {
                if map[src.mul(a, b) as usize] != dst.mul(map[a as usize], map[b as usize]) {
                    return Err(Error::BadIsomorphism(format!(
                        "map is not multiplicative at ({}, {})",
                        a, b
                    )));
                }
            }
        }
        Ok(IsoMap {
            src: Rc::clone(src),
            dst: Rc::clone(dst),
            map,
            inv,
        })
    }

    pub fn apply(&self, e: ElemId) -> ElemId {
        self.map[e as usize]
    }

    /// Inner automorphism `x -> a x a^-1` of `g`.
    pub fn inner(g: &Rc<Group>, a: ElemId) -> IsoMap {
        let map = (0..g.order() as ElemId).map(|x| g.conj(a, x)).collect();
        IsoMap::new(g, g, map).expect("conjugation is an automorphism")
    }

    /// `dst`-side composition: first `self`, then `other`.
    pub fn then(&self, other: &IsoMap) -> Result<IsoMap> {
        let map = self.map.iter().map(|&m| other.map[m as usize]).collect();
        IsoMap::new(&self.src, &other.dst, map)
    }
}

/// All automorphisms of `g`, found by brute force over generator images.
///
/// Candidate images of each generator are limited to elements with matching
/// order and conjugacy class size.  Returns the full automorphism list when
/// the candidate space is small enough (always the case at this crate's
/// scale); if the search space exceeds the budget, falls back to the inner
/// automorphisms induced by the generators.
pub fn automorphisms(g: &Rc<Group>) -> Vec<IsoMap> {
    let n = g.order();
    let gen_ids = g.generator_ids();
    if gen_ids.is_empty() {
        return vec![IsoMap::new(g, g, vec![0]).expect("trivial automorphism")];
    }
    let mut candidates: Vec<Vec<ElemId>> = Vec::new();
    let mut budget: u64 = 1;
    for &gi in &gen_ids {
        let ord = g.elem_order(gi);
        let csize = g.conjugacy_classes()[g.class_of(gi)].len();
        let cands: Vec<ElemId> = (0..n as ElemId)
            .filter(|&e| g.elem_order(e) == ord && g.conjugacy_classes()[g.class_of(e)].len() == csize)
            .collect();
        budget = budget.saturating_mul(cands.len() as u64);
        candidates.push(cands);
    }
    if budget > 2_000_000 {
        let mut out = Vec::new();
        for &a in &gen_ids {
            out.push(IsoMap::inner(g, a));
        }
        return out;
    }

    let mut autos = Vec::new();
    let mut choice = vec![0usize; gen_ids.len()];
    'outer: loop {
        let images: Vec<ElemId> = choice.iter().zip(&candidates).map(|(&c, v)| v[c]).collect();
        if let Some(map) = extend_hom(g, &gen_ids, &images) {
            if let Ok(iso) = IsoMap::new(g, g, map) {
                autos.push(iso);
            }
        }
        // Odometer increment.
        for i in 0..choice.len() {
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    autos
}

/// Tries to extend `gens[i] -> images[i]` to a homomorphism via the word tree;
/// returns the full element map if the extension is well-defined.
fn extend_hom(g: &Rc<Group>, gen_ids: &[ElemId], images: &[ElemId]) -> Option<Vec<ElemId>> {
    let n = g.order();
    let mut map = vec![ElemId::MAX; n];
    map[0] = 0;
    // The word tree is in breadth-first order from the identity, so parents
    // are always resolved before children when scanning by BFS layers; walk
    // elements repeatedly until stable instead of materializing the order.
    let mut resolved = 1;
    while resolved < n {
        let before = resolved;
        for e in 0..n as ElemId {
            if map[e as usize] != ElemId::MAX {
                continue;
            }
            if let Some((parent, gi)) = g.word(e) {
                if map[parent as usize] != ElemId::MAX {
                    map[e as usize] = g.mul(map[parent as usize], images[gi as usize]);
                    resolved += 1;
                }
            }
        }
        if resolved == before {
            return None; // unreachable elements: generators don't generate
        }
    }
    // Well-definedness and multiplicativity.
    let mut seen = vec![false; n];
    for e in 0..n {
        if seen[map[e] as usize] {
            return None;
        }
        seen[map[e] as usize] = true;
    }
    for a in 0..n as ElemId {
        for &(gi, img) in gen_ids.iter().zip(images).map(|(&x, &y)| (x, y)).collect::<Vec<_>>().iter() {
            if map[g.mul(a, gi) as usize] != g.mul(map[a as usize], img) {
                return None;
            }
        }
    }
    Some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Rc<Group> {
        Group::from_generators(
            "S3",
            3,
            vec![
                Perm::from_images(vec![1, 0, 2]).unwrap(),
                Perm::from_images(vec![1, 2, 0]).unwrap(),
            ],
            512,
        )
        .unwrap()
    }

    #[test]
    fn s3_tables() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert_eq!(g.exponent(), 6);
        // Classes: 1, three transpositions, two 3-cycles.
        let sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
        assert_eq!(g.p_regular_class_reps(2).len(), 2);
        assert_eq!(g.p_regular_class_reps(3).len(), 2);
        // Identity is element 0.
        assert!(g.perm(0).is_identity());
        // mult/inverse consistency.
        for a in 0..6 {
            assert_eq!(g.mul(a, g.inverse(a)), 0);
        }
    }

    #[test]
    fn word_tree_reaches_everything() {
        let g = s3();
        for e in 1..g.order() as ElemId {
            let mut cur = e;
            let mut steps = 0;
            while let Some((parent, _)) = g.word(cur) {
                cur = parent;
                steps += 1;
                assert!(steps <= g.order());
            }
            assert_eq!(cur, 0);
        }
    }

    #[test]
    fn quotient_of_s3_by_a3() {
        let g = s3();
        let a3: Vec<ElemId> = (0..6)
            .filter(|&e| g.elem_order(e) != 2)
            .collect();
        let q = QuotientMap::new(&g, &a3, "S3/A3").unwrap();
        assert_eq!(q.group.order(), 2);
        // Projection is a homomorphism.
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(
                    q.proj[g.mul(a, b) as usize],
                    q.group.mul(q.proj[a as usize], q.proj[b as usize])
                );
            }
        }
        // Section lifts.
        for qe in 0..2u16 {
            assert_eq!(q.proj[q.section[qe as usize] as usize], qe);
        }
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let g = s3();
        let c2: Vec<ElemId> = (0..6).filter(|&e| {
            let p = g.perm(e);
            p.is_identity() || *p == Perm::from_images(vec![1, 0, 2]).unwrap()
        }).collect();
        assert!(matches!(QuotientMap::new(&g, &c2, "S3/C2"), Err(Error::NotNormal)));
    }

    #[test]
    fn s3_automorphisms_are_all_inner() {
        let g = s3();
        let autos = automorphisms(&g);
        assert_eq!(autos.len(), 6);
    }

    #[test]
    fn closure_and_small_gens() {
        let g = s3();
        let all = g.closure(&g.generator_ids());
        assert_eq!(all.len(), 6);
        let gens = g.small_generating_set(&all);
        assert!(gens.len() <= 2);
        assert_eq!(g.closure(&gens).len(), 6);
    }

    #[test]
    fn subgroup_group_roundtrip() {
        let g = s3();
        let a3: Vec<ElemId> = (0..6).filter(|&e| g.elem_order(e) != 2).collect();
        let h = g.subgroup_group("A3", &a3);
        assert_eq!(h.order(), 3);
        assert_eq!(h.degree(), 3);
    }
}
