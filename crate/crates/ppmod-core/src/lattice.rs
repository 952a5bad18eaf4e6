//! The full subgroup lattice of a small group.
//!
//! Subgroups are enumerated by closing the set of cyclic subgroups under
//! one-generator extensions: repeatedly form `<A, g>` for each known subgroup
//! `A` and element `g`.  Every subgroup arises this way (add generators one at
//! a time), so the enumeration is exhaustive.  Everything downstream —
//! conjugacy classes of subgroups, inclusion order, the Moebius function,
//! normalizers and closures — is derived from this one list.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::group::{ElemId, Group};

/// Index into [`Lattice::subgroups`].
pub type SubId = usize;

#[derive(Clone)]
pub struct Subgroup {
    /// Sorted element ids.
    pub elems: Vec<ElemId>,
    pub order: usize,
    /// Conjugacy class index within the lattice.
    pub class: usize,
}

pub struct Lattice {
    pub group: Rc<Group>,
    /// Sorted by (order, element list); index 0 is the trivial subgroup and
    /// the last entry is the whole group.
    pub subgroups: Vec<Subgroup>,
    /// Classes sorted by (order, minimal member element list); members sorted.
    pub classes: Vec<Vec<SubId>>,
    /// Bitset: `leq[a]` has bit `b` set iff subgroup `a` is contained in `b`.
    leq: Vec<Vec<u64>>,
    moebius_memo: RefCell<HashMap<(SubId, SubId), i64>>,
    by_elems: HashMap<Vec<ElemId>, SubId>,
    /// For each subgroup, a group element conjugating it onto its class representative.
    conj_to_rep: Vec<ElemId>,
}

impl Lattice {
    pub fn build(group: &Rc<Group>) -> Lattice {
        let n = group.order();
        let mut by_elems: HashMap<Vec<ElemId>, SubId> = HashMap::new();
        let mut subs: Vec<Vec<ElemId>> = Vec::new();

        let add = |elems: Vec<ElemId>, subs: &mut Vec<Vec<ElemId>>, by: &mut HashMap<Vec<ElemId>, SubId>| -> bool {
            if by.contains_key(&elems) {
                false
            } else {
                by.insert(elems.clone(), subs.len());
                subs.push(elems);
                true
            }
        };

        add(vec![group.identity()], &mut subs, &mut by_elems);
        for e in 0..n as ElemId {
            let cyc = group.closure(&[e]);
            add(cyc, &mut subs, &mut by_elems);
        }
        // One-generator extension closure.
        let mut head = 0;
        while head < subs.len() {
            let base = subs[head].clone();
            head += 1;
            if base.len() == n {
                continue;
            }
            for e in 0..n as ElemId {
                if base.binary_search(&e).is_ok() {
                    continue;
                }
                let mut seed = base.clone();
                seed.push(e);
                let ext = group.closure(&seed);
                add(ext, &mut subs, &mut by_elems);
            }
        }
        subs.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let by_elems: HashMap<Vec<ElemId>, SubId> =
            subs.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

        // Inclusion bitsets.
        let words = subs.len().div_ceil(64);
        let mut leq = vec![vec![0u64; words]; subs.len()];
        for (a, ea) in subs.iter().enumerate() {
            for (b, eb) in subs.iter().enumerate() {
                if ea.len() <= eb.len() && is_subset(ea, eb) {
                    leq[a][b / 64] |= 1 << (b % 64);
                }
            }
        }

        // Conjugacy classes of subgroups.
        let mut class_of = vec![usize::MAX; subs.len()];
        let mut conj_to_rep = vec![0 as ElemId; subs.len()];
        let mut classes: Vec<Vec<SubId>> = Vec::new();
        for s in 0..subs.len() {
            if class_of[s] != usize::MAX {
                continue;
            }
            // Orbit of s under conjugation; record a conjugator to s for each member.
            let mut members: Vec<(SubId, ElemId)> = vec![(s, group.identity())];
            let mut seen: Vec<SubId> = vec![s];
            let mut qh = 0;
            while qh < members.len() {
                let (cur, path) = members[qh];
                qh += 1;
                for g in 0..n as ElemId {
                    let img: Vec<ElemId> = {
                        let mut v: Vec<ElemId> =
                            subs[cur].iter().map(|&x| group.conj(g, x)).collect();
                        v.sort();
                        v
                    };
                    let img_id = by_elems[&img];
                    if !seen.contains(&img_id) {
                        seen.push(img_id);
                        // img = g * cur * g^-1 and cur = path * s * path^-1.
                        members.push((img_id, group.mul(g, path)));
                    }
                }
            }
            // Representative: minimal element list (== minimal SubId among equal orders,
            // since subgroups are sorted by (order, elems)).
            let rep = *seen.iter().min().unwrap();
            let ci = classes.len();
            let rep_conj: HashMap<SubId, ElemId> = members.iter().map(|&(i, g)| (i, g)).collect();
            // conj_to_rep[x]: element c with  c x c^-1 = rep.
            // We stored g_x with x = g_x s g_x^-1, so c = g_rep * g_x^-1.
            let g_rep = rep_conj[&rep];
            let mut mem_sorted: Vec<SubId> = seen.clone();
            mem_sorted.sort();
            for &m in &mem_sorted {
                class_of[m] = ci;
                conj_to_rep[m] = group.mul(g_rep, group.inverse(rep_conj[&m]));
            }
            classes.push(mem_sorted);
        }
        // Canonical class order: by representative (order, element list) == by rep SubId.
        let mut order_keys: Vec<usize> = (0..classes.len()).collect();
        order_keys.sort_by_key(|&c| classes[c][0]);
        let classes: Vec<Vec<SubId>> = order_keys.iter().map(|&c| classes[c].clone()).collect();
        let mut class_of_new = vec![0usize; subs.len()];
        for (ci, cl) in classes.iter().enumerate() {
            for &m in cl {
                class_of_new[m] = ci;
            }
        }

        let subgroups: Vec<Subgroup> = subs
            .iter()
            .enumerate()
            .map(|(i, elems)| Subgroup {
                order: elems.len(),
                elems: elems.clone(),
                class: class_of_new[i],
            })
            .collect();

        Lattice {
            group: Rc::clone(group),
            subgroups,
            classes,
            leq,
            moebius_memo: RefCell::new(HashMap::new()),
            by_elems,
            conj_to_rep,
        }
    }

    pub fn count(&self) -> usize {
        self.subgroups.len()
    }

    pub fn trivial(&self) -> SubId {
        0
    }

    pub fn whole(&self) -> SubId {
        self.subgroups.len() - 1
    }

    pub fn by_elements(&self, elems: &[ElemId]) -> Option<SubId> {
        self.by_elems.get(elems).copied()
    }

    pub fn is_leq(&self, a: SubId, b: SubId) -> bool {
        self.leq[a][b / 64] & (1 << (b % 64)) != 0
    }

    /// Class representative (minimal member) of the class of `s`.
    pub fn rep_of(&self, s: SubId) -> SubId {
        self.classes[self.subgroups[s].class][0]
    }

    /// An element `c` with `c s c^-1 = rep_of(s)`.
    pub fn conjugator_to_rep(&self, s: SubId) -> ElemId {
        self.conj_to_rep[s]
    }

    /// Representatives of all conjugacy classes, in canonical order.
    pub fn class_reps(&self) -> Vec<SubId> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// All subgroups contained in `b`.
    pub fn under(&self, b: SubId) -> Vec<SubId> {
        (0..self.count()).filter(|&a| self.is_leq(a, b)).collect()
    }

    /// Moebius function of the subgroup poset, memoized.
    pub fn moebius(&self, a: SubId, b: SubId) -> i64 {
        if !self.is_leq(a, b) {
            return 0;
        }
        if a == b {
            return 1;
        }
        if let Some(&v) = self.moebius_memo.borrow().get(&(a, b)) {
            return v;
        }
        let mut sum = 0i64;
        for w in 0..self.count() {
            if w != b && self.is_leq(a, w) && self.is_leq(w, b) {
                sum += self.moebius(a, w);
            }
        }
        let v = -sum;
        self.moebius_memo.borrow_mut().insert((a, b), v);
        v
    }

    pub fn conjugate_subgroup(&self, s: SubId, g: ElemId) -> SubId {
        let mut v: Vec<ElemId> = self.subgroups[s]
            .elems
            .iter()
            .map(|&x| self.group.conj(g, x))
            .collect();
        v.sort();
        self.by_elems[&v]
    }

    pub fn normalizer(&self, s: SubId) -> SubId {
        let n = self.group.order();
        let elems: Vec<ElemId> = (0..n as ElemId)
            .filter(|&g| self.conjugate_subgroup(s, g) == s)
            .collect();
        *self
            .by_elems
            .get(&elems)
            .expect("normalizer is a subgroup and must be in the lattice")
    }

    pub fn is_normal(&self, s: SubId) -> bool {
        self.classes[self.subgroups[s].class].len() == 1
    }

    pub fn normal_closure(&self, s: SubId) -> SubId {
        let mut seed: Vec<ElemId> = Vec::new();
        for g in 0..self.group.order() as ElemId {
            for &x in &self.subgroups[s].elems {
                seed.push(self.group.conj(g, x));
            }
        }
        let elems = self.group.closure(&seed);
        self.by_elems[&elems]
    }

    /// Intersection of two subgroups.
    pub fn intersect(&self, a: SubId, b: SubId) -> SubId {
        let eb = &self.subgroups[b].elems;
        let elems: Vec<ElemId> = self.subgroups[a]
            .elems
            .iter()
            .copied()
            .filter(|e| eb.binary_search(e).is_ok())
            .collect();
        self.by_elems[&elems]
    }

    /// The smallest normal subgroup with p-group-free quotient structure on
    /// top: the subgroup generated by all elements of p-power order of `s`
    /// (equivalently by all Sylow p-subgroups of `s`).
    pub fn p_residue(&self, s: SubId, p: u32) -> SubId {
        let seed: Vec<ElemId> = self.subgroups[s]
            .elems
            .iter()
            .copied()
            .filter(|&e| is_p_power(self.group.elem_order(e), p))
            .collect();
        let elems = self.group.closure(&seed);
        self.by_elems[&elems]
    }

    /// Is `s` generated by its own p-elements?
    pub fn is_p_residue_free(&self, s: SubId, p: u32) -> bool {
        self.p_residue(s, p) == s
    }

    /// Class representatives of p-subgroups (including the trivial one), in
    /// canonical class order.
    pub fn p_subgroup_class_reps(&self, p: u32) -> Vec<SubId> {
        self.class_reps()
            .into_iter()
            .filter(|&s| is_p_power_usize(self.subgroups[s].order, p))
            .collect()
    }

    /// Representatives `g` of the double cosets `A g B`, minimal in each coset.
    pub fn double_coset_reps(&self, a: SubId, b: SubId) -> Vec<ElemId> {
        let n = self.group.order();
        let ea = &self.subgroups[a].elems;
        let eb = &self.subgroups[b].elems;
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        for g in 0..n as ElemId {
            if seen[g as usize] {
                continue;
            }
            reps.push(g);
            for &x in ea {
                let xg = self.group.mul(x, g);
                for &y in eb {
                    seen[self.group.mul(xg, y) as usize] = true;
                }
            }
        }
        reps
    }

    /// Left coset representatives of `b` in `a` (requires `b <= a`), minimal
    /// in each coset.
    pub fn left_coset_reps(&self, a: SubId, b: SubId) -> Vec<ElemId> {
        assert!(self.is_leq(b, a));
        let eb = &self.subgroups[b].elems;
        let mut seen: HashMap<ElemId, ()> = HashMap::new();
        let mut reps = Vec::new();
        for &g in &self.subgroups[a].elems {
            if seen.contains_key(&g) {
                continue;
            }
            reps.push(g);
            for &y in eb {
                seen.insert(self.group.mul(g, y), ());
            }
        }
        reps
    }
}

fn is_subset(a: &[ElemId], b: &[ElemId]) -> bool {
    a.iter().all(|e| b.binary_search(e).is_ok())
}

fn is_p_power(mut n: u32, p: u32) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

fn is_p_power_usize(n: usize, p: u32) -> bool {
    is_p_power(n as u32, p)
}
