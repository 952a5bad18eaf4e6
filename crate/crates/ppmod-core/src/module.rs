//! Finitely generated modules over group algebras `F_q[G]`, given by one
//! matrix per group generator.
//!
//! A module knows its group, its field, and the generator action matrices;
//! matrices for arbitrary elements are produced on demand by walking the
//! group's word tree and are memoized.  Construction verifies that the
//! generator matrices actually define a representation (the check factors
//! through the word tree: it is enough that `rho(a) rho(s) = rho(a s)` for
//! every element `a` and generator `s`).  The check is skipped above a
//! dimension threshold, where modules only arise from functorial
//! constructions that preserve representation-hood.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::Deserialize;

use crate::cyclo::{CycElem, CycField};
use crate::field::Fq;
use crate::group::{ElemId, Group, IsoMap, QuotientMap};
use crate::lattice::{Lattice, SubId};
use crate::matrix::{Field, Mat};
use crate::perm::Perm;
use crate::{Error, Result};

/// Above this dimension, representation verification at construction is
/// skipped (functorial constructions are trusted).
const VERIFY_DIM_LIMIT: usize = 64;

pub struct Module {
    pub group: Rc<Group>,
    pub field: Rc<Fq>,
    pub dim: usize,
    /// One matrix per group generator, acting on column vectors.
    pub gen_mats: Vec<Mat<Fq>>,
    elem_cache: RefCell<HashMap<ElemId, Rc<Mat<Fq>>>>,
    pub label: String,
}

impl std::fmt::Debug for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Module({}, dim {} over F{})", self.label, self.dim, self.field.q)
    }
}

impl Module {
    pub fn new(
        group: Rc<Group>,
        field: Rc<Fq>,
        dim: usize,
        gen_mats: Vec<Mat<Fq>>,
        label: impl Into<String>,
        max_dim: usize,
    ) -> Result<Rc<Module>> {
        if dim > max_dim {
            return Err(Error::DimCap { dim, cap: max_dim });
        }
        if gen_mats.len() != group.generators().len() {
            return Err(Error::Internal(format!(
                "expected {} generator matrices, got {}",
                group.generators().len(),
                gen_mats.len()
            )));
        }
        for m in &gen_mats {
            if m.rows != dim || m.cols != dim {
                return Err(Error::Internal("generator matrices must be square of equal size".into()));
            }
        }
        let module = Rc::new(Module {
            group,
            field,
            dim,
            gen_mats,
            elem_cache: RefCell::new(HashMap::new()),
            label: label.into(),
        });
        if dim <= VERIFY_DIM_LIMIT {
            module.verify_representation()?;
        }
        Ok(module)
    }

    /// Checks `rho(a) rho(s) = rho(a s)` for all elements `a` and generators
    /// `s`; with matrices built along the word tree this implies `rho` is a
    /// homomorphism on the whole multiplication table.
    fn verify_representation(&self) -> Result<()> {
        let f = &*self.field;
        let gen_ids = self.group.generator_ids();
        for a in 0..self.group.order() as ElemId {
            let ra = self.act(a);
            for (gi, &s) in gen_ids.iter().enumerate() {
                let prod = ra.mul(f, &self.gen_mats[gi]);
                let direct = self.act(self.group.mul(a, s));
                if prod != *direct {
                    return Err(Error::Internal(format!(
                        "generator matrices do not define a representation (at element {}, generator {})",
                        a, gi
                    )));
                }
            }
        }
        Ok(())
    }

    /// Action matrix of an arbitrary element.
    pub fn act(&self, e: ElemId) -> Rc<Mat<Fq>> {
        if let Some(m) = self.elem_cache.borrow().get(&e) {
            return Rc::clone(m);
        }
        let mat = match self.group.word(e) {
            None => Rc::new(Mat::identity(&*self.field, self.dim)),
            Some((parent, gi)) => {
                let pm = self.act(parent);
                Rc::new(pm.mul(&*self.field, &self.gen_mats[gi as usize]))
            }
        };
        self.elem_cache.borrow_mut().insert(e, Rc::clone(&mat));
        mat
    }

    /// Elements acting as the identity, sorted.
    pub fn kernel_of_action(&self) -> Vec<ElemId> {
        let f = &*self.field;
        let id = Mat::identity(f, self.dim);
        (0..self.group.order() as ElemId)
            .filter(|&e| *self.act(e) == id)
            .collect()
    }

    /// Eigenvalue multiplicities of the action of a p-regular element `e`:
    /// pairs `(lambda, dim ker(rho(e) - lambda))` over eigenvalues in `F_q`,
    /// in increasing encoding order of lambda.  Asserts semisimplicity
    /// (multiplicities sum to dim).
    pub fn eigenvalue_multiplicities(&self, e: ElemId) -> Vec<(u32, usize)> {
        let f = &*self.field;
        let d = self.group.elem_order(e);
        assert!(
            d % f.p != 0,
            "eigenvalue analysis requires an element of order coprime to p"
        );
        let rho = self.act(e);
        let mut out = Vec::new();
        let mut total = 0;
        for lam in f.elements() {
            if lam == 0 {
                continue;
            }
            // Only d-th roots of unity can occur.
            if f.mult_order(lam) > d || d % f.mult_order(lam) != 0 {
                continue;
            }
            let shifted = rho.sub(f, &Mat::identity(f, self.dim).scale(f, &lam));
            let mult = shifted.kernel_basis(f).rows;
            if mult > 0 {
                out.push((lam, mult));
                total += mult;
            }
        }
        assert_eq!(
            total, self.dim,
            "p-regular element action must be diagonalizable over the chosen field"
        );
        out
    }

    /// Exact lifted trace of the action of `e` (of order coprime to p): the
    /// sum of eigenvalue multiplicities times the corresponding root of unity
    /// in `Q(zeta_m)` under the least-generator lift.
    pub fn brauer_value(&self, e: ElemId, cyc: &CycField) -> CycElem {
        let f = &*self.field;
        let mut acc = cyc.zero();
        for (lam, mult) in self.eigenvalue_multiplicities(e) {
            let j = f
                .lift_exponent(lam)
                .expect("eigenvalue of p-regular element lies in the order-m subgroup");
            let term = cyc.zeta_pow(j);
            let m = cyc.from_int(mult as i64);
            acc = cyc.add(&acc, &cyc.mul(&m, &term));
        }
        acc
    }

    /// Lifted trace values at the canonical p-regular class representatives.
    pub fn brauer_vector(&self, cyc: &CycField) -> Vec<CycElem> {
        self.group
            .p_regular_class_reps(self.field.p)
            .into_iter()
            .map(|e| self.brauer_value(e, cyc))
            .collect()
    }

    /// Basis of the subspace fixed by every element of `elems` (it suffices
    /// to intersect over a generating set), as rows.
    pub fn fixed_points(&self, gens: &[ElemId]) -> Mat<Fq> {
        let f = &*self.field;
        if gens.is_empty() {
            return Mat::identity(f, self.dim);
        }
        let id = Mat::identity(f, self.dim);
        let stacked: Vec<Mat<Fq>> = gens
            .iter()
            .map(|&e| self.act(e).sub(f, &id))
            .collect();
        let refs: Vec<&Mat<Fq>> = stacked.iter().collect();
        Mat::vstack(f, &refs).kernel_basis(f)
    }
}

/// The permutation module `F[G/H]` on the left cosets of `H`.
pub fn perm_module(
    group: &Rc<Group>,
    field: &Rc<Fq>,
    subgroup_elems: &[ElemId],
    label: impl Into<String>,
    max_dim: usize,
) -> Result<Rc<Module>> {
    let n = group.order();
    let mut coset_min = vec![ElemId::MAX; n];
    for e in 0..n as ElemId {
        let mut min = ElemId::MAX;
        for &h in subgroup_elems {
            min = min.min(group.mul(e, h));
        }
        coset_min[e as usize] = min;
    }
    let mut labels: Vec<ElemId> = coset_min.clone();
    labels.sort();
    labels.dedup();
    let idx: HashMap<ElemId, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let dim = labels.len();
    let f = &**field;
    let gen_mats: Vec<Mat<Fq>> = group
        .generator_ids()
        .iter()
        .map(|&g| {
            let mut m = Mat::zero(f, dim, dim);
            for (j, &lab) in labels.iter().enumerate() {
                let img = idx[&coset_min[group.mul(g, lab) as usize]];
                m.set(img, j, f.one());
            }
            m
        })
        .collect();
    Module::new(Rc::clone(group), Rc::clone(field), dim, gen_mats, label, max_dim)
}

/// The regular module `F[G]`.
pub fn regular_module(group: &Rc<Group>, field: &Rc<Fq>, max_dim: usize) -> Result<Rc<Module>> {
    perm_module(
        group,
        field,
        &[group.identity()],
        format!("F[{}]", group.name),
        max_dim,
    )
}

/// The one-dimensional trivial module.
pub fn trivial_module(group: &Rc<Group>, field: &Rc<Fq>) -> Rc<Module> {
    let f = &**field;
    let gen_mats = group.generators().iter().map(|_| Mat::identity(f, 1)).collect();
    Module::new(Rc::clone(group), Rc::clone(field), 1, gen_mats, "F", 1).expect("trivial module")
}

/// Restriction to a subgroup handle (a group whose elements all belong to
/// the module's group).
pub fn restrict(m: &Rc<Module>, sub: &Rc<Group>, max_dim: usize) -> Result<Rc<Module>> {
    let gen_mats: Vec<Mat<Fq>> = sub
        .generators()
        .iter()
        .map(|p| {
            let e = m
                .group
                .id_of(p)
                .ok_or(Error::NotASubgroup)?;
            Ok((*m.act(e)).clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Module::new(
        Rc::clone(sub),
        Rc::clone(&m.field),
        m.dim,
        gen_mats,
        format!("Res({})", m.label),
        max_dim,
    )
}

/// Induction from a subgroup handle `H` to the ambient group: the basis is
/// (coset representative) x (basis of m), cosets ordered by minimal
/// representative.
pub fn induce(
    m: &Rc<Module>,
    group: &Rc<Group>,
    max_dim: usize,
) -> Result<Rc<Module>> {
    let h = &m.group;
    let n = group.order();
    // Coset reps of H in the ambient group, minimal in each coset.
    let h_ids: Vec<ElemId> = h
        .elements()
        .iter()
        .map(|p| group.id_of(p).ok_or(Error::NotASubgroup))
        .collect::<Result<Vec<_>>>()?;
    let mut coset_min = vec![ElemId::MAX; n];
    for e in 0..n as ElemId {
        let mut min = ElemId::MAX;
        for &hh in &h_ids {
            min = min.min(group.mul(e, hh));
        }
        coset_min[e as usize] = min;
    }
    let mut reps: Vec<ElemId> = coset_min.clone();
    reps.sort();
    reps.dedup();
    let rep_idx: HashMap<ElemId, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let dim = reps.len() * m.dim;
    if dim > max_dim {
        return Err(Error::DimCap { dim, cap: max_dim });
    }
    let f = &*m.field;
    let gen_mats: Vec<Mat<Fq>> = group
        .generator_ids()
        .iter()
        .map(|&g| {
            let mut out = Mat::zero(f, dim, dim);
            for (i, &t) in reps.iter().enumerate() {
                let gt = group.mul(g, t);
                let j = rep_idx[&coset_min[gt as usize]];
                // h = t_j^{-1} g t_i  lies in H.
                let hid = group.mul(group.inverse(reps[j]), gt);
                let h_local = h
                    .id_of(group.perm(hid))
                    .expect("coset arithmetic lands in H");
                let block = m.act(h_local);
                for r in 0..m.dim {
                    for c in 0..m.dim {
                        if !f.is_zero(block.at(r, c)) {
                            out.set(j * m.dim + r, i * m.dim + c, block.at(r, c).clone());
                        }
                    }
                }
            }
            out
        })
        .collect();
    Module::new(
        Rc::clone(group),
        Rc::clone(&m.field),
        dim,
        gen_mats,
        format!("Ind({})", m.label),
        max_dim,
    )
}

/// Inflation along a quotient map: a module over `q.group` becomes a module
/// over `q.parent` with the kernel acting trivially.
pub fn inflate(m: &Rc<Module>, q: &QuotientMap, max_dim: usize) -> Result<Rc<Module>> {
    let gen_mats: Vec<Mat<Fq>> = q
        .parent
        .generator_ids()
        .iter()
        .map(|&g| (*m.act(q.proj[g as usize])).clone())
        .collect();
    Module::new(
        Rc::clone(&q.parent),
        Rc::clone(&m.field),
        m.dim,
        gen_mats,
        format!("Inf({})", m.label),
        max_dim,
    )
}

/// Transport along an isomorphism: a module over `iso.dst` becomes a module
/// over `iso.src` via `rho'(x) = rho(iso(x))`.
pub fn isogate(m: &Rc<Module>, iso: &IsoMap, max_dim: usize) -> Result<Rc<Module>> {
    assert!(Rc::ptr_eq(&m.group, &iso.dst), "module must live over iso.dst");
    let gen_mats: Vec<Mat<Fq>> = iso
        .src
        .generator_ids()
        .iter()
        .map(|&g| (*m.act(iso.apply(g))).clone())
        .collect();
    Module::new(
        Rc::clone(&iso.src),
        Rc::clone(&m.field),
        m.dim,
        gen_mats,
        format!("Iso({})", m.label),
        max_dim,
    )
}

/// Conjugation transport for subgroup handles inside a common ambient group:
/// given a module over `src_sub` and `c` in the ambient group, produces the
/// module over `dst_sub = c * src_sub * c^-1` with `rho'(w) = rho(c^-1 w c)`.
pub fn conjugate_module(
    m: &Rc<Module>,
    ambient: &Rc<Group>,
    dst_sub: &Rc<Group>,
    c: ElemId,
    max_dim: usize,
) -> Result<Rc<Module>> {
    let cinv_perm = ambient.perm(ambient.inverse(c)).clone();
    let c_perm = ambient.perm(c).clone();
    let gen_mats: Vec<Mat<Fq>> = dst_sub
        .generators()
        .iter()
        .map(|w| {
            let conj: Perm = cinv_perm.compose(w).compose(&c_perm);
            let e = m
                .group
                .id_of(&conj)
                .ok_or_else(|| Error::Internal("conjugate falls outside source subgroup".into()))?;
            Ok((*m.act(e)).clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Module::new(
        Rc::clone(dst_sub),
        Rc::clone(&m.field),
        m.dim,
        gen_mats,
        format!("Conj({})", m.label),
        max_dim,
    )
}

/// Inner tensor product (diagonal action).
pub fn tensor(a: &Rc<Module>, b: &Rc<Module>, max_dim: usize) -> Result<Rc<Module>> {
    assert!(Rc::ptr_eq(&a.group, &b.group));
    let dim = a.dim * b.dim;
    if dim > max_dim {
        return Err(Error::DimCap { dim, cap: max_dim });
    }
    let f = &*a.field;
    let gen_mats: Vec<Mat<Fq>> = a
        .gen_mats
        .iter()
        .zip(&b.gen_mats)
        .map(|(x, y)| x.kronecker(f, y))
        .collect();
    Module::new(
        Rc::clone(&a.group),
        Rc::clone(&a.field),
        dim,
        gen_mats,
        format!("{}(x){}", a.label, b.label),
        max_dim,
    )
}

/// The Brauer construction at a p-subgroup `P`: fixed points of `P` modulo
/// the images of the relative traces from all maximal subgroups of `P`,
/// carried as a module over `N_G(P)/P` (supplied as a quotient of the
/// normalizer subgroup handle).
///
/// `norm_handle` must be the normalizer subgroup as a group handle and `nq`
/// the quotient map `norm_handle -> norm_handle / P`.
pub fn brauer_quotient(
    m: &Rc<Module>,
    lat: &Lattice,
    p_sub: SubId,
    norm_handle: &Rc<Group>,
    nq: &QuotientMap,
    max_dim: usize,
) -> Result<Rc<Module>> {
    let f = &*m.field;
    let p_elems = &lat.subgroups[p_sub].elems;
    let p_gens = lat.group.small_generating_set(p_elems);
    let fixed = m.fixed_points(&p_gens); // rows span M^P
    let fdim = fixed.rows;

    // Trace images from maximal subgroups (index p in a p-group).
    let p_order = lat.subgroups[p_sub].order;
    let prime = m.field.p as usize;
    let mut trace_rows: Vec<Vec<u32>> = Vec::new();
    if p_order > 1 {
        for q in lat.under(p_sub) {
            if lat.subgroups[q].order * prime != p_order {
                continue;
            }
            let q_gens = lat.group.small_generating_set(&lat.subgroups[q].elems);
            let fixed_q = m.fixed_points(&q_gens);
            // Relative trace operator: sum over coset reps of Q in P.
            let reps = lat.left_coset_reps(p_sub, q);
            let mut tr = Mat::zero(f, m.dim, m.dim);
            for &r in &reps {
                tr = tr.add(f, &m.act(r));
            }
            for r in 0..fixed_q.rows {
                let img = tr.mul_vec(f, fixed_q.row(r));
                trace_rows.push(img);
            }
        }
    }
    // Express trace images in fixed-point coordinates.
    let fixed_t = fixed.transpose();
    let mut sub_coords: Vec<Vec<u32>> = Vec::new();
    for img in &trace_rows {
        let coords = fixed_t
            .solve(f, img)
            .ok_or_else(|| Error::Internal("trace image escapes the fixed subspace".into()))?;
        sub_coords.push(coords);
    }
    let mut sub_mat = Mat::from_rows(f, sub_coords);
    if sub_mat.rows == 0 {
        sub_mat = Mat::zero(f, 0, fdim);
    }
    let pivots = sub_mat.rref(f);
    let free: Vec<usize> = (0..fdim).filter(|c| !pivots.contains(c)).collect();
    let qdim = free.len();

    // Projection of a fixed-coordinate vector onto the quotient coordinates:
    // reduce by the echelonized subspace rows, then read off free positions.
    let project = |v: &[u32]| -> Vec<u32> {
        let mut w = v.to_vec();
        for (ri, &pc) in pivots.iter().enumerate() {
            let c = w[pc];
            if !f.is_zero(&c) {
                for j in 0..fdim {
                    let t = f.mul(&c, sub_mat.at(ri, j));
                    w[j] = f.sub(&w[j], &t);
                }
            }
        }
        free.iter().map(|&c| w[c]).collect()
    };

    // Action of quotient generators: lift via the parallel generator lists of
    // norm_handle and nq.group.
    let gen_mats: Vec<Mat<Fq>> = norm_handle
        .generators()
        .iter()
        .map(|perm| {
            let e = m
                .group
                .id_of(perm)
                .ok_or_else(|| Error::Internal("normalizer generator outside group".into()))?;
            let rho = m.act(e);
            let mut out = Mat::zero(f, qdim, qdim);
            for (j, &fc) in free.iter().enumerate() {
                // Image of the j-th quotient basis vector: rho(n) applied to
                // the fc-th fixed basis row, in fixed coords, projected.
                let img = rho.mul_vec(f, fixed.row(fc));
                let coords = fixed_t
                    .solve(f, &img)
                    .ok_or_else(|| Error::Internal("normalizer does not preserve fixed points".into()))?;
                let proj = project(&coords);
                for (i, val) in proj.iter().enumerate() {
                    out.set(i, j, *val);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Module::new(
        Rc::clone(&nq.group),
        Rc::clone(&m.field),
        qdim,
        gen_mats,
        format!("Brauer({})", m.label),
        max_dim,
    )
}

/// JSON module literal: field parameters and generator matrices with entries
/// given as little-endian coefficient vectors over the prime field.
#[derive(Debug, Deserialize)]
pub struct ModuleSpec {
    pub p: u32,
    pub m: u32,
    pub dim: usize,
    pub generators: Vec<Vec<Vec<Vec<u32>>>>,
}

/// Builds a module over `group` from a JSON literal; the field is rebuilt
/// from (p, m) and must match the ambient field of the computation.
pub fn module_from_spec(
    group: &Rc<Group>,
    field: &Rc<Fq>,
    spec: &ModuleSpec,
    max_dim: usize,
) -> Result<Rc<Module>> {
    if spec.p != field.p || spec.m != field.m {
        return Err(Error::BadGroupSpec(format!(
            "module literal field (p={}, m={}) does not match computation field (p={}, m={})",
            spec.p, spec.m, field.p, field.m
        )));
    }
    let f = &**field;
    let enc = |coeffs: &[u32]| -> Result<u32> {
        if coeffs.len() > field.k as usize {
            return Err(Error::BadGroupSpec(format!(
                "entry {:?} has more than k={} coefficients",
                coeffs, field.k
            )));
        }
        let mut out = 0u32;
        let mut place = 1u32;
        for &c in coeffs {
            if c >= field.p {
                return Err(Error::BadGroupSpec(format!(
                    "coefficient {} not reduced mod p={}",
                    c, field.p
                )));
            }
            out += c * place;
            place *= field.p;
        }
        Ok(out)
    };
    let mut gen_mats = Vec::new();
    for gm in &spec.generators {
        let n = gm.len();
        if n != spec.dim {
            return Err(Error::BadGroupSpec(format!(
                "module generator matrix is {}x{} but dim is {}",
                n,
                gm.first().map_or(0, |r| r.len()),
                spec.dim
            )));
        }
        let mut mat = Mat::zero(f, n, n);
        for (r, row) in gm.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadGroupSpec("module generator matrix not square".into()));
            }
            for (c, entry) in row.iter().enumerate() {
                mat.set(r, c, enc(entry)?);
            }
        }
        gen_mats.push(mat);
    }
    Module::new(Rc::clone(group), Rc::clone(field), spec.dim, gen_mats, "module literal", max_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_group;
    use crate::field::build_field;

    #[test]
    fn regular_module_of_s3() {
        let g = builtin_group("S3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let m = regular_module(&g, &f, 600).unwrap();
        assert_eq!(m.dim, 6);
        // Action matrices are permutation matrices and multiply correctly.
        for e in 0..6u16 {
            for s in 0..6u16 {
                let prod = m.act(e).mul(&*f, &m.act(s));
                assert_eq!(prod, *m.act(g.mul(e, s)));
            }
        }
        assert_eq!(m.kernel_of_action(), vec![0]);
    }

    #[test]
    fn perm_module_fixed_points_count_orbits() {
        // dim of fixed points of H on F[G/H] = number of H-orbits on G/H.
        let g = builtin_group("S3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let lat = Lattice::build(&g);
        let c2 = lat.classes[1][0];
        let m = perm_module(&g, &f, &lat.subgroups[c2].elems, "F[S3/C2]", 600).unwrap();
        assert_eq!(m.dim, 3);
        let gens = g.small_generating_set(&lat.subgroups[c2].elems);
        // C2 on 3 cosets: fixes one, swaps two -> 2 orbits.
        assert_eq!(m.fixed_points(&gens).rows, 2);
        // Full group fixes only the all-ones line.
        assert_eq!(m.fixed_points(&g.generator_ids()).rows, 1);
    }

    #[test]
    fn restriction_and_induction_dims() {
        let g = builtin_group("S3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let lat = Lattice::build(&g);
        let a3 = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 3)
            .unwrap();
        let h = g.subgroup_group("A3", &lat.subgroups[a3].elems);
        let triv_h = trivial_module(&h, &f);
        let ind = induce(&triv_h, &g, 600).unwrap();
        assert_eq!(ind.dim, 2);
        let back = restrict(&ind, &h, 600).unwrap();
        assert_eq!(back.dim, 2);
        // A3 acts trivially on Ind(1) restricted back (index-2 situation).
        assert_eq!(back.kernel_of_action().len(), 3);
    }

    #[test]
    fn inflation_kernel() {
        let g = builtin_group("S3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let lat = Lattice::build(&g);
        let a3_id = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 3)
            .unwrap();
        let q = QuotientMap::new(&g, &lat.subgroups[a3_id].elems, "S3/A3").unwrap();
        let reg_q = regular_module(&q.group, &f, 600).unwrap();
        let infl = inflate(&reg_q, &q, 600).unwrap();
        assert_eq!(infl.dim, 2);
        // Kernel of the inflated action contains A3.
        let ker = infl.kernel_of_action();
        assert_eq!(ker.len(), 3);
    }

    #[test]
    fn tensor_with_trivial_is_identity_dim() {
        let g = builtin_group("C4", 512).unwrap();
        let f = build_field(2, 1).unwrap();
        let reg = regular_module(&g, &f, 600).unwrap();
        let t = trivial_module(&g, &f);
        let tt = tensor(&reg, &t, 600).unwrap();
        assert_eq!(tt.dim, 4);
        for e in 0..4u16 {
            assert_eq!(*tt.act(e), *reg.act(e));
        }
    }

    #[test]
    fn brauer_quotient_of_regular_c2_vanishes() {
        // F[C2] at P = C2: fixed points are 1-dimensional, and the trace from
        // the trivial subgroup is (1 + g), whose image is exactly the fixed
        // line, so the Brauer quotient is 0.
        let g = builtin_group("C2", 512).unwrap();
        let f = build_field(2, 1).unwrap();
        let lat = Lattice::build(&g);
        let m = regular_module(&g, &f, 600).unwrap();
        let p = lat.whole();
        let norm = g.subgroup_group("N", &lat.subgroups[p].elems);
        let nq = QuotientMap::new(&norm, &norm.closure(&norm.generator_ids()), "N/P").unwrap();
        let bq = brauer_quotient(&m, &lat, p, &norm, &nq, 600).unwrap();
        assert_eq!(bq.dim, 0);
        // The trivial module survives: its Brauer quotient at C2 is 1-dim.
        let t = trivial_module(&g, &f);
        let bt = brauer_quotient(&t, &lat, p, &norm, &nq, 600).unwrap();
        assert_eq!(bt.dim, 1);
    }

    #[test]
    fn eigenvalues_and_brauer_values() {
        // 3-cycle acting on F[C3] over F_4: eigenvalues 1, w, w^2.
        let g = builtin_group("C3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let m = regular_module(&g, &f, 600).unwrap();
        let e3 = (0..3u16).find(|&e| g.elem_order(e) == 3).unwrap();
        let eig = m.eigenvalue_multiplicities(e3);
        assert_eq!(eig.len(), 3);
        assert!(eig.iter().all(|&(_, mult)| mult == 1));
        // Lifted trace of the regular module at a nontrivial element is 0:
        // 1 + zeta + zeta^2 = 0.
        let cyc = CycField::new(3);
        let val = m.brauer_value(e3, &cyc);
        assert!(cyc.is_zero(&val));
        // At the identity: the dimension.
        let at_id = m.brauer_value(0, &cyc);
        assert_eq!(cyc.as_rational(&at_id).unwrap(), num::BigRational::from_integer(3.into()));
    }

    #[test]
    fn module_literal_parses() {
        let g = builtin_group("C2", 512).unwrap();
        let f = build_field(2, 1).unwrap();
        let spec: ModuleSpec = serde_json::from_str(
            r#"{"p": 2, "m": 1, "dim": 2, "generators": [[[[0],[1]],[[1],[0]]]]}"#,
        )
        .unwrap();
        let m = module_from_spec(&g, &f, &spec, 600).unwrap();
        assert_eq!(m.dim, 2);
        // It is the swap, i.e. the regular module of C2.
        let reg = regular_module(&g, &f, 600).unwrap();
        let e = 1u16;
        assert_eq!(*m.act(e), *reg.act(e));
    }
}
