//! The cofixed induction target and the canonical induction map.
//!
//! For a group `G` the *induction target* is the direct sum, over all
//! subgroups `V` of `G`, of the spans of the inflation-projective classes
//! of `V`, taken modulo the conjugation action of `G`.  A basis is given by
//! pairs (conjugacy class of `V`, orbit of `N_G(V)` on the
//! inflation-projective classes of `V`).
//!
//! The canonical induction map sends a class vector of the representation
//! ring to this target so that composing with induction-and-sum returns
//! the original vector, restriction and transport along isomorphisms are
//! respected, and inflation-projective classes map to their own pair at
//! the full group.  Its coefficients lie in `Z[1/p]` but not always in `Z`.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use num::{BigRational, Zero};

use crate::context::{GroupCtx, SpeciesPoint};
use crate::cyclo::CycElem;
use crate::group::{ElemId, Group, IsoMap};
use crate::lattice::SubId;
use crate::matrix::{Field, Mat};
use crate::module::{conjugate_module, induce, isogate, restrict, tensor, Module};
use crate::tring::{TRing, TVector};
use crate::{Error, Result};

/// Basis element of the induction target: a subgroup class together with a
/// normalizer orbit of inflation-projective classes of the representative.
pub struct RTriple {
    /// Conjugacy class index of the subgroup (lattice class order).
    pub v_class: usize,
    /// Class representative subgroup id.
    pub v_rep: SubId,
    /// Orbit on inflation-projective class indices of the representative's
    /// ring, sorted; the representative is the smallest member.
    pub orbit: Vec<usize>,
    pub label: String,
}

/// Evaluation point for the induction target: a subgroup class `V` with an
/// orbit of evaluation points of the second species family of `V`.
pub struct KPoint {
    pub v_class: usize,
    pub v_rep: SubId,
    /// Orbit on the second-family point indices of the representative's
    /// ring, sorted.
    pub orbit: Vec<usize>,
    pub label: String,
}

pub struct Calt {
    pub ctx: Rc<GroupCtx>,
    pub top_ring: Rc<TRing>,
    top_id: SubId,
    rings: RefCell<HashMap<SubId, Rc<TRing>>>,
    triples: OnceCell<Rc<Vec<RTriple>>>,
    /// (v_class, qx index) -> triple index.
    qx_triple: OnceCell<HashMap<(usize, usize), usize>>,
    kpoints: OnceCell<Rc<Vec<KPoint>>>,
    jpoint_orbit: OnceCell<HashMap<(usize, usize), usize>>,
    mult_cache: RefCell<HashMap<(usize, usize), Rc<Vec<BigRational>>>>,
    lin_cache: RefCell<HashMap<usize, Rc<TVector>>>,
}

/// Orbit partition of `0..count` under a list of permutation maps.
fn orbit_partition(count: usize, actions: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; count];
    let mut orbits = Vec::new();
    for start in 0..count {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for a in actions {
                let y = a[x];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                    frontier.push(y);
                }
            }
        }
        orbit.sort();
        orbits.push(orbit);
    }
    orbits.sort_by_key(|o| o[0]);
    orbits
}

fn pow_elem(g: &Group, e: ElemId, k: u32) -> ElemId {
    let mut acc = g.identity();
    for _ in 0..k {
        acc = g.mul(acc, e);
    }
    acc
}

impl Calt {
    pub fn new(ctx: &Rc<GroupCtx>, top_ring: &Rc<TRing>) -> Calt {
        let all: Vec<ElemId> = (0..ctx.group.order() as ElemId).collect();
        let top_id = ctx.lat.by_elements(&all).expect("whole group is a subgroup");
        Calt {
            ctx: Rc::clone(ctx),
            top_ring: Rc::clone(top_ring),
            top_id,
            rings: RefCell::new(HashMap::new()),
            triples: OnceCell::new(),
            qx_triple: OnceCell::new(),
            kpoints: OnceCell::new(),
            jpoint_orbit: OnceCell::new(),
            mult_cache: RefCell::new(HashMap::new()),
            lin_cache: RefCell::new(HashMap::new()),
        }
    }

    /// The ring of a subgroup id (the top id reuses the ambient ring so its
    /// basis modules stay over the original group handle).
    pub fn ring_for(&self, s: SubId) -> Rc<TRing> {
        if s == self.top_id {
            return Rc::clone(&self.top_ring);
        }
        if let Some(r) = self.rings.borrow().get(&s) {
            return Rc::clone(r);
        }
        let handle = self.ctx.sub_handle(s);
        let sub_ctx = self.ctx.store.ctx(&handle);
        let ring = Rc::new(TRing::new(&sub_ctx));
        self.rings.borrow_mut().insert(s, Rc::clone(&ring));
        ring
    }

    fn class_index(&self, s: SubId) -> usize {
        self.ctx.lat.subgroups[s].class
    }

    /// Generators of `N_G(V)` as ambient element ids, omitting those inside
    /// `V` (which act trivially on isomorphism classes).
    fn outer_normalizer_gens(&self, v: SubId) -> Vec<ElemId> {
        let norm = self.ctx.lat.normalizer(v);
        let handle = self.ctx.sub_handle(norm);
        let velems = &self.ctx.lat.subgroups[v].elems;
        handle
            .generators()
            .iter()
            .filter_map(|p| self.ctx.group.id_of(p))
            .filter(|g| velems.binary_search(g).is_err())
            .collect()
    }

    /// Conjugation of a module over the handle of subgroup `v` by an
    /// ambient element `n` normalizing `v`; result is over the same handle.
    fn self_conjugate(&self, m: &Rc<Module>, v: SubId, n: ElemId) -> Result<Rc<Module>> {
        let handle = self.ring_for(v).ctx.group.clone();
        conjugate_module(m, &self.ctx.group, &handle, n, self.ctx.max_dim())
    }

    /// The single classification index of an indecomposable module.
    fn single_class(ring: &TRing, m: &Rc<Module>) -> Result<usize> {
        let cls = ring.ctx.classify(m)?;
        if cls.len() != 1 || cls[0].1 != 1 {
            return Err(Error::Internal(format!(
                "expected an indecomposable transport, got {:?}",
                cls
            )));
        }
        Ok(cls[0].0)
    }

    /// Basis of the induction target.
    pub fn triples(&self) -> Result<Rc<Vec<RTriple>>> {
        if let Some(t) = self.triples.get() {
            return Ok(Rc::clone(t));
        }
        let class_reps = self.ctx.lat.class_reps();
        let names = self.ctx.class_names().to_vec();
        let mut out = Vec::new();
        let mut qx_triple = HashMap::new();
        for rep in class_reps {
            let v_class = self.class_index(rep);
            let ring = self.ring_for(rep);
            let qxs = ring.ctx.q_classes()?;
            let pp_to_qx = ring.ctx.pp_to_qx()?.to_vec();
            // Action of outer normalizer generators on the
            // inflation-projective classes.
            let mut actions = Vec::new();
            for n in self.outer_normalizer_gens(rep) {
                let mut perm = Vec::with_capacity(qxs.len());
                for q in qxs.iter() {
                    let moved = self.self_conjugate(&q.module, rep, n)?;
                    let pp_idx = Self::single_class(&ring, &moved)?;
                    let qx_idx = pp_to_qx[pp_idx].ok_or_else(|| {
                        Error::Internal(
                            "conjugate of an inflation-projective class is not one".into(),
                        )
                    })?;
                    perm.push(qx_idx);
                }
                actions.push(perm);
            }
            for orbit in orbit_partition(qxs.len(), &actions) {
                let tag = if orbit.len() > 1 {
                    format!("*{}", orbit.len())
                } else {
                    String::new()
                };
                let label = format!("[{}, {}{}]", names[v_class], qxs[orbit[0]].label, tag);
                for &q in &orbit {
                    qx_triple.insert((v_class, q), out.len());
                }
                out.push(RTriple { v_class, v_rep: rep, orbit, label });
            }
        }
        let rc = Rc::new(out);
        let _ = self.triples.set(Rc::clone(&rc));
        let _ = self.qx_triple.set(qx_triple);
        Ok(rc)
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.triples()?.len())
    }

    pub fn labels(&self) -> Result<Vec<String>> {
        Ok(self.triples()?.iter().map(|t| t.label.clone()).collect())
    }

    /// The module realizing the orbit representative of a basis triple
    /// (over the handle of the representative subgroup).
    pub fn triple_module(&self, idx: usize) -> Result<Rc<Module>> {
        let triples = self.triples()?;
        let t = &triples[idx];
        let ring = self.ring_for(t.v_rep);
        let qxs = ring.ctx.q_classes()?;
        Ok(Rc::clone(&qxs[t.orbit[0]].module))
    }

    /// Sends a class vector over the ring of subgroup `u` (supported on
    /// inflation-projective classes) into the cofixed basis, transporting
    /// to the class representative.
    pub fn embed(&self, u: SubId, v: &TVector) -> Result<TVector> {
        let triples = self.triples()?;
        let mut out = TVector::zero(triples.len());
        if v.is_zero() {
            return Ok(out);
        }
        let rep = self.ctx.lat.rep_of(u);
        let v_class = self.class_index(u);
        let ring_u = self.ring_for(u);
        let ring_rep = self.ring_for(rep);
        let qx_triple = self.qx_triple.get().expect("built with triples");
        let u_pp_to_qx = ring_u.ctx.pp_to_qx()?.to_vec();
        let c = self.ctx.lat.conjugator_to_rep(u);
        let pps_u = ring_u.ctx.pp_classes()?;
        for (i, coeff) in v.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let qx_idx = if u == rep {
                u_pp_to_qx[i].ok_or_else(|| {
                    Error::Internal("embedding a class that is not inflation-projective".into())
                })?
            } else {
                let moved = conjugate_module(
                    &pps_u[i].module,
                    &self.ctx.group,
                    &ring_rep.ctx.group,
                    c,
                    self.ctx.max_dim(),
                )?;
                let pp_idx = Self::single_class(&ring_rep, &moved)?;
                ring_rep.ctx.pp_to_qx()?[pp_idx].ok_or_else(|| {
                    Error::Internal("embedding a class that is not inflation-projective".into())
                })?
            };
            let t_idx = *qx_triple
                .get(&(v_class, qx_idx))
                .expect("triple map covers all inflation-projective classes");
            out.coeffs[t_idx] += coeff;
        }
        Ok(out)
    }

    /// Shared inner term of the canonical map for one subgroup `v`:
    /// `sum_{U <= v} |U| mu(U, v) embed(U, res_U pi_v res_v xi)`.
    fn can_term(&self, v: SubId, xi: &TVector) -> Result<TVector> {
        let triples = self.triples()?;
        let mut out = TVector::zero(triples.len());
        let ring_v = self.ring_for(v);
        let res_v = self.top_ring.restrict_to(&ring_v, xi)?;
        let pi_v = ring_v.project_ex(&res_v)?;
        if pi_v.is_zero() {
            return Ok(out);
        }
        for u in self.ctx.lat.under(v) {
            let mu = self.ctx.lat.moebius(u, v);
            if mu == 0 {
                continue;
            }
            let ring_u = self.ring_for(u);
            let res_u = ring_v.restrict_to(&ring_u, &pi_v)?;
            let term = self.embed(u, &res_u)?;
            let c = BigRational::from_integer(
                (self.ctx.lat.subgroups[u].order as i64 * mu).into(),
            );
            out = out.add(&term.scale(&c));
        }
        Ok(out)
    }

    /// The canonical induction of a class vector, computed over subgroup
    /// class representatives with orbit weights.
    pub fn can(&self, xi: &TVector) -> Result<TVector> {
        let triples = self.triples()?;
        let mut out = TVector::zero(triples.len());
        let g_order = self.ctx.group.order() as i64;
        for v in self.ctx.lat.class_reps() {
            let norm = self.ctx.lat.normalizer(v);
            let index = g_order / self.ctx.lat.subgroups[norm].order as i64;
            let term = self.can_term(v, xi)?;
            out = out.add(&term.scale(&BigRational::from_integer(index.into())));
        }
        Ok(out.scale(&BigRational::new(1.into(), g_order.into())))
    }

    /// The same map computed as the literal double sum over all subgroup
    /// pairs `U <= V`, without grouping by conjugacy; used as an
    /// independent cross-check.
    pub fn can_literal(&self, xi: &TVector) -> Result<TVector> {
        let triples = self.triples()?;
        let mut out = TVector::zero(triples.len());
        let g_order = self.ctx.group.order() as i64;
        for v in 0..self.ctx.lat.count() {
            out = out.add(&self.can_term(v, xi)?);
        }
        Ok(out.scale(&BigRational::new(1.into(), g_order.into())))
    }

    /// Linear section: induces each basis triple back to the top group and
    /// classifies, extended linearly.
    pub fn lin(&self, v: &TVector) -> Result<TVector> {
        let mut out = TVector::zero(self.top_ring.rank()?);
        for (i, coeff) in v.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let img = self.lin_basis(i)?;
            out = out.add(&img.scale(coeff));
        }
        Ok(out)
    }

    fn lin_basis(&self, idx: usize) -> Result<Rc<TVector>> {
        if let Some(v) = self.lin_cache.borrow().get(&idx) {
            return Ok(Rc::clone(v));
        }
        let m = self.triple_module(idx)?;
        let ind = induce(&m, &self.ctx.group, self.ctx.max_dim())?;
        let v = Rc::new(self.top_ring.from_module(&ind)?);
        self.lin_cache.borrow_mut().insert(idx, Rc::clone(&v));
        Ok(v)
    }

    /// Unit: the pair (whole group, trivial class).
    pub fn one(&self) -> Result<TVector> {
        let ring = self.ring_for(self.top_id);
        self.embed(self.top_id, &ring.project_ex(&ring.one()?)?)
    }

    /// Product of two basis triples via double cosets of their subgroups.
    fn basis_product(&self, i: usize, j: usize) -> Result<Rc<Vec<BigRational>>> {
        let key = (i.min(j), i.max(j));
        if let Some(row) = self.mult_cache.borrow().get(&key) {
            return Ok(Rc::clone(row));
        }
        let triples = self.triples()?;
        let (ti, tj) = (&triples[key.0], &triples[key.1]);
        let mi = self.triple_module(key.0)?;
        let mj = self.triple_module(key.1)?;
        let lat = &self.ctx.lat;
        let mut acc = TVector::zero(triples.len());
        for g in lat.double_coset_reps(ti.v_rep, tj.v_rep) {
            let wg = lat.conjugate_subgroup(tj.v_rep, g);
            let d = lat.intersect(ti.v_rep, wg);
            let ring_d = self.ring_for(d);
            let handle_wg = self.ring_for(wg).ctx.group.clone();
            let moved = conjugate_module(&mj, &self.ctx.group, &handle_wg, g, self.ctx.max_dim())?;
            let res_i = restrict(&mi, &ring_d.ctx.group, self.ctx.max_dim())?;
            let res_j = restrict(&moved, &ring_d.ctx.group, self.ctx.max_dim())?;
            let prod = tensor(&res_i, &res_j, self.ctx.max_dim())?;
            let vec = ring_d.from_module(&prod)?;
            let ex = ring_d.project_ex(&vec)?;
            if ex != vec {
                return Err(Error::Internal(
                    "product of inflation-projective classes left the span".into(),
                ));
            }
            acc = acc.add(&self.embed(d, &vec)?);
        }
        let rc = Rc::new(acc.coeffs);
        self.mult_cache.borrow_mut().insert(key, Rc::clone(&rc));
        Ok(rc)
    }

    pub fn multiply(&self, a: &TVector, b: &TVector) -> Result<TVector> {
        let n = self.rank()?;
        let mut out = TVector::zero(n);
        for i in 0..n {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let row = self.basis_product(i, j)?;
                let c = &a.coeffs[i] * &b.coeffs[j];
                for (k, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        out.coeffs[k] += &c * x;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn multiply_cyc(&self, a: &[CycElem], b: &[CycElem]) -> Result<Vec<CycElem>> {
        let n = self.rank()?;
        let cyc = self.ctx.cyc();
        let mut out = vec![cyc.zero(); n];
        for i in 0..n {
            if cyc.is_zero(&a[i]) {
                continue;
            }
            for j in 0..n {
                if cyc.is_zero(&b[j]) {
                    continue;
                }
                let row = self.basis_product(i, j)?;
                let c = cyc.mul(&a[i], &b[j]);
                for (k, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        let term = cyc.mul(&c, &cyc.from_rational(x.clone()));
                        out[k] = cyc.add(&out[k], &term);
                    }
                }
            }
        }
        Ok(out)
    }

    // ---- evaluation points and idempotents of the induction target ----

    /// Orbit classes of second-family points over all subgroup classes.
    pub fn kpoints(&self) -> Result<Rc<Vec<KPoint>>> {
        if let Some(k) = self.kpoints.get() {
            return Ok(Rc::clone(k));
        }
        let names = self.ctx.class_names().to_vec();
        let mut out = Vec::new();
        let mut orbit_of = HashMap::new();
        for rep in self.ctx.lat.class_reps() {
            let v_class = self.class_index(rep);
            let ring = self.ring_for(rep);
            let jpts = ring.jpoints()?;
            let handle = ring.ctx.group.clone();
            let jindex: HashMap<(SubId, ElemId), usize> = jpts
                .iter()
                .enumerate()
                .map(|(i, j)| ((j.kernel, j.elem), i))
                .collect();
            let mut actions = Vec::new();
            for n in self.outer_normalizer_gens(rep) {
                let conj_local = |e_loc: ElemId| -> ElemId {
                    let g = self
                        .ctx
                        .group
                        .id_of(handle.perm(e_loc))
                        .expect("subgroup element in ambient group");
                    let cg = self.ctx.group.conj(n, g);
                    handle
                        .id_of(self.ctx.group.perm(cg))
                        .expect("normalizer keeps the subgroup stable")
                };
                let mut perm = Vec::with_capacity(jpts.len());
                for jp in jpts.iter() {
                    let l_elems: Vec<ElemId> = {
                        let mut v: Vec<ElemId> = ring.ctx.lat.subgroups[jp.kernel]
                            .elems
                            .iter()
                            .map(|&e| conj_local(e))
                            .collect();
                        v.sort();
                        v
                    };
                    let l2 = ring
                        .ctx
                        .lat
                        .by_elements(&l_elems)
                        .ok_or_else(|| Error::Internal("conjugated kernel not found".into()))?;
                    let lift = jp.qmap.section[jp.elem as usize];
                    let moved = conj_local(lift);
                    let target = jpts
                        .iter()
                        .find(|j2| j2.kernel == l2)
                        .ok_or_else(|| Error::Internal("no point with conjugated kernel".into()))?;
                    let q_id = target.qmap.proj[moved as usize];
                    let qg = &target.qmap.group;
                    let rep_elem = qg.conjugacy_classes()[qg.class_of(q_id)][0];
                    let idx = *jindex
                        .get(&(l2, rep_elem))
                        .ok_or_else(|| Error::Internal("conjugated point missing".into()))?;
                    perm.push(idx);
                }
                actions.push(perm);
            }
            for orbit in orbit_partition(jpts.len(), &actions) {
                let tag = if orbit.len() > 1 {
                    format!("*{}", orbit.len())
                } else {
                    String::new()
                };
                let label = format!("[{}; {}{}]", names[v_class], jpts[orbit[0]].label, tag);
                for &j in &orbit {
                    orbit_of.insert((v_class, j), out.len());
                }
                out.push(KPoint { v_class, v_rep: rep, orbit, label });
            }
        }
        let rc = Rc::new(out);
        let _ = self.kpoints.set(Rc::clone(&rc));
        let _ = self.jpoint_orbit.set(orbit_of);
        Ok(rc)
    }

    /// Value of an evaluation point on a basis triple: sum over cosets
    /// `gW` with `U <= gWg^-1` of the second-family value on the
    /// transported and restricted module.
    fn kvalue_on_triple(&self, kp: &KPoint, t_idx: usize) -> Result<CycElem> {
        let cyc = self.ctx.cyc().clone();
        let triples = self.triples()?;
        let t = &triples[t_idx];
        let lat = &self.ctx.lat;
        if lat.subgroups[kp.v_rep].order > lat.subgroups[t.v_rep].order {
            return Ok(cyc.zero());
        }
        let ring_u = self.ring_for(kp.v_rep);
        let jpts = ring_u.jpoints()?;
        let jp = &jpts[kp.orbit[0]];
        let m = self.triple_module(t_idx)?;
        let mut acc = cyc.zero();
        for g in lat.left_coset_reps(self.top_id, t.v_rep) {
            let wg = lat.conjugate_subgroup(t.v_rep, g);
            if !lat.is_leq(kp.v_rep, wg) {
                continue;
            }
            let handle_wg = self.ring_for(wg).ctx.group.clone();
            let moved = conjugate_module(&m, &self.ctx.group, &handle_wg, g, self.ctx.max_dim())?;
            let res = restrict(&moved, &ring_u.ctx.group, self.ctx.max_dim())?;
            acc = cyc.add(&acc, &ring_u.jspecies_value(jp, &res)?);
        }
        Ok(acc)
    }

    /// Square table of evaluation points against basis triples.
    pub fn kspecies_matrix(&self) -> Result<Vec<Vec<CycElem>>> {
        let kps = self.kpoints()?;
        let n = self.rank()?;
        if kps.len() != n {
            return Err(Error::Internal(format!(
                "induction-target species table is not square: {} points, {} triples",
                kps.len(),
                n
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for kp in kps.iter() {
            let mut row = Vec::with_capacity(n);
            for t in 0..n {
                row.push(self.kvalue_on_triple(kp, t)?);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn kspecies_apply(&self, k_idx: usize, v: &TVector) -> Result<CycElem> {
        let kps = self.kpoints()?;
        let cyc = self.ctx.cyc().clone();
        let mut acc = cyc.zero();
        for (t, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let val = self.kvalue_on_triple(&kps[k_idx], t)?;
            acc = cyc.add(&acc, &cyc.mul(&cyc.from_rational(c.clone()), &val));
        }
        Ok(acc)
    }

    /// Idempotents of the induction target dual to the evaluation points;
    /// coefficients over the triple basis.
    pub fn kidempotents(&self) -> Result<Vec<Vec<CycElem>>> {
        let s = self.kspecies_matrix()?;
        let n = s.len();
        let cyc = self.ctx.cyc();
        let mat = Mat::from_rows(cyc.as_ref(), s);
        let inv = inverse_checked(cyc.as_ref(), &mat)?;
        let mut out = vec![vec![cyc.zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                out[j][i] = inv.row(i)[j].clone();
            }
        }
        Ok(out)
    }

    /// Maps an evaluation point of the top ring (vertex class `P`, class
    /// `s` of the normalizer quotient) to the point of the induction
    /// target with subgroup generated by `P` and a coprime-order lift of
    /// `s`, kernel `P` and class the image of the lift.
    pub fn lift_point(&self, pt: &SpeciesPoint) -> Result<usize> {
        let p = self.ctx.p();
        let vds = self.ctx.vertex_data()?;
        let vd = &vds[pt.vd_index];
        // Coprime-order lift of the class representative into the
        // normalizer.
        let raw = vd.nq.section[pt.elem as usize];
        let o = vd.norm.elem_order(raw);
        let mut ppow = 1u32;
        while o % (ppow * p) == 0 {
            ppow *= p;
        }
        let rest = o / ppow;
        let mut k = 0u32;
        while !(k % ppow == 0 && (rest == 1 || k % rest == 1)) {
            k += 1;
            if k > o {
                return Err(Error::Internal("no coprime-order lift exponent".into()));
            }
        }
        let lifted = pow_elem(&vd.norm, raw, k);
        let g = self
            .ctx
            .group
            .id_of(vd.norm.perm(lifted))
            .expect("normalizer element in ambient group");
        // Subgroup generated by P and the lift.
        let mut seed = self.ctx.lat.subgroups[vd.p_class].elems.clone();
        seed.push(g);
        let v_elems = self.ctx.group.closure(&seed);
        let v_id = self
            .ctx
            .lat
            .by_elements(&v_elems)
            .ok_or_else(|| Error::Internal("generated subgroup not in lattice".into()))?;
        // Transport the pair (P, lift) to the class representative.
        let rep = self.ctx.lat.rep_of(v_id);
        let c = self.ctx.lat.conjugator_to_rep(v_id);
        let ring = self.ring_for(rep);
        let handle = ring.ctx.group.clone();
        let to_local = |e: ElemId| -> Result<ElemId> {
            let cg = self.ctx.group.conj(c, e);
            handle
                .id_of(self.ctx.group.perm(cg))
                .ok_or_else(|| Error::Internal("transport left the representative".into()))
        };
        let mut l_elems = Vec::new();
        for &e in &self.ctx.lat.subgroups[vd.p_class].elems {
            l_elems.push(to_local(e)?);
        }
        l_elems.sort();
        let l_id = ring
            .ctx
            .lat
            .by_elements(&l_elems)
            .ok_or_else(|| Error::Internal("transported kernel not in lattice".into()))?;
        let t_local = to_local(g)?;
        let jpts = ring.jpoints()?;
        let target = jpts
            .iter()
            .position(|j| {
                if j.kernel != l_id {
                    return false;
                }
                let q_id = j.qmap.proj[t_local as usize];
                let qg = &j.qmap.group;
                qg.conjugacy_classes()[qg.class_of(q_id)][0] == j.elem
            })
            .ok_or_else(|| Error::Internal("lifted point not found".into()))?;
        self.kpoints()?;
        let orbit_of = self.jpoint_orbit.get().expect("built with kpoints");
        Ok(*orbit_of
            .get(&(self.class_index(rep), target))
            .expect("orbit map covers all points"))
    }

    // ---- restriction and transport ----

    /// Restriction to the induction target of a subgroup: Mackey sum over
    /// double cosets.  `sub` must be the structure of a subgroup handle of
    /// the same ambient group, given by its lattice id `h` here.
    pub fn restrict_to(&self, sub: &Calt, h: SubId, v: &TVector) -> Result<TVector> {
        let triples = self.triples()?;
        let lat = &self.ctx.lat;
        let sub_group = &sub.ctx.group;
        let mut out = TVector::zero(sub.rank()?);
        for (i, coeff) in v.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let t = &triples[i];
            let m = self.triple_module(i)?;
            for g in lat.double_coset_reps(h, t.v_rep) {
                let wg = lat.conjugate_subgroup(t.v_rep, g);
                let d = lat.intersect(h, wg);
                let handle_wg = self.ring_for(wg).ctx.group.clone();
                let moved =
                    conjugate_module(&m, &self.ctx.group, &handle_wg, g, self.ctx.max_dim())?;
                // Identify `d` inside the subgroup's own lattice.
                let d_sub_elems: Vec<ElemId> = {
                    let mut v: Vec<ElemId> = lat.subgroups[d]
                        .elems
                        .iter()
                        .map(|&e| {
                            sub_group
                                .id_of(self.ctx.group.perm(e))
                                .expect("intersection lies in the subgroup")
                        })
                        .collect();
                    v.sort();
                    v
                };
                let d_sub = sub
                    .ctx
                    .lat
                    .by_elements(&d_sub_elems)
                    .ok_or_else(|| Error::Internal("intersection not in subgroup lattice".into()))?;
                let ring_d = sub.ring_for(d_sub);
                let res = restrict(&moved, &ring_d.ctx.group, self.ctx.max_dim())?;
                let vec = ring_d.from_module(&res)?;
                let ex = ring_d.project_ex(&vec)?;
                if ex != vec {
                    return Err(Error::Internal(
                        "restriction of an inflation-projective class left the span".into(),
                    ));
                }
                out = out.add(&sub.embed(d_sub, &vec)?.scale(coeff));
            }
        }
        Ok(out)
    }

    /// Transport along a group isomorphism with `iso.dst` the ambient
    /// group of `self` and `iso.src` the ambient group of `dst`.
    pub fn isogate_to(&self, dst: &Calt, iso: &IsoMap, v: &TVector) -> Result<TVector> {
        assert!(Rc::ptr_eq(&iso.dst, &self.ctx.group));
        assert!(Rc::ptr_eq(&iso.src, &dst.ctx.group));
        let triples = self.triples()?;
        let mut out = TVector::zero(dst.rank()?);
        for (i, coeff) in v.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let t = &triples[i];
            let m = self.triple_module(i)?;
            let src_handle = self.ring_for(t.v_rep).ctx.group.clone();
            // Preimage subgroup on the dst side.
            let mut pre: Vec<ElemId> = self.ctx.lat.subgroups[t.v_rep]
                .elems
                .iter()
                .map(|&e| iso.inv[e as usize])
                .collect();
            pre.sort();
            let v_dst = dst
                .ctx
                .lat
                .by_elements(&pre)
                .ok_or_else(|| Error::Internal("image subgroup not in lattice".into()))?;
            let dst_ring = dst.ring_for(v_dst);
            let dst_handle = dst_ring.ctx.group.clone();
            // Small isomorphism between the subgroup handles.
            let mut small_map = Vec::with_capacity(dst_handle.order());
            for e in 0..dst_handle.order() as ElemId {
                let g_dstside = dst
                    .ctx
                    .group
                    .id_of(dst_handle.perm(e))
                    .expect("subgroup element in its ambient group");
                let g_selfside = iso.apply(g_dstside);
                small_map.push(
                    src_handle
                        .id_of(self.ctx.group.perm(g_selfside))
                        .expect("isomorphism respects the subgroup"),
                );
            }
            let small = IsoMap::new(&dst_handle, &src_handle, small_map)?;
            let moved = isogate(&m, &small, self.ctx.max_dim())?;
            let vec = dst_ring.from_module(&moved)?;
            out = out.add(&dst.embed(v_dst, &vec)?.scale(coeff));
        }
        Ok(out)
    }

    /// Lattice id of the whole group.
    pub fn top_id(&self) -> SubId {
        self.top_id
    }
}

/// Inverse with a clear error instead of a panic.
fn inverse_checked(
    cyc: &crate::cyclo::CycField,
    mat: &Mat<crate::cyclo::CycField>,
) -> Result<Mat<crate::cyclo::CycField>> {
    mat.inverse(cyc)
        .ok_or_else(|| Error::Internal("induction-target species table is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_group;
    use crate::config::RunConfig;
    use crate::context::CtxStore;
    use crate::module::perm_module;

    fn calt_for(name: &str, p: u32) -> (Rc<CtxStore>, Calt) {
        let g = builtin_group(name, 512).unwrap();
        let (store, ctx) = CtxStore::open(&g, p, RunConfig::default()).unwrap();
        let ring = Rc::new(TRing::new(&ctx));
        (store, Calt::new(&ctx, &ring))
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn c2_triples_and_canonical_map() {
        let (_s, calt) = calt_for("C2", 2);
        assert_eq!(calt.rank().unwrap(), 3);
        let labels = calt.labels().unwrap();
        assert_eq!(labels, vec!["[1, (1, P1)]", "[C2, (1, P1)]", "[C2, (C2, P1)]"]);
        // Both classes are inflation-projective, so the canonical map sends
        // each to its pair at the full group.
        let ring = &calt.top_ring;
        let reg = TVector::basis(2, 0);
        let triv = TVector::basis(2, 1);
        assert_eq!(calt.can(&reg).unwrap().coeffs, vec![rat(0), rat(1), rat(0)]);
        assert_eq!(calt.can(&triv).unwrap().coeffs, vec![rat(0), rat(0), rat(1)]);
        // Section recovers the original vectors.
        assert_eq!(calt.lin(&calt.can(&reg).unwrap()).unwrap(), reg);
        assert_eq!(calt.lin(&calt.can(&triv).unwrap()).unwrap(), triv);
        // Unit of the target ring.
        let one = calt.one().unwrap();
        assert_eq!(one.coeffs, vec![rat(0), rat(0), rat(1)]);
        let x = calt.can(&ring.one().unwrap()).unwrap();
        assert_eq!(calt.multiply(&one, &x).unwrap(), x);
    }

    #[test]
    fn c2xc2_counts_and_consistency() {
        let (_s, calt) = calt_for("C2xC2", 2);
        assert_eq!(calt.rank().unwrap(), 12);
        let kps = calt.kpoints().unwrap();
        assert_eq!(kps.len(), 12);
        // Literal and orbit-weighted sums agree exactly.
        let reg = calt
            .top_ring
            .from_module(
                &perm_module(&calt.ctx.group, calt.ctx.field(), &[0], "F[G]", 64).unwrap(),
            )
            .unwrap();
        let a = calt.can(&reg).unwrap();
        let b = calt.can_literal(&reg).unwrap();
        assert_eq!(a, b);
        assert_eq!(calt.lin(&a).unwrap(), reg);
        // Idempotents of the target are orthogonal and sum to the unit.
        let es = calt.kidempotents().unwrap();
        let cyc = calt.ctx.cyc().clone();
        let mut total = vec![cyc.zero(); 12];
        for e in &es {
            for (i, x) in e.iter().enumerate() {
                total[i] = cyc.add(&total[i], x);
            }
        }
        let one = calt.one().unwrap();
        for i in 0..12 {
            assert_eq!(cyc.as_rational(&total[i]).unwrap(), one.coeffs[i]);
        }
        for i in 0..es.len() {
            let sq = calt.multiply_cyc(&es[i], &es[i]).unwrap();
            assert_eq!(sq, es[i], "idempotent {} squares to itself", i);
        }
        let prod = calt.multiply_cyc(&es[0], &es[5]).unwrap();
        assert!(prod.iter().all(|e| cyc.is_zero(e)));
    }

    #[test]
    fn sl23_counterexample_two_thirds() {
        let (_s, calt) = calt_for("SL23", 3);
        assert_eq!(calt.rank().unwrap(), 19);
        // The 4-dimensional twist with vertex C3.
        let y = TVector::basis(5, 3);
        let can_y = calt.can(&y).unwrap();
        let labels = calt.labels().unwrap();
        let q8x = labels
            .iter()
            .position(|l| l == "[Q8, (1, P5)]")
            .expect("pair (Q8, 2-dimensional class) present");
        assert_eq!(can_y.coeffs[q8x], BigRational::new(2.into(), 3.into()));
        // Not integral, but integral away from 3.
        assert!(!can_y.is_integral());
        assert!(can_y.is_p_integral(3));
        // The section still recovers the class.
        assert_eq!(calt.lin(&can_y).unwrap(), y);
        // Support property: every triple in the support restricts from the
        // class vector of Y at that subgroup.
        let triples = calt.triples().unwrap();
        for (t_idx, c) in can_y.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = &triples[t_idx];
            let ring_v = calt.ring_for(t.v_rep);
            let res = calt.top_ring.restrict_to(&ring_v, &y).unwrap();
            let pi = ring_v.project_ex(&res).unwrap();
            let pp_to_qx = ring_v.ctx.pp_to_qx().unwrap().to_vec();
            let hit = pi.coeffs.iter().enumerate().any(|(pp, cc)| {
                !cc.is_zero() && pp_to_qx[pp].map(|q| t.orbit.contains(&q)).unwrap_or(false)
            });
            assert!(hit, "support property fails at {}", t.label);
        }
    }

    #[test]
    fn sl23_exprojectives_are_fixed() {
        let (_s, calt) = calt_for("SL23", 3);
        let flags = calt.top_ring.exprojective_flags().unwrap();
        let pp_to_qx = calt.top_ring.ctx.pp_to_qx().unwrap().to_vec();
        let triples = calt.triples().unwrap();
        let top_class = calt.ctx.lat.subgroups[calt.top_id()].class;
        for (i, &ex) in flags.iter().enumerate() {
            if !ex {
                continue;
            }
            let v = TVector::basis(5, i);
            let cv = calt.can(&v).unwrap();
            // Exactly one nonzero coefficient: 1 at (G, class of the module).
            let support: Vec<usize> = (0..cv.coeffs.len())
                .filter(|&k| !cv.coeffs[k].is_zero())
                .collect();
            assert_eq!(support.len(), 1);
            let t = &triples[support[0]];
            assert_eq!(cv.coeffs[support[0]], rat(1));
            assert_eq!(t.v_class, top_class);
            let qx_expect = pp_to_qx[i].unwrap();
            assert!(t.orbit.contains(&qx_expect));
        }
    }

    #[test]
    fn sl23_species_lift_identity() {
        let (_s, calt) = calt_for("SL23", 3);
        let ring = &calt.top_ring;
        let pts = ring.species_points().unwrap();
        // Sample vectors: the twist class and a permutation module class.
        let c4 = calt
            .ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| calt.ctx.lat.subgroups[s].order == 4)
            .unwrap();
        let pm = ring
            .from_module(
                &perm_module(
                    &calt.ctx.group,
                    calt.ctx.field(),
                    &calt.ctx.lat.subgroups[c4].elems,
                    "F[G/C4]",
                    64,
                )
                .unwrap(),
            )
            .unwrap();
        let samples = vec![TVector::basis(5, 3), pm];
        for xi in &samples {
            let can_xi = calt.can(xi).unwrap();
            for pt in &pts {
                let lhs = calt
                    .kspecies_apply(calt.lift_point(pt).unwrap(), &can_xi)
                    .unwrap();
                let rhs = ring.species_apply(pt, xi).unwrap();
                assert_eq!(lhs, rhs, "lift identity at {}", pt.label);
            }
        }
    }

    #[test]
    fn sl23_restriction_compatibility() {
        let g = builtin_group("SL23", 512).unwrap();
        let (store, ctx) = CtxStore::open(&g, 3, RunConfig::default()).unwrap();
        let ring = Rc::new(TRing::new(&ctx));
        let calt = Calt::new(&ctx, &ring);
        let c6 = ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| ctx.lat.subgroups[s].order == 6)
            .unwrap();
        let sub_ctx = store.ctx(&ctx.sub_handle(c6));
        let sub_ring = Rc::new(TRing::new(&sub_ctx));
        let sub_calt = Calt::new(&sub_ctx, &sub_ring);
        // The twist class again.
        let y = TVector::basis(5, 3);
        let lhs = calt
            .restrict_to(&sub_calt, c6, &calt.can(&y).unwrap())
            .unwrap();
        let res_y = ring.restrict_to(&sub_ring, &y).unwrap();
        let rhs = sub_calt.can(&res_y).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn c2xc2_iso_equivariance() {
        // The swap of the two direct factors.
        let g = builtin_group("C2xC2", 512).unwrap();
        let (store, ctx) = CtxStore::open(&g, 2, RunConfig::default()).unwrap();
        let ring = Rc::new(TRing::new(&ctx));
        let calt = Calt::new(&ctx, &ring);
        // Build the automorphism exchanging the generators.
        let a = ctx.group.generators()[0].clone();
        let b = ctx.group.generators()[1].clone();
        let ia = ctx.group.id_of(&a).unwrap();
        let ib = ctx.group.id_of(&b).unwrap();
        let iab = ctx.group.mul(ia, ib);
        let mut map = vec![0 as ElemId; 4];
        map[ctx.group.identity() as usize] = ctx.group.identity();
        map[ia as usize] = ib;
        map[ib as usize] = ia;
        map[iab as usize] = iab;
        let iso = IsoMap::new(&ctx.group, &ctx.group, map).unwrap();
        let _ = &store;
        // Transport a permutation-module class along the iso on both sides.
        let sub = ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| {
                ctx.lat.subgroups[s].order == 2 && ctx.lat.subgroups[s].elems.contains(&ia)
            })
            .unwrap();
        let m = perm_module(
            &ctx.group,
            ctx.field(),
            &ctx.lat.subgroups[sub].elems,
            "F[G/A]",
            64,
        )
        .unwrap();
        let v = ring.from_module(&m).unwrap();
        let via_t = ring.transport(&ring, &iso, &v).unwrap();
        let lhs = calt.can(&via_t).unwrap();
        let rhs = calt.isogate_to(&calt, &iso, &calt.can(&v).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        // The transported vector is genuinely different (the two order-2
        // subgroups are swapped) but the map commutes.
        assert_ne!(v, via_t);
    }
}
