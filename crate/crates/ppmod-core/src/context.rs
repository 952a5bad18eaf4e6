//! Computation contexts: a group together with a prime, a splitting field
//! shared across the group and all of its subgroups and subquotients, and
//! lazily built classification data.
//!
//! The classification of indecomposable p-permutation modules is by pairs
//! (vertex class `P`, projective indecomposable of `N_G(P)/P`): the pair is
//! realized by the unique direct summand with vertex `P` of the module
//! induced from the inflation of that projective to `N_G(P)`.
//!
//! The indecomposable modules on which the vertex acts trivially
//! ("inflation-projective" modules) are classified separately by pairs
//! (normal subgroup `K` generated by its own p-elements, projective
//! indecomposable of `G/K`), realized by inflation.  Both classifications
//! are cross-validated against each other.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use crate::config::RunConfig;
use crate::cyclo::{CycElem, CycField};
use crate::field::{build_field, p_prime_part, Fq};
use crate::group::{ElemId, Group, QuotientMap};
use crate::homs::{decompose, is_isomorphic, pim_table, vertex, PimTable};
use crate::lattice::{Lattice, SubId};
use crate::module::{brauer_quotient, inflate, induce, Module};
use crate::names::{disambiguate, group_name};
use crate::{Error, Result};

/// Cache key for contexts: degree and generator list pin down the exact
/// group handle semantics (element ids, generator order).
type CtxKey = (usize, Vec<crate::perm::Perm>);

/// Shares the prime, configuration, field and cyclotomic scalars between the
/// context of a group and the contexts of its subgroups and subquotients.
pub struct CtxStore {
    pub p: u32,
    pub cfg: RunConfig,
    pub field: Rc<Fq>,
    pub cyc: Rc<CycField>,
    ctxs: RefCell<HashMap<CtxKey, Rc<GroupCtx>>>,
}

impl CtxStore {
    /// Entry point: builds the store for a top-level group and prime.  The
    /// field is the smallest `F_q` containing the m-th roots of unity, where
    /// `m` is the p'-part of the group exponent, so it is a splitting field
    /// for the group and all its subquotients.
    pub fn open(group: &Rc<Group>, p: u32, cfg: RunConfig) -> Result<(Rc<CtxStore>, Rc<GroupCtx>)> {
        if !crate::field::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if group.order() > cfg.max_order {
            return Err(Error::OrderCap { order: group.order(), cap: cfg.max_order });
        }
        let m = p_prime_part(group.exponent(), p);
        let field = build_field(p, m)?;
        let cyc = CycField::new(m);
        let store = Rc::new(CtxStore {
            p,
            cfg,
            field,
            cyc,
            ctxs: RefCell::new(HashMap::new()),
        });
        let ctx = store.ctx(group);
        Ok((store, ctx))
    }

    /// The context for a group handle (subgroup or subquotient of the
    /// top-level group), cached.
    pub fn ctx(self: &Rc<Self>, group: &Rc<Group>) -> Rc<GroupCtx> {
        let key: CtxKey = (group.degree(), group.generators().to_vec());
        if let Some(c) = self.ctxs.borrow().get(&key) {
            return Rc::clone(c);
        }
        let ctx = Rc::new(GroupCtx {
            store: Rc::clone(self),
            group: Rc::clone(group),
            lat: Lattice::build(group),
            pims: OnceCell::new(),
            vertex_data: OnceCell::new(),
            pp: OnceCell::new(),
            qx: OnceCell::new(),
            pp_to_qx: OnceCell::new(),
            class_names: OnceCell::new(),
            handles: RefCell::new(HashMap::new()),
        });
        self.ctxs.borrow_mut().insert(key, Rc::clone(&ctx));
        ctx
    }
}

/// One vertex class with its normalizer quotient.
pub struct VertexData {
    /// Class representative of the p-subgroup in the owning lattice.
    pub p_class: SubId,
    /// Normalizer `N = N_G(P)` as a group handle.
    pub norm: Rc<Group>,
    /// Quotient map `N -> N/P`.
    pub nq: Rc<QuotientMap>,
    /// Context of the quotient group `N/P`.
    pub nbar: Rc<GroupCtx>,
}

/// One isomorphism class of indecomposable p-permutation modules.
pub struct PPClass {
    /// Index into `vertex_data()`.
    pub vd_index: usize,
    /// Vertex class representative (in the owning lattice).
    pub vertex: SubId,
    /// Index into the projective table of `N_G(P)/P`.
    pub pim_index: usize,
    /// Realization over the group.
    pub module: Rc<Module>,
    pub label: String,
}

/// One isomorphism class of indecomposable inflation-projective modules:
/// inflation of a projective indecomposable of `G/K` along a normal
/// subgroup `K` that is generated by its own p-elements.
pub struct QClass {
    /// The subgroup `K` (its own lattice id; `K` is normal).
    pub kernel: SubId,
    /// Index into the projective table of `G/K`.
    pub pim_index: usize,
    /// Context of the quotient `G/K` and the projecting map.
    pub quotient: Rc<GroupCtx>,
    pub qmap: Rc<QuotientMap>,
    /// Realization over the group.
    pub module: Rc<Module>,
    pub label: String,
}

/// A character-like evaluation point for p-permutation classes: a vertex
/// class `P` together with a p-regular class of `N_G(P)/P`.  The value on a
/// module is the lifted trace at that class of the Brauer construction of
/// the module at `P`.
pub struct SpeciesPoint {
    pub vd_index: usize,
    /// Class representative element of the quotient group `N_G(P)/P`.
    pub elem: ElemId,
    pub label: String,
}

pub struct GroupCtx {
    pub store: Rc<CtxStore>,
    pub group: Rc<Group>,
    pub lat: Lattice,
    pims: OnceCell<Rc<PimTable>>,
    vertex_data: OnceCell<Rc<Vec<VertexData>>>,
    pp: OnceCell<Rc<Vec<PPClass>>>,
    qx: OnceCell<Rc<Vec<QClass>>>,
    pp_to_qx: OnceCell<Vec<Option<usize>>>,
    class_names: OnceCell<Vec<String>>,
    handles: RefCell<HashMap<SubId, Rc<Group>>>,
}

impl GroupCtx {
    pub fn p(&self) -> u32 {
        self.store.p
    }

    pub fn field(&self) -> &Rc<Fq> {
        &self.store.field
    }

    pub fn cyc(&self) -> &Rc<CycField> {
        &self.store.cyc
    }

    pub fn max_dim(&self) -> usize {
        self.store.cfg.max_dim
    }

    pub fn seed(&self) -> u64 {
        self.store.cfg.seed
    }

    /// Names of the subgroup conjugacy classes, indexed like
    /// `lat.class_reps()`; repeated structure names get letter suffixes.
    pub fn class_names(&self) -> &[String] {
        self.class_names.get_or_init(|| {
            let reps = self.lat.class_reps();
            let names: Vec<String> = reps
                .iter()
                .map(|&s| {
                    let h = self
                        .group
                        .subgroup_group("tmp", &self.lat.subgroups[s].elems);
                    group_name(&h)
                })
                .collect();
            disambiguate(names)
        })
    }

    /// The name of the conjugacy class of an arbitrary subgroup id.
    pub fn class_name_of(&self, s: SubId) -> String {
        let rep = self.lat.rep_of(s);
        let reps = self.lat.class_reps();
        let idx = reps.iter().position(|&r| r == rep).expect("class rep present");
        self.class_names()[idx].clone()
    }

    /// A cached group handle for a subgroup id, named after its class.
    pub fn sub_handle(&self, s: SubId) -> Rc<Group> {
        if let Some(h) = self.handles.borrow().get(&s) {
            return Rc::clone(h);
        }
        let h = self
            .group
            .subgroup_group(self.class_name_of(s), &self.lat.subgroups[s].elems);
        self.handles.borrow_mut().insert(s, Rc::clone(&h));
        h
    }

    /// Projective indecomposables of this group itself.
    pub fn pim_table(&self) -> Result<Rc<PimTable>> {
        if let Some(t) = self.pims.get() {
            return Ok(Rc::clone(t));
        }
        let t = Rc::new(pim_table(
            &self.group,
            self.field(),
            self.cyc(),
            self.seed(),
            self.max_dim(),
        )?);
        let _ = self.pims.set(Rc::clone(&t));
        Ok(t)
    }

    /// Vertex classes (p-subgroup classes in increasing order) with their
    /// normalizer quotients.
    pub fn vertex_data(&self) -> Result<Rc<Vec<VertexData>>> {
        if let Some(v) = self.vertex_data.get() {
            return Ok(Rc::clone(v));
        }
        let mut reps = self.lat.p_subgroup_class_reps(self.p());
        reps.sort_by_key(|&s| (self.lat.subgroups[s].order, s));
        let mut out = Vec::new();
        for p_class in reps {
            let norm_id = self.lat.normalizer(p_class);
            let norm = self.sub_handle(norm_id);
            let kernel_ids: Vec<ElemId> = self.lat.subgroups[p_class]
                .elems
                .iter()
                .map(|&e| {
                    norm.id_of(self.group.perm(e))
                        .expect("subgroup lies in its normalizer")
                })
                .collect();
            let mut sorted_kernel = kernel_ids;
            sorted_kernel.sort();
            let nq = Rc::new(QuotientMap::new(
                &norm,
                &sorted_kernel,
                format!("{}bar", norm.name),
            )?);
            let nbar = self.store.ctx(&nq.group);
            out.push(VertexData { p_class, norm, nq, nbar });
        }
        let rc = Rc::new(out);
        let _ = self.vertex_data.set(Rc::clone(&rc));
        Ok(rc)
    }

    /// The Brauer construction of a module at the p-subgroup class of
    /// `vertex_data()[vd_index]`, as a module over `N_G(P)/P`.
    pub fn brauer_at(&self, m: &Rc<Module>, vd_index: usize) -> Result<Rc<Module>> {
        let vds = self.vertex_data()?;
        let vd = &vds[vd_index];
        brauer_quotient(m, &self.lat, vd.p_class, &vd.norm, &vd.nq, self.max_dim())
    }

    /// Classification of the indecomposable p-permutation modules.
    pub fn pp_classes(&self) -> Result<Rc<Vec<PPClass>>> {
        if let Some(v) = self.pp.get() {
            return Ok(Rc::clone(v));
        }
        let vds = self.vertex_data()?;
        let mut out = Vec::new();
        for (vd_index, vd) in vds.iter().enumerate() {
            let pt = vd.nbar.pim_table()?;
            for pim_index in 0..pt.pims.len() {
                let inflated = inflate(&pt.pims[pim_index], &vd.nq, self.max_dim())?;
                let induced = induce(&inflated, &self.group, self.max_dim())?;
                let parts = decompose(&induced, self.seed())?;
                let mut found: Option<Rc<Module>> = None;
                let mut count = 0usize;
                for part in parts {
                    if vertex(&part, &self.lat)? == vd.p_class {
                        count += 1;
                        found = Some(part);
                    }
                }
                if count != 1 {
                    return Err(Error::Internal(format!(
                        "expected exactly one summand with the prescribed vertex, found {}",
                        count
                    )));
                }
                let module = found.expect("counted above");
                let label = format!(
                    "({}, {})",
                    self.class_name_of(vd.p_class),
                    pt.labels[pim_index]
                );
                out.push(PPClass {
                    vd_index,
                    vertex: vd.p_class,
                    pim_index,
                    module,
                    label,
                });
            }
        }
        let rc = Rc::new(out);
        let _ = self.pp.set(Rc::clone(&rc));
        Ok(rc)
    }

    /// Classification of the indecomposable inflation-projective modules:
    /// pairs (normal subgroup `K` with `K` generated by its p-elements,
    /// projective indecomposable of `G/K`).
    pub fn q_classes(&self) -> Result<Rc<Vec<QClass>>> {
        if let Some(v) = self.qx.get() {
            return Ok(Rc::clone(v));
        }
        let p = self.p();
        let mut out = Vec::new();
        for s in 0..self.lat.count() {
            if !self.lat.is_normal(s) || !self.lat.is_p_residue_free(s, p) {
                continue;
            }
            let qmap = Rc::new(QuotientMap::new(
                &self.group,
                &self.lat.subgroups[s].elems,
                format!("{}/{}", self.group.name, self.class_name_of(s)),
            )?);
            let qctx = self.store.ctx(&qmap.group);
            let pt = qctx.pim_table()?;
            for pim_index in 0..pt.pims.len() {
                let module = inflate(&pt.pims[pim_index], &qmap, self.max_dim())?;
                let label = format!(
                    "({}, {})",
                    self.class_name_of(s),
                    pt.labels[pim_index]
                );
                out.push(QClass {
                    kernel: s,
                    pim_index,
                    quotient: Rc::clone(&qctx),
                    qmap: Rc::clone(&qmap),
                    module,
                    label,
                });
            }
        }
        let rc = Rc::new(out);
        let _ = self.qx.set(Rc::clone(&rc));
        Ok(rc)
    }

    /// For each p-permutation class, the matching inflation-projective class
    /// if there is one.  Cross-validates the two classifications: a class
    /// matches iff its vertex acts trivially on its realization.
    pub fn pp_to_qx(&self) -> Result<&[Option<usize>]> {
        if self.pp_to_qx.get().is_none() {
            let pps = self.pp_classes()?;
            let qxs = self.q_classes()?;
            let mut map = Vec::with_capacity(pps.len());
            for pp in pps.iter() {
                let hit = qxs.iter().position(|q| {
                    q.module.dim == pp.module.dim
                        && is_isomorphic(&q.module, &pp.module, self.seed()).is_some()
                });
                // Independent criterion: the vertex acts trivially.
                let ker = pp.module.kernel_of_action();
                let vertex_elems = &self.lat.subgroups[pp.vertex].elems;
                let vertex_in_kernel = vertex_elems.iter().all(|e| ker.binary_search(e).is_ok());
                if hit.is_some() != vertex_in_kernel {
                    return Err(Error::Internal(format!(
                        "inflation-projective criteria disagree for {}: matched pair {:?}, vertex-in-kernel {}",
                        pp.label, hit, vertex_in_kernel
                    )));
                }
                map.push(hit);
            }
            // Every inflation-projective class must be hit exactly once.
            for (qi, q) in qxs.iter().enumerate() {
                let hits = map.iter().filter(|h| **h == Some(qi)).count();
                if hits != 1 {
                    return Err(Error::Internal(format!(
                        "inflation-projective class {} matched {} p-permutation classes",
                        q.label, hits
                    )));
                }
            }
            let _ = self.pp_to_qx.set(map);
        }
        Ok(self.pp_to_qx.get().expect("just set"))
    }

    /// Decomposes a p-permutation module into classified indecomposables:
    /// returns (class index, multiplicity) pairs sorted by class index.
    /// Fails with `NotPPermutation` if some summand matches no class.
    pub fn classify(&self, m: &Rc<Module>) -> Result<Vec<(usize, usize)>> {
        let pps = self.pp_classes()?;
        let parts = decompose(m, self.seed())?;
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for part in parts {
            let hit = pps.iter().position(|pp| {
                pp.module.dim == part.dim
                    && is_isomorphic(&pp.module, &part, self.seed()).is_some()
            });
            match hit {
                Some(i) => *counts.entry(i).or_insert(0) += 1,
                None => {
                    return Err(Error::NotPPermutation(format!(
                        "indecomposable summand of dimension {} (of {}) has no trivial-source realization",
                        part.dim, m.label
                    )))
                }
            }
        }
        let mut out: Vec<(usize, usize)> = counts.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// The evaluation points for p-permutation classes: one per pair
    /// (vertex class, p-regular class of the normalizer quotient).
    pub fn species_points(&self) -> Result<Vec<SpeciesPoint>> {
        let vds = self.vertex_data()?;
        let mut out = Vec::new();
        for (vd_index, vd) in vds.iter().enumerate() {
            let reps = vd.nbar.group.p_regular_class_reps(self.p());
            let labels = class_elem_labels(&vd.nbar.group, &reps);
            for (e, elabel) in reps.into_iter().zip(labels) {
                let label = format!("({}; {})", self.class_name_of(vd.p_class), elabel);
                out.push(SpeciesPoint { vd_index, elem: e, label });
            }
        }
        Ok(out)
    }

    /// Value of an evaluation point on a module: lifted trace of the class
    /// at the Brauer construction of the module.
    pub fn species_value(&self, m: &Rc<Module>, pt: &SpeciesPoint) -> Result<CycElem> {
        let bq = self.brauer_at(m, pt.vd_index)?;
        Ok(bq.brauer_value(pt.elem, self.cyc()))
    }
}

/// Labels conjugacy-class representatives by element order, with letter
/// suffixes for repeated orders ("1", "2", "3", "3b", ...).
pub fn class_elem_labels(g: &Rc<Group>, reps: &[ElemId]) -> Vec<String> {
    let mut seen: HashMap<u32, usize> = HashMap::new();
    reps.iter()
        .map(|&e| {
            let o = g.elem_order(e);
            let n = seen.entry(o).or_insert(0);
            let label = if *n == 0 {
                format!("{}", o)
            } else {
                format!("{}{}", o, (b'a' + *n as u8) as char)
            };
            *n += 1;
            label
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_group;
    use crate::module::{perm_module, trivial_module};

    fn ctx_for(name: &str, p: u32) -> Rc<GroupCtx> {
        let g = builtin_group(name, 512).unwrap();
        let (_store, ctx) = CtxStore::open(&g, p, RunConfig::default()).unwrap();
        ctx
    }

    #[test]
    fn sl23_field_and_lattice() {
        let ctx = ctx_for("SL23", 3);
        assert_eq!(ctx.field().q, 9);
        assert_eq!(ctx.field().m, 4);
        assert_eq!(ctx.lat.count(), 15);
        assert_eq!(ctx.lat.class_reps().len(), 7);
        let names = ctx.class_names().to_vec();
        assert_eq!(names, vec!["1", "C2", "C3", "C4", "C6", "Q8", "SL23"]);
    }

    #[test]
    fn sl23_pp_classification() {
        let ctx = ctx_for("SL23", 3);
        let pps = ctx.pp_classes().unwrap();
        // 3 projective classes at trivial vertex, trivial module and the
        // 4-dimensional twist at vertex C3.
        assert_eq!(pps.len(), 5);
        let labels: Vec<&str> = pps.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            labels,
            vec!["(1, P1)", "(1, P2)", "(1, P3)", "(C3, P1)", "(C3, P2)"]
        );
        // P1 of C6/C3 = C2 is the sign character (character vector sorts
        // before the trivial one), so (C3, P1) is the 4-dimensional twist
        // and (C3, P2) is the trivial module.
        let dims: Vec<usize> = pps.iter().map(|c| c.module.dim).collect();
        assert_eq!(dims, vec![3, 3, 6, 4, 1]);
    }

    #[test]
    fn sl23_exprojective_classes() {
        let ctx = ctx_for("SL23", 3);
        let qxs = ctx.q_classes().unwrap();
        let labels: Vec<&str> = qxs.iter().map(|c| c.label.as_str()).collect();
        // Kernels: 1 (three projectives of G) and G itself (trivial module).
        assert_eq!(labels, vec!["(1, P1)", "(1, P2)", "(1, P3)", "(SL23, P1)"]);
        let map = ctx.pp_to_qx().unwrap();
        // All classes except Y are inflation-projective.
        assert_eq!(map.iter().filter(|h| h.is_some()).count(), 4);
        assert!(map[3].is_none(), "the 4-dimensional twist is not inflation-projective");
    }

    #[test]
    fn sl23_classify_permutation_module() {
        let ctx = ctx_for("SL23", 3);
        // F[G/C6] = trivial (+) 3-dim simple projective.
        let c6 = ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| ctx.lat.subgroups[s].order == 6)
            .unwrap();
        let m = perm_module(
            &ctx.group,
            ctx.field(),
            &ctx.lat.subgroups[c6].elems,
            "F[G/C6]",
            600,
        )
        .unwrap();
        let classified = ctx.classify(&m).unwrap();
        let pps = ctx.pp_classes().unwrap();
        let pretty: Vec<(String, usize)> = classified
            .iter()
            .map(|&(i, c)| (pps[i].label.clone(), c))
            .collect();
        assert_eq!(
            pretty,
            vec![("(1, P1)".to_string(), 1), ("(C3, P2)".to_string(), 1)]
        );
    }

    #[test]
    fn sl23_species_points() {
        let ctx = ctx_for("SL23", 3);
        let pts = ctx.species_points().unwrap();
        // (1; 1), (1; 2), (1; 4) and (C3; 1), (C3; 2).
        assert_eq!(pts.len(), 5);
        let labels: Vec<&str> = pts.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, vec!["(1; 1)", "(1; 2)", "(1; 4)", "(C3; 1)", "(C3; 2)"]);
        // On the trivial module every point evaluates to 1 (the Brauer
        // construction of the trivial module is trivial at every vertex).
        let triv = trivial_module(&ctx.group, ctx.field());
        for pt in &pts {
            let v = ctx.species_value(&triv, pt).unwrap();
            assert_eq!(ctx.cyc().as_rational(&v).unwrap(), num::BigRational::from_integer(1.into()));
        }
    }

    #[test]
    fn a4_exprojective_count() {
        let ctx = ctx_for("A4", 2);
        assert_eq!(ctx.field().q, 4);
        let qxs = ctx.q_classes().unwrap();
        // Kernels 1 and V4 (A4 is not generated by its 2-elements), three
        // projectives each.
        assert_eq!(qxs.len(), 6);
        let pps = ctx.pp_classes().unwrap();
        // Vertex classes: 1, C2, V4; projectives of quotients: 3 + 1 + 3.
        assert_eq!(pps.len(), 7);
        let map = ctx.pp_to_qx().unwrap();
        assert_eq!(map.iter().filter(|h| h.is_some()).count(), 6);
    }

    #[test]
    fn c2xc2_counts() {
        let ctx = ctx_for("C2xC2", 2);
        assert_eq!(ctx.lat.count(), 5);
        let pps = ctx.pp_classes().unwrap();
        assert_eq!(pps.len(), 5);
        let qxs = ctx.q_classes().unwrap();
        assert_eq!(qxs.len(), 5);
        // Everything is inflation-projective in an abelian p-group.
        assert!(ctx.pp_to_qx().unwrap().iter().all(|h| h.is_some()));
        // F[G] is the (C2xC2, vertex 1) class; F itself has full vertex.
        let pps = ctx.pp_classes().unwrap();
        assert_eq!(pps[0].module.dim, 4);
        assert_eq!(pps[0].label, "(1, P1)");
    }

    #[test]
    fn trivial_group_context() {
        let ctx = ctx_for("trivial", 2);
        let pps = ctx.pp_classes().unwrap();
        assert_eq!(pps.len(), 1);
        assert_eq!(pps[0].module.dim, 1);
        let qxs = ctx.q_classes().unwrap();
        assert_eq!(qxs.len(), 1);
    }
}
