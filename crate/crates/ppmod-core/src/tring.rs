//! The trivial-source representation ring of a group at a prime: free
//! abelian group on the classified indecomposable p-permutation modules,
//! with multiplication induced by tensor product, plus induction,
//! restriction, transport along isomorphisms, and two families of ring
//! homomorphisms to the cyclotomic field ("species") with their dual
//! idempotent bases.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num::{BigRational, One, Zero};

use crate::context::{class_elem_labels, GroupCtx, SpeciesPoint};
use crate::cyclo::CycElem;
use crate::matrix::Field;
use crate::group::{ElemId, IsoMap, QuotientMap};
use crate::lattice::SubId;
use crate::matrix::Mat;
use crate::module::{induce, isogate, restrict, trivial_module, Module};
use crate::{Error, Result};

/// An element of the representation ring with rational coefficients over
/// the basis of indecomposable p-permutation classes.
#[derive(Clone, Debug, PartialEq)]
pub struct TVector {
    pub coeffs: Vec<BigRational>,
}

impl TVector {
    pub fn zero(rank: usize) -> TVector {
        TVector { coeffs: vec![BigRational::zero(); rank] }
    }

    pub fn basis(rank: usize, i: usize) -> TVector {
        let mut v = TVector::zero(rank);
        v.coeffs[i] = BigRational::one();
        v
    }

    pub fn add(&self, other: &TVector) -> TVector {
        TVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TVector) -> TVector {
        TVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> TVector {
        TVector { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// All coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// All coefficient denominators are powers of the given prime.
    pub fn is_p_integral(&self, p: u32) -> bool {
        self.coeffs.iter().all(|c| {
            let mut d = c.denom().clone();
            let p = num::BigInt::from(p);
            while (&d % &p).is_zero() {
                d = d / &p;
            }
            d == num::BigInt::from(1) || d == num::BigInt::from(-1)
        })
    }
}

/// An evaluation point of the second species family: a normal subgroup `L`
/// generated by its p-elements together with a p-regular class of `G/L`.
pub struct JPoint {
    pub kernel: SubId,
    pub qmap: Rc<QuotientMap>,
    /// Class representative in the quotient group.
    pub elem: ElemId,
    pub label: String,
}

/// The representation ring of the context group, with cached tensor
/// structure constants.
pub struct TRing {
    pub ctx: Rc<GroupCtx>,
    mult: RefCell<HashMap<(usize, usize), Rc<Vec<i64>>>>,
}

impl TRing {
    pub fn new(ctx: &Rc<GroupCtx>) -> TRing {
        TRing { ctx: Rc::clone(ctx), mult: RefCell::new(HashMap::new()) }
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.ctx.pp_classes()?.len())
    }

    pub fn labels(&self) -> Result<Vec<String>> {
        Ok(self.ctx.pp_classes()?.iter().map(|c| c.label.clone()).collect())
    }

    /// The class vector of a module.
    pub fn from_module(&self, m: &Rc<Module>) -> Result<TVector> {
        let rank = self.rank()?;
        let mut v = TVector::zero(rank);
        for (i, c) in self.ctx.classify(m)? {
            v.coeffs[i] = BigRational::from_integer(c.into());
        }
        Ok(v)
    }

    /// The unit: class of the trivial module.
    pub fn one(&self) -> Result<TVector> {
        self.from_module(&trivial_module(&self.ctx.group, self.ctx.field()))
    }

    /// Total dimension of a (virtual) class vector.
    pub fn dim_of(&self, v: &TVector) -> Result<BigRational> {
        let pps = self.ctx.pp_classes()?;
        let mut d = BigRational::zero();
        for (i, c) in v.coeffs.iter().enumerate() {
            d += c * BigRational::from_integer((pps[i].module.dim as i64).into());
        }
        Ok(d)
    }

    /// Structure constants of basis product `i * j` (cached, symmetric).
    pub fn structure(&self, i: usize, j: usize) -> Result<Rc<Vec<i64>>> {
        let key = (i.min(j), i.max(j));
        if let Some(row) = self.mult.borrow().get(&key) {
            return Ok(Rc::clone(row));
        }
        let pps = self.ctx.pp_classes()?;
        let prod = crate::module::tensor(
            &pps[key.0].module,
            &pps[key.1].module,
            self.ctx.max_dim(),
        )?;
        let mut row = vec![0i64; pps.len()];
        for (k, c) in self.ctx.classify(&prod)? {
            row[k] = c as i64;
        }
        let rc = Rc::new(row);
        self.mult.borrow_mut().insert(key, Rc::clone(&rc));
        Ok(rc)
    }

    pub fn multiply(&self, a: &TVector, b: &TVector) -> Result<TVector> {
        let rank = self.rank()?;
        let mut out = TVector::zero(rank);
        for i in 0..rank {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..rank {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let row = self.structure(i, j)?;
                let c = &a.coeffs[i] * &b.coeffs[j];
                for (k, n) in row.iter().enumerate() {
                    if *n != 0 {
                        out.coeffs[k] += &c * BigRational::from_integer((*n).into());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplication for vectors with cyclotomic coefficients (used to
    /// check idempotent identities).
    pub fn multiply_cyc(&self, a: &[CycElem], b: &[CycElem]) -> Result<Vec<CycElem>> {
        let rank = self.rank()?;
        let cyc = self.ctx.cyc();
        let mut out = vec![cyc.zero(); rank];
        for i in 0..rank {
            if cyc.is_zero(&a[i]) {
                continue;
            }
            for j in 0..rank {
                if cyc.is_zero(&b[j]) {
                    continue;
                }
                let row = self.structure(i, j)?;
                let c = cyc.mul(&a[i], &b[j]);
                for (k, n) in row.iter().enumerate() {
                    if *n != 0 {
                        let term = cyc.mul(&c, &cyc.from_rational(BigRational::from_integer((*n).into())));
                        out[k] = cyc.add(&out[k], &term);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Flags marking basis classes whose vertex acts trivially.
    pub fn exprojective_flags(&self) -> Result<Vec<bool>> {
        Ok(self.ctx.pp_to_qx()?.iter().map(|h| h.is_some()).collect())
    }

    /// Projection onto the span of the inflation-projective classes,
    /// killing the other basis classes.
    pub fn project_ex(&self, v: &TVector) -> Result<TVector> {
        let flags = self.exprojective_flags()?;
        Ok(TVector {
            coeffs: v
                .coeffs
                .iter()
                .zip(&flags)
                .map(|(c, keep)| if *keep { c.clone() } else { BigRational::zero() })
                .collect(),
        })
    }

    /// Linear extension of module induction from a subgroup ring.
    pub fn induce_from(&self, sub: &TRing, v: &TVector) -> Result<TVector> {
        let sub_pps = sub.ctx.pp_classes()?;
        let mut out = TVector::zero(self.rank()?);
        for (i, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ind = induce(&sub_pps[i].module, &self.ctx.group, self.ctx.max_dim())?;
            let img = self.from_module(&ind)?;
            out = out.add(&img.scale(c));
        }
        Ok(out)
    }

    /// Linear extension of module restriction to a subgroup ring.
    pub fn restrict_to(&self, sub: &TRing, v: &TVector) -> Result<TVector> {
        let pps = self.ctx.pp_classes()?;
        let mut out = TVector::zero(sub.rank()?);
        for (i, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let res = restrict(&pps[i].module, &sub.ctx.group, self.ctx.max_dim())?;
            let img = sub.from_module(&res)?;
            out = out.add(&img.scale(c));
        }
        Ok(out)
    }

    /// Transport along a group isomorphism (contravariant: classes of the
    /// iso source map to classes of the iso target ring `dst` when
    /// `iso.src == dst.group`).
    pub fn transport(&self, dst: &TRing, iso: &IsoMap, v: &TVector) -> Result<TVector> {
        let pps = self.ctx.pp_classes()?;
        let mut out = TVector::zero(dst.rank()?);
        for (i, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let moved = isogate(&pps[i].module, iso, self.ctx.max_dim())?;
            let img = dst.from_module(&moved)?;
            out = out.add(&img.scale(c));
        }
        Ok(out)
    }

    // ---- first species family: (vertex class, class of the normalizer
    // quotient) ----

    pub fn species_points(&self) -> Result<Vec<SpeciesPoint>> {
        self.ctx.species_points()
    }

    /// Species value at a point, extended linearly to class vectors.
    pub fn species_apply(&self, pt: &SpeciesPoint, v: &TVector) -> Result<CycElem> {
        let pps = self.ctx.pp_classes()?;
        let cyc = self.ctx.cyc();
        let mut acc = cyc.zero();
        for (i, c) in v.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let val = self.ctx.species_value(&pps[i].module, pt)?;
            acc = cyc.add(&acc, &cyc.mul(&cyc.from_rational(c.clone()), &val));
        }
        Ok(acc)
    }

    /// The square species table: rows indexed by evaluation points, columns
    /// by basis classes.
    pub fn species_matrix(&self) -> Result<Vec<Vec<CycElem>>> {
        let pts = self.species_points()?;
        let pps = self.ctx.pp_classes()?;
        if pts.len() != pps.len() {
            return Err(Error::Internal(format!(
                "species table is not square: {} points, {} classes",
                pts.len(),
                pps.len()
            )));
        }
        let mut rows = Vec::with_capacity(pts.len());
        for pt in &pts {
            let mut row = Vec::with_capacity(pps.len());
            for pp in pps.iter() {
                row.push(self.ctx.species_value(&pp.module, pt)?);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Primitive idempotents of the ring over the cyclotomic field, dual to
    /// the species: entry `[i]` is the coefficient vector (over the class
    /// basis) of the idempotent on which species `i` is 1 and the others 0.
    pub fn idempotents(&self) -> Result<Vec<Vec<CycElem>>> {
        let s = self.species_matrix()?;
        let n = s.len();
        let cyc = self.ctx.cyc();
        let mat = Mat::from_rows(cyc.as_ref(), s);
        let inv = mat
            .inverse(cyc.as_ref())
            .ok_or_else(|| Error::Internal("species table is singular".into()))?;
        // Column j of the inverse is the idempotent dual to point j.
        let mut out = vec![vec![cyc.zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                out[j][i] = inv.row(i)[j].clone();
            }
        }
        Ok(out)
    }

    // ---- second species family: (normal subgroup generated by its
    // p-elements, class of the quotient); these separate the
    // inflation-projective classes ----

    pub fn jpoints(&self) -> Result<Vec<JPoint>> {
        let qxs = self.ctx.q_classes()?;
        let mut out = Vec::new();
        let mut seen: Vec<SubId> = Vec::new();
        for q in qxs.iter() {
            if seen.contains(&q.kernel) {
                continue;
            }
            seen.push(q.kernel);
            let reps = q.qmap.group.p_regular_class_reps(self.ctx.p());
            let labels = class_elem_labels(&q.qmap.group, &reps);
            for (e, elabel) in reps.into_iter().zip(labels) {
                let label = format!(
                    "({}; {})",
                    self.ctx.class_name_of(q.kernel),
                    elabel
                );
                out.push(JPoint {
                    kernel: q.kernel,
                    qmap: Rc::clone(&q.qmap),
                    elem: e,
                    label,
                });
            }
        }
        Ok(out)
    }

    /// Value of the second-family point on a module: zero unless the point's
    /// subgroup acts trivially, else the lifted trace of the point's class
    /// on the module viewed over the quotient.
    pub fn jspecies_value(&self, pt: &JPoint, m: &Rc<Module>) -> Result<CycElem> {
        let cyc = self.ctx.cyc();
        let ker = m.kernel_of_action();
        let l_elems = &self.ctx.lat.subgroups[pt.kernel].elems;
        if !l_elems.iter().all(|e| ker.binary_search(e).is_ok()) {
            return Ok(cyc.zero());
        }
        // The action factors through the quotient: reuse the generator
        // matrices, which are parallel to the projected generators.
        let deflated = Module::new(
            Rc::clone(&pt.qmap.group),
            Rc::clone(&m.field),
            m.dim,
            m.gen_mats.clone(),
            format!("{}~def", m.label),
            self.ctx.max_dim(),
        )?;
        Ok(deflated.brauer_value(pt.elem, cyc))
    }

    /// Square table of the second species family over the
    /// inflation-projective classes; also returns the basis-class indices
    /// of the columns.
    pub fn jspecies_matrix(&self) -> Result<(Vec<JPoint>, Vec<usize>, Vec<Vec<CycElem>>)> {
        let pts = self.jpoints()?;
        let flags = self.exprojective_flags()?;
        let cols: Vec<usize> = (0..flags.len()).filter(|&i| flags[i]).collect();
        if pts.len() != cols.len() {
            return Err(Error::Internal(format!(
                "second species table is not square: {} points, {} classes",
                pts.len(),
                cols.len()
            )));
        }
        let pps = self.ctx.pp_classes()?;
        let mut rows = Vec::with_capacity(pts.len());
        for pt in &pts {
            let mut row = Vec::with_capacity(cols.len());
            for &j in &cols {
                row.push(self.jspecies_value(pt, &pps[j].module)?);
            }
            rows.push(row);
        }
        Ok((pts, cols, rows))
    }

    /// Idempotents of the span of the inflation-projective classes, dual to
    /// the second species family; coefficients are over that class subset
    /// (second return value of `jspecies_matrix`).
    pub fn jidempotents(&self) -> Result<(Vec<JPoint>, Vec<usize>, Vec<Vec<CycElem>>)> {
        let (pts, cols, s) = self.jspecies_matrix()?;
        let n = s.len();
        let cyc = self.ctx.cyc();
        let mat = Mat::from_rows(cyc.as_ref(), s);
        let inv = mat
            .inverse(cyc.as_ref())
            .ok_or_else(|| Error::Internal("second species table is singular".into()))?;
        let mut out = vec![vec![cyc.zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                out[j][i] = inv.row(i)[j].clone();
            }
        }
        Ok((pts, cols, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_group;
    use crate::config::RunConfig;
    use crate::context::CtxStore;
    use crate::module::perm_module;

    fn ring_for(name: &str, p: u32) -> TRing {
        let g = builtin_group(name, 512).unwrap();
        let (_store, ctx) = CtxStore::open(&g, p, RunConfig::default()).unwrap();
        TRing::new(&ctx)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn c2_ring_and_species() {
        let ring = ring_for("C2", 2);
        assert_eq!(ring.rank().unwrap(), 2);
        let labels = ring.labels().unwrap();
        assert_eq!(labels, vec!["(1, P1)", "(C2, P1)"]);
        // Regular module squared: F[C2] (x) F[C2] = 2 F[C2].
        let row = ring.structure(0, 0).unwrap();
        assert_eq!(row.as_slice(), &[2, 0]);
        // Species table [[2,1],[0,1]]: dimensions on the first row, fixed
        // points on the second.
        let cyc = ring.ctx.cyc().clone();
        let s = ring.species_matrix().unwrap();
        let as_int: Vec<Vec<BigRational>> = s
            .iter()
            .map(|r| r.iter().map(|e| cyc.as_rational(e).unwrap()).collect())
            .collect();
        assert_eq!(as_int, vec![vec![rat(2), rat(1)], vec![rat(0), rat(1)]]);
        // Dual idempotents: (1/2)[FC2] and [F] - (1/2)[FC2].
        let es = ring.idempotents().unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(cyc.as_rational(&es[0][0]).unwrap(), half);
        assert_eq!(cyc.as_rational(&es[0][1]).unwrap(), rat(0));
        assert_eq!(cyc.as_rational(&es[1][0]).unwrap(), -half);
        assert_eq!(cyc.as_rational(&es[1][1]).unwrap(), rat(1));
        // Idempotent identities under the ring multiplication.
        for i in 0..2 {
            for j in 0..2 {
                let prod = ring.multiply_cyc(&es[i], &es[j]).unwrap();
                let expect = if i == j { es[i].clone() } else { vec![cyc.zero(); 2] };
                assert_eq!(prod, expect);
            }
        }
    }

    #[test]
    fn one_is_identity() {
        let ring = ring_for("S3", 2);
        let one = ring.one().unwrap();
        let g = &ring.ctx.group;
        let m = perm_module(g, ring.ctx.field(), &[0], "F[S3]", 64).unwrap();
        let v = ring.from_module(&m).unwrap();
        assert_eq!(ring.multiply(&one, &v).unwrap(), v);
        assert_eq!(ring.dim_of(&v).unwrap(), rat(6));
    }

    #[test]
    fn species_are_multiplicative() {
        let ring = ring_for("SL23", 3);
        let ctx = &ring.ctx;
        let cyc = ctx.cyc().clone();
        let c4 = ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| ctx.lat.subgroups[s].order == 4)
            .unwrap();
        let a = ring
            .from_module(
                &perm_module(&ctx.group, ctx.field(), &ctx.lat.subgroups[c4].elems, "F[G/C4]", 64)
                    .unwrap(),
            )
            .unwrap();
        let b = ring.one().unwrap().add(&a);
        let ab = ring.multiply(&a, &b).unwrap();
        for pt in ring.species_points().unwrap() {
            let va = ring.species_apply(&pt, &a).unwrap();
            let vb = ring.species_apply(&pt, &b).unwrap();
            let vab = ring.species_apply(&pt, &ab).unwrap();
            assert_eq!(vab, cyc.mul(&va, &vb), "at {}", pt.label);
        }
    }

    #[test]
    fn sl23_idempotents_orthogonal() {
        let ring = ring_for("SL23", 3);
        let cyc = ring.ctx.cyc().clone();
        let es = ring.idempotents().unwrap();
        assert_eq!(es.len(), 5);
        for i in 0..es.len() {
            let sq = ring.multiply_cyc(&es[i], &es[i]).unwrap();
            assert_eq!(sq, es[i], "idempotent {} squares to itself", i);
            for j in 0..i {
                let prod = ring.multiply_cyc(&es[i], &es[j]).unwrap();
                assert!(prod.iter().all(|e| cyc.is_zero(e)), "{} * {} = 0", i, j);
            }
        }
    }

    #[test]
    fn sl23_second_species() {
        let ring = ring_for("SL23", 3);
        let cyc = ring.ctx.cyc().clone();
        let (pts, cols, s) = ring.jspecies_matrix().unwrap();
        let labels: Vec<&str> = pts.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, vec!["(1; 1)", "(1; 2)", "(1; 4)", "(SL23; 1)"]);
        assert_eq!(cols, vec![0, 1, 2, 4]);
        // The trivial module (kernel pair (G, P1), last column) evaluates
        // to 1 everywhere.
        for row in &s {
            assert_eq!(cyc.as_rational(&row[3]).unwrap(), rat(1));
        }
        // Points with subgroup G kill the faithful projective classes.
        assert_eq!(cyc.as_rational(&s[3][0]).unwrap(), rat(0));
        // Dual idempotents exist (table invertible) and are orthogonal
        // inside the inflation-projective span.
        let (_, cols2, es) = ring.jidempotents().unwrap();
        assert_eq!(cols2, cols);
        let rank = ring.rank().unwrap();
        let embed = |coeffs: &[CycElem]| {
            let mut full = vec![cyc.zero(); rank];
            for (k, &j) in cols.iter().enumerate() {
                full[j] = coeffs[k].clone();
            }
            full
        };
        for i in 0..es.len() {
            let ei = embed(&es[i]);
            let sq = ring.multiply_cyc(&ei, &ei).unwrap();
            assert_eq!(sq, ei);
            for j in 0..i {
                let prod = ring.multiply_cyc(&ei, &embed(&es[j])).unwrap();
                assert!(prod.iter().all(|e| cyc.is_zero(e)));
            }
        }
    }

    #[test]
    fn induction_and_restriction() {
        let g = builtin_group("SL23", 512).unwrap();
        let (store, ctx) = CtxStore::open(&g, 3, RunConfig::default()).unwrap();
        let ring = TRing::new(&ctx);
        let c6 = ctx
            .lat
            .class_reps()
            .into_iter()
            .find(|&s| ctx.lat.subgroups[s].order == 6)
            .unwrap();
        let sub = store.ctx(&ctx.sub_handle(c6));
        let sub_ring = TRing::new(&sub);
        // Induction of the trivial class = class of F[G/C6] = (1,P1) + (C3,P2).
        let ind = ring.induce_from(&sub_ring, &sub_ring.one().unwrap()).unwrap();
        assert_eq!(
            ind.coeffs,
            vec![rat(1), rat(0), rat(0), rat(0), rat(1)]
        );
        // Restriction of a projective class stays projective: supported on
        // vertex-1 classes of C6 (the first two by construction order).
        let st = TVector::basis(ring.rank().unwrap(), 0);
        let res = ring.restrict_to(&sub_ring, &st).unwrap();
        assert_eq!(sub_ring.dim_of(&res).unwrap(), rat(3));
        let sub_pps = sub.pp_classes().unwrap();
        for (i, c) in res.coeffs.iter().enumerate() {
            if !c.is_zero() {
                assert_eq!(sub.lat.subgroups[sub_pps[i].vertex].order, 1);
            }
        }
        // Frobenius-style check: dim of induction multiplies by the index.
        let y = TVector::basis(sub_ring.rank().unwrap(), 2);
        let ind_y = ring.induce_from(&sub_ring, &y).unwrap();
        assert_eq!(
            ring.dim_of(&ind_y).unwrap(),
            rat(4) * sub_ring.dim_of(&y).unwrap()
        );
        assert!(ind_y.is_integral());
    }

    #[test]
    fn projection_to_inflation_projectives() {
        let ring = ring_for("SL23", 3);
        let flags = ring.exprojective_flags().unwrap();
        assert_eq!(flags, vec![true, true, true, false, true]);
        let mut v = TVector::zero(5);
        for i in 0..5 {
            v.coeffs[i] = rat(i as i64 + 1);
        }
        let pv = ring.project_ex(&v).unwrap();
        assert_eq!(pv.coeffs, vec![rat(1), rat(2), rat(3), rat(0), rat(5)]);
        // Projecting twice changes nothing.
        assert_eq!(ring.project_ex(&pv).unwrap(), pv);
    }

    #[test]
    fn integrality_helpers() {
        let half = BigRational::new(1.into(), 2.into());
        let third = BigRational::new(1.into(), 3.into());
        let v = TVector { coeffs: vec![half, rat(2)] };
        assert!(!v.is_integral());
        assert!(v.is_p_integral(2));
        assert!(!v.is_p_integral(3));
        let w = TVector { coeffs: vec![third] };
        assert!(w.is_p_integral(3));
        assert!(!w.is_p_integral(2));
    }
}
