//! Verification battery for a loaded (group, prime) pair.
//!
//! Each check re-derives one structural identity of the classification, the
//! section/retraction pair between the representation ring and the cofixed
//! induction target, their species and dual-basis idempotents, or the
//! integrality of the rational coefficients.  A mathematical failure is
//! reported as a failed [`Check`] rather than a panic, so callers can
//! aggregate outcomes into reports and exit codes.

use std::cell::OnceCell;
use std::collections::HashSet;
use std::rc::Rc;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::builtins::builtin_group;
use crate::calt::Calt;
use crate::config::RunConfig;
use crate::context::{CtxStore, GroupCtx};
use crate::cyclo::{CycElem, CycField};
use crate::field::{is_prime, Fq};
use crate::group::{automorphisms, ElemId, Group, IsoMap};
use crate::lattice::SubId;
use crate::matrix::{Field, Mat};
use crate::module::{perm_module, restrict, trivial_module, Module};
use crate::tring::{JPoint, TRing, TVector};
use crate::{Error, Result};

/// Outcome of a single verification check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Check {
        Check { name: name.into(), pass, detail }
    }
}

/// Runs a check body, converting a hard error into a failed check so the
/// rest of the battery still runs.
fn guard(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    match f() {
        Ok(c) => c,
        Err(e) => Check::new(name, false, format!("errored: {e}")),
    }
}

/// A minimal generating set of the automorphism group, selected greedily
/// from the full enumeration by closing the generated set under
/// composition.  Equivariance statements verified on these generators
/// extend to every automorphism.
pub fn automorphism_generators(g: &Rc<Group>) -> Vec<IsoMap> {
    let autos = automorphisms(g);
    let n = g.order();
    let identity: Vec<ElemId> = (0..n as ElemId).collect();
    let mut generated: HashSet<Vec<ElemId>> = HashSet::new();
    generated.insert(identity);
    let mut gens: Vec<IsoMap> = Vec::new();
    for a in autos {
        if generated.contains(&a.map) {
            continue;
        }
        gens.push(a);
        loop {
            let snapshot: Vec<Vec<ElemId>> = generated.iter().cloned().collect();
            let mut grew = false;
            for m in &snapshot {
                for gen in &gens {
                    let comp: Vec<ElemId> = m.iter().map(|&x| gen.map[x as usize]).collect();
                    if generated.insert(comp) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
    gens
}

/// Whether the integer column span of `cols` is the full lattice `Z^r`.
///
/// Column-style Hermite reduction: for each row a pivot column is reduced
/// to the gcd of the remaining entries in that row; the span is everything
/// exactly when every pivot is a unit.
fn integer_span_full(mut cols: Vec<Vec<BigInt>>, r: usize) -> bool {
    for row in 0..r {
        loop {
            let mut jmin: Option<usize> = None;
            for j in row..cols.len() {
                if cols[j][row].is_zero() {
                    continue;
                }
                match jmin {
                    None => jmin = Some(j),
                    Some(k) => {
                        if cols[j][row].abs() < cols[k][row].abs() {
                            jmin = Some(j);
                        }
                    }
                }
            }
            let Some(jmin) = jmin else {
                return false; // no pivot in this row: rank deficient
            };
            cols.swap(row, jmin);
            let mut reduced = true;
            for j in row + 1..cols.len() {
                if cols[j][row].is_zero() {
                    continue;
                }
                let q = &cols[j][row] / &cols[row][row];
                if !q.is_zero() {
                    for i in 0..r {
                        let s = &q * &cols[row][i];
                        cols[j][i] -= s;
                    }
                }
                if !cols[j][row].is_zero() {
                    reduced = false;
                }
            }
            if reduced {
                break;
            }
        }
        if cols[row][row].abs() != BigInt::one() {
            return false;
        }
    }
    true
}

/// Dimension of the submodule generated by `v` under the generator action.
fn spin_dim(f: &Fq, gens: &[Mat<Fq>], v: Vec<u32>) -> usize {
    let d = v.len();
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    let insert = |basis: &mut Vec<Vec<u32>>,
                      pivots: &mut Vec<usize>,
                      frontier: &mut Vec<Vec<u32>>,
                      mut w: Vec<u32>| {
        for (row, &pv) in pivots.iter().enumerate() {
            if w[pv] != 0 {
                let c = w[pv];
                for i in 0..d {
                    let s = f.mul(&basis[row][i], &c);
                    w[i] = f.sub(&w[i], &s);
                }
            }
        }
        if let Some(pv) = w.iter().position(|&x| x != 0) {
            let inv = f.inv(&w[pv]).expect("nonzero entry");
            for x in w.iter_mut() {
                *x = f.mul(x, &inv);
            }
            basis.push(w.clone());
            pivots.push(pv);
            frontier.push(w);
        }
    };
    insert(&mut basis, &mut pivots, &mut frontier, v);
    while let Some(w) = frontier.pop() {
        if basis.len() == d {
            return d;
        }
        for g in gens {
            let img = g.mul_vec(f, &w);
            insert(&mut basis, &mut pivots, &mut frontier, img);
        }
    }
    basis.len()
}

/// Exhaustive simplicity test by spinning every line of the underlying
/// space; intended for the small module dimensions of this crate.
pub fn module_is_simple(m: &Module) -> bool {
    let d = m.dim;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let f = &*m.field;
    let q = f.q as u64;
    // Enumerate one vector per line: leading coordinate 1 at position
    // `lead`, zeros before, arbitrary entries after.
    for lead in 0..d {
        let tail = d - lead - 1;
        let mut counter = vec![0u32; tail];
        loop {
            let mut v = vec![0u32; d];
            v[lead] = 1;
            for (i, &c) in counter.iter().enumerate() {
                v[lead + 1 + i] = c;
            }
            if spin_dim(f, &m.gen_mats, v) < d {
                return false;
            }
            let mut i = 0;
            loop {
                if i == tail {
                    break;
                }
                counter[i] += 1;
                if (counter[i] as u64) < q {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
            if i == tail {
                break;
            }
        }
    }
    true
}

/// Dual-basis idempotents from a square species matrix: column `i` of the
/// inverse, as a coefficient vector over the basis indexing the columns.
fn dual_columns(cyc: &CycField, rows: &[Vec<CycElem>]) -> Result<Vec<Vec<CycElem>>> {
    let n = rows.len();
    let mat = Mat::from_rows(cyc, rows.to_vec());
    let inv = mat.inverse(cyc).ok_or(Error::Singular)?;
    let mut out = vec![vec![cyc.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[j][i] = inv.row(i)[j].clone();
        }
    }
    Ok(out)
}

fn rows_pairwise_distinct(rows: &[Vec<CycElem>]) -> bool {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[i] == rows[j] {
                return false;
            }
        }
    }
    true
}

/// All state needed to run the battery on one (group, prime) pair.
pub struct Suite {
    pub store: Rc<CtxStore>,
    pub ctx: Rc<GroupCtx>,
    pub ring: Rc<TRing>,
    pub calt: Calt,
    basis_cans: OnceCell<Vec<TVector>>,
    tmat: OnceCell<Vec<Vec<CycElem>>>,
    tidem: OnceCell<Vec<Vec<CycElem>>>,
    jdata: OnceCell<(Vec<JPoint>, Vec<usize>, Vec<Vec<CycElem>>)>,
    jidem: OnceCell<Vec<Vec<CycElem>>>,
    kmat: OnceCell<Vec<Vec<CycElem>>>,
    kidem: OnceCell<Vec<Vec<CycElem>>>,
}

impl Suite {
    pub fn new(group: &Rc<Group>, p: u32, cfg: RunConfig) -> Result<Suite> {
        let (store, ctx) = CtxStore::open(group, p, cfg)?;
        let ring = Rc::new(TRing::new(&ctx));
        let calt = Calt::new(&ctx, &ring);
        Ok(Suite {
            store,
            ctx,
            ring,
            calt,
            basis_cans: OnceCell::new(),
            tmat: OnceCell::new(),
            tidem: OnceCell::new(),
            jdata: OnceCell::new(),
            jidem: OnceCell::new(),
            kmat: OnceCell::new(),
            kidem: OnceCell::new(),
        })
    }

    /// Section images of every basis class, computed once.
    pub fn basis_cans(&self) -> Result<&[TVector]> {
        if self.basis_cans.get().is_none() {
            let rank = self.ring.rank()?;
            let mut v = Vec::with_capacity(rank);
            for i in 0..rank {
                v.push(self.calt.can(&TVector::basis(rank, i))?);
            }
            let _ = self.basis_cans.set(v);
        }
        Ok(self.basis_cans.get().expect("just filled"))
    }

    fn tmatrix(&self) -> Result<&Vec<Vec<CycElem>>> {
        if self.tmat.get().is_none() {
            let _ = self.tmat.set(self.ring.species_matrix()?);
        }
        Ok(self.tmat.get().expect("just filled"))
    }

    fn tidempotents(&self) -> Result<&Vec<Vec<CycElem>>> {
        if self.tidem.get().is_none() {
            let cyc = self.ctx.cyc().clone();
            let _ = self.tidem.set(dual_columns(&cyc, self.tmatrix()?)?);
        }
        Ok(self.tidem.get().expect("just filled"))
    }

    fn jmatrix(&self) -> Result<&(Vec<JPoint>, Vec<usize>, Vec<Vec<CycElem>>)> {
        if self.jdata.get().is_none() {
            let _ = self.jdata.set(self.ring.jspecies_matrix()?);
        }
        Ok(self.jdata.get().expect("just filled"))
    }

    fn jidempotents(&self) -> Result<&Vec<Vec<CycElem>>> {
        if self.jidem.get().is_none() {
            let cyc = self.ctx.cyc().clone();
            let _ = self.jidem.set(dual_columns(&cyc, &self.jmatrix()?.2)?);
        }
        Ok(self.jidem.get().expect("just filled"))
    }

    fn kmatrix(&self) -> Result<&Vec<Vec<CycElem>>> {
        if self.kmat.get().is_none() {
            let _ = self.kmat.set(self.calt.kspecies_matrix()?);
        }
        Ok(self.kmat.get().expect("just filled"))
    }

    fn kidempotents(&self) -> Result<&Vec<Vec<CycElem>>> {
        if self.kidem.get().is_none() {
            let cyc = self.ctx.cyc().clone();
            let _ = self.kidem.set(dual_columns(&cyc, self.kmatrix()?)?);
        }
        Ok(self.kidem.get().expect("just filled"))
    }

    /// The full battery; `literal_sum` additionally cross-checks the
    /// symmetry-reduced section against the literal double sum.
    pub fn run_battery(&self, literal_sum: bool) -> Result<Vec<Check>> {
        self.basis_cans()?;
        let mut out = vec![
            guard("classification_coverage", || self.check_classification_coverage()),
            guard("exprojective_criterion_agreement", || self.check_criterion_agreement()),
            guard("exprojective_tensor_closure", || self.check_tensor_closure()),
            guard("exprojective_restriction_closure", || self.check_restriction_closure()),
            guard("brauer_fixed_point_dimension", || self.check_fixed_points()),
            guard("unit_elements", || self.check_units()),
            guard("section_retraction_identity", || self.check_lin_can()),
            guard("section_fixes_exprojectives", || self.check_fixes_exprojectives()),
            guard("section_restriction_commutes", || self.check_restriction_commutation()),
            guard("section_automorphism_equivariance", || self.check_iso_equivariance()),
            guard("denominators_are_p_powers", || self.check_p_integrality()),
            guard("prime_index_multiplicity_identity", || self.check_prime_index_identity()),
            guard("retraction_is_ring_hom", || self.check_lin_ring_hom()),
            guard("retraction_integer_surjectivity", || self.check_lin_surjective()),
            guard("species_first_family", || self.check_species_first()),
            guard("species_second_family", || self.check_species_second()),
            guard("species_induction_target", || self.check_species_induction()),
            guard("idempotents_first_family", || self.check_idempotents_first()),
            guard("idempotents_second_family", || self.check_idempotents_second()),
            guard("idempotents_induction_target", || self.check_idempotents_induction()),
            guard("idempotent_lift_uniqueness", || self.check_idempotent_lift()),
        ];
        if literal_sum {
            out.push(guard("literal_sum_agreement", || self.check_literal_sum()));
        }
        Ok(out)
    }

    fn perm_module_of(&self, h: SubId) -> Result<Rc<Module>> {
        let elems = self.ctx.lat.subgroups[h].elems.clone();
        let label = format!("F[G/{}]", self.ctx.class_name_of(h));
        perm_module(&self.ctx.group, self.ctx.field(), &elems, label, self.ctx.max_dim())
    }

    pub fn check_classification_coverage(&self) -> Result<Check> {
        let name = "classification_coverage";
        let pps = self.ctx.pp_classes()?;
        let mut covered = vec![false; pps.len()];
        let mut n_perm = 0usize;
        let mut bad = Vec::new();
        for h in self.ctx.lat.class_reps() {
            let m = self.perm_module_of(h)?;
            let cls = self.ctx.classify(&m)?;
            n_perm += 1;
            let mut dim_sum = 0usize;
            for &(i, mult) in &cls {
                covered[i] = true;
                dim_sum += mult * pps[i].module.dim;
            }
            if dim_sum != m.dim {
                bad.push(format!("{}: dims {} != {}", m.label, dim_sum, m.dim));
            }
        }
        let missing: Vec<String> = covered
            .iter()
            .enumerate()
            .filter(|&(_, &c)| !c)
            .map(|(i, _)| pps[i].label.clone())
            .collect();
        if bad.is_empty() && missing.is_empty() {
            Ok(Check::new(
                name,
                true,
                format!(
                    "{} coset modules decompose exactly and cover all {} indecomposable classes",
                    n_perm,
                    pps.len()
                ),
            ))
        } else {
            Ok(Check::new(name, false, format!("missing {:?}; mismatches {:?}", missing, bad)))
        }
    }

    pub fn check_criterion_agreement(&self) -> Result<Check> {
        // `pp_to_qx` internally requires the isomorphism-matching and the
        // vertex-in-kernel criteria to agree on every class, and each
        // inflation-projective class to be hit exactly once.
        let map = self.ctx.pp_to_qx()?;
        let qxs = self.ctx.q_classes()?;
        let hits = map.iter().filter(|o| o.is_some()).count();
        Ok(Check::new(
            "exprojective_criterion_agreement",
            hits == qxs.len(),
            format!(
                "both exprojectivity tests agree on all {} classes; {} inflation-projective",
                map.len(),
                qxs.len()
            ),
        ))
    }

    pub fn check_tensor_closure(&self) -> Result<Check> {
        let name = "exprojective_tensor_closure";
        let flags = self.ring.exprojective_flags()?;
        let ex: Vec<usize> =
            flags.iter().enumerate().filter(|&(_, &f)| f).map(|(i, _)| i).collect();
        let mut pairs = 0usize;
        for (a, &i) in ex.iter().enumerate() {
            for &j in &ex[a..] {
                let row = self.ring.structure(i, j)?;
                pairs += 1;
                for (k, &c) in row.iter().enumerate() {
                    if c != 0 && !flags[k] {
                        return Ok(Check::new(
                            name,
                            false,
                            format!("product of classes {i} and {j} meets non-exprojective {k}"),
                        ));
                    }
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("{pairs} products of exprojective pairs stay exprojective"),
        ))
    }

    pub fn check_restriction_closure(&self) -> Result<Check> {
        let name = "exprojective_restriction_closure";
        let rank = self.ring.rank()?;
        let flags = self.ring.exprojective_flags()?;
        let mut pairs = 0usize;
        for h in self.ctx.lat.class_reps() {
            let sub = self.calt.ring_for(h);
            let sflags = sub.exprojective_flags()?;
            for i in 0..rank {
                if !flags[i] {
                    continue;
                }
                let r = self.ring.restrict_to(&sub, &TVector::basis(rank, i))?;
                pairs += 1;
                for (k, c) in r.coeffs.iter().enumerate() {
                    if !c.is_zero() && !sflags[k] {
                        return Ok(Check::new(
                            name,
                            false,
                            format!(
                                "restriction of class {i} to {} leaves the exprojective span",
                                self.ctx.class_name_of(h)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("{pairs} restrictions of exprojective classes stay exprojective"),
        ))
    }

    pub fn check_fixed_points(&self) -> Result<Check> {
        let name = "brauer_fixed_point_dimension";
        let group = &self.ctx.group;
        let vds = self.ctx.vertex_data()?;
        let top = self.calt.top_id();
        let mut pairs = 0usize;
        for h in self.ctx.lat.class_reps() {
            let m = self.perm_module_of(h)?;
            let helems = &self.ctx.lat.subgroups[h].elems;
            for (vi, vd) in vds.iter().enumerate() {
                let bq = self.ctx.brauer_at(&m, vi)?;
                let p_handle = self.ctx.sub_handle(vd.p_class);
                let pgens: Vec<ElemId> =
                    p_handle.generators().iter().filter_map(|pp| group.id_of(pp)).collect();
                let mut fixed = 0usize;
                for g in self.ctx.lat.left_coset_reps(top, h) {
                    let ginv = group.inverse(g);
                    if pgens
                        .iter()
                        .all(|&u| helems.binary_search(&group.mul(group.mul(ginv, u), g)).is_ok())
                    {
                        fixed += 1;
                    }
                }
                pairs += 1;
                if bq.dim != fixed {
                    return Ok(Check::new(
                        name,
                        false,
                        format!(
                            "{} at {}: Brauer dimension {} != {} fixed cosets",
                            m.label,
                            self.ctx.class_name_of(vd.p_class),
                            bq.dim,
                            fixed
                        ),
                    ));
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("Brauer dimension equals the fixed-coset count on {pairs} pairs"),
        ))
    }

    pub fn check_units(&self) -> Result<Check> {
        let name = "unit_elements";
        let rank = self.ring.rank()?;
        let one_t = self.ring.one()?;
        for j in 0..rank {
            let b = TVector::basis(rank, j);
            if self.ring.multiply(&one_t, &b)? != b {
                return Ok(Check::new(name, false, format!("ring unit fails on class {j}")));
            }
        }
        let crank = self.calt.rank()?;
        let one_c = self.calt.one()?;
        for j in 0..crank {
            let b = TVector::basis(crank, j);
            if self.calt.multiply(&one_c, &b)? != b {
                return Ok(Check::new(name, false, format!("target unit fails on triple {j}")));
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("units act as identity on {rank} classes and {crank} triples"),
        ))
    }

    pub fn check_lin_can(&self) -> Result<Check> {
        let name = "section_retraction_identity";
        let rank = self.ring.rank()?;
        let cans = self.basis_cans()?;
        for i in 0..rank {
            if self.calt.lin(&cans[i])? != TVector::basis(rank, i) {
                return Ok(Check::new(
                    name,
                    false,
                    format!("retraction does not recover basis class {i}"),
                ));
            }
        }
        Ok(Check::new(name, true, format!("retraction recovers all {rank} basis classes")))
    }

    pub fn check_fixes_exprojectives(&self) -> Result<Check> {
        let name = "section_fixes_exprojectives";
        let flags = self.ring.exprojective_flags()?;
        let map = self.ctx.pp_to_qx()?.to_vec();
        let triples = self.calt.triples()?;
        let top = self.calt.top_id();
        let cans = self.basis_cans()?;
        let crank = triples.len();
        let mut count = 0usize;
        for (i, &f) in flags.iter().enumerate() {
            if !f {
                continue;
            }
            let q = map[i].ok_or_else(|| {
                Error::Internal("exprojective class without inflation-projective match".into())
            })?;
            let Some(t) = triples.iter().position(|t| t.v_rep == top && t.orbit.contains(&q))
            else {
                return Ok(Check::new(name, false, format!("no top triple for class {i}")));
            };
            if cans[i] != TVector::basis(crank, t) {
                return Ok(Check::new(
                    name,
                    false,
                    format!("class {i} is not sent to its own top pair"),
                ));
            }
            count += 1;
        }
        Ok(Check::new(
            name,
            true,
            format!("all {count} exprojective classes are fixed"),
        ))
    }

    pub fn check_restriction_commutation(&self) -> Result<Check> {
        let name = "section_restriction_commutes";
        let rank = self.ring.rank()?;
        let cans = self.basis_cans()?;
        let mut pairs = 0usize;
        for h in self.ctx.lat.class_reps() {
            let sub_ring = self.calt.ring_for(h);
            let sub_calt = Calt::new(&sub_ring.ctx, &sub_ring);
            for i in 0..rank {
                let lhs = self.calt.restrict_to(&sub_calt, h, &cans[i])?;
                let res_t = self.ring.restrict_to(&sub_ring, &TVector::basis(rank, i))?;
                let rhs = sub_calt.can(&res_t)?;
                pairs += 1;
                if lhs != rhs {
                    return Ok(Check::new(
                        name,
                        false,
                        format!(
                            "restriction to {} disagrees on class {i}",
                            self.ctx.class_name_of(h)
                        ),
                    ));
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("section commutes with restriction on {pairs} (subgroup, class) pairs"),
        ))
    }

    pub fn check_iso_equivariance(&self) -> Result<Check> {
        let name = "section_automorphism_equivariance";
        let gens = automorphism_generators(&self.ctx.group);
        let rank = self.ring.rank()?;
        let cans = self.basis_cans()?;
        let mut pairs = 0usize;
        for iso in &gens {
            for i in 0..rank {
                let tv = self.ring.transport(&self.ring, iso, &TVector::basis(rank, i))?;
                let Some(j) = (0..rank).find(|&j| tv == TVector::basis(rank, j)) else {
                    return Ok(Check::new(
                        name,
                        false,
                        format!("transport of class {i} is not a basis class"),
                    ));
                };
                let rhs = self.calt.isogate_to(&self.calt, iso, &cans[i])?;
                pairs += 1;
                if cans[j] != rhs {
                    return Ok(Check::new(
                        name,
                        false,
                        format!("equivariance fails on class {i}"),
                    ));
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!(
                "section commutes with {} automorphism generators on {} instances",
                gens.len(),
                pairs
            ),
        ))
    }

    pub fn check_p_integrality(&self) -> Result<Check> {
        let name = "denominators_are_p_powers";
        let p = self.ctx.p();
        let cans = self.basis_cans()?;
        let mut non_integer = 0usize;
        for (i, v) in cans.iter().enumerate() {
            if !v.is_p_integral(p) {
                return Ok(Check::new(
                    name,
                    false,
                    format!("class {i} has a denominator not a power of {p}"),
                ));
            }
            if !v.is_integral() {
                non_integer += 1;
            }
        }
        Ok(Check::new(
            name,
            true,
            format!(
                "all denominators over {} classes are powers of {p} ({non_integer} images non-integral)",
                cans.len()
            ),
        ))
    }

    /// For `U` normal in `V` of prime index different from `p` and each
    /// `V`-fixed inflation-projective class of `U`: the multiplicity of
    /// that class in the projected restriction of a basis class of `V`
    /// equals the multiplicity computed through the projected class vector
    /// of `V` and the restrictions of its inflation-projective classes.
    pub fn check_prime_index_identity(&self) -> Result<Check> {
        let name = "prime_index_multiplicity_identity";
        let p = self.ctx.p();
        let lat = &self.ctx.lat;
        let group = &self.ctx.group;
        let max_dim = self.ctx.max_dim();
        let mut instances = 0usize;
        for v in lat.class_reps() {
            let v_order = lat.subgroups[v].order;
            let v_ring = self.calt.ring_for(v);
            let v_handle = v_ring.ctx.group.clone();
            let vgens: Vec<ElemId> =
                v_handle.generators().iter().filter_map(|pp| group.id_of(pp)).collect();
            let v_rank = v_ring.rank()?;
            let v_qxs = v_ring.ctx.q_classes()?;
            let v_map = v_ring.ctx.pp_to_qx()?.to_vec();
            let v_pp_of_qx: Vec<usize> = (0..v_qxs.len())
                .map(|qi| {
                    v_map
                        .iter()
                        .position(|&o| o == Some(qi))
                        .expect("every inflation-projective class has a source")
                })
                .collect();
            for u in lat.under(v) {
                let u_order = lat.subgroups[u].order;
                if u_order == v_order {
                    continue;
                }
                let idx = (v_order / u_order) as u32;
                if !is_prime(idx) || idx == p {
                    continue;
                }
                if vgens.iter().any(|&w| lat.conjugate_subgroup(u, w) != u) {
                    continue;
                }
                let u_ring = self.calt.ring_for(u);
                let u_handle = u_ring.ctx.group.clone();
                let u_qxs = u_ring.ctx.q_classes()?;
                let u_map = u_ring.ctx.pp_to_qx()?.to_vec();
                let u_pp_of_qx: Vec<usize> = (0..u_qxs.len())
                    .map(|qi| {
                        u_map
                            .iter()
                            .position(|&o| o == Some(qi))
                            .expect("every inflation-projective class has a source")
                    })
                    .collect();
                // V-fixed inflation-projective classes of U.
                let mut fixed = vec![true; u_qxs.len()];
                for &w in &vgens {
                    for (qi, q) in u_qxs.iter().enumerate() {
                        if !fixed[qi] {
                            continue;
                        }
                        let moved = crate::module::conjugate_module(
                            &q.module, group, &u_handle, w, max_dim,
                        )?;
                        let cls = u_ring.ctx.classify(&moved)?;
                        if cls.len() != 1 || cls[0].1 != 1 {
                            return Err(Error::Internal(
                                "conjugate of an indecomposable split".into(),
                            ));
                        }
                        let q2 = u_map[cls[0].0].ok_or_else(|| {
                            Error::Internal("conjugate left the inflation-projective span".into())
                        })?;
                        if q2 != qi {
                            fixed[qi] = false;
                        }
                    }
                }
                if !fixed.iter().any(|&f| f) {
                    continue;
                }
                // Restriction decompositions of the inflation-projective
                // classes of V, computed once per (U, V).
                let mut res_dec = Vec::with_capacity(v_qxs.len());
                for vq in v_qxs.iter() {
                    let r = restrict(&vq.module, &u_handle, max_dim)?;
                    res_dec.push(u_ring.from_module(&r)?);
                }
                let v_pps = v_ring.ctx.pp_classes()?;
                for y in 0..v_rank {
                    let pi_v = v_ring.project_ex(&TVector::basis(v_rank, y))?;
                    let res_y = restrict(&v_pps[y].module, &u_handle, max_dim)?;
                    let pi_u_res = u_ring.project_ex(&u_ring.from_module(&res_y)?)?;
                    for (qi, &is_fixed) in fixed.iter().enumerate() {
                        if !is_fixed {
                            continue;
                        }
                        let lhs = pi_u_res.coeffs[u_pp_of_qx[qi]].clone();
                        let mut rhs = BigRational::zero();
                        for (vj, dec) in res_dec.iter().enumerate() {
                            let c = &pi_v.coeffs[v_pp_of_qx[vj]];
                            if c.is_zero() {
                                continue;
                            }
                            rhs += c * &dec.coeffs[u_pp_of_qx[qi]];
                        }
                        instances += 1;
                        if lhs != rhs {
                            return Ok(Check::new(
                                name,
                                false,
                                format!(
                                    "mismatch at U={}, V={}, class {qi}, basis {y}: {lhs} != {rhs}",
                                    self.ctx.class_name_of(u),
                                    self.ctx.class_name_of(v)
                                ),
                            ));
                        }
                    }
                }
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("multiplicity identity holds on {instances} prime-index instances"),
        ))
    }

    pub fn check_lin_ring_hom(&self) -> Result<Check> {
        let name = "retraction_is_ring_hom";
        let crank = self.calt.rank()?;
        let mut lins = Vec::with_capacity(crank);
        for i in 0..crank {
            lins.push(self.calt.lin(&TVector::basis(crank, i))?);
        }
        let mut pairs = 0usize;
        for i in 0..crank {
            for j in i..crank {
                let prod =
                    self.calt.multiply(&TVector::basis(crank, i), &TVector::basis(crank, j))?;
                let lhs = self.calt.lin(&prod)?;
                let rhs = self.ring.multiply(&lins[i], &lins[j])?;
                pairs += 1;
                if lhs != rhs {
                    return Ok(Check::new(
                        name,
                        false,
                        format!("retraction is not multiplicative on triples {i}, {j}"),
                    ));
                }
            }
        }
        Ok(Check::new(name, true, format!("retraction is multiplicative on {pairs} basis pairs")))
    }

    pub fn check_lin_surjective(&self) -> Result<Check> {
        let name = "retraction_integer_surjectivity";
        let rank = self.ring.rank()?;
        let crank = self.calt.rank()?;
        let mut cols = Vec::with_capacity(crank);
        for i in 0..crank {
            let v = self.calt.lin(&TVector::basis(crank, i))?;
            if !v.is_integral() {
                return Ok(Check::new(name, false, format!("non-integral image of triple {i}")));
            }
            cols.push(v.coeffs.iter().map(|c| c.numer().clone()).collect::<Vec<BigInt>>());
        }
        let full = integer_span_full(cols, rank);
        Ok(Check::new(
            name,
            full,
            format!("integer span of {crank} retraction images covers the rank-{rank} lattice: {full}"),
        ))
    }

    pub fn check_species_first(&self) -> Result<Check> {
        let name = "species_first_family";
        let s = self.tmatrix()?;
        let n = s.len();
        let invertible = self.tidempotents().is_ok();
        let distinct = rows_pairwise_distinct(s);
        Ok(Check::new(
            name,
            invertible && distinct,
            format!(
                "matrix {n}x{n} (points = classes); invertible: {invertible}; rows distinct: {distinct}"
            ),
        ))
    }

    pub fn check_species_second(&self) -> Result<Check> {
        let name = "species_second_family";
        let (pts, cols, rows) = self.jmatrix()?;
        let invertible = self.jidempotents().is_ok();
        let distinct = rows_pairwise_distinct(rows);
        Ok(Check::new(
            name,
            invertible && distinct && pts.len() == cols.len(),
            format!(
                "matrix {}x{} over the exprojective columns; invertible: {invertible}; rows distinct: {distinct}",
                pts.len(),
                cols.len()
            ),
        ))
    }

    pub fn check_species_induction(&self) -> Result<Check> {
        let name = "species_induction_target";
        let s = self.kmatrix()?;
        let n = s.len();
        let invertible = self.kidempotents().is_ok();
        let distinct = rows_pairwise_distinct(s);
        Ok(Check::new(
            name,
            invertible && distinct,
            format!(
                "matrix {n}x{n} (points = triples); invertible: {invertible}; rows distinct: {distinct}"
            ),
        ))
    }

    pub fn check_idempotents_first(&self) -> Result<Check> {
        let name = "idempotents_first_family";
        let cyc = self.ctx.cyc().clone();
        let e = self.tidempotents()?;
        let n = e.len();
        let zero = vec![cyc.zero(); n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.ring.multiply_cyc(&e[i], &e[j])?;
                let expected = if i == j { &e[i] } else { &zero };
                if &prod != expected {
                    return Ok(Check::new(name, false, format!("orthogonality fails at {i}, {j}")));
                }
            }
        }
        let mut sum = zero.clone();
        for ei in e {
            for (k, c) in ei.iter().enumerate() {
                sum[k] = cyc.add(&sum[k], c);
            }
        }
        let one: Vec<CycElem> =
            self.ring.one()?.coeffs.into_iter().map(|c| cyc.from_rational(c)).collect();
        let sums_to_one = sum == one;
        Ok(Check::new(
            name,
            sums_to_one,
            format!("{n} idempotents orthogonal; sum equals the unit: {sums_to_one}"),
        ))
    }

    pub fn check_idempotents_second(&self) -> Result<Check> {
        let name = "idempotents_second_family";
        let cyc = self.ctx.cyc().clone();
        let rank = self.ring.rank()?;
        let (_, cols, _) = self.jmatrix()?;
        let e = self.jidempotents()?;
        let n = e.len();
        // Embed the exprojective coordinates into full class vectors.
        let full: Vec<Vec<CycElem>> = e
            .iter()
            .map(|v| {
                let mut f = vec![cyc.zero(); rank];
                for (k, &c) in cols.iter().enumerate() {
                    f[c] = v[k].clone();
                }
                f
            })
            .collect();
        let zero = vec![cyc.zero(); rank];
        for i in 0..n {
            for j in 0..n {
                let prod = self.ring.multiply_cyc(&full[i], &full[j])?;
                let expected = if i == j { &full[i] } else { &zero };
                if &prod != expected {
                    return Ok(Check::new(name, false, format!("orthogonality fails at {i}, {j}")));
                }
            }
        }
        let mut sum = zero.clone();
        for fi in &full {
            for (k, c) in fi.iter().enumerate() {
                sum[k] = cyc.add(&sum[k], c);
            }
        }
        let triv = trivial_module(&self.ctx.group, self.ctx.field());
        let triv_cls = self.ctx.classify(&triv)?;
        let mut expected_sum = vec![cyc.zero(); rank];
        for &(i, mult) in &triv_cls {
            expected_sum[i] = cyc.from_rational(BigRational::from_integer((mult as i64).into()));
        }
        let sums_to_unit = sum == expected_sum;
        Ok(Check::new(
            name,
            sums_to_unit,
            format!(
                "{n} idempotents orthogonal; sum equals the exprojective unit: {sums_to_unit}"
            ),
        ))
    }

    pub fn check_idempotents_induction(&self) -> Result<Check> {
        let name = "idempotents_induction_target";
        let cyc = self.ctx.cyc().clone();
        let e = self.kidempotents()?;
        let n = e.len();
        let zero = vec![cyc.zero(); n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.calt.multiply_cyc(&e[i], &e[j])?;
                let expected = if i == j { &e[i] } else { &zero };
                if &prod != expected {
                    return Ok(Check::new(name, false, format!("orthogonality fails at {i}, {j}")));
                }
            }
        }
        let mut sum = zero.clone();
        for ei in e {
            for (k, c) in ei.iter().enumerate() {
                sum[k] = cyc.add(&sum[k], c);
            }
        }
        let one: Vec<CycElem> =
            self.calt.one()?.coeffs.into_iter().map(|c| cyc.from_rational(c)).collect();
        let sums_to_one = sum == one;
        Ok(Check::new(
            name,
            sums_to_one,
            format!("{n} idempotents orthogonal; sum equals the unit: {sums_to_one}"),
        ))
    }

    /// Every first-family idempotent is the retraction image of exactly one
    /// primitive idempotent of the induction target, namely the one at the
    /// point predicted by the coprime-order lift.
    pub fn check_idempotent_lift(&self) -> Result<Check> {
        let name = "idempotent_lift_uniqueness";
        let cyc = self.ctx.cyc().clone();
        let pts = self.ring.species_points()?;
        let tid = self.tidempotents()?;
        let kid = self.kidempotents()?;
        let rank = self.ring.rank()?;
        let crank = self.calt.rank()?;
        let mut lins = Vec::with_capacity(crank);
        for i in 0..crank {
            lins.push(self.calt.lin(&TVector::basis(crank, i))?);
        }
        let lin_cyc: Vec<Vec<CycElem>> = kid
            .iter()
            .map(|e| {
                let mut acc = vec![cyc.zero(); rank];
                for (k, c) in e.iter().enumerate() {
                    if cyc.is_zero(c) {
                        continue;
                    }
                    for t in 0..rank {
                        let coeff = cyc.from_rational(lins[k].coeffs[t].clone());
                        acc[t] = cyc.add(&acc[t], &cyc.mul(c, &coeff));
                    }
                }
                acc
            })
            .collect();
        let mut used = HashSet::new();
        for (a, pt) in pts.iter().enumerate() {
            let kappa = self.calt.lift_point(pt)?;
            if !used.insert(kappa) {
                return Ok(Check::new(name, false, format!("lift map repeats point {kappa}")));
            }
            if lin_cyc[kappa] != tid[a] {
                return Ok(Check::new(
                    name,
                    false,
                    format!("lifted idempotent at {} does not retract to its source", pt.label),
                ));
            }
            let hits = lin_cyc.iter().filter(|v| **v == tid[a]).count();
            if hits != 1 {
                return Ok(Check::new(
                    name,
                    false,
                    format!("{hits} primitive idempotents retract to {}", pt.label),
                ));
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("all {} first-family idempotents lift uniquely", pts.len()),
        ))
    }

    pub fn check_literal_sum(&self) -> Result<Check> {
        let name = "literal_sum_agreement";
        let rank = self.ring.rank()?;
        let cans = self.basis_cans()?;
        for i in 0..rank {
            if self.calt.can_literal(&TVector::basis(rank, i))? != cans[i] {
                return Ok(Check::new(
                    name,
                    false,
                    format!("literal double sum disagrees on class {i}"),
                ));
            }
        }
        Ok(Check::new(
            name,
            true,
            format!("symmetry-reduced and literal evaluations agree on all {rank} classes"),
        ))
    }
}

/// Verification corpora by prime.  The `small` corpus picks groups whose
/// structure exercises the prime; `all` is the full built-in list.
pub fn corpus(selector: &str, p: u32) -> Result<Vec<&'static str>> {
    const ALL: [&str; 10] =
        ["C2", "C3", "C4", "C2xC2", "C6", "S3", "D8", "Q8", "A4", "SL23"];
    match selector {
        "small" => Ok(match p {
            2 => vec!["C2", "C4", "C2xC2", "D8", "Q8", "S3", "A4"],
            3 => vec!["C3", "C6", "S3", "Q8", "A4", "SL23"],
            _ => ALL.to_vec(),
        }),
        "all" => Ok(ALL.to_vec()),
        other => Err(Error::BadGroupSpec(format!("unknown corpus `{other}` (use small|all)"))),
    }
}

/// Data extracted by the packaged order-24 counterexample run.
pub struct CounterexampleData {
    /// Index of the distinguished class in the classification.
    pub witness: usize,
    pub witness_label: String,
    pub witness_dim: usize,
    /// Index of the order-8 pair in the induction-target basis.
    pub triple: usize,
    pub triple_label: String,
    /// The exact coefficient at that pair.
    pub coefficient: BigRational,
}

/// Runs the packaged counterexample on an existing order-24 suite at p = 3:
/// locates the unique non-simple non-projective class, computes its section
/// image and pins the exact non-integral coefficient.
pub fn counterexample_on(suite: &Suite) -> Result<(Vec<Check>, Option<CounterexampleData>)> {
    let ctx = &suite.ctx;
    if ctx.group.order() != 24 || ctx.p() != 3 {
        return Err(Error::BadGroupSpec(
            "the packaged counterexample needs the order-24 group at p = 3".into(),
        ));
    }
    let mut out = Vec::new();
    let pps = ctx.pp_classes()?;
    let mut cand = Vec::new();
    for (i, c) in pps.iter().enumerate() {
        if ctx.lat.subgroups[c.vertex].order == 1 {
            continue; // projective
        }
        if !module_is_simple(&c.module) {
            cand.push(i);
        }
    }
    let unique = cand.len() == 1 && pps.len() == 5;
    out.push(Check::new(
        "unique_nonsimple_nonprojective",
        unique,
        format!("{} of {} classes are non-simple and non-projective", cand.len(), pps.len()),
    ));
    if !unique {
        return Ok((out, None));
    }
    let y = cand[0];
    let vx = pps[y].vertex;
    let vtx_ord = ctx.lat.subgroups[vx].order;
    out.push(Check::new(
        "witness_vertex_order_three",
        vtx_ord == 3,
        format!(
            "witness {} (dim {}) has vertex {} of order {vtx_ord}",
            pps[y].label, pps[y].module.dim, ctx.class_name_of(vx)
        ),
    ));
    let expro = ctx.pp_to_qx()?[y].is_some();
    out.push(Check::new(
        "witness_not_exprojective",
        !expro,
        format!("witness inflation-projective: {expro}"),
    ));
    // The order-8 subgroup has a unique 2-dimensional projective class,
    // and away from the prime every projective class is its own simple head.
    let q8 = ctx
        .lat
        .class_reps()
        .into_iter()
        .find(|&s| ctx.lat.subgroups[s].order == 8)
        .ok_or_else(|| Error::Internal("no order-8 subgroup class".into()))?;
    let q8_ring = suite.calt.ring_for(q8);
    let pims = q8_ring.ctx.pim_table()?;
    let dims: Vec<usize> = pims.pims.iter().map(|m| m.dim).collect();
    let twos = dims.iter().filter(|&&d| d == 2).count();
    let all_simple = pims.pims.iter().zip(&pims.mults).all(|(m, &mu)| m.dim == mu);
    out.push(Check::new(
        "unique_two_dimensional_order8_simple",
        twos == 1 && all_simple,
        format!("order-8 projective dims {dims:?}; all simple: {all_simple}"),
    ));
    // The coefficient at the order-8 pair.
    let rank = suite.ring.rank()?;
    let can_y = suite.calt.can(&TVector::basis(rank, y))?;
    let triples = suite.calt.triples()?;
    let mut t_idx = None;
    for (t, tr) in triples.iter().enumerate() {
        if ctx.lat.subgroups[tr.v_rep].order != 8 {
            continue;
        }
        let ring = suite.calt.ring_for(tr.v_rep);
        if ring.ctx.q_classes()?[tr.orbit[0]].module.dim == 2 {
            t_idx = Some(t);
            break;
        }
    }
    let t_idx = t_idx.ok_or_else(|| Error::Internal("no order-8 pair with a 2-dim class".into()))?;
    let c = can_y.coeffs[t_idx].clone();
    let target = BigRational::new(2.into(), 3.into());
    out.push(Check::new(
        "coefficient_two_thirds",
        c == target,
        format!("coefficient at {} is {} (3 x {} = {})", triples[t_idx].label, c, c, &c * BigRational::from_integer(3.into())),
    ));
    out.push(Check::new(
        "integral_only_after_inverting_p",
        !can_y.is_integral() && can_y.is_p_integral(3),
        format!(
            "image integral: {}; integral away from 3: {}",
            can_y.is_integral(),
            can_y.is_p_integral(3)
        ),
    ));
    let back = suite.calt.lin(&can_y)?;
    out.push(Check::new(
        "section_retraction_on_witness",
        back == TVector::basis(rank, y),
        "retraction recovers the witness class".into(),
    ));
    let data = CounterexampleData {
        witness: y,
        witness_label: pps[y].label.clone(),
        witness_dim: pps[y].module.dim,
        triple: t_idx,
        triple_label: triples[t_idx].label.clone(),
        coefficient: c,
    };
    Ok((out, Some(data)))
}

/// Packaged counterexample run from scratch.
pub fn counterexample_checks(cfg: &RunConfig) -> Result<(Vec<Check>, Option<CounterexampleData>)> {
    let group = builtin_group("SL23", cfg.max_order)?;
    let suite = Suite::new(&group, 3, cfg.clone())?;
    counterexample_on(&suite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite(name: &str, p: u32) -> Suite {
        let cfg = RunConfig::default();
        let g = builtin_group(name, cfg.max_order).unwrap();
        Suite::new(&g, p, cfg).unwrap()
    }

    fn assert_all_pass(checks: &[Check]) {
        for c in checks {
            assert!(c.pass, "{} failed: {}", c.name, c.detail);
        }
    }

    #[test]
    fn battery_c2_p2() {
        let s = suite("C2", 2);
        let checks = s.run_battery(true).unwrap();
        assert_eq!(checks.len(), 22);
        assert_all_pass(&checks);
    }

    #[test]
    fn battery_s3_both_primes() {
        for p in [2, 3] {
            let s = suite("S3", p);
            assert_all_pass(&s.run_battery(false).unwrap());
        }
    }

    #[test]
    fn battery_c3_coprime_prime() {
        // Away from the prime everything is projective and the section is
        // integral on every class.
        let s = suite("C3", 2);
        let checks = s.run_battery(false).unwrap();
        assert_all_pass(&checks);
        let integrality = checks
            .iter()
            .find(|c| c.name == "denominators_are_p_powers")
            .unwrap();
        assert!(integrality.detail.contains("(0 images non-integral)"));
    }

    #[test]
    fn automorphism_generators_sizes() {
        // C2xC2 has automorphism group of order 6; two generators suffice
        // and the greedy selection never needs more than the enumeration.
        let g = builtin_group("C2xC2", 64).unwrap();
        let gens = automorphism_generators(&g);
        assert!(!gens.is_empty() && gens.len() <= 2, "got {} generators", gens.len());
        let g = builtin_group("C6", 64).unwrap();
        let gens = automorphism_generators(&g);
        assert_eq!(gens.len(), 1);
    }

    #[test]
    fn integer_span_detects_index() {
        let b = |n: i64| BigInt::from(n);
        // Columns (2,0) and (0,1) span an index-2 sublattice.
        assert!(!integer_span_full(vec![vec![b(2), b(0)], vec![b(0), b(1)]], 2));
        // Adding (1,1) makes the span everything.
        assert!(integer_span_full(
            vec![vec![b(2), b(0)], vec![b(0), b(1)], vec![b(1), b(1)]],
            2
        ));
        // Unimodular pair.
        assert!(integer_span_full(vec![vec![b(3), b(1)], vec![b(5), b(2)]], 2));
    }

    #[test]
    fn simplicity_scan_on_small_modules() {
        let cfg = RunConfig::default();
        let g = builtin_group("S3", cfg.max_order).unwrap();
        let (_, ctx) = CtxStore::open(&g, 3, cfg).unwrap();
        // At p = 3 the classes of S3 include the projective cover of the
        // trivial module (dim 3, not simple) and the sign class (dim 1).
        let pps = ctx.pp_classes().unwrap();
        let dims: Vec<usize> = pps.iter().map(|c| c.module.dim).collect();
        let simple: Vec<bool> = pps.iter().map(|c| module_is_simple(&c.module)).collect();
        for (i, &d) in dims.iter().enumerate() {
            if d == 1 {
                assert!(simple[i], "one-dimensional class must be simple");
            }
            if d == 3 {
                assert!(!simple[i], "projective cover of dim 3 over S3 is not simple");
            }
        }
    }

    #[test]
    fn counterexample_full_run() {
        let (checks, data) = counterexample_checks(&RunConfig::default()).unwrap();
        assert_all_pass(&checks);
        let data = data.expect("witness located");
        assert_eq!(data.coefficient, BigRational::new(2.into(), 3.into()));
        assert_eq!(data.witness_dim, 4);
        assert!(data.triple_label.contains("Q8"));
    }

    #[test]
    fn corpus_selectors() {
        assert_eq!(corpus("small", 2).unwrap().len(), 7);
        assert_eq!(corpus("small", 3).unwrap().len(), 6);
        assert_eq!(corpus("all", 2).unwrap().len(), 10);
        assert!(corpus("tiny", 2).is_err());
    }
}
