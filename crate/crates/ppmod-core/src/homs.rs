//! Homomorphism spaces, direct-sum decomposition, isomorphism testing,
//! relative projectivity, vertices, and tables of projective
//! indecomposables.
//!
//! `Hom_{F[G]}(M, N)` is computed by spinning: a basis of `M` is grown from
//! a few root vectors by repeatedly applying generator matrices.  A hom is
//! then determined by the images of the roots, and the equivariance
//! conditions for the non-tree edges of the spinning process form a linear
//! system whose kernel is the hom space.
//!
//! Decomposition uses Fitting's lemma: for `c` in `End(M)` and an eigenvalue
//! `lambda`, `M` splits as `ker (c-lambda)^dim  (+)  im (c-lambda)^dim`.
//! The working field is always a splitting field for the group algebras
//! involved (it contains enough roots of unity), so every element of
//! `End(M)` has all its eigenvalues in the field; a candidate therefore
//! either yields a proper split or is certified scalar-plus-nilpotent.
//! If every candidate (basis elements, their pairwise products, and seeded
//! random combinations) is scalar-plus-nilpotent, `M` is declared
//! indecomposable.

use std::rc::Rc;

use crate::config::SplitMix64;
use crate::cyclo::{CycElem, CycField};
use crate::field::Fq;
use crate::group::{ElemId, Group};
use crate::lattice::{Lattice, SubId};
use crate::matrix::{Field, Mat};
use crate::module::{regular_module, restrict, Module};
use crate::{Error, Result};

/// Number of seeded random endomorphism combinations tried while splitting
/// and, for isomorphism testing, invertible combinations tried.
const RANDOM_TRIES: usize = 64;

// ---------------------------------------------------------------------------
// Spinning
// ---------------------------------------------------------------------------

struct Echelon {
    cols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(cols: usize) -> Self {
        Echelon { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Reduces `v` against the stored rows; if a nonzero remainder is left,
    /// normalizes and stores it and returns true.
    fn insert(&mut self, f: &Fq, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = w[p];
            if !f.is_zero(&c) {
                for j in 0..self.cols {
                    let t = f.mul(&c, &self.rows[r][j]);
                    w[j] = f.sub(&w[j], &t);
                }
            }
        }
        if let Some(p) = w.iter().position(|x| !f.is_zero(x)) {
            let inv = f.inv(&w[p]).expect("nonzero field element");
            for x in w.iter_mut() {
                *x = f.mul(x, &inv);
            }
            self.rows.push(w);
            self.pivots.push(p);
            true
        } else {
            false
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

struct SpinData {
    /// Basis vectors of the module, in discovery order.
    vectors: Vec<Vec<u32>>,
    /// `prov[i] = Some((parent, gen))` when vector `i` arose as
    /// `rho(gen) vectors[parent]`; `None` for roots.
    prov: Vec<Option<(usize, usize)>>,
    roots: Vec<usize>,
    /// Pairs `(i, gen)` where `rho(gen) vectors[i]` fell back into the span:
    /// these carry the equivariance constraints.
    nontree: Vec<(usize, usize)>,
}

fn spin(m: &Module) -> SpinData {
    let f = &*m.field;
    let n = m.dim;
    let mut ech = Echelon::new(n);
    let mut data = SpinData {
        vectors: Vec::new(),
        prov: Vec::new(),
        roots: Vec::new(),
        nontree: Vec::new(),
    };
    let mut head = 0;
    let mut next_std = 0;
    while ech.rank() < n {
        // Seed a new root from the first standard vector outside the span.
        while next_std < n {
            let mut e = vec![f.zero(); n];
            e[next_std] = f.one();
            next_std += 1;
            if ech.insert(f, &e) {
                data.roots.push(data.vectors.len());
                data.vectors.push(e);
                data.prov.push(None);
                break;
            }
        }
        // Close under the generator action.
        while head < data.vectors.len() {
            let i = head;
            head += 1;
            for (gi, mat) in m.gen_mats.iter().enumerate() {
                let w = mat.mul_vec(f, &data.vectors[i]);
                if ech.insert(f, &w) {
                    data.vectors.push(w);
                    data.prov.push(Some((i, gi)));
                } else {
                    data.nontree.push((i, gi));
                }
            }
        }
    }
    data
}

/// Basis of the space of `F[G]`-homomorphisms from `m` to `n`, as matrices
/// acting on column vectors (`phi: m -> n`, shape `n.dim x m.dim`).
pub fn hom_basis(m: &Module, n: &Module) -> Vec<Mat<Fq>> {
    assert!(
        std::ptr::eq(&*m.group, &*n.group)
            || (m.group.elements() == n.group.elements()
                && m.group.generators() == n.group.generators()),
        "hom spaces require modules over the same group with the same generator list"
    );
    let f = &*m.field;
    if m.dim == 0 || n.dim == 0 {
        return Vec::new();
    }
    let sp = spin(m);
    let k = sp.roots.len();
    let dn = n.dim;
    let unknowns = k * dn;
    // basis_mat columns are the spin basis vectors; coords(v) = inv * v.
    let mut basis_mat = Mat::zero(f, m.dim, m.dim);
    for (i, v) in sp.vectors.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            basis_mat.set(r, i, *x);
        }
    }
    let binv = basis_mat.inverse(f).expect("spin basis is invertible");

    // c[i]: (dn x unknowns) matrix sending the root-image vector x to the
    // image of the i-th spin basis vector.
    let mut root_index = vec![usize::MAX; sp.vectors.len()];
    for (j, &r) in sp.roots.iter().enumerate() {
        root_index[r] = j;
    }
    let mut c: Vec<Mat<Fq>> = Vec::with_capacity(sp.vectors.len());
    for i in 0..sp.vectors.len() {
        let mat = match sp.prov[i] {
            None => {
                let j = root_index[i];
                let mut sel = Mat::zero(f, dn, unknowns);
                for r in 0..dn {
                    sel.set(r, j * dn + r, f.one());
                }
                sel
            }
            Some((parent, gi)) => n.gen_mats[gi].mul(f, &c[parent]),
        };
        c.push(mat);
    }

    // Equivariance constraints for non-tree edges.
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &(i, gi) in &sp.nontree {
        let w = m.gen_mats[gi].mul_vec(f, &sp.vectors[i]);
        let lambda = binv.mul_vec(f, &w);
        let mut block = n.gen_mats[gi].mul(f, &c[i]);
        // block := rho_N(g) c_i  -  sum_t lambda_t c_t
        for (t, lt) in lambda.iter().enumerate() {
            if f.is_zero(lt) {
                continue;
            }
            for r in 0..dn {
                for col in 0..unknowns {
                    let v = f.mul(lt, c[t].at(r, col));
                    let cur = block.at(r, col);
                    block.set(r, col, f.sub(&cur.clone(), &v));
                }
            }
        }
        for r in 0..dn {
            rows.push(block.row(r).to_vec());
        }
    }
    let constraint = if rows.is_empty() {
        Mat::zero(f, 0, unknowns)
    } else {
        Mat::from_rows(f, rows)
    };
    let kernel = constraint.kernel_basis(f);

    // Each kernel vector x determines phi = V(x) * binv.
    let mut out = Vec::with_capacity(kernel.rows);
    for ki in 0..kernel.rows {
        let x = kernel.row(ki);
        let mut vals = Mat::zero(f, dn, m.dim);
        for (i, ci) in c.iter().enumerate() {
            let col = ci.mul_vec(f, x);
            for (r, y) in col.iter().enumerate() {
                vals.set(r, i, *y);
            }
        }
        let phi = vals.mul(f, &binv);
        out.push(phi);
    }
    if m.dim <= 64 && dn <= 64 {
        for phi in &out {
            for (gi, gm) in m.gen_mats.iter().enumerate() {
                let lhs = phi.mul(f, gm);
                let rhs = n.gen_mats[gi].mul(f, phi);
                assert_eq!(lhs, rhs, "computed hom fails equivariance");
            }
        }
    }
    out
}

/// Basis of the endomorphism algebra of `m`.
pub fn end_basis(m: &Module) -> Vec<Mat<Fq>> {
    hom_basis(m, m)
}

// ---------------------------------------------------------------------------
// Submodules and decomposition
// ---------------------------------------------------------------------------

/// Solves `S X = B` column by column (`S` with full column rank).
fn solve_matrix(f: &Fq, s: &Mat<Fq>, b: &Mat<Fq>) -> Option<Mat<Fq>> {
    let mut out = Mat::zero(f, s.cols, b.cols);
    for j in 0..b.cols {
        let rhs: Vec<u32> = (0..b.rows).map(|r| *b.at(r, j)).collect();
        let x = s.solve(f, &rhs)?;
        for (i, v) in x.iter().enumerate() {
            out.set(i, j, *v);
        }
    }
    Some(out)
}

/// The submodule spanned by the given (independent) row vectors, as a module
/// in its own coordinates.
pub fn submodule(m: &Rc<Module>, basis_rows: &Mat<Fq>) -> Result<Rc<Module>> {
    let f = &*m.field;
    let d = basis_rows.rows;
    let s = basis_rows.transpose();
    let mut gen_mats = Vec::with_capacity(m.gen_mats.len());
    for gm in &m.gen_mats {
        let b = gm.mul(f, &s);
        let x = solve_matrix(f, &s, &b)
            .ok_or_else(|| Error::Internal("span is not closed under the group action".into()))?;
        gen_mats.push(x);
    }
    Module::new(
        Rc::clone(&m.group),
        Rc::clone(&m.field),
        d,
        gen_mats,
        format!("sub({})", m.label),
        m.dim.max(1),
    )
}

enum FittingOutcome {
    /// Proper invariant decomposition: row bases of the two complements.
    Split(Mat<Fq>, Mat<Fq>),
    /// Single eigenvalue: the candidate is scalar plus nilpotent.
    ScalarPlusNilpotent,
    /// Eigenvalue multiplicities do not fill the dimension: an eigenvalue
    /// lies outside the field, contradicting the splitting-field setup.
    BadSpectrum,
}

fn fitting(f: &Fq, c: &Mat<Fq>) -> FittingOutcome {
    let n = c.rows;
    let mut kernels: Vec<Mat<Fq>> = Vec::new();
    let mut total = 0;
    for lam in f.elements() {
        let shifted = c.sub(f, &Mat::identity(f, n).scale(f, &lam));
        let stable = shifted.pow(f, n as u64);
        let ker = stable.kernel_basis(f);
        if ker.rows > 0 {
            total += ker.rows;
            kernels.push(ker);
            if total == n {
                break;
            }
        }
    }
    if total != n {
        return FittingOutcome::BadSpectrum;
    }
    if kernels.len() == 1 {
        return FittingOutcome::ScalarPlusNilpotent;
    }
    let first = kernels.remove(0);
    let refs: Vec<&Mat<Fq>> = kernels.iter().collect();
    let rest = Mat::vstack(f, &refs);
    FittingOutcome::Split(first, rest)
}

/// Splits `m` into indecomposable direct summands (with repetition).
/// Deterministic given the seed.
pub fn decompose(m: &Rc<Module>, seed: u64) -> Result<Vec<Rc<Module>>> {
    if m.dim == 0 {
        return Ok(Vec::new());
    }
    let f = &*m.field;
    let ends = end_basis(m);
    if ends.len() == 1 {
        return Ok(vec![Rc::clone(m)]);
    }
    let identity = Mat::identity(f, m.dim);
    let try_candidate = |c: &Mat<Fq>| -> Result<Option<(Mat<Fq>, Mat<Fq>)>> {
        match fitting(f, c) {
            FittingOutcome::Split(u, w) => Ok(Some((u, w))),
            FittingOutcome::ScalarPlusNilpotent => Ok(None),
            FittingOutcome::BadSpectrum => Err(Error::SplitFailure),
        }
    };
    let mut split: Option<(Mat<Fq>, Mat<Fq>)> = None;
    // Deterministic sweep: basis elements, then pairwise products.
    'outer: {
        for c in &ends {
            if let Some(s) = try_candidate(c)? {
                split = Some(s);
                break 'outer;
            }
        }
        let cap = ends.len().min(40);
        for i in 0..cap {
            for j in 0..cap {
                let prod = ends[i].mul(f, &ends[j]);
                if let Some(s) = try_candidate(&prod)? {
                    split = Some(s);
                    break 'outer;
                }
            }
        }
        // Seeded random combinations.
        let mut rng = SplitMix64::new(seed ^ ((m.dim as u64) << 32) ^ ends.len() as u64);
        for _ in 0..RANDOM_TRIES {
            let mut c = Mat::zero(f, m.dim, m.dim);
            for e in &ends {
                // Field elements are encoded as 0..q-1, so a uniform draw is
                // a uniform field element.
                let r = rng.below(f.q as u64) as u32;
                if !f.is_zero(&r) {
                    c = c.add(f, &e.scale(f, &r));
                }
            }
            if c == identity || c.is_zero_matrix(f) {
                continue;
            }
            if let Some(s) = try_candidate(&c)? {
                split = Some(s);
                break 'outer;
            }
        }
    }
    match split {
        None => Ok(vec![Rc::clone(m)]),
        Some((u_rows, w_rows)) => {
            let u = submodule(m, &u_rows)?;
            let w = submodule(m, &w_rows)?;
            let mut out = decompose(&u, seed.wrapping_add(1))?;
            out.extend(decompose(&w, seed.wrapping_add(2))?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

/// Searches for an invertible equivariant map `m -> n`; returns a witness.
/// For indecomposable modules over a splitting field this is decisive:
/// if an isomorphism exists, some hom basis element is already invertible.
pub fn is_isomorphic(m: &Module, n: &Module, seed: u64) -> Option<Mat<Fq>> {
    if m.dim != n.dim {
        return None;
    }
    if m.dim == 0 {
        return Some(Mat::zero(&*m.field, 0, 0));
    }
    let f = &*m.field;
    let homs = hom_basis(m, n);
    if homs.is_empty() {
        return None;
    }
    for h in &homs {
        if h.inverse(f).is_some() {
            return Some(h.clone());
        }
    }
    let mut rng = SplitMix64::new(seed ^ 0x9e37_79b9_7f4a_7c15 ^ m.dim as u64);
    for _ in 0..RANDOM_TRIES {
        let mut c = Mat::zero(f, n.dim, m.dim);
        for h in &homs {
            let r = rng.below(f.q as u64) as u32;
            if !f.is_zero(&r) {
                c = c.add(f, &h.scale(f, &r));
            }
        }
        if c.inverse(f).is_some() {
            return Some(c);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Relative projectivity and vertices
// ---------------------------------------------------------------------------

/// Relative trace operator on vectorized endomorphisms:
/// `T = sum_t rho(t) (x) transpose(rho(t^-1))` over coset reps `t` of the
/// subgroup, so that `T vec(phi) = vec(sum_t rho(t) phi rho(t)^-1)`
/// (row-major vectorization).
fn trace_operator(m: &Module, sub_elems: &[ElemId]) -> Mat<Fq> {
    let f = &*m.field;
    let n = m.dim;
    let reps = m.group.coset_reps_mod(sub_elems);
    let mut t_op = Mat::zero(f, n * n, n * n);
    for &t in &reps {
        let a = m.act(t);
        let b = m.act(m.group.inverse(t)).transpose();
        t_op = t_op.add(f, &a.kronecker(f, &b));
    }
    t_op
}

/// Higman's criterion: `m` is relatively projective with respect to the
/// subgroup iff the identity lies in the image of the relative trace map on
/// subgroup-equivariant endomorphisms.
pub fn is_relatively_projective(m: &Rc<Module>, sub_elems: &[ElemId]) -> Result<bool> {
    if m.dim == 0 {
        return Ok(true);
    }
    if sub_elems.len() == m.group.order() {
        return Ok(true);
    }
    let f = &*m.field;
    let n = m.dim;
    let t_op = trace_operator(m, sub_elems);
    let id_vec: Vec<u32> = Mat::identity(f, n).data;
    if sub_elems.len() == 1 {
        // Endomorphisms over the trivial subgroup are all matrices, so the
        // image of the trace is the column space of the operator.
        return Ok(t_op.solve(f, &id_vec).is_some());
    }
    let sub_handle = m.group.subgroup_group("H", sub_elems);
    let res = restrict(m, &sub_handle, m.dim.max(1))?;
    let endh = end_basis(&res);
    let mut cols = Mat::zero(f, n * n, endh.len());
    for (j, phi) in endh.iter().enumerate() {
        let img = t_op.mul_vec(f, &phi.data);
        for (r, v) in img.iter().enumerate() {
            cols.set(r, j, *v);
        }
    }
    Ok(cols.solve(f, &id_vec).is_some())
}

/// Vertex of an indecomposable module: the class representative (in the
/// lattice of `m.group`) of a minimal p-subgroup with respect to which `m`
/// is relatively projective.  `lat` must be the subgroup lattice of
/// `m.group`.
pub fn vertex(m: &Rc<Module>, lat: &Lattice) -> Result<SubId> {
    let p = m.field.p;
    let mut reps = lat.p_subgroup_class_reps(p);
    reps.sort_by_key(|&s| (lat.subgroups[s].order, s));
    for s in reps {
        if is_relatively_projective(m, &lat.subgroups[s].elems)? {
            return Ok(s);
        }
    }
    Err(Error::Internal(
        "no relatively projective p-subgroup found (Sylow should always work)".into(),
    ))
}

// ---------------------------------------------------------------------------
// Projective indecomposables
// ---------------------------------------------------------------------------

pub struct PimTable {
    pub group: Rc<Group>,
    pub field: Rc<Fq>,
    /// Representatives of the isomorphism classes of projective
    /// indecomposables, sorted by (dimension, lifted character vector).
    pub pims: Vec<Rc<Module>>,
    /// Multiplicity of each class in the regular module (equals the
    /// dimension of the corresponding simple module).
    pub mults: Vec<usize>,
    pub labels: Vec<String>,
    pub brauer: Vec<Vec<CycElem>>,
}

/// Decomposes the regular module and tabulates the projective
/// indecomposables.  Validates that multiplicities account for the group
/// order and that the number of classes equals the number of p-regular
/// conjugacy classes.
pub fn pim_table(
    group: &Rc<Group>,
    field: &Rc<Fq>,
    cyc: &CycField,
    seed: u64,
    max_dim: usize,
) -> Result<PimTable> {
    let reg = regular_module(group, field, max_dim.max(group.order()))?;
    let parts = decompose(&reg, seed)?;
    let mut classes: Vec<(Rc<Module>, usize)> = Vec::new();
    for part in parts {
        match classes
            .iter_mut()
            .find(|(rep, _)| is_isomorphic(rep, &part, seed).is_some())
        {
            Some((_, count)) => *count += 1,
            None => classes.push((part, 1)),
        }
    }
    let mut keyed: Vec<(usize, Vec<CycElem>, Rc<Module>, usize)> = classes
        .into_iter()
        .map(|(rep, count)| {
            let bv = rep.brauer_vector(cyc);
            (rep.dim, bv, rep, count)
        })
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let total: usize = keyed.iter().map(|(d, _, _, c)| d * c).sum();
    if total != group.order() {
        return Err(Error::Internal(format!(
            "projective multiplicities sum to {} but the group has order {}",
            total,
            group.order()
        )));
    }
    let n_pregular = group.p_regular_class_reps(field.p).len();
    if keyed.len() != n_pregular {
        return Err(Error::Internal(format!(
            "{} projective classes but {} p-regular classes",
            keyed.len(),
            n_pregular
        )));
    }
    let mut pims = Vec::new();
    let mut mults = Vec::new();
    let mut labels = Vec::new();
    let mut brauer = Vec::new();
    for (i, (_, bv, rep, count)) in keyed.into_iter().enumerate() {
        labels.push(format!("P{}", i + 1));
        pims.push(rep);
        mults.push(count);
        brauer.push(bv);
    }
    Ok(PimTable { group: Rc::clone(group), field: Rc::clone(field), pims, mults, labels, brauer })
}

impl PimTable {
    /// Number of composition factors of `m`: the multiplicity of the simple
    /// head of each projective, summed, is `sum_i dim Hom(P_i, m)`.
    pub fn composition_length(&self, m: &Module) -> usize {
        self.pims.iter().map(|p| hom_basis(p, m).len()).sum()
    }

    pub fn is_simple(&self, m: &Module) -> bool {
        self.composition_length(m) == 1
    }

    /// Index of the class of `m` among the projective indecomposables, if
    /// `m` is isomorphic to one of them.
    pub fn match_pim(&self, m: &Module, seed: u64) -> Option<usize> {
        self.pims
            .iter()
            .position(|p| is_isomorphic(p, m, seed).is_some())
    }

    /// Whether `m` is projective: every indecomposable summand matches a
    /// projective indecomposable.
    pub fn is_projective(&self, m: &Rc<Module>, seed: u64) -> Result<bool> {
        for part in decompose(m, seed)? {
            if self.match_pim(&part, seed).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Groups a list of modules into isomorphism classes, returning
/// (representative, multiplicity) pairs in first-seen order.
pub fn iso_classes(parts: &[Rc<Module>], seed: u64) -> Vec<(Rc<Module>, usize)> {
    let mut classes: Vec<(Rc<Module>, usize)> = Vec::new();
    for part in parts {
        match classes
            .iter_mut()
            .find(|(rep, _)| is_isomorphic(rep, part, seed).is_some())
        {
            Some((_, count)) => *count += 1,
            None => classes.push((Rc::clone(part), 1)),
        }
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_group;
    use crate::field::build_field;
    use crate::module::{perm_module, trivial_module};

    fn s3_setup() -> (Rc<Group>, Rc<crate::field::Fq>, Lattice) {
        let g = builtin_group("S3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let lat = Lattice::build(&g);
        (g, f, lat)
    }

    #[test]
    fn hom_dims_between_permutation_modules_count_double_cosets() {
        let (g, f, lat) = s3_setup();
        let c2 = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 2)
            .unwrap();
        let a3 = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 3)
            .unwrap();
        let m2 = perm_module(&g, &f, &lat.subgroups[c2].elems, "F[S3/C2]", 600).unwrap();
        let m3 = perm_module(&g, &f, &lat.subgroups[a3].elems, "F[S3/A3]", 600).unwrap();
        // dim Hom(F[G/H], F[G/K]) = number of (K, H) double cosets.
        assert_eq!(hom_basis(&m2, &m2).len(), 2);
        assert_eq!(hom_basis(&m2, &m3).len(), 1);
        assert_eq!(hom_basis(&m3, &m2).len(), 1);
        assert_eq!(hom_basis(&m3, &m3).len(), 2);
        let reg = regular_module(&g, &f, 600).unwrap();
        assert_eq!(hom_basis(&reg, &reg).len(), 6);
        // Hom out of the regular module has dimension dim(target).
        assert_eq!(hom_basis(&reg, &m2).len(), 3);
    }

    #[test]
    fn decompose_semisimple_and_modular_cases() {
        // F4[C3] is semisimple with three 1-dimensional summands.
        let c3 = builtin_group("C3", 512).unwrap();
        let f = build_field(2, 3).unwrap();
        let reg3 = regular_module(&c3, &f, 600).unwrap();
        let parts = decompose(&reg3, 1).unwrap();
        assert_eq!(parts.len(), 3);
        assert!(parts.iter().all(|p| p.dim == 1));
        let cls = iso_classes(&parts, 1);
        assert_eq!(cls.len(), 3, "the three characters of C3 are distinct over F4");

        // F2[C2xC2] is local: the regular module is indecomposable.
        let v4 = builtin_group("C2xC2", 512).unwrap();
        let f2 = build_field(2, 1).unwrap();
        let regv = regular_module(&v4, &f2, 600).unwrap();
        let parts = decompose(&regv, 1).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].dim, 4);
    }

    #[test]
    fn pim_table_of_s3_mod_2() {
        let (g, f, _) = s3_setup();
        let cyc = CycField::new(3);
        let t = pim_table(&g, &f, &cyc, 1, 600).unwrap();
        assert_eq!(t.pims.len(), 2);
        assert_eq!(t.pims.iter().map(|p| p.dim).collect::<Vec<_>>(), vec![2, 2]);
        // The simple projective (character -1 at the 3-cycle) sorts first;
        // multiplicity = dim of its simple head.
        assert_eq!(t.mults, vec![2, 1]);
        assert_eq!(t.labels, vec!["P1", "P2"]);
        // Composition length of the regular module: 2 (inside P2) + 2 simple
        // projectives.
        let reg = regular_module(&g, &f, 600).unwrap();
        assert_eq!(t.composition_length(&reg), 4);
        // P1 is a simple projective module; P2 is not simple.
        assert!(t.is_simple(&t.pims[0]));
        assert!(!t.is_simple(&t.pims[1]));
        assert!(t.is_projective(&reg, 1).unwrap());
        let triv = trivial_module(&g, &f);
        assert!(!t.is_projective(&triv, 1).unwrap());
        assert_eq!(t.composition_length(&triv), 1);
    }

    #[test]
    fn pim_table_of_sl23_mod_3() {
        let g = builtin_group("SL23", 512).unwrap();
        let f = build_field(3, 4).unwrap();
        let cyc = CycField::new(4);
        let t = pim_table(&g, &f, &cyc, 1, 600).unwrap();
        assert_eq!(t.pims.iter().map(|p| p.dim).collect::<Vec<_>>(), vec![3, 3, 6]);
        // P1 = the simple projective of dimension 3 (multiplicity 3),
        // P2 = the cover of the trivial module with factors [1,1,1]
        // (multiplicity 1), P3 = the 6-dimensional cover with factors
        // [V,V,V] for the 2-dimensional simple V (multiplicity 2); the
        // Cartan matrix of this group at p=3 is diag(1,3,3).
        assert_eq!(t.mults, vec![3, 1, 2]);
        assert_eq!(t.composition_length(&t.pims[1]), 3);
    }

    #[test]
    fn higman_criterion_and_vertices() {
        let (g, f, lat) = s3_setup();
        // The trivial module of S3 mod 2 has the Sylow 2-subgroup as vertex.
        let triv = trivial_module(&g, &f);
        let v = vertex(&triv, &lat).unwrap();
        assert_eq!(lat.subgroups[v].order, 2);
        // The regular module is projective: vertex is the trivial subgroup.
        let reg = regular_module(&g, &f, 600).unwrap();
        let parts = decompose(&reg, 1).unwrap();
        for part in &parts {
            assert_eq!(vertex(part, &lat).unwrap(), lat.trivial());
        }
        // F[S3/C2] = trivial + simple projective: summand vertices are C2
        // and 1.
        let c2 = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 2)
            .unwrap();
        let m2 = perm_module(&g, &f, &lat.subgroups[c2].elems, "F[S3/C2]", 600).unwrap();
        let mut dims_and_vertex_orders: Vec<(usize, usize)> = decompose(&m2, 1)
            .unwrap()
            .iter()
            .map(|p| (p.dim, lat.subgroups[vertex(p, &lat).unwrap()].order))
            .collect();
        dims_and_vertex_orders.sort();
        assert_eq!(dims_and_vertex_orders, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn isomorphism_matching() {
        let (g, f, lat) = s3_setup();
        let a3 = lat
            .class_reps()
            .into_iter()
            .find(|&s| lat.subgroups[s].order == 3)
            .unwrap();
        let m3 = perm_module(&g, &f, &lat.subgroups[a3].elems, "F[S3/A3]", 600).unwrap();
        let cyc = CycField::new(3);
        let t = pim_table(&g, &f, &cyc, 1, 600).unwrap();
        // F[S3/A3] is the projective cover of the trivial module (P2).
        assert_eq!(t.match_pim(&m3, 1), Some(1));
        // It is certainly not isomorphic to the simple projective.
        assert!(is_isomorphic(&t.pims[0], &m3, 1).is_none());
    }
}
