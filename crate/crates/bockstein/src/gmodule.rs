//! Free `R`-modules with a `G`-action, tensor constructions and short exact
//! sequences with a chosen `R`-linear section.
//!
//! Action matrices follow the column convention `g·v = A(g)v`, so that
//! `A(gh) = A(g)A(h)`. Module maps are stored in the row convention used by
//! the linear algebra layer: `f(v) = v·F`.

use std::sync::Arc;

use thiserror::Error;

use crate::group_ring::{BasisStyle, Filtration, QuotientRing, RingError};
use crate::groups::{FiniteGroup, GroupHom};
use crate::modular_linalg::{kernel, ModMatrix, ModRing, Solver, Submodule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("action is not multiplicative at ({0}, {1})")]
    NotAction(usize, usize),
    #[error("wrong shape: {0}")]
    Shape(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("map is not G-equivariant: {0}")]
    NotEquivariant(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug)]
pub struct GMod {
    group: Arc<FiniteGroup>,
    ring: ModRing,
    rank: usize,
    action: Vec<ModMatrix>,
}

impl GMod {
    /// Extends generator matrices along the Cayley tree and checks every edge.
    pub fn from_generators(group: Arc<FiniteGroup>, ring: ModRing, gens: &[ModMatrix]) -> Result<Self, ModuleError> {
        let r = gens.first().map_or(0, |m| m.rows());
        if gens.len() != group.generators().len() || gens.iter().any(|m| m.rows() != r || m.cols() != r) {
            return Err(ModuleError::Shape("one square matrix per generator".into()));
        }
        let mut action = vec![ModMatrix::identity(ring, r); group.order()];
        for (g, h, j) in group.cayley_tree() {
            action[g] = action[h].mul(&gens[j]);
        }
        for h in 0..group.order() {
            for (j, &s) in group.generators().iter().enumerate() {
                if action[group.mul(h, s)] != action[h].mul(&gens[j]) {
                    return Err(ModuleError::NotAction(h, s));
                }
            }
        }
        Ok(GMod { group, ring, rank: r, action })
    }

    /// Takes the full list of action matrices; checks generator edges.
    pub fn from_action(group: Arc<FiniteGroup>, ring: ModRing, action: Vec<ModMatrix>) -> Result<Self, ModuleError> {
        if action.len() != group.order() {
            return Err(ModuleError::Shape("one matrix per group element".into()));
        }
        let r = action[0].rows();
        if action[0] != ModMatrix::identity(ring, r) {
            return Err(ModuleError::NotAction(0, 0));
        }
        for h in 0..group.order() {
            for &s in group.generators() {
                if action[group.mul(h, s)] != action[h].mul(&action[s]) {
                    return Err(ModuleError::NotAction(h, s));
                }
            }
        }
        Ok(GMod { group, ring, rank: r, action })
    }

    pub fn trivial(group: Arc<FiniteGroup>, ring: ModRing, rank: usize) -> Self {
        let action = vec![ModMatrix::identity(ring, rank); group.order()];
        GMod { group, ring, rank, action }
    }

    /// `Ω/K` as a `G`-module through `π: G → H` and left multiplication.
    pub fn from_quotient_ring(pi: &GroupHom, q: &QuotientRing) -> Self {
        let action = (0..pi.source().order()).map(|g| q.left_mul(pi.apply(g)).clone()).collect();
        GMod { group: pi.source().clone(), ring: q.omega().ring(), rank: q.dim(), action }
    }

    /// The permutation module `R[H]` pulled back along `π`.
    pub fn permutation(pi: &GroupHom, ring: ModRing) -> Self {
        let n = pi.target().order();
        let h = pi.target();
        let action = (0..pi.source().order())
            .map(|g| {
                let mut m = ModMatrix::zero(ring, n, n);
                for k in 0..n {
                    m.set(h.mul(pi.apply(g), k), k, 1);
                }
                m
            })
            .collect();
        GMod { group: pi.source().clone(), ring, rank: n, action }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, g: usize) -> &ModMatrix {
        &self.action[g]
    }

    pub fn act(&self, g: usize, v: &[u32]) -> Vec<u32> {
        self.action[g].mat_vec(v)
    }

    pub fn is_trivial(&self) -> bool {
        let id = ModMatrix::identity(self.ring, self.rank);
        self.action.iter().all(|a| *a == id)
    }

    /// Exhaustive check of `A(gh) = A(g)A(h)` on all pairs.
    pub fn verify_exhaustive(&self) -> Result<(), ModuleError> {
        let g = &self.group;
        for a in 0..g.order() {
            for b in 0..g.order() {
                if self.action[g.mul(a, b)] != self.action[a].mul(&self.action[b]) {
                    return Err(ModuleError::NotAction(a, b));
                }
            }
        }
        Ok(())
    }

    /// Tensor product with diagonal action; `self` is the major index.
    pub fn tensor(&self, other: &GMod) -> GMod {
        assert!(Arc::ptr_eq(&self.group, &other.group) || self.group == other.group);
        let action = self.action.iter().zip(&other.action).map(|(a, b)| a.kron(b)).collect();
        GMod { group: self.group.clone(), ring: self.ring, rank: self.rank * other.rank, action }
    }

    /// Module over a group with the action pulled back along `hom: K → G`.
    pub fn pullback(&self, hom: &GroupHom) -> GMod {
        let action = (0..hom.source().order()).map(|k| self.action[hom.apply(k)].clone()).collect();
        GMod { group: hom.source().clone(), ring: self.ring, rank: self.rank, action }
    }

    /// Checks that `v ↦ v·f` commutes with the actions of all generators.
    pub fn is_equivariant(&self, target: &GMod, f: &ModMatrix) -> bool {
        let ring = self.ring;
        for &s in self.group.generators() {
            for i in 0..self.rank {
                let mut e = vec![0u32; self.rank];
                e[i] = 1 % ring.modulus();
                if f.vec_mul(&self.act(s, &e)) != target.act(s, &f.vec_mul(&e)) {
                    return false;
                }
            }
        }
        true
    }
}

/// `T ⊗ Ω/I^n` with `g` acting by `T(g) ⊗ [π(g)]`, together with the basis of
/// `Ω/I^n` used.
pub fn tensor_with_quotient(
    t: &GMod,
    filt: &Filtration,
    n: usize,
    style: &BasisStyle,
    pi: &GroupHom,
) -> Result<(GMod, QuotientRing), ModuleError> {
    let q = filt.truncation(n, style)?;
    let m = GMod::from_quotient_ring(pi, &q);
    Ok((t.tensor(&m), q))
}

/// `0 → A → B → C → 0` with an `R`-linear section of `B → C`.
#[derive(Clone, Debug)]
pub struct GModSES {
    pub a: GMod,
    pub b: GMod,
    pub c: GMod,
    /// `rank A × rank B`.
    pub incl: ModMatrix,
    /// `rank B × rank C`.
    pub proj: ModMatrix,
    /// `rank C × rank B`.
    pub section: ModMatrix,
    pullback: Solver,
    /// Set when the inclusion sends basis vector `i` to basis vector `embedding[i]`.
    embedding: Option<Vec<usize>>,
}

impl GModSES {
    pub fn new(a: GMod, b: GMod, c: GMod, incl: ModMatrix, proj: ModMatrix, section: ModMatrix) -> Result<Self, ModuleError> {
        let ring = b.ring();
        if incl.rows() != a.rank() || incl.cols() != b.rank() || proj.rows() != b.rank() || proj.cols() != c.rank() {
            return Err(ModuleError::Shape("maps do not match module ranks".into()));
        }
        if section.rows() != c.rank() || section.cols() != b.rank() {
            return Err(ModuleError::Shape("section has the wrong shape".into()));
        }
        if a.rank() + c.rank() != b.rank() {
            return Err(ModuleError::NotExact("ranks do not add up".into()));
        }
        if section.mul(&proj) != ModMatrix::identity(ring, c.rank()) {
            return Err(ModuleError::NotExact("section is not a right inverse".into()));
        }
        if !incl.mul(&proj).is_zero() {
            return Err(ModuleError::NotExact("projection does not kill the submodule".into()));
        }
        if !kernel(&incl).is_zero() {
            return Err(ModuleError::NotExact("inclusion is not injective".into()));
        }
        let image = Submodule::from_generators(ring, b.rank(), incl.to_rows());
        if image != kernel(&proj) {
            return Err(ModuleError::NotExact("image differs from kernel".into()));
        }
        if !a.is_equivariant(&b, &incl) {
            return Err(ModuleError::NotEquivariant("inclusion".into()));
        }
        if !b.is_equivariant(&c, &proj) {
            return Err(ModuleError::NotEquivariant("projection".into()));
        }
        let pullback = Solver::new(&incl);
        let embedding = (0..incl.rows())
            .map(|i| {
                let row = incl.row(i);
                let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0).collect();
                (nz.len() == 1 && row[nz[0]] == 1).then(|| nz[0])
            })
            .collect();
        Ok(GModSES { a, b, c, incl, proj, section, pullback, embedding })
    }

    /// Preimage under the inclusion, if `v` lies in `A`.
    pub fn pull_back(&self, v: &[u32]) -> Option<Vec<u32>> {
        if let Some(e) = &self.embedding {
            let out: Vec<u32> = e.iter().map(|&j| v[j]).collect();
            let mut rest = v.to_vec();
            e.iter().for_each(|&j| rest[j] = 0);
            return rest.iter().all(|&x| x == 0).then_some(out);
        }
        self.pullback.solve(v).expect("length")
    }

    pub fn lift(&self, v: &[u32]) -> Vec<u32> {
        self.section.vec_mul(v)
    }

    pub fn project(&self, v: &[u32]) -> Vec<u32> {
        self.proj.vec_mul(v)
    }
}

/// Index of `(t, m)` in `T ⊗ Q` with `T` major.
#[inline]
pub fn tensor_index(t: usize, m: usize, dim_q: usize) -> usize {
    t * dim_q + m
}

/// `0 → T⊗I^n/I^{n+1} → T⊗Ω/I^{n+1} → T⊗Ω/I^n → 0` with the section that sets the
/// degree-n part to zero.
pub fn bockstein_ses(t: &GMod, filt: &Filtration, n: usize, style: &BasisStyle, pi: &GroupHom) -> Result<(GModSES, QuotientRing), ModuleError> {
    let ring = t.ring();
    let (b, q_big) = tensor_with_quotient(t, filt, n + 1, style, pi)?;
    let (c, q_small) = tensor_with_quotient(t, filt, n, style, pi)?;
    let top = q_big.indices_of_degree(n);
    let low: Vec<usize> = (0..q_big.dim()).filter(|&i| q_big.degrees()[i] < n).collect();
    debug_assert_eq!(low.len(), q_small.dim());
    let r = t.rank();
    let (db, dc, dn) = (q_big.dim(), q_small.dim(), top.len());
    let a = t.tensor(&GMod::trivial(t.group().clone(), ring, dn));
    let mut incl = ModMatrix::zero(ring, r * dn, r * db);
    let mut proj = ModMatrix::zero(ring, r * db, r * dc);
    let mut section = ModMatrix::zero(ring, r * dc, r * db);
    for ti in 0..r {
        for (j, &m) in top.iter().enumerate() {
            incl.set(tensor_index(ti, j, dn), tensor_index(ti, m, db), 1);
        }
        for (j, &m) in low.iter().enumerate() {
            proj.set(tensor_index(ti, m, db), tensor_index(ti, j, dc), 1);
            section.set(tensor_index(ti, j, dc), tensor_index(ti, m, db), 1);
        }
    }
    Ok((GModSES::new(a, b, c, incl, proj, section)?, q_big))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::{augmentation_powers, GroupRing};

    fn f3() -> ModRing {
        ModRing::new(3, 1).unwrap()
    }

    #[test]
    fn trivial_modules() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let m = GMod::trivial(g.clone(), f3(), 1);
        assert!(m.is_trivial());
        m.verify_exhaustive().unwrap();
        let z = GMod::trivial(g, f3(), 0);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn cyclic_action_matches_binomial_expansion() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let gen = g.generators()[0];
        let omega = GroupRing::new(f3(), g.clone());
        let filt = augmentation_powers(&omega, 3);
        let t = GMod::trivial(g.clone(), f3(), 1);
        let (m, _) = tensor_with_quotient(&t, &filt, 3, &BasisStyle::cyclic(gen), &GroupHom::identity(g.clone())).unwrap();
        // g·1 = 1 + x and g·x = x + x².
        assert_eq!(m.act(gen, &[1, 0, 0]), vec![1, 1, 0]);
        assert_eq!(m.act(gen, &[0, 1, 0]), vec![0, 1, 1]);
        assert_eq!(*m.action(0), ModMatrix::identity(f3(), 3));
        m.verify_exhaustive().unwrap();
    }

    #[test]
    fn bockstein_sequence_shapes() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let gen = g.generators()[0];
        let omega = GroupRing::new(f3(), g.clone());
        let filt = augmentation_powers(&omega, 3);
        let t = GMod::trivial(g.clone(), f3(), 1);
        let pi = GroupHom::identity(g.clone());
        let (ses, _) = bockstein_ses(&t, &filt, 1, &BasisStyle::cyclic(gen), &pi).unwrap();
        assert_eq!((ses.a.rank(), ses.b.rank(), ses.c.rank()), (1, 2, 1));
        assert_eq!(ses.incl.row(0), &[0, 1]);
        let (ses2, _) = bockstein_ses(&t, &filt, 2, &BasisStyle::cyclic(gen), &pi).unwrap();
        assert_eq!(ses2.lift(&[1, 0]), vec![1, 0, 0]);
        // The section is not equivariant.
        assert!(!ses2.c.is_equivariant(&ses2.b, &ses2.section));
    }
}
