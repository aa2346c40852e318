//! Upper-triangular generalized matrix algebras `A_{n+1}(T, m)`, defining
//! systems and Massey products, partial defining systems, the ⋆-module and
//! the maps `p_{φ,θ}`.
//!
//! Matrix indices in this module are 0-based. The corner of an `(n+1)`-square
//! UGMA is `(0, n)`; the corner of the `(a+1)×(b+1)` block is `(0, b)`.

use rayon::prelude::*;
use thiserror::Error;

use crate::cohomology::{coboundary, connecting_cochain, Cochain, CohomologyError};
use crate::gmodule::{GMod, GModSES, ModuleError};
use crate::group_ring::QuotientRing;
use crate::groups::{Character, FiniteGroup, GroupHom};
use crate::modular_linalg::{ModMatrix, ModRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MasseyError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cocycle law fails at (g, h) = ({0}, {1}), entry ({2}, {3})")]
    CocycleLaw(usize, usize, usize, usize),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not a homomorphism at ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("diagram does not commute: {0}")]
    NotCommutative(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `A_{size}(T, m)`: entry `(i, j)` is `T` when `i < m <= j`, else `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ugma {
    pub size: usize,
    pub m: usize,
    pub t_rank: usize,
    pub ring: ModRing,
}

/// A unipotent element: `entries[i*size + j]` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UElem {
    size: usize,
    entries: Vec<Vec<u32>>,
}

impl UElem {
    pub fn get(&self, i: usize, j: usize) -> &[u32] {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Vec<u32>) {
        self.entries[i * self.size + j] = v;
    }
}

impl Ugma {
    pub fn new(size: usize, m: usize, t_rank: usize, ring: ModRing) -> Result<Self, MasseyError> {
        if size < 2 || m == 0 || m >= size {
            return Err(MasseyError::Shape(format!("need 1 <= m < size, got m = {m}, size = {size}")));
        }
        Ok(Ugma { size, m, t_rank, ring })
    }

    pub fn is_t(&self, i: usize, j: usize) -> bool {
        i < self.m && self.m <= j
    }

    pub fn entry_rank(&self, i: usize, j: usize) -> usize {
        if self.is_t(i, j) {
            self.t_rank
        } else {
            1
        }
    }

    pub fn corner(&self) -> (usize, usize) {
        (0, self.size - 1)
    }

    pub fn identity(&self) -> UElem {
        let n = self.size;
        let mut entries = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                entries[i * n + j] = vec![0; self.entry_rank(i, j)];
            }
        }
        UElem { size: n, entries }
    }

    /// `a_{ij}·b_{jk}` where at most one factor lies in `T`.
    fn entry_product(&self, x: &[u32], y: &[u32], out: &mut [u32]) {
        let r = self.ring;
        if x.len() == 1 {
            for (o, &v) in out.iter_mut().zip(y) {
                *o = r.add(*o, r.mul(x[0], v));
            }
        } else {
            for (o, &v) in out.iter_mut().zip(x) {
                *o = r.add(*o, r.mul(v, y[0]));
            }
        }
    }

    pub fn mul(&self, a: &UElem, b: &UElem) -> UElem {
        let n = self.size;
        let mut out = self.identity();
        for i in 0..n {
            for k in i + 1..n {
                let mut acc = vec![0; self.entry_rank(i, k)];
                self.entry_product(a.get(i, k), &[1], &mut acc);
                self.entry_product(&[1], b.get(i, k), &mut acc);
                for j in i + 1..k {
                    self.entry_product(a.get(i, j), b.get(j, k), &mut acc);
                }
                out.set(i, k, acc);
            }
        }
        out
    }

    pub fn inverse(&self, a: &UElem) -> UElem {
        // Solve a·b = 1 column by column from the diagonal outwards.
        let n = self.size;
        let r = self.ring;
        let mut b = self.identity();
        for d in 1..n {
            for i in 0..n - d {
                let k = i + d;
                let mut acc = vec![0; self.entry_rank(i, k)];
                self.entry_product(a.get(i, k), &[1], &mut acc);
                for j in i + 1..k {
                    self.entry_product(a.get(i, j), b.get(j, k), &mut acc);
                }
                b.set(i, k, acc.iter().map(|&x| r.neg(x)).collect());
            }
        }
        b
    }

    /// Applies `g` entrywise through `T` on the `T`-entries.
    pub fn act(&self, t: &GMod, g: usize, a: &UElem) -> UElem {
        let mut out = a.clone();
        for i in 0..self.size {
            for j in i + 1..self.size {
                if self.is_t(i, j) {
                    out.set(i, j, t.act(g, a.get(i, j)));
                }
            }
        }
        out
    }

    /// Zero outside the corner.
    pub fn is_central(&self, a: &UElem) -> bool {
        let (ci, cj) = self.corner();
        (0..self.size).all(|i| (i + 1..self.size).all(|j| (i, j) == (ci, cj) || a.get(i, j).iter().all(|&x| x == 0)))
    }

    /// Image in `U′`, represented with zero corner.
    pub fn mod_z(&self, a: &UElem) -> UElem {
        let (ci, cj) = self.corner();
        let mut out = a.clone();
        out.set(ci, cj, vec![0; self.entry_rank(ci, cj)]);
        out
    }
}

/// A defining system stored through its entry functions `ρ_{ij}` for `i < j`,
/// corner excluded.
#[derive(Clone, Debug)]
pub struct DefiningSystem {
    ugma: Ugma,
    module: GMod,
    entries: Vec<Option<Cochain>>,
}

impl DefiningSystem {
    /// `entry(i, j)` must return the 1-cochain `ρ_{ij}` for every non-corner
    /// `i < j`. Checks the cocycle law in `U′` on every pair.
    pub fn new<F: Fn(usize, usize) -> Cochain>(t: &GMod, m: usize, size: usize, entry: F) -> Result<Self, MasseyError> {
        let ugma = Ugma::new(size, m, t.rank(), t.ring())?;
        let order = t.group().order();
        let mut entries = vec![None; size * size];
        for i in 0..size {
            for j in i + 1..size {
                if (i, j) == ugma.corner() {
                    continue;
                }
                let c = entry(i, j);
                if c.degree() != 1 || c.order() != order || c.rank() != ugma.entry_rank(i, j) || c.ring() != t.ring() {
                    return Err(MasseyError::Shape(format!("entry ({i}, {j})")));
                }
                entries[i * size + j] = Some(c);
            }
        }
        let ds = DefiningSystem { ugma, module: t.clone(), entries };
        ds.check_cocycle_law()?;
        Ok(ds)
    }

    pub fn ugma(&self) -> &Ugma {
        &self.ugma
    }

    pub fn module(&self) -> &GMod {
        &self.module
    }

    /// `ρ_{ij}`; `None` for the corner.
    pub fn entry(&self, i: usize, j: usize) -> Option<&Cochain> {
        self.entries[i * self.ugma.size + j].as_ref()
    }

    /// The designated cocycles `χ_1, …, χ_n`.
    pub fn off_diagonal(&self) -> Vec<&Cochain> {
        (0..self.ugma.size - 1).map(|i| self.entry(i, i + 1).unwrap()).collect()
    }

    /// The lift `ρ̃(g)` with zero corner.
    pub fn lift_at(&self, g: usize) -> UElem {
        let mut out = self.ugma.identity();
        for i in 0..self.ugma.size {
            for j in i + 1..self.ugma.size {
                if let Some(c) = self.entry(i, j) {
                    out.set(i, j, c.at1(g).to_vec());
                }
            }
        }
        out
    }

    fn check_cocycle_law(&self) -> Result<(), MasseyError> {
        let u = &self.ugma;
        let g = self.module.group().clone();
        let n = g.order();
        let lifts: Vec<UElem> = (0..n).map(|a| self.lift_at(a)).collect();
        let acted: Vec<Vec<UElem>> = (0..n).into_par_iter().map(|a| lifts.iter().map(|l| u.act(&self.module, a, l)).collect()).collect();
        let bad = (0..n).into_par_iter().find_map_any(|a| {
            for b in 0..n {
                let prod = u.mul(&lifts[a], &acted[a][b]);
                let target = &lifts[g.mul(a, b)];
                for i in 0..u.size {
                    for j in i + 1..u.size {
                        if (i, j) != u.corner() && prod.get(i, j) != target.get(i, j) {
                            return Some(MasseyError::CocycleLaw(a, b, i, j));
                        }
                    }
                }
            }
            None
        });
        bad.map_or(Ok(()), Err)
    }

    /// The corner of `ρ̃(g)·gρ̃(h)`: `Σ_{0<i<n} ρ_{0i}(g)·gρ_{in}(h)`.
    pub fn massey_cocycle(&self) -> Cochain {
        let u = &self.ugma;
        let t = &self.module;
        let ring = t.ring();
        let n = t.group().order();
        let last = u.size - 1;
        let r = u.entry_rank(0, last);
        let mut values = vec![0u32; n * n * r];
        values.par_chunks_mut((n * r).max(1)).enumerate().for_each(|(a, block)| {
            for i in 1..last {
                let left = self.entry(0, i).unwrap();
                let right = self.entry(i, last).unwrap();
                let x = left.at1(a);
                for b in 0..n {
                    let y = right.at1(b);
                    let gy = if u.is_t(i, last) { t.act(a, y) } else { y.to_vec() };
                    let out = &mut block[b * r..(b + 1) * r];
                    u.entry_product(x, &gy, out);
                }
            }
        });
        Cochain::from_values(ring, 2, n, r, values)
    }
}

/// `C(a, k) mod p^s` for all `a < modulus` and `k <= n`, by Pascal's rule.
pub fn binomial_table(modulus: u64, n: usize, ring: ModRing) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(modulus as usize);
    let mut row = vec![0u32; n + 1];
    row[0] = 1 % ring.modulus();
    for _ in 0..modulus {
        out.push(row.clone());
        for k in (1..=n).rev() {
            row[k] = ring.add(row[k], row[k - 1]);
        }
    }
    out
}

/// The homomorphism `[χ; n]: H → U_{n+1}(R)` with entries `C(χ(h), j − i)`.
pub fn binmat(h: &FiniteGroup, chi: &Character, n: usize, ring: ModRing) -> Result<Vec<ModMatrix>, MasseyError> {
    let q = chi.modulus();
    let p = ring.p() as u64;
    let (_, t) = crate::groups::prime_power(q).map_err(|e| MasseyError::Hypothesis(e.to_string()))?;
    if !q.is_multiple_of(p) && q != 1 {
        return Err(MasseyError::Hypothesis("character modulus is not a power of p".into()));
    }
    let s = ring.s();
    // n < p^{t-s+1}, i.e. n·|R| < p·|A|.
    if t < s || (n as u128) * (ring.modulus() as u128) >= (p as u128) * (q as u128) {
        return Err(MasseyError::Hypothesis(format!("n·|R| < p·|A| fails for n = {n}, |R| = {}, |A| = {q}", ring.modulus())));
    }
    let table = binomial_table(q, n, ring);
    Ok((0..h.order())
        .map(|g| {
            let a = chi.at(g) as usize;
            let mut m = ModMatrix::zero(ring, n + 1, n + 1);
            for i in 0..=n {
                for j in i..=n {
                    m.set(i, j, table[a][j - i]);
                }
            }
            m
        })
        .collect())
}

fn check_unipotent_hom(h: &FiniteGroup, images: &[ModMatrix]) -> Result<(), MasseyError> {
    let d = images.first().map_or(0, |m| m.rows());
    for m in images {
        if m.rows() != d || m.cols() != d {
            return Err(MasseyError::Shape("images must be square of equal size".into()));
        }
        for i in 0..d {
            if m.get(i, i) != 1 % m.ring().modulus() || (0..i).any(|j| m.get(i, j) != 0) {
                return Err(MasseyError::Shape("images must be unipotent upper triangular".into()));
            }
        }
    }
    for a in 0..h.order() {
        for b in 0..h.order() {
            if images[h.mul(a, b)] != images[a].mul(&images[b]) {
                return Err(MasseyError::NotHomomorphism(a, b));
            }
        }
    }
    Ok(())
}

/// Extends generator images along the Cayley tree.
pub fn unipotent_hom_from_generators(h: &FiniteGroup, ring: ModRing, gens: &[ModMatrix]) -> Result<Vec<ModMatrix>, MasseyError> {
    let d = gens.first().map_or(1, |m| m.rows());
    let mut images = vec![ModMatrix::identity(ring, d); h.order()];
    for (c, parent, j) in h.cayley_tree() {
        images[c] = images[parent].mul(&gens[j]);
    }
    check_unipotent_hom(h, &images)?;
    Ok(images)
}

/// `φ: H → U_{a+1}(R)` and `θ: H → U_{b+1}(R)`, used on `G` through `π`.
#[derive(Clone, Debug)]
pub struct PartialDefiningSystem {
    pi: GroupHom,
    ring: ModRing,
    a: usize,
    b: usize,
    phi: Vec<ModMatrix>,
    theta: Vec<ModMatrix>,
    theta_inv: Vec<ModMatrix>,
}

impl PartialDefiningSystem {
    pub fn new(pi: GroupHom, ring: ModRing, phi: Vec<ModMatrix>, theta: Vec<ModMatrix>) -> Result<Self, MasseyError> {
        let h = pi.target().clone();
        if phi.len() != h.order() || theta.len() != h.order() {
            return Err(MasseyError::Shape("one image per element of H".into()));
        }
        check_unipotent_hom(&h, &phi)?;
        check_unipotent_hom(&h, &theta)?;
        let a = phi[0].rows() - 1;
        let b = theta[0].rows() - 1;
        let theta_inv = (0..h.order()).map(|x| theta[h.inv(x)].clone()).collect();
        Ok(PartialDefiningSystem { pi, ring, a, b, phi, theta, theta_inv })
    }

    /// `([χ; a], [ψ; b])`; a missing character means the trivial `U_1`.
    pub fn binomial(pi: GroupHom, ring: ModRing, chi: Option<(&Character, usize)>, psi: Option<(&Character, usize)>) -> Result<Self, MasseyError> {
        let h = pi.target().clone();
        let side = |c: Option<(&Character, usize)>| -> Result<Vec<ModMatrix>, MasseyError> {
            match c {
                Some((ch, k)) if k > 0 => binmat(&h, ch, k, ring),
                _ => Ok(vec![ModMatrix::identity(ring, 1); h.order()]),
            }
        };
        let phi = side(chi)?;
        let theta = side(psi)?;
        PartialDefiningSystem::new(pi, ring, phi, theta)
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn n(&self) -> usize {
        self.a + self.b
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn pi(&self) -> &GroupHom {
        &self.pi
    }

    pub fn phi_h(&self, h: usize) -> &ModMatrix {
        &self.phi[h]
    }

    pub fn theta_h(&self, h: usize) -> &ModMatrix {
        &self.theta[h]
    }

    pub fn phi(&self, g: usize) -> &ModMatrix {
        &self.phi[self.pi.apply(g)]
    }

    pub fn theta(&self, g: usize) -> &ModMatrix {
        &self.theta[self.pi.apply(g)]
    }

    pub fn theta_inv(&self, g: usize) -> &ModMatrix {
        &self.theta_inv[self.pi.apply(g)]
    }

    fn entry_cochain(&self, m: &[ModMatrix], i: usize, j: usize) -> Cochain {
        let order = self.pi.source().order();
        let values = (0..order).map(|g| m[self.pi.apply(g)].get(i, j)).collect();
        Cochain::from_values(self.ring, 1, order, 1, values)
    }

    /// `α_i = φ_{i,i+1}` on `G`, 0-based.
    pub fn alpha(&self, i: usize) -> Cochain {
        self.entry_cochain(&self.phi, i, i + 1)
    }

    pub fn beta(&self, i: usize) -> Cochain {
        self.entry_cochain(&self.theta, i, i + 1)
    }

    fn block(&self) -> usize {
        (self.a + 1) * (self.b + 1)
    }

    /// `p̃([h]) = φ(h)·e·θ(h)^{-1}` with `e = E_{a,0}`, flattened row-major.
    pub fn p_on_group(&self, h: usize) -> Vec<u32> {
        let (a, b) = (self.a, self.b);
        let mut out = vec![0; self.block()];
        for i in 0..=a {
            for j in 0..=b {
                out[i * (b + 1) + j] = self.ring.mul(self.phi[h].get(i, a), self.theta_inv[h].get(0, j));
            }
        }
        out
    }

    /// `p: Ω/I^{n+1} → M_{a+1,b+1}(R)` on the basis of `q`, row convention.
    /// Checks that the ideal of `q` is killed and that the top degree lands in
    /// the corner.
    pub fn p_map(&self, q: &QuotientRing) -> Result<ModMatrix, MasseyError> {
        let h = self.pi.target();
        let mut tilde = ModMatrix::zero(self.ring, h.order(), self.block());
        for x in 0..h.order() {
            tilde.row_mut(x).copy_from_slice(&self.p_on_group(x));
        }
        for row in q.ideal().rows() {
            if tilde.vec_mul(row).iter().any(|&v| v != 0) {
                return Err(MasseyError::Hypothesis("p does not factor through the quotient".into()));
            }
        }
        let mut p = ModMatrix::zero(self.ring, q.dim(), self.block());
        for (k, el) in q.elements().iter().enumerate() {
            p.row_mut(k).copy_from_slice(&tilde.vec_mul(el));
        }
        let corner = self.b;
        for k in q.indices_of_degree(self.n()) {
            if (0..self.block()).any(|c| c != corner && p.get(k, c) != 0) {
                return Err(MasseyError::Hypothesis("top degree does not land in the corner".into()));
            }
        }
        Ok(p)
    }

    /// `𝔘_{φ,θ}(T)` with index `((i·(b+1) + j)·r + t)`, and the sequence
    /// `0 → T → 𝔘 → 𝔘′ → 0` with the zero-corner section.
    pub fn star(&self, t: &GMod) -> Result<StarModule, MasseyError> {
        let g = t.group().clone();
        if g.order() != self.pi.source().order() {
            return Err(MasseyError::Shape("T must live on the source of π".into()));
        }
        let ring = self.ring;
        let r = t.rank();
        let (a, b) = (self.a, self.b);
        let dim = self.block() * r;
        let action: Vec<ModMatrix> = (0..g.order())
            .map(|x| {
                let phi = self.phi(x);
                let thinv_t = self.theta_inv(x).transpose();
                phi.kron(&thinv_t).kron(t.action(x))
            })
            .collect();
        let full = GMod::from_action(g.clone(), ring, action.clone())?;
        let corner: Vec<usize> = (0..r).map(|u| b * r + u).collect();
        let rest: Vec<usize> = (0..dim).filter(|i| !corner.contains(i)).collect();
        let quot_action = action.iter().map(|m| m.submatrix(&rest, &rest)).collect();
        let quot = GMod::from_action(g, ring, quot_action)?;
        let mut incl = ModMatrix::zero(ring, r, dim);
        for (u, &c) in corner.iter().enumerate() {
            incl.set(u, c, 1);
        }
        let mut proj = ModMatrix::zero(ring, dim, rest.len());
        let mut section = ModMatrix::zero(ring, rest.len(), dim);
        for (k, &i) in rest.iter().enumerate() {
            proj.set(i, k, 1);
            section.set(k, i, 1);
        }
        let ses = GModSES::new(t.clone(), full, quot, incl, proj, section)?;
        Ok(StarModule { a, b, r, ses, rest })
    }
}

#[derive(Clone, Debug)]
pub struct StarModule {
    a: usize,
    b: usize,
    r: usize,
    pub ses: GModSES,
    rest: Vec<usize>,
}

impl StarModule {
    pub fn index(&self, i: usize, j: usize, t: usize) -> usize {
        (i * (self.b + 1) + j) * self.r + t
    }

    pub fn full(&self) -> &GMod {
        &self.ses.b
    }

    pub fn quotient(&self) -> &GMod {
        &self.ses.c
    }

    /// Zero-corner lift of an element of `𝔘′`.
    pub fn lift(&self, v: &[u32]) -> Vec<u32> {
        self.ses.lift(v)
    }

    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        self.rest.iter().map(|&i| v[i]).collect()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.a, self.b, self.r)
    }

    /// `x·m` for an `R`-matrix `m` of size `b+1` acting on the right.
    pub fn right_mul(&self, x: &[u32], m: &ModMatrix) -> Vec<u32> {
        let ring = m.ring();
        let mut out = vec![0; x.len()];
        for i in 0..=self.a {
            for j in 0..=self.b {
                for l in 0..=self.b {
                    let c = m.get(l, j);
                    if c == 0 {
                        continue;
                    }
                    for t in 0..self.r {
                        let o = self.index(i, j, t);
                        out[o] = ring.add(out[o], ring.mul(x[self.index(i, l, t)], c));
                    }
                }
            }
        }
        out
    }

    /// Corner coefficient of a full element.
    pub fn corner(&self, x: &[u32]) -> Vec<u32> {
        (0..self.r).map(|t| x[self.index(0, self.b, t)]).collect()
    }
}

/// The proper defining system attached to `κ′ ∈ Z^1(G, 𝔘′)`, with `κ = κ′θ`.
pub fn kappa_to_proper(pds: &PartialDefiningSystem, star: &StarModule, kappa_prime: &Cochain) -> Result<DefiningSystem, MasseyError> {
    let t = &star.ses.a;
    let (a, b, r) = star.shape();
    let ring = pds.ring();
    let order = t.group().order();
    if kappa_prime.rank() != star.quotient().rank() || kappa_prime.degree() != 1 {
        return Err(MasseyError::Shape("κ′ must be a 1-cochain into 𝔘′".into()));
    }
    let kappa: Vec<Vec<u32>> = (0..order).map(|g| star.right_mul(&star.lift(kappa_prime.at1(g)), pds.theta(g))).collect();
    let size = a + b + 2;
    DefiningSystem::new(t, a + 1, size, |i, j| {
        if j <= a {
            pds.entry_cochain(&pds.phi, i, j)
        } else if i > a {
            pds.entry_cochain(&pds.theta, i - a - 1, j - a - 1)
        } else {
            let jj = j - a - 1;
            let values = (0..order).flat_map(|g| (0..r).map(move |u| (g, u))).map(|(g, u)| kappa[g][star.index(i, jj, u)]).collect();
            Cochain::from_values(ring, 1, order, r, values)
        }
    })
}

/// Inverse of [`kappa_to_proper`]: `κ′ = κθ^{-1}` modulo the corner.
pub fn proper_to_kappa(pds: &PartialDefiningSystem, star: &StarModule, ds: &DefiningSystem) -> Result<Cochain, MasseyError> {
    let (a, b, r) = star.shape();
    let order = star.full().group().order();
    let full_rank = star.full().rank();
    if ds.ugma().size != a + b + 2 || ds.ugma().m != a + 1 {
        return Err(MasseyError::Shape("defining system has the wrong shape".into()));
    }
    let mut values = Vec::with_capacity(order * star.quotient().rank());
    for g in 0..order {
        let mut kappa = vec![0; full_rank];
        for i in 0..=a {
            for j in 0..=b {
                if let Some(c) = ds.entry(i, a + 1 + j) {
                    for u in 0..r {
                        kappa[star.index(i, j, u)] = c.at1(g)[u];
                    }
                }
            }
        }
        values.extend(star.reduce(&star.right_mul(&kappa, pds.theta_inv(g))));
    }
    Ok(Cochain::from_values(pds.ring(), 1, order, star.quotient().rank(), values))
}

/// Both sides of the connecting-map identity for one `κ′`.
#[derive(Clone, Debug)]
pub struct ConnectingComparison {
    /// Connecting map computed with the zero-corner section.
    pub connecting: Cochain,
    /// Massey cocycle of the attached proper defining system.
    pub massey: Cochain,
    /// `c(g) = corner(κ̃′(g)·θ(g))`; `connecting = massey + dc`.
    pub correction: Cochain,
    pub pointwise_equal: bool,
    pub corrected_equal: bool,
}

pub fn connecting_via_star(pds: &PartialDefiningSystem, star: &StarModule, kappa_prime: &Cochain) -> Result<ConnectingComparison, MasseyError> {
    let connecting = connecting_cochain(&star.ses, kappa_prime)?;
    let ds = kappa_to_proper(pds, star, kappa_prime)?;
    let massey = ds.massey_cocycle();
    let t = &star.ses.a;
    let order = t.group().order();
    let r = t.rank();
    let mut cvals = Vec::with_capacity(order * r);
    for g in 0..order {
        cvals.extend(star.corner(&star.right_mul(&star.lift(kappa_prime.at1(g)), pds.theta(g))));
    }
    let correction = Cochain::from_values(pds.ring(), 1, order, r, cvals);
    let dc = coboundary(t, &correction)?;
    let pointwise_equal = connecting == massey;
    let corrected_equal = connecting == massey.add(&dc);
    Ok(ConnectingComparison { connecting, massey, correction, pointwise_equal, corrected_equal })
}

/// The map of short exact sequences from `T⊗(I^n/I^{n+1} → Ω/I^{n+1} → Ω/I^n)`
/// to `T → 𝔘 → 𝔘′`, all in row convention.
#[derive(Clone, Debug)]
pub struct SequenceMap {
    pub left: ModMatrix,
    pub middle: ModMatrix,
    pub right: ModMatrix,
}

/// Builds the three vertical maps from `p` on the basis of `q = Ω/I^{n+1}`
/// (the basis of the Bockstein sequence) and checks equivariance and
/// commutativity.
pub fn sequence_map(bock: &GModSES, q: &QuotientRing, p: &ModMatrix, star: &StarModule, n: usize) -> Result<SequenceMap, MasseyError> {
    let (a, b, r) = star.shape();
    let ring = p.ring();
    let dq = q.dim();
    let block = (a + 1) * (b + 1);
    let top = q.indices_of_degree(n);
    let low: Vec<usize> = (0..dq).filter(|&i| q.degrees()[i] < n).collect();
    let mut middle = ModMatrix::zero(ring, r * dq, block * r);
    for t in 0..r {
        for m in 0..dq {
            for c in 0..block {
                middle.set(t * dq + m, c * r + t, p.get(m, c));
            }
        }
    }
    let mut left = ModMatrix::zero(ring, r * top.len(), r);
    for t in 0..r {
        for (j, &m) in top.iter().enumerate() {
            left.set(t * top.len() + j, t, p.get(m, b));
        }
    }
    let mut right = ModMatrix::zero(ring, r * low.len(), star.quotient().rank());
    for t in 0..r {
        for (j, &m) in low.iter().enumerate() {
            let row = middle.row(t * dq + m).to_vec();
            right.row_mut(t * low.len() + j).copy_from_slice(&star.reduce(&row));
        }
    }
    if !bock.b.is_equivariant(star.full(), &middle) {
        return Err(MasseyError::NotEquivariant("middle map".into()));
    }
    if bock.incl.mul(&middle) != left.mul(&star.ses.incl) {
        return Err(MasseyError::NotCommutative("left square".into()));
    }
    if bock.proj.mul(&right) != middle.mul(&star.ses.proj) {
        return Err(MasseyError::NotCommutative("right square".into()));
    }
    Ok(SequenceMap { left, middle, right })
}
