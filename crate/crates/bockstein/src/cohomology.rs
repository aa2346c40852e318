//! Inhomogeneous cochains in degrees ≤ 3, cohomology in degrees ≤ 2, cup
//! products, connecting maps, and bar-complex homology in degrees ≤ 1.
//!
//! Cochains are stored densely on all of `G^i` (identity is element 0).
//! Cohomology groups are computed on normalized cochains, which vanish as soon
//! as one argument is the identity.

use rayon::prelude::*;
use thiserror::Error;

use crate::gmodule::{GMod, GModSES};
use crate::groups::Character;
use crate::modular_linalg::{howell, kernel, quotient, FPModule, LinalgError, ModMatrix, ModRing, Solver, Submodule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("degree {0} not supported here")]
    Degree(usize),
    #[error("cochain does not match the module")]
    Mismatch,
    #[error("not a cocycle")]
    NotCocycle,
    #[error("cochain is not normalized")]
    NotNormalized,
    #[error("value does not lie in the submodule")]
    NotInSubmodule,
    #[error("problem too large: {0} matrix entries")]
    TooLarge(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Largest dense coboundary matrix we are willing to build.
pub const MAX_MATRIX_ENTRIES: usize = 60_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    ring: ModRing,
    degree: usize,
    order: usize,
    rank: usize,
    values: Vec<u32>,
}

fn tuples(order: usize, degree: usize) -> usize {
    order.pow(degree as u32)
}

fn decode(mut idx: usize, order: usize, out: &mut [usize]) {
    for a in out.iter_mut().rev() {
        *a = idx % order;
        idx /= order;
    }
}

impl Cochain {
    pub fn zero(ring: ModRing, degree: usize, order: usize, rank: usize) -> Self {
        Cochain { ring, degree, order, rank, values: vec![0; tuples(order, degree) * rank] }
    }

    pub fn from_fn<F: Fn(&[usize]) -> Vec<u32>>(ring: ModRing, degree: usize, order: usize, rank: usize, f: F) -> Self {
        let mut c = Cochain::zero(ring, degree, order, rank);
        let mut args = vec![0; degree];
        for t in 0..tuples(order, degree) {
            decode(t, order, &mut args);
            let v = f(&args);
            assert_eq!(v.len(), rank);
            for (dst, x) in c.values[t * rank..(t + 1) * rank].iter_mut().zip(v) {
                *dst = x % ring.modulus();
            }
        }
        c
    }

    pub fn from_values(ring: ModRing, degree: usize, order: usize, rank: usize, values: Vec<u32>) -> Self {
        assert_eq!(values.len(), tuples(order, degree) * rank);
        Cochain { ring, degree, order, rank, values }
    }

    /// A character read as a 1-cochain with values in `R` (trivial action).
    pub fn from_character(ring: ModRing, chi: &Character) -> Self {
        let values = chi.reduce(ring);
        let order = values.len();
        Cochain { ring, degree: 1, order, rank: 1, values }
    }

    /// Constant 0-cochain.
    pub fn constant(ring: ModRing, order: usize, m: &[u32]) -> Self {
        Cochain { ring, degree: 0, order, rank: m.len(), values: m.to_vec() }
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    fn offset(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.degree);
        args.iter().fold(0, |acc, &a| acc * self.order + a) * self.rank
    }

    pub fn at(&self, args: &[usize]) -> &[u32] {
        let o = self.offset(args);
        &self.values[o..o + self.rank]
    }

    pub fn at_mut(&mut self, args: &[usize]) -> &mut [u32] {
        let o = self.offset(args);
        &mut self.values[o..o + self.rank]
    }

    pub fn at1(&self, g: usize) -> &[u32] {
        &self.values[g * self.rank..(g + 1) * self.rank]
    }

    pub fn at2(&self, g: usize, h: usize) -> &[u32] {
        let o = (g * self.order + h) * self.rank;
        &self.values[o..o + self.rank]
    }

    /// Scalar value of a rank-one cochain.
    pub fn scalar(&self, args: &[usize]) -> u32 {
        debug_assert_eq!(self.rank, 1);
        self.at(args)[0]
    }

    fn same_shape(&self, other: &Cochain) -> bool {
        self.ring == other.ring && self.degree == other.degree && self.order == other.order && self.rank == other.rank
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert!(self.same_shape(other));
        let r = self.ring;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| r.add(a, b)).collect();
        self.with_values(values)
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        assert!(self.same_shape(other));
        let r = self.ring;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| r.sub(a, b)).collect();
        self.with_values(values)
    }

    pub fn neg(&self) -> Cochain {
        let r = self.ring;
        self.with_values(self.values.iter().map(|&a| r.neg(a)).collect())
    }

    pub fn scale(&self, c: u32) -> Cochain {
        let r = self.ring;
        self.with_values(self.values.iter().map(|&a| r.mul(a, c)).collect())
    }

    fn with_values(&self, values: Vec<u32>) -> Cochain {
        Cochain { ring: self.ring, degree: self.degree, order: self.order, rank: self.rank, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    /// Applies a row-convention matrix to every value.
    pub fn map_values(&self, f: &ModMatrix) -> Cochain {
        assert_eq!(f.rows(), self.rank);
        let r = self.rank;
        let mut values = vec![0; tuples(self.order, self.degree) * f.cols()];
        if f.cols() == 0 {
            return Cochain { ring: self.ring, degree: self.degree, order: self.order, rank: 0, values };
        }
        values.par_chunks_mut(f.cols()).enumerate().for_each(|(t, out)| {
            out.copy_from_slice(&f.vec_mul(&self.values[t * r..(t + 1) * r]));
        });
        Cochain { ring: self.ring, degree: self.degree, order: self.order, rank: f.cols(), values }
    }

    /// Zero whenever some argument is the identity.
    pub fn is_normalized(&self) -> bool {
        let mut args = vec![0; self.degree];
        (0..tuples(self.order, self.degree)).all(|t| {
            decode(t, self.order, &mut args);
            !args.contains(&0) || self.values[t * self.rank..(t + 1) * self.rank].iter().all(|&x| x == 0)
        })
    }

    /// Coordinates on tuples of non-identity elements.
    pub fn normalized_coords(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(tuples(self.order - 1, self.degree) * self.rank);
        let mut args = vec![0; self.degree];
        for t in 0..tuples(self.order - 1, self.degree) {
            decode(t, self.order - 1, &mut args);
            args.iter_mut().for_each(|a| *a += 1);
            out.extend_from_slice(self.at(&args));
        }
        out
    }

    pub fn from_normalized(ring: ModRing, degree: usize, order: usize, rank: usize, coords: &[u32]) -> Cochain {
        let mut c = Cochain::zero(ring, degree, order, rank);
        let mut args = vec![0; degree];
        for t in 0..tuples(order - 1, degree) {
            decode(t, order - 1, &mut args);
            args.iter_mut().for_each(|a| *a += 1);
            c.at_mut(&args).copy_from_slice(&coords[t * rank..(t + 1) * rank]);
        }
        c
    }
}

fn check(m: &GMod, f: &Cochain) -> Result<(), CohomologyError> {
    if f.ring != m.ring() || f.order != m.group().order() || f.rank != m.rank() {
        return Err(CohomologyError::Mismatch);
    }
    Ok(())
}

/// Standard inhomogeneous coboundary, degrees 0 to 2.
pub fn coboundary(m: &GMod, f: &Cochain) -> Result<Cochain, CohomologyError> {
    check(m, f)?;
    let g = m.group();
    let (n, r, ring) = (g.order(), m.rank(), m.ring());
    if r == 0 {
        return Ok(Cochain::zero(ring, f.degree + 1, n, 0));
    }
    let add_into = |out: &mut [u32], v: &[u32]| out.iter_mut().zip(v).for_each(|(o, &x)| *o = ring.add(*o, x));
    let sub_into = |out: &mut [u32], v: &[u32]| out.iter_mut().zip(v).for_each(|(o, &x)| *o = ring.sub(*o, x));
    let mut out = Cochain::zero(ring, f.degree + 1, n, r);
    match f.degree {
        0 => {
            for a in 0..n {
                let mut v = m.act(a, &f.values);
                sub_into(&mut v, &f.values);
                out.at_mut(&[a]).copy_from_slice(&v);
            }
        }
        1 => {
            out.values.par_chunks_mut(n * r).enumerate().for_each(|(a, block)| {
                let act = m.action(a);
                for b in 0..n {
                    let mut v = act.mat_vec(f.at1(b));
                    sub_into(&mut v, f.at1(g.mul(a, b)));
                    add_into(&mut v, f.at1(a));
                    block[b * r..(b + 1) * r].copy_from_slice(&v);
                }
            });
        }
        2 => {
            out.values.par_chunks_mut(n * n * r).enumerate().for_each(|(a, block)| {
                let act = m.action(a);
                for b in 0..n {
                    let ab = g.mul(a, b);
                    for c in 0..n {
                        let mut v = act.mat_vec(f.at2(b, c));
                        sub_into(&mut v, f.at2(ab, c));
                        add_into(&mut v, f.at2(a, g.mul(b, c)));
                        sub_into(&mut v, f.at2(a, b));
                        let o = (b * n + c) * r;
                        block[o..o + r].copy_from_slice(&v);
                    }
                }
            });
        }
        d => return Err(CohomologyError::Degree(d)),
    }
    Ok(out)
}

pub fn is_cocycle(m: &GMod, f: &Cochain) -> Result<bool, CohomologyError> {
    Ok(coboundary(m, f)?.is_zero())
}

fn norm_index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * (n - 1) + (a - 1))
}

/// Matrix of `d: C^i → C^{i+1}` on normalized coordinates, row convention.
pub fn coboundary_matrix(m: &GMod, degree: usize) -> Result<ModMatrix, CohomologyError> {
    let g = m.group();
    let (n, r, ring) = (g.order(), m.rank(), m.ring());
    let rows = tuples(n - 1, degree) * r;
    let cols = tuples(n - 1, degree + 1) * r;
    if rows * cols > MAX_MATRIX_ENTRIES {
        return Err(CohomologyError::TooLarge(rows * cols));
    }
    let one = 1 % ring.modulus();
    let mut d = ModMatrix::zero(ring, rows, cols);
    let mut args = vec![0; degree + 1];
    for t in 0..tuples(n - 1, degree + 1) {
        decode(t, n - 1, &mut args);
        args.iter_mut().for_each(|a| *a += 1);
        let col = t * r;
        let a = args[0];
        // g·f(rest)
        if degree > 0 {
            let src = norm_index(&args[1..], n) * r;
            let act = m.action(a);
            for tt in 0..r {
                for u in 0..r {
                    d.add_at(src + u, col + tt, act.get(tt, u));
                }
            }
        } else {
            let act = m.action(a);
            for tt in 0..r {
                for u in 0..r {
                    d.add_at(u, col + tt, act.get(tt, u));
                }
                d.add_at(tt, col + tt, ring.neg(one));
            }
            continue;
        }
        // Alternating face terms.
        for k in 0..degree {
            let mut face: Vec<usize> = args[..k].to_vec();
            face.push(g.mul(args[k], args[k + 1]));
            face.extend_from_slice(&args[k + 2..]);
            if face.contains(&0) {
                continue;
            }
            let src = norm_index(&face, n) * r;
            let sign = if k % 2 == 0 { ring.neg(one) } else { one };
            for tt in 0..r {
                d.add_at(src + tt, col + tt, sign);
            }
        }
        let src = norm_index(&args[..degree], n) * r;
        let sign = if degree % 2 == 1 { one } else { ring.neg(one) };
        for tt in 0..r {
            d.add_at(src + tt, col + tt, sign);
        }
    }
    Ok(d)
}

/// Normalized 1-cocycles generating `Z^1(G, M)`.
///
/// The unknowns are the values on the generators; a value on every element is
/// obtained along the Cayley tree and each Cayley edge gives one constraint.
pub fn z1_generators(m: &GMod) -> Vec<Cochain> {
    let g = m.group();
    let (n, r, ring) = (g.order(), m.rank(), m.ring());
    let gens = g.generators();
    let k = gens.len();
    let w = k * r;
    // f(h) = L[h]·u, L[h] is r × w.
    let mut l = vec![ModMatrix::zero(ring, r, w); n];
    let block = |a: &ModMatrix, j: usize| {
        let mut out = ModMatrix::zero(ring, r, w);
        for i in 0..r {
            for c in 0..r {
                out.set(i, j * r + c, a.get(i, c));
            }
        }
        out
    };
    for (child, parent, j) in g.cayley_tree() {
        l[child] = l[parent].add(&block(m.action(parent), j));
    }
    // Constraint rows, transposed so that unknown vectors are row vectors.
    let mut constraints = Vec::with_capacity(n * k);
    for h in 0..n {
        for (j, &s) in gens.iter().enumerate() {
            constraints.push(l[g.mul(h, s)].sub(&l[h]).sub(&block(m.action(h), j)));
        }
    }
    let mut ct = ModMatrix::zero(ring, w, constraints.len() * r);
    for (c, mat) in constraints.iter().enumerate() {
        for i in 0..r {
            for x in 0..w {
                ct.set(x, c * r + i, mat.get(i, x));
            }
        }
    }
    let z = if ct.cols() == 0 { Submodule::full(ring, w) } else { kernel(&ct) };
    z.rows()
        .iter()
        .map(|u| {
            let mut f = Cochain::zero(ring, 1, n, r);
            for h in 0..n {
                f.at_mut(&[h]).copy_from_slice(&l[h].mat_vec(u));
            }
            f
        })
        .collect()
}

/// `H^i(G, M)` as a finite module with class and representative maps.
#[derive(Clone, Debug)]
pub struct CohGroup {
    degree: usize,
    ring: ModRing,
    order: usize,
    rank: usize,
    cocycles: Submodule,
    fp: FPModule,
}

pub fn cohomology(m: &GMod, degree: usize) -> Result<CohGroup, CohomologyError> {
    let ring = m.ring();
    let (n, r) = (m.group().order(), m.rank());
    let (cocycles, coboundaries) = match degree {
        0 => {
            let d0 = coboundary_matrix(m, 0)?;
            let z = if d0.cols() == 0 { Submodule::full(ring, r) } else { kernel(&d0) };
            (z, Submodule::zero(ring, r))
        }
        1 => {
            let ambient = (n - 1) * r;
            let z = Submodule::from_generators(ring, ambient, z1_generators(m).iter().map(|f| f.normalized_coords()).collect());
            let b = howell(&coboundary_matrix(m, 0)?);
            (z, b)
        }
        2 => {
            let d2 = coboundary_matrix(m, 2)?;
            let ambient = d2.rows();
            let z = if d2.cols() == 0 { Submodule::full(ring, ambient) } else { kernel(&d2) };
            let b = howell(&coboundary_matrix(m, 1)?);
            (z, b)
        }
        d => return Err(CohomologyError::Degree(d)),
    };
    let fp = quotient(&cocycles, &coboundaries)?;
    Ok(CohGroup { degree, ring, order: n, rank: r, cocycles, fp })
}

impl CohGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> &FPModule {
        &self.fp
    }

    pub fn invariant_factors(&self) -> Vec<u64> {
        self.fp.invariant_factors()
    }

    pub fn is_zero(&self) -> bool {
        self.fp.is_zero()
    }

    pub fn cocycles(&self) -> &Submodule {
        &self.cocycles
    }

    pub fn class_of(&self, f: &Cochain) -> Result<Vec<u32>, CohomologyError> {
        if f.degree != self.degree || f.order != self.order || f.rank != self.rank || f.ring != self.ring {
            return Err(CohomologyError::Mismatch);
        }
        if !f.is_normalized() {
            return Err(CohomologyError::NotNormalized);
        }
        let w = f.normalized_coords();
        if !self.cocycles.contains(&w) {
            return Err(CohomologyError::NotCocycle);
        }
        Ok(self.fp.to_coordinates(&w)?)
    }

    pub fn representative(&self, coords: &[u32]) -> Cochain {
        let w = self.fp.from_coordinates(coords);
        Cochain::from_normalized(self.ring, self.degree, self.order, self.rank, &w)
    }

    /// Representatives of the cyclic generators.
    pub fn generators(&self) -> Vec<Cochain> {
        let k = self.fp.exponents().len();
        (0..k)
            .map(|i| {
                let mut e = vec![0; k];
                e[i] = 1;
                self.representative(&e)
            })
            .collect()
    }
}

/// Decides `F = dμ` for `F` of degree 1 or 2 and returns a normalized `μ`.
#[derive(Clone, Debug)]
pub struct CoboundarySolver {
    module: GMod,
    degree: usize,
    solver: Solver,
}

impl CoboundarySolver {
    /// `degree` is the degree of the cochains being tested.
    pub fn new(m: &GMod, degree: usize) -> Result<Self, CohomologyError> {
        if !(1..=2).contains(&degree) {
            return Err(CohomologyError::Degree(degree));
        }
        let d = coboundary_matrix(m, degree - 1)?;
        Ok(CoboundarySolver { module: m.clone(), degree, solver: Solver::new(&d) })
    }

    pub fn solve(&self, f: &Cochain) -> Result<Option<Cochain>, CohomologyError> {
        check(&self.module, f)?;
        if f.degree != self.degree {
            return Err(CohomologyError::Degree(f.degree));
        }
        let (ring, n, r) = (f.ring, f.order, f.rank);
        let (target, shift) = normalize_cocycle(&self.module, f)?;
        let Some(mu) = self.solver.solve(&target.normalized_coords())? else {
            return Ok(None);
        };
        let mu = if self.degree == 1 {
            Cochain::constant(ring, n, &mu)
        } else {
            Cochain::from_normalized(ring, 1, n, r, &mu)
        };
        Ok(Some(match shift {
            Some(c) => mu.add(&c),
            None => mu,
        }))
    }

    pub fn is_coboundary(&self, f: &Cochain) -> Result<bool, CohomologyError> {
        Ok(self.solve(f)?.is_some())
    }
}

/// Moves a cocycle to a normalized one in its class; returns the correction `c`
/// with `f = f' + dc`.
fn normalize_cocycle(m: &GMod, f: &Cochain) -> Result<(Cochain, Option<Cochain>), CohomologyError> {
    if f.is_normalized() {
        return Ok((f.clone(), None));
    }
    match f.degree {
        1 => {
            // Cocycles of degree 1 always vanish at the identity.
            Err(CohomologyError::NotCocycle)
        }
        2 => {
            let base = f.at2(0, 0).to_vec();
            let c = Cochain::from_fn(f.ring, 1, f.order, f.rank, |_| base.clone());
            let g = f.sub(&coboundary(m, &c)?);
            if !g.is_normalized() {
                return Err(CohomologyError::NotCocycle);
            }
            Ok((g, Some(c)))
        }
        _ => Err(CohomologyError::NotNormalized),
    }
}

/// `(a ∪ b)(g, h) = a(g)·(g_1⋯g_i · b(h))` for `a` with values in `R`.
pub fn cup_left(a: &Cochain, b: &Cochain, m: &GMod) -> Result<Cochain, CohomologyError> {
    check(m, b)?;
    if a.rank != 1 || a.order != b.order {
        return Err(CohomologyError::Mismatch);
    }
    let g = m.group();
    let (i, j, n, r, ring) = (a.degree, b.degree, b.order, b.rank, b.ring);
    let mut out = Cochain::zero(ring, i + j, n, r);
    let inner = tuples(n, j) * r;
    if inner == 0 {
        return Ok(out);
    }
    out.values.par_chunks_mut(inner).enumerate().for_each(|(t, block)| {
        let mut args = vec![0; i];
        decode(t, n, &mut args);
        let coef = a.values[t];
        if coef == 0 {
            return;
        }
        let prod = args.iter().fold(0, |acc, &x| g.mul(acc, x));
        let act = m.action(prod);
        for s in 0..tuples(n, j) {
            let v = act.mat_vec(&b.values[s * r..(s + 1) * r]);
            for (o, x) in block[s * r..(s + 1) * r].iter_mut().zip(v) {
                *o = ring.mul(coef, x);
            }
        }
    });
    Ok(out)
}

/// `(b ∪ a)(g, h) = b(g)·a(h)` for `a` with values in `R` (trivial action).
pub fn cup_right(b: &Cochain, a: &Cochain) -> Result<Cochain, CohomologyError> {
    if a.rank != 1 || a.order != b.order || a.ring != b.ring {
        return Err(CohomologyError::Mismatch);
    }
    let (i, j, n, r, ring) = (b.degree, a.degree, b.order, b.rank, b.ring);
    let mut out = Cochain::zero(ring, i + j, n, r);
    let inner = tuples(n, j) * r;
    if inner == 0 {
        return Ok(out);
    }
    out.values.par_chunks_mut(inner).enumerate().for_each(|(t, block)| {
        let bv = &b.values[t * r..(t + 1) * r];
        for s in 0..tuples(n, j) {
            let coef = a.values[s];
            for (o, &x) in block[s * r..(s + 1) * r].iter_mut().zip(bv) {
                *o = ring.mul(coef, x);
            }
        }
    });
    Ok(out)
}

/// `(χ ∪ λ)(g, h) = χ(g)·(g·λ(h))`.
pub fn cup11(chi: &Cochain, lambda: &Cochain, m: &GMod) -> Result<Cochain, CohomologyError> {
    if chi.degree != 1 || lambda.degree != 1 {
        return Err(CohomologyError::Degree(chi.degree.max(lambda.degree)));
    }
    cup_left(chi, lambda, m)
}

/// Cochain-level connecting map: lift through the section, apply `d`, pull
/// back along the inclusion.
pub fn connecting_cochain(ses: &GModSES, f: &Cochain) -> Result<Cochain, CohomologyError> {
    check(&ses.c, f)?;
    let lifted = f.map_values(&ses.section);
    let d = coboundary(&ses.b, &lifted)?;
    let ra = ses.a.rank();
    let mut out = Cochain::zero(f.ring, f.degree + 1, f.order, ra);
    let pulled: Vec<Option<Vec<u32>>> = d.values.par_chunks(ses.b.rank().max(1)).map(|v| ses.pull_back(v)).collect();
    if ses.b.rank() == 0 {
        return Ok(out);
    }
    for (t, v) in pulled.into_iter().enumerate() {
        let v = v.ok_or(CohomologyError::NotInSubmodule)?;
        out.values[t * ra..(t + 1) * ra].copy_from_slice(&v);
    }
    Ok(out)
}

/// Connecting map on classes, `H^i(G, C) → H^{i+1}(G, A)` for `i ≤ 1`.
pub fn connecting(ses: &GModSES, source: &CohGroup, target: &CohGroup, class: &[u32]) -> Result<Vec<u32>, CohomologyError> {
    if source.degree > 1 || target.degree != source.degree + 1 {
        return Err(CohomologyError::Degree(source.degree));
    }
    let f = source.representative(class);
    target.class_of(&connecting_cochain(ses, &f)?)
}

/// Bar complex of a left module viewed as a right module via `m·h = h^{-1}m`,
/// normalized, in degrees ≤ 2.
#[derive(Clone, Debug)]
pub struct ChainComplexH {
    module: GMod,
    /// `C_1 → C_0`.
    pub d1: ModMatrix,
    /// `C_2 → C_1`.
    pub d2: ModMatrix,
}

impl ChainComplexH {
    pub fn new(m: &GMod) -> Result<Self, CohomologyError> {
        let g = m.group();
        let (n, r, ring) = (g.order(), m.rank(), m.ring());
        let one = 1 % ring.modulus();
        let c1 = (n - 1) * r;
        let c2 = (n - 1) * (n - 1) * r;
        if c2 * c1 > MAX_MATRIX_ENTRIES {
            return Err(CohomologyError::TooLarge(c2 * c1));
        }
        // Image of e_u under h^{-1}, as a column of A(h^{-1}).
        let twisted = |h: usize, u: usize| -> Vec<u32> { (0..r).map(|t| m.action(g.inv(h)).get(t, u)).collect() };
        let mut d1 = ModMatrix::zero(ring, c1, r);
        for h in 1..n {
            for u in 0..r {
                let row = (h - 1) * r + u;
                for (t, x) in twisted(h, u).into_iter().enumerate() {
                    d1.add_at(row, t, x);
                }
                d1.add_at(row, u, ring.neg(one));
            }
        }
        let mut d2 = ModMatrix::zero(ring, c2, c1);
        for a in 1..n {
            for b in 1..n {
                for u in 0..r {
                    let row = ((a - 1) * (n - 1) + (b - 1)) * r + u;
                    for (t, x) in twisted(a, u).into_iter().enumerate() {
                        d2.add_at(row, (b - 1) * r + t, x);
                    }
                    let ab = g.mul(a, b);
                    if ab != 0 {
                        d2.add_at(row, (ab - 1) * r + u, ring.neg(one));
                    }
                    d2.add_at(row, (a - 1) * r + u, one);
                }
            }
        }
        Ok(ChainComplexH { module: m.clone(), d1, d2 })
    }

    pub fn module(&self) -> &GMod {
        &self.module
    }

    /// Boundaries in `C_0 = A`, that is `I·A`.
    pub fn boundaries0(&self) -> Submodule {
        Submodule::from_generators(self.module.ring(), self.module.rank(), self.d1.to_rows())
    }

    pub fn cycles1(&self) -> Submodule {
        if self.d1.cols() == 0 {
            Submodule::full(self.module.ring(), self.d1.rows())
        } else {
            kernel(&self.d1)
        }
    }

    pub fn h0(&self) -> Result<FPModule, CohomologyError> {
        let full = Submodule::full(self.module.ring(), self.module.rank());
        Ok(quotient(&full, &self.boundaries0())?)
    }

    pub fn h1(&self) -> Result<FPModule, CohomologyError> {
        let b = Submodule::from_generators(self.module.ring(), self.d1.rows(), self.d2.to_rows());
        Ok(quotient(&self.cycles1(), &b)?)
    }
}

/// `H_1(H, C) → H_0(H, A)` for a short exact sequence of modules, given by its
/// image in `A` together with the cokernel `A / (I·A + image)`.
#[derive(Clone, Debug)]
pub struct HomologyConnecting {
    pub image: Submodule,
    pub coker: FPModule,
}

pub fn homology_connecting(ses: &GModSES) -> Result<HomologyConnecting, CohomologyError> {
    let cc = ChainComplexH::new(&ses.c)?;
    let cb = ChainComplexH::new(&ses.b)?;
    let ca = ChainComplexH::new(&ses.a)?;
    let (rc, rb) = (ses.c.rank(), ses.b.rank());
    let n = ses.c.group().order();
    let ring = ses.a.ring();
    let mut images = Vec::new();
    for z in cc.cycles1().rows() {
        let mut lifted = Vec::with_capacity((n - 1) * rb);
        for h in 0..n - 1 {
            lifted.extend(ses.lift(&z[h * rc..(h + 1) * rc]));
        }
        let boundary = cb.d1.vec_mul(&lifted);
        images.push(ses.pull_back(&boundary).ok_or(CohomologyError::NotInSubmodule)?);
    }
    let image = Submodule::from_generators(ring, ses.a.rank(), images);
    let full = Submodule::full(ring, ses.a.rank());
    let coker = quotient(&full, &image.sum(&ca.boundaries0()))?;
    Ok(HomologyConnecting { image, coker })
}

/// A random `R`-combination of the given cochains; `zero` fixes the shape.
pub fn random_combination<R: rand::Rng>(gens: &[Cochain], zero: &Cochain, rng: &mut R) -> Cochain {
    let ring = zero.ring();
    gens.iter().fold(zero.clone(), |acc, c| acc.add(&c.scale(rng.gen_range(0..ring.modulus()))))
}

/// `I^k A` for `k = 0..=depth`, with `I^{k+1}A` spanned by `(s − 1)v`.
pub fn augmentation_filtration(m: &GMod, depth: usize) -> Vec<Submodule> {
    let ring = m.ring();
    let mut out = vec![Submodule::full(ring, m.rank())];
    for _ in 0..depth {
        let prev = out.last().unwrap();
        let mut gens = Vec::new();
        for v in prev.rows() {
            for &s in m.group().generators() {
                let sv = m.act(s, v);
                gens.push(sv.iter().zip(v).map(|(&a, &b)| ring.sub(a, b)).collect());
            }
        }
        out.push(Submodule::from_generators(ring, m.rank(), gens));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use std::sync::Arc;

    fn f3() -> ModRing {
        ModRing::new(3, 1).unwrap()
    }

    #[test]
    fn coboundary_of_constant_function() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let m = GMod::trivial(g, f3(), 1);
        let f = Cochain::from_fn(f3(), 1, 3, 1, |a| vec![u32::from(a[0] != 0)]);
        let df = coboundary(&m, &f).unwrap();
        assert!(!df.is_zero());
        // d(f)(g,h) = f(g) + f(h) − f(gh)
        for a in 0..3 {
            for b in 0..3 {
                let e = (f.scalar(&[a]) + f.scalar(&[b]) + 3 - f.scalar(&[(a + b) % 3])) % 3;
                assert_eq!(df.scalar(&[a, b]), e);
            }
        }
        assert!(coboundary(&m, &df).unwrap().is_zero());
    }

    #[test]
    fn small_cohomology() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let m = GMod::trivial(g, f3(), 1);
        assert_eq!(cohomology(&m, 0).unwrap().invariant_factors(), vec![3]);
        assert_eq!(cohomology(&m, 1).unwrap().invariant_factors(), vec![3]);
        assert_eq!(cohomology(&m, 2).unwrap().invariant_factors(), vec![3]);
    }

    #[test]
    fn matrix_agrees_with_direct_coboundary() {
        let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let ring = ModRing::new(2, 2).unwrap();
        let mut a = ModMatrix::zero(ring, 2, 2);
        a.set(0, 1, 3);
        a.set(1, 0, 1);
        let m = GMod::from_generators(g, ring, &[a]).unwrap();
        for deg in 0..3 {
            let d = coboundary_matrix(&m, deg).unwrap();
            let f = Cochain::from_fn(ring, deg, 4, 2, |args| {
                if args.contains(&0) {
                    vec![0, 0]
                } else {
                    vec![(args.iter().sum::<usize>() % 4) as u32, (args.iter().product::<usize>() % 4) as u32]
                }
            });
            let df = coboundary(&m, &f).unwrap();
            let expect = if deg == 0 { df.values()[2..].to_vec() } else { df.normalized_coords() };
            let coords = if deg == 0 { f.values().to_vec() } else { f.normalized_coords() };
            assert_eq!(d.vec_mul(&coords), expect, "degree {deg}");
        }
    }

    #[test]
    fn bicyclic_cup_is_nonzero() {
        let (g, chars) = FiniteGroup::abelian_with_coordinates(&[3, 3]).unwrap();
        let g = Arc::new(g);
        let m = GMod::trivial(g.clone(), f3(), 1);
        let chi = Cochain::from_character(f3(), &chars[0]);
        let psi = Cochain::from_character(f3(), &chars[1]);
        let solver = CoboundarySolver::new(&m, 2).unwrap();
        assert!(!solver.is_coboundary(&cup11(&chi, &psi, &m).unwrap()).unwrap());
        assert!(solver.is_coboundary(&cup11(&chi, &chi, &m).unwrap()).unwrap());
        let zero = Cochain::zero(f3(), 1, 9, 1);
        assert!(cup11(&chi, &zero, &m).unwrap().is_zero());
    }

    #[test]
    fn homology_of_regular_module() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let pi = crate::groups::GroupHom::identity(g);
        let omega = GMod::permutation(&pi, f3());
        let cc = ChainComplexH::new(&omega).unwrap();
        assert_eq!(cc.h0().unwrap().invariant_factors(), vec![3]);
        assert!(cc.h1().unwrap().is_zero());
    }
}
