//! The group ring `Ω = R[H]`, its augmentation filtration and quotients `Ω/K`
//! with explicit bases.
//!
//! Elements of `Ω` are coefficient vectors indexed by the elements of `H`.

use std::sync::Arc;

use thiserror::Error;

use crate::groups::{Character, FiniteGroup, GroupHom};
use crate::modular_linalg::{quotient, LinalgError, ModMatrix, ModRing, Solver, Submodule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("filtration was built only up to I^{0}")]
    Depth(usize),
    #[error("{0} is not R-free")]
    NotFlat(String),
    #[error("chosen elements are not a basis of {0}")]
    NotBasis(String),
    #[error("basis style {0} does not apply here")]
    Style(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug)]
pub struct GroupRing {
    ring: ModRing,
    group: Arc<FiniteGroup>,
}

impl GroupRing {
    pub fn new(ring: ModRing, group: Arc<FiniteGroup>) -> Self {
        GroupRing { ring, group }
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.group.order()
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.dim()]
    }

    /// The basis element `[h]`.
    pub fn elem(&self, h: usize) -> Vec<u32> {
        let mut v = self.zero();
        v[h] = 1 % self.ring.modulus();
        v
    }

    pub fn one(&self) -> Vec<u32> {
        self.elem(0)
    }

    /// `[h] − 1`.
    pub fn var(&self, h: usize) -> Vec<u32> {
        let mut v = self.elem(h);
        v[0] = self.ring.sub(v[0], 1);
        v
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.ring.sub(x, y)).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.ring.mul(c, x)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let g = &self.group;
        let m = self.ring.modulus() as u64;
        let mut acc = vec![0u64; self.dim()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    let k = g.mul(i, j);
                    acc[k] = (acc[k] + x as u64 * y as u64) % m;
                }
            }
        }
        acc.into_iter().map(|x| x as u32).collect()
    }

    /// `[h]·a`.
    pub fn left_mul_elem(&self, h: usize, a: &[u32]) -> Vec<u32> {
        let mut out = self.zero();
        for (k, &x) in a.iter().enumerate() {
            out[self.group.mul(h, k)] = x;
        }
        out
    }

    /// `a·[h]`.
    pub fn right_mul_elem(&self, a: &[u32], h: usize) -> Vec<u32> {
        let mut out = self.zero();
        for (k, &x) in a.iter().enumerate() {
            out[self.group.mul(k, h)] = x;
        }
        out
    }

    pub fn augmentation(&self, a: &[u32]) -> u32 {
        a.iter().fold(0, |s, &x| self.ring.add(s, x))
    }

    pub fn product(&self, factors: &[Vec<u32>]) -> Vec<u32> {
        factors.iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    pub fn augmentation_ideal(&self) -> Submodule {
        let gens = (1..self.dim()).map(|h| self.var(h)).collect();
        Submodule::from_generators(self.ring, self.dim(), gens)
    }

    pub fn full(&self) -> Submodule {
        Submodule::full(self.ring, self.dim())
    }

    /// The ideal generated by `I^k` and the given elements (two-sided).
    pub fn ideal(&self, base: &Submodule, extra: &[Vec<u32>]) -> Submodule {
        let mut gens: Vec<Vec<u32>> = base.rows().to_vec();
        for e in extra {
            for h in 0..self.dim() {
                for k in 0..self.dim() {
                    gens.push(self.right_mul_elem(&self.left_mul_elem(h, e), k));
                }
            }
        }
        Submodule::from_generators(self.ring, self.dim(), gens)
    }

    /// Matrix of `Ω → Ω_C`, `[h] ↦ [hom(h)]`, in row convention.
    pub fn induced_ring_map(&self, hom: &GroupHom) -> ModMatrix {
        let mut m = ModMatrix::zero(self.ring, self.dim(), hom.target().order());
        for h in 0..self.dim() {
            m.set(h, hom.apply(h), 1);
        }
        m
    }
}

/// Is `big/small` R-free? Compares `|big/small|` with `p^{s·d}` where `d` is the
/// minimal number of generators.
pub fn is_free_quotient(big: &Submodule, small: &Submodule) -> (bool, usize) {
    let ring = big.ring();
    let size = big.log_size() - small.log_size();
    let p_big: Vec<Vec<u32>> = big.rows().iter().map(|r| r.iter().map(|&x| ring.mul(x, ring.p())).collect()).collect();
    let mut gens = small.rows().to_vec();
    gens.extend(p_big);
    let reduced = Submodule::from_generators(ring, big.ambient(), gens);
    let d = (big.log_size() - reduced.log_size()) as usize;
    (size as usize == d * ring.s() as usize, d)
}

/// Chosen bases of the graded pieces `I^n/I^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisStyle {
    /// Commutative monomials in `[h_i] − 1` for the listed elements, exponent
    /// tuples in decreasing lexicographic order. Covers the cyclic and bicyclic
    /// bases.
    Monomial { vars: Vec<usize>, names: Vec<String> },
    /// `S_1 = {x, y}`, `S_2 = {x², y², yx, z}`, `S_3 = {x³, xz, yx², y²x, y³, yz}`.
    Heisenberg { x: usize, y: usize, z: usize },
    /// Noncommutative degree-n words in the group generators, lexicographic,
    /// keeping those that enlarge the span.
    Generic,
}

impl BasisStyle {
    pub fn cyclic(h: usize) -> Self {
        BasisStyle::Monomial { vars: vec![h], names: vec!["x".into()] }
    }

    pub fn bicyclic(hx: usize, hy: usize) -> Self {
        BasisStyle::Monomial { vars: vec![hx, hy], names: vec!["x".into(), "y".into()] }
    }

    pub fn abelian(vars: Vec<usize>) -> Self {
        let names = match vars.len() {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            k => (1..=k).map(|i| format!("x{i}")).collect(),
        };
        BasisStyle::Monomial { vars, names }
    }
}

/// Exponent tuples of total degree `n` in `k` variables, decreasing lex order.
pub fn exponent_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for a in (0..=n).rev() {
        for mut rest in exponent_tuples(k - 1, n - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

fn power_label(name: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    }
}

/// A basis of `I^n/I^{n+1}` as elements of `I^n`.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub degree: usize,
    pub elements: Vec<Vec<u32>>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Filtration {
    omega: GroupRing,
    powers: Vec<Submodule>,
    /// `(Ω/I^n free, I^n/I^{n+1} free)` for each `n < N`.
    flat: Vec<(bool, bool)>,
}

/// Powers `I^0, …, I^N` with flatness flags.
pub fn augmentation_powers(omega: &GroupRing, depth: usize) -> Filtration {
    let ring = omega.ring();
    let h = omega.group().clone();
    let mut powers = vec![omega.full(), omega.augmentation_ideal()];
    while powers.len() <= depth {
        let last = powers.last().unwrap();
        let mut gens = Vec::with_capacity(last.rows().len() * h.generators().len());
        for r in last.rows() {
            for &s in h.generators() {
                gens.push(omega.sub(&omega.right_mul_elem(r, s), r));
            }
        }
        powers.push(Submodule::from_generators(ring, omega.dim(), gens));
    }
    powers.truncate(depth + 1);
    let full = omega.full();
    let flat = (0..depth)
        .map(|n| (is_free_quotient(&full, &powers[n]).0, is_free_quotient(&powers[n], &powers[n + 1]).0))
        .collect();
    Filtration { omega: omega.clone(), powers, flat }
}

impl Filtration {
    pub fn omega(&self) -> &GroupRing {
        &self.omega
    }

    pub fn depth(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, n: usize) -> Result<&Submodule, RingError> {
        self.powers.get(n).ok_or(RingError::Depth(self.depth()))
    }

    /// Whether `Ω/I^n` and `I^n/I^{n+1}` are both R-free.
    pub fn is_flat(&self, n: usize) -> bool {
        self.flat.get(n).is_some_and(|&(a, b)| a && b)
    }

    pub fn quotient_is_free(&self, n: usize) -> bool {
        if n == self.depth() {
            is_free_quotient(&self.omega.full(), &self.powers[n]).0
        } else {
            self.flat.get(n).is_some_and(|f| f.0)
        }
    }

    pub fn graded_is_free(&self, n: usize) -> bool {
        self.flat.get(n).is_some_and(|f| f.1)
    }

    /// Rank of `I^n/I^{n+1}` when free.
    pub fn graded_rank(&self, n: usize) -> Result<usize, RingError> {
        let (a, b) = (self.power(n)?, self.power(n + 1)?);
        let (free, d) = is_free_quotient(a, b);
        if !free {
            return Err(RingError::NotFlat(format!("I^{n}/I^{}", n + 1)));
        }
        Ok(d)
    }

    /// The graded piece `I^n/I^{n+1}` as a finitely presented module.
    pub fn graded_piece(&self, n: usize) -> Result<crate::modular_linalg::FPModule, RingError> {
        Ok(quotient(self.power(n)?, self.power(n + 1)?)?)
    }

    pub fn graded_basis(&self, n: usize, style: &BasisStyle) -> Result<GradedBasis, RingError> {
        let omega = &self.omega;
        if !self.graded_is_free(n) {
            return Err(RingError::NotFlat(format!("I^{n}/I^{}", n + 1)));
        }
        let rank = self.graded_rank(n)?;
        let (elements, labels) = match style {
            BasisStyle::Monomial { vars, names } => {
                let xs: Vec<Vec<u32>> = vars.iter().map(|&h| omega.var(h)).collect();
                let mut elems = Vec::new();
                let mut labels = Vec::new();
                // Monomials that vanish modulo the earlier ones (x^2 = 0 at p = 2) are skipped.
                let mut span = self.power(n + 1)?.clone();
                for d in exponent_tuples(vars.len(), n) {
                    let mut factors = Vec::new();
                    let mut label = String::new();
                    for (i, &e) in d.iter().enumerate() {
                        factors.extend(std::iter::repeat_n(xs[i].clone(), e));
                        label.push_str(&power_label(&names[i], e));
                    }
                    let e = omega.product(&factors);
                    if span.contains(&e) {
                        continue;
                    }
                    span = span.sum(&Submodule::from_generators(omega.ring(), omega.dim(), vec![e.clone()]));
                    elems.push(e);
                    labels.push(if label.is_empty() { "1".into() } else { label });
                }
                (elems, labels)
            }
            BasisStyle::Heisenberg { x, y, z } => {
                let (x, y, z) = (omega.var(*x), omega.var(*y), omega.var(*z));
                let words: Vec<(&str, Vec<&Vec<u32>>)> = match n {
                    0 => vec![("1", vec![])],
                    1 => vec![("x", vec![&x]), ("y", vec![&y])],
                    2 => vec![("x^2", vec![&x, &x]), ("y^2", vec![&y, &y]), ("yx", vec![&y, &x]), ("z", vec![&z])],
                    3 => vec![
                        ("x^3", vec![&x, &x, &x]),
                        ("xz", vec![&x, &z]),
                        ("yx^2", vec![&y, &x, &x]),
                        ("y^2x", vec![&y, &y, &x]),
                        ("y^3", vec![&y, &y, &y]),
                        ("yz", vec![&y, &z]),
                    ],
                    _ => return Err(RingError::Style(format!("heisenberg in degree {n}"))),
                };
                let elems = words.iter().map(|(_, w)| omega.product(&w.iter().map(|v| (*v).clone()).collect::<Vec<_>>())).collect();
                (elems, words.iter().map(|(l, _)| l.to_string()).collect())
            }
            BasisStyle::Generic => self.generic_basis(n)?,
        };
        let basis = GradedBasis { degree: n, elements, labels };
        self.check_graded_basis(&basis, rank)?;
        Ok(basis)
    }

    fn generic_basis(&self, n: usize) -> Result<(Vec<Vec<u32>>, Vec<String>), RingError> {
        let omega = &self.omega;
        let gens = omega.group().generators().to_vec();
        let next = self.power(n + 1)?.clone();
        let target = self.power(n)?.log_size();
        let mut span = next;
        let mut elems = Vec::new();
        let mut labels = Vec::new();
        let k = gens.len();
        if n == 0 {
            return Ok((vec![omega.one()], vec!["1".into()]));
        }
        let total = k.checked_pow(n as u32).unwrap_or(usize::MAX);
        for idx in 0..total {
            if span.log_size() == target {
                break;
            }
            let mut word = Vec::with_capacity(n);
            let mut c = idx;
            for _ in 0..n {
                word.push(c % k);
                c /= k;
            }
            word.reverse();
            let e = omega.product(&word.iter().map(|&i| omega.var(gens[i])).collect::<Vec<_>>());
            if span.contains(&e) {
                continue;
            }
            span = span.sum(&Submodule::from_generators(omega.ring(), omega.dim(), vec![e.clone()]));
            labels.push(word.iter().map(|&i| format!("x{}", i + 1)).collect::<Vec<_>>().join(""));
            elems.push(e);
        }
        Ok((elems, labels))
    }

    fn check_graded_basis(&self, basis: &GradedBasis, rank: usize) -> Result<(), RingError> {
        let n = basis.degree;
        let name = format!("I^{n}/I^{}", n + 1);
        let (cur, next) = (self.power(n)?, self.power(n + 1)?);
        if basis.elements.len() != rank || !basis.elements.iter().all(|e| cur.contains(e)) {
            return Err(RingError::NotBasis(name));
        }
        let span = next.sum(&Submodule::from_generators(self.omega.ring(), self.omega.dim(), basis.elements.clone()));
        if span != *cur {
            return Err(RingError::NotBasis(name));
        }
        Ok(())
    }

    /// `Ω/I^n` with the basis adapted to the filtration.
    pub fn truncation(&self, n: usize, style: &BasisStyle) -> Result<QuotientRing, RingError> {
        if n > self.depth() {
            return Err(RingError::Depth(self.depth()));
        }
        if !self.quotient_is_free(n) {
            return Err(RingError::NotFlat(format!("Ω/I^{n}")));
        }
        let mut elements = Vec::new();
        let mut degrees = Vec::new();
        let mut labels = Vec::new();
        for d in 0..n {
            let b = self.graded_basis(d, style)?;
            degrees.extend(std::iter::repeat_n(d, b.elements.len()));
            elements.extend(b.elements);
            labels.extend(b.labels);
        }
        QuotientRing::new(&self.omega, self.powers[n].clone(), elements, degrees, labels)
    }
}

/// `Ω/K` for a two-sided ideal `K`, with a chosen R-basis of elements of `Ω`.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    omega: GroupRing,
    ideal: Submodule,
    elements: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    labels: Vec<String>,
    solver: Solver,
    /// `left[h]·c` = coordinates of `[h]·ω` when `c` = coordinates of `ω`.
    left: Vec<ModMatrix>,
}

impl QuotientRing {
    pub fn new(
        omega: &GroupRing,
        ideal: Submodule,
        elements: Vec<Vec<u32>>,
        degrees: Vec<usize>,
        labels: Vec<String>,
    ) -> Result<Self, RingError> {
        let ring = omega.ring();
        let dim = elements.len();
        let name = format!("quotient with basis [{}]", labels.join(", "));
        let (free, rank) = is_free_quotient(&omega.full(), &ideal);
        if !free {
            return Err(RingError::NotFlat(name));
        }
        if rank != dim {
            return Err(RingError::NotBasis(name));
        }
        let span = ideal.sum(&Submodule::from_generators(ring, omega.dim(), elements.clone()));
        if span != omega.full() {
            return Err(RingError::NotBasis(name));
        }
        let basis = ModMatrix::from_reduced_rows(ring, omega.dim(), &elements);
        let solver = Solver::with_extra(&basis, &ideal.matrix());
        let mut q = QuotientRing { omega: omega.clone(), ideal, elements, degrees, labels, solver, left: Vec::new() };
        let group = omega.group().clone();
        let gen_mats: Vec<ModMatrix> = group
            .generators()
            .iter()
            .map(|&s| {
                let mut m = ModMatrix::zero(ring, dim, dim);
                for j in 0..dim {
                    let c = q.coords(&omega.left_mul_elem(s, &q.elements[j]));
                    for (i, &x) in c.iter().enumerate() {
                        m.set(i, j, x);
                    }
                }
                m
            })
            .collect();
        let mut left = vec![ModMatrix::identity(ring, dim); group.order()];
        for (g, h, j) in group.cayley_tree() {
            left[g] = left[h].mul(&gen_mats[j]);
        }
        q.left = left;
        Ok(q)
    }

    pub fn omega(&self) -> &GroupRing {
        &self.omega
    }

    pub fn ideal(&self) -> &Submodule {
        &self.ideal
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Indices of basis elements of the given degree.
    pub fn indices_of_degree(&self, d: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    /// Coordinates of an element of `Ω` modulo the ideal.
    pub fn coords(&self, w: &[u32]) -> Vec<u32> {
        self.solver.solve(w).expect("length").expect("basis spans the quotient")
    }

    pub fn element(&self, c: &[u32]) -> Vec<u32> {
        let ring = self.omega.ring();
        let mut out = self.omega.zero();
        for (&a, e) in c.iter().zip(&self.elements) {
            if a != 0 {
                for (o, &x) in out.iter_mut().zip(e) {
                    *o = ring.add(*o, ring.mul(a, x));
                }
            }
        }
        out
    }

    /// Column-convention matrix of left multiplication by `[h]`.
    pub fn left_mul(&self, h: usize) -> &ModMatrix {
        &self.left[h]
    }

    pub fn mul_coords(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.coords(&self.omega.mul(&self.element(a), &self.element(b)))
    }

    /// Row-convention matrix of the projection to a coarser quotient.
    pub fn projection_to(&self, target: &QuotientRing) -> Result<ModMatrix, RingError> {
        if !target.ideal.contains_submodule(&self.ideal) {
            return Err(RingError::Hypothesis("ideal not contained in target ideal".into()));
        }
        let rows: Vec<Vec<u32>> = self.elements.iter().map(|e| target.coords(e)).collect();
        Ok(ModMatrix::from_reduced_rows(self.omega.ring(), target.dim(), &rows))
    }
}

/// The ideal `J = I³ + xyΩ` for `H ≅ (Z/p)²`, with the ring maps to
/// the three cyclic quotients.
#[derive(Clone, Debug)]
pub struct IdealJ {
    pub j: Submodule,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    /// `Ω/J` with basis `{1, x, x², y, y²}` (`{1, x, y}` at `p = 2`).
    pub quotient: QuotientRing,
    /// Coimages `C_i` of `χ`, `ψ`, `χ+ψ` on `H` with the induced ring maps.
    pub cyclic: Vec<(Arc<FiniteGroup>, GroupHom, ModMatrix)>,
}

/// Builds `J` for `H ≅ (Z/p)²` with `x = [hx] − 1`, `y = [hy] − 1`, and checks
/// `J/I³ = R·xy`, `I/J = ⟨x, x², y, y²⟩` and the images `α_i(J)`.
pub fn build_j(filt: &Filtration, hx: usize, hy: usize) -> Result<IdealJ, RingError> {
    let omega = filt.omega();
    let h = omega.group().clone();
    let p = h.p();
    let ring = omega.ring();
    if h.order() != (p * p) as usize || !h.is_abelian() || h.element_order(hx) != p as usize || h.element_order(hy) != p as usize {
        return Err(RingError::Hypothesis("H must be (Z/p)^2".into()));
    }
    if ring.s() != 1 {
        return Err(RingError::Hypothesis("R must be F_p".into()));
    }
    let (x, y) = (omega.var(hx), omega.var(hy));
    let i3 = filt.power(3)?.clone();
    let xy = omega.mul(&x, &y);
    let j = omega.ideal(&i3, std::slice::from_ref(&xy));
    let jq = quotient(&j, &i3)?;
    if jq.invariant_factors() != vec![p as u64] || i3.contains(&xy) {
        return Err(RingError::Hypothesis("J/I^3 is not free of rank one on xy".into()));
    }
    let one = omega.one();
    let x2 = omega.mul(&x, &x);
    let y2 = omega.mul(&y, &y);
    // At p = 2 the squares already lie in J and are dropped.
    let mut span = j.clone();
    let mut basis = (Vec::new(), Vec::new(), Vec::new());
    for (e, d, l) in [(one, 0, "1"), (x.clone(), 1, "x"), (x2, 2, "x^2"), (y.clone(), 1, "y"), (y2, 2, "y^2")] {
        if span.contains(&e) {
            continue;
        }
        span = span.sum(&Submodule::from_generators(ring, omega.dim(), vec![e.clone()]));
        basis.0.push(e);
        basis.1.push(d);
        basis.2.push(l.to_string());
    }
    let quotient_ring = QuotientRing::new(omega, j.clone(), basis.0, basis.1, basis.2)?;
    // Characters of H dual to (hx, hy).
    let mut chi_v = vec![0u32; h.order()];
    let mut psi_v = vec![0u32; h.order()];
    for a in 0..p {
        for b in 0..p {
            let e = h.mul(h.pow(hx, a as u64), h.pow(hy, b as u64));
            chi_v[e] = a;
            psi_v[e] = b;
        }
    }
    let chi = Character::from_values(&h, chi_v, p as u64).map_err(|e| RingError::Hypothesis(e.to_string()))?;
    let psi = Character::from_values(&h, psi_v, p as u64).map_err(|e| RingError::Hypothesis(e.to_string()))?;
    let mut cyclic = Vec::new();
    let expected = [3usize, 3, 2];
    for (i, alpha) in [chi.clone(), psi.clone(), chi.add(&psi)].into_iter().enumerate() {
        let (c, pi) = crate::groups::coimage(&h, &[alpha]).map_err(|e| RingError::Hypothesis(e.to_string()))?;
        let omega_c = GroupRing::new(ring, c.clone());
        let map = omega.induced_ring_map(&pi);
        let image = j.image(&map);
        let fc = augmentation_powers(&omega_c, expected[i]);
        if image != *fc.power(expected[i])? {
            return Err(RingError::Hypothesis(format!("alpha_{}(J) is not I_{}^{}", i + 1, i + 1, expected[i])));
        }
        cyclic.push((c, pi, map));
    }
    Ok(IdealJ { j, x, y, quotient: quotient_ring, cyclic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{coimage, Heisenberg};

    fn f3() -> ModRing {
        ModRing::new(3, 1).unwrap()
    }

    fn ranks(filt: &Filtration) -> Vec<usize> {
        (0..filt.depth()).map(|n| filt.graded_rank(n).unwrap()).collect()
    }

    #[test]
    fn cyclic_filtration() {
        let h = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let omega = GroupRing::new(f3(), h);
        let filt = augmentation_powers(&omega, 3);
        assert!(filt.power(3).unwrap().is_zero());
        assert_eq!(ranks(&filt), vec![1, 1, 1]);
        let omega_aug = omega.augmentation_ideal();
        assert_eq!(omega_aug.log_size(), 2);
        for r in omega_aug.rows() {
            assert_eq!(omega.augmentation(r), 0);
        }
    }

    #[test]
    fn bicyclic_filtration_and_basis() {
        let h = Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap());
        let (a, b) = (h.generators()[0], h.generators()[1]);
        let omega = GroupRing::new(f3(), h);
        let filt = augmentation_powers(&omega, 3);
        assert_eq!(filt.graded_rank(2).unwrap(), 3);
        let basis = filt.graded_basis(2, &BasisStyle::bicyclic(a, b)).unwrap();
        assert_eq!(basis.labels, vec!["x^2", "xy", "y^2"]);
    }

    #[test]
    fn trivial_group_filtration() {
        let omega = GroupRing::new(f3(), Arc::new(FiniteGroup::trivial(3)));
        let filt = augmentation_powers(&omega, 2);
        assert!(filt.power(1).unwrap().is_zero());
        assert!(filt.power(2).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_degree_two_basis() {
        let heis = Heisenberg::new(3).unwrap();
        let omega = GroupRing::new(f3(), heis.group.clone());
        let filt = augmentation_powers(&omega, 3);
        let style = BasisStyle::Heisenberg { x: heis.x, y: heis.y, z: heis.z };
        let b = filt.graded_basis(2, &style).unwrap();
        assert_eq!(b.labels, vec!["x^2", "y^2", "yx", "z"]);
        let trunc = filt.truncation(3, &style).unwrap();
        assert_eq!(trunc.dim(), 7);
        // The defining relation w = (1+y)(1+x)z − (xy − yx) holds in Ω.
        let (x, y, z) = (omega.var(heis.x), omega.var(heis.y), omega.var(heis.z));
        let one = omega.one();
        let lhs = omega.product(&[omega.add(&one, &y), omega.add(&one, &x), z]);
        let w = omega.sub(&lhs, &omega.sub(&omega.mul(&x, &y), &omega.mul(&y, &x)));
        assert!(w.iter().all(|&c| c == 0));
    }

    #[test]
    fn induced_map_is_multiplicative() {
        let h = Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap());
        let omega = GroupRing::new(f3(), h.clone());
        let chi = Character::from_generator_images(&h, &[1, 1], 3).unwrap();
        let (c, pi) = coimage(&h, &[chi]).unwrap();
        let omega_c = GroupRing::new(f3(), c);
        let m = omega.induced_ring_map(&pi);
        for a in 0..h.order() {
            for b in 0..h.order() {
                let (ea, eb) = (omega.elem(a), omega.elem(b));
                let lhs = m.vec_mul(&omega.mul(&ea, &eb));
                let rhs = omega_c.mul(&m.vec_mul(&ea), &m.vec_mul(&eb));
                assert_eq!(lhs, rhs);
            }
        }
        let id = omega.induced_ring_map(&GroupHom::identity(h.clone()));
        assert_eq!(id, ModMatrix::identity(f3(), 9));
    }

    #[test]
    fn ideal_j_structure() {
        let h = Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap());
        let (a, b) = (h.generators()[0], h.generators()[1]);
        let omega = GroupRing::new(f3(), h);
        let filt = augmentation_powers(&omega, 3);
        let j = build_j(&filt, a, b).unwrap();
        assert_eq!(j.quotient.dim(), 5);
        let (c1, _, m1) = &j.cyclic[0];
        let x1 = GroupRing::new(f3(), c1.clone());
        let img_x = m1.vec_mul(&j.x);
        let img_y = m1.vec_mul(&j.y);
        assert!(img_y.iter().all(|&v| v == 0));
        assert!(x1.augmentation(&img_x) == 0 && img_x.iter().any(|&v| v != 0));
        let (_, _, m3) = &j.cyclic[2];
        assert_eq!(m3.vec_mul(&j.x), m3.vec_mul(&j.y));
    }

    #[test]
    fn left_multiplication_matches_group_ring() {
        let heis = Heisenberg::new(3).unwrap();
        let omega = GroupRing::new(f3(), heis.group.clone());
        let filt = augmentation_powers(&omega, 3);
        let q = filt.truncation(3, &BasisStyle::Heisenberg { x: heis.x, y: heis.y, z: heis.z }).unwrap();
        for h in 0..27 {
            for j in 0..q.dim() {
                let direct = q.coords(&omega.left_mul_elem(h, &q.elements()[j]));
                let mut unit = vec![0u32; q.dim()];
                unit[j] = 1;
                assert_eq!(q.left_mul(h).mat_vec(&unit), direct);
            }
        }
    }
}
