//! The generalized Bockstein maps `Ψ^(n): H^1(G, T⊗Ω/I^n) → H^2(G, T)⊗I^n/I^{n+1}`
//! and checks of their descriptions by Massey products.
//!
//! `Ψ^(n)` is computed in two ways: through the section of the Bockstein
//! sequence for any `H`, and by the binomial formula when `H` is abelian.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{augmentation_filtration, coboundary, connecting_cochain, homology_connecting, cup11, cup_left, cup_right, is_cocycle, z1_generators, CoboundarySolver, Cochain, CohomologyError};
use crate::gmodule::{bockstein_ses, GMod, GModSES, ModuleError};
use crate::group_ring::{augmentation_powers, exponent_tuples, BasisStyle, Filtration, GroupRing, QuotientRing, RingError};
use crate::groups::{coimage, decompose_abelian, Character, FiniteGroup, GroupError, GroupHom, Heisenberg};
use crate::massey::{binmat, binomial_table, kappa_to_proper, sequence_map, DefiningSystem, MasseyError, PartialDefiningSystem};
use crate::modular_linalg::{quotient, LinalgError, ModMatrix, ModRing, Solver, Submodule};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("flatness fails for {0}")]
    NotFlat(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("input is not a cocycle")]
    NotCocycle,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Massey(#[from] MasseyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Class-level comparisons are switched on up to this group order.
pub const CLASS_LEVEL_MAX_ORDER: usize = 100;

/// Everything attached to `(G → H, T, n)`: the filtration of `Ω = R[H]`, the
/// sequence `0 → T⊗I^n/I^{n+1} → T⊗Ω/I^{n+1} → T⊗Ω/I^n → 0` and the basis of
/// `Ω/I^{n+1}` it uses.
#[derive(Clone, Debug)]
pub struct BocksteinSetup {
    pub t: GMod,
    pub pi: GroupHom,
    pub n: usize,
    pub style: BasisStyle,
    pub filt: Filtration,
    pub ses: GModSES,
    pub q: QuotientRing,
    pub top: Vec<usize>,
    pub low: Vec<usize>,
}

impl BocksteinSetup {
    pub fn new(t: &GMod, pi: GroupHom, n: usize, style: BasisStyle) -> Result<Self, VerifyError> {
        if n == 0 {
            return Err(VerifyError::Hypothesis("n must be positive".into()));
        }
        if t.group().order() != pi.source().order() {
            return Err(VerifyError::Hypothesis("T must be a module for the source of π".into()));
        }
        let omega = GroupRing::new(t.ring(), pi.target().clone());
        let filt = augmentation_powers(&omega, n + 1);
        for k in [n, n + 1] {
            if !filt.quotient_is_free(k) {
                return Err(VerifyError::NotFlat(format!("Ω/I^{k}")));
            }
        }
        if !filt.graded_is_free(n) {
            return Err(VerifyError::NotFlat(format!("I^{n}/I^{}", n + 1)));
        }
        let (ses, q) = bockstein_ses(t, &filt, n, &style, &pi)?;
        let top = q.indices_of_degree(n);
        let low = (0..q.dim()).filter(|&i| q.degrees()[i] < n).collect();
        Ok(BocksteinSetup { t: t.clone(), pi, n, style, filt, ses, q, top, low })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.t.group()
    }

    pub fn ring(&self) -> ModRing {
        self.t.ring()
    }

    /// Labels of the chosen basis of `I^n/I^{n+1}`.
    pub fn labels(&self) -> Vec<String> {
        self.top.iter().map(|&i| self.q.labels()[i].clone()).collect()
    }

    /// Labels of the basis of `Ω/I^n`.
    pub fn low_labels(&self) -> Vec<String> {
        self.low.iter().map(|&i| self.q.labels()[i].clone()).collect()
    }

    /// The source module `T⊗Ω/I^n`.
    pub fn source(&self) -> &GMod {
        &self.ses.c
    }

    pub fn cocycle_generators(&self) -> Vec<Cochain> {
        z1_generators(&self.ses.c)
    }

    pub fn zero_cochain(&self) -> Cochain {
        Cochain::zero(self.ring(), 1, self.group().order(), self.ses.c.rank())
    }

    /// The `T`-valued coefficient of the `j`-th basis element of `Ω/I^n`.
    pub fn component(&self, f: &Cochain, j: usize) -> Cochain {
        split(f, self.t.rank(), self.low.len(), j)
    }

    /// Image of `f` in `Z^1(G, T)`.
    pub fn lambda(&self, f: &Cochain) -> Cochain {
        self.component(f, 0)
    }

    /// Class-level solver for `T`-valued 2-cochains, when `G` is small enough.
    pub fn class_solver(&self) -> Result<Option<CoboundarySolver>, VerifyError> {
        if self.group().order() > CLASS_LEVEL_MAX_ORDER {
            return Ok(None);
        }
        Ok(Some(CoboundarySolver::new(&self.t, 2)?))
    }
}

/// Component `j` of a cochain valued in `T⊗F` with `F` of rank `k`, `T` major.
fn split(c: &Cochain, r: usize, k: usize, j: usize) -> Cochain {
    let width = r * k;
    let tuples = c.values().len() / width.max(1);
    let mut values = Vec::with_capacity(tuples * r);
    for t in 0..tuples {
        for u in 0..r {
            values.push(c.values()[t * width + u * k + j]);
        }
    }
    Cochain::from_values(c.ring(), c.degree(), c.order(), r, values)
}

/// `Ψ^(n)([f])` on the chosen basis of `I^n/I^{n+1}`.
#[derive(Clone, Debug)]
pub struct BocksteinResult {
    pub labels: Vec<String>,
    pub coefficients: Vec<Cochain>,
    /// The representative valued in `T⊗I^n/I^{n+1}`.
    pub total: Cochain,
}

/// Lift through the section, take `d`, read off the coefficients.
pub fn psi_via_section(setup: &BocksteinSetup, f: &Cochain) -> Result<BocksteinResult, VerifyError> {
    if !is_cocycle(&setup.ses.c, f)? {
        return Err(VerifyError::NotCocycle);
    }
    let total = connecting_cochain(&setup.ses, f)?;
    let k = setup.top.len();
    let coefficients = (0..k).map(|j| split(&total, setup.t.rank(), k, j)).collect();
    Ok(BocksteinResult { labels: setup.labels(), coefficients, total })
}

/// Exponent coordinates of every element of an abelian `H` in the variables.
fn monomial_coordinates(h: &FiniteGroup, vars: &[usize]) -> Result<(Vec<usize>, Vec<Vec<usize>>), VerifyError> {
    if !h.is_abelian() {
        return Err(VerifyError::Hypothesis("H must be abelian".into()));
    }
    let orders: Vec<usize> = vars.iter().map(|&v| h.element_order(v)).collect();
    if orders.iter().product::<usize>() != h.order() {
        return Err(VerifyError::Hypothesis("variables do not give a basis of H".into()));
    }
    let mut coords: Vec<Option<Vec<usize>>> = vec![None; h.order()];
    for idx in 0..h.order() {
        let mut e = vec![0; vars.len()];
        let mut c = idx;
        for (i, &o) in orders.iter().enumerate() {
            e[i] = c % o;
            c /= o;
        }
        let el = vars.iter().zip(&e).fold(0, |acc, (&v, &k)| h.mul(acc, h.pow(v, k as u64)));
        if coords[el].is_some() {
            return Err(VerifyError::Hypothesis("variables are not independent".into()));
        }
        coords[el] = Some(e);
    }
    Ok((orders, coords.into_iter().map(Option::unwrap).collect()))
}

/// Evaluates `Σ_{0<k′≤k} C(χ(g), k′)·g·λ_{k−k′}(h)` for every top-degree `k`.
pub fn psi_abelian_formula(setup: &BocksteinSetup, f: &Cochain) -> Result<BocksteinResult, VerifyError> {
    let BasisStyle::Monomial { vars, .. } = &setup.style else {
        return Err(VerifyError::Hypothesis("the abelian formula needs a monomial basis".into()));
    };
    let h = setup.pi.target();
    let (orders, coords) = monomial_coordinates(h, vars)?;
    let ring = setup.ring();
    let n = setup.n;
    let min_order = *orders.iter().min().unwrap_or(&1) as u128;
    if (n as u128) * (ring.modulus() as u128) >= (ring.p() as u128) * min_order {
        return Err(VerifyError::Hypothesis(format!("n·|R| < p·|A_1| fails for n = {n}")));
    }
    if !is_cocycle(&setup.ses.c, f)? {
        return Err(VerifyError::NotCocycle);
    }
    let k = vars.len();
    let tables: Vec<Vec<Vec<u32>>> = orders.iter().map(|&o| binomial_table(o as u64, n, ring)).collect();
    let mut low_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut j = 0;
    for d in 0..n {
        for e in exponent_tuples(k, d) {
            low_index.insert(e, j);
            j += 1;
        }
    }
    let comps: Vec<Cochain> = (0..setup.low.len()).map(|j| setup.component(f, j)).collect();
    let g = setup.group();
    let order = g.order();
    let r = setup.t.rank();
    let coefficients = exponent_tuples(k, n)
        .into_par_iter()
        .map(|top| {
            // All k′ with 0 < k′ ≤ top.
            let mut terms = Vec::new();
            for idx in 1..(top.iter().map(|&e| e + 1).product::<usize>()) {
                let mut kp = vec![0; k];
                let mut c = idx;
                for i in 0..k {
                    kp[i] = c % (top[i] + 1);
                    c /= top[i] + 1;
                }
                let rest: Vec<usize> = top.iter().zip(&kp).map(|(a, b)| a - b).collect();
                terms.push((kp, low_index[&rest]));
            }
            let mut values = vec![0u32; order * order * r];
            for a in 0..order {
                let cg = &coords[setup.pi.apply(a)];
                for (kp, jl) in &terms {
                    let coef = (0..k).fold(1 % ring.modulus(), |acc, i| ring.mul(acc, tables[i][cg[i]][kp[i]]));
                    if coef == 0 {
                        continue;
                    }
                    for b in 0..order {
                        let v = setup.t.act(a, comps[*jl].at1(b));
                        let o = (a * order + b) * r;
                        for (u, x) in v.into_iter().enumerate() {
                            values[o + u] = ring.add(values[o + u], ring.mul(coef, x));
                        }
                    }
                }
            }
            Cochain::from_values(ring, 2, order, r, values)
        })
        .collect::<Vec<_>>();
    let total = {
        let kk = coefficients.len();
        let mut values = vec![0u32; order * order * r * kk];
        for (jj, c) in coefficients.iter().enumerate() {
            for t in 0..order * order {
                for u in 0..r {
                    values[t * r * kk + u * kk + jj] = c.values()[t * r + u];
                }
            }
        }
        Cochain::from_values(ring, 2, order, r * kk, values)
    };
    Ok(BocksteinResult { labels: setup.labels(), coefficients, total })
}

/// Outcome of `p_{φ,θ}(Ψ^(n)([f])) = (α, (p∘f)_{a+1,1}, β)_ρ` for one system.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralCheck {
    pub label: String,
    /// Pointwise equality of the two 2-cocycles.
    pub cochain_literal: bool,
    /// Pointwise equality after adding `dc`, `c(g) = corner(p(f̃(g))·θ(g))`.
    pub cochain_corrected: bool,
    /// Equality in `H^2(G, T)`, when the group is small enough to decide it.
    pub class_equal: Option<bool>,
}

impl GeneralCheck {
    pub fn holds(&self) -> bool {
        self.cochain_corrected && self.class_equal != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct GeneralOutcome {
    pub check: GeneralCheck,
    /// `p_{φ,θ}` applied to the representative of `Ψ^(n)([f])`.
    pub lhs: Cochain,
    pub massey: Cochain,
    pub correction: Cochain,
    pub system: DefiningSystem,
    /// Values of `p_{φ,θ}` on the basis of `Ω/I^{n+1}`.
    pub p: ModMatrix,
}

pub fn verify_general(
    setup: &BocksteinSetup,
    pds: &PartialDefiningSystem,
    f: &Cochain,
    psi: &BocksteinResult,
    solver: Option<&CoboundarySolver>,
    label: &str,
) -> Result<GeneralOutcome, VerifyError> {
    if pds.n() != setup.n {
        return Err(VerifyError::Hypothesis(format!("system has a + b = {}, expected {}", pds.n(), setup.n)));
    }
    let star = pds.star(&setup.t)?;
    let p = pds.p_map(&setup.q)?;
    let smap = sequence_map(&setup.ses, &setup.q, &p, &star, setup.n)?;
    let lhs = psi.total.map_values(&smap.left);
    let kappa_prime = f.map_values(&smap.right);
    let system = kappa_to_proper(pds, &star, &kappa_prime)?;
    let massey = system.massey_cocycle();
    let order = setup.group().order();
    let r = setup.t.rank();
    let mut cvals = Vec::with_capacity(order * r);
    for g in 0..order {
        let lifted = smap.middle.vec_mul(&setup.ses.lift(f.at1(g)));
        cvals.extend(star.corner(&star.right_mul(&lifted, pds.theta(g))));
    }
    let correction = Cochain::from_values(setup.ring(), 1, order, r, cvals);
    let dc = coboundary(&setup.t, &correction)?;
    let cochain_literal = lhs == massey;
    let cochain_corrected = lhs == massey.add(&dc);
    let class_equal = match solver {
        Some(s) => Some(s.is_coboundary(&lhs.sub(&massey))?),
        None => None,
    };
    let check = GeneralCheck { label: label.to_string(), cochain_literal, cochain_corrected, class_equal };
    Ok(GeneralOutcome { check, lhs, massey, correction, system, p })
}

/// The decomposition of `Ψ^(n)([f])` against a family of partial defining
/// systems, one per basis element.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub instance: String,
    pub seed: Option<u64>,
    pub n: usize,
    pub labels: Vec<String>,
    /// `[p_s(s′)]`, signed representatives.
    pub evaluation: Vec<Vec<i64>>,
    pub dual_basis: bool,
    /// Diagonal of the evaluation matrix when it is diagonal with unit entries.
    pub signs: Option<Vec<i64>>,
    pub evaluation_invertible: bool,
    pub rows: Vec<GeneralCheck>,
    /// `p_s(Ψ)` recomputed from the coefficients agrees with the direct value.
    pub consistent: bool,
    /// Section algorithm against the abelian formula, class by class.
    pub algorithms_agree: Option<bool>,
}

impl DecompositionReport {
    /// The coefficients are `E^{-1}` applied to the Massey products.
    pub fn holds(&self) -> bool {
        self.evaluation_invertible && self.consistent && self.rows.iter().all(GeneralCheck::holds) && self.algorithms_agree != Some(false)
    }

    pub fn class_level(&self) -> bool {
        self.rows.iter().all(|r| r.class_equal.is_some())
    }
}

/// The family of systems together with an optional change of basis of
/// `I^n/I^{n+1}` (row `i` expresses the new basis element `i` in the basis of
/// the setup).
#[derive(Clone, Debug)]
pub struct SystemFamily {
    pub instance: String,
    pub labels: Vec<String>,
    pub systems: Vec<PartialDefiningSystem>,
    pub basis_change: Option<ModMatrix>,
}

fn invert(m: &ModMatrix) -> Result<ModMatrix, VerifyError> {
    let ring = m.ring();
    let solver = Solver::new(m);
    let mut out = ModMatrix::zero(ring, m.rows(), m.cols());
    for i in 0..m.cols() {
        let mut e = vec![0; m.cols()];
        e[i] = 1;
        let x = solver.solve(&e)?.ok_or_else(|| VerifyError::Hypothesis("basis change is not invertible".into()))?;
        out.row_mut(i).copy_from_slice(&x);
    }
    Ok(out)
}

pub fn decompose(
    setup: &BocksteinSetup,
    family: &SystemFamily,
    f: &Cochain,
    solver: Option<&CoboundarySolver>,
    seed: Option<u64>,
) -> Result<(DecompositionReport, Vec<GeneralOutcome>), VerifyError> {
    let ring = setup.ring();
    let psi = psi_via_section(setup, f)?;
    let k = setup.top.len();
    if family.systems.len() != k {
        return Err(VerifyError::Hypothesis(format!("need {k} systems, got {}", family.systems.len())));
    }
    let change = family.basis_change.clone().unwrap_or_else(|| ModMatrix::identity(ring, k));
    let change_inv = invert(&change)?;
    let outcomes: Vec<GeneralOutcome> = family
        .systems
        .iter()
        .zip(&family.labels)
        .map(|(pds, label)| verify_general(setup, pds, f, &psi, solver, label))
        .collect::<Result<_, _>>()?;
    // E[s][i] = p_s(new basis element i).
    let mut eval = ModMatrix::zero(ring, k, k);
    for (s, (out, pds)) in outcomes.iter().zip(&family.systems).enumerate() {
        for i in 0..k {
            let v = (0..k).fold(0, |acc, m| ring.add(acc, ring.mul(change.get(i, m), out.p.get(setup.top[m], pds.b()))));
            eval.set(s, i, v);
        }
    }
    // New coefficients c_i = Σ_m coef_m·Y^{-1}[m][i].
    let new_coefs: Vec<Cochain> = (0..k)
        .map(|i| {
            (0..k).fold(Cochain::zero(ring, 2, setup.group().order(), setup.t.rank()), |acc, m| {
                acc.add(&psi.coefficients[m].scale(change_inv.get(m, i)))
            })
        })
        .collect();
    let consistent = outcomes.iter().enumerate().all(|(s, out)| {
        let recomputed = (0..k).fold(Cochain::zero(ring, 2, setup.group().order(), setup.t.rank()), |acc, i| {
            acc.add(&new_coefs[i].scale(eval.get(s, i)))
        });
        recomputed == out.lhs
    });
    let diagonal = (0..k).all(|s| (0..k).all(|i| s == i || eval.get(s, i) == 0)) && (0..k).all(|s| ring.is_unit(eval.get(s, s)));
    let evaluation_invertible = invert(&eval).is_ok();
    let signs = diagonal.then(|| (0..k).map(|s| ring.signed(eval.get(s, s))).collect());
    let evaluation = (0..k).map(|s| (0..k).map(|i| ring.signed(eval.get(s, i))).collect()).collect();
    let algorithms_agree = match (&setup.style, solver) {
        (BasisStyle::Monomial { .. }, Some(sol)) if setup.pi.target().is_abelian() => match psi_abelian_formula(setup, f) {
            Ok(other) => {
                let mut ok = true;
                for (a, b) in psi.coefficients.iter().zip(&other.coefficients) {
                    ok &= sol.is_coboundary(&a.sub(b))?;
                }
                Some(ok)
            }
            Err(VerifyError::Hypothesis(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let report = DecompositionReport {
        instance: family.instance.clone(),
        seed,
        n: setup.n,
        labels: family.labels.clone(),
        evaluation,
        dual_basis: eval == ModMatrix::identity(ring, k),
        signs,
        evaluation_invertible,
        rows: outcomes.iter().map(|o| o.check.clone()).collect(),
        consistent,
        algorithms_agree,
    };
    Ok((report, outcomes))
}

/// `Ψ^(1)([λ]) = Σ_i (χ_i ∪ λ)·x_i` where `χ_i` is dual to the basis of `I/I^2`.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeOneCheck {
    pub labels: Vec<String>,
    pub cochain_equal: bool,
    pub class_equal: Option<bool>,
    pub algorithms_agree: Option<bool>,
}

/// The characters `χ_i(g)`, the `i`-th coordinate of `[π(g)] − 1` in `I/I^2`.
pub fn degree_one_characters(setup: &BocksteinSetup) -> Vec<Cochain> {
    let ring = setup.ring();
    let order = setup.group().order();
    let omega = setup.filt.omega();
    let coords: Vec<Vec<u32>> = (0..order).map(|g| setup.q.coords(&omega.var(setup.pi.apply(g)))).collect();
    setup
        .top
        .iter()
        .map(|&i| Cochain::from_values(ring, 1, order, 1, coords.iter().map(|c| c[i]).collect()))
        .collect()
}

pub fn verify_degree_one(setup: &BocksteinSetup, f: &Cochain, solver: Option<&CoboundarySolver>) -> Result<DegreeOneCheck, VerifyError> {
    if setup.n != 1 {
        return Err(VerifyError::Hypothesis("needs n = 1".into()));
    }
    let psi = psi_via_section(setup, f)?;
    let chars = degree_one_characters(setup);
    let mut cochain_equal = true;
    let mut class_equal = solver.map(|_| true);
    for (coef, chi) in psi.coefficients.iter().zip(&chars) {
        let expected = cup11(chi, f, &setup.t)?;
        cochain_equal &= *coef == expected;
        if let (Some(s), Some(ok)) = (solver, class_equal.as_mut()) {
            *ok &= s.is_coboundary(&coef.sub(&expected))?;
        }
    }
    let algorithms_agree = match psi_abelian_formula(setup, f) {
        Ok(other) => Some(other.coefficients == psi.coefficients),
        Err(VerifyError::Hypothesis(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(DegreeOneCheck { labels: psi.labels, cochain_equal, class_equal, algorithms_agree })
}

fn find(h: &FiniteGroup, pred: impl Fn(usize) -> bool) -> Result<usize, VerifyError> {
    (0..h.order()).find(|&x| pred(x)).ok_or_else(|| VerifyError::Hypothesis("no element with the required character values".into()))
}

/// `H = coimage(χ)`, basis `x^n`, system `[χ; n]`.
pub fn cyclic_family(t: &GMod, chi: &Character, n: usize) -> Result<(BocksteinSetup, SystemFamily), VerifyError> {
    let g = t.group().clone();
    let (h, pi) = coimage(&g, std::slice::from_ref(chi))?;
    if h.order() as u64 != chi.modulus() {
        return Err(VerifyError::Hypothesis("χ must be surjective".into()));
    }
    let chi_h = chi.pushforward(&pi)?;
    let x = find(&h, |e| chi_h.at(e) == 1)?;
    let setup = BocksteinSetup::new(t, pi.clone(), n, BasisStyle::cyclic(x))?;
    let pds = PartialDefiningSystem::binomial(pi, t.ring(), Some((&chi_h, n)), None)?;
    let family = SystemFamily { instance: format!("cyclic {} -> Z/{}, n = {n}", g.name(), chi.modulus()), labels: setup.labels(), systems: vec![pds], basis_change: None };
    Ok((setup, family))
}

/// `H = coimage(χ, ψ)`, basis `x^a y^b`, systems `([χ; a], [ψ; b])`.
pub fn bicyclic_family(t: &GMod, chi: &Character, psi: &Character, n: usize) -> Result<(BocksteinSetup, SystemFamily), VerifyError> {
    let g = t.group().clone();
    let (h, pi) = coimage(&g, &[chi.clone(), psi.clone()])?;
    if h.order() as u64 != chi.modulus() * psi.modulus() {
        return Err(VerifyError::Hypothesis("(χ, ψ) must be surjective".into()));
    }
    let chi_h = chi.pushforward(&pi)?;
    let psi_h = psi.pushforward(&pi)?;
    let x = find(&h, |e| chi_h.at(e) == 1 && psi_h.at(e) == 0)?;
    let y = find(&h, |e| chi_h.at(e) == 0 && psi_h.at(e) == 1)?;
    let setup = BocksteinSetup::new(t, pi.clone(), n, BasisStyle::bicyclic(x, y))?;
    let systems = (0..=n)
        .rev()
        .map(|a| PartialDefiningSystem::binomial(pi.clone(), t.ring(), Some((&chi_h, a)), Some((&psi_h, n - a))))
        .collect::<Result<Vec<_>, _>>()?;
    let family = SystemFamily {
        instance: format!("bicyclic {} -> Z/{} x Z/{}, n = {n}", g.name(), chi.modulus(), psi.modulus()),
        labels: setup.labels(),
        systems,
        basis_change: None,
    };
    Ok((setup, family))
}

/// The coefficient-reduction homomorphism `U_3(A) → U_3(R)`.
pub fn heisenberg_reduction(heis: &Heisenberg, ring: ModRing) -> Vec<ModMatrix> {
    heis.entries
        .iter()
        .map(|&[a, b, c]| {
            let mut m = ModMatrix::identity(ring, 3);
            m.set(0, 1, a % ring.modulus());
            m.set(1, 2, b % ring.modulus());
            m.set(0, 2, c % ring.modulus());
            m
        })
        .collect()
}

/// The Heisenberg systems for `n ∈ {2, 3}` in the order of `S_n`.
pub fn heisenberg_family(t: &GMod, heis: &Heisenberg, pi: GroupHom, n: usize) -> Result<(BocksteinSetup, SystemFamily), VerifyError> {
    let ring = t.ring();
    if !heis.modulus.is_multiple_of(ring.modulus() as u64) {
        return Err(VerifyError::Hypothesis("R must be a quotient of A".into()));
    }
    if !Arc::ptr_eq(pi.target(), &heis.group) && **pi.target() != *heis.group {
        return Err(VerifyError::Hypothesis("π must land in the Heisenberg group".into()));
    }
    if !(2..=3).contains(&n) {
        return Err(VerifyError::Hypothesis("the Heisenberg systems are defined for n = 2, 3".into()));
    }
    let style = BasisStyle::Heisenberg { x: heis.x, y: heis.y, z: heis.z };
    let setup = BocksteinSetup::new(t, pi.clone(), n, style)?;
    let h = &heis.group;
    let (chi, psi) = (heis.chi(), heis.psi());
    let red = heisenberg_reduction(heis, ring);
    let one = vec![ModMatrix::identity(ring, 1); h.order()];
    let bin = |c: &Character, k: usize| binmat(h, c, k, ring);
    let pairs: Vec<(Vec<ModMatrix>, Vec<ModMatrix>)> = match n {
        2 => vec![(bin(&chi, 2)?, one.clone()), (bin(&psi, 2)?, one.clone()), (bin(&chi, 1)?, bin(&psi, 1)?), (red.clone(), one.clone())],
        3 => vec![
            (bin(&chi, 3)?, one.clone()),
            (red.clone(), bin(&chi, 1)?),
            (bin(&psi, 1)?, bin(&chi, 2)?),
            (bin(&psi, 2)?, bin(&chi, 1)?),
            (bin(&psi, 3)?, one.clone()),
            (bin(&psi, 1)?, red.clone()),
        ],
        _ => unreachable!(),
    };
    let systems = pairs.into_iter().map(|(phi, theta)| PartialDefiningSystem::new(pi.clone(), ring, phi, theta)).collect::<Result<Vec<_>, _>>()?;
    let family = SystemFamily { instance: format!("heisenberg U_3(Z/{}), n = {n}", heis.modulus), labels: setup.labels(), systems, basis_change: None };
    Ok((setup, family))
}

/// Greedy choice of characters `χ_1..χ_N` of an elementary abelian `H` whose
/// `p_{χ,n}` form a basis of `(I^n/I^{n+1})^∨`, and the dual basis `y_i`.
#[derive(Clone, Debug)]
pub struct ElemAbelianDual {
    pub characters: Vec<Character>,
    /// `Γ(χ_i) = (χ_i(γ_1), …, χ_i(γ_r))`.
    pub gammas: Vec<Vec<u32>>,
    /// `P[i][m] = p_{χ_i,n}(x^m)` on the monomial basis.
    pub p_matrix: ModMatrix,
    /// Row `i` is `y_i` on the monomial basis.
    pub dual: ModMatrix,
    /// Every computed `p_{χ,n}` matched `∏ χ(γ_i)^{d_i}`.
    pub formula_ok: bool,
    pub characters_tried: usize,
}

pub fn elem_abelian_family(t: &GMod, pi: GroupHom, n: usize) -> Result<(BocksteinSetup, SystemFamily, ElemAbelianDual), VerifyError> {
    let ring = t.ring();
    let h = pi.target().clone();
    let p = ring.p() as u64;
    if ring.s() != 1 || h.exponent() as u64 != p || !h.is_abelian() {
        return Err(VerifyError::Hypothesis("H must be elementary abelian and R = F_p".into()));
    }
    if n as u64 >= p {
        return Err(VerifyError::Hypothesis(format!("n < p fails for n = {n}, p = {p}")));
    }
    let dec = decompose_abelian(&h)?;
    let r = dec.generators.len();
    for i in 0..r {
        for j in 0..r {
            if dec.characters[i].at(dec.generators[j]) != u32::from(i == j) {
                return Err(VerifyError::Hypothesis("decomposition characters are not dual".into()));
            }
        }
    }
    let setup = BocksteinSetup::new(t, pi.clone(), n, BasisStyle::abelian(dec.generators.clone()))?;
    let big_n = setup.top.len();
    let monomials = exponent_tuples(r, n);
    let mut chosen: Vec<(Character, Vec<u32>, Vec<u32>, PartialDefiningSystem)> = Vec::new();
    let mut span = Submodule::zero(ring, big_n);
    let mut formula_ok = true;
    let mut tried = 0;
    for idx in 1..p.pow(r as u32) {
        if chosen.len() == big_n {
            break;
        }
        tried += 1;
        let mut v = vec![0u32; r];
        let mut c = idx;
        for i in (0..r).rev() {
            v[i] = (c % p) as u32;
            c /= p;
        }
        let chi = (0..r).fold(Character::zero(&h, p), |acc, i| acc.add(&dec.characters[i].scale(v[i] as i64)));
        let pds = PartialDefiningSystem::binomial(pi.clone(), ring, Some((&chi, n)), None)?;
        let pm = pds.p_map(&setup.q)?;
        let row: Vec<u32> = setup.top.iter().map(|&m| pm.get(m, 0)).collect();
        let formula: Vec<u32> = monomials.iter().map(|d| (0..r).fold(1, |acc, i| ring.mul(acc, ring.pow(v[i], d[i] as u64)))).collect();
        formula_ok &= row == formula;
        if span.contains(&row) {
            continue;
        }
        span = span.sum(&Submodule::from_generators(ring, big_n, vec![row.clone()]));
        chosen.push((chi, v, row, pds));
    }
    if chosen.len() < big_n {
        return Err(VerifyError::Hypothesis("characters do not span the dual of I^n/I^{n+1}".into()));
    }
    let p_matrix = ModMatrix::from_reduced_rows(ring, big_n, &chosen.iter().map(|c| c.2.clone()).collect::<Vec<_>>());
    let dual = invert(&p_matrix.transpose())?;
    let labels = (1..=big_n).map(|i| format!("y{i}")).collect();
    let info = ElemAbelianDual {
        characters: chosen.iter().map(|c| c.0.clone()).collect(),
        gammas: chosen.iter().map(|c| c.1.clone()).collect(),
        p_matrix,
        dual: dual.clone(),
        formula_ok,
        characters_tried: tried,
    };
    let family = SystemFamily {
        instance: format!("elementary abelian (Z/{p})^{r}, n = {n}"),
        labels,
        systems: chosen.into_iter().map(|c| c.3).collect(),
        basis_change: Some(dual),
    };
    Ok((setup, family, info))
}

/// The `xy`-coefficient for `n = 2` in the bicyclic case, compared with the
/// cocycle `F(g,h) = χ(g)·gλ_x(h) + ψ(h)·λ_y(g)`.
#[derive(Clone, Debug, Serialize)]
pub struct IntroComparison {
    /// `F` built from the coefficients of `f` as printed.
    pub printed_is_cocycle: bool,
    /// The `xy`-coefficient equals `F` value by value.
    pub printed_pointwise: bool,
    pub printed_class_equal: Option<bool>,
    pub printed_class_equal_negated: Option<bool>,
    /// `F` built from the `(1,3)` and `(2,4)` entries of the attached system
    /// equals its Massey cocycle.
    pub entry_reading_is_massey: bool,
    /// `Ψ_xy + F_ρ = −d(λ_x·ψ)` pointwise.
    pub xy_identity: bool,
}

pub fn intro_comparison(
    setup: &BocksteinSetup,
    f: &Cochain,
    psi_result: &BocksteinResult,
    xy: &GeneralOutcome,
    pds: &PartialDefiningSystem,
    solver: Option<&CoboundarySolver>,
) -> Result<IntroComparison, VerifyError> {
    if setup.n != 2 || pds.a() != 1 || pds.b() != 1 {
        return Err(VerifyError::Hypothesis("needs n = 2 and a = b = 1".into()));
    }
    let labels = setup.labels();
    let ixy = labels.iter().position(|l| l == "xy").ok_or_else(|| VerifyError::Hypothesis("no xy basis element".into()))?;
    let chi = pds.alpha(0);
    let psi = pds.beta(0);
    let (lam_x, lam_y) = (setup.component(f, 1), setup.component(f, 2));
    let t = &setup.t;
    let printed = cup_left(&chi, &lam_x, t)?.add(&cup_right(&lam_y, &psi)?);
    let printed_is_cocycle = coboundary(t, &printed)?.is_zero();
    let coef = &psi_result.coefficients[ixy];
    let printed_pointwise = *coef == printed;
    let printed_class_equal = match solver {
        Some(s) if printed_is_cocycle => Some(s.is_coboundary(&coef.sub(&printed))?),
        _ => None,
    };
    let printed_class_equal_negated = match solver {
        Some(s) if printed_is_cocycle => Some(s.is_coboundary(&coef.add(&printed))?),
        _ => None,
    };
    let rho13 = xy.system.entry(0, 2).unwrap();
    let rho24 = xy.system.entry(1, 3).unwrap();
    let entry_reading = cup_left(&chi, rho24, t)?.add(&cup_right(rho13, &psi)?);
    let entry_reading_is_massey = entry_reading == xy.massey;
    let lx_psi = {
        let r = t.rank();
        let order = setup.group().order();
        let ring = setup.ring();
        let mut values = Vec::with_capacity(order * r);
        for g in 0..order {
            values.extend(lam_x.at1(g).iter().map(|&v| ring.mul(v, psi.scalar(&[g]))));
        }
        Cochain::from_values(ring, 1, order, r, values)
    };
    let xy_identity = coef.add(&xy.massey) == coboundary(t, &lx_psi)?.neg();
    Ok(IntroComparison { printed_is_cocycle, printed_pointwise, printed_class_equal, printed_class_equal_negated, entry_reading_is_massey, xy_identity })
}

/// Invariant factors of `coker(∂_n)` for the `H`-homology of
/// `0 → A⊗I^n/I^{n+1} → A⊗Ω/I^{n+1} → A⊗Ω/I^n → 0`, and of `I^nA/I^{n+1}A`.
#[derive(Clone, Debug, Serialize)]
pub struct BocklemmaReport {
    pub n: usize,
    pub coker: Vec<u64>,
    pub graded: Vec<u64>,
}

impl BocklemmaReport {
    pub fn holds(&self) -> bool {
        self.coker == self.graded
    }
}

/// `a` is a module over its own group `H`.
pub fn bocklemma_check(a: &GMod, n: usize) -> Result<BocklemmaReport, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Hypothesis("n must be positive".into()));
    }
    let h = a.group().clone();
    let omega = GroupRing::new(a.ring(), h.clone());
    let filt = augmentation_powers(&omega, n + 1);
    let (ses, _) = bockstein_ses(a, &filt, n, &BasisStyle::Generic, &GroupHom::identity(h))?;
    let coker = homology_connecting(&ses)?.coker.invariant_factors();
    let powers = augmentation_filtration(a, n + 1);
    let graded = quotient(&powers[n], &powers[n + 1])?.invariant_factors();
    Ok(BocklemmaReport { n, coker, graded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::random_combination;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> ModRing {
        ModRing::new(3, 1).unwrap()
    }

    #[test]
    fn degree_one_is_cup_product() {
        let (g, chars) = FiniteGroup::abelian_with_coordinates(&[3, 3]).unwrap();
        let g = Arc::new(g);
        let t = GMod::trivial(g.clone(), f3(), 1);
        let (setup, _) = bicyclic_family(&t, &chars[0], &chars[1], 1).unwrap();
        let gens = setup.cocycle_generators();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_combination(&gens, &setup.zero_cochain(), &mut rng);
        let psi = psi_via_section(&setup, &f).unwrap();
        let lam = setup.lambda(&f);
        for (i, c) in chars.iter().enumerate() {
            let chi = Cochain::from_character(f3(), c);
            assert_eq!(psi.coefficients[i], cup11(&chi, &lam, &t).unwrap());
        }
        let other = psi_abelian_formula(&setup, &f).unwrap();
        assert_eq!(other.coefficients, psi.coefficients);
    }

    #[test]
    fn zero_cocycle_gives_zero() {
        let g = Arc::new(FiniteGroup::cyclic(9).unwrap());
        let chi = Character::from_generator_images(&g, &[1], 3).unwrap();
        let t = GMod::trivial(g.clone(), f3(), 1);
        let (setup, family) = cyclic_family(&t, &chi, 2).unwrap();
        let f = setup.zero_cochain();
        let solver = setup.class_solver().unwrap();
        let (report, _) = decompose(&setup, &family, &f, solver.as_ref(), None).unwrap();
        assert!(report.holds());
        assert!(report.dual_basis);
        assert!(psi_via_section(&setup, &f).unwrap().total.is_zero());
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let chi = Character::from_generator_images(&g, &[1], 3).unwrap();
        let t = GMod::trivial(g.clone(), f3(), 1);
        let (setup, _) = cyclic_family(&t, &chi, 1).unwrap();
        let bad = Cochain::from_fn(f3(), 1, 3, 1, |a| vec![u32::from(a[0] == 1)]);
        assert!(matches!(psi_via_section(&setup, &bad), Err(VerifyError::NotCocycle)));
    }

    #[test]
    fn bocklemma_on_regular_module() {
        let f3 = ModRing::new(3, 1).unwrap();
        let h = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let a = GMod::permutation(&GroupHom::identity(h), f3);
        for n in 1..=2 {
            let r = bocklemma_check(&a, n).unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.graded, vec![3]);
        }
    }
}
