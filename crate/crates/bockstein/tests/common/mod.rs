#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use bockstein::cohomology::{coboundary, is_cocycle, random_combination, z1_generators, Cochain};
use bockstein::gmodule::GMod;
use bockstein::group_ring::{augmentation_powers, BasisStyle, GroupRing};
use bockstein::groups::{coimage, Character, FiniteGroup, GroupHom, Heisenberg};
use bockstein::massey::{binmat, kappa_to_proper, proper_to_kappa, PartialDefiningSystem};
use bockstein::modular_linalg::{howell, kernel, solve, ModMatrix, ModRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ring(p: u64, s: u32) -> ModRing {
    ModRing::new(p, s).unwrap()
}

/// Every vector of `(Z/m)^k`.
pub fn all_vectors(m: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// `{v·M}` by enumerating every coefficient vector.
pub fn brute_span(m: &ModMatrix) -> HashSet<Vec<u32>> {
    let r = m.ring();
    all_vectors(r.modulus(), m.rows()).iter().map(|v| m.vec_mul(v)).collect()
}

pub fn brute_kernel(m: &ModMatrix) -> HashSet<Vec<u32>> {
    let r = m.ring();
    all_vectors(r.modulus(), m.rows()).into_iter().filter(|v| m.vec_mul(v).iter().all(|&x| x == 0)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: ModRing) -> ModMatrix {
    let rows = rng.gen_range(1..=3);
    let cols = rng.gen_range(1..=3);
    let data: Vec<Vec<u32>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..r.modulus())).collect()).collect();
    ModMatrix::from_reduced_rows(r, cols, &data)
}

/// Compares span, kernel and solvability of `m` with enumeration.
pub fn linalg_agrees(m: &ModMatrix) -> bool {
    let r = m.ring();
    let span = brute_span(m);
    let ker = brute_kernel(m);
    let h = howell(m);
    let k = kernel(m);
    let p = r.p() as usize;
    if p.pow(h.log_size()) != span.len() || p.pow(k.log_size()) != ker.len() {
        return false;
    }
    for w in all_vectors(r.modulus(), m.cols()) {
        if h.contains(&w) != span.contains(&w) {
            return false;
        }
        match solve(m, &w).unwrap() {
            Some(x) => {
                if m.vec_mul(&x) != w {
                    return false;
                }
            }
            None => {
                if span.contains(&w) {
                    return false;
                }
            }
        }
    }
    all_vectors(r.modulus(), m.rows()).iter().all(|v| k.contains(v) == ker.contains(v))
}

/// Small p-groups for the property checks.
pub fn zoo() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    vec![
        ("Z/3", Arc::new(FiniteGroup::cyclic(3).unwrap())),
        ("Z/9", Arc::new(FiniteGroup::cyclic(9).unwrap())),
        ("Z/3 x Z/3", Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap())),
        ("U3(F3)", Heisenberg::new(3).unwrap().group),
        ("Q8", Arc::new(FiniteGroup::quaternion())),
        ("D8", Heisenberg::new(2).unwrap().group),
        ("Z/4 x Z/2", Arc::new(FiniteGroup::abelian(&[4, 2]).unwrap())),
    ]
}

/// Module number `kind` in `0..6` over `g`: trivial, regular or `Ω/I²`, over `Z/p` or `Z/p²`.
/// `Ω/I²` falls back to the regular module when it is not free.
pub fn some_module(g: &Arc<FiniteGroup>, kind: usize, rng: &mut ChaCha8Rng) -> GMod {
    let r = ring(g.p() as u64, 1 + (kind / 3) as u32);
    let id = GroupHom::identity(g.clone());
    match kind % 3 {
        0 => GMod::trivial(g.clone(), r, 1 + rng.gen_range(0..2)),
        1 => GMod::permutation(&id, r),
        _ => {
            let omega = GroupRing::new(r, g.clone());
            let filt = augmentation_powers(&omega, 2);
            match filt.truncation(2, &BasisStyle::Generic) {
                Ok(q) => GMod::from_quotient_ring(&id, &q),
                Err(_) => GMod::permutation(&id, r),
            }
        }
    }
}

fn random_cochain(m: &GMod, degree: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let r = m.ring();
    let n = m.group().order();
    let len = n.pow(degree as u32) * m.rank();
    Cochain::from_values(r, degree, n, m.rank(), (0..len).map(|_| rng.gen_range(0..r.modulus())).collect())
}

/// `d(d f) = 0` for random cochains of degree 0 and 1.
pub fn dd_is_zero(g: &Arc<FiniteGroup>, kind: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = some_module(g, kind, &mut rng);
    (0..2).all(|deg| {
        let f = random_cochain(&m, deg, &mut rng);
        coboundary(&m, &coboundary(&m, &f).unwrap()).unwrap().is_zero()
    })
}

/// A nonzero character `G → Z/p` from random generator images.
pub fn random_character(g: &Arc<FiniteGroup>, rng: &mut ChaCha8Rng) -> Option<Character> {
    let p = g.p() as u64;
    let t = GMod::trivial(g.clone(), ring(p, 1), 1);
    let z = z1_generators(&t);
    let c = random_combination(&z, &Cochain::zero(ring(p, 1), 1, g.order(), 1), rng);
    let chi = Character::from_values(g, c.values().to_vec(), p).ok()?;
    (!chi.is_zero()).then_some(chi)
}

/// Binomial system `([χ; a], [ψ; b])` over the coimage of random characters.
pub fn random_system(g: &Arc<FiniteGroup>, seed: u64) -> Option<(PartialDefiningSystem, GMod)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = g.p() as u64;
    let chi = random_character(g, &mut rng)?;
    let psi = random_character(g, &mut rng)?;
    let (_, pi) = coimage(g, &[chi.clone(), psi.clone()]).ok()?;
    let (a, b) = [(1, 0), (2, 0), (1, 1), (0, 2)][rng.gen_range(0..4)];
    if (a.max(b) as u64) >= p {
        return None;
    }
    let c = chi.pushforward(&pi).ok()?;
    let d = psi.pushforward(&pi).ok()?;
    let pds = PartialDefiningSystem::binomial(pi, ring(p, 1), (a > 0).then_some((&c, a)), (b > 0).then_some((&d, b))).ok()?;
    Some((pds, GMod::trivial(g.clone(), ring(p, 1), 1)))
}

/// Massey cocycles of proper systems built from random `κ′` are 2-cocycles, and
/// `κ′ → ρ → κ′` is the identity.
pub fn massey_and_round_trip(g: &Arc<FiniteGroup>, seed: u64) -> (bool, bool) {
    let Some((pds, t)) = random_system(g, seed) else { return (true, true) };
    let star = pds.star(&t).unwrap();
    let gens = z1_generators(star.quotient());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let zero = Cochain::zero(t.ring(), 1, g.order(), star.quotient().rank());
    let kappa = random_combination(&gens, &zero, &mut rng);
    let ds = kappa_to_proper(&pds, &star, &kappa).unwrap();
    let cocycle = is_cocycle(&t, &ds.massey_cocycle()).unwrap();
    let round = proper_to_kappa(&pds, &star, &ds).unwrap() == kappa;
    (cocycle, round)
}

/// `binmat(χ, n)` is a homomorphism for a random character and `n < p`.
pub fn binmat_multiplicative(g: &Arc<FiniteGroup>, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(chi) = random_character(g, &mut rng) else { return true };
    let p = g.p() as usize;
    let n = if p == 2 { 1 } else { rng.gen_range(1..p) };
    let m = binmat(g, &chi, n, ring(p as u64, 1)).unwrap();
    (0..g.order()).all(|x| (0..g.order()).all(|y| m[g.mul(x, y)] == m[x].mul(&m[y])))
}

/// `p_{φ,θ}: Ω/I^{n+1} → 𝔘` intertwines left multiplication with the ⋆-action.
pub fn p_map_equivariant(g: &Arc<FiniteGroup>, seed: u64) -> bool {
    let Some((pds, t)) = random_system(g, seed) else { return true };
    let star = pds.star(&t).unwrap();
    let pi = pds.pi().clone();
    let omega = GroupRing::new(t.ring(), pi.target().clone());
    let filt = augmentation_powers(&omega, pds.n() + 1);
    let q = filt.truncation(pds.n() + 1, &BasisStyle::Generic).unwrap();
    let p = pds.p_map(&q).unwrap();
    GMod::from_quotient_ring(&pi, &q).is_equivariant(star.full(), &p)
}
