//! Runs the acceptance criteria in order and prints one PASS/FAIL line each.
//!
//! Criteria 4, 5 and 6 contain literal claims that do not hold under the sign
//! conventions used here (see `literal_claims.rs`). For those the run checks
//! every other clause and fails only if one of those breaks, or if the literal
//! claim starts to hold.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bockstein::bockstein_verify::{
    bicyclic_family, bocklemma_check, cyclic_family, decompose, elem_abelian_family, heisenberg_family, intro_comparison,
    psi_via_section, verify_degree_one, BocksteinSetup,
};
use bockstein::cohomology::{random_combination, z1_generators, CoboundarySolver, Cochain};
use bockstein::gmodule::GMod;
use bockstein::group_ring::{augmentation_powers, BasisStyle, GroupRing};
use bockstein::groups::{coimage, Character, FiniteGroup, GroupHom, Heisenberg};
use bockstein::massey::{connecting_via_star, PartialDefiningSystem};
use bockstein::vanishing::{enumerate_triple_systems, triple_massey_solve, verify_vanishing, TripleStatus, VanishingError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

type Res<T> = Result<T, Box<dyn std::error::Error>>;
type Criterion = (usize, fn() -> Res<Verdict>, u64);

struct Verdict {
    /// Every clause holds.
    pass: bool,
    /// Every clause outside the documented literal claims holds.
    attainable: bool,
    detail: String,
}

impl Verdict {
    fn plain(pass: bool, detail: String) -> Self {
        Verdict { pass, attainable: pass, detail }
    }
}

const KNOWN_LITERAL_FAILURES: [usize; 3] = [4, 5, 6];

fn f(p: u64) -> bockstein::modular_linalg::ModRing {
    ring(p, 1)
}

fn cyclic(q: u64) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(q).unwrap())
}

fn abelian(orders: &[u64]) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::abelian(orders).unwrap())
}

fn trivial(g: &Arc<FiniteGroup>) -> GMod {
    GMod::trivial(g.clone(), f(g.p() as u64), 1)
}

fn character(g: &Arc<FiniteGroup>, images: &[i64], modulus: u64) -> Character {
    Character::from_generator_images(g, images, modulus).unwrap()
}

fn criterion_1() -> Res<Verdict> {
    let per_ring = 3400;
    let mut bad = Vec::new();
    for (name, r) in [("Z/4", ring(2, 2)), ("Z/8", ring(2, 3)), ("Z/9", ring(3, 2))] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..per_ring {
            if !linalg_agrees(&random_matrix(&mut rng, r)) {
                bad.push(format!("{name} sample {i}"));
            }
        }
    }
    Ok(Verdict::plain(bad.is_empty(), format!("{} matrices over Z/4, Z/8, Z/9 (seed 1); mismatches {:?}", 3 * per_ring, bad)))
}

fn criterion_2() -> Res<Verdict> {
    let heis = Heisenberg::new(3)?;
    let monomial = |g: Arc<FiniteGroup>| {
        let style = BasisStyle::abelian(g.generators().to_vec());
        (g, style)
    };
    let cases: Vec<(&str, (Arc<FiniteGroup>, BasisStyle))> = vec![
        ("Z/3", monomial(cyclic(3))),
        ("Z/9", monomial(cyclic(9))),
        ("(Z/3)^2", monomial(abelian(&[3, 3]))),
        ("U3(F3)", (heis.group.clone(), BasisStyle::Heisenberg { x: heis.x, y: heis.y, z: heis.z })),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, (g, style)) in cases {
        let setup = BocksteinSetup::new(&trivial(&g), GroupHom::identity(g.clone()), 1, style)?;
        let solver = setup.class_solver()?;
        let gens = setup.cocycle_generators();
        let mut ok = solver.is_some();
        let mut agree = true;
        for f in &gens {
            let c = verify_degree_one(&setup, f, solver.as_ref())?;
            ok &= c.class_equal == Some(true);
            if g.is_abelian() {
                agree &= c.algorithms_agree == Some(true);
            }
        }
        pass &= ok && agree;
        notes.push(format!("{name}: {} generators, classes {ok}, algorithms agree {agree}", gens.len()));
    }
    Ok(Verdict::plain(pass, notes.join("; ")))
}

fn criterion_3() -> Res<Verdict> {
    let g = cyclic(9);
    let chi = character(&g, &[1], 3);
    let (setup, family) = cyclic_family(&trivial(&g), &chi, 2)?;
    let solver = setup.class_solver()?;
    let gens = setup.cocycle_generators();
    let mut pass = solver.is_some();
    for f in &gens {
        let (report, _) = decompose(&setup, &family, f, solver.as_ref(), None)?;
        pass &= report.holds() && report.rows.iter().all(|r| r.cochain_literal && r.class_equal == Some(true));
    }
    Ok(Verdict::plain(pass, format!("Z/9 -> Z/3, n = 2, labels {:?}, {} basis cocycles", family.labels, gens.len())))
}

fn criterion_4() -> Res<Verdict> {
    let g = abelian(&[3, 3]);
    let chi = character(&g, &[1, 0], 3);
    let psi = character(&g, &[0, 1], 3);
    let (setup, family) = bicyclic_family(&trivial(&g), &chi, &psi, 2)?;
    let solver = setup.class_solver()?;
    let gens = setup.cocycle_generators();
    let ixy = family.systems.iter().position(|s| s.a() == 1 && s.b() == 1).ok_or("no xy system")?;
    let (mut classes, mut identity, mut pointwise) = (solver.is_some(), true, true);
    for f in &gens {
        let (report, outcomes) = decompose(&setup, &family, f, solver.as_ref(), None)?;
        classes &= report.holds() && report.class_level() && report.rows.iter().all(|r| r.class_equal == Some(true));
        let psi_f = psi_via_section(&setup, f)?;
        let cmp = intro_comparison(&setup, f, &psi_f, &outcomes[ixy], &family.systems[ixy], solver.as_ref())?;
        identity &= cmp.xy_identity && cmp.entry_reading_is_massey;
        pointwise &= cmp.printed_pointwise;
    }
    Ok(Verdict {
        pass: classes && pointwise && identity,
        attainable: classes && identity,
        detail: format!(
            "{} basis cocycles; class-level decomposition {classes}; Ψ_xy + F_ρ = −d(λ_x ψ) {identity}; xy-coefficient = F pointwise {pointwise}",
            gens.len()
        ),
    })
}

fn criterion_5() -> Res<Verdict> {
    let heis = Heisenberg::new(3)?;
    let g = heis.group.clone();
    let (setup, family) = heisenberg_family(&trivial(&g), &heis, GroupHom::identity(g.clone()), 2)?;
    let solver = setup.class_solver()?;
    let labels_ok = setup.top.len() == 4 && family.labels == ["x^2", "y^2", "yx", "z"];
    let gens = setup.cocycle_generators();
    let zero = setup.zero_cochain();
    let (mut decomposition, mut dual, mut pz_row) = (solver.is_some(), true, true);
    let mut evaluation = Vec::new();
    for seed in 0..20u64 {
        let f = random_combination(&gens, &zero, &mut ChaCha8Rng::seed_from_u64(seed));
        let (report, _) = decompose(&setup, &family, &f, solver.as_ref(), Some(seed))?;
        decomposition &= report.holds() && report.class_level() && report.rows.iter().all(|r| r.class_equal == Some(true));
        dual &= report.dual_basis;
        pz_row &= report.evaluation[3] == [0, 0, 0, 1];
        evaluation = report.evaluation;
    }
    Ok(Verdict {
        pass: labels_ok && decomposition && pz_row && dual,
        attainable: labels_ok && decomposition && pz_row,
        detail: format!(
            "rank {} labels {:?}; decomposition (20 seeds) {decomposition}; p_z row {pz_row}; evaluation {:?}; dual basis {dual}",
            setup.top.len(),
            family.labels,
            evaluation
        ),
    })
}

fn criterion_6() -> Res<Verdict> {
    let heis = Heisenberg::new(9)?;
    let g = heis.group.clone();
    let t = GMod::trivial(g.clone(), f(3), 1);
    let (setup, family) = heisenberg_family(&t, &heis, GroupHom::identity(g.clone()), 3)?;
    let rank_ok = setup.top.len() == 6;
    let gens = setup.cocycle_generators();
    let zero = setup.zero_cochain();
    let (mut corrected, mut literal, mut dual) = (true, true, true);
    let mut evaluation = Vec::new();
    for seed in 0..2u64 {
        let f = random_combination(&gens, &zero, &mut ChaCha8Rng::seed_from_u64(seed));
        let (report, _) = decompose(&setup, &family, &f, None, Some(seed))?;
        corrected &= report.holds();
        literal &= report.rows.iter().all(|r| r.cochain_literal);
        dual &= report.dual_basis;
        evaluation = report.evaluation;
    }
    Ok(Verdict {
        pass: rank_ok && corrected && literal && dual,
        attainable: rank_ok && corrected,
        detail: format!(
            "rank {} labels {:?}; corrected cochain decomposition (seeds 0, 1) {corrected}; literal {literal}; evaluation {:?}; dual basis {dual}",
            setup.top.len(),
            family.labels,
            evaluation
        ),
    })
}

fn criterion_7() -> Res<Verdict> {
    let g = abelian(&[5, 5]);
    let (setup, family, dual) = elem_abelian_family(&trivial(&g), GroupHom::identity(g.clone()), 2)?;
    let solver = setup.class_solver()?;
    let gens = setup.cocycle_generators();
    let mut ok = solver.is_some();
    for f in &gens {
        let (report, _) = decompose(&setup, &family, f, solver.as_ref(), None)?;
        ok &= report.holds() && report.class_level() && report.rows.iter().all(|r| r.class_equal == Some(true));
    }
    let n_ok = dual.characters.len() == 3;
    Ok(Verdict::plain(
        n_ok && dual.formula_ok && ok,
        format!("N = {}, gammas {:?}, product formula {}, {} basis cocycles class-level {ok}", dual.characters.len(), dual.gammas, dual.formula_ok, gens.len()),
    ))
}

fn criterion_8() -> Res<Verdict> {
    let z3sq = abelian(&[3, 3]);
    let z9 = cyclic(9);
    let cases = [
        ("(Z/3)^2 cyclic", z3sq.clone(), vec![character(&z3sq, &[1, 0], 3)], (2, 0)),
        ("(Z/3)^2 bicyclic", z3sq.clone(), vec![character(&z3sq, &[1, 0], 3), character(&z3sq, &[0, 1], 3)], (1, 1)),
        ("Z/9 cyclic", z9.clone(), vec![character(&z9, &[1], 3)], (2, 0)),
        ("Z/9 bicyclic", z9.clone(), vec![character(&z9, &[1], 3), character(&z9, &[1], 3)], (1, 1)),
    ];
    let samples = 100;
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, g, chars, (a, b)) in cases {
        let t = trivial(&g);
        let (_, pi) = coimage(&g, &chars)?;
        let chi = chars[0].pushforward(&pi)?;
        let psi = chars.last().unwrap().pushforward(&pi)?;
        let pds = PartialDefiningSystem::binomial(pi, f(3), Some((&chi, a)), (b > 0).then_some((&psi, b)))?;
        let star = pds.star(&t)?;
        let solver = CoboundarySolver::new(&t, 2)?;
        let gens = z1_generators(star.quotient());
        let zero = Cochain::zero(f(3), 1, g.order(), star.quotient().rank());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut corrected, mut class) = (0, 0);
        for _ in 0..samples {
            let kappa = random_combination(&gens, &zero, &mut rng);
            let cmp = connecting_via_star(&pds, &star, &kappa)?;
            corrected += usize::from(cmp.corrected_equal);
            class += usize::from(solver.is_coboundary(&cmp.connecting.sub(&cmp.massey))?);
        }
        pass &= corrected == samples && class == samples;
        notes.push(format!("{name}: classes {class}/{samples}, cochains {corrected}/{samples}"));
    }
    Ok(Verdict::plain(pass, format!("seed 8; {}", notes.join("; "))))
}

fn criterion_9() -> Res<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, g) in [("Z/3", cyclic(3)), ("(Z/3)^2", abelian(&[3, 3]))] {
        let id = GroupHom::identity(g.clone());
        let omega = GroupRing::new(f(3), g.clone());
        let q = augmentation_powers(&omega, 2).truncation(2, &BasisStyle::Generic)?;
        for (mname, a) in [("Ω", GMod::permutation(&id, f(3))), ("Ω/I^2", GMod::from_quotient_ring(&id, &q))] {
            for n in 1..=2 {
                let r = bocklemma_check(&a, n)?;
                pass &= r.holds();
                notes.push(format!("{name} {mname} n={n}: {:?}", r.coker));
            }
        }
    }
    Ok(Verdict::plain(pass, notes.join("; ")))
}

/// Every homomorphism `G → F_p` as a cochain.
fn all_homs(g: &Arc<FiniteGroup>) -> Vec<Cochain> {
    let p = g.p() as u64;
    all_vectors(p as u32, g.generators().len())
        .into_iter()
        .filter_map(|v| {
            let imgs: Vec<i64> = v.iter().map(|&x| x as i64).collect();
            Character::from_generator_images(g, &imgs, p).ok()
        })
        .map(|c| Cochain::from_character(f(p), &c))
        .collect()
}

#[derive(Default)]
struct TripleTally {
    instances: usize,
    skipped: usize,
    solved: usize,
    disagreements: Vec<String>,
}

/// Compares the solver with the exhaustive oracle for one `(χ, ψ, λ)`.
fn triple_case(g: &Arc<FiniteGroup>, chi: &Character, psi: &Character, lambda: &Cochain, tally: &mut TripleTally, name: &str) -> Res<()> {
    let t = trivial(g);
    let solver2 = CoboundarySolver::new(&t, 2)?;
    let systems = match enumerate_triple_systems(g, chi, psi, lambda) {
        Err(VanishingError::Hypothesis(_)) => {
            tally.skipped += 1;
            if !matches!(triple_massey_solve(g, chi, psi, lambda), Err(VanishingError::Hypothesis(_))) {
                tally.disagreements.push(format!("{name}: solver accepted an input the oracle rejects"));
            }
            return Ok(());
        }
        r => r?,
    };
    tally.instances += 1;
    let zeros: Vec<_> = systems.iter().filter(|ds| solver2.is_coboundary(&ds.massey_cocycle()).unwrap()).collect();
    let sol = triple_massey_solve(g, chi, psi, lambda)?;
    let solved = sol.status == TripleStatus::Solved;
    if solved != !zeros.is_empty() {
        tally.disagreements.push(format!("{name}: solver {:?}, oracle {} zero systems", sol.status, zeros.len()));
    }
    if solved {
        tally.solved += 1;
        let ds = sol.system.as_ref().ok_or("solved without a system")?;
        let (c, l, s) = (ds.entry(0, 1).unwrap(), ds.entry(1, 2).unwrap(), ds.entry(2, 3).unwrap());
        let rechecked = verify_vanishing(ds, c, l, s)? && solver2.is_coboundary(&ds.massey_cocycle())?;
        let listed = zeros.iter().any(|z| z.entry(0, 2) == ds.entry(0, 2) && z.entry(1, 3) == ds.entry(1, 3));
        if !(sol.verified && rechecked && listed) {
            tally.disagreements.push(format!("{name}: re-verification {rechecked}, listed among zero systems {listed}"));
        }
    }
    Ok(())
}

fn criterion_10() -> Res<Verdict> {
    let mut notes = Vec::new();
    let mut pass = true;

    let heis3 = Heisenberg::new(3)?;
    let u3 = heis3.group.clone();
    let mut tally = TripleTally::default();
    let psi_c = Cochain::from_character(f(3), &heis3.psi());
    triple_case(&u3, &heis3.chi(), &heis3.psi(), &psi_c, &mut tally, "U3(F3) λ = ψ")?;
    let zero = Cochain::zero(f(3), 1, u3.order(), 1);
    triple_case(&u3, &heis3.chi(), &heis3.psi(), &zero, &mut tally, "U3(F3) λ = 0")?;
    pass &= tally.disagreements.is_empty() && tally.instances == 2;
    notes.push(format!("U3(F3) λ ∈ {{ψ, 0}}: solved {}/{} {:?}", tally.solved, tally.instances, tally.disagreements));

    let d8 = Heisenberg::new(2)?;
    let mut tally = TripleTally::default();
    for (i, lambda) in all_homs(&d8.group).iter().enumerate() {
        triple_case(&d8.group, &d8.chi(), &d8.psi(), lambda, &mut tally, &format!("D8 λ #{i}"))?;
    }
    pass &= tally.disagreements.is_empty() && tally.instances > 0;
    notes.push(format!(
        "D8 every λ: {} admissible, {} rejected, solved {} {:?}",
        tally.instances, tally.skipped, tally.solved, tally.disagreements
    ));

    let order8: Vec<(&str, Arc<FiniteGroup>)> = vec![
        ("Z/8", cyclic(8)),
        ("Z/4 x Z/2", abelian(&[4, 2])),
        ("(Z/2)^3", abelian(&[2, 2, 2])),
        ("D8", d8.group.clone()),
        ("Q8", Arc::new(FiniteGroup::quaternion())),
    ];
    let mut tally = TripleTally::default();
    for (name, g) in &order8 {
        let homs = all_homs(g);
        let chars: Vec<Character> = homs.iter().map(|h| Character::from_values(g, h.values().to_vec(), 2).unwrap()).collect();
        for chi in &chars {
            for psi in &chars {
                if coimage(g, &[chi.clone(), psi.clone()])?.0.order() != 4 {
                    continue;
                }
                for lambda in &homs {
                    triple_case(g, chi, psi, lambda, &mut tally, name)?;
                }
            }
        }
    }
    pass &= tally.disagreements.is_empty();
    notes.push(format!(
        "order 8, all surjective (χ, ψ) and all λ: {} admissible, {} rejected, solved {} {:?}",
        tally.instances, tally.skipped, tally.solved, tally.disagreements
    ));
    Ok(Verdict::plain(pass, notes.join("; ")))
}

fn criterion_11() -> Res<Verdict> {
    let seeds = 0..40u64;
    let groups = zoo();
    let mut failures = Vec::new();
    for (name, g) in &groups {
        for seed in seeds.clone() {
            if !dd_is_zero(g, seed as usize % 6, seed) {
                failures.push(format!("d∘d {name} {seed}"));
            }
            let (cocycle, round) = massey_and_round_trip(g, seed);
            if !cocycle {
                failures.push(format!("massey cocycle {name} {seed}"));
            }
            if !round {
                failures.push(format!("round trip {name} {seed}"));
            }
            if !binmat_multiplicative(g, seed) {
                failures.push(format!("binmat {name} {seed}"));
            }
            if !p_map_equivariant(g, seed) {
                failures.push(format!("p_map {name} {seed}"));
            }
        }
    }
    Ok(Verdict::plain(
        failures.is_empty(),
        format!("seeds {seeds:?} on {} groups; failures {:?}", groups.len(), failures),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, criterion_1, 30),
        (2, criterion_2, 60),
        (3, criterion_3, 60),
        (4, criterion_4, 120),
        (5, criterion_5, 600),
        (6, criterion_6, 1200),
        (7, criterion_7, 300),
        (8, criterion_8, 300),
        (9, criterion_9, 60),
        (10, criterion_10, 600),
        (11, criterion_11, 600),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut ok = true;
    for (n, check, limit) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict::plain(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = verdict.pass && in_time;
        println!(
            "criterion {n} {}: {} ({:.1} s, limit {limit} s)",
            if pass { "PASS" } else { "FAIL" },
            verdict.detail,
            elapsed.as_secs_f64()
        );
        let known = KNOWN_LITERAL_FAILURES.contains(&n);
        if !in_time || !verdict.attainable || (known && verdict.pass) || (!known && !verdict.pass) {
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
