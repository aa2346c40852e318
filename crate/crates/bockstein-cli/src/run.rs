use std::collections::BTreeMap;

use bockstein::bockstein_verify::{
    bicyclic_family, bocklemma_check, cyclic_family, decompose, elem_abelian_family, heisenberg_family, psi_via_section, verify_general,
    BocksteinSetup, SystemFamily, VerifyError,
};
use bockstein::cohomology::{cohomology, cup_left, random_combination, z1_generators, CoboundarySolver, Cochain, CohomologyError};
use bockstein::gmodule::GMod;
use bockstein::gmodule::ModuleError;
use bockstein::group_ring::{BasisStyle, RingError};
use bockstein::groups::{coimage, Character, GroupHom};
use bockstein::massey::{connecting_via_star, MasseyError, PartialDefiningSystem};
use bockstein::modular_linalg::ModRing;
use bockstein::vanishing::{
    bicyclic_property_check, commdiag_check, cyclic_lift, galois_type_test, triple_massey_solve, triple_system, TripleRoute, TripleStatus,
    VanishingError,
};
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::job::Instance;
use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    General,
    Cyclic,
    Bicyclic,
    Elemabelian,
    Heisenberg,
    Connecting,
    Bocklemma,
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::NotFlat(_) | VerifyError::Hypothesis(_) => Failure::Guard(e.to_string()),
            VerifyError::Group(_) | VerifyError::NotCocycle => Failure::Input(e.to_string()),
            VerifyError::Cohomology(c) => c.into(),
            VerifyError::Massey(m) => m.into(),
            VerifyError::Ring(r) | VerifyError::Module(ModuleError::Ring(r)) => r.into(),
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        match e {
            RingError::Linalg(_) => Failure::Assertion(e.to_string()),
            _ => Failure::Guard(e.to_string()),
        }
    }
}

impl From<CohomologyError> for Failure {
    fn from(e: CohomologyError) -> Self {
        match e {
            CohomologyError::TooLarge(_) | CohomologyError::Degree(_) => Failure::Guard(e.to_string()),
            CohomologyError::Mismatch | CohomologyError::NotCocycle | CohomologyError::NotNormalized => Failure::Input(e.to_string()),
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<MasseyError> for Failure {
    fn from(e: MasseyError) -> Self {
        match e {
            MasseyError::Hypothesis(_) => Failure::Guard(e.to_string()),
            MasseyError::Shape(_) | MasseyError::CocycleLaw(..) | MasseyError::NotHomomorphism(..) => Failure::Input(e.to_string()),
            MasseyError::Cohomology(c) => c.into(),
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<VanishingError> for Failure {
    fn from(e: VanishingError) -> Self {
        match e {
            VanishingError::Hypothesis(_) => Failure::Guard(e.to_string()),
            VanishingError::Verify(v) => v.into(),
            VanishingError::Cohomology(c) => c.into(),
            VanishingError::Massey(m) => m.into(),
            VanishingError::Group(_) => Failure::Input(e.to_string()),
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

pub type Outcome = Result<(bool, Value), Failure>;

fn seeds(inst: &Instance) -> Vec<u64> {
    if inst.spec.seeds.is_empty() {
        vec![0]
    } else {
        inst.spec.seeds.clone()
    }
}

/// `samples` random cocycles per seed.
fn draws(inst: &Instance, gens: &[Cochain], zero: &Cochain) -> Vec<(u64, Cochain)> {
    let mut out = Vec::new();
    for seed in seeds(inst) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..inst.spec.samples {
            out.push((seed, random_combination(gens, zero, &mut rng)));
        }
    }
    out
}

fn hom(ring: ModRing, chi: &Character) -> Result<Cochain, Failure> {
    if chi.modulus() != ring.modulus() as u64 {
        return Err(Failure::Input(format!("characters must have modulus {}", ring.modulus())));
    }
    Ok(Cochain::from_character(ring, chi))
}

pub fn cohomology_cmd(inst: &Instance) -> Outcome {
    let m = inst.module()?;
    let mut groups = BTreeMap::new();
    for &d in &inst.spec.degrees {
        let h = cohomology(&m, d)?;
        groups.insert(format!("H{d}"), json!({ "invariant_factors": h.invariant_factors() }));
    }
    Ok((true, json!({ "group": inst.group.name(), "order": inst.group.order(), "module_rank": m.rank(), "cohomology": groups })))
}

pub fn cup_cmd(inst: &Instance) -> Outcome {
    let chars = inst.need_characters(2)?;
    let t = GMod::trivial(inst.group.clone(), inst.ring, 1);
    let c = cup_left(&hom(inst.ring, &chars[0])?, &hom(inst.ring, &chars[1])?, &t)?;
    let h2 = cohomology(&t, 2)?;
    let class = h2.class_of(&c)?;
    let zero = class.iter().all(|&x| x == 0);
    Ok((true, json!({ "h2_invariant_factors": h2.invariant_factors(), "class": class, "zero": zero })))
}

/// Setup on `T = R^rank` matching the number of characters.
fn setup_for(inst: &Instance, n: usize) -> Result<BocksteinSetup, Failure> {
    let t = inst.trivial();
    let find = |h: &bockstein::groups::FiniteGroup, pred: &dyn Fn(usize) -> bool| {
        (0..h.order()).find(|&e| pred(e)).ok_or_else(|| Failure::Guard("characters are not onto their coimage basis".into()))
    };
    let (pi, style) = match inst.characters.len() {
        0 => {
            let pi = GroupHom::identity(inst.group.clone());
            let style = match &inst.heisenberg {
                Some(h) => BasisStyle::Heisenberg { x: h.x, y: h.y, z: h.z },
                None => BasisStyle::Generic,
            };
            (pi, style)
        }
        1 => {
            let (h, pi) = coimage(&inst.group, &inst.characters).map_err(|e| Failure::Input(e.to_string()))?;
            let c = inst.characters[0].pushforward(&pi).map_err(|e| Failure::Input(e.to_string()))?;
            let x = find(&h, &|e| c.at(e) == 1)?;
            (pi, BasisStyle::cyclic(x))
        }
        2 => {
            let (h, pi) = coimage(&inst.group, &inst.characters).map_err(|e| Failure::Input(e.to_string()))?;
            let c = inst.characters[0].pushforward(&pi).map_err(|e| Failure::Input(e.to_string()))?;
            let d = inst.characters[1].pushforward(&pi).map_err(|e| Failure::Input(e.to_string()))?;
            let x = find(&h, &|e| c.at(e) == 1 && d.at(e) == 0)?;
            let y = find(&h, &|e| c.at(e) == 0 && d.at(e) == 1)?;
            (pi, BasisStyle::bicyclic(x, y))
        }
        k => return Err(Failure::Input(format!("at most two characters, got {k}"))),
    };
    Ok(BocksteinSetup::new(&t, pi, n, style)?)
}

pub fn bockstein_cmd(inst: &Instance) -> Outcome {
    let setup = setup_for(inst, inst.spec.n)?;
    let gens = setup.cocycle_generators();
    let inputs: Vec<(Option<u64>, Cochain)> = if inst.spec.seeds.is_empty() {
        gens.iter().cloned().map(|g| (None, g)).collect()
    } else {
        draws(inst, &gens, &setup.zero_cochain()).into_iter().map(|(s, f)| (Some(s), f)).collect()
    };
    let h2 = cohomology(&setup.t, 2)?;
    let mut rows = Vec::new();
    for (seed, f) in inputs {
        let psi = psi_via_section(&setup, &f)?;
        let mut table = BTreeMap::new();
        for (label, c) in psi.labels.iter().zip(&psi.coefficients) {
            table.insert(label.clone(), h2.class_of(c)?);
        }
        rows.push(json!({ "seed": seed, "coefficients": table }));
    }
    Ok((
        true,
        json!({
            "n": setup.n,
            "labels": setup.labels(),
            "source_labels": setup.low_labels(),
            "h2_invariant_factors": h2.invariant_factors(),
            "rows": rows,
        }),
    ))
}

pub fn massey_cmd(inst: &Instance) -> Outcome {
    let chars = inst.need_characters(3)?;
    let t = GMod::trivial(inst.group.clone(), inst.ring, 1);
    let (chi, lambda, psi) = (hom(inst.ring, &chars[0])?, hom(inst.ring, &chars[1])?, hom(inst.ring, &chars[2])?);
    let solver = CoboundarySolver::new(&t, 2)?;
    let free = |given: &Option<Vec<i64>>, target: Cochain, what: &str| -> Result<Cochain, Failure> {
        match given {
            Some(v) => inst.cochain(v),
            None => solver.solve(&target.neg())?.ok_or_else(|| Failure::Guard(format!("{what} is not zero in H^2"))),
        }
    };
    let r02 = free(&inst.spec.rho02, cup_left(&chi, &lambda, &t)?, "χ ∪ λ")?;
    let r13 = free(&inst.spec.rho13, cup_left(&lambda, &psi, &t)?, "λ ∪ ψ")?;
    let ds = triple_system(&t, &chi, &lambda, &psi, &r02, &r13)?;
    let h2 = cohomology(&t, 2)?;
    let class = h2.class_of(&ds.massey_cocycle())?;
    let zero = class.iter().all(|&x| x == 0);
    Ok((true, json!({ "rho02": r02.values(), "rho13": r13.values(), "class": class, "zero": zero })))
}

fn class_solver(setup: &BocksteinSetup) -> Result<Option<CoboundarySolver>, Failure> {
    Ok(setup.class_solver()?)
}

fn run_family(inst: &Instance, setup: &BocksteinSetup, family: &SystemFamily) -> Outcome {
    let solver = class_solver(setup)?;
    let mut reports = Vec::new();
    let mut pass = true;
    for (seed, f) in draws(inst, &setup.cocycle_generators(), &setup.zero_cochain()) {
        let (report, _) = decompose(setup, family, &f, solver.as_ref(), Some(seed))?;
        pass &= report.holds();
        if inst.spec.literal {
            pass &= report.dual_basis && report.rows.iter().all(|r| r.cochain_literal);
        }
        reports.push(report);
    }
    Ok((pass, json!({ "instance": family.instance, "labels": family.labels, "reports": reports })))
}

fn pushed(inst: &Instance, pi: &GroupHom, i: usize) -> Result<Character, Failure> {
    inst.characters[i].pushforward(pi).map_err(|e| Failure::Input(e.to_string()))
}

/// `([χ; a], [ψ; b])` over the coimage of the characters.
fn binomial_system(inst: &Instance, pi: &GroupHom) -> Result<(PartialDefiningSystem, usize, usize), Failure> {
    let a = inst.spec.a.unwrap_or(inst.spec.n);
    let b = inst.spec.b.unwrap_or(0);
    let chi = if a > 0 { Some(pushed(inst, pi, 0)?) } else { None };
    let psi = if b > 0 {
        if inst.characters.len() < 2 {
            return Err(Failure::Input("b > 0 needs a second character".into()));
        }
        Some(pushed(inst, pi, 1)?)
    } else {
        None
    };
    let pds = PartialDefiningSystem::binomial(pi.clone(), inst.ring, chi.as_ref().map(|c| (c, a)), psi.as_ref().map(|c| (c, b)))?;
    Ok((pds, a, b))
}

pub fn verify_cmd(inst: &Instance, target: Target) -> Outcome {
    let t = inst.trivial();
    let n = inst.spec.n;
    match target {
        Target::Cyclic => {
            let (setup, family) = cyclic_family(&t, &inst.need_characters(1)?[0], n)?;
            run_family(inst, &setup, &family)
        }
        Target::Bicyclic => {
            let c = inst.need_characters(2)?;
            let (setup, family) = bicyclic_family(&t, &c[0], &c[1], n)?;
            run_family(inst, &setup, &family)
        }
        Target::Heisenberg => {
            let heis = inst.heisenberg.as_ref().ok_or_else(|| Failure::Input("verify heisenberg needs a heisenberg group".into()))?;
            let (setup, family) = heisenberg_family(&t, heis, GroupHom::identity(inst.group.clone()), n)?;
            run_family(inst, &setup, &family)
        }
        Target::Elemabelian => {
            let (setup, family, dual) = elem_abelian_family(&t, inst.projection()?, n)?;
            let (pass, mut value) = run_family(inst, &setup, &family)?;
            value["characters"] = json!(dual.characters.iter().map(|c| c.values().to_vec()).collect::<Vec<_>>());
            value["gammas"] = json!(dual.gammas);
            value["dual_basis"] = json!(dual.dual.to_rows());
            value["formula_ok"] = json!(dual.formula_ok);
            Ok((pass && dual.formula_ok, value))
        }
        Target::General => {
            let setup = setup_for(inst, n)?;
            let (pds, a, b) = binomial_system(inst, &setup.pi)?;
            let solver = class_solver(&setup)?;
            let mut checks = Vec::new();
            let mut pass = true;
            for (seed, f) in draws(inst, &setup.cocycle_generators(), &setup.zero_cochain()) {
                let psi = psi_via_section(&setup, &f)?;
                let out = verify_general(&setup, &pds, &f, &psi, solver.as_ref(), &format!("seed {seed}"))?;
                pass &= out.check.holds();
                checks.push(out.check);
            }
            Ok((pass, json!({ "a": a, "b": b, "checks": checks })))
        }
        Target::Connecting => {
            let pi = inst.projection()?;
            let (pds, a, b) = binomial_system(inst, &pi)?;
            let star = pds.star(&t)?;
            let solver = CoboundarySolver::new(&t, 2)?;
            let gens = z1_generators(star.quotient());
            let zero = Cochain::zero(inst.ring, 1, inst.group.order(), star.quotient().rank());
            let (mut corrected, mut class) = (0usize, 0usize);
            let draws = draws(inst, &gens, &zero);
            for (_, kappa) in &draws {
                let cmp = connecting_via_star(&pds, &star, kappa)?;
                corrected += usize::from(cmp.corrected_equal);
                class += usize::from(solver.is_coboundary(&cmp.connecting.sub(&cmp.massey))?);
            }
            let total = draws.len();
            Ok((
                corrected == total && class == total,
                json!({ "a": a, "b": b, "samples": total, "cochain_corrected": corrected, "class_equal": class }),
            ))
        }
        Target::Bocklemma => {
            let a = inst.module()?;
            if inst.projection()?.target().order() != inst.group.order() {
                return Err(Failure::Input("bocklemma works over the group itself; give no characters".into()));
            }
            let mut reports = Vec::new();
            let mut pass = true;
            for k in 1..=n {
                let r = bocklemma_check(&a, k)?;
                pass &= r.holds();
                reports.push(r);
            }
            Ok((pass, json!({ "module_rank": a.rank(), "reports": reports })))
        }
    }
}

pub fn galois_type_cmd(inst: &Instance) -> Outcome {
    let chi = &inst.need_characters(1)?[0];
    let f = ModRing::new(inst.spec.ring.p, 1).map_err(|e| Failure::Input(e.to_string()))?;
    let report = galois_type_test(&inst.group, chi, f)?;
    let mut pass = report.complex_h1 && report.complex_h2;
    let mut value = json!({ "sequence": report });
    if inst.spec.lambda.is_some() {
        let lift = cyclic_lift(&inst.group, chi, &inst.lambda()?, inst.spec.n)?;
        pass &= lift.stages.iter().all(|s| s.formula_matches);
        value["lift"] = json!({
            "reached": lift.reached,
            "stages": lift.stages,
            "obstruction": lift.obstruction.as_ref().map(|c| c.values().to_vec()),
        });
    }
    Ok((pass, value))
}

pub fn triple_cmd(inst: &Instance) -> Outcome {
    let c = inst.need_characters(2)?;
    let lambda = inst.lambda()?;
    let sol = triple_massey_solve(&inst.group, &c[0], &c[1], &lambda)?;
    let report = sol.report();
    let mut pass = sol.connecting_consistent != Some(false) && (sol.status == TripleStatus::Obstructed || sol.verified);
    let mut value = json!({ "solution": report });
    if let Some(ds) = &sol.system {
        value["rho02"] = json!(ds.entry(0, 2).map(|e| e.values().to_vec()));
        value["rho13"] = json!(ds.entry(1, 3).map(|e| e.values().to_vec()));
    }
    if sol.route == TripleRoute::Bicyclic {
        let cd = commdiag_check(&inst.group, &c[0], &c[1])?;
        pass &= cd.commutes;
        value["commdiag"] = json!(cd);
        if let Some(nu) = &sol.nu {
            let prop = bicyclic_property_check(&inst.group, &c[0], &c[1], &lambda, nu)?;
            pass &= prop.consistent();
            value["bicyclic_property"] = json!(prop);
        }
    }
    Ok((pass, value))
}
