//! Claims that fail under the module map `p([h]) = φ(h)·e·θ(h)^{-1}`. Kept so
//! they can be rerun with `--ignored`; the acceptance run checks the identities
//! that do hold in their place.

use std::sync::Arc;

use bockstein::bockstein_verify::{bicyclic_family, decompose, heisenberg_family, intro_comparison, psi_via_section};
use bockstein::gmodule::GMod;
use bockstein::groups::{Character, FiniteGroup, GroupHom, Heisenberg};
use bockstein::modular_linalg::ModRing;

fn f3() -> ModRing {
    ModRing::new(3, 1).unwrap()
}

#[test]
#[ignore = "the xy-coefficient is -F_ρ - d(λ_x ψ), which is not F"]
fn xy_coefficient_is_f_pointwise() {
    let g = Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap());
    let chi = Character::from_generator_images(&g, &[1, 0], 3).unwrap();
    let psi = Character::from_generator_images(&g, &[0, 1], 3).unwrap();
    let (setup, family) = bicyclic_family(&GMod::trivial(g, f3(), 1), &chi, &psi, 2).unwrap();
    let solver = setup.class_solver().unwrap();
    let ixy = family.systems.iter().position(|s| s.a() == 1 && s.b() == 1).unwrap();
    for f in setup.cocycle_generators() {
        let (_, outcomes) = decompose(&setup, &family, &f, solver.as_ref(), None).unwrap();
        let psi_f = psi_via_section(&setup, &f).unwrap();
        let cmp = intro_comparison(&setup, &f, &psi_f, &outcomes[ixy], &family.systems[ixy], solver.as_ref()).unwrap();
        assert!(cmp.printed_pointwise);
    }
}

fn heisenberg_dual_basis(q: u64, n: usize) {
    let heis = Heisenberg::new(q).unwrap();
    let g = heis.group.clone();
    let (setup, family) = heisenberg_family(&GMod::trivial(g.clone(), f3(), 1), &heis, GroupHom::identity(g), n).unwrap();
    let f = setup.cocycle_generators().remove(0);
    let (report, _) = decompose(&setup, &family, &f, None, None).unwrap();
    assert!(report.dual_basis, "evaluation {:?}", report.evaluation);
}

#[test]
#[ignore = "p_yx(yx) = -1"]
fn heisenberg_degree_two_dual_basis() {
    heisenberg_dual_basis(3, 2);
}

#[test]
#[ignore = "alternating diagonal signs and p_yz(y^2x) = -1; slow"]
fn heisenberg_degree_three_dual_basis() {
    heisenberg_dual_basis(9, 3);
}
