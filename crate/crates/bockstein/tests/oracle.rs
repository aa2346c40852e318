mod common;

use std::sync::Arc;

use bockstein::cohomology::{cohomology, z1_generators};
use bockstein::gmodule::GMod;
use bockstein::group_ring::{augmentation_powers, GroupRing};
use bockstein::groups::{Character, FiniteGroup, Heisenberg};
use bockstein::modular_linalg::{howell, kernel, solve, ModMatrix};

use common::*;

fn trivial(g: &Arc<FiniteGroup>) -> GMod {
    GMod::trivial(g.clone(), ring(g.p() as u64, 1), 1)
}

/// Number of homomorphisms `G → Z/p`, by trying every assignment of generator images.
fn count_homs(g: &FiniteGroup) -> usize {
    let p = g.p();
    all_vectors(p, g.generators().len())
        .iter()
        .filter(|imgs| {
            let v: Vec<i64> = imgs.iter().map(|&x| x as i64).collect();
            Character::from_generator_images(g, &v, p as u64).is_ok()
        })
        .count()
}

fn dim(factors: &[u64]) -> usize {
    factors.len()
}

#[test]
fn hom_counts_match_degree_one() {
    for (name, g) in zoo() {
        let z = z1_generators(&trivial(&g));
        let h1 = cohomology(&trivial(&g), 1).unwrap().invariant_factors();
        let homs = count_homs(&g);
        assert_eq!((g.p() as usize).pow(dim(&h1) as u32), homs, "{name}");
        assert_eq!(z.len(), dim(&h1), "{name}");
    }
}

#[test]
fn frozen_h2_dimensions() {
    let cases: Vec<(&str, Arc<FiniteGroup>, usize)> = vec![
        ("Z/3", Arc::new(FiniteGroup::cyclic(3).unwrap()), 1),
        ("Z/9", Arc::new(FiniteGroup::cyclic(9).unwrap()), 1),
        ("Z/27", Arc::new(FiniteGroup::cyclic(27).unwrap()), 1),
        ("Z/3 x Z/3", Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap()), 3),
        ("Z/9 x Z/3", Arc::new(FiniteGroup::abelian(&[9, 3]).unwrap()), 3),
        ("Z/3^3", Arc::new(FiniteGroup::abelian(&[3, 3, 3]).unwrap()), 6),
        ("U3(F3)", Heisenberg::new(3).unwrap().group, 4),
        ("Q8", Arc::new(FiniteGroup::quaternion()), 2),
        ("D8", Heisenberg::new(2).unwrap().group, 3),
        ("Z/5 x Z/5", Arc::new(FiniteGroup::abelian(&[5, 5]).unwrap()), 3),
    ];
    for (name, g, expected) in cases {
        let h = cohomology(&trivial(&g), 2).unwrap();
        assert!(h.invariant_factors().iter().all(|&f| f == g.p() as u64), "{name}");
        assert_eq!(h.invariant_factors().len(), expected, "{name}");
    }
}

#[test]
fn cohomology_of_cyclic_over_prime_power() {
    // Trivial action: H^0 = Z/27, H^1 = Hom(Z/9, Z/27), H^2 = Z/27 / 9.
    let g = Arc::new(FiniteGroup::cyclic(9).unwrap());
    let t = GMod::trivial(g, ring(3, 3), 1);
    assert_eq!(cohomology(&t, 0).unwrap().invariant_factors(), vec![27]);
    assert_eq!(cohomology(&t, 1).unwrap().invariant_factors(), vec![9]);
    assert_eq!(cohomology(&t, 2).unwrap().invariant_factors(), vec![9]);
}

#[test]
fn regular_module_is_acyclic() {
    for (name, g) in zoo() {
        let r = ring(g.p() as u64, 1);
        let m = GMod::permutation(&bockstein::groups::GroupHom::identity(g.clone()), r);
        assert_eq!(cohomology(&m, 0).unwrap().invariant_factors().len(), 1, "{name}");
        assert!(cohomology(&m, 1).unwrap().is_zero(), "{name}");
        if g.order() <= 9 {
            assert!(cohomology(&m, 2).unwrap().is_zero(), "{name}");
        }
    }
}

/// Ranks of `I^k/I^{k+1}`, read off the Jennings series.
#[test]
fn frozen_graded_ranks() {
    let cases: Vec<(&str, Arc<FiniteGroup>, Vec<usize>)> = vec![
        ("Z/3", Arc::new(FiniteGroup::cyclic(3).unwrap()), vec![1, 1, 1, 0]),
        ("Z/9", Arc::new(FiniteGroup::cyclic(9).unwrap()), vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 0]),
        ("Z/3 x Z/3", Arc::new(FiniteGroup::abelian(&[3, 3]).unwrap()), vec![1, 2, 3, 2, 1, 0]),
        ("U3(F3)", Heisenberg::new(3).unwrap().group, vec![1, 2, 4, 4, 5, 4, 4, 2, 1, 0]),
        ("Q8", Arc::new(FiniteGroup::quaternion()), vec![1, 2, 2, 2, 1, 0]),
    ];
    for (name, g, ranks) in cases {
        let omega = GroupRing::new(ring(g.p() as u64, 1), g.clone());
        let filt = augmentation_powers(&omega, ranks.len());
        let got: Vec<usize> = (0..ranks.len()).map(|k| filt.graded_rank(k).unwrap()).collect();
        assert_eq!(got, ranks, "{name}");
    }
}

#[test]
fn frozen_howell_examples() {
    let r = ring(2, 2);
    // [2 0; 0 2] spans 2·(Z/4)^2, order 4.
    let m = ModMatrix::from_rows(r, 2, &[vec![2, 0], vec![0, 2]]);
    assert_eq!(howell(&m).log_size(), 2);
    assert!(!howell(&m).contains(&[1, 0]));
    assert!(solve(&m, &[2, 2]).unwrap().is_some());
    assert!(solve(&m, &[1, 2]).unwrap().is_none());
    // (1 2) over Z/4: kernel of v ↦ v·(1 2) on Z/4 is zero; 2·(1 2) = (2 0).
    let m = ModMatrix::from_rows(r, 2, &[vec![1, 2]]);
    assert!(kernel(&m).is_zero());
    assert!(howell(&m).contains(&[2, 0]));
    // Over Z/9, [3 6] has kernel 3·Z/9.
    let m = ModMatrix::from_rows(ring(3, 2), 2, &[vec![3, 6]]);
    let k = kernel(&m);
    assert_eq!(k.log_size(), 1);
    assert!(k.contains(&[3]) && !k.contains(&[1]));
}
