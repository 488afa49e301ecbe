use outerkit::cochain::{
    check_cocycle3, coboundary, cyclic_generator, eta, find_primitive, inflate, mutation_witness, random_cochain,
    random_cocycle, zeta, Cochain,
};
use outerkit::corpus::{self, CORPUS};
use outerkit::group::FiniteGroup;
use outerkit::groupoid::{Groupoid, GroupoidHom};
use outerkit::phase::Phase;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `a·⌊(b+c)/k⌋ mod k`, the numerator of the cyclic generator over `k`.
fn generator_numerator(k: i64, a: i64, b: i64, c: i64) -> i64 {
    (a * ((b + c) / k)).rem_euclid(k)
}

#[test]
fn pair_two_has_eight_composable_pairs() {
    let g = Groupoid::pair(2);
    assert_eq!(g.count_composable(2, None, None), 8);
    assert_eq!(g.count_composable(3, None, None), 16);
}

proptest! {
    #[test]
    fn composable_counts_match_closed_forms(m in 1usize..5, k in 1usize..5, x in 1usize..4, n in 1usize..4) {
        // A chain of n arrows in pair(m) is a sequence of n + 1 points.
        prop_assert_eq!(Groupoid::pair(m).count_composable(n, None, None), m.pow(n as u32 + 1));
        let bundle = Groupoid::group_bundle(x, &FiniteGroup::cyclic(k));
        prop_assert_eq!(bundle.count_composable(n, None, None), x * k.pow(n as u32));
    }

    #[test]
    fn coboundary_squares_to_one(which in 0..CORPUS.len(), seed: u64) {
        let g = corpus::generate(CORPUS[which]).unwrap().groupoid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b1 = random_cochain(&g, 1, &mut rng);
        let db1 = coboundary(&g, &b1).unwrap();
        prop_assert!(coboundary(&g, &db1).unwrap().agrees_with(&Cochain::trivial(&g, 3), &g));
        let b2 = random_cochain(&g, 2, &mut rng);
        prop_assert!(check_cocycle3(&g, &coboundary(&g, &b2).unwrap()).unwrap().passed());
    }

    #[test]
    fn random_cocycles_pass(which in 0..CORPUS.len(), seed: u64) {
        let ex = corpus::generate(CORPUS[which]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cocycle(&ex.groupoid, &ex.generator_cocycle(), &mut rng);
        let verdict = check_cocycle3(&ex.groupoid, &c).unwrap();
        prop_assert!(verdict.passed());
        prop_assert_eq!(verdict.tuples_checked, ex.groupoid.count_composable(4, None, None));
    }

    #[test]
    fn mutation_witness_agrees_with_full_check(which in 0..CORPUS.len(), seed: u64, pick: usize, j in 1i64..24) {
        let ex = corpus::generate(CORPUS[which]).unwrap();
        let g = &ex.groupoid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cocycle(g, &ex.generator_cocycle(), &mut rng);
        let tuples: Vec<Vec<usize>> = g
            .composable_tuples(3, None, None)
            .into_iter()
            .filter(|t| t.iter().all(|&a| !g.is_unit(a)))
            .collect();
        prop_assume!(!tuples.is_empty());
        let t = &tuples[pick % tuples.len()];
        let delta = Phase::new(j, 24);
        let witness = mutation_witness(g, &c, [t[0], t[1], t[2]], delta);
        let full = check_cocycle3(g, &c.mutated(t, delta)).unwrap();
        prop_assert_eq!(witness.is_some(), !full.passed());
        if let Some(w) = witness {
            prop_assert!(w.contains(&t[0]));
        }
    }

    #[test]
    fn zeta_and_eta_match_closed_form(k in 2i64..7, a in 0i64..7, b in 0i64..7, gamma in 0i64..7, gamma2 in 0i64..7) {
        let (a, b, gamma, gamma2) = (a % k, b % k, gamma % k, gamma2 % k);
        let g = Groupoid::from_group(&FiniteGroup::cyclic(k as usize));
        let c = cyclic_generator(k as usize);
        let e = |x: i64, y: i64, z: i64| generator_numerator(k, x, y, z);
        // Abelian, so every conjugation is the identity.
        let zeta_num = -e(a, b, gamma) + e(a, gamma, b) - e(gamma, a, b);
        let id = |v: i64| v as usize;
        prop_assert_eq!(zeta(&g, &c, id(gamma), id(a), id(b)).unwrap(), Phase::new(zeta_num, k));
        let eta_num = -e(gamma, a, gamma2) + e(gamma, gamma2, a) - e(a, gamma, gamma2);
        prop_assert_eq!(eta(&g, &c, id(gamma), id(gamma2), id(a)).unwrap(), Phase::new(eta_num, k));
    }
}

#[test]
fn cyclic_generator_matches_closed_form_and_is_not_a_coboundary() {
    for k in 2..7usize {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(k));
        let c = cyclic_generator(k);
        for t in g.composable_tuples(3, None, None) {
            let v = generator_numerator(k as i64, t[0] as i64, t[1] as i64, t[2] as i64);
            assert_eq!(c.get(&t), Phase::new(v, k as i64));
        }
        assert!(check_cocycle3(&g, &c).unwrap().passed());
        assert!(find_primitive(&g, &c).unwrap().is_none(), "k = {k}");
        // c^k is trivial in cohomology.
        let ck = (1..k).fold(c.clone(), |acc, _| acc.mul(&c));
        assert!(find_primitive(&g, &ck).unwrap().is_some());
    }
}

#[test]
fn primitive_reproduces_the_coboundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in CORPUS {
        let g = corpus::generate(kind).unwrap().groupoid;
        let c = coboundary(&g, &random_cochain(&g, 2, &mut rng)).unwrap();
        let b = find_primitive(&g, &c).unwrap().expect("a coboundary has a primitive");
        assert!(coboundary(&g, &b).unwrap().agrees_with(&c, &g), "{kind}");
    }
}

#[test]
fn inflation_along_trivial_hom_is_trivial() {
    let g = Groupoid::pair(3);
    let c = inflate(&cyclic_generator(3), &g, &GroupoidHom::trivial(&g));
    assert!(c.agrees_with(&Cochain::trivial(&g, 3), &g));
}

#[test]
fn corrupted_product_is_named() {
    let g = Groupoid::group_bundle(2, &FiniteGroup::cyclic(3));
    let bad = g.with_product_overridden(1, 1, 1);
    let violations = bad.validate();
    assert!(!violations.is_empty());
    assert!(violations.iter().any(|v| v.mentions_pair(1, 1)), "{violations:?}");
}
