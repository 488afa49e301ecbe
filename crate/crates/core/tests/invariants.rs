use std::collections::BTreeSet;

use outerkit::cochain::Cochain;
use outerkit::group::FiniteGroup;
use outerkit::invariants::{
    coboundary_perturb, random_z, satisfies_cc, search_scalar, CharCocycle, CoefficientBundle, DEFAULT_SEARCH_CAP,
};
use outerkit::quotient::{check_quotient_layer, check_trivial_normal, quotient_outcome};
use outerkit::suites::{Reference, REFERENCE_ROOTS, REFERENCE_WINDOW};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A scalar solution on `ℤ/4` with `N = {0, 2}` in quarter turns:
/// `(λ(2,1), λ(2,2), λ(2,3), μ(2,2), d(2,−2), d(2,−1), d(2,1), d(2,2))`.
type Quarters = [i64; 8];

/// Brute force over every normalized scalar assignment with values in the
/// fourth roots of unity, `d` free on the whole window, for `c` given in
/// quarter turns. The group is abelian, `θ` and `β` are trivial, so the
/// relations reduce to additive congruences mod 4.
fn oracle(c: impl Fn(i64, i64, i64) -> i64) -> BTreeSet<Quarters> {
    let md = |v: i64| v.rem_euclid(4);
    let mut out = BTreeSet::new();
    for code in 0..4i64.pow(8) {
        let v: Quarters = std::array::from_fn(|i| (code / 4i64.pow(i as u32)) % 4);
        let lambda = |n: i64, g: i64| {
            if n == 0 || g % 4 == 0 {
                0
            } else {
                v[(g % 4 - 1) as usize]
            }
        };
        let mu = |m: i64, n: i64| if m == 0 || n == 0 { 0 } else { v[3] };
        let d = |n: i64, t: i64| match (n, t) {
            (0, _) | (_, 0) => 0,
            (_, -2) => v[4],
            (_, -1) => v[5],
            (_, 1) => v[6],
            (_, 2) => v[7],
            _ => unreachable!(),
        };
        let nn = [0, 2];
        let ok_mu_flow = nn.iter().all(|&m| {
            nn.iter()
                .all(|&n| (-2..=2).all(|t| md(d(m, t) + d(n, t) - d((m + n) % 4, t)) == 0))
        });
        let ok_assoc = nn.iter().all(|&l| {
            nn.iter().all(|&m| {
                nn.iter()
                    .all(|&n| md(mu(l, m) + mu((l + m) % 4, n) - c(l, m, n) - mu(m, n) - mu(l, (m + n) % 4)) == 0)
            })
        });
        let ok_lambda_cocycle = nn.iter().all(|&n| {
            (0..4).all(|g| {
                (0..4).all(|h| {
                    md(lambda(n, (g + h) % 4) + c(g, n, h) - c(n, g, h) - c(g, h, n) - lambda(n, h) - lambda(n, g)) == 0
                })
            })
        });
        let ok_lambda_mu = nn.iter().all(|&m| {
            nn.iter().all(|&n| {
                (0..4).all(|g| {
                    md(lambda((m + n) % 4, g) - lambda(m, g) - lambda(n, g) - c(m, g, n) + c(g, m, n) + c(m, n, g)) == 0
                })
            })
        });
        let ok_inner = nn
            .iter()
            .all(|&m| nn.iter().all(|&n| md(lambda(n, m) - mu(m, n) + mu(n, m)) == 0));
        let ok_d = nn.iter().all(|&n| {
            (-2..=2i64).all(|t| (-2..=2i64).all(|s| (t + s).abs() > 2 || md(d(n, t + s) - d(n, s) - d(n, t)) == 0))
        });
        if ok_mu_flow && ok_assoc && ok_lambda_cocycle && ok_lambda_mu && ok_inner && ok_d {
            out.insert(v);
        }
    }
    out
}

fn as_quarters(chi: &CharCocycle) -> Quarters {
    let q = |v: &Vec<outerkit::phase::Phase>| {
        let a = v[0].angle() * 4;
        assert!(a.is_integer());
        a.to_integer().rem_euclid(4)
    };
    [
        q(chi.lambda(2, 1)),
        q(chi.lambda(2, 2)),
        q(chi.lambda(2, 3)),
        q(chi.mu(2, 2)),
        q(chi.d(2, -2)),
        q(chi.d(2, -1)),
        q(chi.d(2, 1)),
        q(chi.d(2, 2)),
    ]
}

#[test]
fn reference_solution_sets_match_brute_force() {
    let reference = Reference::new();
    assert_eq!((REFERENCE_ROOTS, REFERENCE_WINDOW), (4, 2));
    // c is trivial or the ℤ/2 generator pulled back along ℤ/4 → ℤ/2, i.e.
    // 1/2 exactly when all three arguments are odd.
    let oracles = [
        oracle(|_, _, _| 0),
        oracle(|a, b, c| if a % 2 == 1 && b % 2 == 1 && c % 2 == 1 { 2 } else { 0 }),
    ];
    for ((label, c), expected) in reference.cocycles.iter().zip(oracles) {
        let found: BTreeSet<Quarters> = reference.solutions(c).unwrap().iter().map(as_quarters).collect();
        assert_eq!(expected.len(), 16, "{label}");
        assert_eq!(found, expected, "{label}");
    }
}

#[test]
fn search_refuses_oversized_spaces() {
    let reference = Reference::new();
    let c = Cochain::trivial(&reference.groupoid, 3);
    assert!(search_scalar(&reference.groupoid, &reference.normal, &c, 64, 2, 1000).is_err());
    assert!(search_scalar(&reference.groupoid, &reference.normal, &c, 4, 2, DEFAULT_SEARCH_CAP).is_ok());
}

proptest! {
    #[test]
    fn perturbation_preserves_the_relations(seed: u64, which in 0usize..2, pick in 0usize..16) {
        let reference = Reference::new();
        let (_, c) = &reference.cocycles[which];
        let g = &reference.groupoid;
        let bundle = CoefficientBundle::scalar(g);
        let solutions = reference.solutions(c).unwrap();
        let chi = &solutions[pick % solutions.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_z(g, &bundle, &reference.normal, &mut rng);
        let moved = coboundary_perturb(g, &bundle, chi, &z).unwrap();
        prop_assert!(satisfies_cc(g, &bundle, &moved, c));
        let back: std::collections::BTreeMap<_, _> =
            z.iter().map(|(&n, v)| (n, v.iter().map(|p| p.conj()).collect())).collect();
        prop_assert_eq!(&coboundary_perturb(g, &bundle, &moved, &back).unwrap(), chi);
    }
}

#[test]
fn quotient_layer_holds_on_reference() {
    let reference = Reference::new();
    for (label, c) in &reference.cocycles {
        let solutions = reference.solutions(c).unwrap();
        let checks = check_quotient_layer(&reference.quotient, c, &solutions, label).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
        let realized = solutions
            .iter()
            .filter(|chi| quotient_outcome(&reference.quotient, c, chi).unwrap().realized)
            .count();
        assert_eq!(realized, 8, "{label}");
        let degenerate = check_trivial_normal(&FiniteGroup::cyclic(4), c, label).unwrap();
        assert!(degenerate.iter().all(|c| c.passed), "{degenerate:#?}");
    }
}

#[test]
fn inconsistent_data_is_rejected() {
    let reference = Reference::new();
    let g = &reference.groupoid;
    let bundle = CoefficientBundle::scalar(g);
    let mut chi = CharCocycle::trivial(g, &bundle, reference.normal.clone(), REFERENCE_WINDOW);
    chi.set_mu(2, 2, vec![outerkit::phase::Phase::new(1, 3)]).unwrap();
    chi.set_lambda(2, 1, vec![outerkit::phase::Phase::new(1, 5)]).unwrap();
    let c = Cochain::trivial(g, 3);
    assert!(!satisfies_cc(g, &bundle, &chi, &c));
    assert!(quotient_outcome(&reference.quotient, &c, &chi).is_err());
}
