use num_rational::Ratio;
use outerkit::corpus::{self, CORPUS};
use outerkit::group::FiniteGroup;
use outerkit::groupoid::Groupoid;
use outerkit::walk::{
    convolution_power, convolve, convolve_families, harmonic_fixed_space, markov, reiter_profile, Exact, FiberFunction,
    MeasureFamily,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn group_convolution_matches_oracle(k in 1usize..8, seed: u64) {
        // On ℤ/k the arrow ids are the group elements and (f*μ)(a) = Σ_h f(a−h)·μ(h).
        let g = Groupoid::from_group(&FiniteGroup::cyclic(k));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, false);
        let f = FiberFunction::<Exact>::random(&g, 0, &mut rng, false);
        let conv = convolve(&g, &f, &mu);
        for a in 0..k {
            let expected: Exact = (0..k)
                .map(|h| *f.at(&g, (a + k - h) % k) * *mu.weight(h))
                .sum();
            prop_assert_eq!(*conv.at(&g, a), expected);
        }
    }

    #[test]
    fn markov_operators_compose(which in 0..CORPUS.len(), seed: u64) {
        let g = corpus::generate(CORPUS[which]).unwrap().groupoid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, false);
        let nu = MeasureFamily::<Exact>::random(&g, &mut rng, false);
        let munu = convolve_families(&g, &mu, &nu);
        for &x in g.units() {
            let lhs = markov(&g, &mu, x).compose(&markov(&g, &nu, x));
            prop_assert_eq!(lhs, markov(&g, &munu, x));
            prop_assert!(markov(&g, &munu, x).is_stochastic());
        }
    }

    #[test]
    fn nonnegative_mass_is_preserved_and_dual_is_convolution(which in 0..CORPUS.len(), seed: u64) {
        let g = corpus::generate(CORPUS[which]).unwrap().groupoid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, false);
        for &x in g.units() {
            let f = FiberFunction::<Exact>::random(&g, x, &mut rng, true);
            prop_assert_eq!(convolve(&g, &f, &mu).l1(), f.l1());
            let theta = FiberFunction::<Exact>::random(&g, x, &mut rng, false);
            let h = FiberFunction::<Exact>::random(&g, x, &mut rng, false);
            let p = markov(&g, &mu, x);
            let dual = p.dual(&theta);
            prop_assert_eq!(&dual, &convolve(&g, &theta, &mu));
            prop_assert_eq!(dual.pair(&h), theta.pair(&p.apply(&h)));
        }
    }
}

/// Pair groupoid on two points with `μ^0 = (1−p, p)` and `μ^1 = (q, 1−q)`
/// over the targets `(0, 1)`.
fn two_state(p: f64, q: f64) -> (Groupoid, MeasureFamily<f64>) {
    let g = Groupoid::pair(2);
    // Arrow (y, x) has id 2y + x, range y and source x.
    let weights = vec![1.0 - p, p, q, 1.0 - q];
    let mu = MeasureFamily::new(&g, weights).unwrap();
    (g, mu)
}

#[test]
fn two_state_reiter_profile_decays_geometrically() {
    // Rows of P^n differ by (1−p−q)^n·(e₀ − e₁), so the ℓ¹ distance is 2|1−p−q|^n.
    for (p, q) in [(0.3, 0.2), (0.5, 0.5), (0.9, 0.05), (0.1, 0.8)] {
        let (g, mu) = two_state(p, q);
        let lambda: f64 = 1.0 - p - q;
        for arrow in [1, 2] {
            let profile = reiter_profile(&g, &mu, arrow, 12);
            for (i, v) in profile.iter().enumerate() {
                let expected = 2.0 * lambda.abs().powi(i as i32 + 1);
                assert!(
                    (v - expected).abs() < 1e-12,
                    "p={p} q={q} n={} {v} vs {expected}",
                    i + 1
                );
            }
        }
        for unit in [0, 3] {
            assert!(reiter_profile(&g, &mu, unit, 12).iter().all(|&v| v == 0.0));
        }
    }
}

#[test]
fn convolution_powers_are_matrix_powers() {
    let g = Groupoid::pair(2);
    let r = |n, d| Ratio::new(n, d);
    let mu = MeasureFamily::<Exact>::new(&g, vec![r(2, 3), r(1, 3), r(1, 4), r(3, 4)]).unwrap();
    let p = [[r(2, 3), r(1, 3)], [r(1, 4), r(3, 4)]];
    let mut power = p;
    for n in 1..6 {
        let mun = convolution_power(&g, &mu, n);
        for y in 0..2 {
            for x in 0..2 {
                assert_eq!(*mun.weight(2 * y + x), power[y][x], "n = {n}");
            }
        }
        let mut next = [[r(0, 1); 2]; 2];
        for (i, row) in next.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..2).map(|k| power[i][k] * p[k][j]).sum();
            }
        }
        power = next;
    }
}

#[test]
fn fixed_space_detects_disconnected_support() {
    let g = Groupoid::pair(3);
    let full = MeasureFamily::<Exact>::uniform(&g).to_f64();
    let fs = harmonic_fixed_space(&markov(&g, &full, 0), 1e-8);
    assert_eq!(fs.dimension, 1);
    assert!(fs.trivial);
    let stay = MeasureFamily::<Exact>::units_only(&g).to_f64();
    let fs = harmonic_fixed_space(&markov(&g, &stay, 0), 1e-8);
    assert_eq!(fs.dimension, 3);
    assert!(!fs.trivial);
}

#[test]
fn measures_must_be_probabilities() {
    let g = Groupoid::pair(2);
    assert!(MeasureFamily::new(&g, vec![0.5, 0.6, 0.5, 0.5]).is_err());
    assert!(MeasureFamily::new(&g, vec![1.5, -0.5, 0.5, 0.5]).is_err());
}
