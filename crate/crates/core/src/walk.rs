//! Probability measure families on a groupoid, convolution, Markov operators,
//! Reiter profiles and the eigenvalue-one fixed space.
//!
//! A family `μ = {μ^x}` is stored as one weight per arrow: `μ(g) = μ^{r(g)}(g)`.
//! Identities are checked with exact rational weights ([`Exact`]); asymptotic
//! quantities use `f64`.

use std::fmt::Debug;
use std::io::Write;

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{ElementId, Groupoid};

pub type Exact = Ratio<i128>;

/// Scalar type for measures and fiber functions.
pub trait Weight: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn to_f64(&self) -> f64;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Tolerance used when checking that a fiber sums to one.
    fn sums_to_one(total: &Self) -> bool;
}

impl Weight for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn sums_to_one(total: &Self) -> bool {
        (total - 1.0).abs() < 1e-12
    }
}

impl Weight for Exact {
    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::new(num as i128, den as i128)
    }
    fn sums_to_one(total: &Self) -> bool {
        *total == Exact::from_integer(1)
    }
}

/// One probability vector per range fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFamily<W: Weight> {
    weights: Vec<W>,
}

impl<W: Weight> MeasureFamily<W> {
    /// Wraps per-arrow weights after checking they form a probability family.
    pub fn new(g: &Groupoid, weights: Vec<W>) -> Result<Self> {
        let out = Self { weights };
        out.validate(g)?;
        Ok(out)
    }

    pub fn validate(&self, g: &Groupoid) -> Result<()> {
        if self.weights.len() != g.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} weights for {} arrows",
                self.weights.len(),
                g.len()
            )));
        }
        if let Some(a) = self.weights.iter().position(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure(format!("negative weight at arrow {a}")));
        }
        for &x in g.units() {
            let total = g
                .range_fiber(x)
                .iter()
                .fold(W::zero(), |acc, &a| acc + self.weights[a].clone());
            if !W::sums_to_one(&total) {
                return Err(Error::InvalidMeasure(format!("fiber over unit {x} sums to {total:?}")));
            }
        }
        Ok(())
    }

    /// Normalizes nonnegative per-arrow masses fiberwise.
    pub fn from_masses(g: &Groupoid, masses: Vec<W>) -> Result<Self> {
        let mut weights = masses;
        for &x in g.units() {
            let total = g
                .range_fiber(x)
                .iter()
                .fold(W::zero(), |acc, &a| acc + weights[a].clone());
            if total.is_zero() {
                return Err(Error::InvalidMeasure(format!("zero mass over unit {x}")));
            }
            for &a in g.range_fiber(x) {
                weights[a] = weights[a].clone() / total.clone();
            }
        }
        Self::new(g, weights)
    }

    pub fn uniform(g: &Groupoid) -> Self {
        Self::from_masses(g, vec![W::one(); g.len()]).expect("uniform family")
    }

    /// `δ_x` on every fiber.
    pub fn units_only(g: &Groupoid) -> Self {
        let weights = g
            .elements()
            .map(|a| if g.is_unit(a) { W::one() } else { W::zero() })
            .collect();
        Self { weights }
    }

    /// Full-support family with mass `1 + j/den` on the `j`-th arrow of each
    /// fiber, `j` cycling through `0..3`.
    pub fn perturbed(g: &Groupoid, den: i64) -> Self {
        let masses = g
            .elements()
            .map(|a| W::from_ratio(den + (g.range_position(a) % 3) as i64, den))
            .collect();
        Self::from_masses(g, masses).expect("perturbed family")
    }

    /// Random integer masses in `1..=5` (or `0..=5` when `full_support` is
    /// false, with the unit always charged so no fiber is empty).
    pub fn random<R: Rng + ?Sized>(g: &Groupoid, rng: &mut R, full_support: bool) -> Self {
        let lo = if full_support { 1 } else { 0 };
        let masses = g
            .elements()
            .map(|a| {
                let m = rng.random_range(lo..=5);
                W::from_ratio(if g.is_unit(a) { m.max(1) } else { m }, 1)
            })
            .collect();
        Self::from_masses(g, masses).expect("random family")
    }

    #[inline]
    pub fn weight(&self, a: ElementId) -> &W {
        &self.weights[a]
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    /// `μ^x` as a vector over `G^x`.
    pub fn fiber(&self, g: &Groupoid, x: ElementId) -> FiberFunction<W> {
        FiberFunction {
            x,
            values: g.range_fiber(x).iter().map(|&a| self.weights[a].clone()).collect(),
        }
    }

    pub fn full_support(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    pub fn to_f64(&self) -> MeasureFamily<f64> {
        MeasureFamily {
            weights: self.weights.iter().map(Weight::to_f64).collect(),
        }
    }
}

/// A function on one range fiber `G^x`, indexed by position in `G^x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberFunction<W: Weight> {
    pub x: ElementId,
    pub values: Vec<W>,
}

impl<W: Weight> FiberFunction<W> {
    pub fn zeros(g: &Groupoid, x: ElementId) -> Self {
        Self {
            x,
            values: vec![W::zero(); g.range_fiber(x).len()],
        }
    }

    /// The indicator of one arrow of `G^x`.
    pub fn delta(g: &Groupoid, a: ElementId) -> Self {
        let mut f = Self::zeros(g, g.range(a));
        f.values[g.range_position(a)] = W::one();
        f
    }

    pub fn random<R: Rng + ?Sized>(g: &Groupoid, x: ElementId, rng: &mut R, nonnegative: bool) -> Self {
        let lo = if nonnegative { 0 } else { -6 };
        let values = (0..g.range_fiber(x).len())
            .map(|_| W::from_ratio(rng.random_range(lo..=6), rng.random_range(1..=4)))
            .collect();
        Self { x, values }
    }

    #[inline]
    pub fn at(&self, g: &Groupoid, a: ElementId) -> &W {
        debug_assert_eq!(g.range(a), self.x);
        &self.values[g.range_position(a)]
    }

    pub fn l1(&self) -> W {
        self.values.iter().fold(W::zero(), |acc, v| acc + v.abs())
    }

    /// `Σ θ(a) f(a)`.
    pub fn pair(&self, other: &FiberFunction<W>) -> W {
        self.values
            .iter()
            .zip(&other.values)
            .fold(W::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn sub(&self, other: &FiberFunction<W>) -> FiberFunction<W> {
        FiberFunction {
            x: self.x,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

/// `(f*μ)(a) = Σ_{h ∈ G_{s(a)}} f(ah⁻¹)·μ^{r(h)}(h)`.
pub fn convolve<W: Weight>(g: &Groupoid, f: &FiberFunction<W>, mu: &MeasureFamily<W>) -> FiberFunction<W> {
    let values = g
        .range_fiber(f.x)
        .iter()
        .map(|&a| {
            g.source_fiber(g.source(a)).iter().fold(W::zero(), |acc, &h| {
                let ah = g.mul(a, g.inv(h));
                acc + f.at(g, ah).clone() * mu.weight(h).clone()
            })
        })
        .collect();
    FiberFunction { x: f.x, values }
}

/// `(μ*ν)^x = μ^x * ν`.
pub fn convolve_families<W: Weight>(g: &Groupoid, mu: &MeasureFamily<W>, nu: &MeasureFamily<W>) -> MeasureFamily<W> {
    let mut weights = vec![W::zero(); g.len()];
    for &x in g.units() {
        let conv = convolve(g, &mu.fiber(g, x), nu);
        for (&a, v) in g.range_fiber(x).iter().zip(conv.values) {
            weights[a] = v;
        }
    }
    MeasureFamily { weights }
}

/// `μ^{*n}` for `n ≥ 1`.
pub fn convolution_power<W: Weight>(g: &Groupoid, mu: &MeasureFamily<W>, n: usize) -> MeasureFamily<W> {
    assert!(n >= 1);
    let mut acc = mu.clone();
    for _ in 1..n {
        acc = convolve_families(g, &acc, mu);
    }
    acc
}

/// `P^x_μ` on `ℓ^∞(G^x)`, with `P[g,h] = μ^{s(g)}(g⁻¹h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovOperator<W: Weight> {
    pub x: ElementId,
    dim: usize,
    entries: Vec<W>,
}

pub fn markov<W: Weight>(g: &Groupoid, mu: &MeasureFamily<W>, x: ElementId) -> MarkovOperator<W> {
    let fiber = g.range_fiber(x);
    let dim = fiber.len();
    let mut entries = Vec::with_capacity(dim * dim);
    for &a in fiber {
        for &b in fiber {
            entries.push(mu.weight(g.mul(g.inv(a), b)).clone());
        }
    }
    MarkovOperator { x, dim, entries }
}

impl<W: Weight> MarkovOperator<W> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> &W {
        &self.entries[i * self.dim + j]
    }

    pub fn compose(&self, other: &MarkovOperator<W>) -> MarkovOperator<W> {
        let d = self.dim;
        let mut entries = vec![W::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] = entries[i * d + j].clone() + a.clone() * other.entry(k, j).clone();
                }
            }
        }
        MarkovOperator {
            x: self.x,
            dim: d,
            entries,
        }
    }

    /// `P f`.
    pub fn apply(&self, f: &FiberFunction<W>) -> FiberFunction<W> {
        let values = (0..self.dim)
            .map(|i| (0..self.dim).fold(W::zero(), |acc, j| acc + self.entry(i, j).clone() * f.values[j].clone()))
            .collect();
        FiberFunction { x: self.x, values }
    }

    /// `θP`, defined by `⟨θP, f⟩ = ⟨θ, Pf⟩`.
    pub fn dual(&self, theta: &FiberFunction<W>) -> FiberFunction<W> {
        let values = (0..self.dim)
            .map(|j| {
                (0..self.dim).fold(W::zero(), |acc, i| {
                    acc + theta.values[i].clone() * self.entry(i, j).clone()
                })
            })
            .collect();
        FiberFunction { x: self.x, values }
    }

    pub fn row_sums(&self) -> Vec<W> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(W::zero(), |acc, j| acc + self.entry(i, j).clone()))
            .collect()
    }

    pub fn is_stochastic(&self) -> bool {
        self.entries.iter().all(|w| !w.is_negative()) && self.row_sums().iter().all(W::sums_to_one)
    }

    /// Largest entrywise difference, as `f64`.
    pub fn max_abs_diff(&self, other: &MarkovOperator<W>) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> MarkovOperator<f64> {
        MarkovOperator {
            x: self.x,
            dim: self.dim,
            entries: self.entries.iter().map(Weight::to_f64).collect(),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j).to_f64())
    }
}

/// `(g·f)(a) = f(g⁻¹a)`, taking a function on `G^{s(g)}` to one on `G^{r(g)}`.
pub fn translate<W: Weight>(g: &Groupoid, arrow: ElementId, f: &FiberFunction<W>) -> FiberFunction<W> {
    debug_assert_eq!(f.x, g.source(arrow));
    let gi = g.inv(arrow);
    let values = g
        .range_fiber(g.range(arrow))
        .iter()
        .map(|&a| f.at(g, g.mul(gi, a)).clone())
        .collect();
    FiberFunction {
        x: g.range(arrow),
        values,
    }
}

/// `‖g·μ^{*n,s(g)} − μ^{*n,r(g)}‖₁` for `n = 1..=depth`.
pub fn reiter_profile(g: &Groupoid, mu: &MeasureFamily<f64>, arrow: ElementId, depth: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(depth);
    let mut power = mu.clone();
    for n in 1..=depth {
        if n > 1 {
            power = convolve_families(g, &power, mu);
        }
        out.push(reiter_distance(g, &power, arrow));
    }
    out
}

fn reiter_distance(g: &Groupoid, power: &MeasureFamily<f64>, arrow: ElementId) -> f64 {
    let moved = translate(g, arrow, &power.fiber(g, g.source(arrow)));
    moved.sub(&power.fiber(g, g.range(arrow))).l1()
}

/// Reiter profiles for every arrow, computed in parallel; row `i` belongs to
/// arrow `i`.
pub fn reiter_profiles(g: &Groupoid, mu: &MeasureFamily<f64>, depth: usize) -> Vec<Vec<f64>> {
    let mut powers = Vec::with_capacity(depth);
    let mut power = mu.clone();
    for n in 1..=depth {
        if n > 1 {
            power = convolve_families(g, &power, mu);
        }
        powers.push(power.clone());
    }
    g.elements()
        .into_par_iter()
        .map(|a| powers.iter().map(|p| reiter_distance(g, p, a)).collect())
        .collect()
}

/// Writes `arrow,n,l1_distance` rows.
pub fn write_profiles_csv<Wr: Write>(out: Wr, profiles: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["arrow", "n", "l1_distance"])?;
    for (a, row) in profiles.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            w.write_record(&[a.to_string(), (i + 1).to_string(), format!("{v:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Basis of `{u : Pu = u}` and the triviality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct FixedSpace {
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    /// `max ‖(P − 1)v‖_∞` over the returned basis.
    pub residual: f64,
    /// Smallest singular value of `P − 1` that was treated as nonzero.
    pub spectral_gap: f64,
    /// Dimension one and constant basis vector within tolerance.
    pub trivial: bool,
}

/// Null space of `P − 1` through a singular value decomposition.
pub fn harmonic_fixed_space(p: &MarkovOperator<f64>, tol: f64) -> FixedSpace {
    let d = p.dim();
    let m = p.to_matrix() - DMatrix::<f64>::identity(d, d);
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    let mut spectral_gap = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            basis.push(v_t.row(i).iter().copied().collect::<Vec<f64>>());
        } else {
            spectral_gap = spectral_gap.min(s);
        }
    }
    basis.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let residual = basis
        .iter()
        .map(|v| {
            let r = &m * nalgebra::DVector::from_column_slice(v);
            r.amax()
        })
        .fold(0.0, f64::max);
    let trivial = basis.len() == 1 && {
        let v = &basis[0];
        let first = v[0];
        v.iter().all(|&e| (e - first).abs() <= tol)
    };
    FixedSpace {
        dimension: basis.len(),
        basis,
        residual,
        spectral_gap,
        trivial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_at_unit_reproduces_measure() {
        let g = Groupoid::pair(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, true);
        for &x in g.units() {
            let f = FiberFunction::delta(&g, x);
            assert_eq!(convolve(&g, &f, &mu), mu.fiber(&g, x));
        }
    }

    #[test]
    fn uniform_on_pair_is_idempotent() {
        let g = Groupoid::pair(3);
        let u = MeasureFamily::<Exact>::uniform(&g);
        assert_eq!(convolve_families(&g, &u, &u), u);
        let units = MeasureFamily::<Exact>::units_only(&g);
        assert_eq!(convolve_families(&g, &u, &units), u);
    }

    #[test]
    fn group_convolution_oracle() {
        let z5 = FiniteGroup::cyclic(5);
        let g = Groupoid::from_group(&z5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, true);
        let f = FiberFunction::<Exact>::random(&g, 0, &mut rng, false);
        let conv = convolve(&g, &f, &mu);
        for a in 0..5 {
            let mut expect = Exact::from_integer(0);
            for h in 0..5 {
                expect += f.values[(a + 5 - h) % 5] * mu.weight(h);
            }
            assert_eq!(conv.values[a], expect);
        }
    }

    #[test]
    fn markov_is_unital_and_multiplicative() {
        let g = Groupoid::group_bundle(2, &FiniteGroup::cyclic(3)).product(&Groupoid::pair(2));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mu = MeasureFamily::<Exact>::random(&g, &mut rng, false);
        let nu = MeasureFamily::<Exact>::random(&g, &mut rng, true);
        let munu = convolve_families(&g, &mu, &nu);
        for &x in g.units() {
            let p = markov(&g, &mu, x);
            assert!(p.is_stochastic());
            assert_eq!(p.compose(&markov(&g, &nu, x)), markov(&g, &munu, x));
        }
    }

    #[test]
    fn reiter_on_pair_uniform_is_zero() {
        let g = Groupoid::pair(3);
        let mu = MeasureFamily::<f64>::uniform(&g);
        for a in g.elements() {
            assert!(reiter_profile(&g, &mu, a, 5).iter().all(|&v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn two_state_decay() {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(2));
        let eps = 0.1;
        let mu = MeasureFamily::new(&g, vec![0.5 + eps, 0.5 - eps]).unwrap();
        let prof = reiter_profile(&g, &mu, 1, 12);
        for (n, v) in prof.iter().enumerate() {
            let expect = 2.0 * (2.0 * eps).powi(n as i32 + 1);
            assert!((v - expect).abs() < 1e-12, "{n}: {v} vs {expect}");
        }
    }

    #[test]
    fn fixed_space_cases() {
        let g = Groupoid::pair(3);
        let p = markov(&g, &MeasureFamily::<f64>::perturbed(&g, 4), 0);
        let fs = harmonic_fixed_space(&p, 1e-8);
        assert!(fs.trivial, "{fs:?}");
        let id = markov(&g, &MeasureFamily::<f64>::units_only(&g), 0);
        assert_eq!(harmonic_fixed_space(&id, 1e-8).dimension, 3);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_profiles_csv(&mut buf, &[vec![0.5, 0.25]]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("arrow,n,l1_distance\n0,1,"));
    }
}
