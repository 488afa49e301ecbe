//! Characteristic cocycles `(λ, μ, d)` over a finite coefficient bundle.
//!
//! The flow of weights is replaced by a single automorphism `θ^x` of each
//! finite fiber `F_x`, so `t, s` range over `ℤ`; `d(n, ·)` is stored on a
//! window `[-T, T]`. Unitaries of the bundle are phase-valued functions on
//! the fibers and the module of `α_g` is the bundle map `β_g`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, RANDOM_DENOMINATOR};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, Groupoid, GroupoidHom};
use crate::phase::Phase;
use crate::report::Check;

/// Default bound on the number of candidates in [`search_scalar`].
pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;

/// A phase-valued function on one fiber.
pub type Unitary = Vec<Phase>;

fn umul(a: &[Phase], b: &[Phase]) -> Unitary {
    a.iter().zip(b).map(|(x, y)| *x * *y).collect()
}

fn uconj(a: &[Phase]) -> Unitary {
    a.iter().map(|x| x.conj()).collect()
}

fn uscale(a: &[Phase], z: Phase) -> Unitary {
    a.iter().map(|x| *x * z).collect()
}

/// Finite fibers with a shift `θ^x` and a groupoid action `β` commuting with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientBundle {
    fibers: BTreeMap<ElementId, usize>,
    theta: BTreeMap<ElementId, Vec<usize>>,
    beta: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

impl CoefficientBundle {
    pub fn new(
        g: &Groupoid,
        fibers: BTreeMap<ElementId, usize>,
        theta: BTreeMap<ElementId, Vec<usize>>,
        beta: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidBundle(msg));
        for &x in g.units() {
            let Some(&size) = fibers.get(&x) else {
                return bad(format!("no fiber over unit {x}"));
            };
            if size == 0 {
                return bad(format!("empty fiber over unit {x}"));
            }
            match theta.get(&x) {
                Some(t) if t.len() == size && is_permutation(t) => {}
                _ => return bad(format!("θ over {x} is not a permutation of the fiber")),
            }
        }
        if fibers.len() != g.units().len() || theta.len() != g.units().len() {
            return bad("fibers must be indexed by exactly the units".into());
        }
        if beta.len() != g.len() {
            return bad(format!("β has {} maps for {} arrows", beta.len(), g.len()));
        }
        for a in g.elements() {
            let (s, r) = (fibers[&g.source(a)], fibers[&g.range(a)]);
            if beta[a].len() != s || s != r || !is_permutation(&beta[a]) {
                return bad(format!("β_{a} is not a bijection F_s → F_r"));
            }
            if g.is_unit(a) && beta[a].iter().enumerate().any(|(i, &j)| i != j) {
                return bad(format!("β at unit {a} is not the identity"));
            }
            let (ts, tr) = (&theta[&g.source(a)], &theta[&g.range(a)]);
            if (0..s).any(|p| beta[a][ts[p]] != tr[beta[a][p]]) {
                return bad(format!("β_{a} does not commute with θ"));
            }
        }
        for t in g.composable_tuples(2, None, None) {
            let (a, b) = (t[0], t[1]);
            let ab = g.mul(a, b);
            if (0..fibers[&g.source(b)]).any(|p| beta[ab][p] != beta[a][beta[b][p]]) {
                return bad(format!("β_{ab} ≠ β_{a}∘β_{b}"));
            }
        }
        Ok(Self { fibers, theta, beta })
    }

    /// One-point fibers.
    pub fn scalar(g: &Groupoid) -> Self {
        Self {
            fibers: g.units().iter().map(|&x| (x, 1)).collect(),
            theta: g.units().iter().map(|&x| (x, vec![0])).collect(),
            beta: vec![vec![0]; g.len()],
        }
    }

    /// `F_x = ℤ/size` for all `x`, `θ = +1` and `β_g = +hom(g)`.
    pub fn translation(g: &Groupoid, size: usize, hom: &GroupoidHom) -> Result<Self> {
        let fibers = g.units().iter().map(|&x| (x, size)).collect();
        let theta = g
            .units()
            .iter()
            .map(|&x| (x, (0..size).map(|p| (p + 1) % size).collect()))
            .collect();
        let beta = g
            .elements()
            .map(|a| (0..size).map(|p| (p + hom.apply(a)) % size).collect())
            .collect();
        Self::new(g, fibers, theta, beta)
    }

    pub fn fiber_size(&self, x: ElementId) -> usize {
        self.fibers[&x]
    }

    pub fn is_scalar(&self) -> bool {
        self.fibers.values().all(|&s| s == 1)
    }

    pub fn one(&self, x: ElementId) -> Unitary {
        vec![Phase::one(); self.fiber_size(x)]
    }

    /// `θ_t(f)(p) = f(θ^{-t}p)`.
    pub fn theta(&self, x: ElementId, f: &[Phase], t: i64) -> Unitary {
        let perm = &self.theta[&x];
        let mut out = f.to_vec();
        let steps = t.unsigned_abs();
        for _ in 0..steps {
            let prev = out.clone();
            for (p, &q) in perm.iter().enumerate() {
                if t > 0 {
                    out[q] = prev[p];
                } else {
                    out[p] = prev[q];
                }
            }
        }
        out
    }

    /// `β_g(f)(β_g p) = f(p)` for `f` on `F_{s(g)}`.
    pub fn beta(&self, g: ElementId, f: &[Phase]) -> Unitary {
        let mut out = f.to_vec();
        for (p, &q) in self.beta[g].iter().enumerate() {
            out[q] = f[p];
        }
        out
    }

    pub fn acts_trivially_on(&self, normal: &NormalSubgroupoid) -> bool {
        normal
            .members()
            .iter()
            .all(|&n| self.beta[n].iter().enumerate().all(|(i, &j)| i == j))
    }

    fn random_unitary<R: Rng + ?Sized>(&self, x: ElementId, rng: &mut R) -> Unitary {
        (0..self.fiber_size(x))
            .map(|_| Phase::new(rng.random_range(0..RANDOM_DENOMINATOR), RANDOM_DENOMINATOR))
            .collect()
    }
}

/// A conjugation-stable family of normal subgroups `N_x ⊆ H_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSubgroupoid {
    mask: Vec<bool>,
    by_unit: BTreeMap<ElementId, Vec<ElementId>>,
}

impl NormalSubgroupoid {
    /// Units are added automatically.
    pub fn new(g: &Groupoid, members: &[ElementId]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCharacteristic(msg));
        let mut mask = vec![false; g.len()];
        for &u in g.units() {
            mask[u] = true;
        }
        for &m in members {
            if m >= g.len() {
                return bad(format!("{m} is not an arrow"));
            }
            if !g.is_isotropy(m) {
                return bad(format!("{m} is not in the isotropy"));
            }
            mask[m] = true;
        }
        for a in g.elements().filter(|&a| mask[a]) {
            if !mask[g.inv(a)] {
                return bad(format!("inverse of {a} missing"));
            }
            for &b in g.range_fiber(g.range(a)) {
                if mask[b] && !mask[g.mul(a, b)] {
                    return bad(format!("product of {a} and {b} missing"));
                }
            }
            for &h in g.range_fiber(g.range(a)) {
                let conj = g.conj_by_inverse(h, a);
                if !mask[conj] {
                    return bad(format!("{h}⁻¹·{a}·{h} = {conj} missing"));
                }
            }
        }
        let by_unit = g
            .units()
            .iter()
            .map(|&x| (x, g.isotropy(x).into_iter().filter(|&a| mask[a]).collect()))
            .collect();
        Ok(Self { mask, by_unit })
    }

    pub fn trivial(g: &Groupoid) -> Self {
        Self::new(g, &[]).expect("units form a normal subgroupoid")
    }

    pub fn contains(&self, a: ElementId) -> bool {
        self.mask[a]
    }

    pub fn at(&self, x: ElementId) -> &[ElementId] {
        &self.by_unit[&x]
    }

    /// All members in increasing order.
    pub fn members(&self) -> Vec<ElementId> {
        (0..self.mask.len()).filter(|&a| self.mask[a]).collect()
    }

    pub fn is_trivial(&self, g: &Groupoid) -> bool {
        self.members().iter().all(|&a| g.is_unit(a))
    }
}

/// `(λ, μ, d)` with `d(n, t)` stored for `|t| ≤ window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharCocycle {
    pub normal: NormalSubgroupoid,
    pub window: i64,
    lambda: BTreeMap<(ElementId, ElementId), Unitary>,
    mu: BTreeMap<(ElementId, ElementId), Unitary>,
    d: BTreeMap<(ElementId, i64), Unitary>,
}

impl CharCocycle {
    /// `λ = μ = d = 1`.
    pub fn trivial(g: &Groupoid, bundle: &CoefficientBundle, normal: NormalSubgroupoid, window: i64) -> Self {
        let mut lambda = BTreeMap::new();
        let mut mu = BTreeMap::new();
        let mut d = BTreeMap::new();
        for a in g.elements() {
            for &n in normal.at(g.range(a)) {
                lambda.insert((n, a), bundle.one(g.range(a)));
            }
        }
        for &x in g.units() {
            for &m in normal.at(x) {
                for &n in normal.at(x) {
                    mu.insert((m, n), bundle.one(x));
                }
                for t in -window..=window {
                    d.insert((m, t), bundle.one(x));
                }
            }
        }
        Self {
            normal,
            window,
            lambda,
            mu,
            d,
        }
    }

    /// `λ(n, g)` for `n ∈ N_{r(g)}`.
    pub fn lambda(&self, n: ElementId, g: ElementId) -> &Unitary {
        self.lambda
            .get(&(n, g))
            .unwrap_or_else(|| panic!("λ({n}, {g}) is outside the domain"))
    }

    pub fn mu(&self, m: ElementId, n: ElementId) -> &Unitary {
        self.mu
            .get(&(m, n))
            .unwrap_or_else(|| panic!("μ({m}, {n}) is outside the domain"))
    }

    pub fn d(&self, n: ElementId, t: i64) -> &Unitary {
        self.d
            .get(&(n, t))
            .unwrap_or_else(|| panic!("d({n}, {t}) is outside the window"))
    }

    fn set(
        map: &mut BTreeMap<(ElementId, ElementId), Unitary>,
        key: (ElementId, ElementId),
        v: Unitary,
        what: &str,
    ) -> Result<()> {
        match map.get_mut(&key) {
            Some(slot) if slot.len() == v.len() => {
                *slot = v;
                Ok(())
            }
            Some(_) => Err(Error::InvalidCharacteristic(format!(
                "{what}{key:?} has the wrong fiber size"
            ))),
            None => Err(Error::InvalidCharacteristic(format!(
                "{what}{key:?} is outside the domain"
            ))),
        }
    }

    pub fn set_lambda(&mut self, n: ElementId, g: ElementId, v: Unitary) -> Result<()> {
        Self::set(&mut self.lambda, (n, g), v, "λ")
    }

    pub fn set_mu(&mut self, m: ElementId, n: ElementId, v: Unitary) -> Result<()> {
        Self::set(&mut self.mu, (m, n), v, "μ")
    }

    pub fn set_d(&mut self, n: ElementId, t: i64, v: Unitary) -> Result<()> {
        match self.d.get_mut(&(n, t)) {
            Some(slot) if slot.len() == v.len() => {
                *slot = v;
                Ok(())
            }
            _ => Err(Error::InvalidCharacteristic(format!(
                "d({n}, {t}) is outside the domain"
            ))),
        }
    }

    pub fn lambda_entries(&self) -> impl Iterator<Item = (&(ElementId, ElementId), &Unitary)> {
        self.lambda.iter()
    }

    pub fn mu_entries(&self) -> impl Iterator<Item = (&(ElementId, ElementId), &Unitary)> {
        self.mu.iter()
    }

    pub fn d_entries(&self) -> impl Iterator<Item = (&(ElementId, i64), &Unitary)> {
        self.d.iter()
    }

    /// First entry that is not `1` although an argument is a unit (or `t = 0`).
    pub fn normalization_violation(&self, g: &Groupoid) -> Option<String> {
        let one = |u: &Unitary| u.iter().all(Phase::is_one);
        for (&(n, a), v) in &self.lambda {
            if (g.is_unit(n) || g.is_unit(a)) && !one(v) {
                return Some(format!("λ({n}, {a})"));
            }
        }
        for (&(m, n), v) in &self.mu {
            if (g.is_unit(m) || g.is_unit(n)) && !one(v) {
                return Some(format!("μ({m}, {n})"));
            }
        }
        for (&(n, t), v) in &self.d {
            if (g.is_unit(n) || t == 0) && !one(v) {
                return Some(format!("d({n}, {t})"));
            }
        }
        None
    }

    pub fn to_data(&self) -> CharCocycleData {
        CharCocycleData {
            normal: self.normal.members(),
            window: self.window,
            lambda: self.lambda.iter().map(|(&(n, g), v)| (n, g, v.clone())).collect(),
            mu: self.mu.iter().map(|(&(m, n), v)| (m, n, v.clone())).collect(),
            d: self.d.iter().map(|(&(n, t), v)| (n, t, v.clone())).collect(),
        }
    }

    /// Entries absent from the data are `1`.
    pub fn from_data(g: &Groupoid, bundle: &CoefficientBundle, data: &CharCocycleData) -> Result<Self> {
        let normal = NormalSubgroupoid::new(g, &data.normal)?;
        if data.window < 1 {
            return Err(Error::InvalidCharacteristic("window must be at least 1".into()));
        }
        let mut chi = Self::trivial(g, bundle, normal, data.window);
        for (n, a, v) in &data.lambda {
            chi.set_lambda(*n, *a, v.clone())?;
        }
        for (m, n, v) in &data.mu {
            chi.set_mu(*m, *n, v.clone())?;
        }
        for (n, t, v) in &data.d {
            chi.set_d(*n, *t, v.clone())?;
        }
        if let Some(at) = chi.normalization_violation(g) {
            return Err(Error::InvalidCharacteristic(format!("{at} is not normalized")));
        }
        Ok(chi)
    }
}

/// JSON form: the `N` membership list and `λ`, `μ`, `d` tables with one
/// `[num, den]` angle per fiber point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharCocycleData {
    pub normal: Vec<ElementId>,
    pub window: i64,
    pub lambda: Vec<(ElementId, ElementId, Unitary)>,
    pub mu: Vec<(ElementId, ElementId, Unitary)>,
    pub d: Vec<(ElementId, i64, Unitary)>,
}

/// One of the seven characteristic-cocycle relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    /// `λ(n,g)*·θ_t(λ(n,g)) = d(n,t)*·β_g(d(g⁻¹ng,t))`.
    LambdaFlow,
    /// `d(m,t)·d(n,t)·d(mn,t)* = μ(m,n)*·θ_t(μ(m,n))`.
    MuFlow,
    /// `μ(l,m)·μ(lm,n) = c(l,m,n)·μ(m,n)·μ(l,mn)`.
    MuAssociativity,
    /// `λ(n,gh) = c̄(g,m,h)·c(n,g,h)·c(g,h,h⁻¹mh)·β_g(λ(m,h))·λ(n,g)` with `m = g⁻¹ng`.
    LambdaCocycle,
    /// `λ(mn,g)·λ(m,g)*·λ(n,g)* = c(m,g,n')·c̄(g,m',n')·c̄(m,n,g)·μ(m,n)·β_g(μ(m',n'))*`
    /// with primes denoting conjugation by `g⁻¹`.
    LambdaMu,
    /// `λ(n,m) = μ(m,m⁻¹nm)·μ(n,m)*` for `m, n ∈ N`.
    InnerLambda,
    /// `d(n,t+s) = θ_t(d(n,s))·d(n,t)`.
    DCocycle,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::LambdaFlow,
        Relation::MuFlow,
        Relation::MuAssociativity,
        Relation::LambdaCocycle,
        Relation::LambdaMu,
        Relation::InnerLambda,
        Relation::DCocycle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::LambdaFlow => "lambda_flow",
            Relation::MuFlow => "mu_flow",
            Relation::MuAssociativity => "mu_associativity",
            Relation::LambdaCocycle => "lambda_cocycle",
            Relation::LambdaMu => "lambda_mu_compatibility",
            Relation::InnerLambda => "inner_lambda",
            Relation::DCocycle => "d_cocycle",
        }
    }
}

/// Outcome of one relation: tuples checked, failures, and the first failing
/// tuple as `(arrows, times)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationOutcome {
    pub checked: usize,
    pub failures: usize,
    pub first: Option<(Vec<ElementId>, Vec<i64>)>,
}

struct Ctx<'a> {
    g: &'a Groupoid,
    bundle: &'a CoefficientBundle,
    chi: &'a CharCocycle,
    c: &'a Cochain,
}

impl Ctx<'_> {
    fn c(&self, a: ElementId, b: ElementId, k: ElementId) -> Phase {
        self.c.get(&[a, b, k])
    }

    /// Visits every argument tuple of `rel`; `f` returns whether it holds.
    /// Stops after `limit` failures.
    fn evaluate(&self, rel: Relation, limit: usize) -> RelationOutcome {
        let g = self.g;
        let chi = self.chi;
        let b = self.bundle;
        let w = chi.window;
        let mut out = RelationOutcome::default();
        let mut record = |ok: bool, arrows: &[ElementId], times: &[i64]| -> bool {
            out.checked += 1;
            if !ok {
                out.failures += 1;
                out.first.get_or_insert_with(|| (arrows.to_vec(), times.to_vec()));
            }
            out.failures >= limit
        };
        let times: Vec<i64> = (-w..=w).collect();
        match rel {
            Relation::LambdaFlow => {
                for a in g.elements() {
                    let y = g.range(a);
                    for &n in chi.normal.at(y) {
                        let lam = chi.lambda(n, a);
                        let m = g.conj_by_inverse(a, n);
                        for &t in &times {
                            let lhs = umul(&uconj(lam), &b.theta(y, lam, t));
                            let rhs = umul(&uconj(chi.d(n, t)), &b.beta(a, chi.d(m, t)));
                            if record(lhs == rhs, &[n, a], &[t]) {
                                return out;
                            }
                        }
                    }
                }
            }
            Relation::MuFlow => {
                for &x in g.units() {
                    for &m in chi.normal.at(x) {
                        for &n in chi.normal.at(x) {
                            let mu = chi.mu(m, n);
                            for &t in &times {
                                let lhs = umul(&umul(chi.d(m, t), chi.d(n, t)), &uconj(chi.d(g.mul(m, n), t)));
                                let rhs = umul(&uconj(mu), &b.theta(x, mu, t));
                                if record(lhs == rhs, &[m, n], &[t]) {
                                    return out;
                                }
                            }
                        }
                    }
                }
            }
            Relation::MuAssociativity => {
                for &x in g.units() {
                    let nx = chi.normal.at(x);
                    for &l in nx {
                        for &m in nx {
                            for &n in nx {
                                let lhs = umul(chi.mu(l, m), chi.mu(g.mul(l, m), n));
                                let rhs = uscale(&umul(chi.mu(m, n), chi.mu(l, g.mul(m, n))), self.c(l, m, n));
                                if record(lhs == rhs, &[l, m, n], &[]) {
                                    return out;
                                }
                            }
                        }
                    }
                }
            }
            Relation::LambdaCocycle => {
                for t in g.composable_tuples(2, None, None) {
                    let (a, h) = (t[0], t[1]);
                    let ah = g.mul(a, h);
                    for &n in chi.normal.at(g.range(a)) {
                        let m = g.conj_by_inverse(a, n);
                        let scalar = self.c(a, m, h).conj() * self.c(n, a, h) * self.c(a, h, g.conj_by_inverse(h, m));
                        let rhs = uscale(&umul(&b.beta(a, chi.lambda(m, h)), chi.lambda(n, a)), scalar);
                        if record(chi.lambda(n, ah) == &rhs, &[n, a, h], &[]) {
                            return out;
                        }
                    }
                }
            }
            Relation::LambdaMu => {
                for a in g.elements() {
                    let ny = chi.normal.at(g.range(a));
                    for &m in ny {
                        for &n in ny {
                            let mn = g.mul(m, n);
                            let (mc, nc) = (g.conj_by_inverse(a, m), g.conj_by_inverse(a, n));
                            let lhs = umul(
                                &umul(chi.lambda(mn, a), &uconj(chi.lambda(m, a))),
                                &uconj(chi.lambda(n, a)),
                            );
                            let scalar = self.c(m, a, nc) * (self.c(a, mc, nc) * self.c(m, n, a)).conj();
                            let rhs = uscale(&umul(chi.mu(m, n), &b.beta(a, &uconj(chi.mu(mc, nc)))), scalar);
                            if record(lhs == rhs, &[m, n, a], &[]) {
                                return out;
                            }
                        }
                    }
                }
            }
            Relation::InnerLambda => {
                for &x in g.units() {
                    let nx = chi.normal.at(x);
                    for &m in nx {
                        for &n in nx {
                            let rhs = umul(chi.mu(m, g.conj_by_inverse(m, n)), &uconj(chi.mu(n, m)));
                            if record(chi.lambda(n, m) == &rhs, &[n, m], &[]) {
                                return out;
                            }
                        }
                    }
                }
            }
            Relation::DCocycle => {
                for &x in g.units() {
                    for &n in chi.normal.at(x) {
                        for &t in &times {
                            for &s in &times {
                                if (t + s).abs() > w {
                                    continue;
                                }
                                let rhs = umul(&b.theta(x, chi.d(n, s), t), chi.d(n, t));
                                if record(chi.d(n, t + s) == &rhs, &[n], &[t, s]) {
                                    return out;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn validate_inputs(g: &Groupoid, bundle: &CoefficientBundle, chi: &CharCocycle, c: &Cochain) -> Result<()> {
    if c.arity() != 3 || c.domain_len() != g.len() {
        return Err(Error::InvalidCharacteristic(
            "c must be a 3-cochain on the groupoid".into(),
        ));
    }
    if !bundle.acts_trivially_on(&chi.normal) {
        return Err(Error::InvalidBundle("β must be trivial on N".into()));
    }
    Ok(())
}

/// Exact per-relation outcomes of the characteristic relations.
pub fn cc_outcomes(
    g: &Groupoid,
    bundle: &CoefficientBundle,
    chi: &CharCocycle,
    c: &Cochain,
) -> Result<Vec<(Relation, RelationOutcome)>> {
    validate_inputs(g, bundle, chi, c)?;
    let ctx = Ctx { g, bundle, chi, c };
    Ok(Relation::ALL
        .par_iter()
        .map(|&rel| (rel, ctx.evaluate(rel, usize::MAX)))
        .collect())
}

/// Whether all seven relations hold; stops at the first failure.
pub fn satisfies_cc(g: &Groupoid, bundle: &CoefficientBundle, chi: &CharCocycle, c: &Cochain) -> bool {
    let ctx = Ctx { g, bundle, chi, c };
    Relation::ALL.iter().all(|&rel| ctx.evaluate(rel, 1).failures == 0)
}

/// The characteristic relations as report checks.
pub fn check_cc(g: &Groupoid, bundle: &CoefficientBundle, chi: &CharCocycle, c: &Cochain) -> Result<Vec<Check>> {
    Ok(cc_outcomes(g, bundle, chi, c)?
        .into_iter()
        .map(|(rel, o)| {
            let (arrows, times) = o.first.clone().unzip();
            let check = Check::exact(rel.name(), o.checked, o.failures, arrows);
            match times {
                Some(t) if !t.is_empty() => check.with_note(format!("first failure at times {t:?}")),
                _ => check,
            }
        })
        .collect())
}

/// The change of `ũ(n)` to `z(n)ũ(n)`:
/// `λ ↦ β_g(z(g⁻¹ng))·λ·z(n)*`, `μ ↦ z(m)z(n)·μ·z(mn)*`, `d ↦ θ_t(z(n))·d·z(n)*`.
pub fn coboundary_perturb(
    g: &Groupoid,
    bundle: &CoefficientBundle,
    chi: &CharCocycle,
    z: &BTreeMap<ElementId, Unitary>,
) -> Result<CharCocycle> {
    for n in chi.normal.members() {
        let Some(v) = z.get(&n) else {
            return Err(Error::InvalidCharacteristic(format!("z({n}) missing")));
        };
        if v.len() != bundle.fiber_size(g.range(n)) {
            return Err(Error::InvalidCharacteristic(format!("z({n}) has the wrong fiber size")));
        }
        if g.is_unit(n) && !v.iter().all(Phase::is_one) {
            return Err(Error::InvalidCharacteristic(format!("z({n}) must be 1 at a unit")));
        }
    }
    let mut out = chi.clone();
    for (&(n, a), v) in &chi.lambda {
        let m = g.conj_by_inverse(a, n);
        let nv = umul(&umul(&bundle.beta(a, &z[&m]), v), &uconj(&z[&n]));
        out.lambda.insert((n, a), nv);
    }
    for (&(m, n), v) in &chi.mu {
        let nv = umul(&umul(&umul(&z[&m], &z[&n]), v), &uconj(&z[&g.mul(m, n)]));
        out.mu.insert((m, n), nv);
    }
    for (&(n, t), v) in &chi.d {
        let x = g.range(n);
        let nv = umul(&umul(&bundle.theta(x, &z[&n], t), v), &uconj(&z[&n]));
        out.d.insert((n, t), nv);
    }
    Ok(out)
}

/// A normalized random `z` on `N` with angles `j/24`.
pub fn random_z<R: Rng + ?Sized>(
    g: &Groupoid,
    bundle: &CoefficientBundle,
    normal: &NormalSubgroupoid,
    rng: &mut R,
) -> BTreeMap<ElementId, Unitary> {
    normal
        .members()
        .into_iter()
        .map(|n| {
            let x = g.range(n);
            let v = if g.is_unit(n) {
                bundle.one(x)
            } else {
                bundle.random_unitary(x, rng)
            };
            (n, v)
        })
        .collect()
}

/// `c = ∂w`, `w` a scalar 2-cochain, in the convention
/// `∂w(g,h,k) = w(h,k)·w(g,hk)·w(gh,k)*·w(g,h)*`.
pub fn scalar_coboundary(g: &Groupoid, w: &Cochain) -> Cochain {
    Cochain::from_fn(g, 3, |t| {
        let (a, b, k) = (t[0], t[1], t[2]);
        w.get(&[b, k]) * w.get(&[a, g.mul(b, k)]) * w.get(&[g.mul(a, b), k]).conj() * w.get(&[a, b]).conj()
    })
}

/// The characteristic cocycle of a commutative shadow of a kernel: a scalar
/// 2-cochain `w` (so `c = ∂w`) and fiber-valued `ũ` on `N`. Returns `(χ, c)`
/// with
/// `λ(n,g) = V(n,g)*·β_g(ũ(g⁻¹ng))·ũ(n)*` where `V(n,g) = w(g,g⁻¹ng)·w(n,g)*`,
/// `μ(m,n) = ũ(m)ũ(n)ũ(mn)*·w(m,n)*` and `d(n,t) = θ_t(ũ(n))·ũ(n)*`.
pub fn kernel_shadow(
    g: &Groupoid,
    bundle: &CoefficientBundle,
    normal: NormalSubgroupoid,
    w: &Cochain,
    utilde: &BTreeMap<ElementId, Unitary>,
    window: i64,
) -> Result<(CharCocycle, Cochain)> {
    if w.arity() != 2 {
        return Err(Error::UnsupportedArity(w.arity()));
    }
    if !bundle.acts_trivially_on(&normal) {
        return Err(Error::InvalidBundle("β must be trivial on N".into()));
    }
    let trivial = CharCocycle::trivial(g, bundle, normal, window);
    let chi = coboundary_perturb(g, bundle, &trivial, utilde)?;
    let mut out = chi.clone();
    for (&(n, a), v) in &chi.lambda {
        let vna = w.get(&[a, g.conj_by_inverse(a, n)]) * w.get(&[n, a]).conj();
        out.lambda.insert((n, a), uscale(v, vna.conj()));
    }
    for (&(m, n), v) in &chi.mu {
        out.mu.insert((m, n), uscale(v, w.get(&[m, n]).conj()));
    }
    Ok((out, scalar_coboundary(g, w)))
}

/// Free coordinates of a scalar characteristic cocycle.
struct ScalarLayout {
    lambda: Vec<(ElementId, ElementId)>,
    mu: Vec<(ElementId, ElementId)>,
    d: Vec<ElementId>,
}

impl ScalarLayout {
    fn new(g: &Groupoid, normal: &NormalSubgroupoid) -> Self {
        let nonunit = |a: &ElementId| !g.is_unit(*a);
        let mut lambda = Vec::new();
        for a in g.elements().filter(nonunit) {
            for &n in normal.at(g.range(a)).iter().filter(|a| nonunit(a)) {
                lambda.push((n, a));
            }
        }
        let mut mu = Vec::new();
        let mut d = Vec::new();
        for &x in g.units() {
            let nx: Vec<ElementId> = normal.at(x).iter().copied().filter(nonunit).collect();
            for &m in &nx {
                for &n in &nx {
                    mu.push((m, n));
                }
            }
            d.extend(nx);
        }
        Self { lambda, mu, d }
    }
}

fn digits(mut index: u128, base: u128, len: usize) -> Vec<i64> {
    (0..len)
        .map(|_| {
            let dgt = (index % base) as i64;
            index /= base;
            dgt
        })
        .collect()
}

/// Every scalar characteristic cocycle with values in the `roots`-th roots
/// of unity satisfying the characteristic relations for `c`, for the trivial bundle.
///
/// `λ` and `μ` range over all normalized assignments. With `θ` trivial the
/// `d` cocycle relation forces `d(n,t) = d(n,1)^t`, so `d` ranges over its
/// value at `t = 1` extended that way; the relation is still checked.
/// Solutions come out in a fixed order.
pub fn search_scalar(
    g: &Groupoid,
    normal: &NormalSubgroupoid,
    c: &Cochain,
    roots: u32,
    window: i64,
    cap: u128,
) -> Result<Vec<CharCocycle>> {
    if roots == 0 {
        return Err(Error::InvalidCharacteristic("roots must be positive".into()));
    }
    let bundle = CoefficientBundle::scalar(g);
    let layout = ScalarLayout::new(g, normal);
    let base = u128::from(roots);
    let pow = |e: usize| base.checked_pow(e as u32);
    let (Some(n_lambda), Some(n_rest)) = (pow(layout.lambda.len()), pow(layout.mu.len() + layout.d.len())) else {
        return Err(Error::SearchCap { size: u128::MAX, cap });
    };
    let size = n_lambda.saturating_mul(n_rest);
    if size > cap {
        return Err(Error::SearchCap { size, cap });
    }
    let root = |j: i64| Phase::new(j, i64::from(roots));
    let template = CharCocycle::trivial(g, &bundle, normal.clone(), window);
    let lambda_only = [Relation::LambdaCocycle];
    let solutions = (0..n_lambda)
        .into_par_iter()
        .flat_map_iter(|li| {
            let mut chi = template.clone();
            for (&(n, a), j) in layout.lambda.iter().zip(digits(li, base, layout.lambda.len())) {
                chi.set_lambda(n, a, vec![root(j)]).expect("in domain");
            }
            let ctx = Ctx {
                g,
                bundle: &bundle,
                chi: &chi,
                c,
            };
            let viable = lambda_only.iter().all(|&r| ctx.evaluate(r, 1).failures == 0);
            let mut found = Vec::new();
            if viable {
                for ri in 0..n_rest {
                    let ds = digits(ri, base, layout.mu.len() + layout.d.len());
                    for (&(m, n), &j) in layout.mu.iter().zip(&ds) {
                        chi.set_mu(m, n, vec![root(j)]).expect("in domain");
                    }
                    for (&n, &j) in layout.d.iter().zip(&ds[layout.mu.len()..]) {
                        for t in -window..=window {
                            chi.set_d(n, t, vec![root(j).pow(t)]).expect("in window");
                        }
                    }
                    if satisfies_cc(g, &bundle, &chi, c) {
                        found.push(chi.clone());
                    }
                }
            }
            found
        })
        .collect();
    Ok(solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{coboundary, cyclic_generator, inflate, random_cochain};
    use crate::group::{FiniteGroup, GroupHom};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z4() -> (Groupoid, NormalSubgroupoid) {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(4));
        let n = NormalSubgroupoid::new(&g, &[2]).unwrap();
        (g, n)
    }

    #[test]
    fn normal_subgroupoid_validation() {
        let (g, n) = z4();
        assert_eq!(n.members(), vec![0, 2]);
        assert!(NormalSubgroupoid::new(&g, &[1]).is_err());
        let s3 = Groupoid::from_group(&FiniteGroup::dihedral(3));
        assert!(NormalSubgroupoid::new(&s3, &[1, 2]).is_ok());
        assert!(NormalSubgroupoid::new(&s3, &[3]).is_err());
        let pair = Groupoid::pair(2);
        assert!(NormalSubgroupoid::new(&pair, &[1]).is_err());
    }

    #[test]
    fn trivial_cocycle_passes_with_trivial_c() {
        let (g, n) = z4();
        let bundle = CoefficientBundle::scalar(&g);
        let chi = CharCocycle::trivial(&g, &bundle, n, 2);
        let c = Cochain::trivial(&g, 3);
        assert!(check_cc(&g, &bundle, &chi, &c).unwrap().iter().all(|ch| ch.passed));
    }

    #[test]
    fn bundle_rejects_noncommuting_beta() {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(2));
        let fibers = [(0, 3)].into_iter().collect();
        let theta = [(0, vec![1, 2, 0])].into_iter().collect();
        let beta = vec![vec![0, 1, 2], vec![0, 2, 1]];
        assert!(CoefficientBundle::new(&g, fibers, theta, beta).is_err());
    }

    #[test]
    fn theta_is_a_z_action() {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(4));
        let z4 = FiniteGroup::cyclic(4);
        let coordinate = GroupoidHom::group_coordinate(&g, &z4).unwrap();
        assert!(CoefficientBundle::translation(&g, 3, &coordinate).is_err());
        let b = CoefficientBundle::translation(&g, 3, &GroupoidHom::trivial(&g)).unwrap();
        let f = vec![Phase::new(1, 5), Phase::new(2, 5), Phase::new(3, 5)];
        assert_eq!(
            b.theta(0, &f, 1),
            vec![Phase::new(3, 5), Phase::new(1, 5), Phase::new(2, 5)]
        );
        assert_eq!(b.theta(0, &b.theta(0, &f, 2), -1), b.theta(0, &f, 1));
        assert_eq!(b.theta(0, &f, 3), f);
    }

    #[test]
    fn scalar_coboundary_matches_generic_coboundary() {
        let g = Groupoid::transformation(
            &FiniteGroup::cyclic(4),
            &crate::group::GroupAction::cyclic_translation(4, 2).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_cochain(&g, 2, &mut rng);
        assert_eq!(scalar_coboundary(&g, &w), coboundary(&g, &w).unwrap());
    }

    #[test]
    fn kernel_shadow_on_translation_bundle() {
        let (g, n) = z4();
        let z4g = FiniteGroup::cyclic(4);
        let hom = GroupoidHom::group_coordinate(&g, &z4g)
            .unwrap()
            .then(&GroupHom::cyclic_reduction(4, 2).unwrap());
        let bundle = CoefficientBundle::translation(&g, 2, &hom).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let w = random_cochain(&g, 2, &mut rng);
            let u = random_z(&g, &bundle, &n, &mut rng);
            let (chi, c) = kernel_shadow(&g, &bundle, n.clone(), &w, &u, 3).unwrap();
            for check in check_cc(&g, &bundle, &chi, &c).unwrap() {
                assert!(check.passed, "{check:?}");
            }
        }
    }

    #[test]
    fn mutated_mu_is_caught() {
        let (g, n) = z4();
        let bundle = CoefficientBundle::scalar(&g);
        let mut chi = CharCocycle::trivial(&g, &bundle, n, 2);
        chi.set_mu(2, 2, vec![Phase::new(1, 4)]).unwrap();
        let c = Cochain::trivial(&g, 3);
        // μ(2,2) = i alone is a solution; break it against the λ side.
        assert!(satisfies_cc(&g, &bundle, &chi, &c));
        chi.set_lambda(2, 2, vec![Phase::new(1, 2)]).unwrap();
        let failed: Vec<_> = check_cc(&g, &bundle, &chi, &c)
            .unwrap()
            .into_iter()
            .filter(|ch| !ch.passed)
            .map(|ch| ch.name)
            .collect();
        assert!(failed.contains(&"inner_lambda".to_string()), "{failed:?}");
    }

    #[test]
    fn search_respects_cap() {
        let (g, n) = z4();
        let c = Cochain::trivial(&g, 3);
        assert!(matches!(
            search_scalar(&g, &n, &c, 4, 2, 10),
            Err(Error::SearchCap { .. })
        ));
    }

    #[test]
    fn generator_restricted_to_n_has_no_solutions() {
        let (g, n) = z4();
        let c = inflate(
            &cyclic_generator(4),
            &g,
            &GroupoidHom::group_coordinate(&g, &FiniteGroup::cyclic(4)).unwrap(),
        );
        assert!(search_scalar(&g, &n, &c, 4, 2, DEFAULT_SEARCH_CAP).unwrap().is_empty());
    }

    #[test]
    fn data_round_trip() {
        let (g, n) = z4();
        let bundle = CoefficientBundle::scalar(&g);
        let c = Cochain::trivial(&g, 3);
        let sols = search_scalar(&g, &n, &c, 4, 2, DEFAULT_SEARCH_CAP).unwrap();
        let chi = sols.last().unwrap();
        let json = serde_json::to_string(&chi.to_data()).unwrap();
        let back: CharCocycleData = serde_json::from_str(&json).unwrap();
        assert_eq!(&CharCocycle::from_data(&g, &bundle, &back).unwrap(), chi);
    }
}
