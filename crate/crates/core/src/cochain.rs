//! Normalized circle-valued cochains on a finite groupoid.
//!
//! Values are exact [`Phase`]s. Coboundaries are the inhomogeneous ones with
//! trivial coefficients: for an `n`-cochain `a`,
//! `∂a(g₁,…,g_{n+1}) = a(g₂,…) · Π_i a(…, g_i g_{i+1}, …)^{(−1)^i} · a(g₁,…,g_n)^{(−1)^{n+1}}`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::{ElementId, Groupoid, GroupoidHom};
use crate::phase::Phase;
use crate::smith::{self, SparseRow};

/// Largest arity stored densely.
pub const MAX_STORED_ARITY: usize = 3;

/// Denominator used for random angles.
pub const RANDOM_DENOMINATOR: i64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    arity: usize,
    n: usize,
    table: Vec<Phase>,
}

impl Cochain {
    pub fn trivial(g: &Groupoid, arity: usize) -> Self {
        assert!((1..=MAX_STORED_ARITY).contains(&arity), "unsupported arity {arity}");
        Self {
            arity,
            n: g.len(),
            table: vec![Phase::one(); g.len().pow(arity as u32)],
        }
    }

    /// Fills every composable tuple with `f` (units are left trivial).
    pub fn from_fn(g: &Groupoid, arity: usize, mut f: impl FnMut(&[ElementId]) -> Phase) -> Self {
        let mut out = Self::trivial(g, arity);
        g.for_each_composable(arity, None, None, |t| {
            if !t.iter().any(|&e| g.is_unit(e)) {
                let v = f(t);
                out.set(t, v);
            }
        });
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of arrows of the groupoid this cochain lives on.
    pub fn domain_len(&self) -> usize {
        self.n
    }

    fn index(&self, t: &[ElementId]) -> usize {
        debug_assert_eq!(t.len(), self.arity);
        t.iter().fold(0, |acc, &e| acc * self.n + e)
    }

    #[inline]
    pub fn get(&self, t: &[ElementId]) -> Phase {
        self.table[self.index(t)]
    }

    pub fn set(&mut self, t: &[ElementId], v: Phase) {
        let i = self.index(t);
        self.table[i] = v;
    }

    /// Copy with `delta` multiplied into the entry at `t`.
    pub fn mutated(&self, t: &[ElementId], delta: Phase) -> Self {
        let mut out = self.clone();
        let v = out.get(t) * delta;
        out.set(t, v);
        out
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cochain) -> Self {
        assert_eq!((self.arity, self.n), (other.arity, other.n));
        Self {
            arity: self.arity,
            n: self.n,
            table: self.table.iter().zip(&other.table).map(|(&a, &b)| a * b).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            arity: self.arity,
            n: self.n,
            table: self.table.iter().map(|p| p.conj()).collect(),
        }
    }

    /// Non-trivial entries on composable tuples, in lexicographic order.
    pub fn support(&self, g: &Groupoid) -> Vec<(Vec<ElementId>, Phase)> {
        let mut out = Vec::new();
        g.for_each_composable(self.arity, None, None, |t| {
            let v = self.get(t);
            if !v.is_one() {
                out.push((t.to_vec(), v));
            }
        });
        out
    }

    /// First composable tuple with a unit entry and a non-trivial value.
    pub fn normalization_violation(&self, g: &Groupoid) -> Option<Vec<ElementId>> {
        let mut found = None;
        g.for_each_composable(self.arity, None, None, |t| {
            if found.is_none() && t.iter().any(|&e| g.is_unit(e)) && !self.get(t).is_one() {
                found = Some(t.to_vec());
            }
        });
        found
    }

    pub fn is_normalized(&self, g: &Groupoid) -> bool {
        self.normalization_violation(g).is_none()
    }

    /// Equality on composable tuples only.
    pub fn agrees_with(&self, other: &Cochain, g: &Groupoid) -> bool {
        self.first_disagreement(other, g).is_none()
    }

    pub fn first_disagreement(&self, other: &Cochain, g: &Groupoid) -> Option<Vec<ElementId>> {
        let mut found = None;
        g.for_each_composable(self.arity, None, None, |t| {
            if found.is_none() && self.get(t) != other.get(t) {
                found = Some(t.to_vec());
            }
        });
        found
    }
}

/// `∂a` evaluated at one composable tuple of length `arity(a) + 1`.
pub fn coboundary_at(g: &Groupoid, a: &Cochain, t: &[ElementId]) -> Phase {
    let n = a.arity();
    debug_assert_eq!(t.len(), n + 1);
    let mut buf = Vec::with_capacity(n);
    let mut acc = a.get(&t[1..]);
    for i in 1..=n {
        buf.clear();
        buf.extend_from_slice(&t[..i - 1]);
        buf.push(g.mul(t[i - 1], t[i]));
        buf.extend_from_slice(&t[i + 1..]);
        let v = a.get(&buf);
        acc *= if i % 2 == 0 { v } else { v.conj() };
    }
    let last = a.get(&t[..n]);
    acc * if (n + 1) % 2 == 0 { last } else { last.conj() }
}

fn cocycle_defect(g: &Groupoid, get: impl Fn([ElementId; 3]) -> Phase, [a, b, c, d]: [ElementId; 4]) -> Phase {
    get([b, c, d])
        * get([g.mul(a, b), c, d]).conj()
        * get([a, g.mul(b, c), d])
        * get([a, b, g.mul(c, d)]).conj()
        * get([a, b, c])
}

/// For a 3-cocycle `c`, the first 4-tuple on which the 3-cocycle identity
/// fails after multiplying the single entry `c(t)` by `delta`, or `None` if
/// the mutation goes undetected. Only the 4-tuples having `t` as a face are
/// evaluated, since the identity is unchanged elsewhere.
pub fn mutation_witness(g: &Groupoid, c: &Cochain, t: [ElementId; 3], delta: Phase) -> Option<[ElementId; 4]> {
    let get = |x: [ElementId; 3]| if x == t { c.get(&x) * delta } else { c.get(&x) };
    let [a, b, k] = t;
    let mut candidates: Vec<[ElementId; 4]> = Vec::new();
    candidates.extend(g.range_fiber(g.source(k)).iter().map(|&l| [a, b, k, l]));
    candidates.extend(g.source_fiber(g.range(a)).iter().map(|&f| [f, a, b, k]));
    candidates.extend(g.range_fiber(g.range(k)).iter().map(|&m| [a, b, m, g.mul(g.inv(m), k)]));
    candidates.extend(g.range_fiber(g.range(b)).iter().map(|&h| [a, h, g.mul(g.inv(h), b), k]));
    candidates.extend(g.range_fiber(g.range(a)).iter().map(|&f| [f, g.mul(g.inv(f), a), b, k]));
    candidates.into_iter().find(|&q| !cocycle_defect(g, get, q).is_one())
}

/// `∂a` as a stored cochain; `a` must have arity 1 or 2.
pub fn coboundary(g: &Groupoid, a: &Cochain) -> Result<Cochain> {
    if a.arity() + 1 > MAX_STORED_ARITY {
        return Err(Error::UnsupportedArity(a.arity() + 1));
    }
    let mut out = Cochain::trivial(g, a.arity() + 1);
    g.for_each_composable(a.arity() + 1, None, None, |t| {
        out.set(t, coboundary_at(g, a, t));
    });
    Ok(out)
}

/// Outcome of the exhaustive 3-cocycle check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleVerdict {
    pub tuples_checked: usize,
    pub violations: usize,
    pub first_violation: Option<[ElementId; 4]>,
}

impl CocycleVerdict {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `c(g,h,k) c̄(g,h,kl) c(g,hk,l) c̄(gh,k,l) c(h,k,l) = 1` on all of `G⁽⁴⁾`.
pub fn check_cocycle3(g: &Groupoid, c: &Cochain) -> Result<CocycleVerdict> {
    if c.arity() != 3 {
        return Err(Error::UnsupportedArity(c.arity()));
    }
    if let Some(tuple) = c.normalization_violation(g) {
        return Err(Error::NotNormalized { tuple });
    }
    let per_first: Vec<(usize, Vec<[ElementId; 4]>)> = g
        .elements()
        .into_par_iter()
        .map(|first| {
            let mut count = 0;
            let mut bad = Vec::new();
            let mut t = [first, 0, 0, 0];
            for &h in g.range_fiber(g.source(first)) {
                t[1] = h;
                for &k in g.range_fiber(g.source(h)) {
                    t[2] = k;
                    for &l in g.range_fiber(g.source(k)) {
                        t[3] = l;
                        count += 1;
                        if !coboundary_at(g, c, &t).is_one() {
                            bad.push(t);
                        }
                    }
                }
            }
            (count, bad)
        })
        .collect();
    let tuples_checked = per_first.iter().map(|(c, _)| c).sum();
    let violations = per_first.iter().map(|(_, b)| b.len()).sum();
    let first_violation = per_first.iter().flat_map(|(_, b)| b.first()).next().copied();
    Ok(CocycleVerdict {
        tuples_checked,
        violations,
        first_violation,
    })
}

/// Pullback of a cochain on a group (viewed as a one-unit groupoid) along `hom`.
pub fn inflate(c_group: &Cochain, g: &Groupoid, hom: &GroupoidHom) -> Cochain {
    let mut buf = vec![0; c_group.arity()];
    Cochain::from_fn(g, c_group.arity(), |t| {
        for (b, &e) in buf.iter_mut().zip(t) {
            *b = hom.apply(e);
        }
        c_group.get(&buf)
    })
}

/// The standard generator of `H³(ℤ/k, 𝕋)`: `c(a,b,c) = exp(2πi·a·⌊(b+c)/k⌋/k)`,
/// as a cochain on `Groupoid::from_group(&FiniteGroup::cyclic(k))`.
pub fn cyclic_generator(k: usize) -> Cochain {
    let g = Groupoid::from_group(&FiniteGroup::cyclic(k));
    let k64 = k as i64;
    Cochain::from_fn(&g, 3, |t| {
        let (a, b, c) = (t[0] as i64, t[1] as i64, t[2] as i64);
        Phase::new(a * ((b + c) / k64), k64)
    })
}

/// `ζ_γ(a,b) = c̄(a,b,γ)·c(a,γ,γ⁻¹bγ)·c̄(γ,γ⁻¹aγ,γ⁻¹bγ)` for `a, b` in the
/// isotropy at `r(γ)`.
pub fn zeta(g: &Groupoid, c: &Cochain, gamma: ElementId, a: ElementId, b: ElementId) -> Result<Phase> {
    let y = g.range(gamma);
    for e in [a, b] {
        if g.range(e) != y || g.source(e) != y {
            return Err(Error::NotComposable(format!(
                "{e} is not in the isotropy at r({gamma}) = {y}"
            )));
        }
    }
    let a_c = g.conj_by_inverse(gamma, a);
    let b_c = g.conj_by_inverse(gamma, b);
    Ok(c.get(&[a, b, gamma]).conj() * c.get(&[a, gamma, b_c]) * c.get(&[gamma, a_c, b_c]).conj())
}

/// `η_{γ₁,γ₂}(a) = c̄(γ₁,γ₁⁻¹aγ₁,γ₂)·c(γ₁,γ₂,γ⁻¹aγ)·c̄(a,γ₁,γ₂)` with `γ = γ₁γ₂`.
pub fn eta(g: &Groupoid, c: &Cochain, gamma1: ElementId, gamma2: ElementId, a: ElementId) -> Result<Phase> {
    let (m, m2) = eta_arguments(g, gamma1, gamma2, a)?;
    Ok(c.get(&[gamma1, m, gamma2]).conj() * c.get(&[gamma1, gamma2, m2]) * c.get(&[a, gamma1, gamma2]).conj())
}

/// The scalar that actually relates the two sides of the `η` identity in a
/// model where `w(γ₁,γ₂)` need not be trivial:
/// `α_{γ₁}(V(γ₁⁻¹aγ₁,γ₂))·V(a,γ₁) = η̃·w(γ₁,γ₂)·V(a,γ)·α_a(w(γ₁,γ₂))*` with
/// `η̃ = c̄(γ₁,γ₁⁻¹aγ₁,γ₂)·c(γ₁,γ₂,γ⁻¹aγ)·c(a,γ₁,γ₂)`.
pub fn eta_twisted(g: &Groupoid, c: &Cochain, gamma1: ElementId, gamma2: ElementId, a: ElementId) -> Result<Phase> {
    let (m, m2) = eta_arguments(g, gamma1, gamma2, a)?;
    Ok(c.get(&[gamma1, m, gamma2]).conj() * c.get(&[gamma1, gamma2, m2]) * c.get(&[a, gamma1, gamma2]))
}

fn eta_arguments(g: &Groupoid, gamma1: ElementId, gamma2: ElementId, a: ElementId) -> Result<(ElementId, ElementId)> {
    if !g.composable(gamma1, gamma2) {
        return Err(Error::NotComposable(format!("({gamma1}, {gamma2})")));
    }
    let y = g.range(gamma1);
    if g.range(a) != y || g.source(a) != y {
        return Err(Error::NotComposable(format!(
            "{a} is not in the isotropy at r({gamma1}) = {y}"
        )));
    }
    let m = g.conj_by_inverse(gamma1, a);
    let m2 = g.conj_by_inverse(gamma2, m);
    Ok((m, m2))
}

/// A normalized cochain with uniformly random angles `j/24`.
pub fn random_cochain<R: Rng + ?Sized>(g: &Groupoid, arity: usize, rng: &mut R) -> Cochain {
    Cochain::from_fn(g, arity, |_| {
        Phase::new(rng.random_range(0..RANDOM_DENOMINATOR), RANDOM_DENOMINATOR)
    })
}

/// `inflated · ∂b` for a random normalized 2-cochain `b`; a cocycle whenever
/// `inflated` is.
pub fn random_cocycle<R: Rng + ?Sized>(g: &Groupoid, inflated: &Cochain, rng: &mut R) -> Cochain {
    let b = random_cochain(g, 2, rng);
    let db = coboundary(g, &b).expect("arity 2 coboundary");
    inflated.mul(&db)
}

/// Finds a normalized 2-cochain `b` with `∂b = c`, or `None` if `c` is not a
/// coboundary. Exact: the system is solved over `ℚ/ℤ` by integer
/// diagonalization.
pub fn find_primitive(g: &Groupoid, c: &Cochain) -> Result<Option<Cochain>> {
    if c.arity() != 3 {
        return Err(Error::UnsupportedArity(c.arity()));
    }
    let pairs: Vec<Vec<ElementId>> = g
        .composable_tuples(2, None, None)
        .into_iter()
        .filter(|t| !t.iter().any(|&e| g.is_unit(e)))
        .collect();
    let mut col = std::collections::HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        col.insert((p[0], p[1]), i);
    }
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut rhs = Vec::new();
    g.for_each_composable(3, None, None, |t| {
        if t.iter().any(|&e| g.is_unit(e)) {
            return;
        }
        let (a, b, k) = (t[0], t[1], t[2]);
        let terms = [((b, k), 1), ((g.mul(a, b), k), -1), ((a, g.mul(b, k)), 1), ((a, b), -1)];
        let row: SparseRow = terms
            .iter()
            .filter_map(|(key, s)| col.get(key).map(|&j| (j, *s)))
            .collect();
        rows.push(row);
        rhs.push(c.get(t).angle());
    });
    let Some(sol) = smith::solve_mod_one(&rows, pairs.len(), &rhs)? else {
        return Ok(None);
    };
    let mut b = Cochain::trivial(g, 2);
    for (p, v) in pairs.iter().zip(sol) {
        b.set(p, Phase::from_angle(v));
    }
    Ok(Some(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupAction, GroupHom};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z4_bundle(points: usize) -> (Groupoid, Cochain) {
        let z4 = FiniteGroup::cyclic(4);
        let g = Groupoid::group_bundle(points, &z4);
        let hom = GroupoidHom::group_coordinate(&g, &z4).unwrap();
        let c = inflate(&cyclic_generator(4), &g, &hom);
        (g, c)
    }

    #[test]
    fn trivial_is_cocycle() {
        let g = Groupoid::pair(3);
        let v = check_cocycle3(&g, &Cochain::trivial(&g, 3)).unwrap();
        assert!(v.passed());
        assert_eq!(v.tuples_checked, 3usize.pow(5));
    }

    #[test]
    fn generators_are_cocycles() {
        for k in 1..=6 {
            let grp = Groupoid::from_group(&FiniteGroup::cyclic(k));
            assert!(check_cocycle3(&grp, &cyclic_generator(k)).unwrap().passed(), "k = {k}");
        }
        let (g, c) = z4_bundle(2);
        assert!(check_cocycle3(&g, &c).unwrap().passed());
    }

    #[test]
    fn inflation_through_quotient_on_transformation_groupoid() {
        let z4 = FiniteGroup::cyclic(4);
        let act = GroupAction::cyclic_translation(4, 2).unwrap();
        let t = Groupoid::transformation(&z4, &act);
        let hom = GroupoidHom::group_coordinate(&t, &z4)
            .unwrap()
            .then(&GroupHom::cyclic_reduction(4, 2).unwrap());
        let c = inflate(&cyclic_generator(2), &t, &hom);
        assert!(c.is_normalized(&t));
        assert!(check_cocycle3(&t, &c).unwrap().passed());
        assert!(!c.support(&t).is_empty());
        let trivial = inflate(&cyclic_generator(2), &t, &GroupoidHom::trivial(&t));
        assert!(trivial.support(&t).is_empty());
    }

    #[test]
    fn double_coboundary_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Groupoid::pair(3);
        let a = random_cochain(&g, 1, &mut rng);
        let da = coboundary(&g, &a).unwrap();
        let dda = coboundary(&g, &da).unwrap();
        assert!(dda.support(&g).is_empty());
        let b = random_cochain(&g, 2, &mut rng);
        assert!(check_cocycle3(&g, &coboundary(&g, &b).unwrap()).unwrap().passed());
    }

    #[test]
    fn mutation_is_caught() {
        let (g, c) = z4_bundle(1);
        let bad = c.mutated(&[1, 2, 3], Phase::new(1, 3));
        let v = check_cocycle3(&g, &bad).unwrap();
        assert!(!v.passed());
        assert!(v.first_violation.is_some());
    }

    #[test]
    fn non_normalized_input_rejected() {
        let g = Groupoid::pair(2);
        let mut c = Cochain::trivial(&g, 3);
        c.set(&[0, 0, 0], Phase::new(1, 2));
        assert!(matches!(check_cocycle3(&g, &c), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn primitive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Groupoid::pair(3);
        let c = coboundary(&g, &random_cochain(&g, 2, &mut rng)).unwrap();
        let b = find_primitive(&g, &c).unwrap().unwrap();
        assert!(coboundary(&g, &b).unwrap().agrees_with(&c, &g));

        // The ℤ/4 generator is not a coboundary; its inflation from ℤ/2 is.
        let z4 = Groupoid::from_group(&FiniteGroup::cyclic(4));
        assert!(find_primitive(&z4, &cyclic_generator(4)).unwrap().is_none());
        let hom = GroupoidHom::new(&z4, &FiniteGroup::cyclic(2), vec![0, 1, 0, 1]).unwrap();
        let c2 = inflate(&cyclic_generator(2), &z4, &hom);
        let b2 = find_primitive(&z4, &c2).unwrap().unwrap();
        assert!(coboundary(&z4, &b2).unwrap().agrees_with(&c2, &z4));
    }

    #[test]
    fn zeta_eta_degenerate_cases() {
        let (g, c) = z4_bundle(1);
        for a in 0..4 {
            for b in 0..4 {
                assert!(zeta(&g, &c, 0, a, b).unwrap().is_one());
            }
        }
        let triv = Cochain::trivial(&g, 3);
        assert!(eta(&g, &triv, 1, 2, 3).unwrap().is_one());
        let pair = Groupoid::pair(2);
        assert!(zeta(&pair, &Cochain::trivial(&pair, 3), 1, 1, 0).is_err());
    }
}
