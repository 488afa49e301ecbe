//! Finite discrete groupoids given by explicit tables.
//!
//! Arrows are dense integer ids. A [`Groupoid`] may hold tables that break
//! the axioms (for instance after loading a corrupted file); [`Groupoid::validate`]
//! reports every violation as data. All other operations assume a valid table.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupAction, GroupHom};

pub type ElementId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    n: usize,
    units: Vec<ElementId>,
    is_unit: Vec<bool>,
    source: Vec<ElementId>,
    range: Vec<ElementId>,
    inverse: Vec<ElementId>,
    compose: Vec<Option<ElementId>>,
    /// `range_fibers[x]` is `G^x` in increasing order (empty for non-units).
    range_fibers: Vec<Vec<ElementId>>,
    source_fibers: Vec<Vec<ElementId>>,
    range_pos: Vec<usize>,
}

/// One failed axiom check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnitNotFixed { unit: ElementId },
    SourceNotUnit { g: ElementId },
    RangeNotUnit { g: ElementId },
    MissingProduct { g: ElementId, h: ElementId },
    SpuriousProduct { g: ElementId, h: ElementId },
    ProductSource { g: ElementId, h: ElementId },
    ProductRange { g: ElementId, h: ElementId },
    LeftUnit { unit: ElementId, g: ElementId },
    RightUnit { unit: ElementId, g: ElementId },
    Associativity { g: ElementId, h: ElementId, k: ElementId },
    InverseInvolution { g: ElementId },
    InverseLaw { g: ElementId },
}

impl Violation {
    /// Whether this violation involves the product `g·h`.
    pub fn mentions_pair(&self, a: ElementId, b: ElementId) -> bool {
        match *self {
            Violation::MissingProduct { g, h }
            | Violation::SpuriousProduct { g, h }
            | Violation::ProductSource { g, h }
            | Violation::ProductRange { g, h } => (g, h) == (a, b),
            Violation::LeftUnit { unit, g } => (unit, g) == (a, b),
            Violation::RightUnit { unit, g } => (g, unit) == (a, b),
            Violation::Associativity { g, h, k } => (g, h) == (a, b) || (h, k) == (a, b),
            _ => false,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitNotFixed { unit } => write!(f, "unit {unit} is not its own source/range"),
            Violation::SourceNotUnit { g } => write!(f, "source of {g} is not a unit"),
            Violation::RangeNotUnit { g } => write!(f, "range of {g} is not a unit"),
            Violation::MissingProduct { g, h } => write!(f, "({g}, {h}) composable but has no product"),
            Violation::SpuriousProduct { g, h } => write!(f, "({g}, {h}) not composable but has a product"),
            Violation::ProductSource { g, h } => write!(f, "s({g}·{h}) ≠ s({h})"),
            Violation::ProductRange { g, h } => write!(f, "r({g}·{h}) ≠ r({g})"),
            Violation::LeftUnit { unit, g } => write!(f, "{unit}·{g} ≠ {g}"),
            Violation::RightUnit { unit, g } => write!(f, "{g}·{unit} ≠ {g}"),
            Violation::Associativity { g, h, k } => write!(f, "({g}·{h})·{k} ≠ {g}·({h}·{k})"),
            Violation::InverseInvolution { g } => write!(f, "inverse of inverse of {g} is not {g}"),
            Violation::InverseLaw { g } => write!(f, "{g}·{g}⁻¹ or {g}⁻¹·{g} is not the expected unit"),
        }
    }
}

/// The JSON interchange form of a groupoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidData {
    pub units: Vec<ElementId>,
    pub source: Vec<ElementId>,
    pub range: Vec<ElementId>,
    pub compose: Vec<[ElementId; 3]>,
    pub inverse: Vec<ElementId>,
}

impl Groupoid {
    /// Assembles a groupoid from raw tables. Only structural problems (length
    /// mismatches, ids out of range, duplicate products) are errors here;
    /// axiom failures are left for [`Groupoid::validate`].
    pub fn from_parts(
        units: Vec<ElementId>,
        source: Vec<ElementId>,
        range: Vec<ElementId>,
        products: impl IntoIterator<Item = (ElementId, ElementId, ElementId)>,
        inverse: Vec<ElementId>,
    ) -> Result<Self> {
        let n = source.len();
        if range.len() != n || inverse.len() != n {
            return Err(Error::MalformedGroupoid(format!(
                "source/range/inverse lengths {}/{}/{} differ",
                source.len(),
                range.len(),
                inverse.len()
            )));
        }
        let oob = |v: &[ElementId]| v.iter().copied().find(|&e| e >= n);
        for (name, table) in [
            ("units", &units),
            ("source", &source),
            ("range", &range),
            ("inverse", &inverse),
        ] {
            if let Some(e) = oob(table) {
                return Err(Error::MalformedGroupoid(format!("{name} mentions id {e} ≥ {n}")));
            }
        }
        let mut is_unit = vec![false; n];
        for &u in &units {
            if is_unit[u] {
                return Err(Error::MalformedGroupoid(format!("unit {u} listed twice")));
            }
            is_unit[u] = true;
        }
        let mut compose = vec![None; n * n];
        for (g, h, gh) in products {
            if g >= n || h >= n || gh >= n {
                return Err(Error::MalformedGroupoid(format!(
                    "product entry ({g}, {h}, {gh}) out of range"
                )));
            }
            if compose[g * n + h].replace(gh).is_some() {
                return Err(Error::MalformedGroupoid(format!("product ({g}, {h}) given twice")));
            }
        }
        let mut units = units;
        units.sort_unstable();
        let mut range_fibers = vec![Vec::new(); n];
        let mut source_fibers = vec![Vec::new(); n];
        let mut range_pos = vec![usize::MAX; n];
        for g in 0..n {
            if is_unit[range[g]] {
                range_pos[g] = range_fibers[range[g]].len();
                range_fibers[range[g]].push(g);
            }
            if is_unit[source[g]] {
                source_fibers[source[g]].push(g);
            }
        }
        Ok(Self {
            n,
            units,
            is_unit,
            source,
            range,
            inverse,
            compose,
            range_fibers,
            source_fibers,
            range_pos,
        })
    }

    pub fn from_data(data: &GroupoidData) -> Result<Self> {
        Self::from_parts(
            data.units.clone(),
            data.source.clone(),
            data.range.clone(),
            data.compose.iter().map(|&[g, h, gh]| (g, h, gh)),
            data.inverse.clone(),
        )
    }

    pub fn to_data(&self) -> GroupoidData {
        let mut compose = Vec::new();
        for g in 0..self.n {
            for h in 0..self.n {
                if let Some(gh) = self.compose[g * self.n + h] {
                    compose.push([g, h, gh]);
                }
            }
        }
        GroupoidData {
            units: self.units.clone(),
            source: self.source.clone(),
            range: self.range.clone(),
            compose,
            inverse: self.inverse.clone(),
        }
    }

    /// Same groupoid with one product entry overwritten. Used to build
    /// deliberately broken inputs.
    pub fn with_product_overridden(&self, g: ElementId, h: ElementId, gh: ElementId) -> Self {
        let mut out = self.clone();
        out.compose[g * self.n + h] = Some(gh);
        out
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.n
    }

    pub fn units(&self) -> &[ElementId] {
        &self.units
    }

    #[inline]
    pub fn is_unit(&self, g: ElementId) -> bool {
        self.is_unit[g]
    }

    #[inline]
    pub fn source(&self, g: ElementId) -> ElementId {
        self.source[g]
    }

    #[inline]
    pub fn range(&self, g: ElementId) -> ElementId {
        self.range[g]
    }

    #[inline]
    pub fn inv(&self, g: ElementId) -> ElementId {
        self.inverse[g]
    }

    #[inline]
    pub fn compose(&self, g: ElementId, h: ElementId) -> Option<ElementId> {
        self.compose[g * self.n + h]
    }

    #[inline]
    pub fn composable(&self, g: ElementId, h: ElementId) -> bool {
        self.source[g] == self.range[h]
    }

    /// Product of a composable pair. Panics otherwise.
    #[inline]
    pub fn mul(&self, g: ElementId, h: ElementId) -> ElementId {
        match self.compose[g * self.n + h] {
            Some(gh) => gh,
            None => panic!("({g}, {h}) is not composable"),
        }
    }

    /// Product of a composable word `g₁·g₂·…`.
    pub fn mul_all(&self, word: &[ElementId]) -> ElementId {
        let (&first, rest) = word.split_first().expect("empty word");
        rest.iter().fold(first, |acc, &g| self.mul(acc, g))
    }

    /// `g⁻¹·n·g`, defined when `n` lies in the isotropy at `r(g)`.
    pub fn conj_by_inverse(&self, g: ElementId, n: ElementId) -> ElementId {
        self.mul(self.mul(self.inv(g), n), g)
    }

    /// `G^x`, sorted.
    pub fn range_fiber(&self, x: ElementId) -> &[ElementId] {
        &self.range_fibers[x]
    }

    /// `G_x`, sorted.
    pub fn source_fiber(&self, x: ElementId) -> &[ElementId] {
        &self.source_fibers[x]
    }

    /// Position of `g` inside `G^{r(g)}`.
    #[inline]
    pub fn range_position(&self, g: ElementId) -> usize {
        self.range_pos[g]
    }

    /// `G^y_x`: arrows from `x` to `y`.
    pub fn hom_set(&self, y: ElementId, x: ElementId) -> Vec<ElementId> {
        self.range_fibers[y]
            .iter()
            .copied()
            .filter(|&g| self.source[g] == x)
            .collect()
    }

    pub fn isotropy(&self, x: ElementId) -> Vec<ElementId> {
        self.hom_set(x, x)
    }

    pub fn is_isotropy(&self, g: ElementId) -> bool {
        self.source[g] == self.range[g]
    }

    /// Units in the orbit of `x`, sorted.
    pub fn orbit(&self, x: ElementId) -> Vec<ElementId> {
        let mut out: Vec<ElementId> = self.range_fibers[x].iter().map(|&g| self.source[g]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_transitive(&self) -> bool {
        match self.units.first() {
            Some(&x) => self.orbit(x).len() == self.units.len(),
            None => true,
        }
    }

    /// Checks every groupoid axiom and returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n;
        for &u in &self.units {
            if self.source[u] != u || self.range[u] != u {
                out.push(Violation::UnitNotFixed { unit: u });
            }
        }
        for g in 0..n {
            if !self.is_unit[self.source[g]] {
                out.push(Violation::SourceNotUnit { g });
            }
            if !self.is_unit[self.range[g]] {
                out.push(Violation::RangeNotUnit { g });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for g in 0..n {
            for h in 0..n {
                let prod = self.compose(g, h);
                match (self.composable(g, h), prod) {
                    (true, None) => out.push(Violation::MissingProduct { g, h }),
                    (false, Some(_)) => out.push(Violation::SpuriousProduct { g, h }),
                    (true, Some(gh)) => {
                        if self.source[gh] != self.source[h] {
                            out.push(Violation::ProductSource { g, h });
                        }
                        if self.range[gh] != self.range[g] {
                            out.push(Violation::ProductRange { g, h });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for g in 0..n {
            let (r, s) = (self.range[g], self.source[g]);
            if self.compose(r, g) != Some(g) {
                out.push(Violation::LeftUnit { unit: r, g });
            }
            if self.compose(g, s) != Some(g) {
                out.push(Violation::RightUnit { unit: s, g });
            }
            let gi = self.inverse[g];
            if self.inverse[gi] != g {
                out.push(Violation::InverseInvolution { g });
            }
            if self.compose(g, gi) != Some(r) || self.compose(gi, g) != Some(s) {
                out.push(Violation::InverseLaw { g });
            }
        }
        for g in 0..n {
            for &h in &self.range_fibers[self.source[g]] {
                let Some(gh) = self.compose(g, h) else { continue };
                for &k in &self.range_fibers[self.source[h]] {
                    let lhs = self.compose(gh, k);
                    let rhs = self.compose(h, k).and_then(|hk| self.compose(g, hk));
                    if lhs != rhs {
                        out.push(Violation::Associativity { g, h, k });
                    }
                }
            }
        }
        out
    }

    /// Fails with the first violation if the axioms do not hold.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        match report.first() {
            None => Ok(()),
            Some(v) => Err(Error::AxiomViolation {
                count: report.len(),
                first: v.to_string(),
            }),
        }
    }

    /// Calls `f` on every composable tuple of length `len` in lexicographic
    /// order, optionally restricted to `r(t₁) = x` and `s(t_len) = y`.
    pub fn for_each_composable<F: FnMut(&[ElementId])>(
        &self,
        len: usize,
        x: Option<ElementId>,
        y: Option<ElementId>,
        mut f: F,
    ) {
        if len == 0 {
            return;
        }
        let mut buf = Vec::with_capacity(len);
        let firsts: Vec<ElementId> = match x {
            Some(x) => self.range_fibers[x].clone(),
            None => (0..self.n).collect(),
        };
        for t1 in firsts {
            buf.push(t1);
            self.extend_tuples(len, y, &mut buf, &mut f);
            buf.pop();
        }
    }

    fn extend_tuples<F: FnMut(&[ElementId])>(
        &self,
        len: usize,
        y: Option<ElementId>,
        buf: &mut Vec<ElementId>,
        f: &mut F,
    ) {
        let last = *buf.last().unwrap();
        if buf.len() == len {
            if y.is_none_or(|y| self.source[last] == y) {
                f(buf);
            }
            return;
        }
        for &t in &self.range_fibers[self.source[last]] {
            buf.push(t);
            self.extend_tuples(len, y, buf, f);
            buf.pop();
        }
    }

    /// `G^{(len)}`, or `G^{x,(len)}_y` when constraints are given.
    pub fn composable_tuples(&self, len: usize, x: Option<ElementId>, y: Option<ElementId>) -> Vec<Vec<ElementId>> {
        let mut out = Vec::new();
        self.for_each_composable(len, x, y, |t| out.push(t.to_vec()));
        out
    }

    pub fn count_composable(&self, len: usize, x: Option<ElementId>, y: Option<ElementId>) -> usize {
        let mut count = 0;
        self.for_each_composable(len, x, y, |_| count += 1);
        count
    }

    /// Decomposes the groupoid as isotropy ⋊ orbit relation.
    pub fn semidirect(&self, rule: SectionRule) -> SemidirectPresentation {
        let isotropy = self.units.iter().map(|&x| (x, self.isotropy(x))).collect();
        let mut relation = Vec::new();
        let mut section = BTreeMap::new();
        for &y in &self.units {
            for &x in &self.units {
                let arrows = self.hom_set(y, x);
                let pick = match rule {
                    _ if x == y => Some(x),
                    SectionRule::Least => arrows.first().copied(),
                    SectionRule::Greatest => arrows.last().copied(),
                };
                if let Some(sigma) = pick {
                    relation.push((y, x));
                    section.insert((y, x), sigma);
                }
            }
        }
        SemidirectPresentation {
            isotropy,
            relation,
            section,
        }
    }

    /// Pair groupoid on `m` points; arrow `(y, x)` has id `y*m + x`.
    pub fn pair(m: usize) -> Self {
        let id = |y: usize, x: usize| y * m + x;
        let n = m * m;
        let units = (0..m).map(|x| id(x, x)).collect();
        let source = (0..n).map(|g| id(g % m, g % m)).collect();
        let range = (0..n).map(|g| id(g / m, g / m)).collect();
        let inverse = (0..n).map(|g| id(g % m, g / m)).collect();
        let mut products = Vec::new();
        for z in 0..m {
            for y in 0..m {
                for x in 0..m {
                    products.push((id(z, y), id(y, x), id(z, x)));
                }
            }
        }
        Self::from_parts(units, source, range, products, inverse).expect("pair groupoid tables")
    }

    /// `X × Γ` with `|X| = points`; arrow `(x, γ)` has id `x*|Γ| + γ`.
    pub fn group_bundle(points: usize, group: &FiniteGroup) -> Self {
        let k = group.order();
        let n = points * k;
        let units = (0..points).map(|x| x * k).collect();
        let base: Vec<ElementId> = (0..n).map(|g| (g / k) * k).collect();
        let inverse = (0..n).map(|g| (g / k) * k + group.inv(g % k)).collect();
        let mut products = Vec::new();
        for x in 0..points {
            for a in 0..k {
                for b in 0..k {
                    products.push((x * k + a, x * k + b, x * k + group.mul(a, b)));
                }
            }
        }
        Self::from_parts(units, base.clone(), base, products, inverse).expect("bundle tables")
    }

    /// The group itself as a one-unit groupoid (ids are group elements).
    pub fn from_group(group: &FiniteGroup) -> Self {
        Self::group_bundle(1, group)
    }

    /// Transformation groupoid `Γ ⋉ X`: arrow `(x, γ)` (id `x*|Γ| + γ`) goes
    /// from `x` to `γ·x`.
    pub fn transformation(group: &FiniteGroup, action: &GroupAction) -> Self {
        let k = group.order();
        let m = action.points();
        let id = |x: usize, gamma: usize| x * k + gamma;
        let n = m * k;
        let units = (0..m).map(|x| id(x, 0)).collect();
        let source = (0..n).map(|g| id(g / k, 0)).collect();
        let range = (0..n).map(|g| id(action.apply(g % k, g / k), 0)).collect();
        let inverse = (0..n)
            .map(|g| {
                let (x, gamma) = (g / k, g % k);
                id(action.apply(gamma, x), group.inv(gamma))
            })
            .collect();
        let mut products = Vec::new();
        for x in 0..m {
            for gamma in 0..k {
                let y = action.apply(gamma, x);
                for delta in 0..k {
                    products.push((id(y, delta), id(x, gamma), id(x, group.mul(delta, gamma))));
                }
            }
        }
        Self::from_parts(units, source, range, products, inverse).expect("transformation tables")
    }

    /// Product groupoid; `(g, h)` has id `g * other.len() + h`.
    pub fn product(&self, other: &Groupoid) -> Self {
        let (n1, n2) = (self.n, other.n);
        let id = |a: usize, b: usize| a * n2 + b;
        let mut units = Vec::new();
        for &u in &self.units {
            for &v in &other.units {
                units.push(id(u, v));
            }
        }
        let n = n1 * n2;
        let source = (0..n).map(|g| id(self.source[g / n2], other.source[g % n2])).collect();
        let range = (0..n).map(|g| id(self.range[g / n2], other.range[g % n2])).collect();
        let inverse = (0..n)
            .map(|g| id(self.inverse[g / n2], other.inverse[g % n2]))
            .collect();
        let mut products = Vec::new();
        for g in 0..n {
            for h in 0..n {
                if let (Some(a), Some(b)) = (self.compose(g / n2, h / n2), other.compose(g % n2, h % n2)) {
                    products.push((g, h, id(a, b)));
                }
            }
        }
        Self::from_parts(units, source, range, products, inverse).expect("product tables")
    }
}

/// How to pick the embedded orbit-relation arrow `σ(y, x) ∈ G^y_x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionRule {
    #[default]
    Least,
    Greatest,
}

/// `G = H ⋊ K` with a chosen section `σ: K → G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectPresentation {
    /// `H_x` per unit `x`.
    pub isotropy: BTreeMap<ElementId, Vec<ElementId>>,
    /// Orbit relation `K`, as `(y, x)` pairs in increasing order.
    pub relation: Vec<(ElementId, ElementId)>,
    section: BTreeMap<(ElementId, ElementId), ElementId>,
}

impl SemidirectPresentation {
    /// `σ(y, x)`, an arrow from `x` to `y`.
    pub fn sigma(&self, y: ElementId, x: ElementId) -> Option<ElementId> {
        self.section.get(&(y, x)).copied()
    }

    pub fn related(&self, y: ElementId, x: ElementId) -> bool {
        self.section.contains_key(&(y, x))
    }

    /// Writes `g = h·σ(r(g), s(g))` and returns `h ∈ H_{r(g)}`.
    pub fn isotropy_part(&self, g: &Groupoid, arrow: ElementId) -> ElementId {
        let sigma = self
            .sigma(g.range(arrow), g.source(arrow))
            .expect("arrow relates its endpoints");
        g.mul(arrow, g.inv(sigma))
    }
}

/// A groupoid homomorphism into a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidHom {
    pub images: Vec<usize>,
}

impl GroupoidHom {
    pub fn new(g: &Groupoid, target: &FiniteGroup, images: Vec<usize>) -> Result<Self> {
        if images.len() != g.len() || images.iter().any(|&v| v >= target.order()) {
            return Err(Error::InvalidHomomorphism("image table shape".into()));
        }
        for &u in g.units() {
            if images[u] != target.identity() {
                return Err(Error::InvalidHomomorphism(format!("unit {u} not sent to identity")));
            }
        }
        for a in g.elements() {
            for &b in g.range_fiber(g.source(a)) {
                if images[g.mul(a, b)] != target.mul(images[a], images[b]) {
                    return Err(Error::InvalidHomomorphism(format!("not multiplicative at ({a}, {b})")));
                }
            }
        }
        Ok(Self { images })
    }

    pub fn trivial(g: &Groupoid) -> Self {
        Self {
            images: vec![0; g.len()],
        }
    }

    /// `(x, γ) ↦ γ` for bundles and transformation groupoids built here.
    pub fn group_coordinate(g: &Groupoid, group: &FiniteGroup) -> Result<Self> {
        let images = g.elements().map(|e| e % group.order()).collect();
        Self::new(g, group, images)
    }

    pub fn then(&self, hom: &GroupHom) -> Self {
        Self {
            images: self.images.iter().map(|&a| hom.apply(a)).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, g: ElementId) -> usize {
        self.images[g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_shape() {
        let g = Groupoid::pair(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g.units().len(), 3);
        assert!(g.validate().is_empty());
        assert!(g.is_transitive());
    }

    #[test]
    fn corrupted_product_is_named() {
        let g = Groupoid::pair(3);
        // (0,1)·(1,2) = (0,2); overwrite with (1,2).
        let (a, b) = (1, 5);
        let bad = g.with_product_overridden(a, b, 5);
        let report = bad.validate();
        assert!(!report.is_empty());
        assert!(report.iter().any(|v| v.mentions_pair(a, b)), "{report:?}");
    }

    #[test]
    fn group_bundle_is_valid_and_disconnected() {
        let g = Groupoid::group_bundle(2, &FiniteGroup::cyclic(2));
        assert!(g.validate().is_empty());
        assert!(!g.is_transitive());
        assert_eq!(g.isotropy(0), vec![0, 1]);
    }

    #[test]
    fn tuple_counts() {
        let p2 = Groupoid::pair(2);
        assert_eq!(p2.count_composable(2, None, None), 8);
        let z2 = Groupoid::from_group(&FiniteGroup::cyclic(2));
        assert_eq!(z2.count_composable(3, None, None), 8);
        for &u in p2.units() {
            assert_eq!(p2.composable_tuples(1, Some(u), Some(u)), vec![vec![u]]);
        }
    }

    #[test]
    fn tuples_are_lexicographic() {
        let g = Groupoid::pair(2);
        let tuples = g.composable_tuples(3, None, None);
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
    }

    #[test]
    fn semidirect_examples() {
        let pair = Groupoid::pair(3);
        let p = pair.semidirect(SectionRule::Least);
        assert!(p.isotropy.values().all(|h| h.len() == 1));
        assert_eq!(p.relation.len(), 9);
        assert_eq!(p.sigma(3, 4), None);
        assert_eq!(p.sigma(8, 8), Some(8));
        // σ(y,x) = (y,x), whose id is y*3+x; units are ids 0,4,8.
        assert_eq!(p.sigma(8, 0), Some(2 * 3));

        let bundle = Groupoid::group_bundle(3, &FiniteGroup::cyclic(2));
        let b = bundle.semidirect(SectionRule::Least);
        assert_eq!(b.relation, vec![(0, 0), (2, 2), (4, 4)]);

        let z2 = FiniteGroup::cyclic(2);
        let swap = GroupAction::new(&z2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let t = Groupoid::transformation(&z2, &swap);
        let tp = t.semidirect(SectionRule::Least);
        assert!(tp.isotropy.values().all(|h| h.len() == 1));
        assert_eq!(tp.relation.len(), 4);
    }

    #[test]
    fn generators_validate() {
        let z4 = FiniteGroup::cyclic(4);
        let g = Groupoid::from_group(&z4);
        assert_eq!(g.len(), 4);
        assert_eq!(g.units(), &[0]);
        let act = GroupAction::cyclic_translation(4, 4).unwrap();
        let t = Groupoid::transformation(&z4, &act);
        assert_eq!(t.len(), 16);
        assert!(t.validate().is_empty());
        assert!(t.units().iter().all(|&x| t.isotropy(x).len() == 1));
        let prod = Groupoid::pair(2).product(&Groupoid::from_group(&FiniteGroup::cyclic(3)));
        assert_eq!(prod.len(), 12);
        assert!(prod.validate().is_empty());
        let s3 = Groupoid::from_group(&FiniteGroup::dihedral(3));
        assert!(s3.validate().is_empty());
    }

    #[test]
    fn homomorphism_checks() {
        let z4 = FiniteGroup::cyclic(4);
        let g = Groupoid::group_bundle(2, &z4);
        let hom = GroupoidHom::group_coordinate(&g, &z4).unwrap();
        let red = GroupHom::cyclic_reduction(4, 2).unwrap();
        let composite = hom.then(&red);
        assert!(GroupoidHom::new(&g, &FiniteGroup::cyclic(2), composite.images.clone()).is_ok());
        let mut broken = composite.images.clone();
        broken[1] = 0;
        assert!(GroupoidHom::new(&g, &FiniteGroup::cyclic(2), broken).is_err());
    }

    #[test]
    fn isotropy_factorization() {
        let z4 = FiniteGroup::cyclic(4);
        let act = GroupAction::cyclic_translation(4, 2).unwrap();
        let t = Groupoid::transformation(&z4, &act);
        for rule in [SectionRule::Least, SectionRule::Greatest] {
            let p = t.semidirect(rule);
            for g in t.elements() {
                let h = p.isotropy_part(&t, g);
                assert!(t.is_isotropy(h));
                assert_eq!(t.range(h), t.range(g));
                let sigma = p.sigma(t.range(g), t.source(g)).unwrap();
                assert_eq!(t.mul(h, sigma), g);
            }
        }
    }
}
