//! The level-`n` model action.
//!
//! `A_n(x) = ⊕_{k ∈ G^x} B_n(k)` where `B_n(k)` acts on `ℓ²(G^{r(k),(n)}_{s(k)})`,
//! the composable paths `t = (t₁,…,t_n)` with `r(t₁) = r(k)` and
//! `s(t_n) = s(k)`. Paths are ordered lexicographically, so in
//! `B_{n+1} ≅ B_n ⊗ (last leg)` the last leg varies fastest.
//!
//! The cocycle enters through three families of partial monomial matrices:
//!
//! - `u_g^n(k) e_t = c(g, t₁, t₁⁻¹g⁻¹k) e_{gt}`, unitary from the basis of `g⁻¹k` to that of `k`;
//! - `w^n(g,h)(k)`, diagonal with entry `c̄(g, h, (gh)⁻¹s₁)` at the path `s`;
//! - `I_n(k,l)`, diagonal on paths `(t, l)` with entry `c̄(t₁, t₁⁻¹k, l)` and zero elsewhere.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::cochain::{self, Cochain};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, Groupoid, SemidirectPresentation};
use crate::phase::Phase;
use crate::report::{Check, Residual};
use crate::rng::argument_rng;
use crate::walk::{self, FiberFunction, MeasureFamily};

pub type Matrix = DMatrix<Complex64>;

/// Largest path-basis dimension a [`Model`] will build.
pub const DEFAULT_DIMENSION_CAP: usize = 512;

/// Bound for agreement between scalars computed by independent code paths.
pub const SCALAR_AGREEMENT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `G^{y,(n)}_x` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBasis {
    paths: Vec<Vec<ElementId>>,
}

impl PathBasis {
    pub fn new(g: &Groupoid, y: ElementId, x: ElementId, n: usize) -> Self {
        Self {
            paths: g.composable_tuples(n, Some(y), Some(x)),
        }
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<ElementId>] {
        &self.paths
    }

    pub fn path(&self, i: usize) -> &[ElementId] {
        &self.paths[i]
    }

    pub fn index_of(&self, path: &[ElementId]) -> Option<usize> {
        self.paths.binary_search_by(|p| p.as_slice().cmp(path)).ok()
    }
}

/// A matrix with at most one nonzero entry per column, stored as that
/// entry's row and value.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    rows: usize,
    columns: Vec<Option<(usize, Complex64)>>,
}

impl Monomial {
    pub fn new(rows: usize, columns: Vec<Option<(usize, Complex64)>>) -> Self {
        assert!(columns.iter().flatten().all(|&(r, _)| r < rows));
        Self { rows, columns }
    }

    pub fn diagonal(values: impl IntoIterator<Item = Complex64>) -> Self {
        let columns: Vec<_> = values.into_iter().enumerate().map(|(i, v)| Some((i, v))).collect();
        Self {
            rows: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Option<(usize, Complex64)> {
        self.columns[j]
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &Monomial) -> Monomial {
        assert_eq!(rhs.rows, self.cols(), "inner dimensions differ");
        let columns = rhs
            .columns
            .iter()
            .map(|e| e.and_then(|(r, v)| self.columns[r].map(|(r2, v2)| (r2, v2 * v))))
            .collect();
        Monomial {
            rows: self.rows,
            columns,
        }
    }

    pub fn scale(&self, z: Complex64) -> Monomial {
        Monomial {
            rows: self.rows,
            columns: self.columns.iter().map(|e| e.map(|(r, v)| (r, z * v))).collect(),
        }
    }

    /// Panics unless distinct columns land in distinct rows.
    pub fn adjoint(&self) -> Monomial {
        let mut columns = vec![None; self.rows];
        for (j, e) in self.columns.iter().enumerate() {
            if let Some((r, v)) = *e {
                assert!(columns[r].is_none(), "adjoint of a non-injective monomial");
                columns[r] = Some((j, v.conj()));
            }
        }
        Monomial {
            rows: self.cols(),
            columns,
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols());
        for (j, e) in self.columns.iter().enumerate() {
            if let Some((r, v)) = *e {
                m[(r, j)] = v;
            }
        }
        m
    }

    /// `M a M*`.
    pub fn conjugate(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.nrows(), self.cols());
        assert_eq!(a.ncols(), self.cols());
        let mut out = Matrix::zeros(self.rows, self.rows);
        for (j, ej) in self.columns.iter().enumerate() {
            let Some((rj, vj)) = *ej else { continue };
            let vj = vj.conj();
            for (i, ei) in self.columns.iter().enumerate() {
                if let Some((ri, vi)) = *ei {
                    out[(ri, rj)] += vi * a[(i, j)] * vj;
                }
            }
        }
        out
    }

    /// Max-abs entry of `self - other`.
    pub fn distance(&self, other: &Monomial) -> f64 {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        self.columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| match (a, b) {
                (None, None) => 0.0,
                (Some((_, v)), None) | (None, Some((_, v))) => v.norm(),
                (Some((r1, v1)), Some((r2, v2))) if r1 == r2 => (v1 - v2).norm(),
                (Some((_, v1)), Some((_, v2))) => v1.norm().max(v2.norm()),
            })
            .fold(0.0, f64::max)
    }
}

/// An element of `A_n(x)`: one square matrix per `k ∈ G^x`, in range-fiber order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelElement {
    pub level: usize,
    pub base: ElementId,
    pub blocks: Vec<Matrix>,
}

impl ModelElement {
    pub fn block(&self, g: &Groupoid, k: ElementId) -> &Matrix {
        debug_assert_eq!(g.range(k), self.base);
        &self.blocks[g.range_position(k)]
    }

    fn assert_same_algebra(&self, other: &ModelElement) {
        assert_eq!(
            (self.level, self.base),
            (other.level, other.base),
            "elements of different algebras"
        );
    }

    pub fn mul(&self, other: &ModelElement) -> ModelElement {
        self.assert_same_algebra(other);
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        ModelElement { blocks, ..*self }
    }

    pub fn adjoint(&self) -> ModelElement {
        ModelElement {
            blocks: self.blocks.iter().map(|a| a.adjoint()).collect(),
            ..*self
        }
    }

    pub fn scale(&self, z: Complex64) -> ModelElement {
        ModelElement {
            blocks: self.blocks.iter().map(|a| a * z).collect(),
            ..*self
        }
    }

    pub fn max_diff(&self, other: &ModelElement) -> f64 {
        self.assert_same_algebra(other);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// A diagonal element of `A_n(x)`, stored as the diagonals of its blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalElement {
    pub level: usize,
    pub base: ElementId,
    pub blocks: Vec<Vec<Complex64>>,
}

impl DiagonalElement {
    fn assert_same_algebra(&self, other: &DiagonalElement) {
        assert_eq!(
            (self.level, self.base),
            (other.level, other.base),
            "elements of different algebras"
        );
    }

    pub fn mul(&self, other: &DiagonalElement) -> DiagonalElement {
        self.assert_same_algebra(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
            .collect();
        DiagonalElement { blocks, ..*self }
    }

    pub fn adjoint(&self) -> DiagonalElement {
        DiagonalElement {
            blocks: self
                .blocks
                .iter()
                .map(|a| a.iter().map(|z| z.conj()).collect())
                .collect(),
            ..*self
        }
    }

    pub fn scale(&self, z: Complex64) -> DiagonalElement {
        DiagonalElement {
            blocks: self.blocks.iter().map(|a| a.iter().map(|v| v * z).collect()).collect(),
            ..*self
        }
    }

    pub fn max_diff(&self, other: &DiagonalElement) -> f64 {
        self.assert_same_algebra(other);
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// The first diagonal entry, if the algebra is nonzero.
    pub fn first_entry(&self) -> Option<Complex64> {
        self.blocks.iter().flatten().next().copied()
    }

    pub fn to_element(&self) -> ModelElement {
        ModelElement {
            level: self.level,
            base: self.base,
            blocks: self
                .blocks
                .iter()
                .map(|d| Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
                .collect(),
        }
    }
}

/// The tower `A_1 ⊂ … ⊂ A_N` for one groupoid and 3-cocycle.
#[derive(Clone, Debug)]
pub struct Model<'a> {
    g: &'a Groupoid,
    c: &'a Cochain,
    max_level: usize,
    bases: BTreeMap<(ElementId, ElementId, usize), PathBasis>,
    u_twist: Option<(ElementId, Complex64)>,
}

impl<'a> Model<'a> {
    /// Builds the path bases for levels `1..=max_level`, refusing any basis
    /// larger than `cap`.
    pub fn new(g: &'a Groupoid, c: &'a Cochain, max_level: usize, cap: usize) -> Result<Self> {
        if c.arity() != 3 {
            return Err(Error::UnsupportedArity(c.arity()));
        }
        if let Some(tuple) = c.normalization_violation(g) {
            return Err(Error::NotNormalized { tuple });
        }
        if max_level == 0 {
            return Err(Error::InvalidLevel { level: 0, max: 0 });
        }
        let mut bases = BTreeMap::new();
        for n in 1..=max_level {
            for &y in g.units() {
                for &x in g.units() {
                    let basis = PathBasis::new(g, y, x, n);
                    if basis.dim() > cap {
                        return Err(Error::DimensionCap {
                            dimension: basis.dim(),
                            cap,
                        });
                    }
                    bases.insert((y, x, n), basis);
                }
            }
        }
        Ok(Self {
            g,
            c,
            max_level,
            bases,
            u_twist: None,
        })
    }

    /// Multiplies every `u_g^n(k)` by an extra phase. Only for exercising the checks.
    pub fn with_u_phase(mut self, g: ElementId, phase: Phase) -> Self {
        self.u_twist = Some((g, phase.to_complex()));
        self
    }

    pub fn groupoid(&self) -> &'a Groupoid {
        self.g
    }

    pub fn cochain(&self) -> &'a Cochain {
        self.c
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn basis(&self, k: ElementId, n: usize) -> &PathBasis {
        &self.bases[&(self.g.range(k), self.g.source(k), n)]
    }

    pub fn dimension(&self, k: ElementId, n: usize) -> usize {
        self.basis(k, n).dim()
    }

    /// Largest block dimension at level `n`.
    pub fn max_dimension(&self, n: usize) -> usize {
        self.bases
            .iter()
            .filter(|(key, _)| key.2 == n)
            .map(|(_, b)| b.dim())
            .max()
            .unwrap_or(0)
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_level {
            return Err(Error::InvalidLevel {
                level: n,
                max: self.max_level,
            });
        }
        Ok(())
    }

    fn require(&self, ok: bool, what: impl FnOnce() -> String) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::NotComposable(what()))
        }
    }

    #[inline]
    fn phase(&self, a: ElementId, b: ElementId, c: ElementId) -> Complex64 {
        self.c.get(&[a, b, c]).to_complex()
    }

    /// `u_g^n(k)` for `k ∈ G^{r(g)}`.
    pub fn u(&self, g: ElementId, k: ElementId, n: usize) -> Result<Monomial> {
        self.check_level(n)?;
        self.require(self.g.range(k) == self.g.range(g), || format!("u: r({k}) ≠ r({g})"))?;
        Ok(self.u_raw(g, k, n))
    }

    fn u_raw(&self, g: ElementId, k: ElementId, n: usize) -> Monomial {
        let gr = self.g;
        let gk = gr.mul(gr.inv(g), k);
        let domain = self.basis(gk, n);
        let codomain = self.basis(k, n);
        let twist = match self.u_twist {
            Some((h, z)) if h == g => z,
            _ => ONE,
        };
        let mut path = Vec::with_capacity(n);
        let columns = domain
            .paths()
            .iter()
            .map(|t| {
                path.clear();
                path.push(gr.mul(g, t[0]));
                path.extend_from_slice(&t[1..]);
                let row = codomain.index_of(&path).expect("gt is a path for k");
                let value = self.phase(g, t[0], gr.mul(gr.inv(t[0]), gk)) * twist;
                Some((row, value))
            })
            .collect();
        Monomial::new(codomain.dim(), columns)
    }

    /// `w^n(g,h)(k)` for composable `(g, h)` and `k ∈ G^{r(g)}`.
    pub fn w(&self, g: ElementId, h: ElementId, k: ElementId, n: usize) -> Result<Monomial> {
        self.check_level(n)?;
        self.require(self.g.composable(g, h), || format!("w: ({g}, {h})"))?;
        self.require(self.g.range(k) == self.g.range(g), || format!("w: r({k}) ≠ r({g})"))?;
        Ok(Monomial::diagonal(self.w_diagonal(g, h, k, n)))
    }

    fn w_diagonal(&self, g: ElementId, h: ElementId, k: ElementId, n: usize) -> Vec<Complex64> {
        let gr = self.g;
        let gh_inv = gr.inv(gr.mul(g, h));
        self.basis(k, n)
            .paths()
            .iter()
            .map(|s| self.phase(g, h, gr.mul(gh_inv, s[0])).conj())
            .collect()
    }

    /// `I_n(k,l) ∈ B_n(kl)` for `l ∈ G^{s(k)}` and `n ≥ 2`.
    pub fn intertwiner(&self, k: ElementId, l: ElementId, n: usize) -> Result<Monomial> {
        self.check_level(n)?;
        if n < 2 {
            return Err(Error::InvalidLevel {
                level: n,
                max: self.max_level,
            });
        }
        self.require(self.g.composable(k, l), || format!("I: ({k}, {l})"))?;
        Ok(self.intertwiner_raw(k, l, n))
    }

    fn intertwiner_raw(&self, k: ElementId, l: ElementId, n: usize) -> Monomial {
        let gr = self.g;
        let basis = self.basis(gr.mul(k, l), n);
        let columns = basis
            .paths()
            .iter()
            .enumerate()
            .map(|(i, p)| (p[n - 1] == l).then(|| (i, self.i_phase(k, l, p[0]))))
            .collect();
        Monomial::new(basis.dim(), columns)
    }

    /// The entry of `I(k,l)` at a path starting with `t₁`.
    #[inline]
    fn i_phase(&self, k: ElementId, l: ElementId, t1: ElementId) -> Complex64 {
        let gr = self.g;
        self.phase(t1, gr.mul(gr.inv(t1), k), l).conj()
    }

    /// `u_g^n(k) ⊗ 1` from the level-`n+1` basis of `g⁻¹kl` to that of `kl`.
    pub fn u_tensor_one(&self, g: ElementId, k: ElementId, l: ElementId, n: usize) -> Result<Monomial> {
        self.check_level(n + 1)?;
        self.require(self.g.range(k) == self.g.range(g), || format!("u⊗1: r({k}) ≠ r({g})"))?;
        self.require(self.g.composable(k, l), || format!("u⊗1: ({k}, {l})"))?;
        let gr = self.g;
        let u = self.u_raw(g, k, n);
        let gk = gr.mul(gr.inv(g), k);
        let small_domain = self.basis(gk, n);
        let small_codomain = self.basis(k, n);
        let domain = self.basis(gr.mul(gk, l), n + 1);
        let codomain = self.basis(gr.mul(k, l), n + 1);
        let mut path = Vec::with_capacity(n + 1);
        let columns = domain
            .paths()
            .iter()
            .map(|p| {
                let j = small_domain.index_of(&p[..n])?;
                let (r, v) = u.column(j)?;
                path.clear();
                path.extend_from_slice(small_codomain.path(r));
                path.push(p[n]);
                Some((codomain.index_of(&path).expect("extended path exists"), v))
            })
            .collect();
        Ok(Monomial::new(codomain.dim(), columns))
    }

    /// `w^n(g,h)` as a diagonal element of `A_n(r(g))`.
    pub fn w_element(&self, g: ElementId, h: ElementId, n: usize) -> Result<DiagonalElement> {
        self.check_level(n)?;
        self.require(self.g.composable(g, h), || format!("w: ({g}, {h})"))?;
        let base = self.g.range(g);
        Ok(DiagonalElement {
            level: n,
            base,
            blocks: self
                .g
                .range_fiber(base)
                .iter()
                .map(|&k| self.w_diagonal(g, h, k, n))
                .collect(),
        })
    }

    /// `V(a,γ) = w(γ, γ⁻¹aγ)·w(a,γ)*` for `a` in the isotropy at `r(γ)`.
    pub fn v_element(&self, a: ElementId, gamma: ElementId, n: usize) -> Result<DiagonalElement> {
        let y = self.g.range(gamma);
        self.require(self.g.range(a) == y && self.g.source(a) == y, || {
            format!("V: {a} is not in the isotropy at r({gamma})")
        })?;
        let m = self.g.conj_by_inverse(gamma, a);
        Ok(self
            .w_element(gamma, m, n)?
            .mul(&self.w_element(a, gamma, n)?.adjoint()))
    }

    pub fn identity(&self, x: ElementId, n: usize) -> ModelElement {
        ModelElement {
            level: n,
            base: x,
            blocks: self
                .g
                .range_fiber(x)
                .iter()
                .map(|&k| Matrix::identity(self.dimension(k, n), self.dimension(k, n)))
                .collect(),
        }
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1]`.
    pub fn random_element<R: Rng + ?Sized>(&self, x: ElementId, n: usize, rng: &mut R) -> ModelElement {
        ModelElement {
            level: n,
            base: x,
            blocks: self
                .g
                .range_fiber(x)
                .iter()
                .map(|&k| {
                    let d = self.dimension(k, n);
                    Matrix::from_fn(d, d, |_, _| {
                        Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
                    })
                })
                .collect(),
        }
    }

    /// `α_g^n(a)(k) = Ad u_g^n(k)(a(g⁻¹k))` for `a ∈ A_n(s(g))`.
    pub fn alpha(&self, g: ElementId, a: &ModelElement) -> Result<ModelElement> {
        self.check_level(a.level)?;
        self.require(a.base == self.g.source(g), || {
            format!("α_{g}: element lives over {}", a.base)
        })?;
        let gr = self.g;
        let blocks = gr
            .range_fiber(gr.range(g))
            .iter()
            .map(|&k| self.u_raw(g, k, a.level).conjugate(a.block(gr, gr.mul(gr.inv(g), k))))
            .collect();
        Ok(ModelElement {
            level: a.level,
            base: gr.range(g),
            blocks,
        })
    }

    /// `α_g^n` on a diagonal element.
    pub fn alpha_diagonal(&self, g: ElementId, d: &DiagonalElement) -> Result<DiagonalElement> {
        self.check_level(d.level)?;
        self.require(d.base == self.g.source(g), || {
            format!("α_{g}: element lives over {}", d.base)
        })?;
        let gr = self.g;
        let blocks = gr
            .range_fiber(gr.range(g))
            .iter()
            .map(|&k| {
                let u = self.u_raw(g, k, d.level);
                let src = &d.blocks[gr.range_position(gr.mul(gr.inv(g), k))];
                let mut out = vec![ZERO; u.rows()];
                for (j, &v) in src.iter().enumerate() {
                    if let Some((r, z)) = u.column(j) {
                        out[r] = z * v * z.conj();
                    }
                }
                out
            })
            .collect();
        Ok(DiagonalElement {
            level: d.level,
            base: gr.range(g),
            blocks,
        })
    }

    /// `Ad w^n(g,h)` on an element of `A_n(r(g))`.
    pub fn ad_w(&self, g: ElementId, h: ElementId, a: &ModelElement) -> Result<ModelElement> {
        self.check_level(a.level)?;
        self.require(self.g.composable(g, h) && a.base == self.g.range(g), || {
            format!("Ad w({g}, {h}) on an element over {}", a.base)
        })?;
        let blocks = self
            .g
            .range_fiber(a.base)
            .iter()
            .zip(&a.blocks)
            .map(|(&k, b)| Monomial::diagonal(self.w_diagonal(g, h, k, a.level)).conjugate(b))
            .collect();
        Ok(ModelElement { blocks, ..*a })
    }

    /// `φ_n(a)(k) = Σ_{l ∈ G_{s(k)}} I(kl⁻¹,l)(a(kl⁻¹) ⊗ 1)I(kl⁻¹,l)*`.
    pub fn phi(&self, a: &ModelElement) -> Result<ModelElement> {
        self.check_level(a.level + 1)?;
        let gr = self.g;
        let n = a.level;
        let blocks = gr
            .range_fiber(a.base)
            .iter()
            .map(|&k| {
                let target = self.basis(k, n + 1);
                let mut out = Matrix::zeros(target.dim(), target.dim());
                let mut path = Vec::with_capacity(n + 1);
                for &l in gr.source_fiber(gr.source(k)) {
                    let m = gr.mul(k, gr.inv(l));
                    let small = self.basis(m, n);
                    let block = a.block(gr, m);
                    let placed: Vec<(usize, Complex64)> = small
                        .paths()
                        .iter()
                        .map(|t| {
                            path.clear();
                            path.extend_from_slice(t);
                            path.push(l);
                            (
                                target.index_of(&path).expect("(t, l) is a path"),
                                self.i_phase(m, l, t[0]),
                            )
                        })
                        .collect();
                    for (j, &(pj, dj)) in placed.iter().enumerate() {
                        let dj = dj.conj();
                        for (i, &(pi, di)) in placed.iter().enumerate() {
                            out[(pi, pj)] += di * block[(i, j)] * dj;
                        }
                    }
                }
                out
            })
            .collect();
        Ok(ModelElement {
            level: n + 1,
            base: a.base,
            blocks,
        })
    }
}

/// The states, expectations and densities attached to a model by a
/// full-support measure family and a section of the orbit relation.
#[derive(Clone, Copy, Debug)]
pub struct ModelState<'m, 'a> {
    model: &'m Model<'a>,
    mu: &'m MeasureFamily<f64>,
    presentation: &'m SemidirectPresentation,
}

impl<'m, 'a> ModelState<'m, 'a> {
    pub fn new(
        model: &'m Model<'a>,
        mu: &'m MeasureFamily<f64>,
        presentation: &'m SemidirectPresentation,
    ) -> Result<Self> {
        let g = model.g;
        mu.validate(g)?;
        if let Some(a) = g.elements().find(|&a| *mu.weight(a) <= 0.0) {
            return Err(Error::NotFullSupport(a));
        }
        for &x in g.units() {
            for y in g.orbit(x) {
                if !presentation.related(y, x) {
                    return Err(Error::Inconsistent(format!("section has no arrow from {x} to {y}")));
                }
            }
        }
        Ok(Self {
            model,
            mu,
            presentation,
        })
    }

    pub fn model(&self) -> &'m Model<'a> {
        self.model
    }

    pub fn measure(&self) -> &'m MeasureFamily<f64> {
        self.mu
    }

    #[inline]
    fn weight(&self, a: ElementId) -> f64 {
        *self.mu.weight(a)
    }

    /// Diagonal of `ρ_n(k)`: at the path `t`,
    /// `Σ_{y ∼ r(k)} μ(k(t₁⋯t_n)⁻¹γ_y⁻¹)·μ(γ_y t₁)·Π_{i≥2} μ(t_i)` with `γ_y = σ(y, r(k))`.
    pub fn rho(&self, k: ElementId, n: usize) -> Vec<f64> {
        let g = self.model.g;
        let x = g.range(k);
        let orbit = g.orbit(x);
        self.model
            .basis(k, n)
            .paths()
            .iter()
            .map(|t| {
                let head = g.mul(k, g.inv(g.mul_all(t)));
                let tail: f64 = t[1..].iter().map(|&ti| self.weight(ti)).product();
                let sum: f64 = orbit
                    .iter()
                    .map(|&y| {
                        let gamma = self.presentation.sigma(y, x).expect("checked at construction");
                        self.weight(g.mul(head, g.inv(gamma))) * self.weight(g.mul(gamma, t[0]))
                    })
                    .sum();
                sum * tail
            })
            .collect()
    }

    /// `ψ_n^x(a) = Σ_k Tr(ρ_n(k)·a(k))`.
    pub fn psi(&self, a: &ModelElement) -> Complex64 {
        let g = self.model.g;
        g.range_fiber(a.base)
            .iter()
            .zip(&a.blocks)
            .map(|(&k, b)| {
                self.rho(k, a.level)
                    .iter()
                    .enumerate()
                    .map(|(i, r)| b[(i, i)] * *r)
                    .sum::<Complex64>()
            })
            .sum()
    }

    /// `ψ(a·b)` without forming the product.
    pub fn psi_of_product(&self, a: &ModelElement, b: &ModelElement) -> Complex64 {
        assert_eq!((a.level, a.base), (b.level, b.base));
        let g = self.model.g;
        g.range_fiber(a.base)
            .iter()
            .enumerate()
            .map(|(pos, &k)| {
                let (x, y) = (&a.blocks[pos], &b.blocks[pos]);
                self.rho(k, a.level)
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (0..x.ncols()).map(|j| x[(i, j)] * y[(j, i)]).sum::<Complex64>() * *r)
                    .sum::<Complex64>()
            })
            .sum()
    }

    /// `E_n(b)(k) = Σ_{l ∈ G^{s(k)}} μ(l)·(id ⊗ Tr_l)(I(k,l)* b(kl) I(k,l))`.
    pub fn expectation(&self, b: &ModelElement) -> Result<ModelElement> {
        let model = self.model;
        model.check_level(b.level)?;
        if b.level < 2 {
            return Err(Error::InvalidLevel {
                level: b.level,
                max: model.max_level,
            });
        }
        let g = model.g;
        let n = b.level - 1;
        let blocks = g
            .range_fiber(b.base)
            .iter()
            .map(|&k| {
                let small = model.basis(k, n);
                let mut out = Matrix::zeros(small.dim(), small.dim());
                let mut path = Vec::with_capacity(n + 1);
                for &l in g.range_fiber(g.source(k)) {
                    let kl = g.mul(k, l);
                    let big = model.basis(kl, n + 1);
                    let block = b.block(g, kl);
                    let weight = Complex64::new(self.weight(l), 0.0);
                    let placed: Vec<(usize, Complex64)> = small
                        .paths()
                        .iter()
                        .map(|t| {
                            path.clear();
                            path.extend_from_slice(t);
                            path.push(l);
                            (
                                big.index_of(&path).expect("(t, l) is a path"),
                                model.i_phase(k, l, t[0]),
                            )
                        })
                        .collect();
                    for (j, &(pj, dj)) in placed.iter().enumerate() {
                        for (i, &(pi, di)) in placed.iter().enumerate() {
                            out[(i, j)] += weight * di.conj() * block[(pi, pj)] * dj;
                        }
                    }
                }
                out
            })
            .collect();
        Ok(ModelElement {
            level: n,
            base: b.base,
            blocks,
        })
    }

    /// `d_g^n(k)` for `k ∈ G^{s(g)}`: at the path `t`, `√(ρ(gk)[gt] / ρ(k)[t])`.
    pub fn density(&self, g_arrow: ElementId, n: usize) -> DiagonalElement {
        let model = self.model;
        let g = model.g;
        let x = g.source(g_arrow);
        let mut path = Vec::with_capacity(n);
        let blocks = g
            .range_fiber(x)
            .iter()
            .map(|&k| {
                let gk = g.mul(g_arrow, k);
                let rho_k = self.rho(k, n);
                let rho_gk = self.rho(gk, n);
                let target = model.basis(gk, n);
                model
                    .basis(k, n)
                    .paths()
                    .iter()
                    .zip(&rho_k)
                    .map(|(t, r)| {
                        path.clear();
                        path.push(g.mul(g_arrow, t[0]));
                        path.extend_from_slice(&t[1..]);
                        let i = target.index_of(&path).expect("gt is a path");
                        Complex64::new((rho_gk[i] / r).sqrt(), 0.0)
                    })
                    .collect()
            })
            .collect();
        DiagonalElement {
            level: n,
            base: x,
            blocks,
        }
    }
}

fn sweep<F>(args: &[Vec<usize>], f: F) -> Residual
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    args.par_iter()
        .fold(Residual::default, |mut acc, a| {
            acc.record(f(a), a);
            acc
        })
        .reduce(Residual::default, Residual::merge)
}

fn composable_pairs(g: &Groupoid) -> Vec<(ElementId, ElementId)> {
    g.composable_tuples(2, None, None)
        .into_iter()
        .map(|t| (t[0], t[1]))
        .collect()
}

fn levels(model: &Model, top_exclusive: bool) -> std::ops::RangeInclusive<usize> {
    let top = if top_exclusive {
        model.max_level - 1
    } else {
        model.max_level
    };
    1..=top
}

/// Unitarity of `u`, `w` and the partial-isometry relations of `I`.
pub fn check_intertwiners(model: &Model, tol: f64) -> Vec<Check> {
    let g = model.g;
    let mut u_args = Vec::new();
    let mut w_args = Vec::new();
    let mut i_args = Vec::new();
    for n in levels(model, false) {
        for a in g.elements() {
            for &k in g.range_fiber(g.range(a)) {
                u_args.push(vec![n, a, k]);
            }
        }
        for (a, b) in composable_pairs(g) {
            for &k in g.range_fiber(g.range(a)) {
                w_args.push(vec![n, a, b, k]);
            }
            if n >= 2 {
                i_args.push(vec![n, a, b]);
            }
        }
    }
    let unitary_defect = |m: &Matrix| {
        let d = m.nrows();
        let id = Matrix::identity(d, d);
        let a = (m.adjoint() * m - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let b = (m * m.adjoint() - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.max(b)
    };
    let u = sweep(&u_args, |t| {
        let m = model.u_raw(t[1], t[2], t[0]).to_dense();
        if m.nrows() != m.ncols() {
            return f64::INFINITY;
        }
        unitary_defect(&m)
    });
    let w = sweep(&w_args, |t| {
        let m = Monomial::diagonal(model.w_diagonal(t[1], t[2], t[3], t[0])).to_dense();
        unitary_defect(&m)
    });
    let i = sweep(&i_args, |t| {
        let (n, k, l) = (t[0], t[1], t[2]);
        let m = model.intertwiner_raw(k, l, n).to_dense();
        let basis = model.basis(g.mul(k, l), n);
        let projection = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
            basis.dim(),
            basis.paths().iter().map(|p| if p[n - 1] == l { ONE } else { ZERO }),
        ));
        let a = (m.adjoint() * &m - &projection)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let b = (&m * m.adjoint() - &projection)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        a.max(b)
    });
    vec![
        Check::from_residual("intertwiners.u_unitary", u, tol),
        Check::from_residual("intertwiners.w_diagonal_unitary", w, tol),
        Check::from_residual("intertwiners.I_partial_isometry", i, tol),
    ]
}

/// `u_g u_h = c(g,h,h⁻¹g⁻¹k)·w(g,h)·u_{gh}` and
/// `c(g,g⁻¹k,l)·I(k,l)(u_g ⊗ 1) = u_g^{n+1}(kl)·I(g⁻¹k,l)`.
pub fn check_u_relations(model: &Model, tol: f64) -> Vec<Check> {
    let g = model.g;
    let mut first = Vec::new();
    for n in levels(model, false) {
        for (a, b) in composable_pairs(g) {
            for &k in g.range_fiber(g.range(a)) {
                first.push(vec![n, a, b, k]);
            }
        }
    }
    let r1 = sweep(&first, |t| {
        let (n, a, b, k) = (t[0], t[1], t[2], t[3]);
        let ak = g.mul(g.inv(a), k);
        let lhs = model.u_raw(a, k, n).compose(&model.u_raw(b, ak, n));
        let ab = g.mul(a, b);
        let scalar = model.phase(a, b, g.mul(g.inv(b), ak));
        let rhs = Monomial::diagonal(model.w_diagonal(a, b, k, n))
            .compose(&model.u_raw(ab, k, n))
            .scale(scalar);
        lhs.distance(&rhs)
    });
    let mut second = Vec::new();
    if model.max_level >= 2 {
        for n in levels(model, true) {
            for a in g.elements() {
                for &k in g.range_fiber(g.range(a)) {
                    for &l in g.range_fiber(g.source(k)) {
                        second.push(vec![n, a, k, l]);
                    }
                }
            }
        }
    }
    let r2 = sweep(&second, |t| {
        let (n, a, k, l) = (t[0], t[1], t[2], t[3]);
        let ak = g.mul(g.inv(a), k);
        let scalar = model.phase(a, ak, l);
        let lhs = model
            .intertwiner_raw(k, l, n + 1)
            .compose(&model.u_tensor_one(a, k, l, n).expect("arguments are composable"))
            .scale(scalar);
        let rhs = model
            .u_raw(a, g.mul(k, l), n + 1)
            .compose(&model.intertwiner_raw(ak, l, n + 1));
        lhs.distance(&rhs)
    });
    vec![
        Check::from_residual("u_product", r1, tol),
        Check::from_residual("intertwiner_covariance", r2, tol),
    ]
}

/// The four relations between `α`, `w` and `φ`.
pub fn check_alpha_phi(model: &Model, tol: f64, seed: u64) -> Vec<Check> {
    let g = model.g;
    let pairs = composable_pairs(g);
    let mut pair_args = Vec::new();
    let mut pair_args_low = Vec::new();
    let mut arrow_args_low = Vec::new();
    let mut triple_args = Vec::new();
    let triples = g.composable_tuples(3, None, None);
    for n in levels(model, false) {
        for &(a, b) in &pairs {
            pair_args.push(vec![n, a, b]);
            if n < model.max_level {
                pair_args_low.push(vec![n, a, b]);
            }
        }
        for t in &triples {
            triple_args.push(vec![n, t[0], t[1], t[2]]);
        }
        if n < model.max_level {
            for a in g.elements() {
                arrow_args_low.push(vec![n, a]);
            }
        }
    }
    let r1 = sweep(&pair_args_low, |t| {
        let (n, a, b) = (t[0], t[1], t[2]);
        let lifted = model.phi(&model.w_element(a, b, n).unwrap().to_element()).unwrap();
        lifted.max_diff(&model.w_element(a, b, n + 1).unwrap().to_element())
    });
    let r2 = sweep(&arrow_args_low, |t| {
        let (n, a) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "phi_equivariant", t);
        let x = model.random_element(g.source(a), n, &mut rng);
        let lhs = model.phi(&model.alpha(a, &x).unwrap()).unwrap();
        let rhs = model.alpha(a, &model.phi(&x).unwrap()).unwrap();
        lhs.max_diff(&rhs)
    });
    let r3 = sweep(&pair_args, |t| {
        let (n, a, b) = (t[0], t[1], t[2]);
        let mut rng = argument_rng(seed, "alpha_composition", t);
        let x = model.random_element(g.source(b), n, &mut rng);
        let lhs = model.alpha(a, &model.alpha(b, &x).unwrap()).unwrap();
        let rhs = model.ad_w(a, b, &model.alpha(g.mul(a, b), &x).unwrap()).unwrap();
        lhs.max_diff(&rhs)
    });
    let r4 = sweep(&triple_args, |t| {
        let (n, a, b, d) = (t[0], t[1], t[2], t[3]);
        let lhs = model
            .alpha_diagonal(a, &model.w_element(b, d, n).unwrap())
            .unwrap()
            .mul(&model.w_element(a, g.mul(b, d), n).unwrap());
        let rhs = model
            .w_element(a, b, n)
            .unwrap()
            .mul(&model.w_element(g.mul(a, b), d, n).unwrap())
            .scale(model.phase(a, b, d));
        lhs.max_diff(&rhs)
    });
    vec![
        Check::from_residual("phi_preserves_w", r1, tol),
        Check::from_residual("phi_equivariant", r2, tol),
        Check::from_residual("alpha_composition", r3, tol),
        Check::from_residual("w_pentagon", r4, tol),
    ]
}

/// State, expectation and density identities, the tower property of `ψ` and the center/Markov identity.
///
/// `other_section` is a second state on the same model and measure built
/// from a different section; it is used to confirm that `Tr ρ` does not
/// depend on the section.
pub fn check_state(state: &ModelState, other_section: Option<&ModelState>, tol: f64, seed: u64) -> Vec<Check> {
    let model = state.model;
    let g = model.g;
    let top = model.max_level;
    let mut unit_args = Vec::new();
    let mut unit_args_low = Vec::new();
    let mut arrow_args = Vec::new();
    let mut arrow_args_low = Vec::new();
    for n in levels(model, false) {
        for &x in g.units() {
            unit_args.push(vec![n, x]);
            if n < top {
                unit_args_low.push(vec![n, x]);
            }
        }
        for a in g.elements() {
            arrow_args.push(vec![n, a]);
            if n < top {
                arrow_args_low.push(vec![n, a]);
            }
        }
    }
    let normalized = sweep(&unit_args, |t| (state.psi(&model.identity(t[1], t[0])) - ONE).norm());

    let powers: Vec<MeasureFamily<f64>> = (1..=top + 1).map(|p| walk::convolution_power(g, state.mu, p)).collect();
    let trace = sweep(&arrow_args, |t| {
        let (n, k) = (t[0], t[1]);
        let tr: f64 = state.rho(k, n).iter().sum();
        (tr - *powers[n].weight(k)).abs()
    });
    let section = sweep(&arrow_args, |t| match other_section {
        Some(other) => {
            let a: f64 = state.rho(t[1], t[0]).iter().sum();
            let b: f64 = other.rho(t[1], t[0]).iter().sum();
            (a - b).abs()
        }
        None => 0.0,
    });
    let mut unfaithful = 0;
    let mut first_unfaithful = None;
    for t in &arrow_args {
        if state.rho(t[1], t[0]).iter().any(|&r| r <= 0.0) {
            unfaithful += 1;
            first_unfaithful.get_or_insert_with(|| t.clone());
        }
    }

    let bimodule = sweep(&unit_args_low, |t| {
        let (n, x) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "expectation_bimodule", t);
        let a = model.random_element(x, n, &mut rng);
        let b = model.random_element(x, n + 1, &mut rng);
        let lhs = state.psi_of_product(&model.phi(&a).unwrap(), &b);
        let rhs = state.psi_of_product(&a, &state.expectation(&b).unwrap());
        (lhs - rhs).norm()
    });
    let equivariance = sweep(&arrow_args_low, |t| {
        let (n, a) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "expectation_equivariant", t);
        let b = model.random_element(g.source(a), n + 1, &mut rng);
        let lhs = model.alpha(a, &state.expectation(&b).unwrap()).unwrap();
        let rhs = state.expectation(&model.alpha(a, &b).unwrap()).unwrap();
        lhs.max_diff(&rhs)
    });
    let tower = sweep(&unit_args_low, |t| {
        let (n, x) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "tower", t);
        let a = model.random_element(x, n, &mut rng);
        (state.psi(&model.phi(&a).unwrap()) - state.psi(&a)).norm()
    });
    let center = sweep(&unit_args_low, |t| {
        let (n, x) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "center_expectation_is_markov", t);
        let constant = FiberFunction {
            x,
            values: vec![1.0; g.range_fiber(x).len()],
        };
        let random = FiberFunction::<f64>::random(g, x, &mut rng, false);
        let p = walk::markov(g, state.mu, x);
        [constant, random]
            .iter()
            .map(|f| {
                let central = ModelElement {
                    level: n + 1,
                    base: x,
                    blocks: g
                        .range_fiber(x)
                        .iter()
                        .zip(&f.values)
                        .map(|(&k, &v)| {
                            let d = model.dimension(k, n + 1);
                            Matrix::identity(d, d) * Complex64::new(v, 0.0)
                        })
                        .collect(),
                };
                let e = state.expectation(&central).unwrap();
                let pf = p.apply(f);
                e.blocks
                    .iter()
                    .zip(&pf.values)
                    .map(|(b, &v)| {
                        let d = b.nrows();
                        (b - Matrix::identity(d, d) * Complex64::new(v, 0.0))
                            .iter()
                            .map(|z| z.norm())
                            .fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    });
    let transport = sweep(&arrow_args, |t| {
        let (n, a) = (t[0], t[1]);
        let mut rng = argument_rng(seed, "density_transport", t);
        let x = model.random_element(g.source(a), n, &mut rng);
        let lhs = state.psi(&model.alpha(a, &x).unwrap());
        let d = state.density(a, n).to_element();
        let rhs = state.psi(&d.mul(&x).mul(&d));
        (lhs - rhs).norm()
    });
    let density_tower = sweep(&arrow_args_low, |t| {
        let (n, a) = (t[0], t[1]);
        let lifted = model.phi(&state.density(a, n).to_element()).unwrap();
        lifted.max_diff(&state.density(a, n + 1).to_element())
    });

    let mut checks = vec![
        Check::from_residual("psi_normalized", normalized, tol),
        Check::from_residual("rho_trace_is_convolution_power", trace, tol),
        Check::exact("psi_faithful", arrow_args.len(), unfaithful, first_unfaithful),
    ];
    if other_section.is_some() {
        checks.push(Check::from_residual("rho_trace_section_independent", section, tol));
    }
    checks.extend([
        Check::from_residual("expectation_bimodule", bimodule, tol),
        Check::from_residual("expectation_equivariant", equivariance, tol),
        Check::from_residual("tower.psi_compatible", tower, tol),
        Check::from_residual("center_expectation_is_markov", center, tol),
        Check::from_residual("density_transport", transport, tol),
        Check::from_residual("density_phi_compatible", density_tower, tol),
    ]);
    checks
}

/// Both identities for `V(a,γ)` with `γ`, `γ₁`, `γ₂` from the section.
///
/// The `ζ` identity is checked as stated. For `η` the relation that holds
/// for an arbitrary 3-cocycle carries `w(γ₁,γ₂)` and `α_a(w(γ₁,γ₂))*` around
/// `V(a,γ₁γ₂)` and uses `c(a,γ₁,γ₂)` rather than its conjugate; that form is
/// the gated check, and the shorter form (exact when `w(γ₁,γ₂) = 1`) is
/// reported alongside as informational.
pub fn check_zeta_eta(model: &Model, presentation: &SemidirectPresentation, tol: f64) -> Vec<Check> {
    let g = model.g;
    let c = model.c;
    let mut zeta_args = Vec::new();
    let mut eta_args = Vec::new();
    for n in levels(model, false) {
        for &(y, x) in &presentation.relation {
            let gamma = presentation.sigma(y, x).expect("related pair");
            let iso = &presentation.isotropy[&y];
            for &a in iso {
                for &b in iso {
                    zeta_args.push(vec![n, gamma, a, b]);
                }
            }
            for &(z, w) in presentation.relation.iter().filter(|&&(z, _)| z == x) {
                let gamma2 = presentation.sigma(z, w).expect("related pair");
                for &a in iso {
                    eta_args.push(vec![n, gamma, gamma2, a]);
                }
            }
        }
    }

    // Returns (residual against the model's own scalar, |model scalar − formula|).
    let zeta_side = |t: &[usize]| -> (f64, f64) {
        let (n, gamma, a, b) = (t[0], t[1], t[2], t[3]);
        let ab = g.mul(a, b);
        let lhs = model
            .v_element(a, gamma, n)
            .unwrap()
            .mul(&model.alpha_diagonal(a, &model.v_element(b, gamma, n).unwrap()).unwrap())
            .mul(&model.w_element(a, b, n).unwrap())
            .mul(&model.v_element(ab, gamma, n).unwrap().adjoint());
        let inner = model
            .w_element(g.conj_by_inverse(gamma, a), g.conj_by_inverse(gamma, b), n)
            .unwrap();
        let rhs = model.alpha_diagonal(gamma, &inner).unwrap();
        scalar_fit(&lhs, &rhs, cochain::zeta(g, c, gamma, a, b).unwrap())
    };
    let eta_lhs = |n: usize, g1: ElementId, g2: ElementId, a: ElementId| {
        let m = g.conj_by_inverse(g1, a);
        model
            .alpha_diagonal(g1, &model.v_element(m, g2, n).unwrap())
            .unwrap()
            .mul(&model.v_element(a, g1, n).unwrap())
    };
    let eta_side = |t: &[usize]| -> (f64, f64) {
        let (n, g1, g2, a) = (t[0], t[1], t[2], t[3]);
        let gamma = g.mul(g1, g2);
        let w12 = model.w_element(g1, g2, n).unwrap();
        let rhs = w12
            .mul(&model.v_element(a, gamma, n).unwrap())
            .mul(&model.alpha_diagonal(a, &w12).unwrap().adjoint());
        scalar_fit(
            &eta_lhs(n, g1, g2, a),
            &rhs,
            cochain::eta_twisted(g, c, g1, g2, a).unwrap(),
        )
    };
    let eta_printed = |t: &[usize]| -> f64 {
        let (n, g1, g2, a) = (t[0], t[1], t[2], t[3]);
        let rhs = model
            .v_element(a, g.mul(g1, g2), n)
            .unwrap()
            .scale(cochain::eta(g, c, g1, g2, a).unwrap().to_complex());
        eta_lhs(n, g1, g2, a).max_diff(&rhs)
    };

    let zeta_identity = sweep(&zeta_args, |t| zeta_side(t).0);
    let zeta_scalar = sweep(&zeta_args, |t| zeta_side(t).1);
    let eta_identity = sweep(&eta_args, |t| eta_side(t).0);
    let eta_scalar = sweep(&eta_args, |t| eta_side(t).1);
    let printed = sweep(&eta_args, eta_printed);
    vec![
        Check::from_residual("zeta_identity", zeta_identity, tol),
        Check::from_residual("zeta_scalar_agreement", zeta_scalar, SCALAR_AGREEMENT_TOL),
        Check::from_residual("eta_identity", eta_identity, tol)
            .with_note("η̃ = c̄(γ₁,γ₁⁻¹aγ₁,γ₂)·c(γ₁,γ₂,γ⁻¹aγ)·c(a,γ₁,γ₂) against w(γ₁,γ₂)·V(a,γ)·α_a(w(γ₁,γ₂))*"),
        Check::from_residual("eta_scalar_agreement", eta_scalar, SCALAR_AGREEMENT_TOL),
        Check::from_residual("eta_identity_untwisted", printed, tol)
            .with_note("η with c̄(a,γ₁,γ₂) against V(a,γ) alone; holds when w(γ₁,γ₂) acts trivially")
            .informational(),
    ]
}

/// Reads off the scalar `z` with `lhs = z·rhs` from the first entry, then
/// returns `(‖lhs − z·rhs‖, |z − expected|)`.
fn scalar_fit(lhs: &DiagonalElement, rhs: &DiagonalElement, expected: Phase) -> (f64, f64) {
    let z = match (lhs.first_entry(), rhs.first_entry()) {
        (Some(l), Some(r)) if r.norm() > 0.5 => l / r,
        _ => return (f64::INFINITY, f64::INFINITY),
    };
    (lhs.max_diff(&rhs.scale(z)), (z - expected.to_complex()).norm())
}

/// All model-action checks at levels `1..=model.max_level()`.
pub fn model_suite(
    model: &Model,
    state: &ModelState,
    other_section: Option<&ModelState>,
    presentation: &SemidirectPresentation,
    tol: f64,
    seed: u64,
) -> Vec<Check> {
    let mut checks = check_intertwiners(model, tol);
    checks.extend(check_u_relations(model, tol));
    checks.extend(check_alpha_phi(model, tol, seed));
    checks.extend(check_state(state, other_section, tol, seed));
    checks.extend(check_zeta_eta(model, presentation, tol));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{cyclic_generator, inflate};
    use crate::group::FiniteGroup;
    use crate::groupoid::{GroupoidHom, SectionRule};

    fn bundle_with_generator() -> (Groupoid, Cochain) {
        let z4 = FiniteGroup::cyclic(4);
        let g = Groupoid::group_bundle(2, &z4);
        let hom = GroupoidHom::group_coordinate(&g, &z4).unwrap();
        let c = inflate(&cyclic_generator(4), &g, &hom);
        (g, c)
    }

    #[test]
    fn trivial_cocycle_gives_permutations() {
        let g = Groupoid::pair(2);
        let c = Cochain::trivial(&g, 3);
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP).unwrap();
        for a in g.elements() {
            for &k in g.range_fiber(g.range(a)) {
                let u = model.u(a, k, 2).unwrap();
                for j in 0..u.cols() {
                    assert_eq!(u.column(j).unwrap().1, ONE);
                }
            }
        }
    }

    #[test]
    fn rejects_non_composable_arguments() {
        let g = Groupoid::pair(2);
        let c = Cochain::trivial(&g, 3);
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP).unwrap();
        // arrow 1 = (0,1) has range 0; arrow 2 = (1,0) has range 1.
        assert!(matches!(model.u(1, 2, 1), Err(Error::NotComposable(_))));
        assert!(matches!(model.intertwiner(1, 1, 2), Err(Error::NotComposable(_))));
        assert!(matches!(model.u(1, 0, 3), Err(Error::InvalidLevel { .. })));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let g = Groupoid::pair(3);
        let c = Cochain::trivial(&g, 3);
        assert!(matches!(
            Model::new(&g, &c, 3, 8),
            Err(Error::DimensionCap { dimension: 9, cap: 8 })
        ));
    }

    #[test]
    fn u_relations_on_inflated_generator() {
        let (g, c) = bundle_with_generator();
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP).unwrap();
        for check in check_u_relations(&model, 1e-9) {
            assert!(check.passed, "{check:?}");
        }
    }

    #[test]
    fn wrong_phase_in_u_is_reported() {
        let (g, c) = bundle_with_generator();
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP)
            .unwrap()
            .with_u_phase(1, Phase::new(1, 2));
        let checks = check_u_relations(&model, 1e-9);
        assert!(checks[0].max_residual >= 0.5, "{checks:?}");
        assert!(!checks[0].passed);
    }

    #[test]
    fn psi_of_one_is_one() {
        let g = Groupoid::pair(3);
        let c = Cochain::trivial(&g, 3);
        let model = Model::new(&g, &c, 3, DEFAULT_DIMENSION_CAP).unwrap();
        let mu = MeasureFamily::<f64>::perturbed(&g, 4);
        let pres = g.semidirect(SectionRule::Least);
        let state = ModelState::new(&model, &mu, &pres).unwrap();
        for n in 1..=3 {
            for &x in g.units() {
                assert!((state.psi(&model.identity(x, n)) - ONE).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn uniform_pair_density_is_identity() {
        let g = Groupoid::pair(3);
        let c = Cochain::trivial(&g, 3);
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP).unwrap();
        let mu = MeasureFamily::<f64>::uniform(&g);
        let pres = g.semidirect(SectionRule::Least);
        let state = ModelState::new(&model, &mu, &pres).unwrap();
        for a in g.elements() {
            let d = state.density(a, 2);
            assert!(d.blocks.iter().flatten().all(|z| (z - ONE).norm() < 1e-12));
        }
    }

    #[test]
    fn measure_without_full_support_is_rejected() {
        let g = Groupoid::pair(2);
        let c = Cochain::trivial(&g, 3);
        let model = Model::new(&g, &c, 1, DEFAULT_DIMENSION_CAP).unwrap();
        let mu = MeasureFamily::<f64>::units_only(&g);
        let pres = g.semidirect(SectionRule::Least);
        assert!(matches!(
            ModelState::new(&model, &mu, &pres),
            Err(Error::NotFullSupport(_))
        ));
    }

    #[test]
    fn full_suite_on_bundle() {
        let (g, c) = bundle_with_generator();
        let model = Model::new(&g, &c, 2, DEFAULT_DIMENSION_CAP).unwrap();
        let mu = MeasureFamily::<f64>::perturbed(&g, 4);
        let least = g.semidirect(SectionRule::Least);
        let greatest = g.semidirect(SectionRule::Greatest);
        let state = ModelState::new(&model, &mu, &least).unwrap();
        let other = ModelState::new(&model, &mu, &greatest).unwrap();
        for check in model_suite(&model, &state, Some(&other), &least, 1e-9, 7) {
            assert!(!check.failed(), "{check:?}");
        }
    }
}
