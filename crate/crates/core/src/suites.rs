//! The verification suites run by the command-line front end. Each suite
//! maps to one module's check set and yields a [`SuiteReport`].

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{self, check_cocycle3, coboundary, cyclic_generator, inflate, Cochain};
use crate::corpus::Example;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHom};
use crate::groupoid::{ElementId, Groupoid, GroupoidHom, SectionRule};
use crate::invariants::{
    cc_outcomes, coboundary_perturb, kernel_shadow, random_z, search_scalar, CharCocycle, CoefficientBundle,
    NormalSubgroupoid, Relation, Unitary, DEFAULT_SEARCH_CAP,
};
use crate::model::{model_suite, Model, ModelState, DEFAULT_DIMENSION_CAP};
use crate::phase::Phase;
use crate::quotient::{check_d2, check_quotient_layer, check_trivial_normal, QuotientPresentation};
use crate::report::{Check, Residual, SuiteReport};
use crate::rng::argument_rng;
use crate::walk::{self, Exact, FiberFunction, MeasureFamily};

/// Bound on `‖g·μ^{*n,s(g)} − μ^{*n,r(g)}‖₁` at the final depth.
pub const REITER_TOL: f64 = 1e-6;
/// Tolerance for the eigenvalue-one fixed space.
pub const FIXED_SPACE_TOL: f64 = 1e-8;
/// Angle used for single-entry mutations.
pub const MUTATION_ANGLE: (i64, i64) = (1, 3);
/// Roots of unity and `d` window for the reference brute-force search.
pub const REFERENCE_ROOTS: u32 = 4;
pub const REFERENCE_WINDOW: i64 = 2;
const SHADOW_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Cocycle,
    Walk,
    Model,
    Invariants,
    Appendix,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Axioms,
        Suite::Cocycle,
        Suite::Walk,
        Suite::Model,
        Suite::Invariants,
        Suite::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Cocycle => "cocycle",
            Suite::Walk => "walk",
            Suite::Model => "model",
            Suite::Invariants => "invariants",
            Suite::Appendix => "appendix",
        }
    }

    /// `all` or a comma-separated list of suite names.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            if part == "all" {
                out.extend(Suite::ALL);
                continue;
            }
            match Suite::ALL.iter().find(|x| x.name() == part) {
                Some(&x) => out.push(x),
                None => return Err(Error::Parse(format!("unknown suite `{part}`"))),
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub level: usize,
    pub tol: f64,
    pub depth: usize,
    pub seed: u64,
    pub cocycle_samples: usize,
    pub walk_samples: usize,
    /// Members of `N` for the input groupoid; squares of the isotropy when absent.
    pub normal: Option<Vec<ElementId>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            level: 2,
            tol: 1e-9,
            depth: 12,
            seed: 0,
            cocycle_samples: 100,
            walk_samples: 1000,
            normal: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Parse(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.level == 0 {
            return Err(Error::InvalidLevel {
                level: 0,
                max: usize::MAX,
            });
        }
        if self.depth == 0 {
            return Err(Error::Parse("Reiter depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// The data a run is about.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub groupoid: Groupoid,
    pub cocycle: Cochain,
    pub measure: MeasureFamily<Exact>,
    /// A homomorphism to `ℤ/modulus`, when known; it drives `β` on the
    /// coefficient bundle used for the input groupoid.
    pub hom: Option<(GroupoidHom, usize)>,
}

impl Instance {
    pub fn from_example(ex: &Example, generator: bool, perturbed: bool) -> Self {
        Self {
            name: ex.name.clone(),
            groupoid: ex.groupoid.clone(),
            cocycle: if generator {
                ex.generator_cocycle()
            } else {
                ex.trivial_cocycle()
            },
            measure: if perturbed { ex.perturbed() } else { ex.uniform() },
            hom: Some((ex.hom.clone(), ex.modulus)),
        }
    }
}

/// Runs the axiom suite first; the others only run on a valid groupoid and
/// are computed in parallel, in the order given.
pub fn run_suites(instance: &Instance, suites: &[Suite], config: &RunConfig) -> Result<Vec<SuiteReport>> {
    config.validate()?;
    let axioms = axioms_suite(&instance.groupoid);
    if !axioms.passed {
        let mut report = axioms;
        report
            .notes
            .push("the groupoid is invalid; remaining suites were not run".into());
        return Ok(vec![report]);
    }
    let results: Vec<Result<SuiteReport>> = suites
        .par_iter()
        .map(|&s| match s {
            Suite::Axioms => Ok(axioms.clone()),
            Suite::Cocycle => cocycle_suite(instance, config),
            Suite::Walk => walk_suite(instance, config),
            Suite::Model => model_suite_report(instance, config),
            Suite::Invariants => invariants_suite(instance, config),
            Suite::Appendix => appendix_suite(instance, config),
        })
        .collect();
    results.into_iter().collect()
}

pub fn axioms_suite(g: &Groupoid) -> SuiteReport {
    let violations = g.validate();
    let mut check = Check::exact("groupoid_axioms", g.len(), violations.len(), None);
    if let Some(v) = violations.first() {
        check = check.with_note(format!("first violation: {v}"));
    }
    let mut checks = vec![check];
    if violations.is_empty() {
        checks.push(tuple_count_check(g));
        checks.push(semidirect_check(g));
    }
    let mut report = SuiteReport::new("axioms", checks);
    report.notes.extend(violations.iter().take(20).map(|v| v.to_string()));
    report
}

/// `|G^{x,(n)}| = Σ_{t₁ ∈ G^x} |G^{s(t₁),(n−1)}|` for `n ≤ 4`.
fn tuple_count_check(g: &Groupoid) -> Check {
    let mut args = 0;
    let mut failures = 0;
    let mut first = None;
    for n in 2..=4 {
        for &x in g.units() {
            args += 1;
            let direct = g.count_composable(n, Some(x), None);
            let recursive: usize = g
                .range_fiber(x)
                .iter()
                .map(|&t| g.count_composable(n - 1, Some(g.source(t)), None))
                .sum();
            if direct != recursive || direct != g.composable_tuples(n, Some(x), None).len() {
                failures += 1;
                first.get_or_insert(vec![n, x]);
            }
        }
    }
    Check::exact("composable_tuple_counts", args, failures, first)
}

/// Every arrow factors uniquely as `h·σ(r(g), s(g))` with `h` in the isotropy.
fn semidirect_check(g: &Groupoid) -> Check {
    let p = g.semidirect(SectionRule::Least);
    let mut failures = 0;
    let mut first = None;
    for a in g.elements() {
        let (y, x) = (g.range(a), g.source(a));
        let ok = match p.sigma(y, x) {
            Some(s) => {
                let factors: Vec<ElementId> = g.isotropy(y).into_iter().filter(|&h| g.mul(h, s) == a).collect();
                factors.len() == 1 && factors[0] == p.isotropy_part(g, a)
            }
            None => false,
        };
        if !ok {
            failures += 1;
            first.get_or_insert(vec![a]);
        }
    }
    Check::exact("semidirect_factorization", g.len(), failures, first)
}

pub fn cocycle_suite(instance: &Instance, config: &RunConfig) -> Result<SuiteReport> {
    let g = &instance.groupoid;
    let base = &instance.cocycle;
    let verdict = check_cocycle3(g, base)?;
    let input = Check::exact(
        "input_is_cocycle",
        verdict.tuples_checked,
        verdict.violations,
        verdict.first_violation.map(|t| t.to_vec()),
    );
    let triples: Vec<[ElementId; 3]> = g
        .composable_tuples(3, None, None)
        .into_iter()
        .filter(|t| !t.iter().any(|&e| g.is_unit(e)))
        .map(|t| [t[0], t[1], t[2]])
        .collect();
    let delta = Phase::new(MUTATION_ANGLE.0, MUTATION_ANGLE.1);
    let outcomes: Vec<(bool, usize, Option<Vec<ElementId>>, bool, bool)> = (0..config.cocycle_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = argument_rng(config.seed, "cocycle", &[i]);
            let c = cochain::random_cocycle(g, base, &mut rng);
            let passed = check_cocycle3(g, &c).map(|v| v.passed()).unwrap_or(false);
            let mut missed = 0;
            let mut first_missed = None;
            for t in &triples {
                if cochain::mutation_witness(g, &c, *t, delta).is_none() {
                    missed += 1;
                    first_missed.get_or_insert_with(|| [i].into_iter().chain(t.iter().copied()).collect());
                }
            }
            // Full re-check of a few mutations against the local witness.
            let agrees = triples.iter().take(4).all(|t| {
                let full = check_cocycle3(g, &c.mutated(t, delta))
                    .map(|v| v.passed())
                    .unwrap_or(true);
                full == cochain::mutation_witness(g, &c, *t, delta).is_none()
            });
            let b = cochain::random_cochain(g, 1, &mut rng);
            let ddb = coboundary(g, &coboundary(g, &b).expect("arity 1")).expect("arity 2");
            let dd_trivial = ddb.agrees_with(&Cochain::trivial(g, 3), g);
            (passed, missed, first_missed, agrees, dd_trivial)
        })
        .collect();
    let n = outcomes.len();
    let generated_fail = outcomes.iter().filter(|o| !o.0).count();
    let first_generated = outcomes.iter().position(|o| !o.0).map(|i| vec![i]);
    let missed: usize = outcomes.iter().map(|o| o.1).sum();
    let first_missed = outcomes.iter().find_map(|o| o.2.clone());
    let disagree = outcomes.iter().filter(|o| !o.3).count();
    let dd_fail = outcomes.iter().filter(|o| !o.4).count();
    let checks = vec![
        input,
        Check::exact("generated_cocycles", n, generated_fail, first_generated)
            .with_note("input cocycle times the coboundary of a random normalized 2-cochain"),
        Check::exact("single_entry_mutations_caught", n * triples.len(), missed, first_missed).with_note(format!(
            "every non-unit entry multiplied by e(2πi·{}/{})",
            MUTATION_ANGLE.0, MUTATION_ANGLE.1
        )),
        Check::exact("mutation_full_recheck", n, disagree, None),
        Check::exact("coboundary_squared_trivial", n, dd_fail, None),
    ];
    Ok(SuiteReport::new("cocycle", checks))
}

#[derive(Default)]
struct Tally {
    args: usize,
    failures: usize,
    first: Option<Vec<ElementId>>,
}

impl Tally {
    fn record(&mut self, ok: bool, args: impl FnOnce() -> Vec<ElementId>) {
        self.args += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(args());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.args += other.args;
        self.failures += other.failures;
        self.first = self.first.or(other.first);
        self
    }

    fn check(self, name: &str) -> Check {
        Check::exact(name, self.args, self.failures, self.first)
    }
}

const WALK_IDENTITIES: [&str; 7] = [
    "l1_norm_preserved_nonnegative",
    "l1_contraction",
    "markov_unital",
    "markov_composition",
    "dual_is_convolution",
    "dual_pairing",
    "convolution_associative",
];

/// Exact identities on one random sample; `true` where each holds.
fn walk_sample(g: &Groupoid, seed: u64, i: usize) -> [bool; 7] {
    let mut rng = argument_rng(seed, "walk", &[i]);
    let full = rng.random_bool(0.5);
    let mu = MeasureFamily::<Exact>::random(g, &mut rng, full);
    let nu = MeasureFamily::<Exact>::random(g, &mut rng, !full);
    let x = g.units()[rng.random_range(0..g.units().len())];
    let f_pos = FiberFunction::<Exact>::random(g, x, &mut rng, true);
    let f = FiberFunction::<Exact>::random(g, x, &mut rng, false);
    let theta = FiberFunction::<Exact>::random(g, x, &mut rng, false);
    let p = walk::markov(g, &mu, x);
    let p_mu_nu = walk::markov(g, &walk::convolve_families(g, &mu, &nu), x);
    let dual = p.dual(&theta);
    let one = Exact::from_integer(1);
    [
        walk::convolve(g, &f_pos, &mu).l1() == f_pos.l1(),
        walk::convolve(g, &f, &mu).l1() <= f.l1(),
        p.row_sums().iter().all(|s| *s == one),
        p.compose(&walk::markov(g, &nu, x)) == p_mu_nu,
        dual == walk::convolve(g, &theta, &mu),
        dual.pair(&f) == theta.pair(&p.apply(&f)),
        walk::convolve_families(g, &walk::convolve_families(g, &mu, &nu), &mu)
            == walk::convolve_families(g, &mu, &walk::convolve_families(g, &nu, &mu)),
    ]
}

pub fn walk_suite(instance: &Instance, config: &RunConfig) -> Result<SuiteReport> {
    let g = &instance.groupoid;
    let tallies = (0..config.walk_samples)
        .into_par_iter()
        .map(|i| {
            let ok = walk_sample(g, config.seed, i);
            let mut t: Vec<Tally> = (0..ok.len()).map(|_| Tally::default()).collect();
            for (tally, ok) in t.iter_mut().zip(ok) {
                tally.record(ok, || vec![i]);
            }
            t
        })
        .reduce(
            || (0..WALK_IDENTITIES.len()).map(|_| Tally::default()).collect(),
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        );
    let mut checks: Vec<Check> = tallies
        .into_iter()
        .zip(WALK_IDENTITIES)
        .map(|(t, name)| t.check(name))
        .collect();
    let mut notes = Vec::new();

    let mu = instance.measure.to_f64();
    let full = mu.full_support();
    let profiles = walk::reiter_profiles(g, &mu, config.depth);
    let mut reiter = Residual::default();
    for (a, row) in profiles.iter().enumerate() {
        reiter.record(*row.last().expect("depth ≥ 1"), &[a]);
    }
    let mut fixed = Tally::default();
    let mut dims = Vec::new();
    for &x in g.units() {
        let fs = walk::harmonic_fixed_space(&walk::markov(g, &mu, x), FIXED_SPACE_TOL);
        dims.push(fs.dimension);
        fixed.record(fs.trivial, || vec![x]);
    }
    let mut reiter_check =
        Check::from_residual("reiter_at_depth", reiter, REITER_TOL).with_note(format!("depth {}", config.depth));
    let mut fixed_check = fixed
        .check("fixed_space_is_constants")
        .with_note(format!("dimensions {dims:?}"));
    if !full {
        reiter_check = reiter_check.informational();
        fixed_check = fixed_check.informational();
        notes.push("the measure lacks full support; convergence checks are informational".to_string());
    }
    if !g.is_transitive() {
        notes.push("the groupoid is not transitive; each orbit is treated on its own".to_string());
    }
    checks.push(reiter_check);
    checks.push(fixed_check);
    let mut report = SuiteReport::new("walk", checks);
    report.notes = notes;
    Ok(report)
}

pub fn model_suite_report(instance: &Instance, config: &RunConfig) -> Result<SuiteReport> {
    let g = &instance.groupoid;
    let model = Model::new(g, &instance.cocycle, config.level, DEFAULT_DIMENSION_CAP)?;
    let mu = instance.measure.to_f64();
    let least = g.semidirect(SectionRule::Least);
    let greatest = g.semidirect(SectionRule::Greatest);
    let state = ModelState::new(&model, &mu, &least)?;
    let other = ModelState::new(&model, &mu, &greatest)?;
    let checks = model_suite(&model, &state, Some(&other), &least, config.tol, config.seed);
    let mut report = SuiteReport::new("model", checks);
    report.notes.push(format!(
        "levels 1..={}, largest path basis {}",
        config.level,
        model.max_dimension(config.level)
    ));
    Ok(report)
}

/// `N_x` generated by the squares of `H_x`.
pub fn square_normal(g: &Groupoid) -> Result<NormalSubgroupoid> {
    let mut members = Vec::new();
    for &x in g.units() {
        let h = g.isotropy(x);
        let mut sub: Vec<ElementId> = h.iter().map(|&a| g.mul(a, a)).collect();
        sub.push(x);
        sub.sort_unstable();
        sub.dedup();
        loop {
            let mut next = sub.clone();
            for &a in &sub {
                for &b in &sub {
                    next.push(g.mul(a, b));
                }
            }
            next.sort_unstable();
            next.dedup();
            if next == sub {
                break;
            }
            sub = next;
        }
        members.extend(sub);
    }
    NormalSubgroupoid::new(g, &members)
}

/// The reference instance: `G = ℤ/4`, `N = {0, 2}` and `c` trivial or the
/// `ℤ/2` generator pulled back along `ℤ/4 → ℤ/2`.
pub struct Reference {
    pub quotient: QuotientPresentation,
    pub groupoid: Groupoid,
    pub normal: NormalSubgroupoid,
    pub mod2: GroupoidHom,
    pub cocycles: Vec<(&'static str, Cochain)>,
}

impl Reference {
    pub fn new() -> Self {
        let z4 = FiniteGroup::cyclic(4);
        let quotient = QuotientPresentation::new(z4.clone(), &[2]).expect("normal subgroup");
        let groupoid = quotient.group_groupoid();
        let normal = quotient.normal_subgroupoid(&groupoid).expect("normal subgroupoid");
        let mod2 = GroupoidHom::group_coordinate(&groupoid, &z4)
            .expect("coordinate")
            .then(&GroupHom::cyclic_reduction(4, 2).expect("reduction"));
        let cocycles = vec![
            ("trivial", Cochain::trivial(&groupoid, 3)),
            ("generator", inflate(&cyclic_generator(2), &groupoid, &mod2)),
        ];
        Self {
            quotient,
            groupoid,
            normal,
            mod2,
            cocycles,
        }
    }

    pub fn solutions(&self, c: &Cochain) -> Result<Vec<CharCocycle>> {
        search_scalar(
            &self.groupoid,
            &self.normal,
            c,
            REFERENCE_ROOTS,
            REFERENCE_WINDOW,
            DEFAULT_SEARCH_CAP,
        )
    }
}

impl Default for Reference {
    fn default() -> Self {
        Self::new()
    }
}

fn relation_checks(
    prefix: &str,
    g: &Groupoid,
    bundle: &CoefficientBundle,
    cases: &[(CharCocycle, Cochain)],
) -> Result<Vec<Check>> {
    let mut tallies: BTreeMap<Relation, Tally> = BTreeMap::new();
    for (i, (chi, c)) in cases.iter().enumerate() {
        for (rel, o) in cc_outcomes(g, bundle, chi, c)? {
            let t = tallies.entry(rel).or_default();
            t.args += o.checked;
            t.failures += o.failures;
            if t.first.is_none() {
                if let Some((arrows, _)) = o.first {
                    t.first = Some([i].into_iter().chain(arrows).collect());
                }
            }
        }
    }
    Ok(tallies
        .into_iter()
        .map(|(rel, t)| t.check(&format!("{prefix}.{}", rel.name())))
        .collect())
}

fn root_z(normal: &NormalSubgroupoid, g: &Groupoid, values: &[Phase]) -> BTreeMap<ElementId, Unitary> {
    let mut it = values.iter().cycle();
    normal
        .members()
        .into_iter()
        .map(|n| {
            (
                n,
                vec![if g.is_unit(n) {
                    Phase::one()
                } else {
                    *it.next().expect("values")
                }],
            )
        })
        .collect()
}

fn inverse_z(z: &BTreeMap<ElementId, Unitary>) -> BTreeMap<ElementId, Unitary> {
    z.iter()
        .map(|(&n, v)| (n, v.iter().map(|p| p.conj()).collect()))
        .collect()
}

pub fn invariants_suite(instance: &Instance, config: &RunConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let r = Reference::new();
    let g = &r.groupoid;
    let scalar = CoefficientBundle::scalar(g);
    for (label, c) in &r.cocycles {
        let sols = r.solutions(c)?;
        notes.push(format!("reference.{label}: {} solutions", sols.len()));
        let cases: Vec<(CharCocycle, Cochain)> = sols.iter().map(|s| (s.clone(), c.clone())).collect();
        checks.extend(relation_checks(&format!("reference.{label}"), g, &scalar, &cases)?);

        let mut closed = Tally::default();
        let mut invertible = Tally::default();
        let roots: Vec<Phase> = (0..REFERENCE_ROOTS as i64)
            .map(|j| Phase::root_of_unity(REFERENCE_ROOTS, j))
            .collect();
        for (i, chi) in sols.iter().enumerate() {
            for (j, &v) in roots.iter().enumerate() {
                let z = root_z(&r.normal, g, &[v]);
                let moved = coboundary_perturb(g, &scalar, chi, &z)?;
                closed.record(sols.contains(&moved), || vec![i, j]);
            }
            let mut rng = argument_rng(config.seed, "reference.perturb", &[i]);
            let z = random_z(g, &scalar, &r.normal, &mut rng);
            let moved = coboundary_perturb(g, &scalar, chi, &z)?;
            let back = coboundary_perturb(g, &scalar, &moved, &inverse_z(&z))?;
            let holds = crate::invariants::satisfies_cc(g, &scalar, &moved, c) && &back == chi;
            invertible.record(holds, || vec![i]);
        }
        checks.push(closed.check(&format!("reference.{label}.perturbation_preserves_solution_set")));
        checks.push(invertible.check(&format!("reference.{label}.random_perturbation_invertible")));
    }

    let (input_checks, input_notes) = input_invariants(instance, config)?;
    checks.extend(input_checks);
    notes.extend(input_notes);

    let mut report = SuiteReport::new("invariants", checks);
    report.notes = notes;
    Ok(report)
}

/// Bundle on the input groupoid: `F_x = ℤ/2`, `θ = +1`, and `β` through the
/// known homomorphism reduced mod 2 when that is trivial on `N`.
fn input_bundle(instance: &Instance, normal: &NormalSubgroupoid) -> Result<CoefficientBundle> {
    let g = &instance.groupoid;
    if let Some((hom, k)) = &instance.hom {
        if k % 2 == 0 {
            let reduced = GroupoidHom::new(g, &FiniteGroup::cyclic(2), hom.images.iter().map(|&a| a % 2).collect())?;
            let bundle = CoefficientBundle::translation(g, 2, &reduced)?;
            if bundle.acts_trivially_on(normal) {
                return Ok(bundle);
            }
        }
    }
    CoefficientBundle::translation(g, 2, &GroupoidHom::trivial(g))
}

fn input_normal(instance: &Instance, config: &RunConfig) -> Result<NormalSubgroupoid> {
    match &config.normal {
        Some(members) => NormalSubgroupoid::new(&instance.groupoid, members),
        None => square_normal(&instance.groupoid),
    }
}

fn input_invariants(instance: &Instance, config: &RunConfig) -> Result<(Vec<Check>, Vec<String>)> {
    let g = &instance.groupoid;
    let normal = input_normal(instance, config)?;
    let bundle = input_bundle(instance, &normal)?;
    let mut notes = vec![format!("input: N = {:?}", normal.members())];
    let mut cases = Vec::new();
    let mut matches = Tally::default();
    let mut preserved = Tally::default();
    for i in 0..SHADOW_SAMPLES {
        let mut rng = argument_rng(config.seed, "input.shadow", &[i]);
        let w = cochain::random_cochain(g, 2, &mut rng);
        let u = random_z(g, &bundle, &normal, &mut rng);
        let (chi, c) = kernel_shadow(g, &bundle, normal.clone(), &w, &u, REFERENCE_WINDOW)?;
        let z = random_z(g, &bundle, &normal, &mut rng);
        let moved = coboundary_perturb(g, &bundle, &chi, &z)?;
        let zu: BTreeMap<ElementId, Unitary> = u
            .iter()
            .map(|(&n, v)| (n, v.iter().zip(&z[&n]).map(|(a, b)| *a * *b).collect()))
            .collect();
        let (direct, _) = kernel_shadow(g, &bundle, normal.clone(), &w, &zu, REFERENCE_WINDOW)?;
        matches.record(moved == direct, || vec![i]);
        preserved.record(crate::invariants::satisfies_cc(g, &bundle, &moved, &c), || vec![i]);
        cases.push((chi, c));
    }
    let mut checks = relation_checks("input.shadow", g, &bundle, &cases)?;
    checks.push(matches.check("input.shadow.perturbation_matches_twisted_kernel"));
    checks.push(preserved.check("input.shadow.perturbation_preserves_relations"));

    let mu = instance.measure.to_f64();
    if mu.full_support() {
        let level = config.level.min(2);
        let model = Model::new(g, &instance.cocycle, level, DEFAULT_DIMENSION_CAP)?;
        let (least, greatest) = (g.semidirect(SectionRule::Least), g.semidirect(SectionRule::Greatest));
        let a = ModelState::new(&model, &mu, &least)?;
        let b = ModelState::new(&model, &mu, &greatest)?;
        let mut res = Residual::default();
        for n in 1..=level {
            for k in g.elements() {
                let ta: f64 = a.rho(k, n).iter().sum();
                let tb: f64 = b.rho(k, n).iter().sum();
                res.record((ta - tb).abs(), &[n, k]);
            }
        }
        checks.push(Check::from_residual(
            "input.rho_trace_section_independent",
            res,
            config.tol,
        ));
    } else {
        notes.push("input measure lacks full support; section independence of Tr ρ not checked".into());
    }
    Ok((checks, notes))
}

/// The input groupoid as a group, when it has the single unit `0`.
pub fn as_group(g: &Groupoid) -> Option<FiniteGroup> {
    if g.units() != [0] {
        return None;
    }
    let n = g.len();
    let table = (0..n * n).map(|i| g.mul(i / n, i % n)).collect();
    FiniteGroup::from_table(n, table).ok()
}

pub fn appendix_suite(instance: &Instance, config: &RunConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let r = Reference::new();
    for (label, c) in &r.cocycles {
        let sols = r.solutions(c)?;
        checks.extend(check_quotient_layer(
            &r.quotient,
            c,
            &sols,
            &format!("reference.{label}"),
        )?);
        checks.extend(check_trivial_normal(
            r.quotient.group(),
            c,
            &format!("trivial_normal.{label}"),
        )?);
    }
    let bundle = CoefficientBundle::translation(&r.groupoid, 2, &r.mod2)?;
    let mut d2 = Tally::default();
    for i in 0..SHADOW_SAMPLES {
        let mut rng = argument_rng(config.seed, "appendix.d2", &[i]);
        let w = cochain::random_cochain(&r.groupoid, 2, &mut rng);
        let u = random_z(&r.groupoid, &bundle, &r.normal, &mut rng);
        let check = check_d2(&r.quotient, &bundle, &w, &u, REFERENCE_WINDOW)?;
        d2.args += check.arguments;
        d2.failures += check.max_residual as usize;
        if d2.first.is_none() {
            d2.first = check.worst.map(|w| [i].into_iter().chain(w).collect());
        }
    }
    checks.push(d2.check("reference.d2_matches_d"));

    match as_group(&instance.groupoid) {
        Some(group) => {
            let g = &instance.groupoid;
            let normal = input_normal(instance, config)?;
            let members: Vec<ElementId> = normal.members();
            let q = QuotientPresentation::new(group.clone(), &members)?;
            let roots = group.exponent() as u32;
            match search_scalar(
                g,
                &normal,
                &instance.cocycle,
                roots,
                REFERENCE_WINDOW,
                DEFAULT_SEARCH_CAP,
            ) {
                Ok(sols) => {
                    notes.push(format!("input: N = {members:?}, {} solutions", sols.len()));
                    checks.extend(check_quotient_layer(&q, &instance.cocycle, &sols, "input")?);
                }
                Err(Error::SearchCap { size, cap }) => {
                    notes.push(format!("input: search space {size} exceeds {cap}; skipped"));
                }
                Err(e) => return Err(e),
            }
            checks.extend(check_trivial_normal(&group, &instance.cocycle, "input.trivial_normal")?);
        }
        None => notes.push("input groupoid is not a group; the quotient layer runs on the reference only".into()),
    }
    let mut report = SuiteReport::new("appendix", checks);
    report.notes = notes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_suite_lists() {
        assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(
            Suite::parse_list("walk, axioms").unwrap(),
            vec![Suite::Axioms, Suite::Walk]
        );
        assert!(Suite::parse_list("bogus").is_err());
    }

    #[test]
    fn square_normal_of_z4() {
        let g = Groupoid::from_group(&FiniteGroup::cyclic(4));
        assert_eq!(square_normal(&g).unwrap().members(), vec![0, 2]);
        assert_eq!(as_group(&g).unwrap(), FiniteGroup::cyclic(4));
        assert!(as_group(&Groupoid::pair(2)).is_none());
    }
}
