//! The bundled example corpus: small groupoids, each with a trivial and an
//! inflated-generator 3-cocycle and a uniform and a perturbed measure.

use std::fs;
use std::path::{Path, PathBuf};

use crate::cochain::{cyclic_generator, inflate, Cochain};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupAction, GroupHom};
use crate::groupoid::{Groupoid, GroupoidHom};
use crate::io::{cochain_to_rows, measure_to_rows, write_json};
use crate::walk::{Exact, MeasureFamily};

/// Denominator of the perturbation in [`MeasureFamily::perturbed`] used by the corpus.
pub const PERTURBATION_DENOMINATOR: i64 = 4;

#[derive(Clone, Debug)]
pub struct Example {
    pub name: String,
    pub groupoid: Groupoid,
    /// Homomorphism to `ℤ/k` through which the generator is inflated.
    pub hom: GroupoidHom,
    pub modulus: usize,
}

impl Example {
    pub fn trivial_cocycle(&self) -> Cochain {
        Cochain::trivial(&self.groupoid, 3)
    }

    pub fn generator_cocycle(&self) -> Cochain {
        inflate(&cyclic_generator(self.modulus), &self.groupoid, &self.hom)
    }

    pub fn uniform(&self) -> MeasureFamily<Exact> {
        MeasureFamily::uniform(&self.groupoid)
    }

    pub fn perturbed(&self) -> MeasureFamily<Exact> {
        MeasureFamily::perturbed(&self.groupoid, PERTURBATION_DENOMINATOR)
    }
}

/// `(y, x) ↦ y − x mod m` on `pair(m)`.
fn pair_difference(g: &Groupoid, m: usize) -> Result<GroupoidHom> {
    let point = |u| g.units().iter().position(|&v| v == u).expect("unit");
    let images = g
        .elements()
        .map(|a| (point(g.range(a)) + m - point(g.source(a))) % m)
        .collect();
    GroupoidHom::new(g, &FiniteGroup::cyclic(m), images)
}

fn through_coordinate(g: &Groupoid, group: &FiniteGroup, modulus: usize) -> Result<GroupoidHom> {
    let coordinate = GroupoidHom::group_coordinate(g, group)?;
    Ok(coordinate.then(&GroupHom::cyclic_reduction(group.order(), modulus)?))
}

/// Parses `pair:M`, `bundle:X:K` (`X` points, `ℤ/K` fibers), `cyclic:K`,
/// `transformation:K:M` (`ℤ/K` translating `ℤ/M`, `M | K`) and
/// `swap` (`ℤ/2` swapping two points).
pub fn generate(kind: &str) -> Result<Example> {
    let parts: Vec<&str> = kind.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .and_then(|s| s.parse().ok())
            .filter(|&v: &usize| v >= 1)
            .ok_or_else(|| Error::Parse(format!("generator `{kind}`: bad or missing parameter {i}")))
    };
    let (groupoid, hom, modulus) = match parts[0] {
        "pair" => {
            let m = num(1)?;
            let g = Groupoid::pair(m);
            let hom = pair_difference(&g, m)?;
            (g, hom, m)
        }
        "cyclic" => {
            let k = num(1)?;
            let z = FiniteGroup::cyclic(k);
            let g = Groupoid::from_group(&z);
            let hom = through_coordinate(&g, &z, k)?;
            (g, hom, k)
        }
        "bundle" => {
            let (x, k) = (num(1)?, num(2)?);
            let z = FiniteGroup::cyclic(k);
            let g = Groupoid::group_bundle(x, &z);
            let hom = through_coordinate(&g, &z, k)?;
            (g, hom, k)
        }
        "transformation" => {
            let (k, m) = (num(1)?, num(2)?);
            let z = FiniteGroup::cyclic(k);
            let g = Groupoid::transformation(&z, &GroupAction::cyclic_translation(k, m)?);
            let hom = through_coordinate(&g, &z, k)?;
            (g, hom, k)
        }
        "swap" if parts.len() == 1 => {
            let z = FiniteGroup::cyclic(2);
            let g = Groupoid::transformation(&z, &GroupAction::cyclic_translation(2, 2)?);
            let hom = through_coordinate(&g, &z, 2)?;
            (g, hom, 2)
        }
        _ => return Err(Error::Parse(format!("unknown generator `{kind}`"))),
    };
    Ok(Example {
        name: kind.replace(':', "_"),
        groupoid,
        hom,
        modulus,
    })
}

/// Generator strings of the bundled corpus.
pub const CORPUS: &[&str] = &[
    "pair:2",
    "pair:3",
    "cyclic:4",
    "bundle:2:2",
    "bundle:3:4",
    "swap",
    "transformation:4:2",
    "transformation:4:4",
];

pub fn corpus() -> Vec<Example> {
    CORPUS.iter().map(|k| generate(k).expect("corpus generator")).collect()
}

/// Writes `<name>.groupoid.json`, `<name>.{trivial,generator}.cocycle.json`
/// and `<name>.{uniform,perturbed}.measure.json` into `dir`; returns the
/// written paths in order.
pub fn emit(example: &Example, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let g = &example.groupoid;
    let path = |suffix: &str| dir.join(format!("{}.{suffix}.json", example.name));
    let mut written = Vec::new();
    let p = path("groupoid");
    write_json(&p, &g.to_data())?;
    written.push(p);
    for (label, c) in [
        ("trivial", example.trivial_cocycle()),
        ("generator", example.generator_cocycle()),
    ] {
        let p = path(&format!("{label}.cocycle"));
        write_json(&p, &cochain_to_rows(g, &c))?;
        written.push(p);
    }
    for (label, mu) in [("uniform", example.uniform()), ("perturbed", example.perturbed())] {
        let p = path(&format!("{label}.measure"));
        write_json(&p, &measure_to_rows(&mu))?;
        written.push(p);
    }
    Ok(written)
}
