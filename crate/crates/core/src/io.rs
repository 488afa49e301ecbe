//! JSON interchange for groupoids, cochains, measures and characteristic
//! data, and the CSV form of Reiter profiles.
//!
//! Cochains are lists of rows `[t₁, …, t_n, num, den]`; omitted tuples carry
//! the trivial phase. Measures use the same shape with one arrow per row and
//! the weight `num/den`; omitted arrows have weight zero.

use std::fs;
use std::path::Path;

use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, GroupoidData};
use crate::invariants::{CharCocycle, CharCocycleData, CoefficientBundle};
use crate::phase::Phase;
use crate::walk::{Exact, MeasureFamily};

/// One cochain or measure row.
pub type Row = Vec<i64>;

/// Parses JSON, reporting `origin:line:column` on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    parse_json(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Builds the groupoid without checking the axioms; callers decide whether
/// violations are fatal.
pub fn parse_groupoid(text: &str, origin: &str) -> Result<Groupoid> {
    let data: GroupoidData = parse_json(text, origin)?;
    Groupoid::from_data(&data).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

pub fn read_groupoid(path: &Path) -> Result<Groupoid> {
    parse_groupoid(&fs::read_to_string(path)?, &path.display().to_string())
}

fn id_at(g: &Groupoid, v: i64, origin: &str, row: usize) -> Result<usize> {
    usize::try_from(v)
        .ok()
        .filter(|&a| a < g.len())
        .ok_or_else(|| Error::Parse(format!("{origin}: row {row}: arrow {v} out of range")))
}

/// Reads a normalized cochain of the given arity.
pub fn cochain_from_rows(g: &Groupoid, arity: usize, rows: &[Row], origin: &str) -> Result<Cochain> {
    let mut c = Cochain::trivial(g, arity);
    let mut seen = std::collections::BTreeSet::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != arity + 2 {
            return Err(Error::Parse(format!(
                "{origin}: row {i}: expected {} entries, found {}",
                arity + 2,
                row.len()
            )));
        }
        let t = row[..arity]
            .iter()
            .map(|&v| id_at(g, v, origin, i))
            .collect::<Result<Vec<_>>>()?;
        if t.windows(2).any(|w| !g.composable(w[0], w[1])) {
            return Err(Error::Parse(format!("{origin}: row {i}: {t:?} is not composable")));
        }
        let (num, den) = (row[arity], row[arity + 1]);
        if den == 0 {
            return Err(Error::Parse(format!("{origin}: row {i}: zero denominator")));
        }
        if !seen.insert(t.clone()) {
            return Err(Error::Parse(format!("{origin}: row {i}: {t:?} given twice")));
        }
        c.set(&t, Phase::new(num, den));
    }
    if let Some(tuple) = c.normalization_violation(g) {
        return Err(Error::NotNormalized { tuple });
    }
    Ok(c)
}

/// Rows for the non-trivial entries, in lexicographic tuple order.
pub fn cochain_to_rows(g: &Groupoid, c: &Cochain) -> Vec<Row> {
    c.support(g)
        .into_iter()
        .map(|(t, v)| {
            let a = v.angle();
            let mut row: Row = t.into_iter().map(|x| x as i64).collect();
            row.extend([*a.numer(), *a.denom()]);
            row
        })
        .collect()
}

pub fn read_cochain(g: &Groupoid, arity: usize, path: &Path) -> Result<Cochain> {
    let rows: Vec<Row> = read_json(path)?;
    cochain_from_rows(g, arity, &rows, &path.display().to_string())
}

/// Reads an exact probability family.
pub fn measure_from_rows(g: &Groupoid, rows: &[Row], origin: &str) -> Result<MeasureFamily<Exact>> {
    let mut weights = vec![Exact::from_integer(0); g.len()];
    let mut seen = vec![false; g.len()];
    for (i, row) in rows.iter().enumerate() {
        let [a, num, den] = row[..] else {
            return Err(Error::Parse(format!("{origin}: row {i}: expected [arrow, num, den]")));
        };
        let a = id_at(g, a, origin, i)?;
        if den == 0 {
            return Err(Error::Parse(format!("{origin}: row {i}: zero denominator")));
        }
        if std::mem::replace(&mut seen[a], true) {
            return Err(Error::Parse(format!("{origin}: row {i}: arrow {a} given twice")));
        }
        weights[a] = Ratio::new(num as i128, den as i128);
    }
    MeasureFamily::new(g, weights).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

pub fn measure_to_rows(mu: &MeasureFamily<Exact>) -> Vec<Row> {
    mu.weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != Exact::from_integer(0))
        .map(|(a, w)| vec![a as i64, *w.numer() as i64, *w.denom() as i64])
        .collect()
}

pub fn read_measure(g: &Groupoid, path: &Path) -> Result<MeasureFamily<Exact>> {
    let rows: Vec<Row> = read_json(path)?;
    measure_from_rows(g, &rows, &path.display().to_string())
}

pub fn read_characteristic(g: &Groupoid, bundle: &CoefficientBundle, path: &Path) -> Result<CharCocycle> {
    let data: CharCocycleData = read_json(path)?;
    CharCocycle::from_data(g, bundle, &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{cyclic_generator, inflate};
    use crate::group::FiniteGroup;
    use crate::groupoid::GroupoidHom;

    #[test]
    fn cochain_rows_round_trip() {
        let z4 = FiniteGroup::cyclic(4);
        let g = Groupoid::group_bundle(2, &z4);
        let c = inflate(
            &cyclic_generator(4),
            &g,
            &GroupoidHom::group_coordinate(&g, &z4).unwrap(),
        );
        let rows = cochain_to_rows(&g, &c);
        assert_eq!(cochain_from_rows(&g, 3, &rows, "t").unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_groupoid("{\n  \"units\": [0,\n  oops]\n}", "g.json").unwrap_err();
        assert!(err.to_string().contains("g.json:3:"), "{err}");
    }

    #[test]
    fn rejects_bad_rows() {
        let g = Groupoid::pair(2);
        assert!(cochain_from_rows(&g, 2, &[vec![1, 3, 1, 2]], "t").is_err());
        assert!(cochain_from_rows(&g, 2, &[vec![0, 1, 1, 2]], "t").is_err());
        assert!(measure_from_rows(&g, &[vec![0, 1, 2]], "t").is_err());
        let mu = measure_from_rows(&g, &[vec![0, 1, 1], vec![3, 1, 1]], "t").unwrap();
        assert_eq!(measure_to_rows(&mu), vec![vec![0, 1, 1], vec![3, 1, 1]]);
    }
}
