//! Integer diagonalization for linear systems over `ℚ/ℤ`.
//!
//! A system `D·b ≡ c (mod ℤ)` with integer `D` is brought to diagonal form
//! `P·D·Q = diag(d₁, …, d_r, 0, …)` by unimodular row and column operations.
//! Solvability and one solution then read off coordinatewise.

use num_rational::{Ratio, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

type Q128 = Ratio<i128>;

/// A sparse integer row: `(column, coefficient)` pairs; repeated columns add.
pub type SparseRow = Vec<(usize, i64)>;

/// Finds `b ∈ (ℚ/ℤ)^ncols` with `Σ_j row[j]·b[j] ≡ rhs (mod 1)` for every row,
/// or `None` when the system is inconsistent. Returned angles lie in `[0, 1)`.
pub fn solve_mod_one(rows: &[SparseRow], ncols: usize, rhs: &[Rational64]) -> Result<Option<Vec<Rational64>>> {
    if rows.len() != rhs.len() {
        return Err(Error::Solve("row count and right-hand side differ".into()));
    }
    let mut a: Vec<Vec<i128>> = Vec::with_capacity(rows.len());
    let mut c: Vec<Q128> = Vec::with_capacity(rows.len());
    for (row, r) in rows.iter().zip(rhs) {
        let mut dense = vec![0i128; ncols];
        for &(j, v) in row {
            if j >= ncols {
                return Err(Error::Solve(format!("column {j} out of range")));
            }
            dense[j] += v as i128;
        }
        let value = Q128::new(*r.numer() as i128, *r.denom() as i128);
        if dense.iter().all(|&v| v == 0) {
            if !value.fract().is_zero() {
                return Ok(None);
            }
            continue;
        }
        a.push(dense);
        c.push(value);
    }
    let m = a.len();
    let mut q: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(ncols) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        c.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut q, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[i][t] != 0 {
                    let f = a[i][t].div_euclid(a[t][t]);
                    row_axpy(&mut a, i, t, f)?;
                    c[i] = c[i] - c[t] * Q128::from(f);
                    dirty |= a[i][t] != 0;
                }
            }
            for j in t + 1..ncols {
                if a[t][j] != 0 {
                    let f = a[t][j].div_euclid(a[t][t]);
                    col_axpy(&mut a, j, t, f)?;
                    col_axpy(&mut q, j, t, f)?;
                    dirty |= a[t][j] != 0;
                }
            }
            if !dirty {
                break;
            }
            // A remainder smaller than the pivot survived: move it into place.
            let (pi, pj) = min_in_cross(&a, t);
            a.swap(t, pi);
            c.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut q, t, pj);
        }
        diag.push(a[t][t]);
        t += 1;
    }
    for ci in c.iter().skip(diag.len()) {
        if !ci.fract().is_zero() {
            return Ok(None);
        }
    }
    let mut b_prime = vec![Q128::zero(); ncols];
    for (i, &d) in diag.iter().enumerate() {
        b_prime[i] = c[i] / Q128::from(d);
    }
    let mut out = Vec::with_capacity(ncols);
    for row in &q {
        let mut acc = Q128::zero();
        for (qij, bj) in row.iter().zip(&b_prime) {
            if *qij != 0 {
                acc = acc + bj * Q128::from(*qij);
            }
        }
        let frac = acc - acc.floor();
        out.push(to_rational64(frac)?);
    }
    Ok(Some(out))
}

fn to_rational64(r: Q128) -> Result<Rational64> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
        _ => Err(Error::Solve("solution denominator overflows i64".into())),
    }
}

fn min_entry(a: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i128, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, &v) in row.iter().enumerate().skip(t) {
            if v != 0 && best.is_none_or(|(b, _, _)| v.abs() < b) {
                best = Some((v.abs(), i, j));
                if v.abs() == 1 {
                    return Some((i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn min_in_cross(a: &[Vec<i128>], t: usize) -> (usize, usize) {
    let mut best = (a[t][t].abs(), t, t);
    for (i, row) in a.iter().enumerate().skip(t + 1) {
        if row[t] != 0 && row[t].abs() < best.0 {
            best = (row[t].abs(), i, t);
        }
    }
    for j in t + 1..a[t].len() {
        let v = a[t][j];
        if v != 0 && v.abs() < best.0 {
            best = (v.abs(), t, j);
        }
    }
    (best.1, best.2)
}

fn swap_cols(a: &mut [Vec<i128>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// `row_i -= f·row_t`.
fn row_axpy(a: &mut [Vec<i128>], i: usize, t: usize, f: i128) -> Result<()> {
    let (src, dst) = if i > t {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[t], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(t);
        (&hi[0], &mut lo[i])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if *s != 0 {
            *d = s
                .checked_mul(f)
                .and_then(|p| d.checked_sub(p))
                .ok_or_else(|| Error::Solve("integer overflow during elimination".into()))?;
        }
    }
    Ok(())
}

/// `col_j -= f·col_t`.
fn col_axpy(a: &mut [Vec<i128>], j: usize, t: usize, f: i128) -> Result<()> {
    for row in a.iter_mut() {
        if row[t] != 0 {
            row[j] = row[t]
                .checked_mul(f)
                .and_then(|p| row[j].checked_sub(p))
                .ok_or_else(|| Error::Solve("integer overflow during elimination".into()))?;
        }
    }
    Ok(())
}

/// Whether `Σ row·b ≡ rhs (mod 1)` holds for every row.
pub fn satisfies(rows: &[SparseRow], rhs: &[Rational64], b: &[Rational64]) -> bool {
    rows.iter().zip(rhs).all(|(row, r)| {
        let lhs: Rational64 = row.iter().map(|&(j, v)| b[j] * v).sum();
        (lhs - r).fract().is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn simple_systems() {
        // 2b ≡ 1/2 has b = 1/4.
        let rows = vec![vec![(0, 2)]];
        let sol = solve_mod_one(&rows, 1, &[r(1, 2)]).unwrap().unwrap();
        assert!(satisfies(&rows, &[r(1, 2)], &sol));
        // b0 + b1 ≡ 1/3, b0 - b1 ≡ 0.
        let rows = vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, -1)]];
        let rhs = [r(1, 3), r(0, 1)];
        let sol = solve_mod_one(&rows, 2, &rhs).unwrap().unwrap();
        assert!(satisfies(&rows, &rhs, &sol));
    }

    #[test]
    fn inconsistent_systems() {
        // b ≡ 1/3 and b ≡ 1/2.
        let rows = vec![vec![(0, 1)], vec![(0, 1)]];
        assert!(solve_mod_one(&rows, 1, &[r(1, 3), r(1, 2)]).unwrap().is_none());
        // 0·b ≡ 1/2.
        let rows = vec![vec![(0, 2), (0, -2)]];
        assert!(solve_mod_one(&rows, 1, &[r(1, 2)]).unwrap().is_none());
    }

    #[test]
    fn needs_remainder_pivoting() {
        let rows = vec![vec![(0, 4), (1, 6)], vec![(0, 6), (1, 9)], vec![(0, 2), (1, 3)]];
        let rhs = [r(0, 1), r(1, 2), r(1, 4)];
        if let Some(sol) = solve_mod_one(&rows, 2, &rhs).unwrap() {
            assert!(satisfies(&rows, &rhs, &sol));
        }
        let rhs = [r(1, 2), r(3, 4), r(1, 4)];
        let sol = solve_mod_one(&rows, 2, &rhs).unwrap().unwrap();
        assert!(satisfies(&rows, &rhs, &sol));
    }
}
