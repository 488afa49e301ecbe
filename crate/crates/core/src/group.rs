//! Finite groups given by multiplication tables.
//!
//! Element `0` is always the identity. These are the coefficient groups for
//! group bundles, transformation groupoids and cocycle inflation, and the
//! groups `G ⊇ N` of the quotient layer in [`crate::appendix`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a row-major multiplication table, checking the
    /// group axioms. Element `0` must be the identity.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::InvalidGroup(format!(
                "table of length {} does not fit order {order}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= order) {
            return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
        }
        for a in 0..order {
            if table[a] != a || table[a * order] != a {
                return Err(Error::InvalidGroup(format!("element 0 is not an identity for {a}")));
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for a in 0..order {
            match (0..order).find(|&b| table[a * order + b] == 0) {
                Some(b) if table[b * order + a] == 0 => inverse[a] = b,
                _ => return Err(Error::InvalidGroup(format!("{a} has no inverse"))),
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a * order + b];
                for c in 0..order {
                    let lhs = table[ab * order + c];
                    let rhs = table[a * order + table[b * order + c]];
                    if lhs != rhs {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(Self { order, table, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `ℤ/k` with elements `0..k` under addition.
    pub fn cyclic(k: usize) -> Self {
        assert!(k > 0, "cyclic group needs positive order");
        let table = (0..k * k).map(|i| (i / k + i % k) % k).collect();
        let inverse = (0..k).map(|a| (k - a) % k).collect();
        Self {
            order: k,
            table,
            inverse,
        }
    }

    /// Dihedral group of order `2m`: element `r^i s^j` is encoded as `i + m*j`.
    pub fn dihedral(m: usize) -> Self {
        assert!(m > 0);
        let order = 2 * m;
        let decode = |e: usize| (e % m, e / m);
        let mut table = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                let (i1, j1) = decode(a);
                let (i2, j2) = decode(b);
                // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
                let i = if j1 == 0 { (i1 + i2) % m } else { (i1 + m - i2) % m };
                table[a * order + b] = i + m * ((j1 + j2) % 2);
            }
        }
        Self::from_table(order, table).expect("dihedral table is a group")
    }

    /// Direct product; `(a, b)` is encoded as `a * other.order() + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let (n1, n2) = (self.order, other.order);
        let order = n1 * n2;
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let a = self.mul(x / n2, y / n2);
                let b = other.mul(x % n2, y % n2);
                table[x * order + y] = a * n2 + b;
            }
        }
        let inverse = (0..order).map(|x| self.inv(x / n2) * n2 + other.inv(x % n2)).collect();
        Self { order, table, inverse }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn conjugate(&self, g: usize, n: usize) -> usize {
        // g n g⁻¹
        self.mul(self.mul(g, n), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Smallest `e ≥ 1` with `g^e = 1` for all `g`.
    pub fn exponent(&self) -> usize {
        (0..self.order).map(|g| self.element_order(g)).fold(1, num_integer::lcm)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Subgroup generated by `gens`, as a sorted membership list.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut frontier = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if !member[b] {
                    member[b] = true;
                    frontier.push(b);
                }
            }
        }
        (0..self.order).filter(|&a| member[a]).collect()
    }

    /// The subgroup generated by all squares; always normal.
    pub fn square_subgroup(&self) -> Vec<usize> {
        let squares: Vec<usize> = (0..self.order).map(|g| self.mul(g, g)).collect();
        self.generated_subgroup(&squares)
    }

    pub fn is_normal_subgroup(&self, members: &[usize]) -> bool {
        let mut mask = vec![false; self.order];
        for &m in members {
            if m >= self.order {
                return false;
            }
            mask[m] = true;
        }
        if !mask[0] {
            return false;
        }
        members.iter().all(|&a| {
            mask[self.inv(a)]
                && members.iter().all(|&b| mask[self.mul(a, b)])
                && (0..self.order).all(|g| mask[self.conjugate(g, a)])
        })
    }
}

/// A homomorphism between finite groups, stored as the image of each element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub images: Vec<usize>,
}

impl GroupHom {
    pub fn new(domain: &FiniteGroup, codomain: &FiniteGroup, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.order() || images.iter().any(|&v| v >= codomain.order()) {
            return Err(Error::InvalidHomomorphism(
                "image table does not match the groups".into(),
            ));
        }
        for a in 0..domain.order() {
            for b in 0..domain.order() {
                if images[domain.mul(a, b)] != codomain.mul(images[a], images[b]) {
                    return Err(Error::InvalidHomomorphism(format!("not multiplicative at ({a}, {b})")));
                }
            }
        }
        Ok(Self { images })
    }

    /// The reduction `ℤ/k → ℤ/m` for `m | k`.
    pub fn cyclic_reduction(k: usize, m: usize) -> Result<Self> {
        if m == 0 || k % m != 0 {
            return Err(Error::InvalidHomomorphism(format!("{m} does not divide {k}")));
        }
        Ok(Self {
            images: (0..k).map(|a| a % m).collect(),
        })
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }
}

/// A left action of a finite group on `{0, .., points-1}`: `act[γ][x] = γ·x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    points: usize,
    act: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Validates the action table; the first failing pair is reported.
    pub fn new(group: &FiniteGroup, points: usize, act: Vec<Vec<usize>>) -> Result<Self> {
        if act.len() != group.order() || act.iter().any(|row| row.len() != points) {
            return Err(Error::InvalidAction {
                group_element: 0,
                point: 0,
                reason: "table shape does not match group order and point count".into(),
            });
        }
        for (gamma, row) in act.iter().enumerate() {
            if let Some(x) = row.iter().position(|&y| y >= points) {
                return Err(Error::InvalidAction {
                    group_element: gamma,
                    point: x,
                    reason: "image out of range".into(),
                });
            }
        }
        for x in 0..points {
            if act[0][x] != x {
                return Err(Error::InvalidAction {
                    group_element: 0,
                    point: x,
                    reason: "identity does not fix the point".into(),
                });
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                for x in 0..points {
                    if act[group.mul(a, b)][x] != act[a][act[b][x]] {
                        return Err(Error::InvalidAction {
                            group_element: a,
                            point: x,
                            reason: format!("(γδ)·x ≠ γ·(δ·x) with δ = {b}"),
                        });
                    }
                }
            }
        }
        Ok(Self { points, act })
    }

    /// `ℤ/k` acting on `ℤ/m` by translation through the reduction `ℤ/k → ℤ/m`.
    pub fn cyclic_translation(k: usize, m: usize) -> Result<Self> {
        let group = FiniteGroup::cyclic(k);
        let act = (0..k).map(|g| (0..m).map(|x| (x + g) % m).collect()).collect();
        Self::new(&group, m, act)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn apply(&self, gamma: usize, x: usize) -> usize {
        self.act[gamma][x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_dihedral_are_groups() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.mul(3, 2), 1);
        assert_eq!(z4.inv(1), 3);
        assert!(z4.is_abelian());
        let s3 = FiniteGroup::dihedral(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.exponent(), 6);
    }

    #[test]
    fn square_subgroups() {
        assert_eq!(FiniteGroup::cyclic(4).square_subgroup(), vec![0, 2]);
        assert_eq!(FiniteGroup::cyclic(2).square_subgroup(), vec![0]);
        let s3 = FiniteGroup::dihedral(3);
        let a3 = s3.square_subgroup();
        assert_eq!(a3, vec![0, 1, 2]);
        assert!(s3.is_normal_subgroup(&a3));
        assert!(!s3.is_normal_subgroup(&[0, 3]));
    }

    #[test]
    fn broken_tables_are_rejected() {
        let mut t = FiniteGroup::cyclic(3).table().to_vec();
        t[4] = 0;
        assert!(FiniteGroup::from_table(3, t).is_err());
    }

    #[test]
    fn invalid_action_reports_pair() {
        let z2 = FiniteGroup::cyclic(2);
        let err = GroupAction::new(&z2, 2, vec![vec![0, 1], vec![0, 0]]).unwrap_err();
        match err {
            Error::InvalidAction { group_element, .. } => assert_eq!(group_element, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn product_group_multiplies_componentwise() {
        let g = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(3));
        assert_eq!(g.order(), 6);
        // (1,2)·(1,2) = (0,1)
        assert_eq!(g.mul(5, 5), 1);
        assert_eq!(g.exponent(), 6);
    }
}
