//! Finite abelian groups in invariant-factor form, with exact characters,
//! explicit subgroups and homomorphisms.

mod format;
mod hom;
mod snf;
mod subgroup;

pub use format::{parse_group_file, GroupFile};
pub use hom::Homomorphism;
pub use snf::{smith_normal_form, SmithForm};
pub use subgroup::{filter_sum_check, Closure, Subgroup, MAX_SUBGROUP_ORDER};

use crate::arith::gcd;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64 as Complex;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `Z/d_1 x ... x Z/d_k` with `d_i | d_{i+1}` and every `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariants: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

/// A character, identified with an element of the dual group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character {
    pub coords: Vec<u64>,
}

/// A point of the unit circle at a rational fraction `num/den` of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num as i128, den as i128) as u64;
        Angle { num: num / g, den: den / g }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `exp(2 pi i * num/den)`.
    pub fn to_complex(self) -> Complex {
        let theta = std::f64::consts::TAU * self.num as f64 / self.den as f64;
        Complex::new(theta.cos(), theta.sin())
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        let den = self.den / gcd(self.den as i128, rhs.den as i128) as u64 * rhs.den;
        Angle::new(self.num * (den / self.den) + rhs.num * (den / rhs.den), den)
    }
}

impl FiniteAbelianGroup {
    /// Builds a group from invariant factors. Leading 1s are dropped.
    pub fn new(invariants: Vec<u64>) -> Result<Self> {
        if invariants.iter().any(|&d| d == 0) {
            return Err(Error::Input("invariant factors must be positive".into()));
        }
        let invariants: Vec<u64> = invariants.into_iter().skip_while(|&d| d == 1).collect();
        for w in invariants.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Input(format!(
                    "invariant factors must form a divisibility chain, {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(FiniteAbelianGroup { invariants })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariants: Vec::new() }
    }

    /// Direct product `Z/n_1 x ... x Z/n_r` for arbitrary positive `n_i`,
    /// converted to invariant-factor form.
    pub fn from_cyclic_factors(orders: &[u64]) -> Result<(Self, Vec<GroupElement>)> {
        let relations: Vec<Vec<i64>> = orders
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut row = vec![0i64; orders.len()];
                row[i] = n as i64;
                row
            })
            .collect();
        group_from_relations(orders.len(), &relations)
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Exponent of the group (the last invariant, or 1).
    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.rank()] }
    }

    /// Element with coordinates reduced modulo the invariants.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::Mismatch(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.invariants)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.rank() && g.coords.iter().zip(&self.invariants).all(|(c, d)| c < d)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("{:?} is not an element of {:?}", g.coords, self.invariants)))
        }
    }

    pub fn op(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.op_unchecked(g, h))
    }

    pub(crate) fn op_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&h.coords)
                .zip(&self.invariants)
                .map(|((a, b), d)| (a + b) % d)
                .collect(),
        }
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement {
            coords: g.coords.iter().zip(&self.invariants).map(|(a, d)| (d - a) % d).collect(),
        })
    }

    pub fn pow(&self, g: &GroupElement, e: i64) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&self.invariants)
                .map(|(&a, &d)| ((a as i128 * e as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        })
    }

    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.coords.iter().zip(&self.invariants).fold(1u64, |acc, (&c, &d)| {
            let o = d / gcd(c as i128, d as i128) as u64;
            acc / gcd(acc as i128, o as i128) as u64 * o
        })
    }

    /// Mixed-radix index of an element; the last coordinate varies fastest.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.coords
            .iter()
            .zip(&self.invariants)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for (slot, &d) in coords.iter_mut().zip(&self.invariants).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement { coords }
    }

    /// All elements in lexicographic order of coordinates.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// All characters in lexicographic order of their coordinate vectors.
    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements().map(|g| Character { coords: g.coords })
    }

    pub fn trivial_character(&self) -> Character {
        Character { coords: vec![0; self.rank()] }
    }

    /// `chi(g)` as an exact angle.
    pub fn eval(&self, chi: &Character, g: &GroupElement) -> Angle {
        let e = self.exponent();
        let num = chi
            .coords
            .iter()
            .zip(&g.coords)
            .zip(&self.invariants)
            .fold(0u128, |acc, ((&c, &x), &d)| {
                (acc + c as u128 * x as u128 % d as u128 * (e / d) as u128) % e as u128
            });
        Angle::new(num as u64, e)
    }
}

/// Presents `Z^n / <relations>` in invariant-factor form.
///
/// Returns the group together with the image of each original generator.
pub fn group_from_relations(
    num_generators: usize,
    relations: &[Vec<i64>],
) -> Result<(FiniteAbelianGroup, Vec<GroupElement>)> {
    if let Some(bad) = relations.iter().find(|r| r.len() != num_generators) {
        return Err(Error::Input(format!(
            "relation has {} columns, expected {}",
            bad.len(),
            num_generators
        )));
    }
    let rows: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    group_from_big_relations(num_generators, &rows)
}

pub(crate) fn group_from_big_relations(
    num_generators: usize,
    rows: &[Vec<BigInt>],
) -> Result<(FiniteAbelianGroup, Vec<GroupElement>)> {
    let snf = smith_normal_form(rows, num_generators);
    let rank = snf.diagonal.iter().filter(|d| !d.is_zero()).count();
    if rank < num_generators {
        return Err(Error::InfiniteQuotient { rank, gens: num_generators });
    }
    let keep: Vec<(usize, u64)> = snf
        .diagonal
        .iter()
        .enumerate()
        .filter_map(|(j, d)| {
            let d = d.abs().to_u64().expect("invariant factor fits in u64");
            (d > 1).then_some((j, d))
        })
        .collect();
    let group = FiniteAbelianGroup { invariants: keep.iter().map(|&(_, d)| d).collect() };
    let images = snf
        .col_transform
        .iter()
        .map(|row| GroupElement {
            coords: keep
                .iter()
                .map(|&(j, d)| {
                    let r = &row[j] % BigInt::from(d);
                    let r = if r.is_negative() { r + BigInt::from(d) } else { r };
                    r.to_u64().unwrap()
                })
                .collect(),
        })
        .collect();
    Ok((group, images))
}

/// `sum_g chi(g) conj(psi(g))` over the whole group.
pub fn character_inner_product(group: &FiniteAbelianGroup, chi: &Character, psi: &Character) -> Complex {
    group
        .elements()
        .map(|g| group.eval(chi, &g).to_complex() * group.eval(psi, &g).to_complex().conj())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn el(c: &[u64]) -> GroupElement {
        GroupElement { coords: c.to_vec() }
    }

    #[test]
    fn relations_cyclic_three() {
        let (g, _) = group_from_relations(1, &[vec![3]]).unwrap();
        assert_eq!(g.invariants(), &[3]);
    }

    #[test]
    fn relations_diagonal() {
        let (g, _) = group_from_relations(2, &[vec![2, 0], vec![0, 4]]).unwrap();
        assert_eq!(g.invariants(), &[2, 4]);
    }

    /// Brute-force oracle: enumerate Z^2 / L by reducing a box of lattice
    /// points modulo the relation lattice.
    fn brute_quotient_order_and_gen_order(rel: [[i64; 2]; 2], gen: [i64; 2]) -> (usize, usize) {
        // L = row span; det = |ad - bc|. Canonical representative via
        // Hermite reduction done by brute force: two vectors are equal in
        // the quotient iff their difference lies in L.
        let det = (rel[0][0] * rel[1][1] - rel[0][1] * rel[1][0]).abs();
        let in_lattice = |v: [i64; 2]| {
            // Solve v = x*r0 + y*r1 over Q, check integrality.
            let x_num = v[0] * rel[1][1] - v[1] * rel[1][0];
            let y_num = rel[0][0] * v[1] - rel[0][1] * v[0];
            let d = rel[0][0] * rel[1][1] - rel[0][1] * rel[1][0];
            x_num % d == 0 && y_num % d == 0
        };
        let mut reps: Vec<[i64; 2]> = Vec::new();
        for a in 0..det {
            for b in 0..det {
                if !reps.iter().any(|r| in_lattice([a - r[0], b - r[1]])) {
                    reps.push([a, b]);
                }
            }
        }
        let mut k = 1;
        while !in_lattice([gen[0] * k, gen[1] * k]) {
            k += 1;
        }
        (reps.len(), k as usize)
    }

    #[test]
    fn relations_non_diagonal_cyclic_six() {
        // Rows are relations: 2*g1 + g2 = 0 and 3*g2 = 0.
        let (order, g1_order) = brute_quotient_order_and_gen_order([[2, 1], [0, 3]], [1, 0]);
        let (_, g2_order) = brute_quotient_order_and_gen_order([[2, 1], [0, 3]], [0, 1]);
        assert_eq!((order, g1_order, g2_order), (6, 6, 3));
        let (g, images) = group_from_relations(2, &[vec![2, 1], vec![0, 3]]).unwrap();
        assert_eq!(g.invariants(), &[6]);
        assert_eq!(g.element_order(&images[0]), 6);
        assert_eq!(g.element_order(&images[1]), 3);
    }

    #[test]
    fn infinite_quotient_rejected() {
        let err = group_from_relations(2, &[vec![2, 4]]).unwrap_err();
        assert!(matches!(err, Error::InfiniteQuotient { .. }));
    }

    #[test]
    fn group_law_examples() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        assert_eq!(z6.op(&el(&[4]), &el(&[5])).unwrap(), el(&[3]));
        assert_eq!(z6.inv(&z6.identity()).unwrap(), z6.identity());
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert_eq!(g.op(&el(&[1, 3]), &el(&[1, 2])).unwrap(), el(&[0, 1]));
        assert_eq!(g.pow(&el(&[1, 3]), -1).unwrap(), g.inv(&el(&[1, 3])).unwrap());
    }

    #[test]
    fn mismatched_ambient_rejected() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        assert!(matches!(z6.op(&el(&[1, 0]), &el(&[1])), Err(Error::Mismatch(_))));
        assert!(z6.op(&el(&[6]), &el(&[1])).is_err());
    }

    #[test]
    fn bad_invariants_rejected() {
        assert!(FiniteAbelianGroup::new(vec![4, 6]).is_err());
        assert!(FiniteAbelianGroup::new(vec![0]).is_err());
        assert_eq!(FiniteAbelianGroup::new(vec![1, 1, 3]).unwrap().invariants(), &[3]);
        let t = FiniteAbelianGroup::new(vec![]).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(t.elements().count(), 1);
    }

    #[test]
    fn cyclic_factors_normalize() {
        let (g, gens) = FiniteAbelianGroup::from_cyclic_factors(&[4, 6]).unwrap();
        assert_eq!(g.invariants(), &[2, 12]);
        assert_eq!(g.element_order(&gens[0]), 4);
        assert_eq!(g.element_order(&gens[1]), 6);
    }

    #[test]
    fn index_roundtrip_and_characters_distinct() {
        let g = FiniteAbelianGroup::new(vec![2, 6]).unwrap();
        for (i, e) in g.elements().enumerate() {
            assert_eq!(g.index_of(&e), i);
        }
        let tables: BTreeSet<Vec<(u64, u64)>> = g
            .characters()
            .map(|chi| g.elements().map(|e| {
                let a = g.eval(&chi, &e);
                (a.num(), a.den())
            }).collect())
            .collect();
        assert_eq!(tables.len(), 12);
    }

    #[test]
    fn orthogonality_small_groups() {
        for inv in [vec![], vec![5], vec![2, 4], vec![3, 9], vec![2, 2, 6]] {
            let g = FiniteAbelianGroup::new(inv).unwrap();
            let n = g.order() as f64;
            for chi in g.characters() {
                for psi in g.characters() {
                    let ip = character_inner_product(&g, &chi, &psi);
                    let expect = if chi == psi { n } else { 0.0 };
                    assert!((ip.re - expect).abs() < 1e-9 && ip.im.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn angle_addition_is_exact() {
        assert_eq!(Angle::new(1, 3) + Angle::new(2, 3), Angle::ZERO);
        assert_eq!(Angle::new(1, 4) + Angle::new(1, 6), Angle::new(5, 12));
        assert_eq!(Angle::new(2, 4), Angle::new(1, 2));
    }
}
