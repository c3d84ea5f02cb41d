use super::{group_from_big_relations, Angle, Character, FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::HashMap;
use std::hash::Hash;

/// Largest subgroup we are willing to hold as an explicit element list.
pub const MAX_SUBGROUP_ORDER: u64 = 1_000_000;

/// Incremental closure of a set of commuting generators under a
/// multiplication, recording the relation lattice along the way.
///
/// Works for any representation of group elements: coordinate vectors,
/// reduced quadratic forms, and so on.
#[derive(Debug, Clone)]
pub struct Closure<E> {
    elements: Vec<E>,
    exponents: Vec<Vec<u64>>,
    index: HashMap<E, usize>,
    generators: Vec<E>,
    relations: Vec<Vec<BigInt>>,
    limit: u64,
}

impl<E: Clone + Eq + Hash> Closure<E> {
    pub fn new(identity: E, limit: u64) -> Self {
        let mut index = HashMap::new();
        index.insert(identity.clone(), 0);
        Closure {
            elements: vec![identity],
            exponents: vec![Vec::new()],
            index,
            generators: Vec::new(),
            relations: Vec::new(),
            limit,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    /// Independent generators actually used (redundant ones are skipped).
    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    pub fn position(&self, e: &E) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Exponent vector of an element over [`Closure::generators`].
    pub fn exponents(&self, e: &E) -> Option<&[u64]> {
        self.position(e).map(|i| self.exponents[i].as_slice())
    }

    /// Adjoins `g`. Returns `false` if `g` was already in the closure.
    pub fn add_generator(&mut self, g: E, mul: impl Fn(&E, &E) -> E) -> Result<bool> {
        if self.contains(&g) {
            return Ok(false);
        }
        let mut e = 1u64;
        let mut cur = g.clone();
        while !self.contains(&cur) {
            cur = mul(&cur, &g);
            e += 1;
            if e.saturating_mul(self.len() as u64) > self.limit {
                return Err(Error::Bound {
                    what: "subgroup order",
                    value: e.saturating_mul(self.len() as u64),
                    bound: self.limit,
                });
            }
        }
        let landing = self.exponents[self.index[&cur]].clone();
        let j = self.generators.len();
        for row in self.relations.iter_mut() {
            row.push(BigInt::zero());
        }
        let mut row: Vec<BigInt> = landing.iter().map(|&x| -BigInt::from(x)).collect();
        row.push(BigInt::from(e));
        self.relations.push(row);
        for ex in self.exponents.iter_mut() {
            ex.push(0);
        }
        self.generators.push(g.clone());

        let base = self.len();
        let mut power = g.clone();
        for i in 1..e {
            for k in 0..base {
                let x = mul(&self.elements[k], &power);
                let mut ex = self.exponents[k].clone();
                ex[j] = i;
                self.index.insert(x.clone(), self.elements.len());
                self.elements.push(x);
                self.exponents.push(ex);
            }
            power = mul(&power, &g);
        }
        Ok(true)
    }

    /// Invariant-factor structure and, for every element (in closure
    /// order), its coordinates in that structure.
    pub fn structure(&self) -> Result<(FiniteAbelianGroup, Vec<GroupElement>)> {
        if self.generators.is_empty() {
            let t = FiniteAbelianGroup::trivial();
            return Ok((t.clone(), vec![t.identity()]));
        }
        let (group, images) = group_from_big_relations(self.generators.len(), &self.relations)?;
        if group.order() != self.len() as u64 {
            return Err(Error::Internal(format!(
                "closure of size {} presented as a group of order {}",
                self.len(),
                group.order()
            )));
        }
        let coords = self
            .exponents
            .iter()
            .map(|ex| {
                let mut acc = group.identity();
                for (&k, img) in ex.iter().zip(&images) {
                    acc = group.op_unchecked(&acc, &group.pow(img, k as i64).expect("image lies in group"));
                }
                acc
            })
            .collect();
        Ok((group, coords))
    }
}

/// An explicit subgroup of a [`FiniteAbelianGroup`], together with its own
/// invariant-factor presentation.
#[derive(Debug, Clone)]
pub struct Subgroup {
    ambient: FiniteAbelianGroup,
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
    structure: FiniteAbelianGroup,
    coords: Vec<GroupElement>,
    basis: Vec<GroupElement>,
}

impl Subgroup {
    /// Closure of `gens` in `ambient`.
    pub fn generated(ambient: &FiniteAbelianGroup, gens: &[GroupElement]) -> Result<Self> {
        for g in gens {
            if !ambient.contains(g) {
                return Err(Error::Mismatch(format!("generator {:?} not in {:?}", g.coords, ambient.invariants())));
            }
        }
        let mut closure = Closure::new(ambient.identity(), MAX_SUBGROUP_ORDER);
        for g in gens {
            closure.add_generator(g.clone(), |a, b| ambient.op_unchecked(a, b))?;
        }
        Self::from_closure(ambient, gens.to_vec(), &closure)
    }

    pub fn trivial(ambient: &FiniteAbelianGroup) -> Self {
        Self::generated(ambient, &[]).expect("trivial subgroup")
    }

    pub fn whole(ambient: &FiniteAbelianGroup) -> Result<Self> {
        let gens: Vec<GroupElement> = (0..ambient.rank())
            .map(|i| {
                let mut c = vec![0u64; ambient.rank()];
                c[i] = 1;
                GroupElement { coords: c }
            })
            .collect();
        Self::generated(ambient, &gens)
    }

    /// Subgroup from an element set already known to be closed.
    pub(crate) fn from_closed_set(ambient: &FiniteAbelianGroup, set: &[GroupElement]) -> Result<Self> {
        let mut closure = Closure::new(ambient.identity(), MAX_SUBGROUP_ORDER);
        for g in set {
            closure.add_generator(g.clone(), |a, b| ambient.op_unchecked(a, b))?;
        }
        if closure.len() != set.len() {
            return Err(Error::Internal("element set is not closed".into()));
        }
        let gens = closure.generators().to_vec();
        Self::from_closure(ambient, gens, &closure)
    }

    fn from_closure(
        ambient: &FiniteAbelianGroup,
        generators: Vec<GroupElement>,
        closure: &Closure<GroupElement>,
    ) -> Result<Self> {
        let (structure, coords) = closure.structure()?;
        let mut pairs: Vec<(GroupElement, GroupElement)> =
            closure.elements().iter().cloned().zip(coords).collect();
        pairs.sort();
        let (elements, coords): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let basis = (0..structure.rank())
            .map(|i| {
                let pos = coords
                    .iter()
                    .position(|c| c.coords.iter().enumerate().all(|(k, &x)| x == u64::from(k == i)))
                    .expect("structure generator present");
                elements[pos].clone()
            })
            .collect();
        Ok(Subgroup { ambient: ambient.clone(), generators, elements, structure, coords, basis })
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Elements in sorted order.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// `[G:H]`.
    pub fn index(&self) -> u64 {
        self.ambient.order() / self.order()
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.position(g).is_some()
    }

    /// The subgroup as an abstract group in its own right.
    pub fn structure(&self) -> &FiniteAbelianGroup {
        &self.structure
    }

    pub fn coords_of(&self, g: &GroupElement) -> Option<&GroupElement> {
        self.position(g).map(|i| &self.coords[i])
    }

    /// Elements of `H` mapping to the unit vectors of [`Subgroup::structure`].
    pub fn basis(&self) -> &[GroupElement] {
        &self.basis
    }

    /// All `|H|` characters of `H`, as characters of [`Subgroup::structure`].
    pub fn characters(&self) -> Vec<Character> {
        self.structure.characters().collect()
    }

    /// Value of a character of `H` on an element of `H`.
    pub fn eval(&self, chi: &Character, g: &GroupElement) -> Option<Angle> {
        self.coords_of(g).map(|c| self.structure.eval(chi, c))
    }

    /// Restriction of an ambient character to `H`.
    pub fn restrict(&self, chi: &Character) -> Character {
        let coords = self
            .basis
            .iter()
            .zip(self.structure.invariants())
            .map(|(b, &s)| {
                let a = self.ambient.eval(chi, b);
                a.num() * s / a.den()
            })
            .collect();
        Character { coords }
    }

    /// Lexicographically smallest ambient character restricting to `chi`.
    pub fn extend_character(&self, chi: &Character) -> Character {
        let targets: Vec<Angle> = (0..self.structure.rank())
            .map(|i| {
                let s = self.structure.invariants()[i];
                Angle::new(chi.coords[i] % s, s)
            })
            .collect();
        self.ambient
            .characters()
            .find(|psi| self.basis.iter().zip(&targets).all(|(b, t)| self.ambient.eval(psi, b) == *t))
            .expect("every character of a subgroup extends")
    }

    /// Whether an ambient character is trivial on `H`.
    pub fn annihilates(&self, chi: &Character) -> bool {
        self.basis.iter().all(|b| self.ambient.eval(chi, b).is_zero())
    }
}

/// `sum_{theta in (G/H)^} theta(g)`, which equals `[G:H]` on `H` and 0 off it.
pub fn filter_sum_check(group: &FiniteAbelianGroup, sub: &Subgroup, g: &GroupElement) -> Result<i64> {
    if sub.ambient() != group {
        return Err(Error::Mismatch("subgroup lives in a different group".into()));
    }
    if !group.contains(g) {
        return Err(Error::Mismatch(format!("{:?} is not an element of the group", g.coords)));
    }
    let total: Complex64 = group
        .characters()
        .filter(|theta| sub.annihilates(theta))
        .map(|theta| group.eval(&theta, g).to_complex())
        .sum();
    let rounded = total.re.round();
    if total.im.abs() > 1e-6 || (total.re - rounded).abs() > 1e-6 {
        return Err(Error::Internal(format!("filter sum {total} is not an integer")));
    }
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn el(c: &[u64]) -> GroupElement {
        GroupElement { coords: c.to_vec() }
    }

    /// Brute-force closure: keep multiplying until nothing new appears.
    fn brute_closure(g: &FiniteAbelianGroup, gens: &[GroupElement]) -> BTreeSet<GroupElement> {
        let mut set = BTreeSet::from([g.identity()]);
        loop {
            let mut next = set.clone();
            for x in &set {
                for s in gens {
                    next.insert(g.op(x, s).unwrap());
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn generated_examples() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        let h = Subgroup::generated(&z6, &[el(&[2])]).unwrap();
        assert_eq!(h.elements(), &[el(&[0]), el(&[2]), el(&[4])]);
        assert_eq!(h.index(), 2);
        let t = Subgroup::generated(&z6, &[]).unwrap();
        assert_eq!(t.elements(), &[el(&[0])]);

        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let h = Subgroup::generated(&g, &[el(&[1, 2])]).unwrap();
        let brute = brute_closure(&g, &[el(&[1, 2])]);
        assert_eq!(h.order(), 2);
        assert_eq!(h.elements().iter().cloned().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn order_four_element_generates_order_four() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert_eq!(g.element_order(&el(&[1, 1])), 4);
        let h = Subgroup::generated(&g, &[el(&[1, 1])]).unwrap();
        assert_eq!(h.order(), 4);
        assert_eq!(h.elements().iter().cloned().collect::<BTreeSet<_>>(), brute_closure(&g, &[el(&[1, 1])]));
    }

    #[test]
    fn characters_of_trivial_and_cyclic() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        let t = Subgroup::trivial(&z6);
        assert_eq!(t.characters().len(), 1);
        let z3 = FiniteAbelianGroup::new(vec![3]).unwrap();
        let h = Subgroup::whole(&z3).unwrap();
        let chars = h.characters();
        assert_eq!(chars.len(), 3);
        for chi in &chars {
            for x in h.elements() {
                assert!(3 % h.eval(chi, x).unwrap().den() == 0);
            }
        }
    }

    #[test]
    fn extension_from_index_two_subgroup() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        let h = Subgroup::generated(&z6, &[el(&[2])]).unwrap();
        let two = el(&[2]);
        let nontrivial = h
            .characters()
            .into_iter()
            .find(|chi| h.eval(chi, &two).unwrap() == Angle::new(1, 3))
            .unwrap();
        // Oracle: all characters of Z/6 whose value at 2 is 1/3 of a turn.
        let matching: Vec<Character> =
            z6.characters().filter(|psi| z6.eval(psi, &two) == Angle::new(1, 3)).collect();
        assert_eq!(matching.len(), 2);
        let ext = h.extend_character(&nontrivial);
        assert_eq!(ext, matching[0]);
        for x in h.elements() {
            assert_eq!(z6.eval(&ext, x), h.eval(&nontrivial, x).unwrap());
        }
        assert_eq!(h.restrict(&ext), nontrivial);
    }

    #[test]
    fn filter_sum_examples() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        let h = Subgroup::generated(&z6, &[el(&[2])]).unwrap();
        assert_eq!(filter_sum_check(&z6, &h, &el(&[0])).unwrap(), 2);
        assert_eq!(filter_sum_check(&z6, &h, &el(&[3])).unwrap(), 0);
        assert_eq!(filter_sum_check(&z6, &h, &el(&[4])).unwrap(), 2);
    }

    #[test]
    fn closure_over_generic_elements() {
        // Multiplicative group mod 13 via a closure over u64 residues.
        let mut c = Closure::new(1u64, 1000);
        c.add_generator(4, |a, b| a * b % 13).unwrap();
        c.add_generator(2, |a, b| a * b % 13).unwrap();
        assert_eq!(c.len(), 12);
        let (g, _) = c.structure().unwrap();
        assert_eq!(g.invariants(), &[12]);
        assert!(!c.add_generator(5, |a, b| a * b % 13).unwrap());
    }

    #[test]
    fn closure_limit_enforced() {
        let mut c = Closure::new(0u64, 10);
        assert!(c.add_generator(1, |a, b| (a + b) % 97).is_err());
    }
}
