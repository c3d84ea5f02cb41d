use super::{compose, reduction_cycle, Discriminant, FormClass, QuadForm};
use crate::abelian::{Closure, FiniteAbelianGroup, GroupElement, MAX_SUBGROUP_ORDER};
use crate::arith::{gcd, isqrt};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

/// Default bound on `|D|` for class-group construction.
pub const DEFAULT_DISC_BOUND: u64 = 10_000_000;

/// `Cl(O)` (or `Cl+(O)` for positive discriminants) with an explicit
/// isomorphism to an invariant-factor group.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: Discriminant,
    group: FiniteAbelianGroup,
    classes: Vec<FormClass>,
    coords: Vec<GroupElement>,
    by_class: HashMap<FormClass, usize>,
    by_coords: HashMap<GroupElement, usize>,
}

#[derive(Debug, Serialize)]
struct ClassGroupJson<'a> {
    discriminant: i64,
    fundamental_discriminant: i64,
    conductor: u64,
    narrow: bool,
    order: u64,
    invariants: &'a [u64],
    forms: Vec<FormJson>,
}

#[derive(Debug, Serialize)]
struct FormJson {
    form: [i64; 3],
    coords: Vec<u64>,
}

impl ClassGroup {
    fn build(disc: Discriminant, mut classes: Vec<FormClass>) -> Result<Self> {
        classes.sort();
        classes.dedup();
        let identity = FormClass::principal(disc.value());
        let mut closure = Closure::new(identity, MAX_SUBGROUP_ORDER);
        for c in &classes {
            if closure.len() == classes.len() {
                break;
            }
            closure.add_generator(*c, |x, y| compose(x, y).expect("same discriminant"))?;
        }
        if closure.len() != classes.len() {
            return Err(Error::Internal(format!(
                "closure of {} classes has {} elements",
                classes.len(),
                closure.len()
            )));
        }
        let (group, elem_coords) = closure.structure()?;
        let mut coords = vec![group.identity(); classes.len()];
        let mut by_class = HashMap::with_capacity(classes.len());
        for (i, c) in classes.iter().enumerate() {
            by_class.insert(*c, i);
        }
        for (c, g) in closure.elements().iter().zip(elem_coords) {
            let i = *by_class
                .get(c)
                .ok_or_else(|| Error::Internal(format!("composition produced unlisted class {c}")))?;
            coords[i] = g;
        }
        let by_coords = coords.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ok(ClassGroup { disc, group, classes, coords, by_class, by_coords })
    }

    pub fn discriminant(&self) -> Discriminant {
        self.disc
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.classes.len() as u64
    }

    /// Classes sorted by `(a, b, c)` of their representatives.
    pub fn classes(&self) -> &[FormClass] {
        &self.classes
    }

    pub fn element_of(&self, c: &FormClass) -> Option<&GroupElement> {
        self.by_class.get(c).map(|&i| &self.coords[i])
    }

    pub fn class_of(&self, g: &GroupElement) -> Option<FormClass> {
        self.by_coords.get(g).map(|&i| self.classes[i])
    }

    /// Element of the abstract group for an arbitrary form of this discriminant.
    pub fn element_of_form(&self, f: QuadForm) -> Result<GroupElement> {
        if f.discriminant() != self.disc.value() as i128 {
            return Err(Error::Mismatch(format!("form {f} has discriminant {}", f.discriminant())));
        }
        let c = FormClass::of(f)?;
        self.element_of(&c)
            .cloned()
            .ok_or_else(|| Error::Input(format!("form {f} is not primitive")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let forms = self
            .classes
            .iter()
            .zip(&self.coords)
            .map(|(c, g)| {
                let f = c.form();
                FormJson { form: [f.a, f.b, f.c], coords: g.coords.clone() }
            })
            .collect();
        serde_json::to_value(ClassGroupJson {
            discriminant: self.disc.value(),
            fundamental_discriminant: self.disc.fundamental(),
            conductor: self.disc.conductor(),
            narrow: !self.disc.is_definite(),
            order: self.order(),
            invariants: self.group.invariants(),
            forms,
        })
        .expect("serializable")
    }
}

fn check_bound(disc: &Discriminant, bound: u64) -> Result<()> {
    if disc.value().unsigned_abs() > bound {
        return Err(Error::Bound { what: "|D|", value: disc.value().unsigned_abs(), bound });
    }
    Ok(())
}

/// Reduced primitive positive definite forms of discriminant `d < 0`.
pub(crate) fn reduced_definite_forms(d: i64) -> Vec<QuadForm> {
    let n = d.unsigned_abs() as u128;
    let amax = isqrt(n / 3) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let Some(f) = QuadForm::from_ab(a, b, d) else { continue };
            if f.c < a || (f.c == a && b < 0) {
                continue;
            }
            if f.is_primitive() {
                out.push(f);
            }
        }
    }
    out
}

/// Reduced primitive indefinite forms of discriminant `d > 0`.
pub(crate) fn reduced_indefinite_forms(d: i64) -> Vec<QuadForm> {
    let s = isqrt(d as u128) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b as i128 * b as i128 - d as i128) / 4;
        let m = ac.unsigned_abs() as i64;
        for a in 1..=m {
            if m % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let f = QuadForm::new(sa, b, (ac / sa as i128) as i64);
                if f.is_reduced_indefinite() && gcd(gcd(f.a as i128, f.b as i128), f.c as i128) == 1 {
                    out.push(f);
                }
            }
        }
    }
    out
}

pub fn class_group(disc: Discriminant) -> Result<ClassGroup> {
    class_group_with_bound(disc, DEFAULT_DISC_BOUND)
}

/// `Cl(O)` for `D < 0`; for `D > 0` this is the narrow class group.
pub fn class_group_with_bound(disc: Discriminant, bound: u64) -> Result<ClassGroup> {
    if !disc.is_definite() {
        return narrow_class_group_with_bound(disc, bound);
    }
    check_bound(&disc, bound)?;
    let classes = reduced_definite_forms(disc.value()).into_iter().map(|f| FormClass::of(f)).collect::<Result<Vec<_>>>()?;
    ClassGroup::build(disc, classes)
}

pub fn narrow_class_group(disc: Discriminant) -> Result<ClassGroup> {
    narrow_class_group_with_bound(disc, DEFAULT_DISC_BOUND)
}

fn narrow_class_group_with_bound(disc: Discriminant, bound: u64) -> Result<ClassGroup> {
    if disc.is_definite() {
        return Err(Error::Precondition("narrow class group needs D > 0".into()));
    }
    check_bound(&disc, bound)?;
    let mut remaining: BTreeSet<QuadForm> = reduced_indefinite_forms(disc.value()).into_iter().collect();
    let mut classes = Vec::new();
    while let Some(&f) = remaining.iter().next() {
        let cycle = reduction_cycle(f);
        for g in &cycle {
            remaining.remove(g);
        }
        classes.push(FormClass::of(f)?);
    }
    ClassGroup::build(disc, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(d: i64) -> ClassGroup {
        class_group(Discriminant::new(d).unwrap()).unwrap()
    }

    fn forms(g: &ClassGroup) -> Vec<(i64, i64, i64)> {
        g.classes().iter().map(|c| (c.form().a, c.form().b, c.form().c)).collect()
    }

    #[test]
    fn small_imaginary_groups() {
        assert_eq!(cl(-4).order(), 1);
        let g = cl(-23);
        assert_eq!(g.group().invariants(), &[3]);
        assert_eq!(forms(&g), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        let g = cl(-20);
        assert_eq!(g.group().invariants(), &[2]);
        assert_eq!(forms(&g), vec![(1, 0, 5), (2, 2, 3)]);
        assert_eq!(cl(-47).order(), 5);
        assert_eq!(cl(-115).order(), 2);
        assert_eq!(cl(-123).order(), 2);
        // Non-maximal order: D = -36 = 3^2 * -4 has h = 2.
        assert_eq!(cl(-36).order(), 2);
        // Non-cyclic: Cl(-84) = (Z/2)^2.
        assert_eq!(cl(-84).group().invariants(), &[2, 2]);
    }

    #[test]
    fn narrow_examples() {
        for (d, h) in [(8, 1), (12, 2), (5, 1), (13, 1), (24, 2), (60, 4), (136, 4), (21, 2)] {
            let g = narrow_class_group(Discriminant::new(d).unwrap()).unwrap();
            assert_eq!(g.order(), h, "D = {d}");
        }
        assert!(narrow_class_group(Discriminant::new(-23).unwrap()).is_err());
    }

    #[test]
    fn dictionary_is_an_isomorphism() {
        for d in [-23, -84, -260, -399, -4 * 161, 60, 145] {
            let g = cl(d);
            for x in g.classes() {
                for y in g.classes() {
                    let lhs = g.element_of(&compose(x, y).unwrap()).unwrap().clone();
                    let rhs = g.group().op(g.element_of(x).unwrap(), g.element_of(y).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "D = {d}");
                }
            }
        }
    }

    #[test]
    fn bound_enforced() {
        let d = Discriminant::new(-10_000_003 * 4 + 1).unwrap();
        assert!(matches!(class_group(d), Err(Error::Bound { .. })));
        assert!(class_group_with_bound(Discriminant::new(-1003).unwrap(), 100).is_err());
    }

    #[test]
    fn json_export_is_sorted() {
        let v = cl(-23).to_json();
        assert_eq!(v["invariants"], serde_json::json!([3]));
        assert_eq!(v["forms"][0]["form"], serde_json::json!([1, 1, 6]));
        assert_eq!(v["forms"][1]["form"], serde_json::json!([2, -1, 3]));
    }
}
