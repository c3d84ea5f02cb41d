//! Binary quadratic forms as a model of ideal classes in quadratic orders.
//!
//! Negative discriminants use positive definite forms and Gauss reduction.
//! Positive discriminants use indefinite forms under proper equivalence,
//! which realizes the narrow class group; a class is named by the
//! lexicographically least form on its reduction cycle.

mod classgroup;
mod prime;

pub use classgroup::{class_group, class_group_with_bound, narrow_class_group, ClassGroup, DEFAULT_DISC_BOUND};
pub use prime::{generating_multiset, prime_form, Generator, PrimeForms, Splitting};

use crate::arith::{ext_gcd, factorize, gcd, is_square, isqrt};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonsquare discriminant `D = f^2 d_K` with `d_K` fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discriminant {
    value: i64,
    fundamental: i64,
    conductor: u64,
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value == 0 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(Error::Input(format!("{value} is not a discriminant (must be 0 or 1 mod 4)")));
        }
        if is_square(value as i128) {
            return Err(Error::Input(format!("{value} is a perfect square (degenerate forms)")));
        }
        // value = sign * m^2 * squarefree
        let mut m = 1u64;
        let mut core = value.signum();
        for (p, e) in factorize(value.unsigned_abs()) {
            m *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= p as i64;
            }
        }
        let (fundamental, conductor) = if core.rem_euclid(4) == 1 {
            (core, m)
        } else {
            (4 * core, m / 2)
        };
        debug_assert_eq!(fundamental * (conductor * conductor) as i64, value);
        Ok(Discriminant { value, fundamental, conductor })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn fundamental(&self) -> i64 {
        self.fundamental
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor == 1
    }

    pub fn is_definite(&self) -> bool {
        self.value < 0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    /// The form `(a, b, (b^2 - D) / 4a)`, if that is integral.
    pub fn from_ab(a: i64, b: i64, disc: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - disc as i128;
        let den = 4 * a as i128;
        (a != 0 && num % den == 0).then(|| QuadForm::new(a, b, (num / den) as i64))
    }

    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    /// `(a, -b, c)`, the inverse class under composition.
    pub fn conjugate(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c)
    }

    /// Reduced for the definite case: `|b| <= a <= c`, `b >= 0` on the boundary.
    pub fn is_reduced_definite(&self) -> bool {
        self.a > 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && !((self.b.abs() == self.a || self.a == self.c) && self.b < 0)
    }

    /// Reduced for the indefinite case: `0 < b < sqrt(D)` and
    /// `sqrt(D) - b < 2|a| < sqrt(D) + b`.
    pub fn is_reduced_indefinite(&self) -> bool {
        let d = self.discriminant();
        let b = self.b as i128;
        let two_a = 2 * (self.a as i128).abs();
        b > 0 && b * b < d && (two_a + b) * (two_a + b) > d && (two_a - b < 0 || (two_a - b) * (two_a - b) < d)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// An ideal class, held as its canonical representative form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormClass(QuadForm);

impl FormClass {
    pub fn of(form: QuadForm) -> Result<Self> {
        Ok(FormClass(reduce(form)?))
    }

    pub fn form(&self) -> QuadForm {
        self.0
    }

    pub fn discriminant(&self) -> i64 {
        self.0.discriminant() as i64
    }

    /// The principal class.
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        FormClass::of(QuadForm::from_ab(1, b, disc).expect("principal form")).expect("valid discriminant")
    }

    pub fn inverse(&self) -> Self {
        FormClass::of(self.0.conjugate()).expect("conjugate of a valid form")
    }

    pub fn is_principal(&self) -> bool {
        *self == FormClass::principal(self.discriminant())
    }
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_form(f: &QuadForm) -> Result<i128> {
    let d = f.discriminant();
    if d == 0 || is_square(d) {
        return Err(Error::Input(format!("form {f} has square discriminant {d}")));
    }
    if d < 0 && f.a <= 0 {
        return Err(Error::Input(format!("form {f} is not positive definite")));
    }
    Ok(d)
}

/// Canonical representative of the proper equivalence class of `f`.
pub fn reduce(f: QuadForm) -> Result<QuadForm> {
    let d = check_form(&f)?;
    let out = if d < 0 { reduce_definite(f) } else { cycle_minimum(reduce_indefinite(f)) };
    if out.discriminant() != d {
        return Err(Error::Internal(format!("reduction of {f} changed the discriminant")));
    }
    Ok(out)
}

fn reduce_definite(f: QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        // Normalize: -a < b <= a.
        if !(-a < b && b <= a) {
            let r = (a - b).div_euclid(2 * a);
            c += r * (b + r * a);
            b += 2 * r * a;
        }
        if a > c || (a == c && b < 0) {
            (a, b, c) = (c, -b, a);
            continue;
        }
        break;
    }
    QuadForm::new(a as i64, b as i64, c as i64)
}

/// One step of the indefinite reduction operator, `(a,b,c) -> (c, r, *)`
/// with `r = -b mod 2c` normalized as in Buchmann-Vollmer.
fn rho(f: QuadForm) -> QuadForm {
    let d = f.discriminant();
    let (b, c) = (f.b as i128, f.c as i128);
    let m = 2 * c.abs();
    let s = isqrt(d as u128) as i128;
    let r = if c.abs() as u128 > isqrt(d as u128) {
        // -|c| < r <= |c|
        let mut r = (-b).rem_euclid(m);
        if r > c.abs() {
            r -= m;
        }
        r
    } else {
        // sqrt(D) - 2|c| < r < sqrt(D): the largest r <= floor(sqrt D).
        s - (s + b).rem_euclid(m)
    };
    let num = r * r - d;
    QuadForm::new(c as i64, r as i64, (num / (4 * c)) as i64)
}

fn reduce_indefinite(mut f: QuadForm) -> QuadForm {
    let mut steps = 0usize;
    while !f.is_reduced_indefinite() {
        f = rho(f);
        steps += 1;
        assert!(steps < 1_000_000, "indefinite reduction failed to terminate");
    }
    f
}

/// The full reduction cycle of a reduced indefinite form.
pub fn reduction_cycle(f: QuadForm) -> Vec<QuadForm> {
    let start = reduce_indefinite(f);
    let mut cycle = vec![start];
    let mut cur = rho(start);
    while cur != start {
        cycle.push(cur);
        cur = rho(cur);
    }
    cycle
}

fn cycle_minimum(f: QuadForm) -> QuadForm {
    reduction_cycle(f).into_iter().min().expect("nonempty cycle")
}

/// Dirichlet composition of two classes of the same discriminant.
pub fn compose(x: &FormClass, y: &FormClass) -> Result<FormClass> {
    let (f, g) = (x.form(), y.form());
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::Mismatch(format!("discriminants {} and {} differ", d, g.discriminant())));
    }
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let half = (b1 + b2) / 2;
    let (g1, u1, v1) = ext_gcd(a1, a2);
    let (e, u2, w) = ext_gcd(g1, half);
    let (mu, nu, omega) = (u2 * u1, u2 * v1, w);
    let a3 = a1 * a2 / (e * e);
    let b3 = (mu * a1 * b2 + nu * a2 * b1 + omega * (b1 * b2 + d) / 2) / e;
    let b3 = b3.rem_euclid(2 * a3.abs());
    let num = b3 * b3 - d;
    if num % (4 * a3) != 0 {
        return Err(Error::Internal(format!("composition of {f} and {g} is not integral")));
    }
    let h = QuadForm::new(a3 as i64, b3 as i64, (num / (4 * a3)) as i64);
    FormClass::of(h)
}

/// `x^e` by square-and-multiply; negative exponents use the inverse.
pub fn pow(x: &FormClass, e: i64) -> Result<FormClass> {
    let mut base = if e < 0 { x.inverse() } else { *x };
    let mut n = e.unsigned_abs();
    let mut acc = FormClass::principal(x.discriminant());
    while n > 0 {
        if n & 1 == 1 {
            acc = compose(&acc, &base)?;
        }
        base = compose(&base, &base)?;
        n >>= 1;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    fn cls(a: i64, b: i64, c: i64) -> FormClass {
        FormClass::of(q(a, b, c)).unwrap()
    }

    /// Oracle: breadth-first search over SL2(Z) generators S and T^{+-1},
    /// collecting every equivalent form with bounded coefficients.
    fn equivalent_reduced_by_search(f: QuadForm) -> Vec<QuadForm> {
        use std::collections::{HashSet, VecDeque};
        let bound = 4 * (f.a.abs() + f.b.abs() + f.c.abs()) + 10;
        let mut seen = HashSet::from([f]);
        let mut queue = VecDeque::from([f]);
        while let Some(g) = queue.pop_front() {
            let next = [
                q(g.c, -g.b, g.a),
                q(g.a, g.b + 2 * g.a, g.a + g.b + g.c),
                q(g.a, g.b - 2 * g.a, g.a - g.b + g.c),
            ];
            for h in next {
                if h.a.abs() <= bound && h.b.abs() <= bound && h.c.abs() <= bound && seen.insert(h) {
                    queue.push_back(h);
                }
            }
        }
        let mut reduced: Vec<_> = seen.into_iter().filter(|g| g.is_reduced_definite()).collect();
        reduced.sort();
        reduced
    }

    #[test]
    fn discriminant_decomposition() {
        let d = Discriminant::new(-23).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-23, 1));
        let d = Discriminant::new(-36).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-4, 3));
        let d = Discriminant::new(-12).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-3, 2));
        let d = Discriminant::new(12).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (12, 1));
        let d = Discriminant::new(-20).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-20, 1));
        let d = Discriminant::new(-63).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-7, 3));
        assert!(Discriminant::new(9).is_err());
        assert!(Discriminant::new(-6).is_err());
        assert!(Discriminant::new(0).is_err());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(q(1, 1, 6)).unwrap(), q(1, 1, 6));
        let oracle = equivalent_reduced_by_search(q(3, 1, 2));
        assert_eq!(oracle, vec![q(2, -1, 3)]);
        assert_eq!(reduce(q(3, 1, 2)).unwrap(), q(2, -1, 3));
        let oracle = equivalent_reduced_by_search(q(6, 2, 1));
        assert_eq!(oracle, vec![q(1, 0, 5)]);
        assert_eq!(reduce(q(6, 2, 1)).unwrap(), q(1, 0, 5));
    }

    #[test]
    fn reduce_rejects_bad_forms() {
        assert!(reduce(q(1, 2, 1)).is_err());
        assert!(reduce(q(-1, 1, -6)).is_err());
    }

    #[test]
    fn compose_examples() {
        let g = cls(2, 1, 3);
        assert_eq!(compose(&g, &g).unwrap().form(), q(2, -1, 3));
        let h = cls(2, 2, 3);
        assert_eq!(compose(&h, &h).unwrap().form(), q(1, 0, 5));
        let e = FormClass::principal(-23);
        assert_eq!(compose(&e, &g).unwrap(), g);
        assert!(compose(&g, &h).is_err());
        assert_eq!(compose(&g, &g.inverse()).unwrap(), e);
        assert_eq!(pow(&g, 3).unwrap(), e);
        assert_eq!(pow(&g, -1).unwrap(), g.inverse());
    }

    #[test]
    fn indefinite_cycles() {
        // D = 12 has two narrow classes.
        let one = FormClass::principal(12);
        let other = cls(-1, 2, 2);
        assert_ne!(one, other);
        assert_eq!(compose(&other, &other).unwrap(), one);
        assert_eq!(reduction_cycle(q(1, 2, -2)).len(), 2);
        // D = 5: (1,1,-1) ~ (-1,1,1).
        assert_eq!(cls(1, 1, -1), cls(-1, 1, 1));
        // D = 8: a unit of norm -1 makes (1,2,-1) ~ (-1,2,1).
        assert_eq!(cls(1, 2, -1), cls(-1, 2, 1));
    }
}
