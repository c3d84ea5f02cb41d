use super::field::Fp;
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Point on a short Weierstrass curve, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    Infinity,
    Affine(u64, u64),
}

/// `y^2 = x^3 + a x + b` over `F_p` with its j-invariant and Frobenius trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Curve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub j: u64,
    pub t: i64,
}

/// `4a^3 + 27b^2`.
fn discriminant_part(k: &Fp, a: u64, b: u64) -> u64 {
    k.add(k.mul(4, k.pow(a, 3)), k.mul(27, k.mul(b, b)))
}

pub fn j_invariant(k: &Fp, a: u64, b: u64) -> Option<u64> {
    let den = discriminant_part(k, a, b);
    let num = k.mul(1728 % k.p(), k.mul(4, k.pow(a, 3)));
    k.inv(den).map(|d| k.mul(num, d))
}

/// `#E(F_p)` by summing Legendre symbols, using a precomputed table.
pub fn count_with_table(k: &Fp, chi: &[i8], a: u64, b: u64) -> u64 {
    let p = k.p();
    let mut s: i64 = 0;
    for x in 0..p {
        let rhs = (x * x % p * x + a * x + b) % p;
        s += i64::from(chi[rhs as usize]);
    }
    (p as i64 + 1 + s) as u64
}

/// Order of `E(F_p)` and the trace `t = p + 1 - #E`.
pub fn point_count(p: u64, a: u64, b: u64) -> Result<(u64, i64)> {
    let k = Fp::new(p)?;
    let (a, b) = (a % p, b % p);
    if discriminant_part(&k, a, b) == 0 {
        return Err(Error::Input(format!("y^2 = x^3 + {a}x + {b} is singular over F_{p}")));
    }
    let order = count_with_table(&k, &k.legendre_table(), a, b);
    let t = p as i64 + 1 - order as i64;
    if (t as i128) * (t as i128) > 4 * p as i128 {
        return Err(Error::Internal(format!("trace {t} violates the Hasse bound for p = {p}")));
    }
    Ok((order, t))
}

impl Curve {
    pub fn new(p: u64, a: u64, b: u64) -> Result<Self> {
        let (_, t) = point_count(p, a, b)?;
        let k = Fp::new(p)?;
        let j = j_invariant(&k, a % p, b % p).expect("nonsingular");
        Ok(Curve { p, a: a % p, b: b % p, j, t })
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.p).expect("validated at construction")
    }

    pub fn order(&self) -> u64 {
        (self.p as i64 + 1 - self.t) as u64
    }

    pub fn is_ordinary(&self) -> bool {
        self.t.rem_euclid(self.p as i64) != 0
    }

    /// `x^3 + a x + b`.
    pub fn rhs(&self, x: u64) -> u64 {
        let k = self.field();
        k.add(k.mul(k.add(k.mul(x, x), self.a), x), self.b)
    }

    pub fn contains(&self, pt: &Point) -> bool {
        match *pt {
            Point::Infinity => true,
            Point::Affine(x, y) => x < self.p && y < self.p && y * y % self.p == self.rhs(x),
        }
    }

    pub fn neg(&self, pt: &Point) -> Point {
        match *pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, (self.p - y) % self.p),
        }
    }

    pub fn add(&self, p1: &Point, p2: &Point) -> Point {
        let k = self.field();
        match (*p1, *p2) {
            (Point::Infinity, q) | (q, Point::Infinity) => q,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
                let lambda = if x1 == x2 {
                    if k.add(y1, y2) == 0 {
                        return Point::Infinity;
                    }
                    let num = k.add(k.mul(3, k.mul(x1, x1)), self.a);
                    k.mul(num, k.inv(k.mul(2, y1)).expect("nonzero"))
                } else {
                    k.mul(k.sub(y2, y1), k.inv(k.sub(x2, x1)).expect("nonzero"))
                };
                let x3 = k.sub(k.sub(k.mul(lambda, lambda), x1), x2);
                let y3 = k.sub(k.mul(lambda, k.sub(x1, x3)), y1);
                Point::Affine(x3, y3)
            }
        }
    }

    pub fn mul(&self, n: u64, pt: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = *pt;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        let k = self.field();
        loop {
            let x = rng.random_range(0..self.p);
            if let Some(y) = k.sqrt(self.rhs(x)) {
                let y = if rng.random_bool(0.5) { y } else { k.neg(y) };
                return Point::Affine(x, y);
            }
        }
    }

    /// Order of `pt`, given that it divides `self.order()`.
    pub fn point_order(&self, pt: &Point) -> u64 {
        let mut n = self.order();
        for (q, e) in crate::arith::factorize(n) {
            for _ in 0..e {
                if self.mul(n / q, pt) == Point::Infinity {
                    n /= q;
                } else {
                    break;
                }
            }
        }
        n
    }

    /// `u` with `other = (u^4 a, u^6 b)`, i.e. `(x, y) -> (u^2 x, u^3 y)`
    /// maps `self` onto `other`.
    pub fn isomorphism_to(&self, other: &Curve) -> Option<u64> {
        let k = self.field();
        (1..self.p).find(|&u| {
            let u2 = k.mul(u, u);
            let u4 = k.mul(u2, u2);
            k.mul(u4, self.a) == other.a && k.mul(k.mul(u4, u2), self.b) == other.b
        })
    }
}

/// Image of `pt` under `(x, y) -> (u^2 x, u^3 y)`.
pub fn apply_isomorphism(k: &Fp, u: u64, pt: &Point) -> Point {
    match *pt {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => {
            let u2 = k.mul(u, u);
            Point::Affine(k.mul(u2, x), k.mul(k.mul(u2, u), y))
        }
    }
}

/// Parses `p,a,b` lines (blank lines and `#` comments ignored).
pub fn parse_curves_csv(text: &str) -> Result<Vec<Curve>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.eq_ignore_ascii_case("p,a,b") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |s: &str| -> Result<i64> {
            s.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("not an integer: {s:?}") })
        };
        let [p, a, b] = fields.as_slice() else {
            return Err(Error::Parse { line: i + 1, msg: "expected p,a,b".into() });
        };
        let p = parse(p)?;
        if p <= 0 {
            return Err(Error::Parse { line: i + 1, msg: format!("p = {p} must be positive") });
        }
        let (a, b) = (parse(a)?.rem_euclid(p) as u64, parse(b)?.rem_euclid(p) as u64);
        out.push(Curve::new(p as u64, a, b)?);
    }
    Ok(out)
}
