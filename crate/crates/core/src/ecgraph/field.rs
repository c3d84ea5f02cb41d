//! Arithmetic in `F_p` and `F_p[X]` for small odd primes.

use crate::arith::{is_prime, mod_inv, mod_pow, sqrt_mod_prime};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use rand::Rng;

/// Coefficients in increasing degree, without trailing zeros.
pub type Poly = Vec<u64>;

/// Largest field size accepted.
pub const MAX_P: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(f: &[u64]) -> Option<usize> {
    f.len().checked_sub(1)
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 || p > MAX_P || !is_prime(p) {
            return Err(Error::Input(format!("p = {p} must be a prime in 5..={MAX_P}")));
        }
        Ok(Fp { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.p
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.p - y) % self.p
    }

    pub fn neg(&self, x: u64) -> u64 {
        (self.p - x) % self.p
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.p
    }

    pub fn pow(&self, x: u64, e: u64) -> u64 {
        mod_pow(x, e, self.p)
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, x: u64) -> Option<u64> {
        mod_inv(x as i128, self.p as i128).map(|v| v as u64)
    }

    pub fn sqrt(&self, x: u64) -> Option<u64> {
        sqrt_mod_prime(x, self.p)
    }

    /// Legendre symbol.
    pub fn legendre(&self, x: u64) -> i32 {
        match self.pow(x % self.p, (self.p - 1) / 2) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    /// `chi[x]` for every `x` in `F_p`.
    pub fn legendre_table(&self) -> Vec<i8> {
        let mut chi = vec![-1i8; self.p as usize];
        chi[0] = 0;
        for x in 1..self.p {
            chi[(x * x % self.p) as usize] = 1;
        }
        chi
    }

    pub fn poly(&self, coeffs: &[i64]) -> Poly {
        trim(coeffs.iter().map(|&c| self.from_i64(c)).collect())
    }

    pub fn padd(&self, f: &[u64], g: &[u64]) -> Poly {
        let n = f.len().max(g.len());
        trim((0..n).map(|i| self.add(*f.get(i).unwrap_or(&0), *g.get(i).unwrap_or(&0))).collect())
    }

    pub fn psub(&self, f: &[u64], g: &[u64]) -> Poly {
        let n = f.len().max(g.len());
        trim((0..n).map(|i| self.sub(*f.get(i).unwrap_or(&0), *g.get(i).unwrap_or(&0))).collect())
    }

    pub fn pscale(&self, f: &[u64], c: u64) -> Poly {
        trim(f.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn pmul(&self, f: &[u64], g: &[u64]) -> Poly {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; f.len() + g.len() - 1];
        for (i, &x) in f.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in g.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        trim(out)
    }

    /// Quotient and remainder; `g` must be nonzero.
    pub fn pdivrem(&self, f: &[u64], g: &[u64]) -> (Poly, Poly) {
        let dg = degree(g).expect("division by the zero polynomial");
        let lead_inv = self.inv(g[dg]).expect("nonzero leading coefficient");
        let mut r = f.to_vec();
        if r.len() <= dg {
            return (Vec::new(), trim(r));
        }
        let mut q = vec![0u64; r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = self.mul(r[i], lead_inv);
            if c == 0 {
                continue;
            }
            q[i - dg] = c;
            for (j, &gj) in g.iter().enumerate() {
                let k = i - dg + j;
                r[k] = self.sub(r[k], self.mul(c, gj));
            }
        }
        r.truncate(dg);
        (trim(q), trim(r))
    }

    pub fn prem(&self, f: &[u64], g: &[u64]) -> Poly {
        self.pdivrem(f, g).1
    }

    pub fn pmonic(&self, f: &[u64]) -> Poly {
        match f.last() {
            None => Vec::new(),
            Some(&lead) => self.pscale(f, self.inv(lead).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor.
    pub fn pgcd(&self, f: &[u64], g: &[u64]) -> Poly {
        let (mut a, mut b) = (trim(f.to_vec()), trim(g.to_vec()));
        while !b.is_empty() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        self.pmonic(&a)
    }

    /// Inverse of `f` modulo `m`, if coprime.
    pub fn pinvmod(&self, f: &[u64], m: &[u64]) -> Option<Poly> {
        let (mut r0, mut r1) = (m.to_vec(), self.prem(f, m));
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = self.pdivrem(&r0, &r1);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = self.inv(r0[0])?;
        Some(self.prem(&self.pscale(&s0, c), m))
    }

    pub fn pmulmod(&self, f: &[u64], g: &[u64], m: &[u64]) -> Poly {
        self.prem(&self.pmul(f, g), m)
    }

    pub fn ppowmod(&self, f: &[u64], e: &BigUint, m: &[u64]) -> Poly {
        let mut result: Poly = self.prem(&[1], m);
        let base = self.prem(f, m);
        for i in (0..e.bits()).rev() {
            result = self.pmulmod(&result, &result, m);
            if e.bit(i) {
                result = self.pmulmod(&result, &base, m);
            }
        }
        result
    }

    pub fn pderiv(&self, f: &[u64]) -> Poly {
        trim(f.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, i as u64 % self.p)).collect())
    }

    pub fn peval(&self, f: &[u64], x: u64) -> u64 {
        f.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Distinct-degree factorization of a monic squarefree `f`: pairs
    /// `(d, product of all irreducible factors of degree d)`.
    pub fn distinct_degree(&self, f: &[u64]) -> Vec<(usize, Poly)> {
        let mut f = self.pmonic(f);
        let mut out = Vec::new();
        let x: Poly = vec![0, 1];
        let p = BigUint::from(self.p);
        let mut h = self.prem(&x, &f);
        let mut d = 0;
        while degree(&f).is_some_and(|n| n >= 2 * (d + 1)) {
            d += 1;
            h = self.ppowmod(&h, &p, &f);
            let g = self.pgcd(&f, &self.psub(&h, &x));
            if degree(&g).is_some_and(|n| n > 0) {
                f = self.pdivrem(&f, &g).0;
                h = self.prem(&h, &f);
                out.push((d, g));
            }
        }
        if let Some(n) = degree(&f).filter(|&n| n > 0) {
            out.push((n, f));
        }
        out
    }

    /// Splits a product of distinct irreducibles of degree `d` into its
    /// factors (Cantor-Zassenhaus), sorted.
    pub fn equal_degree<R: Rng>(&self, f: &[u64], d: usize, rng: &mut R) -> Vec<Poly> {
        let f = self.pmonic(f);
        let n = degree(&f).unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        if n == d {
            return vec![f];
        }
        let e = (BigUint::from(self.p).pow(d as u32) - 1u32) / 2u32;
        loop {
            let a: Poly = trim((0..n).map(|_| rng.random_range(0..self.p)).collect());
            if degree(&a).is_none_or(|k| k == 0) {
                continue;
            }
            let b = self.psub(&self.ppowmod(&a, &e, &f), &[1]);
            let g = self.pgcd(&f, &b);
            let dg = degree(&g).unwrap_or(0);
            if dg > 0 && dg < n {
                let rest = self.pdivrem(&f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&rest, d, rng));
                out.sort();
                return out;
            }
        }
    }
}
