use super::curve::{apply_isomorphism, Curve, Point};
use super::field::{degree, Fp, Poly};
use crate::arith::is_prime;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The odd-index normalization of the division polynomials: `f_n = psi_n`
/// for odd `n` and `f_n = psi_n / (2y)` for even `n`, all in `F_p[x]`.
pub fn division_polynomials(curve: &Curve, up_to: usize) -> Vec<Poly> {
    let k = curve.field();
    let (a, b) = (curve.a as i64, curve.b as i64);
    // F = (2y)^2 = 4(x^3 + a x + b).
    let big_f = k.poly(&[4 * b, 4 * a, 0, 4]);
    let f_sq = k.pmul(&big_f, &big_f);
    let mut f: Vec<Poly> = vec![
        Vec::new(),
        vec![1],
        vec![1],
        k.poly(&[-a * a, 12 * b, 6 * a, 0, 3]),
        k.pscale(&k.poly(&[-8 * b * b - a * a * a, -4 * a * b, -5 * a * a, 20 * b, 5 * a, 0, 1]), 2),
    ];
    let cube = |q: &Poly| k.pmul(&k.pmul(q, q), q);
    while f.len() <= up_to {
        let n = f.len();
        let m = n / 2;
        let next = if n % 2 == 1 {
            let u = k.pmul(&f[m + 2], &cube(&f[m]));
            let v = k.pmul(&f[m - 1], &cube(&f[m + 1]));
            if m % 2 == 0 {
                k.psub(&k.pmul(&f_sq, &u), &v)
            } else {
                k.psub(&u, &k.pmul(&f_sq, &v))
            }
        } else {
            let u = k.pmul(&f[m + 2], &k.pmul(&f[m - 1], &f[m - 1]));
            let v = k.pmul(&f[m - 2], &k.pmul(&f[m + 1], &f[m + 1]));
            k.pmul(&f[m], &k.psub(&u, &v))
        };
        f.push(next);
    }
    f.truncate(up_to + 1);
    f
}

/// Arithmetic in `F_p[X]/(g)`.
struct Residue<'a> {
    k: &'a Fp,
    g: &'a [u64],
}

impl Residue<'_> {
    fn c(&self, x: u64) -> Poly {
        self.k.poly(&[x as i64])
    }
    fn add(&self, x: &[u64], y: &[u64]) -> Poly {
        self.k.padd(x, y)
    }
    fn sub(&self, x: &[u64], y: &[u64]) -> Poly {
        self.k.psub(x, y)
    }
    fn mul(&self, x: &[u64], y: &[u64]) -> Poly {
        self.k.pmulmod(x, y, self.g)
    }
    fn div(&self, x: &[u64], y: &[u64]) -> Option<Poly> {
        self.k.pinvmod(y, self.g).map(|inv| self.mul(x, &inv))
    }
}

/// Kernel polynomials `prod (X - x(iP))`, `1 <= i <= (l-1)/2`, of the
/// `F_p`-rational cyclic subgroups of order `l`, sorted.
pub fn rational_kernels(curve: &Curve, ell: u64) -> Result<Vec<Poly>> {
    if ell < 3 || !is_prime(ell) {
        return Err(Error::Input(format!("isogeny degree {ell} must be an odd prime")));
    }
    if ell == curve.p {
        return Err(Error::Precondition(format!("degree {ell} equals the characteristic")));
    }
    let k = curve.field();
    let n = ((ell - 1) / 2) as usize;
    let psi = division_polynomials(curve, ell as usize).pop().expect("nonempty");
    let mut rng = ChaCha8Rng::seed_from_u64(curve.p ^ (curve.a << 20) ^ (curve.b << 40) ^ ell.rotate_left(56));
    let mut kernels = Vec::new();
    for (d, part) in k.distinct_degree(&psi) {
        if n % d != 0 {
            continue;
        }
        for g in k.equal_degree(&part, d, &mut rng) {
            if let Some(ker) = kernel_from_factor(curve, &k, &g, n) {
                if !kernels.contains(&ker) {
                    kernels.push(ker);
                }
            }
        }
    }
    kernels.sort();
    Ok(kernels)
}

/// Builds the kernel polynomial of `<P>` where `x(P)` is a root of the
/// irreducible `g`, returning it only if its coefficients lie in `F_p`.
fn kernel_from_factor(curve: &Curve, k: &Fp, g: &[u64], n: usize) -> Option<Poly> {
    let r = Residue { k, g };
    let (a, b) = (curve.a, curve.b);
    let x1: Poly = k.prem(&[0, 1], g);
    let mut xs = vec![x1.clone()];
    if n >= 2 {
        // x(2P) = ((x^2 - a)^2 - 8 b x) / (4 (x^3 + a x + b)).
        let x2 = r.mul(&x1, &x1);
        let t = r.sub(&x2, &r.c(a));
        let num = r.sub(&r.mul(&t, &t), &r.mul(&r.c(k.mul(8, b)), &x1));
        let den = r.mul(&r.c(4), &r.add(&r.mul(&r.add(&x2, &r.c(a)), &x1), &r.c(b)));
        xs.push(r.div(&num, &den)?);
    }
    while xs.len() < n {
        // x(P+Q) + x(P-Q) = 2((x1+x2)(x1 x2 + a) + 2b) / (x1 - x2)^2 with Q = iP.
        let i = xs.len();
        let (xi, xprev) = (&xs[i - 1], &xs[i - 2]);
        let s = r.add(&x1, xi);
        let num = r.mul(&r.c(2), &r.add(&r.mul(&s, &r.add(&r.mul(&x1, xi), &r.c(a))), &r.c(k.mul(2, b))));
        let diff = r.sub(&x1, xi);
        let sum = r.div(&num, &r.mul(&diff, &diff))?;
        xs.push(r.sub(&sum, xprev));
    }
    // Multiply out prod (Y - x_i) with coefficients in the residue ring.
    let mut coeffs: Vec<Poly> = vec![r.c(1)];
    for xi in &xs {
        let mut next: Vec<Poly> = vec![Vec::new(); coeffs.len() + 1];
        for (j, cj) in coeffs.iter().enumerate() {
            next[j + 1] = r.add(&next[j + 1], cj);
            next[j] = r.sub(&next[j], &r.mul(cj, xi));
        }
        coeffs = next;
    }
    coeffs
        .iter()
        .map(|c| match c.len() {
            0 => Some(0),
            1 => Some(c[0]),
            _ => None,
        })
        .collect::<Option<Vec<u64>>>()
}

/// Power sums `p_1..p_3` of the roots of a monic polynomial by Newton's identities.
fn power_sums(k: &Fp, ker: &[u64]) -> [u64; 3] {
    let n = degree(ker).expect("nonzero");
    // Elementary symmetric functions: ker = X^n - e1 X^{n-1} + e2 X^{n-2} - e3 X^{n-3} ...
    let coeff = |i: usize| if i <= n { ker[n - i] } else { 0 };
    let e1 = k.neg(coeff(1));
    let e2 = coeff(2);
    let e3 = k.neg(coeff(3));
    let p1 = e1;
    let p2 = k.sub(k.mul(e1, p1), k.mul(2, e2));
    let p3 = k.add(k.sub(k.mul(e1, p2), k.mul(e2, p1)), k.mul(3, e3));
    [p1, p2, p3]
}

/// Codomain `(A, B)` of the normalized isogeny with kernel polynomial `ker`.
pub fn velu_codomain(curve: &Curve, ker: &[u64]) -> (u64, u64) {
    let k = curve.field();
    let n = (degree(ker).expect("nonzero") as u64) % curve.p;
    let [p1, p2, p3] = power_sums(&k, ker);
    let (a, b) = (curve.a, curve.b);
    let v = k.add(k.mul(6, p2), k.mul(k.mul(2, a), n));
    let w = k.add(k.add(k.mul(10, p3), k.mul(k.mul(6, a), p1)), k.mul(k.mul(4, b), n));
    (k.sub(a, k.mul(5, v)), k.sub(b, k.mul(7, w)))
}

/// Image of `pt` under the normalized isogeny with kernel polynomial `ker`,
/// landing on the curve `velu_codomain(curve, ker)`.
pub fn velu_image(curve: &Curve, ker: &[u64], pt: &Point) -> Point {
    let Point::Affine(x, y) = *pt else { return Point::Infinity };
    let k = curve.field();
    let kx = k.peval(ker, x);
    if kx == 0 {
        return Point::Infinity;
    }
    let ell = (2 * degree(ker).expect("nonzero") as u64 + 1) % curve.p;
    let d1 = k.pderiv(ker);
    let d2 = k.pderiv(&d1);
    let d3 = k.pderiv(&d2);
    let (k1, k2, k3) = (k.peval(&d1, x), k.peval(&d2, x), k.peval(&d3, x));
    let inv = k.inv(kx).expect("nonzero");
    let inv2 = k.mul(inv, inv);
    let inv3 = k.mul(inv2, inv);
    // L = K'/K and its first two derivatives.
    let l0 = k.mul(k1, inv);
    let l1 = k.mul(k.sub(k.mul(k2, kx), k.mul(k1, k1)), inv2);
    let l2_num = k.add(
        k.sub(k.mul(k3, k.mul(kx, kx)), k.mul(3, k.mul(kx, k.mul(k1, k2)))),
        k.mul(2, k.pow(k1, 3)),
    );
    let l2 = k.mul(l2_num, inv3);
    let f0 = curve.rhs(x);
    let f1 = k.add(k.mul(3, k.mul(x, x)), curve.a);
    let f2 = k.mul(6, x);
    let sigma = k.neg(ker[ker.len() - 2]);
    // X = l x - 2 sigma - 2 f' L - 4 f L'.
    let big_x = k.sub(
        k.sub(k.sub(k.mul(ell, x), k.mul(2, sigma)), k.mul(2, k.mul(f1, l0))),
        k.mul(4, k.mul(f0, l1)),
    );
    // X' = l - 2 f'' L - 6 f' L' - 4 f L''.
    let dx = k.sub(
        k.sub(k.sub(ell, k.mul(2, k.mul(f2, l0))), k.mul(6, k.mul(f1, l1))),
        k.mul(4, k.mul(f0, l2)),
    );
    Point::Affine(big_x, k.mul(y, dx))
}

/// A horizontal `l`-isogeny between two vertex curves of an isogeny graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsogenyEdge {
    pub ell: u64,
    pub source: usize,
    pub target: usize,
    pub source_j: u64,
    pub target_j: u64,
    /// Monic kernel polynomial, coefficients in increasing degree.
    pub kernel: Vec<u64>,
    /// Model `(A, B)` produced by the isogeny formulas.
    pub codomain: (u64, u64),
    /// `u` mapping the codomain model onto the target vertex curve.
    pub twist_u: u64,
}

/// Evaluates `e` at a point of its source curve, returning a point on the
/// target vertex curve.
pub fn isogeny_eval(source: &Curve, e: &IsogenyEdge, pt: &Point) -> Result<Point> {
    if !source.contains(pt) {
        return Err(Error::Input(format!("{pt:?} is not on the source curve")));
    }
    let image = velu_image(source, &e.kernel, pt);
    Ok(apply_isomorphism(&source.field(), e.twist_u, &image))
}
