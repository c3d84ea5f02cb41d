use crate::abelian::Subgroup;
use crate::arith::primes_below;
use crate::error::{Error, Result};
use crate::quadform::{generating_multiset, prime_form, ClassGroup};
use serde::Serialize;

pub const SCAN_CSV_HEADER: &str = "B,lambda_triv,c,delta2,li_over_index,error_envelope";

/// `li(x) = int_2^x dt / ln t` (offset logarithmic integral).
pub fn li(x: f64) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    let f = |t: f64| 1.0 / t.ln();
    // Split on a geometric grid so each panel is smooth and short.
    let mut total = 0.0;
    let mut a = 2.0f64;
    while a < x {
        let b = (a * 2.0).min(x);
        total += adaptive_simpson(&f, a, b, 1e-12, 40);
        a = b;
    }
    total
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let simpson = |a: f64, b: f64| (b - a) / 6.0 * (f(a) + 4.0 * f((a + b) / 2.0) + f(b));
    fn recurse(
        f: &impl Fn(f64) -> f64,
        simpson: &impl Fn(f64, f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = (a + b) / 2.0;
        let (left, right) = (simpson(a, m), simpson(m, b));
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, simpson, a, m, left, tol / 2.0, depth - 1) + recurse(f, simpson, m, b, right, tol / 2.0, depth - 1)
    }
    recurse(f, &simpson, a, b, simpson(a, b), tol, depth)
}

/// Parameters of the trivial-eigenvalue estimate
/// `lambda_triv ~ li(B)/[G:H] + O(n sqrt(B) ln(B d_K N(fm)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateParams {
    /// Degree of the number field.
    pub n: u32,
    /// `|d_K|`.
    pub d_k: u64,
    /// Norm of the conductor times the modulus.
    pub nfm: u64,
    /// `[G:H]`.
    pub index: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub main_term: f64,
    pub envelope: f64,
}

pub fn eigenvalue_prediction(p: &EstimateParams, trivial: bool) -> Result<Prediction> {
    if p.bound < 2 {
        return Err(Error::Precondition(format!("norm bound {} < 2", p.bound)));
    }
    if p.n == 0 || p.d_k == 0 || p.nfm == 0 || p.index == 0 {
        return Err(Error::Input("estimate parameters must be positive".into()));
    }
    let b = p.bound as f64;
    let main_term = if trivial { li(b) / p.index as f64 } else { 0.0 };
    let envelope = p.n as f64 * b.sqrt() * (b * p.d_k as f64 * p.nfm as f64).ln();
    Ok(Prediction { main_term, envelope })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub bound: u64,
    pub lambda_triv: f64,
    pub c: f64,
    pub delta2: f64,
    pub li_over_index: f64,
    pub error_envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpanderScan {
    pub delta: f64,
    /// Smallest grid bound giving a two-sided `delta`-expander.
    pub bound: Option<u64>,
    pub rows: Vec<ScanRow>,
}

impl ExpanderScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.bound, r.lambda_triv, r.c, r.delta2, r.li_over_index, r.error_envelope
            ));
        }
        out
    }

    /// Smallest `C` with `|lambda_triv - li(B)/[G:H]| <= C * scale(B)` on every row.
    pub fn fitted_constant(&self, scale: impl Fn(&ScanRow) -> f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| scale(r) > 0.0)
            .map(|r| (r.lambda_triv - r.li_over_index).abs() / scale(r))
            .fold(0.0, f64::max)
    }
}

/// Scans `B` over `2` and `l + 1` for primes `l < b_max`, recording the
/// character spectrum of `Cay(H, S_B)` at each step.
pub fn expander_scan(cl: &ClassGroup, subgroup: &Subgroup, delta: f64, b_max: u64, avoid: &[u64]) -> Result<ExpanderScan> {
    if subgroup.ambient() != cl.group() {
        return Err(Error::Mismatch("subgroup is not a subgroup of this class group".into()));
    }
    if b_max < 2 {
        return Err(Error::Precondition(format!("B_max = {b_max} < 2")));
    }
    let full = generating_multiset(cl, b_max, subgroup, avoid)?;
    let elems: Vec<_> = full.iter().map(|g| g.element.clone()).collect();
    let generated = Subgroup::generated(cl.group(), &elems)?;
    if generated.order() != subgroup.order() {
        return Err(Error::Precondition(format!(
            "prime forms below {b_max} generate a subgroup of order {} inside H of order {}",
            generated.order(),
            subgroup.order()
        )));
    }

    let disc = cl.discriminant();
    let params = |bound| EstimateParams {
        n: 2,
        d_k: disc.fundamental().unsigned_abs(),
        nfm: disc.conductor() * disc.conductor(),
        index: subgroup.index(),
        bound,
    };
    let chars = subgroup.characters();
    let trivial_chi = subgroup.structure().trivial_character();
    let mut lambdas = vec![0.0f64; chars.len()];
    let mut imag = vec![0.0f64; chars.len()];
    let mut k = 0usize;
    let mut rows = Vec::new();
    let mut found = None;

    let mut record = |bound: u64, lambdas: &[f64], k: usize| -> Result<()> {
        let mut c: f64 = 0.0;
        let mut any_nontrivial = false;
        for (chi, &l) in chars.iter().zip(lambdas) {
            if *chi != trivial_chi {
                any_nontrivial = true;
                c = c.max(l.abs());
            }
        }
        let delta2 = if k > 0 {
            1.0 - c / k as f64
        } else if any_nontrivial {
            0.0
        } else {
            1.0
        };
        let pred = eigenvalue_prediction(&params(bound), true)?;
        rows.push(ScanRow {
            bound,
            lambda_triv: k as f64,
            c,
            delta2,
            li_over_index: pred.main_term,
            error_envelope: pred.envelope,
        });
        if found.is_none() && delta2 >= delta - 1e-12 {
            found = Some(bound);
        }
        Ok(())
    };

    record(2, &lambdas, 0)?;
    for ell in primes_below(b_max) {
        if !avoid.contains(&ell) && disc.conductor() % ell != 0 {
            if let Some(pf) = prime_form(&disc, ell)? {
                for class in &pf.classes {
                    let element = cl.element_of(class).expect("class in group");
                    if !subgroup.contains(element) {
                        continue;
                    }
                    k += 1;
                    for (i, chi) in chars.iter().enumerate() {
                        let z = subgroup.eval(chi, element).expect("in H").to_complex();
                        lambdas[i] += z.re;
                        imag[i] += z.im;
                    }
                }
            }
        }
        if let Some(bad) = imag.iter().find(|x| x.abs() > 1e-9) {
            return Err(Error::Internal(format!("imaginary eigenvalue residue {bad:e}")));
        }
        record(ell + 1, &lambdas, k)?;
    }
    Ok(ExpanderScan { delta, bound: found, rows })
}

/// Smallest grid bound `B <= b_max` for which `Cay(H, S_B)` is a two-sided
/// `delta`-expander, with the full scan table.
pub fn find_expander_bound(
    cl: &ClassGroup,
    subgroup: &Subgroup,
    delta: f64,
    b_max: u64,
    avoid: &[u64],
) -> Result<(u64, ExpanderScan)> {
    let scan = expander_scan(cl, subgroup, delta, b_max, avoid)?;
    match scan.bound {
        Some(b) => Ok((b, scan)),
        None => Err(Error::NotFound(format!("no B <= {b_max} gives a two-sided {delta}-expander"))),
    }
}
