use super::{ClassGroup, Discriminant, FormClass, QuadForm};
use crate::abelian::{GroupElement, Subgroup};
use crate::arith::{is_prime, kronecker, primes_below, sqrt_mod_prime};
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Ramified,
}

/// The prime forms above a non-inert prime `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeForms {
    pub ell: u64,
    pub splitting: Splitting,
    /// `(l, b, c)` before reduction, one per prime ideal: `[b, -b]` when
    /// split, a single entry when ramified.
    pub forms: Vec<QuadForm>,
    pub classes: Vec<FormClass>,
}

/// Prime forms above `ell`, or `None` when `ell` is inert.
pub fn prime_form(disc: &Discriminant, ell: u64) -> Result<Option<PrimeForms>> {
    if !is_prime(ell) {
        return Err(Error::Input(format!("{ell} is not prime")));
    }
    if disc.conductor() % ell == 0 {
        return Err(Error::Precondition(format!(
            "{ell} divides the conductor {}; ideals above it are not invertible",
            disc.conductor()
        )));
    }
    let d = disc.value();
    let b = if ell == 2 {
        (0..4i64).find(|&b| (b - d).rem_euclid(2) == 0 && (b * b - d).rem_euclid(8) == 0)
    } else {
        sqrt_mod_prime(d.rem_euclid(ell as i64) as u64, ell).map(|r| {
            let r = r as i64;
            if (r - d).rem_euclid(2) == 0 {
                r
            } else {
                ell as i64 - r
            }
        })
    };
    let Some(b) = b else { return Ok(None) };
    let ramified = d.rem_euclid(ell as i64) == 0;
    let bs = if ramified { vec![b] } else { vec![b, -b] };
    let forms: Vec<QuadForm> = bs
        .iter()
        .map(|&b| {
            QuadForm::from_ab(ell as i64, b, d)
                .ok_or_else(|| Error::Internal(format!("b = {b} does not give a form of norm {ell}")))
        })
        .collect::<Result<_>>()?;
    let classes = forms.iter().map(|f| FormClass::of(*f)).collect::<Result<_>>()?;
    let splitting = if ramified { Splitting::Ramified } else { Splitting::Split };
    debug_assert_eq!(kronecker(d, ell), if ramified { 0 } else { 1 });
    Ok(Some(PrimeForms { ell, splitting, forms, classes }))
}

/// One member of the labeled multiset `S_B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    /// Norm of the prime ideal.
    pub ell: u64,
    /// Middle coefficient of the unreduced prime form `(l, b, *)`.
    pub b: i64,
    pub class: FormClass,
    pub element: GroupElement,
}

impl Generator {
    pub fn label(&self) -> String {
        format!("{}:{}", self.ell, self.b)
    }
}

/// Prime forms of norm `< bound` whose class lies in `subgroup`, skipping
/// primes in `avoid` and primes dividing the conductor.
pub fn generating_multiset(
    cl: &ClassGroup,
    bound: u64,
    subgroup: &Subgroup,
    avoid: &[u64],
) -> Result<Vec<Generator>> {
    if subgroup.ambient() != cl.group() {
        return Err(Error::Mismatch("subgroup is not a subgroup of this class group".into()));
    }
    let disc = cl.discriminant();
    let mut out = Vec::new();
    for ell in primes_below(bound) {
        if avoid.contains(&ell) || disc.conductor() % ell == 0 {
            continue;
        }
        let Some(pf) = prime_form(&disc, ell)? else { continue };
        for (form, class) in pf.forms.iter().zip(&pf.classes) {
            let element = cl
                .element_of(class)
                .ok_or_else(|| Error::Internal(format!("prime form {form} missing from class group")))?
                .clone();
            if subgroup.contains(&element) {
                out.push(Generator { ell, b: form.b, class: *class, element });
            }
        }
    }
    Ok(out)
}
