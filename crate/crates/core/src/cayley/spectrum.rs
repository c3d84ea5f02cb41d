use super::CayleyGraph;
use crate::abelian::Character;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

/// Largest vertex count accepted by the dense numeric solver.
pub const NUMERIC_SIZE_LIMIT: usize = 4096;

const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Adjacency eigenvalues indexed by the characters of `H`.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub entries: Vec<(Character, f64)>,
    /// `k`, the eigenvalue of the trivial character.
    pub trivial: f64,
    /// Largest `|lambda|` over nontrivial characters (0 when `H` is trivial).
    pub c: f64,
    /// Largest signed eigenvalue over nontrivial characters.
    pub lambda2: Option<f64>,
}

impl Spectrum {
    /// Eigenvalues sorted in descending order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|(_, l)| *l).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Multiplicity of `k`, up to `tol`.
    pub fn trivial_multiplicity(&self, tol: f64) -> usize {
        self.entries.iter().filter(|(_, l)| (l - self.trivial).abs() <= tol).count()
    }
}

impl CayleyGraph {
    /// `lambda_chi = sum_{s in S} chi(s)` for every character of `H`.
    pub fn spectrum_by_characters(&self) -> Result<Spectrum> {
        let h = self.subgroup();
        let trivial_chi = h.structure().trivial_character();
        let mut entries = Vec::with_capacity(h.order() as usize);
        let mut trivial = 0.0;
        let mut c: f64 = 0.0;
        let mut lambda2: Option<f64> = None;
        for chi in h.characters() {
            let z: Complex64 = self
                .generators()
                .iter()
                .map(|s| h.eval(&chi, &s.element).expect("generator in H").to_complex())
                .sum();
            if z.im.abs() > IMAGINARY_TOLERANCE {
                return Err(Error::Internal(format!(
                    "eigenvalue for character {:?} has imaginary part {:e}",
                    chi.coords, z.im
                )));
            }
            if chi == trivial_chi {
                trivial = z.re;
            } else {
                c = c.max(z.re.abs());
                lambda2 = Some(lambda2.map_or(z.re, |l| l.max(z.re)));
            }
            entries.push((chi, z.re));
        }
        Ok(Spectrum { entries, trivial, c, lambda2 })
    }

    /// Eigenvalues of the explicit adjacency matrix, descending.
    pub fn spectrum_numeric(&self) -> Result<Vec<f64>> {
        let n = self.vertex_count();
        if n > NUMERIC_SIZE_LIMIT {
            return Err(Error::Bound { what: "vertex count", value: n as u64, bound: NUMERIC_SIZE_LIMIT as u64 });
        }
        let adj = self.adjacency();
        let m = DMatrix::from_fn(n, n, |i, j| adj[i][j] as f64);
        let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(values)
    }

    pub fn expansion(&self) -> Result<Expansion> {
        if self.degree() == 0 {
            return Err(Error::Precondition("empty generator multiset".into()));
        }
        let spec = self.spectrum_by_characters()?;
        Ok(Expansion::from_spectrum(&spec))
    }
}

/// Expansion constants of a `k`-regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expansion {
    pub k: f64,
    pub c: f64,
    pub lambda2: f64,
    pub delta_one_sided: f64,
    pub delta_two_sided: f64,
}

impl Expansion {
    pub fn from_spectrum(spec: &Spectrum) -> Self {
        let k = spec.trivial;
        if k <= 0.0 {
            // Single vertex with no edges expands vacuously; otherwise nothing does.
            let d = if spec.lambda2.is_none() { 1.0 } else { 0.0 };
            return Expansion { k, c: spec.c, lambda2: 0.0, delta_one_sided: d, delta_two_sided: d };
        }
        let lambda2 = spec.lambda2.unwrap_or(0.0);
        Expansion {
            k,
            c: spec.c,
            lambda2,
            delta_one_sided: 1.0 - lambda2 / k,
            delta_two_sided: 1.0 - spec.c / k,
        }
    }

    /// Two-sided `delta`-expander test, `c <= (1 - delta) k`.
    pub fn is_two_sided(&self, delta: f64) -> bool {
        self.delta_two_sided >= delta - 1e-12
    }
}
