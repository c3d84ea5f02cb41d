//! Seeded random walks on regular multigraphs and the rapid-mixing harness.
//!
//! Randomness comes from ChaCha8 streams: trial `i` of a run with master
//! seed `s` draws from `ChaCha8Rng::seed_from_u64(s)` switched to stream
//! `i`. The trial-to-stream map is therefore a pure function, and any
//! execution order gives the same statistics.

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A `k`-regular multigraph on vertices `0..n` with numbered edge slots.
pub trait RegularGraph: Sync {
    fn vertex_count(&self) -> usize;
    fn degree(&self) -> usize;
    /// Vertex reached from `v` through slot `slot < degree()`.
    fn step(&self, v: usize, slot: usize) -> usize;
    /// Largest absolute nontrivial adjacency eigenvalue.
    fn nontrivial_bound(&self) -> Result<f64>;
}

impl RegularGraph for CayleyGraph {
    fn vertex_count(&self) -> usize {
        CayleyGraph::vertex_count(self)
    }

    fn degree(&self) -> usize {
        CayleyGraph::degree(self)
    }

    fn step(&self, v: usize, slot: usize) -> usize {
        self.neighbor(v, slot, false)
    }

    fn nontrivial_bound(&self) -> Result<f64> {
        Ok(self.spectrum_by_characters()?.c)
    }
}

/// Random stream for trial `stream` under master seed `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Walks `length` uniformly chosen edge slots from `start`.
pub fn random_walk<G: RegularGraph + ?Sized, R: Rng>(g: &G, start: usize, length: usize, rng: &mut R) -> usize {
    let k = g.degree();
    if k == 0 {
        return start;
    }
    (0..length).fold(start, |v, _| g.step(v, rng.random_range(0..k)))
}

/// Like [`random_walk`], also returning the slot taken at each step.
pub fn random_walk_slots<G: RegularGraph + ?Sized, R: Rng>(
    g: &G,
    start: usize,
    length: usize,
    rng: &mut R,
) -> (usize, Vec<usize>) {
    let k = g.degree();
    let mut v = start;
    let mut slots = Vec::with_capacity(length);
    if k == 0 {
        return (start, slots);
    }
    for _ in 0..length {
        let j = rng.random_range(0..k);
        slots.push(j);
        v = g.step(v, j);
    }
    (v, slots)
}

/// `ceil(ln(2n / sqrt(w)) / ln(k / c))`, at least 1.
pub fn mixing_length_from(k: f64, c: f64, n: usize, w: usize) -> Result<usize> {
    if w == 0 || w > n {
        return Err(Error::Input(format!("target size {w} outside 1..={n}")));
    }
    if k <= 0.0 || c >= k - 1e-9 {
        return Err(Error::Precondition(format!(
            "c = {c} is not below k = {k}: graph is disconnected or bipartite"
        )));
    }
    if c <= 1e-12 {
        return Ok(1);
    }
    let numerator = (2.0 * n as f64 / (w as f64).sqrt()).ln();
    let len = (numerator / (k / c).ln()).ceil();
    Ok((len as usize).max(1))
}

pub fn mixing_length<G: RegularGraph + ?Sized>(g: &G, w: usize) -> Result<usize> {
    mixing_length_from(g.degree() as f64, g.nontrivial_bound()?, g.vertex_count(), w)
}

/// `ceil(ln(2n / sqrt(w)))`: the length stated without the spectral-gap factor.
pub fn length_without_gap(n: usize, w: usize) -> usize {
    (2.0 * n as f64 / (w as f64).sqrt()).ln().ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkConfig {
    pub length: usize,
    pub trials: u64,
    pub seed: u64,
    pub targets: Vec<usize>,
}

impl WalkConfig {
    fn validate(&self, n: usize) -> Result<Vec<usize>> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        let mut w = self.targets.clone();
        w.sort_unstable();
        w.dedup();
        if w.is_empty() {
            return Err(Error::Input("target set W is empty".into()));
        }
        if let Some(&bad) = w.iter().find(|&&v| v >= n) {
            return Err(Error::Input(format!("target vertex {bad} outside 0..{n}")));
        }
        Ok(w)
    }
}

/// Wilson score interval for `hits` successes out of `n` at normal quantile `z`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Graphs up to this size also get the exact end-vertex distribution.
pub const EXACT_SIZE_LIMIT: usize = 64;

/// Exact distribution of the endpoint of a `length`-step walk from `start`.
pub fn exact_distribution<G: RegularGraph + ?Sized>(g: &G, start: usize, length: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let k = g.degree();
    let mut p = vec![0.0; n];
    p[start] = 1.0;
    if k == 0 {
        return p;
    }
    let w = 1.0 / k as f64;
    for _ in 0..length {
        let mut next = vec![0.0; n];
        for (v, &mass) in p.iter().enumerate() {
            if mass != 0.0 {
                for j in 0..k {
                    next[g.step(v, j)] += mass * w;
                }
            }
        }
        p = next;
    }
    p
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactComparison {
    pub probability: f64,
    pub tv_distance: f64,
    /// `1/2 sum_v sqrt(p_v (1 - p_v) / trials)`, the multinomial noise scale of the TV distance.
    pub tv_noise: f64,
    pub tv_within_3sigma: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub config: WalkConfig,
    pub start: usize,
    pub vertex_count: usize,
    pub degree: usize,
    pub c: f64,
    pub mixing_length: usize,
    pub length_without_gap: usize,
    pub hits: u64,
    pub frequency: f64,
    pub interval: (f64, f64),
    pub lemma_bounds: (f64, f64),
    pub end_counts: Vec<u64>,
    pub exact: Option<ExactComparison>,
    pub verdict: String,
}

impl MixingReport {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

/// Runs `cfg.trials` independent walks from `start` and compares the hit
/// frequency of `W` with `[|W|/(2n), 3|W|/(2n)]` through a 99% Wilson interval.
pub fn mixing_experiment<G: RegularGraph + ?Sized>(g: &G, start: usize, cfg: &WalkConfig) -> Result<MixingReport> {
    let n = g.vertex_count();
    if start >= n {
        return Err(Error::Input(format!("start vertex {start} outside 0..{n}")));
    }
    let w = cfg.validate(n)?;
    let c = g.nontrivial_bound()?;
    let needed = mixing_length_from(g.degree() as f64, c, n, w.len())?;
    if cfg.length < needed {
        return Err(Error::Precondition(format!("walk length {} below mixing length {needed}", cfg.length)));
    }
    let ends: Vec<usize> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| random_walk(g, start, cfg.length, &mut trial_rng(cfg.seed, t)))
        .collect();
    let mut end_counts = vec![0u64; n];
    for v in ends {
        end_counts[v] += 1;
    }
    let hits: u64 = w.iter().map(|&v| end_counts[v]).sum();
    let frequency = hits as f64 / cfg.trials as f64;
    let interval = wilson_interval(hits, cfg.trials, Z_99);
    let mu = w.len() as f64 / n as f64;
    let lemma_bounds = (0.5 * mu, 1.5 * mu);
    let pass = interval.0 <= lemma_bounds.1 && interval.1 >= lemma_bounds.0;

    let exact = (n <= EXACT_SIZE_LIMIT).then(|| {
        let p = exact_distribution(g, start, cfg.length);
        let trials = cfg.trials as f64;
        let tv_distance = 0.5
            * p.iter()
                .zip(&end_counts)
                .map(|(pv, &cnt)| (cnt as f64 / trials - pv).abs())
                .sum::<f64>();
        let tv_noise = 0.5 * p.iter().map(|pv| (pv * (1.0 - pv) / trials).sqrt()).sum::<f64>();
        ExactComparison {
            probability: w.iter().map(|&v| p[v]).sum(),
            tv_distance,
            tv_noise,
            tv_within_3sigma: tv_distance <= 3.0 * tv_noise,
        }
    });

    Ok(MixingReport {
        config: cfg.clone(),
        start,
        vertex_count: n,
        degree: g.degree(),
        c,
        mixing_length: needed,
        length_without_gap: length_without_gap(n, w.len()),
        hits,
        frequency,
        interval,
        lemma_bounds,
        end_counts,
        exact,
        verdict: if pass { "PASS" } else { "FAIL" }.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{FiniteAbelianGroup, Subgroup};
    use crate::cayley::LabeledElement;

    fn cyclic(n: u64, steps: &[i64]) -> CayleyGraph {
        let g = FiniteAbelianGroup::new(vec![n]).unwrap();
        let gens = steps
            .iter()
            .map(|&s| LabeledElement { element: g.element(&[s]).unwrap(), label: s.to_string() })
            .collect();
        CayleyGraph::build(Subgroup::whole(&g).unwrap(), gens).unwrap()
    }

    #[test]
    fn zero_length_walk_stays() {
        let g = cyclic(3, &[1, -1]);
        assert_eq!(random_walk(&g, 2, 0, &mut trial_rng(1, 0)), 2);
    }

    #[test]
    fn one_step_is_uniform_over_slots() {
        let g = cyclic(3, &[1, -1]);
        let trials = 10_000u64;
        let mut counts = [0u64; 3];
        for t in 0..trials {
            counts[random_walk(&g, 0, 1, &mut trial_rng(7, t))] += 1;
        }
        assert_eq!(counts[0], 0);
        // Chi-square with 1 degree of freedom; 10.83 is the 0.1% critical value.
        let e = trials as f64 / 2.0;
        let chi2: f64 = counts[1..].iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 10.83, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn seeded_walks_reproduce() {
        let g = cyclic(11, &[1, -1, 3, -3]);
        let a = random_walk_slots(&g, 0, 50, &mut trial_rng(42, 5));
        let b = random_walk_slots(&g, 0, 50, &mut trial_rng(42, 5));
        assert_eq!(a, b);
        let c = random_walk_slots(&g, 0, 50, &mut trial_rng(42, 6));
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn mixing_length_examples() {
        let g = cyclic(3, &[1, -1]);
        // ln 6 / ln 2 = 2.58.
        assert_eq!(mixing_length(&g, 1).unwrap(), 3);
        assert!(mixing_length(&g, 3).unwrap() >= 1);
        let bip = cyclic(4, &[1, -1]);
        assert!(matches!(mixing_length(&bip, 1), Err(Error::Precondition(_))));
        let disc = cyclic(4, &[2, 2]);
        assert!(mixing_length(&disc, 1).is_err());
    }

    #[test]
    fn experiment_whole_vertex_set() {
        let g = cyclic(5, &[1, -1]);
        let cfg = WalkConfig { length: 10, trials: 1000, seed: 3, targets: (0..5).collect() };
        let r = mixing_experiment(&g, 0, &cfg).unwrap();
        assert_eq!(r.frequency, 1.0);
        assert!(r.passed());
    }

    #[test]
    fn experiment_triangle_single_target() {
        let g = cyclic(3, &[1, -1]);
        // Oracle: P^3 e_0 for P = (J - I)/2 gives p_0 = 1/4.
        let exact = exact_distribution(&g, 0, 3);
        assert!((exact[0] - 0.25).abs() < 1e-12);
        let cfg = WalkConfig { length: 3, trials: 100_000, seed: 9, targets: vec![0] };
        let r = mixing_experiment(&g, 0, &cfg).unwrap();
        assert!(r.frequency >= 1.0 / 6.0 && r.frequency <= 0.5);
        assert!((r.frequency - 0.25).abs() < 0.01);
        assert!(r.passed());
        assert!(r.exact.unwrap().tv_within_3sigma);
    }

    #[test]
    fn experiment_rejects_disconnected() {
        let g = cyclic(4, &[2, 2]);
        let cfg = WalkConfig { length: 5, trials: 10, seed: 1, targets: vec![1] };
        assert!(matches!(mixing_experiment(&g, 0, &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn experiment_rejects_short_walks() {
        let g = cyclic(7, &[1, -1]);
        let cfg = WalkConfig { length: 1, trials: 10, seed: 1, targets: vec![1] };
        assert!(mixing_experiment(&g, 0, &cfg).is_err());
    }

    #[test]
    fn wilson_bounds_cover_estimate() {
        let (lo, hi) = wilson_interval(250, 1000, Z_99);
        assert!(lo < 0.25 && hi > 0.25 && hi - lo < 0.08);
        assert_eq!(wilson_interval(0, 10, Z_99).0, 0.0);
    }
}
