//! Two-step meet-in-the-middle path search on expander graphs.
//!
//! Step 1 walks from `A` until `ceil(sqrt(h))` distinct endpoints are known,
//! step 2 walks from `B` until one of them is hit. Both steps use walks of
//! length `ceil(ln(2h))`. Trial `i` of step 1 draws from stream `i` of the
//! master seed, trial `i` of step 2 from stream `2^63 + i`.

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::walks::{random_walk_slots, trial_rng, RegularGraph};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Smallest group order covered by the expected-trials analysis.
pub const MIN_ORDER: usize = 9;

const STEP2_STREAM: u64 = 1 << 63;

/// One traversal of a labeled edge, forwards or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub label: usize,
    pub inverted: bool,
}

impl Step {
    pub fn reversed(self) -> Step {
        Step { label: self.label, inverted: !self.inverted }
    }
}

/// A regular graph whose edge slots carry replayable labels.
pub trait PathGraph: RegularGraph {
    /// The labeled step taken by slot `slot` at `v`.
    fn slot_step(&self, v: usize, slot: usize) -> Step;
    /// Vertex reached by `step` from `v`, if the step is valid there.
    fn apply(&self, v: usize, step: Step) -> Option<usize>;
    /// Number of distinct step labels.
    fn label_count(&self) -> usize;
    fn label_name(&self, label: usize) -> String;
    fn vertex_label(&self, v: usize) -> String;
}

impl PathGraph for CayleyGraph {
    fn slot_step(&self, _v: usize, slot: usize) -> Step {
        Step { label: slot, inverted: false }
    }

    fn apply(&self, v: usize, step: Step) -> Option<usize> {
        (v < CayleyGraph::vertex_count(self) && step.label < CayleyGraph::degree(self))
            .then(|| self.neighbor(v, step.label, step.inverted))
    }

    fn label_count(&self) -> usize {
        CayleyGraph::degree(self)
    }

    fn label_name(&self, label: usize) -> String {
        self.generators()[label].label.clone()
    }

    fn vertex_label(&self, v: usize) -> String {
        self.vertex_name(v).to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCertificate {
    pub start: usize,
    pub end: usize,
    pub steps: Vec<Step>,
}

impl PathCertificate {
    pub fn empty(v: usize) -> Self {
        PathCertificate { start: v, end: v, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Folds the steps onto `start`.
    pub fn replay<G: PathGraph + ?Sized>(&self, g: &G) -> Result<usize> {
        if self.start >= g.vertex_count() {
            return Err(Error::Input(format!("start vertex {} not in graph", self.start)));
        }
        self.steps.iter().enumerate().try_fold(self.start, |v, (i, &s)| {
            g.apply(v, s).ok_or_else(|| Error::Mismatch(format!("step {i} (label {}) is invalid at vertex {v}", s.label)))
        })
    }

    pub fn verify<G: PathGraph + ?Sized>(&self, g: &G) -> bool {
        matches!(self.replay(g), Ok(v) if v == self.end)
    }

    /// The same path walked from `end` back to `start`.
    pub fn reversed(&self) -> Self {
        PathCertificate {
            start: self.end,
            end: self.start,
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.end != next.start {
            return Err(Error::Internal(format!("cannot join path ending at {} with one starting at {}", self.end, next.start)));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&next.steps);
        Ok(PathCertificate { start: self.start, end: next.end, steps })
    }

    /// Certificate with named endpoints and labels.
    pub fn to_json<G: PathGraph + ?Sized>(&self, g: &G) -> serde_json::Value {
        serde_json::json!({
            "start": { "id": self.start, "name": g.vertex_label(self.start) },
            "end": { "id": self.end, "name": g.vertex_label(self.end) },
            "length": self.len(),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "generator": s.label,
                "label": g.label_name(s.label),
                "inverted": s.inverted,
            })).collect::<Vec<_>>(),
        })
    }

    /// Parses [`PathCertificate::to_json`] output, checking names against `g`.
    pub fn from_json<G: PathGraph + ?Sized>(g: &G, v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Input(format!("certificate: missing or malformed {what}"));
        let vertex = |key: &str| -> Result<usize> {
            let id = v[key]["id"].as_u64().ok_or_else(|| bad(key))? as usize;
            if id >= g.vertex_count() {
                return Err(Error::Input(format!("certificate: {key} vertex {id} not in graph")));
            }
            if let Some(name) = v[key]["name"].as_str() {
                if name != g.vertex_label(id) {
                    return Err(Error::Mismatch(format!("certificate: {key} name {name} does not match vertex {id}")));
                }
            }
            Ok(id)
        };
        let start = vertex("start")?;
        let end = vertex("end")?;
        let steps = v["steps"]
            .as_array()
            .ok_or_else(|| bad("steps"))?
            .iter()
            .map(|s| {
                let label = s["generator"].as_u64().ok_or_else(|| bad("generator"))? as usize;
                let inverted = s["inverted"].as_bool().ok_or_else(|| bad("inverted"))?;
                if label >= g.label_count() {
                    return Err(Error::Input(format!("certificate: generator {label} out of range")));
                }
                if let Some(name) = s["label"].as_str() {
                    if name != g.label_name(label) {
                        return Err(Error::Mismatch(format!("certificate: label {name} does not match generator {label}")));
                    }
                }
                Ok(Step { label, inverted })
            })
            .collect::<Result<_>>()?;
        Ok(PathCertificate { start, end, steps })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub step1_trials: u64,
    pub step2_trials: u64,
    pub distinct_neighbors: usize,
    pub h: usize,
    pub walk_length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Walk length; `None` means `ceil(ln(2h))`.
    pub walk_length: Option<usize>,
    /// Per-step trial cap as a multiple of `h`.
    pub cap_factor: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { walk_length: None, cap_factor: 100 }
    }
}

impl SearchConfig {
    fn length(&self, h: usize) -> usize {
        self.walk_length.unwrap_or_else(|| default_walk_length(h))
    }

    fn cap(&self, h: usize) -> u64 {
        self.cap_factor.saturating_mul(h as u64).max(1)
    }
}

/// `ceil(ln(2h))`.
pub fn default_walk_length(h: usize) -> usize {
    (2.0 * h as f64).ln().ceil().max(0.0) as usize
}

/// `ceil(sqrt(h))`.
pub fn neighbor_target(h: usize) -> usize {
    let mut n = (h as f64).sqrt() as usize;
    while n * n < h {
        n += 1;
    }
    while n > 0 && (n - 1) * (n - 1) >= h {
        n -= 1;
    }
    n
}

fn walk_certificate<G: PathGraph + ?Sized>(g: &G, start: usize, length: usize, seed: u64, stream: u64) -> PathCertificate {
    let (end, slots) = random_walk_slots(g, start, length, &mut trial_rng(seed, stream));
    let mut v = start;
    let steps = slots
        .into_iter()
        .map(|j| {
            let s = g.slot_step(v, j);
            v = g.step(v, j);
            s
        })
        .collect();
    PathCertificate { start, end, steps }
}

fn check_vertex<G: RegularGraph + ?Sized>(g: &G, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::Input(format!("vertex {v} not in graph of {} vertices", g.vertex_count())));
    }
    Ok(())
}

fn check_order<G: RegularGraph + ?Sized>(g: &G) -> Result<()> {
    let h = g.vertex_count();
    if h < MIN_ORDER {
        return Err(Error::Precondition(format!(
            "h = {h} is below {MIN_ORDER}; use exhaustive search (shortest_path) instead"
        )));
    }
    Ok(())
}

/// Step 1: walks from `a` until `ceil(sqrt(h))` distinct endpoints are reached.
/// Repeated endpoints count as trials.
pub fn collect_neighbors<G: PathGraph + ?Sized>(
    g: &G,
    a: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<(BTreeMap<usize, PathCertificate>, SearchStats)> {
    check_vertex(g, a)?;
    check_order(g)?;
    let h = g.vertex_count();
    let n = neighbor_target(h);
    let length = cfg.length(h);
    let cap = cfg.cap(h);
    let mut found = BTreeMap::new();
    let mut trials = 0u64;
    while found.len() < n {
        if trials >= cap {
            return Err(Error::TrialCap { cap });
        }
        let cert = walk_certificate(g, a, length, seed, trials);
        trials += 1;
        found.entry(cert.end).or_insert(cert);
    }
    let stats = SearchStats { step1_trials: trials, step2_trials: 0, distinct_neighbors: found.len(), h, walk_length: length };
    Ok((found, stats))
}

/// Step 2: walks from `b` until an endpoint is a key of `neighbors`.
pub fn meet_from_target<G: PathGraph + ?Sized>(
    g: &G,
    b: usize,
    neighbors: &BTreeMap<usize, PathCertificate>,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<(PathCertificate, SearchStats)> {
    check_vertex(g, b)?;
    if neighbors.is_empty() {
        return Err(Error::Input("neighbor map is empty".into()));
    }
    let h = g.vertex_count();
    let length = cfg.length(h);
    let cap = cfg.cap(h);
    let mut trials = 0u64;
    loop {
        if trials >= cap {
            return Err(Error::TrialCap { cap });
        }
        let cert = walk_certificate(g, b, length, seed, STEP2_STREAM | trials);
        trials += 1;
        if neighbors.contains_key(&cert.end) {
            let stats = SearchStats {
                step1_trials: 0,
                step2_trials: trials,
                distinct_neighbors: neighbors.len(),
                h,
                walk_length: length,
            };
            return Ok((cert, stats));
        }
    }
}

/// Path from `a` to `b`: a step-1 certificate `a -> N` followed by the
/// reversal of a step-2 certificate `b -> N`. Replayed before return.
pub fn find_path<G: PathGraph + ?Sized>(
    g: &G,
    a: usize,
    b: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<(PathCertificate, SearchStats)> {
    check_vertex(g, a)?;
    check_vertex(g, b)?;
    if a == b {
        let stats = SearchStats { h: g.vertex_count(), ..SearchStats::default() };
        return Ok((PathCertificate::empty(a), stats));
    }
    let (neighbors, s1) = collect_neighbors(g, a, seed, cfg)?;
    let (back, s2) = meet_from_target(g, b, &neighbors, seed, cfg)?;
    let path = neighbors[&back.end].then(&back.reversed())?;
    if !path.verify(g) {
        return Err(Error::Internal("assembled path fails replay".into()));
    }
    let stats = SearchStats { step2_trials: s2.step2_trials, ..s1 };
    Ok((path, stats))
}

/// Breadth-first shortest path, for graphs too small for [`find_path`].
pub fn shortest_path<G: PathGraph + ?Sized>(g: &G, a: usize, b: usize) -> Result<PathCertificate> {
    check_vertex(g, a)?;
    check_vertex(g, b)?;
    let n = g.vertex_count();
    let mut prev: Vec<Option<(usize, Step)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            break;
        }
        for j in 0..g.degree() {
            let w = g.step(v, j);
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, g.slot_step(v, j)));
                queue.push_back(w);
            }
        }
    }
    if !seen[b] {
        return Err(Error::NotFound(format!("vertex {b} is not reachable from {a}")));
    }
    let mut steps = Vec::new();
    let mut v = b;
    while let Some((u, s)) = prev[v] {
        steps.push(s);
        v = u;
    }
    steps.reverse();
    Ok(PathCertificate { start: a, end: b, steps })
}

/// `4 n h^2 / (2h - 3n)^2`, the bound on the expected number of step-1 trials
/// needed to see `n` distinct endpoints.
pub fn expected_trials_bound(h: u64, n: u64) -> Result<BigRational> {
    let denom = 2 * i128::from(h) - 3 * i128::from(n);
    if denom <= 0 {
        return Err(Error::Precondition(format!("need 3n < 2h, got h = {h}, n = {n}")));
    }
    let num = BigInt::from(4u32) * BigInt::from(n) * BigInt::from(h) * BigInt::from(h);
    Ok(BigRational::new(num, BigInt::from(denom * denom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{FiniteAbelianGroup, Subgroup};
    use crate::cayley::LabeledElement;
    use num_traits::ToPrimitive;

    fn cyclic(n: u64, steps: &[i64]) -> CayleyGraph {
        let g = FiniteAbelianGroup::new(vec![n]).unwrap();
        let gens = steps
            .iter()
            .map(|&s| LabeledElement { element: g.element(&[s]).unwrap(), label: s.to_string() })
            .collect();
        CayleyGraph::build(Subgroup::whole(&g).unwrap(), gens).unwrap()
    }

    #[test]
    fn bound_examples() {
        assert_eq!(expected_trials_bound(9, 3).unwrap(), BigRational::from_integer(12.into()));
        assert_eq!(expected_trials_bound(9, 0).unwrap(), BigRational::from_integer(0.into()));
        let b = expected_trials_bound(100, 10).unwrap();
        assert_eq!(b, BigRational::new(400_000.into(), 28_900.into()));
        assert!((b.to_f64().unwrap() - 13.84).abs() < 0.01);
        assert!(expected_trials_bound(2, 2).is_err());
    }

    #[test]
    fn bound_dominates_per_step_sum() {
        // Oracle: sum of the per-step bounds 4h^2/(2h-3i)^2 over i < n is at most the closed form.
        for (h, n) in [(9u64, 3u64), (100, 10), (400, 20), (25, 5)] {
            let per_step: f64 = (0..n).map(|i| 4.0 * (h * h) as f64 / ((2 * h - 3 * i) as f64).powi(2)).sum();
            let closed = expected_trials_bound(h, n).unwrap().to_f64().unwrap();
            assert!(per_step <= closed + 1e-12, "h={h} n={n}: {per_step} > {closed}");
        }
    }

    #[test]
    fn neighbor_target_is_ceil_sqrt() {
        let got: Vec<usize> = [1, 2, 4, 9, 10, 16, 17, 400].iter().map(|&h| neighbor_target(h)).collect();
        assert_eq!(got, vec![1, 2, 2, 3, 4, 4, 5, 20]);
    }

    #[test]
    fn collect_on_z9() {
        let g = cyclic(9, &[1, -1, 2, -2]);
        let (map, stats) = collect_neighbors(&g, 0, 5, &SearchConfig::default()).unwrap();
        assert_eq!(map.len(), 3);
        assert_eq!(stats.distinct_neighbors, 3);
        assert_eq!(stats.walk_length, 3);
        for (end, cert) in &map {
            assert_eq!(cert.end, *end);
            assert!(cert.verify(&g));
            assert_eq!(cert.len(), 3);
        }
    }

    #[test]
    fn small_order_rejected() {
        let g = cyclic(5, &[1, -1]);
        assert!(matches!(collect_neighbors(&g, 0, 1, &SearchConfig::default()), Err(Error::Precondition(_))));
        assert!(find_path(&g, 0, 2, 1, &SearchConfig::default()).is_err());
        let p = shortest_path(&g, 0, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.verify(&g));
    }

    #[test]
    fn same_endpoint_gives_empty_path() {
        let g = cyclic(5, &[1, -1]);
        let (p, _) = find_path(&g, 3, 3, 1, &SearchConfig::default()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn zero_length_meet_hits_immediately() {
        let g = cyclic(9, &[1, -1]);
        let map = BTreeMap::from([(4, PathCertificate::empty(4))]);
        let cfg = SearchConfig { walk_length: Some(0), ..SearchConfig::default() };
        let (cert, stats) = meet_from_target(&g, 4, &map, 1, &cfg).unwrap();
        assert_eq!(stats.step2_trials, 1);
        assert!(cert.is_empty());
    }

    #[test]
    fn unreachable_keys_hit_cap() {
        let g = cyclic(18, &[2, -2]);
        let map = BTreeMap::from([(1, PathCertificate::empty(1))]);
        let r = meet_from_target(&g, 0, &map, 1, &SearchConfig::default());
        assert!(matches!(r, Err(Error::TrialCap { cap: 1800 })));
    }

    #[test]
    fn paths_on_z25_replay() {
        let g = cyclic(25, &[1, -1, 3, -3]);
        let max = 2 * default_walk_length(25);
        // Length-4 walks on odd steps only reach 13 of the 25 offsets, so step 2
        // can miss every collected neighbor; that must surface as the trial cap.
        let mut found = 0;
        for seed in 0..40u64 {
            let (a, b) = ((seed * 7) as usize % 25, (seed * 11 + 3) as usize % 25);
            match find_path(&g, a, b, seed, &SearchConfig::default()) {
                Ok((p, _)) => {
                    assert_eq!((p.start, p.end), (a, b));
                    assert!(p.verify(&g));
                    assert!(p.len() <= max);
                    found += 1;
                }
                Err(e) => assert!(matches!(e, Error::TrialCap { .. }), "{e}"),
            }
        }
        assert!(found >= 20, "only {found} of 40 searches succeeded");
    }

    #[test]
    fn deterministic_given_seed() {
        let g = cyclic(25, &[1, -1, 3, -3]);
        let x = find_path(&g, 0, 13, 77, &SearchConfig::default()).unwrap();
        let y = find_path(&g, 0, 13, 77, &SearchConfig::default()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn json_round_trip_and_tamper() {
        let g = cyclic(25, &[1, -1, 3, -3]);
        let (p, _) = find_path(&g, 0, 13, 3, &SearchConfig::default()).unwrap();
        let mut v = p.to_json(&g);
        assert_eq!(PathCertificate::from_json(&g, &v).unwrap(), p);
        let flag = v["steps"][0]["inverted"].as_bool().unwrap();
        v["steps"][0]["inverted"] = (!flag).into();
        assert!(!PathCertificate::from_json(&g, &v).unwrap().verify(&g));
    }
}
