use super::curve::{Curve, Point};
use super::graph::IsogenyGraph;
use super::isogeny::isogeny_eval;
use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};
use crate::pathfind::PathCertificate;
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;

/// `r` in `[0, n)` with `q = r p`, by baby-step giant-step.
pub fn baby_step_giant_step(curve: &Curve, p: &Point, q: &Point, n: u64) -> Option<u64> {
    let m = (n as f64).sqrt().ceil().max(1.0) as u64;
    let mut table = HashMap::with_capacity(m as usize);
    let mut acc = Point::Infinity;
    for j in 0..m {
        table.entry(acc).or_insert(j);
        acc = curve.add(&acc, p);
    }
    let giant = curve.neg(&curve.mul(m, p));
    let mut gamma = *q;
    for i in 0..=m {
        if let Some(&j) = table.get(&gamma) {
            let r = (i * m + j) % n;
            if curve.mul(r, p) == *q {
                return Some(r);
            }
        }
        gamma = curve.add(&gamma, &giant);
    }
    None
}

/// Edge ids realizing a certificate as a chain of forward isogenies.
pub fn forward_edges(ig: &IsogenyGraph, cert: &PathCertificate) -> Result<Vec<usize>> {
    let mut v = cert.start;
    let mut out = Vec::with_capacity(cert.len());
    for (i, &step) in cert.steps.iter().enumerate() {
        let id = ig
            .forward_edge(v, step)
            .ok_or_else(|| Error::Mismatch(format!("step {i} cannot be taken from vertex {v}")))?;
        out.push(id);
        v = ig.edges()[id].target;
    }
    if v != cert.end {
        return Err(Error::Mismatch(format!("path ends at {v}, certificate claims {}", cert.end)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferStep {
    pub edge: usize,
    pub ell: u64,
    pub source_j: u64,
    pub target_j: u64,
    pub p_image: Point,
    pub q_image: Point,
}

#[derive(Debug, Clone, Serialize)]
pub struct DlpTranscript {
    pub source_j: u64,
    pub order: u64,
    pub p: Point,
    pub q: Point,
    pub steps: Vec<TransferStep>,
    pub recovered: u64,
}

/// Solves `q = r p` by pushing both points along `path` (edge ids of
/// consecutive isogenies), solving at the end, and verifying `r` at the start.
pub fn transfer_dlp(ig: &IsogenyGraph, start: usize, path: &[usize], p: Point, q: Point, n: u64) -> Result<DlpTranscript> {
    let source = *ig
        .vertices()
        .get(start)
        .ok_or_else(|| Error::Input(format!("start vertex {start} not in graph")))?;
    if n == 0 || !source.contains(&p) || !source.contains(&q) {
        return Err(Error::Input("points must lie on the start curve and the order must be positive".into()));
    }
    if source.mul(n, &p) != Point::Infinity {
        return Err(Error::Input(format!("{n} does not annihilate P")));
    }
    let degree: u128 = path.iter().map(|&id| ig.edges().get(id).map_or(1, |e| e.ell as u128)).product();
    let bad = path.iter().filter_map(|&id| ig.edges().get(id)).find(|e| gcd(e.ell as i128, n as i128) != 1);
    if let Some(e) = bad {
        return Err(Error::Precondition(format!("order {n} is not coprime to the isogeny degree {} (total {degree})", e.ell)));
    }
    let mut v = start;
    let (mut pi, mut qi) = (p, q);
    let mut steps = Vec::with_capacity(path.len());
    for &id in path {
        let e = ig.edges().get(id).ok_or_else(|| Error::Input(format!("edge {id} not in graph")))?;
        if e.source != v {
            return Err(Error::Input(format!("edge {id} does not start at vertex {v}")));
        }
        let curve = &ig.vertices()[v];
        pi = isogeny_eval(curve, e, &pi)?;
        qi = isogeny_eval(curve, e, &qi)?;
        v = e.target;
        steps.push(TransferStep { edge: id, ell: e.ell, source_j: e.source_j, target_j: e.target_j, p_image: pi, q_image: qi });
    }
    let target = &ig.vertices()[v];
    let r = baby_step_giant_step(target, &pi, &qi, n)
        .ok_or_else(|| Error::Mismatch("no discrete logarithm at the target: inconsistent inputs".into()))?;
    if source.mul(r, &p) != q {
        return Err(Error::Mismatch(format!("recovered r = {r} fails on the source curve")));
    }
    Ok(DlpTranscript { source_j: source.j, order: n, p, q, steps, recovered: r })
}

/// A point of the largest prime order dividing `#E` that is coprime to
/// every isogeny degree of the graph.
pub fn dlp_base_point<R: Rng>(ig: &IsogenyGraph, v: usize, rng: &mut R) -> Result<(Point, u64)> {
    let curve = &ig.vertices()[v];
    let order = curve.order();
    let n = factorize(order)
        .into_iter()
        .map(|(q, _)| q)
        .filter(|q| !ig.primes().contains(q))
        .max()
        .ok_or_else(|| Error::Precondition(format!("#E = {order} has no prime factor coprime to the degrees")))?;
    loop {
        let pt = curve.mul(order / n, &curve.random_point(rng));
        if pt != Point::Infinity {
            return Ok((pt, n));
        }
    }
}

/// A planted instance `(P, Q = rP, n, r)` on vertex `v` with `r` uniform in `[0, n)`.
pub fn planted_instance<R: Rng>(ig: &IsogenyGraph, v: usize, rng: &mut R) -> Result<(Point, Point, u64, u64)> {
    let (p, n) = dlp_base_point(ig, v, rng)?;
    let r = rng.random_range(0..n);
    Ok((p, ig.vertices()[v].mul(r, &p), n, r))
}
