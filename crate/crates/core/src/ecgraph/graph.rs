use super::curve::{count_with_table, Curve};
use super::field::Fp;
use super::isogeny::{rational_kernels, velu_codomain, IsogenyEdge};
use crate::abelian::Subgroup;
use crate::arith::{is_prime, kronecker};
use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::pathfind::{PathGraph, Step};
use crate::quadform::{class_group, prime_form, Discriminant, Generator};
use crate::walks::RegularGraph;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// The Frobenius discriminant `t^2 - 4p`, required to be fundamental.
pub fn frobenius_discriminant(p: u64, t: i64) -> Result<Discriminant> {
    Fp::new(p)?;
    if t.rem_euclid(p as i64) == 0 {
        return Err(Error::Precondition(format!("t = {t} is divisible by p = {p}: supersingular")));
    }
    let d = t * t - 4 * p as i64;
    if d >= 0 {
        return Err(Error::Input(format!("t = {t} violates the Hasse bound for p = {p}")));
    }
    let disc = Discriminant::new(d)?;
    if !disc.is_fundamental() {
        return Err(Error::Precondition(format!(
            "t^2 - 4p = {d} is not fundamental (conductor {}); vertical structure is not handled",
            disc.conductor()
        )));
    }
    Ok(disc)
}

/// One curve of trace `t` per j-invariant in the isogeny class, sorted by j.
pub fn enumerate_isogeny_class(p: u64, t: i64) -> Result<Vec<Curve>> {
    let disc = frobenius_discriminant(p, t)?;
    let k = Fp::new(p)?;
    let chi = k.legendre_table();
    let trace = |a: u64, b: u64| p as i64 + 1 - count_with_table(&k, &chi, a, b) as i64;
    let nonresidue = (2..p).find(|&d| chi[d as usize] == -1).expect("p is odd");
    let j1728 = 1728 % p;
    let found: Vec<Option<Curve>> = (0..p)
        .into_par_iter()
        .map(|j| {
            // A curve with j = 0 (resp. 1728) has CM by Z[zeta_3] (resp. Z[i]); with a
            // fundamental Frobenius discriminant that forces D = -3 (resp. -4).
            let scan = |make: &dyn Fn(u64) -> (u64, u64)| {
                (1..p).map(make).find(|&(a, b)| trace(a, b) == t).map(|(a, b)| Curve { p, a, b, j, t })
            };
            if j == 0 {
                return if disc.value() == -3 { scan(&|b| (0, b)) } else { None };
            }
            if j == j1728 {
                return if disc.value() == -4 { scan(&|a| (a, 0)) } else { None };
            }
            let c = k.sub(j1728, j);
            let a = k.mul(3, k.mul(j, c));
            let b = k.mul(2, k.mul(j, k.mul(c, c)));
            let t0 = trace(a, b);
            if t0 == t {
                Some(Curve { p, a, b, j, t })
            } else if t0 == -t {
                let d2 = k.mul(nonresidue, nonresidue);
                Some(Curve { p, a: k.mul(d2, a), b: k.mul(k.mul(d2, nonresidue), b), j, t })
            } else {
                None
            }
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// An `l`-isogeny out of a curve, before it is placed in a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isogeny {
    pub ell: u64,
    pub kernel: Vec<u64>,
    pub codomain: Curve,
}

/// All isogenies of odd prime degree `l` with `F_p`-rational kernel.
pub fn rational_l_isogenies(curve: &Curve, ell: u64) -> Result<Vec<Isogeny>> {
    rational_kernels(curve, ell)?
        .into_iter()
        .map(|kernel| {
            let (a, b) = velu_codomain(curve, &kernel);
            let codomain = Curve::new(curve.p, a, b)?;
            Ok(Isogeny { ell, kernel, codomain })
        })
        .collect()
}

/// Horizontal isogeny graph of one ordinary isogeny class over `F_p`.
#[derive(Debug, Clone)]
pub struct IsogenyGraph {
    p: u64,
    t: i64,
    primes: Vec<u64>,
    vertices: Vec<Curve>,
    edges: Vec<IsogenyEdge>,
    /// Edge ids leaving each vertex, in edge order.
    outgoing: Vec<Vec<usize>>,
}

fn validate_primes(p: u64, primes: &[u64]) -> Result<Vec<u64>> {
    let mut l = primes.to_vec();
    l.sort_unstable();
    l.dedup();
    for &ell in &l {
        if ell < 3 || !is_prime(ell) || ell == p {
            return Err(Error::Input(format!("isogeny degree {ell} must be an odd prime different from p")));
        }
    }
    Ok(l)
}

pub fn build_isogeny_graph(p: u64, t: i64, primes: &[u64]) -> Result<IsogenyGraph> {
    let primes = validate_primes(p, primes)?;
    let vertices = enumerate_isogeny_class(p, t)?;
    let index: BTreeMap<u64, usize> = vertices.iter().enumerate().map(|(i, c)| (c.j, i)).collect();
    let per_vertex: Vec<Vec<IsogenyEdge>> = vertices
        .par_iter()
        .enumerate()
        .map(|(v, curve)| {
            let mut out = Vec::new();
            for &ell in &primes {
                for iso in rational_l_isogenies(curve, ell)? {
                    if iso.codomain.t != t {
                        return Err(Error::Internal(format!(
                            "codomain of a {ell}-isogeny from j = {} has trace {}, expected {t}",
                            curve.j, iso.codomain.t
                        )));
                    }
                    let target = *index.get(&iso.codomain.j).ok_or_else(|| {
                        Error::Internal(format!("codomain j = {} is not in the isogeny class", iso.codomain.j))
                    })?;
                    let twist_u = iso.codomain.isomorphism_to(&vertices[target]).ok_or_else(|| {
                        Error::Internal(format!("codomain is not isomorphic to the vertex curve j = {}", iso.codomain.j))
                    })?;
                    out.push(IsogenyEdge {
                        ell,
                        source: v,
                        target,
                        source_j: curve.j,
                        target_j: iso.codomain.j,
                        kernel: iso.kernel,
                        codomain: (iso.codomain.a, iso.codomain.b),
                        twist_u,
                    });
                }
            }
            out.sort_by(|x, y| (x.ell, x.target_j, &x.kernel).cmp(&(y.ell, y.target_j, &y.kernel)));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let edges: Vec<IsogenyEdge> = per_vertex.into_iter().flatten().collect();
    let graph = IsogenyGraph::from_parts(p, t, primes, vertices, edges);
    graph.check_dual_symmetry()?;
    if graph.outgoing.iter().any(|o| o.len() != graph.outgoing[0].len()) {
        return Err(Error::Internal("isogeny graph is not regular".into()));
    }
    Ok(graph)
}

impl IsogenyGraph {
    fn from_parts(p: u64, t: i64, primes: Vec<u64>, vertices: Vec<Curve>, edges: Vec<IsogenyEdge>) -> Self {
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (id, e) in edges.iter().enumerate() {
            if e.source < vertices.len() {
                outgoing[e.source].push(id);
            }
        }
        IsogenyGraph { p, t, primes, vertices, edges, outgoing }
    }

    /// The same graph with its edge list replaced, without validation.
    /// Intended for negative controls.
    pub fn with_edges(&self, edges: Vec<IsogenyEdge>) -> Self {
        Self::from_parts(self.p, self.t, self.primes.clone(), self.vertices.clone(), edges)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn discriminant(&self) -> i64 {
        self.t * self.t - 4 * self.p as i64
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn vertices(&self) -> &[Curve] {
        &self.vertices
    }

    pub fn edges(&self) -> &[IsogenyEdge] {
        &self.edges
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn vertex_of_j(&self, j: u64) -> Option<usize> {
        self.vertices.iter().position(|c| c.j == j)
    }

    /// Directed edge counts `(source, target, l) -> multiplicity`.
    fn edge_counts(&self) -> BTreeMap<(usize, usize, u64), usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry((e.source, e.target, e.ell)).or_insert(0) += 1;
        }
        m
    }

    /// Every `l`-edge `v -> w` is matched by an `l`-edge `w -> v`.
    pub fn check_dual_symmetry(&self) -> Result<()> {
        let counts = self.edge_counts();
        for (&(v, w, ell), &n) in &counts {
            let back = counts.get(&(w, v, ell)).copied().unwrap_or(0);
            if back != n {
                return Err(Error::Mismatch(format!(
                    "{n} {ell}-edges from vertex {v} to {w} but {back} back"
                )));
            }
        }
        Ok(())
    }

    /// Number of `l`-edges leaving each vertex.
    pub fn degrees_for(&self, ell: u64) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.ell == ell) {
            if e.source < d.len() {
                d[e.source] += 1;
            }
        }
        d
    }

    /// Adjacency matrix of the colour `l`, or of all colours.
    pub fn adjacency(&self, ell: Option<u64>) -> Vec<Vec<u32>> {
        let n = self.vertices.len();
        let mut a = vec![vec![0u32; n]; n];
        for e in self.edges.iter().filter(|e| ell.is_none_or(|l| e.ell == l)) {
            if e.source < n && e.target < n {
                a[e.source][e.target] += 1;
            }
        }
        a
    }

    /// Eigenvalues of the adjacency matrix, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        sorted_eigenvalues(&self.adjacency(None))
    }

    /// Isogenies from `v` along a labeled step, forwards.
    ///
    /// Forward steps use their own edge; a backward step over `e: w -> v`
    /// uses an edge `v -> w` of the same degree, which exists by duality.
    pub fn forward_edge(&self, v: usize, step: Step) -> Option<usize> {
        let e = self.edges.get(step.label)?;
        if !step.inverted {
            return (e.source == v).then_some(step.label);
        }
        if e.target != v {
            return None;
        }
        self.outgoing[v]
            .iter()
            .copied()
            .find(|&id| self.edges[id].target == e.source && self.edges[id].ell == e.ell)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph isogeny {\n");
        for (v, c) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{}\"];", c.j);
        }
        // Each undirected edge appears once per direction; keep the first copy.
        let mut pending: BTreeMap<(usize, usize, u64), usize> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.target, e.source, e.ell);
            match pending.get_mut(&key) {
                Some(n) if *n > 0 => *n -= 1,
                _ => {
                    *pending.entry((e.source, e.target, e.ell)).or_insert(0) += 1;
                    let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.source, e.target, e.ell);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "t": self.t,
            "discriminant": self.discriminant(),
            "primes": self.primes,
            "degree": self.outgoing.first().map_or(0, |o| o.len()),
            "vertices": self.vertices.iter().enumerate().map(|(i, c)| serde_json::json!({
                "id": i,
                "name": c.j.to_string(),
                "a": c.a,
                "b": c.b,
            })).collect::<Vec<_>>(),
            "edges": self.edges,
            "adjacency": self.outgoing.iter()
                .map(|o| o.iter().map(|&id| self.edges[id].target).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

fn sorted_eigenvalues(adj: &[Vec<u32>]) -> Vec<f64> {
    let n = adj.len();
    let m = DMatrix::from_fn(n, n, |i, j| f64::from(adj[i][j]));
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

impl RegularGraph for IsogenyGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn degree(&self) -> usize {
        self.outgoing.first().map_or(0, |o| o.len())
    }

    fn step(&self, v: usize, slot: usize) -> usize {
        self.edges[self.outgoing[v][slot]].target
    }

    fn nontrivial_bound(&self) -> Result<f64> {
        let values = self.spectrum();
        Ok(values.iter().skip(1).map(|l| l.abs()).fold(0.0, f64::max))
    }
}

impl PathGraph for IsogenyGraph {
    fn slot_step(&self, v: usize, slot: usize) -> Step {
        Step { label: self.outgoing[v][slot], inverted: false }
    }

    fn apply(&self, v: usize, step: Step) -> Option<usize> {
        let e = self.edges.get(step.label)?;
        match step.inverted {
            false => (e.source == v).then_some(e.target),
            true => (e.target == v).then_some(e.source),
        }
    }

    fn label_count(&self) -> usize {
        self.edges.len()
    }

    fn label_name(&self, label: usize) -> String {
        let e = &self.edges[label];
        format!("{}:{}->{}", e.ell, e.source_j, e.target_j)
    }

    fn vertex_label(&self, v: usize) -> String {
        self.vertices[v].j.to_string()
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub discriminant: i64,
    pub class_number: u64,
    pub vertex_count: usize,
    pub checks: Vec<Check>,
    pub verdict: String,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Graphs up to this size are also matched by exhaustive isomorphism search.
pub const ISOMORPHISM_SEARCH_LIMIT: usize = 25;

const SPECTRUM_TOLERANCE: f64 = 1e-6;

/// The Cayley graph of the class group on the prime forms above `primes`.
pub fn predicted_cayley_graph(p: u64, t: i64, primes: &[u64]) -> Result<CayleyGraph> {
    let disc = frobenius_discriminant(p, t)?;
    let cl = class_group(disc)?;
    let mut gens = Vec::new();
    for &ell in &validate_primes(p, primes)? {
        if let Some(pf) = prime_form(&disc, ell)? {
            for (form, class) in pf.forms.iter().zip(&pf.classes) {
                let element = cl
                    .element_of(class)
                    .ok_or_else(|| Error::Internal(format!("class of {form} missing")))?
                    .clone();
                gens.push(Generator { ell, b: form.b, class: *class, element });
            }
        }
    }
    CayleyGraph::from_class_group(&cl, Subgroup::whole(cl.group())?, &gens)
}

/// Checks an isogeny graph against `Cay(Cl(t^2 - 4p), S_L)`: vertex counts,
/// sorted spectra, the per-prime degree law, and for small graphs an
/// explicit degree-coloured isomorphism.
pub fn compare_to_cayley(ig: &IsogenyGraph) -> Result<ComparisonReport> {
    let cay = predicted_cayley_graph(ig.p, ig.t, &ig.primes)?;
    let d = ig.discriminant();
    let h = cay.vertex_count();
    let n = ig.vertices.len();
    let mut checks = Vec::new();

    checks.push(Check {
        name: "vertex_count".into(),
        passed: n == h,
        detail: format!("isogeny graph {n}, class number {h}"),
    });

    let (passed, detail) = if n == h {
        let (s1, s2) = (ig.spectrum(), cay.spectrum_numeric()?);
        let gap = s1.iter().zip(&s2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        (gap <= SPECTRUM_TOLERANCE, format!("max eigenvalue difference {gap:.3e}"))
    } else {
        (false, "vertex counts differ".into())
    };
    checks.push(Check { name: "spectrum".into(), passed, detail });

    let mut problems = Vec::new();
    for &ell in &ig.primes {
        let want = (1 + kronecker(d, ell)) as usize;
        let cay_count = cay.generators().iter().filter(|g| g.label.starts_with(&format!("{ell}:"))).count();
        if cay_count != want {
            problems.push(format!("Cayley side has {cay_count} generators of norm {ell}, expected {want}"));
        }
        if let Some((v, got)) = ig.degrees_for(ell).into_iter().enumerate().find(|&(_, got)| got != want) {
            problems.push(format!("vertex {v} has {got} {ell}-edges, expected {want}"));
        }
    }
    checks.push(Check {
        name: "degree_law".into(),
        passed: problems.is_empty(),
        detail: if problems.is_empty() { "1 + Kronecker(D, l) for every l".into() } else { problems.join("; ") },
    });

    if n == h && n <= ISOMORPHISM_SEARCH_LIMIT {
        let iso = coloured_isomorphism(ig, &cay);
        checks.push(Check {
            name: "isomorphism".into(),
            passed: iso.is_some(),
            detail: match &iso {
                Some(_) => "degree-coloured isomorphism found".into(),
                None => "no degree-coloured isomorphism exists".into(),
            },
        });
    }

    let all = checks.iter().all(|c| c.passed);
    Ok(ComparisonReport {
        discriminant: d,
        class_number: h as u64,
        vertex_count: n,
        checks,
        verdict: if all { "PASS" } else { "FAIL" }.into(),
    })
}

/// A bijection from isogeny vertices to Cayley vertices preserving the
/// number of `l`-edges between every pair, for every `l`.
pub fn coloured_isomorphism(ig: &IsogenyGraph, cay: &CayleyGraph) -> Option<Vec<usize>> {
    let n = ig.vertices.len();
    if n != cay.vertex_count() {
        return None;
    }
    let left: Vec<Vec<Vec<u32>>> = ig.primes.iter().map(|&l| ig.adjacency(Some(l))).collect();
    let right: Vec<Vec<Vec<u32>>> = ig
        .primes
        .iter()
        .map(|&l| {
            let mut a = vec![vec![0u32; n]; n];
            let prefix = format!("{l}:");
            for (j, g) in cay.generators().iter().enumerate() {
                if g.label.starts_with(&prefix) {
                    for (v, row) in a.iter_mut().enumerate() {
                        row[cay.neighbor(v, j, false)] += 1;
                    }
                }
            }
            a
        })
        .collect();
    // Visit vertices in breadth-first order so each one is constrained by a mapped neighbour.
    let all = ig.adjacency(None);
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        order.push(s);
        let mut i = order.len() - 1;
        while i < order.len() {
            let v = order[i];
            for w in 0..n {
                if all[v][w] > 0 && !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut budget = 5_000_000u64;
    if extend(0, &order, &left, &right, &mut map, &mut used, &mut budget) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    depth: usize,
    order: &[usize],
    left: &[Vec<Vec<u32>>],
    right: &[Vec<Vec<u32>>],
    map: &mut [usize],
    used: &mut [bool],
    budget: &mut u64,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for cand in 0..map.len() {
        if used[cand] {
            continue;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let consistent = left.iter().zip(right).all(|(l, r)| {
            l[v][v] == r[cand][cand]
                && order[..depth].iter().all(|&u| l[v][u] == r[cand][map[u]] && l[u][v] == r[map[u]][cand])
        });
        if consistent {
            map[v] = cand;
            used[cand] = true;
            if extend(depth + 1, order, left, right, map, used, budget) {
                return true;
            }
            used[cand] = false;
            map[v] = usize::MAX;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::class_group;

    fn class_number(d: i64) -> usize {
        class_group(Discriminant::new(d).unwrap()).unwrap().order() as usize
    }

    /// Oracle: every j-invariant for which some (a, b) over F_p has trace t.
    fn brute_js(p: u64, t: i64) -> Vec<u64> {
        let mut js = Vec::new();
        for a in 0..p {
            for b in 0..p {
                if let Ok(c) = Curve::new(p, a, b) {
                    if c.t == t && !js.contains(&c.j) {
                        js.push(c.j);
                    }
                }
            }
        }
        js.sort();
        js
    }

    #[test]
    fn class_of_31_3() {
        let cls = enumerate_isogeny_class(31, 3).unwrap();
        let js: Vec<u64> = cls.iter().map(|c| c.j).collect();
        assert_eq!(js, brute_js(31, 3));
        assert_eq!(js.len(), class_number(-115));
        assert_eq!(js.len(), 2);
        for c in &cls {
            assert_eq!(Curve::new(31, c.a, c.b).unwrap().t, 3);
        }
    }

    #[test]
    fn class_of_31_1() {
        let js: Vec<u64> = enumerate_isogeny_class(31, 1).unwrap().iter().map(|c| c.j).collect();
        assert_eq!(js, brute_js(31, 1));
        assert_eq!(js.len(), class_number(-123));
    }

    #[test]
    fn non_fundamental_rejected() {
        assert!(matches!(enumerate_isogeny_class(13, 4), Err(Error::Precondition(_))));
        assert!(enumerate_isogeny_class(31, 0).is_err());
        assert!(enumerate_isogeny_class(31, 12).is_err());
    }

    #[test]
    fn graph_31_3_with_7() {
        let g = build_isogeny_graph(31, 3, &[7]).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.degrees_for(7), vec![2, 2]);
        let r = compare_to_cayley(&g).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(g.to_dot().contains("label=\"7\""));
    }

    #[test]
    fn inert_and_empty_prime_sets() {
        // Kronecker(-115, 3) = -1.
        assert_eq!(kronecker(-115, 3), -1);
        let g = build_isogeny_graph(31, 3, &[3]).unwrap();
        assert!(g.edges().is_empty());
        assert!(compare_to_cayley(&g).unwrap().passed());
        let g = build_isogeny_graph(31, 3, &[]).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert!(compare_to_cayley(&g).unwrap().passed());
    }

    #[test]
    fn corrupted_edges_fail() {
        let g = build_isogeny_graph(31, 3, &[7]).unwrap();
        let mut edges = g.edges().to_vec();
        edges.pop();
        let bad = g.with_edges(edges);
        assert!(bad.check_dual_symmetry().is_err());
        let r = compare_to_cayley(&bad).unwrap();
        assert!(!r.passed());
        assert!(r.failed_checks().contains(&"degree_law"));
    }

    #[test]
    fn forward_edges_follow_backward_steps() {
        let g = build_isogeny_graph(31, 3, &[7]).unwrap();
        for (id, e) in g.edges().iter().enumerate() {
            let back = g.forward_edge(e.target, Step { label: id, inverted: true }).unwrap();
            assert_eq!(g.edges()[back].source, e.target);
            assert_eq!(g.edges()[back].target, e.source);
        }
    }
}
