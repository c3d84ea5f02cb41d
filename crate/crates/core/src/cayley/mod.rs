//! Cayley multigraphs `Cay(H, S)` on explicit subgroups, their spectra and
//! expansion, and the scan for the smallest expanding norm bound.

mod scan;
mod spectrum;

pub use scan::{
    eigenvalue_prediction, expander_scan, find_expander_bound, li, EstimateParams, ExpanderScan, Prediction,
    ScanRow, SCAN_CSV_HEADER,
};
pub use spectrum::{Expansion, Spectrum, NUMERIC_SIZE_LIMIT};

use crate::abelian::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::error::{Error, Result};
use crate::quadform::{ClassGroup, Generator};
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt::Write as _;

/// One generator slot of a Cayley graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledElement {
    pub element: GroupElement,
    pub label: String,
}

/// `Cay(H, S)` for a multiset `S = S^{-1}` inside `H`. Every vertex has
/// one outgoing edge slot per member of `S`, self-loops included.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    subgroup: Subgroup,
    generators: Vec<LabeledElement>,
    vertex_names: Vec<String>,
    /// `table[v][j]` is the vertex reached from `v` through slot `j`.
    table: Vec<Vec<usize>>,
    /// `inverse_table[v][j]`: vertex reached through the inverse of slot `j`.
    inverse_table: Vec<Vec<usize>>,
}

fn coords_name(g: &GroupElement) -> String {
    let parts: Vec<String> = g.coords.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Whether a multiset of elements is closed under inversion (with multiplicity).
pub fn is_inverse_closed(group: &FiniteAbelianGroup, elems: &[GroupElement]) -> bool {
    let mut a: Vec<GroupElement> = elems.to_vec();
    let mut b: Vec<GroupElement> = elems.iter().map(|g| group.inv(g).expect("element of group")).collect();
    a.sort();
    b.sort();
    a == b
}

impl CayleyGraph {
    pub fn build(subgroup: Subgroup, generators: Vec<LabeledElement>) -> Result<Self> {
        let ambient = subgroup.ambient().clone();
        for s in &generators {
            if !subgroup.contains(&s.element) {
                return Err(Error::Input(format!(
                    "generator {} = {} is not in the subgroup",
                    s.label,
                    coords_name(&s.element)
                )));
            }
        }
        let elems: Vec<GroupElement> = generators.iter().map(|s| s.element.clone()).collect();
        if !is_inverse_closed(&ambient, &elems) {
            return Err(Error::Input("generator multiset is not closed under inversion".into()));
        }
        let n = subgroup.elements().len();
        let inverses: Vec<GroupElement> = elems.iter().map(|s| ambient.inv(s).expect("checked")).collect();
        let mut table = Vec::with_capacity(n);
        let mut inverse_table = Vec::with_capacity(n);
        for h in subgroup.elements() {
            let fwd = elems
                .iter()
                .map(|s| subgroup.position(&ambient.op_unchecked(s, h)).expect("subgroup is closed"))
                .collect();
            let back = inverses
                .iter()
                .map(|s| subgroup.position(&ambient.op_unchecked(s, h)).expect("subgroup is closed"))
                .collect();
            table.push(fwd);
            inverse_table.push(back);
        }
        let vertex_names = subgroup.elements().iter().map(coords_name).collect();
        Ok(CayleyGraph { subgroup, generators, vertex_names, table, inverse_table })
    }

    /// Cayley graph of a subgroup of a class group on a prime-form multiset,
    /// with vertices named by their reduced forms.
    pub fn from_class_group(cl: &ClassGroup, subgroup: Subgroup, gens: &[Generator]) -> Result<Self> {
        let labeled = gens
            .iter()
            .map(|g| LabeledElement { element: g.element.clone(), label: g.label() })
            .collect();
        let mut graph = Self::build(subgroup, labeled)?;
        graph.vertex_names = graph
            .subgroup
            .elements()
            .iter()
            .map(|g| cl.class_of(g).map(|c| c.to_string()).unwrap_or_else(|| coords_name(g)))
            .collect();
        Ok(graph)
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn generators(&self) -> &[LabeledElement] {
        &self.generators
    }

    pub fn vertex_count(&self) -> usize {
        self.table.len()
    }

    /// `k = |S|`, counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.generators.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_of(&self, g: &GroupElement) -> Option<usize> {
        self.subgroup.position(g)
    }

    pub fn element(&self, v: usize) -> &GroupElement {
        &self.subgroup.elements()[v]
    }

    /// Vertex reached from `v` through slot `j`, or its inverse.
    pub fn neighbor(&self, v: usize, slot: usize, inverted: bool) -> usize {
        if inverted {
            self.inverse_table[v][slot]
        } else {
            self.table[v][slot]
        }
    }

    /// Dense adjacency matrix with multiplicities.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u32; n]; n];
        for (v, row) in self.table.iter().enumerate() {
            for &w in row {
                a[v][w] += 1;
            }
        }
        a
    }

    /// Connected components by breadth-first search.
    pub fn components(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.table[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Pairs each slot with a slot holding the inverse element.
    fn slot_involution(&self) -> Vec<usize> {
        let ambient = self.subgroup.ambient();
        let k = self.degree();
        let mut partner = vec![usize::MAX; k];
        for j in 0..k {
            if partner[j] != usize::MAX {
                continue;
            }
            let inv = ambient.inv(&self.generators[j].element).expect("element");
            let mate = (j + 1..k).find(|&i| partner[i] == usize::MAX && self.generators[i].element == inv);
            match mate {
                Some(i) => {
                    partner[j] = i;
                    partner[i] = j;
                }
                None => partner[j] = j,
            }
        }
        partner
    }

    /// Undirected edge list `(u, w, slot)`, one entry per edge.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, usize)> {
        let partner = self.slot_involution();
        let mut edges = Vec::new();
        for (v, row) in self.table.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                let keep = match partner[j].cmp(&j) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => v <= w,
                };
                if keep {
                    edges.push((v, w, j));
                }
            }
        }
        edges
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph cayley {\n");
        for (v, name) in self.vertex_names.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{name}\"];");
        }
        for (v, w, j) in self.undirected_edges() {
            let _ = writeln!(out, "  v{v} -- v{w} [label=\"{}\"];", self.generators[j].label);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "invariants": self.subgroup.ambient().invariants(),
            "degree": self.degree(),
            "vertices": self.vertex_names.iter().enumerate().map(|(i, name)| serde_json::json!({
                "id": i,
                "name": name,
                "coords": self.subgroup.elements()[i].coords,
            })).collect::<Vec<_>>(),
            "generators": self.generators,
            "adjacency": self.table,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::{class_group, generating_multiset, Discriminant};

    pub(crate) fn cyclic_graph(n: u64, steps: &[i64]) -> CayleyGraph {
        let g = FiniteAbelianGroup::new(vec![n]).unwrap();
        let h = Subgroup::whole(&g).unwrap();
        let gens = steps
            .iter()
            .map(|&s| LabeledElement { element: g.element(&[s]).unwrap(), label: s.to_string() })
            .collect();
        CayleyGraph::build(h, gens).unwrap()
    }

    #[test]
    fn triangle_is_two_regular() {
        let g = cyclic_graph(3, &[1, -1]);
        assert_eq!(g.degree(), 2);
        assert_eq!(g.adjacency(), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(g.undirected_edges().len(), 3);
    }

    #[test]
    fn identity_generators_make_self_loops() {
        let g = cyclic_graph(4, &[0, 0]);
        for v in 0..4 {
            assert_eq!(g.adjacency()[v][v], 2);
        }
        assert_eq!(g.components(), 4);
    }

    #[test]
    fn class_group_triangle() {
        let cl = class_group(Discriminant::new(-23).unwrap()).unwrap();
        let h = Subgroup::whole(cl.group()).unwrap();
        let s = generating_multiset(&cl, 3, &h, &[]).unwrap();
        let g = CayleyGraph::from_class_group(&cl, h, &s).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.degree(), 2);
        assert_eq!(g.components(), 1);
        assert_eq!(g.vertex_name(0), "(1,1,6)");
        assert!(g.to_dot().contains("label=\"2:1\""));
    }

    #[test]
    fn rejects_outside_or_unbalanced_generators() {
        let g = FiniteAbelianGroup::new(vec![6]).unwrap();
        let h = Subgroup::generated(&g, &[g.element(&[2]).unwrap()]).unwrap();
        let bad = vec![LabeledElement { element: g.element(&[1]).unwrap(), label: "x".into() }];
        assert!(CayleyGraph::build(h.clone(), bad).is_err());
        let lopsided = vec![LabeledElement { element: g.element(&[2]).unwrap(), label: "x".into() }];
        assert!(CayleyGraph::build(h, lopsided).is_err());
    }

    #[test]
    fn json_export_shape() {
        let g = cyclic_graph(5, &[1, -1]);
        let v = g.to_json();
        assert_eq!(v["adjacency"].as_array().unwrap().len(), 5);
        assert_eq!(v["adjacency"][0], serde_json::json!([1, 4]));
    }
}
