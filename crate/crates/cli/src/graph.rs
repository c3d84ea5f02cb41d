//! Builds Cayley graphs from command-line graph arguments.

use clap::Args;
use isograph::abelian::{parse_group_file, FiniteAbelianGroup, GroupElement, Subgroup};
use isograph::cayley::{find_expander_bound, CayleyGraph, ExpanderScan, LabeledElement};
use isograph::quadform::{class_group, generating_multiset, ClassGroup, Discriminant, QuadForm};
use isograph::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct GraphArgs {
    /// Discriminant of the quadratic order.
    #[arg(short = 'D', long = "discriminant", allow_negative_numbers = true, conflicts_with = "group_file")]
    pub discriminant: Option<i64>,
    /// Group description file (`invariants:` / `subgroup:` lines).
    #[arg(long)]
    pub group_file: Option<PathBuf>,
    /// Generators of H: comma-separated forms `a:b:c` or coordinate vectors `c1 c2 ...`.
    #[arg(long)]
    pub subgroup: Option<String>,
    /// Cayley generators for group files, as coordinate vectors; inverses are added.
    #[arg(long)]
    pub generators: Option<String>,
    /// Norm bound B of the prime-form generating set.
    #[arg(long)]
    pub bound: Option<u64>,
    /// Pick the smallest B giving a two-sided delta-expander.
    #[arg(long, conflicts_with = "bound")]
    pub delta: Option<f64>,
    /// Largest B tried when searching with --delta.
    #[arg(long, default_value_t = 1000)]
    pub bmax: u64,
}

pub struct BuiltGraph {
    pub graph: CayleyGraph,
    pub class_group: Option<ClassGroup>,
    pub scan: Option<ExpanderScan>,
    pub bound: Option<u64>,
}

fn parse_coords(group: &FiniteAbelianGroup, text: &str) -> Result<GroupElement> {
    let coords = text
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| Error::Input(format!("not an integer: {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    group.element(&coords)
}

fn parse_form(text: &str) -> Result<QuadForm> {
    let parts = text
        .split(':')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Input(format!("bad form {text:?}"))))
        .collect::<Result<Vec<_>>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok(QuadForm::new(*a, *b, *c)),
        _ => Err(Error::Input(format!("form {text:?} must be a:b:c"))),
    }
}

/// A class-group element from `a:b:c` or a coordinate vector.
pub fn parse_class_element(cl: &ClassGroup, text: &str) -> Result<GroupElement> {
    if text.contains(':') {
        cl.element_of_form(parse_form(text)?)
    } else {
        parse_coords(cl.group(), text)
    }
}

fn parse_list(text: &str, mut item: impl FnMut(&str) -> Result<GroupElement>) -> Result<Vec<GroupElement>> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| item(s)).collect()
}

impl GraphArgs {
    pub fn build(&self) -> Result<BuiltGraph> {
        match (&self.discriminant, &self.group_file) {
            (Some(d), None) => self.build_from_discriminant(*d),
            (None, Some(path)) => self.build_from_file(path),
            _ => Err(Error::Input("give exactly one of -D or --group-file".into())),
        }
    }

    fn build_from_discriminant(&self, d: i64) -> Result<BuiltGraph> {
        let cl = class_group(Discriminant::new(d)?)?;
        let subgroup = match &self.subgroup {
            Some(s) => Subgroup::generated(cl.group(), &parse_list(s, |x| parse_class_element(&cl, x))?)?,
            None => Subgroup::whole(cl.group())?,
        };
        let (bound, scan) = match (self.bound, self.delta) {
            (Some(b), _) => (b, None),
            (None, Some(delta)) => {
                let (b, scan) = find_expander_bound(&cl, &subgroup, delta, self.bmax, &[])?;
                (b, Some(scan))
            }
            (None, None) => return Err(Error::Input("give --bound or --delta".into())),
        };
        let gens = generating_multiset(&cl, bound, &subgroup, &[])?;
        let graph = CayleyGraph::from_class_group(&cl, subgroup, &gens)?;
        Ok(BuiltGraph { graph, class_group: Some(cl), scan, bound: Some(bound) })
    }

    fn build_from_file(&self, path: &PathBuf) -> Result<BuiltGraph> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let gf = parse_group_file(&text)?;
        let group = gf.group.clone();
        let subgroup = match (&self.subgroup, gf.subgroups.first()) {
            (Some(s), _) => Subgroup::generated(&group, &parse_list(s, |x| parse_coords(&group, x))?)?,
            (None, Some(h)) => h.clone(),
            (None, None) => Subgroup::whole(&group)?,
        };
        let text = self
            .generators
            .as_deref()
            .ok_or_else(|| Error::Input("group files need --generators".into()))?;
        let mut gens = Vec::new();
        for g in parse_list(text, |x| parse_coords(&group, x))? {
            let inv = group.inv(&g)?;
            let name = |e: &GroupElement| format!("{:?}", e.coords);
            gens.push(LabeledElement { label: name(&g), element: g.clone() });
            gens.push(LabeledElement { label: format!("-{}", name(&g)), element: inv });
        }
        let graph = CayleyGraph::build(subgroup, gens)?;
        Ok(BuiltGraph { graph, class_group: None, scan: None, bound: None })
    }
}

/// A vertex given as an index, a form `a:b:c`, or a coordinate vector.
pub fn parse_vertex(built: &BuiltGraph, text: &str) -> Result<usize> {
    let g = &built.graph;
    let element = if text.contains(':') {
        let cl = built
            .class_group
            .as_ref()
            .ok_or_else(|| Error::Input("forms need a discriminant graph".into()))?;
        parse_class_element(cl, text)?
    } else if text.trim().contains(' ') {
        parse_coords(g.subgroup().ambient(), text)?
    } else {
        let v: usize = text.trim().parse().map_err(|_| Error::Input(format!("bad vertex {text:?}")))?;
        if v >= g.vertex_count() {
            return Err(Error::Input(format!("vertex {v} outside 0..{}", g.vertex_count())));
        }
        return Ok(v);
    };
    g.vertex_of(&element).ok_or_else(|| Error::Input(format!("{text} is not a vertex of the graph")))
}
