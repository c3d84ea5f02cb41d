//! Plain-text description of an abstract group, its subgroups and
//! homomorphisms out of it.
//!
//! ```text
//! # comments run to end of line
//! invariants: 2 4
//! subgroup: 1 2, 0 1
//! hom: 2 -> 1, 0
//! ```
//!
//! `invariants:` must come first. Each `subgroup:` line lists generators as
//! comma-separated coordinate vectors (an empty list is the trivial
//! subgroup). Each `hom:` line gives the target's invariants, then `->`,
//! then one image per source invariant.

use super::{FiniteAbelianGroup, GroupElement, Homomorphism, Subgroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GroupFile {
    pub group: FiniteAbelianGroup,
    pub subgroups: Vec<Subgroup>,
    pub homs: Vec<Homomorphism>,
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<i64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::Parse { line, msg: format!("not an integer: {t:?}") })
        })
        .collect()
}

fn parse_elements(line: usize, group: &FiniteAbelianGroup, text: &str) -> Result<Vec<GroupElement>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|chunk| {
            let coords = parse_ints(line, chunk)?;
            group.element(&coords).map_err(|e| Error::Parse { line, msg: e.to_string() })
        })
        .collect()
}

pub fn parse_group_file(text: &str) -> Result<GroupFile> {
    let mut group: Option<FiniteAbelianGroup> = None;
    let mut subgroups = Vec::new();
    let mut homs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| Error::Parse { line, msg: "expected `key: value`".into() })?;
        match (key.trim(), &group) {
            ("invariants", None) => {
                let inv = parse_ints(line, rest)?;
                if inv.iter().any(|&d| d < 1) {
                    return Err(Error::Parse { line, msg: "invariants must be positive".into() });
                }
                let g = FiniteAbelianGroup::new(inv.into_iter().map(|d| d as u64).collect())
                    .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                group = Some(g);
            }
            ("invariants", Some(_)) => {
                return Err(Error::Parse { line, msg: "duplicate `invariants` line".into() })
            }
            (_, None) => return Err(Error::Parse { line, msg: "`invariants` must come first".into() }),
            ("subgroup", Some(g)) => {
                let gens = parse_elements(line, g, rest)?;
                subgroups.push(Subgroup::generated(g, &gens).map_err(|e| Error::Parse { line, msg: e.to_string() })?);
            }
            ("hom", Some(g)) => {
                let (target, images) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::Parse { line, msg: "expected `hom: <target invariants> -> <images>`".into() })?;
                let tinv = parse_ints(line, target)?;
                if tinv.iter().any(|&d| d < 1) {
                    return Err(Error::Parse { line, msg: "invariants must be positive".into() });
                }
                let t = FiniteAbelianGroup::new(tinv.into_iter().map(|d| d as u64).collect())
                    .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                let imgs = parse_elements(line, &t, images)?;
                homs.push(Homomorphism::new(g.clone(), t, imgs).map_err(|e| Error::Parse { line, msg: e.to_string() })?);
            }
            (other, Some(_)) => {
                return Err(Error::Parse { line, msg: format!("unknown key {other:?}") })
            }
        }
    }
    let group = group.ok_or(Error::Parse { line: text.lines().count().max(1), msg: "missing `invariants` line".into() })?;
    Ok(GroupFile { group, subgroups, homs })
}
