//! Text edge lists and JSON node metadata.
//!
//! Edge list: a header line `# nodes=<n> generator=<tag>` followed by one edge
//! per line, `<i> <j> <D|I>` with `i < j`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{GeneratorTag, HybridGraph, NodeId, NodeMeta, Origin, Visibility};
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &HybridGraph, mut w: W) -> Result<()> {
    writeln!(w, "# nodes={} generator={}", g.n(), g.tag())?;
    for (i, j, vis) in g.edges() {
        writeln!(w, "{i} {j} {}", vis.code())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads an edge list. Node metadata is not part of the format; every node
/// comes back as a small-world node without subnet unless `meta` is given.
pub fn read_edge_list<R: BufRead>(r: R, meta: Option<&[NodeMeta]>) -> Result<HybridGraph> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header = header?;
    let mut n = None;
    let mut tag = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = field.strip_prefix("nodes=") {
            n = Some(v.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?);
        } else if let Some(v) = field.strip_prefix("generator=") {
            tag = Some(v.parse::<GeneratorTag>()?);
        }
    }
    let n = n.ok_or_else(|| parse_err(1, "header lacks nodes="))?;
    let tag = tag.ok_or_else(|| parse_err(1, "header lacks generator="))?;

    let mut g = HybridGraph::new(tag);
    g.reserve(n);
    match meta {
        Some(meta) if meta.len() != n => {
            return Err(parse_err(
                1,
                format!("metadata has {} nodes, edge list {n}", meta.len()),
            ))
        }
        Some(meta) => meta.iter().for_each(|&m| {
            g.push_node(m);
        }),
        None => (0..n).for_each(|_| {
            g.push_node(NodeMeta::new(Origin::SmallWorld, None));
        }),
    }

    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut id = |what: &str| -> Result<NodeId> {
            parts
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {what}")))?
                .parse::<NodeId>()
                .map_err(|e| parse_err(lineno, e.to_string()))
        };
        let i = id("source")?;
        let j = id("target")?;
        let vis = match parts.next() {
            Some("D") | None => Visibility::Dominant,
            Some("I") => Visibility::Implicit,
            Some(other) => return Err(parse_err(lineno, format!("bad visibility `{other}`"))),
        };
        if !g.add_edge_with(i, j, vis)? {
            return Err(parse_err(lineno, format!("duplicate edge {i} {j}")));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub origin: Origin,
    pub subnet: Option<u32>,
    pub birth_order: usize,
}

pub fn node_records(g: &HybridGraph) -> Vec<NodeRecord> {
    g.nodes()
        .iter()
        .enumerate()
        .map(|(id, m)| NodeRecord {
            id,
            origin: m.origin,
            subnet: m.subnet,
            birth_order: id,
        })
        .collect()
}

pub fn write_node_metadata<W: Write>(g: &HybridGraph, mut w: W) -> Result<()> {
    serde_json::to_writer(&mut w, &node_records(g))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_node_metadata<R: BufRead>(r: R) -> Result<Vec<NodeMeta>> {
    let mut records: Vec<NodeRecord> = serde_json::from_reader(r)?;
    records.sort_by_key(|rec| rec.id);
    for (expected, rec) in records.iter().enumerate() {
        if rec.id != expected {
            return Err(parse_err(
                0,
                format!("node ids not dense: expected {expected}, got {}", rec.id),
            ));
        }
    }
    Ok(records.into_iter().map(|r| NodeMeta::new(r.origin, r.subnet)).collect())
}
