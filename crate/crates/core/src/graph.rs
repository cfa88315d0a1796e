//! Undirected simple graph with node provenance and dominant/implicit edge
//! labels.
//!
//! Each node's neighbor list is kept partitioned: dominant neighbors first,
//! implicit neighbors after. The dominant-only view of a node is therefore a
//! prefix slice of its full neighbor list, which is what the spreading
//! dynamics iterate over before the blockbuster trigger fires.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub mod io;

/// Dense node index in `[0, n)`, assigned in generation order.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    SmallWorld,
    ScaleFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMeta {
    pub origin: Origin,
    /// Subnet index; only set for graphs built from subnets (Networks II/III).
    pub subnet: Option<u32>,
}

impl NodeMeta {
    pub fn new(origin: Origin, subnet: Option<u32>) -> Self {
        Self { origin, subnet }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Visibility {
    Dominant,
    Implicit,
}

impl Visibility {
    pub fn code(self) -> char {
        match self {
            Visibility::Dominant => 'D',
            Visibility::Implicit => 'I',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    All,
    DominantOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorTag {
    NetworkI,
    NetworkII,
    NetworkIII,
    PureWs,
    PureBa,
}

impl GeneratorTag {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorTag::NetworkI => "network_i",
            GeneratorTag::NetworkII => "network_ii",
            GeneratorTag::NetworkIII => "network_iii",
            GeneratorTag::PureWs => "pure_ws",
            GeneratorTag::PureBa => "pure_ba",
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "network_i" => GeneratorTag::NetworkI,
            "network_ii" => GeneratorTag::NetworkII,
            "network_iii" => GeneratorTag::NetworkIII,
            "pure_ws" => GeneratorTag::PureWs,
            "pure_ba" => GeneratorTag::PureBa,
            other => return Err(invalid(format!("unknown generator tag `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridGraph {
    nodes: Vec<NodeMeta>,
    adjacency: Vec<Vec<u32>>,
    /// Length of the dominant prefix of each neighbor list.
    dominant: Vec<u32>,
    edges: usize,
    tag: GeneratorTag,
}

impl HybridGraph {
    pub fn new(tag: GeneratorTag) -> Self {
        Self {
            nodes: Vec::new(),
            adjacency: Vec::new(),
            dominant: Vec::new(),
            edges: 0,
            tag,
        }
    }

    /// Graph with `n` isolated nodes sharing the same metadata.
    pub fn with_nodes(n: usize, meta: NodeMeta, tag: GeneratorTag) -> Self {
        let mut g = Self::new(tag);
        g.reserve(n);
        for _ in 0..n {
            g.push_node(meta);
        }
        g
    }

    pub fn reserve(&mut self, additional: usize) {
        self.nodes.reserve(additional);
        self.adjacency.reserve(additional);
        self.dominant.reserve(additional);
    }

    pub fn push_node(&mut self, meta: NodeMeta) -> NodeId {
        self.nodes.push(meta);
        self.adjacency.push(Vec::new());
        self.dominant.push(0);
        self.nodes.len() - 1
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn tag(&self) -> GeneratorTag {
        self.tag
    }

    pub fn meta(&self, i: NodeId) -> Result<NodeMeta> {
        self.check(i)?;
        Ok(self.nodes[i])
    }

    pub fn nodes(&self) -> &[NodeMeta] {
        &self.nodes
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { id: i, n: self.n() })
        }
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        if i >= self.n() || j >= self.n() {
            return false;
        }
        let (a, b) = if self.adjacency[i].len() <= self.adjacency[j].len() {
            (i, j)
        } else {
            (j, i)
        };
        self.adjacency[a].contains(&(b as u32))
    }

    /// Inserts a dominant edge. Returns `false` if the edge already exists.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<bool> {
        self.add_edge_with(i, j, Visibility::Dominant)
    }

    pub(crate) fn add_edge_with(&mut self, i: NodeId, j: NodeId, vis: Visibility) -> Result<bool> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if self.has_edge(i, j) {
            return Ok(false);
        }
        self.insert_half(i, j as u32, vis);
        self.insert_half(j, i as u32, vis);
        self.edges += 1;
        Ok(true)
    }

    fn insert_half(&mut self, at: NodeId, other: u32, vis: Visibility) {
        let list = &mut self.adjacency[at];
        list.push(other);
        if vis == Visibility::Dominant {
            let last = list.len() - 1;
            let d = self.dominant[at] as usize;
            list.swap(d, last);
            self.dominant[at] += 1;
        }
    }

    /// Removes edge `(i, j)` if present. Only used while rewiring, before any
    /// visibility labels exist.
    pub(crate) fn remove_edge(&mut self, i: NodeId, j: NodeId) -> bool {
        let removed = self.remove_half(i, j as u32) && self.remove_half(j, i as u32);
        if removed {
            self.edges -= 1;
        }
        removed
    }

    fn remove_half(&mut self, at: NodeId, other: u32) -> bool {
        let list = &mut self.adjacency[at];
        match list.iter().position(|&x| x == other) {
            Some(pos) => {
                let d = self.dominant[at] as usize;
                if pos < d {
                    // keep the dominant prefix contiguous
                    let last = list.len() - 1;
                    list.swap(pos, d - 1);
                    list.swap(d - 1, last);
                    self.dominant[at] -= 1;
                } else {
                    let last = list.len() - 1;
                    list.swap(pos, last);
                }
                list.pop();
                true
            }
            None => false,
        }
    }

    pub fn neighbors(&self, i: NodeId, mode: DegreeMode) -> &[u32] {
        let list = &self.adjacency[i];
        match mode {
            DegreeMode::All => list,
            DegreeMode::DominantOnly => &list[..self.dominant[i] as usize],
        }
    }

    pub fn degree(&self, i: NodeId, mode: DegreeMode) -> Result<usize> {
        self.check(i)?;
        Ok(self.neighbors(i, mode).len())
    }

    pub fn degrees(&self, mode: DegreeMode) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).map(move |i| self.neighbors(i, mode).len())
    }

    pub fn max_degree(&self) -> usize {
        self.degrees(DegreeMode::All).max().unwrap_or(0)
    }

    pub fn average_degree(&self, mode: DegreeMode) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let total: usize = self.degrees(mode).sum();
        Ok(total as f64 / self.n() as f64)
    }

    pub fn visibility(&self, i: NodeId, j: NodeId) -> Option<Visibility> {
        let list = self.adjacency.get(i)?;
        let pos = list.iter().position(|&x| x as usize == j)?;
        Some(if pos < self.dominant[i] as usize {
            Visibility::Dominant
        } else {
            Visibility::Implicit
        })
    }

    pub fn implicit_edge_count(&self) -> usize {
        let implicit_halves: usize = (0..self.n())
            .map(|i| self.adjacency[i].len() - self.dominant[i] as usize)
            .sum();
        implicit_halves / 2
    }

    /// Every edge once as `(i, j, visibility)` with `i < j`, ordered by `i`
    /// then by `j`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, Visibility)> {
        let mut out = Vec::with_capacity(self.edges);
        for i in 0..self.n() {
            let d = self.dominant[i] as usize;
            let mut row: Vec<(NodeId, Visibility)> = self.adjacency[i]
                .iter()
                .enumerate()
                .filter(|(_, &j)| (j as usize) > i)
                .map(|(pos, &j)| {
                    let vis = if pos < d {
                        Visibility::Dominant
                    } else {
                        Visibility::Implicit
                    };
                    (j as usize, vis)
                })
                .collect();
            row.sort_unstable_by_key(|&(j, _)| j);
            out.extend(row.into_iter().map(|(j, v)| (i, j, v)));
        }
        out
    }

    /// Labels every edge dominant or implicit.
    ///
    /// Each node picks a uniformly random subset of `min(degree, delta)` of its
    /// incident edges; an edge stays dominant if either endpoint picked it.
    /// Everything else becomes implicit.
    pub fn assign_implicit_edges<R: Rng + ?Sized>(&mut self, delta: usize, rng: &mut R) -> Result<()> {
        if delta <= 1 {
            return Err(invalid(format!("delta must exceed 1, got {delta}")));
        }
        if self.implicit_edge_count() > 0 {
            return Err(Error::AlreadyLabeled);
        }
        let key = |a: usize, b: usize| -> u64 {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            ((lo as u64) << 32) | hi as u64
        };
        let mut kept: HashSet<u64> = HashSet::new();
        for i in 0..self.n() {
            let list = &self.adjacency[i];
            let take = list.len().min(delta);
            for pos in index::sample(rng, list.len(), take) {
                kept.insert(key(i, list[pos] as usize));
            }
        }
        for i in 0..self.n() {
            let list = &mut self.adjacency[i];
            // stable partition: dominant first
            let (mut dom, imp): (Vec<u32>, Vec<u32>) = list.iter().partition(|&&j| kept.contains(&key(i, j as usize)));
            self.dominant[i] = dom.len() as u32;
            dom.extend(imp);
            *list = dom;
        }
        Ok(())
    }

    /// Breadth-first connectivity check over all edges.
    pub fn is_connected(&self) -> bool {
        if self.n() <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    visited += 1;
                    queue.push_back(w);
                }
            }
        }
        visited == self.n()
    }

    /// Nodes whose neighbor lists disagree with each other, for invariant
    /// checks. Empty for a well-formed graph.
    pub fn symmetry_violations(&self) -> Vec<(NodeId, NodeId)> {
        let mut bad = Vec::new();
        for i in 0..self.n() {
            for &j in &self.adjacency[i] {
                let j = j as usize;
                if j == i || self.visibility(j, i) != self.visibility(i, j) {
                    bad.push((i, j));
                }
            }
        }
        bad
    }
}
