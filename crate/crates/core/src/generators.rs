//! Hybrid network construction.
//!
//! Three compositions of small-world (ring lattice + rewiring) and scale-free
//! (preferential attachment) parts:
//!
//! * Network I: a small-world base of `(1-a)N` nodes, then `aN` nodes grown
//!   onto it by preferential attachment over the whole graph.
//! * Network II: a preferential-attachment core of `aN` nodes plus several
//!   small-world subnets, each bridged to the core by a handful of edges.
//! * Network III: small-world and scale-free subnets, wired together by
//!   treating whole subnets as nodes of a growing network.

use std::io::Write;
use std::ops::Range;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::graph::{GeneratorTag, HybridGraph, NodeId, NodeMeta, Origin};
use crate::rng::{substream, StreamTag};

/// Attempts at drawing a valid rewiring or linking target before giving up.
const MAX_RESAMPLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    NetworkI,
    #[serde(rename = "network_ii")]
    NetworkII,
    #[serde(rename = "network_iii")]
    NetworkIII,
    PureWs,
    PureBa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubnetKind {
    Ws,
    Ba,
}

/// Explicit subnet sizes. Network II only uses `sizes` (all subnets are
/// small-world); Network III reads both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubnetPlan {
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kinds: Vec<SubnetKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub n_total: usize,
    /// Fraction of scale-free nodes.
    pub a: f64,
    /// Ring neighbor count `K` (even).
    pub k_ring: usize,
    pub p_rewire: f64,
    /// Edges added per preferentially attached node.
    pub m_attach: usize,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subnet_plan: Option<SubnetPlan>,
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_ring < 2 || !self.k_ring.is_multiple_of(2) {
            return Err(invalid(format!("k_ring must be even and >= 2, got {}", self.k_ring)));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return Err(invalid(format!("a must lie in [0, 1], got {}", self.a)));
        }
        if !(0.0..=1.0).contains(&self.p_rewire) {
            return Err(invalid(format!("p_rewire must lie in [0, 1], got {}", self.p_rewire)));
        }
        if self.m_attach < 1 {
            return Err(invalid("m_attach must be >= 1"));
        }
        Ok(())
    }

    /// `round((1-a)N)` small-world nodes; the rest are scale-free.
    pub fn small_world_budget(&self) -> usize {
        (((1.0 - self.a) * self.n_total as f64).round() as usize).min(self.n_total)
    }

    pub fn scale_free_budget(&self) -> usize {
        self.n_total - self.small_world_budget()
    }
}

/// Seed for [`generate_ba`].
#[derive(Debug, Clone)]
pub enum BaSeed {
    /// Start from a fully connected triangle.
    FullTriangle,
    /// Grow on top of an existing graph.
    ExistingGraph(HybridGraph),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub step: String,
    pub kind: String,
    pub details: serde_json::Value,
}

/// Record of construction steps. Every event that changes the edge count
/// carries an `edges_added` entry in its details, so the total can be audited.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstructionLog {
    enabled: bool,
    events: Vec<LogEvent>,
}

impl ConstructionLog {
    pub fn enabled() -> Self {
        Self {
            enabled: true,
            events: Vec::new(),
        }
    }

    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    fn push(&mut self, step: &str, kind: &str, details: serde_json::Value) {
        if self.enabled {
            self.events.push(LogEvent {
                step: step.to_owned(),
                kind: kind.to_owned(),
                details,
            });
        }
    }

    pub fn edges_added(&self) -> i64 {
        self.events
            .iter()
            .filter_map(|e| e.details.get("edges_added").and_then(|v| v.as_i64()))
            .sum()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// building blocks operating on a node range of a shared graph

fn complete_into(g: &mut HybridGraph, nodes: Range<NodeId>) -> Result<usize> {
    let mut added = 0;
    for i in nodes.clone() {
        for j in (i + 1)..nodes.end {
            added += g.add_edge(i, j)? as usize;
        }
    }
    Ok(added)
}

/// Ring lattice over `nodes`, each node joined to `k/2` neighbors per side,
/// then each lattice edge rewired with probability `p`: the first endpoint
/// stays and the second moves to a uniform node of the range that is neither
/// the fixed endpoint nor already its neighbor.
fn ws_into<R: Rng + ?Sized>(
    g: &mut HybridGraph,
    nodes: Range<NodeId>,
    k: usize,
    p: f64,
    rng: &mut R,
    log: &mut ConstructionLog,
    label: &str,
) -> Result<()> {
    let count = nodes.len();
    if count <= k {
        let added = complete_into(g, nodes)?;
        log.push(label, "complete", json!({ "nodes": count, "edges_added": added }));
        return Ok(());
    }
    let start = nodes.start;
    let before = g.edge_count();
    for i in 0..count {
        for j in 1..=k / 2 {
            g.add_edge(start + i, start + (i + j) % count)?;
        }
    }
    log.push(
        label,
        "ring",
        json!({ "nodes": count, "edges_added": g.edge_count() - before }),
    );

    let mut rewired = 0usize;
    let mut skipped = 0usize;
    if p > 0.0 {
        for j in 1..=k / 2 {
            for i in 0..count {
                if !rng.gen_bool(p) {
                    continue;
                }
                let u = start + i;
                let v = start + (i + j) % count;
                let target = (0..MAX_RESAMPLE)
                    .map(|_| start + rng.gen_range(0..count))
                    .find(|&w| w != u && !g.has_edge(u, w));
                match target {
                    Some(w) if g.remove_edge(u, v) => {
                        g.add_edge(u, w)?;
                        rewired += 1;
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    log.push(
        label,
        "rewire",
        json!({ "rewired": rewired, "skipped": skipped, "edges_added": 0 }),
    );
    Ok(())
}

/// Degree-proportional sampler: every edge endpoint appears once, so a
/// uniform draw picks node `i` with probability `k_i / sum_j k_j`.
#[derive(Debug, Default)]
struct EndpointPool {
    endpoints: Vec<u32>,
}

impl EndpointPool {
    fn from_range(g: &HybridGraph, nodes: Range<NodeId>) -> Self {
        let mut endpoints = Vec::new();
        for i in nodes {
            let d = g.neighbors(i, crate::graph::DegreeMode::All).len();
            endpoints.extend(std::iter::repeat_n(i as u32, d));
        }
        Self { endpoints }
    }

    fn push_edge(&mut self, a: NodeId, b: NodeId) {
        self.endpoints.push(a as u32);
        self.endpoints.push(b as u32);
    }

    fn push(&mut self, a: NodeId) {
        self.endpoints.push(a as u32);
    }

    /// Degree-proportional pick; uniform over `fallback` when no node has an
    /// edge yet.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, fallback: &Range<NodeId>) -> NodeId {
        if self.endpoints.is_empty() {
            rng.gen_range(fallback.clone())
        } else {
            self.endpoints[rng.gen_range(0..self.endpoints.len())] as usize
        }
    }
}

/// Attaches `new` to `min(m, candidates)` distinct existing nodes drawn from
/// the pool. Returns the number of edges added.
fn attach<R: Rng + ?Sized>(
    g: &mut HybridGraph,
    pool: &mut EndpointPool,
    new: NodeId,
    existing: &Range<NodeId>,
    m: usize,
    rng: &mut R,
) -> Result<usize> {
    let want = m.min(existing.len());
    let mut targets: Vec<NodeId> = Vec::with_capacity(want);
    while targets.len() < want {
        let t = pool.draw(rng, existing);
        if !targets.contains(&t) {
            targets.push(t);
        }
    }
    for &t in &targets {
        g.add_edge(new, t)?;
        pool.push_edge(new, t);
    }
    Ok(targets.len())
}

/// Triangle seed followed by preferential attachment over the range.
fn ba_into<R: Rng + ?Sized>(
    g: &mut HybridGraph,
    nodes: Range<NodeId>,
    m: usize,
    rng: &mut R,
    log: &mut ConstructionLog,
    label: &str,
) -> Result<()> {
    let count = nodes.len();
    if count < 4 {
        let added = complete_into(g, nodes)?;
        log.push(label, "complete", json!({ "nodes": count, "edges_added": added }));
        return Ok(());
    }
    let start = nodes.start;
    let seed = complete_into(g, start..start + 3)?;
    log.push(label, "triangle", json!({ "nodes": 3, "edges_added": seed }));
    let mut pool = EndpointPool::from_range(g, start..start + 3);
    let mut added = 0;
    for new in (start + 3)..nodes.end {
        added += attach(g, &mut pool, new, &(start..new), m, rng)?;
    }
    log.push(
        label,
        "preferential_attachment",
        json!({ "nodes": count - 3, "m": m, "edges_added": added }),
    );
    Ok(())
}

/// Splits `budget` into `parts` sizes, each at least `min_size` when the
/// budget allows it, by cutting the remainder at uniform random points.
fn random_composition<R: Rng + ?Sized>(budget: usize, parts: usize, min_size: usize, rng: &mut R) -> Vec<usize> {
    let parts = parts.clamp(1, budget.max(1));
    let floor = min_size.min(budget / parts).max(1);
    let spare = budget - floor * parts;
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(spare)) {
        sizes.push(floor + c - prev);
        prev = c;
    }
    sizes
}

fn check_plan(plan: &SubnetPlan, budget: usize, what: &str) -> Result<()> {
    if plan.sizes.contains(&0) {
        return Err(invalid("subnet plan contains an empty subnet"));
    }
    let total: usize = plan.sizes.iter().sum();
    if total != budget {
        return Err(invalid(format!(
            "{what} subnet sizes sum to {total}, expected {budget}"
        )));
    }
    Ok(())
}

fn push_nodes(g: &mut HybridGraph, count: usize, meta: NodeMeta) -> Range<NodeId> {
    let start = g.n();
    for _ in 0..count {
        g.push_node(meta);
    }
    start..g.n()
}

// ---------------------------------------------------------------------------
// public generators

/// Watts-Strogatz style small-world graph.
pub fn generate_ws<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<HybridGraph> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(invalid(format!("K must be even and >= 2, got {k}")));
    }
    if n <= k {
        return Err(invalid(format!("need n > K, got n={n}, K={k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1], got {p}")));
    }
    let mut g = HybridGraph::with_nodes(n, NodeMeta::new(Origin::SmallWorld, None), GeneratorTag::PureWs);
    ws_into(&mut g, 0..n, k, p, rng, &mut ConstructionLog::disabled(), "ws")?;
    Ok(g)
}

/// Preferential-attachment graph with `n` nodes in total. Each new node
/// attaches to `min(m, existing nodes)` distinct targets.
pub fn generate_ba<R: Rng + ?Sized>(n: usize, m: usize, seed: BaSeed, rng: &mut R) -> Result<HybridGraph> {
    if m < 1 {
        return Err(invalid("m must be >= 1"));
    }
    let sf = NodeMeta::new(Origin::ScaleFree, None);
    match seed {
        BaSeed::FullTriangle => {
            if n < 3 {
                return Err(invalid(format!("need n >= 3 for a triangle seed, got {n}")));
            }
            let mut g = HybridGraph::with_nodes(n, sf, GeneratorTag::PureBa);
            if n == 3 {
                complete_into(&mut g, 0..3)?;
            } else {
                ba_into(&mut g, 0..n, m, rng, &mut ConstructionLog::disabled(), "ba")?;
            }
            Ok(g)
        }
        BaSeed::ExistingGraph(mut g) => {
            if g.is_empty() {
                return Err(Error::EmptyGraph);
            }
            if n < g.n() {
                return Err(invalid(format!("target size {n} below seed size {}", g.n())));
            }
            let extra = n - g.n();
            grow_onto(&mut g, extra, m, sf, rng, &mut ConstructionLog::disabled())?;
            Ok(g)
        }
    }
}

fn grow_onto<R: Rng + ?Sized>(
    g: &mut HybridGraph,
    count: usize,
    m: usize,
    meta: NodeMeta,
    rng: &mut R,
    log: &mut ConstructionLog,
) -> Result<()> {
    let mut pool = EndpointPool::from_range(g, 0..g.n());
    let mut added = 0;
    g.reserve(count);
    for _ in 0..count {
        let existing = 0..g.n();
        let new = g.push_node(meta);
        added += attach(g, &mut pool, new, &existing, m, rng)?;
    }
    log.push(
        "sf_growth",
        "preferential_attachment",
        json!({ "nodes": count, "m": m, "edges_added": added }),
    );
    Ok(())
}

/// Network I: small-world base, then scale-free nodes attached preferentially
/// to any existing node.
pub fn generate_network_i(params: &GeneratorParams, log: &mut ConstructionLog) -> Result<HybridGraph> {
    params.validate()?;
    let sw = params.small_world_budget();
    let sf = params.scale_free_budget();
    if sw <= params.k_ring {
        return Err(invalid(format!(
            "small-world base of {sw} nodes must exceed K={}",
            params.k_ring
        )));
    }
    let mut rng = substream(params.rng_seed, StreamTag::Generator, 0);
    let mut g = HybridGraph::new(GeneratorTag::NetworkI);
    g.reserve(params.n_total);
    let base = push_nodes(&mut g, sw, NodeMeta::new(Origin::SmallWorld, None));
    ws_into(&mut g, base, params.k_ring, params.p_rewire, &mut rng, log, "sw_base")?;
    grow_onto(
        &mut g,
        sf,
        params.m_attach,
        NodeMeta::new(Origin::ScaleFree, None),
        &mut rng,
        log,
    )?;
    Ok(g)
}

/// Network II: preferential-attachment core plus small-world subnets, each
/// bridged to uniformly random core nodes.
///
/// Core nodes carry subnet id 0; small-world subnets are numbered from 1.
pub fn generate_network_ii(params: &GeneratorParams, log: &mut ConstructionLog) -> Result<HybridGraph> {
    params.validate()?;
    let sw = params.small_world_budget();
    let sf = params.scale_free_budget();
    if sf < 3 {
        return Err(invalid(format!("scale-free core needs >= 3 nodes, got {sf}")));
    }
    if sw == 0 && params.a < 1.0 - 1e-9 {
        return Err(invalid("small-world budget rounds to zero while a < 1"));
    }
    let k = params.k_ring;
    let mut rng = substream(params.rng_seed, StreamTag::Generator, 0);
    let mut g = HybridGraph::new(GeneratorTag::NetworkII);
    g.reserve(params.n_total);

    let core = push_nodes(&mut g, sf, NodeMeta::new(Origin::ScaleFree, Some(0)));
    ba_into(&mut g, core.clone(), params.m_attach, &mut rng, log, "sf_core")?;
    if sw == 0 {
        return Ok(g);
    }

    let sizes = match &params.subnet_plan {
        Some(plan) => {
            check_plan(plan, sw, "small-world")?;
            plan.sizes.clone()
        }
        None => {
            let max_subnets = sw.div_ceil(2 * k).max(1);
            let count = rng.gen_range(1..=max_subnets);
            random_composition(sw, count, k + 1, &mut rng)
        }
    };
    log.push("sw_plan", "plan", json!({ "subnets": sizes.len(), "sizes": sizes }));

    for (s, &size) in sizes.iter().enumerate() {
        let id = s as u32 + 1;
        let nodes = push_nodes(&mut g, size, NodeMeta::new(Origin::SmallWorld, Some(id)));
        ws_into(
            &mut g,
            nodes.clone(),
            k,
            params.p_rewire,
            &mut rng,
            log,
            &format!("sw_subnet_{id}"),
        )?;

        let max_bridges = size.div_ceil(10).max(1);
        let bridges = rng.gen_range(1..=max_bridges);
        for local in index::sample(&mut rng, size, bridges) {
            let hub = rng.gen_range(core.clone());
            g.add_edge(nodes.start + local, hub)?;
        }
        log.push(
            &format!("sw_subnet_{id}"),
            "bridge",
            json!({ "subnet": id, "edges_added": bridges }),
        );
    }
    Ok(g)
}

/// Network III: subnets of both kinds joined as super-nodes. Each subnet after
/// a random first one links by two edges to an already joined subnet picked
/// with probability proportional to its size; endpoints inside both subnets
/// are drawn proportionally to degree.
pub fn generate_network_iii(params: &GeneratorParams, log: &mut ConstructionLog) -> Result<HybridGraph> {
    params.validate()?;
    if params.n_total < 4 {
        return Err(invalid(format!("need N >= 4, got {}", params.n_total)));
    }
    let sw = params.small_world_budget();
    let sf = params.scale_free_budget();
    let mut rng = substream(params.rng_seed, StreamTag::Generator, 0);

    let plan = match &params.subnet_plan {
        Some(plan) => {
            if plan.kinds.len() != plan.sizes.len() {
                return Err(invalid("subnet plan needs one kind per size"));
            }
            let budget = |kind| -> usize {
                plan.sizes
                    .iter()
                    .zip(&plan.kinds)
                    .filter(|(_, &k)| k == kind)
                    .map(|(s, _)| s)
                    .sum()
            };
            check_plan(
                &SubnetPlan {
                    sizes: plan.sizes.clone(),
                    kinds: vec![],
                },
                params.n_total,
                "all",
            )?;
            if budget(SubnetKind::Ws) != sw || budget(SubnetKind::Ba) != sf {
                return Err(invalid(format!(
                    "subnet plan splits {}/{} small-world/scale-free nodes, expected {sw}/{sf}",
                    budget(SubnetKind::Ws),
                    budget(SubnetKind::Ba)
                )));
            }
            plan.clone()
        }
        None => {
            let mut plan = SubnetPlan {
                sizes: vec![],
                kinds: vec![],
            };
            for (budget, kind, min_size) in [
                (sw, SubnetKind::Ws, params.k_ring + 1),
                (sf, SubnetKind::Ba, params.m_attach + 1),
            ] {
                if budget == 0 {
                    continue;
                }
                let max_subnets = ((budget as f64).sqrt().ceil() as usize).max(1);
                let count = rng.gen_range(1..=max_subnets);
                for size in random_composition(budget, count, min_size, &mut rng) {
                    plan.sizes.push(size);
                    plan.kinds.push(kind);
                }
            }
            plan
        }
    };
    log.push(
        "subnet_plan",
        "plan",
        json!({ "sizes": plan.sizes, "kinds": plan.kinds }),
    );

    let mut g = HybridGraph::new(GeneratorTag::NetworkIII);
    g.reserve(params.n_total);
    let mut ranges = Vec::with_capacity(plan.sizes.len());
    for (s, (&size, &kind)) in plan.sizes.iter().zip(&plan.kinds).enumerate() {
        let id = s as u32;
        let label = format!("subnet_{id}");
        let origin = match kind {
            SubnetKind::Ws => Origin::SmallWorld,
            SubnetKind::Ba => Origin::ScaleFree,
        };
        let nodes = push_nodes(&mut g, size, NodeMeta::new(origin, Some(id)));
        if size < 4 {
            let added = complete_into(&mut g, nodes.clone())?;
            log.push(&label, "complete", json!({ "nodes": size, "edges_added": added }));
        } else {
            match kind {
                SubnetKind::Ws => ws_into(
                    &mut g,
                    nodes.clone(),
                    params.k_ring,
                    params.p_rewire,
                    &mut rng,
                    log,
                    &label,
                )?,
                SubnetKind::Ba => ba_into(&mut g, nodes.clone(), params.m_attach, &mut rng, log, &label)?,
            }
        }
        ranges.push(nodes);
    }

    link_subnets(&mut g, &ranges, &mut rng, log)?;
    Ok(g)
}

fn link_subnets<R: Rng + ?Sized>(
    g: &mut HybridGraph,
    ranges: &[Range<NodeId>],
    rng: &mut R,
    log: &mut ConstructionLog,
) -> Result<()> {
    if ranges.len() < 2 {
        return Ok(());
    }
    let mut pools: Vec<EndpointPool> = ranges.iter().map(|r| EndpointPool::from_range(g, r.clone())).collect();
    let first = rng.gen_range(0..ranges.len());
    // (cumulative size, subnet) over joined subnets, for size-proportional picks
    let mut joined: Vec<(usize, usize)> = vec![(ranges[first].len(), first)];
    let mut total_links = 0;

    for s in (0..ranges.len()).filter(|&s| s != first) {
        let total = joined.last().map(|&(c, _)| c).unwrap_or(0);
        let ticket = rng.gen_range(0..total);
        let pos = joined.partition_point(|&(c, _)| c <= ticket);
        let l = joined[pos].1;

        let mut links = 0;
        for _ in 0..2 {
            for _ in 0..MAX_RESAMPLE {
                let a = pools[s].draw(rng, &ranges[s]);
                let b = pools[l].draw(rng, &ranges[l]);
                if g.add_edge(a, b)? {
                    pools[s].push(a);
                    pools[l].push(b);
                    links += 1;
                    break;
                }
            }
        }
        log.push(
            "subnet_link",
            "bridge",
            json!({ "from": s, "to": l, "edges_added": links }),
        );
        total_links += links;
        joined.push((total + ranges[s].len(), s));
    }
    log::debug!("linked {} subnets with {total_links} edges", ranges.len());
    Ok(())
}

/// Dispatches on `kind`. Pure variants draw from the same generator stream.
pub fn generate(kind: NetworkKind, params: &GeneratorParams, log: &mut ConstructionLog) -> Result<HybridGraph> {
    match kind {
        NetworkKind::NetworkI => generate_network_i(params, log),
        NetworkKind::NetworkII => generate_network_ii(params, log),
        NetworkKind::NetworkIII => generate_network_iii(params, log),
        NetworkKind::PureWs => {
            params.validate()?;
            let mut rng = substream(params.rng_seed, StreamTag::Generator, 0);
            let g = generate_ws(params.n_total, params.k_ring, params.p_rewire, &mut rng)?;
            log.push("ws", "ring", json!({ "nodes": g.n(), "edges_added": g.edge_count() }));
            Ok(g)
        }
        NetworkKind::PureBa => {
            params.validate()?;
            let mut rng = substream(params.rng_seed, StreamTag::Generator, 0);
            let g = generate_ba(params.n_total, params.m_attach, BaSeed::FullTriangle, &mut rng)?;
            log.push(
                "ba",
                "preferential_attachment",
                json!({ "nodes": g.n(), "edges_added": g.edge_count() }),
            );
            Ok(g)
        }
    }
}
