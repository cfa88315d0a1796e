//! Mixed SIS/SIR/SIRS spreading in synchronous rounds with the blockbuster
//! trigger.
//!
//! Every node follows one of three models for what happens after it stops
//! spreading. While the trigger is off, spreaders only reach neighbors over
//! dominant edges; once it fires, implicit edges carry traffic as well.

use std::io::{BufRead, Write};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{DegreeMode, HybridGraph};
use crate::rng::{substream, SimRng, StreamTag};

/// Population fractions of the three node models. `sis + sirs + sir = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mixture {
    /// Spreaders forget and become ignorant again (`u`).
    pub sis: f64,
    /// Spreaders become stiflers that may revert to ignorant (`w`).
    pub sirs: f64,
    /// Spreaders become permanent stiflers (`q`).
    pub sir: f64,
}

impl Mixture {
    pub fn new(sis: f64, sirs: f64, sir: f64) -> Result<Self> {
        let m = Self { sis, sirs, sir };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.sis, self.sirs, self.sir];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid(format!("mixture fractions must lie in [0, 1]: {self:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("mixture must sum to 1: {self:?}")));
        }
        Ok(())
    }

    /// Short label such as `80/15/5` (SIS/SIR/SIRS percentages).
    pub fn label(&self) -> String {
        format!(
            "{}/{}/{}",
            (self.sis * 100.0).round(),
            (self.sir * 100.0).round(),
            (self.sirs * 100.0).round()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeModel {
    Sis,
    Sir,
    Sirs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    Ignorant,
    Spreader,
    Stifler,
}

fn default_i0() -> f64 {
    0.01
}
fn default_replicas() -> usize {
    20
}
fn default_horizon() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationConfig {
    /// Per-edge, per-round transmission probability.
    pub lambda: f64,
    /// Per-round probability that a spreader stops spreading.
    pub beta: f64,
    /// Per-round probability that an SIRS stifler reverts to ignorant.
    pub sigma: f64,
    pub mixture: Mixture,
    /// Blockbuster threshold on `i(t) / log10(t + 1)`.
    pub phi_trigger: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Initial spreader fraction; `ceil(i0 * N)` nodes are seeded.
    #[serde(default = "default_i0")]
    pub i0: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    pub rng_seed: u64,
    /// Dominant edges kept per node when labelling a fresh graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    /// Draw node models once and reuse them in every replica.
    #[serde(default)]
    pub freeze_models: bool,
    /// Keep per-replica traces in the result.
    #[serde(default)]
    pub keep_replicas: bool,
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("i0", self.i0),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        self.mixture.validate()?;
        if !self.phi_trigger.is_finite() {
            return Err(invalid("phi_trigger must be finite"));
        }
        if self.horizon < 2 {
            return Err(invalid(format!("horizon must be >= 2, got {}", self.horizon)));
        }
        if self.replicas < 1 {
            return Err(invalid("replicas must be >= 1"));
        }
        if let Some(d) = self.delta {
            if d <= 1 {
                return Err(invalid(format!("delta must exceed 1, got {d}")));
            }
        }
        Ok(())
    }

    /// Effective spreading ratio `lambda / beta`.
    pub fn effective_ratio(&self) -> f64 {
        self.lambda / self.beta
    }
}

/// Labels the graph's edges with `config.delta`, if set, from the
/// configuration's visibility stream.
pub fn label_edges(g: &mut HybridGraph, config: &PropagationConfig) -> Result<()> {
    if let Some(delta) = config.delta {
        let mut rng = substream(config.rng_seed, StreamTag::Visibility, 0);
        g.assign_implicit_edges(delta, &mut rng)?;
    }
    Ok(())
}

/// Independently assigns each node SIS with probability `sis`, SIRS with
/// probability `sirs`, SIR otherwise.
pub fn assign_models<R: Rng + ?Sized>(n: usize, mixture: &Mixture, rng: &mut R) -> Result<Vec<NodeModel>> {
    mixture.validate()?;
    Ok((0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            if x < mixture.sis {
                NodeModel::Sis
            } else if x < mixture.sis + mixture.sirs {
                NodeModel::Sirs
            } else {
                NodeModel::Sir
            }
        })
        .collect())
}

/// Blockbuster intensity `i(t) / log10(t + 1)`.
pub fn blockbuster_phi(spreader_density: f64, t: usize) -> Result<f64> {
    if spreader_density == 0.0 {
        return Ok(0.0);
    }
    if t == 0 {
        return Err(Error::Degenerate("blockbuster intensity undefined at t = 0".into()));
    }
    Ok(spreader_density / ((t + 1) as f64).log10())
}

/// Trigger state at round `t`. Up to half the horizon the trigger latches on
/// as soon as `phi >= threshold`; after that it holds its value.
pub fn blockbuster_gamma(phi: f64, threshold: f64, t: usize, horizon: usize, previous: bool) -> bool {
    if 2 * t <= horizon {
        previous || phi >= threshold
    } else {
        previous
    }
}

/// One synchronous round. All transitions are decided from the states at the
/// start of the round: newly infected nodes neither spread nor exit until the
/// next round, and nodes that just became stiflers do not revert in the same
/// round.
pub fn step<R: Rng + ?Sized>(
    g: &HybridGraph,
    models: &[NodeModel],
    states: &mut [NodeState],
    config: &PropagationConfig,
    gamma: bool,
    rng: &mut R,
) {
    let before = states.to_vec();
    step_from(g, models, &before, states, config, gamma, rng);
}

fn step_from<R: Rng + ?Sized>(
    g: &HybridGraph,
    models: &[NodeModel],
    before: &[NodeState],
    after: &mut [NodeState],
    config: &PropagationConfig,
    gamma: bool,
    rng: &mut R,
) {
    let mode = if gamma {
        DegreeMode::All
    } else {
        DegreeMode::DominantOnly
    };
    after.copy_from_slice(before);

    if config.lambda > 0.0 {
        for (i, _) in before.iter().enumerate().filter(|(_, &s)| s == NodeState::Spreader) {
            for &j in g.neighbors(i, mode) {
                let j = j as usize;
                if after[j] == NodeState::Ignorant && rng.gen_bool(config.lambda) {
                    after[j] = NodeState::Spreader;
                }
            }
        }
    }

    for (i, &s) in before.iter().enumerate() {
        match s {
            NodeState::Spreader if rng.gen_bool(config.beta) => {
                after[i] = match models[i] {
                    NodeModel::Sis => NodeState::Ignorant,
                    NodeModel::Sir | NodeModel::Sirs => NodeState::Stifler,
                };
            }
            NodeState::Stifler if models[i] == NodeModel::Sirs && rng.gen_bool(config.sigma) => {
                after[i] = NodeState::Ignorant;
            }
            _ => {}
        }
    }
}

/// How the trigger evolves in a replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaPolicy {
    /// Driven by the blockbuster intensity.
    Trigger,
    /// Held fixed for the whole run.
    Pinned(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaTrace {
    /// `[ignorant, spreader, stifler]` node counts per round, `t = 0..=T`.
    pub counts: Vec<[u32; 3]>,
    pub phi: Vec<f64>,
    pub gamma: Vec<bool>,
    pub trigger_time: Option<usize>,
    /// Nodes that were a spreader at least once.
    pub ever_infected: usize,
}

impl ReplicaTrace {
    pub fn density(&self, t: usize) -> [f64; 3] {
        let n: u32 = self.counts[t].iter().sum();
        self.counts[t].map(|c| c as f64 / n as f64)
    }
}

fn count_states(states: &[NodeState]) -> [u32; 3] {
    let mut c = [0u32; 3];
    for s in states {
        c[*s as usize] += 1;
    }
    c
}

/// Runs replica `index` of `config` on `g`. Node models are taken from
/// `frozen` when given, otherwise drawn from the replica's own stream.
pub fn simulate_replica(
    g: &HybridGraph,
    config: &PropagationConfig,
    index: u32,
    frozen: Option<&[NodeModel]>,
    policy: GammaPolicy,
) -> Result<ReplicaTrace> {
    let n = g.n();
    let seeds = initial_spreaders(n, config.i0)?;
    let mut rng: SimRng = substream(config.rng_seed, StreamTag::Replica, index);
    let drawn;
    let models = match frozen {
        Some(m) => m,
        None => {
            drawn = assign_models(n, &config.mixture, &mut rng)?;
            &drawn
        }
    };

    let mut states = vec![NodeState::Ignorant; n];
    for i in index::sample(&mut rng, n, seeds) {
        states[i] = NodeState::Spreader;
    }
    let mut ever = states.iter().map(|&s| s == NodeState::Spreader).collect::<Vec<_>>();
    let mut scratch = states.clone();

    let horizon = config.horizon;
    let mut counts = Vec::with_capacity(horizon + 1);
    let mut phi = Vec::with_capacity(horizon + 1);
    let mut gammas = Vec::with_capacity(horizon + 1);
    counts.push(count_states(&states));
    phi.push(0.0);
    let mut gamma = match policy {
        GammaPolicy::Pinned(v) => v,
        GammaPolicy::Trigger => false,
    };
    gammas.push(gamma);
    let mut trigger_time = None;

    for t in 1..=horizon {
        step_from(g, models, &states, &mut scratch, config, gamma, &mut rng);
        std::mem::swap(&mut states, &mut scratch);
        for (e, s) in ever.iter_mut().zip(&states) {
            *e |= *s == NodeState::Spreader;
        }
        let c = count_states(&states);
        let i_t = c[NodeState::Spreader as usize] as f64 / n as f64;
        let phi_t = blockbuster_phi(i_t, t)?;
        if policy == GammaPolicy::Trigger {
            let next = blockbuster_gamma(phi_t, config.phi_trigger, t, horizon, gamma);
            if next && !gamma {
                trigger_time = Some(t);
            }
            gamma = next;
        }
        counts.push(c);
        phi.push(phi_t);
        gammas.push(gamma);
    }

    Ok(ReplicaTrace {
        counts,
        phi,
        gamma: gammas,
        trigger_time,
        ever_infected: ever.iter().filter(|&&e| e).count(),
    })
}

fn initial_spreaders(n: usize, i0: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let exact = i0 * n as f64;
    if exact < 1.0 {
        return Err(invalid(format!("i0 * N = {exact} leaves no initial spreader")));
    }
    // tolerate representation error such as 0.07 * 100 = 7.000000000000001
    Ok(((exact - 1e-9).ceil() as usize).clamp(1, n))
}

/// Replica-averaged densities for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    /// Fraction of replicas with the trigger on.
    pub gamma: Vec<f64>,
    pub trigger_times: Vec<Option<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<Vec<ReplicaTrace>>,
}

impl SimulationTrace {
    fn average(traces: &[ReplicaTrace]) -> Self {
        let len = traces[0].counts.len();
        let reps = traces.len() as f64;
        let mut out = Self {
            s: vec![0.0; len],
            i: vec![0.0; len],
            r: vec![0.0; len],
            phi: vec![0.0; len],
            gamma: vec![0.0; len],
            trigger_times: traces.iter().map(|t| t.trigger_time).collect(),
            replicas: None,
        };
        for tr in traces {
            for t in 0..len {
                let [s, i, r] = tr.density(t);
                out.s[t] += s;
                out.i[t] += i;
                out.r[t] += r;
                out.phi[t] += tr.phi[t];
                out.gamma[t] += tr.gamma[t] as u8 as f64;
            }
        }
        for v in [&mut out.s, &mut out.i, &mut out.r, &mut out.phi, &mut out.gamma] {
            v.iter_mut().for_each(|x| *x /= reps);
        }
        out
    }

    pub fn horizon(&self) -> usize {
        self.i.len() - 1
    }

    /// `(round, density)` of the highest mean spreader density; earliest on
    /// ties.
    pub fn peak(&self) -> (usize, f64) {
        self.i
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (t, &v)| if v > best.1 { (t, v) } else { best })
    }

    pub fn trigger_fraction(&self) -> f64 {
        let hits = self.trigger_times.iter().filter(|t| t.is_some()).count();
        hits as f64 / self.trigger_times.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,s,i,r,phi,gamma")?;
        for t in 0..self.i.len() {
            writeln!(
                w,
                "{t},{},{},{},{},{}",
                self.s[t], self.i[t], self.r[t], self.phi[t], self.gamma[t]
            )?;
        }
        Ok(())
    }

    /// Parses a trace CSV back. Trigger times and replicas are not part of
    /// the CSV and come back empty.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut out = Self {
            s: vec![],
            i: vec![],
            r: vec![],
            phi: vec![],
            gamma: vec![],
            trigger_times: vec![],
            replicas: None,
        };
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            if idx == 0 {
                if line.trim() != "t,s,i,r,phi,gamma" {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unexpected header `{line}`"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
            if fields.len() != 6 || fields[0] as usize != out.i.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "malformed row".into(),
                });
            }
            out.s.push(fields[1]);
            out.i.push(fields[2]);
            out.r.push(fields[3]);
            out.phi.push(fields[4]);
            out.gamma.push(fields[5]);
        }
        Ok(out)
    }

    pub fn write_replica_csv<W: Write>(trace: &ReplicaTrace, mut w: W) -> Result<()> {
        writeln!(w, "t,s,i,r,phi,gamma")?;
        for t in 0..trace.counts.len() {
            let [s, i, r] = trace.density(t);
            writeln!(w, "{t},{s},{i},{r},{},{}", trace.phi[t], trace.gamma[t] as u8)?;
        }
        Ok(())
    }

    pub fn trigger_summary(&self) -> Vec<TriggerRecord> {
        self.trigger_times
            .iter()
            .enumerate()
            .map(|(replica, &trigger_time)| TriggerRecord { replica, trigger_time })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerRecord {
    pub replica: usize,
    pub trigger_time: Option<usize>,
}

/// Runs `config.replicas` independent replicas (in parallel) and averages
/// them. Results do not depend on the thread count.
pub fn run(g: &HybridGraph, config: &PropagationConfig) -> Result<SimulationTrace> {
    run_with_policy(g, config, GammaPolicy::Trigger)
}

pub fn run_with_policy(g: &HybridGraph, config: &PropagationConfig, policy: GammaPolicy) -> Result<SimulationTrace> {
    config.validate()?;
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    initial_spreaders(g.n(), config.i0)?;
    let frozen = if config.freeze_models {
        let mut rng = substream(config.rng_seed, StreamTag::Models, 0);
        Some(assign_models(g.n(), &config.mixture, &mut rng)?)
    } else {
        None
    };
    let traces = (0..config.replicas as u32)
        .into_par_iter()
        .map(|r| simulate_replica(g, config, r, frozen.as_deref(), policy))
        .collect::<Result<Vec<_>>>()?;
    let mut out = SimulationTrace::average(&traces);
    if config.keep_replicas {
        out.replicas = Some(traces);
    }
    Ok(out)
}
