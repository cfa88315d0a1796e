//! JSON experiment configuration.
//!
//! One global `seed` feeds every module; each module draws from its own
//! tagged substream of it, so sections never share random numbers.

use std::fs;
use std::path::{Path, PathBuf};

use hybridnet_core::analysis::{Binning, RewireRate};
use hybridnet_core::generators::{GeneratorParams, NetworkKind, SubnetPlan};
use hybridnet_core::meanfield::MeanFieldParams;
use hybridnet_core::propagation::{Mixture, PropagationConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meanfield: Option<MeanFieldSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: NetworkKind,
    pub n_total: usize,
    pub a: f64,
    pub k_ring: usize,
    pub p_rewire: f64,
    pub m_attach: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subnet_plan: Option<SubnetPlan>,
}

impl GeneratorSection {
    pub fn params(&self, seed: u64) -> GeneratorParams {
        GeneratorParams {
            n_total: self.n_total,
            a: self.a,
            k_ring: self.k_ring,
            p_rewire: self.p_rewire,
            m_attach: self.m_attach,
            rng_seed: seed,
            subnet_plan: self.subnet_plan.clone(),
        }
    }
}

fn default_horizon() -> usize {
    100
}
fn default_i0() -> f64 {
    0.01
}
fn default_replicas() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    pub lambda: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mixture: Mixture,
    pub phi_trigger: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_i0")]
    pub i0: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(default)]
    pub freeze_models: bool,
    /// Also write one trace per replica.
    #[serde(default)]
    pub keep_replicas: bool,
    /// Edge list to simulate on; the generator section is used otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
}

impl PropagationSection {
    pub fn config(&self, seed: u64) -> PropagationConfig {
        PropagationConfig {
            lambda: self.lambda,
            beta: self.beta,
            sigma: self.sigma,
            mixture: self.mixture,
            phi_trigger: self.phi_trigger,
            horizon: self.horizon,
            i0: self.i0,
            replicas: self.replicas,
            rng_seed: seed,
            delta: self.delta,
            freeze_models: self.freeze_models,
            keep_replicas: self.keep_replicas,
        }
    }
}

/// Degree distribution fed to the mean-field equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DegreeSupport {
    /// Analytic hybrid prediction on `[1, k_max]`.
    Hybrid {
        k_ring: usize,
        p_rewire: f64,
        a: f64,
        m_attach: usize,
        n_total: usize,
        k_max: u32,
        #[serde(default)]
        classical_rate: bool,
    },
    PowerLaw {
        exponent: f64,
        k_min: u32,
        k_max: u32,
    },
    Homogeneous {
        k: u32,
    },
    Explicit {
        pk: Vec<(u32, f64)>,
    },
    /// Empirical distribution of an edge list.
    Graph {
        path: PathBuf,
    },
    /// Empirical distribution of the graph built by the generator section.
    Generated,
}

fn default_dt() -> f64 {
    0.05
}
fn default_t_max() -> f64 {
    200.0
}
fn default_record_every() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldSection {
    pub lambda: f64,
    pub mixture: Mixture,
    pub sigma: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_i0")]
    pub i0: f64,
    /// Write every n-th integration step to the trajectory file.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    pub support: DegreeSupport,
}

impl MeanFieldSection {
    pub fn params(&self) -> MeanFieldParams {
        MeanFieldParams {
            lambda: self.lambda,
            mixture: self.mixture,
            sigma: self.sigma,
        }
    }
}

fn default_tail_range() -> [f64; 2] {
    [10f64.powf(1.5), 10f64.powf(2.5)]
}
fn default_head_below() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default)]
    pub binning: Binning,
    #[serde(default = "default_tail_range")]
    pub tail_range: [f64; 2],
    #[serde(default = "default_head_below")]
    pub head_below: usize,
    /// Analytic hybrid distribution to measure the histogram against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<AnalyticReference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticReference {
    pub k_ring: usize,
    pub p_rewire: f64,
    pub a: f64,
    pub m_attach: usize,
    pub n_total: usize,
    #[serde(default)]
    pub classical_rate: bool,
}

impl AnalyticReference {
    pub fn rate(&self) -> RewireRate {
        rate(self.classical_rate, self.a, self.n_total)
    }
}

pub(crate) fn rate(classical: bool, a: f64, n: usize) -> RewireRate {
    if classical {
        RewireRate::Classical
    } else {
        RewireRate::Hybrid { a, n }
    }
}

fn standard_mixtures() -> Vec<Mixture> {
    [(0.8, 0.05, 0.15), (0.65, 0.05, 0.3), (0.5, 0.05, 0.45)]
        .into_iter()
        .map(|(u, w, q)| Mixture {
            sis: u,
            sirs: w,
            sir: q,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// CSV with header `t,value`.
    pub curve: PathBuf,
    #[serde(default = "standard_mixtures")]
    pub mixtures: Vec<Mixture>,
}

/// Command-line overrides applied after loading.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub replicas: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(r) = o.replicas {
            match &mut self.propagation {
                Some(p) => p.replicas = r,
                None => {
                    return Err(CliError::Config(
                        "--replicas given without a propagation section".into(),
                    ))
                }
            }
        }
        self.validate()
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
    pub fn validate(&self) -> Result<(), CliError> {
        let cfg_err = |section: &str, e: hybridnet_core::Error| CliError::Config(format!("{section}: {e}"));
        if let Some(g) = &self.generator {
            g.params(self.seed).validate().map_err(|e| cfg_err("generator", e))?;
        }
        if let Some(p) = &self.propagation {
            p.config(self.seed).validate().map_err(|e| cfg_err("propagation", e))?;
        }
        if let Some(m) = &self.meanfield {
            m.params().validate().map_err(|e| cfg_err("meanfield", e))?;
            if !(m.dt > 0.0) || !(m.t_max >= 0.0) {
                return Err(CliError::Config("meanfield: dt must be > 0 and t_max >= 0".into()));
            }
            if !(0.0..=1.0).contains(&m.i0) {
                return Err(CliError::Config("meanfield: i0 must lie in [0, 1]".into()));
            }
            if m.support == DegreeSupport::Generated && self.generator.is_none() {
                return Err(CliError::Config(
                    "meanfield: generated support needs a generator section".into(),
                ));
            }
        }
        if let Some(a) = &self.analyze {
            if !(a.tail_range[0] > 0.0 && a.tail_range[1] > a.tail_range[0]) {
                return Err(CliError::Config(
                    "analyze: tail_range must be increasing and positive".into(),
                ));
            }
        }
        if let Some(c) = &self.compare {
            if c.mixtures.is_empty() {
                return Err(CliError::Config("compare: at least one mixture is required".into()));
            }
            for m in &c.mixtures {
                m.validate().map_err(|e| cfg_err("compare", e))?;
            }
            if self.propagation.is_none() {
                return Err(CliError::Config("compare: needs a propagation section".into()));
            }
        }
        Ok(())
    }
}
