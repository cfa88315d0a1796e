use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use hybridnet_core::analysis::{
    empirical_distribution, rank_by_similarity, total_variation, ws_degree_pmf, Binning, Curve, DegreeHistogram,
    SimilarityReport, TailFit,
};
use hybridnet_core::generators::{generate as build, ConstructionLog, NetworkKind};
use hybridnet_core::graph::io::{read_edge_list, write_edge_list, write_node_metadata};
use hybridnet_core::meanfield::{
    integrate, solve_theta_fixed_point, steady_state_i_k, threshold, threshold_of, DegreeClassField,
    DegreeDistribution, IntegrationStats, ThresholdInput, ThresholdReport,
};
use hybridnet_core::propagation::{label_edges, run as simulate_on, Mixture, SimulationTrace};
use hybridnet_core::{DegreeMode, HybridGraph, Origin};
use log::info;
use serde::Serialize;

use crate::config::{rate, DegreeSupport, ExperimentConfig};
use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).map_err(io_err(path))?))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(hybridnet_core::Error::from)?;
    writeln!(w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("missing `{name}` section")))
}

fn generated(cfg: &ExperimentConfig, log: &mut ConstructionLog) -> Result<HybridGraph, CliError> {
    let gen = section(&cfg.generator, "generator")?;
    Ok(build(gen.kind, &gen.params(cfg.seed), log)?)
}

/// Loads `path` if given, otherwise builds the configured graph.
fn obtain_graph(cfg: &ExperimentConfig, path: Option<&PathBuf>) -> Result<HybridGraph, CliError> {
    match path {
        Some(p) => Ok(read_edge_list(open(p)?, None)?),
        None if cfg.generator.is_some() => generated(cfg, &mut ConstructionLog::disabled()),
        None => Err(CliError::Config("no graph file and no generator section".into())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateSummary {
    pub kind: NetworkKind,
    pub n: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub small_world_nodes: usize,
    pub scale_free_nodes: usize,
    /// Edges whose endpoints sit in different subnets.
    pub inter_subnet_edges: usize,
}

fn inter_subnet_edges(g: &HybridGraph) -> usize {
    g.edges()
        .iter()
        .filter(|(i, j, _)| match (g.nodes()[*i].subnet, g.nodes()[*j].subnet) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        })
        .count()
}

/// Writes `graph.edges`, `nodes.json`, `construction.jsonl` and
/// `summary.json`.
pub fn generate(cfg: &ExperimentConfig) -> Result<GenerateSummary, CliError> {
    let gen = section(&cfg.generator, "generator")?;
    let mut log = ConstructionLog::enabled();
    let g = generated(cfg, &mut log)?;
    let dir = &cfg.output_dir;

    let path = dir.join("graph.edges");
    let mut w = create(&path)?;
    write_edge_list(&g, &mut w)?;
    w.flush().map_err(io_err(&path))?;
    let path = dir.join("nodes.json");
    let mut w = create(&path)?;
    write_node_metadata(&g, &mut w)?;
    w.flush().map_err(io_err(&path))?;
    let path = dir.join("construction.jsonl");
    let mut w = create(&path)?;
    log.write_jsonl(&mut w)?;
    w.flush().map_err(io_err(&path))?;

    let sw = g.nodes().iter().filter(|m| m.origin == Origin::SmallWorld).count();
    let summary = GenerateSummary {
        kind: gen.kind,
        n: g.n(),
        edges: g.edge_count(),
        mean_degree: g.average_degree(DegreeMode::All)?,
        max_degree: g.max_degree(),
        small_world_nodes: sw,
        scale_free_nodes: g.n() - sw,
        inter_subnet_edges: inter_subnet_edges(&g),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    info!("generated {} nodes, {} edges", summary.n, summary.edges);
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub peak_i: f64,
    pub peak_round: usize,
    pub trigger_fraction: f64,
    pub effective_ratio: f64,
    pub replicas: usize,
}

fn simulate_graph(cfg: &ExperimentConfig) -> Result<HybridGraph, CliError> {
    let prop = section(&cfg.propagation, "propagation")?;
    let mut g = obtain_graph(cfg, prop.graph.as_ref())?;
    if prop.delta.is_some() && g.implicit_edge_count() > 0 {
        return Err(CliError::Config(
            "graph already carries implicit edges; drop `delta`".into(),
        ));
    }
    label_edges(&mut g, &prop.config(cfg.seed))?;
    Ok(g)
}

fn write_trace(path: &Path, trace: &SimulationTrace) -> Result<(), CliError> {
    let mut w = create(path)?;
    trace.write_csv(&mut w)?;
    w.flush().map_err(io_err(path))
}

/// Writes `trace.csv`, `triggers.json`, `simulate_summary.json` and, when
/// requested, `trace_replicas/replica_NNN.csv`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulateSummary, CliError> {
    let prop = section(&cfg.propagation, "propagation")?;
    let g = simulate_graph(cfg)?;
    let pc = prop.config(cfg.seed);
    let trace = simulate_on(&g, &pc)?;
    let dir = &cfg.output_dir;
    write_trace(&dir.join("trace.csv"), &trace)?;
    write_json(&dir.join("triggers.json"), &trace.trigger_summary())?;
    if let Some(reps) = &trace.replicas {
        for (r, rep) in reps.iter().enumerate() {
            let path = dir.join("trace_replicas").join(format!("replica_{r:03}.csv"));
            let mut w = create(&path)?;
            SimulationTrace::write_replica_csv(rep, &mut w)?;
            w.flush().map_err(io_err(&path))?;
        }
    }
    let (peak_round, peak_i) = trace.peak();
    let summary = SimulateSummary {
        peak_i,
        peak_round,
        trigger_fraction: trace.trigger_fraction(),
        effective_ratio: pc.effective_ratio(),
        replicas: pc.replicas,
    };
    write_json(&dir.join("simulate_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldSummary {
    /// `sum_k P(k) i_k` at `t_max`.
    pub terminal_spreader_density: f64,
    pub fixed_point_theta: f64,
    /// `sum_k P(k) i_k` at the self-consistent stationary state.
    pub predicted_spreader_density: f64,
    pub threshold: ThresholdReport,
    pub integration: IntegrationStats,
}

fn support_distribution(cfg: &ExperimentConfig, support: &DegreeSupport) -> Result<DegreeDistribution, CliError> {
    Ok(match support {
        DegreeSupport::Hybrid {
            k_ring,
            p_rewire,
            a,
            m_attach,
            n_total,
            k_max,
            classical_rate,
        } => DegreeDistribution::hybrid(
            *k_ring,
            *p_rewire,
            *a,
            *m_attach,
            rate(*classical_rate, *a, *n_total),
            *k_max,
        )?,
        DegreeSupport::PowerLaw { exponent, k_min, k_max } => DegreeDistribution::power_law(*exponent, *k_min, *k_max)?,
        DegreeSupport::Homogeneous { k } => DegreeDistribution::homogeneous(*k)?,
        DegreeSupport::Explicit { pk } => DegreeDistribution::new(pk.iter().copied())?,
        DegreeSupport::Graph { path } => {
            let g = read_edge_list(open(path)?, None)?;
            DegreeDistribution::from_histogram(&empirical_distribution(&g, Binning::Raw)?)?
        }
        DegreeSupport::Generated => {
            let g = generated(cfg, &mut ConstructionLog::disabled())?;
            DegreeDistribution::from_histogram(&empirical_distribution(&g, Binning::Raw)?)?
        }
    })
}

fn support_threshold(
    dist: &DegreeDistribution,
    support: &DegreeSupport,
    w: f64,
    sigma: f64,
) -> Result<ThresholdReport, CliError> {
    Ok(match support {
        DegreeSupport::Hybrid {
            k_ring,
            p_rewire,
            a,
            m_attach,
            n_total,
            k_max,
            classical_rate,
        } => {
            let r = rate(*classical_rate, *a, *n_total);
            let ws = (1..=*k_max)
                .map(|k| ws_degree_pmf(k as usize, *k_ring, *p_rewire, r).map(|p| (k, p)))
                .collect::<hybridnet_core::Result<Vec<_>>>()?;
            threshold(&ThresholdInput {
                pk: dist,
                ws_component: &ws,
                w,
                sigma,
                m: *m_attach as u32,
                max_degree: *k_max,
                a: *a,
            })?
        }
        _ => threshold_of(dist, w, sigma)?,
    })
}

/// Writes `trajectory.csv`, `threshold.json` and `meanfield_summary.json`.
pub fn meanfield(cfg: &ExperimentConfig) -> Result<MeanFieldSummary, CliError> {
    let mf = section(&cfg.meanfield, "meanfield")?;
    let params = mf.params();
    let dist = support_distribution(cfg, &mf.support)?;
    let field0 = DegreeClassField::uniform(dist.clone(), mf.i0)?;
    let traj = integrate(&field0, &params, mf.t_max, mf.dt)?;
    let dir = &cfg.output_dir;

    let path = dir.join("trajectory.csv");
    let mut w = create(&path)?;
    traj.thinned(mf.record_every).write_csv(&mut w)?;
    w.flush().map_err(io_err(&path))?;

    let report = support_threshold(&dist, &mf.support, mf.mixture.sirs, mf.sigma)?;
    if report.lambda_c_empirical.is_finite() {
        info!(
            "lambda_c closed form / moments = {}",
            report.lambda_c_closedform / report.lambda_c_empirical
        );
    } else {
        info!("w sigma = 0: propagation threshold is infinite");
    }
    write_json(&dir.join("threshold.json"), &report)?;

    let last = traj.snapshots.last().expect("trajectory holds the initial state");
    let terminal: f64 = dist.weights().iter().zip(&last.i).map(|(p, i)| p * i).sum();
    let theta = solve_theta_fixed_point(&dist, &params)?;
    let predicted: f64 = dist
        .degrees()
        .iter()
        .zip(dist.weights())
        .map(|(&k, p)| p * steady_state_i_k(k as f64, theta, &params))
        .sum();
    let summary = MeanFieldSummary {
        terminal_spreader_density: terminal,
        fixed_point_theta: theta,
        predicted_spreader_density: predicted,
        threshold: report,
        integration: traj.stats,
    };
    write_json(&dir.join("meanfield_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeSummary {
    pub n: u64,
    pub mean_degree: f64,
    pub second_moment: f64,
    pub max_degree: usize,
    pub head_below: usize,
    pub head_mass: f64,
    pub tail_range: [f64; 2],
    pub tail_fit: Option<TailFit>,
    /// Distance to the normalized analytic hybrid distribution, if requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_distance: Option<f64>,
}

/// Writes `degree_histogram.csv` (raw counts), `degree_histogram_binned.csv`
/// (configured binning) and `analysis.json`.
pub fn analyze(cfg: &ExperimentConfig) -> Result<AnalyzeSummary, CliError> {
    let an = section(&cfg.analyze, "analyze")?;
    let g = obtain_graph(cfg, an.graph.as_ref())?;
    let raw = empirical_distribution(&g, Binning::Raw)?;
    let binned = DegreeHistogram::from_counts(raw.counts().clone(), an.binning);
    let dir = &cfg.output_dir;
    for (name, h) in [("degree_histogram.csv", &raw), ("degree_histogram_binned.csv", &binned)] {
        let path = dir.join(name);
        let mut w = create(&path)?;
        h.write_csv(&mut w)?;
        w.flush().map_err(io_err(&path))?;
    }
    let tail_fit = binned.fit_tail_slope(an.tail_range[0], an.tail_range[1]).ok();
    let tv_distance = match &an.reference {
        Some(r) => {
            let k_max = (raw.max_degree() as u32).max(r.k_ring as u32 * 4);
            let dist = DegreeDistribution::hybrid(r.k_ring, r.p_rewire, r.a, r.m_attach, r.rate(), k_max)?;
            let lookup = |k: usize| {
                Ok(dist
                    .degrees()
                    .binary_search(&(k as u32))
                    .map_or(0.0, |idx| dist.weights()[idx]))
            };
            Some(total_variation(&raw, lookup, k_max as usize)?)
        }
        None => None,
    };
    let summary = AnalyzeSummary {
        n: raw.n(),
        mean_degree: raw.mean(),
        second_moment: raw.second_moment(),
        max_degree: raw.max_degree(),
        head_below: an.head_below,
        head_mass: raw.head_mass(an.head_below),
        tail_range: an.tail_range,
        tail_fit,
        tv_distance,
    };
    write_json(&dir.join("analysis.json"), &summary)?;
    Ok(summary)
}

/// Reads a `t,value` CSV into a curve.
pub fn read_curve(path: &Path) -> Result<Curve, CliError> {
    let reader = open(path)?;
    let mut samples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let line = line.trim();
        if idx == 0 {
            if line != "t,value" {
                return Err(parse_err(path, 1, format!("expected header `t,value`, got `{line}`")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(t), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(path, idx + 1, "expected two columns".into()));
        };
        let t: f64 = t.trim().parse().map_err(|e| parse_err(path, idx + 1, format!("{e}")))?;
        let v: f64 = v.trim().parse().map_err(|e| parse_err(path, idx + 1, format!("{e}")))?;
        samples.push((t, v));
    }
    if samples.is_empty() {
        return Err(parse_err(path, 1, "curve has no samples".into()));
    }
    let label = path
        .file_stem()
        .map_or("reference".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Curve::new(label, samples)?)
}

fn parse_err(path: &Path, line: usize, msg: String) -> CliError {
    CliError::Runtime(hybridnet_core::Error::Parse {
        line,
        msg: format!("{}: {msg}", path.display()),
    })
}

/// Writes a curve as `t,value`.
pub fn write_curve<W: Write>(curve: &Curve, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,value")?;
    for (t, v) in curve.samples() {
        writeln!(w, "{t},{v}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedMixture {
    pub rank: usize,
    pub label: String,
    pub mixture: Mixture,
    #[serde(flatten)]
    pub report: SimilarityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub reference: String,
    pub ranking: Vec<RankedMixture>,
}

/// Simulates every configured mixture on the same graph and seed, scores
/// the external curve against each simulated spreader curve (the simulated
/// curve normalizes the score) and writes `similarity.json`, best match
/// first.
pub fn compare(cfg: &ExperimentConfig) -> Result<CompareReport, CliError> {
    let cmp = section(&cfg.compare, "compare")?;
    let prop = section(&cfg.propagation, "propagation")?;
    let reference = read_curve(&cmp.curve)?;
    let g = simulate_graph(cfg)?;
    let mut curves = Vec::with_capacity(cmp.mixtures.len());
    for m in &cmp.mixtures {
        let mut pc = prop.config(cfg.seed);
        pc.mixture = *m;
        pc.keep_replicas = false;
        let trace = simulate_on(&g, &pc)?;
        curves.push(Curve::from_values(m.label(), &trace.i)?);
    }
    let ranking = rank_by_similarity(&reference, &curves)?
        .into_iter()
        .enumerate()
        .map(|(rank, (idx, report))| RankedMixture {
            rank: rank + 1,
            label: curves[idx].label.clone(),
            mixture: cmp.mixtures[idx],
            report,
        })
        .collect();
    let report = CompareReport {
        reference: reference.label.clone(),
        ranking,
    };
    write_json(&cfg.output_dir.join("similarity.json"), &report)?;
    Ok(report)
}
