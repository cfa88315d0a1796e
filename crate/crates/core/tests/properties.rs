use std::collections::HashSet;

use hybridnet_core::analysis::{
    empirical_distribution, hybrid_degree_pdf, similarity, ws_degree_pmf, Binning, Curve, DegreeHistogram, RewireRate,
};
use hybridnet_core::generators::{generate, ConstructionLog, GeneratorParams, NetworkKind};
use hybridnet_core::meanfield::{rhs, DegreeClassField, DegreeDistribution, MeanFieldParams};
use hybridnet_core::propagation::{
    assign_models, blockbuster_gamma, step, Mixture, NodeModel, NodeState, PropagationConfig,
};
use hybridnet_core::rng::{substream, StreamTag};
use hybridnet_core::{DegreeMode, HybridGraph, Visibility};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = NetworkKind> {
    prop_oneof![
        Just(NetworkKind::NetworkI),
        Just(NetworkKind::NetworkII),
        Just(NetworkKind::NetworkIII),
        Just(NetworkKind::PureWs),
        Just(NetworkKind::PureBa),
    ]
}

fn params() -> impl Strategy<Value = GeneratorParams> {
    (
        60usize..400,
        0.0f64..=1.0,
        prop_oneof![Just(2usize), Just(4), Just(6)],
        0.0f64..=1.0,
        1usize..5,
        any::<u64>(),
    )
        .prop_map(|(n_total, a, k_ring, p_rewire, m_attach, rng_seed)| GeneratorParams {
            n_total,
            a,
            k_ring,
            p_rewire,
            m_attach,
            rng_seed,
            subnet_plan: None,
        })
}

fn mixture() -> impl Strategy<Value = Mixture> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(x, y)| {
        let sis = x;
        let sirs = (1.0 - sis) * y;
        Mixture::new(sis, sirs, 1.0 - sis - sirs).unwrap()
    })
}

fn build(kind: NetworkKind, p: &GeneratorParams) -> Option<HybridGraph> {
    generate(kind, p, &mut ConstructionLog::disabled()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graphs_are_simple_and_symmetric(kind in kind(), p in params()) {
        let Some(g) = build(kind, &p) else { return Ok(()) };
        prop_assert!(g.symmetry_violations().is_empty());
        for i in 0..g.n() {
            let nbrs = g.neighbors(i, DegreeMode::All);
            prop_assert!(!nbrs.contains(&(i as u32)));
            let unique: HashSet<_> = nbrs.iter().collect();
            prop_assert_eq!(unique.len(), nbrs.len());
        }
        for mode in [DegreeMode::All, DegreeMode::DominantOnly] {
            let total: usize = g.degrees(mode).sum();
            let expected = match mode {
                DegreeMode::All => g.edge_count(),
                DegreeMode::DominantOnly => g.edge_count() - g.implicit_edge_count(),
            };
            prop_assert_eq!(total, 2 * expected);
        }
    }

    #[test]
    fn node_budget_and_logged_edge_total(kind in prop_oneof![
        Just(NetworkKind::NetworkI), Just(NetworkKind::NetworkII), Just(NetworkKind::NetworkIII)
    ], p in params()) {
        let mut log = ConstructionLog::enabled();
        let Ok(g) = generate(kind, &p, &mut log) else { return Ok(()) };
        let sw = g.nodes().iter().filter(|m| m.origin == hybridnet_core::Origin::SmallWorld).count();
        prop_assert_eq!(sw, p.small_world_budget());
        prop_assert_eq!(g.n() - sw, p.scale_free_budget());
        prop_assert_eq!(log.edges_added(), g.edge_count() as i64);
    }

    #[test]
    fn visibility_partition(p in params(), delta in 2usize..8, seed in any::<u64>()) {
        let Some(mut g) = build(NetworkKind::NetworkI, &p) else { return Ok(()) };
        g.assign_implicit_edges(delta, &mut substream(seed, StreamTag::Visibility, 0)).unwrap();
        let mut dominant = 0;
        for (i, j, vis) in g.edges() {
            prop_assert_eq!(g.visibility(i, j), Some(vis));
            dominant += (vis == Visibility::Dominant) as usize;
        }
        prop_assert_eq!(dominant + g.implicit_edge_count(), g.edge_count());
        for i in 0..g.n() {
            let all = g.degree(i, DegreeMode::All).unwrap();
            prop_assert!(g.degree(i, DegreeMode::DominantOnly).unwrap() >= all.min(delta));
            let full: HashSet<_> = g.neighbors(i, DegreeMode::All).iter().collect();
            prop_assert!(g.neighbors(i, DegreeMode::DominantOnly).iter().all(|j| full.contains(j)));
        }
    }

    #[test]
    fn same_seed_same_graph(kind in kind(), p in params()) {
        let (Some(a), Some(b)) = (build(kind, &p), build(kind, &p)) else { return Ok(()) };
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(a.nodes(), b.nodes());
    }

    #[test]
    fn gamma_never_drops_and_freezes(
        phis in proptest::collection::vec(0.0f64..0.3, 1..120),
        threshold in 0.01f64..0.3,
    ) {
        let horizon = phis.len();
        let mut prev = false;
        let mut seq = Vec::new();
        for (idx, &phi) in phis.iter().enumerate() {
            prev = blockbuster_gamma(phi, threshold, idx + 1, horizon, prev);
            seq.push(prev);
        }
        prop_assert!(seq.windows(2).all(|w| w[1] >= w[0]));
        let frozen_from = seq.iter().enumerate().filter(|(i, _)| 2 * (i + 1) > horizon).map(|(_, &g)| g).collect::<Vec<_>>();
        prop_assert!(frozen_from.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn transitions_respect_node_models(
        mix in mixture(), lambda in 0.0f64..1.0, beta in 0.0f64..1.0, sigma in 0.0f64..1.0,
        gamma in any::<bool>(), seed in any::<u64>(),
    ) {
        let p = GeneratorParams { n_total: 300, a: 0.5, k_ring: 4, p_rewire: 0.3, m_attach: 3, rng_seed: seed, subnet_plan: None };
        let g = build(NetworkKind::NetworkI, &p).unwrap();
        let cfg = PropagationConfig {
            lambda,
            beta,
            sigma,
            mixture: mix,
            phi_trigger: 0.1,
            horizon: 40,
            i0: 0.01,
            replicas: 1,
            rng_seed: seed,
            delta: None,
            freeze_models: false,
            keep_replicas: false,
        };
        let mut rng = substream(seed, StreamTag::Replica, 0);
        let models = assign_models(g.n(), &mix, &mut rng).unwrap();
        let mut states = vec![NodeState::Ignorant; g.n()];
        for s in states.iter_mut().step_by(10) {
            *s = NodeState::Spreader;
        }
        let mut was_stifler = vec![false; g.n()];
        for _ in 0..40 {
            step(&g, &models, &mut states, &cfg, gamma, &mut rng);
            for (v, &s) in states.iter().enumerate() {
                match models[v] {
                    NodeModel::Sis => prop_assert_ne!(s, NodeState::Stifler),
                    NodeModel::Sir if was_stifler[v] => prop_assert_eq!(s, NodeState::Stifler),
                    _ => {}
                }
                was_stifler[v] |= s == NodeState::Stifler;
            }
        }
    }

    #[test]
    fn rhs_sums_to_zero_per_class(
        mix in mixture(), lambda in 0.0f64..2.0, sigma in 0.0f64..1.0,
        raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 5),
    ) {
        let dist = DegreeDistribution::power_law(2.5, 2, 6).unwrap();
        let (mut s, mut i, mut r) = (vec![], vec![], vec![]);
        for (a, b, c) in raw {
            let tot = a + b + c + 1e-9;
            s.push(a / tot);
            i.push(b / tot);
            r.push(1.0 - a / tot - b / tot);
            let _ = c;
        }
        let field = DegreeClassField::new(dist, s, i, r).unwrap();
        let d = rhs(&field, &MeanFieldParams { lambda, mixture: mix, sigma }).unwrap();
        for k in 0..d.ds.len() {
            prop_assert!((d.ds[k] + d.di[k] + d.dr[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn ws_pmf_normalizes(half in 1usize..5, p in 0.0f64..=1.0, classical in any::<bool>(), n in 100usize..10_000) {
        let k_ring = 2 * half;
        let rate = if classical { RewireRate::Classical } else { RewireRate::Hybrid { a: 0.5, n } };
        let total: f64 = (0..=k_ring + 200).map(|k| ws_degree_pmf(k, k_ring, p, rate).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hybrid_pdf_dominates_ws_above_m(p in 0.0f64..=1.0, a in 0.0f64..1.0, k in 4usize..300) {
        let rate = RewireRate::Hybrid { a, n: 10_000 };
        let hybrid = hybrid_degree_pdf(k, 4, p, a, 4, rate).unwrap();
        prop_assert!(hybrid >= ws_degree_pmf(k, 4, p, rate).unwrap());
    }

    #[test]
    fn log_bins_keep_total_mass(degrees in proptest::collection::vec(1usize..5_000, 1..400), per_decade in 1u32..20) {
        let h = DegreeHistogram::from_degrees(degrees.iter().copied(), Binning::Log10 { bins_per_decade: per_decade });
        let binned: u64 = h.log_bins(per_decade).iter().map(|b| b.count).sum();
        prop_assert_eq!(binned, degrees.len() as u64);
    }

    #[test]
    fn self_similarity_is_one(values in proptest::collection::vec(1e-6f64..1.0, 2..60)) {
        let c = Curve::from_values("c", &values).unwrap();
        prop_assert_eq!(similarity(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn small_perturbations_score_near_one(values in proptest::collection::vec(0.1f64..1.0, 2..60), eps in 1e-9f64..1e-4) {
        let c = Curve::from_values("c", &values).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + eps).collect();
        let d = Curve::from_values("d", &shifted).unwrap();
        let s = similarity(&c, &d).unwrap();
        prop_assert!((1.0 - s).abs() <= eps / 0.1 + 1e-12);
    }
}

#[test]
fn raw_histogram_matches_degree_sum() {
    let p = GeneratorParams {
        n_total: 2_000,
        a: 0.7,
        k_ring: 4,
        p_rewire: 0.3,
        m_attach: 4,
        rng_seed: 9,
        subnet_plan: None,
    };
    let g = build(NetworkKind::NetworkIII, &p).unwrap();
    let h = empirical_distribution(&g, Binning::Raw).unwrap();
    assert_eq!(h.n(), g.n() as u64);
    assert!((h.mean() * g.n() as f64 - 2.0 * g.edge_count() as f64).abs() < 1e-6);
}
