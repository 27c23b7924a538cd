//! Property tests for the structural invariants of each stage.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sddsolve::chain::ChainConfig;
use sddsolve::cheby::{precond_cheby, ChebyParams};
use sddsolve::cholesky::{ldl_base, partial_cholesky};
use sddsolve::cli::{parse_report, report_json};
use sddsolve::decompose::decompose;
use sddsolve::fiedler::approx_fiedler;
use sddsolve::gen::{random_sdd, random_sddm, random_weighted};
use sddsolve::graph::{laplacian_of, quadratic_form, WeightedGraph};
use sddsolve::io::{format_edge_list, format_matrix_market, format_vector, parse_edge_list, parse_matrix_market, parse_vector};
use sddsolve::matrix::{classify, gremban_recover, gremban_reduce, MatrixKind};
use sddsolve::operator::dot;
use sddsolve::solve::{solve, SolveConfig, SolveMode};
use sddsolve::spectral::{materialize, pinv, symmetric_eigenvalues};
use sddsolve::tree::{build_tree, compute_stretch, path_resistance, TreeStrategy};
use sddsolve::ultra::{augment_tree, ultra_sparsify, UltraBudget, UltraConfig};
use sddsolve::Edge;

fn strategy() -> impl Strategy<Value = TreeStrategy> {
    prop_oneof![
        Just(TreeStrategy::MaxWeightSpanning),
        Just(TreeStrategy::ShortestPathByResistance),
        Just(TreeStrategy::ClusterLowStretch),
    ]
}

/// Connected weighted graph with `n` in `lo..hi`.
fn graph(lo: usize, hi: usize) -> impl Strategy<Value = WeightedGraph> {
    (lo..hi, 0usize..40, any::<u64>()).prop_map(|(n, extra, seed)| random_weighted(n, extra, 10.0, seed))
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn laplacian_rows_sum_to_zero_and_match_quadratic_form(g in graph(2, 40), xs in prop::collection::vec(-5.0f64..5.0, 40)) {
        let a = laplacian_of(&g);
        let ones = a.apply(&vec![1.0; g.n()]).unwrap();
        prop_assert!(ones.iter().all(|v| v.abs() < 1e-9));
        let x = &xs[..g.n()];
        let q = quadratic_form(&g, x).unwrap();
        let ax = dot(x, &a.apply(x).unwrap());
        prop_assert!((q - ax).abs() <= 1e-9 * q.abs().max(1.0));
        prop_assert_eq!(classify(&a).kind, MatrixKind::Laplacian);
    }

    #[test]
    fn classification_is_nested(n in 2usize..30, seed in any::<u64>()) {
        let sddm = classify(&random_sddm(n, n, false, seed));
        prop_assert!(sddm.is_sddm0() && sddm.is_sdd0());
        let sdd = classify(&random_sdd(n, n, seed));
        prop_assert!(sdd.is_sdd0());
    }

    #[test]
    fn gremban_round_trip(n in 3usize..25, seed in any::<u64>()) {
        let a = random_sdd(n, 2 * n, seed);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let (ah, bh) = gremban_reduce(&a, &b).unwrap();
        prop_assert!(classify(&ah).is_sddm0());
        let xh = pinv(&ah.to_dense()) * DVector::from_vec(bh);
        let x = gremban_recover(xh.as_slice()).unwrap();
        let want = pinv(&a.to_dense()) * DVector::from_vec(b);
        let ad = a.to_dense();
        let diff = DVector::from_vec(x) - &want;
        prop_assert!(diff.dot(&(&ad * &diff)).abs() <= 1e-16 * want.dot(&(&ad * &want)).max(1e-300) + 1e-18);
    }

    #[test]
    fn factored_pseudo_inverse_axioms(n in 2usize..30, extra in 0usize..30, singular in any::<bool>(), seed in any::<u64>()) {
        let a = random_sddm(n, extra, singular, seed);
        let ad = a.to_dense();
        let f = partial_cholesky(&a).unwrap();
        prop_assert!(f.nnz_l() <= 3 * n);
        let j = a.noff() as i64 - (n as i64 - 1);
        prop_assert!(f.reduced().n() as i64 <= (2 * j - 2).max(0));
        let x = if f.reduced().n() == 0 {
            materialize(n, |b| f.apply_pinv(&sddsolve::operator::Identity(0), b).unwrap())
        } else {
            let base = ldl_base(f.reduced()).unwrap();
            materialize(n, |b| f.apply_pinv(&base, b).unwrap())
        };
        prop_assert!((&ad * &x * &ad - &ad).amax() < 1e-8);
        prop_assert!((&x * &ad * &x - &x).amax() < 1e-8);
        prop_assert!((&x - x.transpose()).amax() < 1e-8);
    }

    #[test]
    fn tree_edges_have_unit_stretch_and_path_inequality_holds(g in graph(3, 13), s in strategy(), pick in any::<prop::sample::Index>()) {
        let t = build_tree(&g, s).unwrap();
        prop_assert_eq!(t.edges().len(), g.n() - 1);
        let table = compute_stretch(&t, g.edges());
        for (e, st) in g.edges().iter().zip(&table.stretch) {
            if t.has_edge(e.u, e.v, e.w) {
                prop_assert_eq!(*st, 1.0);
            }
        }
        // w r(P) L_P - L_e is positive semidefinite for the tree path P of e
        let e = g.edges()[pick.index(g.m())];
        let r = path_resistance(&t, e.u, e.v);
        let mut on_path = Vec::new();
        for te in t.edges() {
            let via = path_resistance(&t, e.u, te.u) + te.resistance() + path_resistance(&t, te.v, e.v);
            let via2 = path_resistance(&t, e.u, te.v) + te.resistance() + path_resistance(&t, te.u, e.v);
            if (via - r).abs() <= 1e-12 * r || (via2 - r).abs() <= 1e-12 * r {
                on_path.push(Edge::new(te.u, te.v, e.w * r * te.w));
            }
        }
        let lp = laplacian_of(&WeightedGraph::from_edge_list(g.n(), &on_path).unwrap()).to_dense();
        let le = laplacian_of(&WeightedGraph::from_edge_list(g.n(), &[e]).unwrap()).to_dense();
        let min = symmetric_eigenvalues(&(lp - le))[0];
        prop_assert!(min >= -1e-9 * r * e.w, "{}", min);
    }

    #[test]
    fn decomposition_respects_budget(g in graph(2, 60), budget_frac in 0.0f64..1.0, s in strategy()) {
        let t = build_tree(&g, s).unwrap();
        let table = compute_stretch(&t, g.edges());
        let budget = 1.0 + 1e-9 + budget_frac * (table.eta_total - 1.0 - 1e-9);
        prop_assume!(budget > 1.0 && budget <= table.eta_total);
        let d = decompose(&t, g.edges(), &table.eta, budget).unwrap();
        // the count bound is h <= t for integer t, h <= ceil(t) otherwise
        prop_assert!(d.h() as f64 <= budget.ceil());
        if let Some(&int_t) = [budget.floor(), 2.0].iter().find(|&&x| x > 1.0 && x <= table.eta_total) {
            prop_assert!(decompose(&t, g.edges(), &table.eta, int_t).unwrap().h() as f64 <= int_t);
        }
        let mut mass = vec![0.0; d.h()];
        for e in 0..g.m() {
            for &i in d.rho(e) {
                mass[i] += table.eta[e];
            }
        }
        for (i, w) in d.sets.iter().enumerate() {
            if w.len() > 1 {
                prop_assert!(mass[i] <= 4.0 * table.eta_total / budget * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn augment_is_small_deterministic_and_order_free(g in graph(4, 50), budget in 2.0f64..12.0, s in strategy(), rot in any::<prop::sample::Index>()) {
        let t = build_tree(&g, s).unwrap();
        prop_assume!(budget <= compute_stretch(&t, g.edges()).eta_total);
        let f = augment_tree(&t, g.edges(), budget).unwrap();
        prop_assert!(f.len() as f64 <= budget * budget / 2.0);
        prop_assert_eq!(&f, &augment_tree(&t, g.edges(), budget).unwrap());
        for &i in &f {
            let e = g.edges()[i];
            prop_assert!(!t.has_edge(e.u, e.v, e.w));
        }
        let mut shuffled = g.edges().to_vec();
        shuffled.rotate_left(rot.index(g.m()));
        let f2 = augment_tree(&t, &shuffled, budget).unwrap();
        let key = |es: &[Edge], ids: &[usize]| { let mut k: Vec<_> = ids.iter().map(|&i| es[i].key()).collect(); k.sort(); k };
        prop_assert_eq!(key(g.edges(), &f), key(&shuffled, &f2));
    }

    #[test]
    fn ultra_sparsifier_is_a_subgraph_containing_its_tree(g in graph(4, 60), k in 1.0f64..40.0, frac in 0.01f64..1.0, seed in any::<u64>()) {
        let cfg = UltraConfig { budget: UltraBudget::OffTreeFraction(frac), ..Default::default() };
        let u = ultra_sparsify(&g, k, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(u.tree_edges.len(), g.n() - 1);
        for e in u.tree_edges.iter().chain(&u.extra_edges) {
            let i = g.find_edge(e.u, e.v);
            prop_assert!(i.is_some());
            prop_assert_eq!(g.edges()[i.unwrap()].w, e.w);
        }
        prop_assert!(u.graph().is_connected());
        let again = ultra_sparsify(&g, k, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(u.extra_edges, again.extra_edges);
    }

    #[test]
    fn chebyshev_operator_is_symmetric(n in 3usize..20, seed in any::<u64>(), eps in 0.01f64..0.9) {
        let a = random_sddm(n, n, false, seed).to_dense();
        let d = DMatrix::from_diagonal(&a.diagonal());
        let f = pinv(&d);
        let ev = sddsolve::spectral::generalized_spectrum(&a, &d).unwrap();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        let p = ChebyParams::for_accuracy(lo, hi, eps);
        let z = materialize(n, |b| precond_cheby(&a, b, p.t, &f, lo, hi).unwrap());
        prop_assert!((&z - z.transpose()).amax() <= 1e-8 * z.amax().max(1.0));
    }

    #[test]
    fn solve_meets_requested_accuracy(n in 2usize..60, extra in 0usize..60, singular in any::<bool>(), seed in any::<u64>(), mode_ix in 0usize..3, eps_exp in 1i32..9) {
        let eps = 10f64.powi(-eps_exp);
        let a = random_sddm(n, extra, singular, seed);
        let b: Vec<f64> = (0..n).map(|i| ((i * 17 + 3) % 11) as f64 - 5.0).collect();
        let mode = [SolveMode::Recursive, SolveMode::OneLevel, SolveMode::PcgTree][mode_ix];
        let cfg = SolveConfig { mode, chain: ChainConfig { base_dim_threshold: Some(8), ..Default::default() }, ..Default::default() };
        let (x, rep) = solve(&a, &b, eps, &cfg).unwrap();
        let ad = a.to_dense();
        let want = pinv(&ad) * DVector::from_vec(b);
        let diff = DVector::from_vec(x) - &want;
        let err = diff.dot(&(&ad * &diff)).max(0.0).sqrt();
        let scale = want.dot(&(&ad * &want)).sqrt();
        prop_assert!(err <= eps * scale + 1e-12, "{:?}: {} > {}", mode, err / scale, eps);
        let rep2 = parse_report(&report_json(&rep).unwrap()).unwrap();
        prop_assert_eq!(rep2, rep);
    }

    #[test]
    fn fiedler_vector_is_unit_and_balanced(g in graph(2, 40), seed in any::<u64>()) {
        let a = laplacian_of(&g);
        let r = approx_fiedler(&a, 0.5, 0.5, &ChainConfig { seed, ..Default::default() }).unwrap();
        prop_assert!(r.v.iter().sum::<f64>().abs() <= 1e-9);
        prop_assert!((dot(&r.v, &r.v) - 1.0).abs() <= 1e-12);
        let l2 = sddsolve::spectral::lambda2(&a.to_dense());
        prop_assert!(r.rayleigh >= l2 * (1.0 - 1e-9));
    }

    #[test]
    fn text_formats_round_trip(g in graph(2, 40), n in 1usize..30, seed in any::<u64>(), xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..40)) {
        let g2 = parse_edge_list(&format_edge_list(&g)).unwrap();
        prop_assert_eq!(g2.edges(), g.edges());
        prop_assert_eq!(format_edge_list(&g2), format_edge_list(&g));
        let a = random_sdd(n, n, seed);
        prop_assert_eq!(parse_matrix_market(&format_matrix_market(&a)).unwrap(), a);
        prop_assert_eq!(parse_vector(&format_vector(&xs)).unwrap(), xs);
    }
}
