mod common;

use common::*;
use proptest::prelude::*;
use turan_core::audit::{audit_extremal_structure, balancing_gain, CLAUSE_BALANCED, CLAUSE_DOMINATING, CLAUSE_MULTIPARTITE};
use turan_core::combinatorics::turan_edges;
use turan_core::graph::{crossing_edges, disjoint_union, intra_class_edges, join, turan, turan_parts};
use turan_core::matching::max_matching;
use turan_core::spectral::{eigen_residual, quotient_rho};
use turan_core::*;

fn arb_graph(max_n: usize, density: f64) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::bool::weighted(density), pairs).prop_map(move |bits| {
            let mut g = Graph::new(n).unwrap();
            let mut i = 0;
            for v in 1..n {
                for u in 0..v {
                    if bits[i] {
                        g.add_edge(u, v);
                    }
                    i += 1;
                }
            }
            g
        })
    })
}

fn arb_connected(max_n: usize) -> impl Strategy<Value = Graph> {
    // A random spanning path keeps the graph connected.
    (arb_graph(max_n, 0.3), any::<u64>()).prop_map(|(mut g, seed)| {
        let n = g.n();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        for w in order.windows(2) {
            g.add_edge(w[0], w[1]);
        }
        g
    })
}

fn assert_well_formed(g: &Graph) {
    let mut sum = 0;
    for v in 0..g.n() {
        assert!(!g.has_edge(v, v));
        for u in 0..g.n() {
            assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
        }
        assert_eq!(g.degree(v), g.neighbors(v).count());
        sum += g.degree(v);
    }
    assert_eq!(sum, 2 * g.edge_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructors_and_mutations_stay_simple(g in arb_graph(40, 0.4), u in 0usize..40, v in 0usize..40) {
        assert_well_formed(&g);
        let (u, v) = (u % g.n(), v % g.n());
        let mut h = g.clone();
        if u != v {
            h.add_edge(u, v);
            assert_well_formed(&h);
            h.remove_edge(u, v);
            assert_well_formed(&h);
        }
        assert_well_formed(&g.complement());
        let keep: Vec<usize> = (0..g.n()).filter(|x| x % 3 != 1).collect();
        assert_well_formed(&g.induced(&keep).unwrap());
    }

    #[test]
    fn join_edge_count(g in arb_graph(20, 0.5), h in arb_graph(20, 0.5)) {
        let j = join(&g, &h).unwrap();
        prop_assert_eq!(j.edge_count(), g.edge_count() + h.edge_count() + g.n() * h.n());
        assert_well_formed(&j);
        prop_assert_eq!(disjoint_union(&g, &h).unwrap().edge_count(), g.edge_count() + h.edge_count());
    }

    #[test]
    fn crossing_plus_intra_is_total(g in arb_graph(24, 0.5), labels in proptest::collection::vec(0usize..4, 24)) {
        let p = PartitionLabeling::new(4, labels[..g.n()].to_vec()).unwrap();
        prop_assert_eq!(p.class_sizes().iter().sum::<usize>(), g.n());
        let c = crossing_edges(&g, &p).unwrap();
        prop_assert_eq!(c, g.edge_count() - intra_class_edges(&g, &p).unwrap());
    }

    #[test]
    fn matching_matches_brute_force(g in arb_graph(8, 0.4)) {
        let m = max_matching(&g);
        prop_assert_eq!(m.size, brute_matching(&g));
        prop_assert_eq!(m.edges.len(), m.size);
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &m.edges {
            prop_assert!(g.has_edge(u, v) && seen.insert(u) && seen.insert(v));
        }
    }

    #[test]
    fn spectral_result_invariants(g in arb_connected(40)) {
        let s = spectral_radius(&g, 1e-10).unwrap();
        prop_assert!(s.converged);
        prop_assert!(s.residual <= 1e-10);
        prop_assert!(eigen_residual(&g, s.rho, &s.vector) <= 1e-10);
        prop_assert!(s.vector.iter().all(|&x| x > 0.0));
        prop_assert_eq!(s.vector.iter().copied().fold(f64::MIN, f64::max), 1.0);
        prop_assert!((s.rho - dense_rho(&g)).abs() < 1e-8);
    }

    #[test]
    fn spectral_handles_disconnected(g in arb_graph(30, 0.15)) {
        let s = spectral_radius(&g, 1e-10).unwrap();
        prop_assert!(s.residual <= 1e-10);
        prop_assert!((s.rho - dense_rho(&g)).abs() < 1e-8);
    }

    #[test]
    fn adding_an_edge_raises_rho(g in arb_connected(50), pick in any::<proptest::sample::Index>()) {
        let non: Vec<(usize, usize)> = g.non_edges().collect();
        prop_assume!(!non.is_empty());
        let (u, v) = non[pick.index(non.len())];
        let mut h = g.clone();
        h.add_edge(u, v);
        let (a, b) = (spectral_radius(&g, 1e-10).unwrap().rho, spectral_radius(&h, 1e-10).unwrap().rho);
        prop_assert!(b - a > 0.0, "{} -> {}", a, b);
    }

    #[test]
    fn quotient_agrees_with_power_iteration(k in 1usize..=4, parts in proptest::collection::vec(1usize..=20, 1..=4)) {
        let r = parts.len();
        let g = extremal_graph_with(k, &parts);
        let s = spectral_radius(&g, 1e-12).unwrap();
        prop_assert!((s.rho - quotient_rho(k, r, &parts).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn packing_search_agrees_with_naive(g in arb_graph(9, 0.6), k in 1usize..=2, r in 1usize..=3) {
        let v = is_free(&g, k, r).unwrap();
        prop_assert_eq!(v.free, !naive_has_packing(&g, k, r));
        if let Some(w) = &v.witness {
            prop_assert_eq!(w.cliques.len(), k);
            w.validate(&g).unwrap();
        }
    }

    #[test]
    fn packing_search_on_dense_structured_graphs(k in 2usize..=3, r in 2usize..=3, extra in 0usize..4, seed in any::<u64>()) {
        // Near-extremal graphs, where twins and large clique counts dominate.
        let n = (k * (r + 1) + r + extra).min(12);
        let mut g = extremal_graph(n, k, r).unwrap().graph;
        let non: Vec<(usize, usize)> = g.non_edges().collect();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        if !non.is_empty() {
            let (u, v) = non[(seed % non.len() as u64) as usize];
            g.add_edge(u, v);
        }
        let (u, v) = edges[((seed >> 20) % edges.len() as u64) as usize];
        g.remove_edge(u, v);
        let v = is_free(&g, k, r).unwrap();
        prop_assert_eq!(v.free, !naive_has_packing(&g, k, r));
        if let Some(w) = &v.witness {
            w.validate(&g).unwrap();
        }
    }

    #[test]
    fn not_free_is_monotone(g in arb_graph(12, 0.6), pick in any::<proptest::sample::Index>()) {
        let non: Vec<(usize, usize)> = g.non_edges().collect();
        prop_assume!(!non.is_empty());
        if !is_free(&g, 2, 2).unwrap().free {
            let (u, v) = non[pick.index(non.len())];
            let mut h = g.clone();
            h.add_edge(u, v);
            prop_assert!(!is_free(&h, 2, 2).unwrap().free);
        }
    }

    #[test]
    fn canonical_form_decides_isomorphism(g in arb_graph(7, 0.5), other in arb_graph(7, 0.5), perm_seed in any::<u64>(), relabel in any::<bool>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&g.permuted(&perm)).unwrap());
        // Half the cases compare against a relabeled copy with one edge toggled.
        let h = if relabel {
            let mut h = g.permuted(&perm);
            if n >= 2 {
                let (u, v) = ((perm_seed % n as u64) as usize, ((perm_seed >> 8) % n as u64) as usize);
                if u != v {
                    if h.has_edge(u, v) { h.remove_edge(u, v) } else { h.add_edge(u, v) }
                }
            }
            h
        } else {
            other
        };
        let same = canonical_form(&g).unwrap() == canonical_form(&h).unwrap();
        prop_assert_eq!(same, brute_isomorphic(&g, &h));
    }

    #[test]
    fn canonical_form_relabel_invariant_large(g in arb_graph(64, 0.5), rot in 0usize..64) {
        let n = g.n();
        let perm: Vec<usize> = (0..n).map(|v| (v * 7 + rot) % n).collect();
        prop_assume!(gcd(7, n) == 1);
        let lab = canonical_labeling(&g).unwrap();
        for gen in &lab.generators {
            prop_assert_eq!(&g.permuted(gen), &g);
        }
        prop_assert_eq!(lab.form(), canonical_form(&g.permuted(&perm)).unwrap());
    }

    #[test]
    fn balancing_gain_is_positive(k in 1usize..=4, r in 2usize..=4, sizes in proptest::collection::vec(1usize..=60, 4)) {
        let parts = &sizes[..r];
        let (i, j) = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).max_by_key(|&(i, j)| parts[i] as i64 - parts[j] as i64).unwrap();
        prop_assume!(parts[i] >= parts[j] + 2);
        prop_assert!(balancing_gain(k, r, parts, i, j).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn graph6_round_trip(g in arb_graph(50, 0.5)) {
        let s = graph6::encode(&g);
        prop_assert_eq!(graph6::decode(&s).unwrap(), g.clone());
        if g.n() < 63 {
            prop_assert_eq!(hand_decode_graph6(&s), g);
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn extremal_graph_with(k: usize, parts: &[usize]) -> Graph {
    graph::DominatedMultipartite::new(k, parts).unwrap().graph
}

#[test]
fn turan_split_and_edges() {
    for n in 0..=200 {
        for r in 1..=10 {
            let parts = turan_parts(n, r).unwrap();
            assert_eq!(parts.iter().sum::<usize>(), n);
            assert!(parts.iter().max().unwrap() - parts.iter().min().unwrap() <= 1);
            let sq: usize = parts.iter().map(|s| s * s).sum();
            assert_eq!(turan_edges(n, r).unwrap() as usize, (n * n - sq) / 2);
            if n <= 60 {
                assert_eq!(turan(n, r).unwrap().edge_count() as u64, turan_edges(n, r).unwrap());
            }
        }
    }
}

#[test]
fn bipartite_convergence() {
    for m in 1..=30 {
        let g = graph::complete_multipartite(&[m, m]).unwrap();
        let s = spectral_radius(&g, 1e-10).unwrap();
        assert!(s.converged);
        assert!((s.rho - m as f64).abs() < 1e-9, "m = {m}");
    }
}

#[test]
fn structure_audit_family_and_near_misses() {
    for k in 1..=4 {
        for r in 1..=4 {
            for n in (k * (r + 1)).max(2)..=200 {
                let e = extremal_graph(n, k, r).unwrap();
                let a = audit_extremal_structure(&e.graph, k, r).unwrap();
                assert!(a.passed, "({n},{k},{r}) {a:?}");
                if n > 40 && n % 7 != 0 {
                    continue;
                }
                near_misses(&e, k, r);
            }
        }
    }
}

fn near_misses(e: &graph::DominatedMultipartite, k: usize, r: usize) {
    let n = e.graph.n();
    let clause = |g: &Graph| audit_extremal_structure(g, k, r).unwrap().failing_clause;
    let first_part = k - 1;
    let part_size = e.parts[0];
    // One edge inside a part.
    if part_size >= 2 {
        let mut g = e.graph.clone();
        g.add_edge(first_part, first_part + 1);
        assert!(clause(&g).is_some());
        assert_ne!(clause(&g).as_deref(), Some(CLAUSE_BALANCED));
    }
    // One crossing edge removed.
    if r >= 2 && e.parts[1] > 0 {
        let mut g = e.graph.clone();
        g.remove_edge(first_part, first_part + part_size);
        let c = clause(&g);
        assert!(c.as_deref() == Some(CLAUSE_MULTIPARTITE) || c.as_deref() == Some(CLAUSE_DOMINATING), "{c:?}");
    }
    // One dominating edge missing.
    if k >= 2 {
        let mut g = e.graph.clone();
        g.remove_edge(0, n - 1);
        assert_eq!(clause(&g).as_deref(), Some(CLAUSE_DOMINATING));
    }
    // Parts unbalanced by 2.
    if r >= 2 && e.parts[r - 1] >= 1 && e.parts[0] >= 1 {
        let mut parts = e.parts.clone();
        parts[0] += 1;
        parts[r - 1] -= 1;
        if parts[0] - parts[r - 1] >= 2 && parts[r - 1] >= 2 {
            let g = graph::DominatedMultipartite::new(k, &parts).unwrap().graph;
            assert_eq!(clause(&g).as_deref(), Some(CLAUSE_BALANCED), "{parts:?}");
        }
    }
}
