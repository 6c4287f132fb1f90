use socialhk::bounds::lambda2_ceiling;
use socialhk::spectral::{decompose, rpartite_eigenbasis, verify_rpartite_basis};
use socialhk::{CounterRng, Graph, PartiteSpec};

fn random_graphs(seed: u64, count: usize, max_n: usize) -> Vec<Graph> {
    let mut rng = CounterRng::new(seed).unwrap();
    (0..count)
        .map(|_| {
            let n = 2 + rng.below(max_n as u64 - 1) as usize;
            let p = rng.uniform_in(0.0, 0.6);
            Graph::random_connected(n, p, &mut rng).unwrap()
        })
        .collect()
}

fn named_graphs(n: usize) -> Vec<Graph> {
    vec![
        Graph::path(n).unwrap(),
        Graph::cycle(n).unwrap(),
        Graph::star(n).unwrap(),
        Graph::complete(n).unwrap(),
        Graph::dumbbell(n).unwrap(),
    ]
}

fn check_symmetric_with_loops(g: &Graph) {
    for i in 0..g.n() {
        assert!(g.has_edge(i, i));
        assert!(g.neighbors(i).contains(&i));
        for &j in g.neighbors(i) {
            assert!(g.neighbors(j).contains(&i));
        }
        assert_eq!(g.degree(i), g.neighbors(i).len());
    }
    let a = g.adjacency_matrix();
    assert_eq!(a, a.transpose());
}

#[test]
fn constructors_and_subgraphs_are_symmetric_with_loops() {
    let mut rng = CounterRng::new(3).unwrap();
    for n in 2..=9 {
        for g in named_graphs(n).into_iter().chain(random_graphs(n as u64, 5, 9)) {
            check_symmetric_with_loops(&g);
            let vs: Vec<usize> = (0..g.n()).filter(|_| rng.below(2) == 0).collect();
            if !vs.is_empty() {
                let (sub, map) = g.induced_subgraph(&vs).unwrap();
                check_symmetric_with_loops(&sub);
                for (a, b) in sub.edges() {
                    assert!(g.has_edge(map[*a], map[*b]));
                }
            }
        }
    }
}

/// Independent brute force over ordered pairs `(i, j)`, halved.
fn conductance_by_pairs(g: &Graph) -> f64 {
    let n = g.n();
    let deg = g.degrees();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let inside = |v: usize| mask >> v & 1 == 1;
        let mut ordered = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j && inside(i) != inside(j) && g.has_edge(i, j) {
                    ordered += 1;
                }
            }
        }
        let ds: usize = (0..n).filter(|&v| inside(v)).map(|v| deg[v]).sum();
        let total: usize = deg.iter().sum();
        best = best.min((ordered / 2) as f64 / ds.min(total - ds) as f64);
    }
    best
}

#[test]
fn conductance_agrees_with_pair_enumeration() {
    for g in random_graphs(11, 40, 10).into_iter().chain(named_graphs(7)) {
        let phi = g.conductance().unwrap().value;
        assert!(phi > 0.0 && phi <= 1.0, "{phi}");
        assert!((phi - conductance_by_pairs(&g)).abs() < 1e-15);
    }
    assert!((Graph::path(4).unwrap().conductance().unwrap().value - 0.2).abs() < 1e-15);
}

#[test]
fn singleton_parts_give_complete_graphs() {
    for r in 1..=7 {
        let g = Graph::complete_r_partite(&PartiteSpec::new(vec![1; r]).unwrap());
        assert_eq!(g, Graph::complete(r).unwrap());
    }
}

#[test]
fn effective_diameter_is_at_most_n_minus_one() {
    for g in random_graphs(5, 60, 12) {
        assert!(g.effective_diameter() < g.n());
    }
    assert_eq!(Graph::path(7).unwrap().diameter().unwrap(), 6);
}

#[test]
fn top_eigenvalue_is_one_with_constant_eigenvector() {
    for g in random_graphs(21, 50, 12) {
        let dec = decompose(&g).unwrap();
        assert!((dec.eigenvalues()[0] - 1.0).abs() < 1e-12);
        let a = g.normalized_adjacency();
        let ones = nalgebra::DVector::from_element(g.n(), 1.0);
        assert!((&a * &ones - &ones).amax() < 1e-14);
    }
}

#[test]
fn trace_above_one_forces_positive_nontop_sum() {
    for g in random_graphs(22, 80, 10) {
        if g.is_complete() {
            continue;
        }
        let a = g.normalized_adjacency();
        let dec = decompose(&g).unwrap();
        let trace = a.trace();
        assert!((dec.eigenvalues().iter().sum::<f64>() - trace).abs() < 1e-9);
        if trace > 1.0 {
            assert!(dec.eigenvalues()[1..].iter().sum::<f64>() > 0.0);
        }
    }
}

#[test]
fn second_eigenvalue_respects_diameter_ceiling() {
    let mut graphs = random_graphs(23, 80, 10);
    for n in 2..=10 {
        graphs.extend(named_graphs(n));
    }
    for g in graphs {
        let n = g.n();
        let d = g.diameter().unwrap();
        let l2 = decompose(&g).unwrap().lambda2().abs();
        if d == 0 {
            continue;
        }
        assert!(l2 <= lambda2_ceiling(n, d) + 1e-9, "n {n} d {d} |l2| {l2}");
    }
}

#[test]
fn partite_construction_matches_generic_solver() {
    for n in 2..=8 {
        for spec in PartiteSpec::compositions(n) {
            let basis = rpartite_eigenbasis(&spec).unwrap();
            let rep = verify_rpartite_basis(&spec, &basis).unwrap();
            assert!(rep.passed(), "{:?}: {:?}", spec.part_sizes(), rep.failed_clauses());
            assert!(rep.max_spectrum_gap <= 1e-8);
        }
    }
}
