use boolskel::analysis::{compression_stats, critical_path, degree_histogram};
use boolskel::circuits::{and_tree, full_adder_aig, full_adder_xag, random_aig, ripple_carry_adder};
use boolskel::depgraph::DepGraph;
use boolskel::netcore::{Fanin, NetworkBuilder};
use boolskel::oracle::{bfs_closure, dep_edges, exhaustive_equiv, longest_path, sampled_equiv, DEFAULT_SEED};
use boolskel::reduction::{run, ReductionConfig};

#[test]
fn and4_trees_are_equivalent_but_differ_in_depth() {
    let (balanced, chained) = (and_tree(4, true), and_tree(4, false));
    assert!(exhaustive_equiv(&balanced, &chained).unwrap());
    // gate levels exclude the PO node
    assert_eq!((balanced.depth() - 1, chained.depth() - 1), (2, 3));
    let (pb, pc) = (critical_path(&balanced).unwrap(), critical_path(&chained).unwrap());
    assert_ne!(pb, pc);
    assert_eq!((pb.len(), pc.len()), (3, 4));
}

#[test]
fn and_tree_differs_from_or_tree() {
    let mut b = NetworkBuilder::new();
    let x: Vec<_> = (0..4).map(|i| b.pi(format!("x{i}"))).collect();
    let l = b.or(Fanin::plain(x[0]), Fanin::plain(x[1]));
    let r = b.or(Fanin::plain(x[2]), Fanin::plain(x[3]));
    let f = b.or(Fanin::plain(l), Fanin::plain(r));
    b.po("F", Fanin::plain(f));
    let or_tree = b.build().unwrap();
    assert!(!exhaustive_equiv(&and_tree(4, true), &or_tree).unwrap());
    assert!(!sampled_equiv(&and_tree(4, true), &or_tree, 64, DEFAULT_SEED).unwrap());
}

#[test]
fn equivalent_adders_have_different_degree_profiles() {
    let (aig, xag) = (full_adder_aig(), full_adder_xag());
    assert!(exhaustive_equiv(&aig, &xag).unwrap());
    let (ha, hx) = (degree_histogram(&DepGraph::recover(&aig)), degree_histogram(&DepGraph::recover(&xag)));
    assert_ne!(ha, hx);
    assert!(ha.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn full_adder_depth_matches_longest_path() {
    for net in [full_adder_aig(), full_adder_xag()] {
        let g = DepGraph::recover(&net);
        let (len, _) = longest_path(g.len(), &dep_edges(&g)).unwrap();
        assert_eq!(g.depth(), len);
        assert_eq!(critical_path(&g).unwrap().len(), len);
    }
    let net = full_adder_aig();
    let edges: Vec<(usize, usize)> =
        (0..net.len()).flat_map(|v| net.node(v).fanins.iter().map(move |f| (f.node, v)).collect::<Vec<_>>()).collect();
    assert_eq!(net.depth(), longest_path(net.len(), &edges).unwrap().0);
}

#[test]
fn random_dag_closure_matches_bfs() {
    let g = DepGraph::recover(&random_aig(8, 50, 11));
    let oracle = bfs_closure(g.len(), &dep_edges(&g)).unwrap();
    assert_eq!(oracle.count(), g.reachability().count_ones());
}

#[test]
fn single_and_at_unlimited_k() {
    let mut b = NetworkBuilder::new();
    let x = b.pi("x");
    let y = b.pi("y");
    let g = b.and(Fanin::plain(x), Fanin::plain(y));
    b.po("o", Fanin::plain(g));
    let r = run(&b.build().unwrap(), &ReductionConfig::unlimited()).unwrap();
    assert_eq!(r.skeleton.len(), 3);
    assert_eq!(compression_stats(&r.initial, &r.skeleton).size_ratio, 0.75);
}

#[test]
fn cra4_size_ratio_falls_with_k() {
    let net = ripple_carry_adder(4);
    let ratios: Vec<f64> = (1..=10)
        .map(|k| {
            let r = run(&net, &ReductionConfig::with_k(k)).unwrap();
            compression_stats(&r.initial, &r.skeleton).size_ratio
        })
        .collect();
    assert_eq!(ratios[0], 1.0);
    assert!(ratios.windows(2).all(|w| w[1] <= w[0]), "{ratios:?}");
    assert!(ratios[9] < 0.25);
}
