use std::collections::BTreeSet;

use proptest::prelude::*;

use boolskel::analysis::{
    compression_stats, critical_path, extract_critical_region, similarity, similarity_with, CriticalRegion, Metric,
    TimingPath,
};
use boolskel::circuits::random_aig;
use boolskel::depgraph::{DepGraph, InverterMode};
use boolskel::netcore::{parse_aiger, write_aiger_ascii, write_aiger_binary, BooleanNetwork};
use boolskel::oracle::{bfs_closure, dep_edges, exhaustive_equiv, longest_path, recovery_mismatch, verify_skeletonization};
use boolskel::reduction::{run, FaninLimit, ReductionConfig};

fn network() -> impl Strategy<Value = BooleanNetwork> {
    (2usize..10, 1usize..120, any::<u64>()).prop_map(|(pis, ands, seed)| random_aig(pis, ands, seed))
}

fn fanin_limit() -> impl Strategy<Value = FaninLimit> {
    prop_oneof![(1usize..7).prop_map(|k| FaninLimit::bounded(k).unwrap()), Just(FaninLimit::Unlimited)]
}

fn region() -> impl Strategy<Value = CriticalRegion> {
    proptest::collection::btree_set(0usize..40, 0..20).prop_map(|members| CriticalRegion { members })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reachability_matches_bfs(net in network()) {
        let g = DepGraph::recover(&net);
        let oracle = bfs_closure(g.len(), &dep_edges(&g)).unwrap();
        for u in 0..g.len() {
            for w in 0..g.len() {
                prop_assert_eq!(g.reaches(u, w), oracle.get(u, w));
            }
        }
    }

    #[test]
    fn levels_match_longest_path(net in network()) {
        let g = DepGraph::recover(&net);
        let (len, witness) = longest_path(g.len(), &dep_edges(&g)).unwrap();
        prop_assert_eq!(g.depth(), len);
        prop_assert_eq!(witness.len(), len + 1);
        let path = critical_path(&g).unwrap();
        prop_assert_eq!(path.len(), g.depth());
        prop_assert!(path.nodes.windows(2).all(|w| g.has_edge(w[0], w[1])));
    }

    #[test]
    fn reduction_keeps_every_invariant(
        pis in 2usize..12,
        ands in 1usize..200,
        seed in any::<u64>(),
        k in fanin_limit(),
    ) {
        let net = random_aig(pis, ands, seed);
        let r = run(&net, &ReductionConfig::new(k)).unwrap();
        let violations = verify_skeletonization(&r);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn levels_never_increase(net in network(), k in fanin_limit()) {
        let r = run(&net, &ReductionConfig::new(k)).unwrap();
        for node in r.skeleton.nodes() {
            prop_assert!(node.level <= r.initial.level(node.orig_id));
        }
        prop_assert!(r.skeleton.depth() <= r.initial.depth());
    }

    #[test]
    fn k1_is_identity(net in network()) {
        let r = run(&net, &ReductionConfig::with_k(1)).unwrap();
        let stats = compression_stats(&r.initial, &r.skeleton);
        prop_assert_eq!(stats.size_ratio, 1.0);
        prop_assert_eq!(stats.depth_ratio, 1.0);
        prop_assert_eq!(r.skeleton.edge_count(), r.initial.edge_count());
    }

    #[test]
    fn aiger_round_trips(net in network()) {
        let mut ascii = Vec::new();
        write_aiger_ascii(&net, &mut ascii).unwrap();
        prop_assert_eq!(&parse_aiger(&ascii).unwrap(), &net);
        let mut binary = Vec::new();
        write_aiger_binary(&net, &mut binary).unwrap();
        let back = parse_aiger(&binary).unwrap();
        prop_assert_eq!(back.len(), net.len());
        prop_assert!(exhaustive_equiv(&back, &net).unwrap());
    }

    #[test]
    fn recovery_preserves_function(net in network(), shared in any::<bool>()) {
        let mode = if shared { InverterMode::Shared } else { InverterMode::PerEdge };
        let g = DepGraph::recover_with(&net, mode);
        prop_assert_eq!(recovery_mismatch(&net, &g, 256, 1), None);
    }

    #[test]
    fn evaluation_is_deterministic(net in network(), word in any::<u64>()) {
        let bits: Vec<bool> = (0..net.pis().len()).map(|i| word >> i & 1 == 1).collect();
        prop_assert_eq!(net.evaluate_values(&bits).unwrap(), net.clone().evaluate_values(&bits).unwrap());
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in region(), b in region()) {
        for metric in [Metric::Jaccard, Metric::Overlap] {
            let ab = similarity_with(&a, &b, metric);
            prop_assert_eq!(ab, similarity_with(&b, &a, metric));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(similarity_with(&a, &a, metric), 1.0);
        }
    }

    #[test]
    fn regions_grow_with_paths(net in network(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let paths: Vec<TimingPath> = picks.iter().map(|i| TimingPath::new(vec![i.index(net.len())])).collect();
        let mut last: BTreeSet<usize> = BTreeSet::new();
        for n in 1..=paths.len() {
            let r = extract_critical_region(&net, &paths[..n]).unwrap();
            prop_assert!(last.is_subset(&r.members));
            last = r.members;
        }
        let whole: CriticalRegion = last.iter().copied().collect();
        prop_assert_eq!(similarity(&whole, &whole), 1.0);
    }

    #[test]
    fn larger_k_never_exceeds_k1(net in network(), k in fanin_limit()) {
        let base = run(&net, &ReductionConfig::with_k(1)).unwrap().skeleton.len();
        prop_assert!(run(&net, &ReductionConfig::new(k)).unwrap().skeleton.len() <= base);
    }
}
