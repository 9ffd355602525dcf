mod common;

#[test]
fn control_dependence_matches_path_definition() {
    let tally = common::check_control_dependence(150, 7);
    assert_eq!(tally.mismatches, 0);
    assert!(tally.max_nodes <= 15);
}

#[test]
fn forward_slice_matches_balanced_path_search() {
    let tally = common::check_slicer(250, 11);
    assert_eq!(tally.mismatches, 0);
    assert!(tally.max_nodes <= 30);
}

#[test]
fn random_methods_exercise_branches_and_loops() {
    let mut rng = fastrand::Rng::with_seed(3);
    let sources: Vec<String> = (0..200).map(|_| common::random_method_source(&mut rng)).collect();
    let loaded = sources.iter().filter(|s| mergeifc::lang::load(s, "r.mj").is_ok()).count();
    assert!(loaded > 150, "only {loaded} of 200 generated methods load");
    assert!(sources.iter().any(|s| s.contains("while")));
    assert!(sources.iter().any(|s| s.contains("else")));
    assert!(sources.iter().any(|s| s.contains("throw")));
}

#[test]
fn balanced_search_is_stricter_than_plain_reachability() {
    use mergeifc::graph::{EdgeKind, NodeId};
    use std::collections::BTreeSet;
    let mut rng = fastrand::Rng::with_seed(5);
    let mut stricter = 0;
    for _ in 0..300 {
        let g = common::random_sdg(&mut rng);
        for i in 0..g.sdg.node_count() {
            let start = BTreeSet::from([NodeId(i as u32)]);
            let mut plain = start.clone();
            let mut work: Vec<NodeId> = start.iter().copied().collect();
            while let Some(n) = work.pop() {
                for &(t, k) in g.sdg.succs(n) {
                    if k != EdgeKind::Summary && plain.insert(t) {
                        work.push(t);
                    }
                }
            }
            let balanced = common::realizable_reach(&g.sdg, &start);
            assert!(balanced.is_subset(&plain));
            stricter += usize::from(balanced != plain);
        }
    }
    assert!(stricter > 0, "no sample distinguishes realizable paths");
}
