use std::collections::BTreeSet;

use ibet_core::apsp::commit;
use ibet_core::counters::{check_bounds, DEFAULT_BOUND_FACTOR};
use ibet_core::gen;
use ibet_core::ibet::{dependency_decrease, dependency_increase, DependencyWork};
use ibet_core::oracle::{oracle_affected_pairs, oracle_betweenness};
use ibet_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
struct Case {
    seed: u64,
    n: usize,
    p: f64,
    directedness: Directedness,
    weighting: Weighting,
}

fn cases() -> impl Strategy<Value = Case> {
    (
        any::<u64>(),
        5usize..22,
        prop::sample::select(vec![0.08, 0.15, 0.3]),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(seed, n, p, d, w)| Case {
            seed,
            n,
            p,
            directedness: if d { Directedness::Directed } else { Directedness::Undirected },
            weighting: if w { Weighting::Weighted } else { Weighting::Unit },
        })
}

fn close_scores(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-8 * x.abs().max(y.abs()).max(1.0))
}

fn run_events(case: &Case, events: usize, mut check: impl FnMut(&Graph, &UpdateEvent, &mut ChaCha8Rng)) {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let mut g = gen::gnp(&mut rng, case.n, case.p, case.directedness, case.weighting);
    for _ in 0..events {
        let Some(e) = gen::random_event(&mut rng, &g) else { break };
        check(&g, &e, &mut rng);
        g.apply_update(&e).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engines_track_the_oracle(case in cases()) {
        let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
        let g0 = gen::gnp(&mut rng, case.n, case.p, case.directedness, case.weighting);
        let mut gi = g0.clone();
        let (mut ai, mut si) = init_apsp_with_scores(&g0);
        let mut gw = g0.clone();
        let (mut aw, mut sw) = init_apsp_with_scores(&g0);
        let mut kdb = g0.is_unit().then(|| {
            let (st, sc) = KdbState::build(&g0).unwrap();
            (g0.clone(), st, sc)
        });
        for _ in 0..8 {
            let Some(e) = gen::random_event(&mut rng, &gi) else { break };
            ibet_update(&mut gi, &mut ai, &mut si, &e).unwrap();
            kwcc_update(&mut gw, &mut aw, &mut sw, &e).unwrap();
            let expect = oracle_betweenness(&gi);
            prop_assert!(close_scores(si.as_slice(), &expect), "ibet {:?} vs {:?}", si, expect);
            prop_assert!(close_scores(sw.as_slice(), &expect), "kwcc {:?} vs {:?}", sw, expect);
            prop_assert!(ai.max_dist_diff(&init_apsp(&gi)) < 1e-9);
            prop_assert!(ai.max_sigma_diff(&init_apsp(&gi)) < 1e-9);
            if let Some((gk, st, sc)) = kdb.as_mut() {
                kdb_update(gk, st, sc, &e).unwrap();
                prop_assert!(close_scores(sc.as_slice(), &expect), "kdb {:?} vs {:?}", sc, expect);
            }
        }
    }

    #[test]
    fn staged_pairs_are_exactly_the_changed_pairs(case in cases()) {
        run_events(&case, 6, |g, e, _| {
            let apsp = init_apsp(g);
            let delta = apsp_update(g, e, &apsp, &mut NoTally);
            let mut after = g.clone();
            after.apply_update(e).unwrap();
            let mut staged = BTreeSet::new();
            for p in &delta.staged {
                assert!(staged.insert((p.source, p.target)), "pair staged twice");
                if !g.is_directed() {
                    assert!(staged.insert((p.target, p.source)), "mirror staged twice");
                }
            }
            // Pairs with equal values before and after may be staged only if
            // their count changed; the oracle lists exactly the changed ones.
            assert_eq!(staged, oracle_affected_pairs(g, &after));
        });
    }

    #[test]
    fn sources_shrink_along_the_target_tree(case in cases()) {
        run_events(&case, 6, |g, e, _| {
            let apsp = init_apsp(g);
            let delta = apsp_update(g, e, &apsp, &mut NoTally);
            if delta.is_empty() {
                return;
            }
            for (i, &t) in delta.affected_targets.iter().enumerate().skip(1) {
                let p = delta.predecessor[i];
                let parent: BTreeSet<_> = delta.sources_of(p).unwrap().iter().collect();
                for s in &delta.target_sources[i] {
                    assert!(parent.contains(s), "s={s} in S({t}) but not in S({p})");
                }
            }
            // Brute force: every staged pair has its target in T(u) and its
            // source in S(v).
            let src: BTreeSet<_> = delta.affected_sources.iter().collect();
            let tgt: BTreeSet<_> = delta.affected_targets.iter().collect();
            for p in &delta.staged {
                assert!(src.contains(&p.source) && tgt.contains(&p.target));
            }
        });
    }

    #[test]
    fn dependency_passes_bridge_old_and_new(case in cases()) {
        run_events(&case, 4, |g, e, _| {
            let apsp0 = init_apsp(g);
            let delta = apsp_update(g, e, &apsp0, &mut NoTally);
            let mut g1 = g.clone();
            g1.apply_update(e).unwrap();
            let mut apsp1 = apsp0.clone();
            commit(&mut apsp1, &delta);
            let n = g.node_count();
            let mut work = DependencyWork::new(g);
            let mut sink = Betweenness::zeros(n);
            for &s in &delta.affected_sources {
                let mut combined = accumulate_dependencies(g, &sssp_augmented(g, s));
                let after = accumulate_dependencies(&g1, &sssp_augmented(&g1, s));
                dependency_decrease(g, s, &delta, &apsp0, &mut sink, &mut work, &mut NoTally);
                for (x, d) in work.accumulated() {
                    combined[x] -= d;
                }
                dependency_increase(&g1, s, &delta, &apsp1, &mut sink, &mut work, &mut NoTally);
                for (x, d) in work.accumulated() {
                    combined[x] += d;
                }
                for x in (0..n).filter(|&x| x != s) {
                    assert!(
                        (combined[x] - after[x]).abs() <= 1e-8 * after[x].abs().max(1.0),
                        "s={s} x={x}: {} vs {}", combined[x], after[x]
                    );
                }
            }
        });
    }

    #[test]
    fn counted_work_stays_within_bounds(case in cases()) {
        run_events(&case, 6, |g, e, _| {
            let (apsp0, scores0) = init_apsp_with_scores(g);
            let (mut g1, mut apsp1, mut scores1) = (g.clone(), apsp0.clone(), scores0);
            let (report, delta) = ibet_update_counted(&mut g1, &mut apsp1, &mut scores1, e).unwrap();
            let verdict = check_bounds(&report, g, &apsp0, &delta, DEFAULT_BOUND_FACTOR);
            assert!(verdict.holds(), "{verdict:?}");
        });
    }
}

#[test]
fn loaded_graph_round_trip() {
    let text = "# comment\na b\nb c 2.5\n% other\nc d\n";
    let g = load_edge_list(text.as_bytes(), Directedness::Undirected, Weighting::Weighted).unwrap();
    assert_eq!(g.node_count(), 4);
    assert_eq!(g.edge_weight(1, 2), Some(2.5));
    assert_eq!(g.label(3), "d");
    assert_eq!(brandes_betweenness(&g).as_slice(), oracle_betweenness(&g).as_slice());
}
