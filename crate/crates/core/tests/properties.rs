//! Structural invariants of the engine, values and oracles on seeded random
//! models; the acceptance suite covers the full-corpus agreement properties.

mod common;

use std::collections::BTreeSet;

use spectrum_core::engine::{
    self, beta, beta_sequence, equivalent, partition, simulates_matrix, stabilization_depth,
};
use spectrum_core::logic::{eval_value, random_formula, uniform_depth, Omega, Vocabulary};
use spectrum_core::model::{parse_aut, render_aut, SplitMix, TransitionModel};
use spectrum_core::oracles;
use spectrum_core::rational::ratio;
use spectrum_core::value::{
    completed_to_trace, convex_values, dec_word_leq, dominated, failures_to_trace, join_values,
    readiness_to_trace, ready_trace_to_completed, SemanticValue,
};
use spectrum_core::SemanticsId;

fn small_lts_suite() -> Vec<TransitionModel> {
    common::lts_corpus()
        .into_iter()
        .step_by(7)
        .map(TransitionModel::from)
        .collect()
}

fn small_gps_suite() -> Vec<TransitionModel> {
    common::gps_corpus()
        .into_iter()
        .step_by(5)
        .map(TransitionModel::from)
        .collect()
}

#[test]
fn aut_round_trip_on_random_models() {
    for lts in common::lts_corpus().into_iter().step_by(11) {
        let reparsed = parse_aut(&render_aut(&lts)).expect("rendered model parses");
        assert_eq!(lts, reparsed);
    }
}

#[test]
fn stored_antichains_contain_no_comparable_elements() {
    for model in small_lts_suite() {
        for sem in [SemanticsId::Failures, SemanticsId::FailureTrace] {
            for row in beta_sequence(&model, sem, 5).unwrap() {
                for v in row {
                    match v {
                        SemanticValue::Failures { pairs, .. } => {
                            for sets in pairs.values() {
                                for (i, a) in sets.iter().enumerate() {
                                    for (j, b) in sets.iter().enumerate() {
                                        assert!(i == j || !a.is_subset(b));
                                    }
                                }
                            }
                        }
                        SemanticValue::FailureTrace { live, dead, .. } => {
                            for part in [&live, &dead] {
                                for (i, a) in part.iter().enumerate() {
                                    for (j, b) in part.iter().enumerate() {
                                        assert!(i == j || !dec_word_leq(a, b));
                                    }
                                }
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
    }
}

#[test]
fn sim_leq_is_a_partial_order_on_canonical_values() {
    for model in small_lts_suite() {
        for sem in [SemanticsId::Simulation, SemanticsId::ReadySimulation] {
            for depth in 0..=3 {
                let row = beta(&model, sem, depth).unwrap();
                for v in &row {
                    assert!(engine::sim_leq(v, v).unwrap(), "reflexive");
                }
                for v in &row {
                    for w in &row {
                        if engine::sim_leq(v, w).unwrap() && engine::sim_leq(w, v).unwrap() {
                            assert_eq!(v, w, "antisymmetric up to structural equality");
                        }
                        for u in &row {
                            if engine::sim_leq(v, w).unwrap() && engine::sim_leq(w, u).unwrap() {
                                assert!(engine::sim_leq(v, u).unwrap(), "transitive");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn deep_simulates_relation_matches_classical_preorder() {
    // models with at most 4 states so num_states^2 stays small
    for (i, lts) in common::lts_corpus().into_iter().enumerate() {
        if i % 13 != 0 || lts.num_states() > 4 {
            continue;
        }
        let n = lts.num_states();
        let depth = n * n;
        let model = TransitionModel::from(lts.clone());
        for (sem, ready) in [
            (SemanticsId::Simulation, false),
            (SemanticsId::ReadySimulation, true),
        ] {
            let classical = oracles::sim_preorder(&lts, ready);
            let graded = simulates_matrix(&model, sem, depth).unwrap();
            assert_eq!(graded, classical, "seed model {i} under {sem}");
            // the same relation computed on exported values
            let row = beta(&model, sem, depth).unwrap();
            for x in 0..n as usize {
                for y in 0..n as usize {
                    assert_eq!(
                        engine::sim_leq(&row[x], &row[y]).unwrap(),
                        classical[x][y]
                    );
                }
            }
        }
    }
}

#[test]
fn coinductive_equivalence_is_monotone_in_depth() {
    for model in small_lts_suite() {
        let n = model.num_states();
        for sem in [
            SemanticsId::Bisimilarity,
            SemanticsId::Simulation,
            SemanticsId::ReadySimulation,
        ] {
            let rows = beta_sequence(&model, sem, 5).unwrap();
            for d in 0..5usize {
                for x in 0..n as usize {
                    for y in 0..n as usize {
                        if rows[d + 1][x] == rows[d + 1][y] {
                            assert_eq!(rows[d][x], rows[d][y], "{sem} at depth {d}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn value_projections_commute_with_beta() {
    for model in small_lts_suite() {
        for depth in 0..=4 {
            let ct = beta(&model, SemanticsId::CompletedTrace, depth).unwrap();
            let tr = beta(&model, SemanticsId::Trace, depth).unwrap();
            let rd = beta(&model, SemanticsId::Readiness, depth).unwrap();
            let fl = beta(&model, SemanticsId::Failures, depth).unwrap();
            let rt = beta(&model, SemanticsId::ReadyTrace, depth).unwrap();
            for x in 0..model.num_states() as usize {
                assert_eq!(completed_to_trace(&ct[x]).unwrap(), tr[x]);
                assert_eq!(readiness_to_trace(&rd[x]).unwrap(), tr[x]);
                assert_eq!(failures_to_trace(&fl[x]).unwrap(), tr[x]);
                assert_eq!(ready_trace_to_completed(&rt[x]).unwrap(), ct[x]);
            }
        }
    }
}

#[test]
fn probabilistic_masses_always_total_one() {
    let one = ratio(1, 1);
    for model in small_gps_suite() {
        for depth in 0..=5 {
            for v in beta(&model, SemanticsId::ProbabilisticTrace, depth).unwrap() {
                match v {
                    SemanticValue::ProbabilisticTrace { dist, .. } => {
                        let total: num_rational::BigRational = dist.values().cloned().sum();
                        assert_eq!(total, one);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
}

#[test]
fn automata_oracle_agrees_with_bounded_equivalence() {
    for (i, lts) in common::lts_corpus().into_iter().enumerate() {
        if i % 9 != 0 {
            continue;
        }
        let model = TransitionModel::from(lts);
        let n = model.num_states();
        let bound = 2 * n + 2;
        for sem in [
            SemanticsId::Trace,
            SemanticsId::CompletedTrace,
            SemanticsId::Readiness,
            SemanticsId::Failures,
            SemanticsId::ReadyTrace,
            SemanticsId::FailureTrace,
        ] {
            for x in 0..n {
                for y in (x + 1)..n {
                    let full = oracles::full_trace_like_equivalent(&model, sem, x, y).unwrap();
                    let bounded = equivalent(&model, sem, x, y, bound).unwrap();
                    assert_eq!(
                        full, bounded,
                        "model {i}, {sem}, states {x},{y}: automata verdict vs depth {bound}"
                    );
                }
            }
        }
    }
}

#[test]
fn bisim_partition_oracle_matches_engine_stabilization() {
    for (i, lts) in common::lts_corpus().into_iter().enumerate() {
        if i % 9 != 0 {
            continue;
        }
        let model = TransitionModel::from(lts.clone());
        let oracle = oracles::bisim_partition(&lts);
        let depth = stabilization_depth(&model, SemanticsId::Bisimilarity).unwrap();
        let engine_partition = partition(&model, SemanticsId::Bisimilarity, depth).unwrap();
        assert_eq!(oracle.blocks, engine_partition.blocks, "model {i}");
        assert_eq!(oracle.depth, depth, "model {i}");
    }
}

#[test]
fn sim_preorder_oracle_matches_stabilized_engine_relation() {
    for (i, lts) in common::lts_corpus().into_iter().enumerate() {
        if i % 17 != 0 {
            continue;
        }
        let model = TransitionModel::from(lts.clone());
        for (sem, ready) in [
            (SemanticsId::Simulation, false),
            (SemanticsId::ReadySimulation, true),
        ] {
            let depth = stabilization_depth(&model, sem).unwrap();
            let graded = simulates_matrix(&model, sem, depth).unwrap();
            assert_eq!(graded, oracles::sim_preorder(&lts, ready), "model {i} {sem}");
        }
    }
}

#[test]
fn evaluation_maps_are_depth0_homomorphisms() {
    let mut rng = SplitMix::new(99);
    for model in small_lts_suite() {
        if model.num_states() < 2 {
            continue;
        }
        for sem in [
            SemanticsId::Trace,
            SemanticsId::CompletedTrace,
            SemanticsId::Readiness,
            SemanticsId::Failures,
            SemanticsId::ReadyTrace,
            SemanticsId::FailureTrace,
        ] {
            let vocab = Vocabulary::new(sem, model.alphabet()).unwrap();
            for depth in 1..=3u32 {
                let rows = beta_sequence(&model, sem, depth).unwrap();
                let row = &rows[depth as usize];
                for _ in 0..10 {
                    let f = random_formula(&vocab, depth, &mut rng);
                    if !uniform_depth(&f, vocab.alphabet()).unwrap().admits(depth) {
                        continue;
                    }
                    let x = rng.below(model.num_states() as u64) as usize;
                    let y = rng.below(model.num_states() as u64) as usize;
                    let joined = join_values(&row[x], &row[y]).unwrap();
                    let at_join = eval_value(&f, &joined, &vocab).unwrap();
                    let or = match (
                        eval_value(&f, &row[x], &vocab).unwrap(),
                        eval_value(&f, &row[y], &vocab).unwrap(),
                    ) {
                        (Omega::Bool(a), Omega::Bool(b)) => Omega::Bool(a || b),
                        _ => unreachable!(),
                    };
                    assert_eq!(at_join, or, "{sem} join preservation");
                }
            }
        }
    }
    for model in small_gps_suite() {
        if model.num_states() < 2 {
            continue;
        }
        let vocab = Vocabulary::new(SemanticsId::ProbabilisticTrace, model.alphabet()).unwrap();
        for depth in 1..=3u32 {
            let rows = beta_sequence(&model, SemanticsId::ProbabilisticTrace, depth).unwrap();
            let row = &rows[depth as usize];
            for _ in 0..10 {
                let f = random_formula(&vocab, depth, &mut rng);
                if !uniform_depth(&f, vocab.alphabet()).unwrap().admits(depth) {
                    continue;
                }
                let x = rng.below(model.num_states() as u64) as usize;
                let y = rng.below(model.num_states() as u64) as usize;
                let p = ratio(1, 4);
                let mixed = convex_values(&p, &row[x], &row[y]).unwrap();
                let at_mix = eval_value(&f, &mixed, &vocab).unwrap();
                let expected = match (
                    eval_value(&f, &row[x], &vocab).unwrap(),
                    eval_value(&f, &row[y], &vocab).unwrap(),
                ) {
                    (Omega::Prob(a), Omega::Prob(b)) => {
                        Omega::Prob(&p * a + (ratio(1, 1) - &p) * b)
                    }
                    _ => unreachable!(),
                };
                assert_eq!(at_mix, expected, "affine preservation");
            }
        }
    }
}

#[test]
fn trace_like_depth_partitions_are_not_assumed_nested() {
    // A deadlock reached at depth 1 makes depth-2 trace sets equal while
    // depth-1 sets differ: equivalent() must check every depth.
    let lts = parse_aut("des (0,1,3)\n(0,\"a\",1)\n").unwrap();
    let model = TransitionModel::from(lts);
    let rows = beta_sequence(&model, SemanticsId::Trace, 2).unwrap();
    // state 0 has trace set {a} at depth 1, state 2 has {}; at depth 2 both
    // are empty
    assert_ne!(rows[1][0], rows[1][2]);
    assert_eq!(rows[2][0], rows[2][2]);
    assert!(!equivalent(&model, SemanticsId::Trace, 0, 2, 2).unwrap());
}

#[test]
fn dominated_is_downset_membership() {
    let sets: Vec<BTreeSet<u16>> = vec![
        [0u16, 1].into_iter().collect(),
        [2u16].into_iter().collect(),
    ];
    let sub: BTreeSet<u16> = [0u16].into_iter().collect();
    let other: BTreeSet<u16> = [0u16, 2].into_iter().collect();
    assert!(dominated(&sets, &sub, |a, b| a.is_subset(b)));
    assert!(!dominated(&sets, &other, |a, b| a.is_subset(b)));
}
