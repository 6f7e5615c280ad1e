//! Acceptance suite.
//!
//! Eight criteria, one test each, every tolerance pinned in code (all
//! equalities are exact; probabilities are arbitrary-precision rationals).
//! Each test prints a `criterion N (name): PASS` line on success; a failing
//! criterion fails its test.

mod common;

use std::collections::BTreeMap;

use spectrum_core::engine::{
    beta, beta_sequence, check_monad_laws, check_monad_laws_mutated, equivalent, substitute,
    Mutation,
};
use spectrum_core::fixtures::{self, U0, V0};
use spectrum_core::logic::{
    eval_state, eval_value, parse_formula, random_formula, uniform_depth, Omega, Vocabulary,
};
use spectrum_core::model::{SplitMix, TransitionModel};
use spectrum_core::oracles::{
    bisim_partition, failure_trace_set, full_trace_like_equivalent, oracle_value,
    ready_trace_set, sim_preorder,
};
use spectrum_core::rational::ratio;
use spectrum_core::separators::distinguish;
use spectrum_core::theory::{
    self, depth_one_layer, nf_to_term, nf_to_value, subst_term, value_to_term, TheoryTerm,
};
use spectrum_core::{SemanticValue, SemanticsId};

const MAX_DEPTH: u32 = 6;

fn lts_models() -> Vec<TransitionModel> {
    common::lts_corpus().into_iter().map(Into::into).collect()
}

fn gps_models() -> Vec<TransitionModel> {
    common::gps_corpus().into_iter().map(Into::into).collect()
}

/// Criterion 1: the graded engine agrees with the brute-force oracles for
/// all ten semantics at all depths up to 6, exactly, over the whole corpus.
#[test]
fn criterion_1_oracle_agreement() {
    let mut checked = 0usize;
    for model in lts_models() {
        for sem in SemanticsId::LTS {
            let rows = beta_sequence(&model, sem, MAX_DEPTH).unwrap();
            for (depth, row) in rows.iter().enumerate() {
                for x in 0..model.num_states() {
                    let expected = oracle_value(&model, sem, x, depth as u32).unwrap();
                    assert_eq!(
                        row[x as usize], expected,
                        "{sem} depth {depth} state {x}"
                    );
                    checked += 1;
                }
            }
        }
    }
    for model in gps_models() {
        let rows = beta_sequence(&model, SemanticsId::ProbabilisticTrace, MAX_DEPTH).unwrap();
        for (depth, row) in rows.iter().enumerate() {
            for x in 0..model.num_states() {
                let expected =
                    oracle_value(&model, SemanticsId::ProbabilisticTrace, x, depth as u32)
                        .unwrap();
                assert_eq!(row[x as usize], expected);
                checked += 1;
            }
        }
    }
    println!("criterion 1 (oracle agreement): PASS ({checked} value comparisons, exact)");
}

/// Criterion 2: every inclusion of the spectrum lattice holds at every depth
/// on the whole corpus.
#[test]
fn criterion_2_spectrum_lattice() {
    use SemanticsId::*;
    let implications: [(SemanticsId, SemanticsId); 10] = [
        (Bisimilarity, ReadySimulation),
        (ReadySimulation, Simulation),
        (ReadySimulation, ReadyTrace),
        (ReadyTrace, Readiness),
        (ReadyTrace, FailureTrace),
        (FailureTrace, Failures),
        (Readiness, Failures),
        (Failures, CompletedTrace),
        (CompletedTrace, Trace),
        (Simulation, Trace),
    ];
    let mut checked = 0usize;
    for model in lts_models() {
        let n = model.num_states() as usize;
        // cumulative equivalence-at-depth tables per semantics
        let mut tables: BTreeMap<SemanticsId, Vec<Vec<Vec<bool>>>> = BTreeMap::new();
        for sem in SemanticsId::LTS {
            let rows = beta_sequence(&model, sem, MAX_DEPTH).unwrap();
            let mut per_depth = Vec::new();
            let mut acc = vec![vec![true; n]; n];
            for row in rows.iter() {
                for x in 0..n {
                    for y in 0..n {
                        acc[x][y] = acc[x][y] && row[x] == row[y];
                    }
                }
                per_depth.push(acc.clone());
            }
            tables.insert(sem, per_depth);
        }
        for (finer, coarser) in implications {
            for depth in 0..=MAX_DEPTH as usize {
                for x in 0..n {
                    for y in 0..n {
                        if tables[&finer][depth][x][y] {
                            assert!(
                                tables[&coarser][depth][x][y],
                                "{finer} => {coarser} violated at depth {depth} ({x},{y})"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    println!("criterion 2 (spectrum lattice): PASS ({checked} implication instances)");
}

/// Criterion 3: the counterexample systems' roots are trace and completed
/// trace equivalent (at all depths, confirmed unboundedly by the automata
/// oracle) and first distinguished at depth exactly 2 by the seven finer
/// semantics; the left root simulates the right one but not conversely. All
/// verdicts from the engine and independently from the oracles.
#[test]
fn criterion_3_fixture_verdicts() {
    let lts = fixtures::g1g2();
    let model = TransitionModel::from(lts.clone());
    // coarse end: equivalent at every bounded depth and unboundedly
    for sem in [SemanticsId::Trace, SemanticsId::CompletedTrace] {
        assert!(equivalent(&model, sem, U0, V0, 8).unwrap());
        assert!(full_trace_like_equivalent(&model, sem, U0, V0).unwrap());
    }
    // the seven finer semantics distinguish at depth exactly 2
    let finer = [
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Simulation,
        SemanticsId::ReadySimulation,
        SemanticsId::Bisimilarity,
    ];
    for sem in finer {
        assert!(equivalent(&model, sem, U0, V0, 1).unwrap(), "{sem} at 1");
        assert!(!equivalent(&model, sem, U0, V0, 2).unwrap(), "{sem} at 2");
    }
    // oracle verdicts for the trace-like ones
    for sem in [
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
    ] {
        assert!(!full_trace_like_equivalent(&model, sem, U0, V0).unwrap());
        // oracle values pin depth 2 as the first difference
        assert_eq!(
            oracle_value(&model, sem, U0, 1).unwrap(),
            oracle_value(&model, sem, V0, 1).unwrap()
        );
        assert_ne!(
            oracle_value(&model, sem, U0, 2).unwrap(),
            oracle_value(&model, sem, V0, 2).unwrap()
        );
    }
    // coinductive oracles
    assert!(!bisim_partition(&lts).same_block(U0, V0));
    let sim = sim_preorder(&lts, false);
    assert!(sim[V0 as usize][U0 as usize], "u0 simulates v0");
    assert!(!sim[U0 as usize][V0 as usize], "v0 does not simulate u0");
    let rsim = sim_preorder(&lts, true);
    assert!(!rsim[V0 as usize][U0 as usize]);
    // engine side of the one-way simulation
    let row = beta(&model, SemanticsId::Simulation, 3).unwrap();
    assert!(spectrum_core::engine::sim_leq(&row[V0 as usize], &row[U0 as usize]).unwrap());
    assert!(!spectrum_core::engine::sim_leq(&row[U0 as usize], &row[V0 as usize]).unwrap());
    println!("criterion 3 (counterexample fixture): PASS");
}

/// Criterion 4: for 1000 random well-formed formulas per logic-bearing
/// semantics, evaluating at a state equals evaluating on the state's value
/// (the invariance equation), exactly.
#[test]
fn criterion_4_invariance() {
    let lts = lts_models();
    let gps = gps_models();
    let mut rng = SplitMix::new(0x1234_5678);
    let mut checked = 0usize;
    for sem in SemanticsId::ALL {
        if !sem.has_vocabulary() {
            continue;
        }
        let pool: &[TransitionModel] = if sem == SemanticsId::ProbabilisticTrace {
            &gps
        } else {
            &lts
        };
        for i in 0..1000usize {
            let model = &pool[(i * 7) % pool.len()];
            let vocab = Vocabulary::new(sem, model.alphabet()).unwrap();
            let target_depth = (rng.below(4)) as u32;
            let f = random_formula(&vocab, target_depth, &mut rng);
            let d = uniform_depth(&f, vocab.alphabet()).unwrap().min.max(target_depth);
            let row = beta(model, sem, d).unwrap();
            for x in 0..model.num_states() {
                let direct = eval_state(&f, model, x, &vocab).unwrap();
                let via_value = eval_value(&f, &row[x as usize], &vocab).unwrap();
                assert_eq!(direct, via_value, "{sem}: {f:?} at state {x}");
                if let Omega::Prob(p) = &direct {
                    assert!(
                        p >= &ratio(0, 1) && p <= &ratio(1, 1),
                        "evaluation escapes [0,1]"
                    );
                }
                checked += 1;
            }
        }
    }
    println!("criterion 4 (invariance): PASS ({checked} exact agreements)");
}

/// Criterion 5: for every inequivalent pair under every logic-bearing
/// semantics, `distinguish` returns a sound witness at the minimal
/// distinguishing depth; the probabilistic fixture evaluates to exactly 1/2.
#[test]
fn criterion_5_expressiveness() {
    let mut witnesses = 0usize;
    let logic_lts = [
        SemanticsId::Bisimilarity,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::CompletedTrace,
        SemanticsId::Trace,
    ];
    let mut run = |model: &TransitionModel, sem: SemanticsId| {
        let vocab = Vocabulary::new(sem, model.alphabet()).unwrap();
        let rows = beta_sequence(model, sem, MAX_DEPTH).unwrap();
        let n = model.num_states();
        for x in 0..n {
            for y in (x + 1)..n {
                // least depth at which the trace sequences differ, from the
                // precomputed table; the witness must land exactly there
                let first_diff = rows
                    .iter()
                    .position(|row| row[x as usize] != row[y as usize]);
                match distinguish(model, sem, x, y, MAX_DEPTH).unwrap() {
                    None => assert_eq!(first_diff, None, "{sem}: missing witness"),
                    Some(w) => {
                        let at_x = eval_state(&w.formula, model, x, &vocab).unwrap();
                        let at_y = eval_state(&w.formula, model, y, &vocab).unwrap();
                        assert_ne!(at_x, at_y, "{sem} witness unsound");
                        assert_eq!(
                            first_diff,
                            Some(w.depth as usize),
                            "{sem} witness not at the minimal depth"
                        );
                        witnesses += 1;
                    }
                }
            }
        }
    };
    for model in lts_models() {
        for sem in logic_lts {
            run(&model, sem);
        }
    }
    for model in gps_models() {
        run(&model, SemanticsId::ProbabilisticTrace);
    }
    // the probabilistic fixture reproduces <a><b>1 = 1/2 exactly
    let p1 = TransitionModel::from(fixtures::p1());
    let vocab = Vocabulary::new(SemanticsId::ProbabilisticTrace, p1.alphabet()).unwrap();
    let f = parse_formula("<a><b>1", &vocab).unwrap();
    assert_eq!(
        eval_state(&f, &p1, 0, &vocab).unwrap(),
        Omega::Prob(ratio(1, 2))
    );
    println!("criterion 5 (expressiveness): PASS ({witnesses} sound minimal-depth witnesses)");
}

/// Criterion 6: the six-tuple laws pass for all ten semantics at carrier
/// sizes 0..2, and the two seeded mutants fail with concrete witnesses.
#[test]
fn criterion_6_monad_laws() {
    for sem in SemanticsId::ALL {
        let report = check_monad_laws(sem, &[0, 1, 2], 7);
        assert!(report.all_passed(), "{sem}: {:?}", report.failing());
    }
    let broken_failures = check_monad_laws_mutated(
        SemanticsId::Failures,
        &[0, 1, 2],
        7,
        Mutation::FailuresNoDownclosure,
    );
    let failing = broken_failures.failing();
    assert!(
        failing.iter().any(|r| r.law == "homomorphy of mu10"),
        "downclosure mutant undetected"
    );
    assert!(failing.iter().all(|r| r.witness.is_some()));
    let broken_trace = check_monad_laws_mutated(
        SemanticsId::Trace,
        &[3],
        7,
        Mutation::TraceNonDistributingAction,
    );
    let failing = broken_trace.failing();
    assert!(
        failing.iter().any(|r| r.law == "right module mu10"),
        "non-distributing mutant undetected"
    );
    assert!(failing.iter().all(|r| r.witness.is_some()));
    println!("criterion 6 (graded monad laws): PASS (10 semantics, 2 mutants refuted)");
}

fn var(n: &str) -> TheoryTerm {
    TheoryTerm::Var(n.to_string())
}

fn act(a: &str, t: TheoryTerm) -> TheoryTerm {
    TheoryTerm::Act(a.to_string(), Box::new(t))
}

fn dec(set: &[&str], a: &str, t: TheoryTerm) -> TheoryTerm {
    TheoryTerm::DecAct(
        set.iter().map(|s| s.to_string()).collect(),
        a.to_string(),
        Box::new(t),
    )
}

fn join(ts: Vec<TheoryTerm>) -> TheoryTerm {
    TheoryTerm::Join(ts)
}

fn sconst(set: &[&str]) -> TheoryTerm {
    TheoryTerm::SetConst(set.iter().map(|s| s.to_string()).collect())
}

/// Criterion 7: every theory equation verifies, simulation's join
/// preservation refutes, substitution agrees with the engine's depth step on
/// 10^4 random instances, and normalization is idempotent on all of them.
#[test]
fn criterion_7_theory_lab() {
    let x = || var("x");
    let y = || var("y");
    let z = || var("z");
    // join-semilattice laws, valid in every powerset theory
    let jsl: Vec<(TheoryTerm, TheoryTerm)> = vec![
        (join(vec![x(), y()]), join(vec![y(), x()])),
        (
            join(vec![join(vec![x(), y()]), z()]),
            join(vec![x(), join(vec![y(), z()])]),
        ),
        (join(vec![x(), x()]), x()),
        (join(vec![x(), join(vec![])]), x()),
    ];
    let powerset = [
        SemanticsId::Trace,
        SemanticsId::CompletedTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Simulation,
        SemanticsId::ReadySimulation,
    ];
    for theory in powerset {
        for (lhs, rhs) in &jsl {
            assert!(
                theory::check_equation(theory, lhs, rhs).unwrap(),
                "{theory}: JSL law failed"
            );
        }
    }
    // action distribution over joins, including the empty join
    for theory in [
        SemanticsId::Trace,
        SemanticsId::CompletedTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
    ] {
        assert!(theory::check_equation(
            theory,
            &act("a", join(vec![x(), y()])),
            &join(vec![act("a", x()), act("a", y())])
        )
        .unwrap());
        assert!(theory::check_equation(theory, &act("a", join(vec![])), &join(vec![])).unwrap());
    }
    for theory in [SemanticsId::ReadyTrace, SemanticsId::FailureTrace] {
        assert!(theory::check_equation(
            theory,
            &dec(&["a"], "a", join(vec![x(), y()])),
            &join(vec![dec(&["a"], "a", x()), dec(&["a"], "a", y())])
        )
        .unwrap());
    }
    // failures monotonicity on constants
    assert!(theory::check_equation(
        SemanticsId::Failures,
        &join(vec![sconst(&["a"]), sconst(&["a", "b"])]),
        &sconst(&["a", "b"])
    )
    .unwrap());
    // failure-trace downclosure on decorations
    assert!(theory::check_equation(
        SemanticsId::FailureTrace,
        &join(vec![dec(&["a"], "a", x()), dec(&["a", "b"], "a", x())]),
        &dec(&["a", "b"], "a", x())
    )
    .unwrap());
    // simulation and ready simulation: monotone actions
    assert!(theory::check_equation(
        SemanticsId::Simulation,
        &join(vec![act("a", join(vec![x(), y()])), act("a", x())]),
        &act("a", join(vec![x(), y()]))
    )
    .unwrap());
    assert!(theory::check_equation(
        SemanticsId::ReadySimulation,
        &join(vec![
            dec(&["a"], "a", join(vec![x(), y()])),
            dec(&["a"], "a", x())
        ]),
        &dec(&["a"], "a", join(vec![x(), y()]))
    )
    .unwrap());
    // the characteristic NON-equation: simulation actions do not preserve
    // joins
    assert!(!theory::check_equation(
        SemanticsId::Simulation,
        &act("a", join(vec![x(), y()])),
        &join(vec![act("a", x()), act("a", y())])
    )
    .unwrap());
    // convex algebra laws and action distribution over convex sums
    let cx = |p: (i64, i64), a: TheoryTerm, b: TheoryTerm| {
        TheoryTerm::Convex(vec![
            (ratio(p.0, p.1), a),
            (ratio(1, 1) - ratio(p.0, p.1), b),
        ])
    };
    let prob = SemanticsId::ProbabilisticTrace;
    assert!(theory::check_equation(prob, &cx((1, 3), x(), x()), &x()).unwrap());
    assert!(theory::check_equation(prob, &cx((1, 3), x(), y()), &cx((2, 3), y(), x())).unwrap());
    assert!(theory::check_equation(prob, &cx((0, 1), x(), y()), &y()).unwrap());
    // x (+)_p (y (+)_q z) = (x (+)_{p/r} y) (+)_r z with r = p + (1-p)q
    let p = ratio(1, 2);
    let q = ratio(1, 3);
    let r = &p + (ratio(1, 1) - &p) * &q;
    let lhs = TheoryTerm::Convex(vec![
        (p.clone(), x()),
        (
            ratio(1, 1) - &p,
            TheoryTerm::Convex(vec![(q.clone(), y()), (ratio(1, 1) - &q, z())]),
        ),
    ]);
    let rhs = TheoryTerm::Convex(vec![
        (
            r.clone(),
            TheoryTerm::Convex(vec![
                (&p / &r, x()),
                (ratio(1, 1) - &p / &r, y()),
            ]),
        ),
        (ratio(1, 1) - &r, z()),
    ]);
    assert!(theory::check_equation(prob, &lhs, &rhs).unwrap());
    assert!(theory::check_equation(
        prob,
        &act("a", cx((1, 2), x(), y())),
        &cx((1, 2), act("a", x()), act("a", y()))
    )
    .unwrap());

    // substitution agrees with the engine's depth step on random instances
    let lts = lts_models();
    let gps = gps_models();
    let mut rng = SplitMix::new(0x7e07);
    let theories = [
        SemanticsId::Trace,
        SemanticsId::CompletedTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Simulation,
        SemanticsId::ReadySimulation,
        SemanticsId::ProbabilisticTrace,
    ];
    let mut instances = 0usize;
    while instances < 10_000 {
        for theory_id in theories {
            let pool: &[TransitionModel] = if theory_id == SemanticsId::ProbabilisticTrace {
                &gps
            } else {
                &lts
            };
            let model = &pool[rng.below(pool.len() as u64) as usize];
            if model.alphabet().is_empty() {
                continue;
            }
            let arg_depth = rng.below(3) as u32;
            let rows = beta_sequence(model, theory_id, arg_depth).unwrap();
            let states: Vec<u32> = (0..3)
                .map(|_| rng.below(model.num_states() as u64) as u32)
                .collect();
            let args: Vec<SemanticValue> = states
                .iter()
                .map(|&s| rows[arg_depth as usize][s as usize].clone())
                .collect();
            let vars = ["v0", "v1", "v2"];
            let labels: Vec<String> = model
                .alphabet()
                .lex_indices()
                .map(|a| model.alphabet().label(a).to_string())
                .collect();
            let t = random_depth_one_term(theory_id, &vars, &labels, &mut rng);
            // action indices must agree with the model's lex indices, so
            // normalization uses the model's full action table
            let table = |t: &TheoryTerm| {
                let mut names = theory::names_of(&[t]);
                names.actions = labels.clone();
                names
            };
            // engine path: depth-1 layer, then the engine's substitution
            let normalized = theory::normalize_at(theory_id, &t, table(&t), 1).unwrap();
            let layer = depth_one_layer(&normalized.nf).expect("depth-1 term");
            // layer slots are indices into the term's sorted variable table
            let slot_args: Vec<SemanticValue> = normalized
                .names
                .vars
                .iter()
                .map(|v| {
                    let idx = vars.iter().position(|w| w == v).unwrap();
                    args[idx].clone()
                })
                .collect();
            let engine_value = substitute(&layer, &slot_args, arg_depth).unwrap();
            // term path: substitute value terms, then normalize
            let mut map = BTreeMap::new();
            for (i, v) in vars.iter().enumerate() {
                map.insert(
                    v.to_string(),
                    value_to_term(&args[i], "u", model.alphabet()).unwrap(),
                );
            }
            let substituted = subst_term(&t, &map);
            let n2 =
                theory::normalize_at(theory_id, &substituted, table(&substituted), arg_depth + 1)
                    .unwrap();
            let term_value = nf_to_value(&n2.nf, arg_depth + 1)
                .unwrap_or_else(|| panic!("unit-variable form: {theory_id} {t:?} nf {:?}", n2.nf));
            assert_eq!(
                engine_value, term_value,
                "{theory_id}: substitution/depth-step disagreement on {t:?}"
            );
            // idempotence: normalizing the normal form as a term is stable
            let back = nf_to_term(&n2.nf, &n2.names);
            let n3 =
                theory::normalize_at(theory_id, &back, n2.names.clone(), arg_depth + 1).unwrap();
            assert_eq!(n2.nf, n3.nf);
            // permutation invariance: shuffled joins normalize identically
            let shuffled = shuffle_term(&substituted, &mut rng);
            let n4 =
                theory::normalize_at(theory_id, &shuffled, n2.names.clone(), arg_depth + 1)
                    .unwrap();
            assert_eq!(n2.nf, n4.nf);
            instances += 1;
        }
    }
    println!("criterion 7 (theory lab): PASS (equations verified, {instances} substitution instances)");
}

/// Random depth-1 term over the given variables: a join (or convex sum) of
/// action-applied variable joins plus depth-1 constants.
fn random_depth_one_term(
    theory: SemanticsId,
    vars: &[&str],
    labels: &[String],
    rng: &mut SplitMix,
) -> TheoryTerm {
    let rand_label = |rng: &mut SplitMix| labels[rng.below(labels.len() as u64) as usize].clone();
    let rand_set = |rng: &mut SplitMix| -> std::collections::BTreeSet<String> {
        labels
            .iter()
            .filter(|_| rng.below(2) == 0)
            .cloned()
            .collect()
    };
    let rand_vars = |rng: &mut SplitMix| -> TheoryTerm {
        let k = 1 + rng.below(2);
        TheoryTerm::Join(
            (0..k)
                .map(|_| TheoryTerm::Var(vars[rng.below(vars.len() as u64) as usize].to_string()))
                .collect(),
        )
    };
    if theory == SemanticsId::ProbabilisticTrace {
        let k = 1 + rng.below(3);
        let mass = ratio(1, k as i64);
        return TheoryTerm::Convex(
            (0..k)
                .map(|_| {
                    (
                        mass.clone(),
                        TheoryTerm::Act(
                            rand_label(rng),
                            Box::new(TheoryTerm::Var(
                                vars[rng.below(vars.len() as u64) as usize].to_string(),
                            )),
                        ),
                    )
                })
                .collect(),
        );
    }
    let mut parts: Vec<TheoryTerm> = Vec::new();
    for _ in 0..(1 + rng.below(3)) {
        let inner = rand_vars(rng);
        let part = match theory {
            SemanticsId::ReadyTrace | SemanticsId::FailureTrace | SemanticsId::ReadySimulation => {
                TheoryTerm::DecAct(rand_set(rng), rand_label(rng), Box::new(inner))
            }
            _ => TheoryTerm::Act(rand_label(rng), Box::new(inner)),
        };
        parts.push(part);
    }
    match theory {
        SemanticsId::CompletedTrace
        | SemanticsId::ReadyTrace
        | SemanticsId::FailureTrace
        | SemanticsId::ReadySimulation => {
            if rng.below(3) == 0 {
                parts.push(TheoryTerm::Star);
            }
        }
        SemanticsId::Readiness | SemanticsId::Failures
            if rng.below(3) == 0 => {
                parts.push(TheoryTerm::SetConst(rand_set(rng)));
            }
        _ => {}
    }
    TheoryTerm::Join(parts)
}

fn shuffle_term(t: &TheoryTerm, rng: &mut SplitMix) -> TheoryTerm {
    match t {
        TheoryTerm::Join(parts) => {
            let mut parts: Vec<TheoryTerm> =
                parts.iter().map(|p| shuffle_term(p, rng)).collect();
            for i in (1..parts.len()).rev() {
                parts.swap(i, rng.below((i + 1) as u64) as usize);
            }
            TheoryTerm::Join(parts)
        }
        TheoryTerm::Convex(parts) => {
            let mut parts: Vec<(num_rational::BigRational, TheoryTerm)> = parts
                .iter()
                .map(|(p, a)| (p.clone(), shuffle_term(a, rng)))
                .collect();
            for i in (1..parts.len()).rev() {
                parts.swap(i, rng.below((i + 1) as u64) as usize);
            }
            TheoryTerm::Convex(parts)
        }
        TheoryTerm::Act(a, inner) => {
            TheoryTerm::Act(a.clone(), Box::new(shuffle_term(inner, rng)))
        }
        TheoryTerm::DecAct(s, a, inner) => {
            TheoryTerm::DecAct(s.clone(), a.clone(), Box::new(shuffle_term(inner, rng)))
        }
        other => other.clone(),
    }
}

/// Criterion 8: the alternative decorated-trace presentations carry the
/// same information as the original ready-trace and failure-trace sets on
/// the corpus, at depth bounds up to 5.
///
/// Value equality at depths <= D is compared against equality of the
/// original sets truncated to at most D-1 actions together with the
/// final-set-erased projection at exactly D actions: a length-D value talks
/// about length-D paths without constraining the final state, so the naive
/// action-count truncation would compare unmatched information at the
/// boundary.
#[test]
fn criterion_8_alternative_presentations() {
    let mut checked = 0usize;
    for lts in common::lts_corpus() {
        let model = TransitionModel::from(lts.clone());
        let n = lts.num_states();
        for bound in 1..=5u32 {
            // original sets with the boundary projection
            let rt_views: Vec<_> = (0..n)
                .map(|x| {
                    let full = ready_trace_set(&lts, x, bound).unwrap();
                    let inner: std::collections::BTreeSet<_> = full
                        .iter()
                        .filter(|(w, _)| (w.len() as u32) < bound)
                        .cloned()
                        .collect();
                    let boundary: std::collections::BTreeSet<_> = full
                        .iter()
                        .filter(|(w, _)| w.len() as u32 == bound)
                        .map(|(w, _)| w.clone())
                        .collect();
                    (inner, boundary)
                })
                .collect();
            let ft_views: Vec<_> = (0..n)
                .map(|x| {
                    let full = failure_trace_set(&lts, x, bound).unwrap();
                    let inner: Vec<_> = full
                        .iter()
                        .filter(|(w, _)| (w.len() as u32) < bound)
                        .cloned()
                        .collect();
                    let boundary = spectrum_core::value::canonical_antichain(
                        full.iter()
                            .filter(|(w, _)| w.len() as u32 == bound)
                            .map(|(w, _)| w.clone())
                            .collect(),
                        spectrum_core::value::dec_word_leq,
                    );
                    (inner, boundary)
                })
                .collect();
            // alternative presentation: value equality at all depths <= bound
            let rt_rows = beta_sequence(&model, SemanticsId::ReadyTrace, bound).unwrap();
            let ft_rows = beta_sequence(&model, SemanticsId::FailureTrace, bound).unwrap();
            for x in 0..n as usize {
                for y in (x + 1)..n as usize {
                    let rt_alt = rt_rows.iter().all(|row| row[x] == row[y]);
                    let rt_orig = rt_views[x] == rt_views[y];
                    assert_eq!(
                        rt_alt, rt_orig,
                        "ready-trace presentations disagree at bound {bound} ({x},{y})"
                    );
                    let ft_alt = ft_rows.iter().all(|row| row[x] == row[y]);
                    let ft_orig = ft_views[x] == ft_views[y];
                    assert_eq!(
                        ft_alt, ft_orig,
                        "failure-trace presentations disagree at bound {bound} ({x},{y})"
                    );
                    checked += 2;
                }
            }
        }
    }
    println!("criterion 8 (decorated-trace presentations): PASS ({checked} verdict agreements)");
}
