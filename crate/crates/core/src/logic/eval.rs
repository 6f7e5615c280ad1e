//! Formula evaluation.
//!
//! [`eval_value`] evaluates on semantic values through per-semantics
//! derivative operators (the canonical-algebra reading of modalities);
//! [`eval_state`] evaluates directly on states by structural recursion over
//! transitions. The two agree through the trace sequence: for a depth-n
//! formula, evaluating at a state equals evaluating on the state's depth-n
//! value. That agreement is the invariance property the test suites assert.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::LogicError;
use crate::logic::{uniform_depth, Formula, Omega, Vocabulary};
use crate::model::{Gps, Lts, TransitionModel};
use crate::semantics::SemanticsId;
use crate::value::{canonical_antichain, dec_word_leq, BisimVal, DecWord, SemanticValue, Word};

fn as_bool(o: Omega) -> bool {
    match o {
        Omega::Bool(b) => b,
        Omega::Prob(_) => unreachable!("boolean logic"),
    }
}

fn as_prob(o: Omega) -> BigRational {
    match o {
        Omega::Prob(p) => p,
        Omega::Bool(_) => unreachable!("probabilistic logic"),
    }
}

fn word_tail(w: &Word, a: u16) -> Option<Word> {
    w.split_first()
        .and_then(|(&h, t)| (h == a).then(|| t.to_vec()))
}

fn dec_tail(w: &DecWord, a: u16, exact: Option<&BTreeSet<u16>>, lower: Option<&BTreeSet<u16>>) -> Option<DecWord> {
    w.split_first().and_then(|((set, act), t)| {
        if *act != a {
            return None;
        }
        if let Some(e) = exact {
            if set != e {
                return None;
            }
        }
        if let Some(l) = lower {
            if !l.is_subset(set) {
                return None;
            }
        }
        Some(t.to_vec())
    })
}

fn ev_value(f: &Formula, v: &SemanticValue) -> Omega {
    match f {
        Formula::Top => {
            // Depth 0: the unit is the nonempty element of M_0 1.
            let nonempty = match v {
                SemanticValue::Trace { words, .. } => !words.is_empty(),
                SemanticValue::CompletedTrace { live, .. } => !live.is_empty(),
                SemanticValue::Readiness { live, .. } => !live.is_empty(),
                SemanticValue::Failures { live, .. } => !live.is_empty(),
                SemanticValue::ReadyTrace { live, .. } => !live.is_empty(),
                SemanticValue::FailureTrace { live, .. } => !live.is_empty(),
                SemanticValue::Bisimilarity { .. } => true,
                _ => unreachable!("vocabulary checked"),
            };
            Omega::Bool(nonempty)
        }
        Formula::Const(c) => Omega::Prob(c.clone()),
        Formula::Disj(args) => Omega::Bool(args.iter().any(|a| as_bool(ev_value(a, v)))),
        Formula::Conj(args) => Omega::Bool(args.iter().all(|a| as_bool(ev_value(a, v)))),
        Formula::Neg(inner) => Omega::Bool(!as_bool(ev_value(inner, v))),
        Formula::Affine { terms, offset } => {
            let mut total = offset.clone();
            for (p, a) in terms {
                total += p * as_prob(ev_value(a, v));
            }
            Omega::Prob(total)
        }
        Formula::Star => {
            let starred = match v {
                SemanticValue::CompletedTrace { dead, .. } => dead.contains(&Word::new()),
                SemanticValue::ReadyTrace { dead, .. } => dead.contains(&DecWord::new()),
                SemanticValue::FailureTrace { dead, .. } => dead.contains(&DecWord::new()),
                _ => unreachable!("vocabulary checked"),
            };
            Omega::Bool(starred)
        }
        Formula::ReadyConst(set) => match v {
            SemanticValue::Readiness { pairs, .. } => {
                Omega::Bool(pairs.contains(&(Word::new(), set.clone())))
            }
            _ => unreachable!("vocabulary checked"),
        },
        Formula::FailConst(set) => match v {
            SemanticValue::Failures { pairs, .. } => Omega::Bool(
                pairs
                    .get(&Word::new())
                    .is_some_and(|sets| sets.iter().any(|b| set.is_subset(b))),
            ),
            _ => unreachable!("vocabulary checked"),
        },
        Formula::Diamond(a, inner) => match v {
            SemanticValue::Trace { depth, words } => {
                let derived = SemanticValue::Trace {
                    depth: depth - 1,
                    words: words.iter().filter_map(|w| word_tail(w, *a)).collect(),
                };
                ev_value(inner, &derived)
            }
            SemanticValue::CompletedTrace { depth, live, dead } => {
                let derived = SemanticValue::CompletedTrace {
                    depth: depth - 1,
                    live: live.iter().filter_map(|w| word_tail(w, *a)).collect(),
                    dead: dead.iter().filter_map(|w| word_tail(w, *a)).collect(),
                };
                ev_value(inner, &derived)
            }
            SemanticValue::Readiness { depth, live, pairs } => {
                let derived = SemanticValue::Readiness {
                    depth: depth - 1,
                    live: live.iter().filter_map(|w| word_tail(w, *a)).collect(),
                    pairs: pairs
                        .iter()
                        .filter_map(|(w, set)| word_tail(w, *a).map(|t| (t, set.clone())))
                        .collect(),
                };
                ev_value(inner, &derived)
            }
            SemanticValue::Failures { depth, live, pairs } => {
                let derived = SemanticValue::Failures {
                    depth: depth - 1,
                    live: live.iter().filter_map(|w| word_tail(w, *a)).collect(),
                    pairs: pairs
                        .iter()
                        .filter_map(|(w, sets)| word_tail(w, *a).map(|t| (t, sets.clone())))
                        .collect(),
                };
                ev_value(inner, &derived)
            }
            SemanticValue::Bisimilarity { depth, root } => {
                let found = match root.as_ref() {
                    BisimVal::Node(entries) => entries.iter().any(|(act, child)| {
                        act == a
                            && as_bool(ev_value(
                                inner,
                                &SemanticValue::Bisimilarity {
                                    depth: depth - 1,
                                    root: Arc::clone(child),
                                },
                            ))
                    }),
                    BisimVal::Top => unreachable!("depth checked"),
                };
                Omega::Bool(found)
            }
            SemanticValue::ProbabilisticTrace { depth, dist } => {
                let mut mass = BigRational::zero();
                let mut residual: BTreeMap<Word, BigRational> = BTreeMap::new();
                for (w, m) in dist {
                    if let Some(t) = word_tail(w, *a) {
                        mass += m;
                        *residual.entry(t).or_insert_with(BigRational::zero) += m;
                    }
                }
                if mass.is_zero() {
                    return Omega::Prob(BigRational::zero());
                }
                for m in residual.values_mut() {
                    *m /= mass.clone();
                }
                let inner_val = as_prob(ev_value(
                    inner,
                    &SemanticValue::ProbabilisticTrace {
                        depth: depth - 1,
                        dist: residual,
                    },
                ));
                Omega::Prob(mass * inner_val)
            }
            _ => unreachable!("vocabulary checked"),
        },
        Formula::DecDiamond(set, a, inner) => match v {
            SemanticValue::ReadyTrace { depth, live, dead } => {
                let derived = SemanticValue::ReadyTrace {
                    depth: depth - 1,
                    live: live
                        .iter()
                        .filter_map(|w| dec_tail(w, *a, Some(set), None))
                        .collect(),
                    dead: dead
                        .iter()
                        .filter_map(|w| dec_tail(w, *a, Some(set), None))
                        .collect(),
                };
                ev_value(inner, &derived)
            }
            SemanticValue::FailureTrace { depth, live, dead } => {
                let derived = SemanticValue::FailureTrace {
                    depth: depth - 1,
                    live: canonical_antichain(
                        live.iter()
                            .filter_map(|w| dec_tail(w, *a, None, Some(set)))
                            .collect(),
                        dec_word_leq,
                    ),
                    dead: canonical_antichain(
                        dead.iter()
                            .filter_map(|w| dec_tail(w, *a, None, Some(set)))
                            .collect(),
                        dec_word_leq,
                    ),
                };
                ev_value(inner, &derived)
            }
            _ => unreachable!("vocabulary checked"),
        },
    }
}

/// Evaluates a formula on a semantic value of matching semantics whose depth
/// the formula admits.
pub fn eval_value(
    f: &Formula,
    v: &SemanticValue,
    vocab: &Vocabulary,
) -> Result<Omega, LogicError> {
    vocab.check(f)?;
    if v.semantics() != vocab.semantics() {
        return Err(LogicError::IllFormed {
            formula: crate::logic::render_formula(f, vocab.alphabet()),
            msg: format!(
                "value of semantics {} under a {} vocabulary",
                v.semantics(),
                vocab.semantics()
            ),
        });
    }
    let d = uniform_depth(f, vocab.alphabet())?;
    if !d.admits(v.depth()) {
        return Err(LogicError::DepthMismatch {
            formula_depth: d.min,
            value_depth: v.depth(),
        });
    }
    Ok(ev_value(f, v))
}

fn ev_state_lts(f: &Formula, lts: &Lts, x: u32, sem: SemanticsId) -> Omega {
    match f {
        Formula::Top => Omega::Bool(true),
        Formula::Disj(args) => {
            Omega::Bool(args.iter().any(|a| as_bool(ev_state_lts(a, lts, x, sem))))
        }
        Formula::Conj(args) => {
            Omega::Bool(args.iter().all(|a| as_bool(ev_state_lts(a, lts, x, sem))))
        }
        Formula::Neg(inner) => Omega::Bool(!as_bool(ev_state_lts(inner, lts, x, sem))),
        Formula::Star => Omega::Bool(lts.is_deadlock(x)),
        Formula::ReadyConst(set) => Omega::Bool(&lts.ready_set(x) == set),
        Formula::FailConst(set) => {
            Omega::Bool(set.intersection(&lts.ready_set(x)).next().is_none())
        }
        Formula::Diamond(a, inner) => Omega::Bool(
            lts.successors(x)
                .iter()
                .any(|&(act, y)| act == *a && as_bool(ev_state_lts(inner, lts, y, sem))),
        ),
        Formula::DecDiamond(set, a, inner) => {
            let ready = lts.ready_set(x);
            let decoration_holds = match sem {
                SemanticsId::ReadyTrace => &ready == set,
                SemanticsId::FailureTrace => set.intersection(&ready).next().is_none(),
                _ => unreachable!("vocabulary checked"),
            };
            Omega::Bool(
                decoration_holds
                    && lts
                        .successors(x)
                        .iter()
                        .any(|&(act, y)| act == *a && as_bool(ev_state_lts(inner, lts, y, sem))),
            )
        }
        Formula::Const(_) | Formula::Affine { .. } => unreachable!("vocabulary checked"),
    }
}

fn ev_state_gps(f: &Formula, gps: &Gps, x: u32) -> BigRational {
    match f {
        Formula::Const(c) => c.clone(),
        Formula::Affine { terms, offset } => {
            let mut total = offset.clone();
            for (p, a) in terms {
                total += p * ev_state_gps(a, gps, x);
            }
            total
        }
        Formula::Diamond(a, inner) => {
            let mut total = BigRational::zero();
            for (p, act, y) in gps.row(x) {
                if act == a {
                    total += p * ev_state_gps(inner, gps, *y);
                }
            }
            total
        }
        _ => unreachable!("vocabulary checked"),
    }
}

/// Evaluates a formula directly at a state by structural recursion.
pub fn eval_state(
    f: &Formula,
    model: &TransitionModel,
    x: u32,
    vocab: &Vocabulary,
) -> Result<Omega, LogicError> {
    vocab.check(f)?;
    uniform_depth(f, vocab.alphabet())?;
    if !vocab.semantics().applies_to(model.kind()) {
        return Err(LogicError::KindMismatch {
            semantics: vocab.semantics(),
            kind: model.kind().name(),
        });
    }
    if x >= model.num_states() {
        return Err(LogicError::IllFormed {
            formula: crate::logic::render_formula(f, vocab.alphabet()),
            msg: format!("state index {x} out of range"),
        });
    }
    match model {
        TransitionModel::Lts(lts) => Ok(ev_state_lts(f, lts, x, vocab.semantics())),
        TransitionModel::Gps(gps) => Ok(Omega::Prob(ev_state_gps(f, gps, x))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::beta;
    use crate::fixtures::{self, U0, V0};
    use crate::logic::parse_formula;
    use crate::rational::ratio;

    #[test]
    fn trace_diamond_chain_on_values() {
        let m: TransitionModel = fixtures::g1g2().into();
        let vocab = Vocabulary::new(SemanticsId::Trace, m.alphabet()).unwrap();
        let f = parse_formula("<s><t>true", &vocab).unwrap();
        let row = beta(&m, SemanticsId::Trace, 2).unwrap();
        assert_eq!(
            eval_value(&f, &row[U0 as usize], &vocab).unwrap(),
            Omega::Bool(true)
        );
    }

    #[test]
    fn top_on_depth_zero_values() {
        let m: TransitionModel = fixtures::g1g2().into();
        let vocab = Vocabulary::new(SemanticsId::Trace, m.alphabet()).unwrap();
        let row = beta(&m, SemanticsId::Trace, 0).unwrap();
        for v in &row {
            assert_eq!(
                eval_value(&Formula::Top, v, &vocab).unwrap(),
                Omega::Bool(true)
            );
        }
    }

    #[test]
    fn probabilistic_chain_evaluates_exactly() {
        let m: TransitionModel = fixtures::p1().into();
        let vocab = Vocabulary::new(SemanticsId::ProbabilisticTrace, m.alphabet()).unwrap();
        let f = parse_formula("<a><b>1", &vocab).unwrap();
        let row = beta(&m, SemanticsId::ProbabilisticTrace, 2).unwrap();
        assert_eq!(
            eval_value(&f, &row[0], &vocab).unwrap(),
            Omega::Prob(ratio(1, 2))
        );
        assert_eq!(
            eval_state(&f, &m, 0, &vocab).unwrap(),
            Omega::Prob(ratio(1, 2))
        );
    }

    #[test]
    fn failure_constant_separates_fixture_roots() {
        let m: TransitionModel = fixtures::g1g2().into();
        let vocab = Vocabulary::new(SemanticsId::Failures, m.alphabet()).unwrap();
        let f = parse_formula("<s> fail{t}", &vocab).unwrap();
        assert_eq!(eval_state(&f, &m, V0, &vocab).unwrap(), Omega::Bool(true));
        assert_eq!(eval_state(&f, &m, U0, &vocab).unwrap(), Omega::Bool(false));
    }

    #[test]
    fn star_holds_exactly_at_deadlocks() {
        let m: TransitionModel = fixtures::g1().into();
        let vocab = Vocabulary::new(SemanticsId::CompletedTrace, m.alphabet()).unwrap();
        assert_eq!(
            eval_state(&Formula::Star, &m, 2, &vocab).unwrap(),
            Omega::Bool(true)
        );
        assert_eq!(
            eval_state(&Formula::Star, &m, 0, &vocab).unwrap(),
            Omega::Bool(false)
        );
    }

    #[test]
    fn depth_mismatch_is_reported() {
        let m: TransitionModel = fixtures::g1g2().into();
        let vocab = Vocabulary::new(SemanticsId::Trace, m.alphabet()).unwrap();
        let f = parse_formula("<s>true", &vocab).unwrap();
        let row = beta(&m, SemanticsId::Trace, 2).unwrap();
        assert!(matches!(
            eval_value(&f, &row[0], &vocab),
            Err(LogicError::DepthMismatch { .. })
        ));
    }
}
