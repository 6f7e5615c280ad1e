//! Constructive separation of inequivalent states.
//!
//! Given two states whose trace sequences differ, [`distinguish`] builds a
//! formula of the least distinguishing depth that evaluates differently on
//! them. The construction is deterministic: least depth first, then
//! lexicographic order on words and decorations, with failure sets chosen
//! inclusion-minimal. The same machinery, restricted to a vocabulary, drives
//! the empirical separation checks behind the expressiveness theorem.

use std::collections::BTreeSet;

use num_rational::BigRational;
use thiserror::Error;

use crate::engine::beta_sequence;
use crate::error::{EngineError, LogicError};
use crate::logic::{eval_value, render_formula, Formula, Omega, Vocabulary};
use crate::model::TransitionModel;
use crate::semantics::SemanticsId;
use crate::value::{dec_word_leq, dominated, ASet, BisimVal, DecWord, SemanticValue, Word};

#[derive(Debug, Error)]
pub enum SeparatorError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A formula separating two states, together with the depth at which the
/// trace sequences first differ and the two evaluation results.
#[derive(Debug, Clone)]
pub struct SeparationWitness {
    pub formula: Formula,
    pub depth: u32,
    pub value_x: Omega,
    pub value_y: Omega,
}

impl SeparationWitness {
    pub fn render(&self, vocab: &Vocabulary) -> String {
        render_formula(&self.formula, vocab.alphabet())
    }
}

fn word_admitted(vocab: &Vocabulary, w: &Word) -> bool {
    w.iter().all(|a| vocab.modal_actions().contains(a))
}

fn dec_word_admitted(vocab: &Vocabulary, w: &DecWord) -> bool {
    w.iter().all(|(_, a)| vocab.modal_actions().contains(a))
}

fn chain(word: &Word, terminal: Formula) -> Formula {
    word.iter()
        .rev()
        .fold(terminal, |acc, &a| Formula::Diamond(a, Box::new(acc)))
}

fn dec_chain(word: &DecWord, terminal: Formula) -> Formula {
    word.iter().rev().fold(terminal, |acc, (set, a)| {
        Formula::DecDiamond(set.clone(), *a, Box::new(acc))
    })
}

fn symdiff<'a, T: Ord>(a: &'a BTreeSet<T>, b: &'a BTreeSet<T>) -> impl Iterator<Item = &'a T> {
    a.symmetric_difference(b)
}

/// Subsets of `universe` in (size, lexicographic) order.
fn subsets_by_size(universe: &ASet) -> Vec<ASet> {
    let items: Vec<u16> = universe.iter().copied().collect();
    let mut out: Vec<ASet> = (0..(1usize << items.len().min(20)))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect();
    out.sort_by(|a: &ASet, b: &ASet| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Formula true on every value of its semantics; flexible depth.
fn tautology() -> Formula {
    Formula::Neg(Box::new(Formula::Disj(Vec::new())))
}

/// A formula with value true at `vx` and false at `vy` (bisimilarity trees),
/// or `None` if the restricted vocabulary cannot tell them apart.
fn bisim_delta(vocab: &Vocabulary, vx: &BisimVal, vy: &BisimVal) -> Option<Formula> {
    let (ex, ey) = match (vx, vy) {
        (BisimVal::Node(ex), BisimVal::Node(ey)) => (ex, ey),
        _ => return None,
    };
    // Scan the symmetric difference in canonical order.
    let mut candidates: Vec<(u16, &std::sync::Arc<BisimVal>, bool)> = Vec::new();
    for (a, c) in ex {
        if !ey.iter().any(|(b, d)| b == a && d == c) {
            candidates.push((*a, c, true));
        }
    }
    for (a, c) in ey {
        if !ex.iter().any(|(b, d)| b == a && d == c) {
            candidates.push((*a, c, false));
        }
    }
    candidates.sort_by(|(a1, c1, s1), (a2, c2, s2)| {
        a1.cmp(a2)
            .then_with(|| c1.cmp(c2))
            .then_with(|| s1.cmp(s2).reverse())
    });
    'next: for (a, c, from_x) in candidates {
        if !vocab.modal_actions().contains(&a) {
            continue;
        }
        let opposite = if from_x { ey } else { ex };
        let mut conj = Vec::new();
        for (b, d) in opposite {
            if *b != a {
                continue;
            }
            match bisim_delta(vocab, c, d) {
                Some(delta) => conj.push(delta),
                None => continue 'next,
            }
        }
        let inner = match conj.len() {
            0 => tautology(),
            1 => conj.pop().unwrap(),
            _ => Formula::Conj(conj),
        };
        let diamond = Formula::Diamond(a, Box::new(inner));
        // diamond is true at the owning side and false at the other
        return Some(if from_x {
            diamond
        } else {
            Formula::Neg(Box::new(diamond))
        });
    }
    None
}

/// A formula evaluating differently on two distinct values of equal depth,
/// using only modalities admitted by the vocabulary; `None` when the
/// vocabulary is too poor.
pub fn distinguish_values(
    vocab: &Vocabulary,
    vx: &SemanticValue,
    vy: &SemanticValue,
) -> Option<Formula> {
    match (vx, vy) {
        (SemanticValue::Trace { words: wx, .. }, SemanticValue::Trace { words: wy, .. }) => {
            symdiff(wx, wy)
                .filter(|w| word_admitted(vocab, w))
                .min()
                .map(|w| chain(w, Formula::Top))
        }
        (
            SemanticValue::CompletedTrace {
                live: lx, dead: dx, ..
            },
            SemanticValue::CompletedTrace {
                live: ly, dead: dy, ..
            },
        ) => {
            let live = symdiff(lx, ly)
                .filter(|w| word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), false));
            let dead = symdiff(dx, dy)
                .filter(|w| word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), true));
            let best = [live, dead].into_iter().flatten().min();
            best.map(|(w, is_dead)| chain(&w, if is_dead { Formula::Star } else { Formula::Top }))
        }
        (
            SemanticValue::Readiness {
                live: lx, pairs: px, ..
            },
            SemanticValue::Readiness {
                live: ly, pairs: py, ..
            },
        ) => {
            let live = symdiff(lx, ly)
                .filter(|w| word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), None));
            let pair = symdiff(px, py)
                .filter(|(w, _)| word_admitted(vocab, w))
                .min()
                .map(|(w, set)| (w.clone(), Some(set.clone())));
            let best = [live, pair].into_iter().flatten().min_by(|a, b| {
                a.0.cmp(&b.0)
                    .then_with(|| a.1.is_some().cmp(&b.1.is_some()))
                    .then_with(|| a.1.cmp(&b.1))
            });
            best.map(|(w, set)| match set {
                None => chain(&w, Formula::Top),
                Some(set) => chain(&w, Formula::ReadyConst(set)),
            })
        }
        (
            SemanticValue::Failures {
                live: lx, pairs: px, ..
            },
            SemanticValue::Failures {
                live: ly, pairs: py, ..
            },
        ) => {
            let live = symdiff(lx, ly)
                .filter(|w| word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), None));
            let empty: Vec<ASet> = Vec::new();
            let words: BTreeSet<&Word> = px.keys().chain(py.keys()).collect();
            let mut pair = None;
            for w in words {
                if !word_admitted(vocab, w) {
                    continue;
                }
                let sx = px.get(w).unwrap_or(&empty);
                let sy = py.get(w).unwrap_or(&empty);
                if sx == sy {
                    continue;
                }
                // inclusion-minimal failure set in exactly one downset
                let mut universe = ASet::new();
                for s in sx.iter().chain(sy.iter()) {
                    universe.extend(s.iter().copied());
                }
                let leq = |a: &ASet, b: &ASet| a.is_subset(b);
                let minimal = subsets_by_size(&universe)
                    .into_iter()
                    .find(|b| dominated(sx, b, leq) != dominated(sy, b, leq));
                if let Some(b) = minimal {
                    pair = Some((w.clone(), Some(b)));
                    break;
                }
            }
            let best = [live, pair].into_iter().flatten().min_by(|a, b| {
                a.0.cmp(&b.0)
                    .then_with(|| a.1.is_some().cmp(&b.1.is_some()))
                    .then_with(|| a.1.cmp(&b.1))
            });
            best.map(|(w, set)| match set {
                None => chain(&w, Formula::Top),
                Some(set) => chain(&w, Formula::FailConst(set)),
            })
        }
        (
            SemanticValue::ReadyTrace {
                live: lx, dead: dx, ..
            },
            SemanticValue::ReadyTrace {
                live: ly, dead: dy, ..
            },
        ) => {
            let live = symdiff(lx, ly)
                .filter(|w| dec_word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), false));
            let dead = symdiff(dx, dy)
                .filter(|w| dec_word_admitted(vocab, w))
                .min()
                .map(|w| (w.clone(), true));
            let best = [live, dead].into_iter().flatten().min();
            best.map(|(w, is_dead)| {
                dec_chain(&w, if is_dead { Formula::Star } else { Formula::Top })
            })
        }
        (
            SemanticValue::FailureTrace {
                live: lx, dead: dx, ..
            },
            SemanticValue::FailureTrace {
                live: ly, dead: dy, ..
            },
        ) => {
            let mut candidates: Vec<(DecWord, bool)> = Vec::new();
            {
                let mut collect = |xs: &[DecWord], ys: &[DecWord], is_dead: bool| {
                    for u in xs {
                        if !dec_word_admitted(vocab, u) {
                            continue;
                        }
                        if !dominated(ys, u, dec_word_leq) {
                            candidates.push((minimize_separator(u, ys), is_dead));
                        }
                    }
                };
                collect(lx, ly, false);
                collect(ly, lx, false);
                collect(dx, dy, true);
                collect(dy, dx, true);
            }
            candidates.sort();
            candidates.into_iter().next().map(|(w, is_dead)| {
                dec_chain(&w, if is_dead { Formula::Star } else { Formula::Top })
            })
        }
        (
            SemanticValue::Bisimilarity { root: rx, .. },
            SemanticValue::Bisimilarity { root: ry, .. },
        ) => bisim_delta(vocab, rx, ry),
        (
            SemanticValue::ProbabilisticTrace { dist: mx, .. },
            SemanticValue::ProbabilisticTrace { dist: my, .. },
        ) => {
            let words: BTreeSet<&Word> = mx.keys().chain(my.keys()).collect();
            let zero = BigRational::from_integer(0.into());
            words
                .into_iter()
                .filter(|w| word_admitted(vocab, w))
                .find(|w| mx.get(*w).unwrap_or(&zero) != my.get(*w).unwrap_or(&zero))
                .map(|w| chain(w, Formula::Const(BigRational::from_integer(1.into()))))
        }
        _ => None,
    }
}

/// Shrinks the decorations of `u` positionwise (left to right, smallest
/// subsets first) while keeping it outside the downset of `others`.
fn minimize_separator(u: &DecWord, others: &[DecWord]) -> DecWord {
    let mut current = u.clone();
    for i in 0..current.len() {
        for candidate in subsets_by_size(&u[i].0) {
            let mut attempt = current.clone();
            attempt[i].0 = candidate;
            if !dominated(others, &attempt, dec_word_leq) {
                current = attempt;
                break;
            }
        }
    }
    current
}

/// Produces a separating formula for two states, or `None` if their trace
/// sequences agree at every depth up to `max_depth`.
///
/// The witness is built at the least depth at which the values differ, and
/// repeated calls return the identical witness.
pub fn distinguish(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    y: u32,
    max_depth: u32,
) -> Result<Option<SeparationWitness>, SeparatorError> {
    let vocab = Vocabulary::new(sem, model.alphabet())?;
    let rows = beta_sequence(model, sem, max_depth)?;
    for (n, row) in rows.iter().enumerate() {
        let (vx, vy) = (&row[x as usize], &row[y as usize]);
        if vx == vy {
            continue;
        }
        let formula = distinguish_values(&vocab, vx, vy)
            .expect("construction covers every value difference under the full vocabulary");
        let value_x = eval_value(&formula, vx, &vocab)?;
        let value_y = eval_value(&formula, vy, &vocab)?;
        assert_ne!(value_x, value_y, "witness must separate the values");
        return Ok(Some(SeparationWitness {
            formula,
            depth: n as u32,
            value_x,
            value_y,
        }));
    }
    Ok(None)
}

/// Outcome of a separation property check.
#[derive(Debug, Clone)]
pub struct SeparationCheck {
    pub passed: bool,
    pub detail: String,
}

/// Depth-0 separation: the truth-constant evaluation maps on `M_0 1` are
/// jointly injective.
pub fn check_depth0_separation(sem: SemanticsId) -> Result<SeparationCheck, SeparatorError> {
    if !sem.has_vocabulary() {
        return Err(SeparatorError::Logic(LogicError::NoVocabulary {
            semantics: sem,
        }));
    }
    match sem {
        SemanticsId::Bisimilarity | SemanticsId::ProbabilisticTrace => Ok(SeparationCheck {
            passed: true,
            detail: "M_0 1 is a singleton; joint injectivity is vacuous".to_string(),
        }),
        _ => {
            // M_0 1 has two elements: the unit and the empty join. The truth
            // constant evaluates to the join of its copies, separating them.
            let unit = crate::engine::unit_value(sem);
            let empty = empty_depth0(sem);
            let alphabet = crate::model::Alphabet::from_decl(Vec::new());
            let vocab = Vocabulary::new(sem, &alphabet)?;
            let at_unit = eval_value(&Formula::Top, &unit, &vocab)?;
            let at_empty = eval_value(&Formula::Top, &empty, &vocab)?;
            let passed = at_unit != at_empty;
            Ok(SeparationCheck {
                passed,
                detail: format!(
                    "`true` maps the unit to {at_unit} and the empty join to {at_empty}"
                ),
            })
        }
    }
}

fn empty_depth0(sem: SemanticsId) -> SemanticValue {
    match sem {
        SemanticsId::Trace => SemanticValue::Trace {
            depth: 0,
            words: BTreeSet::new(),
        },
        SemanticsId::CompletedTrace => SemanticValue::CompletedTrace {
            depth: 0,
            live: BTreeSet::new(),
            dead: BTreeSet::new(),
        },
        SemanticsId::Readiness => SemanticValue::Readiness {
            depth: 0,
            live: BTreeSet::new(),
            pairs: BTreeSet::new(),
        },
        SemanticsId::Failures => SemanticValue::Failures {
            depth: 0,
            live: BTreeSet::new(),
            pairs: Default::default(),
        },
        SemanticsId::ReadyTrace => SemanticValue::ReadyTrace {
            depth: 0,
            live: BTreeSet::new(),
            dead: BTreeSet::new(),
        },
        SemanticsId::FailureTrace => SemanticValue::FailureTrace {
            depth: 0,
            live: Vec::new(),
            dead: Vec::new(),
        },
        _ => unreachable!("powerset semantics only"),
    }
}

/// Depth-1 separation, checked empirically: every pair of distinct
/// depth-(n+1) values realized by the sample is separated by a formula whose
/// top node is a single modality over (the closure of) depth-n separators.
pub fn check_depth1_separation(
    models: &[TransitionModel],
    sem: SemanticsId,
    depth: u32,
    vocab_override: Option<&Vocabulary>,
) -> Result<SeparationCheck, SeparatorError> {
    for model in models {
        let vocab = match vocab_override {
            Some(v) => v.clone(),
            None => Vocabulary::new(sem, model.alphabet())?,
        };
        let rows = beta_sequence(model, sem, depth + 1)?;
        let values = &rows[(depth + 1) as usize];
        for (i, vx) in values.iter().enumerate() {
            for vy in values.iter().skip(i + 1) {
                if vx == vy {
                    continue;
                }
                let formula = match distinguish_values(&vocab, vx, vy) {
                    Some(f) => f,
                    None => {
                        return Ok(SeparationCheck {
                            passed: false,
                            detail: format!(
                                "no admitted modality separates {} and {}",
                                vx.render(model.alphabet()),
                                vy.render(model.alphabet())
                            ),
                        })
                    }
                };
                let top_is_modality = matches!(
                    formula,
                    Formula::Diamond(..)
                        | Formula::DecDiamond(..)
                        | Formula::Star
                        | Formula::ReadyConst(_)
                        | Formula::FailConst(_)
                        | Formula::Neg(_)
                );
                if !top_is_modality {
                    return Ok(SeparationCheck {
                        passed: false,
                        detail: format!(
                            "separator {} is not modality-headed",
                            render_formula(&formula, vocab.alphabet())
                        ),
                    });
                }
                if eval_value(&formula, vx, &vocab)? == eval_value(&formula, vy, &vocab)? {
                    return Ok(SeparationCheck {
                        passed: false,
                        detail: format!(
                            "separator {} fails to distinguish the value pair",
                            render_formula(&formula, vocab.alphabet())
                        ),
                    });
                }
            }
        }
    }
    Ok(SeparationCheck {
        passed: true,
        detail: "all realized value pairs separated".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, U0, V0};
    use crate::rational::ratio;

    fn g1g2() -> TransitionModel {
        fixtures::g1g2().into()
    }

    fn render(model: &TransitionModel, w: &SeparationWitness) -> String {
        render_formula(&w.formula, model.alphabet())
    }

    #[test]
    fn trace_equivalent_roots_have_no_witness() {
        let m = g1g2();
        assert!(distinguish(&m, SemanticsId::Trace, U0, V0, 6)
            .unwrap()
            .is_none());
        assert!(distinguish(&m, SemanticsId::Failures, U0, U0, 6)
            .unwrap()
            .is_none());
    }

    #[test]
    fn failures_witness_on_fixture() {
        let m = g1g2();
        let w = distinguish(&m, SemanticsId::Failures, U0, V0, 6)
            .unwrap()
            .expect("roots differ");
        assert_eq!(w.depth, 2);
        assert_eq!(render(&m, &w), "<s> fail{s}");
        assert_eq!(w.value_x, Omega::Bool(false));
        assert_eq!(w.value_y, Omega::Bool(true));
        // the fact the construction rests on: (s, {t}) is a failure pair of
        // v0 but not of u0
        let pairs_v0 = crate::oracles::oracle_value(&m, SemanticsId::Failures, V0, 2).unwrap();
        match pairs_v0 {
            SemanticValue::Failures { pairs, .. } => {
                let t: ASet = [1u16].into_iter().collect();
                assert!(pairs[&vec![0u16]].iter().any(|b| t.is_subset(b)));
            }
            _ => unreachable!(),
        }
        let pairs_u0 = crate::oracles::oracle_value(&m, SemanticsId::Failures, U0, 2).unwrap();
        match pairs_u0 {
            SemanticValue::Failures { pairs, .. } => {
                let t: ASet = [1u16].into_iter().collect();
                assert!(!pairs[&vec![0u16]].iter().any(|b| t.is_subset(b)));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn readiness_witness_on_fixture() {
        let m = g1g2();
        let w = distinguish(&m, SemanticsId::Readiness, U0, V0, 6)
            .unwrap()
            .expect("roots differ");
        assert_eq!(w.depth, 2);
        assert_eq!(render(&m, &w), "<s> ready{s}");
        assert_ne!(w.value_x, w.value_y);
        // (s, {s,t}) is a ready pair of u0 only
        let v = crate::oracles::oracle_value(&m, SemanticsId::Readiness, U0, 2).unwrap();
        match v {
            SemanticValue::Readiness { pairs, .. } => {
                let st: ASet = [0u16, 1].into_iter().collect();
                assert!(pairs.contains(&(vec![0u16], st)));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn witnesses_are_deterministic() {
        let m = g1g2();
        for sem in [
            SemanticsId::Failures,
            SemanticsId::Readiness,
            SemanticsId::Bisimilarity,
            SemanticsId::ReadyTrace,
            SemanticsId::FailureTrace,
        ] {
            let w1 = distinguish(&m, sem, U0, V0, 6).unwrap().unwrap();
            let w2 = distinguish(&m, sem, U0, V0, 6).unwrap().unwrap();
            assert_eq!(w1.formula, w2.formula);
            assert_eq!(w1.depth, 2, "{sem}");
        }
    }

    #[test]
    fn probabilistic_witness_separates() {
        let gps = crate::model::Gps::new(
            4,
            0,
            &[
                (0, ratio(1, 2), "a", 1),
                (0, ratio(1, 2), "a", 2),
                (1, ratio(1, 1), "b", 1),
                (2, ratio(1, 1), "c", 2),
                (3, ratio(1, 1), "b", 3),
            ],
        )
        .unwrap();
        let m: TransitionModel = gps.into();
        let w = distinguish(&m, SemanticsId::ProbabilisticTrace, 0, 3, 4)
            .unwrap()
            .expect("states differ");
        assert_eq!(w.depth, 1);
        assert_ne!(w.value_x, w.value_y);
    }

    #[test]
    fn depth0_separation_reports() {
        for sem in SemanticsId::ALL {
            if !sem.has_vocabulary() {
                continue;
            }
            let check = check_depth0_separation(sem).unwrap();
            assert!(check.passed, "{sem}: {}", check.detail);
        }
        assert!(check_depth0_separation(SemanticsId::Simulation).is_err());
    }

    #[test]
    fn depth1_separation_on_fixture() {
        let models = vec![g1g2()];
        for sem in [
            SemanticsId::Trace,
            SemanticsId::Failures,
            SemanticsId::Bisimilarity,
        ] {
            for depth in 0..3 {
                let check = check_depth1_separation(&models, sem, depth, None).unwrap();
                assert!(check.passed, "{sem} at {depth}: {}", check.detail);
            }
        }
    }

    #[test]
    fn impoverished_vocabulary_fails_depth1_separation() {
        let m = g1g2();
        // drop the diamond over `t`: values differing only in t-words become
        // inseparable
        let only_s: BTreeSet<u16> = [0u16].into_iter().collect();
        let vocab = Vocabulary::restricted(SemanticsId::Trace, m.alphabet(), only_s).unwrap();
        let check = check_depth1_separation(&[m], SemanticsId::Trace, 0, Some(&vocab)).unwrap();
        assert!(!check.passed);
        assert!(check.detail.contains("no admitted modality"));
    }
}
