//! Symbolic terms over the graded signatures and their normal forms.
//!
//! Every semantics except bisimilarity is presented by a depth-1 theory:
//! depth-0 joins (or convex combinations), unary depth-1 action operations
//! (plain or decorated with an action set), and depth-1 constants (deadlock,
//! ready/failure sets). [`normalize`] orients the equations as rewrite rules
//! (distribute actions over joins, flatten joins, absorb dominated elements,
//! merge convex weights) and produces the canonical normal form; provable
//! equality of terms is decided by comparing normal forms.

mod parse;

pub use parse::{parse_term, render_term};

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::engine::Layer;
use crate::error::TheoryError;
use crate::model::Alphabet;
use crate::rational::render_rational;
use crate::semantics::SemanticsId;
use crate::value::{
    canonical_antichain, dec_word_leq, ASet, BisimVal, DecWord, RsVal, SemanticValue, SimVal,
    Word,
};

/// A term over a graded signature. Actions and variables are named; names are
/// resolved against sorted tables during normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoryTerm {
    Var(String),
    /// Depth-0 join of any finite arity; empty is bottom.
    Join(Vec<TheoryTerm>),
    /// Depth-0 convex combination; weights must be in [0,1] and sum to 1.
    Convex(Vec<(BigRational, TheoryTerm)>),
    /// Unary depth-1 action operation.
    Act(String, Box<TheoryTerm>),
    /// Decorated depth-1 action operation of the (ready/failure-)trace and
    /// ready-simulation theories.
    DecAct(BTreeSet<String>, String, Box<TheoryTerm>),
    /// Depth-1 deadlock constant.
    Star,
    /// Depth-1 ready/failure-set constant.
    SetConst(BTreeSet<String>),
}

/// Uniform depth of a term: exact (`rigid`, forced by a variable) or any
/// depth `>= min` (constants only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermDepth {
    pub min: u32,
    pub rigid: bool,
}

impl TermDepth {
    pub fn admits(&self, d: u32) -> bool {
        if self.rigid {
            d == self.min
        } else {
            d >= self.min
        }
    }

    fn unify(&self, other: &TermDepth) -> Option<TermDepth> {
        match (self.rigid, other.rigid) {
            (true, true) => (self.min == other.min).then_some(*self),
            (true, false) => (other.min <= self.min).then_some(*self),
            (false, true) => (self.min <= other.min).then_some(*other),
            (false, false) => Some(TermDepth {
                min: self.min.max(other.min),
                rigid: false,
            }),
        }
    }
}

/// Computes the uniform depth of a term.
pub fn term_depth(t: &TheoryTerm) -> Result<TermDepth, TheoryError> {
    let non_uniform = |t: &TheoryTerm, msg: String| TheoryError::NonUniform {
        term: render_term(t),
        msg,
    };
    match t {
        TheoryTerm::Var(_) => Ok(TermDepth {
            min: 0,
            rigid: true,
        }),
        TheoryTerm::Star | TheoryTerm::SetConst(_) => Ok(TermDepth {
            min: 1,
            rigid: false,
        }),
        TheoryTerm::Act(_, inner) | TheoryTerm::DecAct(_, _, inner) => {
            let d = term_depth(inner)?;
            Ok(TermDepth {
                min: d.min + 1,
                rigid: d.rigid,
            })
        }
        TheoryTerm::Join(args) => {
            let mut acc = TermDepth {
                min: 0,
                rigid: false,
            };
            for a in args {
                let d = term_depth(a)?;
                acc = acc.unify(&d).ok_or_else(|| {
                    non_uniform(t, "join arguments of different uniform depths".to_string())
                })?;
            }
            Ok(acc)
        }
        TheoryTerm::Convex(args) => {
            let mut acc = TermDepth {
                min: 0,
                rigid: false,
            };
            for (_, a) in args {
                let d = term_depth(a)?;
                acc = acc.unify(&d).ok_or_else(|| {
                    non_uniform(t, "convex arguments of different uniform depths".to_string())
                })?;
            }
            Ok(acc)
        }
    }
}

/// Normal form over variables: the concrete monad layer with variable leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    Trace {
        entries: BTreeSet<(Word, usize)>,
    },
    Completed {
        live: BTreeSet<(Word, usize)>,
        dead: BTreeSet<Word>,
    },
    Readiness {
        live: BTreeSet<(Word, usize)>,
        pairs: BTreeSet<(Word, ASet)>,
    },
    Failures {
        live: BTreeSet<(Word, usize)>,
        pairs: BTreeMap<Word, Vec<ASet>>,
    },
    ReadyTrace {
        live: BTreeSet<(DecWord, usize)>,
        dead: BTreeSet<DecWord>,
    },
    FailureTrace {
        live: Vec<(DecWord, usize)>,
        dead: Vec<DecWord>,
    },
    Sim(SimNf),
    ReadySim(RsNf),
    Prob {
        dist: BTreeMap<(Word, usize), BigRational>,
    },
}

/// Simulation normal forms: depth 0 is a join of variables, depth n+1 an
/// antichain of action-tagged depth-n normal forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimNf {
    Leaves(BTreeSet<usize>),
    Node(Vec<(u16, SimNf)>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RsNf {
    Leaves(BTreeSet<usize>),
    Node {
        entries: Vec<(ASet, u16, RsNf)>,
        star: bool,
    },
}

fn simnf_leq(a: &SimNf, b: &SimNf) -> bool {
    match (a, b) {
        (SimNf::Leaves(x), SimNf::Leaves(y)) => x.is_subset(y),
        (SimNf::Node(xs), SimNf::Node(ys)) => xs.iter().all(|(ax, cx)| {
            ys.iter().any(|(ay, cy)| ax == ay && simnf_leq(cx, cy))
        }),
        _ => false,
    }
}

fn simnf_node(entries: Vec<(u16, SimNf)>) -> SimNf {
    SimNf::Node(canonical_antichain(entries, |(a1, c1), (a2, c2)| {
        a1 == a2 && simnf_leq(c1, c2)
    }))
}

fn rsnf_leq(a: &RsNf, b: &RsNf) -> bool {
    match (a, b) {
        (RsNf::Leaves(x), RsNf::Leaves(y)) => x.is_subset(y),
        (
            RsNf::Node {
                entries: xs,
                star: sx,
            },
            RsNf::Node {
                entries: ys,
                star: sy,
            },
        ) => {
            (!sx || *sy)
                && xs.iter().all(|(rx, ax, cx)| {
                    ys.iter()
                        .any(|(ry, ay, cy)| rx == ry && ax == ay && rsnf_leq(cx, cy))
                })
        }
        _ => false,
    }
}

fn rsnf_node(entries: Vec<(ASet, u16, RsNf)>, star: bool) -> RsNf {
    RsNf::Node {
        entries: canonical_antichain(entries, |(r1, a1, c1), (r2, a2, c2)| {
            r1 == r2 && a1 == a2 && rsnf_leq(c1, c2)
        }),
        star,
    }
}

/// Name tables shared by the two sides of an equation.
#[derive(Debug, Clone, Default)]
pub struct Names {
    pub vars: Vec<String>,
    pub actions: Vec<String>,
}

impl Names {
    fn var(&self, name: &str) -> usize {
        self.vars.binary_search_by(|v| v.as_str().cmp(name)).expect("collected")
    }

    fn act(&self, name: &str) -> u16 {
        self.actions
            .binary_search_by(|a| a.as_str().cmp(name))
            .expect("collected") as u16
    }

    fn act_set(&self, set: &BTreeSet<String>) -> ASet {
        set.iter().map(|a| self.act(a)).collect()
    }
}

fn collect_names(t: &TheoryTerm, vars: &mut BTreeSet<String>, acts: &mut BTreeSet<String>) {
    match t {
        TheoryTerm::Var(v) => {
            vars.insert(v.clone());
        }
        TheoryTerm::Join(args) => args.iter().for_each(|a| collect_names(a, vars, acts)),
        TheoryTerm::Convex(args) => args.iter().for_each(|(_, a)| collect_names(a, vars, acts)),
        TheoryTerm::Act(a, inner) => {
            acts.insert(a.clone());
            collect_names(inner, vars, acts);
        }
        TheoryTerm::DecAct(set, a, inner) => {
            acts.extend(set.iter().cloned());
            acts.insert(a.clone());
            collect_names(inner, vars, acts);
        }
        TheoryTerm::SetConst(set) => acts.extend(set.iter().cloned()),
        TheoryTerm::Star => {}
    }
}

/// Name tables of a group of terms: sorted variable and action names.
pub fn names_of(terms: &[&TheoryTerm]) -> Names {
    let mut vars = BTreeSet::new();
    let mut acts = BTreeSet::new();
    for t in terms {
        collect_names(t, &mut vars, &mut acts);
    }
    Names {
        vars: vars.into_iter().collect(),
        actions: acts.into_iter().collect(),
    }
}

fn check_ops(theory: SemanticsId, t: &TheoryTerm) -> Result<(), TheoryError> {
    let unknown = |op: &str| TheoryError::UnknownOperation {
        op: op.to_string(),
        theory,
    };
    match t {
        TheoryTerm::Var(_) => Ok(()),
        TheoryTerm::Join(args) => {
            if theory == SemanticsId::ProbabilisticTrace {
                return Err(unknown("join"));
            }
            args.iter().try_for_each(|a| check_ops(theory, a))
        }
        TheoryTerm::Convex(args) => {
            if theory != SemanticsId::ProbabilisticTrace {
                return Err(unknown("convex combination"));
            }
            args.iter().try_for_each(|(_, a)| check_ops(theory, a))
        }
        TheoryTerm::Act(_, inner) => {
            if matches!(
                theory,
                SemanticsId::ReadyTrace | SemanticsId::FailureTrace | SemanticsId::ReadySimulation
            ) {
                return Err(unknown("undecorated action"));
            }
            check_ops(theory, inner)
        }
        TheoryTerm::DecAct(_, _, inner) => {
            if !matches!(
                theory,
                SemanticsId::ReadyTrace | SemanticsId::FailureTrace | SemanticsId::ReadySimulation
            ) {
                return Err(unknown("decorated action"));
            }
            check_ops(theory, inner)
        }
        TheoryTerm::Star => {
            if !matches!(
                theory,
                SemanticsId::CompletedTrace
                    | SemanticsId::ReadyTrace
                    | SemanticsId::FailureTrace
                    | SemanticsId::ReadySimulation
            ) {
                return Err(unknown("deadlock constant"));
            }
            Ok(())
        }
        TheoryTerm::SetConst(_) => {
            if !matches!(theory, SemanticsId::Readiness | SemanticsId::Failures) {
                return Err(unknown("set constant"));
            }
            Ok(())
        }
    }
}

fn empty_nf(theory: SemanticsId) -> NormalForm {
    match theory {
        SemanticsId::Trace => NormalForm::Trace {
            entries: BTreeSet::new(),
        },
        SemanticsId::CompletedTrace => NormalForm::Completed {
            live: BTreeSet::new(),
            dead: BTreeSet::new(),
        },
        SemanticsId::Readiness => NormalForm::Readiness {
            live: BTreeSet::new(),
            pairs: BTreeSet::new(),
        },
        SemanticsId::Failures => NormalForm::Failures {
            live: BTreeSet::new(),
            pairs: BTreeMap::new(),
        },
        SemanticsId::ReadyTrace => NormalForm::ReadyTrace {
            live: BTreeSet::new(),
            dead: BTreeSet::new(),
        },
        SemanticsId::FailureTrace => NormalForm::FailureTrace {
            live: Vec::new(),
            dead: Vec::new(),
        },
        SemanticsId::Simulation => NormalForm::Sim(SimNf::Leaves(BTreeSet::new())),
        SemanticsId::ReadySimulation => NormalForm::ReadySim(RsNf::Leaves(BTreeSet::new())),
        _ => unreachable!("no empty join in this theory"),
    }
}

fn join_nf(theory: SemanticsId, parts: Vec<NormalForm>, depth: u32) -> NormalForm {
    let mut acc = if depth == 0
        && matches!(
            theory,
            SemanticsId::Simulation | SemanticsId::ReadySimulation
        ) {
        empty_nf(theory)
    } else if matches!(
        theory,
        SemanticsId::Simulation | SemanticsId::ReadySimulation
    ) {
        match theory {
            SemanticsId::Simulation => NormalForm::Sim(SimNf::Node(Vec::new())),
            _ => NormalForm::ReadySim(RsNf::Node {
                entries: Vec::new(),
                star: false,
            }),
        }
    } else {
        empty_nf(theory)
    };
    for part in parts {
        match (&mut acc, part) {
            (NormalForm::Trace { entries }, NormalForm::Trace { entries: e2 }) => {
                entries.extend(e2);
            }
            (
                NormalForm::Completed { live, dead },
                NormalForm::Completed { live: l2, dead: d2 },
            ) => {
                live.extend(l2);
                dead.extend(d2);
            }
            (
                NormalForm::Readiness { live, pairs },
                NormalForm::Readiness { live: l2, pairs: p2 },
            ) => {
                live.extend(l2);
                pairs.extend(p2);
            }
            (
                NormalForm::Failures { live, pairs },
                NormalForm::Failures { live: l2, pairs: p2 },
            ) => {
                live.extend(l2);
                crate::value::merge_failure_pairs(pairs, p2);
            }
            (
                NormalForm::ReadyTrace { live, dead },
                NormalForm::ReadyTrace { live: l2, dead: d2 },
            ) => {
                live.extend(l2);
                dead.extend(d2);
            }
            (
                NormalForm::FailureTrace { live, dead },
                NormalForm::FailureTrace { live: l2, dead: d2 },
            ) => {
                let mut all_live = std::mem::take(live);
                all_live.extend(l2);
                *live = canonical_antichain(all_live, |(w1, v1), (w2, v2)| {
                    v1 == v2 && dec_word_leq(w1, w2)
                });
                let mut all_dead = std::mem::take(dead);
                all_dead.extend(d2);
                *dead = canonical_antichain(all_dead, dec_word_leq);
            }
            (NormalForm::Sim(acc_nf), NormalForm::Sim(part_nf)) => {
                match (std::mem::replace(acc_nf, SimNf::Node(Vec::new())), part_nf) {
                    (SimNf::Leaves(mut xs), SimNf::Leaves(ys)) => {
                        xs.extend(ys);
                        *acc_nf = SimNf::Leaves(xs);
                    }
                    (SimNf::Node(mut xs), SimNf::Node(ys)) => {
                        xs.extend(ys);
                        *acc_nf = simnf_node(xs);
                    }
                    _ => unreachable!("uniform depth checked"),
                }
            }
            (NormalForm::ReadySim(acc_nf), NormalForm::ReadySim(part_nf)) => {
                let taken = std::mem::replace(
                    acc_nf,
                    RsNf::Node {
                        entries: Vec::new(),
                        star: false,
                    },
                );
                match (taken, part_nf) {
                    (RsNf::Leaves(mut xs), RsNf::Leaves(ys)) => {
                        xs.extend(ys);
                        *acc_nf = RsNf::Leaves(xs);
                    }
                    (
                        RsNf::Node {
                            entries: mut xs,
                            star,
                        },
                        RsNf::Node {
                            entries: ys,
                            star: s2,
                        },
                    ) => {
                        xs.extend(ys);
                        *acc_nf = rsnf_node(xs, star || s2);
                    }
                    _ => unreachable!("uniform depth checked"),
                }
            }
            _ => unreachable!("uniform depth checked"),
        }
    }
    acc
}

fn prefix_word_entries(
    entries: &BTreeSet<(Word, usize)>,
    a: u16,
) -> BTreeSet<(Word, usize)> {
    entries
        .iter()
        .map(|(w, v)| {
            let mut nw = Word::with_capacity(w.len() + 1);
            nw.push(a);
            nw.extend_from_slice(w);
            (nw, *v)
        })
        .collect()
}

fn prefix_words(words: &BTreeSet<Word>, a: u16) -> BTreeSet<Word> {
    words
        .iter()
        .map(|w| {
            let mut nw = Word::with_capacity(w.len() + 1);
            nw.push(a);
            nw.extend_from_slice(w);
            nw
        })
        .collect()
}

fn norm(
    theory: SemanticsId,
    t: &TheoryTerm,
    names: &Names,
    depth: u32,
) -> Result<NormalForm, TheoryError> {
    match t {
        TheoryTerm::Var(v) => {
            let id = names.var(v);
            Ok(match theory {
                SemanticsId::Trace => NormalForm::Trace {
                    entries: [(Word::new(), id)].into_iter().collect(),
                },
                SemanticsId::CompletedTrace => NormalForm::Completed {
                    live: [(Word::new(), id)].into_iter().collect(),
                    dead: BTreeSet::new(),
                },
                SemanticsId::Readiness => NormalForm::Readiness {
                    live: [(Word::new(), id)].into_iter().collect(),
                    pairs: BTreeSet::new(),
                },
                SemanticsId::Failures => NormalForm::Failures {
                    live: [(Word::new(), id)].into_iter().collect(),
                    pairs: BTreeMap::new(),
                },
                SemanticsId::ReadyTrace => NormalForm::ReadyTrace {
                    live: [(DecWord::new(), id)].into_iter().collect(),
                    dead: BTreeSet::new(),
                },
                SemanticsId::FailureTrace => NormalForm::FailureTrace {
                    live: vec![(DecWord::new(), id)],
                    dead: Vec::new(),
                },
                SemanticsId::Simulation => {
                    NormalForm::Sim(SimNf::Leaves([id].into_iter().collect()))
                }
                SemanticsId::ReadySimulation => {
                    NormalForm::ReadySim(RsNf::Leaves([id].into_iter().collect()))
                }
                SemanticsId::ProbabilisticTrace => NormalForm::Prob {
                    dist: [((Word::new(), id), BigRational::one())].into_iter().collect(),
                },
                SemanticsId::Bisimilarity => unreachable!("checked"),
            })
        }
        TheoryTerm::Join(args) => {
            let parts = args
                .iter()
                .map(|a| norm(theory, a, names, depth))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(join_nf(theory, parts, depth))
        }
        TheoryTerm::Convex(args) => {
            let mut total = BigRational::zero();
            let mut dist: BTreeMap<(Word, usize), BigRational> = BTreeMap::new();
            for (p, a) in args {
                if p < &BigRational::zero() || p > &BigRational::one() {
                    return Err(TheoryError::BadWeight {
                        weight: render_rational(p),
                    });
                }
                total += p;
                if p.is_zero() {
                    continue;
                }
                match norm(theory, a, names, depth)? {
                    NormalForm::Prob { dist: inner } => {
                        for (key, mass) in inner {
                            *dist.entry(key).or_insert_with(BigRational::zero) += p * &mass;
                        }
                    }
                    _ => unreachable!("probabilistic theory"),
                }
            }
            if !total.is_one() {
                return Err(TheoryError::BadWeight {
                    weight: render_rational(&total),
                });
            }
            dist.retain(|_, m| !m.is_zero());
            Ok(NormalForm::Prob { dist })
        }
        TheoryTerm::Act(a, inner) => {
            let act = names.act(a);
            Ok(match norm(theory, inner, names, depth - 1)? {
                NormalForm::Trace { entries } => NormalForm::Trace {
                    entries: prefix_word_entries(&entries, act),
                },
                NormalForm::Completed { live, dead } => NormalForm::Completed {
                    live: prefix_word_entries(&live, act),
                    dead: prefix_words(&dead, act),
                },
                NormalForm::Readiness { live, pairs } => NormalForm::Readiness {
                    live: prefix_word_entries(&live, act),
                    pairs: pairs
                        .into_iter()
                        .map(|(w, set)| {
                            let mut nw = Word::with_capacity(w.len() + 1);
                            nw.push(act);
                            nw.extend_from_slice(&w);
                            (nw, set)
                        })
                        .collect(),
                },
                NormalForm::Failures { live, pairs } => NormalForm::Failures {
                    live: prefix_word_entries(&live, act),
                    pairs: pairs
                        .into_iter()
                        .map(|(w, sets)| {
                            let mut nw = Word::with_capacity(w.len() + 1);
                            nw.push(act);
                            nw.extend_from_slice(&w);
                            (nw, sets)
                        })
                        .collect(),
                },
                NormalForm::Sim(nf) => NormalForm::Sim(simnf_node(vec![(act, nf)])),
                NormalForm::Prob { dist } => NormalForm::Prob {
                    dist: dist
                        .into_iter()
                        .map(|((w, v), m)| {
                            let mut nw = Word::with_capacity(w.len() + 1);
                            nw.push(act);
                            nw.extend_from_slice(&w);
                            ((nw, v), m)
                        })
                        .collect(),
                },
                _ => unreachable!("operation admission checked"),
            })
        }
        TheoryTerm::DecAct(set, a, inner) => {
            let act = names.act(a);
            let dec = names.act_set(set);
            Ok(match norm(theory, inner, names, depth - 1)? {
                NormalForm::ReadyTrace { live, dead } => NormalForm::ReadyTrace {
                    live: live
                        .into_iter()
                        .map(|(w, v)| {
                            let mut nw = DecWord::with_capacity(w.len() + 1);
                            nw.push((dec.clone(), act));
                            nw.extend_from_slice(&w);
                            (nw, v)
                        })
                        .collect(),
                    dead: dead
                        .into_iter()
                        .map(|w| {
                            let mut nw = DecWord::with_capacity(w.len() + 1);
                            nw.push((dec.clone(), act));
                            nw.extend_from_slice(&w);
                            nw
                        })
                        .collect(),
                },
                NormalForm::FailureTrace { live, dead } => NormalForm::FailureTrace {
                    live: canonical_antichain(
                        live.into_iter()
                            .map(|(w, v)| {
                                let mut nw = DecWord::with_capacity(w.len() + 1);
                                nw.push((dec.clone(), act));
                                nw.extend_from_slice(&w);
                                (nw, v)
                            })
                            .collect(),
                        |(w1, v1), (w2, v2)| v1 == v2 && dec_word_leq(w1, w2),
                    ),
                    dead: canonical_antichain(
                        dead.into_iter()
                            .map(|w| {
                                let mut nw = DecWord::with_capacity(w.len() + 1);
                                nw.push((dec.clone(), act));
                                nw.extend_from_slice(&w);
                                nw
                            })
                            .collect(),
                        dec_word_leq,
                    ),
                },
                NormalForm::ReadySim(nf) => {
                    NormalForm::ReadySim(rsnf_node(vec![(dec, act, nf)], false))
                }
                _ => unreachable!("operation admission checked"),
            })
        }
        TheoryTerm::Star => Ok(match theory {
            SemanticsId::CompletedTrace => NormalForm::Completed {
                live: BTreeSet::new(),
                dead: [Word::new()].into_iter().collect(),
            },
            SemanticsId::ReadyTrace => NormalForm::ReadyTrace {
                live: BTreeSet::new(),
                dead: [DecWord::new()].into_iter().collect(),
            },
            SemanticsId::FailureTrace => NormalForm::FailureTrace {
                live: Vec::new(),
                dead: vec![DecWord::new()],
            },
            SemanticsId::ReadySimulation => NormalForm::ReadySim(RsNf::Node {
                entries: Vec::new(),
                star: true,
            }),
            _ => unreachable!("operation admission checked"),
        }),
        TheoryTerm::SetConst(set) => {
            let resolved = names.act_set(set);
            Ok(match theory {
                SemanticsId::Readiness => NormalForm::Readiness {
                    live: BTreeSet::new(),
                    pairs: [(Word::new(), resolved)].into_iter().collect(),
                },
                SemanticsId::Failures => NormalForm::Failures {
                    live: BTreeSet::new(),
                    pairs: [(Word::new(), vec![resolved])].into_iter().collect(),
                },
                _ => unreachable!("operation admission checked"),
            })
        }
    }
}

/// A normalized term together with its name tables and uniform depth.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub nf: NormalForm,
    pub depth: TermDepth,
    pub names: Names,
}

/// Normalizes a term of the given theory to its canonical normal form.
pub fn normalize(theory: SemanticsId, t: &TheoryTerm) -> Result<Normalized, TheoryError> {
    let names = names_of(&[t]);
    normalize_with(theory, t, names)
}

/// As [`normalize`], with caller-supplied name tables (shared across terms).
pub fn normalize_with(
    theory: SemanticsId,
    t: &TheoryTerm,
    names: Names,
) -> Result<Normalized, TheoryError> {
    if theory == SemanticsId::Bisimilarity {
        return Err(TheoryError::UnsupportedTheory { theory });
    }
    check_ops(theory, t)?;
    let depth = term_depth(t)?;
    let nf = norm(theory, t, &names, depth.min)?;
    Ok(Normalized { nf, depth, names })
}

/// Normalizes at an explicit uniform depth the term admits. Flexible terms
/// take different (though equivalent) shapes at different depths for the
/// simulation theories, so comparisons must normalize at a common depth.
pub fn normalize_at(
    theory: SemanticsId,
    t: &TheoryTerm,
    names: Names,
    depth: u32,
) -> Result<Normalized, TheoryError> {
    if theory == SemanticsId::Bisimilarity {
        return Err(TheoryError::UnsupportedTheory { theory });
    }
    check_ops(theory, t)?;
    let d = term_depth(t)?;
    if !d.admits(depth) {
        return Err(TheoryError::DepthMismatch);
    }
    let nf = norm(theory, t, &names, depth)?;
    Ok(Normalized {
        nf,
        depth: d,
        names,
    })
}

/// Decides provable equality: true iff both sides normalize to the same
/// normal form. Errors if the sides have no common uniform depth.
pub fn check_equation(
    theory: SemanticsId,
    lhs: &TheoryTerm,
    rhs: &TheoryTerm,
) -> Result<bool, TheoryError> {
    let names = names_of(&[lhs, rhs]);
    let dl = term_depth(lhs)?;
    let dr = term_depth(rhs)?;
    let unified = dl.unify(&dr).ok_or(TheoryError::DepthMismatch)?;
    let l = normalize_at(theory, lhs, names.clone(), unified.min)?;
    let r = normalize_at(theory, rhs, names, unified.min)?;
    Ok(l.nf == r.nf)
}

/// Rebuilds a term from a normal form; normalizing it again reproduces the
/// normal form (idempotence of normalization).
pub fn nf_to_term(nf: &NormalForm, names: &Names) -> TheoryTerm {
    let var = |id: usize| TheoryTerm::Var(names.vars[id].clone());
    let chain = |w: &Word, terminal: TheoryTerm| {
        w.iter().rev().fold(terminal, |acc, &a| {
            TheoryTerm::Act(names.actions[a as usize].clone(), Box::new(acc))
        })
    };
    let labels = |set: &ASet| -> BTreeSet<String> {
        set.iter()
            .map(|&a| names.actions[a as usize].clone())
            .collect()
    };
    let dec_chain = |w: &DecWord, terminal: TheoryTerm| {
        w.iter().rev().fold(terminal, |acc, (set, a)| {
            TheoryTerm::DecAct(
                labels(set),
                names.actions[*a as usize].clone(),
                Box::new(acc),
            )
        })
    };
    match nf {
        NormalForm::Trace { entries } => TheoryTerm::Join(
            entries.iter().map(|(w, v)| chain(w, var(*v))).collect(),
        ),
        NormalForm::Completed { live, dead } => TheoryTerm::Join(
            live.iter()
                .map(|(w, v)| chain(w, var(*v)))
                .chain(dead.iter().map(|w| chain(w, TheoryTerm::Star)))
                .collect(),
        ),
        NormalForm::Readiness { live, pairs } => TheoryTerm::Join(
            live.iter()
                .map(|(w, v)| chain(w, var(*v)))
                .chain(
                    pairs
                        .iter()
                        .map(|(w, set)| chain(w, TheoryTerm::SetConst(labels(set)))),
                )
                .collect(),
        ),
        NormalForm::Failures { live, pairs } => TheoryTerm::Join(
            live.iter()
                .map(|(w, v)| chain(w, var(*v)))
                .chain(pairs.iter().flat_map(|(w, sets)| {
                    sets.iter()
                        .map(move |set| chain(w, TheoryTerm::SetConst(labels(set))))
                }))
                .collect(),
        ),
        NormalForm::ReadyTrace { live, dead } => TheoryTerm::Join(
            live.iter()
                .map(|(w, v)| dec_chain(w, var(*v)))
                .chain(dead.iter().map(|w| dec_chain(w, TheoryTerm::Star)))
                .collect(),
        ),
        NormalForm::FailureTrace { live, dead } => TheoryTerm::Join(
            live.iter()
                .map(|(w, v)| dec_chain(w, var(*v)))
                .chain(dead.iter().map(|w| dec_chain(w, TheoryTerm::Star)))
                .collect(),
        ),
        NormalForm::Sim(nf) => sim_nf_to_term(nf, names),
        NormalForm::ReadySim(nf) => rs_nf_to_term(nf, names),
        NormalForm::Prob { dist } => TheoryTerm::Convex(
            dist.iter()
                .map(|((w, v), m)| (m.clone(), chain(w, var(*v))))
                .collect(),
        ),
    }
}

fn sim_nf_to_term(nf: &SimNf, names: &Names) -> TheoryTerm {
    match nf {
        SimNf::Leaves(vars) => TheoryTerm::Join(
            vars.iter()
                .map(|&v| TheoryTerm::Var(names.vars[v].clone()))
                .collect(),
        ),
        SimNf::Node(entries) => TheoryTerm::Join(
            entries
                .iter()
                .map(|(a, c)| {
                    TheoryTerm::Act(
                        names.actions[*a as usize].clone(),
                        Box::new(sim_nf_to_term(c, names)),
                    )
                })
                .collect(),
        ),
    }
}

fn rs_nf_to_term(nf: &RsNf, names: &Names) -> TheoryTerm {
    match nf {
        RsNf::Leaves(vars) => TheoryTerm::Join(
            vars.iter()
                .map(|&v| TheoryTerm::Var(names.vars[v].clone()))
                .collect(),
        ),
        RsNf::Node { entries, star } => {
            let mut parts: Vec<TheoryTerm> = entries
                .iter()
                .map(|(set, a, c)| {
                    TheoryTerm::DecAct(
                        set.iter()
                            .map(|&x| names.actions[x as usize].clone())
                            .collect(),
                        names.actions[*a as usize].clone(),
                        Box::new(rs_nf_to_term(c, names)),
                    )
                })
                .collect();
            if *star {
                parts.push(TheoryTerm::Star);
            }
            TheoryTerm::Join(parts)
        }
    }
}

/// Replaces variable leaves by terms.
pub fn subst_term(t: &TheoryTerm, map: &BTreeMap<String, TheoryTerm>) -> TheoryTerm {
    match t {
        TheoryTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        TheoryTerm::Join(args) => {
            TheoryTerm::Join(args.iter().map(|a| subst_term(a, map)).collect())
        }
        TheoryTerm::Convex(args) => TheoryTerm::Convex(
            args.iter()
                .map(|(p, a)| (p.clone(), subst_term(a, map)))
                .collect(),
        ),
        TheoryTerm::Act(a, inner) => {
            TheoryTerm::Act(a.clone(), Box::new(subst_term(inner, map)))
        }
        TheoryTerm::DecAct(set, a, inner) => {
            TheoryTerm::DecAct(set.clone(), a.clone(), Box::new(subst_term(inner, map)))
        }
        TheoryTerm::Star | TheoryTerm::SetConst(_) => t.clone(),
    }
}

/// Converts a depth-1 normal form into an engine layer over variable slots;
/// `None` if the normal form is not depth-1 shaped.
pub fn depth_one_layer(nf: &NormalForm) -> Option<Layer> {
    let word_slot = |entries: &BTreeSet<(Word, usize)>| -> Option<BTreeSet<(u16, usize)>> {
        entries
            .iter()
            .map(|(w, v)| (w.len() == 1).then(|| (w[0], *v)))
            .collect()
    };
    match nf {
        NormalForm::Trace { entries } => Some(Layer::Trace {
            entries: word_slot(entries)?,
        }),
        NormalForm::Completed { live, dead } => {
            let star = dead.contains(&Word::new());
            if dead.iter().any(|w| !w.is_empty()) {
                return None;
            }
            Some(Layer::CompletedTrace {
                entries: word_slot(live)?,
                star,
            })
        }
        NormalForm::Readiness { live, pairs } => {
            let consts: Option<BTreeSet<ASet>> = pairs
                .iter()
                .map(|(w, set)| w.is_empty().then(|| set.clone()))
                .collect();
            Some(Layer::Readiness {
                entries: word_slot(live)?,
                consts: consts?,
            })
        }
        NormalForm::Failures { live, pairs } => {
            let mut consts = Vec::new();
            for (w, sets) in pairs {
                if !w.is_empty() {
                    return None;
                }
                consts.extend(sets.iter().cloned());
            }
            Some(Layer::Failures {
                entries: word_slot(live)?,
                consts,
            })
        }
        NormalForm::ReadyTrace { live, dead } => {
            let star = dead.contains(&DecWord::new());
            if dead.iter().any(|w| !w.is_empty()) {
                return None;
            }
            let entries: Option<BTreeSet<(ASet, u16, usize)>> = live
                .iter()
                .map(|(w, v)| (w.len() == 1).then(|| (w[0].0.clone(), w[0].1, *v)))
                .collect();
            Some(Layer::ReadyTrace {
                entries: entries?,
                star,
            })
        }
        NormalForm::FailureTrace { live, dead } => {
            let star = dead.contains(&DecWord::new());
            if dead.iter().any(|w| !w.is_empty()) {
                return None;
            }
            let entries: Option<Vec<(ASet, u16, usize)>> = live
                .iter()
                .map(|(w, v)| (w.len() == 1).then(|| (w[0].0.clone(), w[0].1, *v)))
                .collect();
            Some(Layer::FailureTrace {
                entries: entries?,
                star,
            })
        }
        NormalForm::Sim(SimNf::Node(entries)) => {
            let converted: Option<Vec<(u16, BTreeSet<usize>)>> = entries
                .iter()
                .map(|(a, c)| match c {
                    SimNf::Leaves(vars) => Some((*a, vars.clone())),
                    SimNf::Node(_) => None,
                })
                .collect();
            Some(Layer::Simulation {
                entries: converted?,
            })
        }
        NormalForm::ReadySim(RsNf::Node { entries, star }) => {
            let converted: Option<Vec<(ASet, u16, BTreeSet<usize>)>> = entries
                .iter()
                .map(|(set, a, c)| match c {
                    RsNf::Leaves(vars) => Some((set.clone(), *a, vars.clone())),
                    RsNf::Node { .. } => None,
                })
                .collect();
            Some(Layer::ReadySimulation {
                entries: converted?,
                star: *star,
            })
        }
        NormalForm::Prob { dist } => {
            let entries: Option<Vec<(BigRational, u16, usize)>> = dist
                .iter()
                .map(|((w, v), m)| (w.len() == 1).then(|| (m.clone(), w[0], *v)))
                .collect();
            Some(Layer::Probabilistic { entries: entries? })
        }
        _ => None,
    }
}

/// Renders a semantic value as a variable-free-up-to-the-unit term: every
/// leaf is the designated unit variable.
pub fn value_to_term(
    v: &SemanticValue,
    unit_var: &str,
    alphabet: &Alphabet,
) -> Option<TheoryTerm> {
    let var = || TheoryTerm::Var(unit_var.to_string());
    let chain = |w: &Word, terminal: TheoryTerm| {
        w.iter().rev().fold(terminal, |acc, &a| {
            TheoryTerm::Act(alphabet.label(a).to_string(), Box::new(acc))
        })
    };
    let labels = |set: &ASet| -> BTreeSet<String> {
        set.iter().map(|&a| alphabet.label(a).to_string()).collect()
    };
    let dec_chain = |w: &DecWord, terminal: TheoryTerm| {
        w.iter().rev().fold(terminal, |acc, (set, a)| {
            TheoryTerm::DecAct(labels(set), alphabet.label(*a).to_string(), Box::new(acc))
        })
    };
    match v {
        SemanticValue::Trace { words, .. } => Some(TheoryTerm::Join(
            words.iter().map(|w| chain(w, var())).collect(),
        )),
        SemanticValue::CompletedTrace { live, dead, .. } => Some(TheoryTerm::Join(
            live.iter()
                .map(|w| chain(w, var()))
                .chain(dead.iter().map(|w| chain(w, TheoryTerm::Star)))
                .collect(),
        )),
        SemanticValue::Readiness { live, pairs, .. } => Some(TheoryTerm::Join(
            live.iter()
                .map(|w| chain(w, var()))
                .chain(
                    pairs
                        .iter()
                        .map(|(w, set)| chain(w, TheoryTerm::SetConst(labels(set)))),
                )
                .collect(),
        )),
        SemanticValue::Failures { live, pairs, .. } => Some(TheoryTerm::Join(
            live.iter()
                .map(|w| chain(w, var()))
                .chain(pairs.iter().flat_map(|(w, sets)| {
                    sets.iter()
                        .map(move |set| chain(w, TheoryTerm::SetConst(labels(set))))
                }))
                .collect(),
        )),
        SemanticValue::ReadyTrace { live, dead, .. } => Some(TheoryTerm::Join(
            live.iter()
                .map(|w| dec_chain(w, var()))
                .chain(dead.iter().map(|w| dec_chain(w, TheoryTerm::Star)))
                .collect(),
        )),
        SemanticValue::FailureTrace { live, dead, .. } => Some(TheoryTerm::Join(
            live.iter()
                .map(|w| dec_chain(w, var()))
                .chain(dead.iter().map(|w| dec_chain(w, TheoryTerm::Star)))
                .collect(),
        )),
        SemanticValue::Simulation { root, .. } => Some(sim_val_to_term(root, unit_var, alphabet)),
        SemanticValue::ReadySimulation { root, .. } => {
            Some(rs_val_to_term(root, unit_var, alphabet))
        }
        SemanticValue::Bisimilarity { .. } => {
            let _: Option<&BisimVal> = None;
            None
        }
        SemanticValue::ProbabilisticTrace { dist, .. } => Some(TheoryTerm::Convex(
            dist.iter().map(|(w, m)| (m.clone(), chain(w, var()))).collect(),
        )),
    }
}

fn sim_val_to_term(v: &SimVal, unit_var: &str, alphabet: &Alphabet) -> TheoryTerm {
    match v {
        SimVal::Top => TheoryTerm::Var(unit_var.to_string()),
        SimVal::Node(entries) => TheoryTerm::Join(
            entries
                .iter()
                .map(|(a, c)| {
                    TheoryTerm::Act(
                        alphabet.label(*a).to_string(),
                        Box::new(sim_val_to_term(c, unit_var, alphabet)),
                    )
                })
                .collect(),
        ),
    }
}

fn rs_val_to_term(v: &RsVal, unit_var: &str, alphabet: &Alphabet) -> TheoryTerm {
    match v {
        RsVal::Top => TheoryTerm::Var(unit_var.to_string()),
        RsVal::Node { entries, star } => {
            let mut parts: Vec<TheoryTerm> = entries
                .iter()
                .map(|(set, a, c)| {
                    TheoryTerm::DecAct(
                        set.iter().map(|&x| alphabet.label(x).to_string()).collect(),
                        alphabet.label(*a).to_string(),
                        Box::new(rs_val_to_term(c, unit_var, alphabet)),
                    )
                })
                .collect();
            if *star {
                parts.push(TheoryTerm::Star);
            }
            TheoryTerm::Join(parts)
        }
    }
}

/// Converts a normal form over the single unit variable into a semantic
/// value; `None` if a leaf set is empty at depth 0 (not a state value).
pub fn nf_to_value(nf: &NormalForm, depth: u32) -> Option<SemanticValue> {
    use std::sync::Arc;
    match nf {
        NormalForm::Trace { entries } => Some(SemanticValue::Trace {
            depth,
            words: entries.iter().map(|(w, _)| w.clone()).collect(),
        }),
        NormalForm::Completed { live, dead } => Some(SemanticValue::CompletedTrace {
            depth,
            live: live.iter().map(|(w, _)| w.clone()).collect(),
            dead: dead.clone(),
        }),
        NormalForm::Readiness { live, pairs } => Some(SemanticValue::Readiness {
            depth,
            live: live.iter().map(|(w, _)| w.clone()).collect(),
            pairs: pairs.clone(),
        }),
        NormalForm::Failures { live, pairs } => Some(SemanticValue::Failures {
            depth,
            live: live.iter().map(|(w, _)| w.clone()).collect(),
            pairs: pairs.clone(),
        }),
        NormalForm::ReadyTrace { live, dead } => Some(SemanticValue::ReadyTrace {
            depth,
            live: live.iter().map(|(w, _)| w.clone()).collect(),
            dead: dead.clone(),
        }),
        NormalForm::FailureTrace { live, dead } => Some(SemanticValue::FailureTrace {
            depth,
            live: live.iter().map(|(w, _)| w.clone()).collect(),
            dead: dead.clone(),
        }),
        NormalForm::Sim(nf) => Some(SemanticValue::Simulation {
            depth,
            root: Arc::new(sim_nf_to_val(nf)?),
        }),
        NormalForm::ReadySim(nf) => Some(SemanticValue::ReadySimulation {
            depth,
            root: Arc::new(rs_nf_to_val(nf)?),
        }),
        NormalForm::Prob { dist } => Some(SemanticValue::ProbabilisticTrace {
            depth,
            dist: dist.iter().map(|((w, _), m)| (w.clone(), m.clone())).collect(),
        }),
    }
}

fn sim_nf_to_val(nf: &SimNf) -> Option<SimVal> {
    use std::sync::Arc;
    match nf {
        SimNf::Leaves(vars) => {
            if vars.is_empty() {
                None
            } else {
                Some(SimVal::Top)
            }
        }
        SimNf::Node(entries) => {
            let converted: Option<Vec<(u16, Arc<SimVal>)>> = entries
                .iter()
                .map(|(a, c)| sim_nf_to_val(c).map(|v| (*a, Arc::new(v))))
                .collect();
            Some(crate::value::sim_node(converted?))
        }
    }
}

fn rs_nf_to_val(nf: &RsNf) -> Option<RsVal> {
    use std::sync::Arc;
    match nf {
        RsNf::Leaves(vars) => {
            if vars.is_empty() {
                None
            } else {
                Some(RsVal::Top)
            }
        }
        RsNf::Node { entries, star } => {
            let converted: Option<Vec<(ASet, u16, Arc<RsVal>)>> = entries
                .iter()
                .map(|(set, a, c)| rs_nf_to_val(c).map(|v| (set.clone(), *a, Arc::new(v))))
                .collect();
            Some(crate::value::rs_node(converted?, *star))
        }
    }
}

/// Canonical rendering of a normal form.
pub fn render_nf(nf: &NormalForm, names: &Names) -> String {
    let word = |w: &Word| -> String {
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.iter()
                .map(|&a| names.actions[a as usize].as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    };
    let aset = |s: &ASet| -> String {
        format!(
            "{{{}}}",
            s.iter()
                .map(|&a| names.actions[a as usize].as_str())
                .collect::<Vec<_>>()
                .join(",")
        )
    };
    let dec_word = |w: &DecWord| -> String {
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.iter()
                .map(|(set, a)| format!("({},{})", aset(set), names.actions[*a as usize]))
                .collect::<Vec<_>>()
                .join(".")
        }
    };
    let var = |v: usize| names.vars[v].as_str();
    let braced = |items: Vec<String>| format!("{{{}}}", items.join(", "));
    match nf {
        NormalForm::Trace { entries } => braced(
            entries
                .iter()
                .map(|(w, v)| format!("({}, {})", word(w), var(*v)))
                .collect(),
        ),
        NormalForm::Completed { live, dead } => braced(
            live.iter()
                .map(|(w, v)| format!("({}, {})", word(w), var(*v)))
                .chain(dead.iter().map(|w| format!("({}, ⋆)", word(w))))
                .collect(),
        ),
        NormalForm::Readiness { live, pairs } => braced(
            live.iter()
                .map(|(w, v)| format!("({}, {})", word(w), var(*v)))
                .chain(pairs.iter().map(|(w, s)| format!("({}, {})", word(w), aset(s))))
                .collect(),
        ),
        NormalForm::Failures { live, pairs } => braced(
            live.iter()
                .map(|(w, v)| format!("({}, {})", word(w), var(*v)))
                .chain(pairs.iter().flat_map(|(w, sets)| {
                    sets.iter().map(move |s| format!("({}, {})", word(w), aset(s)))
                }))
                .collect(),
        ),
        NormalForm::ReadyTrace { live, dead } => braced(
            live.iter()
                .map(|(w, v)| format!("({}, {})", dec_word(w), var(*v)))
                .chain(dead.iter().map(|w| format!("({}, ⋆)", dec_word(w))))
                .collect(),
        ),
        NormalForm::FailureTrace { live, dead } => braced(
            live.iter()
                .map(|(w, v)| format!("({}, {})", dec_word(w), var(*v)))
                .chain(dead.iter().map(|w| format!("({}, ⋆)", dec_word(w))))
                .collect(),
        ),
        NormalForm::Sim(s) => render_simnf(s, names),
        NormalForm::ReadySim(s) => render_rsnf(s, names),
        NormalForm::Prob { dist } => braced(
            dist.iter()
                .map(|((w, v), m)| {
                    format!("({}, {}): {}", word(w), var(*v), render_rational(m))
                })
                .collect(),
        ),
    }
}

fn render_simnf(nf: &SimNf, names: &Names) -> String {
    match nf {
        SimNf::Leaves(vars) => format!(
            "{{{}}}",
            vars.iter()
                .map(|&v| names.vars[v].as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        SimNf::Node(entries) => format!(
            "{{{}}}",
            entries
                .iter()
                .map(|(a, c)| format!(
                    "({}, {})",
                    names.actions[*a as usize],
                    render_simnf(c, names)
                ))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn render_rsnf(nf: &RsNf, names: &Names) -> String {
    match nf {
        RsNf::Leaves(vars) => format!(
            "{{{}}}",
            vars.iter()
                .map(|&v| names.vars[v].as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        RsNf::Node { entries, star } => {
            let mut items: Vec<String> = entries
                .iter()
                .map(|(set, a, c)| {
                    format!(
                        "(({}),{}, {})",
                        set.iter()
                            .map(|&x| names.actions[x as usize].as_str())
                            .collect::<Vec<_>>()
                            .join(","),
                        names.actions[*a as usize],
                        render_rsnf(c, names)
                    )
                })
                .collect();
            if *star {
                items.push("⋆".to_string());
            }
            format!("{{{}}}", items.join(", "))
        }
    }
}
