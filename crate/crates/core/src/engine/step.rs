//! The depth step of the graded engine.
//!
//! A [`Layer`] is a depth-1 behaviour over abstract slots: the one-step
//! observation of a state with successor states as slots, or a depth-1 normal
//! form with variables as slots. [`substitute`] plugs depth-n values into the
//! slots and normalizes, which is exactly how the trace sequence advances one
//! depth: apply the semantics' one-step observation map to the outgoing
//! transitions, substitute the previously computed values for the poststates,
//! and renormalize.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::EngineError;
use crate::model::{Gps, Lts};
use crate::semantics::SemanticsId;
use crate::value::{
    bisim_node, canonical_antichain, dec_word_leq, merge_failure_pairs, rs_node, sim_node, ASet,
    BisimVal, DecWord, RsVal, SemanticValue, SimVal, Word,
};

/// A depth-1 behaviour over slots `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layer {
    Trace {
        entries: BTreeSet<(u16, usize)>,
    },
    CompletedTrace {
        entries: BTreeSet<(u16, usize)>,
        star: bool,
    },
    Readiness {
        entries: BTreeSet<(u16, usize)>,
        consts: BTreeSet<ASet>,
    },
    /// `consts` is an antichain of maximal failure sets.
    Failures {
        entries: BTreeSet<(u16, usize)>,
        consts: Vec<ASet>,
    },
    ReadyTrace {
        entries: BTreeSet<(ASet, u16, usize)>,
        star: bool,
    },
    /// Entries form an antichain under `(decoration ⊆, action =, slot =)`.
    FailureTrace {
        entries: Vec<(ASet, u16, usize)>,
        star: bool,
    },
    /// Entries pair an action with a join of slots.
    Simulation {
        entries: Vec<(u16, BTreeSet<usize>)>,
    },
    ReadySimulation {
        entries: Vec<(ASet, u16, BTreeSet<usize>)>,
        star: bool,
    },
    Bisimilarity {
        entries: BTreeSet<(u16, usize)>,
    },
    /// Masses need not sum to 1 for theory layers, but always do for
    /// one-step observations of a GPS state.
    Probabilistic {
        entries: Vec<(BigRational, u16, usize)>,
    },
}

/// The depth-0 value of every state: the image of the unit at the singleton.
pub fn unit_value(sem: SemanticsId) -> SemanticValue {
    let eps: BTreeSet<Word> = [Word::new()].into_iter().collect();
    match sem {
        SemanticsId::Trace => SemanticValue::Trace {
            depth: 0,
            words: eps,
        },
        SemanticsId::CompletedTrace => SemanticValue::CompletedTrace {
            depth: 0,
            live: eps,
            dead: BTreeSet::new(),
        },
        SemanticsId::Readiness => SemanticValue::Readiness {
            depth: 0,
            live: eps,
            pairs: BTreeSet::new(),
        },
        SemanticsId::Failures => SemanticValue::Failures {
            depth: 0,
            live: eps,
            pairs: BTreeMap::new(),
        },
        SemanticsId::ReadyTrace => SemanticValue::ReadyTrace {
            depth: 0,
            live: [DecWord::new()].into_iter().collect(),
            dead: BTreeSet::new(),
        },
        SemanticsId::FailureTrace => SemanticValue::FailureTrace {
            depth: 0,
            live: vec![DecWord::new()],
            dead: Vec::new(),
        },
        SemanticsId::Simulation => SemanticValue::Simulation {
            depth: 0,
            root: Arc::new(SimVal::Top),
        },
        SemanticsId::ReadySimulation => SemanticValue::ReadySimulation {
            depth: 0,
            root: Arc::new(RsVal::Top),
        },
        SemanticsId::Bisimilarity => SemanticValue::Bisimilarity {
            depth: 0,
            root: Arc::new(BisimVal::Top),
        },
        SemanticsId::ProbabilisticTrace => {
            let mut dist = BTreeMap::new();
            dist.insert(Word::new(), BigRational::from_integer(1.into()));
            SemanticValue::ProbabilisticTrace { depth: 0, dist }
        }
    }
}

/// The one-step observation of state `x`: the semantics' α map applied to the
/// outgoing transitions, with poststates as slots.
pub fn alpha_layer_lts(lts: &Lts, sem: SemanticsId, x: u32) -> Layer {
    let succ = lts.successors(x);
    let deadlock = succ.is_empty();
    let complement = |ready: &ASet| -> ASet {
        lts.alphabet()
            .lex_indices()
            .filter(|a| !ready.contains(a))
            .collect()
    };
    match sem {
        SemanticsId::Trace => Layer::Trace {
            entries: succ.iter().map(|&(a, y)| (a, y as usize)).collect(),
        },
        SemanticsId::CompletedTrace => Layer::CompletedTrace {
            entries: succ.iter().map(|&(a, y)| (a, y as usize)).collect(),
            star: deadlock,
        },
        SemanticsId::Readiness => Layer::Readiness {
            entries: succ.iter().map(|&(a, y)| (a, y as usize)).collect(),
            consts: [lts.ready_set(x)].into_iter().collect(),
        },
        SemanticsId::Failures => Layer::Failures {
            entries: succ.iter().map(|&(a, y)| (a, y as usize)).collect(),
            consts: vec![complement(&lts.ready_set(x))],
        },
        SemanticsId::ReadyTrace => {
            let ready = lts.ready_set(x);
            Layer::ReadyTrace {
                entries: succ
                    .iter()
                    .map(|&(a, y)| (ready.clone(), a, y as usize))
                    .collect(),
                star: deadlock,
            }
        }
        SemanticsId::FailureTrace => {
            let fail = complement(&lts.ready_set(x));
            Layer::FailureTrace {
                entries: succ
                    .iter()
                    .map(|&(a, y)| (fail.clone(), a, y as usize))
                    .collect(),
                star: deadlock,
            }
        }
        SemanticsId::Simulation => Layer::Simulation {
            entries: succ
                .iter()
                .map(|&(a, y)| (a, [y as usize].into_iter().collect()))
                .collect(),
        },
        SemanticsId::ReadySimulation => {
            let ready = lts.ready_set(x);
            Layer::ReadySimulation {
                entries: succ
                    .iter()
                    .map(|&(a, y)| (ready.clone(), a, [y as usize].into_iter().collect()))
                    .collect(),
                star: deadlock,
            }
        }
        SemanticsId::Bisimilarity => Layer::Bisimilarity {
            entries: succ.iter().map(|&(a, y)| (a, y as usize)).collect(),
        },
        SemanticsId::ProbabilisticTrace => unreachable!("probabilistic layer needs a GPS"),
    }
}

pub fn alpha_layer_gps(gps: &Gps, x: u32) -> Layer {
    Layer::Probabilistic {
        entries: gps
            .row(x)
            .iter()
            .map(|(p, a, y)| (p.clone(), *a, *y as usize))
            .collect(),
    }
}

fn prefix_words(a: u16, words: &BTreeSet<Word>) -> impl Iterator<Item = Word> + '_ {
    words.iter().map(move |w| {
        let mut nw = Word::with_capacity(w.len() + 1);
        nw.push(a);
        nw.extend_from_slice(w);
        nw
    })
}

fn prefix_dec<'a>(
    set: &'a ASet,
    a: u16,
    words: impl Iterator<Item = &'a DecWord> + 'a,
) -> impl Iterator<Item = DecWord> + 'a {
    words.map(move |w| {
        let mut nw = DecWord::with_capacity(w.len() + 1);
        nw.push((set.clone(), a));
        nw.extend_from_slice(w);
        nw
    })
}

/// Joins depth-n simulation values (union of downsets).
fn join_sim_args(
    slots: &BTreeSet<usize>,
    args: &[SemanticValue],
    depth: u32,
) -> Result<Arc<SimVal>, EngineError> {
    let mut roots = Vec::new();
    for &s in slots {
        match &args[s] {
            SemanticValue::Simulation { depth: d, root } if *d == depth => {
                roots.push(root.clone())
            }
            _ => return Err(EngineError::ValueMismatch),
        }
    }
    if depth == 0 {
        // The only depth-0 values reachable from states are units; the empty
        // join at depth 0 is not representable as a state value.
        if roots.is_empty() {
            return Err(EngineError::ValueMismatch);
        }
        return Ok(roots.pop().unwrap());
    }
    let mut entries = Vec::new();
    for root in roots {
        match root.as_ref() {
            SimVal::Node(es) => entries.extend(es.iter().cloned()),
            SimVal::Top => return Err(EngineError::ValueMismatch),
        }
    }
    Ok(Arc::new(sim_node(entries)))
}

fn join_rs_args(
    slots: &BTreeSet<usize>,
    args: &[SemanticValue],
    depth: u32,
) -> Result<Arc<RsVal>, EngineError> {
    let mut roots = Vec::new();
    for &s in slots {
        match &args[s] {
            SemanticValue::ReadySimulation { depth: d, root } if *d == depth => {
                roots.push(root.clone())
            }
            _ => return Err(EngineError::ValueMismatch),
        }
    }
    if depth == 0 {
        if roots.is_empty() {
            return Err(EngineError::ValueMismatch);
        }
        return Ok(roots.pop().unwrap());
    }
    let mut entries = Vec::new();
    let mut star = false;
    for root in roots {
        match root.as_ref() {
            RsVal::Node { entries: es, star: s } => {
                entries.extend(es.iter().cloned());
                star |= s;
            }
            RsVal::Top => return Err(EngineError::ValueMismatch),
        }
    }
    Ok(Arc::new(rs_node(entries, star)))
}

/// Substitutes depth-`arg_depth` values for the slots of a layer and
/// normalizes, producing a depth-`arg_depth + 1` value.
pub fn substitute(
    layer: &Layer,
    args: &[SemanticValue],
    arg_depth: u32,
) -> Result<SemanticValue, EngineError> {
    let depth = arg_depth + 1;
    macro_rules! arg {
        ($s:expr, $variant:ident { $($f:ident),+ }) => {{
            match &args[$s] {
                SemanticValue::$variant { depth: d, $($f),+ } if *d == arg_depth => ($($f),+),
                _ => return Err(EngineError::ValueMismatch),
            }
        }};
    }
    match layer {
        Layer::Trace { entries } => {
            let mut words = BTreeSet::new();
            for &(a, s) in entries {
                let aw = arg!(s, Trace { words });
                words.extend(prefix_words(a, aw));
            }
            Ok(SemanticValue::Trace { depth, words })
        }
        Layer::CompletedTrace { entries, star } => {
            let mut live = BTreeSet::new();
            let mut dead = BTreeSet::new();
            if *star {
                dead.insert(Word::new());
            }
            for &(a, s) in entries {
                let (al, ad) = arg!(s, CompletedTrace { live, dead });
                live.extend(prefix_words(a, al));
                dead.extend(prefix_words(a, ad));
            }
            Ok(SemanticValue::CompletedTrace { depth, live, dead })
        }
        Layer::Readiness { entries, consts } => {
            let mut live = BTreeSet::new();
            let mut pairs: BTreeSet<(Word, ASet)> =
                consts.iter().map(|c| (Word::new(), c.clone())).collect();
            for &(a, s) in entries {
                let (al, ap) = arg!(s, Readiness { live, pairs });
                live.extend(prefix_words(a, al));
                for (w, set) in ap {
                    let mut nw = Word::with_capacity(w.len() + 1);
                    nw.push(a);
                    nw.extend_from_slice(w);
                    pairs.insert((nw, set.clone()));
                }
            }
            Ok(SemanticValue::Readiness { depth, live, pairs })
        }
        Layer::Failures { entries, consts } => {
            let mut live = BTreeSet::new();
            let mut pairs: BTreeMap<Word, Vec<ASet>> = BTreeMap::new();
            if !consts.is_empty() {
                pairs.insert(
                    Word::new(),
                    canonical_antichain(consts.clone(), |a, b| a.is_subset(b)),
                );
            }
            for &(a, s) in entries {
                let (al, ap) = arg!(s, Failures { live, pairs });
                live.extend(prefix_words(a, al));
                let mut prefixed = BTreeMap::new();
                for (w, sets) in ap {
                    let mut nw = Word::with_capacity(w.len() + 1);
                    nw.push(a);
                    nw.extend_from_slice(w);
                    prefixed.insert(nw, sets.clone());
                }
                merge_failure_pairs(&mut pairs, prefixed);
            }
            Ok(SemanticValue::Failures { depth, live, pairs })
        }
        Layer::ReadyTrace { entries, star } => {
            let mut live = BTreeSet::new();
            let mut dead = BTreeSet::new();
            if *star {
                dead.insert(DecWord::new());
            }
            for (set, a, s) in entries {
                let (al, ad) = arg!(*s, ReadyTrace { live, dead });
                live.extend(prefix_dec(set, *a, al.iter()));
                dead.extend(prefix_dec(set, *a, ad.iter()));
            }
            Ok(SemanticValue::ReadyTrace { depth, live, dead })
        }
        Layer::FailureTrace { entries, star } => {
            let mut live = Vec::new();
            let mut dead = Vec::new();
            if *star {
                dead.push(DecWord::new());
            }
            for (set, a, s) in entries {
                let (al, ad) = arg!(*s, FailureTrace { live, dead });
                live.extend(prefix_dec(set, *a, al.iter()));
                dead.extend(prefix_dec(set, *a, ad.iter()));
            }
            Ok(SemanticValue::FailureTrace {
                depth,
                live: canonical_antichain(live, dec_word_leq),
                dead: canonical_antichain(dead, dec_word_leq),
            })
        }
        Layer::Simulation { entries } => {
            let mut out = Vec::new();
            for (a, slots) in entries {
                out.push((*a, join_sim_args(slots, args, arg_depth)?));
            }
            Ok(SemanticValue::Simulation {
                depth,
                root: Arc::new(sim_node(out)),
            })
        }
        Layer::ReadySimulation { entries, star } => {
            let mut out = Vec::new();
            for (set, a, slots) in entries {
                out.push((set.clone(), *a, join_rs_args(slots, args, arg_depth)?));
            }
            Ok(SemanticValue::ReadySimulation {
                depth,
                root: Arc::new(rs_node(out, *star)),
            })
        }
        Layer::Bisimilarity { entries } => {
            let mut out = Vec::new();
            for &(a, s) in entries {
                match &args[s] {
                    SemanticValue::Bisimilarity { depth: d, root } if *d == arg_depth => {
                        out.push((a, root.clone()))
                    }
                    _ => return Err(EngineError::ValueMismatch),
                }
            }
            Ok(SemanticValue::Bisimilarity {
                depth,
                root: Arc::new(bisim_node(out)),
            })
        }
        Layer::Probabilistic { entries } => {
            let mut dist: BTreeMap<Word, BigRational> = BTreeMap::new();
            for (p, a, s) in entries {
                let ad = arg!(*s, ProbabilisticTrace { dist });
                for (w, m) in ad {
                    let mut nw = Word::with_capacity(w.len() + 1);
                    nw.push(*a);
                    nw.extend_from_slice(w);
                    let mass = p * m;
                    if !mass.is_zero() {
                        *dist.entry(nw).or_insert_with(BigRational::zero) += mass;
                    }
                }
            }
            dist.retain(|_, m| !m.is_zero());
            Ok(SemanticValue::ProbabilisticTrace { depth, dist })
        }
    }
}
