//! Canonical representations of depth-indexed observable behaviours.
//!
//! A [`SemanticValue`] is an element of `M_n 1` for one of the ten graded
//! semantics: word sets, decorated word sets, downsets stored as antichains of
//! maximal elements, recursive tree values, or word distributions. All stored
//! collections are canonically ordered, so structural equality decides value
//! equality.
//!
//! The recursive variants (simulation, ready simulation, bisimilarity) share
//! subvalues through `Rc`; comparisons memoize on node addresses, which keeps
//! equality and ordering polynomial in the size of the shared DAG rather than
//! the unfolded tree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::EngineError;
use crate::model::Alphabet;
use crate::rational::render_rational;
use crate::semantics::SemanticsId;

/// A word over the alphabet, as lex action indices.
pub type Word = Vec<u16>;
/// A set of actions, as lex indices.
pub type ASet = BTreeSet<u16>;
/// A word over the decorated alphabet `P(A) x A`.
pub type DecWord = Vec<(ASet, u16)>;

// ---------------------------------------------------------------------------
// Antichain utilities

/// Positionwise order on decorated words: comparable only at equal length,
/// actions must agree, decorations compare by inclusion.
pub fn dec_word_leq(a: &DecWord, b: &DecWord) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|((sa, la), (sb, lb))| la == lb && sa.is_subset(sb))
}

/// Reduces `items` to the antichain of maximal elements, sorted and deduped.
pub fn canonical_antichain<T: Ord + Clone>(mut items: Vec<T>, leq: impl Fn(&T, &T) -> bool) -> Vec<T> {
    items.sort();
    items.dedup();
    let keep: Vec<bool> = items
        .iter()
        .map(|x| {
            !items
                .iter()
                .any(|y| x != y && leq(x, y) && !leq(y, x))
        })
        .collect();
    items
        .into_iter()
        .zip(keep)
        .filter_map(|(x, k)| k.then_some(x))
        .collect()
}

/// True iff `x` is below some element of the antichain.
pub fn dominated<T>(antichain: &[T], x: &T, leq: impl Fn(&T, &T) -> bool) -> bool {
    antichain.iter().any(|y| leq(x, y))
}

// ---------------------------------------------------------------------------
// Recursive values

/// Simulation value: depth 0 is the unit, depth n+1 an antichain of maximal
/// `(action, depth-n value)` pairs under `(equal action, sim order)`.
#[derive(Debug)]
pub enum SimVal {
    Top,
    Node(Vec<(u16, Arc<SimVal>)>),
}

/// Ready-simulation value: entries are tagged with `(ready set, action)` pairs
/// compared by equality, plus an optional deadlock mark.
#[derive(Debug)]
pub enum RsVal {
    Top,
    Node {
        entries: Vec<(ASet, u16, Arc<RsVal>)>,
        star: bool,
    },
}

/// Finite-depth behaviour tree: depth n+1 is a plain finite set of
/// `(action, depth-n value)` pairs, with structural equality only.
#[derive(Debug)]
pub enum BisimVal {
    Top,
    Node(Vec<(u16, Arc<BisimVal>)>),
}

type PairKey = (usize, usize);

fn key<T>(a: &T, b: &T) -> PairKey {
    (a as *const T as usize, b as *const T as usize)
}

macro_rules! memoized_cmp {
    ($name:ident, $ty:ident, $body:expr) => {
        pub(crate) fn $name(a: &$ty, b: &$ty, memo: &mut HashMap<PairKey, Ordering>) -> Ordering {
            if std::ptr::eq(a, b) {
                return Ordering::Equal;
            }
            let k = key(a, b);
            if let Some(&o) = memo.get(&k) {
                return o;
            }
            #[allow(clippy::redundant_closure_call)]
            let r = ($body)(a, b, memo);
            memo.insert(k, r);
            r
        }
    };
}

memoized_cmp!(sim_cmp_memo, SimVal, |a: &SimVal,
                                     b: &SimVal,
                                     memo: &mut HashMap<PairKey, Ordering>| {
    match (a, b) {
        (SimVal::Top, SimVal::Top) => Ordering::Equal,
        (SimVal::Top, SimVal::Node(_)) => Ordering::Less,
        (SimVal::Node(_), SimVal::Top) => Ordering::Greater,
        (SimVal::Node(xs), SimVal::Node(ys)) => {
            for ((ax, cx), (ay, cy)) in xs.iter().zip(ys.iter()) {
                let o = ax.cmp(ay).then_with(|| sim_cmp_memo(cx, cy, memo));
                if o != Ordering::Equal {
                    return o;
                }
            }
            xs.len().cmp(&ys.len())
        }
    }
});

memoized_cmp!(bisim_cmp_memo, BisimVal, |a: &BisimVal,
                                         b: &BisimVal,
                                         memo: &mut HashMap<PairKey, Ordering>| {
    match (a, b) {
        (BisimVal::Top, BisimVal::Top) => Ordering::Equal,
        (BisimVal::Top, BisimVal::Node(_)) => Ordering::Less,
        (BisimVal::Node(_), BisimVal::Top) => Ordering::Greater,
        (BisimVal::Node(xs), BisimVal::Node(ys)) => {
            for ((ax, cx), (ay, cy)) in xs.iter().zip(ys.iter()) {
                let o = ax.cmp(ay).then_with(|| bisim_cmp_memo(cx, cy, memo));
                if o != Ordering::Equal {
                    return o;
                }
            }
            xs.len().cmp(&ys.len())
        }
    }
});

memoized_cmp!(rs_cmp_memo, RsVal, |a: &RsVal,
                                   b: &RsVal,
                                   memo: &mut HashMap<PairKey, Ordering>| {
    match (a, b) {
        (RsVal::Top, RsVal::Top) => Ordering::Equal,
        (RsVal::Top, RsVal::Node { .. }) => Ordering::Less,
        (RsVal::Node { .. }, RsVal::Top) => Ordering::Greater,
        (
            RsVal::Node {
                entries: xs,
                star: sx,
            },
            RsVal::Node {
                entries: ys,
                star: sy,
            },
        ) => {
            let o = sx.cmp(sy);
            if o != Ordering::Equal {
                return o;
            }
            for ((ra, aa, ca), (rb, ab, cb)) in xs.iter().zip(ys.iter()) {
                let o = (ra, aa)
                    .cmp(&(rb, ab))
                    .then_with(|| rs_cmp_memo(ca, cb, memo));
                if o != Ordering::Equal {
                    return o;
                }
            }
            xs.len().cmp(&ys.len())
        }
    }
});

/// Downset inclusion on simulation values: every entry of `a` is dominated by
/// an entry of `b` with the same action.
pub(crate) fn sim_leq_memo(a: &SimVal, b: &SimVal, memo: &mut HashMap<PairKey, bool>) -> bool {
    if std::ptr::eq(a, b) {
        return true;
    }
    let k = key(a, b);
    if let Some(&r) = memo.get(&k) {
        return r;
    }
    let r = match (a, b) {
        (SimVal::Top, SimVal::Top) => true,
        (SimVal::Node(xs), SimVal::Node(ys)) => xs.iter().all(|(ax, cx)| {
            ys.iter()
                .any(|(ay, cy)| ax == ay && sim_leq_memo(cx, cy, memo))
        }),
        _ => false,
    };
    memo.insert(k, r);
    r
}

pub(crate) fn rs_leq_memo(a: &RsVal, b: &RsVal, memo: &mut HashMap<PairKey, bool>) -> bool {
    if std::ptr::eq(a, b) {
        return true;
    }
    let k = key(a, b);
    if let Some(&r) = memo.get(&k) {
        return r;
    }
    let r = match (a, b) {
        (RsVal::Top, RsVal::Top) => true,
        (
            RsVal::Node {
                entries: xs,
                star: sx,
            },
            RsVal::Node {
                entries: ys,
                star: sy,
            },
        ) => {
            (!sx || *sy)
                && xs.iter().all(|(ra, aa, ca)| {
                    ys.iter()
                        .any(|(rb, ab, cb)| ra == rb && aa == ab && rs_leq_memo(ca, cb, memo))
                })
        }
        _ => false,
    };
    memo.insert(k, r);
    r
}

macro_rules! value_traits {
    ($ty:ident, $cmp:ident) => {
        impl PartialEq for $ty {
            fn eq(&self, other: &Self) -> bool {
                $cmp(self, other, &mut HashMap::new()) == Ordering::Equal
            }
        }
        impl Eq for $ty {}
        impl PartialOrd for $ty {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for $ty {
            fn cmp(&self, other: &Self) -> Ordering {
                $cmp(self, other, &mut HashMap::new())
            }
        }
    };
}

value_traits!(SimVal, sim_cmp_memo);
value_traits!(BisimVal, bisim_cmp_memo);
value_traits!(RsVal, rs_cmp_memo);

/// Canonical simulation node: sorted antichain of maximal entries.
pub fn sim_node(entries: Vec<(u16, Arc<SimVal>)>) -> SimVal {
    let mut cmp_memo = HashMap::new();
    let mut entries = entries;
    entries.sort_by(|(ax, cx), (ay, cy)| ax.cmp(ay).then_with(|| sim_cmp_memo(cx, cy, &mut cmp_memo)));
    entries.dedup_by(|x, y| x.0 == y.0 && sim_cmp_memo(&x.1, &y.1, &mut cmp_memo) == Ordering::Equal);
    let mut leq_memo = HashMap::new();
    let keep: Vec<bool> = entries
        .iter()
        .enumerate()
        .map(|(i, (a, c))| {
            !entries.iter().enumerate().any(|(j, (a2, c2))| {
                i != j
                    && a == a2
                    && sim_leq_memo(c, c2, &mut leq_memo)
                    && !sim_leq_memo(c2, c, &mut leq_memo)
            })
        })
        .collect();
    SimVal::Node(
        entries
            .into_iter()
            .zip(keep)
            .filter_map(|(e, k)| k.then_some(e))
            .collect(),
    )
}

/// Canonical ready-simulation node.
pub fn rs_node(entries: Vec<(ASet, u16, Arc<RsVal>)>, star: bool) -> RsVal {
    let mut cmp_memo = HashMap::new();
    let mut entries = entries;
    entries.sort_by(|(rx, ax, cx), (ry, ay, cy)| {
        (rx, ax)
            .cmp(&(ry, ay))
            .then_with(|| rs_cmp_memo(cx, cy, &mut cmp_memo))
    });
    entries.dedup_by(|x, y| {
        x.0 == y.0 && x.1 == y.1 && rs_cmp_memo(&x.2, &y.2, &mut cmp_memo) == Ordering::Equal
    });
    let mut leq_memo = HashMap::new();
    let keep: Vec<bool> = entries
        .iter()
        .enumerate()
        .map(|(i, (r, a, c))| {
            !entries.iter().enumerate().any(|(j, (r2, a2, c2))| {
                i != j
                    && r == r2
                    && a == a2
                    && rs_leq_memo(c, c2, &mut leq_memo)
                    && !rs_leq_memo(c2, c, &mut leq_memo)
            })
        })
        .collect();
    RsVal::Node {
        entries: entries
            .into_iter()
            .zip(keep)
            .filter_map(|(e, k)| k.then_some(e))
            .collect(),
        star,
    }
}

/// Canonical behaviour-tree node: sorted, deduplicated set of entries.
pub fn bisim_node(entries: Vec<(u16, Arc<BisimVal>)>) -> BisimVal {
    let mut cmp_memo = HashMap::new();
    let mut entries = entries;
    entries.sort_by(|(ax, cx), (ay, cy)| {
        ax.cmp(ay)
            .then_with(|| bisim_cmp_memo(cx, cy, &mut cmp_memo))
    });
    entries.dedup_by(|x, y| {
        x.0 == y.0 && bisim_cmp_memo(&x.1, &y.1, &mut cmp_memo) == Ordering::Equal
    });
    BisimVal::Node(entries)
}

// ---------------------------------------------------------------------------
// Semantic values

/// An element of `M_n 1` for one of the ten graded semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticValue {
    /// Finite set of length-`depth` words.
    Trace { depth: u32, words: BTreeSet<Word> },
    /// Length-`depth` words plus deadlocked traces of length `< depth`; a
    /// `dead` entry `w` encodes the star-terminated trace `w⋆`.
    CompletedTrace {
        depth: u32,
        live: BTreeSet<Word>,
        dead: BTreeSet<Word>,
    },
    /// Length-`depth` words plus ready pairs of trace length `< depth`.
    Readiness {
        depth: u32,
        live: BTreeSet<Word>,
        pairs: BTreeSet<(Word, ASet)>,
    },
    /// Length-`depth` words plus, per shorter word, the antichain of maximal
    /// failure sets (canonical form of the downclosed pair set).
    Failures {
        depth: u32,
        live: BTreeSet<Word>,
        pairs: BTreeMap<Word, Vec<ASet>>,
    },
    /// Completed traces over the decorated alphabet `P(A) x A`.
    ReadyTrace {
        depth: u32,
        live: BTreeSet<DecWord>,
        dead: BTreeSet<DecWord>,
    },
    /// As ready trace, but downclosed in the decorations; both parts stored as
    /// antichains of positionwise-maximal words.
    FailureTrace {
        depth: u32,
        live: Vec<DecWord>,
        dead: Vec<DecWord>,
    },
    Simulation { depth: u32, root: Arc<SimVal> },
    ReadySimulation { depth: u32, root: Arc<RsVal> },
    Bisimilarity { depth: u32, root: Arc<BisimVal> },
    /// Finitely supported distribution over length-`depth` words; masses are
    /// exact rationals in (0,1] summing to 1.
    ProbabilisticTrace {
        depth: u32,
        dist: BTreeMap<Word, BigRational>,
    },
}

impl SemanticValue {
    pub fn depth(&self) -> u32 {
        match self {
            SemanticValue::Trace { depth, .. }
            | SemanticValue::CompletedTrace { depth, .. }
            | SemanticValue::Readiness { depth, .. }
            | SemanticValue::Failures { depth, .. }
            | SemanticValue::ReadyTrace { depth, .. }
            | SemanticValue::FailureTrace { depth, .. }
            | SemanticValue::Simulation { depth, .. }
            | SemanticValue::ReadySimulation { depth, .. }
            | SemanticValue::Bisimilarity { depth, .. }
            | SemanticValue::ProbabilisticTrace { depth, .. } => *depth,
        }
    }

    pub fn semantics(&self) -> SemanticsId {
        match self {
            SemanticValue::Trace { .. } => SemanticsId::Trace,
            SemanticValue::CompletedTrace { .. } => SemanticsId::CompletedTrace,
            SemanticValue::Readiness { .. } => SemanticsId::Readiness,
            SemanticValue::Failures { .. } => SemanticsId::Failures,
            SemanticValue::ReadyTrace { .. } => SemanticsId::ReadyTrace,
            SemanticValue::FailureTrace { .. } => SemanticsId::FailureTrace,
            SemanticValue::Simulation { .. } => SemanticsId::Simulation,
            SemanticValue::ReadySimulation { .. } => SemanticsId::ReadySimulation,
            SemanticValue::Bisimilarity { .. } => SemanticsId::Bisimilarity,
            SemanticValue::ProbabilisticTrace { .. } => SemanticsId::ProbabilisticTrace,
        }
    }

    /// Canonical text form. Sets are sorted, words are label sequences joined
    /// by `.`, the empty word is `ε`, rationals render as `p/q`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        fn word(alphabet: &Alphabet, w: &Word) -> String {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.iter()
                    .map(|&a| alphabet.label(a))
                    .collect::<Vec<_>>()
                    .join(".")
            }
        }
        fn dec_word(alphabet: &Alphabet, w: &DecWord) -> String {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.iter()
                    .map(|(set, a)| format!("({},{})", alphabet.render_set(set), alphabet.label(*a)))
                    .collect::<Vec<_>>()
                    .join(".")
            }
        }
        fn dead_word(alphabet: &Alphabet, w: &Word) -> String {
            if w.is_empty() {
                "⋆".to_string()
            } else {
                format!("{}.⋆", word(alphabet, w))
            }
        }
        fn dead_dec_word(alphabet: &Alphabet, w: &DecWord) -> String {
            if w.is_empty() {
                "⋆".to_string()
            } else {
                format!("{}.⋆", dec_word(alphabet, w))
            }
        }
        fn braced(items: Vec<String>) -> String {
            format!("{{{}}}", items.join(", "))
        }
        match self {
            SemanticValue::Trace { words, .. } => {
                braced(words.iter().map(|w| word(alphabet, w)).collect())
            }
            SemanticValue::CompletedTrace { live, dead, .. } => braced(
                live.iter()
                    .map(|w| word(alphabet, w))
                    .chain(dead.iter().map(|w| dead_word(alphabet, w)))
                    .collect(),
            ),
            SemanticValue::Readiness { live, pairs, .. } => braced(
                live.iter()
                    .map(|w| word(alphabet, w))
                    .chain(pairs.iter().map(|(w, set)| {
                        format!("({}, {})", word(alphabet, w), alphabet.render_set(set))
                    }))
                    .collect(),
            ),
            SemanticValue::Failures { live, pairs, .. } => braced(
                live.iter()
                    .map(|w| word(alphabet, w))
                    .chain(pairs.iter().flat_map(|(w, sets)| {
                        sets.iter().map(move |set| {
                            format!("({}, {})", word(alphabet, w), alphabet.render_set(set))
                        })
                    }))
                    .collect(),
            ),
            SemanticValue::ReadyTrace { live, dead, .. } => braced(
                live.iter()
                    .map(|w| dec_word(alphabet, w))
                    .chain(dead.iter().map(|w| dead_dec_word(alphabet, w)))
                    .collect(),
            ),
            SemanticValue::FailureTrace { live, dead, .. } => braced(
                live.iter()
                    .map(|w| dec_word(alphabet, w))
                    .chain(dead.iter().map(|w| dead_dec_word(alphabet, w)))
                    .collect(),
            ),
            SemanticValue::Simulation { root, .. } => render_sim(root, alphabet),
            SemanticValue::ReadySimulation { root, .. } => render_rs(root, alphabet),
            SemanticValue::Bisimilarity { root, .. } => render_bisim(root, alphabet),
            SemanticValue::ProbabilisticTrace { dist, .. } => braced(
                dist.iter()
                    .map(|(w, p)| format!("{}: {}", word(alphabet, w), render_rational(p)))
                    .collect(),
            ),
        }
    }
}

fn render_sim(v: &SimVal, alphabet: &Alphabet) -> String {
    match v {
        SimVal::Top => "⊤".to_string(),
        SimVal::Node(entries) => {
            let items: Vec<String> = entries
                .iter()
                .map(|(a, c)| format!("({}, {})", alphabet.label(*a), render_sim(c, alphabet)))
                .collect();
            format!("{{{}}}", items.join(", "))
        }
    }
}

fn render_rs(v: &RsVal, alphabet: &Alphabet) -> String {
    match v {
        RsVal::Top => "⊤".to_string(),
        RsVal::Node { entries, star } => {
            let mut items: Vec<String> = entries
                .iter()
                .map(|(set, a, c)| {
                    format!(
                        "({},{}, {})",
                        alphabet.render_set(set),
                        alphabet.label(*a),
                        render_rs(c, alphabet)
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

fn render_bisim(v: &BisimVal, alphabet: &Alphabet) -> String {
    match v {
        BisimVal::Top => "⊤".to_string(),
        BisimVal::Node(entries) => {
            let items: Vec<String> = entries
                .iter()
                .map(|(a, c)| format!("({}, {})", alphabet.label(*a), render_bisim(c, alphabet)))
                .collect();
            format!("{{{}}}", items.join(", "))
        }
    }
}

// ---------------------------------------------------------------------------
// Order, join and projection helpers on semantic values

/// Decides downset inclusion between two simulation or ready-simulation
/// values of equal depth.
pub fn value_sim_leq(v: &SemanticValue, w: &SemanticValue) -> Result<bool, EngineError> {
    match (v, w) {
        (
            SemanticValue::Simulation { depth: d1, root: r1 },
            SemanticValue::Simulation { depth: d2, root: r2 },
        ) if d1 == d2 => Ok(sim_leq_memo(r1, r2, &mut HashMap::new())),
        (
            SemanticValue::ReadySimulation { depth: d1, root: r1 },
            SemanticValue::ReadySimulation { depth: d2, root: r2 },
        ) if d1 == d2 => Ok(rs_leq_memo(r1, r2, &mut HashMap::new())),
        _ => Err(EngineError::ValueMismatch),
    }
}

/// Merges failure-pair maps, re-normalizing each antichain.
pub fn merge_failure_pairs(
    into: &mut BTreeMap<Word, Vec<ASet>>,
    from: BTreeMap<Word, Vec<ASet>>,
) {
    for (w, sets) in from {
        match into.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(sets);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let mut all = e.get().clone();
                all.extend(sets);
                *e.get_mut() = canonical_antichain(all, |a, b| a.is_subset(b));
            }
        }
    }
}

/// Join of two values in `M_n 1`, for the semantics whose depth-0 theory is a
/// join semilattice. Errors for bisimilarity (no depth-0 operations) and the
/// probabilistic semantics (use [`convex_values`]).
pub fn join_values(v: &SemanticValue, w: &SemanticValue) -> Result<SemanticValue, EngineError> {
    if v.depth() != w.depth() {
        return Err(EngineError::ValueMismatch);
    }
    match (v, w) {
        (
            SemanticValue::Trace { depth, words: w1 },
            SemanticValue::Trace { words: w2, .. },
        ) => Ok(SemanticValue::Trace {
            depth: *depth,
            words: w1.union(w2).cloned().collect(),
        }),
        (
            SemanticValue::CompletedTrace {
                depth,
                live: l1,
                dead: d1,
            },
            SemanticValue::CompletedTrace {
                live: l2, dead: d2, ..
            },
        ) => Ok(SemanticValue::CompletedTrace {
            depth: *depth,
            live: l1.union(l2).cloned().collect(),
            dead: d1.union(d2).cloned().collect(),
        }),
        (
            SemanticValue::Readiness {
                depth,
                live: l1,
                pairs: p1,
            },
            SemanticValue::Readiness {
                live: l2, pairs: p2, ..
            },
        ) => Ok(SemanticValue::Readiness {
            depth: *depth,
            live: l1.union(l2).cloned().collect(),
            pairs: p1.union(p2).cloned().collect(),
        }),
        (
            SemanticValue::Failures {
                depth,
                live: l1,
                pairs: p1,
            },
            SemanticValue::Failures {
                live: l2, pairs: p2, ..
            },
        ) => {
            let mut pairs = p1.clone();
            merge_failure_pairs(&mut pairs, p2.clone());
            Ok(SemanticValue::Failures {
                depth: *depth,
                live: l1.union(l2).cloned().collect(),
                pairs,
            })
        }
        (
            SemanticValue::ReadyTrace {
                depth,
                live: l1,
                dead: d1,
            },
            SemanticValue::ReadyTrace {
                live: l2, dead: d2, ..
            },
        ) => Ok(SemanticValue::ReadyTrace {
            depth: *depth,
            live: l1.union(l2).cloned().collect(),
            dead: d1.union(d2).cloned().collect(),
        }),
        (
            SemanticValue::FailureTrace {
                depth,
                live: l1,
                dead: d1,
            },
            SemanticValue::FailureTrace {
                live: l2, dead: d2, ..
            },
        ) => {
            let live = canonical_antichain(
                l1.iter().chain(l2.iter()).cloned().collect(),
                dec_word_leq,
            );
            let dead = canonical_antichain(
                d1.iter().chain(d2.iter()).cloned().collect(),
                dec_word_leq,
            );
            Ok(SemanticValue::FailureTrace {
                depth: *depth,
                live,
                dead,
            })
        }
        (
            SemanticValue::Simulation { depth, root: r1 },
            SemanticValue::Simulation { root: r2, .. },
        ) => match (r1.as_ref(), r2.as_ref()) {
            (SimVal::Top, SimVal::Top) => Ok(v.clone()),
            (SimVal::Node(e1), SimVal::Node(e2)) => Ok(SemanticValue::Simulation {
                depth: *depth,
                root: Arc::new(sim_node(e1.iter().chain(e2.iter()).cloned().collect())),
            }),
            _ => Err(EngineError::ValueMismatch),
        },
        (
            SemanticValue::ReadySimulation { depth, root: r1 },
            SemanticValue::ReadySimulation { root: r2, .. },
        ) => match (r1.as_ref(), r2.as_ref()) {
            (RsVal::Top, RsVal::Top) => Ok(v.clone()),
            (
                RsVal::Node {
                    entries: e1,
                    star: s1,
                },
                RsVal::Node {
                    entries: e2,
                    star: s2,
                },
            ) => Ok(SemanticValue::ReadySimulation {
                depth: *depth,
                root: Arc::new(rs_node(
                    e1.iter().chain(e2.iter()).cloned().collect(),
                    *s1 || *s2,
                )),
            }),
            _ => Err(EngineError::ValueMismatch),
        },
        _ => Err(EngineError::ValueMismatch),
    }
}

/// Convex combination `p*v + (1-p)*w` of two probabilistic values.
pub fn convex_values(
    p: &BigRational,
    v: &SemanticValue,
    w: &SemanticValue,
) -> Result<SemanticValue, EngineError> {
    match (v, w) {
        (
            SemanticValue::ProbabilisticTrace { depth: d1, dist: m1 },
            SemanticValue::ProbabilisticTrace { depth: d2, dist: m2 },
        ) if d1 == d2 => {
            let mut dist: BTreeMap<Word, BigRational> = BTreeMap::new();
            for (word, mass) in m1 {
                let scaled = p * mass;
                if !num_traits::Zero::is_zero(&scaled) {
                    *dist.entry(word.clone()).or_insert_with(num_traits::Zero::zero) += scaled;
                }
            }
            let q = BigRational::from_integer(1.into()) - p;
            for (word, mass) in m2 {
                let scaled = &q * mass;
                if !num_traits::Zero::is_zero(&scaled) {
                    *dist.entry(word.clone()).or_insert_with(num_traits::Zero::zero) += scaled;
                }
            }
            dist.retain(|_, m| !num_traits::Zero::is_zero(m));
            Ok(SemanticValue::ProbabilisticTrace {
                depth: *d1,
                dist,
            })
        }
        _ => Err(EngineError::ValueMismatch),
    }
}

/// Dropping the deadlock component of a completed-trace value yields the
/// trace value.
pub fn completed_to_trace(v: &SemanticValue) -> Option<SemanticValue> {
    match v {
        SemanticValue::CompletedTrace { depth, live, .. } => Some(SemanticValue::Trace {
            depth: *depth,
            words: live.clone(),
        }),
        _ => None,
    }
}

/// Dropping the ready pairs of a readiness value yields the trace value.
pub fn readiness_to_trace(v: &SemanticValue) -> Option<SemanticValue> {
    match v {
        SemanticValue::Readiness { depth, live, .. } => Some(SemanticValue::Trace {
            depth: *depth,
            words: live.clone(),
        }),
        _ => None,
    }
}

/// Dropping the failure pairs of a failures value yields the trace value.
pub fn failures_to_trace(v: &SemanticValue) -> Option<SemanticValue> {
    match v {
        SemanticValue::Failures { depth, live, .. } => Some(SemanticValue::Trace {
            depth: *depth,
            words: live.clone(),
        }),
        _ => None,
    }
}

/// Erasing the ready-set decorations of a ready-trace value yields the
/// completed-trace value.
pub fn ready_trace_to_completed(v: &SemanticValue) -> Option<SemanticValue> {
    match v {
        SemanticValue::ReadyTrace { depth, live, dead } => {
            let strip = |w: &DecWord| -> Word { w.iter().map(|(_, a)| *a).collect() };
            Some(SemanticValue::CompletedTrace {
                depth: *depth,
                live: live.iter().map(strip).collect(),
                dead: dead.iter().map(strip).collect(),
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top() -> Arc<SimVal> {
        Arc::new(SimVal::Top)
    }

    #[test]
    fn sim_node_prunes_dominated_entries() {
        // {(0, {(1,⊤)}), (0, {(1,⊤),(2,⊤)})}: the first entry is dominated.
        let small = Arc::new(sim_node(vec![(1, top())]));
        let big = Arc::new(sim_node(vec![(1, top()), (2, top())]));
        let node = sim_node(vec![(0, small), (0, big.clone())]);
        match &node {
            SimVal::Node(entries) => {
                assert_eq!(entries.len(), 1);
                assert!(Arc::ptr_eq(&entries[0].1, &big));
            }
            SimVal::Top => panic!("expected node"),
        }
    }

    #[test]
    fn antichain_canonicalization_is_idempotent() {
        let sets: Vec<ASet> = vec![
            [0u16].into_iter().collect(),
            [0u16, 1].into_iter().collect(),
            [1u16].into_iter().collect(),
        ];
        let once = canonical_antichain(sets, |a, b| a.is_subset(b));
        let twice = canonical_antichain(once.clone(), |a, b| a.is_subset(b));
        assert_eq!(once, twice);
        assert_eq!(once.len(), 1);
    }

    #[test]
    fn dec_word_order_requires_equal_length_and_actions() {
        let a: DecWord = vec![(ASet::new(), 0)];
        let b: DecWord = vec![([1u16].into_iter().collect(), 0)];
        let c: DecWord = vec![([1u16].into_iter().collect(), 1)];
        let d: DecWord = vec![(ASet::new(), 0), (ASet::new(), 0)];
        assert!(dec_word_leq(&a, &b));
        assert!(!dec_word_leq(&b, &a));
        assert!(!dec_word_leq(&a, &c));
        assert!(!dec_word_leq(&a, &d));
    }

    #[test]
    fn canonical_text_form_is_stable() {
        use crate::engine::beta;
        use crate::fixtures;
        let m: crate::model::TransitionModel = fixtures::g1g2().into();
        let alphabet = m.alphabet().clone();
        let trace = beta(&m, crate::semantics::SemanticsId::Trace, 2).unwrap();
        assert_eq!(trace[0].render(&alphabet), "{s.s, s.t}");
        let failures = beta(&m, crate::semantics::SemanticsId::Failures, 2).unwrap();
        assert_eq!(
            failures[4].render(&alphabet),
            "{s.s, s.t, (ε, {t}), (s, {s}), (s, {t})}"
        );
        let ct = beta(&m, crate::semantics::SemanticsId::CompletedTrace, 2).unwrap();
        assert_eq!(ct[1].render(&alphabet), "{s.⋆, t.⋆}");
        let sim = beta(&m, crate::semantics::SemanticsId::Simulation, 2).unwrap();
        assert_eq!(sim[4].render(&alphabet), "{(s, {(s, ⊤)}), (s, {(t, ⊤)})}");
        let p: crate::model::TransitionModel = fixtures::p1().into();
        let prob = beta(&p, crate::semantics::SemanticsId::ProbabilisticTrace, 2).unwrap();
        assert_eq!(prob[0].render(p.alphabet()), "{a.b: 1/2, a.c: 1/2}");
    }

    #[test]
    fn values_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<SemanticValue>();
    }

    #[test]
    fn structural_equality_is_shared_across_calls() {
        let v1 = Arc::new(sim_node(vec![(0, top()), (1, top())]));
        let v2 = Arc::new(sim_node(vec![(1, top()), (0, top())]));
        assert_eq!(v1, v2);
        assert!(sim_leq_memo(&v1, &v2, &mut HashMap::new()));
    }
}
