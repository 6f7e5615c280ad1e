//! Checks the depth-1 six-tuple laws on small finite carriers.
//!
//! For each semantics the tuple (M0, M1, eta, mu00, mu01, mu10) is
//! instantiated at carriers `{0..k}` with a fixed two-letter law alphabet.
//! Checked laws: the unit laws of the M0 monad and the M1 module, mu00
//! associativity, both module associativity squares, and homomorphy of mu10.
//! Layers are enumerated exhaustively while small and sampled (deterministic
//! small elements first, then seeded) beyond the budget.
//!
//! All multiplication maps normalize their outputs, so a failing law really
//! is a law violation and not a representation artifact; the seeded mutants
//! switch one normalization or evaluation step off and must be caught with a
//! concrete witness.

use std::collections::BTreeSet;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::model::SplitMix;
use crate::rational::ratio;
use crate::semantics::SemanticsId;
use crate::value::{canonical_antichain, ASet};

/// Number of actions in the law alphabet.
const LAW_ACTS: u16 = 2;
/// Exhaustive enumeration limit per layer.
const EXHAUSTIVE_LIMIT: usize = 10_000;
/// Random extras per sampled layer.
const SAMPLE_EXTRA: usize = 160;
/// Deterministic pair window for sampled layers.
const PAIR_WINDOW: usize = 40;

/// Deliberately broken variants used by the mutation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Failures variant whose multiplication skips the downclosure
    /// (absorption of dominated failure sets).
    FailuresNoDownclosure,
    /// Trace variant whose action operations pick a single branch instead of
    /// distributing over joins.
    TraceNonDistributingAction,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum M0<T> {
    Set(BTreeSet<T>),
    Id(T),
    /// Sorted by support point, masses positive, total mass 1.
    Dist(Vec<(BigRational, T)>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Consts {
    None,
    Star(bool),
    Ready(BTreeSet<ASet>),
    /// Antichain of maximal failure sets.
    Fail(Vec<ASet>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum M1<T> {
    Words {
        pairs: BTreeSet<(u16, T)>,
        consts: Consts,
    },
    Dec {
        pairs: BTreeSet<(ASet, u16, T)>,
        star: bool,
    },
    /// Antichain under (decoration inclusion, equal action, equal carrier).
    DecDown {
        pairs: Vec<(ASet, u16, T)>,
        star: bool,
    },
    /// Antichain under (equal action, carrier-set inclusion).
    Sim(Vec<(u16, BTreeSet<T>)>),
    RSim {
        entries: Vec<(ASet, u16, BTreeSet<T>)>,
        star: bool,
    },
    Bisim(BTreeSet<(u16, T)>),
    /// Sorted by (action, carrier), masses positive, total mass 1.
    Prob(Vec<(BigRational, u16, T)>),
}

fn fail_canon(sets: Vec<ASet>, mutation: Mutation) -> Vec<ASet> {
    if mutation == Mutation::FailuresNoDownclosure {
        let mut sets = sets;
        sets.sort();
        sets.dedup();
        sets
    } else {
        canonical_antichain(sets, |a, b| a.is_subset(b))
    }
}

fn dec_down_canon<T: Ord + Clone>(pairs: Vec<(ASet, u16, T)>) -> Vec<(ASet, u16, T)> {
    canonical_antichain(pairs, |(s1, a1, t1), (s2, a2, t2)| {
        a1 == a2 && t1 == t2 && s1.is_subset(s2)
    })
}

fn sim_canon<T: Ord + Clone>(entries: Vec<(u16, BTreeSet<T>)>) -> Vec<(u16, BTreeSet<T>)> {
    canonical_antichain(entries, |(a1, s1), (a2, s2)| a1 == a2 && s1.is_subset(s2))
}

fn rsim_canon<T: Ord + Clone>(
    entries: Vec<(ASet, u16, BTreeSet<T>)>,
) -> Vec<(ASet, u16, BTreeSet<T>)> {
    canonical_antichain(entries, |(r1, a1, s1), (r2, a2, s2)| {
        r1 == r2 && a1 == a2 && s1.is_subset(s2)
    })
}

fn dist_canon<T: Ord + Clone>(entries: Vec<(BigRational, T)>) -> Vec<(BigRational, T)> {
    let mut map: std::collections::BTreeMap<T, BigRational> = Default::default();
    for (p, t) in entries {
        if !p.is_zero() {
            *map.entry(t).or_insert_with(BigRational::zero) += p;
        }
    }
    map.into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(t, p)| (p, t))
        .collect()
}

fn prob_canon<T: Ord + Clone>(entries: Vec<(BigRational, u16, T)>) -> Vec<(BigRational, u16, T)> {
    let mut map: std::collections::BTreeMap<(u16, T), BigRational> = Default::default();
    for (p, a, t) in entries {
        if !p.is_zero() {
            *map.entry((a, t)).or_insert_with(BigRational::zero) += p;
        }
    }
    map.into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((a, t), p)| (p, a, t))
        .collect()
}

fn eta<T: Ord + Clone>(sem: SemanticsId, t: T) -> M0<T> {
    match sem {
        SemanticsId::Bisimilarity => M0::Id(t),
        SemanticsId::ProbabilisticTrace => M0::Dist(vec![(BigRational::one(), t)]),
        _ => M0::Set([t].into_iter().collect()),
    }
}

fn m0_map<A: Ord + Clone, B: Ord + Clone>(e: &M0<A>, f: impl Fn(&A) -> B) -> M0<B> {
    match e {
        M0::Set(s) => M0::Set(s.iter().map(f).collect()),
        M0::Id(t) => M0::Id(f(t)),
        M0::Dist(d) => M0::Dist(dist_canon(d.iter().map(|(p, t)| (p.clone(), f(t))).collect())),
    }
}

fn m1_map<A: Ord + Clone, B: Ord + Clone>(e: &M1<A>, f: impl Fn(&A) -> B) -> M1<B> {
    match e {
        M1::Words { pairs, consts } => M1::Words {
            pairs: pairs.iter().map(|(a, t)| (*a, f(t))).collect(),
            consts: consts.clone(),
        },
        M1::Dec { pairs, star } => M1::Dec {
            pairs: pairs.iter().map(|(s, a, t)| (s.clone(), *a, f(t))).collect(),
            star: *star,
        },
        M1::DecDown { pairs, star } => M1::DecDown {
            pairs: dec_down_canon(
                pairs
                    .iter()
                    .map(|(s, a, t)| (s.clone(), *a, f(t)))
                    .collect(),
            ),
            star: *star,
        },
        M1::Sim(entries) => M1::Sim(sim_canon(
            entries
                .iter()
                .map(|(a, s)| (*a, s.iter().map(&f).collect()))
                .collect(),
        )),
        M1::RSim { entries, star } => M1::RSim {
            entries: rsim_canon(
                entries
                    .iter()
                    .map(|(r, a, s)| (r.clone(), *a, s.iter().map(&f).collect()))
                    .collect(),
            ),
            star: *star,
        },
        M1::Bisim(pairs) => M1::Bisim(pairs.iter().map(|(a, t)| (*a, f(t))).collect()),
        M1::Prob(entries) => M1::Prob(prob_canon(
            entries
                .iter()
                .map(|(p, a, t)| (p.clone(), *a, f(t)))
                .collect(),
        )),
    }
}

fn mu00<T: Ord + Clone>(outer: &M0<M0<T>>) -> M0<T> {
    match outer {
        M0::Set(sets) => {
            let mut out = BTreeSet::new();
            for inner in sets {
                match inner {
                    M0::Set(s) => out.extend(s.iter().cloned()),
                    _ => unreachable!("shape mismatch"),
                }
            }
            M0::Set(out)
        }
        M0::Id(inner) => inner.clone(),
        M0::Dist(dists) => {
            let mut out = Vec::new();
            for (p, inner) in dists {
                match inner {
                    M0::Dist(d) => {
                        out.extend(d.iter().map(|(q, t)| (p * q, t.clone())));
                    }
                    _ => unreachable!("shape mismatch"),
                }
            }
            M0::Dist(dist_canon(out))
        }
    }
}

fn empty_m1_like<T: Ord + Clone>(template: &M1<T>) -> M1<T> {
    match template {
        M1::Words { consts, .. } => M1::Words {
            pairs: BTreeSet::new(),
            consts: match consts {
                Consts::None => Consts::None,
                Consts::Star(_) => Consts::Star(false),
                Consts::Ready(_) => Consts::Ready(BTreeSet::new()),
                Consts::Fail(_) => Consts::Fail(Vec::new()),
            },
        },
        M1::Dec { .. } => M1::Dec {
            pairs: BTreeSet::new(),
            star: false,
        },
        M1::DecDown { .. } => M1::DecDown {
            pairs: Vec::new(),
            star: false,
        },
        M1::Sim(_) => M1::Sim(Vec::new()),
        M1::RSim { .. } => M1::RSim {
            entries: Vec::new(),
            star: false,
        },
        M1::Bisim(_) => M1::Bisim(BTreeSet::new()),
        M1::Prob(_) => M1::Prob(Vec::new()),
    }
}

fn join_m1<T: Ord + Clone>(items: Vec<&M1<T>>, mutation: Mutation) -> M1<T> {
    let template = items.first().expect("nonempty join");
    let mut acc = empty_m1_like(template);
    for item in items {
        match (&mut acc, item) {
            (
                M1::Words { pairs, consts },
                M1::Words {
                    pairs: p2,
                    consts: c2,
                },
            ) => {
                pairs.extend(p2.iter().cloned());
                match (consts, c2) {
                    (Consts::None, Consts::None) => {}
                    (Consts::Star(s), Consts::Star(s2)) => *s |= s2,
                    (Consts::Ready(r), Consts::Ready(r2)) => r.extend(r2.iter().cloned()),
                    (Consts::Fail(f), Consts::Fail(f2)) => {
                        let mut all = std::mem::take(f);
                        all.extend(f2.iter().cloned());
                        *f = fail_canon(all, mutation);
                    }
                    _ => unreachable!("shape mismatch"),
                }
            }
            (M1::Dec { pairs, star }, M1::Dec { pairs: p2, star: s2 }) => {
                pairs.extend(p2.iter().cloned());
                *star |= s2;
            }
            (M1::DecDown { pairs, star }, M1::DecDown { pairs: p2, star: s2 }) => {
                let mut all = std::mem::take(pairs);
                all.extend(p2.iter().cloned());
                *pairs = dec_down_canon(all);
                *star |= s2;
            }
            (M1::Sim(entries), M1::Sim(e2)) => {
                let mut all = std::mem::take(entries);
                all.extend(e2.iter().cloned());
                *entries = sim_canon(all);
            }
            (
                M1::RSim { entries, star },
                M1::RSim {
                    entries: e2,
                    star: s2,
                },
            ) => {
                let mut all = std::mem::take(entries);
                all.extend(e2.iter().cloned());
                *entries = rsim_canon(all);
                *star |= s2;
            }
            (M1::Bisim(pairs), M1::Bisim(p2)) => pairs.extend(p2.iter().cloned()),
            _ => unreachable!("shape mismatch"),
        }
    }
    acc
}

fn mu01<T: Ord + Clone>(sem: SemanticsId, outer: &M0<M1<T>>, mutation: Mutation) -> M1<T> {
    match outer {
        M0::Set(items) => {
            if items.is_empty() {
                // The empty join: determined by the semantics' M1 shape.
                return match sem {
                    SemanticsId::Trace => M1::Words {
                        pairs: BTreeSet::new(),
                        consts: Consts::None,
                    },
                    SemanticsId::CompletedTrace => M1::Words {
                        pairs: BTreeSet::new(),
                        consts: Consts::Star(false),
                    },
                    SemanticsId::Readiness => M1::Words {
                        pairs: BTreeSet::new(),
                        consts: Consts::Ready(BTreeSet::new()),
                    },
                    SemanticsId::Failures => M1::Words {
                        pairs: BTreeSet::new(),
                        consts: Consts::Fail(Vec::new()),
                    },
                    SemanticsId::ReadyTrace => M1::Dec {
                        pairs: BTreeSet::new(),
                        star: false,
                    },
                    SemanticsId::FailureTrace => M1::DecDown {
                        pairs: Vec::new(),
                        star: false,
                    },
                    SemanticsId::Simulation => M1::Sim(Vec::new()),
                    SemanticsId::ReadySimulation => M1::RSim {
                        entries: Vec::new(),
                        star: false,
                    },
                    _ => unreachable!("no empty join for this semantics"),
                };
            }
            join_m1(items.iter().collect(), mutation)
        }
        M0::Id(inner) => inner.clone(),
        M0::Dist(dists) => {
            let mut out = Vec::new();
            for (p, inner) in dists {
                match inner {
                    M1::Prob(entries) => {
                        out.extend(entries.iter().map(|(q, a, t)| (p * q, *a, t.clone())));
                    }
                    _ => unreachable!("shape mismatch"),
                }
            }
            M1::Prob(prob_canon(out))
        }
    }
}

fn expect_set<T: Ord + Clone>(e: &M0<T>) -> &BTreeSet<T> {
    match e {
        M0::Set(s) => s,
        _ => unreachable!("shape mismatch"),
    }
}

fn mu10<T: Ord + Clone>(w: &M1<M0<T>>, mutation: Mutation) -> M1<T> {
    match w {
        M1::Words { pairs, consts } => {
            let mut out = BTreeSet::new();
            for (a, inner) in pairs {
                let s = expect_set(inner);
                if mutation == Mutation::TraceNonDistributingAction && matches!(consts, Consts::None)
                {
                    if let Some(t) = s.iter().next_back() {
                        out.insert((*a, t.clone()));
                    }
                } else {
                    out.extend(s.iter().map(|t| (*a, t.clone())));
                }
            }
            let consts = match consts {
                Consts::Fail(f) => Consts::Fail(fail_canon(f.clone(), Mutation::None)),
                other => other.clone(),
            };
            M1::Words { pairs: out, consts }
        }
        M1::Dec { pairs, star } => {
            let mut out = BTreeSet::new();
            for (set, a, inner) in pairs {
                out.extend(
                    expect_set(inner)
                        .iter()
                        .map(|t| (set.clone(), *a, t.clone())),
                );
            }
            M1::Dec {
                pairs: out,
                star: *star,
            }
        }
        M1::DecDown { pairs, star } => {
            let mut out = Vec::new();
            for (set, a, inner) in pairs {
                out.extend(
                    expect_set(inner)
                        .iter()
                        .map(|t| (set.clone(), *a, t.clone())),
                );
            }
            M1::DecDown {
                pairs: dec_down_canon(out),
                star: *star,
            }
        }
        M1::Sim(entries) => {
            let mut out = Vec::new();
            for (a, joins) in entries {
                let mut union = BTreeSet::new();
                for inner in joins {
                    union.extend(expect_set(inner).iter().cloned());
                }
                out.push((*a, union));
            }
            M1::Sim(sim_canon(out))
        }
        M1::RSim { entries, star } => {
            let mut out = Vec::new();
            for (r, a, joins) in entries {
                let mut union = BTreeSet::new();
                for inner in joins {
                    union.extend(expect_set(inner).iter().cloned());
                }
                out.push((r.clone(), *a, union));
            }
            M1::RSim {
                entries: rsim_canon(out),
                star: *star,
            }
        }
        M1::Bisim(pairs) => M1::Bisim(
            pairs
                .iter()
                .map(|(a, inner)| match inner {
                    M0::Id(t) => (*a, t.clone()),
                    _ => unreachable!("shape mismatch"),
                })
                .collect(),
        ),
        M1::Prob(entries) => {
            let mut out = Vec::new();
            for (p, a, inner) in entries {
                match inner {
                    M0::Dist(d) => out.extend(d.iter().map(|(q, t)| (p * q, *a, t.clone()))),
                    _ => unreachable!("shape mismatch"),
                }
            }
            M1::Prob(prob_canon(out))
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration

struct Budget {
    rng: SplitMix,
}

fn enum_subsets<T: Ord + Clone>(items: &[T], budget: &mut Budget) -> Vec<BTreeSet<T>> {
    let n = items.len();
    if n <= 13 && (1usize << n) <= EXHAUSTIVE_LIMIT {
        return (0..(1usize << n))
            .map(|mask| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask >> i) & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect()
            })
            .collect();
    }
    let mut out: Vec<BTreeSet<T>> = vec![BTreeSet::new()];
    for t in items {
        out.push([t.clone()].into_iter().collect());
    }
    let window = items.len().min(PAIR_WINDOW);
    for i in 0..window {
        for j in (i + 1)..window {
            out.push([items[i].clone(), items[j].clone()].into_iter().collect());
        }
    }
    for _ in 0..SAMPLE_EXTRA {
        let size = 1 + budget.rng.below(4) as usize;
        let mut set = BTreeSet::new();
        for _ in 0..size {
            set.insert(items[budget.rng.below(n as u64) as usize].clone());
        }
        out.push(set);
    }
    out.sort();
    out.dedup();
    out
}

fn enum_asets() -> Vec<ASet> {
    (0..(1u32 << LAW_ACTS))
        .map(|mask| (0..LAW_ACTS).filter(|a| (mask >> a) & 1 == 1).collect())
        .collect()
}

fn enum_ready_const_families(budget: &mut Budget) -> Vec<BTreeSet<ASet>> {
    enum_subsets(&enum_asets(), budget)
}

fn enum_fail_const_antichains(budget: &mut Budget) -> Vec<Vec<ASet>> {
    let mut out: Vec<Vec<ASet>> = enum_subsets(&enum_asets(), budget)
        .into_iter()
        .map(|family| fail_canon(family.into_iter().collect(), Mutation::None))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn sample_dists<T: Ord + Clone>(items: &[T], budget: &mut Budget) -> Vec<Vec<(BigRational, T)>> {
    if items.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for t in items {
        out.push(vec![(BigRational::one(), t.clone())]);
    }
    let shapes: [&[(i64, i64)]; 2] = [&[(1, 2), (1, 2)], &[(1, 2), (1, 4), (1, 4)]];
    for _ in 0..SAMPLE_EXTRA.min(60) {
        let shape = shapes[budget.rng.below(2) as usize];
        let entries: Vec<(BigRational, T)> = shape
            .iter()
            .map(|&(n, d)| {
                (
                    ratio(n, d),
                    items[budget.rng.below(items.len() as u64) as usize].clone(),
                )
            })
            .collect();
        out.push(dist_canon(entries));
    }
    out.sort();
    out.dedup();
    out
}

fn enum_m0<T: Ord + Clone>(sem: SemanticsId, carrier: &[T], budget: &mut Budget) -> Vec<M0<T>> {
    match sem {
        SemanticsId::Bisimilarity => carrier.iter().map(|t| M0::Id(t.clone())).collect(),
        SemanticsId::ProbabilisticTrace => sample_dists(carrier, budget)
            .into_iter()
            .map(M0::Dist)
            .collect(),
        _ => enum_subsets(carrier, budget).into_iter().map(M0::Set).collect(),
    }
}

fn enum_m1<T: Ord + Clone>(sem: SemanticsId, carrier: &[T], budget: &mut Budget) -> Vec<M1<T>> {
    let acts: Vec<u16> = (0..LAW_ACTS).collect();
    let act_pairs: Vec<(u16, T)> = acts
        .iter()
        .flat_map(|&a| carrier.iter().map(move |t| (a, t.clone())))
        .collect();
    match sem {
        SemanticsId::Trace => enum_subsets(&act_pairs, budget)
            .into_iter()
            .map(|pairs| M1::Words {
                pairs,
                consts: Consts::None,
            })
            .collect(),
        SemanticsId::CompletedTrace => {
            let mut out = Vec::new();
            for pairs in enum_subsets(&act_pairs, budget) {
                for star in [false, true] {
                    out.push(M1::Words {
                        pairs: pairs.clone(),
                        consts: Consts::Star(star),
                    });
                }
            }
            out
        }
        SemanticsId::Readiness => {
            let families = enum_ready_const_families(budget);
            let mut out = Vec::new();
            for pairs in enum_subsets(&act_pairs, budget) {
                for family in &families {
                    out.push(M1::Words {
                        pairs: pairs.clone(),
                        consts: Consts::Ready(family.clone()),
                    });
                }
            }
            out
        }
        SemanticsId::Failures => {
            let antichains = enum_fail_const_antichains(budget);
            let mut out = Vec::new();
            // Constant-only elements first: the interesting downclosure
            // interactions live in the constants.
            for chain in &antichains {
                out.push(M1::Words {
                    pairs: BTreeSet::new(),
                    consts: Consts::Fail(chain.clone()),
                });
            }
            for pairs in enum_subsets(&act_pairs, budget) {
                for chain in &antichains {
                    out.push(M1::Words {
                        pairs: pairs.clone(),
                        consts: Consts::Fail(chain.clone()),
                    });
                }
            }
            out.dedup();
            out
        }
        SemanticsId::ReadyTrace | SemanticsId::FailureTrace => {
            let dec_pairs: Vec<(ASet, u16, T)> = enum_asets()
                .into_iter()
                .flat_map(|set| {
                    act_pairs
                        .iter()
                        .map(move |(a, t)| (set.clone(), *a, t.clone()))
                })
                .collect();
            let mut out = Vec::new();
            for pairs in enum_subsets(&dec_pairs, budget) {
                for star in [false, true] {
                    if sem == SemanticsId::ReadyTrace {
                        out.push(M1::Dec {
                            pairs: pairs.iter().cloned().collect(),
                            star,
                        });
                    } else {
                        out.push(M1::DecDown {
                            pairs: dec_down_canon(pairs.iter().cloned().collect()),
                            star,
                        });
                    }
                }
            }
            out.sort();
            out.dedup();
            out
        }
        SemanticsId::Simulation => {
            let joins: Vec<BTreeSet<T>> = enum_subsets(carrier, budget);
            let entries: Vec<(u16, BTreeSet<T>)> = acts
                .iter()
                .flat_map(|&a| joins.iter().map(move |s| (a, s.clone())))
                .collect();
            let mut out: Vec<M1<T>> = enum_subsets(&entries, budget)
                .into_iter()
                .map(|set| M1::Sim(sim_canon(set.into_iter().collect())))
                .collect();
            out.sort();
            out.dedup();
            out
        }
        SemanticsId::ReadySimulation => {
            let joins: Vec<BTreeSet<T>> = enum_subsets(carrier, budget);
            let mut entries: Vec<(ASet, u16, BTreeSet<T>)> = Vec::new();
            for set in enum_asets() {
                for &a in &acts {
                    for s in &joins {
                        entries.push((set.clone(), a, s.clone()));
                    }
                }
            }
            let mut out = Vec::new();
            for set in enum_subsets(&entries, budget) {
                for star in [false, true] {
                    out.push(M1::RSim {
                        entries: rsim_canon(set.iter().cloned().collect()),
                        star,
                    });
                }
            }
            out.sort();
            out.dedup();
            out
        }
        SemanticsId::Bisimilarity => enum_subsets(&act_pairs, budget)
            .into_iter()
            .map(M1::Bisim)
            .collect(),
        SemanticsId::ProbabilisticTrace => {
            if act_pairs.is_empty() {
                return Vec::new();
            }
            let mut out = Vec::new();
            for t in &act_pairs {
                out.push(M1::Prob(vec![(BigRational::one(), t.0, t.1.clone())]));
            }
            for _ in 0..SAMPLE_EXTRA.min(60) {
                let k = 2 + budget.rng.below(2) as usize;
                let mass = ratio(1, k as i64);
                let entries: Vec<(BigRational, u16, T)> = (0..k)
                    .map(|_| {
                        let (a, t) =
                            &act_pairs[budget.rng.below(act_pairs.len() as u64) as usize];
                        (mass.clone(), *a, t.clone())
                    })
                    .collect();
                out.push(M1::Prob(prob_canon(entries)));
            }
            out.sort();
            out.dedup();
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone)]
pub struct LawResult {
    pub law: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct LawReport {
    pub semantics: SemanticsId,
    pub carrier_sizes: Vec<u32>,
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failing(&self) -> Vec<&LawResult> {
        self.results.iter().filter(|r| !r.passed).collect()
    }
}

struct LawAccum {
    law: &'static str,
    checked: usize,
    witness: Option<String>,
}

impl LawAccum {
    fn new(law: &'static str) -> LawAccum {
        LawAccum {
            law,
            checked: 0,
            witness: None,
        }
    }

    fn check<L: Debug, R: PartialEq + Debug>(&mut self, input: &L, lhs: &R, rhs: &R) {
        self.checked += 1;
        if self.witness.is_none() && lhs != rhs {
            self.witness = Some(format!(
                "input {input:?}: lhs {lhs:?} != rhs {rhs:?}"
            ));
        }
    }

    fn into_result(self) -> LawResult {
        LawResult {
            law: self.law,
            passed: self.witness.is_none(),
            checked: self.checked,
            witness: self.witness,
        }
    }
}

fn run_laws(sem: SemanticsId, sizes: &[u32], seed: u64, mutation: Mutation) -> LawReport {
    let mut acc: Vec<LawAccum> = [
        "unit mu00 . eta M0 = id",
        "unit mu00 . M0 eta = id",
        "unit mu10 . M1 eta = id",
        "unit mu01 . eta M1 = id",
        "assoc mu00",
        "right module mu10",
        "left module mu01",
        "homomorphy of mu10",
    ]
    .into_iter()
    .map(LawAccum::new)
    .collect();

    for &size in sizes {
        let mut budget = Budget {
            rng: SplitMix::new(seed ^ (size as u64) << 32),
        };
        let xs: Vec<u32> = (0..size).collect();
        let m0x = enum_m0(sem, &xs, &mut budget);
        let m1x = enum_m1(sem, &xs, &mut budget);

        // Unit laws.
        for m in &m0x {
            acc[0].check(m, &mu00(&eta(sem, m.clone())), m);
            acc[1].check(m, &mu00(&m0_map(m, |t| eta(sem, *t))), m);
        }
        for w in &m1x {
            acc[2].check(
                w,
                &mu10(&m1_map(w, |t| eta(sem, *t)), mutation),
                w,
            );
            acc[3].check(w, &mu01(sem, &eta(sem, w.clone()), mutation), w);
        }

        // mu00 associativity over M0 M0 M0 X.
        let m0m0x = enum_m0(sem, &m0x, &mut budget);
        for outer in enum_m0(sem, &m0m0x, &mut budget) {
            let lhs = mu00(&m0_map(&outer, mu00));
            let rhs = mu00(&mu00(&outer));
            acc[4].check(&outer, &lhs, &rhs);
        }

        // Right module law over M1 M0 M0 X.
        for w in enum_m1(sem, &m0m0x, &mut budget) {
            let lhs = mu10(&m1_map(&w, mu00), mutation);
            let rhs = mu10(&mu10(&w, mutation), mutation);
            acc[5].check(&w, &lhs, &rhs);
        }

        // Left module law over M0 M0 M1 X.
        let m0m1x = enum_m0(sem, &m1x, &mut budget);
        for outer in enum_m0(sem, &m0m1x, &mut budget) {
            let lhs = mu01(sem, &m0_map(&outer, |inner| mu01(sem, inner, mutation)), mutation);
            let rhs = mu01(sem, &mu00(&outer), mutation);
            acc[6].check(&outer, &lhs, &rhs);
        }

        // Homomorphy of mu10 over M0 M1 M0 X.
        let m1m0x = enum_m1(sem, &m0x, &mut budget);
        for outer in enum_m0(sem, &m1m0x, &mut budget) {
            let lhs = mu10(&mu01(sem, &outer, mutation), mutation);
            let rhs = mu01(sem, &m0_map(&outer, |inner| mu10(inner, mutation)), mutation);
            acc[7].check(&outer, &lhs, &rhs);
        }
    }

    LawReport {
        semantics: sem,
        carrier_sizes: sizes.to_vec(),
        results: acc.into_iter().map(LawAccum::into_result).collect(),
    }
}

/// Verifies the six-tuple laws for a semantics at the given carrier sizes.
pub fn check_monad_laws(sem: SemanticsId, carrier_sizes: &[u32], seed: u64) -> LawReport {
    run_laws(sem, carrier_sizes, seed, Mutation::None)
}

/// As [`check_monad_laws`], but with one deliberately broken map; used to
/// confirm the checker actually detects violations.
pub fn check_monad_laws_mutated(
    sem: SemanticsId,
    carrier_sizes: &[u32],
    seed: u64,
    mutation: Mutation,
) -> LawReport {
    run_laws(sem, carrier_sizes, seed, mutation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_semantics_pass_at_small_carriers() {
        for sem in SemanticsId::ALL {
            let report = check_monad_laws(sem, &[0, 1, 2], 7);
            assert!(
                report.all_passed(),
                "{sem}: {:?}",
                report.failing()
            );
        }
    }

    #[test]
    fn unit_law_holds_at_empty_carrier() {
        let report = check_monad_laws(SemanticsId::Trace, &[0], 1);
        assert!(report.all_passed());
        assert!(report.results[0].law.contains("eta M0"));
    }

    #[test]
    fn failures_without_downclosure_fails_homomorphy() {
        let report = check_monad_laws_mutated(
            SemanticsId::Failures,
            &[0, 1, 2],
            7,
            Mutation::FailuresNoDownclosure,
        );
        let failing = report.failing();
        assert!(!failing.is_empty());
        assert!(failing.iter().any(|r| r.law == "homomorphy of mu10"));
        for r in failing {
            assert!(r.witness.is_some());
        }
    }

    #[test]
    fn non_distributing_action_fails_module_law() {
        let report = check_monad_laws_mutated(
            SemanticsId::Trace,
            &[3],
            7,
            Mutation::TraceNonDistributingAction,
        );
        let failing = report.failing();
        assert!(!failing.is_empty(), "mutation went undetected");
        assert!(failing.iter().any(|r| r.law == "right module mu10"));
        for r in failing {
            assert!(r.witness.is_some());
        }
    }
}
