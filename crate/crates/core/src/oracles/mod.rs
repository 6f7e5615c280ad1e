//! Brute-force ground truth.
//!
//! Every semantics here is computed from its direct definition: words by path
//! enumeration, ready/failure pairs from the reachable poststates, simulation
//! and bisimilarity by explicit relation fixpoints, probabilities by the
//! per-word transition-probability recursion. Nothing is shared with the
//! graded engine's depth-step; agreement between the two is the central
//! cross-check of the crate.

pub mod automata;

pub use automata::full_trace_like_equivalent;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::engine::{partition_from_keys, Partition};
use crate::error::EngineError;
use crate::model::{Gps, Lts, TransitionModel};
use crate::semantics::SemanticsId;
use crate::value::{
    bisim_node, canonical_antichain, dec_word_leq, rs_node, sim_node, ASet, BisimVal, DecWord,
    RsVal, SemanticValue, SimVal, Word,
};

/// Path enumeration is capped to keep the oracles usable as test ground
/// truth; suites size their models accordingly.
const MAX_DEPTH: u32 = 16;
const MAX_PATHS: usize = 1_000_000;

fn complement(lts: &Lts, ready: &ASet) -> ASet {
    lts.alphabet()
        .lex_indices()
        .filter(|a| !ready.contains(a))
        .collect()
}

/// Word/poststate pairs `x -w-> z` for |w| = len, via memoized search.
struct PathDp<'a> {
    lts: &'a Lts,
    /// Decoration of an outgoing step, as a function of the source state;
    /// `None` for undecorated words.
    decorate: Option<Box<dyn Fn(&Lts, u32) -> ASet + 'a>>,
    memo: HashMap<(u32, u32), Arc<Vec<(DecWord, u32)>>>,
    produced: usize,
}

impl<'a> PathDp<'a> {
    fn new(lts: &'a Lts, decorate: Option<Box<dyn Fn(&Lts, u32) -> ASet + 'a>>) -> PathDp<'a> {
        PathDp {
            lts,
            decorate,
            memo: HashMap::new(),
            produced: 0,
        }
    }

    fn reach(&mut self, x: u32, len: u32) -> Result<Arc<Vec<(DecWord, u32)>>, EngineError> {
        if let Some(r) = self.memo.get(&(x, len)) {
            return Ok(r.clone());
        }
        let result = if len == 0 {
            vec![(DecWord::new(), x)]
        } else {
            let mut out: Vec<(DecWord, u32)> = Vec::new();
            let decoration = match &self.decorate {
                Some(f) => f(self.lts, x),
                None => ASet::new(),
            };
            let succ = self.lts.successors(x).to_vec();
            for (a, y) in succ {
                let rest = self.reach(y, len - 1)?;
                for (w, z) in rest.iter() {
                    let mut nw = DecWord::with_capacity(w.len() + 1);
                    nw.push((decoration.clone(), a));
                    nw.extend_from_slice(w);
                    out.push((nw, *z));
                }
            }
            out.sort();
            out.dedup();
            out
        };
        self.produced += result.len();
        if self.produced > MAX_PATHS {
            return Err(EngineError::OracleBound(format!(
                "more than {MAX_PATHS} enumerated paths"
            )));
        }
        let rc = Arc::new(result);
        self.memo.insert((x, len), rc.clone());
        Ok(rc)
    }
}

fn strip(word: &DecWord) -> Word {
    word.iter().map(|(_, a)| *a).collect()
}

fn check_oracle_depth(depth: u32) -> Result<(), EngineError> {
    if depth > MAX_DEPTH {
        Err(EngineError::OracleBound(format!(
            "oracle depth {depth} exceeds cap {MAX_DEPTH}"
        )))
    } else {
        Ok(())
    }
}

/// Probability that `x` performs the word `w` (summed over end states),
/// by the literal recursion on transition probabilities.
fn word_mass(gps: &Gps, x: u32, w: &[u16]) -> BigRational {
    match w.split_first() {
        None => BigRational::from_integer(1.into()),
        Some((&a, rest)) => {
            let mut total = BigRational::zero();
            for (p, act, y) in gps.row(x) {
                if *act == a {
                    total += p * word_mass(gps, *y, rest);
                }
            }
            total
        }
    }
}

fn all_words(n_actions: u16, len: u32) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Word::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n_actions as usize);
        for w in &out {
            for a in 0..n_actions {
                let mut nw = w.clone();
                nw.push(a);
                next.push(nw);
            }
        }
        out = next;
    }
    out
}

fn sim_unfold(lts: &Lts, memo: &mut HashMap<(u32, u32), Arc<SimVal>>, x: u32, d: u32) -> Arc<SimVal> {
    if d == 0 {
        return Arc::new(SimVal::Top);
    }
    if let Some(v) = memo.get(&(x, d)) {
        return v.clone();
    }
    let entries = lts
        .successors(x)
        .to_vec()
        .into_iter()
        .map(|(a, y)| (a, sim_unfold(lts, memo, y, d - 1)))
        .collect();
    let v = Arc::new(sim_node(entries));
    memo.insert((x, d), v.clone());
    v
}

fn rs_unfold(lts: &Lts, memo: &mut HashMap<(u32, u32), Arc<RsVal>>, x: u32, d: u32) -> Arc<RsVal> {
    if d == 0 {
        return Arc::new(RsVal::Top);
    }
    if let Some(v) = memo.get(&(x, d)) {
        return v.clone();
    }
    let ready = lts.ready_set(x);
    let succ = lts.successors(x).to_vec();
    let star = succ.is_empty();
    let entries = succ
        .into_iter()
        .map(|(a, y)| (ready.clone(), a, rs_unfold(lts, memo, y, d - 1)))
        .collect();
    let v = Arc::new(rs_node(entries, star));
    memo.insert((x, d), v.clone());
    v
}

fn bisim_unfold(
    lts: &Lts,
    memo: &mut HashMap<(u32, u32), Arc<BisimVal>>,
    x: u32,
    d: u32,
) -> Arc<BisimVal> {
    if d == 0 {
        return Arc::new(BisimVal::Top);
    }
    if let Some(v) = memo.get(&(x, d)) {
        return v.clone();
    }
    let entries = lts
        .successors(x)
        .to_vec()
        .into_iter()
        .map(|(a, y)| (a, bisim_unfold(lts, memo, y, d - 1)))
        .collect();
    let v = Arc::new(bisim_node(entries));
    memo.insert((x, d), v.clone());
    v
}

/// The depth-`depth` fragment of the direct definition of a semantics,
/// packaged in the engine's value representation.
pub fn oracle_value(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    depth: u32,
) -> Result<SemanticValue, EngineError> {
    sem.check_model(model)?;
    check_oracle_depth(depth)?;
    if x >= model.num_states() {
        return Err(EngineError::StateRange {
            index: x,
            num_states: model.num_states(),
        });
    }
    match sem {
        SemanticsId::Trace => {
            let lts = model.as_lts().expect("kind checked");
            let mut dp = PathDp::new(lts, None);
            let words: BTreeSet<Word> = dp.reach(x, depth)?.iter().map(|(w, _)| strip(w)).collect();
            Ok(SemanticValue::Trace { depth, words })
        }
        SemanticsId::CompletedTrace => {
            let lts = model.as_lts().expect("kind checked");
            let mut dp = PathDp::new(lts, None);
            let live: BTreeSet<Word> = dp.reach(x, depth)?.iter().map(|(w, _)| strip(w)).collect();
            let mut dead: BTreeSet<Word> = BTreeSet::new();
            for len in 0..depth {
                for (w, z) in dp.reach(x, len)?.iter() {
                    if lts.is_deadlock(*z) {
                        dead.insert(strip(w));
                    }
                }
            }
            Ok(SemanticValue::CompletedTrace { depth, live, dead })
        }
        SemanticsId::Readiness => {
            let lts = model.as_lts().expect("kind checked");
            let mut dp = PathDp::new(lts, None);
            let live: BTreeSet<Word> = dp.reach(x, depth)?.iter().map(|(w, _)| strip(w)).collect();
            let mut pairs: BTreeSet<(Word, ASet)> = BTreeSet::new();
            for len in 0..depth {
                for (w, z) in dp.reach(x, len)?.iter() {
                    pairs.insert((strip(w), lts.ready_set(*z)));
                }
            }
            Ok(SemanticValue::Readiness { depth, live, pairs })
        }
        SemanticsId::Failures => {
            let lts = model.as_lts().expect("kind checked");
            let mut dp = PathDp::new(lts, None);
            let live: BTreeSet<Word> = dp.reach(x, depth)?.iter().map(|(w, _)| strip(w)).collect();
            let mut raw: BTreeMap<Word, Vec<ASet>> = BTreeMap::new();
            for len in 0..depth {
                for (w, z) in dp.reach(x, len)?.iter() {
                    raw.entry(strip(w))
                        .or_default()
                        .push(complement(lts, &lts.ready_set(*z)));
                }
            }
            let pairs: BTreeMap<Word, Vec<ASet>> = raw
                .into_iter()
                .map(|(w, sets)| (w, canonical_antichain(sets, |a, b| a.is_subset(b))))
                .collect();
            Ok(SemanticValue::Failures { depth, live, pairs })
        }
        SemanticsId::ReadyTrace => {
            let lts = model.as_lts().expect("kind checked");
            let mut dp = PathDp::new(lts, Some(Box::new(|l: &Lts, s: u32| l.ready_set(s))));
            let live: BTreeSet<DecWord> =
                dp.reach(x, depth)?.iter().map(|(w, _)| w.clone()).collect();
            let mut dead: BTreeSet<DecWord> = BTreeSet::new();
            for len in 0..depth {
                for (w, z) in dp.reach(x, len)?.iter() {
                    if lts.is_deadlock(*z) {
                        dead.insert(w.clone());
                    }
                }
            }
            Ok(SemanticValue::ReadyTrace { depth, live, dead })
        }
        SemanticsId::FailureTrace => {
            let lts = model.as_lts().expect("kind checked");
            // Decorations range over all failure sets of the source state;
            // the downset is represented by its per-path maxima, the
            // complements of the ready sets.
            let mut dp = PathDp::new(
                lts,
                Some(Box::new(|l: &Lts, s: u32| {
                    let ready = l.ready_set(s);
                    l.alphabet()
                        .lex_indices()
                        .filter(|a| !ready.contains(a))
                        .collect()
                })),
            );
            let live: Vec<DecWord> = canonical_antichain(
                dp.reach(x, depth)?.iter().map(|(w, _)| w.clone()).collect(),
                dec_word_leq,
            );
            let mut dead_raw: Vec<DecWord> = Vec::new();
            for len in 0..depth {
                for (w, z) in dp.reach(x, len)?.iter() {
                    if lts.is_deadlock(*z) {
                        dead_raw.push(w.clone());
                    }
                }
            }
            Ok(SemanticValue::FailureTrace {
                depth,
                live,
                dead: canonical_antichain(dead_raw, dec_word_leq),
            })
        }
        SemanticsId::Simulation => {
            let lts = model.as_lts().expect("kind checked");
            let root = sim_unfold(lts, &mut HashMap::new(), x, depth);
            Ok(SemanticValue::Simulation { depth, root })
        }
        SemanticsId::ReadySimulation => {
            let lts = model.as_lts().expect("kind checked");
            let root = rs_unfold(lts, &mut HashMap::new(), x, depth);
            Ok(SemanticValue::ReadySimulation { depth, root })
        }
        SemanticsId::Bisimilarity => {
            let lts = model.as_lts().expect("kind checked");
            let root = bisim_unfold(lts, &mut HashMap::new(), x, depth);
            Ok(SemanticValue::Bisimilarity { depth, root })
        }
        SemanticsId::ProbabilisticTrace => {
            let gps = model.as_gps().expect("kind checked");
            let n_actions = gps.alphabet().len() as u16;
            if (n_actions as u64).saturating_pow(depth.min(31)) > MAX_PATHS as u64 {
                return Err(EngineError::OracleBound(
                    "word space exceeds oracle cap".to_string(),
                ));
            }
            let mut dist = BTreeMap::new();
            for w in all_words(n_actions, depth) {
                let mass = word_mass(gps, x, &w);
                if !mass.is_zero() {
                    dist.insert(w, mass);
                }
            }
            Ok(SemanticValue::ProbabilisticTrace { depth, dist })
        }
    }
}

/// Coarsest bisimulation partition by classical partition refinement:
/// repeatedly split blocks by `(action, target block)` signatures.
pub fn bisim_partition(lts: &Lts) -> Partition {
    let n = lts.num_states() as usize;
    let mut block: Vec<u32> = vec![0; n];
    let mut rounds = 0;
    loop {
        let mut renumber: HashMap<(u32, BTreeSet<(u16, u32)>), u32> = HashMap::new();
        let mut next: Vec<u32> = Vec::with_capacity(n);
        for x in 0..n {
            let signature: BTreeSet<(u16, u32)> = lts
                .successors(x as u32)
                .iter()
                .map(|&(a, y)| (a, block[y as usize]))
                .collect();
            let key = (block[x], signature);
            let fresh = renumber.len() as u32;
            next.push(*renumber.entry(key).or_insert(fresh));
        }
        if next == block {
            break;
        }
        block = next;
        rounds += 1;
    }
    partition_from_keys(SemanticsId::Bisimilarity, rounds, &block)
}

/// Greatest (ready) simulation as a relation matrix `r[x][y]` meaning `y`
/// simulates `x`, by Kleene iteration from the full relation.
pub fn sim_preorder(lts: &Lts, ready: bool) -> Vec<Vec<bool>> {
    let n = lts.num_states() as usize;
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut next = vec![vec![false; n]; n];
        for x in 0..n {
            for y in 0..n {
                if !rel[x][y] {
                    continue;
                }
                if ready && lts.ready_set(x as u32) != lts.ready_set(y as u32) {
                    continue;
                }
                next[x][y] = lts.successors(x as u32).iter().all(|&(a, x2)| {
                    lts.successors(y as u32)
                        .iter()
                        .any(|&(b, y2)| a == b && rel[x2 as usize][y2 as usize])
                });
            }
        }
        if next == rel {
            return rel;
        }
        rel = next;
    }
}

/// Ready traces `A_0 a_1 A_1 ... a_n A_n` of `x` with at most `max_actions`
/// actions, as (decorated word, final ready set) pairs; decorations are the
/// ready sets of the source states.
pub fn ready_trace_set(
    lts: &Lts,
    x: u32,
    max_actions: u32,
) -> Result<BTreeSet<(DecWord, ASet)>, EngineError> {
    check_oracle_depth(max_actions)?;
    let mut dp = PathDp::new(lts, Some(Box::new(|l: &Lts, s: u32| l.ready_set(s))));
    let mut out = BTreeSet::new();
    for len in 0..=max_actions {
        for (w, z) in dp.reach(x, len)?.iter() {
            out.insert((w.clone(), lts.ready_set(*z)));
        }
    }
    Ok(out)
}

/// Failure traces of `x` with at most `max_actions` actions, represented by
/// the antichain of maximal elements (per-path complements of ready sets,
/// including the final state's).
pub fn failure_trace_set(
    lts: &Lts,
    x: u32,
    max_actions: u32,
) -> Result<Vec<(DecWord, ASet)>, EngineError> {
    check_oracle_depth(max_actions)?;
    let mut dp = PathDp::new(
        lts,
        Some(Box::new(|l: &Lts, s: u32| {
            let ready = l.ready_set(s);
            l.alphabet()
                .lex_indices()
                .filter(|a| !ready.contains(a))
                .collect()
        })),
    );
    let mut raw: Vec<(DecWord, ASet)> = Vec::new();
    for len in 0..=max_actions {
        for (w, z) in dp.reach(x, len)?.iter() {
            raw.push((w.clone(), complement(lts, &lts.ready_set(*z))));
        }
    }
    Ok(canonical_antichain(raw, |(w1, f1), (w2, f2)| {
        dec_word_leq(w1, w2) && f1.is_subset(f2)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, U0, V0};

    #[test]
    fn oracle_trace_value_on_fixture() {
        let m: TransitionModel = fixtures::g1().into();
        let v = oracle_value(&m, SemanticsId::Trace, 0, 2).unwrap();
        match v {
            SemanticValue::Trace { words, .. } => {
                let expected: BTreeSet<Word> = [vec![0, 0], vec![0, 1]].into_iter().collect();
                assert_eq!(words, expected);
            }
            other => panic!("unexpected value {other:?}"),
        }
    }

    #[test]
    fn oracle_completed_trace_sees_deadlocks() {
        let m: TransitionModel = fixtures::g1().into();
        let v = oracle_value(&m, SemanticsId::CompletedTrace, 1, 2).unwrap();
        match v {
            SemanticValue::CompletedTrace { live, dead, .. } => {
                assert!(live.is_empty());
                let expected: BTreeSet<Word> = [vec![0], vec![1]].into_iter().collect();
                assert_eq!(dead, expected);
            }
            other => panic!("unexpected value {other:?}"),
        }
    }

    #[test]
    fn oracle_probabilistic_depth_one() {
        let m: TransitionModel = fixtures::p1().into();
        let v = oracle_value(&m, SemanticsId::ProbabilisticTrace, 0, 1).unwrap();
        match v {
            SemanticValue::ProbabilisticTrace { dist, .. } => {
                assert_eq!(dist.len(), 1);
                assert!(dist[&vec![0u16]].eq(&BigRational::from_integer(1.into())));
            }
            other => panic!("unexpected value {other:?}"),
        }
    }

    #[test]
    fn bisim_partition_on_fixture() {
        let lts = fixtures::g1g2();
        let p = bisim_partition(&lts);
        assert!(!p.same_block(U0, V0));
        // all four deadlock states share a block
        assert!(p.same_block(2, 3));
        assert!(p.same_block(2, 7));
        assert!(p.same_block(2, 8));
    }

    #[test]
    fn bisim_partition_single_state() {
        let lts = crate::model::Lts::new(1, 0, &[]).unwrap();
        let p = bisim_partition(&lts);
        assert_eq!(p.blocks.len(), 1);
    }

    #[test]
    fn bisim_partition_respects_isomorphic_copies() {
        // two disjoint copies of the same chain
        let lts = crate::model::Lts::new(4, 0, &[(0, "a", 1), (2, "a", 3)]).unwrap();
        let p = bisim_partition(&lts);
        assert!(p.same_block(0, 2));
        assert!(p.same_block(1, 3));
    }

    #[test]
    fn sim_preorder_on_fixture() {
        let lts = fixtures::g1g2();
        let rel = sim_preorder(&lts, false);
        assert!(rel[V0 as usize][U0 as usize], "u0 simulates v0");
        assert!(!rel[U0 as usize][V0 as usize], "v0 does not simulate u0");
        for x in 0..lts.num_states() as usize {
            assert!(rel[x][x], "reflexive");
        }
        let ready_rel = sim_preorder(&lts, true);
        assert!(!ready_rel[V0 as usize][U0 as usize]);
    }
}
