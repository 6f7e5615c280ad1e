//! Deciding full trace-like equivalence via finite automata.
//!
//! The decorated-trace set of a state (traces, completed traces, ready or
//! failure pairs plus traces, ready or failure traces) is encoded as the
//! language of an NFA over an extended alphabet: decorations become letters
//! and set/star tags become terminal letters into a sink. Two states are
//! equivalent at every depth iff their languages agree, decided by subset
//! construction with a pairwise reachability search.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::EngineError;
use crate::model::{Lts, TransitionModel};
use crate::semantics::SemanticsId;
use crate::value::ASet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Letter {
    Act(u16),
    Dec(ASet, u16),
    Star,
    Ready(ASet),
    Fail(ASet),
}

struct Nfa {
    num_letters: u32,
    /// Per state, sorted `(letter, target)` transitions.
    trans: Vec<Vec<(u32, usize)>>,
}

struct NfaBuilder {
    letters: HashMap<Letter, u32>,
    trans: Vec<Vec<(u32, usize)>>,
}

impl NfaBuilder {
    fn new(states: usize) -> NfaBuilder {
        NfaBuilder {
            letters: HashMap::new(),
            trans: vec![Vec::new(); states],
        }
    }

    fn letter(&mut self, l: Letter) -> u32 {
        let next = self.letters.len() as u32;
        *self.letters.entry(l).or_insert(next)
    }

    fn edge(&mut self, src: usize, letter: Letter, dst: usize) {
        let l = self.letter(letter);
        self.trans[src].push((l, dst));
    }

    fn build(mut self) -> Nfa {
        for row in &mut self.trans {
            row.sort_unstable();
            row.dedup();
        }
        Nfa {
            num_letters: self.letters.len() as u32,
            trans: self.trans,
        }
    }
}

fn subsets_of(set: &ASet) -> Vec<ASet> {
    let items: Vec<u16> = set.iter().copied().collect();
    (0..(1usize << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect()
}

fn build_nfa(lts: &Lts, sem: SemanticsId) -> Result<Nfa, EngineError> {
    if matches!(sem, SemanticsId::Failures | SemanticsId::FailureTrace)
        && lts.alphabet().len() > 16
    {
        return Err(EngineError::OracleBound(
            "failure-set letters explode beyond 16 actions".to_string(),
        ));
    }
    let n = lts.num_states() as usize;
    let sink = n;
    let mut b = NfaBuilder::new(n + 1);
    let complement = |ready: &ASet| -> ASet {
        lts.alphabet()
            .lex_indices()
            .filter(|a| !ready.contains(a))
            .collect()
    };
    for x in 0..n {
        let ready = lts.ready_set(x as u32);
        match sem {
            SemanticsId::Trace => {
                for &(a, y) in lts.successors(x as u32) {
                    b.edge(x, Letter::Act(a), y as usize);
                }
            }
            SemanticsId::CompletedTrace => {
                for &(a, y) in lts.successors(x as u32) {
                    b.edge(x, Letter::Act(a), y as usize);
                }
                if lts.is_deadlock(x as u32) {
                    b.edge(x, Letter::Star, sink);
                }
            }
            SemanticsId::Readiness => {
                for &(a, y) in lts.successors(x as u32) {
                    b.edge(x, Letter::Act(a), y as usize);
                }
                b.edge(x, Letter::Ready(ready.clone()), sink);
            }
            SemanticsId::Failures => {
                for &(a, y) in lts.successors(x as u32) {
                    b.edge(x, Letter::Act(a), y as usize);
                }
                for f in subsets_of(&complement(&ready)) {
                    b.edge(x, Letter::Fail(f), sink);
                }
            }
            SemanticsId::ReadyTrace => {
                for &(a, y) in lts.successors(x as u32) {
                    b.edge(x, Letter::Dec(ready.clone(), a), y as usize);
                }
                if lts.is_deadlock(x as u32) {
                    b.edge(x, Letter::Star, sink);
                }
            }
            SemanticsId::FailureTrace => {
                let fail_sets = subsets_of(&complement(&ready));
                for &(a, y) in lts.successors(x as u32) {
                    for f in &fail_sets {
                        b.edge(x, Letter::Dec(f.clone(), a), y as usize);
                    }
                }
                if lts.is_deadlock(x as u32) {
                    b.edge(x, Letter::Star, sink);
                }
            }
            _ => {
                return Err(EngineError::UnsupportedSemantics { semantics: sem });
            }
        }
    }
    Ok(b.build())
}

/// Interns determinized subsets and answers successor queries.
struct Subsets {
    ids: HashMap<Vec<usize>, u32>,
    sets: Vec<Vec<usize>>,
}

impl Subsets {
    fn new() -> Subsets {
        Subsets {
            ids: HashMap::new(),
            sets: Vec::new(),
        }
    }

    fn intern(&mut self, set: Vec<usize>) -> u32 {
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.ids.insert(set.clone(), id);
        self.sets.push(set);
        id
    }

    fn successor(&mut self, nfa: &Nfa, id: u32, letter: u32) -> u32 {
        let mut out: Vec<usize> = Vec::new();
        for &s in &self.sets[id as usize] {
            for &(l, t) in &nfa.trans[s] {
                if l == letter {
                    out.push(t);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        self.intern(out)
    }
}

/// Language equality of the decorated-trace encodings of two states.
///
/// Every automaton state accepts, so the languages are the prefix-closed sets
/// of realizable letter sequences; equality fails iff some sequence is
/// realizable from exactly one of the two start states.
pub fn full_trace_like_equivalent(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    y: u32,
) -> Result<bool, EngineError> {
    if !matches!(
        sem,
        SemanticsId::Trace
            | SemanticsId::CompletedTrace
            | SemanticsId::Readiness
            | SemanticsId::Failures
            | SemanticsId::ReadyTrace
            | SemanticsId::FailureTrace
    ) {
        return Err(EngineError::UnsupportedSemantics { semantics: sem });
    }
    let lts = model
        .as_lts()
        .ok_or(EngineError::KindMismatch {
            semantics: sem,
            kind: "GPS",
        })?;
    lts.check_state(x).map_err(|_| EngineError::StateRange {
        index: x,
        num_states: lts.num_states(),
    })?;
    lts.check_state(y).map_err(|_| EngineError::StateRange {
        index: y,
        num_states: lts.num_states(),
    })?;
    let nfa = build_nfa(lts, sem)?;
    let mut subsets = Subsets::new();
    let sx = subsets.intern(vec![x as usize]);
    let sy = subsets.intern(vec![y as usize]);
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();
    queue.push_back((sx, sy));
    seen.insert((sx, sy));
    while let Some((p, q)) = queue.pop_front() {
        let p_empty = subsets.sets[p as usize].is_empty();
        let q_empty = subsets.sets[q as usize].is_empty();
        if p_empty != q_empty {
            return Ok(false);
        }
        if p_empty && q_empty {
            continue;
        }
        for letter in 0..nfa.num_letters {
            let np = subsets.successor(&nfa, p, letter);
            let nq = subsets.successor(&nfa, q, letter);
            if seen.insert((np, nq)) {
                queue.push_back((np, nq));
            }
        }
    }
    Ok(true)
}
