//! Finite labelled transition systems and generative probabilistic systems.
//!
//! Models are immutable after construction and validated up front: state
//! indices are in range, transition sets are duplicate-free, and every GPS row
//! sums to exactly 1 in exact rational arithmetic.

mod aut;
mod gps;
mod random;

pub use aut::{parse_aut, render_aut};
pub use gps::{parse_gps, render_gps};
pub use random::{random_gps, random_lts, SplitMix};

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ModelError;
use crate::rational::render_rational;

/// An action label: a nonempty token without whitespace or `"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(String);

impl Action {
    pub fn new(label: &str) -> Result<Action, ModelError> {
        if label.is_empty() {
            return Err(ModelError::BadLabel {
                label: label.to_string(),
                msg: "empty label".to_string(),
            });
        }
        if label.chars().any(|c| c.is_whitespace() || c == '"') {
            return Err(ModelError::BadLabel {
                label: label.to_string(),
                msg: "label contains whitespace or a quote".to_string(),
            });
        }
        Ok(Action(label.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// The action alphabet of a model.
///
/// Labels are kept in declaration order (first occurrence in the source) for
/// faithful rendering, and in label-lexicographic order for all semantic
/// computations. Values and formulae store lex indices, so canonical orderings
/// do not depend on the order transitions were written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    decl: Vec<Action>,
    sorted: Vec<Action>,
    decl_to_lex: Vec<u16>,
}

impl Alphabet {
    pub fn from_decl(decl: Vec<Action>) -> Alphabet {
        let mut sorted = decl.clone();
        sorted.sort();
        sorted.dedup();
        let decl_to_lex = decl
            .iter()
            .map(|a| sorted.binary_search(a).expect("label present") as u16)
            .collect();
        Alphabet {
            decl,
            sorted,
            decl_to_lex,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Label of a lex index.
    pub fn label(&self, lex: u16) -> &str {
        self.sorted[lex as usize].as_str()
    }

    /// Lex index of a label, if declared.
    pub fn lex_index(&self, label: &str) -> Option<u16> {
        self.sorted
            .binary_search_by(|a| a.as_str().cmp(label))
            .ok()
            .map(|i| i as u16)
    }

    pub fn decl_to_lex(&self, decl: u16) -> u16 {
        self.decl_to_lex[decl as usize]
    }

    /// Labels in declaration order.
    pub fn decl_labels(&self) -> impl Iterator<Item = &str> {
        self.decl.iter().map(|a| a.as_str())
    }

    /// All lex indices.
    pub fn lex_indices(&self) -> impl Iterator<Item = u16> {
        0..self.len() as u16
    }

    pub fn render_set(&self, set: &BTreeSet<u16>) -> String {
        let labels: Vec<&str> = set.iter().map(|&a| self.label(a)).collect();
        format!("{{{}}}", labels.join(","))
    }
}

/// A finite labelled transition system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    num_states: u32,
    initial: u32,
    alphabet: Alphabet,
    /// Deduplicated transitions in declaration order, with declaration-order
    /// action indices; used for rendering.
    transitions: Vec<(u32, u16, u32)>,
    /// Per-state successors `(lex action, target)`, sorted and deduplicated.
    succ: Vec<Vec<(u16, u32)>>,
}

impl Lts {
    /// Builds an LTS from labelled transitions. The alphabet is the set of
    /// labels in order of first occurrence; duplicate transitions are merged.
    pub fn new(
        num_states: u32,
        initial: u32,
        transitions: &[(u32, &str, u32)],
    ) -> Result<Lts, ModelError> {
        if initial >= num_states {
            return Err(ModelError::StateRange {
                index: initial,
                num_states,
            });
        }
        let mut decl: Vec<Action> = Vec::new();
        let mut decl_idx = std::collections::HashMap::new();
        let mut stored: Vec<(u32, u16, u32)> = Vec::new();
        let mut seen = BTreeSet::new();
        for &(src, label, dst) in transitions {
            if src >= num_states {
                return Err(ModelError::StateRange {
                    index: src,
                    num_states,
                });
            }
            if dst >= num_states {
                return Err(ModelError::StateRange {
                    index: dst,
                    num_states,
                });
            }
            let action = Action::new(label)?;
            let idx = *decl_idx.entry(action.clone()).or_insert_with(|| {
                decl.push(action);
                (decl.len() - 1) as u16
            });
            if seen.insert((src, idx, dst)) {
                stored.push((src, idx, dst));
            }
        }
        let alphabet = Alphabet::from_decl(decl);
        let mut succ = vec![Vec::new(); num_states as usize];
        for &(src, decl_a, dst) in &stored {
            succ[src as usize].push((alphabet.decl_to_lex(decl_a), dst));
        }
        for row in &mut succ {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Lts {
            num_states,
            initial,
            alphabet,
            transitions: stored,
            succ,
        })
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Transitions in declaration order as `(src, label, dst)`.
    pub fn transitions(&self) -> impl Iterator<Item = (u32, &str, u32)> {
        self.transitions
            .iter()
            .map(move |&(s, a, d)| (s, self.alphabet.decl[a as usize].as_str(), d))
    }

    /// Outgoing transitions of `x` as `(lex action, target)`.
    pub fn successors(&self, x: u32) -> &[(u16, u32)] {
        &self.succ[x as usize]
    }

    /// The ready set of `x`: actions on outgoing transitions, as lex indices.
    pub fn ready_set(&self, x: u32) -> BTreeSet<u16> {
        self.succ[x as usize].iter().map(|&(a, _)| a).collect()
    }

    pub fn is_deadlock(&self, x: u32) -> bool {
        self.succ[x as usize].is_empty()
    }

    pub fn check_state(&self, x: u32) -> Result<(), ModelError> {
        if x < self.num_states {
            Ok(())
        } else {
            Err(ModelError::StateRange {
                index: x,
                num_states: self.num_states,
            })
        }
    }
}

/// A generative probabilistic transition system: every state carries one
/// distribution over `(action, successor)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gps {
    num_states: u32,
    initial: u32,
    alphabet: Alphabet,
    /// Per-state rows `(probability, lex action, target)`, sorted by
    /// `(action, target)`; entries with equal `(action, target)` are merged at
    /// parse time and each row sums to exactly 1.
    rows: Vec<Vec<(BigRational, u16, u32)>>,
}

impl Gps {
    pub fn new(
        num_states: u32,
        initial: u32,
        transitions: &[(u32, BigRational, &str, u32)],
    ) -> Result<Gps, ModelError> {
        if initial >= num_states {
            return Err(ModelError::StateRange {
                index: initial,
                num_states,
            });
        }
        let mut decl: Vec<Action> = Vec::new();
        let mut decl_seen = std::collections::HashMap::new();
        for &(src, ref prob, label, dst) in transitions {
            if src >= num_states {
                return Err(ModelError::StateRange {
                    index: src,
                    num_states,
                });
            }
            if dst >= num_states {
                return Err(ModelError::StateRange {
                    index: dst,
                    num_states,
                });
            }
            if prob <= &BigRational::zero() || prob > &BigRational::one() {
                return Err(ModelError::ProbRange {
                    state: src,
                    prob: render_rational(prob),
                });
            }
            let action = Action::new(label)?;
            if let std::collections::hash_map::Entry::Vacant(e) = decl_seen.entry(action.clone()) {
                e.insert(decl.len());
                decl.push(action);
            }
        }
        let alphabet = Alphabet::from_decl(decl);
        let mut rows: Vec<std::collections::BTreeMap<(u16, u32), BigRational>> =
            vec![Default::default(); num_states as usize];
        for &(src, ref prob, label, dst) in transitions {
            let lex = alphabet.lex_index(label).expect("label declared");
            *rows[src as usize]
                .entry((lex, dst))
                .or_insert_with(BigRational::zero) += prob.clone();
        }
        let mut out = Vec::with_capacity(num_states as usize);
        for (state, row) in rows.into_iter().enumerate() {
            if row.is_empty() {
                return Err(ModelError::MissingRow {
                    state: state as u32,
                });
            }
            let sum: BigRational = row.values().cloned().sum();
            if !sum.is_one() {
                return Err(ModelError::RowSum {
                    state: state as u32,
                    sum: render_rational(&sum),
                });
            }
            let mut entries: Vec<(BigRational, u16, u32)> = row
                .into_iter()
                .map(|((a, dst), p)| (p, a, dst))
                .collect();
            entries.sort_by_key(|x| (x.1, x.2));
            out.push(entries);
        }
        Ok(Gps {
            num_states,
            initial,
            alphabet,
            rows: out,
        })
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The distribution at `x` as `(probability, lex action, target)`.
    pub fn row(&self, x: u32) -> &[(BigRational, u16, u32)] {
        &self.rows[x as usize]
    }

    pub fn check_state(&self, x: u32) -> Result<(), ModelError> {
        if x < self.num_states {
            Ok(())
        } else {
            Err(ModelError::StateRange {
                index: x,
                num_states: self.num_states,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Lts,
    Gps,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lts => "LTS",
            ModelKind::Gps => "GPS",
        }
    }
}

/// Either kind of transition model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionModel {
    Lts(Lts),
    Gps(Gps),
}

impl TransitionModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TransitionModel::Lts(_) => ModelKind::Lts,
            TransitionModel::Gps(_) => ModelKind::Gps,
        }
    }

    pub fn num_states(&self) -> u32 {
        match self {
            TransitionModel::Lts(l) => l.num_states(),
            TransitionModel::Gps(g) => g.num_states(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            TransitionModel::Lts(l) => l.alphabet(),
            TransitionModel::Gps(g) => g.alphabet(),
        }
    }

    pub fn as_lts(&self) -> Option<&Lts> {
        match self {
            TransitionModel::Lts(l) => Some(l),
            TransitionModel::Gps(_) => None,
        }
    }

    pub fn as_gps(&self) -> Option<&Gps> {
        match self {
            TransitionModel::Lts(_) => None,
            TransitionModel::Gps(g) => Some(g),
        }
    }
}

impl From<Lts> for TransitionModel {
    fn from(l: Lts) -> Self {
        TransitionModel::Lts(l)
    }
}

impl From<Gps> for TransitionModel {
    fn from(g: Gps) -> Self {
        TransitionModel::Gps(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    #[test]
    fn ready_set_of_branching_state() {
        // u1 in the left counterexample system enables both actions.
        let g1 = fixtures::g1();
        let rs = g1.ready_set(1);
        assert_eq!(g1.alphabet().render_set(&rs), "{s,t}");
    }

    #[test]
    fn ready_set_of_deadlock_is_empty() {
        let g1 = fixtures::g1();
        assert!(g1.ready_set(2).is_empty());
        assert!(g1.is_deadlock(2));
    }

    #[test]
    fn ready_set_of_right_root() {
        let g2 = fixtures::g2();
        assert_eq!(g2.alphabet().render_set(&g2.ready_set(0)), "{s}");
    }

    #[test]
    fn ready_set_empty_iff_deadlock() {
        let m = fixtures::g1g2();
        for x in 0..m.num_states() {
            assert_eq!(m.ready_set(x).is_empty(), m.is_deadlock(x));
        }
    }

    #[test]
    fn duplicate_transitions_are_merged() {
        let lts = Lts::new(2, 0, &[(0, "a", 1), (0, "a", 1)]).unwrap();
        assert_eq!(lts.num_transitions(), 1);
    }

    #[test]
    fn gps_rows_merge_duplicate_pairs() {
        // Two entries with the same (action, target) merge by adding mass.
        let gps = Gps::new(
            2,
            0,
            &[
                (0, ratio(1, 2), "a", 1),
                (0, ratio(1, 2), "a", 1),
                (1, ratio(1, 1), "a", 1),
            ],
        )
        .unwrap();
        assert_eq!(gps.row(0).len(), 1);
        assert!(gps.row(0)[0].0.is_one());
    }

    #[test]
    fn gps_distinct_targets_stay_distinct() {
        let gps = Gps::new(
            3,
            0,
            &[
                (0, ratio(1, 2), "a", 1),
                (0, ratio(1, 2), "a", 2),
                (1, ratio(1, 1), "b", 1),
                (2, ratio(1, 1), "c", 2),
            ],
        )
        .unwrap();
        assert_eq!(gps.row(0).len(), 2);
    }

    #[test]
    fn gps_bad_row_sum_is_reported() {
        let err = Gps::new(
            3,
            0,
            &[
                (0, ratio(1, 2), "a", 1),
                (0, ratio(1, 3), "a", 2),
                (1, ratio(1, 1), "b", 1),
                (2, ratio(1, 1), "c", 2),
            ],
        )
        .unwrap_err();
        match err {
            ModelError::RowSum { state, sum } => {
                assert_eq!(state, 0);
                assert_eq!(sum, "5/6");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
