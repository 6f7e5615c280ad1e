//! Graded modal logics.
//!
//! Each logic-bearing semantics fixes a vocabulary: truth constants, the
//! propositional operators that are homomorphic for its depth-0 algebra
//! (joins over powerset, all Boolean operators over the identity, affine maps
//! over distributions), and its modalities. Formulae have uniform depth;
//! truth constants occur at top level only in depth-0 positions, while the
//! 0-ary modalities (deadlock, ready/failure-set constants) are flexible and
//! admit every depth above their own.

mod eval;
mod parse;

pub use eval::{eval_state, eval_value};
pub use parse::{parse_formula, render_formula};

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::LogicError;
use crate::model::{Alphabet, SplitMix};
use crate::rational::{ratio, render_rational};
use crate::semantics::SemanticsId;
use crate::value::ASet;

/// A truth value: Boolean for the qualitative logics, a rational in [0,1]
/// for the probabilistic one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Omega {
    Bool(bool),
    Prob(BigRational),
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Bool(true) => f.write_str("true"),
            Omega::Bool(false) => f.write_str("false"),
            Omega::Prob(p) => f.write_str(&render_rational(p)),
        }
    }
}

/// Uniform-depth formula over a model's alphabet (lex action indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// Truth constant of the Boolean logics; depth exactly 0.
    Top,
    /// Rational truth constant of the probabilistic logic; depth exactly 0.
    Const(BigRational),
    /// Finite disjunction; empty list is `false`, the nullary join.
    Disj(Vec<Formula>),
    /// Conjunction; admitted under bisimilarity only.
    Conj(Vec<Formula>),
    /// Negation; admitted under bisimilarity only.
    Neg(Box<Formula>),
    /// Affine combination `sum p_i * f_i + offset`; probabilistic only.
    Affine {
        terms: Vec<(BigRational, Formula)>,
        offset: BigRational,
    },
    Diamond(u16, Box<Formula>),
    /// Decorated diamond of the ready-trace and failure-trace logics.
    DecDiamond(ASet, u16, Box<Formula>),
    /// Deadlock constant; a 0-ary modality of depth at least 1.
    Star,
    /// `the ready set is exactly I`; 0-ary modality of the readiness logic.
    ReadyConst(ASet),
    /// `I is a failure set`; 0-ary modality of the failures logic.
    FailConst(ASet),
}

/// The uniform depth of a formula: either exactly `min` (rigid) or any depth
/// `>= min` (flexible; only constants-free combinations of 0-ary modalities).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthBound {
    pub min: u32,
    pub rigid: bool,
}

impl DepthBound {
    pub fn admits(&self, depth: u32) -> bool {
        if self.rigid {
            depth == self.min
        } else {
            depth >= self.min
        }
    }
}

fn unify_children(
    parent: &Formula,
    alphabet: &Alphabet,
    children: Vec<DepthBound>,
) -> Result<DepthBound, LogicError> {
    let mut rigid: Option<u32> = None;
    let mut min = 0u32;
    for c in &children {
        if c.rigid {
            match rigid {
                None => rigid = Some(c.min),
                Some(n) if n == c.min => {}
                Some(n) => {
                    return Err(LogicError::IllFormed {
                        formula: render_formula(parent, alphabet),
                        msg: format!("arguments of depths {n} and {} mixed", c.min),
                    })
                }
            }
        }
        min = min.max(c.min);
    }
    match rigid {
        Some(n) if n < min => Err(LogicError::IllFormed {
            formula: render_formula(parent, alphabet),
            msg: format!("argument of depth {n} mixed with arguments of depth at least {min}"),
        }),
        Some(n) => Ok(DepthBound {
            min: n,
            rigid: true,
        }),
        None => Ok(DepthBound { min, rigid: false }),
    }
}

/// Computes the uniform depth of a formula, or reports the offending
/// subformula. Truth constants are rigidly depth 0, so a constant occurring
/// at the top level of a deeper formula is rejected here.
pub fn uniform_depth(f: &Formula, alphabet: &Alphabet) -> Result<DepthBound, LogicError> {
    match f {
        Formula::Top | Formula::Const(_) => Ok(DepthBound {
            min: 0,
            rigid: true,
        }),
        Formula::Star | Formula::ReadyConst(_) | Formula::FailConst(_) => Ok(DepthBound {
            min: 1,
            rigid: false,
        }),
        Formula::Diamond(_, inner) | Formula::DecDiamond(_, _, inner) => {
            let d = uniform_depth(inner, alphabet)?;
            Ok(DepthBound {
                min: d.min + 1,
                rigid: d.rigid,
            })
        }
        Formula::Neg(inner) => uniform_depth(inner, alphabet),
        Formula::Disj(args) | Formula::Conj(args) => {
            let children = args
                .iter()
                .map(|a| uniform_depth(a, alphabet))
                .collect::<Result<Vec<_>, _>>()?;
            unify_children(f, alphabet, children)
        }
        Formula::Affine { terms, .. } => {
            let children = terms
                .iter()
                .map(|(_, a)| uniform_depth(a, alphabet))
                .collect::<Result<Vec<_>, _>>()?;
            unify_children(f, alphabet, children)
        }
    }
}

/// The vocabulary of one logic-bearing semantics over a concrete alphabet.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    semantics: SemanticsId,
    alphabet: Alphabet,
    /// Actions with a diamond modality; the full alphabet unless restricted
    /// (restriction exists for the separation mutation tests).
    modal_actions: BTreeSet<u16>,
}

impl Vocabulary {
    pub fn new(semantics: SemanticsId, alphabet: &Alphabet) -> Result<Vocabulary, LogicError> {
        if !semantics.has_vocabulary() {
            return Err(LogicError::NoVocabulary { semantics });
        }
        Ok(Vocabulary {
            semantics,
            alphabet: alphabet.clone(),
            modal_actions: alphabet.lex_indices().collect(),
        })
    }

    /// A vocabulary whose diamonds range only over `actions`.
    pub fn restricted(
        semantics: SemanticsId,
        alphabet: &Alphabet,
        actions: BTreeSet<u16>,
    ) -> Result<Vocabulary, LogicError> {
        let mut v = Vocabulary::new(semantics, alphabet)?;
        v.modal_actions = actions;
        Ok(v)
    }

    pub fn semantics(&self) -> SemanticsId {
        self.semantics
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn modal_actions(&self) -> &BTreeSet<u16> {
        &self.modal_actions
    }

    fn reject(&self, op: &str) -> LogicError {
        LogicError::Vocabulary {
            op: op.to_string(),
            semantics: self.semantics,
        }
    }

    /// Checks that every node of the formula is admitted.
    pub fn check(&self, f: &Formula) -> Result<(), LogicError> {
        let sem = self.semantics;
        match f {
            Formula::Top => {
                if sem == SemanticsId::ProbabilisticTrace {
                    return Err(self.reject("true"));
                }
            }
            Formula::Const(c) => {
                if sem != SemanticsId::ProbabilisticTrace {
                    return Err(self.reject("rational constant"));
                }
                if c < &BigRational::zero() || c > &BigRational::one() {
                    return Err(self.reject("constant outside [0,1]"));
                }
            }
            Formula::Disj(args) => {
                if sem == SemanticsId::ProbabilisticTrace {
                    return Err(self.reject("disjunction"));
                }
                for a in args {
                    self.check(a)?;
                }
            }
            Formula::Conj(args) => {
                if sem != SemanticsId::Bisimilarity {
                    return Err(self.reject("conjunction"));
                }
                for a in args {
                    self.check(a)?;
                }
            }
            Formula::Neg(inner) => {
                if sem != SemanticsId::Bisimilarity {
                    return Err(self.reject("negation"));
                }
                self.check(inner)?;
            }
            Formula::Affine { terms, offset } => {
                if sem != SemanticsId::ProbabilisticTrace {
                    return Err(self.reject("affine combination"));
                }
                let mut total = offset.clone();
                if offset < &BigRational::zero() {
                    return Err(self.reject("negative affine offset"));
                }
                for (p, a) in terms {
                    if p < &BigRational::zero() {
                        return Err(self.reject("negative affine coefficient"));
                    }
                    total += p;
                    self.check(a)?;
                }
                if total > BigRational::one() {
                    return Err(self.reject("affine combination exceeding 1"));
                }
            }
            Formula::Diamond(a, inner) => {
                if matches!(sem, SemanticsId::ReadyTrace | SemanticsId::FailureTrace) {
                    return Err(self.reject("undecorated diamond"));
                }
                if !self.modal_actions.contains(a) {
                    return Err(self.reject(&format!("<{}>", self.alphabet.label(*a))));
                }
                self.check(inner)?;
            }
            Formula::DecDiamond(_, a, inner) => {
                if !matches!(sem, SemanticsId::ReadyTrace | SemanticsId::FailureTrace) {
                    return Err(self.reject("decorated diamond"));
                }
                if !self.modal_actions.contains(a) {
                    return Err(self.reject(&format!("<{}|..>", self.alphabet.label(*a))));
                }
                self.check(inner)?;
            }
            Formula::Star => {
                if !matches!(
                    sem,
                    SemanticsId::CompletedTrace | SemanticsId::ReadyTrace | SemanticsId::FailureTrace
                ) {
                    return Err(self.reject("*"));
                }
            }
            Formula::ReadyConst(_) => {
                if sem != SemanticsId::Readiness {
                    return Err(self.reject("ready{..}"));
                }
            }
            Formula::FailConst(_) => {
                if sem != SemanticsId::Failures {
                    return Err(self.reject("fail{..}"));
                }
            }
        }
        Ok(())
    }
}

/// Seeded generation of well-formed random formulae of the given depth.
pub fn random_formula(vocab: &Vocabulary, depth: u32, rng: &mut SplitMix) -> Formula {
    let sem = vocab.semantics();
    let acts: Vec<u16> = vocab.modal_actions().iter().copied().collect();
    let n_acts = acts.len() as u64;
    let rand_aset = |rng: &mut SplitMix| -> ASet {
        acts.iter()
            .copied()
            .filter(|_| rng.below(2) == 0)
            .collect()
    };
    if depth == 0 {
        return match sem {
            SemanticsId::ProbabilisticTrace => {
                Formula::Const(ratio(rng.below(5) as i64, 4))
            }
            SemanticsId::Bisimilarity => match rng.below(3) {
                0 => Formula::Top,
                1 => Formula::Neg(Box::new(Formula::Top)),
                _ => Formula::Disj(vec![]),
            },
            _ => {
                if rng.below(4) == 0 {
                    Formula::Disj(vec![Formula::Top, Formula::Top])
                } else {
                    Formula::Top
                }
            }
        };
    }
    // 0-ary modalities close a branch early; diamonds recurse.
    let zero_ary = |rng: &mut SplitMix| -> Option<Formula> {
        match sem {
            SemanticsId::CompletedTrace => Some(Formula::Star),
            SemanticsId::Readiness => Some(Formula::ReadyConst(rand_aset(rng))),
            SemanticsId::Failures => Some(Formula::FailConst(rand_aset(rng))),
            SemanticsId::ReadyTrace | SemanticsId::FailureTrace => Some(Formula::Star),
            _ => None,
        }
    };
    let modality = |rng: &mut SplitMix, inner: Formula| -> Formula {
        if n_acts == 0 {
            return inner;
        }
        let a = acts[rng.below(n_acts) as usize];
        match sem {
            SemanticsId::ReadyTrace | SemanticsId::FailureTrace => {
                Formula::DecDiamond(rand_aset(rng), a, Box::new(inner))
            }
            _ => Formula::Diamond(a, Box::new(inner)),
        }
    };
    if n_acts == 0 {
        // no modalities exist; the only depth-flexible formulas are built
        // from nullary operators
        return match sem {
            SemanticsId::ProbabilisticTrace => Formula::Affine {
                terms: Vec::new(),
                offset: ratio(rng.below(5) as i64, 4),
            },
            SemanticsId::Bisimilarity => Formula::Neg(Box::new(Formula::Disj(vec![]))),
            _ => Formula::Disj(vec![]),
        };
    }
    match rng.below(6) {
        0..=2 => {
            if let Some(z) = zero_ary(rng) {
                if rng.below(4) == 0 {
                    return z;
                }
            }
            let inner = random_formula(vocab, depth - 1, rng);
            modality(rng, inner)
        }
        3 => match sem {
            SemanticsId::ProbabilisticTrace => {
                let f1 = random_formula(vocab, depth, rng);
                let f2 = random_formula(vocab, depth, rng);
                Formula::Affine {
                    terms: vec![(ratio(1, 2), f1), (ratio(1, 4), f2)],
                    offset: ratio(1, 8),
                }
            }
            SemanticsId::Bisimilarity => Formula::Conj(vec![
                random_formula(vocab, depth, rng),
                random_formula(vocab, depth, rng),
            ]),
            _ => Formula::Disj(vec![
                random_formula(vocab, depth, rng),
                random_formula(vocab, depth, rng),
            ]),
        },
        4 => match sem {
            SemanticsId::ProbabilisticTrace => Formula::Affine {
                terms: vec![(ratio(3, 4), random_formula(vocab, depth, rng))],
                offset: BigRational::zero(),
            },
            SemanticsId::Bisimilarity => {
                Formula::Neg(Box::new(random_formula(vocab, depth, rng)))
            }
            _ => Formula::Disj(vec![random_formula(vocab, depth, rng)]),
        },
        _ => match sem {
            SemanticsId::ProbabilisticTrace => {
                let inner = random_formula(vocab, depth - 1, rng);
                modality(rng, inner)
            }
            _ => {
                if rng.below(5) == 0 {
                    Formula::Disj(vec![])
                } else {
                    let inner = random_formula(vocab, depth - 1, rng);
                    modality(rng, inner)
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vocab(sem: SemanticsId) -> Vocabulary {
        Vocabulary::new(sem, fixtures::g1g2().alphabet()).unwrap()
    }

    #[test]
    fn uniform_depth_of_constants_and_chains() {
        let v = vocab(SemanticsId::Trace);
        let alphabet = v.alphabet();
        let d = uniform_depth(&Formula::Top, alphabet).unwrap();
        assert_eq!((d.min, d.rigid), (0, true));
        let chain = Formula::Diamond(0, Box::new(Formula::Diamond(1, Box::new(Formula::Top))));
        let d = uniform_depth(&chain, alphabet).unwrap();
        assert_eq!((d.min, d.rigid), (2, true));
    }

    #[test]
    fn ready_const_is_a_depth_one_flexible_modality() {
        let v = vocab(SemanticsId::Readiness);
        let f = Formula::Diamond(
            0,
            Box::new(Formula::ReadyConst([0u16, 1].into_iter().collect())),
        );
        let d = uniform_depth(&f, v.alphabet()).unwrap();
        assert_eq!(d.min, 2);
        assert!(!d.rigid);
        assert!(d.admits(2) && d.admits(5) && !d.admits(1));
    }

    #[test]
    fn mixed_depth_disjunction_is_ill_formed() {
        let v = vocab(SemanticsId::Trace);
        let f = Formula::Disj(vec![
            Formula::Diamond(0, Box::new(Formula::Top)),
            Formula::Diamond(1, Box::new(Formula::Diamond(1, Box::new(Formula::Top)))),
        ]);
        assert!(matches!(
            uniform_depth(&f, v.alphabet()),
            Err(LogicError::IllFormed { .. })
        ));
    }

    #[test]
    fn vocabulary_rejects_foreign_operators() {
        let v = vocab(SemanticsId::Trace);
        let conj = Formula::Conj(vec![Formula::Top, Formula::Top]);
        assert!(matches!(
            v.check(&conj),
            Err(LogicError::Vocabulary { .. })
        ));
        let bisim = vocab(SemanticsId::Bisimilarity);
        assert!(bisim.check(&conj).is_ok());
        assert!(Vocabulary::new(SemanticsId::Simulation, v.alphabet()).is_err());
    }

    #[test]
    fn random_formulas_are_well_formed() {
        let mut rng = SplitMix::new(11);
        for sem in SemanticsId::ALL {
            if !sem.has_vocabulary() {
                continue;
            }
            let v = vocab(sem);
            for depth in 0..4 {
                for _ in 0..50 {
                    let f = random_formula(&v, depth, &mut rng);
                    v.check(&f).unwrap();
                    let d = uniform_depth(&f, v.alphabet()).unwrap();
                    assert!(d.admits(depth), "{f:?} at {depth}");
                }
            }
        }
    }
}
