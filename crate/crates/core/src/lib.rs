//! Graded semantics for the linear time - branching time spectrum.
//!
//! The crate computes, for finite labelled transition systems and generative
//! probabilistic systems, the depth-indexed observable behaviour of every
//! state under ten process semantics (bisimilarity, ready simulation,
//! simulation, ready trace, failure trace, readiness, failures, completed
//! trace, trace, probabilistic trace), decides the induced equivalences and
//! preorders, evaluates the matching modal logics, and constructs
//! distinguishing formulae for inequivalent states.
//!
//! Every computation has an independently implemented brute-force counterpart
//! in [`oracles`]; the test suites cross-validate the two against each other.

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod logic;
pub mod model;
pub mod oracles;
pub mod rational;
pub mod semantics;
pub mod separators;
pub mod theory;
pub mod value;

pub use engine::{beta, beta_sequence, equivalent, partition, sim_leq, stabilization_depth};
pub use model::{parse_aut, parse_gps, render_aut, render_gps, Gps, Lts, TransitionModel};
pub use semantics::SemanticsId;
pub use value::SemanticValue;
