//! Identifiers for the ten graded semantics and their basic classification.

use std::fmt;
use std::str::FromStr;

use crate::error::EngineError;
use crate::model::{ModelKind, TransitionModel};

/// One of the ten process semantics handled by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemanticsId {
    Bisimilarity,
    Trace,
    CompletedTrace,
    Readiness,
    Failures,
    ReadyTrace,
    FailureTrace,
    Simulation,
    ReadySimulation,
    ProbabilisticTrace,
}

impl SemanticsId {
    /// All ten semantics, coarsest last.
    pub const ALL: [SemanticsId; 10] = [
        SemanticsId::Bisimilarity,
        SemanticsId::ReadySimulation,
        SemanticsId::Simulation,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::CompletedTrace,
        SemanticsId::Trace,
        SemanticsId::ProbabilisticTrace,
    ];

    /// The nine semantics interpreted over labelled transition systems.
    pub const LTS: [SemanticsId; 9] = [
        SemanticsId::Bisimilarity,
        SemanticsId::ReadySimulation,
        SemanticsId::Simulation,
        SemanticsId::ReadyTrace,
        SemanticsId::FailureTrace,
        SemanticsId::Readiness,
        SemanticsId::Failures,
        SemanticsId::CompletedTrace,
        SemanticsId::Trace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemanticsId::Bisimilarity => "bisimilarity",
            SemanticsId::Trace => "trace",
            SemanticsId::CompletedTrace => "completed-trace",
            SemanticsId::Readiness => "readiness",
            SemanticsId::Failures => "failures",
            SemanticsId::ReadyTrace => "ready-trace",
            SemanticsId::FailureTrace => "failure-trace",
            SemanticsId::Simulation => "simulation",
            SemanticsId::ReadySimulation => "ready-simulation",
            SemanticsId::ProbabilisticTrace => "probabilistic-trace",
        }
    }

    /// Whether this semantics applies to the given kind of model.
    pub fn applies_to(self, kind: ModelKind) -> bool {
        match self {
            SemanticsId::ProbabilisticTrace => kind == ModelKind::Gps,
            _ => kind == ModelKind::Lts,
        }
    }

    pub fn check_model(self, model: &TransitionModel) -> Result<(), EngineError> {
        if self.applies_to(model.kind()) {
            Ok(())
        } else {
            Err(EngineError::KindMismatch {
                semantics: self,
                kind: model.kind().name(),
            })
        }
    }

    /// The seven word-based semantics whose depth partitions are not nested.
    pub fn is_trace_like(self) -> bool {
        matches!(
            self,
            SemanticsId::Trace
                | SemanticsId::CompletedTrace
                | SemanticsId::Readiness
                | SemanticsId::Failures
                | SemanticsId::ReadyTrace
                | SemanticsId::FailureTrace
                | SemanticsId::ProbabilisticTrace
        )
    }

    /// Bisimilarity and the two simulation semantics stabilize on finite models.
    pub fn is_coinductive(self) -> bool {
        matches!(
            self,
            SemanticsId::Bisimilarity | SemanticsId::Simulation | SemanticsId::ReadySimulation
        )
    }

    /// The simulation semantics carry no characteristic logic.
    pub fn has_vocabulary(self) -> bool {
        !matches!(self, SemanticsId::Simulation | SemanticsId::ReadySimulation)
    }
}

impl fmt::Display for SemanticsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemanticsId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bisimilarity" | "bisim" => Ok(SemanticsId::Bisimilarity),
            "trace" => Ok(SemanticsId::Trace),
            "completed-trace" => Ok(SemanticsId::CompletedTrace),
            "readiness" => Ok(SemanticsId::Readiness),
            "failures" => Ok(SemanticsId::Failures),
            "ready-trace" => Ok(SemanticsId::ReadyTrace),
            "failure-trace" => Ok(SemanticsId::FailureTrace),
            "simulation" => Ok(SemanticsId::Simulation),
            "ready-simulation" => Ok(SemanticsId::ReadySimulation),
            "probabilistic-trace" => Ok(SemanticsId::ProbabilisticTrace),
            other => Err(format!("unknown semantics {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for sem in SemanticsId::ALL {
            assert_eq!(sem.name().parse::<SemanticsId>().unwrap(), sem);
        }
    }

    #[test]
    fn classification() {
        assert!(SemanticsId::Trace.is_trace_like());
        assert!(!SemanticsId::Simulation.is_trace_like());
        assert!(SemanticsId::Simulation.is_coinductive());
        assert!(!SemanticsId::Simulation.has_vocabulary());
        assert!(!SemanticsId::ReadySimulation.has_vocabulary());
        assert!(SemanticsId::ProbabilisticTrace.has_vocabulary());
    }
}
