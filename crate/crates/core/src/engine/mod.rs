//! The graded engine: per-state trace sequences, equivalences, preorders and
//! monad-law checking.
//!
//! The depth-n behaviour of a state is computed by a per-state recursion: the
//! depth-0 value is the unit, and the depth-(n+1) value substitutes the
//! depth-n values of the poststates into the state's one-step observation.
//! This avoids materializing whole monad layers; agreement with the direct
//! definitions is guarded by the oracle suite.

mod laws;
mod rec;
mod step;

pub use laws::{check_monad_laws, check_monad_laws_mutated, LawReport, LawResult, Mutation};
pub use step::{alpha_layer_gps, alpha_layer_lts, substitute, unit_value, Layer};

use crate::error::EngineError;
use crate::model::TransitionModel;
use crate::semantics::SemanticsId;
use crate::value::{value_sim_leq, SemanticValue};

fn check_state(model: &TransitionModel, x: u32) -> Result<(), EngineError> {
    if x < model.num_states() {
        Ok(())
    } else {
        Err(EngineError::StateRange {
            index: x,
            num_states: model.num_states(),
        })
    }
}

/// The trace sequence of every state, for all depths `0..=depth`:
/// `result[k][x]` is the depth-k value of state `x`.
pub fn beta_sequence(
    model: &TransitionModel,
    sem: SemanticsId,
    depth: u32,
) -> Result<Vec<Vec<SemanticValue>>, EngineError> {
    sem.check_model(model)?;
    if sem.is_coinductive() {
        let lts = model.as_lts().expect("kind checked");
        let mut eng = rec::RecEngine::new(lts, sem);
        return Ok((0..=depth).map(|d| eng.export(d)).collect());
    }
    let n = model.num_states() as usize;
    let layers: Vec<Layer> = (0..model.num_states())
        .map(|x| match model {
            TransitionModel::Lts(lts) => alpha_layer_lts(lts, sem, x),
            TransitionModel::Gps(gps) => alpha_layer_gps(gps, x),
        })
        .collect();
    let mut rows = Vec::with_capacity(depth as usize + 1);
    rows.push(vec![unit_value(sem); n]);
    for d in 0..depth {
        let prev = rows.last().expect("row exists");
        let next: Result<Vec<SemanticValue>, EngineError> = layers
            .iter()
            .map(|layer| substitute(layer, prev, d))
            .collect();
        rows.push(next?);
    }
    Ok(rows)
}

/// The depth-`depth` value of every state.
pub fn beta(
    model: &TransitionModel,
    sem: SemanticsId,
    depth: u32,
) -> Result<Vec<SemanticValue>, EngineError> {
    Ok(beta_sequence(model, sem, depth)?
        .pop()
        .expect("at least depth 0"))
}

/// Graded equivalence truncated at `depth`: true iff the values of `x` and
/// `y` agree at every depth `k <= depth`.
///
/// All depths are checked because the trace-like depth partitions are not
/// nested: a deadlock reached at depth n makes deeper value sets
/// uninformative about depth n.
pub fn equivalent(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    y: u32,
    depth: u32,
) -> Result<bool, EngineError> {
    sem.check_model(model)?;
    check_state(model, x)?;
    check_state(model, y)?;
    if x == y {
        return Ok(true);
    }
    if sem.is_coinductive() {
        let lts = model.as_lts().expect("kind checked");
        let mut eng = rec::RecEngine::new(lts, sem);
        return Ok((0..=depth).all(|d| eng.states_equal(d, x, y)));
    }
    let rows = beta_sequence(model, sem, depth)?;
    Ok(rows
        .iter()
        .all(|row| row[x as usize] == row[y as usize]))
}

/// Depth-indexed equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub semantics: SemanticsId,
    pub depth: u32,
    /// Disjoint covering blocks, ordered by least member; members ascending.
    pub blocks: Vec<Vec<u32>>,
}

impl Partition {
    pub fn block_of(&self, x: u32) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&x).is_ok())
            .expect("blocks cover all states")
    }

    pub fn same_block(&self, x: u32, y: u32) -> bool {
        self.block_of(x) == self.block_of(y)
    }
}

pub(crate) fn partition_from_keys<K: PartialEq>(
    sem: SemanticsId,
    depth: u32,
    keys: &[K],
) -> Partition {
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    for x in 0..keys.len() {
        let mut placed = false;
        for block in &mut blocks {
            if keys[block[0] as usize] == keys[x] {
                block.push(x as u32);
                placed = true;
                break;
            }
        }
        if !placed {
            blocks.push(vec![x as u32]);
        }
    }
    Partition {
        semantics: sem,
        depth,
        blocks,
    }
}

/// The kernel of the trace sequence truncated at `depth`.
pub fn partition(
    model: &TransitionModel,
    sem: SemanticsId,
    depth: u32,
) -> Result<Partition, EngineError> {
    sem.check_model(model)?;
    let rows = beta_sequence(model, sem, depth)?;
    let keys: Vec<Vec<&SemanticValue>> = (0..model.num_states() as usize)
        .map(|x| rows.iter().map(|row| &row[x]).collect())
        .collect();
    Ok(partition_from_keys(sem, depth, &keys))
}

/// Least depth at which the refinement chain of a coinductive semantics
/// repeats: partitions for bisimilarity, the simulates-relation matrix for
/// the simulation semantics. Errors for the trace-like semantics, whose full
/// equivalences are decided by the automata oracles instead.
pub fn stabilization_depth(
    model: &TransitionModel,
    sem: SemanticsId,
) -> Result<u32, EngineError> {
    sem.check_model(model)?;
    if !sem.is_coinductive() {
        return Err(EngineError::UnsupportedSemantics { semantics: sem });
    }
    let lts = model.as_lts().expect("kind checked");
    Ok(rec::RecEngine::new(lts, sem).stabilization_depth())
}

/// The `x below y` relation of the simulation semantics at one depth, for all
/// state pairs.
pub fn simulates_matrix(
    model: &TransitionModel,
    sem: SemanticsId,
    depth: u32,
) -> Result<Vec<Vec<bool>>, EngineError> {
    sem.check_model(model)?;
    match sem {
        SemanticsId::Simulation | SemanticsId::ReadySimulation => {
            let lts = model.as_lts().expect("kind checked");
            Ok(rec::RecEngine::new(lts, sem).relation_matrix(depth))
        }
        _ => Err(EngineError::UnsupportedSemantics { semantics: sem }),
    }
}

/// Downset inclusion on simulation or ready-simulation values of equal depth.
pub fn sim_leq(v: &SemanticValue, w: &SemanticValue) -> Result<bool, EngineError> {
    value_sim_leq(v, w)
}
