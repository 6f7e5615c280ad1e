//! Interned computation of the recursive semantics.
//!
//! Simulation, ready-simulation and bisimilarity values share deep structure
//! across states and depths. This engine assigns each distinct depth-d value a
//! node id; equal values get equal ids by construction, so equality is id
//! comparison and order tests stay polynomial even at stabilization depths.

use std::collections::HashMap;
use std::sync::Arc;

use crate::model::Lts;
use crate::semantics::SemanticsId;
use crate::value::{bisim_node, rs_node, sim_node, ASet, BisimVal, RsVal, SemanticValue, SimVal};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tag {
    Act(u16),
    Dec(ASet, u16),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    entries: Vec<(Tag, u32)>,
    star: bool,
}

struct Level {
    nodes: Vec<Node>,
    state_val: Vec<u32>,
    /// `leq[i][j]`: node i below node j in the simulation order.
    leq: Vec<Vec<bool>>,
}

pub(crate) struct RecEngine<'a> {
    lts: &'a Lts,
    sem: SemanticsId,
    levels: Vec<Level>,
}

impl<'a> RecEngine<'a> {
    pub fn new(lts: &'a Lts, sem: SemanticsId) -> RecEngine<'a> {
        debug_assert!(sem.is_coinductive());
        let top = Node {
            entries: Vec::new(),
            star: false,
        };
        let level0 = Level {
            nodes: vec![top],
            state_val: vec![0; lts.num_states() as usize],
            leq: vec![vec![true]],
        };
        RecEngine {
            lts,
            sem,
            levels: vec![level0],
        }
    }

    pub fn ensure_depth(&mut self, depth: u32) {
        while (self.levels.len() as u32) <= depth {
            self.extend();
        }
    }

    fn extend(&mut self) {
        let prev = self.levels.last().expect("level 0 exists");
        let ordered = self.sem != SemanticsId::Bisimilarity;
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<Node, u32> = HashMap::new();
        let mut state_val = Vec::with_capacity(self.lts.num_states() as usize);
        for x in 0..self.lts.num_states() {
            let succ = self.lts.successors(x);
            let ready = self.lts.ready_set(x);
            let mut entries: Vec<(Tag, u32)> = succ
                .iter()
                .map(|&(a, y)| {
                    let tag = match self.sem {
                        SemanticsId::ReadySimulation => Tag::Dec(ready.clone(), a),
                        _ => Tag::Act(a),
                    };
                    (tag, prev.state_val[y as usize])
                })
                .collect();
            entries.sort();
            entries.dedup();
            if ordered {
                let keep: Vec<bool> = entries
                    .iter()
                    .enumerate()
                    .map(|(i, (t, c))| {
                        !entries.iter().enumerate().any(|(j, (t2, c2))| {
                            i != j
                                && t == t2
                                && prev.leq[*c as usize][*c2 as usize]
                                && !prev.leq[*c2 as usize][*c as usize]
                        })
                    })
                    .collect();
                entries = entries
                    .into_iter()
                    .zip(keep)
                    .filter_map(|(e, k)| k.then_some(e))
                    .collect();
            }
            let star = self.sem == SemanticsId::ReadySimulation && succ.is_empty();
            let node = Node { entries, star };
            let id = *index.entry(node.clone()).or_insert_with(|| {
                nodes.push(node);
                (nodes.len() - 1) as u32
            });
            state_val.push(id);
        }
        let leq = if ordered {
            let n = nodes.len();
            let mut m = vec![vec![false; n]; n];
            for (i, ni) in nodes.iter().enumerate() {
                for (j, nj) in nodes.iter().enumerate() {
                    m[i][j] = (!ni.star || nj.star)
                        && ni.entries.iter().all(|(t, c)| {
                            nj.entries.iter().any(|(t2, c2)| {
                                t == t2 && prev.leq[*c as usize][*c2 as usize]
                            })
                        });
                }
            }
            m
        } else {
            Vec::new()
        };
        let _ = index;
        self.levels.push(Level {
            nodes,
            state_val,
            leq,
        });
    }

    /// The `x below y` relation on states at the given depth.
    pub fn state_leq(&mut self, depth: u32, x: u32, y: u32) -> bool {
        self.ensure_depth(depth);
        let level = &self.levels[depth as usize];
        level.leq[level.state_val[x as usize] as usize][level.state_val[y as usize] as usize]
    }

    /// Exports the per-state values at `depth` as shared public values.
    pub fn export(&mut self, depth: u32) -> Vec<SemanticValue> {
        self.ensure_depth(depth);
        match self.sem {
            SemanticsId::Simulation => {
                let mut cache: Vec<Vec<Arc<SimVal>>> = vec![vec![Arc::new(SimVal::Top)]];
                for d in 1..=depth as usize {
                    let level = &self.levels[d];
                    let row: Vec<Arc<SimVal>> = level
                        .nodes
                        .iter()
                        .map(|node| {
                            Arc::new(sim_node(
                                node.entries
                                    .iter()
                                    .map(|(t, c)| match t {
                                        Tag::Act(a) => (*a, cache[d - 1][*c as usize].clone()),
                                        Tag::Dec(..) => unreachable!(),
                                    })
                                    .collect(),
                            ))
                        })
                        .collect();
                    cache.push(row);
                }
                self.levels[depth as usize]
                    .state_val
                    .iter()
                    .map(|&id| SemanticValue::Simulation {
                        depth,
                        root: cache[depth as usize][id as usize].clone(),
                    })
                    .collect()
            }
            SemanticsId::ReadySimulation => {
                let mut cache: Vec<Vec<Arc<RsVal>>> = vec![vec![Arc::new(RsVal::Top)]];
                for d in 1..=depth as usize {
                    let level = &self.levels[d];
                    let row: Vec<Arc<RsVal>> = level
                        .nodes
                        .iter()
                        .map(|node| {
                            Arc::new(rs_node(
                                node.entries
                                    .iter()
                                    .map(|(t, c)| match t {
                                        Tag::Dec(set, a) => {
                                            (set.clone(), *a, cache[d - 1][*c as usize].clone())
                                        }
                                        Tag::Act(_) => unreachable!(),
                                    })
                                    .collect(),
                                node.star,
                            ))
                        })
                        .collect();
                    cache.push(row);
                }
                self.levels[depth as usize]
                    .state_val
                    .iter()
                    .map(|&id| SemanticValue::ReadySimulation {
                        depth,
                        root: cache[depth as usize][id as usize].clone(),
                    })
                    .collect()
            }
            SemanticsId::Bisimilarity => {
                let mut cache: Vec<Vec<Arc<BisimVal>>> = vec![vec![Arc::new(BisimVal::Top)]];
                for d in 1..=depth as usize {
                    let level = &self.levels[d];
                    let row: Vec<Arc<BisimVal>> = level
                        .nodes
                        .iter()
                        .map(|node| {
                            Arc::new(bisim_node(
                                node.entries
                                    .iter()
                                    .map(|(t, c)| match t {
                                        Tag::Act(a) => (*a, cache[d - 1][*c as usize].clone()),
                                        Tag::Dec(..) => unreachable!(),
                                    })
                                    .collect(),
                            ))
                        })
                        .collect();
                    cache.push(row);
                }
                self.levels[depth as usize]
                    .state_val
                    .iter()
                    .map(|&id| SemanticValue::Bisimilarity {
                        depth,
                        root: cache[depth as usize][id as usize].clone(),
                    })
                    .collect()
            }
            _ => unreachable!(),
        }
    }

    /// Canonical partition signature at a depth: states to block indices,
    /// blocks numbered by first occurrence.
    fn partition_signature(&mut self, depth: u32) -> Vec<u32> {
        self.ensure_depth(depth);
        let level = &self.levels[depth as usize];
        let mut renumber: HashMap<u32, u32> = HashMap::new();
        level
            .state_val
            .iter()
            .map(|&id| {
                let next = renumber.len() as u32;
                *renumber.entry(id).or_insert(next)
            })
            .collect()
    }

    /// Least depth at which the equivalence (bisimilarity) or the
    /// simulates-relation matrix (simulation semantics) repeats.
    pub fn stabilization_depth(&mut self) -> u32 {
        let n = self.lts.num_states() as u64;
        let bound = match self.sem {
            SemanticsId::Bisimilarity => n + 1,
            _ => n * n + 1,
        };
        match self.sem {
            SemanticsId::Bisimilarity => {
                let mut prev = self.partition_signature(0);
                for d in 0..=bound as u32 {
                    let next = self.partition_signature(d + 1);
                    if next == prev {
                        return d;
                    }
                    prev = next;
                }
            }
            _ => {
                let mut prev = self.relation_matrix(0);
                for d in 0..=bound as u32 {
                    let next = self.relation_matrix(d + 1);
                    if next == prev {
                        return d;
                    }
                    prev = next;
                }
            }
        }
        unreachable!("refinement chain did not stabilize within its bound")
    }

    pub fn relation_matrix(&mut self, depth: u32) -> Vec<Vec<bool>> {
        let n = self.lts.num_states();
        (0..n)
            .map(|x| (0..n).map(|y| self.state_leq(depth, x, y)).collect())
            .collect()
    }

    /// Equality of two states' values at one depth.
    pub fn states_equal(&mut self, depth: u32, x: u32, y: u32) -> bool {
        self.ensure_depth(depth);
        let level = &self.levels[depth as usize];
        level.state_val[x as usize] == level.state_val[y as usize]
    }

    #[cfg(test)]
    pub fn node_count(&self, depth: u32) -> usize {
        self.levels[depth as usize].nodes.len()
    }
}
