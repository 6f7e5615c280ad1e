//! GPS document format.
//!
//! A generative probabilistic system is given as a JSON document:
//!
//! ```json
//! {
//!   "states": 3,
//!   "initial": 0,
//!   "transitions": [
//!     { "src": 0, "prob": "1/2", "act": "a", "dst": 1 },
//!     { "src": 0, "prob": "0.5", "act": "a", "dst": 2 }
//!   ]
//! }
//! ```
//!
//! Probabilities are strings, either `p/q` or a decimal literal, converted to
//! exact rationals. Entries sharing `(src, act, dst)` are merged by adding
//! probabilities; every state must carry a row summing to exactly 1.

use num_rational::BigRational;
use serde::Deserialize;

use crate::error::ModelError;
use crate::model::Gps;
use crate::rational::{parse_rational, render_rational};

#[derive(Deserialize)]
struct GpsDoc {
    states: u32,
    initial: u32,
    transitions: Vec<GpsEdge>,
}

#[derive(Deserialize)]
struct GpsEdge {
    src: u32,
    prob: String,
    act: String,
    dst: u32,
}

/// Parses a GPS JSON document into a validated [`Gps`].
pub fn parse_gps(text: &str) -> Result<Gps, ModelError> {
    let doc: GpsDoc = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let mut edges: Vec<(u32, BigRational, String, u32)> = Vec::with_capacity(doc.transitions.len());
    for edge in doc.transitions {
        let prob = parse_rational(&edge.prob).map_err(|msg| ModelError::Parse {
            line: 0,
            msg: format!("bad probability {:?}: {msg}", edge.prob),
        })?;
        edges.push((edge.src, prob, edge.act, edge.dst));
    }
    let borrowed: Vec<(u32, BigRational, &str, u32)> = edges
        .iter()
        .map(|(s, p, a, d)| (*s, p.clone(), a.as_str(), *d))
        .collect();
    Gps::new(doc.states, doc.initial, &borrowed)
}

/// Renders a [`Gps`] as a JSON document with `p/q` probabilities.
pub fn render_gps(gps: &Gps) -> String {
    let mut transitions = Vec::new();
    for x in 0..gps.num_states() {
        for (p, a, dst) in gps.row(x) {
            transitions.push(serde_json::json!({
                "src": x,
                "prob": render_rational(p),
                "act": gps.alphabet().label(*a),
                "dst": dst,
            }));
        }
    }
    let doc = serde_json::json!({
        "states": gps.num_states(),
        "initial": gps.initial(),
        "transitions": transitions,
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_dirac_chain() {
        let text = r#"{
            "states": 3, "initial": 0,
            "transitions": [
                {"src":0,"prob":"1","act":"a","dst":1},
                {"src":1,"prob":"1","act":"b","dst":2},
                {"src":2,"prob":"1","act":"a","dst":2}
            ]
        }"#;
        let gps = parse_gps(text).unwrap();
        assert_eq!(gps.num_states(), 3);
        for x in 0..3 {
            assert_eq!(gps.row(x).len(), 1);
            assert!(gps.row(x)[0].0.is_one());
        }
    }

    #[test]
    fn keeps_split_branches_distinct() {
        let text = r#"{
            "states": 3, "initial": 0,
            "transitions": [
                {"src":0,"prob":"1/2","act":"a","dst":1},
                {"src":0,"prob":"0.5","act":"a","dst":2},
                {"src":1,"prob":"1","act":"b","dst":1},
                {"src":2,"prob":"1","act":"b","dst":2}
            ]
        }"#;
        let gps = parse_gps(text).unwrap();
        assert_eq!(gps.row(0).len(), 2);
    }

    #[test]
    fn reports_bad_row_sum() {
        let text = r#"{
            "states": 3, "initial": 0,
            "transitions": [
                {"src":0,"prob":"1/2","act":"a","dst":1},
                {"src":0,"prob":"1/3","act":"a","dst":2},
                {"src":1,"prob":"1","act":"b","dst":1},
                {"src":2,"prob":"1","act":"b","dst":2}
            ]
        }"#;
        match parse_gps(text).unwrap_err() {
            ModelError::RowSum { state, sum } => {
                assert_eq!(state, 0);
                assert_eq!(sum, "5/6");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let gps = crate::fixtures::p1();
        let reparsed = parse_gps(&render_gps(&gps)).unwrap();
        assert_eq!(gps, reparsed);
    }
}
