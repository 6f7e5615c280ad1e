//! Canonical small systems used throughout the test suites.
//!
//! `g1`/`g2` are the pair of systems whose roots are trace equivalent but
//! distinguished by every finer semantics: the left system branches after one
//! step, the right one branches immediately. `g1g2` is their disjoint union
//! with the left root at index 0 and the right root at index 4. `p1` is a
//! three-state probabilistic system whose root splits mass over two actions.

use crate::model::{parse_aut, parse_gps, Gps, Lts};

pub const G1_AUT: &str = "des (0,3,4)\n(0,\"s\",1)\n(1,\"s\",2)\n(1,\"t\",3)\n";

pub const G2_AUT: &str = "des (0,4,5)\n(0,\"s\",1)\n(0,\"s\",2)\n(1,\"s\",3)\n(2,\"t\",4)\n";

/// Disjoint union of `g1` and `g2`: states 0..4 are u0..u3, states 4..9 are
/// v0..v4.
pub const G1G2_AUT: &str = "des (0,7,9)\n(0,\"s\",1)\n(1,\"s\",2)\n(1,\"t\",3)\n(4,\"s\",5)\n(4,\"s\",6)\n(5,\"s\",7)\n(6,\"t\",8)\n";

pub const P1_GPS: &str = r#"{
  "states": 3,
  "initial": 0,
  "transitions": [
    { "src": 0, "prob": "1/2", "act": "a", "dst": 1 },
    { "src": 0, "prob": "1/2", "act": "a", "dst": 2 },
    { "src": 1, "prob": "1", "act": "b", "dst": 1 },
    { "src": 2, "prob": "1", "act": "c", "dst": 2 }
  ]
}"#;

pub fn g1() -> Lts {
    parse_aut(G1_AUT).expect("fixture parses")
}

pub fn g2() -> Lts {
    parse_aut(G2_AUT).expect("fixture parses")
}

pub fn g1g2() -> Lts {
    parse_aut(G1G2_AUT).expect("fixture parses")
}

/// Index of the left root in [`g1g2`].
pub const U0: u32 = 0;
/// Index of the right root in [`g1g2`].
pub const V0: u32 = 4;

pub fn p1() -> Gps {
    parse_gps(P1_GPS).expect("fixture parses")
}
