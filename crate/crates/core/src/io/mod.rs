//! Text formats: MGF documents and Graphviz export.

pub mod dot;
pub mod mgf;

pub use dot::{dtmg_to_dot, history_to_dot, tmg_to_dot};
pub use mgf::{parse, parse_edge_set, serialize, MgfDocument};
