//! Constructors, routing functions, construction expressions and the law
//! suite.

pub mod con;
pub mod crf;
pub mod expr;
pub mod gen;
pub mod laws;
pub mod ops;
pub mod undirected;

pub use crf::{crf_beside, crf_count, crf_from_swaps, enumerate_crfs, swap_edge, Crf, Side, SwapStep};
pub use ops::{beside, connect, directed_edge, edge_c, empty, identity_dtmg, identity_wires, swap_wiring, times};
pub use expr::{decompose, decompose_with, eval, eval_with_ids, ConstructionExpr, EdgeLeaf, Strategy};
pub use con::{con_beside, con_connect, con_eval, from_con, to_con, ConDtmg, ConExpr, ConValue};
pub use undirected::{connect_q, FreshEdge, QSide, Qcrf};
pub use laws::{laws_check, LawReport, LawResult, LAWS};
