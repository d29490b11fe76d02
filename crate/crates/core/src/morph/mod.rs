//! Recursion schemes over construction expressions.

pub mod algebra;
pub mod builtin;
pub mod con;
pub mod forest;
pub mod history;

pub use algebra::{ana, cata, hylo, metamorph, DtmgAlgebra, DtmgCoalgebra, Layer, Rebuild};
pub use builtin::{num_targets, shortest_path_length, shortest_path_list, NumTargets, PathTable, ShortestPaths};
pub use con::{con_ana, con_cata, ConAlgebra, ConCoalgebra, ConLayer, Routed};
pub use forest::{ftmg_fold, weighted_fold, Ftmg, ListAlgebra, NumericCarrier, SumList};
pub use history::{
    chrono, futu, futu_from, hist_beside, hist_connect, histo, metachrono, nested, FutuCoalgebra, FutuContext,
    HistoAlgebra, HistoryForest, HistoryNode, Link, Oblivious, ObliviousCo,
};
