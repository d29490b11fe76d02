//! Folds and unfolds for ConDTMG expressions, where connect takes no crf
//! and the routing travels with the left operand.

use std::fmt::Debug;

use crate::construct::con::ConExpr;
use crate::construct::crf::Crf;
use crate::construct::expr::EdgeLeaf;
use crate::error::{MgError, Result};
use crate::morph::algebra::{check_decrease, DtmgAlgebra};

pub trait ConAlgebra {
    type Carrier;

    fn empty(&self) -> Result<Self::Carrier>;
    fn edge(&self, leaf: &EdgeLeaf) -> Result<Self::Carrier>;
    fn swap(&self, left: usize, right: usize) -> Result<Self::Carrier>;
    fn beside(&self, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier>;
    fn route(&self, p: &Crf, x: Self::Carrier) -> Result<Self::Carrier>;
    fn connect(&self, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier>;
}

pub fn con_cata<A: ConAlgebra>(alg: &A, x: &ConExpr) -> Result<A::Carrier> {
    match x {
        ConExpr::Empty => alg.empty(),
        ConExpr::Edge(l) => alg.edge(l),
        ConExpr::Swap { left, right } => alg.swap(*left, *right),
        ConExpr::Beside(l, r) => {
            let a = con_cata(alg, l)?;
            let b = con_cata(alg, r)?;
            alg.beside(a, b)
        }
        ConExpr::Route(p, inner) => {
            let a = con_cata(alg, inner)?;
            alg.route(p, a)
        }
        ConExpr::Connect(l, r) => {
            let a = con_cata(alg, l)?;
            let b = con_cata(alg, r)?;
            alg.connect(a, b)
        }
    }
}

/// Carries a plain algebra over: the pending routing rides alongside the
/// carrier until a connect consumes it.
pub struct Routed<A>(pub A);

impl<A: DtmgAlgebra> ConAlgebra for Routed<A> {
    type Carrier = (Option<Crf>, A::Carrier);

    fn empty(&self) -> Result<Self::Carrier> {
        Ok((None, self.0.empty()?))
    }
    fn edge(&self, leaf: &EdgeLeaf) -> Result<Self::Carrier> {
        Ok((None, self.0.edge(leaf)?))
    }
    fn swap(&self, left: usize, right: usize) -> Result<Self::Carrier> {
        Ok((None, self.0.swap(left, right)?))
    }
    fn beside(&self, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier> {
        if l.0.is_some() || r.0.is_some() {
            return Err(MgError::Route("beside of routed operands has no plain counterpart".into()));
        }
        Ok((None, self.0.beside(l.1, r.1)?))
    }
    fn route(&self, p: &Crf, x: Self::Carrier) -> Result<Self::Carrier> {
        if x.0.is_some() {
            return Err(MgError::Route("value is already routed".into()));
        }
        Ok((Some(p.clone()), x.1))
    }
    fn connect(&self, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier> {
        let p = l.0.ok_or_else(|| MgError::Route("left operand carries no routing".into()))?;
        Ok((r.0, self.0.connect(&p, l.1, r.1)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConLayer<S> {
    Empty,
    Edge(EdgeLeaf),
    Swap { left: usize, right: usize },
    Beside(S, S),
    Route(Crf, S),
    Connect(S, S),
}

pub trait ConCoalgebra {
    type Seed: Debug;

    fn measure(&self, seed: &Self::Seed) -> u64;
    fn classify(&self, seed: &Self::Seed) -> Result<ConLayer<Self::Seed>>;
}

pub fn con_ana<C: ConCoalgebra>(coalg: &C, seed: &C::Seed) -> Result<ConExpr> {
    Ok(match coalg.classify(seed)? {
        ConLayer::Empty => ConExpr::Empty,
        ConLayer::Edge(l) => ConExpr::Edge(l),
        ConLayer::Swap { left, right } => ConExpr::Swap { left, right },
        ConLayer::Beside(a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            ConExpr::Beside(Box::new(con_ana(coalg, &a)?), Box::new(con_ana(coalg, &b)?))
        }
        ConLayer::Route(p, a) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &a])?;
            ConExpr::Route(p, Box::new(con_ana(coalg, &a)?))
        }
        ConLayer::Connect(a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            ConExpr::Connect(Box::new(con_ana(coalg, &a)?), Box::new(con_ana(coalg, &b)?))
        }
    })
}
