//! Folds and unfolds over construction expressions.

use std::fmt::Debug;

use crate::construct::crf::Crf;
use crate::construct::expr::{ConstructionExpr, EdgeLeaf};
use crate::construct::ops::wire_tuple;
use crate::error::{MgError, Result};

/// Handlers for the constructors. A lawful algebra respects the
/// constructor laws on its carrier.
pub trait DtmgAlgebra {
    type Carrier;

    fn empty(&self) -> Result<Self::Carrier>;
    fn edge(&self, leaf: &EdgeLeaf) -> Result<Self::Carrier>;
    fn beside(&self, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier>;
    fn connect(&self, p: &Crf, l: Self::Carrier, r: Self::Carrier) -> Result<Self::Carrier>;

    /// Folds a symmetry wiring. The default treats it as its wire edges
    /// placed side by side.
    fn swap(&self, left: usize, right: usize) -> Result<Self::Carrier> {
        let mut acc = self.empty()?;
        for _ in 0..left + right {
            acc = self.beside(acc, self.edge(&wire_leaf())?)?;
        }
        Ok(acc)
    }
}

pub(crate) fn wire_leaf() -> EdgeLeaf {
    EdgeLeaf::directed("w", wire_tuple(), vec![], vec![1], vec![2])
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| MgError::Fold {
        path: if path.is_empty() { "root".into() } else { path.into() },
        source: Box::new(e),
    })
}

/// Catamorphism: replaces each constructor by its handler.
pub fn cata<A: DtmgAlgebra>(alg: &A, x: &ConstructionExpr) -> Result<A::Carrier> {
    cata_at(alg, x, &mut String::new())
}

fn cata_at<A: DtmgAlgebra>(alg: &A, x: &ConstructionExpr, path: &mut String) -> Result<A::Carrier> {
    match x {
        ConstructionExpr::Empty => at(path, alg.empty()),
        ConstructionExpr::Edge(l) => at(path, alg.edge(l)),
        ConstructionExpr::Swap { left, right } => at(path, alg.swap(*left, *right)),
        ConstructionExpr::Beside(l, r) => {
            let (a, b) = both(alg, l, r, path)?;
            at(path, alg.beside(a, b))
        }
        ConstructionExpr::Connect(p, l, r) => {
            let (a, b) = both(alg, l, r, path)?;
            at(path, alg.connect(p, a, b))
        }
    }
}

fn both<A: DtmgAlgebra>(
    alg: &A,
    l: &ConstructionExpr,
    r: &ConstructionExpr,
    path: &mut String,
) -> Result<(A::Carrier, A::Carrier)> {
    let n = path.len();
    path.push_str(if n == 0 { "L" } else { ".L" });
    let a = cata_at(alg, l, path);
    path.truncate(n);
    let a = a?;
    path.push_str(if n == 0 { "R" } else { ".R" });
    let b = cata_at(alg, r, path);
    path.truncate(n);
    Ok((a, b?))
}

/// One layer of an unfold.
#[derive(Debug, Clone, PartialEq)]
pub enum Layer<S> {
    Empty,
    Edge(EdgeLeaf),
    Swap { left: usize, right: usize },
    Beside(S, S),
    Connect(Crf, S, S),
}

/// Splits seeds into layers. Every split must strictly decrease
/// `measure`, which guarantees termination.
pub trait DtmgCoalgebra {
    type Seed: Debug;

    fn measure(&self, seed: &Self::Seed) -> u64;
    fn classify(&self, seed: &Self::Seed) -> Result<Layer<Self::Seed>>;
}

pub(crate) fn check_decrease<S: Debug>(
    measure: impl Fn(&S) -> u64,
    parent: &S,
    kids: [&S; 2],
) -> Result<()> {
    let m = measure(parent);
    if kids.iter().any(|k| measure(k) >= m) {
        return Err(MgError::Divergence(format!("{parent:?}")));
    }
    Ok(())
}

/// Anamorphism: unfolds a seed into an expression.
pub fn ana<C: DtmgCoalgebra>(coalg: &C, seed: &C::Seed) -> Result<ConstructionExpr> {
    Ok(match coalg.classify(seed)? {
        Layer::Empty => ConstructionExpr::Empty,
        Layer::Edge(l) => ConstructionExpr::Edge(l),
        Layer::Swap { left, right } => ConstructionExpr::Swap { left, right },
        Layer::Beside(a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            ConstructionExpr::beside(ana(coalg, &a)?, ana(coalg, &b)?)
        }
        Layer::Connect(p, a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            ConstructionExpr::connect(p, ana(coalg, &a)?, ana(coalg, &b)?)
        }
    })
}

/// `cata(alg, ana(coalg, seed))` without building the expression.
pub fn hylo<A, C>(alg: &A, coalg: &C, seed: &C::Seed) -> Result<A::Carrier>
where
    A: DtmgAlgebra,
    C: DtmgCoalgebra,
{
    match coalg.classify(seed)? {
        Layer::Empty => alg.empty(),
        Layer::Edge(l) => alg.edge(&l),
        Layer::Swap { left, right } => alg.swap(left, right),
        Layer::Beside(a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            let x = hylo(alg, coalg, &a)?;
            let y = hylo(alg, coalg, &b)?;
            alg.beside(x, y)
        }
        Layer::Connect(p, a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            let x = hylo(alg, coalg, &a)?;
            let y = hylo(alg, coalg, &b)?;
            alg.connect(&p, x, y)
        }
    }
}

/// `ana(coalg, cata(alg, x))`: fold, then unfold into a new shape.
pub fn metamorph<A, C>(coalg: &C, alg: &A, x: &ConstructionExpr) -> Result<ConstructionExpr>
where
    A: DtmgAlgebra,
    C: DtmgCoalgebra<Seed = A::Carrier>,
{
    ana(coalg, &cata(alg, x)?)
}

/// Rebuilds the expression itself; `cata(Rebuild, x) == x`.
pub struct Rebuild;

impl DtmgAlgebra for Rebuild {
    type Carrier = ConstructionExpr;

    fn empty(&self) -> Result<ConstructionExpr> {
        Ok(ConstructionExpr::Empty)
    }
    fn edge(&self, leaf: &EdgeLeaf) -> Result<ConstructionExpr> {
        Ok(ConstructionExpr::Edge(leaf.clone()))
    }
    fn beside(&self, l: ConstructionExpr, r: ConstructionExpr) -> Result<ConstructionExpr> {
        Ok(ConstructionExpr::beside(l, r))
    }
    fn connect(&self, p: &Crf, l: ConstructionExpr, r: ConstructionExpr) -> Result<ConstructionExpr> {
        Ok(ConstructionExpr::connect(p.clone(), l, r))
    }
    fn swap(&self, left: usize, right: usize) -> Result<ConstructionExpr> {
        Ok(ConstructionExpr::Swap { left, right })
    }
}
