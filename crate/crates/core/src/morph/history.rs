//! History forests and the history-carrying morphisms: histo, futu, chrono,
//! metachrono and the nested fold/unfold pattern.

use std::sync::Arc;

use crate::construct::crf::Crf;
use crate::construct::expr::{eval, ConstructionExpr, EdgeLeaf};
use crate::construct::ops;
use crate::dtmg::Dtmg;
use crate::error::{MgError, Result};
use crate::iso::isomorphic;
use crate::morph::algebra::{check_decrease, DtmgAlgebra, DtmgCoalgebra, Layer};
use crate::types::TypeRegistry;

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub crf: Crf,
    pub left: HistoryForest,
    pub right: HistoryForest,
}

/// A node labelled with a DTMG; an internal node records that its label
/// was built by connecting the labels of its two child forests.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryNode {
    pub label: Arc<Dtmg>,
    pub link: Option<Box<Link>>,
}

/// An ordered forest of history trees.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryForest {
    registry: Arc<TypeRegistry>,
    pub trees: Vec<HistoryNode>,
}

impl HistoryForest {
    pub fn new(registry: Arc<TypeRegistry>) -> Self {
        HistoryForest { registry, trees: vec![] }
    }

    pub fn leaf(label: Dtmg) -> Self {
        HistoryForest {
            registry: label.registry().clone(),
            trees: vec![HistoryNode {
                label: Arc::new(label),
                link: None,
            }],
        }
    }

    pub fn registry(&self) -> &Arc<TypeRegistry> {
        &self.registry
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Roots placed side by side.
    pub fn label(&self) -> Result<Dtmg> {
        let mut acc = Dtmg::empty(self.registry.clone());
        for (i, t) in self.trees.iter().enumerate() {
            acc = if i == 0 { (*t.label).clone() } else { ops::beside(&acc, &t.label)? };
        }
        Ok(acc)
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(HistoryNode::node_count).sum()
    }

    /// Longest root-to-leaf chain of links.
    pub fn depth(&self) -> usize {
        self.trees.iter().map(HistoryNode::depth).max().unwrap_or(0)
    }

    /// Checks `label ≅ connect(left, crf, right)` at every internal node.
    /// Returns the number of internal nodes checked.
    pub fn check_links(&self) -> Result<usize> {
        let mut n = 0;
        for t in &self.trees {
            n += t.check_links()?;
        }
        Ok(n)
    }
}

impl HistoryNode {
    pub fn node_count(&self) -> usize {
        1 + self
            .link
            .as_ref()
            .map_or(0, |l| l.left.node_count() + l.right.node_count())
    }

    pub fn depth(&self) -> usize {
        self.link
            .as_ref()
            .map_or(0, |l| 1 + l.left.depth().max(l.right.depth()))
    }

    fn check_links(&self) -> Result<usize> {
        let Some(link) = &self.link else { return Ok(0) };
        let rebuilt = ops::connect(&link.left.label()?, &link.crf, &link.right.label()?)?;
        if !isomorphic(&rebuilt, &self.label) {
            return Err(MgError::State(format!(
                "history link {} does not reproduce its parent",
                link.crf
            )));
        }
        Ok(1 + link.left.check_links()? + link.right.check_links()?)
    }
}

pub fn hist_beside(h1: &HistoryForest, h2: &HistoryForest) -> HistoryForest {
    let mut out = h1.clone();
    out.trees.extend(h2.trees.iter().cloned());
    out
}

/// A single new tree whose root is labelled by connecting the two forests'
/// labels.
pub fn hist_connect(h1: &HistoryForest, p: &Crf, h2: &HistoryForest) -> Result<HistoryForest> {
    if h1.is_empty() || h2.is_empty() {
        return Err(MgError::Arity("history connect needs two nonempty forests".into()));
    }
    let label = ops::connect(&h1.label()?, p, &h2.label()?)?;
    Ok(HistoryForest {
        registry: h1.registry.clone(),
        trees: vec![HistoryNode {
            label: Arc::new(label),
            link: Some(Box::new(Link {
                crf: p.clone(),
                left: h1.clone(),
                right: h2.clone(),
            })),
        }],
    })
}

/// An algebra whose combining steps see the full history of both operands.
pub trait HistoAlgebra {
    type Carrier;

    fn empty(&self) -> Result<Self::Carrier>;
    fn edge(&self, leaf: &EdgeLeaf) -> Result<Self::Carrier>;
    fn swap(&self, left: usize, right: usize) -> Result<Self::Carrier>;
    fn beside(
        &self,
        l: (Self::Carrier, &HistoryForest),
        r: (Self::Carrier, &HistoryForest),
    ) -> Result<Self::Carrier>;
    fn connect(
        &self,
        p: &Crf,
        l: (Self::Carrier, &HistoryForest),
        r: (Self::Carrier, &HistoryForest),
    ) -> Result<Self::Carrier>;
}

/// Lifts a plain algebra by ignoring history.
pub struct Oblivious<A>(pub A);

impl<A: DtmgAlgebra> HistoAlgebra for Oblivious<A> {
    type Carrier = A::Carrier;

    fn empty(&self) -> Result<A::Carrier> {
        self.0.empty()
    }
    fn edge(&self, leaf: &EdgeLeaf) -> Result<A::Carrier> {
        self.0.edge(leaf)
    }
    fn swap(&self, left: usize, right: usize) -> Result<A::Carrier> {
        self.0.swap(left, right)
    }
    fn beside(&self, l: (A::Carrier, &HistoryForest), r: (A::Carrier, &HistoryForest)) -> Result<A::Carrier> {
        self.0.beside(l.0, r.0)
    }
    fn connect(
        &self,
        p: &Crf,
        l: (A::Carrier, &HistoryForest),
        r: (A::Carrier, &HistoryForest),
    ) -> Result<A::Carrier> {
        self.0.connect(p, l.0, r.0)
    }
}

fn leaf_history(reg: &Arc<TypeRegistry>, x: &ConstructionExpr) -> Result<HistoryForest> {
    Ok(HistoryForest::leaf(eval(reg, x)?))
}

/// Histomorphism: a fold that also returns the history forest of `x`.
pub fn histo<A: HistoAlgebra>(
    alg: &A,
    registry: &Arc<TypeRegistry>,
    x: &ConstructionExpr,
) -> Result<(A::Carrier, HistoryForest)> {
    match x {
        ConstructionExpr::Empty => Ok((alg.empty()?, leaf_history(registry, x)?)),
        ConstructionExpr::Edge(l) => Ok((alg.edge(l)?, leaf_history(registry, x)?)),
        ConstructionExpr::Swap { left, right } => Ok((alg.swap(*left, *right)?, leaf_history(registry, x)?)),
        ConstructionExpr::Beside(l, r) => {
            let (a, ha) = histo(alg, registry, l)?;
            let (b, hb) = histo(alg, registry, r)?;
            let c = alg.beside((a, &ha), (b, &hb))?;
            Ok((c, hist_beside(&ha, &hb)))
        }
        ConstructionExpr::Connect(p, l, r) => {
            let (a, ha) = histo(alg, registry, l)?;
            let (b, hb) = histo(alg, registry, r)?;
            let c = alg.connect(p, (a, &ha), (b, &hb))?;
            Ok((c, hist_connect(&ha, p, &hb)?))
        }
    }
}

/// What a futumorphism's coalgebra may consult at each step.
pub struct FutuContext<'a> {
    /// Nesting depth of the seed being classified.
    pub depth: usize,
    /// Histories of every subexpression completed so far, oldest first,
    /// after any initial history supplied by the caller.
    pub prior: &'a HistoryForest,
}

pub trait FutuCoalgebra {
    type Seed: std::fmt::Debug;

    fn measure(&self, seed: &Self::Seed) -> u64;
    fn classify(&self, seed: &Self::Seed, ctx: &FutuContext<'_>) -> Result<Layer<Self::Seed>>;
}

/// Lifts a plain coalgebra by ignoring history.
pub struct ObliviousCo<C>(pub C);

impl<C: DtmgCoalgebra> FutuCoalgebra for ObliviousCo<C> {
    type Seed = C::Seed;

    fn measure(&self, seed: &C::Seed) -> u64 {
        self.0.measure(seed)
    }
    fn classify(&self, seed: &C::Seed, _: &FutuContext<'_>) -> Result<Layer<C::Seed>> {
        self.0.classify(seed)
    }
}

/// Futumorphism: an unfold that can read the history built so far.
pub fn futu<C: FutuCoalgebra>(
    coalg: &C,
    registry: &Arc<TypeRegistry>,
    seed: &C::Seed,
) -> Result<(ConstructionExpr, HistoryForest)> {
    futu_from(coalg, registry, seed, HistoryForest::new(registry.clone()))
}

/// As [`futu`], starting from an initial history.
pub fn futu_from<C: FutuCoalgebra>(
    coalg: &C,
    registry: &Arc<TypeRegistry>,
    seed: &C::Seed,
    prior: HistoryForest,
) -> Result<(ConstructionExpr, HistoryForest)> {
    let mut done = prior;
    let alg = Oblivious(crate::morph::algebra::Rebuild);
    run(&alg, coalg, registry, seed, 0, &mut done)
}

/// The fused unfold-then-fold engine shared by futu and chrono.
fn run<A: HistoAlgebra, C: FutuCoalgebra>(
    alg: &A,
    coalg: &C,
    reg: &Arc<TypeRegistry>,
    seed: &C::Seed,
    depth: usize,
    done: &mut HistoryForest,
) -> Result<(A::Carrier, HistoryForest)> {
    let layer = coalg.classify(seed, &FutuContext { depth, prior: done })?;
    let out = match layer {
        Layer::Empty => (alg.empty()?, leaf_history(reg, &ConstructionExpr::Empty)?),
        Layer::Edge(l) => {
            let h = leaf_history(reg, &ConstructionExpr::Edge(l.clone()))?;
            (alg.edge(&l)?, h)
        }
        Layer::Swap { left, right } => {
            let h = leaf_history(reg, &ConstructionExpr::Swap { left, right })?;
            (alg.swap(left, right)?, h)
        }
        Layer::Beside(a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            let (x, hx) = run(alg, coalg, reg, &a, depth + 1, done)?;
            let (y, hy) = run(alg, coalg, reg, &b, depth + 1, done)?;
            let c = alg.beside((x, &hx), (y, &hy))?;
            (c, hist_beside(&hx, &hy))
        }
        Layer::Connect(p, a, b) => {
            check_decrease(|s| coalg.measure(s), seed, [&a, &b])?;
            let (x, hx) = run(alg, coalg, reg, &a, depth + 1, done)?;
            let (y, hy) = run(alg, coalg, reg, &b, depth + 1, done)?;
            let c = alg.connect(&p, (x, &hx), (y, &hy))?;
            (c, hist_connect(&hx, &p, &hy)?)
        }
    };
    done.trees.extend(out.1.trees.iter().cloned());
    Ok(out)
}

/// Chronomorphism: futu followed by histo, fused into one pass. The fold
/// sees exactly the history the unfold built.
pub fn chrono<A: HistoAlgebra, C: FutuCoalgebra>(
    alg: &A,
    coalg: &C,
    registry: &Arc<TypeRegistry>,
    seed: &C::Seed,
) -> Result<A::Carrier> {
    let mut done = HistoryForest::new(registry.clone());
    Ok(run(alg, coalg, registry, seed, 0, &mut done)?.0)
}

/// Metachronomorphism: histo, then a futu seeded with the fold's value and
/// starting from the fold's history.
pub fn metachrono<A, C>(
    coalg: &C,
    alg: &A,
    registry: &Arc<TypeRegistry>,
    x: &ConstructionExpr,
) -> Result<ConstructionExpr>
where
    A: HistoAlgebra,
    C: FutuCoalgebra<Seed = A::Carrier>,
{
    let (value, history) = histo(alg, registry, x)?;
    Ok(futu_from(coalg, registry, &value, history)?.0)
}

/// `f ∘ u1 ∘ f2 ∘ u`: unfold, fold into a new representation, unfold that,
/// and fold again.
pub fn nested<F, U1, F2, U>(
    f: &F,
    u1: &U1,
    f2: &F2,
    u: &U,
    registry: &Arc<TypeRegistry>,
    seed: &U::Seed,
) -> Result<F::Carrier>
where
    F: HistoAlgebra,
    U1: FutuCoalgebra<Seed = F2::Carrier>,
    F2: HistoAlgebra,
    U: FutuCoalgebra,
{
    let (x1, _) = futu(u, registry, seed)?;
    let (mid, _) = histo(f2, registry, &x1)?;
    let (x2, _) = futu(u1, registry, &mid)?;
    Ok(histo(f, registry, &x2)?.0)
}
