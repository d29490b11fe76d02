//! Forests of DTMGs over one shared TMG, and folds over them.

use crate::construct::expr::decompose;
use crate::dtmg::Dtmg;
use crate::edge::Connection;
use crate::error::{MgError, Result};
use crate::morph::algebra::{cata, DtmgAlgebra};
use crate::tmg::Tmg;

#[derive(Debug, Clone, PartialEq)]
pub struct Ftmg {
    base: Tmg,
    forest: Vec<Dtmg>,
    weights: Option<Vec<f64>>,
}

impl Ftmg {
    /// Every member's edges and connections must occur in `base`, connections
    /// in either orientation. Weights, when given, are nonnegative, one per
    /// member, summing to 1.
    pub fn new(base: Tmg, forest: Vec<Dtmg>, weights: Option<Vec<f64>>) -> Result<Self> {
        for (i, d) in forest.iter().enumerate() {
            for e in d.edges() {
                if base.edge(&e.id) != Some(e) {
                    return Err(MgError::InTrace {
                        index: i,
                        source: Box::new(MgError::UnknownEdge(e.id.clone())),
                    });
                }
            }
            let known = |c: &Connection| {
                base.has_connection(c) || base.has_connection(&Connection::new(c.to.clone(), c.from.clone()))
            };
            if let Some(c) = d.base().connections().find(|c| !known(c)) {
                return Err(MgError::InTrace {
                    index: i,
                    source: Box::new(MgError::State(format!("connection {c} is not in the base"))),
                });
            }
        }
        if let Some(w) = &weights {
            if w.len() != forest.len() {
                return Err(MgError::Weight(format!("{} weights for {} members", w.len(), forest.len())));
            }
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(MgError::Weight("weights must be finite and nonnegative".into()));
            }
            let s: f64 = w.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(MgError::Weight(format!("weights sum to {s}, not 1")));
            }
        }
        Ok(Ftmg { base, forest, weights })
    }

    pub fn base(&self) -> &Tmg {
        &self.base
    }

    pub fn forest(&self) -> &[Dtmg] {
        &self.forest
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }
}

/// A right fold over a list.
pub trait ListAlgebra {
    type Item;
    type Out;

    fn nil(&self) -> Self::Out;
    fn cons(&self, head: Self::Item, tail: Self::Out) -> Self::Out;
}

/// Sums numeric items.
pub struct SumList;

impl ListAlgebra for SumList {
    type Item = usize;
    type Out = usize;

    fn nil(&self) -> usize {
        0
    }
    fn cons(&self, head: usize, tail: usize) -> usize {
        head + tail
    }
}

/// Folds each member by `alg` (through its canonical decomposition) and
/// combines the results with `list`.
pub fn ftmg_fold<L, A>(list: &L, alg: &A, f: &Ftmg) -> Result<L::Out>
where
    A: DtmgAlgebra,
    L: ListAlgebra<Item = A::Carrier>,
{
    let mut items = Vec::with_capacity(f.forest.len());
    for (i, d) in f.forest.iter().enumerate() {
        let v = decompose(d)
            .and_then(|x| cata(alg, &x))
            .map_err(|e| MgError::InTrace {
                index: i,
                source: Box::new(e),
            })?;
        items.push(v);
    }
    Ok(items.into_iter().rev().fold(list.nil(), |acc, v| list.cons(v, acc)))
}

/// Carriers that can be read as a number.
pub trait NumericCarrier {
    fn as_f64(&self) -> f64;
}

impl NumericCarrier for usize {
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl NumericCarrier for f64 {
    fn as_f64(&self) -> f64 {
        *self
    }
}

/// Expected fold value under the forest's weights.
pub fn weighted_fold<A>(alg: &A, f: &Ftmg) -> Result<f64>
where
    A: DtmgAlgebra,
    A::Carrier: NumericCarrier,
{
    let w = f
        .weights
        .as_ref()
        .ok_or_else(|| MgError::Weight("forest carries no weights".into()))?;
    let mut total = 0.0;
    for (d, wi) in f.forest.iter().zip(w) {
        total += wi * cata(alg, &decompose(d)?)?.as_f64();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Edge, Target, TargetTuple};
    use crate::morph::builtin::NumTargets;
    use crate::types::TypeRegistry;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn base() -> Tmg {
        let mut g = Tmg::new(Arc::new(TypeRegistry::new()));
        for (id, n) in [("a", 4), ("b", 8)] {
            g.add_edge(Edge::new(id, TargetTuple::new("e", (1..=n).map(|i| Target::new(i, "e")).collect()), vec![]))
                .unwrap();
        }
        g
    }

    fn member(g: &Tmg, id: &str) -> Dtmg {
        Dtmg::all_lateral(g.induced(&BTreeSet::from([id.to_string()])))
    }

    #[test]
    fn folds() {
        let g = base();
        let f = Ftmg::new(g.clone(), vec![member(&g, "a"), member(&g, "b")], Some(vec![0.5, 0.5])).unwrap();
        assert_eq!(ftmg_fold(&SumList, &NumTargets, &f).unwrap(), 12);
        assert_eq!(weighted_fold(&NumTargets, &f).unwrap(), 6.0);
        let empty = Ftmg::new(g.clone(), vec![], None).unwrap();
        assert_eq!(ftmg_fold(&SumList, &NumTargets, &empty).unwrap(), 0);
        assert!(matches!(weighted_fold(&NumTargets, &empty), Err(MgError::Weight(_))));
        assert!(Ftmg::new(g.clone(), vec![member(&g, "a")], Some(vec![0.7])).is_err());
    }
}
