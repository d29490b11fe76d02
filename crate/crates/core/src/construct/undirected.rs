//! Undirected connection: a quadratic routing function joins targets of two
//! metagraphs directly or through freshly created mediating edges.

use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
use crate::error::{MgError, Result};
use crate::tmg::Tmg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum QSide {
    First,
    Second,
}

/// A mediating edge of type `ty` whose `i`-th target absorbs `absorbed[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreshEdge {
    pub ty: String,
    pub absorbed: Vec<(QSide, TargetRef)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Qcrf {
    /// Direct joins from a target of the first operand to one of the second.
    pub direct: Vec<(TargetRef, TargetRef)>,
    pub fresh: Vec<FreshEdge>,
}

impl Qcrf {
    /// One binary edge of type `ty` for every pair of a first-side and a
    /// second-side target.
    pub fn complete_bipartite(first: &[TargetRef], second: &[TargetRef], ty: &str) -> Self {
        let mut fresh = Vec::new();
        for a in first {
            for b in second {
                fresh.push(FreshEdge {
                    ty: ty.to_string(),
                    absorbed: vec![(QSide::First, a.clone()), (QSide::Second, b.clone())],
                });
            }
        }
        Qcrf { direct: vec![], fresh }
    }
}

/// `e1 ⋈_q e2`. The second operand's ids are freshened against the first.
pub fn connect_q(e1: &Tmg, q: &Qcrf, e2: &Tmg) -> Result<Tmg> {
    let (mut out, map) = e1.disjoint_union(e2);
    let reg = e1.registry().clone();
    let resolve = |side: QSide, r: &TargetRef| -> Result<(TargetRef, String)> {
        let (host, id) = match side {
            QSide::First => (e1, r.edge.clone()),
            QSide::Second => (e2, map.get(&r.edge).cloned().unwrap_or_else(|| r.edge.clone())),
        };
        let edge = host.edge(&r.edge).ok_or_else(|| MgError::UnknownEdge(r.edge.clone()))?;
        let ty = edge.slot_type(r.slot).ok_or_else(|| MgError::Range {
            context: format!("target of edge `{}`", r.edge),
            index: r.slot as usize,
            limit: edge.arity(),
        })?;
        Ok((TargetRef::new(id, r.slot), ty.to_string()))
    };
    for (a, b) in &q.direct {
        let (ra, ta) = resolve(QSide::First, a)?;
        let (rb, tb) = resolve(QSide::Second, b)?;
        if !reg.comparable(&ta, &tb)? {
            return Err(MgError::TypeMismatch(format!("{ta} at {a}"), format!("{tb} at {b}")));
        }
        out.add_connection(Connection::new(ra, rb))?;
    }
    for f in &q.fresh {
        if !reg.contains(&f.ty) {
            return Err(MgError::UnknownType(f.ty.clone()));
        }
        let mut targets = Vec::new();
        let mut joins = Vec::new();
        for (i, (side, r)) in f.absorbed.iter().enumerate() {
            let (rr, ty) = resolve(*side, r)?;
            targets.push(Target::new(i as u32 + 1, ty));
            joins.push(rr);
        }
        let id = out.fresh_id(&f.ty.to_lowercase());
        out.add_edge(Edge::new(id.clone(), TargetTuple::new(f.ty.clone(), targets), vec![]))?;
        for (i, rr) in joins.into_iter().enumerate() {
            out.add_connection(Connection::new(TargetRef::new(id.clone(), i as u32 + 1), rr))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TypeRegistry;
    use std::sync::Arc;

    fn reg() -> Arc<TypeRegistry> {
        let mut r = TypeRegistry::new();
        for t in ["A", "B", "L"] {
            r.declare(t).unwrap();
        }
        Arc::new(r)
    }

    fn single(id: &str, ty: &str, n: u32) -> Tmg {
        let mut g = Tmg::new(reg());
        g.add_edge(Edge::new(
            id,
            TargetTuple::new(ty, (1..=n).map(|i| Target::new(i, ty)).collect()),
            vec![],
        ))
        .unwrap();
        g
    }

    #[test]
    fn labelled_graph_connect_is_a_sub_case() {
        let a = single("x", "A", 2);
        let b = single("x", "A", 3);
        let first: Vec<_> = (1..=2).map(|s| TargetRef::new("x", s)).collect();
        let second: Vec<_> = (1..=3).map(|s| TargetRef::new("x", s)).collect();
        let g = connect_q(&a, &Qcrf::complete_bipartite(&first, &second, "L"), &b).unwrap();
        assert_eq!(g.edge_count(), 2 + 6);
        assert_eq!(g.connection_count(), 12);
        assert!(g.validate().is_empty());
        assert!(g.dangling_targets().is_empty());
    }

    #[test]
    fn direct_pairs_are_type_checked() {
        let a = single("x", "A", 1);
        let b = single("y", "B", 1);
        let q = Qcrf {
            direct: vec![(TargetRef::new("x", 1), TargetRef::new("y", 1))],
            fresh: vec![],
        };
        assert!(matches!(connect_q(&a, &q, &b), Err(MgError::TypeMismatch(..))));
        let c = single("y", "A", 1);
        assert_eq!(connect_q(&a, &q, &c).unwrap().connection_count(), 1);
    }
}
