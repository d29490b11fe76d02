//! Elementary metagraph homomorphisms: lossless identifications of one
//! subgraph with another.

use std::collections::{BTreeMap, BTreeSet};

use crate::edge::{Connection, TargetRef};
use crate::error::{MgError, Result};
use crate::tmg::Tmg;
use crate::topology::{violation, Correspondence, MappingViolation};

/// Longest elementary sequence [`hom_decompose`] will produce.
pub const HOM_STEP_BOUND: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomMapping(pub Correspondence);

impl HomMapping {
    pub fn positional(m: &Tmg, pairs: &[(&str, &str)]) -> Result<Self> {
        Correspondence::positional(m, pairs).map(HomMapping)
    }

    pub fn identity(m: &Tmg, ids: &BTreeSet<String>) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = ids.iter().map(|s| (s.as_str(), s.as_str())).collect();
        Self::positional(m, &pairs)
    }

    /// Every failed condition, in bullet order.
    pub fn violations(&self, m: &Tmg) -> Vec<MappingViolation> {
        let c = &self.0;
        let mut out = c.shape(m);
        if !out.is_empty() {
            return out;
        }
        let mut seen = BTreeSet::new();
        for t2 in c.targets.values() {
            if !seen.insert(t2) {
                out.push(violation(0, format!("{t2} is hit twice")));
            }
        }
        let mut hit = BTreeSet::new();
        for b in c.edges.values() {
            if !hit.insert(b) {
                out.push(violation(0, format!("edge {b} is hit twice")));
            }
        }
        for b in &hit {
            let n = m.edge(b).map_or(0, |e| e.arity()) as u32;
            for s in 1..=n {
                if !seen.contains(&TargetRef::new(b.as_str(), s)) {
                    out.push(violation(0, format!("target {b}.{s} is not hit")));
                }
            }
        }
        let reg = m.registry();
        for (a, b) in &c.edges {
            let (ta, tb) = (&m.edge(a).unwrap().tuple.ty, &m.edge(b).unwrap().tuple.ty);
            if ta != tb {
                out.push(violation(1, format!("{a} has type {ta}, {b} has type {tb}")));
            }
        }
        for (t1, t2) in &c.targets {
            let (y1, y2) = (
                Correspondence::target_type(m, t1).unwrap_or_default(),
                Correspondence::target_type(m, t2).unwrap_or_default(),
            );
            if !reg.equivalent(y1, y2).unwrap_or(false) {
                out.push(violation(2, format!("{t1}: {y1} is not equivalent to {t2}: {y2}")));
            }
        }
        out.extend(c.colocation(m, true));
        out
    }
}

pub fn elem_hom_check(m: &Tmg, h: &HomMapping) -> bool {
    h.violations(m).is_empty()
}

/// Redirects every connection into `S1` to the corresponding `S2` target
/// and removes `S1`.
pub fn elem_hom_apply(m: &Tmg, h: &HomMapping) -> Result<Tmg> {
    if let Some(v) = h.violations(m).into_iter().next() {
        return Err(MgError::Mapping(v.to_string()));
    }
    Ok(h.0.redirect(m))
}

/// Follows `f` from `e` to its fixed point; `None` on a cycle.
fn settle<'a>(f: &'a BTreeMap<String, String>, e: &'a str) -> Option<(&'a str, usize)> {
    let mut cur = e;
    for steps in 0..=f.len() {
        match f.get(cur) {
            Some(n) if n != cur => cur = n,
            _ => return Some((cur, steps)),
        }
    }
    None
}

/// Applies the edge endomap `f` (targets follow slot by slot) in one go.
pub fn hom_apply_composite(m: &Tmg, f: &BTreeMap<String, String>) -> Result<Tmg> {
    let mut end = BTreeMap::new();
    for e in m.edge_ids() {
        let (t, _) = settle(f, e).ok_or_else(|| MgError::Mapping(format!("{e} never settles under f")))?;
        if !m.contains_edge(t) {
            return Err(MgError::UnknownEdge(t.to_string()));
        }
        end.insert(e.to_string(), t.to_string());
    }
    let mut out = Tmg::new(m.registry().clone());
    for e in m.edges() {
        if end[&e.id] == e.id {
            out.insert_edge_unchecked(e.clone());
        }
    }
    for c in m.connections() {
        let from = TargetRef::new(end[&c.from.edge].clone(), c.from.slot);
        let to = TargetRef::new(end[&c.to.edge].clone(), c.to.slot);
        if from != to {
            out.insert_connection_unchecked(Connection::new(from, to));
        }
    }
    Ok(out)
}

/// Splits the endomap `f` into single-edge identifications, farthest edges
/// first. `Ok(None)` means more than [`HOM_STEP_BOUND`] steps are needed.
/// Each step is checked on the graph it applies to, and the whole sequence
/// is replayed against [`hom_apply_composite`].
pub fn hom_decompose(m: &Tmg, f: &BTreeMap<String, String>) -> Result<Option<Vec<HomMapping>>> {
    let mut moving = Vec::new();
    for (a, b) in f {
        if a == b {
            continue;
        }
        if !m.contains_edge(a) {
            return Err(MgError::UnknownEdge(a.clone()));
        }
        let (_, dist) = settle(f, a).ok_or_else(|| MgError::Mapping(format!("{a} never settles under f")))?;
        moving.push((dist, a.as_str(), b.as_str()));
    }
    if moving.len() > HOM_STEP_BOUND {
        return Ok(None);
    }
    moving.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(y.1)));
    let mut cur = m.clone();
    let mut steps = Vec::new();
    for (_, a, b) in moving {
        let h = HomMapping::positional(&cur, &[(a, b)])?;
        cur = elem_hom_apply(&cur, &h)?;
        steps.push(h);
    }
    if cur != hom_apply_composite(m, f)? {
        return Err(MgError::Mapping("elementary steps do not replay to f".into()));
    }
    Ok(Some(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Edge, Target, TargetTuple};
    use crate::types::TypeRegistry;
    use std::sync::Arc;

    fn arrow(id: &str) -> Edge {
        Edge::new(id, TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]), vec![])
    }

    /// `a → b` and `c → d`.
    fn two_pairs() -> Tmg {
        let mut g = Tmg::new(Arc::new(TypeRegistry::new()));
        for id in ["a", "b", "c", "d"] {
            g.add_edge(arrow(id)).unwrap();
        }
        g.add_connection(Connection::new(TargetRef::new("a", 2), TargetRef::new("b", 1))).unwrap();
        g.add_connection(Connection::new(TargetRef::new("c", 2), TargetRef::new("d", 1))).unwrap();
        g
    }

    #[test]
    fn identity_is_elementary() {
        let g = two_pairs();
        let ids: BTreeSet<String> = g.edge_ids().map(String::from).collect();
        let h = HomMapping::identity(&g, &ids).unwrap();
        assert!(elem_hom_check(&g, &h));
        assert_eq!(elem_hom_apply(&g, &h).unwrap(), g);
    }

    #[test]
    fn single_identification_redirects() {
        let g = two_pairs();
        let h = HomMapping::positional(&g, &[("c", "a")]).unwrap();
        let out = elem_hom_apply(&g, &h).unwrap();
        assert!(!out.contains_edge("c"));
        assert!(out.has_connection(&Connection::new(TargetRef::new("a", 2), TargetRef::new("d", 1))));
        assert_eq!(out.connection_count(), 2);
        assert!(out.validate().is_empty());
    }

    #[test]
    fn swapped_labels_break_colocation() {
        let mut g = two_pairs();
        g.add_edge(Edge::new(
            "p",
            TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(1, "e")]),
            vec![],
        ))
        .unwrap();
        let h = HomMapping(Correspondence {
            edges: BTreeMap::from([("p".into(), "a".into())]),
            targets: BTreeMap::from([
                (TargetRef::new("p", 1), TargetRef::new("a", 1)),
                (TargetRef::new("p", 2), TargetRef::new("a", 2)),
            ]),
        });
        assert!(!elem_hom_check(&g, &h));
        assert_eq!(h.violations(&g)[0].bullet, 3);
    }

    #[test]
    fn decompositions() {
        let g = two_pairs();
        assert_eq!(hom_decompose(&g, &BTreeMap::new()).unwrap(), Some(vec![]));
        let f = BTreeMap::from([("c".to_string(), "a".to_string())]);
        assert_eq!(
            hom_decompose(&g, &f).unwrap(),
            Some(vec![HomMapping::positional(&g, &[("c", "a")]).unwrap()])
        );
        let f = BTreeMap::from([("c".to_string(), "a".to_string()), ("d".to_string(), "b".to_string())]);
        let steps = hom_decompose(&g, &f).unwrap().unwrap();
        assert_eq!(steps.len(), 2);
        let replay = steps.iter().try_fold(g.clone(), |m, h| elem_hom_apply(&m, h)).unwrap();
        assert_eq!(replay, hom_apply_composite(&g, &f).unwrap());
        assert_eq!(replay.edge_count(), 2);
        assert_eq!(replay.connection_count(), 1);
    }
}
