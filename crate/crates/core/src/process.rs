//! Processes over a shared TMG: traversal traces that direct it, the
//! virtual and realized TMGs, value updates, forgetting and pruning.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::dtmg::{Dtmg, Role};
use crate::edge::{Connection, Edge, EdgeKey, TargetRef};
use crate::error::{MgError, Result};
use crate::morph::forest::Ftmg;
use crate::tmg::Tmg;
use crate::types::TypeRegistry;
use crate::value::Value;

/// One step of a traversal: the `src_idx` targets of `src` are bound, in
/// order, to the `dst_idx` targets of `dst`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalEvent {
    pub src: String,
    pub src_idx: Vec<u32>,
    pub dst: String,
    pub dst_idx: Vec<u32>,
    pub time: u64,
}

impl TraversalEvent {
    pub fn new(src: impl Into<String>, src_idx: Vec<u32>, dst: impl Into<String>, dst_idx: Vec<u32>, time: u64) -> Self {
        TraversalEvent {
            src: src.into(),
            src_idx,
            dst: dst.into(),
            dst_idx,
            time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub name: String,
    pub events: Vec<TraversalEvent>,
}

impl Trace {
    /// Events in the given order, timestamped 1, 2, ...
    pub fn new(name: impl Into<String>, steps: Vec<(&str, Vec<u32>, &str, Vec<u32>)>) -> Self {
        Trace {
            name: name.into(),
            events: steps
                .into_iter()
                .zip(1..)
                .map(|((s, si, d, di), t)| TraversalEvent::new(s, si, d, di, t))
                .collect(),
        }
    }
}

/// The same walk run backwards: events in reverse order with source and
/// destination exchanged, retimed 1, 2, ...
pub fn reverse_trace(t: &Trace) -> Trace {
    Trace {
        name: t.name.clone(),
        events: t
            .events
            .iter()
            .rev()
            .zip(1..)
            .map(|(e, time)| TraversalEvent::new(e.dst.clone(), e.dst_idx.clone(), e.src.clone(), e.src_idx.clone(), time))
            .collect(),
    }
}

fn check_event(base: &Tmg, e: &TraversalEvent) -> Result<()> {
    for (id, idx) in [(&e.src, &e.src_idx), (&e.dst, &e.dst_idx)] {
        let edge = base.edge(id).ok_or_else(|| MgError::UnknownEdge(id.clone()))?;
        for &i in idx {
            if i == 0 || i as usize > edge.arity() {
                return Err(MgError::Range {
                    context: format!("traversal index on {id}"),
                    index: i as usize,
                    limit: edge.arity(),
                });
            }
        }
    }
    if !e.src_idx.is_empty() && !e.dst_idx.is_empty() && e.src_idx.len() != e.dst_idx.len() {
        return Err(MgError::Arity(format!(
            "event {} binds {} targets of {} to {} targets of {}",
            e.time,
            e.src_idx.len(),
            e.src,
            e.dst_idx.len(),
            e.dst
        )));
    }
    Ok(())
}

/// Directs the touched part of `base` by the order of traversal. Source
/// indices become outputs and destination indices inputs; bound target
/// pairs are connected from source to destination. On an edge that only
/// sends, the untouched dangling targets are inputs; on one that only
/// receives, outputs. Other dangling targets are lateral.
pub fn traversal_to_dtmg(base: &Tmg, trace: &Trace) -> Result<Dtmg> {
    let mut last = None;
    for e in &trace.events {
        if last.is_some_and(|t| e.time <= t) {
            return Err(MgError::Trace(format!("timestamp {} does not increase", e.time)));
        }
        last = Some(e.time);
        check_event(base, e)?;
    }
    let mut g = Tmg::new(base.registry().clone());
    let mut roles: BTreeMap<TargetRef, Role> = BTreeMap::new();
    let mut clash = BTreeSet::new();
    let mut claim = |r: TargetRef, role: Role| match roles.get(&r) {
        Some(&old) if old != role => {
            clash.insert(r);
        }
        _ => {
            roles.insert(r, role);
        }
    };
    for e in &trace.events {
        for id in [&e.src, &e.dst] {
            if !g.contains_edge(id) {
                g.insert_edge_unchecked(base.edge(id).unwrap().clone());
            }
        }
        for &i in &e.src_idx {
            claim(TargetRef::new(e.src.clone(), i), Role::Output);
        }
        for &j in &e.dst_idx {
            claim(TargetRef::new(e.dst.clone(), j), Role::Input);
        }
        for (&i, &j) in e.src_idx.iter().zip(&e.dst_idx) {
            g.add_connection(Connection::new(TargetRef::new(e.src.clone(), i), TargetRef::new(e.dst.clone(), j)))?;
        }
    }
    if !clash.is_empty() {
        return Err(MgError::Partition {
            missing: vec![],
            duplicated: clash.into_iter().collect(),
            foreign: vec![],
        });
    }
    let mut sides: BTreeMap<&str, BTreeSet<Role>> = BTreeMap::new();
    for (r, role) in &roles {
        sides.entry(r.edge.as_str()).or_default().insert(*role);
    }
    let (mut inputs, mut outputs, mut lateral) = (vec![], vec![], vec![]);
    for (r, _) in g.dangling_targets() {
        let only = sides.get(r.edge.as_str()).filter(|s| s.len() == 1).and_then(|s| s.first());
        match (roles.get(&r), only) {
            (Some(Role::Input), _) | (None, Some(Role::Output)) => inputs.push(r),
            (Some(Role::Output), _) | (None, Some(Role::Input)) => outputs.push(r),
            _ => lateral.push(r),
        }
    }
    Dtmg::new(g, inputs, outputs, lateral)
}

/// One forest member per trace over `base`, extended by any connection a
/// trace creates.
pub fn traces_to_ftmg(base: &Tmg, traces: &[Trace], weights: Option<Vec<f64>>) -> Result<Ftmg> {
    let mut forest = Vec::with_capacity(traces.len());
    let mut shared = base.clone();
    for (index, t) in traces.iter().enumerate() {
        let d = traversal_to_dtmg(base, t).map_err(|e| MgError::InTrace {
            index,
            source: Box::new(e),
        })?;
        for c in d.base().connections() {
            let rev = Connection::new(c.to.clone(), c.from.clone());
            if !shared.has_connection(c) && !shared.has_connection(&rev) {
                shared.insert_connection_unchecked(c.clone());
            }
        }
        forest.push(d);
    }
    Ftmg::new(shared, forest, weights)
}

/// Admissible values for one value position.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueRange {
    Any,
    Int { lo: i64, hi: i64 },
    OneOf(Vec<Value>),
}

impl ValueRange {
    pub fn admits(&self, v: &Value) -> bool {
        match self {
            ValueRange::Any => true,
            ValueRange::Int { lo, hi } => matches!(v, Value::Int(i) if lo <= i && i <= hi),
            ValueRange::OneOf(vs) => vs.contains(v),
        }
    }
}

/// All edges up to a size bound, given only as a membership test.
#[derive(Debug, Clone)]
pub struct VirtualTmg {
    pub registry: Arc<TypeRegistry>,
    pub max_arity: usize,
    /// Per edge type, the range of each value position. Types without an
    /// entry admit any values.
    pub value_ranges: BTreeMap<String, Vec<ValueRange>>,
}

impl VirtualTmg {
    pub fn new(registry: Arc<TypeRegistry>, max_arity: usize) -> Self {
        VirtualTmg {
            registry,
            max_arity,
            value_ranges: BTreeMap::new(),
        }
    }

    pub fn with_ranges(mut self, ty: &str, ranges: Vec<ValueRange>) -> Self {
        self.value_ranges.insert(ty.to_string(), ranges);
        self
    }

    pub fn admits(&self, key: &EdgeKey) -> Result<()> {
        if key.tuple.arity() > self.max_arity {
            return Err(MgError::Membership(format!(
                "arity {} exceeds the bound {}",
                key.tuple.arity(),
                self.max_arity
            )));
        }
        key.tuple
            .check(&self.registry)
            .map_err(|e| MgError::Membership(e.to_string()))?;
        if let Some(ranges) = self.value_ranges.get(&key.tuple.ty) {
            if ranges.len() != key.values.len() {
                return Err(MgError::Membership(format!(
                    "`{}` edges carry {} values, got {}",
                    key.tuple.ty,
                    ranges.len(),
                    key.values.len()
                )));
            }
            if let Some((i, v)) = key.values.iter().enumerate().find(|(i, v)| !ranges[*i].admits(v)) {
                return Err(MgError::Membership(format!("value {v} at position {} is out of range", i + 1)));
            }
        }
        Ok(())
    }
}

/// A finite state drawn from a virtual TMG. Every operation returns a new
/// state and leaves the receiver untouched.
#[derive(Debug, Clone)]
pub struct RealizedTmg {
    virt: Arc<VirtualTmg>,
    graph: Tmg,
    forgotten: BTreeMap<EdgeKey, Vec<u64>>,
    superseded: BTreeSet<String>,
}

impl RealizedTmg {
    pub fn new(virt: Arc<VirtualTmg>) -> Self {
        let graph = Tmg::new(virt.registry.clone());
        RealizedTmg {
            virt,
            graph,
            forgotten: BTreeMap::new(),
            superseded: BTreeSet::new(),
        }
    }

    pub fn graph(&self) -> &Tmg {
        &self.graph
    }

    pub fn virtual_tmg(&self) -> &Arc<VirtualTmg> {
        &self.virt
    }

    /// Edges replaced by a value update and left disconnected.
    pub fn superseded(&self) -> &BTreeSet<String> {
        &self.superseded
    }

    /// Largest forgotten counter recorded for the edge's key.
    pub fn forgotten_count(&self, id: &str) -> Result<u64> {
        let e = self.graph.edge(id).ok_or_else(|| MgError::UnknownEdge(id.into()))?;
        Ok(self.counter(&e.key()))
    }

    fn counter(&self, key: &EdgeKey) -> u64 {
        self.forgotten.get(key).and_then(|v| v.iter().max().copied()).unwrap_or(0)
    }

    /// Pulls the edge `id` with descriptor `key` from the virtual TMG and
    /// adds `connections`.
    pub fn realize(&self, id: &str, key: &EdgeKey, connections: &[Connection]) -> Result<RealizedTmg> {
        self.virt.admits(key)?;
        let mut next = self.clone();
        next.graph
            .add_edge(Edge::new(id, key.tuple.clone(), key.values.clone()))?;
        for c in connections {
            next.graph.add_connection(c.clone())?;
        }
        Ok(next)
    }

    /// Adds one connection between realized edges.
    pub fn realize_connection(&self, c: &Connection) -> Result<RealizedTmg> {
        let mut next = self.clone();
        next.graph.add_connection(c.clone())?;
        Ok(next)
    }

    /// Creates a copy of `id` carrying `values` and moves every connection
    /// of `id` onto it. Returns the new state and the new edge's id.
    pub fn value_update(&self, id: &str, values: Vec<Value>) -> Result<(RealizedTmg, String)> {
        let old = self.graph.edge(id).ok_or_else(|| MgError::UnknownEdge(id.into()))?;
        let key = EdgeKey {
            tuple: old.tuple.clone(),
            values,
        };
        self.virt.admits(&key)?;
        let new_id = self.graph.fresh_id(id);
        let mut next = self.clone();
        next.graph
            .insert_edge_unchecked(Edge::new(new_id.clone(), key.tuple, key.values));
        let touching: Vec<Connection> = self.graph.connections().filter(|c| c.touches(id)).cloned().collect();
        let swap = |r: &TargetRef| {
            if r.edge == id {
                TargetRef::new(new_id.clone(), r.slot)
            } else {
                r.clone()
            }
        };
        for c in touching {
            next.graph.remove_connection(&c);
            next.graph
                .insert_connection_unchecked(Connection::new(swap(&c.from), swap(&c.to)));
        }
        next.superseded.insert(id.to_string());
        Ok((next, new_id))
    }

    fn bump(&self, id: &str) -> RealizedTmg {
        let key = self.graph.edge(id).unwrap().key();
        let n = self.counter(&key) + 1;
        let mut next = self.clone();
        next.forgotten.entry(key).or_default().push(n);
        next
    }

    pub fn forget(&self, id: &str) -> Result<RealizedTmg> {
        if !self.graph.contains_edge(id) {
            return Err(MgError::State(format!("cannot forget absent edge {id}")));
        }
        Ok(self.bump(id))
    }

    pub fn reinsert(&self, id: &str) -> Result<RealizedTmg> {
        if !self.graph.contains_edge(id) || self.forgotten_count(id)? == 0 {
            return Err(MgError::State(format!("edge {id} was never forgotten")));
        }
        Ok(self.bump(id))
    }

    /// The realized TMG without edges whose key's counter is odd; only the
    /// connections left dangling are dropped.
    pub fn pruned(&self) -> Tmg {
        let keep: BTreeSet<String> = self
            .graph
            .edges()
            .filter(|e| self.counter(&e.key()) % 2 == 0)
            .map(|e| e.id.clone())
            .collect();
        self.graph.induced(&keep)
    }

    /// Drops superseded edges.
    pub fn compact(&self) -> RealizedTmg {
        let mut next = self.clone();
        for id in &self.superseded {
            next.graph.remove_edge_and_connections(id);
        }
        next.superseded.clear();
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtmg::is_metapath;
    use crate::edge::{Target, TargetTuple};

    fn arrow(id: &str) -> Edge {
        Edge::new(id, TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]), vec![])
    }

    fn loose(ids: &[&str]) -> Tmg {
        let mut g = Tmg::new(Arc::new(TypeRegistry::new()));
        for id in ids {
            g.add_edge(arrow(id)).unwrap();
        }
        g
    }

    #[test]
    fn typed_pair_trace() {
        let g = loose(&["x", "y"]);
        assert!(traversal_to_dtmg(&g, &Trace::default()).unwrap().is_empty());
        let d = traversal_to_dtmg(&g, &Trace::new("t", vec![("x", vec![2], "y", vec![1])])).unwrap();
        assert_eq!(d.edge_count(), 2);
        assert!(d.base().has_connection(&Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1))));
        assert_eq!(d.roles()[&TargetRef::new("x", 2)], Role::Output);
        assert_eq!(d.roles()[&TargetRef::new("y", 1)], Role::Input);
        assert_eq!(d.inputs(), &[TargetRef::new("x", 1)]);
        assert_eq!(d.outputs(), &[TargetRef::new("y", 2)]);
        assert!(d.lateral().is_empty());
    }

    #[test]
    fn chain_is_a_metapath() {
        let g = loose(&["a", "b", "c", "d"]);
        let t = Trace::new(
            "t",
            vec![("a", vec![2], "b", vec![1]), ("b", vec![2], "c", vec![1]), ("c", vec![2], "d", vec![1])],
        );
        let d = traversal_to_dtmg(&g, &t).unwrap();
        assert!(d.base().validate().is_empty());
        let set = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let mid = d.restrict(&set(&["b", "c"])).unwrap();
        let src = d.restrict(&set(&["a"])).unwrap();
        let dst = d.restrict(&set(&["d"])).unwrap();
        assert!(is_metapath(d.base(), &mid, &src, &dst));
    }

    #[test]
    fn clashes_and_reversal() {
        let g = loose(&["a", "b"]);
        let t = Trace::new("t", vec![("a", vec![2], "b", vec![1]), ("b", vec![1], "a", vec![1])]);
        assert!(matches!(traversal_to_dtmg(&g, &t), Err(MgError::Partition { .. })));
        let t = Trace::new("t", vec![("a", vec![2], "b", vec![1])]);
        let fwd = traversal_to_dtmg(&g, &t).unwrap();
        let back = traversal_to_dtmg(&g, &reverse_trace(&t)).unwrap();
        for (r, role) in fwd.roles() {
            let flipped = match role {
                Role::Input => Role::Output,
                Role::Output => Role::Input,
                Role::Lateral => Role::Lateral,
            };
            assert_eq!(back.roles()[&r], flipped);
        }
    }

    #[test]
    fn opposite_traces_share_an_edge() {
        let g = loose(&["a", "b"]);
        let t1 = Trace::new("t1", vec![("a", vec![2], "b", vec![1])]);
        let t2 = Trace::new("t2", vec![("b", vec![1], "a", vec![2])]);
        let f = traces_to_ftmg(&g, &[t1, t2], Some(vec![0.3, 0.7])).unwrap();
        assert_eq!(f.forest().len(), 2);
        let r = TargetRef::new("a", 2);
        assert_eq!(f.forest()[0].roles()[&r], Role::Output);
        assert_eq!(f.forest()[1].roles()[&r], Role::Input);
    }

    fn state() -> RealizedTmg {
        let virt = Arc::new(VirtualTmg::new(Arc::new(TypeRegistry::new()), 3).with_ranges(
            "e",
            vec![ValueRange::Int { lo: 0, hi: 9 }],
        ));
        let key = |v| EdgeKey {
            tuple: arrow("_").tuple,
            values: vec![Value::Int(v)],
        };
        RealizedTmg::new(virt)
            .realize("a", &key(1), &[])
            .unwrap()
            .realize("b", &key(2), &[Connection::new(TargetRef::new("a", 2), TargetRef::new("b", 1))])
            .unwrap()
    }

    #[test]
    fn realize_and_update_are_persistent() {
        let r = state();
        assert!(r.graph().validate().is_empty());
        let big = EdgeKey {
            tuple: TargetTuple::new("e", (1..=4).map(|i| Target::new(i, "e")).collect()),
            values: vec![Value::Int(0)],
        };
        assert!(matches!(r.realize("c", &big, &[]), Err(MgError::Membership(_))));
        let (r1, b1) = r.value_update("b", vec![Value::Int(3)]).unwrap();
        let (r2, b2) = r1.value_update(&b1, vec![Value::Int(3)]).unwrap();
        assert_eq!(r.graph().connection_count(), 1);
        assert_eq!(r2.graph().connection_count(), 1);
        for old in ["b", b1.as_str()] {
            assert_eq!(r2.graph().connections().filter(|c| c.touches(old)).count(), 0);
        }
        assert!(r2.graph().connections().any(|c| c.touches(&b2)));
        assert_eq!(r2.compact().graph().edge_count(), 2);
        assert!(matches!(r.value_update("b", vec![Value::Int(10)]), Err(MgError::Membership(_))));
        assert!(matches!(r.value_update("z", vec![]), Err(MgError::UnknownEdge(_))));
    }

    #[test]
    fn forgetting_parity() {
        let r = state();
        assert!(r.pruned().contains_edge("a"));
        let f = r.forget("a").unwrap();
        assert!(!f.pruned().contains_edge("a"));
        assert_eq!(f.pruned().connection_count(), 0);
        assert!(f.reinsert("a").unwrap().pruned().contains_edge("a"));
        assert!(matches!(r.reinsert("a"), Err(MgError::State(_))));
        assert!(matches!(r.forget("z"), Err(MgError::State(_))));
    }
}
