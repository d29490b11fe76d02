//! Typed metagraphs: an edge set plus a connection set over a shared type
//! registry.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::edge::{Connection, Edge, TargetRef, TargetTuple, Target};
use crate::error::{MgError, Result};
use crate::types::TypeRegistry;

/// One failed structural condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownEdge { connection: Connection, edge: String },
    SlotOutOfRange { connection: Connection, at: TargetRef, arity: usize },
    BothWholeEdge { connection: Connection },
    Incomparable { connection: Connection, from_type: String, to_type: String },
    UnknownType { edge: String, ty: String },
    LabelOutOfRange { edge: String, label: u32, arity: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownEdge { connection, edge } => {
                write!(f, "connection {connection}: unknown edge `{edge}`")
            }
            Violation::SlotOutOfRange { connection, at, arity } => {
                write!(f, "connection {connection}: slot {at} outside 0..={arity}")
            }
            Violation::BothWholeEdge { connection } => {
                write!(f, "connection {connection}: both slots are whole-edge (0)")
            }
            Violation::Incomparable { connection, from_type, to_type } => write!(
                f,
                "connection {connection}: types `{from_type}` and `{to_type}` are incomparable"
            ),
            Violation::UnknownType { edge, ty } => write!(f, "edge {edge}: unknown type `{ty}`"),
            Violation::LabelOutOfRange { edge, label, arity } => {
                write!(f, "edge {edge}: index label {label} outside 1..={arity}")
            }
        }
    }
}

/// Informational finding that is not a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Note {
    pub at: TargetRef,
    pub connections: usize,
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "note: target {} joins {} connections", self.at, self.connections)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tmg {
    registry: Arc<TypeRegistry>,
    edges: BTreeMap<String, Edge>,
    connections: BTreeSet<Connection>,
}

impl Tmg {
    pub fn new(registry: Arc<TypeRegistry>) -> Self {
        Tmg {
            registry,
            edges: BTreeMap::new(),
            connections: BTreeSet::new(),
        }
    }

    pub fn registry(&self) -> &Arc<TypeRegistry> {
        &self.registry
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &str> {
        self.edges.keys().map(String::as_str)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn contains_edge(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn connections(&self) -> impl Iterator<Item = &Connection> {
        self.connections.iter()
    }

    pub fn connection_count(&self) -> usize {
        self.connections.len()
    }

    pub fn has_connection(&self, c: &Connection) -> bool {
        self.connections.contains(c)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Adds an edge after checking its types and labels.
    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        edge.tuple.check(&self.registry)?;
        if self.edges.contains_key(&edge.id) {
            return Err(MgError::DuplicateEdge(edge.id));
        }
        self.edges.insert(edge.id.clone(), edge);
        Ok(())
    }

    /// Adds a connection after checking slot ranges and type compatibility.
    pub fn add_connection(&mut self, c: Connection) -> Result<()> {
        if let Some(v) = self.check_connection(&c).into_iter().next() {
            return Err(match v {
                Violation::UnknownEdge { edge, .. } => MgError::UnknownEdge(edge),
                Violation::SlotOutOfRange { at, arity, .. } => MgError::Range {
                    context: format!("slot of {at}"),
                    index: at.slot as usize,
                    limit: arity,
                },
                Violation::Incomparable { from_type, to_type, .. } => {
                    MgError::TypeMismatch(from_type, to_type)
                }
                other => MgError::Route(other.to_string()),
            });
        }
        self.connections.insert(c);
        Ok(())
    }

    /// Inserts without checks; callers guarantee validity.
    pub(crate) fn insert_edge_unchecked(&mut self, edge: Edge) {
        self.edges.insert(edge.id.clone(), edge);
    }

    pub(crate) fn insert_connection_unchecked(&mut self, c: Connection) {
        self.connections.insert(c);
    }

    pub(crate) fn remove_edge_and_connections(&mut self, id: &str) -> Option<Edge> {
        self.connections.retain(|c| !c.touches(id));
        self.edges.remove(id)
    }

    pub(crate) fn remove_connection(&mut self, c: &Connection) -> bool {
        self.connections.remove(c)
    }

    /// A fresh edge id derived from `base` that is not used in this graph.
    pub fn fresh_id(&self, base: &str) -> String {
        fresh_id_in(base, |id| self.edges.contains_key(id))
    }

    fn slot_type(&self, r: &TargetRef) -> Option<&str> {
        self.edges.get(&r.edge).and_then(|e| e.slot_type(r.slot))
    }

    fn check_connection(&self, c: &Connection) -> Vec<Violation> {
        let mut out = Vec::new();
        for end in [&c.from, &c.to] {
            match self.edges.get(&end.edge) {
                None => out.push(Violation::UnknownEdge {
                    connection: c.clone(),
                    edge: end.edge.clone(),
                }),
                Some(e) if end.slot as usize > e.arity() => out.push(Violation::SlotOutOfRange {
                    connection: c.clone(),
                    at: end.clone(),
                    arity: e.arity(),
                }),
                Some(_) => {}
            }
        }
        if !out.is_empty() {
            return out;
        }
        if c.from.slot == 0 && c.to.slot == 0 {
            out.push(Violation::BothWholeEdge { connection: c.clone() });
            return out;
        }
        let a = self.slot_type(&c.from).unwrap_or_default();
        let b = self.slot_type(&c.to).unwrap_or_default();
        if !self.registry.comparable(a, b).unwrap_or(false) {
            out.push(Violation::Incomparable {
                connection: c.clone(),
                from_type: a.to_string(),
                to_type: b.to_string(),
            });
        }
        out
    }

    /// All structural violations; empty iff every invariant holds.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for e in self.edges.values() {
            for ty in std::iter::once(&e.tuple.ty).chain(e.tuple.targets.iter().map(|t| &t.ty)) {
                if !self.registry.contains(ty) {
                    out.push(Violation::UnknownType {
                        edge: e.id.clone(),
                        ty: ty.clone(),
                    });
                }
            }
            for t in &e.tuple.targets {
                if t.label == 0 || t.label as usize > e.arity() {
                    out.push(Violation::LabelOutOfRange {
                        edge: e.id.clone(),
                        label: t.label,
                        arity: e.arity(),
                    });
                }
            }
        }
        for c in &self.connections {
            out.extend(self.check_connection(c));
        }
        out
    }

    /// Targets that take part in more than one connection. Permitted, but
    /// reported.
    pub fn notes(&self) -> Vec<Note> {
        let mut counts: BTreeMap<&TargetRef, usize> = BTreeMap::new();
        for c in &self.connections {
            for end in [&c.from, &c.to] {
                if end.slot != 0 {
                    *counts.entry(end).or_default() += 1;
                }
            }
        }
        counts
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(at, connections)| Note {
                at: at.clone(),
                connections,
            })
            .collect()
    }

    /// Connections touching the given target position.
    pub fn connections_at<'a>(&'a self, r: &'a TargetRef) -> impl Iterator<Item = &'a Connection> + 'a {
        self.connections.iter().filter(move |c| &c.from == r || &c.to == r)
    }

    /// Target positions joined by no connection, ordered by (edge id, slot).
    pub fn dangling_targets(&self) -> Vec<(TargetRef, String)> {
        let used: BTreeSet<&TargetRef> = self
            .connections
            .iter()
            .flat_map(|c| [&c.from, &c.to])
            .collect();
        let mut out = Vec::new();
        for e in self.edges.values() {
            for (i, t) in e.tuple.targets.iter().enumerate() {
                let r = TargetRef::new(e.id.clone(), i as u32 + 1);
                if !used.contains(&r) {
                    out.push((r, t.ty.clone()));
                }
            }
        }
        out
    }

    /// Targets of `sub` edges that are dangling here or connected only to
    /// edges outside `sub`.
    pub fn external_targets(&self, sub: &BTreeSet<String>) -> Result<Vec<(TargetRef, String)>> {
        for id in sub {
            if !self.edges.contains_key(id) {
                return Err(MgError::UnknownEdge(id.clone()));
            }
        }
        let mut internal: BTreeSet<TargetRef> = BTreeSet::new();
        for c in &self.connections {
            if sub.contains(&c.from.edge) && sub.contains(&c.to.edge) {
                internal.insert(c.from.clone());
                internal.insert(c.to.clone());
            }
        }
        let mut out = Vec::new();
        for id in sub {
            let e = &self.edges[id];
            for (i, t) in e.tuple.targets.iter().enumerate() {
                let r = TargetRef::new(id.clone(), i as u32 + 1);
                if !internal.contains(&r) {
                    out.push((r, t.ty.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Edges sorted by structural key, ties broken by id.
    pub fn canonical_edges(&self) -> Vec<&Edge> {
        let mut v: Vec<&Edge> = self.edges.values().collect();
        v.sort_by(|a, b| (&a.tuple, &a.values, &a.id).cmp(&(&b.tuple, &b.values, &b.id)));
        v
    }

    /// Adds an unordered wrapper edge of type `wrapper_type` with one target
    /// attached to each existing edge as a whole.
    pub fn wrap(&self, wrapper_type: &str) -> Result<Tmg> {
        if !self.registry.contains(wrapper_type) {
            return Err(MgError::UnknownType(wrapper_type.to_string()));
        }
        let members = self.canonical_edges();
        let targets = members.iter().map(|e| Target::new(1, e.tuple.ty.clone())).collect();
        let id = self.fresh_id(wrapper_type);
        let mut out = self.clone();
        out.insert_edge_unchecked(Edge::new(
            id.clone(),
            TargetTuple::new(wrapper_type, targets),
            vec![],
        ));
        for (i, e) in members.iter().enumerate() {
            out.insert_connection_unchecked(Connection::new(
                TargetRef::new(id.clone(), i as u32 + 1),
                TargetRef::new(e.id.clone(), 0),
            ));
        }
        Ok(out)
    }

    /// Set-theoretic union of edge and connection sets. Edges sharing an id
    /// must be identical.
    pub fn union(&self, other: &Tmg) -> Result<Tmg> {
        let mut out = self.clone();
        for e in other.edges() {
            match out.edges.get(&e.id) {
                Some(existing) if existing != e => {
                    return Err(MgError::DuplicateEdge(e.id.clone()));
                }
                Some(_) => {}
                None => out.insert_edge_unchecked(e.clone()),
            }
        }
        for c in other.connections() {
            out.insert_connection_unchecked(c.clone());
        }
        Ok(out)
    }

    /// The subgraph on `ids` with the connections among them.
    pub fn induced(&self, ids: &BTreeSet<String>) -> Tmg {
        let mut out = Tmg::new(self.registry.clone());
        for id in ids {
            if let Some(e) = self.edges.get(id) {
                out.insert_edge_unchecked(e.clone());
            }
        }
        for c in &self.connections {
            if ids.contains(&c.from.edge) && ids.contains(&c.to.edge) {
                out.insert_connection_unchecked(c.clone());
            }
        }
        out
    }

    /// Shortest sequence of edges from `start` to `end` where neighbours
    /// share a connection (direction ignored). `None` if unreachable.
    pub fn undirected_metapath(&self, start: &str, end: &str) -> Result<Option<Vec<String>>> {
        for id in [start, end] {
            if !self.edges.contains_key(id) {
                return Err(MgError::UnknownEdge(id.to_string()));
            }
        }
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for c in &self.connections {
            adj.entry(&c.from.edge).or_default().insert(&c.to.edge);
            adj.entry(&c.to.edge).or_default().insert(&c.from.edge);
        }
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = BTreeSet::from([start]);
        while let Some(cur) = queue.pop_front() {
            if cur == end {
                let mut path = vec![end.to_string()];
                let mut at = end;
                while let Some(&p) = prev.get(at) {
                    path.push(p.to_string());
                    at = p;
                }
                path.reverse();
                return Ok(Some(path));
            }
            for &n in adj.get(cur).into_iter().flatten() {
                if seen.insert(n) {
                    prev.insert(n, cur);
                    queue.push_back(n);
                }
            }
        }
        Ok(None)
    }

    /// Rename map for making `other`'s ids disjoint from this graph's.
    pub(crate) fn freshen_against(&self, other: &Tmg) -> BTreeMap<String, String> {
        let mut taken: BTreeSet<String> = self.edges.keys().cloned().collect();
        let mut map = BTreeMap::new();
        for id in other.edges.keys() {
            let new = fresh_id_in(id, |c| taken.contains(c));
            taken.insert(new.clone());
            map.insert(id.clone(), new);
        }
        map
    }

    /// Copy with edge ids renamed per `map` (ids not in the map are kept).
    pub(crate) fn renamed(&self, map: &BTreeMap<String, String>) -> Tmg {
        let ren = |id: &String| map.get(id).cloned().unwrap_or_else(|| id.clone());
        let mut out = Tmg::new(self.registry.clone());
        for e in self.edges.values() {
            let mut e = e.clone();
            e.id = ren(&e.id);
            out.insert_edge_unchecked(e);
        }
        for c in &self.connections {
            out.insert_connection_unchecked(Connection::new(
                TargetRef::new(ren(&c.from.edge), c.from.slot),
                TargetRef::new(ren(&c.to.edge), c.to.slot),
            ));
        }
        out
    }

    /// Disjoint union; `other` is renamed where ids clash. Returns the
    /// rename map applied to `other`.
    pub(crate) fn disjoint_union(&self, other: &Tmg) -> (Tmg, BTreeMap<String, String>) {
        let map = self.freshen_against(other);
        let moved = other.renamed(&map);
        let mut out = self.clone();
        out.edges.extend(moved.edges);
        out.connections.extend(moved.connections);
        (out, map)
    }
}

pub(crate) fn fresh_id_in(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    let stem = match base.rsplit_once('_') {
        Some((s, n)) if !s.is_empty() && n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty() => s,
        _ => base,
    };
    (1..)
        .map(|n| format!("{stem}_{n}"))
        .find(|c| !taken(c))
        .expect("unbounded")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Arc<TypeRegistry> {
        let mut r = TypeRegistry::new();
        for t in ["T", "A", "B", "M"] {
            r.declare(t).unwrap();
        }
        Arc::new(r)
    }

    fn binary(id: &str) -> Edge {
        Edge::new(
            id,
            TargetTuple::new("T", vec![Target::new(1, "A"), Target::new(2, "A")]),
            vec![],
        )
    }

    #[test]
    fn empty_graph_is_valid_and_has_no_dangling_targets() {
        let g = Tmg::new(reg());
        assert!(g.validate().is_empty());
        assert!(g.dangling_targets().is_empty());
    }

    #[test]
    fn both_whole_edge_slots_is_one_violation() {
        let mut g = Tmg::new(reg());
        g.add_edge(binary("x")).unwrap();
        g.add_edge(binary("y")).unwrap();
        g.insert_connection_unchecked(Connection::new(TargetRef::new("x", 0), TargetRef::new("y", 0)));
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::BothWholeEdge { .. }));
    }

    #[test]
    fn incomparable_targets_are_one_violation() {
        let mut g = Tmg::new(reg());
        g.add_edge(binary("x")).unwrap();
        g.add_edge(Edge::new("y", TargetTuple::new("T", vec![Target::new(1, "B")]), vec![]))
            .unwrap();
        let c = Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1));
        assert!(matches!(g.add_connection(c.clone()), Err(MgError::TypeMismatch(_, _))));
        g.insert_connection_unchecked(c);
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Incomparable { .. }));
    }

    #[test]
    fn dangling_counts() {
        let mut g = Tmg::new(reg());
        g.add_edge(Edge::new(
            "f",
            TargetTuple::new(
                "T",
                vec![
                    Target::new(1, "A"),
                    Target::new(2, "A"),
                    Target::new(3, "B"),
                    Target::new(3, "B"),
                ],
            ),
            vec![],
        ))
        .unwrap();
        assert_eq!(g.dangling_targets().len(), 4);

        let mut h = Tmg::new(reg());
        h.add_edge(binary("x")).unwrap();
        h.add_edge(binary("y")).unwrap();
        h.add_connection(Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1)))
            .unwrap();
        let d = h.dangling_targets();
        assert_eq!(
            d.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>(),
            vec![TargetRef::new("x", 1), TargetRef::new("y", 2)]
        );
    }

    #[test]
    fn external_targets_of_sub() {
        let mut h = Tmg::new(reg());
        h.add_edge(binary("x")).unwrap();
        h.add_edge(binary("y")).unwrap();
        h.add_connection(Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1)))
            .unwrap();
        let all: BTreeSet<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(h.external_targets(&all).unwrap(), h.dangling_targets());
        assert!(h.external_targets(&BTreeSet::new()).unwrap().is_empty());
        let first: BTreeSet<String> = ["x".to_string()].into();
        let ext: Vec<_> = h.external_targets(&first).unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(ext, vec![TargetRef::new("x", 1), TargetRef::new("x", 2)]);
        let bad: BTreeSet<String> = ["q".to_string()].into();
        assert!(h.external_targets(&bad).is_err());
    }

    #[test]
    fn wrap_adds_unordered_wrapper() {
        let g = Tmg::new(reg());
        let w = g.wrap("M").unwrap();
        assert_eq!(w.edge_count(), 1);
        assert_eq!(w.edges().next().unwrap().arity(), 0);

        let mut one = Tmg::new(reg());
        one.add_edge(binary("x")).unwrap();
        let w1 = one.wrap("M").unwrap();
        assert_eq!((w1.edge_count(), w1.connection_count()), (2, 1));
        assert!(w1.validate().is_empty());

        let mut three = one.clone();
        three.add_edge(binary("y")).unwrap();
        three.add_edge(binary("z")).unwrap();
        let w3 = three.wrap("M").unwrap();
        let m = w3.edges().find(|e| e.tuple.ty == "M").unwrap();
        assert_eq!(m.arity(), 3);
        assert!(m.tuple.targets.iter().all(|t| t.label == 1));
        assert!(w3.validate().is_empty());
        assert!(matches!(three.wrap("Nope"), Err(MgError::UnknownType(_))));
    }

    #[test]
    fn union_is_idempotent() {
        let mut g = Tmg::new(reg());
        g.add_edge(binary("x")).unwrap();
        g.add_edge(binary("y")).unwrap();
        g.add_connection(Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1)))
            .unwrap();
        assert_eq!(g.union(&g).unwrap(), g);
    }

    #[test]
    fn undirected_path_on_chain() {
        let mut g = Tmg::new(reg());
        for id in ["a", "b", "c"] {
            g.add_edge(binary(id)).unwrap();
        }
        g.add_connection(Connection::new(TargetRef::new("a", 2), TargetRef::new("b", 1)))
            .unwrap();
        g.add_connection(Connection::new(TargetRef::new("c", 1), TargetRef::new("b", 2)))
            .unwrap();
        assert_eq!(
            g.undirected_metapath("a", "c").unwrap(),
            Some(vec!["a".into(), "b".into(), "c".into()])
        );
        g.add_edge(binary("d")).unwrap();
        assert_eq!(g.undirected_metapath("a", "d").unwrap(), None);
        assert!(g.undirected_metapath("a", "zz").is_err());
    }

    #[test]
    fn fresh_ids() {
        let taken = ["x", "x_1"];
        assert_eq!(fresh_id_in("x", |c| taken.contains(&c)), "x_2");
        assert_eq!(fresh_id_in("x_1", |c| taken.contains(&c)), "x_2");
        assert_eq!(fresh_id_in("y", |c| taken.contains(&c)), "y");
    }
}
