//! Directed typed metagraphs: a TMG whose external targets are split into
//! ordered input, output and lateral lists.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::edge::{Edge, TargetRef};
use crate::error::{MgError, Result};
use crate::tmg::Tmg;
use crate::types::TypeRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Input,
    Output,
    Lateral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dtmg {
    pub(crate) base: Tmg,
    pub(crate) inputs: Vec<TargetRef>,
    pub(crate) outputs: Vec<TargetRef>,
    pub(crate) lateral: Vec<TargetRef>,
}

impl Dtmg {
    pub fn empty(registry: Arc<TypeRegistry>) -> Self {
        Dtmg {
            base: Tmg::new(registry),
            inputs: vec![],
            outputs: vec![],
            lateral: vec![],
        }
    }

    /// Builds a DTMG after checking that the three lists partition the
    /// dangling targets of `base` exactly.
    pub fn new(
        base: Tmg,
        inputs: Vec<TargetRef>,
        outputs: Vec<TargetRef>,
        lateral: Vec<TargetRef>,
    ) -> Result<Self> {
        let external: BTreeSet<TargetRef> =
            base.dangling_targets().into_iter().map(|(r, _)| r).collect();
        let mut seen = BTreeSet::new();
        let mut duplicated = Vec::new();
        let mut foreign = Vec::new();
        for r in inputs.iter().chain(&outputs).chain(&lateral) {
            if !seen.insert(r.clone()) {
                duplicated.push(r.clone());
            } else if !external.contains(r) {
                foreign.push(r.clone());
            }
        }
        let missing: Vec<TargetRef> = external.difference(&seen).cloned().collect();
        if !(missing.is_empty() && duplicated.is_empty() && foreign.is_empty()) {
            return Err(MgError::Partition {
                missing,
                duplicated,
                foreign,
            });
        }
        Ok(Dtmg {
            base,
            inputs,
            outputs,
            lateral,
        })
    }

    /// Every dangling target becomes lateral.
    pub fn all_lateral(base: Tmg) -> Self {
        let lateral = base.dangling_targets().into_iter().map(|(r, _)| r).collect();
        Dtmg {
            base,
            inputs: vec![],
            outputs: vec![],
            lateral,
        }
    }

    pub fn base(&self) -> &Tmg {
        &self.base
    }

    pub fn registry(&self) -> &Arc<TypeRegistry> {
        self.base.registry()
    }

    pub fn inputs(&self) -> &[TargetRef] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[TargetRef] {
        &self.outputs
    }

    pub fn lateral(&self) -> &[TargetRef] {
        &self.lateral
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.base.edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.base.edges()
    }

    pub(crate) fn target_type(&self, r: &TargetRef) -> Option<&str> {
        self.base.edge(&r.edge).and_then(|e| e.slot_type(r.slot))
    }

    pub fn input_types(&self) -> Vec<String> {
        self.inputs
            .iter()
            .map(|r| self.target_type(r).unwrap_or_default().to_string())
            .collect()
    }

    pub fn output_types(&self) -> Vec<String> {
        self.outputs
            .iter()
            .map(|r| self.target_type(r).unwrap_or_default().to_string())
            .collect()
    }

    /// Role of every target position: listed targets take their list's role;
    /// connected targets are outputs at the source end of a connection and
    /// inputs at the destination end.
    pub fn roles(&self) -> BTreeMap<TargetRef, Role> {
        let mut out = BTreeMap::new();
        for c in self.base.connections() {
            if c.from.slot != 0 {
                out.entry(c.from.clone()).or_insert(Role::Output);
            }
            if c.to.slot != 0 {
                out.entry(c.to.clone()).or_insert(Role::Input);
            }
        }
        for (list, role) in [
            (&self.inputs, Role::Input),
            (&self.outputs, Role::Output),
            (&self.lateral, Role::Lateral),
        ] {
            for r in list {
                out.insert(r.clone(), role);
            }
        }
        out
    }

    /// The sub-DTMG on `ids`. Targets connected to edges outside `ids` become
    /// external: outputs where this side is the connection source, inputs
    /// where it is the destination.
    pub fn restrict(&self, ids: &BTreeSet<String>) -> Result<Dtmg> {
        for id in ids {
            if !self.base.contains_edge(id) {
                return Err(MgError::UnknownEdge(id.clone()));
            }
        }
        let base = self.base.induced(ids);
        let inside = |r: &TargetRef| ids.contains(&r.edge);
        let mut inputs: Vec<TargetRef> = self.inputs.iter().filter(|r| inside(r)).cloned().collect();
        let mut outputs: Vec<TargetRef> = self.outputs.iter().filter(|r| inside(r)).cloned().collect();
        let lateral: Vec<TargetRef> = self.lateral.iter().filter(|r| inside(r)).cloned().collect();
        let mut new_in = BTreeSet::new();
        let mut new_out = BTreeSet::new();
        let internal: BTreeSet<&TargetRef> = base
            .connections()
            .flat_map(|c| [&c.from, &c.to])
            .collect();
        for c in self.base.connections() {
            match (inside(&c.from), inside(&c.to)) {
                (true, false) if c.from.slot != 0 && !internal.contains(&c.from) => {
                    new_out.insert(c.from.clone());
                }
                (false, true) if c.to.slot != 0 && !internal.contains(&c.to) => {
                    new_in.insert(c.to.clone());
                }
                _ => {}
            }
        }
        // a target pulled both ways keeps its first (output) reading
        new_in.retain(|r| !new_out.contains(r));
        inputs.extend(new_in);
        outputs.extend(new_out);
        Dtmg::new(base, inputs, outputs, lateral)
    }

    /// Product of compatibility weights over all connections.
    pub fn metapath_weight(&self) -> f64 {
        let reg = self.registry();
        self.base
            .connections()
            .map(|c| {
                let a = self.target_type(&c.from).unwrap_or_default();
                let b = self.target_type(&c.to).unwrap_or_default();
                reg.comparable_weight(a, b).unwrap_or(0.0)
            })
            .product()
    }

    pub(crate) fn renamed(&self, map: &BTreeMap<String, String>) -> Dtmg {
        let ren = |r: &TargetRef| TargetRef::new(map.get(&r.edge).cloned().unwrap_or_else(|| r.edge.clone()), r.slot);
        Dtmg {
            base: self.base.renamed(map),
            inputs: self.inputs.iter().map(ren).collect(),
            outputs: self.outputs.iter().map(ren).collect(),
            lateral: self.lateral.iter().map(ren).collect(),
        }
    }
}

fn joined(host: &Tmg, a: &TargetRef, b: &TargetRef) -> bool {
    host.connections_at(a).any(|c| &c.from == b || &c.to == b)
}

/// `g2` provides input to `g` in `host`: every input of `g` is joined to
/// some output of `g2`.
pub fn provides_input(host: &Tmg, g2: &Dtmg, g: &Dtmg) -> bool {
    g.inputs
        .iter()
        .all(|i| g2.outputs.iter().any(|o| joined(host, i, o)))
}

/// `g3` receives output from `g` in `host`: every output of `g` is joined
/// to some input of `g3`.
pub fn receives_output(host: &Tmg, g3: &Dtmg, g: &Dtmg) -> bool {
    g.outputs
        .iter()
        .all(|o| g3.inputs.iter().any(|i| joined(host, o, i)))
}

/// `g` forms a metapath from `g2` to `g3`.
pub fn is_metapath(host: &Tmg, g: &Dtmg, g2: &Dtmg, g3: &Dtmg) -> bool {
    provides_input(host, g2, g) && receives_output(host, g3, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Connection, Target, TargetTuple};

    fn reg(weighted: bool) -> Arc<TypeRegistry> {
        let mut r = TypeRegistry::new();
        r.declare("T").unwrap();
        r.declare("A").unwrap();
        r.declare_with_parent("B", "A", if weighted { 0.5 } else { 1.0 }).unwrap();
        r.declare_with_parent("C", "A", if weighted { 0.2 } else { 1.0 }).unwrap();
        Arc::new(r)
    }

    fn edge(id: &str, tys: &[&str]) -> Edge {
        Edge::new(
            id,
            TargetTuple::new(
                "T",
                tys.iter().enumerate().map(|(i, t)| Target::new(i as u32 + 1, *t)).collect(),
            ),
            vec![],
        )
    }

    fn r(e: &str, s: u32) -> TargetRef {
        TargetRef::new(e, s)
    }

    fn typed_pair(reg: Arc<TypeRegistry>) -> Tmg {
        let mut g = Tmg::new(reg);
        g.add_edge(edge("x", &["A", "A"])).unwrap();
        g.add_edge(edge("y", &["A", "A"])).unwrap();
        g.add_connection(Connection::new(r("x", 2), r("y", 1))).unwrap();
        g
    }

    #[test]
    fn binary_edge_as_multigraph_link() {
        let mut g = Tmg::new(reg(false));
        g.add_edge(edge("x", &["A", "A"])).unwrap();
        let d = Dtmg::new(g, vec![r("x", 1)], vec![r("x", 2)], vec![]).unwrap();
        assert_eq!(d.inputs(), &[r("x", 1)]);
        let empty = Dtmg::new(Tmg::new(reg(false)), vec![], vec![], vec![]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn four_target_split_and_partition_errors() {
        let mut g = Tmg::new(reg(false));
        g.add_edge(Edge::new(
            "f",
            TargetTuple::new(
                "T",
                vec![Target::new(1, "A"), Target::new(2, "B"), Target::new(3, "C"), Target::new(3, "C")],
            ),
            vec![],
        ))
        .unwrap();
        assert!(Dtmg::new(g.clone(), vec![r("f", 1)], vec![r("f", 2)], vec![r("f", 3), r("f", 4)]).is_ok());
        match Dtmg::new(g, vec![r("f", 1), r("f", 1)], vec![r("f", 2)], vec![r("f", 3)]) {
            Err(MgError::Partition { missing, duplicated, .. }) => {
                assert_eq!(missing, vec![r("f", 4)]);
                assert_eq!(duplicated, vec![r("f", 1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn provides_input_on_typed_pair() {
        let host = typed_pair(reg(false));
        let d = Dtmg::all_lateral(host.clone());
        let x = d.restrict(&["x".to_string()].into()).unwrap();
        let y = d.restrict(&["y".to_string()].into()).unwrap();
        assert_eq!(x.outputs(), &[r("x", 2)]);
        assert_eq!(y.inputs(), &[r("y", 1)]);
        assert!(provides_input(&host, &x, &y));
        assert!(receives_output(&host, &y, &x));
        // vacuous: x has no inputs
        assert!(provides_input(&host, &y, &x));

        let mut cut = host.clone();
        cut.remove_connection(&Connection::new(r("x", 2), r("y", 1)));
        assert!(!provides_input(&cut, &x, &y));
    }

    #[test]
    fn weights() {
        assert_eq!(Dtmg::all_lateral(typed_pair(reg(false))).metapath_weight(), 1.0);
        let w = reg(true);
        let mut g = Tmg::new(w.clone());
        g.add_edge(edge("x", &["B", "C"])).unwrap();
        g.add_edge(edge("y", &["A", "A"])).unwrap();
        g.add_connection(Connection::new(r("x", 1), r("y", 1))).unwrap();
        assert!((Dtmg::all_lateral(g.clone()).metapath_weight() - 0.5).abs() < 1e-12);
        g.add_connection(Connection::new(r("x", 2), r("y", 2))).unwrap();
        assert!((Dtmg::all_lateral(g).metapath_weight() - 0.1).abs() < 1e-12);
    }
}
