//! Graphviz export. Edges become nodes and connections become arcs
//! labelled with their slot pair.

use std::fmt::Write as _;

use crate::dtmg::Dtmg;
use crate::morph::history::{HistoryForest, HistoryNode};
use crate::tmg::Tmg;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn body(g: &Tmg, port_note: impl Fn(&str) -> String, out: &mut String) {
    for e in g.canonical_edges() {
        let label = format!("{} : {}{}", e.id, e.tuple.ty, port_note(&e.id));
        let _ = writeln!(out, "  {} [shape=box, label={}];", quote(&e.id), quote(&label));
    }
    for c in g.connections() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&c.from.edge),
            quote(&c.to.edge),
            quote(&format!("{}→{}", c.from.slot, c.to.slot))
        );
    }
}

pub fn tmg_to_dot(g: &Tmg) -> String {
    let mut s = String::from("digraph tmg {\n");
    body(g, |_| String::new(), &mut s);
    s.push_str("}\n");
    s
}

/// As [`tmg_to_dot`], with each node listing its input and output slots.
pub fn dtmg_to_dot(d: &Dtmg) -> String {
    let slots = |list: &[crate::edge::TargetRef], id: &str| -> Vec<String> {
        list.iter().filter(|r| r.edge == id).map(|r| r.slot.to_string()).collect()
    };
    let note = |id: &str| {
        let (i, o) = (slots(d.inputs(), id), slots(d.outputs(), id));
        let mut n = String::new();
        if !i.is_empty() {
            let _ = write!(n, "\\nin {}", i.join(","));
        }
        if !o.is_empty() {
            let _ = write!(n, "\\nout {}", o.join(","));
        }
        n
    };
    let mut s = String::from("digraph dtmg {\n");
    body(d.base(), note, &mut s);
    s.push_str("}\n");
    s
}

/// History trees: one node per history node, labelled with its DTMG's
/// edges; each link is a junction point where the roots of both child
/// forests meet the parent, and the arc into the parent carries the crf.
pub fn history_to_dot(h: &HistoryForest) -> String {
    let mut s = String::from("digraph history {\n");
    let mut next = 0usize;
    let mut junctions = 0usize;
    for t in &h.trees {
        node(t, &mut next, &mut junctions, &mut s);
    }
    s.push_str("}\n");
    s
}

fn node(n: &HistoryNode, next: &mut usize, junctions: &mut usize, s: &mut String) -> String {
    let id = format!("n{next}");
    *next += 1;
    let mut ids: Vec<&str> = n.label.base().edge_ids().collect();
    ids.sort();
    let label = if ids.is_empty() {
        "(empty)".to_string()
    } else {
        format!("{{{}}}", ids.join(","))
    };
    let _ = writeln!(s, "  {id} [label={}];", quote(&label));
    if let Some(link) = &n.link {
        let j = format!("j{junctions}");
        *junctions += 1;
        let _ = writeln!(s, "  {j} [shape=point];");
        for (side, f) in [("L", &link.left), ("R", &link.right)] {
            for t in &f.trees {
                let c = node(t, next, junctions, s);
                let _ = writeln!(s, "  {c} -> {j} [label={}];", quote(side));
            }
        }
        let _ = writeln!(s, "  {j} -> {id} [label={}];", quote(&link.crf.to_string()));
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::crf::Crf;
    use crate::construct::expr::{ConstructionExpr, EdgeLeaf};
    use crate::edge::{Target, TargetTuple};
    use crate::morph::algebra::Rebuild;
    use crate::morph::history::{histo, Oblivious};
    use crate::types::TypeRegistry;
    use std::sync::Arc;

    fn arrow(id: &str) -> ConstructionExpr {
        ConstructionExpr::Edge(EdgeLeaf::directed(
            id,
            TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]),
            vec![],
            vec![1],
            vec![2],
        ))
    }

    #[test]
    fn typed_pair_dot() {
        let reg = Arc::new(TypeRegistry::new());
        let x = ConstructionExpr::connect(Crf::identity(1), arrow("x"), arrow("y"));
        let d = crate::construct::expr::eval(&reg, &x).unwrap();
        let dot = dtmg_to_dot(&d);
        assert_eq!(dot.matches("shape=box").count(), 2);
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.contains("label=\"2→1\""));
    }

    #[test]
    fn one_fan_in() {
        let reg = Arc::new(TypeRegistry::new());
        let x = ConstructionExpr::connect(Crf::identity(1), arrow("x"), arrow("y"));
        let (_, h) = histo(&Oblivious(Rebuild), &reg, &x).unwrap();
        assert_eq!(h.node_count(), 3);
        let dot = history_to_dot(&h);
        assert_eq!(dot.matches("shape=point").count(), 1);
        assert_eq!(dot.matches("-> j0").count(), 2);
        assert_eq!(dot.matches("j0 ->").count(), 1);
    }
}
