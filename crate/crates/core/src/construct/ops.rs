//! The DTMG constructors: empty, edge, beside, connect and swap wiring.

use std::sync::Arc;

use crate::construct::crf::Crf;
use crate::dtmg::Dtmg;
use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
use crate::error::{MgError, Result};
use crate::tmg::Tmg;
use crate::types::{TypeRegistry, ROOT};
use crate::value::Value;

pub fn empty(registry: Arc<TypeRegistry>) -> Dtmg {
    Dtmg::empty(registry)
}

/// Single-edge DTMG with every target lateral.
pub fn edge_c(registry: Arc<TypeRegistry>, tuple: TargetTuple, values: Vec<Value>) -> Result<Dtmg> {
    let id = default_id(&tuple);
    directed_edge(registry, &id, tuple, values, &[], &[])
}

/// Single-edge DTMG whose listed slots are inputs and outputs, in the given
/// order; remaining targets are lateral.
pub fn directed_edge(
    registry: Arc<TypeRegistry>,
    id: &str,
    tuple: TargetTuple,
    values: Vec<Value>,
    inputs: &[u32],
    outputs: &[u32],
) -> Result<Dtmg> {
    tuple.check(&registry)?;
    let n = tuple.arity() as u32;
    let mut g = Tmg::new(registry);
    g.insert_edge_unchecked(Edge::new(id, tuple, values));
    let r = |s: &u32| TargetRef::new(id, *s);
    let lateral = (1..=n)
        .filter(|s| !inputs.contains(s) && !outputs.contains(s))
        .map(|s| r(&s))
        .collect();
    Dtmg::new(g, inputs.iter().map(r).collect(), outputs.iter().map(r).collect(), lateral)
}

pub(crate) fn default_id(tuple: &TargetTuple) -> String {
    let stem: String = tuple
        .ty
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect::<String>()
        .to_lowercase();
    if stem.is_empty() || stem.starts_with(|c: char| c.is_ascii_digit()) {
        format!("x{stem}")
    } else {
        stem
    }
}

fn same_registry(g: &Dtmg, h: &Dtmg) -> Result<()> {
    if Arc::ptr_eq(g.registry(), h.registry()) || g.registry() == h.registry() {
        Ok(())
    } else {
        Err(MgError::TypeDecl("operands use different type registries".into()))
    }
}

/// `g ∥ h`: disjoint union with `h`'s clashing ids freshened; port lists are
/// concatenated in `(g, h)` order.
pub fn beside(g: &Dtmg, h: &Dtmg) -> Result<Dtmg> {
    same_registry(g, h)?;
    let (base, map) = g.base.disjoint_union(&h.base);
    let h = h.renamed(&map);
    let cat = |a: &[TargetRef], b: &[TargetRef]| a.iter().chain(b).cloned().collect::<Vec<_>>();
    Ok(Dtmg {
        base,
        inputs: cat(&g.inputs, &h.inputs),
        outputs: cat(&g.outputs, &h.outputs),
        lateral: cat(&g.lateral, &h.lateral),
    })
}

/// `m × g`, the `m`-fold beside of `g` with itself.
pub fn times(m: usize, g: &Dtmg) -> Result<Dtmg> {
    if m == 0 {
        return Err(MgError::Arity("times needs a positive multiplier".into()));
    }
    let mut acc = g.clone();
    for _ in 1..m {
        acc = beside(&acc, g)?;
    }
    Ok(acc)
}

/// `g ⋈_p h`: each pair `(o, i)` of `p` joins `g`'s `o`-th output to `h`'s
/// `i`-th input. Unmatched inputs of `h` follow `g`'s inputs; unmatched
/// outputs of `g` precede `h`'s outputs.
pub fn connect(g: &Dtmg, p: &Crf, h: &Dtmg) -> Result<Dtmg> {
    same_registry(g, h)?;
    p.check_bounds(g.outputs.len(), h.inputs.len())?;
    let (mut base, map) = g.base.disjoint_union(&h.base);
    let h = h.renamed(&map);
    let reg = g.registry().clone();
    for &(o, i) in p.pairs() {
        let from = &g.outputs[o - 1];
        let to = &h.inputs[i - 1];
        let tf = g.target_type(from).unwrap_or_default();
        let tt = h.target_type(to).unwrap_or_default();
        if !reg.comparable(tf, tt)? {
            return Err(MgError::TypeMismatch(
                format!("{tf} at output {o} ({from})"),
                format!("{tt} at input {i} ({to})"),
            ));
        }
        base.insert_connection_unchecked(Connection::new(from.clone(), to.clone()));
    }
    let mut inputs = g.inputs.clone();
    inputs.extend(
        h.inputs
            .iter()
            .enumerate()
            .filter(|(i, _)| !p.pairs().iter().any(|x| x.1 == i + 1))
            .map(|(_, r)| r.clone()),
    );
    let mut outputs: Vec<TargetRef> = g
        .outputs
        .iter()
        .enumerate()
        .filter(|(o, _)| p.input_for(o + 1).is_none())
        .map(|(_, r)| r.clone())
        .collect();
    outputs.extend(h.outputs.iter().cloned());
    let mut lateral = g.lateral.clone();
    lateral.extend(h.lateral.iter().cloned());
    Ok(Dtmg {
        base,
        inputs,
        outputs,
        lateral,
    })
}

/// The root-typed binary tuple `e (1:e, 2:e)` used for wiring.
pub fn wire_tuple() -> TargetTuple {
    TargetTuple::new(ROOT, vec![Target::new(1, ROOT), Target::new(2, ROOT)])
}

/// `n` parallel wires: input `i` passes straight to output `i`.
pub fn identity_wires(registry: Arc<TypeRegistry>, n: usize) -> Dtmg {
    swap_wiring(registry, n, 0)
}

/// Identity on `g`: one root-typed wire from `g`'s first input to its first
/// output, or the empty DTMG when `g` has no inputs.
pub fn identity_dtmg(g: &Dtmg) -> Dtmg {
    identity_wires(g.registry().clone(), g.inputs.len().min(1))
}

/// `γ_{a,b}`: `a + b` wires whose inputs come in blocks `[a | b]` and whose
/// outputs come in blocks `[b | a]`.
pub fn swap_wiring(registry: Arc<TypeRegistry>, a: usize, b: usize) -> Dtmg {
    let mut g = Tmg::new(registry);
    let ids: Vec<String> = (0..a + b)
        .map(|i| {
            let id = format!("w{}", i + 1);
            g.insert_edge_unchecked(Edge::new(id.clone(), wire_tuple(), vec![]));
            id
        })
        .collect();
    let inputs = ids.iter().map(|id| TargetRef::new(id.clone(), 1)).collect();
    let outputs = ids[a..]
        .iter()
        .chain(&ids[..a])
        .map(|id| TargetRef::new(id.clone(), 2))
        .collect();
    Dtmg {
        base: g,
        inputs,
        outputs,
        lateral: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::{contract_wires, isomorphic};

    fn reg() -> Arc<TypeRegistry> {
        let mut r = TypeRegistry::new();
        for t in ["T", "T1", "T2", "T3", "T4", "A", "B"] {
            r.declare(t).unwrap();
        }
        Arc::new(r)
    }

    fn four_target(reg: Arc<TypeRegistry>) -> Dtmg {
        edge_c(
            reg,
            TargetTuple::new(
                "T",
                vec![Target::new(1, "T1"), Target::new(2, "T2"), Target::new(3, "T3"), Target::new(3, "T4")],
            ),
            vec![],
        )
        .unwrap()
    }

    fn arrow(reg: Arc<TypeRegistry>, id: &str, ty: &str) -> Dtmg {
        directed_edge(
            reg,
            id,
            TargetTuple::new("T", vec![Target::new(1, ty), Target::new(2, ty)]),
            vec![],
            &[1],
            &[2],
        )
        .unwrap()
    }

    #[test]
    fn edge_targets_start_lateral() {
        let d = four_target(reg());
        assert_eq!(d.lateral().len(), 4);
        let z = edge_c(reg(), TargetTuple::new("T", vec![]), vec![Value::Int(42)]).unwrap();
        assert_eq!(z.edge_count(), 1);
        assert!(z.lateral().is_empty());
        assert!(edge_c(reg(), TargetTuple::new("Q", vec![]), vec![]).is_err());
    }

    #[test]
    fn beside_concatenates_and_unit() {
        let r = reg();
        let d = four_target(r.clone());
        let dd = beside(&d, &d).unwrap();
        assert_eq!(dd.edge_count(), 2);
        assert_eq!(times(3, &d).unwrap().base().dangling_targets().len(), 12);
        assert!(isomorphic(&beside(&empty(r.clone()), &d).unwrap(), &d));
        assert!(isomorphic(&beside(&d, &empty(r)).unwrap(), &d));
    }

    #[test]
    fn connect_typed_pair_and_type_errors() {
        let r = reg();
        let x = arrow(r.clone(), "x", "A");
        let y = arrow(r.clone(), "y", "A");
        let c = connect(&x, &Crf::identity(1), &y).unwrap();
        assert_eq!(c.base().connection_count(), 1);
        assert_eq!(c.inputs().len(), 1);
        assert_eq!(c.outputs().len(), 1);
        assert!(isomorphic(&connect(&x, &Crf::empty(), &y).unwrap(), &beside(&x, &y).unwrap()));
        let z = arrow(r, "z", "B");
        assert!(matches!(connect(&x, &Crf::identity(1), &z), Err(MgError::TypeMismatch(..))));
        assert!(matches!(connect(&x, &Crf::identity(2), &y), Err(MgError::Range { .. })));
    }

    #[test]
    fn swap_law_on_arrows() {
        let r = reg();
        let g = arrow(r.clone(), "g", "A");
        let h = times(2, &arrow(r.clone(), "h", "B")).unwrap();
        let left = swap_wiring(r.clone(), h.inputs().len(), g.inputs().len());
        let right = swap_wiring(r, g.outputs().len(), h.outputs().len());
        let gh = beside(&g, &h).unwrap();
        let lhs = connect(&connect(&left, &Crf::identity(3), &gh).unwrap(), &Crf::identity(3), &right).unwrap();
        assert!(isomorphic(&contract_wires(&lhs), &beside(&h, &g).unwrap()));
    }
}
