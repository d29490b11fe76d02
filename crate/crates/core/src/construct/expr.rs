//! Construction expressions over the five constructors, their evaluation to
//! DTMGs, and decomposition of a DTMG back into an expression.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::crf::Crf;
use crate::construct::ops;
use crate::dtmg::{Dtmg, Role};
use crate::edge::{Edge, TargetRef, TargetTuple};
use crate::error::{MgError, Result};
use crate::tmg::fresh_id_in;
use crate::types::TypeRegistry;
use crate::value::Value;

/// An edge constructor with its port assignment. Slots listed in neither
/// `inputs` nor `outputs` are lateral.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLeaf {
    pub name: Option<String>,
    pub tuple: TargetTuple,
    pub values: Vec<Value>,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

impl EdgeLeaf {
    pub fn lateral(tuple: TargetTuple, values: Vec<Value>) -> Self {
        EdgeLeaf {
            name: None,
            tuple,
            values,
            inputs: vec![],
            outputs: vec![],
        }
    }

    pub fn directed(
        name: impl Into<String>,
        tuple: TargetTuple,
        values: Vec<Value>,
        inputs: Vec<u32>,
        outputs: Vec<u32>,
    ) -> Self {
        EdgeLeaf {
            name: Some(name.into()),
            tuple,
            values,
            inputs,
            outputs,
        }
    }

    pub fn hint(&self) -> String {
        self.name.clone().unwrap_or_else(|| ops::default_id(&self.tuple))
    }

    pub fn lateral_slots(&self) -> Vec<u32> {
        (1..=self.tuple.arity() as u32)
            .filter(|s| !self.inputs.contains(s) && !self.outputs.contains(s))
            .collect()
    }

    fn check_ports(&self) -> Result<()> {
        let n = self.tuple.arity();
        let mut seen = BTreeSet::new();
        for &s in self.inputs.iter().chain(&self.outputs) {
            if s == 0 || s as usize > n {
                return Err(MgError::Range {
                    context: format!("port of a `{}` edge", self.tuple.ty),
                    index: s as usize,
                    limit: n,
                });
            }
            if !seen.insert(s) {
                return Err(MgError::Arity(format!("slot {s} assigned to two ports")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, registry: Arc<TypeRegistry>, id: &str) -> Result<Dtmg> {
        self.check_ports()?;
        ops::directed_edge(
            registry,
            id,
            self.tuple.clone(),
            self.values.clone(),
            &self.inputs,
            &self.outputs,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstructionExpr {
    Empty,
    Edge(EdgeLeaf),
    Beside(Box<ConstructionExpr>, Box<ConstructionExpr>),
    Connect(Crf, Box<ConstructionExpr>, Box<ConstructionExpr>),
    /// The symmetry wiring with an `a`-block and a `b`-block of ports.
    Swap { left: usize, right: usize },
}

use ConstructionExpr as X;

impl ConstructionExpr {
    pub fn edge(leaf: EdgeLeaf) -> Self {
        X::Edge(leaf)
    }

    pub fn beside(l: Self, r: Self) -> Self {
        X::Beside(Box::new(l), Box::new(r))
    }

    pub fn connect(p: Crf, l: Self, r: Self) -> Self {
        X::Connect(p, Box::new(l), Box::new(r))
    }

    pub fn size(&self) -> usize {
        match self {
            X::Empty | X::Edge(_) | X::Swap { .. } => 1,
            X::Beside(l, r) | X::Connect(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            X::Empty | X::Edge(_) | X::Swap { .. } => 0,
            X::Beside(l, r) | X::Connect(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<&EdgeLeaf> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a EdgeLeaf>) {
        match self {
            X::Edge(l) => out.push(l),
            X::Beside(l, r) | X::Connect(_, l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for ConstructionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            X::Empty => f.write_str("(empty)"),
            X::Edge(l) => write!(f, "(edge {})", l.hint()),
            X::Beside(l, r) => write!(f, "(beside {l} {r})"),
            X::Connect(p, l, r) => write!(f, "(connect {p} {l} {r})"),
            X::Swap { left, right } => write!(f, "(swap {left} {right})"),
        }
    }
}

/// Evaluates an expression. Leaf names become edge ids, freshened where two
/// leaves share a name.
pub fn eval(registry: &Arc<TypeRegistry>, x: &ConstructionExpr) -> Result<Dtmg> {
    eval_with_ids(registry, x).map(|(d, _)| d)
}

/// As [`eval`], also returning the id assigned to each leaf in left-to-right
/// order.
pub fn eval_with_ids(registry: &Arc<TypeRegistry>, x: &ConstructionExpr) -> Result<(Dtmg, Vec<String>)> {
    let mut taken = BTreeSet::new();
    let mut ids = Vec::new();
    let d = eval_in(registry, x, &mut taken, &mut ids)?;
    Ok((d, ids))
}

fn eval_in(
    reg: &Arc<TypeRegistry>,
    x: &ConstructionExpr,
    taken: &mut BTreeSet<String>,
    ids: &mut Vec<String>,
) -> Result<Dtmg> {
    let claim = |hint: &str, taken: &mut BTreeSet<String>| {
        let id = fresh_id_in(hint, |c| taken.contains(c));
        taken.insert(id.clone());
        id
    };
    match x {
        X::Empty => Ok(ops::empty(reg.clone())),
        X::Edge(leaf) => {
            let id = claim(&leaf.hint(), taken);
            ids.push(id.clone());
            leaf.eval(reg.clone(), &id)
        }
        X::Swap { left, right } => {
            let w = ops::swap_wiring(reg.clone(), *left, *right);
            let map: BTreeMap<String, String> = w
                .base
                .edge_ids()
                .map(|id| (id.to_string(), claim("w", taken)))
                .collect();
            Ok(w.renamed(&map))
        }
        X::Beside(l, r) => {
            let l = eval_in(reg, l, taken, ids)?;
            let r = eval_in(reg, r, taken, ids)?;
            ops::beside(&l, &r)
        }
        X::Connect(p, l, r) => {
            let l = eval_in(reg, l, taken, ids)?;
            let r = eval_in(reg, r, taken, ids)?;
            ops::connect(&l, p, &r)
        }
    }
}

/// Order in which [`decompose_with`] folds edges in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Sources first, ties broken by canonical edge order; each new edge is
    /// connected onto the right of the accumulated expression.
    Canonical,
    /// Sinks first; each new edge is connected onto the left.
    Reverse,
    /// As `Canonical` with ties broken by a seeded shuffle.
    Seeded(u64),
}

/// Canonical decomposition: `eval(decompose(d))` is isomorphic to `d` with
/// port lists compared as sets.
pub fn decompose(d: &Dtmg) -> Result<ConstructionExpr> {
    decompose_with(d, Strategy::Canonical)
}

pub fn decompose_with(d: &Dtmg, strategy: Strategy) -> Result<ConstructionExpr> {
    if d.is_empty() {
        return Ok(X::Empty);
    }
    let g = d.base();
    let mut uses: HashMap<&TargetRef, usize> = HashMap::new();
    for c in g.connections() {
        if !c.is_target_to_target() {
            return Err(MgError::NotConstructible(format!("whole-edge connection {c}")));
        }
        if c.from.edge == c.to.edge {
            return Err(MgError::NotConstructible(format!("edge `{}` feeds itself", c.from.edge)));
        }
        for r in [&c.from, &c.to] {
            let n = uses.entry(r).or_default();
            *n += 1;
            if *n > 1 {
                return Err(MgError::NotConstructible(format!("target {r} joins several connections")));
            }
        }
    }
    let order = topological(d, strategy)?;
    let roles = d.roles();
    let rank = |r: &TargetRef, list: &[TargetRef]| list.iter().position(|x| x == r).unwrap_or(usize::MAX);
    let leaf_of = |e: &Edge| {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for s in 1..=e.arity() as u32 {
            let r = TargetRef::new(e.id.clone(), s);
            match roles.get(&r) {
                Some(Role::Input) => inputs.push(s),
                Some(Role::Output) => outputs.push(s),
                _ => {}
            }
        }
        let key = |s: &u32, list: &[TargetRef]| {
            let r = TargetRef::new(e.id.clone(), *s);
            (rank(&r, list), *s)
        };
        inputs.sort_by_key(|s| key(s, d.inputs()));
        outputs.sort_by_key(|s| key(s, d.outputs()));
        EdgeLeaf::directed(e.id.clone(), e.tuple.clone(), e.values.clone(), inputs, outputs)
    };
    let reg = d.registry().clone();
    let forward = !matches!(strategy, Strategy::Reverse);
    let mut acc: Option<(ConstructionExpr, Dtmg)> = None;
    for id in order {
        let e = g.edge(&id).expect("listed edge");
        let leaf = leaf_of(e);
        let leaf_d = leaf.eval(reg.clone(), &id)?;
        let leaf_x = X::Edge(leaf);
        acc = Some(match acc {
            None => (leaf_x, leaf_d),
            Some((ax, ad)) => {
                let (up, down) = if forward { (&ad, &leaf_d) } else { (&leaf_d, &ad) };
                let mut pairs = Vec::new();
                for c in g.connections() {
                    let o = up.outputs().iter().position(|r| r == &c.from);
                    let i = down.inputs().iter().position(|r| r == &c.to);
                    if let (Some(o), Some(i)) = (o, i) {
                        pairs.push((o + 1, i + 1));
                    }
                }
                let p = Crf::new(pairs)?;
                let joined = ops::connect(up, &p, down)?;
                let (lx, rx) = if forward { (ax, leaf_x) } else { (leaf_x, ax) };
                let x = if p.is_empty() {
                    X::beside(lx, rx)
                } else {
                    X::connect(p, lx, rx)
                };
                (x, joined)
            }
        });
    }
    Ok(acc.expect("nonempty").0)
}

fn topological(d: &Dtmg, strategy: Strategy) -> Result<Vec<String>> {
    let g = d.base();
    let mut tie: Vec<&str> = g.canonical_edges().into_iter().map(|e| e.id.as_str()).collect();
    if let Strategy::Seeded(seed) = strategy {
        tie.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let prio: HashMap<&str, usize> = tie.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let reverse = strategy == Strategy::Reverse;
    let mut indeg: HashMap<&str, usize> = tie.iter().map(|id| (*id, 0)).collect();
    let mut succ: HashMap<&str, Vec<&str>> = HashMap::new();
    for c in g.connections() {
        let (a, b) = if reverse {
            (c.to.edge.as_str(), c.from.edge.as_str())
        } else {
            (c.from.edge.as_str(), c.to.edge.as_str())
        };
        *indeg.get_mut(b).expect("edge") += 1;
        succ.entry(a).or_default().push(b);
    }
    let mut ready: BTreeSet<(usize, &str)> = indeg
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(id, _)| (prio[id], *id))
        .collect();
    let mut out = Vec::new();
    while let Some(first) = ready.pop_first() {
        out.push(first.1.to_string());
        for b in succ.get(first.1).into_iter().flatten() {
            let n = indeg.get_mut(b).expect("edge");
            *n -= 1;
            if *n == 0 {
                ready.insert((prio[b], b));
            }
        }
    }
    if out.len() != tie.len() {
        return Err(MgError::NotConstructible("connections form a directed cycle".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Connection, Target};
    use crate::iso::isomorphic_loose;
    use crate::tmg::Tmg;

    fn reg() -> Arc<TypeRegistry> {
        let mut r = TypeRegistry::new();
        r.declare("A").unwrap();
        Arc::new(r)
    }

    fn tuple() -> TargetTuple {
        TargetTuple::new("A", vec![Target::new(1, "A"), Target::new(2, "A")])
    }

    fn arrow(id: &str) -> ConstructionExpr {
        X::Edge(EdgeLeaf::directed(id, tuple(), vec![], vec![1], vec![2]))
    }

    #[test]
    fn trivial_decompositions() {
        let r = reg();
        assert_eq!(decompose(&Dtmg::empty(r.clone())).unwrap(), X::Empty);
        let one = eval(&r, &arrow("x")).unwrap();
        assert!(matches!(decompose(&one).unwrap(), X::Edge(_)));
    }

    #[test]
    fn typed_pair_round_trip() {
        let r = reg();
        let x = X::connect(Crf::identity(1), arrow("x"), arrow("y"));
        let d = eval(&r, &x).unwrap();
        let back = decompose(&d).unwrap();
        assert_eq!(back.to_string(), "(connect [1>1] (edge x) (edge y))");
        assert!(isomorphic_loose(&eval(&r, &back).unwrap(), &d));
        for s in [Strategy::Reverse, Strategy::Seeded(7)] {
            assert!(isomorphic_loose(&eval(&r, &decompose_with(&d, s).unwrap()).unwrap(), &d));
        }
    }

    #[test]
    fn duplicate_names_are_freshened() {
        let r = reg();
        let (d, ids) = eval_with_ids(&r, &X::beside(arrow("x"), arrow("x"))).unwrap();
        assert_eq!(ids, vec!["x", "x_1"]);
        assert_eq!(d.edge_count(), 2);
    }

    #[test]
    fn cycles_are_not_constructible() {
        let r = reg();
        let mut g = Tmg::new(r);
        for id in ["x", "y"] {
            g.add_edge(Edge::new(id, tuple(), vec![])).unwrap();
        }
        g.add_connection(Connection::new(TargetRef::new("x", 2), TargetRef::new("y", 1))).unwrap();
        g.add_connection(Connection::new(TargetRef::new("y", 2), TargetRef::new("x", 1))).unwrap();
        let d = Dtmg::all_lateral(g);
        assert!(matches!(decompose(&d), Err(MgError::NotConstructible(_))));
    }
}
