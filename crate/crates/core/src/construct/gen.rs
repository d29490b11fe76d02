//! Seeded random generators for registries, expressions and DTMGs.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::crf::Crf;
use crate::construct::expr::{eval, ConstructionExpr, EdgeLeaf};
use crate::dtmg::Dtmg;
use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
use crate::error::Result;
use crate::tmg::Tmg;
use crate::types::{TypeRegistry, ROOT};
use crate::value::Value;

/// `e; A:e; B:A; C:A; D:e; E:D; F:E; M:e`, all weights 1.
pub fn crisp_registry() -> Arc<TypeRegistry> {
    let mut r = TypeRegistry::new();
    for (t, p) in [("A", ROOT), ("B", "A"), ("C", "A"), ("D", ROOT), ("E", "D"), ("F", "E"), ("M", ROOT)] {
        r.declare_with_parent(t, p, 1.0).expect("fixed registry");
    }
    Arc::new(r)
}

#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_depth: usize,
    pub max_arity: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_depth: 6,
            max_arity: 4,
        }
    }
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub registry: Arc<TypeRegistry>,
    types: Vec<String>,
    pub bounds: Bounds,
    counter: usize,
}

impl Gen {
    pub fn new(seed: u64, registry: Arc<TypeRegistry>, bounds: Bounds) -> Self {
        let types = registry.names().map(str::to_string).collect();
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            registry,
            types,
            bounds,
            counter: 0,
        }
    }

    pub fn crisp(seed: u64) -> Self {
        Gen::new(seed, crisp_registry(), Bounds::default())
    }

    fn pick_type(&mut self) -> String {
        self.types.choose(&mut self.rng).expect("registry holds e").clone()
    }

    fn edge_type(&mut self) -> String {
        loop {
            let t = self.pick_type();
            if t != ROOT || self.types.len() == 1 {
                return t;
            }
        }
    }

    fn name(&mut self) -> String {
        self.counter += 1;
        format!("x{}", self.counter)
    }

    pub fn tuple(&mut self, arity: usize) -> TargetTuple {
        let ty = self.edge_type();
        let shared = arity > 1 && self.rng.gen_bool(0.15);
        let targets = (0..arity)
            .map(|i| {
                let label = if shared { 1 } else { i as u32 + 1 };
                Target::new(label, self.pick_type())
            })
            .collect();
        TargetTuple::new(ty, targets)
    }

    pub fn values(&mut self) -> Vec<Value> {
        match self.rng.gen_range(0..4) {
            0 => vec![Value::Int(self.rng.gen_range(0..3))],
            1 => vec![Value::Text(["a", "b"][self.rng.gen_range(0..2)].into())],
            _ => vec![],
        }
    }

    /// A leaf with random ports: each slot is input, output or lateral.
    pub fn leaf(&mut self) -> EdgeLeaf {
        let arity = self.rng.gen_range(0..=self.bounds.max_arity);
        let tuple = self.tuple(arity);
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for s in 1..=arity as u32 {
            match self.rng.gen_range(0..5) {
                0 | 1 => inputs.push(s),
                2 | 3 => outputs.push(s),
                _ => {}
            }
        }
        inputs.shuffle(&mut self.rng);
        outputs.shuffle(&mut self.rng);
        let values = self.values();
        let name = self.name();
        EdgeLeaf::directed(name, tuple, values, inputs, outputs)
    }

    /// A random crf between `g`'s outputs and `h`'s inputs using only
    /// type-comparable pairs.
    pub fn crf_between(&mut self, g: &Dtmg, h: &Dtmg) -> Crf {
        let go = g.output_types();
        let hi = h.input_types();
        let mut cands = Vec::new();
        for (o, a) in go.iter().enumerate() {
            for (i, b) in hi.iter().enumerate() {
                if self.registry.comparable(a, b).unwrap_or(false) {
                    cands.push((o + 1, i + 1));
                }
            }
        }
        cands.shuffle(&mut self.rng);
        let want = self.rng.gen_range(0..=cands.len().min(self.bounds.max_arity));
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (o, i) in cands {
            if pairs.len() == want {
                break;
            }
            if pairs.iter().all(|&(a, b)| a != o && b != i) {
                pairs.push((o, i));
            }
        }
        Crf::new(pairs).expect("injective by construction")
    }

    /// A random expression of depth at most `depth`, with its value.
    pub fn expr(&mut self, depth: usize) -> Result<(ConstructionExpr, Dtmg)> {
        let roll = if depth == 0 { self.rng.gen_range(0..25) } else { self.rng.gen_range(0..100) };
        let x = match roll {
            0 => ConstructionExpr::Empty,
            1..=3 => ConstructionExpr::Swap {
                left: self.rng.gen_range(0..3),
                right: self.rng.gen_range(0..3),
            },
            4..=24 => ConstructionExpr::Edge(self.leaf()),
            25..=59 => {
                let (l, _) = self.expr(depth - 1)?;
                let (r, _) = self.expr(depth - 1)?;
                ConstructionExpr::beside(l, r)
            }
            _ => {
                let (l, ld) = self.expr(depth - 1)?;
                let (r, rd) = self.expr(depth - 1)?;
                let p = self.crf_between(&ld, &rd);
                ConstructionExpr::connect(p, l, r)
            }
        };
        let d = eval(&self.registry, &x)?;
        Ok((x, d))
    }

    /// A random expression of the configured maximum depth, with at most
    /// `max_edges` edges (retrying smaller depths when too large).
    pub fn bounded_expr(&mut self, max_edges: usize) -> Result<(ConstructionExpr, Dtmg)> {
        let mut depth = self.rng.gen_range(0..=self.bounds.max_depth);
        loop {
            let (x, d) = self.expr(depth)?;
            if d.edge_count() <= max_edges {
                return Ok((x, d));
            }
            depth = depth.saturating_sub(1);
        }
    }

    /// An expression whose inputs take exactly the given types, in some
    /// order, together with the total crf routing position `o` of `types`
    /// to the matching input.
    pub fn consumer(&mut self, types: &[String]) -> Result<(ConstructionExpr, Dtmg, Crf)> {
        let mut order: Vec<usize> = (0..types.len()).collect();
        order.shuffle(&mut self.rng);
        let mut x = ConstructionExpr::Empty;
        let mut first = true;
        for &k in &order {
            let extra = self.rng.gen_range(0..=2usize);
            let mut targets = vec![Target::new(1, types[k].clone())];
            for j in 0..extra {
                targets.push(Target::new(j as u32 + 2, self.pick_type()));
            }
            let outputs: Vec<u32> = (2..=extra as u32 + 1).filter(|_| self.rng.gen_bool(0.7)).collect();
            let ty = self.edge_type();
            let name = self.name();
            let values = self.values();
            let leaf = EdgeLeaf::directed(name, TargetTuple::new(ty, targets), values, vec![1], outputs);
            let e = ConstructionExpr::Edge(leaf);
            x = if first { e } else { ConstructionExpr::beside(x, e) };
            first = false;
        }
        let pairs = order.iter().enumerate().map(|(pos, &k)| (k + 1, pos + 1)).collect();
        let d = eval(&self.registry, &x)?;
        Ok((x, d, Crf::new(pairs).expect("permutation")))
    }

    /// A random decomposable DTMG with `n` edges: connections run from
    /// earlier to later edges, each target joins at most one connection.
    pub fn dtmg(&mut self, n: usize) -> Dtmg {
        let mut g = Tmg::new(self.registry.clone());
        let mut leaves = Vec::new();
        for _ in 0..n {
            let leaf = self.leaf();
            let id = self.name();
            g.insert_edge_unchecked(Edge::new(id.clone(), leaf.tuple.clone(), leaf.values.clone()));
            leaves.push((id, leaf));
        }
        let mut used: BTreeSet<TargetRef> = BTreeSet::new();
        let density = self.rng.gen_range(0.2..0.9);
        for a in 0..n {
            for b in a + 1..n {
                for &o in &leaves[a].1.outputs {
                    for &i in &leaves[b].1.inputs {
                        let from = TargetRef::new(leaves[a].0.clone(), o);
                        let to = TargetRef::new(leaves[b].0.clone(), i);
                        if used.contains(&from) || used.contains(&to) || !self.rng.gen_bool(density) {
                            continue;
                        }
                        let ta = leaves[a].1.tuple.slot_type(o).unwrap_or_default();
                        let tb = leaves[b].1.tuple.slot_type(i).unwrap_or_default();
                        if self.registry.comparable(ta, tb).unwrap_or(false) {
                            used.insert(from.clone());
                            used.insert(to.clone());
                            g.insert_connection_unchecked(Connection::new(from, to));
                        }
                    }
                }
            }
        }
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut lateral = Vec::new();
        for (id, leaf) in &leaves {
            for s in 1..=leaf.tuple.arity() as u32 {
                let r = TargetRef::new(id.clone(), s);
                if used.contains(&r) {
                    continue;
                }
                if leaf.inputs.contains(&s) {
                    inputs.push(r);
                } else if leaf.outputs.contains(&s) {
                    outputs.push(r);
                } else {
                    lateral.push(r);
                }
            }
        }
        inputs.shuffle(&mut self.rng);
        outputs.shuffle(&mut self.rng);
        Dtmg::new(g, inputs, outputs, lateral).expect("partition by construction")
    }
}
