//! Independent oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use metagraph::construct::gen::Gen;
use metagraph::topology::{OpenSet, SmoothMapping, Topology};
use metagraph::{Connection, Dtmg, Edge, EdgeKey, TargetRef, Tmg};

/// Every nonempty partial injection from `1..=m` to `1..=n`, by subset
/// enumeration over the `m * n` grid.
pub fn brute_crfs(m: usize, n: usize) -> BTreeSet<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (1..=m).flat_map(|o| (1..=n).map(move |i| (o, i))).collect();
    let mut out = BTreeSet::new();
    for bits in 1u32..(1u32 << cells.len()) {
        let pick: Vec<(usize, usize)> = (0..cells.len()).filter(|k| bits >> k & 1 == 1).map(|k| cells[k]).collect();
        let outs: BTreeSet<usize> = pick.iter().map(|p| p.0).collect();
        let ins: BTreeSet<usize> = pick.iter().map(|p| p.1).collect();
        if outs.len() == pick.len() && ins.len() == pick.len() {
            out.insert(pick);
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// The closed form Σ_{k≥1} C(m,k) C(n,k) k!.
pub fn closed_form(m: usize, n: usize) -> u128 {
    (1..=m.min(n)).map(|k| binomial(m, k) * binomial(n, k) * factorial(k)).sum()
}

/// The naive bound Σ_{i=1}^{min} max!/(max−min)!.
pub fn naive_bound(m: usize, n: usize) -> u128 {
    let (lo, hi) = (m.min(n), m.max(n));
    (1..=lo).map(|_| factorial(hi) / factorial(hi - lo)).sum()
}

/// Breadth-first shortest metapath length, in edges, between any edge
/// keyed `src` and any edge keyed `dst`; arcs follow connections.
pub fn bfs_length(g: &Tmg, src: &EdgeKey, dst: &EdgeKey) -> Option<usize> {
    if src == dst {
        return Some(0);
    }
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in g.connections() {
        succ.entry(c.from.edge.as_str()).or_default().push(c.to.edge.as_str());
    }
    let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for e in g.edges().filter(|e| &e.key() == src) {
        dist.insert(e.id.as_str(), 1);
        queue.push_back(e.id.as_str());
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        if &g.edge(u).unwrap().key() == dst {
            return Some(d);
        }
        for &v in succ.get(u).into_iter().flatten() {
            if !dist.contains_key(v) {
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    None
}

/// Opens of a small host by brute force: close the subbasis, the empty set
/// and the whole set under pairwise union and intersection until nothing
/// new appears.
pub fn brute_opens(t: &Topology) -> BTreeSet<u128> {
    let mut out: BTreeSet<u128> = t.subbasis_masks().iter().copied().collect();
    out.extend([0, t.full_mask()]);
    loop {
        let cur: Vec<u128> = out.iter().copied().collect();
        let before = out.len();
        for &a in &cur {
            for &b in &cur {
                out.insert(a | b);
                out.insert(a & b);
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Checks residuation `meet(a,x) ≤ b ⟺ x ≤ implies(a,b)` on every triple
/// of opens; returns the number of triples checked or the first failure.
pub fn residuation(opens: &[OpenSet]) -> Result<usize, String> {
    let mut n = 0;
    for a in opens {
        for b in opens {
            let imp = a.implies(b).unwrap();
            for x in opens {
                let lhs = a.meet(x).unwrap().leq(b).unwrap();
                let rhs = x.leq(&imp).unwrap();
                if lhs != rhs {
                    return Err(format!("a={a} b={b} x={x}"));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

/// A host with a duplicate `copy` of one edge `orig`, the copy wired to
/// free targets where types allow.
pub fn host_with_copy(gen: &mut Gen, n: usize) -> Option<(Tmg, String, String)> {
    let d = gen.dtmg(n);
    let mut g = d.base().clone();
    let ids: Vec<String> = g.edge_ids().map(String::from).collect();
    let orig = ids.choose(&mut gen.rng)?.clone();
    let e = g.edge(&orig).unwrap().clone();
    let copy = g.fresh_id(&format!("{orig}c"));
    g.add_edge(Edge::new(copy.clone(), e.tuple.clone(), e.values.clone())).ok()?;
    let free: Vec<TargetRef> = g
        .dangling_targets()
        .into_iter()
        .map(|(r, _)| r)
        .filter(|r| r.edge != copy && r.edge != orig)
        .collect();
    for s in 1..=e.arity() as u32 {
        if gen.rng.gen_bool(0.5) {
            if let Some(r) = free.choose(&mut gen.rng) {
                let _ = g.add_connection(Connection::new(TargetRef::new(copy.clone(), s), r.clone()));
            }
        }
    }
    Some((g, copy, orig))
}

/// A random smooth mapping on `g`: one or two identifications of an edge
/// with an edge of equal arity whose types specialize it.
pub fn random_smooth(gen: &mut Gen, g: &Tmg) -> Option<SmoothMapping> {
    let ids: Vec<&str> = g.edge_ids().collect();
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for &a in &ids {
        for &b in &ids {
            if a != b {
                let s = SmoothMapping::positional(g, &[(a, b)]);
                if s.is_ok_and(|s| metagraph::topology::smooth_check(g, &s)) {
                    pairs.push((a, b));
                }
            }
        }
    }
    pairs.shuffle(&mut gen.rng);
    let first = *pairs.first()?;
    let mut chosen = vec![first];
    if let Some(&second) = pairs.iter().find(|p| p.0 != first.0 && p.0 != first.1 && p.1 != first.0) {
        if gen.rng.gen_bool(0.5) {
            chosen.push(second);
        }
    }
    let s = SmoothMapping::positional(g, &chosen).ok()?;
    metagraph::topology::smooth_check(g, &s).then_some(s)
}

/// A host with repeated edge shapes so smooth identifications exist: a
/// random DTMG plus copies of some of its edges.
pub fn smooth_host(gen: &mut Gen, n: usize) -> Tmg {
    let d = gen.dtmg(n.max(1));
    let mut g = d.base().clone();
    let ids: Vec<String> = g.edge_ids().map(String::from).collect();
    let extra = gen.rng.gen_range(1..=3usize).min(8usize.saturating_sub(ids.len()).max(1));
    for _ in 0..extra {
        let Some(orig) = ids.choose(&mut gen.rng) else { break };
        if g.edge_count() >= 8 {
            break;
        }
        let e = g.edge(orig).unwrap().clone();
        let copy = g.fresh_id(&format!("{orig}s"));
        let _ = g.add_edge(Edge::new(copy, e.tuple, e.values));
    }
    g
}

/// Input and output sets of a DTMG, as sets.
pub fn io_sets(d: &Dtmg) -> (BTreeSet<TargetRef>, BTreeSet<TargetRef>) {
    (d.inputs().iter().cloned().collect(), d.outputs().iter().cloned().collect())
}

/// A trace that walks the connections of `d` in a seeded order.
pub fn walk_of(gen: &mut Gen, d: &Dtmg) -> metagraph::process::Trace {
    let mut conns: Vec<&Connection> = d.base().connections().collect();
    conns.shuffle(&mut gen.rng);
    let steps = conns
        .iter()
        .map(|c| (c.from.edge.as_str(), vec![c.from.slot], c.to.edge.as_str(), vec![c.to.slot]))
        .collect();
    metagraph::process::Trace::new("walk", steps)
}
