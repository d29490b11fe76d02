//! DTMG isomorphism up to edge ids, and wire contraction.
//!
//! Colour refinement narrows candidate edge pairs; a backtracking search
//! then looks for a bijection preserving keys, connections and ports.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::dtmg::Dtmg;
use crate::edge::{Connection, EdgeKey, TargetRef};
use crate::types::ROOT;

/// How the input and output lists are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortOrder {
    /// Inputs and outputs must correspond position by position.
    Strict,
    /// Inputs and outputs are compared as sets.
    Loose,
}

type Arc4 = (usize, u32, usize, u32);

struct Indexed {
    ids: Vec<String>,
    keys: Vec<EdgeKey>,
    arcs: HashSet<Arc4>,
    adj: Vec<Vec<Arc4>>,
    ports: Vec<Vec<(u32, u8, usize)>>,
}

fn index(d: &Dtmg, order: PortOrder) -> Indexed {
    let ids: Vec<String> = d.base.edge_ids().map(str::to_string).collect();
    let pos: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let keys = d.base.edges().map(|e| e.key()).collect();
    let mut arcs = HashSet::new();
    let mut adj = vec![Vec::new(); ids.len()];
    for c in d.base.connections() {
        let a = (pos[c.from.edge.as_str()], c.from.slot, pos[c.to.edge.as_str()], c.to.slot);
        arcs.insert(a);
        adj[a.0].push(a);
        if a.2 != a.0 {
            adj[a.2].push(a);
        }
    }
    let mut ports = vec![Vec::new(); ids.len()];
    for (tag, list) in [(0u8, d.inputs()), (1, d.outputs()), (2, d.lateral())] {
        for (i, r) in list.iter().enumerate() {
            let p = match (tag, order) {
                (2, _) | (_, PortOrder::Loose) => 0,
                _ => i + 1,
            };
            ports[pos[r.edge.as_str()]].push((r.slot, tag, p));
        }
    }
    for p in &mut ports {
        p.sort_unstable();
    }
    Indexed { ids, keys, arcs, adj, ports }
}

/// Shared-palette colour refinement over both graphs at once, so that equal
/// colours mean the same thing on either side.
fn refine(a: &Indexed, b: &Indexed) -> (Vec<usize>, Vec<usize>) {
    let mut palette: BTreeMap<(&EdgeKey, &Vec<(u32, u8, usize)>), usize> = BTreeMap::new();
    let mut ca = Vec::with_capacity(a.ids.len());
    let mut cb = Vec::with_capacity(b.ids.len());
    for (g, out) in [(a, &mut ca), (b, &mut cb)] {
        for i in 0..g.ids.len() {
            let n = palette.len();
            out.push(*palette.entry((&g.keys[i], &g.ports[i])).or_insert(n));
        }
    }
    let mut classes = palette.len();
    loop {
        let mut next: BTreeMap<(usize, Vec<(bool, u32, u32, usize)>), usize> = BTreeMap::new();
        let mut na = Vec::with_capacity(ca.len());
        let mut nb = Vec::with_capacity(cb.len());
        for (g, cur, out) in [(a, &ca, &mut na), (b, &cb, &mut nb)] {
            for i in 0..g.ids.len() {
                let mut sig: Vec<(bool, u32, u32, usize)> = Vec::new();
                for &(f, fs, t, ts) in &g.adj[i] {
                    if f == i {
                        sig.push((true, fs, ts, cur[t]));
                    }
                    if t == i {
                        sig.push((false, ts, fs, cur[f]));
                    }
                }
                sig.sort_unstable();
                let n = next.len();
                out.push(*next.entry((cur[i], sig)).or_insert(n));
            }
        }
        let stable = next.len() == classes;
        classes = next.len();
        ca = na;
        cb = nb;
        if stable {
            return (ca, cb);
        }
    }
}

/// Finds an id bijection from `a` to `b` witnessing isomorphism.
pub fn find_isomorphism(a: &Dtmg, b: &Dtmg, order: PortOrder) -> Option<BTreeMap<String, String>> {
    if a.edge_count() != b.edge_count()
        || a.base.connection_count() != b.base.connection_count()
        || a.inputs().len() != b.inputs().len()
        || a.outputs().len() != b.outputs().len()
        || a.lateral().len() != b.lateral().len()
    {
        return None;
    }
    let ia = index(a, order);
    let ib = index(b, order);
    let (ca, cb) = refine(&ia, &ib);
    let mut hist: HashMap<usize, isize> = HashMap::new();
    for &c in &ca {
        *hist.entry(c).or_default() += 1;
    }
    for &c in &cb {
        *hist.entry(c).or_default() -= 1;
    }
    if hist.values().any(|&v| v != 0) {
        return None;
    }
    let mut class_size: HashMap<usize, usize> = HashMap::new();
    for &c in &ca {
        *class_size.entry(c).or_default() += 1;
    }
    let mut order_a: Vec<usize> = (0..ia.ids.len()).collect();
    order_a.sort_by_key(|&i| (class_size[&ca[i]], ca[i], i));
    let mut by_color: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, &c) in cb.iter().enumerate() {
        by_color.entry(c).or_default().push(j);
    }
    let mut fwd = vec![usize::MAX; ia.ids.len()];
    let mut used = vec![false; ib.ids.len()];
    let search = Search {
        a: &ia,
        b: &ib,
        order: &order_a,
        ca: &ca,
        by_color: &by_color,
    };
    if !search.go(0, &mut fwd, &mut used) {
        return None;
    }
    let map: BTreeMap<String, String> = fwd
        .iter()
        .enumerate()
        .map(|(i, &j)| (ia.ids[i].clone(), ib.ids[j].clone()))
        .collect();
    verify(a, b, &map, order).then_some(map)
}

struct Search<'a> {
    a: &'a Indexed,
    b: &'a Indexed,
    order: &'a [usize],
    ca: &'a [usize],
    by_color: &'a HashMap<usize, Vec<usize>>,
}

impl Search<'_> {
    fn go(&self, depth: usize, fwd: &mut [usize], used: &mut [bool]) -> bool {
        let Some(&x) = self.order.get(depth) else {
            return true;
        };
        for &y in &self.by_color[&self.ca[x]] {
            if used[y] {
                continue;
            }
            fwd[x] = y;
            if self.consistent(x, y, fwd) {
                used[y] = true;
                if self.go(depth + 1, fwd, used) {
                    return true;
                }
                used[y] = false;
            }
            fwd[x] = usize::MAX;
        }
        false
    }

    fn consistent(&self, x: usize, y: usize, fwd: &[usize]) -> bool {
        let mut count_a = 0;
        for &(f, fs, t, ts) in &self.a.adj[x] {
            let (mf, mt) = (fwd[f], fwd[t]);
            if mf == usize::MAX || mt == usize::MAX {
                continue;
            }
            count_a += 1;
            if !self.b.arcs.contains(&(mf, fs, mt, ts)) {
                return false;
            }
        }
        let mapped_b: HashSet<usize> = fwd.iter().copied().filter(|&v| v != usize::MAX).collect();
        let count_b = self.b.adj[y]
            .iter()
            .filter(|&&(f, _, t, _)| mapped_b.contains(&f) && mapped_b.contains(&t))
            .count();
        count_a == count_b
    }
}

fn verify(a: &Dtmg, b: &Dtmg, map: &BTreeMap<String, String>, order: PortOrder) -> bool {
    let r = |t: &TargetRef| TargetRef::new(map[&t.edge].clone(), t.slot);
    for e in a.edges() {
        match b.base.edge(&map[&e.id]) {
            Some(f) if f.key() == e.key() => {}
            _ => return false,
        }
    }
    let conns: BTreeSet<Connection> = a
        .base
        .connections()
        .map(|c| Connection::new(r(&c.from), r(&c.to)))
        .collect();
    if conns != b.base.connections().cloned().collect::<BTreeSet<_>>() {
        return false;
    }
    let lists = |x: &[TargetRef], y: &[TargetRef], strict: bool| {
        let mx: Vec<TargetRef> = x.iter().map(r).collect();
        if strict {
            mx == y
        } else {
            mx.into_iter().collect::<BTreeSet<_>>() == y.iter().cloned().collect()
        }
    };
    let strict = order == PortOrder::Strict;
    lists(a.inputs(), b.inputs(), strict)
        && lists(a.outputs(), b.outputs(), strict)
        && lists(a.lateral(), b.lateral(), false)
}

/// Isomorphism with inputs and outputs compared in order and the lateral
/// list as a set.
pub fn isomorphic(a: &Dtmg, b: &Dtmg) -> bool {
    find_isomorphism(a, b, PortOrder::Strict).is_some()
}

/// Isomorphism ignoring the order of every port list.
pub fn isomorphic_loose(a: &Dtmg, b: &Dtmg) -> bool {
    find_isomorphism(a, b, PortOrder::Loose).is_some()
}

/// A wire is an untyped binary edge `e (1:e, 2:e)` without values.
pub fn is_wire_key(k: &EdgeKey) -> bool {
    k.tuple.ty == ROOT
        && k.values.is_empty()
        && k.tuple.targets.len() == 2
        && k.tuple.targets.iter().enumerate().all(|(i, t)| t.label == i as u32 + 1 && t.ty == ROOT)
}

/// Removes wires that merely pass a connection through: `A.s → W.1`,
/// `W.2 → B.t` becomes `A.s → B.t`, and a wire end on the boundary is
/// replaced in its port list by whatever the other end reached. Wires with
/// both ends on the boundary stay.
pub fn contract_wires(d: &Dtmg) -> Dtmg {
    let mut d = d.clone();
    loop {
        let wires: Vec<String> = d
            .edges()
            .filter(|e| is_wire_key(&e.key()))
            .map(|e| e.id.clone())
            .collect();
        let mut changed = false;
        for w in wires {
            if contract_one(&mut d, &w) {
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}

fn contract_one(d: &mut Dtmg, w: &str) -> bool {
    let touching: Vec<Connection> = d.base.connections().filter(|c| c.touches(w)).cloned().collect();
    let w1 = TargetRef::new(w, 1);
    let w2 = TargetRef::new(w, 2);
    let upstream = match touching.iter().filter(|c| c.to == w1).collect::<Vec<_>>()[..] {
        [c] => Some(c.clone()),
        [] => None,
        _ => return false,
    };
    let downstream = match touching.iter().filter(|c| c.from == w2).collect::<Vec<_>>()[..] {
        [c] => Some(c.clone()),
        [] => None,
        _ => return false,
    };
    let accounted = upstream.is_some() as usize + downstream.is_some() as usize;
    if touching.len() != accounted {
        return false;
    }
    let in_pos = d.inputs.iter().position(|r| r == &w1);
    let out_pos = d.outputs.iter().position(|r| r == &w2);
    if upstream.is_none() != in_pos.is_some() || downstream.is_none() != out_pos.is_some() {
        return false;
    }
    if [&upstream, &downstream]
        .into_iter()
        .flatten()
        .any(|c| c.from.edge == w && c.to.edge == w)
    {
        return false;
    }
    let single = |d: &Dtmg, r: &TargetRef| d.base.connections_at(r).count() == 1;
    match (upstream, downstream) {
        (Some(u), Some(v)) => {
            d.base.remove_edge_and_connections(w);
            d.base.insert_connection_unchecked(Connection::new(u.from, v.to));
        }
        (None, Some(v)) => {
            if !single(d, &v.to) {
                return false;
            }
            d.base.remove_edge_and_connections(w);
            d.inputs[in_pos.unwrap()] = v.to;
        }
        (Some(u), None) => {
            if !single(d, &u.from) {
                return false;
            }
            d.base.remove_edge_and_connections(w);
            d.outputs[out_pos.unwrap()] = u.from;
        }
        (None, None) => return false,
    }
    true
}
