//! Built-in algebras: target counting and shortest metapaths.

use std::cmp::Ordering;

use crate::construct::crf::Crf;
use crate::construct::expr::{decompose, ConstructionExpr, EdgeLeaf};
use crate::construct::ops::wire_tuple;
use crate::dtmg::Dtmg;
use crate::edge::EdgeKey;
use crate::error::Result;
use crate::morph::algebra::{cata, DtmgAlgebra};

/// Counts the targets of all edges.
#[derive(Debug, Clone, Copy, Default)]
pub struct NumTargets;

impl DtmgAlgebra for NumTargets {
    type Carrier = usize;

    fn empty(&self) -> Result<usize> {
        Ok(0)
    }
    fn edge(&self, leaf: &EdgeLeaf) -> Result<usize> {
        Ok(leaf.tuple.arity())
    }
    fn beside(&self, l: usize, r: usize) -> Result<usize> {
        Ok(l + r)
    }
    fn connect(&self, _: &Crf, l: usize, r: usize) -> Result<usize> {
        Ok(l + r)
    }
}

/// Shortest-path table over the edges built so far. Paths are sequences of
/// edge indices; between equally short paths the one with the smaller key
/// sequence wins, so results do not depend on construction order.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTable {
    keys: Vec<EdgeKey>,
    paths: Vec<Vec<Option<Vec<usize>>>>,
    outs: Vec<usize>,
    ins: Vec<usize>,
}

impl PathTable {
    fn empty() -> Self {
        PathTable {
            keys: vec![],
            paths: vec![],
            outs: vec![],
            ins: vec![],
        }
    }

    fn single(key: EdgeKey, n_in: usize, n_out: usize) -> Self {
        PathTable {
            keys: vec![key],
            paths: vec![vec![Some(vec![0])]],
            outs: vec![0; n_out],
            ins: vec![0; n_in],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.keys.len()
    }

    fn merge(mut self, other: PathTable) -> PathTable {
        let off = self.keys.len();
        let n = off + other.keys.len();
        for row in &mut self.paths {
            row.resize(n, None);
        }
        for row in other.paths {
            let mut new_row = vec![None; off];
            new_row.extend(row.into_iter().map(|p| p.map(|v| v.into_iter().map(|i| i + off).collect())));
            self.paths.push(new_row);
        }
        self.keys.extend(other.keys);
        self.outs.extend(other.outs.into_iter().map(|i| i + off));
        self.ins.extend(other.ins.into_iter().map(|i| i + off));
        self
    }

    fn better(&self, a: &[usize], b: &[usize]) -> bool {
        match a.len().cmp(&b.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                let ka = a.iter().map(|&i| &self.keys[i]);
                let kb = b.iter().map(|&i| &self.keys[i]);
                ka.cmp(kb) == Ordering::Less
            }
        }
    }

    /// Adds the arc `u → v` and relaxes every pair through it.
    fn add_arc(&mut self, u: usize, v: usize) {
        let n = self.keys.len();
        let mut updates = Vec::new();
        for a in 0..n {
            let Some(head) = &self.paths[a][u] else { continue };
            for b in 0..n {
                let Some(tail) = &self.paths[v][b] else { continue };
                if head.iter().any(|x| tail.contains(x)) {
                    continue;
                }
                let cand: Vec<usize> = head.iter().chain(tail).copied().collect();
                let replace = match &self.paths[a][b] {
                    None => true,
                    Some(cur) => self.better(&cand, cur),
                };
                if replace {
                    updates.push((a, b, cand));
                }
            }
        }
        for (a, b, p) in updates {
            self.paths[a][b] = Some(p);
        }
    }

    /// Shortest path between any edge keyed `src` and any edge keyed `dst`,
    /// as the keys along it. Equal keys give the empty path.
    pub fn path(&self, src: &EdgeKey, dst: &EdgeKey) -> Option<Vec<EdgeKey>> {
        if src == dst {
            return Some(vec![]);
        }
        let mut best: Option<&Vec<usize>> = None;
        for (a, ka) in self.keys.iter().enumerate() {
            if ka != src {
                continue;
            }
            for (b, kb) in self.keys.iter().enumerate() {
                if kb != dst {
                    continue;
                }
                if let Some(p) = &self.paths[a][b] {
                    if best.map_or(true, |q| self.better(p, q)) {
                        best = Some(p);
                    }
                }
            }
        }
        best.map(|p| p.iter().map(|&i| self.keys[i].clone()).collect())
    }

    /// Number of edges on the shortest path; 0 when `src == dst`.
    pub fn length(&self, src: &EdgeKey, dst: &EdgeKey) -> Option<usize> {
        self.path(src, dst).map(|p| p.len())
    }
}

/// Builds [`PathTable`]s; arcs follow connections from outputs to inputs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShortestPaths;

impl DtmgAlgebra for ShortestPaths {
    type Carrier = PathTable;

    fn empty(&self) -> Result<PathTable> {
        Ok(PathTable::empty())
    }
    fn edge(&self, leaf: &EdgeLeaf) -> Result<PathTable> {
        let key = EdgeKey {
            tuple: leaf.tuple.clone(),
            values: leaf.values.clone(),
        };
        Ok(PathTable::single(key, leaf.inputs.len(), leaf.outputs.len()))
    }
    fn beside(&self, l: PathTable, r: PathTable) -> Result<PathTable> {
        Ok(l.merge(r))
    }
    fn connect(&self, p: &Crf, l: PathTable, r: PathTable) -> Result<PathTable> {
        let (lo, ri) = (l.outs.clone(), r.ins.clone());
        let lin = l.ins.clone();
        let rout = r.outs.clone();
        let off = l.keys.len();
        let mut t = l.merge(r);
        for &(o, i) in p.pairs() {
            t.add_arc(lo[o - 1], ri[i - 1] + off);
        }
        t.ins = lin;
        t.ins.extend(
            ri.iter()
                .enumerate()
                .filter(|(i, _)| !p.pairs().iter().any(|x| x.1 == i + 1))
                .map(|(_, &e)| e + off),
        );
        t.outs = lo
            .iter()
            .enumerate()
            .filter(|(o, _)| p.input_for(o + 1).is_none())
            .map(|(_, &e)| e)
            .collect();
        t.outs.extend(rout.iter().map(|&e| e + off));
        Ok(t)
    }
    fn swap(&self, left: usize, right: usize) -> Result<PathTable> {
        let key = EdgeKey {
            tuple: wire_tuple(),
            values: vec![],
        };
        let mut t = PathTable::empty();
        for _ in 0..left + right {
            t = t.merge(PathTable::single(key.clone(), 1, 1));
        }
        let ids: Vec<usize> = (0..left + right).collect();
        t.ins = ids.clone();
        t.outs = ids[left..].iter().chain(&ids[..left]).copied().collect();
        Ok(t)
    }
}

/// Shortest metapath length from an edge keyed `src` to one keyed `dst`.
pub fn shortest_path_length(x: &ConstructionExpr, src: &EdgeKey, dst: &EdgeKey) -> Result<Option<usize>> {
    Ok(cata(&ShortestPaths, x)?.length(src, dst))
}

/// Keys of the edges along the shortest metapath, in order.
pub fn shortest_path_list(x: &ConstructionExpr, src: &EdgeKey, dst: &EdgeKey) -> Result<Option<Vec<EdgeKey>>> {
    Ok(cata(&ShortestPaths, x)?.path(src, dst))
}

/// Target count of a DTMG via its canonical decomposition.
pub fn num_targets(d: &Dtmg) -> Result<usize> {
    cata(&NumTargets, &decompose(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::expr::eval;
    use crate::edge::{Target, TargetTuple};
    use crate::types::TypeRegistry;
    use std::sync::Arc;

    fn arrow(id: &str, v: i64) -> ConstructionExpr {
        ConstructionExpr::Edge(EdgeLeaf::directed(
            id,
            TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]),
            vec![crate::value::Value::Int(v)],
            vec![1],
            vec![2],
        ))
    }

    fn key(v: i64) -> EdgeKey {
        EdgeKey {
            tuple: TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]),
            values: vec![crate::value::Value::Int(v)],
        }
    }

    #[test]
    fn typed_pair_path() {
        let x = ConstructionExpr::connect(Crf::identity(1), arrow("x", 1), arrow("y", 2));
        assert_eq!(shortest_path_length(&x, &key(1), &key(2)).unwrap(), Some(2));
        assert_eq!(shortest_path_list(&x, &key(1), &key(2)).unwrap(), Some(vec![key(1), key(2)]));
        assert_eq!(shortest_path_length(&x, &key(2), &key(1)).unwrap(), None);
        assert_eq!(shortest_path_length(&x, &key(1), &key(1)).unwrap(), Some(0));
    }

    #[test]
    fn numtargets_counts() {
        let x = ConstructionExpr::beside(arrow("x", 1), arrow("y", 1));
        assert_eq!(cata(&NumTargets, &x).unwrap(), 4);
        assert_eq!(cata(&NumTargets, &ConstructionExpr::Empty).unwrap(), 0);
        let reg = Arc::new(TypeRegistry::new());
        assert_eq!(num_targets(&eval(&reg, &x).unwrap()).unwrap(), 4);
    }

    #[test]
    fn paths_through_swaps() {
        // x ; γ(1,0) ; y is still a two-hop chain plus the wire
        let x = ConstructionExpr::connect(
            Crf::identity(1),
            ConstructionExpr::connect(Crf::identity(1), arrow("x", 1), ConstructionExpr::Swap { left: 1, right: 0 }),
            arrow("y", 2),
        );
        assert_eq!(shortest_path_length(&x, &key(1), &key(2)).unwrap(), Some(3));
    }
}
