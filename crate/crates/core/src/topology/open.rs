//! Metapath topology: the topology generated by the two-edge metapaths.
//! Its basis is the subbasis together with the single edges shared by two
//! subbasis elements; opens are unions of basis elements, plus the empty
//! set and the whole edge set. The opens form a Heyting algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::dtmg::Dtmg;
use crate::error::{MgError, Result};
use crate::morph::forest::Ftmg;
use crate::tmg::Tmg;

/// Hosts larger than this are refused.
pub const MAX_EDGES: usize = 128;

#[derive(Debug, PartialEq)]
pub struct Topology {
    ids: Vec<String>,
    subbasis: Vec<u128>,
    basis: Vec<u128>,
}

impl Topology {
    /// Topology of a DTMG: one subbasis element `{E1, E2}` for each
    /// target-to-target connection between distinct edges.
    pub fn of(d: &Dtmg) -> Result<Arc<Topology>> {
        Topology::of_tmg(d.base())
    }

    /// As [`Topology::of`], reading each connection as running from its
    /// first target to its second.
    pub fn of_tmg(g: &Tmg) -> Result<Arc<Topology>> {
        let ids: Vec<String> = g.edge_ids().map(str::to_string).collect();
        let arcs: Vec<(String, String)> = g
            .connections()
            .filter(|c| c.is_target_to_target() && c.from.edge != c.to.edge)
            .map(|c| (c.from.edge.clone(), c.to.edge.clone()))
            .collect();
        Topology::from_arcs(ids, &arcs)
    }

    /// Topology on `ids` generated by the given edge pairs.
    pub fn from_arcs(mut ids: Vec<String>, arcs: &[(String, String)]) -> Result<Arc<Topology>> {
        ids.sort();
        ids.dedup();
        if ids.len() > MAX_EDGES {
            return Err(MgError::Capacity(format!(
                "topology supports at most {MAX_EDGES} edges, host has {}",
                ids.len()
            )));
        }
        let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut subbasis = BTreeSet::new();
        for (a, b) in arcs {
            let (Some(&i), Some(&j)) = (pos.get(a.as_str()), pos.get(b.as_str())) else {
                return Err(MgError::UnknownEdge(format!("{a} or {b}")));
            };
            if i != j {
                subbasis.insert((1u128 << i) | (1u128 << j));
            }
        }
        let mut basis = subbasis.clone();
        for &a in &subbasis {
            for &b in &subbasis {
                if a != b && a & b != 0 {
                    basis.insert(a & b);
                }
            }
        }
        Ok(Arc::new(Topology {
            ids,
            subbasis: subbasis.into_iter().collect(),
            basis: basis.into_iter().collect(),
        }))
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn full_mask(&self) -> u128 {
        if self.ids.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.ids.len()) - 1
        }
    }

    pub fn subbasis_masks(&self) -> &[u128] {
        &self.subbasis
    }

    /// Subbasis elements and their nonempty pairwise intersections.
    pub fn basis_masks(&self) -> &[u128] {
        &self.basis
    }

    pub fn mask_of<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<u128> {
        let mut m = 0;
        for id in ids {
            let i = self
                .ids
                .binary_search_by(|x| x.as_str().cmp(id))
                .map_err(|_| MgError::UnknownEdge(id.to_string()))?;
            m |= 1u128 << i;
        }
        Ok(m)
    }

    pub fn ids_of(&self, mask: u128) -> BTreeSet<String> {
        self.ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn interior_mask(&self, mask: u128) -> u128 {
        let mask = mask & self.full_mask();
        if mask == self.full_mask() {
            return mask;
        }
        self.basis.iter().filter(|&&b| b & mask == b).fold(0, |acc, b| acc | b)
    }

    pub fn is_open_mask(&self, mask: u128) -> bool {
        mask == 0 || mask == self.full_mask() || self.interior_mask(mask) == mask
    }

    /// Every open set, as masks, in ascending order.
    pub fn open_masks(&self) -> Vec<u128> {
        let mut seen = BTreeSet::from([0u128, self.full_mask()]);
        let mut stack = vec![0u128];
        while let Some(m) = stack.pop() {
            for &b in &self.basis {
                let n = m | b;
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn open(self: &Arc<Self>, mask: u128) -> OpenSet {
        OpenSet {
            topo: self.clone(),
            mask,
        }
    }

    pub fn empty_set(self: &Arc<Self>) -> OpenSet {
        self.open(0)
    }

    pub fn whole(self: &Arc<Self>) -> OpenSet {
        self.open(self.full_mask())
    }

    /// The subbasis elements as open sets.
    pub fn subbasis(self: &Arc<Self>) -> Vec<OpenSet> {
        self.subbasis.iter().map(|&m| self.open(m)).collect()
    }

    pub fn opens(self: &Arc<Self>) -> Vec<OpenSet> {
        self.open_masks().into_iter().map(|m| self.open(m)).collect()
    }

    pub fn is_open(&self, ids: &BTreeSet<String>) -> Result<bool> {
        Ok(self.is_open_mask(self.mask_of(ids.iter().map(String::as_str))?))
    }

    /// Largest open subset of `ids`.
    pub fn interior(self: &Arc<Self>, ids: &BTreeSet<String>) -> Result<OpenSet> {
        let m = self.mask_of(ids.iter().map(String::as_str))?;
        Ok(self.open(self.interior_mask(m)))
    }

    /// The open set with exactly these edges.
    pub fn open_set(self: &Arc<Self>, ids: &BTreeSet<String>) -> Result<OpenSet> {
        let m = self.mask_of(ids.iter().map(String::as_str))?;
        if !self.is_open_mask(m) {
            return Err(MgError::State(format!("{ids:?} is not open")));
        }
        Ok(self.open(m))
    }

    pub fn from_mask(self: &Arc<Self>, mask: u128) -> Result<OpenSet> {
        if !self.is_open_mask(mask) {
            return Err(MgError::State(format!("{:?} is not open", self.ids_of(mask))));
        }
        Ok(self.open(mask))
    }
}

/// An open set of a particular host topology.
#[derive(Debug, Clone)]
pub struct OpenSet {
    topo: Arc<Topology>,
    mask: u128,
}

impl PartialEq for OpenSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.topo, &other.topo) && self.mask == other.mask
    }
}

impl Eq for OpenSet {}

impl OpenSet {
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn edges(&self) -> BTreeSet<String> {
        self.topo.ids_of(self.mask)
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_whole(&self) -> bool {
        self.mask == self.topo.full_mask()
    }

    fn host(&self, other: &OpenSet) -> Result<()> {
        if Arc::ptr_eq(&self.topo, &other.topo) {
            Ok(())
        } else {
            Err(MgError::Host)
        }
    }

    fn with(&self, mask: u128) -> OpenSet {
        OpenSet {
            topo: self.topo.clone(),
            mask,
        }
    }

    pub fn leq(&self, other: &OpenSet) -> Result<bool> {
        self.host(other)?;
        Ok(self.mask & !other.mask == 0)
    }

    pub fn join(&self, other: &OpenSet) -> Result<OpenSet> {
        self.host(other)?;
        Ok(self.with(self.mask | other.mask))
    }

    pub fn meet(&self, other: &OpenSet) -> Result<OpenSet> {
        self.host(other)?;
        Ok(self.with(self.topo.interior_mask(self.mask & other.mask)))
    }

    /// Relative pseudo-complement: the largest open `x` with
    /// `meet(self, x) ≤ other`.
    pub fn implies(&self, other: &OpenSet) -> Result<OpenSet> {
        self.host(other)?;
        let full = self.topo.full_mask();
        Ok(self.with(self.topo.interior_mask((full & !self.mask) | other.mask)))
    }

    /// Pseudo-complement: the largest open disjoint from `self`.
    pub fn not(&self) -> OpenSet {
        let full = self.topo.full_mask();
        self.with(self.topo.interior_mask(full & !self.mask))
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.edges().into_iter().collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// An open of one member of a forest.
#[derive(Debug, Clone, PartialEq)]
pub struct FtmgOpen {
    pub index: usize,
    pub set: OpenSet,
}

/// Every `(member, subbasis element)` pair of a forest.
pub fn ftmg_open_sets(f: &Ftmg) -> Result<Vec<FtmgOpen>> {
    let mut out = Vec::new();
    for (index, d) in f.forest().iter().enumerate() {
        let t = Topology::of(d)?;
        out.extend(t.subbasis().into_iter().map(|set| FtmgOpen { index, set }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
    use crate::types::TypeRegistry;

    /// `a → b → c`.
    pub(crate) fn chain(n: usize) -> Dtmg {
        let mut g = Tmg::new(Arc::new(TypeRegistry::new()));
        let ids: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        for id in &ids {
            g.add_edge(Edge::new(
                id.clone(),
                TargetTuple::new("e", vec![Target::new(1, "e"), Target::new(2, "e")]),
                vec![],
            ))
            .unwrap();
        }
        for w in ids.windows(2) {
            g.add_connection(Connection::new(TargetRef::new(w[0].clone(), 2), TargetRef::new(w[1].clone(), 1)))
                .unwrap();
        }
        Dtmg::all_lateral(g)
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn subbasis_sizes() {
        assert!(Topology::of(&chain(1)).unwrap().subbasis().is_empty());
        assert_eq!(Topology::of(&chain(2)).unwrap().subbasis().len(), 1);
        assert_eq!(Topology::of(&chain(3)).unwrap().subbasis().len(), 2);
    }

    #[test]
    fn interior_cases() {
        let t = Topology::of(&chain(3)).unwrap();
        assert!(t.interior(&set(&["a", "b", "c"])).unwrap().is_whole());
        assert!(t.interior(&set(&["a"])).unwrap().is_empty());
        assert_eq!(t.interior(&set(&["a", "b"])).unwrap().edges(), set(&["a", "b"]));
        assert!(!t.is_open(&set(&["a", "c"])).unwrap());
    }

    #[test]
    fn shared_edges_are_open() {
        let t = Topology::of(&chain(3)).unwrap();
        assert!(t.is_open(&set(&["b"])).unwrap());
        let (ab, bc) = (t.open_set(&set(&["a", "b"])).unwrap(), t.open_set(&set(&["b", "c"])).unwrap());
        assert_eq!(ab.meet(&bc).unwrap().edges(), set(&["b"]));
        assert_eq!(bc.not().edges(), BTreeSet::new());
        assert_eq!(bc.implies(&t.open_set(&set(&["b"])).unwrap()).unwrap().edges(), set(&["a", "b"]));
    }

    #[test]
    fn chain_is_not_boolean() {
        let t = Topology::of(&chain(3)).unwrap();
        let a = t.open_set(&set(&["b", "c"])).unwrap();
        assert!(a.not().is_empty());
        assert!(!a.not().join(&a).unwrap().is_whole());
        assert!(a.implies(&a).unwrap().is_whole());
        assert!(t.empty_set().not().is_whole());
    }

    #[test]
    fn different_hosts_do_not_mix() {
        let a = Topology::of(&chain(2)).unwrap().whole();
        let b = Topology::of(&chain(2)).unwrap().whole();
        assert_eq!(a.join(&b), Err(MgError::Host));
    }
}
