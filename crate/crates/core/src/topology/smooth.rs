//! Elementary smooth transformations: identifications that may merge
//! targets and may specialize types.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{MgError, Result};
use crate::tmg::Tmg;
use crate::topology::open::{OpenSet, Topology};
use crate::topology::{violation, Correspondence, MappingViolation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothMapping(pub Correspondence);

impl SmoothMapping {
    pub fn positional(m: &Tmg, pairs: &[(&str, &str)]) -> Result<Self> {
        Correspondence::positional(m, pairs).map(SmoothMapping)
    }

    /// Every failed condition, in bullet order.
    pub fn violations(&self, m: &Tmg) -> Vec<MappingViolation> {
        let c = &self.0;
        let mut out = c.shape(m);
        if !out.is_empty() {
            return out;
        }
        let reg = m.registry();
        for (a, b) in &c.edges {
            let (ta, tb) = (&m.edge(a).unwrap().tuple.ty, &m.edge(b).unwrap().tuple.ty);
            if !reg.inherits(tb, ta).unwrap_or(false) {
                out.push(violation(1, format!("{b}: {tb} does not inherit from {a}: {ta}")));
            }
        }
        for (t1, t2) in &c.targets {
            let (y1, y2) = (
                Correspondence::target_type(m, t1).unwrap_or_default(),
                Correspondence::target_type(m, t2).unwrap_or_default(),
            );
            if !reg.inherits(y2, y1).unwrap_or(false) {
                out.push(violation(2, format!("{t2}: {y2} does not inherit from {t1}: {y1}")));
            }
        }
        out.extend(c.colocation(m, false));
        out
    }
}

pub fn smooth_check(m: &Tmg, s: &SmoothMapping) -> bool {
    s.violations(m).is_empty()
}

/// A smooth mapping carried out on a host: the image graph with its own
/// topology, and the host's edges under the topology pulled back from the
/// image.
#[derive(Debug, Clone)]
pub struct SmoothImage {
    pub image: Tmg,
    pub codomain: Arc<Topology>,
    pub domain: Arc<Topology>,
    pub raw: Arc<Topology>,
    pub edge_map: BTreeMap<String, String>,
}

pub fn smooth_image(m: &Tmg, s: &SmoothMapping) -> Result<SmoothImage> {
    if let Some(v) = s.violations(m).into_iter().next() {
        return Err(MgError::Smoothness(v.to_string()));
    }
    let image = s.0.redirect(m);
    let edge_map: BTreeMap<String, String> = m
        .edge_ids()
        .map(|x| (x.to_string(), s.0.edges.get(x).cloned().unwrap_or_else(|| x.to_string())))
        .collect();
    let codomain = Topology::of_tmg(&image)?;
    let mut arcs: Vec<(String, String)> = m
        .connections()
        .filter(|c| c.is_target_to_target() && c.from.edge != c.to.edge)
        .map(|c| (c.from.edge.clone(), c.to.edge.clone()))
        .collect();
    for b in codomain.subbasis() {
        let pair: Vec<String> = b.edges().into_iter().collect();
        let (xs, ys): (Vec<&String>, Vec<&String>) = (
            edge_map.iter().filter(|(_, g)| **g == pair[0]).map(|(x, _)| x).collect(),
            edge_map.iter().filter(|(_, g)| **g == pair[1]).map(|(x, _)| x).collect(),
        );
        for x in &xs {
            for y in &ys {
                arcs.push(((*x).clone(), (*y).clone()));
            }
        }
    }
    let ids: Vec<String> = m.edge_ids().map(str::to_string).collect();
    Ok(SmoothImage {
        image,
        codomain,
        domain: Topology::from_arcs(ids, &arcs)?,
        raw: Topology::of_tmg(m)?,
        edge_map,
    })
}

impl SmoothImage {
    fn preimage_mask(&self, o: &OpenSet) -> Result<u128> {
        if !Arc::ptr_eq(o.topology(), &self.codomain) {
            return Err(MgError::Host);
        }
        let hit = o.edges();
        self.domain.mask_of(
            self.edge_map
                .iter()
                .filter(|(_, g)| hit.contains(*g))
                .map(|(x, _)| x.as_str()),
        )
    }

    /// Host edges landing in `o`. The result is open in the pulled-back
    /// topology; a failure to be open is reported as an error.
    pub fn preimage(&self, o: &OpenSet) -> Result<OpenSet> {
        let mask = self.preimage_mask(o)?;
        self.domain
            .from_mask(mask)
            .map_err(|_| MgError::Smoothness(format!("preimage of {o} is not open")))
    }

    /// Whether the preimage of `o` is open in the host's own topology,
    /// without the pulled-back connections.
    pub fn preimage_open_in_host(&self, o: &OpenSet) -> Result<bool> {
        Ok(self.raw.is_open_mask(self.preimage_mask(o)?))
    }
}

/// One-shot preimage; `o` must be an open of the image's topology as held
/// by `img`.
pub fn preimage(img: &SmoothImage, o: &OpenSet) -> Result<OpenSet> {
    img.preimage(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
    use crate::types::TypeRegistry;

    fn host() -> Tmg {
        let mut reg = TypeRegistry::new();
        reg.declare_with_parent("A", "e", 1.0).unwrap();
        let mut g = Tmg::new(Arc::new(reg));
        for (id, ty) in [("a", "e"), ("b", "e"), ("c", "A")] {
            g.add_edge(Edge::new(id, TargetTuple::new(ty, vec![Target::new(1, ty), Target::new(2, ty)]), vec![]))
                .unwrap();
        }
        g.add_connection(Connection::new(TargetRef::new("a", 2), TargetRef::new("b", 1))).unwrap();
        g
    }

    #[test]
    fn identity_preimage() {
        let g = host();
        let s = SmoothMapping::positional(&g, &[("a", "a"), ("b", "b")]).unwrap();
        assert!(smooth_check(&g, &s));
        let img = smooth_image(&g, &s).unwrap();
        for o in img.codomain.opens() {
            assert_eq!(img.preimage(&o).unwrap().edges(), o.edges());
        }
    }

    #[test]
    fn specializing_is_smooth_and_generalizing_is_not() {
        let g = host();
        let s = SmoothMapping::positional(&g, &[("a", "c")]).unwrap();
        assert!(smooth_check(&g, &s));
        let back = SmoothMapping::positional(&g, &[("c", "a")]).unwrap();
        assert!(!smooth_check(&g, &back));
        assert!(matches!(smooth_image(&g, &back), Err(MgError::Smoothness(_))));
    }

    #[test]
    fn preimages_are_open() {
        let g = host();
        let img = smooth_image(&g, &SmoothMapping::positional(&g, &[("a", "c")]).unwrap()).unwrap();
        assert!(!img.image.contains_edge("a"));
        for o in img.codomain.opens() {
            let p = img.preimage(&o).unwrap();
            assert!(p.is_empty() || img.domain.is_open_mask(p.mask()));
        }
    }
}
