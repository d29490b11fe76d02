//! Metapath topology, Heyting operations on its opens, elementary
//! homomorphisms, smooth transformations and continuity checks.

pub mod continuity;
pub mod hom;
pub mod open;
pub mod smooth;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::edge::{Connection, TargetRef};
use crate::error::{MgError, Result};
use crate::tmg::Tmg;

pub use continuity::{m2m_ana, m2m_continuity_check, m2m_futu, DupSeed, Duplicate, Replay, Certificate, ContinuityReport, M2mResult, MorphismOutput, Species};
pub use hom::{elem_hom_apply, elem_hom_check, hom_apply_composite, hom_decompose, HomMapping, HOM_STEP_BOUND};
pub use open::{ftmg_open_sets, FtmgOpen, OpenSet, Topology};
pub use smooth::{preimage, smooth_check, smooth_image, SmoothImage, SmoothMapping};

/// An identification of edges of `S1` with edges of `S2`, together with
/// the target correspondence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Correspondence {
    pub edges: BTreeMap<String, String>,
    pub targets: BTreeMap<TargetRef, TargetRef>,
}

/// One failed condition of a mapping. Bullet 0 covers the shape of the
/// correspondence itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingViolation {
    pub bullet: u8,
    pub detail: String,
}

impl fmt::Display for MappingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bullet {}: {}", self.bullet, self.detail)
    }
}

fn violation(bullet: u8, detail: impl Into<String>) -> MappingViolation {
    MappingViolation {
        bullet,
        detail: detail.into(),
    }
}

impl Correspondence {
    /// Maps each `E1` onto `E2` slot by slot; arities must agree.
    pub fn positional(m: &Tmg, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut c = Correspondence::default();
        for &(a, b) in pairs {
            let ea = m.edge(a).ok_or_else(|| MgError::UnknownEdge(a.into()))?;
            let eb = m.edge(b).ok_or_else(|| MgError::UnknownEdge(b.into()))?;
            if ea.arity() != eb.arity() {
                return Err(MgError::Mapping(format!("{a} has arity {}, {b} has arity {}", ea.arity(), eb.arity())));
            }
            c.edges.insert(a.into(), b.into());
            for s in 1..=ea.arity() as u32 {
                c.targets.insert(TargetRef::new(a, s), TargetRef::new(b, s));
            }
        }
        Ok(c)
    }

    pub fn s1(&self) -> BTreeSet<String> {
        self.edges.keys().cloned().collect()
    }

    pub fn s2(&self) -> BTreeSet<String> {
        self.edges.values().cloned().collect()
    }

    /// Edges of `S1` outside `S2`; these leave the graph.
    pub fn removed(&self) -> BTreeSet<String> {
        let s2 = self.s2();
        self.edges.keys().filter(|a| !s2.contains(*a)).cloned().collect()
    }

    /// Every target of `S1` is mapped into the image of its edge.
    fn shape(&self, m: &Tmg) -> Vec<MappingViolation> {
        let mut out = Vec::new();
        for (a, b) in &self.edges {
            for id in [a, b] {
                if !m.contains_edge(id) {
                    out.push(violation(0, format!("edge {id} is not in the graph")));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in self.edges.keys() {
            let n = m.edge(a).map_or(0, |e| e.arity()) as u32;
            for s in 1..=n {
                if !self.targets.contains_key(&TargetRef::new(a.clone(), s)) {
                    out.push(violation(0, format!("target {a}.{s} is not mapped")));
                }
            }
        }
        for (t1, t2) in &self.targets {
            let Some(img) = self.edges.get(&t1.edge) else {
                out.push(violation(0, format!("{t1} lies outside S1")));
                continue;
            };
            if &t2.edge != img {
                out.push(violation(0, format!("{t1} maps to {t2}, outside {img}")));
            }
            if t1.slot == 0 || m.edge(&t1.edge).is_some_and(|e| t1.slot as usize > e.arity()) {
                out.push(violation(0, format!("{t1} is not a target")));
            }
            if t2.slot == 0 || m.edge(&t2.edge).is_none_or(|e| t2.slot as usize > e.arity()) {
                out.push(violation(0, format!("{t2} is not a target")));
            }
        }
        out
    }

    fn label(m: &Tmg, r: &TargetRef) -> Option<u32> {
        m.edge(&r.edge)
            .and_then(|e| e.tuple.targets.get((r.slot as usize).checked_sub(1)?))
            .map(|t| t.label)
    }

    fn target_type<'a>(m: &'a Tmg, r: &TargetRef) -> Option<&'a str> {
        m.edge(&r.edge).and_then(|e| e.slot_type(r.slot))
    }

    /// Pairs of source targets sharing edge and label whose images do not,
    /// or (with `backward`) the converse.
    fn colocation(&self, m: &Tmg, backward: bool) -> Vec<MappingViolation> {
        let mut out = Vec::new();
        let pairs: Vec<(&TargetRef, &TargetRef)> = self.targets.iter().collect();
        for (i, (a1, a2)) in pairs.iter().enumerate() {
            for (b1, b2) in &pairs[i + 1..] {
                let src = a1.edge == b1.edge && Self::label(m, a1) == Self::label(m, b1);
                let dst = a2.edge == b2.edge && Self::label(m, a2) == Self::label(m, b2);
                if src && !dst {
                    out.push(violation(3, format!("{a1} and {b1} share a label but {a2} and {b2} do not")));
                }
                if backward && dst && !src {
                    out.push(violation(3, format!("{a2} and {b2} share a label but {a1} and {b1} do not")));
                }
            }
        }
        out
    }

    /// `m` with every connection end in `S1` moved to its image and the
    /// edges of [`Correspondence::removed`] deleted.
    pub(crate) fn redirect(&self, m: &Tmg) -> Tmg {
        let removed = self.removed();
        let mut out = Tmg::new(m.registry().clone());
        for e in m.edges() {
            if !removed.contains(&e.id) {
                out.insert_edge_unchecked(e.clone());
            }
        }
        let map = |r: &TargetRef| -> TargetRef {
            match self.edges.get(&r.edge) {
                Some(img) if r.slot == 0 => TargetRef::new(img.clone(), 0),
                Some(_) => self.targets.get(r).cloned().unwrap_or_else(|| r.clone()),
                None => r.clone(),
            }
        };
        for c in m.connections() {
            let (from, to) = (map(&c.from), map(&c.to));
            if from != to {
                out.insert_connection_unchecked(Connection::new(from, to));
            }
        }
        out
    }
}
