//! Continuity of DTMG-to-DTMG morphisms in the metapath topology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::construct::expr::{eval_with_ids, ConstructionExpr};
use crate::dtmg::Dtmg;
use crate::error::{MgError, Result};
use crate::morph::algebra::{ana, DtmgCoalgebra, Layer};
use crate::morph::history::{futu, FutuCoalgebra};
use crate::topology::open::Topology;
use crate::types::TypeRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    Ana,
    Futu,
    Cata,
    Histo,
    Hylo,
    Chrono,
}

impl Species {
    pub fn is_unfold(self) -> bool {
        matches!(self, Species::Ana | Species::Futu)
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Ana => "ana",
            Species::Futu => "futu",
            Species::Cata => "cata",
            Species::Histo => "histo",
            Species::Hylo => "hylo",
            Species::Chrono => "chrono",
        })
    }
}

/// Caller's claim about the continuity of the beside and connect handlers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub oplus: bool,
    pub otimes: bool,
}

/// A DTMG produced from a seed DTMG, with each output edge traced to the
/// seed edge it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct M2mResult {
    pub output: Dtmg,
    pub origin: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MorphismOutput {
    Dtmg(M2mResult),
    /// A carrier that is not a DTMG; named for the error message.
    Other(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub species: Species,
    pub opens_checked: usize,
    /// Seed opens whose preimage is not open in the output.
    pub failures: Vec<BTreeSet<String>>,
    pub hypothesis_failed: bool,
}

impl ContinuityReport {
    pub fn continuous(&self) -> bool {
        self.failures.is_empty()
    }

    /// Discontinuous although the hypothesis held.
    pub fn theorem_violated(&self) -> bool {
        !self.hypothesis_failed && !self.continuous()
    }
}

impl fmt::Display for ContinuityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} opens, {} failures{}",
            self.species,
            self.opens_checked,
            self.failures.len(),
            if self.hypothesis_failed { ", hypothesis failed" } else { "" }
        )
    }
}

/// Checks that the preimage of every open of `seed` under the origin map
/// is open in the output. Fold species need a certificate; a certificate
/// that does not vouch for both operators marks the hypothesis as failed.
pub fn m2m_continuity_check(
    species: Species,
    out: &MorphismOutput,
    seed: &Dtmg,
    cert: Option<Certificate>,
) -> Result<ContinuityReport> {
    let r = match out {
        MorphismOutput::Dtmg(r) => r,
        MorphismOutput::Other(what) => {
            return Err(MgError::Applicability(format!("{species} produces {what}, not a DTMG")))
        }
    };
    let hypothesis_failed = match (species.is_unfold(), cert) {
        (true, _) => false,
        (false, Some(c)) => !(c.oplus && c.otimes),
        (false, None) => {
            return Err(MgError::Applicability(format!("{species} needs a continuity certificate")))
        }
    };
    for y in r.output.base().edge_ids() {
        match r.origin.get(y) {
            Some(x) if seed.base().contains_edge(x) => {}
            _ => return Err(MgError::Applicability(format!("output edge {y} has no origin in the seed"))),
        }
    }
    let src = Topology::of(seed)?;
    let dst = Topology::of(&r.output)?;
    let mut failures = Vec::new();
    let opens = src.opens();
    for p in &opens {
        let hit = p.edges();
        let pre = dst.mask_of(
            r.origin
                .iter()
                .filter(|(y, x)| hit.contains(*x) && r.output.base().contains_edge(y))
                .map(|(y, _)| y.as_str()),
        )?;
        if !dst.is_open_mask(pre) {
            failures.push(hit);
        }
    }
    Ok(ContinuityReport {
        species,
        opens_checked: opens.len(),
        failures,
        hypothesis_failed,
    })
}

fn traced(registry: &Arc<TypeRegistry>, x: &ConstructionExpr) -> Result<M2mResult> {
    let (output, ids) = eval_with_ids(registry, x)?;
    let mut origin = BTreeMap::new();
    for (id, leaf) in ids.iter().zip(x.leaves()) {
        let name = leaf
            .name
            .clone()
            .ok_or_else(|| MgError::Applicability(format!("leaf {id} carries no origin")))?;
        origin.insert(id.clone(), name);
    }
    Ok(M2mResult { output, origin })
}

/// Runs an anamorphism whose leaves are named after seed edges.
pub fn m2m_ana<C: DtmgCoalgebra>(coalg: &C, registry: &Arc<TypeRegistry>, seed: &C::Seed) -> Result<M2mResult> {
    traced(registry, &ana(coalg, seed)?)
}

/// As [`m2m_ana`] for a futumorphism.
pub fn m2m_futu<C: FutuCoalgebra>(coalg: &C, registry: &Arc<TypeRegistry>, seed: &C::Seed) -> Result<M2mResult> {
    traced(registry, &futu(coalg, registry, seed)?.0)
}

/// Unfolds an expression back into itself.
pub struct Replay;

impl DtmgCoalgebra for Replay {
    type Seed = ConstructionExpr;

    fn measure(&self, seed: &ConstructionExpr) -> u64 {
        seed.size() as u64
    }
    fn classify(&self, seed: &ConstructionExpr) -> Result<Layer<ConstructionExpr>> {
        Ok(match seed {
            ConstructionExpr::Empty => Layer::Empty,
            ConstructionExpr::Edge(l) => Layer::Edge(l.clone()),
            ConstructionExpr::Swap { left, right } => Layer::Swap {
                left: *left,
                right: *right,
            },
            ConstructionExpr::Beside(l, r) => Layer::Beside((**l).clone(), (**r).clone()),
            ConstructionExpr::Connect(p, l, r) => Layer::Connect(p.clone(), (**l).clone(), (**r).clone()),
        })
    }
}

#[derive(Debug, Clone)]
pub enum DupSeed {
    Twice(ConstructionExpr),
    Once(ConstructionExpr),
}

/// Unfolds an expression into two copies of itself side by side.
pub struct Duplicate;

impl DtmgCoalgebra for Duplicate {
    type Seed = DupSeed;

    fn measure(&self, seed: &DupSeed) -> u64 {
        match seed {
            DupSeed::Twice(x) => 2 * x.size() as u64 + 1,
            DupSeed::Once(x) => x.size() as u64,
        }
    }
    fn classify(&self, seed: &DupSeed) -> Result<Layer<DupSeed>> {
        Ok(match seed {
            DupSeed::Twice(x) => Layer::Beside(DupSeed::Once(x.clone()), DupSeed::Once(x.clone())),
            DupSeed::Once(x) => match Replay.classify(x)? {
                Layer::Empty => Layer::Empty,
                Layer::Edge(l) => Layer::Edge(l),
                Layer::Swap { left, right } => Layer::Swap { left, right },
                Layer::Beside(a, b) => Layer::Beside(DupSeed::Once(a), DupSeed::Once(b)),
                Layer::Connect(p, a, b) => Layer::Connect(p, DupSeed::Once(a), DupSeed::Once(b)),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::expr::decompose;
    use crate::construct::gen::Gen;

    #[test]
    fn identity_and_duplicate_are_continuous() {
        let mut g = Gen::crisp(7);
        let reg = g.registry.clone();
        for n in 1..=6 {
            let d = g.dtmg(n);
            let x = decompose(&d).unwrap();
            let id = m2m_ana(&Replay, &reg, &x).unwrap();
            let rep = m2m_continuity_check(Species::Ana, &MorphismOutput::Dtmg(id), &d, None).unwrap();
            assert!(rep.continuous(), "{rep}");
            let dup = m2m_ana(&Duplicate, &reg, &DupSeed::Twice(x)).unwrap();
            assert_eq!(dup.output.edge_count(), 2 * d.edge_count());
            let rep = m2m_continuity_check(Species::Ana, &MorphismOutput::Dtmg(dup), &d, None).unwrap();
            assert!(rep.continuous(), "{rep}");
        }
    }

    #[test]
    fn certificates_and_applicability() {
        let mut g = Gen::crisp(3);
        let reg = g.registry.clone();
        let d = g.dtmg(3);
        let r = m2m_ana(&Replay, &reg, &decompose(&d).unwrap()).unwrap();
        let out = MorphismOutput::Dtmg(r);
        let bad = Certificate {
            oplus: true,
            otimes: false,
        };
        let rep = m2m_continuity_check(Species::Cata, &out, &d, Some(bad)).unwrap();
        assert!(rep.hypothesis_failed && !rep.theorem_violated());
        assert!(matches!(
            m2m_continuity_check(Species::Cata, &out, &d, None),
            Err(MgError::Applicability(_))
        ));
        assert!(matches!(
            m2m_continuity_check(Species::Cata, &MorphismOutput::Other("usize".into()), &d, Some(bad)),
            Err(MgError::Applicability(_))
        ));
    }
}
