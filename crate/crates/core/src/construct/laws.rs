//! Executable law suite for the constructor algebra.

use std::fmt;
use std::sync::Arc;

use crate::construct::crf::{crf_beside, Crf};
use crate::construct::gen::{Bounds, Gen};
use crate::construct::ops::{beside, connect, empty, identity_wires, swap_wiring};
use crate::dtmg::Dtmg;
use crate::error::Result;
use crate::iso::{contract_wires, find_isomorphism, PortOrder};
use crate::types::TypeRegistry;

pub const LAWS: [&str; 14] = [
    "beside associativity",
    "empty unit",
    "connect with empty crf is beside",
    "abiding",
    "swap law",
    "left identity",
    "right identity",
    "composition associativity",
    "identity tensor",
    "interchange",
    "gamma with empty",
    "gamma over a sum",
    "gamma naturality",
    "gamma involution",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LawResult {
    pub law: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub seed: u64,
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(LawResult::passed)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {} ({} trials, {} failures)", r.law, r.trials, r.failures)?;
            if let Some(c) = &r.counterexample {
                writeln!(f, "  counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

fn same(a: &Dtmg, b: &Dtmg, order: PortOrder) -> bool {
    find_isomorphism(&contract_wires(a), &contract_wires(b), order).is_some()
}

/// Runs every law on `trials` seeded random instances. Each instance draws
/// fresh expressions with at most `max_edges` edges.
pub fn laws_check(seed: u64, trials: usize, max_edges: usize) -> Result<LawReport> {
    laws_check_in(seed, trials, max_edges, Bounds::default(), None)
}

pub fn laws_check_in(
    seed: u64,
    trials: usize,
    max_edges: usize,
    bounds: Bounds,
    registry: Option<Arc<TypeRegistry>>,
) -> Result<LawReport> {
    let mut gen = match registry {
        Some(r) => Gen::new(seed, r, bounds),
        None => {
            let mut g = Gen::crisp(seed);
            g.bounds = bounds;
            g
        }
    };
    let mut results: Vec<LawResult> = LAWS
        .iter()
        .map(|&law| LawResult {
            law,
            trials: 0,
            failures: 0,
            counterexample: None,
        })
        .collect();
    for _ in 0..trials {
        for (k, outcome) in trial(&mut gen, max_edges)?.into_iter().enumerate() {
            let r = &mut results[k];
            r.trials += 1;
            if let Some(c) = outcome {
                r.failures += 1;
                r.counterexample.get_or_insert(c);
            }
        }
    }
    Ok(LawReport { seed, results })
}

/// One instance of each law, in the order of [`LAWS`]; `Some` carries a
/// description of a failing instance.
fn trial(gen: &mut Gen, max_edges: usize) -> Result<Vec<Option<String>>> {
    let reg = gen.registry.clone();
    let (gx, g) = gen.bounded_expr(max_edges)?;
    let (hx, h) = gen.bounded_expr(max_edges)?;
    let (jx, j) = gen.bounded_expr(max_edges)?;
    let (kx, k) = gen.bounded_expr(max_edges)?;
    let check = |ok: bool, what: String| if ok { None } else { Some(what) };
    let mut out = Vec::with_capacity(LAWS.len());

    out.push(check(
        same(&beside(&beside(&g, &h)?, &j)?, &beside(&g, &beside(&h, &j)?)?, PortOrder::Strict),
        format!("g={gx} h={hx} j={jx}"),
    ));

    let e = empty(reg.clone());
    out.push(check(
        same(&beside(&e, &g)?, &g, PortOrder::Strict) && same(&beside(&g, &e)?, &g, PortOrder::Strict),
        format!("g={gx}"),
    ));

    out.push(check(
        same(&connect(&g, &Crf::empty(), &h)?, &beside(&g, &h)?, PortOrder::Strict),
        format!("g={gx} h={hx}"),
    ));

    // partial crfs reorder unmatched ports between the two sides
    let p = gen.crf_between(&g, &h);
    let q = gen.crf_between(&j, &k);
    let lhs = beside(&connect(&g, &p, &h)?, &connect(&j, &q, &k)?)?;
    let pq = crf_beside(&p, g.outputs().len(), h.inputs().len(), &q);
    let rhs = connect(&beside(&g, &j)?, &pq, &beside(&h, &k)?)?;
    out.push(check(
        same(&lhs, &rhs, PortOrder::Loose),
        format!("g={gx} P={p} h={hx} j={jx} Q={q} k={kx}"),
    ));

    let gi = g.inputs().len();
    let hi = h.inputs().len();
    let go = g.outputs().len();
    let ho = h.outputs().len();
    let pre = swap_wiring(reg.clone(), hi, gi);
    let post = swap_wiring(reg.clone(), go, ho);
    let lhs = connect(
        &connect(&pre, &Crf::identity(gi + hi), &beside(&g, &h)?)?,
        &Crf::identity(go + ho),
        &post,
    )?;
    out.push(check(
        same(&lhs, &beside(&h, &g)?, PortOrder::Strict),
        format!("g={gx} h={hx}"),
    ));

    out.push(check(
        same(&connect(&identity_wires(reg.clone(), gi), &Crf::identity(gi), &g)?, &g, PortOrder::Strict),
        format!("g={gx}"),
    ));
    out.push(check(
        same(&connect(&g, &Crf::identity(go), &identity_wires(reg.clone(), go))?, &g, PortOrder::Strict),
        format!("g={gx}"),
    ));

    // total compositions g ; c1 ; c2
    let (c1x, c1, p1) = gen.consumer(&g.output_types())?;
    let (c2x, c2, p2) = gen.consumer(&c1.output_types())?;
    let lhs = connect(&connect(&g, &p1, &c1)?, &p2, &c2)?;
    let rhs = connect(&g, &p1, &connect(&c1, &p2, &c2)?)?;
    out.push(check(
        same(&lhs, &rhs, PortOrder::Strict),
        format!("g={gx} c1={c1x} c2={c2x}"),
    ));

    let a = gi;
    let b = hi;
    out.push(check(
        same(
            &beside(&identity_wires(reg.clone(), a), &identity_wires(reg.clone(), b))?,
            &identity_wires(reg.clone(), a + b),
            PortOrder::Strict,
        ),
        format!("a={a} b={b}"),
    ));

    let (d1x, d1, q1) = gen.consumer(&j.output_types())?;
    let lhs = beside(&connect(&g, &p1, &c1)?, &connect(&j, &q1, &d1)?)?;
    let rhs = connect(
        &beside(&g, &j)?,
        &crf_beside(&p1, go, c1.inputs().len(), &q1),
        &beside(&c1, &d1)?,
    )?;
    out.push(check(
        same(&lhs, &rhs, PortOrder::Strict),
        format!("g={gx} c={c1x} j={jx} d={d1x}"),
    ));

    out.push(check(
        same(&swap_wiring(reg.clone(), a, 0), &identity_wires(reg.clone(), a), PortOrder::Strict),
        format!("a={a}"),
    ));

    let c = j.inputs().len();
    let lhs = swap_wiring(reg.clone(), a, b + c);
    let rhs = connect(
        &beside(&swap_wiring(reg.clone(), a, b), &identity_wires(reg.clone(), c))?,
        &Crf::identity(a + b + c),
        &beside(&identity_wires(reg.clone(), b), &swap_wiring(reg.clone(), a, c))?,
    )?;
    out.push(check(same(&lhs, &rhs, PortOrder::Strict), format!("a={a} b={b} c={c}")));

    // (g ∥ h) ; γ = γ ; (h ∥ g)
    let lhs = connect(&beside(&g, &h)?, &Crf::identity(go + ho), &swap_wiring(reg.clone(), go, ho))?;
    let rhs = connect(&swap_wiring(reg.clone(), gi, hi), &Crf::identity(gi + hi), &beside(&h, &g)?)?;
    out.push(check(same(&lhs, &rhs, PortOrder::Strict), format!("g={gx} h={hx}")));

    let lhs = connect(
        &swap_wiring(reg.clone(), a, b),
        &Crf::identity(a + b),
        &swap_wiring(reg.clone(), b, a),
    )?;
    out.push(check(
        same(&lhs, &identity_wires(reg, a + b), PortOrder::Strict),
        format!("a={a} b={b}"),
    ));

    Ok(out)
}
