//! ConDTMGs: a DTMG packaged with the crf that will route its outputs, and
//! expressions whose connect step takes its routing from the left operand.

use std::sync::Arc;

use crate::construct::crf::{crf_beside, Crf};
use crate::construct::expr::{ConstructionExpr, EdgeLeaf};
use crate::construct::ops;
use crate::dtmg::Dtmg;
use crate::error::{MgError, Result};
use crate::types::TypeRegistry;

#[derive(Debug, Clone, PartialEq)]
pub struct ConDtmg {
    graph: Dtmg,
    routing: Crf,
}

impl ConDtmg {
    pub fn new(graph: Dtmg, routing: Crf) -> Result<Self> {
        if routing.max_output() > graph.outputs().len() {
            return Err(MgError::Route(format!(
                "routing {routing} addresses output {} of {}",
                routing.max_output(),
                graph.outputs().len()
            )));
        }
        Ok(ConDtmg { graph, routing })
    }

    pub fn graph(&self) -> &Dtmg {
        &self.graph
    }

    pub fn routing(&self) -> &Crf {
        &self.routing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConValue {
    Plain(Dtmg),
    Routed(ConDtmg),
}

impl ConValue {
    pub fn graph(&self) -> &Dtmg {
        match self {
            ConValue::Plain(d) => d,
            ConValue::Routed(c) => &c.graph,
        }
    }

    pub fn into_graph(self) -> Dtmg {
        match self {
            ConValue::Plain(d) => d,
            ConValue::Routed(c) => c.graph,
        }
    }
}

/// `(g, p) ⋈ h = g ⋈_p h`. When `h` is routed its routing is carried to the
/// result, shifted past the unmatched outputs of `g`.
pub fn con_connect(c: &ConDtmg, h: &ConValue) -> Result<ConValue> {
    let joined = ops::connect(&c.graph, &c.routing, h.graph()).map_err(|e| MgError::Route(e.to_string()))?;
    match h {
        ConValue::Plain(_) => Ok(ConValue::Plain(joined)),
        ConValue::Routed(inner) => {
            let shift = c.graph.outputs().len() - c.routing.len();
            let routing = crf_beside(&Crf::empty(), shift, 0, &inner.routing);
            Ok(ConValue::Routed(ConDtmg::new(joined, routing)?))
        }
    }
}

/// Beside on possibly routed values; routings are placed side by side.
pub fn con_beside(a: &ConValue, b: &ConValue) -> Result<ConValue> {
    let graph = ops::beside(a.graph(), b.graph())?;
    let route = |v: &ConValue| match v {
        ConValue::Plain(_) => None,
        ConValue::Routed(c) => Some(c.routing.clone()),
    };
    match (route(a), route(b)) {
        (None, None) => Ok(ConValue::Plain(graph)),
        (p, q) => {
            let p = p.unwrap_or_default();
            let q = q.unwrap_or_default();
            let r = crf_beside(&p, a.graph().outputs().len(), p.max_input(), &q);
            Ok(ConValue::Routed(ConDtmg::new(graph, r)?))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConExpr {
    Empty,
    Edge(EdgeLeaf),
    Swap { left: usize, right: usize },
    Beside(Box<ConExpr>, Box<ConExpr>),
    /// Glues a routing onto a plain value.
    Route(Crf, Box<ConExpr>),
    /// Connects a routed left operand to the right operand.
    Connect(Box<ConExpr>, Box<ConExpr>),
}

pub fn con_eval(registry: &Arc<TypeRegistry>, x: &ConExpr) -> Result<ConValue> {
    let plain = |x: &ConstructionExpr| crate::construct::expr::eval(registry, x).map(ConValue::Plain);
    match x {
        ConExpr::Empty => plain(&ConstructionExpr::Empty),
        ConExpr::Edge(l) => plain(&ConstructionExpr::Edge(l.clone())),
        ConExpr::Swap { left, right } => plain(&ConstructionExpr::Swap { left: *left, right: *right }),
        ConExpr::Beside(l, r) => con_beside(&con_eval(registry, l)?, &con_eval(registry, r)?),
        ConExpr::Route(p, inner) => match con_eval(registry, inner)? {
            ConValue::Plain(d) => Ok(ConValue::Routed(ConDtmg::new(d, p.clone())?)),
            ConValue::Routed(_) => Err(MgError::Route("value is already routed".into())),
        },
        ConExpr::Connect(l, r) => match con_eval(registry, l)? {
            ConValue::Routed(c) => con_connect(&c, &con_eval(registry, r)?),
            ConValue::Plain(_) => Err(MgError::Route("left operand of connect carries no routing".into())),
        },
    }
}

/// `ConnectC(P, l, r)` becomes `Connect(Route(P, l), r)`.
pub fn to_con(x: &ConstructionExpr) -> ConExpr {
    match x {
        ConstructionExpr::Empty => ConExpr::Empty,
        ConstructionExpr::Edge(l) => ConExpr::Edge(l.clone()),
        ConstructionExpr::Swap { left, right } => ConExpr::Swap { left: *left, right: *right },
        ConstructionExpr::Beside(l, r) => ConExpr::Beside(Box::new(to_con(l)), Box::new(to_con(r))),
        ConstructionExpr::Connect(p, l, r) => ConExpr::Connect(
            Box::new(ConExpr::Route(p.clone(), Box::new(to_con(l)))),
            Box::new(to_con(r)),
        ),
    }
}

/// Inverse of [`to_con`]; fails on routings that are not immediately
/// consumed by a connect.
pub fn from_con(x: &ConExpr) -> Result<ConstructionExpr> {
    Ok(match x {
        ConExpr::Empty => ConstructionExpr::Empty,
        ConExpr::Edge(l) => ConstructionExpr::Edge(l.clone()),
        ConExpr::Swap { left, right } => ConstructionExpr::Swap { left: *left, right: *right },
        ConExpr::Beside(l, r) => ConstructionExpr::beside(from_con(l)?, from_con(r)?),
        ConExpr::Connect(l, r) => match &**l {
            ConExpr::Route(p, inner) => ConstructionExpr::connect(p.clone(), from_con(inner)?, from_con(r)?),
            _ => return Err(MgError::Route("connect without an immediate routing".into())),
        },
        ConExpr::Route(..) => return Err(MgError::Route("dangling routing".into())),
    })
}
