//! Edges, targets, target references and connections.

use std::fmt;

use crate::error::{MgError, Result};
use crate::types::TypeRegistry;
use crate::value::Value;

/// One target position of an edge: its index label and its type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Target {
    pub label: u32,
    pub ty: String,
}

impl Target {
    pub fn new(label: u32, ty: impl Into<String>) -> Self {
        Target { label, ty: ty.into() }
    }
}

/// A typed-target tuple: the edge type followed by the typed, index-labelled
/// targets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TargetTuple {
    pub ty: String,
    pub targets: Vec<Target>,
}

impl TargetTuple {
    pub fn new(ty: impl Into<String>, targets: Vec<Target>) -> Self {
        TargetTuple { ty: ty.into(), targets }
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Checks registered types and `1 ≤ label ≤ arity`.
    pub fn check(&self, reg: &TypeRegistry) -> Result<()> {
        if !reg.contains(&self.ty) {
            return Err(MgError::UnknownType(self.ty.clone()));
        }
        let n = self.arity();
        for t in &self.targets {
            if !reg.contains(&t.ty) {
                return Err(MgError::UnknownType(t.ty.clone()));
            }
            if t.label == 0 || t.label as usize > n {
                return Err(MgError::Range {
                    context: format!("index label of a `{}` edge", self.ty),
                    index: t.label as usize,
                    limit: n,
                });
            }
        }
        Ok(())
    }

    /// Type at `slot` (0 is the edge itself).
    pub fn slot_type(&self, slot: u32) -> Option<&str> {
        if slot == 0 {
            Some(&self.ty)
        } else {
            self.targets.get(slot as usize - 1).map(|t| t.ty.as_str())
        }
    }
}

/// Id-free structural identity of an edge: typed-target tuple plus values.
/// Edges with equal keys are interchangeable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub tuple: TargetTuple,
    pub values: Vec<Value>,
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (", self.tuple.ty)?;
        for (i, t) in self.tuple.targets.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", t.label, t.ty)?;
        }
        f.write_str(")")?;
        for v in &self.values {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub id: String,
    pub tuple: TargetTuple,
    pub values: Vec<Value>,
}

impl Edge {
    pub fn new(id: impl Into<String>, tuple: TargetTuple, values: Vec<Value>) -> Self {
        Edge { id: id.into(), tuple, values }
    }

    pub fn arity(&self) -> usize {
        self.tuple.arity()
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            tuple: self.tuple.clone(),
            values: self.values.clone(),
        }
    }

    pub fn slot_type(&self, slot: u32) -> Option<&str> {
        self.tuple.slot_type(slot)
    }
}

/// Names a target position (`slot ≥ 1`) or the whole edge (`slot = 0`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TargetRef {
    pub edge: String,
    pub slot: u32,
}

impl TargetRef {
    pub fn new(edge: impl Into<String>, slot: u32) -> Self {
        TargetRef { edge: edge.into(), slot }
    }
}

impl fmt::Display for TargetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.edge, self.slot)
    }
}

/// A connection `(E_a, E_b, t_a, t_b)`. The tuple is ordered: when a
/// connection takes part in a metapath it runs from `from` to `to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Connection {
    pub from: TargetRef,
    pub to: TargetRef,
}

impl Connection {
    pub fn new(from: TargetRef, to: TargetRef) -> Self {
        Connection { from, to }
    }

    pub fn touches(&self, edge: &str) -> bool {
        self.from.edge == edge || self.to.edge == edge
    }

    /// Both ends are proper targets (neither is a whole-edge attachment).
    pub fn is_target_to_target(&self) -> bool {
        self.from.slot != 0 && self.to.slot != 0
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.from, self.to)
    }
}
