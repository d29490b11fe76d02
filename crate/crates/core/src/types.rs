//! Type registry: named types, an acyclic inheritance relation rooted at `e`,
//! and optional inheritance probabilities.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{MgError, Result};

/// Name of the root type every type inherits from.
pub const ROOT: &str = "e";

#[derive(Debug, Clone, PartialEq)]
pub struct TypeRegistry {
    // type -> (parent -> weight)
    parents: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Default for TypeRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeRegistry {
    /// A registry holding only the root type.
    pub fn new() -> Self {
        let mut parents = BTreeMap::new();
        parents.insert(ROOT.to_string(), BTreeMap::new());
        TypeRegistry { parents }
    }

    /// Declares `name` as a direct child of the root.
    pub fn declare(&mut self, name: &str) -> Result<()> {
        self.declare_with_parent(name, ROOT, 1.0)
    }

    /// Declares `name` (if new) and adds a parent link `name ≼ parent` with
    /// the given inheritance probability. Repeated declarations add further
    /// parent links.
    pub fn declare_with_parent(&mut self, name: &str, parent: &str, weight: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(MgError::TypeDecl(format!(
                "inheritance weight {weight} for `{name}` is outside [0,1]"
            )));
        }
        if name == ROOT {
            return Err(MgError::TypeDecl("the root type cannot have parents".into()));
        }
        if !self.contains(parent) {
            return Err(MgError::UnknownType(parent.to_string()));
        }
        if name == parent || (self.contains(name) && self.inherits_unchecked(parent, name)) {
            return Err(MgError::TypeDecl(format!(
                "parent link `{name}` : `{parent}` would create a cycle"
            )));
        }
        let links = self.parents.entry(name.to_string()).or_default();
        // an explicit parent replaces the implicit root link
        if parent != ROOT && links.len() == 1 && links.get(ROOT) == Some(&1.0) {
            links.clear();
        }
        links.insert(parent.to_string(), weight);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parents.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Direct parent links of `name` with their weights.
    pub fn parents_of(&self, name: &str) -> Result<&BTreeMap<String, f64>> {
        self.parents
            .get(name)
            .ok_or_else(|| MgError::UnknownType(name.to_string()))
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.contains(name) {
            Ok(())
        } else {
            Err(MgError::UnknownType(name.to_string()))
        }
    }

    /// `t1 ≼ t2` under the reflexive-transitive closure of parent links.
    pub fn inherits(&self, t1: &str, t2: &str) -> Result<bool> {
        self.check(t1)?;
        self.check(t2)?;
        Ok(self.inherits_unchecked(t1, t2))
    }

    fn inherits_unchecked(&self, t1: &str, t2: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![t1];
        while let Some(t) = stack.pop() {
            if t == t2 {
                return true;
            }
            if !seen.insert(t) {
                continue;
            }
            if let Some(ps) = self.parents.get(t) {
                stack.extend(ps.keys().map(String::as_str));
            }
        }
        false
    }

    pub fn comparable(&self, t1: &str, t2: &str) -> Result<bool> {
        Ok(self.inherits(t1, t2)? || self.inherits(t2, t1)?)
    }

    /// Best (maximum-product) inheritance weight along any chain from `t1` up
    /// to `t2`; 0 when `t1` does not inherit from `t2`.
    pub fn inherit_weight(&self, t1: &str, t2: &str) -> Result<f64> {
        self.check(t1)?;
        self.check(t2)?;
        let mut memo = BTreeMap::new();
        Ok(self.best_chain(t1, t2, &mut memo))
    }

    fn best_chain<'a>(&'a self, from: &'a str, to: &str, memo: &mut BTreeMap<&'a str, f64>) -> f64 {
        if from == to {
            return 1.0;
        }
        if let Some(&w) = memo.get(from) {
            return w;
        }
        let mut best = 0.0f64;
        if let Some(ps) = self.parents.get(from) {
            for (p, w) in ps {
                best = best.max(w * self.best_chain(p, to, memo));
            }
        }
        memo.insert(from, best);
        best
    }

    /// Compatibility probability of two types: the best chain weight in
    /// either direction, 0 when incomparable.
    pub fn comparable_weight(&self, t1: &str, t2: &str) -> Result<f64> {
        Ok(self.inherit_weight(t1, t2)?.max(self.inherit_weight(t2, t1)?))
    }

    /// Type equivalence (mutual inheritance); with an acyclic relation this
    /// is name equality.
    pub fn equivalent(&self, t1: &str, t2: &str) -> Result<bool> {
        Ok(self.inherits(t1, t2)? && self.inherits(t2, t1)?)
    }
}
