//! Connection routing functions: invertible partial pairings of output
//! positions with input positions, both 1-based.

use std::fmt;
use std::str::FromStr;

use crate::edge::Edge;
use crate::error::{MgError, Result};

/// Largest `min(m, n)` accepted by [`enumerate_crfs`].
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Crf {
    // sorted by output index
    pairs: Vec<(usize, usize)>,
}

impl Crf {
    /// Builds a crf from `(output, input)` pairs, rejecting zero indices and
    /// repeated outputs or inputs.
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for (i, &(o, n)) in pairs.iter().enumerate() {
            if o == 0 || n == 0 {
                return Err(MgError::Crf("indices are 1-based".into()));
            }
            if i > 0 && pairs[i - 1].0 == o {
                return Err(MgError::Crf(format!("output {o} routed twice")));
            }
            if pairs[..i].iter().any(|&(_, m)| m == n) {
                return Err(MgError::Crf(format!("input {n} routed twice")));
            }
        }
        Ok(Crf { pairs })
    }

    pub fn empty() -> Self {
        Crf::default()
    }

    /// `(1,1), …, (k,k)`.
    pub fn identity(k: usize) -> Self {
        Crf {
            pairs: (1..=k).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_output(&self) -> usize {
        self.pairs.iter().map(|p| p.0).max().unwrap_or(0)
    }

    pub fn max_input(&self) -> usize {
        self.pairs.iter().map(|p| p.1).max().unwrap_or(0)
    }

    pub fn input_for(&self, output: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == output).map(|p| p.1)
    }

    /// Checks the indices address `m` outputs and `n` inputs.
    pub fn check_bounds(&self, m: usize, n: usize) -> Result<()> {
        for &(o, i) in &self.pairs {
            if o > m {
                return Err(MgError::Range {
                    context: "crf output index".into(),
                    index: o,
                    limit: m,
                });
            }
            if i > n {
                return Err(MgError::Range {
                    context: "crf input index".into(),
                    index: i,
                    limit: n,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Crf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (o, n)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}>{n}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Crf {
    type Err = MgError;

    /// Parses `[o1>i1,o2>i2]`; `[]` is the empty crf.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| MgError::Crf(format!("expected `[o>i,...]`, got `{s}`")))?;
        let mut pairs = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (o, i) = part
                .split_once('>')
                .ok_or_else(|| MgError::Crf(format!("bad pair `{part}`")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| MgError::Crf(format!("bad index `{x}`")))
            };
            pairs.push((num(o)?, num(i)?));
        }
        Crf::new(pairs)
    }
}

/// Block crf `p ∥ q`: `q`'s indices shift past `p`'s `m_p` outputs and
/// `n_p` inputs.
pub fn crf_beside(p: &Crf, m_p: usize, n_p: usize, q: &Crf) -> Crf {
    let mut pairs = p.pairs.clone();
    pairs.extend(q.pairs.iter().map(|&(o, i)| (o + m_p, i + n_p)));
    pairs.sort_unstable();
    Crf { pairs }
}

/// Number of nonempty crfs between `m` outputs and `n` inputs:
/// `Σ_k C(m,k)·C(n,k)·k!`.
pub fn crf_count(m: usize, n: usize) -> u128 {
    let binom = |a: usize, b: usize| -> u128 {
        (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i as u128 + 1))
    };
    (1..=m.min(n))
        .map(|k| binom(m, k) * binom(n, k) * (1..=k as u128).product::<u128>())
        .sum()
}

/// All nonempty crfs for `m` outputs and `n` inputs, ordered by size and
/// then lexicographically.
pub fn enumerate_crfs(m: usize, n: usize) -> Result<CrfIter> {
    if m.min(n) > ENUMERATION_CAP {
        return Err(MgError::Capacity(format!(
            "crf enumeration needs min(m, n) ≤ {ENUMERATION_CAP}, got {}",
            m.min(n)
        )));
    }
    Ok(CrfIter {
        m,
        n,
        k: 0,
        outs: vec![],
        ins: vec![],
        done: m.min(n) == 0,
    })
}

pub struct CrfIter {
    m: usize,
    n: usize,
    k: usize,
    outs: Vec<usize>,
    ins: Vec<usize>,
    done: bool,
}

impl CrfIter {
    fn advance(&mut self) -> bool {
        if self.k == 0 {
            return self.start(1);
        }
        if next_injection(&mut self.ins, self.n) {
            return true;
        }
        if next_combination(&mut self.outs, self.m) {
            self.ins = (1..=self.k).collect();
            return true;
        }
        self.start(self.k + 1)
    }

    fn start(&mut self, k: usize) -> bool {
        if k > self.m.min(self.n) {
            return false;
        }
        self.k = k;
        self.outs = (1..=k).collect();
        self.ins = (1..=k).collect();
        true
    }
}

impl Iterator for CrfIter {
    type Item = Crf;

    fn next(&mut self) -> Option<Crf> {
        if self.done || !self.advance() {
            self.done = true;
            return None;
        }
        Some(Crf {
            pairs: self.outs.iter().copied().zip(self.ins.iter().copied()).collect(),
        })
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - (k - 1 - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn next_injection(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        let used = |v: usize, s: &[usize]| s[..i].contains(&v);
        let mut v = s[i] + 1;
        while v <= n && used(v, s) {
            v += 1;
        }
        if v <= n {
            s[i] = v;
            let mut next = 1;
            for j in i + 1..k {
                while s[..j].contains(&next) {
                    next += 1;
                }
                s[j] = next;
                next += 1;
            }
            return true;
        }
    }
    false
}

/// `swap_{j,k}` on an edge: targets `j` and `k` trade places, each keeping
/// its label and type.
pub fn swap_edge(e: &Edge, j: usize, k: usize) -> Result<Edge> {
    let n = e.arity();
    for idx in [j, k] {
        if idx == 0 || idx > n {
            return Err(MgError::Range {
                context: format!("swap on edge `{}`", e.id),
                index: idx,
                limit: n,
            });
        }
    }
    let mut out = e.clone();
    out.tuple.targets.swap(j - 1, k - 1);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Outputs,
    Inputs,
}

/// Exchange of two positions on one side of a crf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapStep {
    pub side: Side,
    pub j: usize,
    pub k: usize,
}

impl SwapStep {
    pub fn apply(&self, p: &Crf) -> Crf {
        let tr = |x: usize| {
            if x == self.j {
                self.k
            } else if x == self.k {
                self.j
            } else {
                x
            }
        };
        let mut pairs: Vec<(usize, usize)> = p
            .pairs
            .iter()
            .map(|&(o, i)| match self.side {
                Side::Outputs => (tr(o), i),
                Side::Inputs => (o, tr(i)),
            })
            .collect();
        pairs.sort_unstable();
        Crf { pairs }
    }
}

/// Swap steps turning `p` into `p1` (both over `m` outputs and `n` inputs).
pub fn crf_from_swaps(p: &Crf, p1: &Crf, m: usize, n: usize) -> Result<Vec<SwapStep>> {
    if p.len() != p1.len() {
        return Err(MgError::Size(format!(
            "crfs of sizes {} and {} are not swap-equivalent",
            p.len(),
            p1.len()
        )));
    }
    p.check_bounds(m, n)?;
    p1.check_bounds(m, n)?;
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let mut push = |cur: &mut Crf, s: SwapStep| {
        *cur = s.apply(cur);
        steps.push(s);
    };
    let want_out: Vec<usize> = p1.pairs.iter().map(|x| x.0).collect();
    for &o in &want_out {
        if cur.input_for(o).is_none() {
            let spare = cur
                .pairs
                .iter()
                .map(|x| x.0)
                .find(|x| !want_out.contains(x))
                .expect("equal sizes leave a spare output");
            push(&mut cur, SwapStep { side: Side::Outputs, j: spare, k: o });
        }
    }
    for &(o, i1) in &p1.pairs {
        let i = cur.input_for(o).expect("outputs aligned");
        if i != i1 {
            push(&mut cur, SwapStep { side: Side::Inputs, j: i, k: i1 });
        }
    }
    debug_assert_eq!(&cur, p1);
    Ok(steps)
}
