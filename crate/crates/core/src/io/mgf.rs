//! MGF, the line-oriented text format for registries, TMGs, DTMGs and
//! traces.
//!
//! ```text
//! type A
//! type B : A @ 0.5
//! edge x : A (1:e, 2:B) values 1 "s"
//! conn x.2 y.1
//! dtmg d in x.1 out y.2 lat
//! trace t
//! ev x 2 -> y 1
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::dtmg::Dtmg;
use crate::edge::{Connection, Edge, Target, TargetRef, TargetTuple};
use crate::error::{MgError, Result};
use crate::process::{traversal_to_dtmg, Trace, TraversalEvent};
use crate::tmg::Tmg;
use crate::types::{TypeRegistry, ROOT};
use crate::value::Value;

/// Everything one MGF document holds. DTMG sections partition the dangling
/// targets of the document's whole TMG.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfDocument {
    pub registry: Arc<TypeRegistry>,
    pub tmg: Tmg,
    pub dtmgs: BTreeMap<String, Dtmg>,
    pub traces: Vec<Trace>,
}

impl MgfDocument {
    pub fn new(tmg: Tmg) -> Self {
        MgfDocument {
            registry: tmg.registry().clone(),
            tmg,
            dtmgs: BTreeMap::new(),
            traces: vec![],
        }
    }

    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Punct(char),
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(MgError::Parse {
        line,
        message: message.into(),
    })
}

fn lex(line: usize, text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            ':' | '(' | ')' | ',' | '@' | '[' | ']' => {
                chars.next();
                out.push(Tok::Punct(c));
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return fail(line, "unterminated string"),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            Some(o) => return fail(line, format!("unknown escape \\{o}")),
                            None => return fail(line, "unterminated string"),
                        },
                        Some(o) => s.push(o),
                    }
                }
                out.push(Tok::Str(s));
            }
            _ => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || ":(),@[]\"#".contains(c) {
                        break;
                    }
                    w.push(c);
                    chars.next();
                }
                out.push(Tok::Word(w));
            }
        }
    }
    Ok(out)
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct Cursor<'a> {
    line: usize,
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        self.pos = (self.pos + 1).min(self.toks.len());
        t
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            _ => fail(self.line, format!("expected {what}")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        let w = self.word(what)?;
        if !is_ident(w) {
            return fail(self.line, format!("`{w}` is not a valid {what}"));
        }
        Ok(w.to_string())
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Punct(p)) if *p == c => Ok(()),
            _ => fail(self.line, format!("expected `{c}`")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn end(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            fail(self.line, "unexpected trailing input")
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let w = self.word(what)?;
        w.parse()
            .or_else(|_| fail(self.line, format!("`{w}` is not a valid {what}")))
    }

    fn value(&mut self) -> Result<Value> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(Value::Text(s.clone())),
            Some(Tok::Punct('[')) => {
                let mut items = Vec::new();
                while !self.eat(']') {
                    if self.done() {
                        return fail(self.line, "unterminated list");
                    }
                    items.push(self.value()?);
                }
                Ok(Value::List(items))
            }
            Some(Tok::Word(w)) => {
                if let Ok(i) = w.parse::<i64>() {
                    Ok(Value::Int(i))
                } else if let Ok(x) = w.parse::<f64>() {
                    Ok(Value::Float(x))
                } else {
                    fail(self.line, format!("`{w}` is not a value"))
                }
            }
            _ => fail(self.line, "expected a value"),
        }
    }
}

fn target_ref(line: usize, w: &str) -> Result<TargetRef> {
    let Some((id, slot)) = w.rsplit_once('.') else {
        return fail(line, format!("`{w}` is not of the form id.slot"));
    };
    if !is_ident(id) {
        return fail(line, format!("`{id}` is not a valid edge id"));
    }
    let slot = slot
        .parse()
        .or_else(|_| fail(line, format!("`{slot}` is not a valid slot")))?;
    Ok(TargetRef::new(id, slot))
}

enum Stmt {
    Type {
        name: String,
        parent: Option<(String, f64)>,
    },
    Edge(Edge),
    Conn(Connection),
    Dtmg {
        name: String,
        inputs: Vec<TargetRef>,
        outputs: Vec<TargetRef>,
        lateral: Vec<TargetRef>,
    },
    Trace(String),
    Ev {
        src: String,
        src_idx: Vec<u32>,
        dst: String,
        dst_idx: Vec<u32>,
    },
}

fn statement(line: usize, toks: &[Tok]) -> Result<Stmt> {
    let mut c = Cursor { line, toks, pos: 0 };
    let kw = c.word("a statement keyword")?;
    let s = match kw {
        "type" => {
            let name = c.ident("type name")?;
            let parent = if c.eat(':') {
                let p = c.ident("parent type")?;
                let w = if c.eat('@') { c.number("weight")? } else { 1.0 };
                Some((p, w))
            } else {
                None
            };
            Stmt::Type { name, parent }
        }
        "edge" => {
            let id = c.ident("edge id")?;
            c.punct(':')?;
            let ty = c.ident("edge type")?;
            c.punct('(')?;
            let mut targets = Vec::new();
            if !c.eat(')') {
                loop {
                    let label = c.number("index label")?;
                    c.punct(':')?;
                    targets.push(Target::new(label, c.ident("target type")?));
                    if c.eat(')') {
                        break;
                    }
                    if !c.eat(',') {
                        return fail(line, "expected `,` or `)`");
                    }
                }
            }
            let mut values = Vec::new();
            if !c.done() {
                if c.word("`values`")? != "values" {
                    return fail(line, "expected `values`");
                }
                if c.done() {
                    return fail(line, "`values` needs at least one value");
                }
                while !c.done() {
                    values.push(c.value()?);
                }
            }
            Stmt::Edge(Edge::new(id, TargetTuple::new(ty, targets), values))
        }
        "conn" => {
            let a = target_ref(line, c.word("target reference")?)?;
            let b = target_ref(line, c.word("target reference")?)?;
            Stmt::Conn(Connection::new(a, b))
        }
        "dtmg" => {
            let name = c.ident("dtmg name")?;
            let mut lists: [Option<Vec<TargetRef>>; 3] = [None, None, None];
            let mut cur: Option<usize> = None;
            while let Some(w) = c.next() {
                let Tok::Word(w) = w else {
                    return fail(line, "expected a target reference");
                };
                let slot = match w.as_str() {
                    "in" => Some(0),
                    "out" => Some(1),
                    "lat" => Some(2),
                    _ => None,
                };
                match (slot, cur) {
                    (Some(k), _) => {
                        if lists[k].is_some() {
                            return fail(line, format!("`{w}` appears twice"));
                        }
                        lists[k] = Some(vec![]);
                        cur = Some(k);
                    }
                    (None, Some(k)) => lists[k].as_mut().unwrap().push(target_ref(line, w)?),
                    (None, None) => return fail(line, "expected `in`, `out` or `lat`"),
                }
            }
            let [i, o, l] = lists;
            Stmt::Dtmg {
                name,
                inputs: i.unwrap_or_default(),
                outputs: o.unwrap_or_default(),
                lateral: l.unwrap_or_default(),
            }
        }
        "trace" => Stmt::Trace(c.ident("trace name")?),
        "ev" => {
            let src = c.ident("source edge id")?;
            let mut src_idx = Vec::new();
            loop {
                match c.peek() {
                    Some(Tok::Word(w)) if w == "->" => {
                        c.next();
                        break;
                    }
                    None => return fail(line, "expected `->`"),
                    _ => src_idx.push(c.number("target index")?),
                }
            }
            let dst = c.ident("destination edge id")?;
            let mut dst_idx = Vec::new();
            while !c.done() {
                dst_idx.push(c.number("target index")?);
            }
            Stmt::Ev {
                src,
                src_idx,
                dst,
                dst_idx,
            }
        }
        other => return fail(line, format!("unknown statement `{other}`")),
    };
    c.end()?;
    Ok(s)
}

fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| MgError::Parse {
        line,
        message: e.to_string(),
    })
}

/// Parses and fully validates a document.
pub fn parse(text: &str) -> Result<MgfDocument> {
    let mut stmts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = lex(i + 1, raw)?;
        if !toks.is_empty() {
            stmts.push((i + 1, statement(i + 1, &toks)?));
        }
    }
    let mut reg = TypeRegistry::new();
    let mut links = BTreeSet::new();
    for (line, s) in &stmts {
        if let Stmt::Type { name, parent } = s {
            if name == ROOT && parent.is_none() {
                continue;
            }
            let p = parent.as_ref().map_or(ROOT, |(p, _)| p.as_str());
            if !links.insert((name.clone(), p.to_string())) {
                return fail(*line, format!("duplicate type link `{name}` : `{p}`"));
            }
            let r = match parent {
                None => reg.declare(name),
                Some((p, w)) => reg.declare_with_parent(name, p, *w),
            };
            at(*line, r)?;
        }
    }
    let reg = Arc::new(reg);
    let mut g = Tmg::new(reg.clone());
    for (line, s) in &stmts {
        if let Stmt::Edge(e) = s {
            at(*line, g.add_edge(e.clone()))?;
        }
    }
    for (line, s) in &stmts {
        if let Stmt::Conn(c) = s {
            if c.from.slot == 0 && c.to.slot == 0 {
                return fail(*line, format!("connection {c}: both slots are whole-edge (0)"));
            }
            if g.has_connection(c) {
                return fail(*line, format!("duplicate connection {c}"));
            }
            at(*line, g.add_connection(c.clone()))?;
        }
    }
    let mut doc = MgfDocument::new(g);
    let mut trace: Option<(usize, Trace)> = None;
    let mut finished: Vec<(usize, Trace)> = Vec::new();
    for (line, s) in stmts {
        if !matches!(s, Stmt::Ev { .. }) {
            finished.extend(trace.take());
        }
        match s {
            Stmt::Dtmg {
                name,
                inputs,
                outputs,
                lateral,
            } => {
                if doc.dtmgs.contains_key(&name) {
                    return fail(line, format!("dtmg `{name}` declared twice"));
                }
                let d = at(line, Dtmg::new(doc.tmg.clone(), inputs, outputs, lateral))?;
                doc.dtmgs.insert(name, d);
            }
            Stmt::Trace(name) => {
                if finished.iter().any(|(_, t)| t.name == name) {
                    return fail(line, format!("trace `{name}` declared twice"));
                }
                trace = Some((
                    line,
                    Trace {
                        name,
                        events: vec![],
                    },
                ));
            }
            Stmt::Ev {
                src,
                src_idx,
                dst,
                dst_idx,
            } => {
                let Some((_, t)) = trace.as_mut() else {
                    return fail(line, "`ev` outside a trace");
                };
                let time = t.events.len() as u64 + 1;
                t.events.push(TraversalEvent::new(src, src_idx, dst, dst_idx, time));
                at(line, traversal_to_dtmg(&doc.tmg, t))?;
            }
            _ => {}
        }
    }
    finished.extend(trace.take());
    doc.traces = finished.into_iter().map(|(_, t)| t).collect();
    Ok(doc)
}

/// Types in dependency order, ties broken by name.
fn type_order(reg: &TypeRegistry) -> Vec<&str> {
    let mut done: BTreeSet<&str> = BTreeSet::from([ROOT]);
    let mut out = Vec::new();
    let mut rest: Vec<&str> = reg.names().filter(|n| *n != ROOT).collect();
    while !rest.is_empty() {
        let ready = rest
            .iter()
            .position(|n| reg.parents_of(n).unwrap().keys().all(|p| done.contains(p.as_str())))
            .expect("registry is acyclic");
        let n = rest.remove(ready);
        done.insert(n);
        out.push(n);
    }
    out
}

fn write_ref_list(s: &mut String, kw: &str, refs: &[TargetRef]) {
    s.push(' ');
    s.push_str(kw);
    for r in refs {
        let _ = write!(s, " {r}");
    }
}

/// Canonical text: types in dependency order, edges in canonical order,
/// connections sorted, DTMGs by name with lateral targets sorted, traces in
/// document order.
pub fn serialize(doc: &MgfDocument) -> String {
    let mut s = String::new();
    let reg = &doc.registry;
    for name in type_order(reg) {
        let parents = reg.parents_of(name).unwrap();
        if parents.len() == 1 && parents.get(ROOT) == Some(&1.0) {
            let _ = writeln!(s, "type {name}");
            continue;
        }
        // root link last
        let mut links: Vec<(&String, &f64)> = parents.iter().filter(|(p, _)| *p != ROOT).collect();
        links.extend(parents.get_key_value(ROOT));
        for (p, w) in links {
            if *w == 1.0 {
                let _ = writeln!(s, "type {name} : {p}");
            } else {
                let _ = writeln!(s, "type {name} : {p} @ {w}");
            }
        }
    }
    for e in doc.tmg.canonical_edges() {
        let ts: Vec<String> = e.tuple.targets.iter().map(|t| format!("{}:{}", t.label, t.ty)).collect();
        let _ = write!(s, "edge {} : {} ({})", e.id, e.tuple.ty, ts.join(", "));
        if !e.values.is_empty() {
            s.push_str(" values");
            for v in &e.values {
                let _ = write!(s, " {v}");
            }
        }
        s.push('\n');
    }
    for c in doc.tmg.connections() {
        let _ = writeln!(s, "conn {} {}", c.from, c.to);
    }
    for (name, d) in &doc.dtmgs {
        let _ = write!(s, "dtmg {name}");
        let mut lat = d.lateral().to_vec();
        lat.sort();
        write_ref_list(&mut s, "in", d.inputs());
        write_ref_list(&mut s, "out", d.outputs());
        write_ref_list(&mut s, "lat", &lat);
        s.push('\n');
    }
    for t in &doc.traces {
        let _ = writeln!(s, "trace {}", t.name);
        for e in &t.events {
            let _ = write!(s, "ev {}", e.src);
            for i in &e.src_idx {
                let _ = write!(s, " {i}");
            }
            let _ = write!(s, " -> {}", e.dst);
            for i in &e.dst_idx {
                let _ = write!(s, " {i}");
            }
            s.push('\n');
        }
    }
    s
}

/// Parses a bare edge list: `edge` and `conn` statements only.
pub fn parse_edge_set(text: &str) -> Result<Tmg> {
    for (i, raw) in text.lines().enumerate() {
        if let Some(Tok::Word(w)) = lex(i + 1, raw)?.first() {
            if w != "edge" && w != "conn" {
                return fail(i + 1, format!("`{w}` is not allowed in an edge set"));
            }
        }
    }
    parse(text).map(|d| d.tmg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let d = parse("").unwrap();
        assert_eq!(d.registry.len(), 1);
        assert!(d.tmg.is_empty());
        assert_eq!(serialize(&d), "");
    }

    #[test]
    fn four_target_edge() {
        let d = parse("type T\ntype T1\ntype T2\ntype T3\ntype T4\nedge x : T (1:T1, 2:T2, 3:T3, 3:T4)\n").unwrap();
        let e = d.tmg.edge("x").unwrap();
        assert_eq!(e.arity(), 4);
        let labels: Vec<u32> = e.tuple.targets.iter().map(|t| t.label).collect();
        assert_eq!(labels, vec![1, 2, 3, 3]);
    }

    #[test]
    fn whole_edge_pair_is_rejected() {
        let err = parse("edge a : e ()\nedge b : e ()\nconn a.0 b.0\n").unwrap_err();
        assert!(matches!(err, MgError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn round_trip() {
        let text = "type A\ntype B : A @ 0.25\ntype C : B\ntype C : e @ 0.5\n\
                    edge x : A (1:A, 2:B) values 1 -2.5 \"q\\\"\" [1 [2]]\n\
                    edge y : e (1:A, 2:e)\nconn x.2 y.1\n\
                    dtmg d in x.1 out y.2 lat\ntrace t\nev x 2 -> y 1\n";
        let d = parse(text).unwrap();
        let s = serialize(&d);
        assert_eq!(s, text);
        assert_eq!(parse(&s).unwrap(), d);
    }

    #[test]
    fn diagnostics_carry_lines() {
        for (text, line) in [
            ("edge x : Q ()\n", 1),
            ("\n\nedge x : e (1:e\n", 3),
            ("type A : B\n", 1),
            ("edge x : e (1:e)\nev x 1 -> x 1\n", 2),
            ("edge x : e (1:e)\ndtmg d in\n", 2),
        ] {
            match parse(text) {
                Err(MgError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
