use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use metagraph::construct::{crf_count, decompose, enumerate_crfs, laws_check};
use metagraph::io::{history_to_dot, parse, MgfDocument};
use metagraph::morph::{cata, histo, NumTargets, Oblivious, Rebuild, ShortestPaths};
use metagraph::process::{traces_to_ftmg, RealizedTmg, VirtualTmg};
use metagraph::topology::continuity::{DupSeed, Duplicate, Replay};
use metagraph::topology::{m2m_ana, m2m_continuity_check, MorphismOutput, OpenSet, Species, Topology};
use metagraph::{Dtmg, EdgeKey, MgError};

#[derive(Parser)]
#[command(name = "mg", version, about = "Typed metagraph toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FoldAlg {
    Numtargets,
    Shortestpathlength,
    Shortestpathlist,
}

#[derive(Clone, Copy, ValueEnum)]
enum HistAlg {
    Numtargets,
    Rebuild,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeytingOp {
    Implies,
    Not,
    Meet,
    Join,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and check a document
    Validate { file: String },
    /// Fold a DTMG with a built-in algebra
    Fold {
        file: String,
        #[arg(long)]
        alg: FoldAlg,
        #[arg(long)]
        src: Option<String>,
        #[arg(long)]
        dst: Option<String>,
        #[arg(long)]
        dtmg: Option<String>,
    },
    /// Count or list the crfs from M outputs to N inputs
    Crfs {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Check the constructor laws on random expressions
    Laws {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 16)]
        max_edges: usize,
    },
    /// Heyting operations on open edge sets
    Heyting {
        file: String,
        #[arg(long)]
        dtmg: Option<String>,
        #[arg(long)]
        op: HeytingOp,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
    },
    /// Print the canonical construction expression
    Decompose {
        file: String,
        #[arg(long)]
        dtmg: Option<String>,
    },
    /// Run a histomorphism and emit its history
    History {
        file: String,
        #[arg(long)]
        dtmg: Option<String>,
        #[arg(long)]
        alg: HistAlg,
        #[arg(long, default_value = "dot")]
        emit: Emit,
    },
    /// Build the forest of a trace and summarize it
    Replay {
        file: String,
        #[arg(long)]
        trace: String,
        #[arg(long)]
        prune: bool,
    },
    /// Check continuity of the identity and duplicating unfolds
    Continuity {
        file: String,
        #[arg(long)]
        dtmg: Option<String>,
    },
}

fn load(file: &str) -> Result<MgfDocument, MgError> {
    let text = std::fs::read_to_string(file).map_err(|e| MgError::State(format!("{file}: {e}")))?;
    parse(&text)
}

fn pick(doc: &MgfDocument, name: Option<&str>) -> Result<Dtmg, MgError> {
    match name {
        Some(n) => doc
            .dtmgs
            .get(n)
            .cloned()
            .ok_or_else(|| MgError::State(format!("no dtmg named `{n}`"))),
        None => Ok(Dtmg::all_lateral(doc.tmg.clone())),
    }
}

fn key_of(doc: &MgfDocument, id: Option<&String>, flag: &str) -> Result<EdgeKey, MgError> {
    let id = id.ok_or_else(|| MgError::State(format!("--{flag} is required for this algebra")))?;
    doc.tmg
        .edge(id)
        .map(|e| e.key())
        .ok_or_else(|| MgError::UnknownEdge(id.clone()))
}

fn edge_set(s: &str) -> BTreeSet<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn open_from(t: &Arc<Topology>, flag: &str, s: &str) -> Result<OpenSet, MgError> {
    let ids = edge_set(s);
    let o = t.interior(&ids)?;
    if o.edges() != ids {
        eprintln!("note: --{flag} is not open; using its interior {o}");
    }
    Ok(o)
}

fn run(cmd: Cmd) -> Result<(String, bool), MgError> {
    let mut out = String::new();
    let mut ok = true;
    match cmd {
        Cmd::Validate { file } => {
            let doc = load(&file)?;
            let v = doc.tmg.validate();
            for x in &v {
                let _ = writeln!(out, "{x}");
            }
            for n in doc.tmg.notes() {
                let _ = writeln!(out, "{n}");
            }
            ok = v.is_empty();
            if ok {
                let _ = writeln!(
                    out,
                    "ok: {} types, {} edges, {} connections, {} dtmgs, {} traces",
                    doc.registry.len(),
                    doc.tmg.edge_count(),
                    doc.tmg.connection_count(),
                    doc.dtmgs.len(),
                    doc.traces.len()
                );
            }
        }
        Cmd::Fold {
            file,
            alg,
            src,
            dst,
            dtmg,
        } => {
            let doc = load(&file)?;
            let x = decompose(&pick(&doc, dtmg.as_deref())?)?;
            match alg {
                FoldAlg::Numtargets => {
                    let _ = writeln!(out, "{}", cata(&NumTargets, &x)?);
                }
                FoldAlg::Shortestpathlength | FoldAlg::Shortestpathlist => {
                    let (s, d) = (key_of(&doc, src.as_ref(), "src")?, key_of(&doc, dst.as_ref(), "dst")?);
                    let table = cata(&ShortestPaths, &x)?;
                    match (alg, table.path(&s, &d)) {
                        (_, None) => out.push_str("none\n"),
                        (FoldAlg::Shortestpathlength, Some(p)) => {
                            let _ = writeln!(out, "{}", p.len());
                        }
                        (_, Some(p)) => {
                            for k in p {
                                let _ = writeln!(out, "{k}");
                            }
                        }
                    }
                }
            }
        }
        Cmd::Crfs { m, n, count_only } => {
            if count_only {
                let _ = writeln!(out, "{}", crf_count(m, n));
            } else {
                for p in enumerate_crfs(m, n)? {
                    let _ = writeln!(out, "{p}");
                }
            }
        }
        Cmd::Laws {
            seed,
            trials,
            max_edges,
        } => {
            let r = laws_check(seed, trials, max_edges)?;
            out = r.to_string();
            ok = r.all_passed();
        }
        Cmd::Heyting { file, dtmg, op, a, b } => {
            let doc = load(&file)?;
            let t = Topology::of(&pick(&doc, dtmg.as_deref())?)?;
            let a = open_from(&t, "a", &a)?;
            let b = || -> Result<OpenSet, MgError> {
                let s = b.as_deref().ok_or_else(|| MgError::State("--b is required for this operation".into()))?;
                open_from(&t, "b", s)
            };
            let r = match op {
                HeytingOp::Not => a.not(),
                HeytingOp::Implies => a.implies(&b()?)?,
                HeytingOp::Meet => a.meet(&b()?)?,
                HeytingOp::Join => a.join(&b()?)?,
            };
            let _ = writeln!(out, "{r}");
        }
        Cmd::Decompose { file, dtmg } => {
            let doc = load(&file)?;
            let _ = writeln!(out, "{}", decompose(&pick(&doc, dtmg.as_deref())?)?);
        }
        Cmd::History { file, dtmg, alg, emit } => {
            let doc = load(&file)?;
            let x = decompose(&pick(&doc, dtmg.as_deref())?)?;
            let h = match alg {
                HistAlg::Numtargets => histo(&Oblivious(NumTargets), &doc.registry, &x)?.1,
                HistAlg::Rebuild => histo(&Oblivious(Rebuild), &doc.registry, &x)?.1,
            };
            match emit {
                Emit::Dot => out = history_to_dot(&h),
            }
        }
        Cmd::Replay { file, trace, prune } => {
            let doc = load(&file)?;
            let t = doc
                .trace(&trace)
                .ok_or_else(|| MgError::State(format!("no trace named `{trace}`")))?;
            let f = traces_to_ftmg(&doc.tmg, std::slice::from_ref(t), None)?;
            let d = &f.forest()[0];
            let _ = writeln!(out, "trace {} ({} events)", t.name, t.events.len());
            let _ = writeln!(out, "edges {}", d.edge_count());
            let _ = writeln!(out, "connections {}", d.base().connection_count());
            for (kw, list) in [("in", d.inputs()), ("out", d.outputs()), ("lat", d.lateral())] {
                let mut line = kw.to_string();
                for r in list {
                    let _ = write!(line, " {r}");
                }
                let _ = writeln!(out, "{line}");
            }
            if prune {
                let arity = doc.tmg.edges().map(|e| e.arity()).max().unwrap_or(0);
                let mut r = RealizedTmg::new(Arc::new(VirtualTmg::new(doc.registry.clone(), arity)));
                for e in d.base().canonical_edges() {
                    r = r.realize(&e.id, &e.key(), &[])?;
                }
                for c in d.base().connections() {
                    r = r.realize_connection(c)?;
                }
                let p = r.pruned();
                let _ = writeln!(out, "pruned edges {} connections {}", p.edge_count(), p.connection_count());
            }
        }
        Cmd::Continuity { file, dtmg } => {
            let doc = load(&file)?;
            let d = pick(&doc, dtmg.as_deref())?;
            let x = decompose(&d)?;
            let id = m2m_ana(&Replay, &doc.registry, &x)?;
            let dup = m2m_ana(&Duplicate, &doc.registry, &DupSeed::Twice(x))?;
            for (name, r) in [("identity", id), ("duplicate", dup)] {
                let rep = m2m_continuity_check(Species::Ana, &MorphismOutput::Dtmg(r), &d, None)?;
                ok &= rep.continuous();
                let _ = writeln!(out, "{name} {rep}");
            }
        }
    }
    Ok((out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
