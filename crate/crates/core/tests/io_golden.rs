use std::fs;
use std::path::Path;

use metagraph::io::{parse, serialize};

fn golden(dir: &str) -> Vec<(String, String)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(dir);
    let mut out: Vec<(String, String)> = fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mgf"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn valid_documents_round_trip_byte_for_byte() {
    let docs = golden("valid");
    assert_eq!(docs.len(), 50);
    for (name, text) in docs {
        let doc = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(serialize(&doc), text, "{name}");
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc, "{name}");
    }
}

#[test]
fn invalid_documents_give_their_diagnostic() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/invalid/expected.txt");
    let expected: Vec<(String, String)> = fs::read_to_string(root)
        .unwrap()
        .lines()
        .map(|l| {
            let (f, msg) = l.split_once(": ").unwrap();
            (f.to_string(), msg.to_string())
        })
        .collect();
    let docs = golden("invalid");
    assert_eq!(docs.len(), 20);
    assert_eq!(expected.len(), 20);
    for ((name, text), (f, msg)) in docs.iter().zip(&expected) {
        assert_eq!(name, f);
        let err = parse(text).expect_err(name);
        assert_eq!(&err.to_string(), msg, "{name}");
    }
}

#[test]
fn serialization_is_idempotent_on_noncanonical_input() {
    let text = "# shuffled\nedge y : e (1:e, 2:e) values 2\nconn x.2 y.1\nedge x : e (1:e, 2:e) values 1\ntype A\n";
    let once = serialize(&parse(text).unwrap());
    assert_ne!(once, text);
    assert_eq!(serialize(&parse(&once).unwrap()), once);
}
