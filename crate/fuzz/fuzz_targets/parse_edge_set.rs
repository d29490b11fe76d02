#![no_main]

use libfuzzer_sys::fuzz_target;
use metagraph::io::{parse, parse_edge_set, serialize, MgfDocument};

fuzz_target!(|src: &str| {
    let Ok(g) = parse_edge_set(src) else { return };
    let text = serialize(&MgfDocument::new(g.clone()));
    assert_eq!(parse(&text).expect("canonical output must parse").tmg, g);
});
