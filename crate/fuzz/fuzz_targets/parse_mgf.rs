#![no_main]

use libfuzzer_sys::fuzz_target;
use metagraph::io::{parse, serialize};

fuzz_target!(|src: &str| {
    let Ok(doc) = parse(src) else { return };
    let once = serialize(&doc);
    let back = parse(&once).expect("canonical output must parse");
    assert_eq!(serialize(&back), once);
});
