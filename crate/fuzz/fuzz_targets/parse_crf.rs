#![no_main]

use libfuzzer_sys::fuzz_target;
use metagraph::construct::Crf;

fuzz_target!(|src: &str| {
    let Ok(c) = src.parse::<Crf>() else { return };
    let text = c.to_string();
    assert_eq!(text.parse::<Crf>().expect("display must parse"), c);
});
