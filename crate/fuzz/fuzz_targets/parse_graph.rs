#![no_main]

use dpcomb::instances::format::{parse_graph, Instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_graph(text) {
        let written = Instance::Graph(x.clone()).to_text();
        assert_eq!(parse_graph(&written).expect("written instances parse"), x);
    }
});
