#![no_main]

use dpcomb::instances::format::{parse_terminal_pairs, Instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_terminal_pairs(text) {
        let written = Instance::TerminalPairs(x.clone()).to_text();
        assert_eq!(
            parse_terminal_pairs(&written).expect("written instances parse"),
            x
        );
    }
});
