#![no_main]

use dpcomb::instances::format::{parse_set_system, Instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_set_system(text) {
        let written = Instance::SetSystem(x.clone()).to_text();
        assert_eq!(
            parse_set_system(&written).expect("written instances parse"),
            x
        );
    }
});
