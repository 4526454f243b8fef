#![no_main]

use dpcomb::instances::format::parse_instance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inst) = parse_instance(text) {
        let written = inst.to_text();
        let again = parse_instance(&written).expect("written instances parse");
        assert_eq!(again, inst);
        assert_eq!(again.to_text(), written);
    }
});
