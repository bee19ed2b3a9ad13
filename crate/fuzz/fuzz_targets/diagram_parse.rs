#![no_main]

use libfuzzer_sys::fuzz_target;
use tlspin_core::cupcap::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse(src) {
        // the canonical display must parse back to the same diagram
        let again = parse(&d.to_string()).expect("display output reparses");
        assert_eq!(again.to_string(), d.to_string());
    }
});
