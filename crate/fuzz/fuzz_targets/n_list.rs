#![no_main]

use libfuzzer_sys::fuzz_target;
use tlspin_cli::specs::parse_n_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(ns) = parse_n_list(src) {
            assert!(!ns.is_empty());
            assert!(ns.iter().all(|&n| n >= 1));
        }
    }
});
