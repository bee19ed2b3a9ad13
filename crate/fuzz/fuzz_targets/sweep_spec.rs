#![no_main]

use libfuzzer_sys::fuzz_target;
use tlspin_cli::specs::parse_sweep;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_sweep(src) {
        let v = s.values();
        assert_eq!(v.len(), s.count);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(parse_sweep(&s.to_string()).unwrap(), s);
    }
});
