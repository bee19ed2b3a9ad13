#![no_main]

use libfuzzer_sys::fuzz_target;
use tlspin_core::cupcap::{evaluate, parse};
use tlspin_core::tl_algebra::{Sign, TLParams};

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(src) = std::str::from_utf8(rest) else { return };
    let Ok(d) = parse(src) else { return };
    let eps = if sel & 1 == 0 { Sign::Plus } else { Sign::Minus };
    let phi = f64::from(sel >> 1) * std::f64::consts::TAU / 128.0;
    let p = TLParams::new(phi, eps).unwrap();
    if let Ok(r) = evaluate(&d, &p) {
        let (rows, cols) = r.shape();
        assert_eq!(r.data().len(), rows * cols);
    }
});
