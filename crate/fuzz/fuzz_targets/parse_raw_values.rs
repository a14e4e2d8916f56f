#![no_main]

use libfuzzer_sys::fuzz_target;
use rho_maximal::domain::{parse_raw_values, write_raw_values};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_raw_values(text) {
        let g = parse_raw_values(&write_raw_values(&f)).unwrap();
        assert_eq!(f.domain(), g.domain());
        assert!(f.values().iter().zip(g.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
});
