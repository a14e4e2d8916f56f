#![no_main]

use libfuzzer_sys::fuzz_target;
use rho_maximal::domain::DomainSpec;
use rho_maximal::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let base = ExperimentConfig::new(DomainSpec { d: 1, l: 4.0, n: 16 });
    if let Ok(cfg) = base.with_override(text) {
        assert!(cfg.validate().is_ok());
    }
});
