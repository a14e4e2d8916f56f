#![no_main]

//! Individual spec objects, decoded and then built on a small grid.

use libfuzzer_sys::fuzz_target;
use rho_maximal::domain::{DomainSpec, FunctionSpec};
use rho_maximal::radius::RhoSpec;
use rho_maximal::weights::WeightSpec;
use rho_maximal::young::{GrowthSpec, YoungSpec};

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let dom = DomainSpec { d: 1, l: 2.0, n: 16 }.build().unwrap();
    match tag % 5 {
        0 => {
            if let Ok(s) = serde_json::from_str::<YoungSpec>(text) {
                if let Ok(y) = s.build() {
                    let _ = y.at(1.0);
                    let _ = y.inverse(1.0);
                }
            }
        }
        1 => {
            if let Ok(s) = serde_json::from_str::<GrowthSpec>(text) {
                let _ = s.build();
            }
        }
        2 => {
            if let Ok(s) = serde_json::from_str::<RhoSpec>(text) {
                if let Ok(r) = s.build() {
                    let _ = r.eval(&[0.5]);
                }
            }
        }
        3 => {
            if let Ok(s) = serde_json::from_str::<WeightSpec>(text) {
                let _ = s.build(dom);
            }
        }
        _ => {
            if let Ok(s) = serde_json::from_str::<FunctionSpec>(text) {
                let _ = s.build(dom);
            }
        }
    }
});
