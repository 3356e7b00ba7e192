#![no_main]

use libfuzzer_sys::fuzz_target;
use optosense::config::{parse_override, Settings};
use optosense::model::ModelOptions;
use optosense::params::SystemParams;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_override(text) {
        let base = Settings {
            params: SystemParams::identical(1.0),
            options: ModelOptions::default(),
        };
        let _ = c.apply(base);
    }
});
