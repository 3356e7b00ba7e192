#![no_main]

use libfuzzer_sys::fuzz_target;
use optosense::config::{parse_config, Settings};
use optosense::model::{Model, ModelOptions};
use optosense::params::SystemParams;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = parse_config(text) else { return };
    let base = Settings {
        params: SystemParams::identical(1.0),
        options: ModelOptions::default(),
    };
    // whatever parses must either build a model or fail cleanly
    if let Ok(s) = cfg.apply(base) {
        let _ = Model::new(&s.params, s.options);
    }
});
