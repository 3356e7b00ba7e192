#![no_main]

use libfuzzer_sys::fuzz_target;
use optosense::sweep::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = text.parse::<Grid>() {
        if g.count <= 100_000 {
            let pts = g.points();
            assert_eq!(pts.len(), g.count);
        }
    }
});
