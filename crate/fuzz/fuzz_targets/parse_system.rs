#![no_main]

use libfuzzer_sys::fuzz_target;

use kscolor::config::Tolerances;
use kscolor::formats::parse_system;

fuzz_target!(|data: &[u8]| {
    // The parser must never panic; errors are values.
    if let Ok(text) = std::str::from_utf8(data) {
        let tol = Tolerances::default();
        let _ = parse_system(text, &tol);
    }
});
