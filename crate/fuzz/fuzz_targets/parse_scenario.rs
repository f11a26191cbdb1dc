#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing and building must reject bad input with an error, never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = varlab::cli::Scenario::from_toml(text) {
        let _ = s.validate();
    }
    let _ = varlab::cli::prepare(text, None, None);
});
