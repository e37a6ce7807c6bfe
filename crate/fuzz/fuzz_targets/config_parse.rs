//! The config parser is the only surface that consumes untrusted bytes;
//! it must return a line-numbered error on any input, never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = fraclp_cli::config::parse_config(text);
    }
});
