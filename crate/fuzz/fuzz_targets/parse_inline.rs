#![no_main]

use bogomolov::catalog::parse_inline;
use bogomolov::surface_lattice::validate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(inv) = parse_inline(text) {
            let _ = validate(&inv);
        }
    }
});
