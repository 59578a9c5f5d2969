#![no_main]

use bogomolov::exact::{parse_rational, RatDisplay};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(value) = parse_rational(text) {
            let printed = RatDisplay(&value).to_string();
            assert_eq!(parse_rational(&printed).expect("printed rational reparses"), value);
        }
    }
});
