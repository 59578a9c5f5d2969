#![no_main]

use bogomolov::catalog::parse_catalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(catalog) = parse_catalog(text) {
            let again = parse_catalog(&catalog.to_toml()).expect("serialized catalog reparses");
            assert_eq!(again.surfaces, catalog.surfaces);
        }
    }
});
