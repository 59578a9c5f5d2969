#![no_main]

use bogomolov::cayley_bacharach::parse_cycle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cycle) = parse_cycle(text) {
            let again = parse_cycle(&cycle.to_text()).expect("serialized cycle reparses");
            assert_eq!(again, cycle);
        }
    }
});
