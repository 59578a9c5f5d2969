#![no_main]

use bogomolov::sbi_falsifier::{audit_certificate, parse_certificate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cert) = parse_certificate(text) {
            if cert.samples.len() <= 64 {
                let _ = audit_certificate(&cert);
            }
        }
    }
});
