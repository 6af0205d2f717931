#![no_main]

use fspq_core::signer::SchemeId;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(id) = SchemeId::parse(s, true) {
            assert_eq!(id.name(), s);
        }
    }
});
