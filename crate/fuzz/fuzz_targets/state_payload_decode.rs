#![no_main]

use fspq_core::signer::Signer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(mut s) = Signer::decode_payload(data) {
        let _ = s.remaining();
        let _ = s.sign(b"fuzz");
    }
});
