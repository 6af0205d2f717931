#![no_main]

use fspq_core::compositions::CompositeSignature;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(sig) = CompositeSignature::from_bytes(data) {
        // the encoding is canonical
        assert_eq!(sig.to_bytes(), data);
    }
});
