#![no_main]

use fspq_core::signer::{verify_bytes, SchemeId};
use fspq_core::Digest;
use libfuzzer_sys::fuzz_target;

// Input: 32-octet public key, 1-octet scheme selector, then the signature.
fuzz_target!(|data: &[u8]| {
    if data.len() < 33 {
        return;
    }
    let pk = Digest::from_slice(&data[..32]).unwrap();
    let ids = SchemeId::all();
    let id = SchemeId::parse(&ids[data[32] as usize % ids.len()], true).unwrap();
    let _ = verify_bytes(&id, &pk, b"fuzz", &data[33..]);
});
