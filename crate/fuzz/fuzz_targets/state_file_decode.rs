#![no_main]

use fspq_core::store::StateFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = StateFile::from_bytes(data) {
        assert_eq!(&file.to_bytes()[..], data);
        let _ = file.to_signer();
    }
});
