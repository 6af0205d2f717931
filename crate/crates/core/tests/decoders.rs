//! Every decoder must reject or accept arbitrary input without panicking,
//! and must accept exactly what the encoders produce.

use fspq_core::compositions::{CompositeSignature, Shape};
use fspq_core::signer::{SchemeId, Signer};
use fspq_core::store::StateFile;
use fspq_core::wire::{Reader, Writer};
use fspq_core::Seed;
use proptest::prelude::*;

fn valid_state(scheme: &str, param: u32, steps: usize) -> Vec<u8> {
    let id = SchemeId::parse(scheme, true).unwrap();
    let (mut s, _) = Signer::keygen(&id, &Seed([3; 16]), param).unwrap();
    for _ in 0..steps {
        s.sign(b"x").unwrap();
    }
    StateFile::from_signer(&s).to_bytes().to_vec()
}

fn valid_signature() -> Vec<u8> {
    let id = SchemeId::parse("frogstar-mock-bliss2", true).unwrap();
    let (mut s, _) = Signer::keygen(&id, &Seed([4; 16]), 1).unwrap();
    s.sign(b"x").unwrap().to_bytes()
}

fn decode_shape(bytes: &[u8]) {
    let mut r = Reader::new(bytes);
    if let Ok(s) = Shape::decode(&mut r) {
        let mut w = Writer::new();
        s.encode(&mut w);
        assert_eq!(&bytes[..w.len()], &w.into_bytes()[..]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2048, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = CompositeSignature::from_bytes(&bytes);
        let _ = StateFile::from_bytes(&bytes);
        let _ = Signer::decode_payload(&bytes);
        decode_shape(&bytes);
    }

    #[test]
    fn mutated_signatures_never_panic(pos in any::<prop::sample::Index>(), byte in any::<u8>(), cut in any::<prop::sample::Index>()) {
        let mut sig = valid_signature();
        let i = pos.index(sig.len());
        sig[i] = byte;
        if let Ok(s) = CompositeSignature::from_bytes(&sig) {
            prop_assert_eq!(s.to_bytes(), sig.clone());
        }
        let n = cut.index(sig.len());
        prop_assert!(CompositeSignature::from_bytes(&sig[..n]).is_err());
    }

    #[test]
    fn mutated_payloads_never_panic(
        which in 0usize..4,
        edits in proptest::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..4),
    ) {
        let (scheme, param, steps) = [
            ("frog-mock-dilithium", 3, 2),
            ("frog-wots-sha256", 4, 6),
            ("frogstar-mock-bliss2", 2, 5),
            ("frogstar-wots-sha256", 1, 1),
        ][which];
        let file = StateFile::from_bytes(&valid_state(scheme, param, steps)).unwrap();
        let mut payload = file.payload.to_vec();
        for (pos, byte) in edits {
            let i = pos.index(payload.len());
            payload[i] = byte;
        }
        if let Ok(mut s) = Signer::decode_payload(&payload) {
            while s.remaining() > 0 && s.sign(b"x").is_ok() {}
        }
    }

    #[test]
    fn shapes_roundtrip(k in 0u32..6, h in 0u32..21) {
        for s in [Shape::star(k), Shape::Tree(h), Shape::product(Shape::Tree(h), Shape::star(k.min(2)))] {
            let mut w = Writer::new();
            s.encode(&mut w);
            let bytes = w.into_bytes();
            let mut r = Reader::new(&bytes);
            prop_assert_eq!(Shape::decode(&mut r).unwrap(), s);
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}

#[test]
fn state_file_rejects_any_single_bit_flip() {
    let bytes = valid_state("frog-wots-sha256", 2, 1);
    for bit in (0..bytes.len() * 8).step_by(7) {
        let mut b = bytes.clone();
        b[bit / 8] ^= 1 << (bit % 8);
        assert!(StateFile::from_bytes(&b).is_err(), "bit {bit}");
    }
}

#[test]
fn state_files_roundtrip_for_every_scheme() {
    for scheme in SchemeId::all() {
        let param = if scheme.starts_with("frogstar") { 1 } else { 2 };
        let bytes = valid_state(&scheme, param, 1);
        let file = StateFile::from_bytes(&bytes).unwrap();
        assert_eq!(file.scheme_id, scheme);
        assert_eq!(file.period, 1);
        assert_eq!(&file.to_bytes()[..], &bytes[..]);
        let signer = file.to_signer().unwrap();
        assert_eq!(signer.scheme().name(), scheme);
    }
}
