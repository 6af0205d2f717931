//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so seeds stay valid and regressions show up on stable.

use std::fs;
use std::path::PathBuf;

use fspq_core::compositions::{CompositeSignature, Shape};
use fspq_core::signer::{verify_bytes, SchemeId, Signer};
use fspq_core::store::StateFile;
use fspq_core::wire::Reader;
use fspq_core::Digest;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{target} corpus is empty");
    out
}

#[test]
fn signature_seeds_decode_canonically() {
    for (name, b) in corpus("signature_decode") {
        let sig = CompositeSignature::from_bytes(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(sig.to_bytes(), b, "{name}");
        assert_eq!(sig.scheme_id, name);
    }
}

#[test]
fn verify_seeds_verify() {
    for (name, b) in corpus("signature_verify") {
        let pk = Digest::from_slice(&b[..32]).unwrap();
        let ids = SchemeId::all();
        let id = SchemeId::parse(&ids[b[32] as usize % ids.len()], true).unwrap();
        assert_eq!(id.name(), name);
        assert!(verify_bytes(&id, &pk, b"m\n", &b[33..]), "{name}");
    }
}

#[test]
fn state_seeds_load_and_sign() {
    for (name, b) in corpus("state_file_decode") {
        let file = StateFile::from_bytes(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(&file.to_bytes()[..], &b[..]);
        let mut s = file.to_signer().unwrap();
        if s.remaining() > 0 {
            s.sign(b"x").unwrap();
        }
    }
    for (name, b) in corpus("state_payload_decode") {
        let mut s = Signer::decode_payload(&b).unwrap_or_else(|e| panic!("{name}: {e}"));
        if s.remaining() > 0 {
            s.sign(b"x").unwrap();
        }
    }
}

#[test]
fn shape_and_id_seeds_parse() {
    for (name, b) in corpus("shape_decode") {
        Shape::decode(&mut Reader::new(&b)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, b) in corpus("scheme_id_parse") {
        let s = String::from_utf8(b).unwrap();
        assert_eq!(SchemeId::parse(&s, true).unwrap().name(), name);
    }
}
