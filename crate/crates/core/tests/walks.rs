//! Full walks for every registered scheme, resumption from serialized state,
//! and separation between keys and constructions.

use fspq_core::signer::{verify, verify_bytes, SchemeId, Signer};
use fspq_core::{Error, Seed};

fn param(id: &SchemeId) -> u32 {
    if id.name().starts_with("frogstar") {
        1
    } else {
        3
    }
}

#[test]
fn every_scheme_walks_to_exhaustion() {
    for name in SchemeId::all() {
        let id = SchemeId::parse(&name, true).unwrap();
        let (mut s, pk) = Signer::keygen(&id, &Seed([1; 16]), param(&id)).unwrap();
        let cap = s.capacity() as u64;
        for t in 0..cap {
            let msg = format!("{name} {t}");
            let sig = s.sign(msg.as_bytes()).unwrap();
            assert_eq!(sig.to_bytes().len(), id.signature_len(param(&id), t), "{name} t={t}");
            assert!(verify(&id, &pk, msg.as_bytes(), &sig), "{name} t={t}");
            assert!(!verify(&id, &pk, b"other", &sig));
        }
        assert_eq!(s.remaining(), 0);
        assert!(matches!(s.sign(b"x"), Err(Error::Exhausted)));
    }
}

#[test]
fn resumed_state_signs_identically_at_every_period() {
    for name in ["frog-wots-shake256", "frogstar-wots-sha256"] {
        let id = SchemeId::parse(name, false).unwrap();
        let p = if name.starts_with("frogstar") { 2 } else { 4 };
        let (mut a, pk) = Signer::keygen(&id, &Seed([2; 16]), p).unwrap();
        while a.remaining() > 0 {
            let mut b = Signer::decode_payload(&a.encode_payload()).unwrap();
            let sa = a.sign(b"m").unwrap();
            let sb = b.sign(b"m").unwrap();
            assert_eq!(sa, sb);
            assert!(verify(&id, &pk, b"m", &sb));
            assert_eq!(a.encode_payload(), b.encode_payload());
        }
    }
}

#[test]
fn keys_are_deterministic_and_seed_separated() {
    let id = SchemeId::parse("frog-wots-sha256", false).unwrap();
    let (_, a) = Signer::keygen(&id, &Seed([5; 16]), 3).unwrap();
    let (_, b) = Signer::keygen(&id, &Seed([5; 16]), 3).unwrap();
    let (_, c) = Signer::keygen(&id, &Seed([6; 16]), 3).unwrap();
    let (_, d) = Signer::keygen(&id, &Seed([5; 16]), 2).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(a, d);
}

#[test]
fn signatures_do_not_cross_schemes_or_keys() {
    let frog = SchemeId::parse("frog-wots-sha256", false).unwrap();
    let star = SchemeId::parse("frogstar-wots-sha256", false).unwrap();
    let shake = SchemeId::parse("frog-wots-shake256", false).unwrap();
    let (mut f, fpk) = Signer::keygen(&frog, &Seed([7; 16]), 2).unwrap();
    let (mut s, spk) = Signer::keygen(&star, &Seed([7; 16]), 1).unwrap();
    let (_, other) = Signer::keygen(&frog, &Seed([8; 16]), 2).unwrap();
    let fs = f.sign(b"m").unwrap().to_bytes();
    let ss = s.sign(b"m").unwrap().to_bytes();
    assert!(verify_bytes(&frog, &fpk, b"m", &fs));
    assert!(!verify_bytes(&star, &fpk, b"m", &fs));
    assert!(!verify_bytes(&frog, &spk, b"m", &ss));
    assert!(!verify_bytes(&shake, &fpk, b"m", &fs));
    assert!(!verify_bytes(&frog, &other, b"m", &fs));
}

#[test]
fn altered_envelope_fields_are_rejected() {
    let id = SchemeId::parse("frog-wots-sha256", false).unwrap();
    let (mut s, pk) = Signer::keygen(&id, &Seed([9; 16]), 3).unwrap();
    s.sign(b"a").unwrap();
    let sig = s.sign(b"m").unwrap();
    let mut p = sig.clone();
    p.period = 2;
    assert!(!verify(&id, &pk, b"m", &p));
    let mut p = sig.clone();
    p.param = 4;
    assert!(!verify(&id, &pk, b"m", &p));
    let mut p = sig.clone();
    p.pub_seed.0[0] ^= 1;
    assert!(!verify(&id, &pk, b"m", &p));
    let mut p = sig;
    p.scheme_id = "frog-wots-shake256".into();
    assert!(!verify(&id, &pk, b"m", &p));
}

#[test]
fn frogstar_depth_octet_is_bound() {
    let id = SchemeId::parse("frogstar-wots-sha256", false).unwrap();
    let (mut s, pk) = Signer::keygen(&id, &Seed([9; 16]), 1).unwrap();
    let sig = s.sign(b"m").unwrap();
    for param in [0u8, 2, 3] {
        let mut p = sig.clone();
        p.param = param;
        assert!(!verify(&id, &pk, b"m", &p));
    }
}
