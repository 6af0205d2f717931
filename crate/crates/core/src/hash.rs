//! Domain-separated hashing, seed derivation and the WOTS+ chaining function.
//!
//! Every higher layer hashes through this module. Composition-level hashes
//! (message digests, tree nodes, certification payloads) go through [`hash`]
//! and are tallied in the cost counters; hashing that is internal to a base
//! scheme or to seed derivation uses the uncounted helpers, since the cost
//! model charges those to the base keygen/sign/verify operations.

use std::fmt;

use sha2::{Digest as _, Sha256};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use zeroize::{Zeroize, ZeroizeOnDrop};

use crate::counters;
use crate::error::Error;

/// Output length of every hash in octets (n = 256).
pub const DIGEST_LEN: usize = 32;
/// Secret seed length in octets (κ = 128).
pub const SEED_LEN: usize = 16;
/// Security parameter in bits.
pub const KAPPA_BITS: u32 = 128;

/// Domain tags prepended to every composition-level hash input.
pub mod tag {
    pub const MESSAGE: u8 = 0x00;
    pub const NODE: u8 = 0x01;
    pub const PRF: u8 = 0x02;
    pub const CERTIFICATION: u8 = 0x03;
    /// WOTS+ chain masks and chain steps. Not one of the composition tags,
    /// kept disjoint from them.
    pub const CHAIN_MASK: u8 = 0x10;
    pub const CHAIN_STEP: u8 = 0x11;
    pub const MOCK: u8 = 0x20;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HashSuite {
    Sha2_256,
    Shake256,
}

impl HashSuite {
    pub fn id(self) -> u8 {
        match self {
            HashSuite::Sha2_256 => 1,
            HashSuite::Shake256 => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self, Error> {
        match id {
            1 => Ok(HashSuite::Sha2_256),
            2 => Ok(HashSuite::Shake256),
            other => Err(Error::Malformed(format!("unknown hash suite id {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HashSuite::Sha2_256 => "sha256",
            HashSuite::Shake256 => "shake256",
        }
    }

    /// Output size in bits; 256 for both suites.
    pub fn output_bits(self) -> u32 {
        (DIGEST_LEN * 8) as u32
    }
}

/// An n-bit hash output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Digest> {
        bytes.try_into().ok().map(Digest)
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest(")?;
        for b in &self.0[..6] {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

/// κ bits of secret entropy. Zeroized on drop; never written to a public artifact.
#[derive(Clone, PartialEq, Eq, Zeroize, ZeroizeOnDrop)]
pub struct Seed(pub [u8; SEED_LEN]);

impl Seed {
    pub fn from_slice(bytes: &[u8]) -> Option<Seed> {
        bytes.try_into().ok().map(Seed)
    }

    pub fn as_bytes(&self) -> &[u8; SEED_LEN] {
        &self.0
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Seed(<redacted>)")
    }
}

fn digest_parts(suite: HashSuite, parts: &[&[u8]]) -> Digest {
    let mut out = [0u8; DIGEST_LEN];
    match suite {
        HashSuite::Sha2_256 => {
            let mut h = Sha256::new();
            for p in parts {
                sha2::Digest::update(&mut h, p);
            }
            out.copy_from_slice(&h.finalize());
        }
        HashSuite::Shake256 => {
            let mut h = Shake256::default();
            for p in parts {
                h.update(p);
            }
            // truncated to 256 bits
            h.finalize_xof().read(&mut out);
        }
    }
    Digest(out)
}

/// Uncounted hash of `tag ∥ parts...`.
pub(crate) fn hash_raw(suite: HashSuite, domain_tag: u8, parts: &[&[u8]]) -> Digest {
    let mut all: Vec<&[u8]> = Vec::with_capacity(parts.len() + 1);
    let t = [domain_tag];
    all.push(&t);
    all.extend_from_slice(parts);
    digest_parts(suite, &all)
}

/// `H(domain_tag ∥ data)`, counted as one composition-level hash.
pub fn hash(suite: HashSuite, domain_tag: u8, data: &[u8]) -> Digest {
    counters::count_hash();
    hash_raw(suite, domain_tag, &[data])
}

/// Counted hash over several concatenated parts.
pub fn hash_parts(suite: HashSuite, domain_tag: u8, parts: &[&[u8]]) -> Digest {
    counters::count_hash();
    hash_raw(suite, domain_tag, parts)
}

/// Digest of an arbitrary message before it reaches a one-time signer.
pub fn message_digest(suite: HashSuite, message: &[u8]) -> Digest {
    hash(suite, tag::MESSAGE, message)
}

/// Child seed for `label`. Labels must encode a unique position.
pub fn prf_derive(suite: HashSuite, seed: &Seed, label: &[u8]) -> Seed {
    let d = hash_raw(suite, tag::PRF, &[&seed.0, label]);
    let mut out = [0u8; SEED_LEN];
    out.copy_from_slice(&d.0[..SEED_LEN]);
    Seed(out)
}

/// Full-width secret value for `label` (used for WOTS+ chain starts).
pub(crate) fn prf_expand(suite: HashSuite, seed: &Seed, label: &[u8]) -> Digest {
    hash_raw(suite, tag::PRF, &[&seed.0, b"expand", label])
}

/// Position of one hash chain: the key pair it belongs to and its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ChainAddress {
    /// Identifies the tree / product instance the key pair lives in.
    pub instance: u64,
    /// Leaf index of the key pair inside that instance.
    pub leaf: u64,
    /// Chain index inside the key pair.
    pub chain: u32,
}

impl ChainAddress {
    fn encode(&self, step: u32) -> [u8; 24] {
        let mut out = [0u8; 24];
        out[..8].copy_from_slice(&self.instance.to_be_bytes());
        out[8..16].copy_from_slice(&self.leaf.to_be_bytes());
        out[16..20].copy_from_slice(&self.chain.to_be_bytes());
        out[20..].copy_from_slice(&step.to_be_bytes());
        out
    }
}

/// One WOTS+ step: `F(pub_seed, adrs, x ⊕ mask(pub_seed, adrs))`.
fn chain_step(suite: HashSuite, x: &Digest, step: u32, pub_seed: &Digest, adrs: &ChainAddress) -> Digest {
    let a = adrs.encode(step);
    let mask = hash_raw(suite, tag::CHAIN_MASK, &[&pub_seed.0, &a]);
    let mut masked = x.0;
    for (m, k) in masked.iter_mut().zip(mask.0.iter()) {
        *m ^= k;
    }
    hash_raw(suite, tag::CHAIN_STEP, &[&pub_seed.0, &a, &masked])
}

/// Applies `steps` chain iterations starting at position `start`.
///
/// Rejects `start + steps > w - 1`.
pub fn wots_chain(
    suite: HashSuite,
    w: u32,
    x: &Digest,
    start: u32,
    steps: u32,
    pub_seed: &Digest,
    adrs: &ChainAddress,
) -> Result<Digest, Error> {
    let end = start.checked_add(steps).ok_or(Error::ChainOverrun { start, steps, w })?;
    if end > w - 1 {
        return Err(Error::ChainOverrun { start, steps, w });
    }
    let mut cur = *x;
    for s in start..end {
        cur = chain_step(suite, &cur, s, pub_seed, adrs);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_single_zero_octet() {
        // SHA-256(0x00), standard reference value.
        let d = hash_raw(HashSuite::Sha2_256, 0x00, &[]);
        assert_eq!(
            hex(&d.0),
            "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d"
        );
    }

    #[test]
    fn shake256_is_truncated_xof() {
        // First 32 octets of SHAKE256(0x00) and SHAKE256(0x01 "abc").
        let d = hash_raw(HashSuite::Shake256, 0x00, &[]);
        assert_eq!(
            hex(&d.0),
            "b8d01df855f7075882c636f6ddeacf41e5de0bbf30042ef0a86e36f4b8600d54"
        );
        let d = hash_raw(HashSuite::Shake256, 0x01, &[b"a", b"bc"]);
        assert_eq!(
            hex(&d.0),
            "546705560fb5c48f0e520f7d193025c31ebfb6105159b6c907e9be87fe482130"
        );
    }

    #[test]
    fn chain_zero_steps_is_identity() {
        let x = Digest([7; 32]);
        let p = Digest([1; 32]);
        let a = ChainAddress::default();
        assert_eq!(wots_chain(HashSuite::Sha2_256, 4, &x, 2, 0, &p, &a).unwrap(), x);
    }

    #[test]
    fn chain_rejects_overrun() {
        let x = Digest([7; 32]);
        let a = ChainAddress::default();
        assert!(matches!(
            wots_chain(HashSuite::Sha2_256, 4, &x, 2, 2, &x, &a),
            Err(Error::ChainOverrun { .. })
        ));
        assert!(wots_chain(HashSuite::Sha2_256, 4, &x, 1, u32::MAX, &x, &a).is_err());
    }

    #[test]
    fn prf_is_deterministic_and_label_sensitive() {
        let s = Seed([3; 16]);
        let a = prf_derive(HashSuite::Sha2_256, &s, b"a");
        assert_eq!(a, prf_derive(HashSuite::Sha2_256, &s, b"a"));
        assert_ne!(a, prf_derive(HashSuite::Sha2_256, &s, b"b"));
        assert_ne!(a, s);
    }

    fn hex(b: &[u8]) -> String {
        b.iter().map(|x| format!("{x:02x}")).collect()
    }
}
