//! Size-model stand-ins for lattice signatures.
//!
//! INSECURE: anyone holding the public key can produce a signature. These
//! exist only so compositions can be measured with lattice-sized artifacts.
//! Callers must opt in explicitly (`--allow-mock` on the command line).

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::Result;
use crate::hash::{prf_expand, tag, Digest, Seed};
use crate::scheme::{BaseKeyPair, KeyAddress, OneTimeSignature, SchemeDescriptor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MockLattice {
    name: &'static str,
    sig_size: usize,
    pk_size: usize,
}

const MOCK_SK_SIZE: usize = 32;

impl MockLattice {
    /// Dilithium recommended parameters: |σ| = 2701, |pk| = 1472.
    pub fn dilithium() -> Self {
        MockLattice { name: "mock-dilithium", sig_size: 2701, pk_size: 1472 }
    }

    /// BLISS-II: |σ| = 625, |pk| = 875.
    pub fn bliss2() -> Self {
        MockLattice { name: "mock-bliss2", sig_size: 625, pk_size: 875 }
    }

    fn expand(parts: &[&[u8]], out_len: usize) -> Vec<u8> {
        let mut h = Shake256::default();
        h.update(&[tag::MOCK]);
        for p in parts {
            h.update(&(p.len() as u32).to_le_bytes());
            h.update(p);
        }
        let mut out = vec![0u8; out_len];
        h.finalize_xof().read(&mut out);
        out
    }

    fn pk_from_key(&self, key: &[u8], addr: KeyAddress) -> Vec<u8> {
        Self::expand(&[b"pk", key, &addr.instance.to_le_bytes(), &addr.leaf.to_le_bytes()], self.pk_size)
    }
}

impl OneTimeSignature for MockLattice {
    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor {
            name: self.name.to_string(),
            sig_size: self.sig_size,
            pk_size: self.pk_size,
            sk_size: MOCK_SK_SIZE,
            capacity: 1,
        }
    }

    fn keygen(&self, seed: &Seed, pub_seed: &Digest, addr: KeyAddress) -> BaseKeyPair {
        let key = prf_expand(crate::hash::HashSuite::Sha2_256, seed, &[pub_seed.0.as_slice(), b"mock"].concat());
        let pk = self.pk_from_key(&key.0, addr);
        BaseKeyPair::new(key.0.to_vec(), pk)
    }

    fn sign(&self, key: &mut BaseKeyPair, digest: &Digest, _pub_seed: &Digest, addr: KeyAddress) -> Result<Vec<u8>> {
        key.spend()?;
        let pk = self.pk_from_key(&key.sk, addr);
        key.wipe();
        Ok(Self::expand(&[b"sig", &pk, &digest.0], self.sig_size))
    }

    fn verify(&self, pk: &[u8], digest: &Digest, sig: &[u8], _pub_seed: &Digest, _addr: KeyAddress) -> bool {
        pk.len() == self.pk_size
            && sig.len() == self.sig_size
            && Self::expand(&[b"sig", pk, &digest.0], self.sig_size) == sig
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_sizes_are_fixed() {
        let d = MockLattice::dilithium().descriptor();
        assert_eq!((d.sig_size, d.pk_size), (2701, 1472));
        let b = MockLattice::bliss2().descriptor();
        assert_eq!((b.sig_size, b.pk_size), (625, 875));
    }
}
