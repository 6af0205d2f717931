//! The pluggable one-time base scheme and its registry.

use zeroize::Zeroizing;

use crate::counters;
use crate::error::{Error, Result};
use crate::hash::{Digest, HashSuite, Seed};
use crate::mock::MockLattice;
use crate::wots::{Wots, WotsParams};

/// Sizes and capacity of a base scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeDescriptor {
    pub name: String,
    pub sig_size: usize,
    pub pk_size: usize,
    pub sk_size: usize,
    /// Signatures per key pair; 1 for one-time schemes.
    pub capacity: u64,
}

/// Where a key pair lives. Base schemes that randomize per key (WOTS+ masks)
/// bind to it; verifiers recompute it from the signature position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct KeyAddress {
    pub instance: u64,
    pub leaf: u64,
}

pub struct BaseKeyPair {
    pub sk: Zeroizing<Vec<u8>>,
    pub pk: Vec<u8>,
    used: bool,
}

impl BaseKeyPair {
    pub fn new(sk: Vec<u8>, pk: Vec<u8>) -> Self {
        BaseKeyPair { sk: Zeroizing::new(sk), pk, used: false }
    }

    pub(crate) fn restore(sk: Vec<u8>, pk: Vec<u8>, used: bool) -> Self {
        BaseKeyPair { sk: Zeroizing::new(sk), pk, used }
    }

    pub fn is_used(&self) -> bool {
        self.used
    }

    /// Marks the key spent and wipes the secret half.
    pub(crate) fn spend(&mut self) -> Result<()> {
        if self.used {
            return Err(Error::OneTimeKeyReuse);
        }
        self.used = true;
        Ok(())
    }

    pub(crate) fn wipe(&mut self) {
        use zeroize::Zeroize;
        self.sk.zeroize();
    }
}

impl std::fmt::Debug for BaseKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BaseKeyPair")
            .field("pk_len", &self.pk.len())
            .field("used", &self.used)
            .finish_non_exhaustive()
    }
}

/// A signature scheme in the three-algorithm sense: keygen, sign, verify.
///
/// All key generation is deterministic in the seed and signing is
/// deterministic in the key and digest.
pub trait OneTimeSignature {
    fn descriptor(&self) -> SchemeDescriptor;

    fn keygen(&self, seed: &Seed, pub_seed: &Digest, addr: KeyAddress) -> BaseKeyPair;

    /// Signs and spends the key. A second call errors with `OneTimeKeyReuse`.
    fn sign(
        &self,
        key: &mut BaseKeyPair,
        digest: &Digest,
        pub_seed: &Digest,
        addr: KeyAddress,
    ) -> Result<Vec<u8>>;

    /// Pure. Malformed lengths reject rather than error.
    fn verify(&self, pk: &[u8], digest: &Digest, sig: &[u8], pub_seed: &Digest, addr: KeyAddress) -> bool;
}

/// Registry of the base schemes usable in compositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseScheme {
    Wots(Wots),
    Mock(MockLattice),
}

impl BaseScheme {
    pub const NAMES: [&'static str; 4] = ["wots-sha256", "wots-shake256", "mock-dilithium", "mock-bliss2"];

    pub fn wots_sha256() -> Self {
        BaseScheme::Wots(Wots::new(WotsParams::default(), HashSuite::Sha2_256))
    }

    pub fn wots_shake256() -> Self {
        BaseScheme::Wots(Wots::new(WotsParams::default(), HashSuite::Shake256))
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "wots-sha256" => Ok(Self::wots_sha256()),
            "wots-shake256" => Ok(Self::wots_shake256()),
            "mock-dilithium" => Ok(BaseScheme::Mock(MockLattice::dilithium())),
            "mock-bliss2" => Ok(BaseScheme::Mock(MockLattice::bliss2())),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    pub fn name(&self) -> String {
        self.descriptor().name
    }

    pub fn is_mock(&self) -> bool {
        matches!(self, BaseScheme::Mock(_))
    }

    /// Hash suite used by compositions built over this base scheme.
    pub fn suite(&self) -> HashSuite {
        match self {
            BaseScheme::Wots(w) => w.suite(),
            BaseScheme::Mock(_) => HashSuite::Sha2_256,
        }
    }

    fn inner(&self) -> &dyn OneTimeSignature {
        match self {
            BaseScheme::Wots(w) => w,
            BaseScheme::Mock(m) => m,
        }
    }
}

impl OneTimeSignature for BaseScheme {
    fn descriptor(&self) -> SchemeDescriptor {
        self.inner().descriptor()
    }

    fn keygen(&self, seed: &Seed, pub_seed: &Digest, addr: KeyAddress) -> BaseKeyPair {
        counters::count_keygen();
        self.inner().keygen(seed, pub_seed, addr)
    }

    fn sign(&self, key: &mut BaseKeyPair, digest: &Digest, pub_seed: &Digest, addr: KeyAddress) -> Result<Vec<u8>> {
        counters::count_sign();
        self.inner().sign(key, digest, pub_seed, addr)
    }

    fn verify(&self, pk: &[u8], digest: &Digest, sig: &[u8], pub_seed: &Digest, addr: KeyAddress) -> bool {
        counters::count_verify();
        self.inner().verify(pk, digest, sig, pub_seed, addr)
    }
}
