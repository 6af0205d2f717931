//! WOTS+ one-time signatures with per-step masks derived from a public seed
//! and a structured chain address.

use crate::error::{Error, Result};
use crate::hash::{prf_expand, wots_chain, ChainAddress, Digest, HashSuite, Seed, DIGEST_LEN};
use crate::scheme::{BaseKeyPair, KeyAddress, OneTimeSignature, SchemeDescriptor};

/// Chain-count parameters. `m` is the number of digest bits signed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WotsParams {
    pub w: u32,
    pub log_w: u32,
    pub m: u32,
    pub len1: usize,
    pub len2: usize,
    pub len: usize,
}

impl Default for WotsParams {
    fn default() -> Self {
        WotsParams::new(4, 256).expect("default parameters are valid")
    }
}

impl WotsParams {
    /// `w` must be a power of two ≥ 4 and `m` a positive multiple of `log2 w`
    /// no larger than the digest width.
    pub fn new(w: u32, m: u32) -> Result<Self> {
        if w < 4 || !w.is_power_of_two() || w > 256 {
            return Err(Error::InvalidParameter(format!("w = {w}")));
        }
        let log_w = w.trailing_zeros();
        if m == 0 || m as usize > DIGEST_LEN * 8 || m % log_w != 0 {
            return Err(Error::InvalidParameter(format!("m = {m}")));
        }
        let len1 = m.div_ceil(log_w) as usize;
        // len2 = floor(log_w(len1 (w-1))) + 1
        let max_checksum = len1 as u64 * (w as u64 - 1);
        let mut len2 = 1usize;
        let mut pow = w as u64;
        while pow <= max_checksum {
            pow *= w as u64;
            len2 += 1;
        }
        Ok(WotsParams { w, log_w, m, len1, len2, len: len1 + len2 })
    }

    pub fn bytes(&self) -> usize {
        self.len * DIGEST_LEN
    }
}

/// Message symbols followed by checksum symbols, each in `[0, w-1]`.
pub fn base_w_encode(digest: &Digest, params: &WotsParams) -> Vec<u32> {
    let mask = params.w - 1;
    let mut out = Vec::with_capacity(params.len);
    let mut bit = 0usize;
    for _ in 0..params.len1 {
        let mut v = 0u32;
        for _ in 0..params.log_w {
            let b = (digest.0[bit / 8] >> (7 - bit % 8)) & 1;
            v = (v << 1) | b as u32;
            bit += 1;
        }
        out.push(v);
    }
    let checksum: u64 = out.iter().map(|&s| (mask - s) as u64).sum();
    // big-endian base-w over len2 symbols
    for i in (0..params.len2).rev() {
        let shift = i as u32 * params.log_w;
        out.push(((checksum >> shift) & mask as u64) as u32);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wots {
    params: WotsParams,
    suite: HashSuite,
}

impl Wots {
    pub fn new(params: WotsParams, suite: HashSuite) -> Self {
        Wots { params, suite }
    }

    pub fn params(&self) -> &WotsParams {
        &self.params
    }

    pub fn suite(&self) -> HashSuite {
        self.suite
    }

    fn chain_addr(addr: KeyAddress, chain: usize) -> ChainAddress {
        ChainAddress { instance: addr.instance, leaf: addr.leaf, chain: chain as u32 }
    }

    fn chain(&self, x: &Digest, start: u32, steps: u32, pub_seed: &Digest, addr: KeyAddress, j: usize) -> Digest {
        wots_chain(self.suite, self.params.w, x, start, steps, pub_seed, &Self::chain_addr(addr, j))
            .expect("symbols are within [0, w-1]")
    }

    fn split(bytes: &[u8]) -> impl Iterator<Item = Digest> + '_ {
        bytes.chunks_exact(DIGEST_LEN).map(|c| Digest(c.try_into().unwrap()))
    }

    /// Single-digest public key; not used by the compositions.
    pub fn compress_pk(&self, pk: &[u8]) -> Digest {
        crate::hash::hash_raw(self.suite, crate::hash::tag::NODE, &[b"wots-pk", pk])
    }
}

impl OneTimeSignature for Wots {
    fn descriptor(&self) -> SchemeDescriptor {
        let default = self.params == WotsParams::default();
        let name = if default {
            format!("wots-{}", self.suite.name())
        } else {
            format!("wots-w{}-m{}-{}", self.params.w, self.params.m, self.suite.name())
        };
        let b = self.params.bytes();
        SchemeDescriptor { name, sig_size: b, pk_size: b, sk_size: b, capacity: 1 }
    }

    fn keygen(&self, seed: &Seed, pub_seed: &Digest, addr: KeyAddress) -> BaseKeyPair {
        let mut sk = Vec::with_capacity(self.params.bytes());
        let mut pk = Vec::with_capacity(self.params.bytes());
        for j in 0..self.params.len {
            let start = prf_expand(self.suite, seed, &(j as u32).to_be_bytes());
            sk.extend_from_slice(&start.0);
            let end = self.chain(&start, 0, self.params.w - 1, pub_seed, addr, j);
            pk.extend_from_slice(&end.0);
        }
        BaseKeyPair::new(sk, pk)
    }

    fn sign(&self, key: &mut BaseKeyPair, digest: &Digest, pub_seed: &Digest, addr: KeyAddress) -> Result<Vec<u8>> {
        key.spend()?;
        let symbols = base_w_encode(digest, &self.params);
        let mut sig = Vec::with_capacity(self.params.bytes());
        for (j, (start, &s)) in Self::split(&key.sk).zip(&symbols).enumerate() {
            sig.extend_from_slice(&self.chain(&start, 0, s, pub_seed, addr, j).0);
        }
        key.wipe();
        Ok(sig)
    }

    fn verify(&self, pk: &[u8], digest: &Digest, sig: &[u8], pub_seed: &Digest, addr: KeyAddress) -> bool {
        let n = self.params.bytes();
        if pk.len() != n || sig.len() != n {
            return false;
        }
        let symbols = base_w_encode(digest, &self.params);
        let mut ok = true;
        for (j, ((el, expect), &s)) in Self::split(sig).zip(Self::split(pk)).zip(&symbols).enumerate() {
            let end = self.chain(&el, s, self.params.w - 1 - s, pub_seed, addr, j);
            ok &= end == expect;
        }
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle for len2: smallest count of base-w digits that can
    /// represent every checksum value in [0, len1 (w-1)].
    fn len2_oracle(len1: u64, w: u64) -> usize {
        let max = len1 * (w - 1);
        (1..64).find(|&d| w.pow(d as u32) > max).unwrap()
    }

    #[test]
    fn default_lengths() {
        let p = WotsParams::default();
        assert_eq!((p.len1, p.len2, p.len), (128, 5, 133));
        assert_eq!(p.bytes(), 4256);
        assert_eq!(p.len2, len2_oracle(128, 4));
    }

    #[test]
    fn length_formula_matches_enumeration() {
        for w in [4u32, 16, 256] {
            for m in (w.trailing_zeros()..=256).step_by(w.trailing_zeros() as usize) {
                let p = WotsParams::new(w, m).unwrap();
                assert_eq!(p.len2, len2_oracle(p.len1 as u64, w as u64), "w={w} m={m}");
            }
        }
    }

    #[test]
    fn toy_parameters() {
        let p = WotsParams::new(4, 4).unwrap();
        assert_eq!((p.len1, p.len2, p.len), (2, 2, 4));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WotsParams::new(3, 256).is_err());
        assert!(WotsParams::new(4, 0).is_err());
        assert!(WotsParams::new(4, 257).is_err());
        assert!(WotsParams::new(16, 6).is_err());
    }

    #[test]
    fn zero_digest_checksum() {
        let s = base_w_encode(&Digest::ZERO, &WotsParams::default());
        assert!(s[..128].iter().all(|&x| x == 0));
        // 384 = 1*256 + 2*64
        assert_eq!(&s[128..], &[1, 2, 0, 0, 0]);
    }

    #[test]
    fn all_ones_digest_checksum_zero() {
        let s = base_w_encode(&Digest([0xff; 32]), &WotsParams::default());
        assert!(s[..128].iter().all(|&x| x == 3));
        assert_eq!(&s[128..], &[0, 0, 0, 0, 0]);
    }

    fn checksum(sym: &[u32], p: &WotsParams) -> u64 {
        sym[p.len1..].iter().fold(0u64, |acc, &s| acc * p.w as u64 + s as u64)
    }

    #[test]
    fn pk_is_chain_end_of_sk() {
        let wots = Wots::new(WotsParams::default(), HashSuite::Sha2_256);
        let ps = Digest([1; 32]);
        let addr = KeyAddress { instance: 7, leaf: 2 };
        let kp = wots.keygen(&Seed([8; 16]), &ps, addr);
        for (j, (sk, pk)) in Wots::split(&kp.sk).zip(Wots::split(&kp.pk)).enumerate() {
            // direct three-step loop
            let a = ChainAddress { instance: 7, leaf: 2, chain: j as u32 };
            let mut x = sk;
            for step in 0..3 {
                x = wots_chain(HashSuite::Sha2_256, 4, &x, step, 1, &ps, &a).unwrap();
            }
            assert_eq!(x, pk);
        }
    }

    #[test]
    fn advanced_element_is_rejected() {
        let wots = Wots::new(WotsParams::default(), HashSuite::Sha2_256);
        let ps = Digest([1; 32]);
        let addr = KeyAddress::default();
        let mut kp = wots.keygen(&Seed([8; 16]), &ps, addr);
        let d = Digest::ZERO;
        let mut sig = wots.sign(&mut kp, &d, &ps, addr).unwrap();
        // push chain 0 one step forward: a valid-looking value for symbol 1
        let el = Digest(sig[..32].try_into().unwrap());
        let adv = wots.chain(&el, 0, 1, &ps, addr, 0);
        sig[..32].copy_from_slice(&adv.0);
        assert!(!wots.verify(&kp.pk, &d, &sig, &ps, addr));
        assert!(!wots.verify(&kp.pk, &d, &sig, &Digest([2; 32]), addr));
    }

    proptest! {
        #[test]
        fn decreasing_a_symbol_raises_checksum(bytes in any::<[u8; 32]>(), pos in 0usize..128) {
            let p = WotsParams::default();
            let d = Digest(bytes);
            let s = base_w_encode(&d, &p);
            prop_assume!(s[pos] > 0);
            // lower symbol `pos` by one in the digest bits
            let mut d2 = d;
            let bit = pos * 2;
            let cur = s[pos] - 1;
            for k in 0..2 {
                let b = bit + k;
                let v = (cur >> (1 - k)) & 1;
                d2.0[b / 8] = (d2.0[b / 8] & !(1 << (7 - b % 8))) | ((v as u8) << (7 - b % 8));
            }
            let s2 = base_w_encode(&d2, &p);
            prop_assert!(checksum(&s2, &p) > checksum(&s, &p));
        }
    }
}
