//! One entry point over both constructions, keyed by scheme id
//! (`frog-<base>` or `frogstar-<base>`).

use crate::compositions::CompositeSignature;
use crate::error::{Error, Result};
use crate::frog::{self, FrogState};
use crate::hash::{Digest, Seed};
use crate::scheme::BaseScheme;
use crate::star::{self, StarState};
use crate::wire::{Reader, Writer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Frog,
    Star,
}

/// A parsed scheme id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeId {
    pub construction: Construction,
    pub base: BaseScheme,
}

impl SchemeId {
    /// Parses a scheme id. Mock bases are refused unless `allow_mock`.
    pub fn parse(id: &str, allow_mock: bool) -> Result<Self> {
        let (construction, base) = if let Some(rest) = id.strip_prefix("frogstar-") {
            (Construction::Star, rest)
        } else if let Some(rest) = id.strip_prefix("frog-") {
            (Construction::Frog, rest)
        } else {
            return Err(Error::UnknownScheme(id.to_string()));
        };
        let base = BaseScheme::from_name(base).map_err(|_| Error::UnknownScheme(id.to_string()))?;
        if base.is_mock() && !allow_mock {
            return Err(Error::MockNotAllowed(id.to_string()));
        }
        Ok(SchemeId { construction, base })
    }

    pub fn all() -> Vec<String> {
        let mut out = Vec::new();
        for c in ["frog", "frogstar"] {
            for b in BaseScheme::NAMES {
                out.push(format!("{c}-{b}"));
            }
        }
        out
    }

    pub fn name(&self) -> String {
        match self.construction {
            Construction::Frog => frog::scheme_id(&self.base),
            Construction::Star => star::scheme_id(&self.base),
        }
    }

    /// Capacity for construction parameter `param` (upper leaves or depth).
    pub fn capacity(&self, param: u32) -> u128 {
        match self.construction {
            Construction::Frog => frog::capacity(param) as u128,
            Construction::Star => star::capacity(param),
        }
    }

    /// Serialized signature length for a signature at `period`.
    pub fn signature_len(&self, param: u32, period: u64) -> usize {
        match self.construction {
            Construction::Frog => frog::declared_signature_len(&self.base, param, period),
            Construction::Star => star::declared_signature_len(&self.base, param),
        }
    }
}

#[derive(Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Signer {
    Frog(FrogState),
    Star(StarState),
}

impl Signer {
    pub fn keygen(id: &SchemeId, seed: &Seed, param: u32) -> Result<(Signer, Digest)> {
        match id.construction {
            Construction::Frog => FrogState::keygen(id.base.clone(), seed, param).map(|(s, pk)| (Signer::Frog(s), pk)),
            Construction::Star => StarState::keygen(id.base.clone(), seed, param).map(|(s, pk)| (Signer::Star(s), pk)),
        }
    }

    pub fn scheme(&self) -> SchemeId {
        match self {
            Signer::Frog(s) => SchemeId { construction: Construction::Frog, base: s.base().clone() },
            Signer::Star(s) => SchemeId { construction: Construction::Star, base: s.base().clone() },
        }
    }

    pub fn param(&self) -> u32 {
        match self {
            Signer::Frog(s) => s.leaves(),
            Signer::Star(s) => s.depth(),
        }
    }

    pub fn public_key(&self) -> Digest {
        match self {
            Signer::Frog(s) => s.public_key(),
            Signer::Star(s) => s.public_key(),
        }
    }

    pub fn capacity(&self) -> u128 {
        match self {
            Signer::Frog(s) => s.capacity() as u128,
            Signer::Star(s) => s.capacity(),
        }
    }

    pub fn period(&self) -> u128 {
        match self {
            Signer::Frog(s) => s.period() as u128,
            Signer::Star(s) => s.period(),
        }
    }

    pub fn remaining(&self) -> u128 {
        self.capacity() - self.period()
    }

    pub fn sign_current(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        match self {
            Signer::Frog(s) => s.sign_current(message),
            Signer::Star(s) => s.sign_current(message),
        }
    }

    pub fn update(&mut self) -> Result<()> {
        match self {
            Signer::Frog(s) => s.update(),
            Signer::Star(s) => s.update(),
        }
    }

    pub fn sign(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        let sig = self.sign_current(message)?;
        self.update()?;
        Ok(sig)
    }

    pub fn secrets(&self) -> Vec<Vec<u8>> {
        match self {
            Signer::Frog(s) => s.secrets(),
            Signer::Star(s) => s.secrets(),
        }
    }

    pub fn encode_payload(&self) -> Vec<u8> {
        let mut w = Writer::new();
        match self {
            Signer::Frog(s) => {
                w.u8(1);
                s.encode(&mut w);
            }
            Signer::Star(s) => {
                w.u8(2);
                s.encode(&mut w);
            }
        }
        w.into_bytes()
    }

    pub fn decode_payload(bytes: &[u8]) -> Result<Signer> {
        let mut r = Reader::new(bytes);
        let s = match r.u8()? {
            1 => Signer::Frog(FrogState::decode(&mut r)?),
            2 => Signer::Star(StarState::decode(&mut r)?),
            t => return Err(Error::Malformed(format!("construction tag {t}"))),
        };
        r.finish()?;
        Ok(s)
    }
}

/// Verifies a serialized signature against a scheme, public key and message.
pub fn verify_bytes(id: &SchemeId, pk: &Digest, message: &[u8], sig: &[u8]) -> bool {
    match CompositeSignature::from_bytes(sig) {
        Ok(s) => verify(id, pk, message, &s),
        Err(_) => false,
    }
}

pub fn verify(id: &SchemeId, pk: &Digest, message: &[u8], sig: &CompositeSignature) -> bool {
    match id.construction {
        Construction::Frog => frog::verify(&id.base, pk, message, sig),
        Construction::Star => star::verify(&id.base, pk, message, sig),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_listed_id() {
        for id in SchemeId::all() {
            let s = SchemeId::parse(&id, true).unwrap();
            assert_eq!(s.name(), id);
        }
        assert!(matches!(SchemeId::parse("frog-rsa", true), Err(Error::UnknownScheme(_))));
        assert!(matches!(SchemeId::parse("xmss-wots-sha256", true), Err(Error::UnknownScheme(_))));
        assert!(matches!(SchemeId::parse("frog-mock-bliss2", false), Err(Error::MockNotAllowed(_))));
    }

    #[test]
    fn payload_roundtrip_preserves_signing() {
        for id in ["frog-wots-sha256", "frogstar-wots-shake256"] {
            let id = SchemeId::parse(id, false).unwrap();
            let (mut a, pk) = Signer::keygen(&id, &Seed([8; 16]), 2).unwrap();
            a.sign(b"a").unwrap();
            let mut b = Signer::decode_payload(&a.encode_payload()).unwrap();
            assert_eq!(b.period(), 1);
            let sa = a.sign(b"b").unwrap();
            let sb = b.sign(b"b").unwrap();
            assert_eq!(sa, sb);
            assert!(verify_bytes(&id, &pk, b"b", &sb.to_bytes()));
        }
    }
}
