use crate::error::{Error, Result};
use crate::hash::{Digest, DIGEST_LEN};
use crate::wire::{Reader, Writer};

pub const SIGNATURE_VERSION: u8 = 1;

const MAX_ARTIFACT: usize = 1 << 20;
const MAX_PATH: usize = 64;
const MAX_RECORDS: usize = 255;

/// A base signature and the base public key it verifies under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafSig {
    pub pk: Vec<u8>,
    pub sig: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigNode {
    Leaf(LeafSig),
    Sum { inner: Box<SigNode>, sibling: Digest },
    Tree { leaf: LeafSig, path: Vec<Digest> },
    Product { upper: Box<SigNode>, lower_pk: Digest, lower: Box<SigNode> },
}

impl SigNode {
    /// Number of wire records (one per node).
    pub fn records(&self) -> usize {
        match self {
            SigNode::Leaf(_) | SigNode::Tree { .. } => 1,
            SigNode::Sum { inner, .. } => 1 + inner.records(),
            SigNode::Product { upper, lower, .. } => 1 + upper.records() + lower.records(),
        }
    }

    pub fn leaf_signatures(&self) -> Vec<&LeafSig> {
        match self {
            SigNode::Leaf(l) | SigNode::Tree { leaf: l, .. } => vec![l],
            SigNode::Sum { inner, .. } => inner.leaf_signatures(),
            SigNode::Product { upper, lower, .. } => {
                let mut v = upper.leaf_signatures();
                v.extend(lower.leaf_signatures());
                v
            }
        }
    }

    fn record(&self) -> Vec<u8> {
        let mut w = Writer::new();
        match self {
            SigNode::Leaf(l) => {
                w.u8(0);
                w.bytes(&l.pk);
                w.bytes(&l.sig);
            }
            SigNode::Sum { sibling, .. } => {
                w.u8(1);
                w.digest(sibling);
            }
            SigNode::Tree { leaf, path } => {
                w.u8(2);
                w.bytes(&leaf.pk);
                w.bytes(&leaf.sig);
                w.u8(path.len() as u8);
                for d in path {
                    w.digest(d);
                }
            }
            SigNode::Product { lower_pk, .. } => {
                w.u8(3);
                w.digest(lower_pk);
            }
        }
        w.into_bytes()
    }

    fn encode_records(&self, w: &mut Writer) {
        w.bytes(&self.record());
        match self {
            SigNode::Leaf(_) | SigNode::Tree { .. } => {}
            SigNode::Sum { inner, .. } => inner.encode_records(w),
            SigNode::Product { upper, lower, .. } => {
                upper.encode_records(w);
                lower.encode_records(w);
            }
        }
    }

    fn decode_records(r: &mut Reader, budget: &mut usize) -> Result<SigNode> {
        if *budget == 0 {
            return Err(Error::Malformed("record count mismatch".into()));
        }
        *budget -= 1;
        let rec = r.bytes(MAX_ARTIFACT * 2 + 64 * DIGEST_LEN + 16)?;
        let mut rr = Reader::new(&rec);
        let node = match rr.u8()? {
            0 => {
                let pk = rr.bytes(MAX_ARTIFACT)?;
                let sig = rr.bytes(MAX_ARTIFACT)?;
                SigNode::Leaf(LeafSig { pk, sig })
            }
            1 => {
                let sibling = rr.digest()?;
                rr.finish()?;
                let inner = Box::new(Self::decode_records(r, budget)?);
                return Ok(SigNode::Sum { inner, sibling });
            }
            2 => {
                let pk = rr.bytes(MAX_ARTIFACT)?;
                let sig = rr.bytes(MAX_ARTIFACT)?;
                let n = rr.u8()? as usize;
                if n > MAX_PATH {
                    return Err(Error::Malformed(format!("path length {n}")));
                }
                let path = (0..n).map(|_| rr.digest()).collect::<Result<Vec<_>>>()?;
                SigNode::Tree { leaf: LeafSig { pk, sig }, path }
            }
            3 => {
                let lower_pk = rr.digest()?;
                rr.finish()?;
                let upper = Box::new(Self::decode_records(r, budget)?);
                let lower = Box::new(Self::decode_records(r, budget)?);
                return Ok(SigNode::Product { upper, lower_pk, lower });
            }
            t => return Err(Error::Malformed(format!("record kind {t}"))),
        };
        rr.finish()?;
        Ok(node)
    }
}

/// Wire envelope around a [`SigNode`].
///
/// ```text
/// version u8 | scheme id (u8 len + ascii) | shape param u8 | period u64 LE
/// | public seed [32] | record count u8 | records (u32 LE len + bytes)...
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeSignature {
    pub scheme_id: String,
    /// Construction parameter: upper leaf count for FROG, depth for FROG*.
    pub param: u8,
    pub period: u64,
    pub pub_seed: Digest,
    pub body: SigNode,
}

impl CompositeSignature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(SIGNATURE_VERSION);
        w.str8(&self.scheme_id);
        w.u8(self.param);
        w.u64(self.period);
        w.digest(&self.pub_seed);
        w.u8(self.body.records() as u8);
        self.body.encode_records(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = r.u8()?;
        if v != SIGNATURE_VERSION {
            return Err(Error::VersionMismatch(v));
        }
        let scheme_id = r.str8()?;
        let param = r.u8()?;
        let period = r.u64()?;
        let pub_seed = r.digest()?;
        let count = r.u8()? as usize;
        if count == 0 || count > MAX_RECORDS {
            return Err(Error::Malformed(format!("record count {count}")));
        }
        let mut budget = count;
        let body = SigNode::decode_records(&mut r, &mut budget)?;
        if budget != 0 {
            return Err(Error::Malformed("record count mismatch".into()));
        }
        r.finish()?;
        Ok(CompositeSignature { scheme_id, param, period, pub_seed, body })
    }

    /// Envelope octets excluding the records.
    pub fn header_len(scheme_id: &str) -> usize {
        1 + 1 + scheme_id.len() + 1 + 8 + DIGEST_LEN + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn leaf(seed: u8, n: usize) -> LeafSig {
        LeafSig { pk: vec![seed; n], sig: vec![seed ^ 0xff; n + 1] }
    }

    fn arb_node() -> impl Strategy<Value = SigNode> {
        let l = (any::<u8>(), 0usize..40, 0usize..5).prop_map(|(s, n, p)| {
            if p == 0 {
                SigNode::Leaf(leaf(s, n))
            } else {
                SigNode::Tree { leaf: leaf(s, n), path: (0..p).map(|i| Digest([i as u8 ^ s; 32])).collect() }
            }
        });
        l.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), any::<[u8; 32]>())
                    .prop_map(|(i, d)| SigNode::Sum { inner: Box::new(i), sibling: Digest(d) }),
                (inner.clone(), any::<[u8; 32]>(), inner).prop_map(|(u, d, l)| SigNode::Product {
                    upper: Box::new(u),
                    lower_pk: Digest(d),
                    lower: Box::new(l)
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn envelope_roundtrip(body in arb_node(), period in any::<u64>(), param in any::<u8>()) {
            let s = CompositeSignature {
                scheme_id: "frog-wots-sha256".into(),
                param,
                period,
                pub_seed: Digest([3; 32]),
                body,
            };
            let bytes = s.to_bytes();
            prop_assert_eq!(CompositeSignature::from_bytes(&bytes).unwrap(), s);
        }

        #[test]
        fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..300)) {
            let _ = CompositeSignature::from_bytes(&bytes);
        }
    }

    #[test]
    fn trailing_and_truncated_input_rejected() {
        let s = CompositeSignature {
            scheme_id: "x".into(),
            param: 0,
            period: 1,
            pub_seed: Digest::ZERO,
            body: SigNode::Leaf(leaf(1, 4)),
        };
        let mut b = s.to_bytes();
        assert!(CompositeSignature::from_bytes(&b[..b.len() - 1]).is_err());
        b.push(0);
        assert!(CompositeSignature::from_bytes(&b).is_err());
    }
}
