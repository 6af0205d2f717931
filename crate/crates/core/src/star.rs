//! FROG*: a two-period sum scheme squared `k` times by self-product, for a
//! capacity of `2^(2^k)`.
//!
//! Lower instances are created on the first sign that needs them, so keygen
//! only builds the outermost two-period scheme.

use crate::compositions::{recover, CompositeSignature, Ctx, Node, Shape, ROOT_INSTANCE};
use crate::error::{Error, Result};
use crate::hash::{message_digest, prf_derive, prf_expand, Digest, Seed, DIGEST_LEN};
use crate::scheme::{BaseScheme, OneTimeSignature};
use crate::wire::{Reader, Writer};

/// Depth 6 reaches the 2^64 period bound.
pub const MAX_DEPTH: u32 = 6;

pub fn scheme_id(base: &BaseScheme) -> String {
    format!("frogstar-{}", base.name())
}

/// `2^(2^k)` as u128 (saturating at depth 7 and above).
pub fn capacity(k: u32) -> u128 {
    Shape::star(k).capacity()
}

fn check_depth(k: u32) -> Result<()> {
    if k > MAX_DEPTH {
        return Err(Error::InvalidParameter(format!("depth must be at most {MAX_DEPTH}, got {k}")));
    }
    Ok(())
}

#[derive(Debug)]
pub struct StarState {
    ctx: Ctx,
    depth: u32,
    shape: Shape,
    node: Node,
}

impl StarState {
    pub fn keygen(base: BaseScheme, seed: &Seed, depth: u32) -> Result<(StarState, Digest)> {
        check_depth(depth)?;
        let suite = base.suite();
        let ctx = Ctx::new(base, prf_expand(suite, seed, b"star-pub"));
        let shape = Shape::star(depth);
        let node = Node::keygen(&shape, &ctx, ROOT_INSTANCE, &prf_derive(suite, seed, b"star-root"))?;
        let pk = node.public_key();
        Ok((StarState { ctx, depth, shape, node }, pk))
    }

    pub fn scheme_id(&self) -> String {
        scheme_id(&self.ctx.base)
    }

    pub fn base(&self) -> &BaseScheme {
        &self.ctx.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn public_key(&self) -> Digest {
        self.node.public_key()
    }

    pub fn capacity(&self) -> u128 {
        self.node.capacity()
    }

    pub fn period(&self) -> u128 {
        self.node.position()
    }

    pub fn is_exhausted(&self) -> bool {
        self.node.is_exhausted()
    }

    pub fn sign_current(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        let period = u64::try_from(self.node.position()).map_err(|_| Error::Exhausted)?;
        let digest = message_digest(self.ctx.suite, message);
        let body = self.node.sign_current(&self.ctx, &digest)?;
        Ok(CompositeSignature {
            scheme_id: self.scheme_id(),
            param: self.depth as u8,
            period,
            pub_seed: self.ctx.pub_seed,
            body,
        })
    }

    pub fn update(&mut self) -> Result<()> {
        self.node.update(&self.ctx)
    }

    pub fn sign(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        let sig = self.sign_current(message)?;
        self.update()?;
        Ok(sig)
    }

    pub fn secrets(&self) -> Vec<Vec<u8>> {
        self.node.secrets()
    }

    pub fn encode(&self, w: &mut Writer) {
        w.str8(&self.ctx.base.name());
        w.digest(&self.ctx.pub_seed);
        w.u8(self.depth as u8);
        self.node.encode(w);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let base = BaseScheme::from_name(&r.str8()?)?;
        let ctx = Ctx::new(base, r.digest()?);
        let depth = r.u8()? as u32;
        check_depth(depth).map_err(|e| Error::Malformed(e.to_string()))?;
        let shape = Shape::star(depth);
        let node = Node::decode(r)?;
        if node.capacity() != shape.capacity() || node.position() > node.capacity() {
            return Err(Error::Malformed("state does not match its depth".into()));
        }
        Ok(StarState { ctx, depth, shape, node })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }
}

pub fn verify(base: &BaseScheme, pk: &Digest, message: &[u8], sig: &CompositeSignature) -> bool {
    let depth = sig.param as u32;
    if check_depth(depth).is_err() || sig.scheme_id != scheme_id(base) {
        return false;
    }
    let ctx = Ctx::new(base.clone(), sig.pub_seed);
    let digest = message_digest(ctx.suite, message);
    recover(&Shape::star(depth), &ctx, ROOT_INSTANCE, sig.period, &digest, &sig.body).as_ref() == Some(pk)
}

fn body_len(shape: &Shape, pk: usize, sig: usize) -> usize {
    match shape {
        Shape::Leaf => 4 + 1 + 4 + pk + 4 + sig,
        Shape::Tree(h) => 4 + 1 + 4 + pk + 4 + sig + 1 + *h as usize * DIGEST_LEN,
        Shape::Sum(a, b) => 4 + 1 + DIGEST_LEN + body_len(a, pk, sig).max(body_len(b, pk, sig)),
        Shape::Product(u, l) => 4 + 1 + DIGEST_LEN + body_len(u, pk, sig) + body_len(l, pk, sig),
    }
}

/// Serialized signature length, the same at every period.
pub fn declared_signature_len(base: &BaseScheme, depth: u32) -> usize {
    let d = base.descriptor();
    CompositeSignature::header_len(&scheme_id(base)) + body_len(&Shape::star(depth), d.pk_size, d.sig_size)
}

/// Closed-form signature size `2|σ| + 4|pk| + κ` with κ = 128 bits.
pub fn formula_signature_len(sig_size: usize, pk_size: usize) -> usize {
    2 * sig_size + 4 * pk_size + 16
}

/// Number of base signatures a depth-`k` signature carries.
pub fn base_signatures(depth: u32) -> u64 {
    Shape::star(depth).base_signatures()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::SigNode;
    use crate::counters::measure;

    fn base() -> BaseScheme {
        BaseScheme::wots_sha256()
    }

    #[test]
    fn walks_verify_and_exhaust() {
        for k in 0..=2 {
            let (mut st, pk) = StarState::keygen(base(), &Seed([k as u8; 16]), k).unwrap();
            let cap = capacity(k) as u64;
            for t in 0..cap {
                let m = t.to_be_bytes();
                let sig = st.sign(&m).unwrap();
                assert_eq!(sig.period, t);
                assert!(verify(&base(), &pk, &m, &sig), "k={k} t={t}");
                assert_eq!(sig.to_bytes().len(), declared_signature_len(&base(), k));
                assert_eq!(sig.body.leaf_signatures().len() as u64, base_signatures(k));
            }
            assert!(matches!(st.sign(b"x"), Err(Error::Exhausted)));
        }
    }

    #[test]
    fn keygen_is_cheap() {
        let ((_, _), c) = measure(|| StarState::keygen(base(), &Seed([1; 16]), 2).unwrap());
        assert!(c.base_keygen <= 5 * 2 + 2);
        assert!(c.base_sign <= 2);
    }

    #[test]
    fn mean_sign_cost_within_ceiling() {
        let (mut st, pk) = StarState::keygen(base(), &Seed([3; 16]), 2).unwrap();
        let mut kg = 0;
        let mut sg = 0;
        for t in 0..16u64 {
            let (sig, c) = measure(|| st.sign(&t.to_le_bytes()).unwrap());
            kg += c.base_keygen;
            sg += c.base_sign;
            let (ok, v) = measure(|| verify(&base(), &pk, &t.to_le_bytes(), &sig));
            assert!(ok);
            assert!(v.base_verify <= 6);
        }
        assert!(kg as f64 / 16.0 <= 3.0, "{kg}");
        assert!(sg as f64 / 16.0 <= 2.0, "{sg}");
    }

    #[test]
    fn rejects_out_of_range_period_and_tampering() {
        let (mut st, pk) = StarState::keygen(base(), &Seed([4; 16]), 1).unwrap();
        let sig = st.sign(b"m").unwrap();
        let mut far = sig.clone();
        far.period = 4;
        assert!(!verify(&base(), &pk, b"m", &far));
        let mut bad = sig.clone();
        if let SigNode::Product { lower_pk, .. } = &mut bad.body {
            lower_pk.0[0] ^= 1;
        }
        assert!(!verify(&base(), &pk, b"m", &bad));
    }

    #[test]
    fn formula_values() {
        assert_eq!(formula_signature_len(4256, 4256), 25_552);
        assert_eq!(formula_signature_len(625, 875), 4_766);
        assert_eq!(formula_signature_len(2701, 1472), 11_306);
    }
}
