//! Sum, iterated-sum and product composition of key-evolving schemes.
//!
//! A [`Shape`] describes how a scheme is assembled from one-time leaves.
//! Evolving state lives in [`Node`]; signatures are [`SigNode`] trees that
//! mirror the shape. Verification walks the shape, checks every base
//! signature and recomputes the public key, so it depends only on
//! `(pk, message, signature)`.

mod shape;
mod signature;
pub(crate) mod state;

pub use shape::Shape;
pub use signature::{CompositeSignature, LeafSig, SigNode, SIGNATURE_VERSION};
pub use state::{LeafState, Node, ProductState, SumState, TreeState, MAX_EAGER_HEIGHT};

use crate::hash::{hash_parts, tag, Digest, HashSuite};
use crate::scheme::{BaseScheme, KeyAddress, OneTimeSignature};

/// Instance id of the outermost composition.
pub const ROOT_INSTANCE: u64 = 0;

/// Everything an instance shares: base scheme, hash suite and public seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub base: BaseScheme,
    pub suite: HashSuite,
    pub pub_seed: Digest,
}

impl Ctx {
    pub fn new(base: BaseScheme, pub_seed: Digest) -> Self {
        let suite = base.suite();
        Ctx { base, suite, pub_seed }
    }
}

pub(crate) mod role {
    pub const SUM_LEFT: u64 = 1;
    pub const SUM_RIGHT: u64 = 2;
    pub const PRODUCT_UPPER: u64 = 3;
    pub const PRODUCT_LOWER: u64 = 4;
    pub const FROG_UPPER: u64 = 5;
    pub const FROG_LOWER: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Address-space id of a sub-instance. Signer and verifier both derive it
/// from the position, so it never travels in a signature.
pub fn child_instance(parent: u64, role: u64) -> u64 {
    splitmix64(parent ^ splitmix64(role))
}

pub(crate) fn lower_instance(parent: u64, role: u64, ordinal: u64) -> u64 {
    child_instance(child_instance(parent, role), ordinal)
}

/// Tree leaf value for a base public key.
pub fn leaf_node(ctx: &Ctx, pk: &[u8]) -> Digest {
    hash_parts(ctx.suite, tag::NODE, &[&ctx.pub_seed.0, pk])
}

/// Sum-composition public key: `H(0x01 ∥ left ∥ right)`.
pub fn node_hash(suite: HashSuite, left: &Digest, right: &Digest) -> Digest {
    hash_parts(suite, tag::NODE, &[&left.0, &right.0])
}

/// Payload an upper scheme signs to certify a lower instance.
pub fn certification_digest(suite: HashSuite, lower_pk: &Digest, lower_capacity: u64, upper_period: u64) -> Digest {
    hash_parts(
        suite,
        tag::CERTIFICATION,
        &[&lower_pk.0, &lower_capacity.to_le_bytes(), &upper_period.to_le_bytes()],
    )
}

/// Folds an authentication path from a leaf at `index` up to the root.
pub fn fold_path(suite: HashSuite, leaf: Digest, index: u64, path: &[Digest]) -> Digest {
    path.iter().enumerate().fold(leaf, |node, (d, sib)| {
        if (index >> d) & 1 == 1 {
            node_hash(suite, sib, &node)
        } else {
            node_hash(suite, &node, sib)
        }
    })
}

fn verify_leaf(ctx: &Ctx, inst: u64, leaf: u64, digest: &Digest, s: &LeafSig) -> Option<Digest> {
    let addr = KeyAddress { instance: inst, leaf };
    if !ctx.base.verify(&s.pk, digest, &s.sig, &ctx.pub_seed, addr) {
        return None;
    }
    Some(leaf_node(ctx, &s.pk))
}

/// Checks one tree layer (leaf signature plus path) and returns the root it
/// commits to.
pub fn recover_tree(ctx: &Ctx, inst: u64, height: u32, index: u64, digest: &Digest, leaf: &LeafSig, path: &[Digest]) -> Option<Digest> {
    if path.len() != height as usize || (height < 64 && index >> height != 0) {
        return None;
    }
    let node = verify_leaf(ctx, inst, index, digest, leaf)?;
    Some(fold_path(ctx.suite, node, index, path))
}

/// Verifies `sig` for `period` and returns the public key it implies.
pub fn recover(shape: &Shape, ctx: &Ctx, inst: u64, period: u64, digest: &Digest, sig: &SigNode) -> Option<Digest> {
    if (period as u128) >= shape.capacity() {
        return None;
    }
    match (shape, sig) {
        (Shape::Leaf, SigNode::Leaf(l)) => verify_leaf(ctx, inst, 0, digest, l),
        (Shape::Tree(h), SigNode::Tree { leaf, path }) => recover_tree(ctx, inst, *h, period, digest, leaf, path),
        (Shape::Sum(a, b), SigNode::Sum { inner, sibling }) => {
            let ca = a.capacity();
            if (period as u128) < ca {
                let child = recover(a, ctx, child_instance(inst, role::SUM_LEFT), period, digest, inner)?;
                Some(node_hash(ctx.suite, &child, sibling))
            } else {
                let p = period - ca as u64;
                let child = recover(b, ctx, child_instance(inst, role::SUM_RIGHT), p, digest, inner)?;
                Some(node_hash(ctx.suite, sibling, &child))
            }
        }
        (Shape::Product(u, l), SigNode::Product { upper, lower_pk, lower }) => {
            let cl = l.capacity() as u64;
            let (up, lp) = (period / cl, period % cl);
            let lower_root = recover(l, ctx, lower_instance(inst, role::PRODUCT_LOWER, up), lp, digest, lower)?;
            if lower_root != *lower_pk {
                return None;
            }
            let cert = certification_digest(ctx.suite, lower_pk, cl, up);
            recover(u, ctx, child_instance(inst, role::PRODUCT_UPPER), up, &cert, upper)
        }
        _ => None,
    }
}

/// Accept iff `sig` is a valid signature on `message` under `pk`.
pub fn composite_verify(shape: &Shape, base: &BaseScheme, pk: &Digest, message: &[u8], sig: &CompositeSignature) -> bool {
    let ctx = Ctx::new(base.clone(), sig.pub_seed);
    let digest = crate::hash::message_digest(ctx.suite, message);
    recover(shape, &ctx, ROOT_INSTANCE, sig.period, &digest, &sig.body).as_ref() == Some(pk)
}
