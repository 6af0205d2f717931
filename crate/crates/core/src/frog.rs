//! FROG: an upper certification tree whose leaf `i` certifies a lower tree
//! of height `i`.
//!
//! With `L` upper leaves the capacity is `2^L - 1`. Period `t` lives in
//! lower tree `i = floor(log2(t + 1))` at leaf `j = t + 1 - 2^i`. While tree
//! `i` is in use, every sign generates two leaves of tree `i + 1`, so when
//! tree `i` runs out the next one is already complete and no bulk key
//! generation happens at turnover.

use crate::compositions::state::{decode_key, encode_key};
use crate::compositions::{
    child_instance, leaf_node, lower_instance, node_hash, recover_tree, role, CompositeSignature,
    Ctx, LeafSig, SigNode, TreeState, ROOT_INSTANCE,
};
use crate::error::{Error, Result};
use crate::hash::{hash_parts, message_digest, prf_derive, prf_expand, tag, Digest, HashSuite, Seed, DIGEST_LEN};
use crate::scheme::{BaseKeyPair, BaseScheme, KeyAddress, OneTimeSignature};
use crate::seedtree::{leaf_seed, SeedCursor};
use crate::wire::{Reader, Writer};

/// Largest supported upper leaf count. Lower trees keep their full node
/// array, so the last lower tree of a `L`-leaf instance holds `2^L` digests.
pub const MAX_UPPER_LEAVES: u32 = 21;
pub const MAX_LOWER_HEIGHT: u32 = MAX_UPPER_LEAVES - 1;

pub fn scheme_id(base: &BaseScheme) -> String {
    format!("frog-{}", base.name())
}

/// Total periods of an instance with `leaves` upper leaves.
pub fn capacity(leaves: u32) -> u64 {
    (1u64 << leaves) - 1
}

pub fn upper_height(leaves: u32) -> u32 {
    leaves.next_power_of_two().trailing_zeros()
}

/// Lower tree index and leaf index of period `t`.
pub fn locate(t: u64) -> (u32, u64) {
    let i = 63 - (t + 1).leading_zeros();
    (i, t + 1 - (1u64 << i))
}

fn check_leaves(leaves: u32) -> Result<()> {
    if leaves == 0 || leaves > MAX_UPPER_LEAVES {
        return Err(Error::InvalidParameter(format!(
            "upper leaf count must be in 1..={MAX_UPPER_LEAVES}, got {leaves}"
        )));
    }
    Ok(())
}

fn upper_instance() -> u64 {
    child_instance(ROOT_INSTANCE, role::FROG_UPPER)
}

fn lower_tree_instance(i: u32) -> u64 {
    lower_instance(ROOT_INSTANCE, role::FROG_LOWER, i as u64)
}

/// Incremental generation of the next lower tree.
#[derive(Debug)]
struct Builder {
    height: u32,
    seed: Seed,
    next: u64,
    nodes: Vec<Digest>,
    first: Option<BaseKeyPair>,
}

impl Builder {
    fn new(height: u32, seed: Seed) -> Self {
        Builder { height, seed, next: 0, nodes: vec![Digest::ZERO; 2usize << height], first: None }
    }

    fn width(&self) -> u64 {
        1u64 << self.height
    }

    fn is_complete(&self) -> bool {
        self.next == self.width()
    }

    /// Generates up to `count` further leaves, hashing each completed
    /// subtree as soon as its right child is known.
    fn step(&mut self, ctx: &Ctx, count: u64) {
        let inst = lower_tree_instance(self.height);
        for _ in 0..count {
            if self.is_complete() {
                return;
            }
            let j = self.next;
            let s = leaf_seed(ctx.suite, &self.seed, self.height, j);
            let kp = ctx.base.keygen(&s, &ctx.pub_seed, KeyAddress { instance: inst, leaf: j });
            let mut idx = (self.width() + j) as usize;
            self.nodes[idx] = leaf_node(ctx, &kp.pk);
            while idx > 1 && idx & 1 == 1 {
                let p = idx / 2;
                self.nodes[p] = node_hash(ctx.suite, &self.nodes[2 * p], &self.nodes[2 * p + 1]);
                idx = p;
            }
            if j == 0 {
                self.first = Some(kp);
            }
            self.next += 1;
        }
    }

    fn finish(self, ctx: &Ctx) -> TreeState {
        debug_assert!(self.is_complete());
        let cursor = SeedCursor::new(ctx.suite, &self.seed, self.height);
        TreeState::from_parts(lower_tree_instance(self.height), self.height, self.width(), self.nodes, cursor, self.first)
    }

    fn encode(&self, w: &mut Writer) {
        w.u32(self.height);
        w.seed(&self.seed);
        w.u64(self.next);
        w.digests(&self.nodes);
        encode_key(w, self.first.as_ref());
    }

    fn decode(r: &mut Reader) -> Result<Self> {
        let height = r.u32()?;
        if height > MAX_LOWER_HEIGHT {
            return Err(Error::Malformed(format!("builder height {height}")));
        }
        let seed = r.seed()?;
        let next = r.u64()?;
        if next > 1u64 << height {
            return Err(Error::Malformed("builder position".into()));
        }
        let nodes = r.digests(2usize << height)?;
        if nodes.len() != 2usize << height {
            return Err(Error::Malformed("builder node count".into()));
        }
        let first = decode_key(r)?;
        Ok(Builder { height, seed, next, nodes, first })
    }
}

/// Certification of the active lower tree by upper leaf `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Certification {
    leaf: LeafSig,
    path: Vec<Digest>,
}

/// Evolving FROG signer state.
#[derive(Debug)]
pub struct FrogState {
    ctx: Ctx,
    leaves: u32,
    upper: TreeState,
    index: u32,
    lower: TreeState,
    cert: Option<Certification>,
    /// Forward-secure chain of lower-tree seeds not yet handed out.
    factory: Option<Seed>,
    builder: Option<Builder>,
    period: u64,
    amortize: bool,
}

impl FrogState {
    /// Generates an instance with `leaves` upper leaves. Every upper leaf
    /// public key enters the root, so keygen costs `leaves + 1` base keygens.
    pub fn keygen(base: BaseScheme, seed: &Seed, leaves: u32) -> Result<(FrogState, Digest)> {
        check_leaves(leaves)?;
        let suite = base.suite();
        let pub_seed = prf_expand(suite, seed, b"frog-pub");
        let ctx = Ctx::new(base, pub_seed);
        let upper_seed = prf_derive(suite, seed, b"frog-U");
        let upper = TreeState::keygen(&ctx, upper_instance(), &upper_seed, upper_height(leaves), leaves as u64)?;
        let f0 = prf_derive(suite, seed, b"frog-F");
        let lower_seed = prf_derive(suite, &f0, b"inst");
        let lower = TreeState::keygen(&ctx, lower_tree_instance(0), &lower_seed, 0, 1)?;
        let mut factory = Some(prf_derive(suite, &f0, b"next"));
        drop(f0);
        let builder = if leaves > 1 { Some(Self::next_builder(&ctx, &mut factory, 1)) } else { None };
        let pk = upper.root();
        let state = FrogState {
            ctx,
            leaves,
            upper,
            index: 0,
            lower,
            cert: None,
            factory,
            builder,
            period: 0,
            amortize: true,
        };
        Ok((state, pk))
    }

    fn next_builder(ctx: &Ctx, factory: &mut Option<Seed>, height: u32) -> Builder {
        let f = factory.take().expect("factory outlives the last lower tree");
        let seed = prf_derive(ctx.suite, &f, b"inst");
        *factory = Some(prf_derive(ctx.suite, &f, b"next"));
        Builder::new(height, seed)
    }

    /// Test hook: with amortization off, the next lower tree is generated in
    /// one pass at turnover.
    #[doc(hidden)]
    pub fn set_amortized(&mut self, on: bool) {
        self.amortize = on;
    }

    pub fn scheme_id(&self) -> String {
        scheme_id(&self.ctx.base)
    }

    pub fn base(&self) -> &BaseScheme {
        &self.ctx.base
    }

    pub fn leaves(&self) -> u32 {
        self.leaves
    }

    pub fn public_key(&self) -> Digest {
        self.upper.root()
    }

    pub fn capacity(&self) -> u64 {
        capacity(self.leaves)
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn is_exhausted(&self) -> bool {
        self.period >= self.capacity()
    }

    /// Signs `message` at the current period without advancing.
    pub fn sign_current(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        if self.is_exhausted() {
            return Err(Error::Exhausted);
        }
        let digest = message_digest(self.ctx.suite, message);
        if self.cert.is_none() {
            let payload = certification_payload(self.ctx.suite, &self.lower.root(), self.index, self.leaves);
            let (leaf, path) = self.upper.sign_current(&self.ctx, &payload)?;
            self.upper.update(&self.ctx)?;
            self.cert = Some(Certification { leaf, path });
        }
        let cert = self.cert.clone().unwrap();
        let (leaf, path) = self.lower.sign_current(&self.ctx, &digest)?;
        Ok(CompositeSignature {
            scheme_id: self.scheme_id(),
            param: self.leaves as u8,
            period: self.period,
            pub_seed: self.ctx.pub_seed,
            body: SigNode::Product {
                upper: Box::new(SigNode::Tree { leaf: cert.leaf, path: cert.path }),
                lower_pk: self.lower.root(),
                lower: Box::new(SigNode::Tree { leaf, path }),
            },
        })
    }

    /// Erases the current period's secrets and advances one period.
    pub fn update(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::Exhausted);
        }
        self.lower.update(&self.ctx)?;
        if let (Some(b), true) = (self.builder.as_mut(), self.amortize) {
            b.step(&self.ctx, 2);
        }
        self.period += 1;
        if self.is_exhausted() {
            self.factory = None;
            self.cert = None;
            return Ok(());
        }
        if self.lower.period() == self.lower.leaves() {
            let mut b = self.builder.take().expect("a next lower tree exists before exhaustion");
            if !b.is_complete() {
                b.step(&self.ctx, b.width());
            }
            self.lower = b.finish(&self.ctx);
            self.index += 1;
            self.cert = None;
            if self.index + 1 < self.leaves {
                self.builder = Some(Self::next_builder(&self.ctx, &mut self.factory, self.index + 1));
            } else {
                self.factory = None;
            }
        }
        Ok(())
    }

    pub fn sign(&mut self, message: &[u8]) -> Result<CompositeSignature> {
        let sig = self.sign_current(message)?;
        self.update()?;
        Ok(sig)
    }

    /// Every secret the state still holds.
    pub fn secrets(&self) -> Vec<Vec<u8>> {
        let mut out = self.upper.secrets();
        out.extend(self.lower.secrets());
        out.extend(self.factory.iter().map(|s| s.0.to_vec()));
        if let Some(b) = &self.builder {
            out.push(b.seed.0.to_vec());
            out.extend(b.first.iter().map(|k| k.sk.to_vec()));
        }
        out
    }

    pub fn encode(&self, w: &mut Writer) {
        w.str8(&self.ctx.base.name());
        w.digest(&self.ctx.pub_seed);
        w.u32(self.leaves);
        w.u32(self.index);
        w.u64(self.period);
        w.bool(self.amortize);
        self.upper.encode(w);
        self.lower.encode(w);
        match &self.cert {
            Some(c) => {
                w.u8(1);
                w.bytes(&c.leaf.pk);
                w.bytes(&c.leaf.sig);
                w.digests(&c.path);
            }
            None => w.u8(0),
        }
        w.opt_seed(self.factory.as_ref());
        match &self.builder {
            Some(b) => {
                w.u8(1);
                b.encode(w);
            }
            None => w.u8(0),
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let base = BaseScheme::from_name(&r.str8()?)?;
        let ctx = Ctx::new(base, r.digest()?);
        let leaves = r.u32()?;
        check_leaves(leaves).map_err(|e| Error::Malformed(e.to_string()))?;
        let index = r.u32()?;
        let period = r.u64()?;
        let amortize = r.bool()?;
        if index >= leaves || period > capacity(leaves) {
            return Err(Error::Malformed("frog counters out of range".into()));
        }
        let upper = TreeState::decode(r)?;
        let lower = TreeState::decode(r)?;
        let cert = if r.bool()? {
            let pk = r.bytes(1 << 20)?;
            let sig = r.bytes(1 << 20)?;
            let path = r.digests(64)?;
            Some(Certification { leaf: LeafSig { pk, sig }, path })
        } else {
            None
        };
        let factory = r.opt_seed()?;
        let builder = if r.bool()? { Some(Builder::decode(r)?) } else { None };
        if period < capacity(leaves) && locate(period).0 != index {
            return Err(Error::Malformed("frog period does not match its lower tree".into()));
        }
        Ok(FrogState { ctx, leaves, upper, index, lower, cert, factory, builder, period, amortize })
    }
}

/// Verifies a FROG signature: two base verifies and two path folds.
pub fn verify(base: &BaseScheme, pk: &Digest, message: &[u8], sig: &CompositeSignature) -> bool {
    let leaves = sig.param as u32;
    if check_leaves(leaves).is_err() || sig.scheme_id != scheme_id(base) || sig.period >= capacity(leaves) {
        return false;
    }
    let SigNode::Product { upper, lower_pk, lower } = &sig.body else {
        return false;
    };
    let (SigNode::Tree { leaf: ul, path: up }, SigNode::Tree { leaf: ll, path: lp }) = (upper.as_ref(), lower.as_ref())
    else {
        return false;
    };
    let ctx = Ctx::new(base.clone(), sig.pub_seed);
    let (i, j) = locate(sig.period);
    let digest = message_digest(ctx.suite, message);
    if recover_tree(&ctx, lower_tree_instance(i), i, j, &digest, ll, lp).as_ref() != Some(lower_pk) {
        return false;
    }
    let payload = certification_payload(ctx.suite, lower_pk, i, leaves);
    recover_tree(&ctx, upper_instance(), upper_height(leaves), i as u64, &payload, ul, up).as_ref() == Some(pk)
}

/// Upper-leaf payload for lower tree `i`: its root, capacity and index, plus
/// the upper leaf count so that the `param` octet cannot be altered.
fn certification_payload(suite: HashSuite, lower_pk: &Digest, i: u32, leaves: u32) -> Digest {
    hash_parts(
        suite,
        tag::CERTIFICATION,
        &[&lower_pk.0, &(1u64 << i).to_le_bytes(), &(i as u64).to_le_bytes(), &leaves.to_le_bytes()],
    )
}

/// Serialized signature length at `period`, from the wire layout.
pub fn declared_signature_len(base: &BaseScheme, leaves: u32, period: u64) -> usize {
    let d = base.descriptor();
    let (i, _) = locate(period);
    let tree_record = |h: u32| 4 + 1 + 4 + d.pk_size + 4 + d.sig_size + 1 + h as usize * DIGEST_LEN;
    CompositeSignature::header_len(&scheme_id(base))
        + (4 + 1 + DIGEST_LEN)
        + tree_record(upper_height(leaves))
        + tree_record(i)
}

/// Closed-form signature size `2|σ| + 4|pk| + (log κ + log t + 1)|H|` with
/// `log κ = 7` and `log t = 64`.
pub fn formula_signature_len(sig_size: usize, pk_size: usize) -> usize {
    2 * sig_size + 4 * pk_size + (7 + 64 + 1) * DIGEST_LEN
}

/// Recomputes the public key from the seed with a fresh keygen.
pub fn public_key_from_seed(base: BaseScheme, seed: &Seed, leaves: u32) -> Result<Digest> {
    FrogState::keygen(base, seed, leaves).map(|(_, pk)| pk)
}
