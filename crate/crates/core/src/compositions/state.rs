use crate::error::{Error, Result};
use crate::hash::{prf_derive, Digest, Seed};
use crate::scheme::{BaseKeyPair, KeyAddress, OneTimeSignature};
use crate::seedtree::{leaf_seed, SeedCursor};
use crate::wire::{Reader, Writer};

use super::{
    certification_digest, child_instance, leaf_node, lower_instance, node_hash, role, Ctx, LeafSig, Shape, SigNode,
};

/// Tallest iterated sum whose public-key tree is computed eagerly at keygen.
pub const MAX_EAGER_HEIGHT: u32 = 20;

const MAX_KEY_BYTES: usize = 1 << 20;

pub(crate) fn encode_key(w: &mut Writer, key: Option<&BaseKeyPair>) {
    match key {
        None => w.u8(0),
        Some(k) => {
            w.u8(1);
            w.bytes(&k.sk);
            w.bytes(&k.pk);
            w.bool(k.is_used());
        }
    }
}

pub(crate) fn decode_key(r: &mut Reader) -> Result<Option<BaseKeyPair>> {
    if !r.bool()? {
        return Ok(None);
    }
    let sk = r.bytes(MAX_KEY_BYTES)?;
    let pk = r.bytes(MAX_KEY_BYTES)?;
    let used = r.bool()?;
    Ok(Some(BaseKeyPair::restore(sk, pk, used)))
}

fn key_secret(key: &Option<BaseKeyPair>) -> Option<Vec<u8>> {
    key.as_ref().filter(|k| !k.is_used()).map(|k| k.sk.to_vec())
}

fn sign_with(ctx: &Ctx, key: &mut BaseKeyPair, digest: &Digest, addr: KeyAddress) -> Result<LeafSig> {
    let sig = ctx.base.sign(key, digest, &ctx.pub_seed, addr)?;
    Ok(LeafSig { pk: key.pk.clone(), sig })
}

fn u128_le(w: &mut Writer, v: u128) {
    w.raw(&v.to_le_bytes());
}

fn read_u128(r: &mut Reader) -> Result<u128> {
    Ok(u128::from_le_bytes(r.take(16, "u128")?.try_into().unwrap()))
}

/// Evolving state of a composed scheme.
#[derive(Debug)]
pub enum Node {
    Leaf(LeafState),
    Sum(SumState),
    Tree(TreeState),
    Product(ProductState),
}

impl Node {
    pub fn keygen(shape: &Shape, ctx: &Ctx, inst: u64, seed: &Seed) -> Result<Node> {
        Ok(match shape {
            Shape::Leaf => Node::Leaf(LeafState::keygen(ctx, inst, seed)),
            Shape::Tree(h) => Node::Tree(TreeState::keygen(ctx, inst, seed, *h, 1u64 << h)?),
            Shape::Sum(a, b) => Node::Sum(SumState::keygen(ctx, inst, seed, a, b)?),
            Shape::Product(u, l) => Node::Product(ProductState::keygen(ctx, inst, seed, u, l)?),
        })
    }

    pub fn public_key(&self) -> Digest {
        match self {
            Node::Leaf(s) => s.pk,
            Node::Sum(s) => s.pk,
            Node::Tree(s) => s.root(),
            Node::Product(s) => s.upper.public_key(),
        }
    }

    pub fn capacity(&self) -> u128 {
        match self {
            Node::Leaf(_) => 1,
            Node::Sum(s) => s.capacity,
            Node::Tree(s) => s.leaves as u128,
            Node::Product(s) => s.capacity,
        }
    }

    /// Periods consumed so far; equals the capacity once exhausted.
    pub fn position(&self) -> u128 {
        match self {
            Node::Leaf(s) => s.spent as u128,
            Node::Sum(s) => s.pos,
            Node::Tree(s) => s.period as u128,
            Node::Product(s) => s.pos,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.position() >= self.capacity()
    }

    /// Signs `digest` at the current period without advancing.
    pub fn sign_current(&mut self, ctx: &Ctx, digest: &Digest) -> Result<SigNode> {
        if self.is_exhausted() {
            return Err(Error::Exhausted);
        }
        match self {
            Node::Leaf(s) => s.sign_current(ctx, digest),
            Node::Sum(s) => s.sign_current(ctx, digest),
            Node::Tree(s) => s.sign_current(ctx, digest).map(|(leaf, path)| SigNode::Tree { leaf, path }),
            Node::Product(s) => s.sign_current(ctx, digest),
        }
    }

    /// Erases the current period's secrets and moves to the next period.
    pub fn update(&mut self, ctx: &Ctx) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::Exhausted);
        }
        match self {
            Node::Leaf(s) => {
                s.key = None;
                s.spent = true;
                Ok(())
            }
            Node::Sum(s) => s.update(ctx),
            Node::Tree(s) => s.update(ctx),
            Node::Product(s) => s.update(ctx),
        }
    }

    /// Signs for an explicit period, which must be the current one.
    pub fn sign_at(&mut self, ctx: &Ctx, period: u64, digest: &Digest) -> Result<SigNode> {
        let current = self.position();
        if (period as u128) < current {
            return Err(Error::PeriodPassed { requested: period, current: current as u64 });
        }
        if period as u128 != current {
            return Err(Error::InvalidParameter(format!("period {period} is ahead of the current period {current}")));
        }
        let sig = self.sign_current(ctx, digest)?;
        self.update(ctx)?;
        Ok(sig)
    }

    /// Signs at the current period, then updates.
    pub fn sign(&mut self, ctx: &Ctx, digest: &Digest) -> Result<(u64, SigNode)> {
        let period = self.position() as u64;
        let sig = self.sign_current(ctx, digest)?;
        self.update(ctx)?;
        Ok((period, sig))
    }

    /// Every secret (seed or unspent key) the state can still use.
    pub fn secrets(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        self.collect_secrets(&mut out);
        out
    }

    fn collect_secrets(&self, out: &mut Vec<Vec<u8>>) {
        match self {
            Node::Leaf(s) => out.extend(key_secret(&s.key)),
            Node::Tree(s) => s.collect_secrets(out),
            Node::Sum(s) => {
                out.extend(s.right_seed.iter().map(|x| x.0.to_vec()));
                for c in s.left.iter().chain(s.right.iter()) {
                    c.collect_secrets(out);
                }
            }
            Node::Product(s) => {
                out.extend(s.factory.iter().map(|x| x.0.to_vec()));
                s.upper.collect_secrets(out);
                if let Some(l) = &s.lower {
                    l.collect_secrets(out);
                }
            }
        }
    }

    pub fn encode(&self, w: &mut Writer) {
        match self {
            Node::Leaf(s) => {
                w.u8(0);
                w.u64(s.inst);
                w.digest(&s.pk);
                w.bool(s.spent);
                encode_key(w, s.key.as_ref());
            }
            Node::Sum(s) => {
                w.u8(1);
                s.encode(w);
            }
            Node::Tree(s) => {
                w.u8(2);
                s.encode(w);
            }
            Node::Product(s) => {
                w.u8(3);
                s.encode(w);
            }
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Node> {
        Self::decode_depth(r, 0)
    }

    fn decode_depth(r: &mut Reader, depth: usize) -> Result<Node> {
        if depth > 32 {
            return Err(Error::Malformed("state nesting too deep".into()));
        }
        Ok(match r.u8()? {
            0 => {
                let inst = r.u64()?;
                let pk = r.digest()?;
                let spent = r.bool()?;
                let key = decode_key(r)?;
                Node::Leaf(LeafState { inst, pk, spent, key })
            }
            1 => Node::Sum(SumState::decode(r, depth)?),
            2 => Node::Tree(TreeState::decode(r)?),
            3 => Node::Product(ProductState::decode(r, depth)?),
            t => return Err(Error::Malformed(format!("state node tag {t}"))),
        })
    }
}

#[derive(Debug)]
pub struct LeafState {
    inst: u64,
    pk: Digest,
    spent: bool,
    key: Option<BaseKeyPair>,
}

impl LeafState {
    fn keygen(ctx: &Ctx, inst: u64, seed: &Seed) -> Self {
        let key = ctx.base.keygen(seed, &ctx.pub_seed, KeyAddress { instance: inst, leaf: 0 });
        let pk = leaf_node(ctx, &key.pk);
        LeafState { inst, pk, spent: false, key: Some(key) }
    }

    fn sign_current(&mut self, ctx: &Ctx, digest: &Digest) -> Result<SigNode> {
        let key = self.key.as_mut().ok_or(Error::OneTimeKeyReuse)?;
        let l = sign_with(ctx, key, digest, KeyAddress { instance: self.inst, leaf: 0 })?;
        Ok(SigNode::Leaf(l))
    }
}

/// Heap-ordered node array (index 1 is the root) over `2^height` leaves.
/// Leaves past `leaves` are padding and never signed with.
pub(crate) fn build_nodes(ctx: &Ctx, leaf_nodes: &[Digest], height: u32) -> Vec<Digest> {
    let width = 1usize << height;
    let mut nodes = vec![Digest::ZERO; 2 * width];
    nodes[width..width + leaf_nodes.len()].copy_from_slice(leaf_nodes);
    for i in (1..width).rev() {
        nodes[i] = node_hash(ctx.suite, &nodes[2 * i], &nodes[2 * i + 1]);
    }
    nodes
}

/// Iterated sum composition of one-time keys (a certification tree).
#[derive(Debug)]
pub struct TreeState {
    inst: u64,
    height: u32,
    leaves: u64,
    nodes: Vec<Digest>,
    cursor: SeedCursor,
    key: Option<BaseKeyPair>,
    period: u64,
}

impl TreeState {
    /// Eager keygen over `leaves ≤ 2^height` real leaves. Keeps leaf 0's key.
    pub fn keygen(ctx: &Ctx, inst: u64, seed: &Seed, height: u32, leaves: u64) -> Result<Self> {
        if height > MAX_EAGER_HEIGHT {
            return Err(Error::InvalidParameter(format!(
                "tree height {height} exceeds eager limit {MAX_EAGER_HEIGHT}"
            )));
        }
        if leaves == 0 || leaves > 1u64 << height {
            return Err(Error::InvalidParameter(format!("{leaves} leaves in a height-{height} tree")));
        }
        let mut first = None;
        let mut leaf_nodes = Vec::with_capacity(leaves as usize);
        for j in 0..leaves {
            let s = leaf_seed(ctx.suite, seed, height, j);
            let kp = ctx.base.keygen(&s, &ctx.pub_seed, KeyAddress { instance: inst, leaf: j });
            leaf_nodes.push(leaf_node(ctx, &kp.pk));
            if j == 0 {
                first = Some(kp);
            }
        }
        let nodes = build_nodes(ctx, &leaf_nodes, height);
        let mut cursor = SeedCursor::new(ctx.suite, seed, height);
        cursor.take_leaf_seed();
        Ok(TreeState { inst, height, leaves, nodes, cursor, key: first, period: 0 })
    }

    /// Assembles a tree whose nodes were computed elsewhere (amortized
    /// generation). `cursor` must sit at leaf 0.
    pub(crate) fn from_parts(
        inst: u64,
        height: u32,
        leaves: u64,
        nodes: Vec<Digest>,
        mut cursor: SeedCursor,
        first: Option<BaseKeyPair>,
    ) -> Self {
        debug_assert_eq!(nodes.len(), 2usize << height);
        if first.is_some() {
            cursor.take_leaf_seed();
        }
        TreeState { inst, height, leaves, nodes, cursor, key: first, period: 0 }
    }

    pub fn root(&self) -> Digest {
        self.nodes[1]
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn leaves(&self) -> u64 {
        self.leaves
    }

    pub fn auth_path(&self, j: u64) -> Vec<Digest> {
        let width = 1u64 << self.height;
        (0..self.height).map(|d| self.nodes[(((width + j) >> d) ^ 1) as usize]).collect()
    }

    pub fn sign_current(&mut self, ctx: &Ctx, digest: &Digest) -> Result<(LeafSig, Vec<Digest>)> {
        if self.period >= self.leaves {
            return Err(Error::Exhausted);
        }
        let addr = KeyAddress { instance: self.inst, leaf: self.period };
        if self.key.is_none() {
            let s = self.cursor.take_leaf_seed().ok_or(Error::OneTimeKeyReuse)?;
            self.key = Some(ctx.base.keygen(&s, &ctx.pub_seed, addr));
        }
        let leaf = sign_with(ctx, self.key.as_mut().unwrap(), digest, addr)?;
        Ok((leaf, self.auth_path(self.period)))
    }

    pub fn update(&mut self, ctx: &Ctx) -> Result<()> {
        if self.period >= self.leaves {
            return Err(Error::Exhausted);
        }
        self.key = None;
        self.period += 1;
        match self.cursor.advance(ctx.suite) {
            Err(Error::Exhausted) if self.period >= self.leaves => Ok(()),
            r => r,
        }
    }

    fn collect_secrets(&self, out: &mut Vec<Vec<u8>>) {
        out.extend(key_secret(&self.key));
        out.extend(self.cursor.seeds().into_iter().map(|s| s.0.to_vec()));
    }

    pub fn secrets(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        self.collect_secrets(&mut out);
        out
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u64(self.inst);
        w.u32(self.height);
        w.u64(self.leaves);
        w.u64(self.period);
        w.digests(&self.nodes);
        self.cursor.encode(w);
        encode_key(w, self.key.as_ref());
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let inst = r.u64()?;
        let height = r.u32()?;
        if height > MAX_EAGER_HEIGHT.max(crate::frog::MAX_LOWER_HEIGHT) {
            return Err(Error::Malformed(format!("tree height {height}")));
        }
        let leaves = r.u64()?;
        let period = r.u64()?;
        if leaves == 0 || leaves > 1u64 << height || period > leaves {
            return Err(Error::Malformed("tree counters out of range".into()));
        }
        let nodes = r.digests(2usize << height)?;
        if nodes.len() != 2usize << height {
            return Err(Error::Malformed("tree node count".into()));
        }
        let cursor = SeedCursor::decode(r)?;
        let key = decode_key(r)?;
        Ok(TreeState { inst, height, leaves, nodes, cursor, key, period })
    }
}

/// Sum composition of two evolving schemes.
#[derive(Debug)]
pub struct SumState {
    inst: u64,
    left_shape: Shape,
    right_shape: Shape,
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
    /// Held until the right child is activated, then erased.
    right_seed: Option<Seed>,
    left_pk: Digest,
    right_pk: Digest,
    pk: Digest,
    cap_left: u128,
    capacity: u128,
    pos: u128,
}

impl SumState {
    fn keygen(ctx: &Ctx, inst: u64, seed: &Seed, a: &Shape, b: &Shape) -> Result<Self> {
        let left = Node::keygen(a, ctx, child_instance(inst, role::SUM_LEFT), &prf_derive(ctx.suite, seed, b"sum-L"))?;
        let right_seed = prf_derive(ctx.suite, seed, b"sum-R");
        // only the right public key is kept; its secrets are re-derived on activation
        let right_pk = Node::keygen(b, ctx, child_instance(inst, role::SUM_RIGHT), &right_seed)?.public_key();
        let left_pk = left.public_key();
        Ok(SumState {
            inst,
            left_shape: a.clone(),
            right_shape: b.clone(),
            cap_left: left.capacity(),
            capacity: a.capacity().saturating_add(b.capacity()),
            left: Some(Box::new(left)),
            right: None,
            right_seed: Some(right_seed),
            left_pk,
            right_pk,
            pk: node_hash(ctx.suite, &left_pk, &right_pk),
            pos: 0,
        })
    }

    pub fn public_key(&self) -> Digest {
        self.pk
    }

    fn activate_right(&mut self, ctx: &Ctx) -> Result<&mut Node> {
        if self.right.is_none() {
            let seed = self.right_seed.take().ok_or(Error::Exhausted)?;
            let node = Node::keygen(&self.right_shape, ctx, child_instance(self.inst, role::SUM_RIGHT), &seed)?;
            self.right = Some(Box::new(node));
        }
        Ok(self.right.as_mut().unwrap())
    }

    fn sign_current(&mut self, ctx: &Ctx, digest: &Digest) -> Result<SigNode> {
        if self.pos < self.cap_left {
            let inner = self.left.as_mut().ok_or(Error::Exhausted)?.sign_current(ctx, digest)?;
            Ok(SigNode::Sum { inner: Box::new(inner), sibling: self.right_pk })
        } else {
            let sibling = self.left_pk;
            let inner = self.activate_right(ctx)?.sign_current(ctx, digest)?;
            Ok(SigNode::Sum { inner: Box::new(inner), sibling })
        }
    }

    fn update(&mut self, ctx: &Ctx) -> Result<()> {
        if self.pos < self.cap_left {
            let left = self.left.as_mut().ok_or(Error::Exhausted)?;
            left.update(ctx)?;
            if left.is_exhausted() {
                self.left = None;
            }
        } else {
            let right = self.activate_right(ctx)?;
            right.update(ctx)?;
            if right.is_exhausted() {
                self.right = None;
            }
        }
        self.pos += 1;
        Ok(())
    }

    fn encode(&self, w: &mut Writer) {
        w.u64(self.inst);
        self.left_shape.encode(w);
        self.right_shape.encode(w);
        w.digest(&self.left_pk);
        w.digest(&self.right_pk);
        u128_le(w, self.pos);
        w.digest(&self.pk);
        w.opt_seed(self.right_seed.as_ref());
        for c in [&self.left, &self.right] {
            match c {
                Some(n) => {
                    w.u8(1);
                    n.encode(w);
                }
                None => w.u8(0),
            }
        }
    }

    fn decode(r: &mut Reader, depth: usize) -> Result<Self> {
        let inst = r.u64()?;
        let left_shape = Shape::decode(r)?;
        let right_shape = Shape::decode(r)?;
        let left_pk = r.digest()?;
        let right_pk = r.digest()?;
        let pos = read_u128(r)?;
        let pk_stored = r.digest()?;
        let right_seed = r.opt_seed()?;
        let child = |r: &mut Reader| -> Result<Option<Box<Node>>> {
            Ok(if r.bool()? { Some(Box::new(Node::decode_depth(r, depth + 1)?)) } else { None })
        };
        let left = child(r)?;
        let right = child(r)?;
        let cap_left = left_shape.capacity();
        let capacity = cap_left.saturating_add(right_shape.capacity());
        if pos > capacity {
            return Err(Error::Malformed("sum position past capacity".into()));
        }
        let pk = pk_stored;
        Ok(SumState {
            inst,
            left_shape,
            right_shape,
            left,
            right,
            right_seed,
            left_pk,
            right_pk,
            pk,
            cap_left,
            capacity,
            pos,
        })
    }
}

/// Product composition: the upper scheme certifies lower instances, which
/// are created lazily when the first period they cover is signed.
#[derive(Debug)]
pub struct ProductState {
    inst: u64,
    lower_shape: Shape,
    upper: Box<Node>,
    lower: Option<Box<Node>>,
    /// Upper signature over the current lower public key.
    cert: Option<SigNode>,
    lower_pk: Digest,
    /// Forward-secure chain: each step yields one lower-instance seed.
    factory: Option<Seed>,
    cap_lower: u128,
    capacity: u128,
    pos: u128,
}

impl ProductState {
    fn keygen(ctx: &Ctx, inst: u64, seed: &Seed, u: &Shape, l: &Shape) -> Result<Self> {
        let upper = Node::keygen(u, ctx, child_instance(inst, role::PRODUCT_UPPER), &prf_derive(ctx.suite, seed, b"prod-U"))?;
        Ok(ProductState {
            inst,
            lower_shape: l.clone(),
            capacity: upper.capacity().saturating_mul(l.capacity()),
            upper: Box::new(upper),
            lower: None,
            cert: None,
            lower_pk: Digest::ZERO,
            factory: Some(prf_derive(ctx.suite, seed, b"prod-F")),
            cap_lower: l.capacity(),
            pos: 0,
        })
    }

    pub fn upper(&self) -> &Node {
        &self.upper
    }

    /// Creates and certifies the next lower instance.
    fn roll(&mut self, ctx: &Ctx) -> Result<()> {
        let f = self.factory.take().ok_or(Error::Exhausted)?;
        let inst_seed = prf_derive(ctx.suite, &f, b"inst");
        self.factory = Some(prf_derive(ctx.suite, &f, b"next"));
        drop(f);
        let ordinal = (self.pos / self.cap_lower) as u64;
        let lower = Node::keygen(
            &self.lower_shape,
            ctx,
            lower_instance(self.inst, role::PRODUCT_LOWER, ordinal),
            &inst_seed,
        )?;
        let lower_pk = lower.public_key();
        let payload = certification_digest(ctx.suite, &lower_pk, self.cap_lower as u64, ordinal);
        let cert = self.upper.sign_current(ctx, &payload)?;
        self.upper.update(ctx)?;
        self.lower = Some(Box::new(lower));
        self.lower_pk = lower_pk;
        self.cert = Some(cert);
        Ok(())
    }

    fn sign_current(&mut self, ctx: &Ctx, digest: &Digest) -> Result<SigNode> {
        if self.lower.is_none() {
            self.roll(ctx)?;
        }
        let lower = self.lower.as_mut().unwrap().sign_current(ctx, digest)?;
        Ok(SigNode::Product {
            upper: Box::new(self.cert.clone().expect("certified with the lower instance")),
            lower_pk: self.lower_pk,
            lower: Box::new(lower),
        })
    }

    fn update(&mut self, ctx: &Ctx) -> Result<()> {
        if self.lower.is_none() {
            self.roll(ctx)?;
        }
        let lower = self.lower.as_mut().unwrap();
        lower.update(ctx)?;
        if lower.is_exhausted() {
            self.lower = None;
            self.cert = None;
        }
        self.pos += 1;
        if self.pos >= self.capacity {
            self.factory = None;
        }
        Ok(())
    }

    fn encode(&self, w: &mut Writer) {
        w.u64(self.inst);
        self.lower_shape.encode(w);
        u128_le(w, self.pos);
        w.digest(&self.lower_pk);
        w.opt_seed(self.factory.as_ref());
        self.upper.encode(w);
        match &self.lower {
            Some(l) => {
                w.u8(1);
                l.encode(w);
            }
            None => w.u8(0),
        }
        match &self.cert {
            Some(c) => {
                w.u8(1);
                let env = super::CompositeSignature {
                    scheme_id: String::new(),
                    param: 0,
                    period: 0,
                    pub_seed: Digest::ZERO,
                    body: c.clone(),
                };
                w.bytes(&env.to_bytes());
            }
            None => w.u8(0),
        }
    }

    fn decode(r: &mut Reader, depth: usize) -> Result<Self> {
        let inst = r.u64()?;
        let lower_shape = Shape::decode(r)?;
        let pos = read_u128(r)?;
        let lower_pk = r.digest()?;
        let factory = r.opt_seed()?;
        let upper = Box::new(Node::decode_depth(r, depth + 1)?);
        let lower = if r.bool()? { Some(Box::new(Node::decode_depth(r, depth + 1)?)) } else { None };
        let cert = if r.bool()? {
            let b = r.bytes(1 << 24)?;
            Some(super::CompositeSignature::from_bytes(&b)?.body)
        } else {
            None
        };
        if lower.is_some() != cert.is_some() {
            return Err(Error::Malformed("lower instance without certification".into()));
        }
        let cap_lower = lower_shape.capacity();
        let capacity = upper.capacity().saturating_mul(cap_lower);
        if pos > capacity || cap_lower == 0 {
            return Err(Error::Malformed("product position past capacity".into()));
        }
        Ok(ProductState { inst, lower_shape, upper, lower, cert, lower_pk, factory, cap_lower, capacity, pos })
    }
}
