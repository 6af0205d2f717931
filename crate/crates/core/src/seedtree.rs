//! Binary seed trees with a forward-secure traversal cursor.
//!
//! A tree of height `h` derives leaf seeds from one root seed by walking the
//! leaf index bits: left child `prf(s, "L")`, right child `prf(s, "R")`. The
//! cursor keeps only the seed of the current leaf plus the seeds of the right
//! subtrees not yet entered, so nothing in it derives an earlier leaf.

use crate::error::{Error, Result};
use crate::hash::{prf_derive, HashSuite, Seed};
use crate::wire::{Reader, Writer};

pub const LEFT: &[u8] = b"L";
pub const RIGHT: &[u8] = b"R";

/// Direct derivation of leaf `j`, used for key generation passes and tests.
pub fn leaf_seed(suite: HashSuite, root: &Seed, height: u32, j: u64) -> Seed {
    let mut s = root.clone();
    for d in (0..height).rev() {
        let label = if (j >> d) & 1 == 1 { RIGHT } else { LEFT };
        s = prf_derive(suite, &s, label);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedCursor {
    height: u32,
    leaf: u64,
    leaf_seed: Option<Seed>,
    /// `right[d]`: seed of the unentered right sibling below depth `d`.
    right: Vec<Option<Seed>>,
}

impl SeedCursor {
    /// Positions at leaf 0. The caller should drop `root` afterwards.
    pub fn new(suite: HashSuite, root: &Seed, height: u32) -> Self {
        let mut right = Vec::with_capacity(height as usize);
        let mut s = root.clone();
        for _ in 0..height {
            right.push(Some(prf_derive(suite, &s, RIGHT)));
            s = prf_derive(suite, &s, LEFT);
        }
        SeedCursor { height, leaf: 0, leaf_seed: Some(s), right }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn leaf(&self) -> u64 {
        self.leaf
    }

    pub fn capacity(&self) -> u64 {
        1u64 << self.height
    }

    pub fn leaf_seed(&self) -> Option<&Seed> {
        self.leaf_seed.as_ref()
    }

    /// Removes the current leaf seed from the cursor.
    pub fn take_leaf_seed(&mut self) -> Option<Seed> {
        self.leaf_seed.take()
    }

    /// Moves to the next leaf, erasing the current leaf seed.
    pub fn advance(&mut self, suite: HashSuite) -> Result<()> {
        if self.leaf + 1 >= self.capacity() {
            self.leaf_seed = None;
            return Err(Error::Exhausted);
        }
        // the deepest left turn is the lowest zero bit of `leaf`
        let d = self
            .right
            .iter()
            .rposition(Option::is_some)
            .expect("a right subtree remains before exhaustion");
        let mut s = self.right[d].take().unwrap();
        for dd in d + 1..self.height as usize {
            self.right[dd] = Some(prf_derive(suite, &s, RIGHT));
            s = prf_derive(suite, &s, LEFT);
        }
        self.leaf += 1;
        self.leaf_seed = Some(s);
        Ok(())
    }

    /// Every secret seed held by the cursor.
    pub fn seeds(&self) -> Vec<&Seed> {
        self.leaf_seed.iter().chain(self.right.iter().flatten()).collect()
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u32(self.height);
        w.u64(self.leaf);
        w.opt_seed(self.leaf_seed.as_ref());
        for r in &self.right {
            w.opt_seed(r.as_ref());
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let height = r.u32()?;
        if height > 63 {
            return Err(Error::Malformed(format!("seed tree height {height}")));
        }
        let leaf = r.u64()?;
        if leaf >= 1u64 << height {
            return Err(Error::Malformed("seed cursor past its tree".into()));
        }
        let leaf_seed = r.opt_seed()?;
        let right = (0..height).map(|_| r.opt_seed()).collect::<Result<Vec<_>>>()?;
        Ok(SeedCursor { height, leaf, leaf_seed, right })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: HashSuite = HashSuite::Sha2_256;

    #[test]
    fn cursor_walks_all_leaves_in_order() {
        let root = Seed([7; 16]);
        for h in 0..6 {
            let mut c = SeedCursor::new(S, &root, h);
            for j in 0..(1u64 << h) {
                assert_eq!(c.leaf(), j);
                assert_eq!(c.leaf_seed().unwrap(), &leaf_seed(S, &root, h, j));
                let r = c.advance(S);
                assert_eq!(r.is_err(), j + 1 == 1 << h);
            }
        }
    }

    #[test]
    fn cursor_never_holds_past_leaf_seeds() {
        let root = Seed([1; 16]);
        let h = 4;
        let mut c = SeedCursor::new(S, &root, h);
        for j in 1..16u64 {
            c.advance(S).unwrap();
            let held: Vec<Seed> = c.seeds().into_iter().cloned().collect();
            // re-derive everything reachable from held seeds down to depth h
            let mut frontier = held.clone();
            let mut reachable = held;
            for _ in 0..h {
                frontier = frontier
                    .iter()
                    .flat_map(|s| [prf_derive(S, s, LEFT), prf_derive(S, s, RIGHT)])
                    .collect();
                reachable.extend(frontier.iter().cloned());
            }
            for past in 0..j {
                assert!(!reachable.contains(&leaf_seed(S, &root, h, past)));
            }
        }
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(h in 0u32..8, steps in 0u64..255, seed in any::<[u8; 16]>()) {
            let mut c = SeedCursor::new(S, &Seed(seed), h);
            for _ in 0..steps.min((1u64 << h) - 1) {
                c.advance(S).unwrap();
            }
            let mut w = Writer::new();
            c.encode(&mut w);
            let bytes = w.into_bytes();
            let mut r = Reader::new(&bytes);
            prop_assert_eq!(SeedCursor::decode(&mut r).unwrap(), c);
            r.finish().unwrap();
        }
    }
}
