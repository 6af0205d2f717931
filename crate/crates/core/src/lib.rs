//! Forward-secure post-quantum signatures built by sum and product
//! composition of one-time signatures.
//!
//! Two constructions are provided on top of the generic compositions:
//!
//! * [`frog`]: an upper certification tree whose leaves certify lower trees
//!   of growing height, with amortized key generation so that moving from
//!   one lower tree to the next never needs a bulk keygen.
//! * [`star`]: a two-period sum scheme squared repeatedly by self-product.
//!
//! Base schemes are WOTS+ (SHA-256 or SHAKE-256) and insecure mock lattice
//! adapters that only model artifact sizes.

pub mod bench;
pub mod compositions;
pub mod counters;
pub mod error;
pub mod frog;
pub mod hash;
pub mod mock;
pub mod scheme;
pub mod seedtree;
pub mod signer;
pub mod star;
pub mod store;
pub mod wire;
pub mod wots;

pub use error::{Error, Result};
pub use hash::{Digest, HashSuite, Seed};
pub use scheme::{BaseKeyPair, BaseScheme, KeyAddress, OneTimeSignature, SchemeDescriptor};
