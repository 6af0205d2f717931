use std::fmt;

use crate::error::{Error, Result};
use crate::wire::{Reader, Writer};

/// Structure of a composed scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// A single one-time key pair.
    Leaf,
    /// Sum composition: left periods first, then right.
    Sum(Box<Shape>, Box<Shape>),
    /// Iterated sum of one-time leaves, height `h`, `2^h` periods.
    Tree(u32),
    /// Product composition: upper certifies successive lower instances.
    Product(Box<Shape>, Box<Shape>),
}

const MAX_DEPTH: usize = 32;

impl Shape {
    pub fn sum(a: Shape, b: Shape) -> Shape {
        Shape::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(upper: Shape, lower: Shape) -> Shape {
        Shape::Product(Box::new(upper), Box::new(lower))
    }

    /// Two-period sum squared `k` times by self-product.
    pub fn star(k: u32) -> Shape {
        (0..k).fold(Shape::sum(Shape::Leaf, Shape::Leaf), |s, _| Shape::product(s.clone(), s))
    }

    /// Number of periods. Saturates at `u128::MAX`.
    pub fn capacity(&self) -> u128 {
        match self {
            Shape::Leaf => 1,
            Shape::Tree(h) => 1u128.checked_shl(*h).unwrap_or(u128::MAX),
            Shape::Sum(a, b) => a.capacity().saturating_add(b.capacity()),
            Shape::Product(u, l) => u.capacity().saturating_mul(l.capacity()),
        }
    }

    /// Base signatures carried by every signature of this shape.
    pub fn base_signatures(&self) -> u64 {
        match self {
            Shape::Leaf | Shape::Tree(_) => 1,
            Shape::Sum(a, b) => a.base_signatures().max(b.base_signatures()),
            Shape::Product(u, l) => u.base_signatures() + l.base_signatures(),
        }
    }

    /// Product nesting depth.
    pub fn product_depth(&self) -> u32 {
        match self {
            Shape::Leaf | Shape::Tree(_) => 0,
            Shape::Sum(a, b) => a.product_depth().max(b.product_depth()),
            Shape::Product(u, l) => 1 + u.product_depth().max(l.product_depth()),
        }
    }

    pub fn encode(&self, w: &mut Writer) {
        match self {
            Shape::Leaf => w.u8(0),
            Shape::Sum(a, b) => {
                w.u8(1);
                a.encode(w);
                b.encode(w);
            }
            Shape::Tree(h) => {
                w.u8(2);
                w.u32(*h);
            }
            Shape::Product(u, l) => {
                w.u8(3);
                u.encode(w);
                l.encode(w);
            }
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Shape> {
        Self::decode_depth(r, 0)
    }

    fn decode_depth(r: &mut Reader, depth: usize) -> Result<Shape> {
        if depth > MAX_DEPTH {
            return Err(Error::Malformed("shape nesting too deep".into()));
        }
        Ok(match r.u8()? {
            0 => Shape::Leaf,
            1 => Shape::sum(Self::decode_depth(r, depth + 1)?, Self::decode_depth(r, depth + 1)?),
            2 => {
                let h = r.u32()?;
                if h > 63 {
                    return Err(Error::Malformed(format!("tree height {h}")));
                }
                Shape::Tree(h)
            }
            3 => Shape::product(Self::decode_depth(r, depth + 1)?, Self::decode_depth(r, depth + 1)?),
            t => return Err(Error::Malformed(format!("shape tag {t}"))),
        })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf => write!(f, "OTS"),
            Shape::Tree(h) => write!(f, "Tree({h})"),
            Shape::Sum(a, b) => write!(f, "({a} ⊕ {b})"),
            Shape::Product(u, l) => write!(f, "({u} ⊗ {l})"),
        }
    }
}
