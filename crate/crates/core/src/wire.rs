//! Little-endian byte codec shared by signatures and state payloads.

use crate::error::{Error, Result};
use crate::hash::{Digest, Seed, DIGEST_LEN, SEED_LEN};

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }

    pub fn raw(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    /// `u32` length prefix followed by the bytes.
    pub fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.raw(b);
    }

    pub fn str8(&mut self, s: &str) {
        self.u8(s.len() as u8);
        self.raw(s.as_bytes());
    }

    pub fn digest(&mut self, d: &Digest) {
        self.raw(&d.0);
    }

    pub fn seed(&mut self, s: &Seed) {
        self.raw(&s.0);
    }

    pub fn opt_seed(&mut self, s: Option<&Seed>) {
        match s {
            Some(s) => {
                self.u8(1);
                self.seed(s);
            }
            None => self.u8(0),
        }
    }

    pub fn digests(&mut self, ds: &[Digest]) {
        self.u32(ds.len() as u32);
        for d in ds {
            self.digest(d);
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn short(what: &str) -> Error {
    Error::Malformed(format!("truncated input reading {what}"))
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(short(what));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1, "u8")?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, "u32")?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, "u64")?.try_into().unwrap()))
    }

    pub fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::Malformed(format!("bad bool octet {v}"))),
        }
    }

    pub fn bytes(&mut self, max: usize) -> Result<Vec<u8>> {
        let n = self.u32()? as usize;
        if n > max {
            return Err(Error::Malformed(format!("length {n} exceeds limit {max}")));
        }
        Ok(self.take(n, "bytes")?.to_vec())
    }

    pub fn str8(&mut self) -> Result<String> {
        let n = self.u8()? as usize;
        let b = self.take(n, "string")?;
        String::from_utf8(b.to_vec()).map_err(|_| Error::Malformed("non-utf8 string".into()))
    }

    pub fn digest(&mut self) -> Result<Digest> {
        Ok(Digest(self.take(DIGEST_LEN, "digest")?.try_into().unwrap()))
    }

    pub fn seed(&mut self) -> Result<Seed> {
        Ok(Seed(self.take(SEED_LEN, "seed")?.try_into().unwrap()))
    }

    pub fn opt_seed(&mut self) -> Result<Option<Seed>> {
        if self.bool()? {
            Ok(Some(self.seed()?))
        } else {
            Ok(None)
        }
    }

    pub fn digests(&mut self, max: usize) -> Result<Vec<Digest>> {
        let n = self.u32()? as usize;
        if n > max {
            return Err(Error::Malformed(format!("{n} digests exceeds limit {max}")));
        }
        (0..n).map(|_| self.digest()).collect()
    }

    pub fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Malformed(format!("{} trailing octets", self.remaining())));
        }
        Ok(())
    }
}
