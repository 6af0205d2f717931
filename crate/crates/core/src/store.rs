//! Durable signer state.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! "FSPQ" | version u8 | scheme id (u8 len + ascii) | hash suite id u8
//! | kappa bits u32 | capacity u128 | period u64
//! | payload (u32 len + bytes) | SHA-256 of everything before it
//! ```
//!
//! Saving writes `<path>.tmp`, syncs it, renames it over `<path>`, then
//! overwrites the replaced inode with zeros through a descriptor opened
//! before the rename. On journaling or copy-on-write filesystems the old
//! blocks may survive anyway; the zeroing is best effort.
//!
//! `<path>.hwm` records the highest period ever saved. It is written after
//! the state, so a state file older than the mark means a copy was rolled
//! back. `<path>.lock` carries an exclusive advisory lock while a signer
//! has the state open.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};

use sha2::{Digest as _, Sha256};
use zeroize::Zeroizing;

use crate::error::{Error, Result};
use crate::hash::{HashSuite, KAPPA_BITS};
use crate::signer::{SchemeId, Signer};
use crate::wire::{Reader, Writer};

pub const MAGIC: &[u8; 4] = b"FSPQ";
pub const FORMAT_VERSION: u8 = 1;
const MAX_PAYLOAD: usize = 1 << 30;

/// A save boundary at which a simulated crash can be injected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultPoint {
    AfterTempWrite,
    AfterRename,
    AfterZero,
    AfterHighWater,
}

impl FaultPoint {
    pub const ALL: [FaultPoint; 4] =
        [FaultPoint::AfterTempWrite, FaultPoint::AfterRename, FaultPoint::AfterZero, FaultPoint::AfterHighWater];

    pub fn name(self) -> &'static str {
        match self {
            FaultPoint::AfterTempWrite => "after-temp-write",
            FaultPoint::AfterRename => "after-rename",
            FaultPoint::AfterZero => "after-zero",
            FaultPoint::AfterHighWater => "after-hwm",
        }
    }

    pub fn from_name(s: &str) -> Option<FaultPoint> {
        FaultPoint::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Parsed state file.
#[derive(Clone, PartialEq, Eq)]
pub struct StateFile {
    pub scheme_id: String,
    pub suite: HashSuite,
    pub kappa_bits: u32,
    pub capacity: u128,
    pub period: u64,
    pub payload: Zeroizing<Vec<u8>>,
}

impl std::fmt::Debug for StateFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateFile")
            .field("scheme_id", &self.scheme_id)
            .field("suite", &self.suite)
            .field("capacity", &self.capacity)
            .field("period", &self.period)
            .field("payload_len", &self.payload.len())
            .finish()
    }
}

impl StateFile {
    pub fn from_signer(signer: &Signer) -> Self {
        let id = signer.scheme();
        StateFile {
            scheme_id: id.name(),
            suite: id.base.suite(),
            kappa_bits: KAPPA_BITS,
            capacity: signer.capacity(),
            period: signer.period() as u64,
            payload: Zeroizing::new(signer.encode_payload()),
        }
    }

    pub fn to_bytes(&self) -> Zeroizing<Vec<u8>> {
        let mut w = Writer::new();
        w.raw(MAGIC);
        w.u8(FORMAT_VERSION);
        w.str8(&self.scheme_id);
        w.u8(self.suite.id());
        w.u32(self.kappa_bits);
        w.raw(&self.capacity.to_le_bytes());
        w.u64(self.period);
        w.bytes(&self.payload);
        let mut out = Zeroizing::new(w.into_bytes());
        let d = Sha256::digest(&out[..]);
        out.extend_from_slice(&d);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::CorruptState("bad magic".into()));
        }
        if bytes.len() < 5 + 32 {
            return Err(Error::CorruptState("truncated".into()));
        }
        let (body, tag) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != tag {
            return Err(Error::CorruptState("integrity digest mismatch".into()));
        }
        let mut r = Reader::new(&body[4..]);
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch(version));
        }
        let corrupt = |e: Error| Error::CorruptState(e.to_string());
        let scheme_id = r.str8().map_err(corrupt)?;
        let suite = HashSuite::from_id(r.u8()?).map_err(corrupt)?;
        let kappa_bits = r.u32()?;
        let capacity = u128::from_le_bytes(r.take(16, "capacity")?.try_into().unwrap());
        let period = r.u64()?;
        let payload = Zeroizing::new(r.bytes(MAX_PAYLOAD)?);
        r.finish()?;
        Ok(StateFile { scheme_id, suite, kappa_bits, capacity, period, payload })
    }

    /// Decodes the payload and checks it against the header.
    pub fn to_signer(&self) -> Result<Signer> {
        let id = SchemeId::parse(&self.scheme_id, true)?;
        let signer = Signer::decode_payload(&self.payload).map_err(|e| Error::CorruptState(e.to_string()))?;
        if signer.scheme() != id
            || signer.period() != self.period as u128
            || signer.capacity() != self.capacity
            || id.base.suite() != self.suite
            || self.kappa_bits != KAPPA_BITS
        {
            return Err(Error::CorruptState("header does not match payload".into()));
        }
        Ok(signer)
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn lock_path(path: &Path) -> PathBuf {
    with_suffix(path, ".lock")
}

pub fn high_water_path(path: &Path) -> PathBuf {
    with_suffix(path, ".hwm")
}

fn temp_path(path: &Path) -> PathBuf {
    with_suffix(path, ".tmp")
}

fn sync_dir(path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    File::open(dir)?.sync_all()?;
    Ok(())
}

fn write_synced(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = OpenOptions::new().write(true).create(true).truncate(true).open(path)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    Ok(())
}

fn check_fault(fault: Option<FaultPoint>, at: FaultPoint) -> Result<()> {
    if fault == Some(at) {
        return Err(Error::InjectedFault(at.name()));
    }
    Ok(())
}

/// Reads the high-water mark, if one was ever written.
pub fn read_high_water(path: &Path) -> Result<Option<u64>> {
    match fs::read(high_water_path(path)) {
        Ok(b) => {
            let v: [u8; 8] = b.try_into().map_err(|_| Error::CorruptState("high-water mark file".into()))?;
            Ok(Some(u64::from_le_bytes(v)))
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Atomically replaces the state at `path`. With `fault` set, stops at
/// that boundary and returns [`Error::InjectedFault`], leaving the files as
/// a crash there would.
pub fn save_with_fault(path: &Path, state: &StateFile, fault: Option<FaultPoint>) -> Result<()> {
    let bytes = state.to_bytes();
    let tmp = temp_path(path);
    write_synced(&tmp, &bytes)?;
    check_fault(fault, FaultPoint::AfterTempWrite)?;

    let old = OpenOptions::new().read(true).write(true).open(path).ok();
    fs::rename(&tmp, path)?;
    sync_dir(path)?;
    check_fault(fault, FaultPoint::AfterRename)?;

    if let Some(mut f) = old {
        let len = f.seek(SeekFrom::End(0))?;
        f.seek(SeekFrom::Start(0))?;
        let zeros = vec![0u8; 64 * 1024];
        let mut left = len;
        while left > 0 {
            let n = left.min(zeros.len() as u64) as usize;
            f.write_all(&zeros[..n])?;
            left -= n as u64;
        }
        f.sync_all()?;
    }
    check_fault(fault, FaultPoint::AfterZero)?;

    let hwm = read_high_water(path)?.unwrap_or(0).max(state.period);
    let hwm_path = high_water_path(path);
    let hwm_tmp = with_suffix(&hwm_path, ".tmp");
    write_synced(&hwm_tmp, &hwm.to_le_bytes())?;
    fs::rename(&hwm_tmp, &hwm_path)?;
    sync_dir(path)?;
    check_fault(fault, FaultPoint::AfterHighWater)?;
    Ok(())
}

pub fn save(path: &Path, state: &StateFile) -> Result<()> {
    save_with_fault(path, state, None)
}

/// Loads and validates the state file, without the rollback check.
pub fn load_file(path: &Path) -> Result<StateFile> {
    let mut f = File::open(path)?;
    let mut bytes = Zeroizing::new(Vec::new());
    f.read_to_end(&mut bytes)?;
    StateFile::from_bytes(&bytes)
}

/// Loads the state and refuses it if the high-water mark is ahead of it.
pub fn load(path: &Path) -> Result<StateFile> {
    let st = load_file(path)?;
    if let Some(h) = read_high_water(path)? {
        if h > st.period {
            return Err(Error::RollbackHazard { high_water: h, period: st.period });
        }
    }
    Ok(st)
}

/// Exclusive advisory lock on `<path>.lock`, released on drop.
#[derive(Debug)]
pub struct StateLock {
    _file: File,
}

impl StateLock {
    pub fn acquire(path: &Path) -> Result<StateLock> {
        let file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(lock_path(path))?;
        // SAFETY: flock on a descriptor we own; no memory is shared.
        let rc = unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX | libc::LOCK_NB) };
        if rc != 0 {
            let err = std::io::Error::last_os_error();
            if err.raw_os_error() == Some(libc::EWOULDBLOCK) {
                return Err(Error::Locked);
            }
            return Err(err.into());
        }
        Ok(StateLock { _file: file })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::Seed;

    fn signer() -> Signer {
        let id = SchemeId::parse("frog-wots-sha256", false).unwrap();
        Signer::keygen(&id, &Seed([1; 16]), 3).unwrap().0
    }

    #[test]
    fn bytes_roundtrip_and_integrity() {
        let s = signer();
        let f = StateFile::from_signer(&s);
        let b = f.to_bytes();
        assert_eq!(StateFile::from_bytes(&b).unwrap(), f);
        let mut bad = b.to_vec();
        bad[40] ^= 1;
        assert!(matches!(StateFile::from_bytes(&bad), Err(Error::CorruptState(_))));
        let mut magic = b.to_vec();
        magic[0] = b'X';
        assert!(matches!(StateFile::from_bytes(&magic), Err(Error::CorruptState(_))));
    }

    #[test]
    fn version_is_checked_before_parsing() {
        let f = StateFile::from_signer(&signer());
        let mut b = f.to_bytes().to_vec();
        b[4] = 9;
        let n = b.len() - 32;
        let d = Sha256::digest(&b[..n]);
        b[n..].copy_from_slice(&d);
        assert!(matches!(StateFile::from_bytes(&b), Err(Error::VersionMismatch(9))));
    }

    #[test]
    fn crash_before_rename_keeps_old_state() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s");
        let mut s = signer();
        save(&p, &StateFile::from_signer(&s)).unwrap();
        s.sign(b"m").unwrap();
        let r = save_with_fault(&p, &StateFile::from_signer(&s), Some(FaultPoint::AfterTempWrite));
        assert!(matches!(r, Err(Error::InjectedFault(_))));
        assert_eq!(load(&p).unwrap().period, 0);
        let r = save_with_fault(&p, &StateFile::from_signer(&s), Some(FaultPoint::AfterRename));
        assert!(r.is_err());
        assert_eq!(load(&p).unwrap().period, 1);
    }

    #[test]
    fn rollback_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s");
        let mut s = signer();
        save(&p, &StateFile::from_signer(&s)).unwrap();
        let old = fs::read(&p).unwrap();
        s.sign(b"m").unwrap();
        save(&p, &StateFile::from_signer(&s)).unwrap();
        fs::write(&p, old).unwrap();
        assert!(matches!(load(&p), Err(Error::RollbackHazard { high_water: 1, period: 0 })));
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s");
        let a = StateLock::acquire(&p).unwrap();
        assert!(matches!(StateLock::acquire(&p), Err(Error::Locked)));
        drop(a);
        StateLock::acquire(&p).unwrap();
    }
}
