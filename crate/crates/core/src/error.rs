use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("one-time key already used")]
    OneTimeKeyReuse,
    #[error("all periods of this key are spent")]
    Exhausted,
    #[error("period {requested} has already passed (current period {current})")]
    PeriodPassed { requested: u64, current: u64 },
    #[error("chain overrun: start {start} + steps {steps} exceeds w-1 for w={w}")]
    ChainOverrun { start: u32, steps: u32, w: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("mock scheme `{0}` is insecure and requires explicit opt-in")]
    MockNotAllowed(String),
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("state file is corrupt: {0}")]
    CorruptState(String),
    #[error("unsupported state format version {0}")]
    VersionMismatch(u8),
    #[error("rollback hazard: high-water mark {high_water} exceeds state period {period}")]
    RollbackHazard { high_water: u64, period: u64 },
    #[error("state is locked by another process")]
    Locked,
    #[error("injected fault at {0}")]
    InjectedFault(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
