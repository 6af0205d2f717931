//! Exact operation tallies for the cost model.
//!
//! Counters are thread-local so that measurement loops on one thread are not
//! disturbed by concurrent verification elsewhere. Every base keygen, base
//! sign, base verify and composition-level hash increments its tally.

use std::cell::Cell;
use std::ops::Sub;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostCounters {
    pub base_keygen: u64,
    pub base_sign: u64,
    pub base_verify: u64,
    pub hash: u64,
}

impl Sub for CostCounters {
    type Output = CostCounters;

    fn sub(self, rhs: CostCounters) -> CostCounters {
        CostCounters {
            base_keygen: self.base_keygen - rhs.base_keygen,
            base_sign: self.base_sign - rhs.base_sign,
            base_verify: self.base_verify - rhs.base_verify,
            hash: self.hash - rhs.hash,
        }
    }
}

thread_local! {
    static TALLY: Cell<CostCounters> = const { Cell::new(CostCounters {
        base_keygen: 0,
        base_sign: 0,
        base_verify: 0,
        hash: 0,
    }) };
}

fn bump(f: impl FnOnce(&mut CostCounters)) {
    TALLY.with(|t| {
        let mut c = t.get();
        f(&mut c);
        t.set(c);
    });
}

pub(crate) fn count_keygen() {
    bump(|c| c.base_keygen += 1);
}

pub(crate) fn count_sign() {
    bump(|c| c.base_sign += 1);
}

pub(crate) fn count_verify() {
    bump(|c| c.base_verify += 1);
}

pub(crate) fn count_hash() {
    bump(|c| c.hash += 1);
}

/// Current totals on this thread.
pub fn snapshot() -> CostCounters {
    TALLY.with(|t| t.get())
}

pub fn reset() {
    TALLY.with(|t| t.set(CostCounters::default()));
}

/// Runs `f` and returns its result with the operations it performed.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, CostCounters) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_isolates_scope() {
        count_keygen();
        let ((), c) = measure(|| {
            count_sign();
            count_hash();
            count_hash();
        });
        assert_eq!(c, CostCounters { base_keygen: 0, base_sign: 1, base_verify: 0, hash: 2 });
    }
}
