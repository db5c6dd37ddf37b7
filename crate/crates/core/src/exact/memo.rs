//! Process-wide memo tables for factorials and Catalan numbers.
//!
//! Both tables only ever grow. Reads take a shared lock; growth takes the
//! write lock once and fills every missing entry.

use std::sync::{OnceLock, PoisonError, RwLock, RwLockReadGuard};

use num_bigint::BigUint;
use num_traits::One;

#[derive(Default)]
struct Memo {
    factorials: Vec<BigUint>,
    catalans: Vec<BigUint>,
}

impl Memo {
    fn grow_factorials(&mut self, upto: usize) {
        if self.factorials.is_empty() {
            self.factorials.push(BigUint::one());
        }
        while self.factorials.len() <= upto {
            let i = self.factorials.len();
            let next = &self.factorials[i - 1] * BigUint::from(i);
            self.factorials.push(next);
        }
    }

    fn grow_catalans(&mut self, upto: usize) {
        if self.catalans.is_empty() {
            self.catalans.push(BigUint::one());
        }
        // C_{m+1} = C_m * 2(2m+1) / (m+2), exact at every step.
        while self.catalans.len() <= upto {
            let m = self.catalans.len() - 1;
            let next = &self.catalans[m] * BigUint::from(2 * (2 * m + 1)) / BigUint::from(m + 2);
            self.catalans.push(next);
        }
    }
}

fn memo() -> &'static RwLock<Memo> {
    static MEMO: OnceLock<RwLock<Memo>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(Memo::default()))
}

fn read() -> RwLockReadGuard<'static, Memo> {
    memo().read().unwrap_or_else(PoisonError::into_inner)
}

/// Runs `f` over a factorial table holding at least `0!..=upto!`.
pub(crate) fn with_factorials<R>(upto: usize, f: impl FnOnce(&[BigUint]) -> R) -> R {
    {
        let guard = read();
        if guard.factorials.len() > upto {
            return f(&guard.factorials);
        }
    }
    memo()
        .write()
        .unwrap_or_else(PoisonError::into_inner)
        .grow_factorials(upto);
    f(&read().factorials)
}

/// Runs `f` over a Catalan table holding at least `C_0..=C_upto`.
pub(crate) fn with_catalans<R>(upto: usize, f: impl FnOnce(&[BigUint]) -> R) -> R {
    {
        let guard = read();
        if guard.catalans.len() > upto {
            return f(&guard.catalans);
        }
    }
    memo()
        .write()
        .unwrap_or_else(PoisonError::into_inner)
        .grow_catalans(upto);
    f(&read().catalans)
}
