//! Point oracles that count distinct evaluation points.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cell::RefCell;

/// Wraps `f` and records every distinct point it is evaluated at (bitwise identity).
pub struct CountingOracle<F> {
    f: F,
    seen: RefCell<BTreeSet<Vec<u64>>>,
    calls: core::cell::Cell<usize>,
}

impl<F: Fn(&[f64]) -> f64> CountingOracle<F> {
    pub fn new(f: F) -> Self {
        CountingOracle { f, seen: RefCell::new(BTreeSet::new()), calls: core::cell::Cell::new(0) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.calls.set(self.calls.get() + 1);
        self.seen.borrow_mut().insert(x.iter().map(|v| v.to_bits()).collect());
        (self.f)(x)
    }

    /// Number of distinct points evaluated so far.
    pub fn distinct(&self) -> usize {
        self.seen.borrow().len()
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    pub fn reset(&self) {
        self.seen.borrow_mut().clear();
        self.calls.set(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_distinct() {
        let o = CountingOracle::new(|x: &[f64]| x[0]);
        o.eval(&[1.0]);
        o.eval(&[1.0]);
        o.eval(&[2.0]);
        assert_eq!((o.distinct(), o.calls()), (2, 3));
    }
}
