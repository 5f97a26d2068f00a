//! Compensated accumulation built on the TwoSum error-free transformation.

use crate::real::Real;

/// `a + b = s + e` exactly, with `s = fl(a + b)`.
#[inline]
pub fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Running sum that carries the rounding error of every addition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let (s, e) = two_sum(self.sum, value);
        self.sum = s;
        self.compensation = self.compensation + e;
    }

    /// Folds another accumulator in, keeping its carried error.
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.compensation = self.compensation + other.compensation;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}
