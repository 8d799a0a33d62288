//! Compensated (Neumaier) summation.
//!
//! Cumulative rewards are sums of up to 10^6 terms in `[0, 1]`. Plain
//! left-to-right summation loses roughly `n * eps` relative accuracy; the
//! Neumaier variant of Kahan summation keeps the error at a few ulps
//! independent of `n`.

use std::ops::AddAssign;

/// Running compensated sum.
///
/// Two accumulators that receive the same values in the same order produce
/// bit-identical results, which the simulator relies on: an arm's observed
/// cumulative reward must equal the reward function's prefix sum exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(compensated_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn recovers_cancellation() {
        // naive summation returns 0.0 here
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn million_tenths() {
        // 10^6 copies of 0.1; exact decimal answer is 100000
        let s = compensated_sum(std::iter::repeat_n(0.1, 1_000_000));
        assert!((s - 100_000.0).abs() < 1e-8, "{s}");
        let naive: f64 = std::iter::repeat_n(0.1, 1_000_000).sum();
        assert!((naive - 100_000.0).abs() > 1e-8);
    }
}
