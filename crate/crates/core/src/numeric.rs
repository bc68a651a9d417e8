//! Small numerical helpers shared by the norm and weight computations.

/// Relative slack for assertions on quantities built from O(10^4) floating
/// point operations.
pub const REL_TOL: f64 = 1e-9;

/// Tolerance for short identities (at most a handful of operations).
pub const IDENTITY_TOL: f64 = 1e-12;

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of `f64`.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `x^(p/2)` for `x >= 0`, with exact-ish fast paths for the exponents the
/// suites use most.
#[inline]
pub fn pow_half(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x
    } else if p == 1.0 {
        x.sqrt()
    } else if p == 0.5 {
        x.sqrt().sqrt()
    } else if p == 1.5 {
        let r = x.sqrt();
        r * r.sqrt()
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(0.5 * p)
    }
}

/// `2^(2n)`, exact for `|n| <= 511`.
#[inline]
pub fn four_pow(n: i32) -> f64 {
    2f64.powi(2 * n)
}

/// `lhs <= rhs` up to a relative slack on `rhs`.
#[inline]
pub fn le_rel(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * rhs.abs()
}

/// Median of a non-empty slice (sorted copy, average of the middle pair).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
