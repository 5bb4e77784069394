//! One dimensional optimal transport.
//!
//! Between empirical measures of equal size on the line the optimal coupling
//! for any convex cost is the sorted matching, so
//! `W_p(a, b) = ((1/K) sum |a_(i) - b_(i)|^p)^(1/p)` over order statistics.
//! That identity is what makes slicing cheap: every projected subproblem
//! costs a sort.

use crate::error::{Error, Result};

/// An empirical measure on the line, stored sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Empirical1D {
    values: Vec<f64>,
}

impl Empirical1D {
    /// Sorts the values (stable, total order on floats). Rejects empty input
    /// and non-finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("support value {v}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// A zero-mean Gaussian on the line, identified by its variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian1D {
    variance: f64,
}

impl Gaussian1D {
    pub fn new(variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variance must be finite and non-negative, got {variance}"
            )));
        }
        Ok(Self { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

pub(crate) fn check_order(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("order p must be finite and at least 1, got {p}")))
    }
}

/// `(1/K) sum |a_i - b_i|^p` over two equally long sorted slices.
pub(crate) fn w_pow_sorted(a: &[f64], b: &[f64], p: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    if p == 1.0 {
        for (x, y) in a.iter().zip(b) {
            acc += (x - y).abs();
        }
    } else if p == 2.0 {
        for (x, y) in a.iter().zip(b) {
            let d = x - y;
            acc += d * d;
        }
    } else {
        for (x, y) in a.iter().zip(b) {
            acc += (x - y).abs().powf(p);
        }
    }
    acc / a.len() as f64
}

/// `W_p(a, b)^p`, the p-th power transport cost. Exposed separately so
/// averaging over many projections can defer the single root to the end.
pub fn wasserstein_1d_pow(a: &Empirical1D, b: &Empirical1D, p: f64) -> Result<f64> {
    check_order(p)?;
    if a.len() != b.len() {
        return Err(Error::UnequalSupport { left: a.len(), right: b.len() });
    }
    Ok(w_pow_sorted(a.values(), b.values(), p))
}

/// p-Wasserstein distance between equal-size empirical measures.
pub fn wasserstein_1d(a: &Empirical1D, b: &Empirical1D, p: f64) -> Result<f64> {
    let pow = wasserstein_1d_pow(a, b, p)?;
    Ok(apply_root(pow, p))
}

pub(crate) fn apply_root(pow: f64, p: f64) -> f64 {
    if p == 1.0 {
        pow
    } else if p == 2.0 {
        pow.sqrt()
    } else {
        pow.powf(1.0 / p)
    }
}

/// 2-Wasserstein distance between two zero-mean Gaussians:
/// `|sqrt(var_a) - sqrt(var_b)|`.
pub fn w2_gaussian_zero_mean(a: &Gaussian1D, b: &Gaussian1D) -> f64 {
    (a.variance.sqrt() - b.variance.sqrt()).abs()
}

/// Splits squared 2-Wasserstein cost into a centered part and a mean part:
/// returns `(W_2^2(a - mean_a, b - mean_b), (mean_a - mean_b)^2)`. The two
/// pieces sum back to `W_2^2(a, b)` exactly in real arithmetic.
pub fn mean_shift_decompose(a: &Empirical1D, b: &Empirical1D) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::UnequalSupport { left: a.len(), right: b.len() });
    }
    let ma = a.mean();
    let mb = b.mean();
    // Subtracting a constant preserves sort order, so the centered slices
    // are still sorted and the sorted matching still applies.
    let ca: Vec<f64> = a.values().iter().map(|v| v - ma).collect();
    let cb: Vec<f64> = b.values().iter().map(|v| v - mb).collect();
    let centered = w_pow_sorted(&ca, &cb, 2.0);
    let gap = (ma - mb) * (ma - mb);
    Ok((centered, gap))
}
