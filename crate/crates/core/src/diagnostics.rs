//! Concentration diagnostics and rate fitting.
//!
//! The central quantity is a per-distribution functional that bounds how far
//! the fast moment-based estimate can sit from the sliced distance. It
//! combines the mean squared norm `m2`, the mean absolute deviation of
//! squared norms `A`, and two moments of the inner product between
//! independent copies, `B1 = E|<X, X'>|` and `B2 = sqrt(E<X, X'>^2)`:
//!
//! ```text
//! xi = (A + sqrt(m2 * B1) + m2^(1/5) * B2^(4/5)) / ambient_dim
//! ```
//!
//! Shrinking xi with growing dimension is what makes the fast path trustworthy,
//! so the module also fits log-log decay rates across a dimension sweep.

use ndarray::{ArrayView2, Axis, Slice};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::sample::SampleSet;
use crate::slicer::{enumerate_multi_indices_capped, poly_features, FeatureSet, DEFAULT_INDEX_CAP};

/// How the "independent copy" in the inner-product moments is realized from
/// a single sample set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// A seeded random permutation pairs the first half against the second.
    /// O(N) work, unbiased, but depends on the permutation draw.
    SplitHalves,
    /// Every unordered sample pair contributes once. O(N^2) work,
    /// deterministic given the data.
    AllPairs,
}

/// The functional's ingredients plus the assembled value.
#[derive(Clone, Debug, PartialEq)]
pub struct XiComponents {
    pub m2: f64,
    pub a_term: f64,
    pub b1: f64,
    pub b2: f64,
    pub xi: f64,
    pub ambient_dim: usize,
}

/// Rows of a Gram block scanned per pass; bounds scratch memory at
/// `BLOCK^2` entries regardless of N.
const BLOCK: usize = 256;

fn inner_moments_all_pairs(data: ArrayView2<'_, f64>) -> (f64, f64) {
    let n = data.nrows();
    let mut abs_sum = 0.0f64;
    let mut sq_sum = 0.0f64;
    let mut bi = 0;
    while bi < n {
        let ei = (bi + BLOCK).min(n);
        let rows_i = data.slice_axis(Axis(0), Slice::from(bi..ei));
        let mut bj = bi;
        while bj < n {
            let ej = (bj + BLOCK).min(n);
            let rows_j = data.slice_axis(Axis(0), Slice::from(bj..ej));
            let gram = rows_i.dot(&rows_j.t());
            for i in 0..ei - bi {
                // Strictly upper-triangular in global indices: each
                // unordered pair exactly once.
                let j_start = if bj == bi { i + 1 } else { 0 };
                for j in j_start..ej - bj {
                    let g = gram[[i, j]];
                    abs_sum += g.abs();
                    sq_sum += g * g;
                }
            }
            bj = ej;
        }
        bi = ei;
    }
    let pairs = (n * (n - 1) / 2) as f64;
    (abs_sum / pairs, sq_sum / pairs)
}

fn inner_moments_split_halves(data: ArrayView2<'_, f64>, rng: &RngHandle) -> (f64, f64) {
    let n = data.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng.rng());
    let half = n / 2;
    let mut abs_sum = 0.0f64;
    let mut sq_sum = 0.0f64;
    for i in 0..half {
        let x = data.row(perm[i]);
        let y = data.row(perm[half + i]);
        let g = x.dot(&y);
        abs_sum += g.abs();
        sq_sum += g * g;
    }
    (abs_sum / half as f64, sq_sum / half as f64)
}

fn xi_from_matrix(
    data: ArrayView2<'_, f64>,
    ambient_dim: usize,
    pairing: Pairing,
    rng: &RngHandle,
) -> Result<XiComponents> {
    let n = data.nrows();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let norms: Vec<f64> = data
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>())
        .collect();
    let m2 = norms.iter().sum::<f64>() / n as f64;
    let a_term = norms.iter().map(|v| (v - m2).abs()).sum::<f64>() / n as f64;
    let (e_abs, e_sq) = match pairing {
        Pairing::AllPairs => inner_moments_all_pairs(data),
        Pairing::SplitHalves => inner_moments_split_halves(data, rng),
    };
    let b1 = e_abs;
    let b2 = e_sq.sqrt();
    let d = ambient_dim as f64;
    let xi = (a_term + (m2 * b1).sqrt() + m2.powf(0.2) * b2.powf(0.8)) / d;
    Ok(XiComponents { m2, a_term, b1, b2, xi, ambient_dim })
}

/// Estimates the functional on the raw cloud.
pub fn xi_hat(s: &SampleSet, pairing: Pairing, rng: &RngHandle) -> Result<XiComponents> {
    xi_from_matrix(s.data().view(), s.dim(), pairing, rng)
}

/// Estimates the functional on the monomial lift of total degree `m`; the
/// divisor becomes the feature count.
pub fn xi_poly(s: &SampleSet, m: u32, pairing: Pairing, rng: &RngHandle) -> Result<XiComponents> {
    let set = enumerate_multi_indices_capped(s.dim(), m, DEFAULT_INDEX_CAP)?;
    let f = poly_features(s, &set)?;
    xi_from_matrix(f.data().view(), set.len(), pairing, rng)
}

/// Estimates the functional on an already lifted cloud (its column count is
/// the divisor). Covers the random-stack lift, whose image keeps the
/// ambient dimension.
pub fn xi_features(f: &FeatureSet, pairing: Pairing, rng: &RngHandle) -> Result<XiComponents> {
    xi_from_matrix(f.data().view(), f.dim(), pairing, rng)
}

/// A fitted power law `value ~ dim^slope` over a dimension sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    /// The points actually used by the fit (zero values are dropped).
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln(value)` against `ln(dim)`.
///
/// Dims must be strictly increasing and values finite and non-negative.
/// Zero values are excluded rather than failing the sweep (their logarithm
/// is undefined; callers can warn by comparing point counts); at least three
/// usable points must remain.
pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit> {
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::DegenerateFit(format!(
                "dims must be strictly increasing, got {} after {}",
                w[1].0, w[0].0
            )));
        }
    }
    if let Some((d, v)) = points.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
        return Err(Error::DegenerateFit(format!(
            "value at dim {d} must be finite and non-negative, got {v}"
        )));
    }
    if points.iter().any(|(d, _)| *d == 0) {
        return Err(Error::DegenerateFit("dims must be positive".into()));
    }
    let used: Vec<(usize, f64)> = points.iter().copied().filter(|(_, v)| *v > 0.0).collect();
    if used.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 positive points, got {}",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|(d, _)| (*d as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|(_, v)| v.ln()).collect();
    let k = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sst: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if sst == 0.0 { 1.0 } else { (1.0 - sse / sst).clamp(0.0, 1.0) };
    Ok(RateFit { points: used, slope, intercept, r_squared })
}
