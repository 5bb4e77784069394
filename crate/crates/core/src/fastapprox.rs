//! Moment-based closed forms that replace Monte Carlo projection.
//!
//! Projecting onto directions with i.i.d. `N(0, 1/d)` coordinates turns a
//! point cloud into a one-dimensional law whose mean and variance are, up to
//! concentration, `0` and `m2 / d` where `m2` is the cloud's mean squared
//! norm about its mean. Treating both projected laws as Gaussians with those
//! parameters collapses the order-2 sliced transport cost to
//!
//! ```text
//! (sqrt(m2_a) - sqrt(m2_b))^2 / d   +   ||mean_a - mean_b||^2 / d
//! ```
//!
//! The same formula applied in a lifted feature space (monomials, random
//! linear stacks) approximates the generalized variant at the cost of a few
//! streaming passes, with no projection sampling at all.

use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::sample::{summarize_sums, MomentSummary, SampleSet};
use crate::slicer::{
    enumerate_multi_indices_capped, monomial_factors, poly_features, DEFAULT_INDEX_CAP,
};

/// Output of a fast estimate, keeping the two squared components so callers
/// can see how much of the value is mean separation versus spread mismatch.
#[derive(Clone, Debug, PartialEq)]
pub struct FastResult {
    /// Estimated distance (square root of the two terms' sum).
    pub distance: f64,
    /// Squared contribution of the spread gap, already divided by the
    /// ambient dimension.
    pub centered_term: f64,
    /// Squared contribution of the mean gap, already divided by the ambient
    /// dimension.
    pub mean_term: f64,
    /// Dimension used as the divisor: the input dimension for the plain
    /// estimate, the feature count for lifted ones.
    pub ambient_dim_used: usize,
}

/// Shared final step: both lifted paths must funnel through here so equal
/// summaries give bit-equal results.
fn from_summaries(a: &MomentSummary, b: &MomentSummary, ambient: usize) -> FastResult {
    let d = ambient as f64;
    let gap = a.centered_second_moment.sqrt() - b.centered_second_moment.sqrt();
    let centered_term = gap * gap / d;
    let mean_term = a
        .mean
        .iter()
        .zip(b.mean.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / d;
    FastResult {
        distance: (centered_term + mean_term).sqrt(),
        centered_term,
        mean_term,
        ambient_dim_used: ambient,
    }
}

fn check_dims(a: &SampleSet, b: &SampleSet) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.dim())
}

/// Order-2 sliced estimate from first and second moments alone.
///
/// Runs in one pass over each cloud; no directions are drawn.
pub fn hat_sw2(a: &SampleSet, b: &SampleSet) -> Result<FastResult> {
    let dim = check_dims(a, b)?;
    Ok(from_summaries(&a.moment_summary(), &b.moment_summary(), dim))
}

/// Number of bytes of feature matrix the materialized polynomial path may
/// allocate before switching to the streaming path.
pub const DEFAULT_MATERIALIZE_BUDGET: usize = 30_000_000;

/// Polynomial-lift estimate of the order-2 generalized sliced distance.
///
/// Lifts both clouds to all monomials of total degree at most `degree`
/// (an odd positive integer) and applies the moment formula in that space.
/// Chooses between materializing the feature matrix and streaming it
/// row by row based on `DEFAULT_MATERIALIZE_BUDGET`.
pub fn hat_poly_gsw2(a: &SampleSet, b: &SampleSet, degree: u32) -> Result<FastResult> {
    hat_poly_gsw2_with_budget(a, b, degree, DEFAULT_MATERIALIZE_BUDGET)
}

pub fn hat_poly_gsw2_with_budget(
    a: &SampleSet,
    b: &SampleSet,
    degree: u32,
    budget: usize,
) -> Result<FastResult> {
    let dim = check_dims(a, b)?;
    let set = enumerate_multi_indices_capped(dim, degree, DEFAULT_INDEX_CAP)?;
    let q = set.len();
    let rows = a.n_samples() + b.n_samples();
    let bytes = q
        .checked_mul(rows)
        .and_then(|c| c.checked_mul(std::mem::size_of::<f64>()));
    match bytes {
        Some(bytes) if bytes <= budget => {
            let fa = poly_features(a, &set)?;
            let fb = poly_features(b, &set)?;
            Ok(from_summaries(&fa.moment_summary(), &fb.moment_summary(), q))
        }
        _ => {
            let factors = monomial_factors(&set);
            let sa = streaming_poly_summary(a.data().view(), &factors);
            let sb = streaming_poly_summary(b.data().view(), &factors);
            Ok(from_summaries(&sa, &sb, q))
        }
    }
}

/// Moment summary of the monomial lift without materializing it.
///
/// Accumulates per-feature sums and the running squared norm in the same
/// order as `matrix_moments` walking a materialized feature matrix, so the
/// two paths agree to the last bit.
fn streaming_poly_summary(
    data: ArrayView2<'_, f64>,
    factors: &[Vec<(usize, u32)>],
) -> MomentSummary {
    let n = data.nrows();
    let q = factors.len();
    let mut col_sums = vec![0.0f64; q];
    let mut raw_sum = 0.0f64;
    for row in data.rows() {
        let r = row.as_slice().expect("sample rows are contiguous");
        let mut norm_sq = 0.0f64;
        for (i, f) in factors.iter().enumerate() {
            let v = crate::slicer::eval_monomial(r, f);
            norm_sq += v * v;
            col_sums[i] += v;
        }
        raw_sum += norm_sq;
    }
    summarize_sums(&col_sums, raw_sum, n)
}

/// Random-stack estimate of the order-2 generalized sliced distance.
///
/// A stack of random square `N(0, 1/d)` layers preserves the expected
/// squared norm of a cloud and maps its mean to a zero-mean random vector,
/// so averaged over stacks the lifted clouds look centered with second
/// moments equal to the raw (uncentered) input ones. The estimate therefore
/// needs no stack and no randomness: it compares raw mean squared norms,
/// and its mean term is identically zero. The value does not depend on
/// `n_layers`; the count is only validated, because at zero layers the map
/// is the identity and the mean-blind formula would silently drop a real
/// mean gap (use [`hat_sw2`] there instead).
pub fn hat_neural_gsw2(a: &SampleSet, b: &SampleSet, n_layers: u32) -> Result<FastResult> {
    if n_layers == 0 {
        return Err(Error::LayerCount);
    }
    let dim = check_dims(a, b)?;
    let d = dim as f64;
    let gap = a.moment_summary().second_moment.sqrt() - b.moment_summary().second_moment.sqrt();
    let centered_term = gap * gap / d;
    let mean_term = 0.0;
    Ok(FastResult {
        distance: (centered_term + mean_term).sqrt(),
        centered_term,
        mean_term,
        ambient_dim_used: dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_gaussian, MeanSpec};
    use crate::rng::RngHandle;
    use approx::assert_relative_eq;

    fn set(rows: &[Vec<f64>]) -> SampleSet {
        SampleSet::from_rows(rows).unwrap()
    }

    #[test]
    fn point_masses_reduce_to_scaled_mean_gap() {
        // Point masses have zero spread, so only the mean term remains:
        // ||a - b||^2 / d = 4 / 4 = 1.
        let a = set(&[vec![0.0, 0.0, 0.0, 0.0]]);
        let b = set(&[vec![2.0, 0.0, 0.0, 0.0]]);
        let r = hat_sw2(&a, &b).unwrap();
        assert_relative_eq!(r.centered_term, 0.0);
        assert_relative_eq!(r.mean_term, 1.0);
        assert_relative_eq!(r.distance, 1.0);
        assert_eq!(r.ambient_dim_used, 4);
    }

    #[test]
    fn gaussian_pair_matches_closed_form() {
        // N(0, I) versus N(1, 2I) in dimension 100: spread gap
        // (1 - sqrt(2))^2 plus mean gap 1, root approx 1.0824.
        let d = 100;
        let h = RngHandle::new(42);
        let a = gen_gaussian(4000, d, &MeanSpec::Scalar(0.0), 1.0, &h.derive("a", 0)).unwrap();
        let b = gen_gaussian(4000, d, &MeanSpec::Scalar(1.0), 2.0, &h.derive("b", 0)).unwrap();
        let r = hat_sw2(&a, &b).unwrap();
        let expect = ((1.0 - 2.0f64.sqrt()).powi(2) + 1.0).sqrt();
        assert_relative_eq!(r.distance, expect, max_relative = 0.05);
    }

    #[test]
    fn degree_one_lift_is_bitwise_identical_to_plain() {
        // Degree-1 monomials are the coordinates themselves, so the lifted
        // path must reproduce hat_sw2 exactly, not approximately.
        let h = RngHandle::new(7);
        for trial in 0..100 {
            let ha = h.derive("a", trial);
            let hb = h.derive("b", trial);
            let a = gen_gaussian(23, 6, &MeanSpec::Scalar(0.3), 1.3, &ha).unwrap();
            let b = gen_gaussian(31, 6, &MeanSpec::Scalar(-0.2), 0.7, &hb).unwrap();
            let plain = hat_sw2(&a, &b).unwrap();
            let lifted = hat_poly_gsw2(&a, &b, 1).unwrap();
            assert_eq!(plain.distance.to_bits(), lifted.distance.to_bits(), "trial {trial}");
            assert_eq!(plain.centered_term.to_bits(), lifted.centered_term.to_bits());
            assert_eq!(plain.mean_term.to_bits(), lifted.mean_term.to_bits());
        }
    }

    #[test]
    fn streaming_and_materialized_lifts_agree_bitwise() {
        let h = RngHandle::new(11);
        let a = gen_gaussian(40, 5, &MeanSpec::Scalar(0.0), 1.0, &h.derive("a", 0)).unwrap();
        let b = gen_gaussian(40, 5, &MeanSpec::Scalar(0.5), 1.5, &h.derive("b", 0)).unwrap();
        let big = hat_poly_gsw2_with_budget(&a, &b, 3, usize::MAX).unwrap();
        let tiny = hat_poly_gsw2_with_budget(&a, &b, 3, 0).unwrap();
        assert_eq!(big.distance.to_bits(), tiny.distance.to_bits());
        assert_eq!(big.centered_term.to_bits(), tiny.centered_term.to_bits());
        assert_eq!(big.mean_term.to_bits(), tiny.mean_term.to_bits());
        assert_eq!(big.ambient_dim_used, tiny.ambient_dim_used);
    }

    #[test]
    fn poly_rejects_even_degree_and_mismatched_dims() {
        let a = set(&[vec![1.0, 2.0]]);
        let b = set(&[vec![0.0, 1.0]]);
        assert!(hat_poly_gsw2(&a, &b, 2).is_err());
        let c = set(&[vec![0.0, 1.0, 2.0]]);
        assert!(matches!(hat_poly_gsw2(&a, &c, 1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn neural_known_norms() {
        // ||x||^2 = 1 everywhere versus ||y||^2 = 4 everywhere in d = 4
        // gives (1 - 2)^2 / 4 = 0.25, distance 0.5, with no mean term even
        // though the means differ.
        let a = set(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, -1.0, 0.0, 0.0]]);
        let b = set(&[vec![2.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 2.0, 0.0]]);
        let r = hat_neural_gsw2(&a, &b, 1).unwrap();
        assert_relative_eq!(r.centered_term, 0.25);
        assert_relative_eq!(r.mean_term, 0.0);
        assert_relative_eq!(r.distance, 0.5);
    }

    #[test]
    fn neural_zero_mean_gaussians_match_closed_form() {
        // N(0, I) versus N(0, 2I): raw second moments d and 2d, so the
        // distance concentrates at sqrt(2) - 1 whatever the dimension.
        let h = RngHandle::new(19);
        let a = gen_gaussian(4000, 100, &MeanSpec::Scalar(0.0), 1.0, &h.derive("a", 0)).unwrap();
        let b = gen_gaussian(4000, 100, &MeanSpec::Scalar(0.0), 2.0, &h.derive("b", 0)).unwrap();
        let r = hat_neural_gsw2(&a, &b, 2).unwrap();
        assert_relative_eq!(r.distance, 2.0f64.sqrt() - 1.0, max_relative = 0.05);
    }

    #[test]
    fn neural_rejects_zero_layers() {
        let a = set(&[vec![1.0, 0.0]]);
        let b = set(&[vec![0.0, 1.0]]);
        assert!(matches!(hat_neural_gsw2(&a, &b, 0), Err(Error::LayerCount)));
    }

    #[test]
    fn neural_value_ignores_layer_count() {
        let h = RngHandle::new(3);
        let a = gen_gaussian(60, 8, &MeanSpec::Scalar(0.0), 1.0, &h.derive("a", 0)).unwrap();
        let b = gen_gaussian(60, 8, &MeanSpec::Scalar(0.4), 1.8, &h.derive("b", 0)).unwrap();
        let r1 = hat_neural_gsw2(&a, &b, 1).unwrap();
        for depth in [2u32, 5, 40] {
            let r = hat_neural_gsw2(&a, &b, depth).unwrap();
            assert_eq!(r1.distance.to_bits(), r.distance.to_bits(), "depth {depth}");
        }
    }

    #[test]
    fn all_three_estimates_are_symmetric_and_zero_on_equal_inputs() {
        let h = RngHandle::new(23);
        let a = gen_gaussian(45, 4, &MeanSpec::Scalar(0.1), 1.2, &h.derive("a", 0)).unwrap();
        let b = gen_gaussian(45, 4, &MeanSpec::Scalar(-0.3), 0.8, &h.derive("b", 0)).unwrap();
        let runs: [(&dyn Fn(&SampleSet, &SampleSet) -> FastResult, &str); 3] = [
            (&|x, y| hat_sw2(x, y).unwrap(), "plain"),
            (&|x, y| hat_poly_gsw2(x, y, 3).unwrap(), "poly"),
            (&|x, y| hat_neural_gsw2(x, y, 1).unwrap(), "neural"),
        ];
        for (f, name) in runs {
            let ab = f(&a, &b);
            let ba = f(&b, &a);
            assert_eq!(ab.distance.to_bits(), ba.distance.to_bits(), "{name}");
            let aa = f(&a, &a);
            assert_eq!(aa.distance, 0.0, "{name}");
            assert!(
                (ab.distance * ab.distance - (ab.centered_term + ab.mean_term)).abs()
                    <= 1e-12 * (ab.centered_term + ab.mean_term).max(1e-300),
                "{name}: squared distance must equal the term sum"
            );
        }
    }
}
