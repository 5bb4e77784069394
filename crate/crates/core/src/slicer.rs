//! Projection machinery: random directions, monomial lifts, random linear
//! stacks and the circular offset map.
//!
//! Directions are drawn from an isotropic Gaussian with covariance
//! `(1/d) I_d`, whose norm concentrates at one, rather than from the unit
//! sphere; the two choices give the same sliced distances up to the
//! direction-average normalization and the Gaussian makes the moment
//! calculus exact. Nonlinear slicing maps a point cloud into a feature
//! space first (monomials of a fixed odd degree, or a product of random
//! square matrices) and then slices linearly there.

use ndarray::{Array1, Array2, ArrayView2};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::sample::{matrix_moments, MomentSummary, SampleSet};
use crate::transport1d::Empirical1D;

/// Ceiling on how many monomials may be enumerated; guards against
/// accidentally requesting a basis that cannot fit in memory.
pub const DEFAULT_INDEX_CAP: u64 = 10_000_000;

/// A projection direction in some ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    coords: Array1<f64>,
}

impl Direction {
    pub fn new(coords: Array1<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("direction must have dimension at least 1".into()));
        }
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("direction coordinate {v}")));
        }
        Ok(Self { coords })
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &Array1<f64> {
        &self.coords
    }
}

/// Draws a direction with i.i.d. `N(0, 1/ambient_dim)` coordinates.
pub fn sample_direction(ambient_dim: usize, handle: &RngHandle) -> Result<Direction> {
    if ambient_dim == 0 {
        return Err(Error::InvalidParameter("ambient dimension must be at least 1".into()));
    }
    let scale = 1.0 / (ambient_dim as f64).sqrt();
    let mut rng = handle.rng();
    let coords = Array1::from_iter((0..ambient_dim).map(|_| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z * scale
    }));
    Ok(Direction { coords })
}

/// All multi-indices of a fixed total degree over a fixed dimension, in
/// graded lexicographic order, descending: `(m,0,...,0)` first,
/// `(0,...,0,m)` last.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexSet {
    dim: usize,
    degree: u32,
    indices: Vec<Vec<u32>>,
}

impl MultiIndexSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of monomials, `C(degree + dim - 1, dim - 1)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }
}

/// `C(degree + dim - 1, dim - 1)` with overflow reported as `None`.
pub fn multi_index_count(dim: usize, degree: u32) -> Option<u64> {
    if dim == 0 {
        return None;
    }
    let n = degree as u128 + dim as u128 - 1;
    let r = (degree as u128).min(dim as u128 - 1);
    let mut acc: u128 = 1;
    for k in 1..=r {
        acc = acc.checked_mul(n - r + k)?;
        acc /= k; // exact: the running product of j consecutive integers is divisible by j!
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

pub fn enumerate_multi_indices(dim: usize, degree: u32) -> Result<MultiIndexSet> {
    enumerate_multi_indices_capped(dim, degree, DEFAULT_INDEX_CAP)
}

/// Enumerates in descending lexicographic order by repeatedly moving one
/// unit of degree rightward.
pub fn enumerate_multi_indices_capped(dim: usize, degree: u32, cap: u64) -> Result<MultiIndexSet> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if degree == 0 || degree % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "total degree must be odd and at least 1, got {degree}"
        )));
    }
    let count = multi_index_count(dim, degree).unwrap_or(u64::MAX);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut indices = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; dim];
    cur[0] = degree;
    loop {
        indices.push(cur.clone());
        // Rightmost position before the last that still carries degree.
        let Some(i) = (0..dim.saturating_sub(1)).rev().find(|&i| cur[i] > 0) else {
            break;
        };
        let tail: u32 = cur[i + 1..].iter().sum();
        cur[i] -= 1;
        for v in &mut cur[i + 1..] {
            *v = 0;
        }
        cur[i + 1] = tail + 1;
    }
    debug_assert_eq!(indices.len() as u64, count);
    Ok(MultiIndexSet { dim, degree, indices })
}

/// Sparse form of one monomial: the `(coordinate, exponent)` pairs with
/// nonzero exponent.
pub(crate) fn monomial_factors(set: &MultiIndexSet) -> Vec<Vec<(usize, u32)>> {
    set.indices
        .iter()
        .map(|alpha| {
            alpha
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(k, &e)| (k, e))
                .collect()
        })
        .collect()
}

/// Evaluates one monomial at a point. An exponent of one multiplies the raw
/// coordinate, so a degree-1 basis reproduces the input exactly, bit for bit.
pub(crate) fn eval_monomial(x: &[f64], factors: &[(usize, u32)]) -> f64 {
    let mut acc = 1.0f64;
    for &(k, e) in factors {
        acc *= if e == 1 { x[k] } else { x[k].powi(e as i32) };
    }
    acc
}

/// What a feature matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    /// Monomial lift of the stated total degree.
    Monomial { degree: u32 },
    /// Image under a stack of random square matrices.
    Neural { layers: u32 },
}

/// A lifted point cloud: one row per original sample, one column per
/// feature. Row `j` is the feature map applied to sample `j`.
#[derive(Clone, Debug)]
pub struct FeatureSet {
    data: Array2<f64>,
    kind: FeatureKind,
}

impl FeatureSet {
    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    /// Feature-space dimension.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn moment_summary(&self) -> MomentSummary {
        matrix_moments(self.data.view())
    }
}

/// Evaluates every monomial in `set` at every sample.
pub fn poly_features(s: &SampleSet, set: &MultiIndexSet) -> Result<FeatureSet> {
    if s.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: s.dim() });
    }
    let n = s.n_samples();
    let q = set.len();
    let factors = monomial_factors(set);
    let mut data = Array2::zeros((n, q));
    for (j, row) in s.data().rows().into_iter().enumerate() {
        let x = row.as_slice().expect("sample rows are contiguous");
        for (i, f) in factors.iter().enumerate() {
            data[[j, i]] = eval_monomial(x, f);
        }
    }
    Ok(FeatureSet { data, kind: FeatureKind::Monomial { degree: set.degree() } })
}

/// An ordered stack of square matrices applied innermost-last:
/// `x -> M_1 (M_2 (... (M_n x)))`.
#[derive(Clone, Debug)]
pub struct NeuralStack {
    dim: usize,
    matrices: Vec<Array2<f64>>,
    provenance: Option<RngHandle>,
}

impl NeuralStack {
    /// Builds from explicit matrices (all square, equal size, finite).
    /// Mainly for tests that want to inject identity layers.
    pub fn from_matrices(matrices: Vec<Array2<f64>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidParameter("a stack built from matrices needs at least one matrix; use build_neural_stack for the empty stack".into()));
        };
        let dim = first.nrows();
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.nrows().max(m.ncols()) });
            }
            if let Some(v) = m.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("stack entry {v}")));
            }
        }
        Ok(Self { dim, matrices, provenance: None })
    }

    /// A stack of `layers` identity matrices: exercises the plumbing with a
    /// map that changes nothing. Zero layers gives the empty stack.
    pub fn identity(dim: usize, layers: u32) -> Self {
        let matrices = (0..layers).map(|_| Array2::eye(dim)).collect();
        Self { dim, matrices, provenance: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[Array2<f64>] {
        &self.matrices
    }

    /// Handle the stack was sampled from, if it was sampled rather than
    /// injected.
    pub fn provenance(&self) -> Option<RngHandle> {
        self.provenance
    }
}

/// Samples `layers` square matrices with i.i.d. `N(0, 1/dim)` entries.
/// Zero layers is a valid empty stack (the identity map).
pub fn build_neural_stack(dim: usize, layers: u32, handle: &RngHandle) -> Result<NeuralStack> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let mut rng = handle.rng();
    let mut matrices = Vec::with_capacity(layers as usize);
    for _ in 0..layers {
        let mut flat = Vec::with_capacity(dim * dim);
        for _ in 0..dim * dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            flat.push(z * scale);
        }
        matrices.push(Array2::from_shape_vec((dim, dim), flat).expect("shape matches the fill"));
    }
    Ok(NeuralStack { dim, matrices, provenance: Some(*handle) })
}

/// Pushes every sample through the stack. With rows as points this is
/// `X <- X M_n^T ... M_1^T`, so the innermost matrix is applied first.
/// An empty stack copies the input.
pub fn apply_neural_stack(stack: &NeuralStack, s: &SampleSet) -> Result<FeatureSet> {
    if s.dim() != stack.dim {
        return Err(Error::DimensionMismatch { expected: stack.dim, got: s.dim() });
    }
    let mut data = s.data().clone();
    for m in stack.matrices.iter().rev() {
        data = data.dot(&m.t());
    }
    Ok(FeatureSet { data, kind: FeatureKind::Neural { layers: stack.layers() as u32 } })
}

/// Anything that exposes its points as a row matrix can be projected.
pub trait AsPoints {
    fn points(&self) -> ArrayView2<'_, f64>;
}

impl AsPoints for SampleSet {
    fn points(&self) -> ArrayView2<'_, f64> {
        self.data().view()
    }
}

impl AsPoints for FeatureSet {
    fn points(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }
}

/// Inner products of every row with the direction, in row order, unsorted.
pub fn project_values<M: AsPoints>(points: &M, theta: &Direction) -> Result<Vec<f64>> {
    let data = points.points();
    if data.ncols() != theta.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: theta.ambient_dim(), got: data.ncols() });
    }
    Ok(data.dot(theta.coords()).to_vec())
}

/// Projects onto a direction and packages the result as a sorted empirical
/// measure on the line.
pub fn project<M: AsPoints>(points: &M, theta: &Direction) -> Result<Empirical1D> {
    Empirical1D::new(project_values(points, theta)?)
}

/// Circular slicing: each sample maps to its distance from the point
/// `radius * theta`.
pub fn project_circular(s: &SampleSet, theta: &Direction, radius: f64) -> Result<Empirical1D> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "circular radius must be finite and positive, got {radius}"
        )));
    }
    if s.dim() != theta.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: theta.ambient_dim(), got: s.dim() });
    }
    let th = theta.coords();
    let vals: Vec<f64> = s
        .data()
        .rows()
        .into_iter()
        .map(|row| {
            let mut acc = 0.0;
            for (v, w) in row.iter().zip(th.iter()) {
                let delta = v - radius * w;
                acc += delta * delta;
            }
            acc.sqrt()
        })
        .collect();
    Empirical1D::new(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn direction_norm_concentrates_at_one() {
        // 1000 draws in dimension 10^4: each |theta|^2 is within a percent or
        // two of 1, and the average much closer.
        let root = RngHandle::new(42);
        let mut total = 0.0;
        for i in 0..1000u64 {
            let d = sample_direction(10_000, &root.derive("dir", i)).unwrap();
            total += d.coords().iter().map(|v| v * v).sum::<f64>();
        }
        let avg = total / 1000.0;
        assert!((avg - 1.0).abs() < 0.01, "average squared norm {avg}");
    }

    #[test]
    fn direction_sampling_is_deterministic() {
        let h = RngHandle::new(3).derive("proj", 5);
        let a = sample_direction(32, &h).unwrap();
        let b = sample_direction(32, &h).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn multi_index_counts_match_binomial() {
        // d=5, m=3: C(7, 4) = 35.
        assert_eq!(multi_index_count(5, 3), Some(35));
        assert_eq!(multi_index_count(1, 7), Some(1));
        assert_eq!(multi_index_count(2, 3), Some(4));
        assert_eq!(multi_index_count(1024, 1), Some(1024));
        let set = enumerate_multi_indices(5, 3).unwrap();
        assert_eq!(set.len(), 35);
    }

    #[test]
    fn enumeration_order_is_lexicographic_descending() {
        let set = enumerate_multi_indices(2, 3).unwrap();
        let expect: Vec<Vec<u32>> = vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]];
        assert_eq!(set.indices(), expect.as_slice());

        let set3 = enumerate_multi_indices(3, 3).unwrap();
        assert_eq!(set3.indices()[0], vec![3, 0, 0]);
        assert_eq!(set3.indices()[set3.len() - 1], vec![0, 0, 3]);
        // Strictly descending in lexicographic order.
        for w in set3.indices().windows(2) {
            assert!(w[0] > w[1], "{:?} !> {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn enumeration_is_complete_for_small_cases() {
        // Compare against a dumb nested generator.
        for dim in 1..=5usize {
            for degree in [1u32, 3, 5] {
                let set = enumerate_multi_indices(dim, degree).unwrap();
                let mut brute: Vec<Vec<u32>> = Vec::new();
                let mut cur = vec![0u32; dim];
                fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
                    if k + 1 == cur.len() {
                        cur[k] = left;
                        out.push(cur.clone());
                        return;
                    }
                    for v in (0..=left).rev() {
                        cur[k] = v;
                        rec(k + 1, left - v, cur, out);
                    }
                }
                rec(0, degree, &mut cur, &mut brute);
                assert_eq!(set.indices(), brute.as_slice(), "d={dim} m={degree}");
                assert_eq!(set.len() as u64, multi_index_count(dim, degree).unwrap());
            }
        }
    }

    #[test]
    fn degree_one_cap_and_validation() {
        assert!(matches!(
            enumerate_multi_indices_capped(100, 3, 10),
            Err(Error::CapExceeded { .. })
        ));
        assert!(enumerate_multi_indices(3, 2).is_err());
        assert!(enumerate_multi_indices(3, 0).is_err());
    }

    #[test]
    fn poly_features_two_dim_cubic() {
        // x = (2, 3) under degree 3: monomials x1^3, x1^2 x2, x1 x2^2, x2^3.
        let s = SampleSet::from_rows(&[vec![2.0, 3.0]]).unwrap();
        let set = enumerate_multi_indices(2, 3).unwrap();
        let f = poly_features(&s, &set).unwrap();
        assert_eq!(f.dim(), 4);
        assert_eq!(f.data().row(0).to_vec(), vec![8.0, 12.0, 18.0, 27.0]);
    }

    #[test]
    fn degree_one_features_reproduce_input_bitwise() {
        let s = SampleSet::from_rows(&[
            vec![0.1, -2.7, 3.3],
            vec![1e-12, 5.0, -0.0],
        ])
        .unwrap();
        let set = enumerate_multi_indices(3, 1).unwrap();
        let f = poly_features(&s, &set).unwrap();
        assert_eq!(f.dim(), 3);
        for (a, b) in s.data().iter().zip(f.data().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn neural_stack_entry_statistics() {
        // d=50, two layers: mean of squared entries approximates 1/d.
        let stack = build_neural_stack(50, 2, &RngHandle::new(11)).unwrap();
        assert_eq!(stack.layers(), 2);
        for m in stack.matrices() {
            let ms: f64 = m.iter().map(|v| v * v).sum::<f64>() / (50.0 * 50.0);
            assert!((ms - 0.02).abs() < 0.002, "mean square {ms}");
        }
    }

    #[test]
    fn identity_stack_is_identity() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        let eye = Array2::from_diag(&array![1.0, 1.0]);
        let stack = NeuralStack::from_matrices(vec![eye.clone(), eye]).unwrap();
        let f = apply_neural_stack(&stack, &s).unwrap();
        assert_eq!(f.data(), s.data());
    }

    #[test]
    fn empty_stack_copies_input() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let stack = build_neural_stack(3, 0, &RngHandle::new(1)).unwrap();
        let f = apply_neural_stack(&stack, &s).unwrap();
        assert_eq!(f.data(), s.data());
        assert_eq!(f.kind(), FeatureKind::Neural { layers: 0 });
    }

    #[test]
    fn stack_application_order_is_outermost_first() {
        // M1 = [[0,1],[1,0]] (swap), M2 = [[2,0],[0,3]] (scale).
        // M1(M2(x)) swaps after scaling: (x1, x2) -> (3 x2, 2 x1).
        let swap = array![[0.0, 1.0], [1.0, 0.0]];
        let scale = array![[2.0, 0.0], [0.0, 3.0]];
        let stack = NeuralStack::from_matrices(vec![swap, scale]).unwrap();
        let s = SampleSet::from_rows(&[vec![1.0, 10.0]]).unwrap();
        let f = apply_neural_stack(&stack, &s).unwrap();
        assert_eq!(f.data().row(0).to_vec(), vec![30.0, 2.0]);
    }

    #[test]
    fn stack_roughly_preserves_mean_squared_norm() {
        // E|M X|^2 = E|X|^2 over the stack draw; check with 20 redraws.
        let root = RngHandle::new(5);
        let s = crate::datagen::gen_gaussian(
            2000,
            50,
            &crate::datagen::MeanSpec::Scalar(0.0),
            1.0,
            &root.derive("data", 0),
        )
        .unwrap();
        let base = s.moment_summary().second_moment;
        let mut total = 0.0;
        for i in 0..20u64 {
            let stack = build_neural_stack(50, 2, &root.derive("stack", i)).unwrap();
            let f = apply_neural_stack(&stack, &s).unwrap();
            total += f.moment_summary().second_moment;
        }
        let avg = total / 20.0;
        assert!(
            (avg - base).abs() / base < 0.15,
            "avg transformed second moment {avg}, input {base}"
        );
    }

    #[test]
    fn projection_matches_hand_computation() {
        let s = SampleSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let theta = Direction::new(array![3.0, -1.0]).unwrap();
        let e = project(&s, &theta).unwrap();
        // Inner products 3, -1, 2 sorted.
        assert_eq!(e.values(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn projection_dimension_mismatch() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let theta = Direction::new(array![1.0, 0.0]).unwrap();
        assert!(matches!(project(&s, &theta), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn circular_projection_hand_values() {
        // Points 0 and 2e1 in d=4 against theta = e1, t = 1: distances 1 and 1.
        let s = SampleSet::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let theta = Direction::new(array![1.0, 0.0, 0.0, 0.0]).unwrap();
        let e = project_circular(&s, &theta, 1.0).unwrap();
        assert_eq!(e.values(), &[1.0, 1.0]);
        assert!(project_circular(&s, &theta, 0.0).is_err());
        assert!(project_circular(&s, &theta, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn projection_is_linear_in_the_points(
            rows in proptest::collection::vec(
                proptest::collection::vec(-10.0f64..10.0, 3),
                1..8,
            ),
            seed in 0u64..1000,
        ) {
            // project(a) + project(b) == project(a + b) element-wise, before
            // sorting.
            let a = SampleSet::from_rows(&rows).unwrap();
            let sum_rows: Vec<Vec<f64>> =
                rows.iter().map(|r| r.iter().map(|v| v * 2.0).collect()).collect();
            let b = SampleSet::from_rows(&sum_rows).unwrap();
            let theta = sample_direction(3, &RngHandle::new(seed)).unwrap();
            let pa = project_values(&a, &theta).unwrap();
            let pb = project_values(&b, &theta).unwrap();
            for (x, y) in pa.iter().zip(pb.iter()) {
                prop_assert!((y - 2.0 * x).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn monomial_counts_always_match_enumeration(dim in 1usize..6, degree_idx in 0usize..3) {
            let degree = [1u32, 3, 5][degree_idx];
            let set = enumerate_multi_indices(dim, degree).unwrap();
            prop_assert_eq!(set.len() as u64, multi_index_count(dim, degree).unwrap());
            for alpha in set.indices() {
                prop_assert_eq!(alpha.iter().sum::<u32>(), degree);
            }
        }
    }
}
