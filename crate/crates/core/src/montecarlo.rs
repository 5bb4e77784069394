//! Monte Carlo estimation of sliced transport costs.
//!
//! This is the reference estimator the closed-form approximations are scored
//! against: draw directions, push both clouds through the chosen projection
//! map, solve the exact one-dimensional problem per direction, average the
//! p-th powers and take one root at the end.
//!
//! Determinism contract: direction `l` always comes from the child stream
//! `("proj", l)` of the config's handle, directions are processed in blocks
//! of [`CHUNK`], and the final reduction runs in index order. The result is
//! therefore bit-identical for any thread count.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::defining::DefiningFunction;
use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::sample::SampleSet;
use crate::slicer::{
    build_neural_stack, enumerate_multi_indices_capped, monomial_factors, poly_features,
    sample_direction, Direction, DEFAULT_INDEX_CAP,
};
use crate::transport1d::{apply_root, check_order, w_pow_sorted};

/// Directions per work unit. Fixed (never derived from the thread count) so
/// block boundaries, and with them every intermediate sum, are the same on
/// one core and on sixty-four.
const CHUNK: usize = 64;

/// Feature-matrix bytes the polynomial path may materialize per evaluation
/// before switching to recomputing features block by block.
pub const DEFAULT_MC_MATERIALIZE_BUDGET: usize = 512_000_000;

/// Settings for one Monte Carlo evaluation.
#[derive(Clone, Debug)]
pub struct McConfig {
    n_projections: usize,
    order: f64,
    rng: RngHandle,
    materialize_budget: usize,
}

impl McConfig {
    pub fn new(n_projections: usize, order: f64, rng: RngHandle) -> Result<Self> {
        if n_projections == 0 {
            return Err(Error::InvalidParameter(
                "projection count must be at least 1".into(),
            ));
        }
        check_order(order)?;
        Ok(Self {
            n_projections,
            order,
            rng,
            materialize_budget: DEFAULT_MC_MATERIALIZE_BUDGET,
        })
    }

    /// Overrides the feature materialization budget (bytes). Mainly for
    /// tests that force the streaming path on small inputs.
    pub fn with_materialize_budget(mut self, budget: usize) -> Self {
        self.materialize_budget = budget;
        self
    }

    pub fn n_projections(&self) -> usize {
        self.n_projections
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn rng(&self) -> &RngHandle {
        &self.rng
    }
}

fn check_pair(mu: &SampleSet, nu: &SampleSet) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    if mu.n_samples() != nu.n_samples() {
        return Err(Error::UnequalSupport { left: mu.n_samples(), right: nu.n_samples() });
    }
    Ok(())
}

/// Direction block `[start, start + width)` as a `(dim, width)` matrix whose
/// column `t` is direction `start + t`.
fn direction_block(dim: usize, start: usize, width: usize, rng: &RngHandle) -> Result<Array2<f64>> {
    let mut theta = Array2::zeros((dim, width));
    for t in 0..width {
        let dir = sample_direction(dim, &rng.derive("proj", (start + t) as u64))?;
        theta.column_mut(t).assign(dir.coords());
    }
    Ok(theta)
}

/// Sorts each projection column of the two blocks and returns the per-column
/// p-th-power transport costs.
fn costs_from_projected(pa: &Array2<f64>, pb: &Array2<f64>, order: f64) -> Vec<f64> {
    (0..pa.ncols())
        .map(|t| {
            let mut ca = pa.column(t).to_vec();
            let mut cb = pb.column(t).to_vec();
            ca.sort_unstable_by(f64::total_cmp);
            cb.sort_unstable_by(f64::total_cmp);
            w_pow_sorted(&ca, &cb, order)
        })
        .collect()
}

/// Linear slicing of two row-matrix clouds living in `ambient` dimensions:
/// per-direction p-th-power costs, one value per projection, in index order.
fn powers_projected(
    a: ArrayView2<'_, f64>,
    b: ArrayView2<'_, f64>,
    ambient: usize,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    let n_chunks = cfg.n_projections.div_ceil(CHUNK);
    let chunks: Result<Vec<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let width = CHUNK.min(cfg.n_projections - start);
            let theta = direction_block(ambient, start, width, &cfg.rng)?;
            let pa = a.dot(&theta);
            let pb = b.dot(&theta);
            Ok(costs_from_projected(&pa, &pb, cfg.order))
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

/// Polynomial slicing without a materialized feature matrix: per block,
/// every sample's feature row is evaluated into a scratch buffer and
/// multiplied into the direction block directly.
fn powers_poly_streaming(
    mu: &SampleSet,
    nu: &SampleSet,
    factors: &[Vec<(usize, u32)>],
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    let q = factors.len();
    let n_chunks = cfg.n_projections.div_ceil(CHUNK);
    let project_side = |s: &SampleSet, theta: &Array2<f64>, width: usize| -> Array2<f64> {
        let mut out = Array2::zeros((s.n_samples(), width));
        let mut feat = vec![0.0f64; q];
        for (j, row) in s.data().rows().into_iter().enumerate() {
            let x = row.as_slice().expect("sample rows are contiguous");
            for (i, f) in factors.iter().enumerate() {
                feat[i] = crate::slicer::eval_monomial(x, f);
            }
            for t in 0..width {
                let mut acc = 0.0f64;
                for (i, &v) in feat.iter().enumerate() {
                    acc += v * theta[[i, t]];
                }
                out[[j, t]] = acc;
            }
        }
        out
    };
    let chunks: Result<Vec<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let width = CHUNK.min(cfg.n_projections - start);
            let theta = direction_block(q, start, width, &cfg.rng)?;
            let pa = project_side(mu, &theta, width);
            let pb = project_side(nu, &theta, width);
            Ok(costs_from_projected(&pa, &pb, cfg.order))
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

/// Circular slicing: per direction, each cloud maps to the distances from
/// its points to the scaled direction tip.
fn powers_circular(
    mu: &SampleSet,
    nu: &SampleSet,
    radius: f64,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    let dim = mu.dim();
    let circ_values = |s: &SampleSet, dir: &Direction| -> Vec<f64> {
        let mut vals: Vec<f64> = s
            .data()
            .rows()
            .into_iter()
            .map(|row| {
                let mut acc = 0.0f64;
                for (x, th) in row.iter().zip(dir.coords().iter()) {
                    let d = x - radius * th;
                    acc += d * d;
                }
                acc.sqrt()
            })
            .collect();
        vals.sort_unstable_by(f64::total_cmp);
        vals
    };
    let n_chunks = cfg.n_projections.div_ceil(CHUNK);
    let chunks: Result<Vec<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let width = CHUNK.min(cfg.n_projections - start);
            let mut out = Vec::with_capacity(width);
            for t in 0..width {
                let dir = sample_direction(dim, &cfg.rng.derive("proj", (start + t) as u64))?;
                let va = circ_values(mu, &dir);
                let vb = circ_values(nu, &dir);
                out.push(w_pow_sorted(&va, &vb, cfg.order));
            }
            Ok(out)
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

/// Per-projection p-th-power transport costs under the chosen projection
/// map, in projection index order. `mc_gsw` is their order-p mean; exposing
/// the raw sequence lets callers compute standard errors or tail diagnostics.
pub fn mc_projection_powers(
    mu: &SampleSet,
    nu: &SampleSet,
    g: &DefiningFunction,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    check_pair(mu, nu)?;
    g.validate()?;
    match *g {
        DefiningFunction::Linear => {
            powers_projected(mu.data().view(), nu.data().view(), mu.dim(), cfg)
        }
        DefiningFunction::Polynomial { degree } => {
            let set = enumerate_multi_indices_capped(mu.dim(), degree, DEFAULT_INDEX_CAP)?;
            let q = set.len();
            let rows = mu.n_samples() + nu.n_samples();
            let bytes = q
                .checked_mul(rows)
                .and_then(|c| c.checked_mul(std::mem::size_of::<f64>()));
            match bytes {
                Some(bytes) if bytes <= cfg.materialize_budget => {
                    let fa = poly_features(mu, &set)?;
                    let fb = poly_features(nu, &set)?;
                    powers_projected(fa.data().view(), fb.data().view(), q, cfg)
                }
                _ => {
                    let factors = monomial_factors(&set);
                    powers_poly_streaming(mu, nu, &factors, cfg)
                }
            }
        }
        DefiningFunction::Neural { layers } => {
            // One stack per evaluation, shared by both clouds and all
            // projections; repeat calls with fresh handles to vary it.
            let stack = build_neural_stack(mu.dim(), layers, &cfg.rng.derive("stack", 0))?;
            let fa = crate::slicer::apply_neural_stack(&stack, mu)?;
            let fb = crate::slicer::apply_neural_stack(&stack, nu)?;
            powers_projected(fa.data().view(), fb.data().view(), mu.dim(), cfg)
        }
        DefiningFunction::Circular { radius } => powers_circular(mu, nu, radius, cfg),
    }
}

/// Monte Carlo sliced transport cost of order `cfg.order`: the p-th root of
/// the mean per-projection p-th-power cost.
pub fn mc_gsw(mu: &SampleSet, nu: &SampleSet, g: &DefiningFunction, cfg: &McConfig) -> Result<f64> {
    let powers = mc_projection_powers(mu, nu, g, cfg)?;
    let mean = powers.iter().sum::<f64>() / powers.len() as f64;
    Ok(apply_root(mean, cfg.order))
}
