//! Input generators shared by the sweep commands: one parametric family (or
//! a CSV file) per side, with independent parameters.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use gsw::datagen::{gen_ar1, gen_gamma, gen_gaussian, Ar1Config, MeanSpec, NoiseKind};
use gsw::{load_sample_set, CsvOptions, RngHandle, SampleSet};

use crate::fail::{CliResult, Fail};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Gaussian,
    Gamma,
    Ar1,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    Student,
}

/// Per-side generator flags. Side `a` produces the first sample set, side
/// `b` the second; defaults reproduce the stock comparisons: N(0, I) vs
/// N(1, 2I), Gamma(1,2) vs Gamma(1,3), AR(1) alpha 0.2 vs 0.8.
#[derive(Args, Clone, Debug)]
pub struct SidesArgs {
    /// Distribution family for the first sample set.
    #[arg(long, value_enum, default_value_t = GenKind::Gaussian)]
    pub gen_a: GenKind,
    /// Distribution family for the second sample set.
    #[arg(long, value_enum, default_value_t = GenKind::Gaussian)]
    pub gen_b: GenKind,
    /// Gaussian mean, broadcast over coordinates (side a).
    #[arg(long, default_value_t = 0.0)]
    pub mean_a: f64,
    /// Gaussian mean, broadcast over coordinates (side b).
    #[arg(long, default_value_t = 1.0)]
    pub mean_b: f64,
    /// Gaussian covariance scale: the covariance is this times the identity (side a).
    #[arg(long, default_value_t = 1.0)]
    pub cov_a: f64,
    /// Gaussian covariance scale (side b).
    #[arg(long, default_value_t = 2.0)]
    pub cov_b: f64,
    /// Gamma shape (side a).
    #[arg(long, default_value_t = 1.0)]
    pub shape_a: f64,
    /// Gamma shape (side b).
    #[arg(long, default_value_t = 1.0)]
    pub shape_b: f64,
    /// Gamma scale (side a).
    #[arg(long, default_value_t = 2.0)]
    pub scale_a: f64,
    /// Gamma scale (side b).
    #[arg(long, default_value_t = 3.0)]
    pub scale_b: f64,
    /// AR(1) coefficient in [0, 1) (side a).
    #[arg(long, default_value_t = 0.2)]
    pub alpha_a: f64,
    /// AR(1) coefficient in [0, 1) (side b).
    #[arg(long, default_value_t = 0.8)]
    pub alpha_b: f64,
    /// AR(1) innovation family (side a).
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    pub noise_a: NoiseArg,
    /// AR(1) innovation family (side b).
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    pub noise_b: NoiseArg,
    /// Gaussian innovation standard deviation (side a).
    #[arg(long, default_value_t = 1.0)]
    pub sigma_a: f64,
    /// Gaussian innovation standard deviation (side b).
    #[arg(long, default_value_t = 1.0)]
    pub sigma_b: f64,
    /// Student t degrees of freedom, must exceed 2 (side a).
    #[arg(long, default_value_t = 5.0)]
    pub df_a: f64,
    /// Student t degrees of freedom, must exceed 2 (side b).
    #[arg(long, default_value_t = 5.0)]
    pub df_b: f64,
    /// CSV file with the first sample set (requires --gen-a csv).
    #[arg(long)]
    pub csv_a: Option<PathBuf>,
    /// CSV file with the second sample set (requires --gen-b csv).
    #[arg(long)]
    pub csv_b: Option<PathBuf>,
}

/// One side's resolved generator.
#[derive(Clone, Debug)]
pub enum SideSpec {
    Gaussian { mean: f64, cov: f64 },
    Gamma { shape: f64, scale: f64 },
    Ar1 { alpha: f64, noise: NoiseKind },
    /// Pre-loaded fixed data; repeats reuse it unchanged.
    Fixed(SampleSet),
}

impl SideSpec {
    /// Dimension forced by the generator, if any (CSV data comes with its
    /// own width; parametric families follow the sweep).
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            SideSpec::Fixed(s) => Some(s.dim()),
            _ => None,
        }
    }

    pub fn fixed_n(&self) -> Option<usize> {
        match self {
            SideSpec::Fixed(s) => Some(s.n_samples()),
            _ => None,
        }
    }

    /// Draws `n` samples in `dim` dimensions from this side's family.
    pub fn build(&self, n: usize, dim: usize, handle: &RngHandle) -> CliResult<SampleSet> {
        match self {
            SideSpec::Gaussian { mean, cov } => {
                Ok(gen_gaussian(n, dim, &MeanSpec::Scalar(*mean), *cov, handle)?)
            }
            SideSpec::Gamma { shape, scale } => Ok(gen_gamma(n, dim, *shape, *scale, handle)?),
            SideSpec::Ar1 { alpha, noise } => {
                let cfg = Ar1Config::new(*alpha, *noise, dim)?;
                Ok(gen_ar1(n, &cfg, handle)?)
            }
            SideSpec::Fixed(s) => Ok(s.clone()),
        }
    }
}

fn resolve_one(
    kind: GenKind,
    mean: f64,
    cov: f64,
    shape: f64,
    scale: f64,
    alpha: f64,
    noise: NoiseArg,
    sigma: f64,
    df: f64,
    csv: &Option<PathBuf>,
    side: char,
) -> CliResult<SideSpec> {
    if kind != GenKind::Csv && csv.is_some() {
        return Err(Fail::Usage(format!(
            "--csv-{side} only applies with --gen-{side} csv"
        )));
    }
    match kind {
        GenKind::Gaussian => Ok(SideSpec::Gaussian { mean, cov }),
        GenKind::Gamma => Ok(SideSpec::Gamma { shape, scale }),
        GenKind::Ar1 => {
            let noise = match noise {
                NoiseArg::Gaussian => NoiseKind::Gaussian { sigma },
                NoiseArg::Student => NoiseKind::StudentT { df },
            };
            // Validate now so flag errors surface before the sweep starts;
            // the dimension is irrelevant to the checks.
            Ar1Config::new(alpha, noise, 1)
                .map_err(|e| Fail::Usage(format!("--alpha-{side}/--sigma-{side}/--df-{side}: {e}")))?;
            Ok(SideSpec::Ar1 { alpha, noise })
        }
        GenKind::Csv => {
            let Some(path) = csv else {
                return Err(Fail::Usage(format!(
                    "--gen-{side} csv requires --csv-{side} <path>"
                )));
            };
            let s = load_sample_set(path, &CsvOptions::default())?;
            Ok(SideSpec::Fixed(s))
        }
    }
}

impl SidesArgs {
    pub fn resolve(&self) -> CliResult<(SideSpec, SideSpec)> {
        let a = resolve_one(
            self.gen_a, self.mean_a, self.cov_a, self.shape_a, self.scale_a, self.alpha_a,
            self.noise_a, self.sigma_a, self.df_a, &self.csv_a, 'a',
        )?;
        let b = resolve_one(
            self.gen_b, self.mean_b, self.cov_b, self.shape_b, self.scale_b, self.alpha_b,
            self.noise_b, self.sigma_b, self.df_b, &self.csv_b, 'b',
        )?;
        Ok((a, b))
    }
}

/// Validates a sweep's dimension list against any CSV-fixed widths.
/// Returns the effective dims (a CSV side collapses the list to its width).
pub fn effective_dims(
    dims: &[usize],
    dims_given: bool,
    a: &SideSpec,
    b: &SideSpec,
) -> CliResult<Vec<usize>> {
    match (a.fixed_dim(), b.fixed_dim()) {
        (Some(da), Some(db)) if da != db => Err(Fail::Usage(format!(
            "--csv-a and --csv-b disagree in dimension: {da} vs {db}"
        ))),
        (Some(d), _) | (_, Some(d)) => {
            if dims_given {
                Err(Fail::Usage(
                    "--dims cannot be combined with CSV input; the file fixes the dimension"
                        .into(),
                ))
            } else {
                Ok(vec![d])
            }
        }
        (None, None) => {
            if dims.is_empty() {
                return Err(Fail::Usage("--dims needs at least one dimension".into()));
            }
            for w in dims.windows(2) {
                if w[1] <= w[0] {
                    return Err(Fail::Usage(format!(
                        "--dims must be strictly increasing, got {} after {}",
                        w[1], w[0]
                    )));
                }
            }
            if dims[0] == 0 {
                return Err(Fail::Usage("--dims entries must be at least 1".into()));
            }
            Ok(dims.to_vec())
        }
    }
}
