//! `dist`: one distance between two CSV sample sets, printed to stdout.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use gsw::fastapprox::{hat_neural_gsw2, hat_poly_gsw2, hat_sw2};
use gsw::montecarlo::{mc_gsw, McConfig};
use gsw::{load_sample_set, CsvOptions, DefiningFunction, RngHandle};

use crate::fail::{CliResult, Fail};
use crate::fmt::sig12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GArg {
    Linear,
    Poly,
    Neural,
    Circular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Monte Carlo over random projections (the reference estimator).
    Mc,
    /// Deterministic moment-based approximation (order 2 only).
    Fast,
}

/// Compute one distance between two sample sets stored as CSV.
#[derive(Args, Debug)]
pub struct DistArgs {
    /// First sample set (rows = samples).
    pub a: PathBuf,
    /// Second sample set; must match in dimension and sample count.
    pub b: PathBuf,
    /// Projection map.
    #[arg(long = "g", value_enum, default_value_t = GArg::Linear)]
    pub g: GArg,
    /// Polynomial total degree (odd), with --g poly.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Random stack depth, with --g neural.
    #[arg(long, default_value_t = 1)]
    pub n_layers: u32,
    /// Offset radius, with --g circular.
    #[arg(long = "t", default_value_t = 1.0)]
    pub t: f64,
    /// Estimator.
    #[arg(long, value_enum, default_value_t = MethodArg::Mc)]
    pub method: MethodArg,
    /// Projection count for --method mc.
    #[arg(long, default_value_t = 20_000)]
    pub projections: usize,
    /// Transport order; --method fast supports 2 only.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

pub fn defining_function(g: GArg, m: u32, n_layers: u32, t: f64) -> CliResult<DefiningFunction> {
    let g = match g {
        GArg::Linear => DefiningFunction::Linear,
        GArg::Poly => DefiningFunction::Polynomial { degree: m },
        GArg::Neural => DefiningFunction::Neural { layers: n_layers },
        GArg::Circular => DefiningFunction::Circular { radius: t },
    };
    g.validate().map_err(|e| {
        let flag = match g {
            DefiningFunction::Polynomial { .. } => "--m",
            DefiningFunction::Circular { .. } => "--t",
            _ => "--g",
        };
        Fail::Usage(format!("{flag}: {e}"))
    })?;
    Ok(g)
}

pub fn run(seed: u64, args: &DistArgs) -> CliResult<()> {
    let g = defining_function(args.g, args.m, args.n_layers, args.t)?;
    let mu = load_sample_set(&args.a, &CsvOptions::default())?;
    let nu = load_sample_set(&args.b, &CsvOptions::default())?;
    let value = match args.method {
        MethodArg::Fast => {
            if args.p != 2.0 {
                return Err(Fail::Usage(format!(
                    "--p: the fast approximation exists only for order 2, got {}",
                    args.p
                )));
            }
            match g {
                DefiningFunction::Linear => hat_sw2(&mu, &nu)?.distance,
                DefiningFunction::Polynomial { degree } => {
                    hat_poly_gsw2(&mu, &nu, degree)?.distance
                }
                DefiningFunction::Neural { layers } => {
                    if layers == 0 {
                        return Err(Fail::Usage(
                            "--n-layers: 0 layers is the identity map; its fast approximation \
                             is the linear one, use --g linear --method fast"
                                .into(),
                        ));
                    }
                    hat_neural_gsw2(&mu, &nu, layers)?.distance
                }
                DefiningFunction::Circular { .. } => {
                    return Err(Fail::Usage(
                        "--g circular: no fast approximation (open problem)".into(),
                    ));
                }
            }
        }
        MethodArg::Mc => {
            let cfg = McConfig::new(args.projections, args.p, RngHandle::new(seed))
                .map_err(|e| Fail::Usage(format!("--projections/--p: {e}")))?;
            mc_gsw(&mu, &nu, &g, &cfg)?
        }
    };
    if !value.is_finite() {
        return Err(Fail::Numeric(format!("distance evaluated to {value}")));
    }
    println!("{}", sig12(value));
    Ok(())
}
