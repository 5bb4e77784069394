//! `experiment`: the approximation-error-versus-dimension sweep.
//!
//! For every dimension and repeat, both sample sets are drawn fresh, the
//! fast estimate and the Monte Carlo reference are computed, and one record
//! row goes to `results.csv` immediately. Per-dimension summary rows and an
//! SVG plot of mean error with a one-standard-deviation band follow.
//!
//! Stream layout: the cell for (dim, repeat) derives `"dim"` then `"rep"`
//! from the master seed, and inside it `"mu"`, `"nu"` and `"mc"` label the
//! three random consumers. Cells never share streams, so repeats can run on
//! any number of workers with byte-identical output.

use std::fs::File;
use std::io::{LineWriter, Write};
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;

use gsw::fastapprox::{hat_neural_gsw2, hat_poly_gsw2, hat_sw2};
use gsw::montecarlo::{mc_gsw, McConfig};
use gsw::{DefiningFunction, RngHandle, SampleSet};

use crate::dist::{defining_function, GArg};
use crate::fail::{CliResult, Fail};
use crate::fmt::{secs, sig12};
use crate::gen::{effective_dims, SideSpec, SidesArgs};
use crate::svg::{self, PlotPoint};

pub const RESULTS_HEADER: &str = "dim,repeat,fast,oracle,abs_error,fast_seconds,oracle_seconds";

/// Run the error-versus-dimension sweep and write results.csv plus plot.svg.
#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub sides: SidesArgs,
    /// Projection map for both estimators (circular has no fast path).
    #[arg(long = "g", value_enum, default_value_t = GArg::Poly)]
    pub g: GArg,
    /// Polynomial total degree (odd), with --g poly.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Random stack depth, with --g neural.
    #[arg(long, default_value_t = 1)]
    pub n_layers: u32,
    /// Dimensions to sweep, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub dims: Vec<usize>,
    /// Samples per side and repeat.
    #[arg(long, default_value_t = 2000)]
    pub n_samples: usize,
    /// Fresh-data repeats per dimension.
    #[arg(long, default_value_t = 100)]
    pub repeats: usize,
    /// Projections for the Monte Carlo reference.
    #[arg(long, default_value_t = 2000)]
    pub projections: usize,
}

enum Cell {
    Ok { fast: f64, oracle: f64, fast_secs: f64, oracle_secs: f64 },
    Failed(String),
}

fn fast_value(g: &DefiningFunction, mu: &SampleSet, nu: &SampleSet) -> gsw::Result<f64> {
    match *g {
        DefiningFunction::Linear => Ok(hat_sw2(mu, nu)?.distance),
        DefiningFunction::Polynomial { degree } => Ok(hat_poly_gsw2(mu, nu, degree)?.distance),
        DefiningFunction::Neural { layers } => Ok(hat_neural_gsw2(mu, nu, layers)?.distance),
        DefiningFunction::Circular { .. } => unreachable!("rejected during validation"),
    }
}

fn run_cell(
    master: &RngHandle,
    dim: usize,
    rep: usize,
    n: usize,
    projections: usize,
    g: &DefiningFunction,
    side_a: &SideSpec,
    side_b: &SideSpec,
) -> Cell {
    let cell = master.derive("dim", dim as u64).derive("rep", rep as u64);
    let built = side_a
        .build(n, dim, &cell.derive("mu", 0))
        .and_then(|mu| Ok((mu, side_b.build(n, dim, &cell.derive("nu", 0))?)));
    let (mu, nu) = match built {
        Ok(pair) => pair,
        Err(e) => return Cell::Failed(e.to_string()),
    };
    let t0 = Instant::now();
    let fast = match fast_value(g, &mu, &nu) {
        Ok(v) => v,
        Err(e) => return Cell::Failed(e.to_string()),
    };
    let fast_secs = t0.elapsed().as_secs_f64();
    let cfg = match McConfig::new(projections, 2.0, cell.derive("mc", 0)) {
        Ok(c) => c,
        Err(e) => return Cell::Failed(e.to_string()),
    };
    let t1 = Instant::now();
    let oracle = match mc_gsw(&mu, &nu, g, &cfg) {
        Ok(v) => v,
        Err(e) => return Cell::Failed(e.to_string()),
    };
    let oracle_secs = t1.elapsed().as_secs_f64();
    if !fast.is_finite() || !oracle.is_finite() {
        return Cell::Failed(format!("non-finite estimates: fast {fast}, oracle {oracle}"));
    }
    Cell::Ok { fast, oracle, fast_secs, oracle_secs }
}

pub fn run(seed: u64, out_dir: &std::path::Path, args: &ExperimentArgs) -> CliResult<()> {
    let g = defining_function(args.g, args.m, args.n_layers, 1.0)?;
    if matches!(g, DefiningFunction::Circular { .. }) {
        return Err(Fail::Usage(
            "--g circular: no fast approximation (open problem), so there is nothing to \
             compare; use the dist command with --method mc"
                .into(),
        ));
    }
    if matches!(g, DefiningFunction::Neural { layers: 0 }) {
        return Err(Fail::Usage(
            "--n-layers: 0 layers reduces to linear slicing; run --g linear".into(),
        ));
    }
    if args.repeats == 0 {
        return Err(Fail::Usage("--repeats must be at least 1".into()));
    }
    let (side_a, side_b) = args.sides.resolve()?;
    let dims_given = args.dims != [5, 10, 20, 40];
    let dims = effective_dims(&args.dims, dims_given, &side_a, &side_b)?;
    let n = match (side_a.fixed_n(), side_b.fixed_n()) {
        (Some(na), Some(nb)) if na != nb => {
            return Err(Fail::Usage(format!(
                "--csv-a and --csv-b disagree in sample count: {na} vs {nb}"
            )));
        }
        (Some(nf), _) | (_, Some(nf)) => nf,
        (None, None) => args.n_samples,
    };
    if n == 0 {
        return Err(Fail::Usage("--n-samples must be at least 1".into()));
    }

    std::fs::create_dir_all(out_dir).map_err(|e| Fail::Io(out_dir.to_path_buf(), e))?;
    let csv_path = out_dir.join("results.csv");
    let file = File::create(&csv_path).map_err(|e| Fail::Io(csv_path.clone(), e))?;
    let mut out = LineWriter::new(file);
    let io = |e: std::io::Error| Fail::Io(csv_path.clone(), e);
    writeln!(out, "{RESULTS_HEADER}").map_err(io)?;

    let master = RngHandle::new(seed);
    let mut plot_points = Vec::new();
    let mut failed_cells = 0usize;
    for &dim in &dims {
        let cells: Vec<Cell> = (0..args.repeats)
            .into_par_iter()
            .map(|r| {
                run_cell(&master, dim, r, n, args.projections, &g, &side_a, &side_b)
            })
            .collect();
        let mut errs = Vec::new();
        let mut fast_sum = 0.0;
        let mut oracle_sum = 0.0;
        for (r, cell) in cells.iter().enumerate() {
            match cell {
                Cell::Ok { fast, oracle, fast_secs, oracle_secs } => {
                    let abs_error = (fast - oracle).abs();
                    writeln!(
                        out,
                        "{dim},{r},{},{},{},{},{}",
                        sig12(*fast),
                        sig12(*oracle),
                        sig12(abs_error),
                        secs(*fast_secs),
                        secs(*oracle_secs)
                    )
                    .map_err(io)?;
                    errs.push(abs_error);
                    fast_sum += fast;
                    oracle_sum += oracle;
                }
                Cell::Failed(msg) => {
                    eprintln!("warning: dim {dim} repeat {r} failed: {msg}");
                    failed_cells += 1;
                    writeln!(out, "{dim},{r},error,error,error,,").map_err(io)?;
                }
            }
        }
        if errs.is_empty() {
            writeln!(out, "{dim},summary,error,error,error,,").map_err(io)?;
            continue;
        }
        let k = errs.len() as f64;
        let mean_err = errs.iter().sum::<f64>() / k;
        let std_err =
            (errs.iter().map(|e| (e - mean_err) * (e - mean_err)).sum::<f64>() / k).sqrt();
        let mean_text = sig12(mean_err);
        writeln!(
            out,
            "{dim},summary,{},{},{},{},",
            sig12(fast_sum / k),
            sig12(oracle_sum / k),
            mean_text,
            sig12(std_err)
        )
        .map_err(io)?;
        plot_points.push(PlotPoint { dim, mean: mean_err, std: std_err, mean_text });
    }
    drop(out);

    let svg_path = out_dir.join("plot.svg");
    let title = format!("mean |fast - oracle| vs dimension (N={n}, L={})", args.projections);
    std::fs::write(&svg_path, svg::render(&plot_points, &title))
        .map_err(|e| Fail::Io(svg_path.clone(), e))?;
    if failed_cells > 0 {
        eprintln!("warning: {failed_cells} cell(s) recorded error markers");
    }
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
