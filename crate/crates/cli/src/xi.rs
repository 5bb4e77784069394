//! `xi`: concentration diagnostics across a dimension sweep.
//!
//! For every dimension and repeat, both sample sets are drawn and the
//! concentration functional is estimated on the requested lift (monomials
//! via --m, a random stack via --n-layers). Component rows go to `xi.csv`;
//! a log-log rate is fitted to the per-dimension medians of
//! `sqrt(xi_a + xi_b)` and reported on stdout and as a trailing comment
//! line in the CSV.

use std::fs::File;
use std::io::{LineWriter, Write};

use clap::{Args, ValueEnum};
use rayon::prelude::*;

use gsw::diagnostics::{fit_rate, xi_features, xi_poly, Pairing, XiComponents};
use gsw::slicer::{apply_neural_stack, build_neural_stack};
use gsw::{RngHandle, SampleSet};

use crate::fail::{CliResult, Fail};
use crate::fmt::sig12;
use crate::gen::{effective_dims, SidesArgs};

pub const XI_HEADER: &str = "dim,repeat,side,m2,a_term,b1,b2,xi,ambient_dim";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    /// All pairs for small sample counts, split halves above 4000.
    Auto,
    AllPairs,
    SplitHalves,
}

/// Estimate the concentration functional across dimensions and fit its
/// decay rate.
#[derive(Args, Debug)]
pub struct XiArgs {
    #[command(flatten)]
    pub sides: SidesArgs,
    /// Dimensions to sweep, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
    pub dims: Vec<usize>,
    /// Samples per side and repeat.
    #[arg(long, default_value_t = 2000)]
    pub n_samples: usize,
    /// Fresh-data repeats per dimension (medians feed the fit).
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Monomial lift of this odd total degree. Exactly one of --m and
    /// --n-layers must be given; --m 1 is the plain (unlifted) functional.
    #[arg(long)]
    pub m: Option<u32>,
    /// Random-stack lift of this depth (0 = no lift).
    #[arg(long)]
    pub n_layers: Option<u32>,
    /// How the independent copy in the inner-product moments is paired.
    #[arg(long, value_enum, default_value_t = PairingArg::Auto)]
    pub pairing: PairingArg,
}

enum Lift {
    Poly(u32),
    Neural(u32),
}

fn xi_one_side(
    s: &SampleSet,
    lift: &Lift,
    pairing: Pairing,
    cell: &RngHandle,
    side_idx: u64,
) -> gsw::Result<XiComponents> {
    let pair_rng = cell.derive("pair", side_idx);
    match lift {
        Lift::Poly(m) => xi_poly(s, *m, pairing, &pair_rng),
        Lift::Neural(n) => {
            // One stack per cell, shared by both sides, like the distance
            // estimators condition both measures on the same stack.
            let stack = build_neural_stack(s.dim(), *n, &cell.derive("stack", 0))?;
            let f = apply_neural_stack(&stack, s)?;
            xi_features(&f, pairing, &pair_rng)
        }
    }
}

pub fn run(seed: u64, out_dir: &std::path::Path, args: &XiArgs) -> CliResult<()> {
    let lift = match (args.m, args.n_layers) {
        (Some(m), None) => {
            if m == 0 || m % 2 == 0 {
                return Err(Fail::Usage(format!("--m: degree must be odd, got {m}")));
            }
            Lift::Poly(m)
        }
        (None, Some(n)) => Lift::Neural(n),
        _ => {
            return Err(Fail::Usage(
                "pass exactly one of --m (monomial lift) or --n-layers (stack lift)".into(),
            ));
        }
    };
    if args.repeats == 0 {
        return Err(Fail::Usage("--repeats must be at least 1".into()));
    }
    let (side_a, side_b) = args.sides.resolve()?;
    let dims_given = args.dims != [16, 64, 256, 1024];
    let dims = effective_dims(&args.dims, dims_given, &side_a, &side_b)?;
    let n = side_a.fixed_n().or(side_b.fixed_n()).unwrap_or(args.n_samples);
    let pairing = match args.pairing {
        PairingArg::AllPairs => Pairing::AllPairs,
        PairingArg::SplitHalves => Pairing::SplitHalves,
        PairingArg::Auto => {
            if n <= 4000 {
                Pairing::AllPairs
            } else {
                Pairing::SplitHalves
            }
        }
    };

    std::fs::create_dir_all(out_dir).map_err(|e| Fail::Io(out_dir.to_path_buf(), e))?;
    let csv_path = out_dir.join("xi.csv");
    let file = File::create(&csv_path).map_err(|e| Fail::Io(csv_path.clone(), e))?;
    let mut out = LineWriter::new(file);
    let io = |e: std::io::Error| Fail::Io(csv_path.clone(), e);
    writeln!(out, "{XI_HEADER}").map_err(io)?;

    let master = RngHandle::new(seed);
    let mut medians: Vec<(usize, f64)> = Vec::new();
    for &dim in &dims {
        let rows: CliResult<Vec<(XiComponents, XiComponents)>> = (0..args.repeats)
            .into_par_iter()
            .map(|r| {
                let cell = master.derive("dim", dim as u64).derive("rep", r as u64);
                let mu = side_a.build(n, dim, &cell.derive("mu", 0))?;
                let nu = side_b.build(n, dim, &cell.derive("nu", 0))?;
                let xa = xi_one_side(&mu, &lift, pairing, &cell, 0)?;
                let xb = xi_one_side(&nu, &lift, pairing, &cell, 1)?;
                Ok((xa, xb))
            })
            .collect();
        let rows = rows?;
        let mut values = Vec::with_capacity(rows.len());
        for (r, (xa, xb)) in rows.iter().enumerate() {
            for (side, x) in [("a", xa), ("b", xb)] {
                writeln!(
                    out,
                    "{dim},{r},{side},{},{},{},{},{},{}",
                    sig12(x.m2),
                    sig12(x.a_term),
                    sig12(x.b1),
                    sig12(x.b2),
                    sig12(x.xi),
                    x.ambient_dim
                )
                .map_err(io)?;
            }
            values.push((xa.xi + xb.xi).sqrt());
        }
        values.sort_unstable_by(f64::total_cmp);
        let mid = values.len() / 2;
        let median = if values.len() % 2 == 1 {
            values[mid]
        } else {
            (values[mid - 1] + values[mid]) / 2.0
        };
        medians.push((dim, median));
    }

    match fit_rate(&medians) {
        Ok(fit) => {
            writeln!(
                out,
                "# fit on median sqrt(xi_a + xi_b): slope={} intercept={} r_squared={}",
                sig12(fit.slope),
                sig12(fit.intercept),
                sig12(fit.r_squared)
            )
            .map_err(io)?;
            println!(
                "slope {} intercept {} r_squared {}",
                sig12(fit.slope),
                sig12(fit.intercept),
                sig12(fit.r_squared)
            );
        }
        Err(e) => {
            writeln!(out, "# fit skipped: {e}").map_err(io)?;
            eprintln!("warning: fit skipped: {e}");
        }
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}
