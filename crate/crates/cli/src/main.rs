use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qetorus::{Torus64, C64};
use qetorus_cli::commands::{cmd_coeffs, cmd_eval, cmd_verify, cmd_zeros, CoeffKind, EvalArgs, Format, Global, Grid};
use qetorus_cli::format::parse_complex;

#[derive(Parser, Debug)]
#[command(name = "qetorus", version, about = "Quasi-elliptic functions on the complex torus")]
struct Cli {
    /// Real part of the modular parameter τ.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    tau_re: f64,
    /// Imaginary part of τ; must be positive.
    #[arg(long, global = true, default_value_t = 1.0)]
    tau_im: f64,
    /// Trapezoid nodes per real period.
    #[arg(long, global = true, default_value_t = 256)]
    quad_points: usize,
    /// Truncation tolerance of the theta and q-series.
    #[arg(long, global = true, default_value_t = 1e-16)]
    series_tol: f64,
    /// Seed for the sample points of numeric checks.
    #[arg(long, global = true, default_value_t = 20240229)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at points or on a grid.
    Eval {
        /// theta, Z, zeta, wp, wp_prime, F, g, zconv, wpconv, conv or A.
        #[arg(long = "fn")]
        function: String,
        /// Complex point such as 0.25+0.9i; repeatable.
        #[arg(long = "x", allow_hyphen_values = true)]
        xs: Vec<String>,
        /// re_min,re_max,im_min,im_max,n_re,n_im; output is CSV.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Order for g, zconv, wpconv and A.
        #[arg(long)]
        n: Option<usize>,
        /// Second argument of F.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// First factor of conv: 1, Z, Zp, wp, wp_prime, gN, zconvN or wpconvN.
        #[arg(long)]
        f: Option<String>,
        /// Second factor of conv.
        #[arg(long)]
        g: Option<String>,
    },
    /// Exact coefficient tables.
    Coeffs {
        /// Basis-change matrix row: c or C.
        #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
        matrix: Option<String>,
        /// Polynomial family: p.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Zeros of pₙ and their density histogram.
    Zeros {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify {
        /// theta, weierstrass, kernels, convolution, basis, polynomials or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn params(cli: &Cli) -> Result<Torus64, String> {
    Torus64::new(C64::new(cli.tau_re, cli.tau_im))
        .and_then(|p| p.with_quad_points(cli.quad_points))
        .and_then(|p| p.with_series_tol(cli.series_tol))
        .map_err(|e| e.to_string())
}

fn coeff_kind(matrix: Option<&str>, poly: Option<&str>) -> Result<CoeffKind, String> {
    match (matrix, poly) {
        (Some("c"), None) => Ok(CoeffKind::SmallC),
        (Some("C"), None) => Ok(CoeffKind::BigC),
        (None, Some("p")) => Ok(CoeffKind::P),
        (Some(m), None) => Err(format!("unknown matrix `{m}`; expected c or C")),
        (None, Some(p)) => Err(format!("unknown polynomial family `{p}`; expected p")),
        _ => Err("give exactly one of --matrix or --poly".into()),
    }
}

/// Output text and whether the command succeeded.
fn run(cli: &Cli) -> Result<(String, bool), String> {
    let global = Global {
        params: params(cli)?,
        seed: cli.seed,
        format: match cli.format {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        },
    };
    match &cli.command {
        Command::Eval { function, xs, grid, n, y, f, g } => {
            let args = EvalArgs {
                function: function.clone(),
                xs: xs.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?,
                grid: grid.as_deref().map(Grid::parse).transpose()?,
                n: *n,
                y: y.as_deref().map(parse_complex).transpose()?,
                f: f.clone(),
                g: g.clone(),
            };
            cmd_eval(&global, &args).map(|s| (s, true))
        }
        Command::Coeffs { matrix, poly, n } => {
            let kind = coeff_kind(matrix.as_deref(), poly.as_deref())?;
            cmd_coeffs(&global, kind, *n).map(|s| (s, true))
        }
        Command::Zeros { n, bins } => cmd_zeros(&global, *n, *bins).map(|s| (s, true)),
        Command::Verify { suite } => cmd_verify(&global, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, pass)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Ok(()) if pass => ExitCode::SUCCESS,
                Ok(()) => ExitCode::FAILURE,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
