use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use juliathermo::cycles::periodic_cycles;
use juliathermo::poly::PolyMap;
use juliathermo::report::{critical_condition, metric_report, MetricReportOptions};
use juliathermo::scan::{scan_dimension, scan_summary, RunConfig};
use juliathermo::stats::{census, reality_defect};
use juliathermo::thermo::{hausdorff_dimension_with, DimensionOptions};
use juliathermo::{Complex64, Error, Result};

#[derive(Parser)]
#[command(name = "juliathermo", version, about = "Pressure, dimension and metrics for z^2 + c")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hausdorff dimension of the Julia set of z^2 + c.
    #[command(allow_negative_numbers = true)]
    Dim {
        re: f64,
        im: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        depth_max: usize,
    },
    /// Cycles of exact period n with their multipliers.
    #[command(allow_negative_numbers = true)]
    Cycles {
        re: f64,
        im: f64,
        #[arg(long)]
        period: usize,
        /// Keep only repelling cycles (the periodic points on the Julia set).
        #[arg(long)]
        julia_only: bool,
    },
    /// Dimension scan over a parameter rectangle, driven by a JSON config.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// G-metric and pressure metric at one parameter.
    #[command(allow_negative_numbers = true)]
    Metric {
        re: f64,
        im: f64,
        #[arg(long, default_value_t = juliathermo::metric::DEFAULT_STEP)]
        h: f64,
        #[arg(long, default_value_t = juliathermo::metric::DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Multiplier census up to period nmax.
    #[command(allow_negative_numbers = true)]
    Stats {
        re: f64,
        im: f64,
        #[arg(long)]
        nmax: usize,
        /// Write the census as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Per-period minima of (1/n)|dλ/dc|/|λ| over Julia cycles.
    #[command(allow_negative_numbers = true)]
    Critcond {
        re: f64,
        im: f64,
        #[arg(long)]
        nmax: usize,
    },
}

fn param(re: f64, im: f64) -> Result<Complex64> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(Error::InvalidInput(format!("parameter must be finite, got {re} + {im}i")))
    }
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn run(cmd: Command) -> Result<(Value, i32)> {
    match cmd {
        Command::Dim { re, im, tol, depth_max } => {
            let map = PolyMap::quadratic(param(re, im)?);
            let opts = DimensionOptions {
                tol,
                depth_max,
                depth_min: DimensionOptions::default().depth_min.min(depth_max),
            };
            let r = hausdorff_dimension_with(&map, opts)?;
            Ok((
                json!({
                    "c": [re, im],
                    "delta": r.delta,
                    "depth": r.depth,
                    "change": r.change,
                    "history": r.history,
                }),
                0,
            ))
        }
        Command::Cycles { re, im, period, julia_only } => {
            let map = PolyMap::quadratic(param(re, im)?);
            let cycles: Vec<Value> = periodic_cycles(&map, period, julia_only)?
                .iter()
                .map(|c| {
                    json!({
                        "period": c.period(),
                        "multiplier": pair(c.multiplier()),
                        "modulus": c.multiplier().norm(),
                        "stability": format!("{:?}", c.stability()).to_lowercase(),
                        "points": c.points().iter().copied().map(pair).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((json!({ "c": [re, im], "period": period, "cycles": cycles }), 0))
        }
        Command::Scan { config } => {
            let cfg = RunConfig::load(&config)?;
            let grid = scan_dimension(&cfg)?;
            Ok((scan_summary(&grid), 0))
        }
        Command::Metric { re, im, h, horizon } => {
            let opts = MetricReportOptions {
                h,
                horizon,
                ..MetricReportOptions::default()
            };
            let v = metric_report(param(re, im)?, opts)?;
            let excluded = v["verdict"].as_str().is_some_and(|s| s.starts_with("excluded"));
            Ok((v, if excluded { 4 } else { 0 }))
        }
        Command::Stats { re, im, nmax, csv } => {
            let map = PolyMap::quadratic(param(re, im)?);
            let cen = census(&map, nmax)?;
            if let Some(path) = csv {
                let mut out = Vec::new();
                cen.write_csv(&mut out)?;
                std::fs::write(path, out)?;
            }
            let bound = cen.completeness_bound();
            Ok((
                json!({
                    "c": [re, im],
                    "n_max": nmax,
                    "cycles": cen.entries().len(),
                    "completeness_bound": bound,
                    "count_below_bound": cen.count_below(bound),
                    "reality_defect": reality_defect(&cen),
                }),
                0,
            ))
        }
        Command::Critcond { re, im, nmax } => Ok((critical_condition(param(re, im)?, nmax)?.to_json(), 0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, code)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON values always serialise"));
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
