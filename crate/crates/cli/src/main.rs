use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use maxrs::dataset::Distribution;
use maxrs_cli::{
    format_maxcrs, format_maxrs, run_bench, run_gen, run_maxcrs, run_maxrs, run_oracle,
    run_verify, BenchAxis, BenchParams, EmArgs, GenParams, OracleQuery, VerifyParams,
};

#[derive(Parser)]
#[command(
    name = "maxrs",
    about = "External-memory solvers for maximum range-sum placement, with I/O-counted benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Gaussian,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Distribution {
        match d {
            DistArg::Uniform => Distribution::Uniform,
            DistArg::Gaussian => Distribution::Gaussian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    N,
    Buffer,
    Range,
    Diam,
}

impl From<AxisArg> for BenchAxis {
    fn from(a: AxisArg) -> BenchAxis {
        match a {
            AxisArg::N => BenchAxis::N,
            AxisArg::Buffer => BenchAxis::Buffer,
            AxisArg::Range => BenchAxis::Range,
            AxisArg::Diam => BenchAxis::Diam,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct EmFlags {
    /// Records per simulated disk block (B)
    #[arg(long = "block-records", default_value_t = 8)]
    block_records: usize,
    /// Records of simulated main memory (M)
    #[arg(long = "mem-records", default_value_t = 128)]
    mem_records: usize,
    /// Division fan-out / merge fan-in (m); defaults to max(2, M/B - 2)
    #[arg(long)]
    fanout: Option<usize>,
}

impl From<EmFlags> for EmArgs {
    fn from(f: EmFlags) -> EmArgs {
        EmArgs {
            block_records: f.block_records,
            mem_records: f.mem_records,
            fanout: f.fanout,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset file, or convert a text point file
    Gen {
        #[arg(long, default_value_t = 10000)]
        n: u64,
        /// Domain side; defaults to 4n
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path
        #[arg(long)]
        out: PathBuf,
        /// Convert `x y [w]` lines from this file instead of sampling
        #[arg(long = "from-text")]
        from_text: Option<PathBuf>,
        /// Rescale imported coordinates onto [0, 1000000]^2
        #[arg(long, requires = "from_text")]
        normalize: bool,
        #[command(flatten)]
        em: EmFlags,
    },
    /// Exact rectangle placement over a dataset file
    Maxrs {
        /// Object file to solve
        data: PathBuf,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
        #[command(flatten)]
        em: EmFlags,
    },
    /// Quarter-approximate circle placement over a dataset file
    Maxcrs {
        data: PathBuf,
        /// Circle diameter
        #[arg(long)]
        diam: f64,
        /// Shifting distance; defaults to the midpoint of the valid interval
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        em: EmFlags,
    },
    /// Brute-force ground truth (rectangle with --d1/--d2, circle with --diam)
    Oracle {
        data: PathBuf,
        #[arg(long)]
        d1: Option<f64>,
        #[arg(long)]
        d2: Option<f64>,
        #[arg(long, conflicts_with_all = ["d1", "d2"])]
        diam: Option<f64>,
        #[command(flatten)]
        em: EmFlags,
    },
    /// Generate an instance and cross-check both solvers against the oracles
    Verify {
        #[arg(long, default_value_t = 150)]
        n: u64,
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Query width; defaults to extent/250
        #[arg(long)]
        d1: Option<f64>,
        /// Query height; defaults to --d1
        #[arg(long)]
        d2: Option<f64>,
        /// Circle diameter; defaults to --d1
        #[arg(long)]
        diam: Option<f64>,
        #[command(flatten)]
        em: EmFlags,
    },
    /// Sweep one parameter axis and append rows to a CSV
    Bench {
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated sweep values; per-axis defaults when omitted
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 5000)]
        n: u64,
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Query side for rectangle rows; defaults to extent/250
        #[arg(long)]
        d1: Option<f64>,
        /// Base diameter (diam axis uses the sweep values instead)
        #[arg(long)]
        diam: Option<f64>,
        /// CSV file to append rows to
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        em: EmFlags,
    },
}

fn run(cli: Cli) -> maxrs::Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { n, extent, dist, seed, out, from_text, normalize, em } => {
            let msg = run_gen(
                &GenParams { n, extent, dist: dist.into(), seed, out, from_text, normalize },
                &em.into(),
            )?;
            println!("{msg}");
        }
        Cmd::Maxrs { data, d1, d2, em } => {
            let em: EmArgs = em.into();
            let out = run_maxrs(&data, d1, d2, &em)?;
            print!("{}", format_maxrs(&out, &em));
        }
        Cmd::Maxcrs { data, diam, sigma, em } => {
            let em: EmArgs = em.into();
            let out = run_maxcrs(&data, diam, sigma, &em)?;
            print!("{}", format_maxcrs(&out, &em));
        }
        Cmd::Oracle { data, d1, d2, diam, em } => {
            let query = match (d1, d2, diam) {
                (None, None, Some(diam)) => OracleQuery::Circle { diam },
                (Some(d1), d2, None) => OracleQuery::Rect { d1, d2: d2.unwrap_or(d1) },
                _ => {
                    return Err(maxrs::Error::InvalidParameter(
                        "oracle needs either --d1 [--d2] or --diam".into(),
                    ))
                }
            };
            let (_, text) = run_oracle(&data, &query, &em.into())?;
            print!("{text}");
        }
        Cmd::Verify { n, extent, dist, seed, d1, d2, diam, em } => {
            let (ok, text) = run_verify(
                &VerifyParams { n, extent, dist: dist.into(), seed, d1, d2, diam },
                &em.into(),
            )?;
            print!("{text}");
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Bench { axis, values, n, extent, dist, seed, d1, diam, csv, em } => {
            let rows = run_bench(
                &BenchParams {
                    axis: axis.into(),
                    values,
                    n,
                    extent,
                    dist: dist.into(),
                    seed,
                    d1,
                    diam,
                    csv,
                },
                &em.into(),
            )?;
            println!("{}", maxrs_cli::CSV_HEADER);
            for r in &rows {
                println!("{}", r.csv_line());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
