use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavelet_wasserstein::distance::{distance, DistanceConfig, Formulation};
use wavelet_wasserstein::measures::Density;
use wavelet_wasserstein::simulation::{emit_csv, run_simulation, write_csv, Family, SimulationSpec};
use wavelet_wasserstein::wavelet::{estimate_constants, WaveletSystem};
use wavelet_wasserstein::wlot::embed;
use wavelet_wasserstein::{Error, Result};

#[derive(Parser)]
#[command(name = "wavws", version, about = "Wavelet s-Wasserstein distances and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare wavelet distances with exact transport costs over a family of
    /// translated or dilated densities and write a CSV.
    Simulate(SimulateArgs),
    /// Print the wavelet distance between two densities.
    Distance(DistanceArgs),
    /// Write the sparse wavelet embedding of a density.
    Embed(EmbedArgs),
    /// Print the Hölder characterization constants a11, a12, a13.
    Constants(ConstantsArgs),
}

/// Settings shared by every subcommand that computes coefficients.
#[derive(Args)]
struct WaveletArgs {
    #[arg(long, default_value = "db10")]
    wavelet: String,
    /// Lowest detail level.
    #[arg(long, allow_hyphen_values = true)]
    j0: Option<i32>,
    /// Decomposition levels (the grid has 2^levels samples).
    #[arg(long)]
    levels: Option<u32>,
}

#[derive(Args)]
struct FormulationArgs {
    #[arg(long, default_value = "new")]
    formulation: Formulation,
    /// Level-0 approximation weight (original/alternative formulations).
    #[arg(long)]
    c0: Option<f64>,
    /// Detail weight (original/alternative formulations).
    #[arg(long)]
    c1: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
    s: Vec<f64>,
    #[command(flatten)]
    wavelet: WaveletArgs,
    #[command(flatten)]
    formulation: FormulationArgs,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Parameter range as `lo,hi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    range: Option<Vec<f64>>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid points on [0, 3] for the exact solver.
    #[arg(long, default_value_t = 1000)]
    exact_points: usize,
    /// Use the full 22 decomposition levels instead of 18.
    #[arg(long, conflicts_with = "levels")]
    full: bool,
}

#[derive(Args)]
struct DistanceArgs {
    /// `uniform:LO,HI` or `bump:CENTER,HALF_WIDTH`.
    #[arg(long)]
    p: String,
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[command(flatten)]
    wavelet: WaveletArgs,
    #[command(flatten)]
    formulation: FormulationArgs,
}

#[derive(Args)]
struct EmbedArgs {
    /// `uniform:LO,HI` or `bump:CENTER,HALF_WIDTH`.
    #[arg(long)]
    density: String,
    #[command(flatten)]
    wavelet: WaveletArgs,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, default_value = "db10")]
    wavelet: String,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
}

const DEFAULT_J0: i32 = -11;
const DEFAULT_LEVELS: u32 = 18;
const FULL_LEVELS: u32 = 22;

fn parse_density(spec: &str) -> Result<Density> {
    let bad = || Error::Parse(format!("bad density `{spec}` (expected uniform:LO,HI or bump:CENTER,HALF_WIDTH)"));
    let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
    let values: Vec<f64> = args
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match (kind, &values[..]) {
        ("uniform", &[lo, hi]) => Density::uniform(lo, hi),
        ("bump", &[center, half_width]) => Density::bump(center, half_width),
        _ => Err(bad()),
    }
}

fn config(s: f64, j0: i32, levels: u32, wavelet: &str, f: &FormulationArgs) -> DistanceConfig {
    let cfg = DistanceConfig::new(s, j0, levels, wavelet, f.formulation);
    let (c0, c1) = (f.c0.unwrap_or(cfg.c0), f.c1.unwrap_or(cfg.c1));
    cfg.with_constants(c0, c1)
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let family = args.family;
    let levels = match (args.wavelet.levels, args.full) {
        (Some(levels), _) => levels,
        (None, true) => FULL_LEVELS,
        (None, false) => DEFAULT_LEVELS,
    };
    let j0 = args.wavelet.j0.unwrap_or(family.default_j0());
    let first_s = args.s.first().copied().unwrap_or(1.0);
    let cfg = config(first_s, j0, levels, &args.wavelet.wavelet, &args.formulation);
    let param_range = match args.range.as_deref() {
        None => family.default_range(),
        Some(&[lo, hi]) => (lo, hi),
        Some(_) => return Err(Error::Parse("--range expects `lo,hi`".into())),
    };
    let spec = SimulationSpec {
        family,
        count: args.count,
        param_range,
        s_values: args.s,
        cfg,
        exact_grid_points: args.exact_points,
    };
    let rows = run_simulation(&spec)?;
    match args.out {
        Some(path) => emit_csv(&rows, &path),
        None => write_csv(&rows, std::io::stdout().lock()).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Distance(args) => {
            let cfg = config(
                args.s,
                args.wavelet.j0.unwrap_or(DEFAULT_J0),
                args.wavelet.levels.unwrap_or(DEFAULT_LEVELS),
                &args.wavelet.wavelet,
                &args.formulation,
            );
            let value = distance(&parse_density(&args.p)?, &parse_density(&args.q)?, &cfg)?;
            println!("{value}");
            Ok(())
        }
        Command::Embed(args) => {
            let cfg = DistanceConfig::new(
                1.0,
                args.wavelet.j0.unwrap_or(DEFAULT_J0),
                args.wavelet.levels.unwrap_or(DEFAULT_LEVELS),
                &args.wavelet.wavelet,
                Formulation::New,
            );
            let vector = embed(&parse_density(&args.density)?, &cfg)?;
            match args.out {
                Some(path) => vector.write(&path),
                None => std::io::stdout()
                    .lock()
                    .write_all(vector.to_text().as_bytes())
                    .map_err(|source| Error::Io {
                        path: "<stdout>".into(),
                        source,
                    }),
            }
        }
        Command::Constants(args) => {
            let system = WaveletSystem::build(&args.wavelet)?;
            let c = estimate_constants(&system, args.s)?;
            println!("a11 {}\na12 {}\na13 {}", c.a11, c.a12, c.a13);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavws: error: {e}");
            ExitCode::FAILURE
        }
    }
}
