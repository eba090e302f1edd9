use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cutvol::fractions::{grid_fractions, GridFractions, Method};
use cutvol::grid::{coarsen, generate, read_grid, refine, write_grid, ScalarGrid, ShapeSpec};
use cutvol::metrics::{aggregate_fine_to_coarse, convergence_order, error_norms, total_volume, ErrorNorms};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_UNRESOLVED: u8 = 4;

#[derive(Parser)]
#[command(name = "cutvol", version, about = "Exact volume fractions of multilinear level-set cells")]
struct Cli {
    /// Worker threads for the per-cell map (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an analytic shape on a uniform grid.
    Shape {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Nodes per axis.
        #[arg(long, default_value_t = 65)]
        n: usize,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Per-cell fractions of a grid and their total.
    Compute {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        /// Subdivision depth for `--method oracle`.
        #[arg(long, default_value_t = 12)]
        depth: u32,
        /// Fail with exit code 4 when any cell needs the subdivision fallback.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Total-volume error against the exact measure over several resolutions.
    Converge {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Cells per axis, one resolution each.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Refinement-consistency norms for levels `0..=max-level`.
    Consistency {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_level: u32,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Refine (or with `--coarsen`, coarsen) a grid by `--levels` halvings.
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: u32,
        #[arg(long)]
        coarsen: bool,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Linear,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circle,
    Sphere,
    Zalesak,
    RandomCircles,
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Center coordinates; repeat for a union of equal circles.
    #[arg(long, value_delimiter = ',', num_args = 1.., action = clap::ArgAction::Append)]
    center: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    r: f64,
    #[arg(long, default_value_t = 0.2)]
    notch_w: f64,
    #[arg(long, default_value_t = 0.6)]
    notch_h: f64,
    #[arg(long, default_value_t = 15)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    #[arg(long, default_value_t = 0.12)]
    r_max: f64,
}

/// An error that carries its own exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

impl ShapeArgs {
    fn spec(&self) -> anyhow::Result<ShapeSpec> {
        let dim = if matches!(self.kind, Kind::Sphere) { 3 } else { 2 };
        let centers: Vec<&[f64]> = if self.center.is_empty() {
            Vec::new()
        } else if self.center.len().is_multiple_of(dim) {
            self.center.chunks(dim).collect()
        } else {
            return Err(usage(format!("--center needs {dim} coordinates per point")));
        };
        let first = || centers.first().map_or(vec![0.5; dim], |c| c.to_vec());
        let spec = match self.kind {
            Kind::Circle => {
                let pts: Vec<Vec<f64>> = if centers.is_empty() { vec![first()] } else { centers.iter().map(|c| c.to_vec()).collect() };
                let circles: Vec<ShapeSpec> = pts.iter().map(|c| ShapeSpec::Circle { center: [c[0], c[1]], r: self.r }).collect();
                if circles.len() == 1 {
                    circles.into_iter().next().unwrap()
                } else {
                    ShapeSpec::Union(circles)
                }
            }
            Kind::Sphere => {
                let c = first();
                ShapeSpec::Sphere { center: [c[0], c[1], c[2]], r: self.r }
            }
            Kind::Zalesak => {
                let c = first();
                ShapeSpec::ZalesakDisk { center: [c[0], c[1]], r: self.r, notch_w: self.notch_w, notch_h: self.notch_h }
            }
            Kind::RandomCircles => ShapeSpec::RandomCircles { count: self.count, seed: self.seed, r_range: (self.r_min, self.r_max) },
        };
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}

fn load(path: &Path) -> anyhow::Result<ScalarGrid> {
    read_grid(path).map_err(|e| Exit(EXIT_PARSE, e.to_string()).into())
}

fn emit(out: &Path, text: &str) -> anyhow::Result<()> {
    if out.as_os_str() == "-" {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn save(grid: &ScalarGrid, out: &Path) -> anyhow::Result<()> {
    if out.as_os_str() == "-" {
        emit(out, &cutvol::grid::format_lsg(grid))
    } else {
        Ok(write_grid(grid, out)?)
    }
}

fn fractions(grid: &ScalarGrid, method: Method, strict: bool) -> anyhow::Result<GridFractions> {
    let f = grid_fractions(grid, method);
    if !f.unresolved.is_empty() {
        let msg = format!("{} cell(s) unresolved by the closed form, filled by subdivision", f.unresolved.len());
        if strict {
            return Err(Exit(EXIT_UNRESOLVED, msg).into());
        }
        eprintln!("warning: {msg}");
    }
    Ok(f)
}

fn compute_csv(grid: &ScalarGrid, f: &GridFractions) -> anyhow::Result<String> {
    let mut out = String::new();
    let header = if grid.dim() == 2 { "i,j" } else { "i,j,k" };
    let extra = if f.bounds.is_some() { ",lo,hi" } else { "" };
    writeln!(out, "{header},alpha{extra}")?;
    for (c, a) in f.alpha.iter().enumerate() {
        let [i, j, k] = grid.cell_index(c);
        if grid.dim() == 2 {
            write!(out, "{i},{j},{a:?}")?;
        } else {
            write!(out, "{i},{j},{k},{a:?}")?;
        }
        if let Some(b) = &f.bounds {
            write!(out, ",{:?},{:?}", b[c].0, b[c].1)?;
        }
        out.push('\n');
    }
    writeln!(out, "total,{:?}", total_volume(grid, &f.alpha)?)?;
    Ok(out)
}

fn norms_row(out: &mut String, method: &str, level: u32, n: ErrorNorms) -> std::fmt::Result {
    writeln!(out, "{method},{level},{:e},{:e},{:e}", n.l1, n.l2, n.linf)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Shape { shape, n, out } => {
            if n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            save(&generate(&shape.spec()?, n)?, &out)
        }
        Command::Compute { input, method, depth, strict, out } => {
            let grid = load(&input)?;
            let method = match method {
                MethodArg::Analytic => Method::Analytic,
                MethodArg::Linear => Method::Linear,
                MethodArg::Oracle => Method::Oracle { depth },
            };
            let f = fractions(&grid, method, strict)?;
            emit(&out, &compute_csv(&grid, &f)?)
        }
        Command::Converge { shape, levels, strict, out } => {
            let spec = shape.spec()?;
            let Some(exact) = spec.exact_measure() else {
                return Err(usage("no closed-form measure for this shape"));
            };
            if levels.contains(&0) {
                return Err(usage("--levels entries must be positive"));
            }
            let mut text = String::from("h,error_analytic,error_linear\n");
            let (mut hs, mut ea, mut el) = (Vec::new(), Vec::new(), Vec::new());
            for &cells in &levels {
                let grid = generate(&spec, cells + 1)?;
                let a = total_volume(&grid, &fractions(&grid, Method::Analytic, strict)?.alpha)?;
                let l = total_volume(&grid, &grid_fractions(&grid, Method::Linear).alpha)?;
                hs.push(grid.h());
                ea.push((a - exact).abs());
                el.push((l - exact).abs());
                writeln!(text, "{:?},{:e},{:e}", grid.h(), ea.last().unwrap(), el.last().unwrap())?;
            }
            let oa = convergence_order(&hs, &ea)?.fitted_order;
            let ol = convergence_order(&hs, &el)?.fitted_order;
            writeln!(text, "order,{oa:.4},{ol:.4}")?;
            emit(&out, &text)
        }
        Command::Consistency { input, max_level, strict, out } => {
            let grid = load(&input)?;
            let mut text = String::from("method,level,L1,L2,Linf\n");
            for (name, method) in [("analytic", Method::Analytic), ("linear", Method::Linear)] {
                let coarse = fractions(&grid, method, strict)?.alpha;
                for level in 0..=max_level {
                    let fine = fractions(&refine(&grid, level), method, strict)?;
                    let agg = aggregate_fine_to_coarse(&fine.alpha, &fine.cells, level)?;
                    norms_row(&mut text, name, level, error_norms(&coarse, &agg)?)?;
                }
            }
            emit(&out, &text)
        }
        Command::Refine { input, levels, coarsen: down, out } => {
            let grid = load(&input)?;
            let result = if down { coarsen(&grid, levels).map_err(|e| usage(e.to_string()))? } else { refine(&grid, levels) };
            save(&result, &out)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code, _)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    match err.downcast_ref::<cutvol::Error>() {
        Some(cutvol::Error::SpecOutOfDomain(_) | cutvol::Error::InvalidArgument(_)) => EXIT_USAGE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

