//! `trihist` command line: meshes, selections, histopolants, Lebesgue
//! constants, norm bounds and convergence sweeps.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use trihist::analysis::{lebesgue_constant, norm_bound, EvaluationGrid, GridKind};
use trihist::basis::{BasisKind, TotalDegreeBasis};
use trihist::bench::{convergence_sweep, sup_error, write_csv, ConvergenceConfig, MeshFamily, Mode, TestFunction};
use trihist::mesh::{friedrichs_keller, load_mesh, random_axes_fk, save_mesh, validate, Triangulation};
use trihist::quadrature::data_averages;
use trihist::selection::{mesh_max_degree, select, Method};
use trihist::solver::{regression_degree, Problem};
use trihist::Error;

#[derive(Parser)]
#[command(name = "trihist", version, about = "Polynomial histopolation from triangle averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a triangulation of [-1,1]².
    Mesh {
        #[command(subcommand)]
        kind: MeshKind,
    },
    /// Extract dim P_m triangles and print their indices.
    Select(SelectArgs),
    /// Histopolate a test function and write the histopolant as JSON.
    Histopolate(HistopolateArgs),
    /// Lebesgue constant of a selection on an evaluation grid.
    Lebesgue(LebesgueArgs),
    /// Operator-norm bound ζ_d + η_d of histopolation-regression.
    Bound(BoundArgs),
    /// Convergence sweep over mesh sizes.
    Convergence(ConvergenceArgs),
}

#[derive(Subcommand)]
enum MeshKind {
    /// Friedrichs–Keller triangulation with n cells per axis.
    Fk(MeshArgs),
    /// Friedrichs–Keller pattern on randomly partitioned axes.
    RandomAxes(MeshArgs),
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Padua,
    Fekete,
    Leja,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Padua => Method::Padua,
            MethodArg::Fekete => Method::Fekete,
            MethodArg::Leja => Method::Leja,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    F1,
    F2,
    F3,
}

impl From<FunctionArg> for TestFunction {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::F1 => TestFunction::F1,
            FunctionArg::F2 => TestFunction::F2,
            FunctionArg::F3 => TestFunction::F3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Uniform,
    ChebyshevLobatto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Fk,
    RandomAxes,
}

#[derive(Args)]
struct SelectionArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Degree m (defaults to the admissible degree of the mesh).
    #[arg(long)]
    degree: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    /// Evaluation grid points per axis.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = GridArg::Uniform)]
    grid_kind: GridArg,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    sel: SelectionArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistopolateArgs {
    #[command(flatten)]
    sel: SelectionArgs,
    /// Histopolation-regression on P_d instead of plain histopolation.
    #[arg(long)]
    regress: bool,
    /// Regression degree d (defaults to m + floor(sqrt(m))).
    #[arg(long)]
    ddeg: Option<usize>,
    #[arg(long, value_enum, default_value_t = FunctionArg::F1)]
    function: FunctionArg,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LebesgueArgs {
    #[command(flatten)]
    sel: SelectionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    sel: SelectionArgs,
    #[arg(long)]
    ddeg: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Mesh sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 40])]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Fk)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Methods, comma separated (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    method: Vec<MethodArg>,
    /// Test functions, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["f1"])]
    function: Vec<FunctionArg>,
    /// Regression rows only (d = m + floor(sqrt(m))).
    #[arg(long, conflicts_with = "both")]
    regress: bool,
    /// Histopolation and regression rows.
    #[arg(long)]
    both: bool,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Skip Lebesgue constants and norm bounds.
    #[arg(long)]
    fast: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with a process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::Io(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyMesh => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure {
            code: 1,
            message: format!("cannot create {}: {e}", p.display()),
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_mesh(path: &PathBuf) -> CliResult<Triangulation> {
    let f = File::open(path).map_err(|e| Failure {
        code: 1,
        message: format!("cannot open {}: {e}", path.display()),
    })?;
    Ok(load_mesh(BufReader::new(f))?)
}

fn grid(args: &GridArgs) -> CliResult<EvaluationGrid> {
    let kind = match args.grid_kind {
        GridArg::Uniform => GridKind::Uniform,
        GridArg::ChebyshevLobatto => GridKind::ChebyshevLobatto,
    };
    Ok(EvaluationGrid::new(kind, args.grid)?)
}

fn degree(tri: &Triangulation, requested: Option<usize>) -> CliResult<usize> {
    match requested {
        Some(m) => Ok(m),
        None => Ok(mesh_max_degree(tri)?),
    }
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    writeln!(out)?;
    Ok(())
}

fn cmd_mesh(kind: MeshKind) -> CliResult {
    let (tri, args) = match kind {
        MeshKind::Fk(a) => (friedrichs_keller(a.n)?, a),
        MeshKind::RandomAxes(a) => (random_axes_fk(a.n, a.seed)?, a),
    };
    let mut out = output(&args.out)?;
    save_mesh(&tri, &mut out)?;
    out.flush()?;
    if args.out.is_some() {
        let d = validate(&tri);
        eprintln!("{} triangles, {} vertices, h_max = {:.6}", d.triangle_count, d.vertex_count, d.h_max);
    }
    Ok(())
}

fn cmd_select(args: SelectArgs) -> CliResult {
    let tri = read_mesh(&args.sel.mesh)?;
    let m = degree(&tri, args.sel.degree)?;
    let sel = select(&tri, args.sel.method.into(), m)?;
    let mut out = output(&args.out)?;
    match args.format {
        Format::Json => write_json(
            &mut out,
            &json!({
                "method": sel.method,
                "m": m,
                "indices": sel.indices,
                "pivots": sel.diagnostics.pivots,
                "condition": sel.diagnostics.condition,
            }),
        )?,
        Format::Csv => {
            writeln!(out, "position,triangle")?;
            for (k, i) in sel.indices.iter().enumerate() {
                writeln!(out, "{k},{i}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_histopolate(args: HistopolateArgs) -> CliResult {
    let tri = read_mesh(&args.sel.mesh)?;
    let m = degree(&tri, args.sel.degree)?;
    let d = if args.regress || args.ddeg.is_some() {
        Some(args.ddeg.unwrap_or_else(|| regression_degree(m)))
    } else {
        None
    };
    let sel = select(&tri, args.sel.method.into(), m)?;
    let problem = Problem::new(&tri, &sel, d, BasisKind::ChebyshevProduct)?;
    let f = TestFunction::from(args.function);
    let mu = data_averages(|p| f.eval(p), &tri, d.unwrap_or(m))?;
    let h = problem.solve(&mu)?;
    let g = grid(&args.grid)?;
    let err = sup_error(|p| f.eval(p), &h, &g);
    let mut out = output(&args.out)?;
    serde_json::to_writer(&mut out, &h).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    writeln!(out)?;
    out.flush()?;
    eprintln!(
        "method = {}, m = {m}, d = {}, sup_error = {err:.6e}, condition = {:.3e}",
        sel.method,
        h.d,
        h.diagnostics.condition.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn cmd_lebesgue(args: LebesgueArgs) -> CliResult {
    let tri = read_mesh(&args.sel.mesh)?;
    let m = degree(&tri, args.sel.degree)?;
    let sel = select(&tri, args.sel.method.into(), m)?;
    let g = grid(&args.grid)?;
    let l = lebesgue_constant(&sel, &TotalDegreeBasis::chebyshev(m), &tri, &g)?;
    let mut out = output(&args.out)?;
    match args.format {
        Format::Json => write_json(
            &mut out,
            &json!({"method": sel.method, "m": m, "grid": g.resolution(), "lebesgue": l}),
        )?,
        Format::Csv => {
            writeln!(out, "method,m,grid,lebesgue")?;
            writeln!(out, "{},{m},{},{l}", sel.method, g.resolution())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> CliResult {
    let tri = read_mesh(&args.sel.mesh)?;
    let m = degree(&tri, args.sel.degree)?;
    let d = args.ddeg.unwrap_or_else(|| regression_degree(m));
    let sel = select(&tri, args.sel.method.into(), m)?;
    let problem = Problem::new(&tri, &sel, Some(d), BasisKind::ChebyshevProduct)?;
    let nb = norm_bound(problem.moments(), &problem.constraints())?;
    let mut out = output(&args.out)?;
    match args.format {
        Format::Json => write_json(
            &mut out,
            &json!({
                "method": sel.method,
                "m": m,
                "d": d,
                "zeta": nb.zeta,
                "eta": nb.eta,
                "total": nb.total(),
                "components": nb.components,
            }),
        )?,
        Format::Csv => {
            writeln!(out, "method,m,d,zeta,eta,total")?;
            writeln!(out, "{},{m},{d},{},{},{}", sel.method, nb.zeta, nb.eta, nb.total())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_convergence(args: ConvergenceArgs) -> CliResult {
    let methods: Vec<Method> = if args.method.is_empty() {
        Method::ALL.to_vec()
    } else {
        args.method.iter().map(|&m| m.into()).collect()
    };
    let modes = if args.both {
        vec![Mode::Histopolation, Mode::Regression]
    } else if args.regress {
        vec![Mode::Regression]
    } else {
        vec![Mode::Histopolation]
    };
    let config = ConvergenceConfig {
        family: match args.family {
            FamilyArg::Fk => MeshFamily::FriedrichsKeller,
            FamilyArg::RandomAxes => MeshFamily::RandomAxes,
        },
        ns: args.n,
        seed: args.seed,
        methods,
        functions: args.function.iter().map(|&f| f.into()).collect(),
        modes,
        grid_resolution: args.grid,
        lebesgue: !args.fast,
        norm_bound: !args.fast,
    };
    let records = convergence_sweep(&config);
    let mut out = output(&args.out)?;
    match args.format {
        Format::Csv => write_csv(&records, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &records).map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    let failed = records.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", records.len());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Mesh { kind } => cmd_mesh(kind),
        Command::Select(a) => cmd_select(a),
        Command::Histopolate(a) => cmd_histopolate(a),
        Command::Lebesgue(a) => cmd_lebesgue(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Convergence(a) => cmd_convergence(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
