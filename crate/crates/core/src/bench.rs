//! Test functions, sup-norm errors and convergence sweeps with CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{lebesgue_constant, norm_bound, EvaluationGrid};
use crate::basis::{BasisKind, TotalDegreeBasis};
use crate::geometry::Point2;
use crate::mesh::{friedrichs_keller, random_axes_fk, Triangulation};
use crate::quadrature::data_averages;
use crate::selection::{fk_max_degree, select, Method};
use crate::solver::{regression_degree, Histopolant, Problem};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    F1,
    F2,
    F3,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::F1, TestFunction::F2, TestFunction::F3];

    /// `f1 = e^{x+y} sin(πxy)`, `f2 = |x + y|`, `f3 = 1 / (1 + 10(x² + y²))`.
    pub fn eval(self, p: Point2) -> f64 {
        match self {
            TestFunction::F1 => (p.x + p.y).exp() * (std::f64::consts::PI * p.x * p.y).sin(),
            TestFunction::F2 => (p.x + p.y).abs(),
            TestFunction::F3 => 1.0 / (1.0 + 10.0 * (p.x * p.x + p.y * p.y)),
        }
    }

    /// Sup norm on `[-1, 1]²` (f1 to two decimals).
    pub fn known_sup_norm(self) -> f64 {
        match self {
            TestFunction::F1 => 4.71,
            TestFunction::F2 => 2.0,
            TestFunction::F3 => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            other => Err(Error::InvalidArgument(format!("unknown test function `{other}`"))),
        }
    }
}

/// `max_ξ |f(ξ) − h(ξ)|` over the grid.
pub fn sup_error<F: Fn(Point2) -> f64>(f: F, h: &Histopolant, grid: &EvaluationGrid) -> f64 {
    grid.points()
        .iter()
        .map(|&p| (f(p) - h.eval(p)).abs())
        .fold(0.0, f64::max)
}

/// `max_ξ |f(ξ)|` over the grid.
pub fn grid_sup_norm<F: Fn(Point2) -> f64>(f: F, grid: &EvaluationGrid) -> f64 {
    grid.points().iter().map(|&p| f(p).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    #[serde(rename = "fk")]
    FriedrichsKeller,
    RandomAxes,
}

impl MeshFamily {
    pub fn build(self, n: usize, seed: u64) -> Result<Triangulation> {
        match self {
            MeshFamily::FriedrichsKeller => friedrichs_keller(n),
            MeshFamily::RandomAxes => random_axes_fk(n, seed),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeshFamily::FriedrichsKeller => "fk",
            MeshFamily::RandomAxes => "random_axes",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fk" | "friedrichs_keller" => Ok(MeshFamily::FriedrichsKeller),
            "random_axes" | "random-axes" => Ok(MeshFamily::RandomAxes),
            other => Err(Error::InvalidArgument(format!("unknown mesh family `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Histopolation,
    Regression,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Histopolation => "histopolation",
            Mode::Regression => "regression",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub family: MeshFamily,
    pub ns: Vec<usize>,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub functions: Vec<TestFunction>,
    pub modes: Vec<Mode>,
    pub grid_resolution: usize,
    /// Compute the Lebesgue constant of each selection.
    pub lebesgue: bool,
    /// Compute `ζ_d + η_d` for regression rows.
    pub norm_bound: bool,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            family: MeshFamily::FriedrichsKeller,
            ns: vec![10, 20, 40],
            seed: 0,
            methods: Method::ALL.to_vec(),
            functions: vec![TestFunction::F1],
            modes: vec![Mode::Histopolation, Mode::Regression],
            grid_resolution: 101,
            lebesgue: true,
            norm_bound: true,
        }
    }
}

/// One CSV row. Failed runs carry `status != "ok"` and NaN numerics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub m: usize,
    pub d: usize,
    pub method: Method,
    pub mode: Mode,
    pub sup_error: f64,
    pub lebesgue: Option<f64>,
    pub cond_estimate: Option<f64>,
    pub zeta_eta: Option<f64>,
    pub wall_time: f64,
    pub function: TestFunction,
    pub mesh: MeshFamily,
    pub seed: u64,
    pub status: String,
}

/// Parameters of a single run, enough to reproduce one record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub family: MeshFamily,
    pub n: usize,
    pub seed: u64,
    pub m: usize,
    /// `None` for pure histopolation.
    pub d: Option<usize>,
    pub method: Method,
    pub function: TestFunction,
    pub grid_resolution: usize,
    pub lebesgue: bool,
    pub norm_bound: bool,
}

struct RunOutcome {
    sup_error: f64,
    lebesgue: Option<f64>,
    cond: Option<f64>,
    zeta_eta: Option<f64>,
}

fn run_inner(spec: &RunSpec, tri: &Triangulation) -> Result<RunOutcome> {
    let selection = select(tri, spec.method, spec.m)?;
    let problem = Problem::new(tri, &selection, spec.d, BasisKind::ChebyshevProduct)?;
    let mu = data_averages(|p| spec.function.eval(p), tri, spec.d.unwrap_or(spec.m))?;
    let h = problem.solve(&mu)?;
    let grid = EvaluationGrid::uniform(spec.grid_resolution)?;
    let sup = sup_error(|p| spec.function.eval(p), &h, &grid);
    let lebesgue = if spec.lebesgue {
        Some(lebesgue_constant(&selection, &TotalDegreeBasis::chebyshev(spec.m), tri, &grid)?)
    } else {
        None
    };
    let zeta_eta = if spec.norm_bound && problem.is_regression() {
        Some(norm_bound(problem.moments(), &problem.constraints())?.total())
    } else {
        None
    };
    Ok(RunOutcome {
        sup_error: sup,
        lebesgue,
        cond: selection.diagnostics.condition,
        zeta_eta,
    })
}

/// Runs one configuration; errors become a record with a failure status.
pub fn run_record(spec: &RunSpec) -> ConvergenceRecord {
    let start = Instant::now();
    let tri = spec.family.build(spec.n, spec.seed);
    let big_n = tri.as_ref().map_or(0, |t| t.len());
    let outcome = tri.and_then(|t| run_inner(spec, &t));
    let wall_time = start.elapsed().as_secs_f64();
    let mode = if spec.d.is_some() { Mode::Regression } else { Mode::Histopolation };
    let base = ConvergenceRecord {
        n: spec.n,
        big_n,
        m: spec.m,
        d: spec.d.unwrap_or(spec.m),
        method: spec.method,
        mode,
        sup_error: f64::NAN,
        lebesgue: None,
        cond_estimate: None,
        zeta_eta: None,
        wall_time,
        function: spec.function,
        mesh: spec.family,
        seed: spec.seed,
        status: String::new(),
    };
    match outcome {
        Ok(o) => ConvergenceRecord {
            sup_error: o.sup_error,
            lebesgue: o.lebesgue,
            cond_estimate: o.cond,
            zeta_eta: o.zeta_eta,
            status: "ok".into(),
            ..base
        },
        Err(e) => ConvergenceRecord {
            status: failure_status(&e),
            ..base
        },
    }
}

fn failure_status(e: &Error) -> String {
    let tag = match e {
        Error::AttributionNotInjective { .. } => "attribution_not_injective",
        Error::PointUnassigned { .. } => "point_unassigned",
        Error::RankDeficient { .. } => "rank_deficient",
        Error::RankDeficientConstraints { .. } => "rank_deficient_constraints",
        Error::RankDeficientDesign { .. } => "rank_deficient_design",
        Error::SingularSystem(_) => "singular_system",
        Error::SingularKkt(_) => "singular_kkt",
        _ => "error",
    };
    tag.to_string()
}

/// For each `n`: `m = fk_max_degree(n)`, `d = m + ⌊√m⌋` in regression mode.
/// Output is sorted by `(n, method, function)`.
pub fn convergence_sweep(config: &ConvergenceConfig) -> Vec<ConvergenceRecord> {
    let mut out = Vec::new();
    for &n in &config.ns {
        let m = fk_max_degree(n);
        for &method in &config.methods {
            for &function in &config.functions {
                for &mode in &config.modes {
                    let d = match mode {
                        Mode::Histopolation => None,
                        Mode::Regression => Some(regression_degree(m)),
                    };
                    out.push(run_record(&RunSpec {
                        family: config.family,
                        n,
                        seed: config.seed,
                        m,
                        d,
                        method,
                        function,
                        grid_resolution: config.grid_resolution,
                        lebesgue: config.lebesgue,
                        norm_bound: config.norm_bound,
                    }));
                }
            }
        }
    }
    out.sort_by_key(|r| (r.n, r.method, r.function));
    out
}

/// Fraction of records whose status is not `ok`.
pub fn failure_fraction(records: &[ConvergenceRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.status != "ok").count() as f64 / records.len() as f64
}

/// CSV with a header row.
pub fn write_csv<W: Write>(records: &[ConvergenceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "n", "N", "m", "d", "method", "mode", "sup_error", "lebesgue", "cond_estimate", "zeta_eta", "wall_time",
            "function", "mesh", "seed", "status",
        ])
        .map_err(csv_error)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_norms_on_fine_grid() {
        let g = EvaluationGrid::uniform(201).unwrap();
        assert_eq!(grid_sup_norm(|p| TestFunction::F2.eval(p), &g), 2.0);
        assert_eq!(grid_sup_norm(|p| TestFunction::F3.eval(p), &g), 1.0);
        assert!((grid_sup_norm(|p| TestFunction::F1.eval(p), &g) - 4.71).abs() <= 0.02);
    }

    #[test]
    fn zero_error_for_zero() {
        let h = Histopolant {
            basis: TotalDegreeBasis::chebyshev(0),
            coeffs: vec![0.0],
            method: None,
            m: 0,
            d: 0,
            diagnostics: Default::default(),
        };
        assert_eq!(sup_error(|_| 0.0, &h, &EvaluationGrid::uniform(11).unwrap()), 0.0);
    }

    #[test]
    fn csv_header_and_rows() {
        let cfg = ConvergenceConfig {
            ns: vec![4, 3],
            methods: vec![Method::Leja, Method::Padua],
            functions: vec![TestFunction::F2],
            ..Default::default()
        };
        let recs = convergence_sweep(&cfg);
        assert_eq!(recs.len(), 8);
        assert_eq!(recs[0].n, 3);
        assert_eq!(recs[0].method, Method::Padua);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "n,N,m,d,method,mode,sup_error,lebesgue,cond_estimate,zeta_eta,wall_time,function,mesh,seed,status\n"
        ));
        assert_eq!(text.lines().count(), 9);
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
    }

    #[test]
    fn failures_become_rows() {
        let spec = RunSpec {
            family: MeshFamily::FriedrichsKeller,
            n: 1,
            seed: 0,
            m: 2,
            d: None,
            method: Method::Padua,
            function: TestFunction::F1,
            grid_resolution: 11,
            lebesgue: false,
            norm_bound: false,
        };
        let r = run_record(&spec);
        assert_eq!(r.status, "attribution_not_injective");
        assert!(r.sup_error.is_nan());
        assert_eq!(r.big_n, 2);
    }
}
