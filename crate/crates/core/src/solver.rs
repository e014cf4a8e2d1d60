//! Histopolation on a selected triangle set and the constrained least-squares
//! histopolation-regression solve.

use serde::{Deserialize, Serialize};

use crate::basis::{degree_of_dimension, dimension, BasisKind, TotalDegreeBasis};
use crate::geometry::Point2;
use crate::linalg::{
    condition_one, invert_upper, qr, qr_column_pivot_r, residual_inf, vec_inf_norm, DenseMatrix, SquareLu,
    SOLVE_RESIDUAL_TOL,
};
use crate::mesh::Triangulation;
use crate::quadrature::{data_averages, moment_matrix};
use crate::selection::{select, Method, SelectionResult};
use crate::{Error, Result};

/// Diagonal entries of a triangular factor below this fraction of the largest
/// one count as rank deficient.
pub const RANK_REL_TOL: f64 = 1e-12;

/// Solve diagnostics; not part of the serialized form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveDiagnostics {
    /// 1-norm condition number of the square system that was solved
    /// (`V` for histopolation, the KKT matrix for regression).
    pub condition: Option<f64>,
    /// `‖C a − d‖∞` (equals `‖V a − d‖∞` for histopolation).
    pub constraint_residual: f64,
    /// `‖W a − b‖₂` for regression.
    pub ls_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HistopolantWire", into = "HistopolantWire")]
pub struct Histopolant {
    pub basis: TotalDegreeBasis,
    pub coeffs: Vec<f64>,
    pub method: Option<Method>,
    pub m: usize,
    pub d: usize,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Serialize, Deserialize)]
struct HistopolantWire {
    method: Option<Method>,
    m: usize,
    d: usize,
    basis: BasisKind,
    coeffs: Vec<f64>,
}

impl From<Histopolant> for HistopolantWire {
    fn from(h: Histopolant) -> Self {
        Self {
            method: h.method,
            m: h.m,
            d: h.d,
            basis: h.basis.kind(),
            coeffs: h.coeffs,
        }
    }
}

impl TryFrom<HistopolantWire> for Histopolant {
    type Error = Error;

    fn try_from(w: HistopolantWire) -> Result<Self> {
        if w.coeffs.len() != dimension(w.d) {
            return Err(Error::DimensionMismatch {
                expected: dimension(w.d),
                actual: w.coeffs.len(),
            });
        }
        if w.m > w.d {
            return Err(Error::InvalidArgument(format!("m = {} exceeds d = {}", w.m, w.d)));
        }
        Ok(Self {
            basis: TotalDegreeBasis::new(w.basis, w.d),
            coeffs: w.coeffs,
            method: w.method,
            m: w.m,
            d: w.d,
            diagnostics: SolveDiagnostics::default(),
        })
    }
}

impl Histopolant {
    pub fn eval(&self, p: Point2) -> f64 {
        self.basis
            .eval(p)
            .iter()
            .zip(&self.coeffs)
            .map(|(v, c)| v * c)
            .sum()
    }

    pub fn is_regression(&self) -> bool {
        self.d > self.m
    }
}

/// Averages of one field: `b` over all triangles with the selection first,
/// `d` its first `M` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragesData {
    b: Vec<f64>,
    m_len: usize,
}

impl AveragesData {
    pub fn new(b: Vec<f64>, m_len: usize) -> Result<Self> {
        if m_len > b.len() {
            return Err(Error::DimensionMismatch {
                expected: m_len,
                actual: b.len(),
            });
        }
        Ok(Self { b, m_len })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn d(&self) -> &[f64] {
        &self.b[..self.m_len]
    }
}

fn check_finite(coeffs: &[f64]) -> Result<()> {
    if coeffs.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::SingularSystem("non-finite coefficients".into()))
    }
}

/// Solves `V a = d` for the coefficients of the degree-`m` histopolant.
pub fn histopolate(v: &DenseMatrix, d: &[f64], basis: &TotalDegreeBasis) -> Result<Histopolant> {
    let big_m = basis.len();
    if v.rows() != big_m || v.cols() != big_m {
        return Err(Error::DimensionMismatch {
            expected: big_m,
            actual: v.rows(),
        });
    }
    if d.len() != big_m {
        return Err(Error::DimensionMismatch {
            expected: big_m,
            actual: d.len(),
        });
    }
    let lu = SquareLu::new(v)?;
    let a = lu.solve(d);
    check_finite(&a)?;
    let res = residual_inf(v, &a, d);
    if !(res <= SOLVE_RESIDUAL_TOL * (1.0 + vec_inf_norm(d))) {
        return Err(Error::SingularSystem(format!("residual {res:e} too large")));
    }
    let condition = v.one_norm() * lu.inverse().one_norm();
    Ok(Histopolant {
        basis: basis.clone(),
        coeffs: a,
        method: None,
        m: basis.degree(),
        d: basis.degree(),
        diagnostics: SolveDiagnostics {
            condition: Some(condition),
            constraint_residual: res,
            ls_residual: None,
        },
    })
}

fn rank_check(diag: &[f64]) -> std::result::Result<(), (usize, f64)> {
    let first = diag.first().copied().unwrap_or(0.0);
    match diag.iter().position(|&p| !(p > RANK_REL_TOL * first)) {
        Some(step) => Err((step, diag[step])),
        None => Ok(()),
    }
}

fn check_shapes(w: &DenseMatrix, c: &DenseMatrix, basis: &TotalDegreeBasis) -> Result<(usize, usize, usize)> {
    let (n, dd, mm) = (w.rows(), basis.len(), c.rows());
    if w.cols() != dd || c.cols() != dd {
        return Err(Error::DimensionMismatch {
            expected: dd,
            actual: if w.cols() != dd { w.cols() } else { c.cols() },
        });
    }
    if mm > dd || dd > n {
        return Err(Error::InvalidArgument(format!(
            "need M <= D <= N, got M = {mm}, D = {dd}, N = {n}"
        )));
    }
    Ok((n, dd, mm))
}

/// Solves `min ‖W a − b‖₂` subject to `C a = d` through the KKT system
/// `[[2WᵀW, Cᵀ], [C, 0]] [a; z] = [2Wᵀb; d]`.
pub fn histopolate_regress(
    w: &DenseMatrix,
    c: &DenseMatrix,
    data: &AveragesData,
    basis: &TotalDegreeBasis,
) -> Result<Histopolant> {
    let (n, dd, mm) = check_shapes(w, c, basis)?;
    if data.b().len() != n || data.d().len() != mm {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: data.b().len(),
        });
    }
    rank_check(&qr_column_pivot_r(&c.transpose()).diag)
        .map_err(|(step, magnitude)| Error::RankDeficientConstraints { step, magnitude })?;
    rank_check(&qr_column_pivot_r(w).diag).map_err(|(step, magnitude)| Error::RankDeficientDesign { step, magnitude })?;

    let k = dd + mm;
    let gram = w.gram();
    let mut kkt = DenseMatrix::zeros(k, k);
    for i in 0..dd {
        for j in 0..dd {
            kkt[(i, j)] = 2.0 * gram[(i, j)];
        }
    }
    for i in 0..mm {
        for j in 0..dd {
            kkt[(dd + i, j)] = c[(i, j)];
            kkt[(j, dd + i)] = c[(i, j)];
        }
    }
    let mut rhs: Vec<f64> = w.tr_mul_vec(data.b()).into_iter().map(|v| 2.0 * v).collect();
    rhs.extend_from_slice(data.d());

    let lu = SquareLu::new(&kkt).map_err(|e| Error::SingularKkt(e.to_string()))?;
    let sol = lu.solve(&rhs);
    let a = sol[..dd].to_vec();
    check_finite(&a).map_err(|e| Error::SingularKkt(e.to_string()))?;
    let cres = residual_inf(c, &a, data.d());
    if !(cres <= SOLVE_RESIDUAL_TOL * (1.0 + vec_inf_norm(data.d()))) {
        return Err(Error::SingularKkt(format!("constraint residual {cres:e} too large")));
    }
    let ls = w
        .mul_vec(&a)
        .iter()
        .zip(data.b())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let condition = kkt.one_norm() * lu.inverse().one_norm();
    Ok(Histopolant {
        basis: basis.clone(),
        coeffs: a,
        method: None,
        m: degree_of_dimension(mm).unwrap_or(0),
        d: basis.degree(),
        diagnostics: SolveDiagnostics {
            condition: Some(condition),
            constraint_residual: cres,
            ls_residual: Some(ls),
        },
    })
}

/// Factors of the direct-elimination path.
///
/// With `C = Q [R₁ R₂]` and `W = [W₁ W₂]` split after the first `M` columns:
/// `A = W₂ − W₁R₁⁻¹R₂`, `b₁ = b − W₁R₁⁻¹Qᵀd`, `a₂ = (AᵀA)⁻¹Aᵀb₁`,
/// `a₁ = R₁⁻¹(Qᵀd − R₂a₂)`.
#[derive(Clone, Debug)]
pub struct DirectElimination {
    pub q: DenseMatrix,
    pub r1_inv: DenseMatrix,
    pub r2: DenseMatrix,
    /// `(AᵀA)⁻¹Aᵀ`, `(D − M) × N`.
    pub a_pinv: DenseMatrix,
    /// `W₁R₁⁻¹Qᵀ`, `N × M`.
    pub w1_r1inv_qt: DenseMatrix,
}

impl DirectElimination {
    pub fn new(w: &DenseMatrix, c: &DenseMatrix) -> Result<Self> {
        let (n, dd, mm) = (w.rows(), w.cols(), c.rows());
        if c.cols() != dd || mm > dd || dd > n {
            return Err(Error::InvalidArgument(format!(
                "need M <= D <= N and matching columns, got C {}x{}, W {}x{}",
                c.rows(),
                c.cols(),
                n,
                dd
            )));
        }
        let f = qr(c);
        let r1 = f.r.column_block(0, mm);
        let r2 = f.r.column_block(mm, dd);
        // unpivoted diagonals need not decrease; compare against the largest
        let rmax = f.diag.iter().cloned().fold(0.0, f64::max);
        if let Some(step) = f.diag.iter().position(|&v| !(v > RANK_REL_TOL * rmax)) {
            return Err(Error::RankDeficientConstraints {
                step,
                magnitude: f.diag[step],
            });
        }
        let r1_inv = invert_upper(&r1)?;
        let w1 = w.column_block(0, mm);
        let w2 = w.column_block(mm, dd);
        let w1_r1inv = w1.matmul(&r1_inv);
        let a = w2.sub(&w1_r1inv.matmul(&r2));
        let w1_r1inv_qt = w1_r1inv.matmul(&f.q.transpose());
        let a_pinv = if dd == mm {
            DenseMatrix::zeros(0, n)
        } else {
            let fa = qr(&a);
            let amax = fa.diag.iter().cloned().fold(0.0, f64::max);
            if let Some(step) = fa.diag.iter().position(|&v| !(v > RANK_REL_TOL * amax)) {
                return Err(Error::RankDeficientDesign {
                    step,
                    magnitude: fa.diag[step],
                });
            }
            invert_upper(&fa.r)?.matmul(&fa.q.transpose())
        };
        Ok(Self {
            q: f.q,
            r1_inv,
            r2,
            a_pinv,
            w1_r1inv_qt,
        })
    }

    pub fn solve(&self, b: &[f64], d: &[f64]) -> Vec<f64> {
        let qtd = self.q.tr_mul_vec(d);
        let shift = self.w1_r1inv_qt.mul_vec(d);
        let b1: Vec<f64> = b.iter().zip(&shift).map(|(x, y)| x - y).collect();
        let a2 = if self.a_pinv.rows() == 0 {
            Vec::new()
        } else {
            self.a_pinv.mul_vec(&b1)
        };
        let r2a2 = if a2.is_empty() {
            vec![0.0; qtd.len()]
        } else {
            self.r2.mul_vec(&a2)
        };
        let rhs: Vec<f64> = qtd.iter().zip(&r2a2).map(|(x, y)| x - y).collect();
        let mut a = self.r1_inv.mul_vec(&rhs);
        a.extend(a2);
        a
    }
}

/// Direct-elimination solution of the constrained least-squares problem.
pub fn direct_elimination(w: &DenseMatrix, c: &DenseMatrix, b: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    Ok(DirectElimination::new(w, c)?.solve(b, d))
}

/// Assembled linear operator for one selection on one mesh: maps triangle
/// averages to histopolant coefficients.
#[derive(Clone, Debug)]
pub struct Problem {
    method: Option<Method>,
    m: usize,
    basis: TotalDegreeBasis,
    /// Triangle indices with the selection first, the rest ascending.
    order: Vec<usize>,
    /// Reordered `W` (regression) or the square `V` (histopolation).
    w: DenseMatrix,
    regress: bool,
}

impl Problem {
    /// `d = None` gives pure histopolation on `P_m`; `Some(d)` with `d ≥ m`
    /// gives histopolation-regression on `P_d`.
    pub fn new(tri: &Triangulation, selection: &SelectionResult, d: Option<usize>, kind: BasisKind) -> Result<Self> {
        let m = selection.degree;
        if selection.indices.len() != dimension(m) {
            return Err(Error::DimensionMismatch {
                expected: dimension(m),
                actual: selection.indices.len(),
            });
        }
        let mut order = selection.indices.clone();
        let mut taken = vec![false; tri.len()];
        for &i in &order {
            if i >= tri.len() || taken[i] {
                return Err(Error::InvalidArgument(format!("invalid or repeated selection index {i}")));
            }
            taken[i] = true;
        }
        let regress = d.is_some();
        let deg = d.unwrap_or(m);
        if deg < m {
            return Err(Error::InvalidArgument(format!("regression degree {deg} below m = {m}")));
        }
        let basis = TotalDegreeBasis::new(kind, deg);
        if regress {
            order.extend((0..tri.len()).filter(|&i| !taken[i]));
        }
        let w = moment_matrix(tri, &order, &basis)?;
        Ok(Self {
            method: Some(selection.method),
            m,
            basis,
            order,
            w,
            regress,
        })
    }

    pub fn basis(&self) -> &TotalDegreeBasis {
        &self.basis
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Reordered moment matrix (`W` or `V`).
    pub fn moments(&self) -> &DenseMatrix {
        &self.w
    }

    /// Constraint block `C` (the first `M` rows).
    pub fn constraints(&self) -> DenseMatrix {
        let rows: Vec<usize> = (0..dimension(self.m)).collect();
        self.w.select_rows(&rows)
    }

    pub fn is_regression(&self) -> bool {
        self.regress
    }

    /// Solves for averages `mu` given on every triangle in mesh order.
    pub fn solve(&self, mu: &[f64]) -> Result<Histopolant> {
        let big_m = dimension(self.m);
        let b: Vec<f64> = self.order.iter().map(|&i| mu[i]).collect();
        let mut h = if self.regress {
            let data = AveragesData::new(b, big_m)?;
            histopolate_regress(&self.w, &self.constraints(), &data, &self.basis)?
        } else {
            histopolate(&self.w, &b, &self.basis)?
        };
        h.method = self.method;
        h.m = self.m;
        Ok(h)
    }

    /// Averages of the polynomial with `coeffs` over the rows of this problem,
    /// scattered back to mesh order (rows not part of the problem are NaN).
    pub fn averages_of(&self, coeffs: &[f64], mesh_len: usize) -> Vec<f64> {
        let vals = self.w.mul_vec(coeffs);
        let mut out = vec![f64::NAN; mesh_len];
        for (&i, v) in self.order.iter().zip(vals) {
            out[i] = v;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub basis: BasisKind,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            basis: BasisKind::ChebyshevProduct,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub histopolant: Histopolant,
    pub selection: SelectionResult,
}

/// Selection, reordering, assembly and solve for one field `f`.
pub fn pipeline<F: Fn(Point2) -> f64>(
    tri: &Triangulation,
    method: Method,
    m: usize,
    d: Option<usize>,
    f: F,
    opts: &PipelineOptions,
) -> Result<PipelineOutput> {
    let selection = select(tri, method, m)?;
    let problem = Problem::new(tri, &selection, d, opts.basis)?;
    let deg = d.unwrap_or(m);
    let mu = data_averages(f, tri, deg)?;
    let histopolant = problem.solve(&mu)?;
    Ok(PipelineOutput { histopolant, selection })
}

/// Regression degree `m + ⌊√m⌋`.
pub fn regression_degree(m: usize) -> usize {
    m + (m as f64).sqrt().floor() as usize
}

/// `‖A‖₁ ‖A⁻¹‖₁` of the square selection Vandermonde.
pub fn vandermonde_condition(tri: &Triangulation, selection: &SelectionResult, kind: BasisKind) -> Result<f64> {
    let v = moment_matrix(tri, &selection.indices, &TotalDegreeBasis::new(kind, selection.degree))?;
    Ok(condition_one(&v))
}
