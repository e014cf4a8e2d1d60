//! Lebesgue constants of average-based (and nodal) interpolation, Lagrange
//! coefficients, and the `ζ_d + η_d` operator-norm bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::TotalDegreeBasis;
use crate::geometry::Point2;
use crate::linalg::{DenseMatrix, SquareLu};
use crate::mesh::Triangulation;
use crate::quadrature::{evaluation_matrix, moment_matrix};
use crate::selection::SelectionResult;
use crate::solver::DirectElimination;
use crate::{Error, Result};

/// Points per axis of the default evaluation grid.
pub const DEFAULT_GRID_RESOLUTION: usize = 101;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Uniform,
    ChebyshevLobatto,
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Uniform => "uniform",
            GridKind::ChebyshevLobatto => "chebyshev_lobatto",
        })
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GridKind::Uniform),
            "chebyshev_lobatto" | "chebyshev-lobatto" => Ok(GridKind::ChebyshevLobatto),
            other => Err(Error::InvalidArgument(format!("unknown grid kind `{other}`"))),
        }
    }
}

/// Tensor grid on `[-1, 1]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationGrid {
    kind: GridKind,
    resolution: usize,
    points: Vec<Point2>,
}

impl EvaluationGrid {
    pub fn new(kind: GridKind, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!("grid resolution must be >= 2, got {resolution}")));
        }
        let r = resolution - 1;
        let axis: Vec<f64> = (0..resolution)
            .map(|k| match kind {
                // symmetric formulas keep 0 and the endpoints exact
                GridKind::Uniform => {
                    if 2 * k == r {
                        0.0
                    } else {
                        (2 * k as i64 - r as i64) as f64 / r as f64
                    }
                }
                GridKind::ChebyshevLobatto => {
                    if 2 * k == r {
                        0.0
                    } else {
                        -(std::f64::consts::PI * k as f64 / r as f64).cos()
                    }
                }
            })
            .collect();
        let mut axis = axis;
        axis[0] = -1.0;
        axis[r] = 1.0;
        let points = axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| Point2::new(x, y)))
            .collect();
        Ok(Self {
            kind,
            resolution,
            points,
        })
    }

    pub fn uniform(resolution: usize) -> Result<Self> {
        Self::new(GridKind::Uniform, resolution)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }
}

impl Default for EvaluationGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_GRID_RESOLUTION).expect("valid default grid")
    }
}

/// `V⁻¹`: column `j` holds the coefficients of the Lagrange function `ℓ_j`
/// with `μ_i(ℓ_j) = δ_ij`.
pub fn lagrange_coefficients(v: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(SquareLu::new(v)?.inverse())
}

/// `max_ξ ‖E(ξ) V⁻¹‖₁` for the evaluation matrix `E` of `grid` and any
/// square generalized Vandermonde `V` (averages or point values).
pub fn lebesgue_from_vandermonde(v: &DenseMatrix, basis: &TotalDegreeBasis, grid: &EvaluationGrid) -> Result<f64> {
    let inv = lagrange_coefficients(v)?;
    let e = evaluation_matrix(grid.points(), basis);
    Ok(e.matmul(&inv).inf_norm())
}

/// Lebesgue constant of histopolation on the selected triangles.
pub fn lebesgue_constant(
    selection: &SelectionResult,
    basis: &TotalDegreeBasis,
    tri: &Triangulation,
    grid: &EvaluationGrid,
) -> Result<f64> {
    let v = moment_matrix(tri, &selection.indices, basis)?;
    lebesgue_from_vandermonde(&v, basis, grid)
}

/// Lebesgue constant of nodal interpolation at `points` on `P_m`.
pub fn nodal_lebesgue_constant(points: &[Point2], m: usize, grid: &EvaluationGrid) -> Result<f64> {
    let basis = TotalDegreeBasis::chebyshev(m);
    if points.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            actual: points.len(),
        });
    }
    let v = evaluation_matrix(points, &basis);
    lebesgue_from_vandermonde(&v, &basis, grid)
}

/// The 1-norms entering the operator-norm bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormComponents {
    pub r1_inv: f64,
    pub qt: f64,
    pub r2: f64,
    pub a_pinv: f64,
    pub w1_r1inv_qt: f64,
    pub m_dim: usize,
    pub d_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBoundFactors {
    pub zeta: f64,
    pub eta: f64,
    pub components: NormComponents,
}

impl NormBoundFactors {
    pub fn total(&self) -> f64 {
        self.zeta + self.eta
    }
}

/// `η = ‖(AᵀA)⁻¹Aᵀ‖₁ (D + M ‖W₁R₁⁻¹Qᵀ‖₁)` and
/// `ζ = ‖R₁⁻¹‖₁ (M ‖Qᵀ‖₁ + ‖R₂‖₁ η)`, with `η = 0` when `D = M`.
///
/// The coefficient of the first term of `η` is `D`, as in the published bound,
/// even though the data vector it estimates has `N` entries.
pub fn norm_bound(w: &DenseMatrix, c: &DenseMatrix) -> Result<NormBoundFactors> {
    let f = DirectElimination::new(w, c)?;
    Ok(norm_bound_from_factors(&f, c.rows(), w.cols()))
}

pub fn norm_bound_from_factors(f: &DirectElimination, m_dim: usize, d_dim: usize) -> NormBoundFactors {
    let components = NormComponents {
        r1_inv: f.r1_inv.one_norm(),
        qt: f.q.transpose().one_norm(),
        r2: f.r2.one_norm(),
        a_pinv: f.a_pinv.one_norm(),
        w1_r1inv_qt: f.w1_r1inv_qt.one_norm(),
        m_dim,
        d_dim,
    };
    let (mf, df) = (m_dim as f64, d_dim as f64);
    let eta = if d_dim == m_dim {
        0.0
    } else {
        components.a_pinv * (df + mf * components.w1_r1inv_qt)
    };
    let zeta = components.r1_inv * (mf * components.qt + components.r2 * eta);
    NormBoundFactors { zeta, eta, components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKind;
    use crate::mesh::friedrichs_keller;
    use crate::selection::{extract_padua, padua_points, select, Method, PaduaConfig};
    use crate::solver::{regression_degree, Problem};

    #[test]
    fn grid_shapes() {
        let g = EvaluationGrid::uniform(101).unwrap();
        assert_eq!(g.points().len(), 101 * 101);
        assert!(g.points().contains(&Point2::new(0.0, 0.0)));
        assert!(g.points().contains(&Point2::new(1.0, 1.0)));
        let c = EvaluationGrid::new(GridKind::ChebyshevLobatto, 7).unwrap();
        assert!(c.points().iter().all(|p| p.x.abs() <= 1.0 && p.y.abs() <= 1.0));
        assert!(EvaluationGrid::uniform(1).is_err());
    }

    #[test]
    fn lagrange_m1() {
        let fk = friedrichs_keller(2).unwrap();
        let sel = select(&fk, Method::Fekete, 1).unwrap();
        let basis = TotalDegreeBasis::chebyshev(1);
        let v = moment_matrix(&fk, &sel.indices, &basis).unwrap();
        let l = lagrange_coefficients(&v).unwrap();
        let id = v.matmul(&l);
        assert!(id.sub(&DenseMatrix::identity(3)).max_abs() < 1e-10);
        // partition of unity: row sums of Vℓ are 1, and Σ_j ℓ_j = 1 (coefficients e_1)
        let sum: Vec<f64> = (0..3).map(|k| l.row(k).iter().sum()).collect();
        assert!((sum[0] - 1.0).abs() < 1e-12 && sum[1].abs() < 1e-12 && sum[2].abs() < 1e-12);
    }

    #[test]
    fn lebesgue_m0_is_one() {
        let fk = friedrichs_keller(1).unwrap();
        let sel = select(&fk, Method::Leja, 0).unwrap();
        let l = lebesgue_constant(&sel, &TotalDegreeBasis::chebyshev(0), &fk, &EvaluationGrid::uniform(11).unwrap()).unwrap();
        assert!((l - 1.0).abs() < 1e-14);
        let g = EvaluationGrid::uniform(11).unwrap();
        assert!((nodal_lebesgue_constant(&[Point2::new(0.2, 0.1)], 0, &g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lebesgue_at_least_one_and_grid_monotone() {
        let fk = friedrichs_keller(10).unwrap();
        for method in Method::ALL {
            let sel = select(&fk, method, 3).unwrap();
            let basis = TotalDegreeBasis::chebyshev(3);
            let coarse = lebesgue_constant(&sel, &basis, &fk, &EvaluationGrid::uniform(21).unwrap()).unwrap();
            let fine = lebesgue_constant(&sel, &basis, &fk, &EvaluationGrid::uniform(41).unwrap()).unwrap();
            assert!(coarse >= 1.0 - 1e-9);
            assert!(fine >= coarse - 1e-12);
        }
    }

    #[test]
    fn nodal_padua_matches_direct_lagrange() {
        let g = EvaluationGrid::uniform(31).unwrap();
        for m in 1..=4 {
            let pts = padua_points(m);
            let basis = TotalDegreeBasis::chebyshev(m);
            let v = evaluation_matrix(&pts, &basis);
            // Lagrange function j by solving Vᵀ c = e_j... assembled point by point
            let mut best = 0.0_f64;
            for &xi in g.points() {
                let e = basis.eval(xi);
                // ℓ(ξ) solves Vᵀ ℓ = e(ξ)
                let l = crate::linalg::solve(&v.transpose(), &e).unwrap();
                best = best.max(l.iter().map(|x| x.abs()).sum());
            }
            let ours = nodal_lebesgue_constant(&pts, m, &g).unwrap();
            assert!((ours - best).abs() < 1e-9 * best);
        }
        let l5 = nodal_lebesgue_constant(&padua_points(5), 5, &EvaluationGrid::default()).unwrap();
        let l10 = nodal_lebesgue_constant(&padua_points(10), 10, &EvaluationGrid::default()).unwrap();
        assert!(l10 >= l5);
    }

    #[test]
    fn point_rows_give_nodal_constant() {
        // same code path: substituting point rows for average rows
        let m = 3;
        let g = EvaluationGrid::uniform(41).unwrap();
        let pts = padua_points(m);
        let basis = TotalDegreeBasis::chebyshev(m);
        let v = evaluation_matrix(&pts, &basis);
        let a = lebesgue_from_vandermonde(&v, &basis, &g).unwrap();
        let b = nodal_lebesgue_constant(&pts, m, &g).unwrap();
        assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn norm_bound_square_case() {
        let fk = friedrichs_keller(6).unwrap();
        let sel = extract_padua(&fk, 2, &PaduaConfig::default()).unwrap();
        let p = Problem::new(&fk, &sel, Some(2), BasisKind::ChebyshevProduct).unwrap();
        let nb = norm_bound(p.moments(), &p.constraints()).unwrap();
        assert_eq!(nb.eta, 0.0);
        assert!(nb.zeta.is_finite() && nb.zeta > 0.0);
    }

    #[test]
    fn norm_bound_dominates_operator_norm() {
        let fk = friedrichs_keller(6).unwrap();
        let m = 2;
        let d = regression_degree(m) + 1;
        let sel = extract_padua(&fk, m, &PaduaConfig::default()).unwrap();
        let p = Problem::new(&fk, &sel, Some(d), BasisKind::ChebyshevProduct).unwrap();
        let nb = norm_bound(p.moments(), &p.constraints()).unwrap();
        let g = EvaluationGrid::uniform(31).unwrap();
        let mut best = 0.0_f64;
        let mut state = 1u64;
        for _ in 0..50 {
            let mu: Vec<f64> = (0..fk.len())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if state >> 63 == 0 { 1.0 } else { -1.0 }
                })
                .collect();
            let h = p.solve(&mu).unwrap();
            best = best.max(g.points().iter().map(|&x| h.eval(x).abs()).fold(0.0, f64::max));
        }
        assert!(nb.total() >= best, "{} < {}", nb.total(), best);
    }
}
