//! Extraction of `M = dim P_m` triangles: Padua attribution, approximate
//! Fekete (pivoted QR of `Wᵀ`) and discrete Leja (pivoted LU of `W`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{dimension, TotalDegreeBasis};
use crate::geometry::{max_edge_length, Point2, DEFAULT_CONTAINS_TOL};
use crate::linalg::{condition_one, lu_partial_pivot, qr_column_pivot, DenseMatrix};
use crate::mesh::Triangulation;
use crate::quadrature::{full_moment_matrix, moment_matrix};
use crate::{Error, Result};

/// Pivots below this fraction of the first pivot count as rank deficient.
pub const PIVOT_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Padua,
    Fekete,
    Leja,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Padua, Method::Fekete, Method::Leja];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Padua => "padua",
            Method::Fekete => "fekete",
            Method::Leja => "leja",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "padua" => Ok(Method::Padua),
            "fekete" => Ok(Method::Fekete),
            "leja" => Ok(Method::Leja),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionDiagnostics {
    /// Pivot magnitudes in pivot order (Fekete, Leja).
    pub pivots: Vec<f64>,
    /// `attribution[k]` is the triangle holding the k-th Padua point.
    pub attribution: Vec<usize>,
    /// 1-norm condition number of the square Vandermonde on the selection,
    /// in the default Chebyshev basis of degree `m`.
    pub condition: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: Method,
    pub degree: usize,
    pub indices: Vec<usize>,
    pub diagnostics: SelectionDiagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaduaConfig {
    /// Stability parameter `0 < α < 1`; only carried for reporting.
    pub alpha: f64,
    /// Relative tolerance of the point-in-triangle test.
    pub tol: f64,
}

impl Default for PaduaConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            tol: DEFAULT_CONTAINS_TOL,
        }
    }
}

impl PaduaConfig {
    pub fn new(alpha: f64, tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {tol}")));
        }
        Ok(Self { alpha, tol })
    }
}

/// Padua points of degree `m`, ordered by `i` then `j` over `0 ≤ i + j ≤ m`.
pub fn padua_points(m: usize) -> Vec<Point2> {
    let mut pts = Vec::with_capacity(dimension(m));
    if m == 0 {
        pts.push(Point2::new(1.0, 1.0));
        return pts;
    }
    for i in 0..=m {
        for j in 0..=m - i {
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let x = s * cos_pi_ratio(j, m + 1);
            let y = s * cos_pi_ratio(i, m);
            pts.push(Point2::new(x, y));
        }
    }
    pts
}

/// `cos(π k / n)` with exact values at the symmetric points.
fn cos_pi_ratio(k: usize, n: usize) -> f64 {
    if 2 * k == n {
        0.0
    } else if 2 * k > n {
        -(std::f64::consts::PI * (n - k) as f64 / n as f64).cos()
    } else {
        (std::f64::consts::PI * k as f64 / n as f64).cos()
    }
}

/// Largest `m` with `m < π / arccos(1 − h/√2) − 1`, or 0 if none.
pub fn max_admissible_degree(h_max: f64) -> Result<usize> {
    if !(h_max > 0.0) || h_max >= std::f64::consts::SQRT_2 {
        return Err(Error::InvalidMesh(format!(
            "h_max = {h_max} must lie in (0, √2)"
        )));
    }
    Ok(degree_below(std::f64::consts::PI / (1.0 - h_max / std::f64::consts::SQRT_2).acos() - 1.0))
}

/// Friedrichs–Keller specialization `m < π / arccos((n − 2)/n) − 1`; 0 for `n < 3`.
pub fn fk_max_degree(n: usize) -> usize {
    if n < 3 {
        return 0;
    }
    let c = (n as f64 - 2.0) / n as f64;
    degree_below(std::f64::consts::PI / c.acos() - 1.0)
}

fn degree_below(bound: f64) -> usize {
    if !(bound > 0.0) {
        return 0;
    }
    // strict inequality; an exact integer bound is excluded
    let m = (bound - 1e-9).ceil() as i64 - 1;
    m.max(0) as usize
}

/// Each Padua point, in enumeration order, is attached to the first
/// triangle in list order that contains it.
pub fn extract_padua(tri: &Triangulation, m: usize, cfg: &PaduaConfig) -> Result<SelectionResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("Padua extraction needs m >= 1".into()));
    }
    let points = padua_points(m);
    let mut owner: Vec<Option<usize>> = vec![None; tri.len()];
    let mut attribution = Vec::with_capacity(points.len());
    for (k, &p) in points.iter().enumerate() {
        let t = tri
            .iter()
            .position(|t| t.contains_point(p, cfg.tol))
            .ok_or(Error::PointUnassigned { point: k, x: p.x, y: p.y })?;
        if let Some(first) = owner[t] {
            return Err(Error::AttributionNotInjective {
                first,
                second: k,
                triangle: t,
            });
        }
        owner[t] = Some(k);
        attribution.push(t);
    }
    let condition = vandermonde_condition(tri, &attribution, m);
    Ok(SelectionResult {
        method: Method::Padua,
        degree: m,
        indices: attribution.clone(),
        diagnostics: SelectionDiagnostics {
            pivots: Vec::new(),
            attribution,
            condition,
        },
    })
}

fn vandermonde_condition(tri: &Triangulation, rows: &[usize], m: usize) -> Option<f64> {
    moment_matrix(tri, rows, &TotalDegreeBasis::chebyshev(m))
        .ok()
        .map(|v| condition_one(&v))
}

fn check_sizes(tri: &Triangulation, m: usize, basis: &TotalDegreeBasis) -> Result<usize> {
    let big_m = dimension(m);
    if basis.degree() != m {
        return Err(Error::InvalidArgument(format!(
            "basis degree {} differs from selection degree {m}",
            basis.degree()
        )));
    }
    if tri.len() < big_m {
        return Err(Error::InvalidArgument(format!(
            "{} triangles cannot host dim P_{m} = {big_m} selections",
            tri.len()
        )));
    }
    Ok(big_m)
}

fn check_pivots(pivots: &[f64]) -> Result<()> {
    let first = pivots.first().copied().unwrap_or(0.0);
    for (step, &p) in pivots.iter().enumerate() {
        if !(p > PIVOT_REL_TOL * first) {
            return Err(Error::RankDeficient { step, magnitude: p });
        }
    }
    Ok(())
}

/// Approximate Fekete selection from a precomputed `W` (`N × M`).
pub fn fekete_from_moments(w: &DenseMatrix) -> Result<(Vec<usize>, Vec<f64>)> {
    let big_m = w.cols();
    let f = qr_column_pivot(&w.transpose());
    let pivots = f.diag[..big_m].to_vec();
    check_pivots(&pivots)?;
    Ok((f.perm[..big_m].to_vec(), pivots))
}

/// Discrete Leja selection from a precomputed `W` (`N × M`).
pub fn leja_from_moments(w: &DenseMatrix) -> Result<(Vec<usize>, Vec<f64>)> {
    let big_m = w.cols();
    let lu = lu_partial_pivot(w)?;
    check_pivots(&lu.pivots)?;
    Ok((lu.perm[..big_m].to_vec(), lu.pivots))
}

/// Approximate Fekete: column-pivoted QR of `Wᵀ`; the first `M` pivot columns.
pub fn extract_fekete(tri: &Triangulation, m: usize, basis: &TotalDegreeBasis) -> Result<SelectionResult> {
    check_sizes(tri, m, basis)?;
    let w = full_moment_matrix(tri, basis)?;
    let (indices, pivots) = fekete_from_moments(&w)?;
    Ok(finish(Method::Fekete, m, indices, pivots, &w))
}

/// Discrete Leja: row-pivoted LU of `W`; the first `M` pivot rows.
pub fn extract_leja(tri: &Triangulation, m: usize, basis: &TotalDegreeBasis) -> Result<SelectionResult> {
    check_sizes(tri, m, basis)?;
    let w = full_moment_matrix(tri, basis)?;
    let (indices, pivots) = leja_from_moments(&w)?;
    Ok(finish(Method::Leja, m, indices, pivots, &w))
}

fn finish(method: Method, m: usize, indices: Vec<usize>, pivots: Vec<f64>, w: &DenseMatrix) -> SelectionResult {
    let condition = Some(condition_one(&w.select_rows(&indices)));
    SelectionResult {
        method,
        degree: m,
        indices,
        diagnostics: SelectionDiagnostics {
            pivots,
            attribution: Vec::new(),
            condition,
        },
    }
}

/// Dispatch on `method`; Fekete and Leja use the default Chebyshev basis.
pub fn select(tri: &Triangulation, method: Method, m: usize) -> Result<SelectionResult> {
    match method {
        Method::Padua => extract_padua(tri, m, &PaduaConfig::default()),
        Method::Fekete => extract_fekete(tri, m, &TotalDegreeBasis::chebyshev(m)),
        Method::Leja => extract_leja(tri, m, &TotalDegreeBasis::chebyshev(m)),
    }
}

/// Admissible degree of a mesh from its `h_max`.
pub fn mesh_max_degree(tri: &Triangulation) -> Result<usize> {
    max_admissible_degree(max_edge_length(tri)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{friedrichs_keller, random_axes_fk};
    use proptest::prelude::*;

    fn det(a: &DenseMatrix) -> f64 {
        let lu = lu_partial_pivot(a).unwrap();
        let sign = {
            // parity of the permutation
            let mut seen = vec![false; lu.perm.len()];
            let mut s = 1.0;
            for i in 0..lu.perm.len() {
                if seen[i] {
                    continue;
                }
                let mut j = i;
                let mut len = 0;
                while !seen[j] {
                    seen[j] = true;
                    j = lu.perm[j];
                    len += 1;
                }
                if len % 2 == 0 {
                    s = -s;
                }
            }
            s
        };
        (0..a.rows()).map(|k| lu.upper[(k, k)]).product::<f64>() * sign
    }

    #[test]
    fn padua_examples() {
        let close = |a: &[Point2], b: &[(f64, f64)]| {
            assert_eq!(a.len(), b.len());
            for (p, q) in a.iter().zip(b) {
                assert!((p.x - q.0).abs() < 1e-15 && (p.y - q.1).abs() < 1e-15, "{p:?} vs {q:?}");
            }
        };
        close(&padua_points(1), &[(1.0, 1.0), (0.0, -1.0), (-1.0, 1.0)]);
        close(
            &padua_points(2),
            &[(1.0, 1.0), (-0.5, -1.0), (-0.5, 1.0), (-1.0, 0.0), (0.5, 0.0), (1.0, -1.0)],
        );
        assert_eq!(padua_points(6).len(), 28);
    }

    #[test]
    fn admissible_degree_examples() {
        assert_eq!(fk_max_degree(20), 5);
        assert_eq!(fk_max_degree(10), 3);
        assert_eq!(fk_max_degree(2), 0);
        for n in 3..=200 {
            let h = 2.0 * 2f64.sqrt() / n as f64;
            if h < 2f64.sqrt() {
                assert_eq!(max_admissible_degree(h).unwrap(), fk_max_degree(n), "n = {n}");
            }
        }
        assert!(matches!(max_admissible_degree(1.5), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn padua_on_fk20() {
        let tri = friedrichs_keller(20).unwrap();
        let s = extract_padua(&tri, 5, &PaduaConfig::default()).unwrap();
        assert_eq!(s.indices.len(), 21);
        let s = extract_padua(&tri, 6, &PaduaConfig::default()).unwrap();
        let mut u = s.indices.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), 28);
        for (k, p) in padua_points(6).iter().enumerate() {
            assert!(tri.triangle(s.indices[k]).contains_point(*p, 1e-12));
        }
    }

    #[test]
    fn padua_not_injective_on_two_triangles() {
        let tri = friedrichs_keller(1).unwrap();
        assert!(matches!(
            extract_padua(&tri, 2, &PaduaConfig::default()),
            Err(Error::AttributionNotInjective { .. })
        ));
    }

    #[test]
    fn padua_unassigned_outside_cover() {
        let tri = Triangulation::new(
            vec![Point2::new(-1.0, -1.0), Point2::new(0.0, -1.0), Point2::new(-1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            extract_padua(&tri, 1, &PaduaConfig::default()),
            Err(Error::PointUnassigned { point: 0, .. })
        ));
    }

    #[test]
    fn padua_config_bounds() {
        assert!(PaduaConfig::new(0.0, 1e-12).is_err());
        assert!(PaduaConfig::new(1.0, 1e-12).is_err());
        assert!(PaduaConfig::new(0.3, 1e-12).is_ok());
    }

    /// Largest |det V| over all M-subsets, by brute force.
    fn brute_force_max(w: &DenseMatrix, big_m: usize) -> f64 {
        let n = w.rows();
        let mut best = 0.0_f64;
        let mut idx: Vec<usize> = (0..big_m).collect();
        loop {
            best = best.max(det(&w.select_rows(&idx)).abs());
            let mut k = big_m;
            loop {
                if k == 0 {
                    return best;
                }
                k -= 1;
                if idx[k] < n - big_m + k {
                    idx[k] += 1;
                    for l in k + 1..big_m {
                        idx[l] = idx[l - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn fekete_and_leja_on_fk2() {
        let tri = friedrichs_keller(2).unwrap();
        let basis = TotalDegreeBasis::chebyshev(1);
        let w = full_moment_matrix(&tri, &basis).unwrap();
        let best = brute_force_max(&w, 3);
        let fek = extract_fekete(&tri, 1, &basis).unwrap();
        let leja = extract_leja(&tri, 1, &basis).unwrap();
        let dfek = det(&w.select_rows(&fek.indices)).abs();
        let dleja = det(&w.select_rows(&leja.indices)).abs();
        // the two corner triangles have the largest row norms and are forced
        // first; no completion of that pair reaches the optimum 5/3
        assert!((best - 5.0 / 3.0).abs() < 1e-13);
        assert_eq!(&fek.indices[..2], &[2, 5]);
        assert!((dfek / best - 0.8).abs() < 1e-12, "ratio {}", dfek / best);
        // Leja reaches the optimum here, so it is not dominated by Fekete
        assert_eq!(leja.indices, vec![0, 5, 6]);
        assert!((dleja - best).abs() < 1e-13);
        assert_eq!(leja.indices[0], 0, "constant column ties go to the first triangle");
    }

    #[test]
    fn square_selects_everything() {
        let tri = friedrichs_keller(1).unwrap();
        // dim P_0 = 1 but two triangles; use three disjoint triangles of FK(2) for M = 3
        let fk = friedrichs_keller(2).unwrap();
        let sub = Triangulation::new(fk.vertices().to_vec(), vec![fk.triangles()[0], fk.triangles()[3], fk.triangles()[6]]).unwrap();
        let basis = TotalDegreeBasis::chebyshev(1);
        for s in [extract_fekete(&sub, 1, &basis).unwrap(), extract_leja(&sub, 1, &basis).unwrap()] {
            let mut i = s.indices.clone();
            i.sort();
            assert_eq!(i, vec![0, 1, 2]);
        }
        assert_eq!(extract_leja(&tri, 0, &TotalDegreeBasis::chebyshev(0)).unwrap().indices, vec![0]);
    }

    #[test]
    fn fekete_idempotent() {
        let tri = friedrichs_keller(6).unwrap();
        for m in 1..=3 {
            let basis = TotalDegreeBasis::chebyshev(m);
            for method in [Method::Fekete, Method::Leja] {
                let s = select(&tri, method, m).unwrap();
                let tris: Vec<[usize; 3]> = s.indices.iter().map(|&i| tri.triangles()[i]).collect();
                let sub = Triangulation::new(tri.vertices().to_vec(), tris).unwrap();
                let again = match method {
                    Method::Fekete => extract_fekete(&sub, m, &basis).unwrap(),
                    _ => extract_leja(&sub, m, &basis).unwrap(),
                };
                let mut a: Vec<usize> = again.indices.iter().map(|&i| s.indices[i]).collect();
                let mut b = s.indices.clone();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn rank_deficient_degree_too_high() {
        // three triangles whose averages cannot determine P_1 (all centroids collinear)
        let tri = Triangulation::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.5, 1.0),
                Point2::new(2.0, 0.0),
                Point2::new(1.5, 1.0),
                Point2::new(3.0, 0.0),
                Point2::new(2.5, 1.0),
            ],
            vec![[0, 1, 2], [1, 3, 4], [3, 5, 6]],
        )
        .unwrap();
        let basis = TotalDegreeBasis::chebyshev(1);
        assert!(matches!(extract_fekete(&tri, 1, &basis), Err(Error::RankDeficient { .. })));
        assert!(matches!(extract_leja(&tri, 1, &basis), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn padua_within_admissible_degree_on_random_meshes_of_fk_type() {
        for n in 3..=25 {
            let tri = friedrichs_keller(n).unwrap();
            let m = fk_max_degree(n);
            if m >= 1 {
                assert!(extract_padua(&tri, m, &PaduaConfig::default()).is_ok(), "n = {n}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn selections_are_distinct_and_sized(n in 2usize..8, seed in any::<u64>(), m in 0usize..3) {
            let tri = random_axes_fk(n, seed).unwrap();
            prop_assume!(tri.len() >= dimension(m));
            for method in [Method::Fekete, Method::Leja] {
                if let Ok(s) = select(&tri, method, m) {
                    let mut u = s.indices.clone();
                    u.sort();
                    u.dedup();
                    prop_assert_eq!(u.len(), dimension(m));
                    prop_assert!(s.indices.iter().all(|&i| i < tri.len()));
                    let again = select(&tri, method, m).unwrap();
                    prop_assert_eq!(&again.indices, &s.indices);
                }
            }
        }

        #[test]
        fn duplicates_do_not_change_selection(n in 3usize..7, seed in any::<u64>(), m in 1usize..3, dup in 0usize..20) {
            let tri = random_axes_fk(n, seed).unwrap();
            let mut tris = tri.triangles().to_vec();
            let extra = tris[dup % tris.len()];
            tris.push(extra);
            let big = Triangulation::new(tri.vertices().to_vec(), tris).unwrap();
            for method in [Method::Fekete, Method::Leja] {
                let a = select(&tri, method, m).unwrap();
                let b = select(&big, method, m).unwrap();
                prop_assert_eq!(a.indices, b.indices);
            }
        }
    }
}
