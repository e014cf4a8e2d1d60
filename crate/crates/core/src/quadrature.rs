//! Triangle averages by a collapsed (Duffy) tensor Gauss–Legendre rule, and
//! moment-matrix assembly.

use crate::basis::TotalDegreeBasis;
use crate::geometry::{Point2, Triangle};
use crate::linalg::DenseMatrix;
use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Degree offset used for averaging non-polynomial data.
pub const DATA_DEGREE_OFFSET: usize = 10;

/// Mean-value rule on a triangle: `μ(f) ≈ Σ w_k f(x(λ_k))`, `Σ w_k = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleRule {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` via Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            let step = p / d;
            t -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, t);
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = t;
        x[n - 1 - i] = -t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// A rule exact for total degree `q`, with `⌈(q+2)/2⌉²` nodes.
///
/// Gauss points `u, v` on `[0,1]` map to `ξ = u`, `η = v(1 − u)`; the
/// Jacobian `(1 − u)` adds one degree in `u`, hence the `q + 2`.
pub fn triangle_rule(q: usize) -> TriangleRule {
    let n = (q + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let u: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
    let wu: Vec<f64> = w.iter().map(|t| 0.5 * t).collect();
    let mut nodes = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let xi = u[i];
            let eta = u[j] * (1.0 - u[i]);
            nodes.push([1.0 - xi - eta, xi, eta]);
            // reference area is 1/2; mean weights are 2 × integral weights
            weights.push(2.0 * wu[i] * wu[j] * (1.0 - u[i]));
        }
    }
    TriangleRule {
        nodes,
        weights,
        exact_degree: 2 * n - 2,
    }
}

/// Mean of `f` over `t`.
pub fn average<F: Fn(Point2) -> f64>(f: F, t: &Triangle, rule: &TriangleRule) -> Result<f64> {
    t.check_non_degenerate()?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(l, w)| w * f(t.point_at(*l)))
        .sum())
}

/// Means of `f` over the triangles `rows` of `tri`, in order.
pub fn averages<F: Fn(Point2) -> f64>(
    f: F,
    tri: &Triangulation,
    rows: &[usize],
    rule: &TriangleRule,
) -> Result<Vec<f64>> {
    rows.iter().map(|&i| average(&f, &tri.triangle(i), rule)).collect()
}

/// Means of `f` over every triangle, with a rule of degree `degree + 10`.
pub fn data_averages<F: Fn(Point2) -> f64>(f: F, tri: &Triangulation, degree: usize) -> Result<Vec<f64>> {
    let rule = triangle_rule(degree + DATA_DEGREE_OFFSET);
    tri.iter().map(|t| average(&f, &t, &rule)).collect()
}

/// `W_ij = μ_{rows[i]}(p_j)`, row `i` for triangle `rows[i]`, exact for the
/// basis degree.
pub fn moment_matrix(tri: &Triangulation, rows: &[usize], basis: &TotalDegreeBasis) -> Result<DenseMatrix> {
    let rule = triangle_rule(basis.degree());
    let d = basis.len();
    let mut w = DenseMatrix::zeros(rows.len(), d);
    let mut vals = vec![0.0; d];
    for (r, &i) in rows.iter().enumerate() {
        if i >= tri.len() {
            return Err(Error::InvalidArgument(format!("triangle index {i} out of range")));
        }
        let t = tri.triangle(i);
        t.check_non_degenerate()?;
        let out = w.row_mut(r);
        for (l, &wt) in rule.nodes.iter().zip(&rule.weights) {
            basis.eval_into(t.point_at(*l), &mut vals);
            for (o, v) in out.iter_mut().zip(&vals) {
                *o += wt * v;
            }
        }
    }
    Ok(w)
}

/// Moment matrix over all triangles in list order.
pub fn full_moment_matrix(tri: &Triangulation, basis: &TotalDegreeBasis) -> Result<DenseMatrix> {
    let rows: Vec<usize> = (0..tri.len()).collect();
    moment_matrix(tri, &rows, basis)
}

/// Point-evaluation matrix `E_ij = p_j(points[i])`.
pub fn evaluation_matrix(points: &[Point2], basis: &TotalDegreeBasis) -> DenseMatrix {
    let mut e = DenseMatrix::zeros(points.len(), basis.len());
    for (i, &p) in points.iter().enumerate() {
        basis.eval_into(p, e.row_mut(i));
    }
    e
}

/// Closed-form mean of `x^a y^b` over `t`, by expanding `x = Σ λ_k x_k` and
/// `y = Σ λ_k y_k` and using `mean(λ1^i λ2^j λ3^k) = 2 i! j! k! / (i+j+k+2)!`.
pub fn monomial_average_exact(t: &Triangle, a: usize, b: usize) -> f64 {
    let fact = |n: usize| (1..=n).fold(1.0_f64, |acc, k| acc * k as f64);
    let xs = [t.v1.x, t.v2.x, t.v3.x];
    let ys = [t.v1.y, t.v2.y, t.v3.y];
    // coefficient-of-λ-power expansion of a linear form raised to power n
    let expand = |c: [f64; 3], n: usize| {
        let mut terms = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let coeff = fact(n) / (fact(i) * fact(j) * fact(k))
                    * c[0].powi(i as i32)
                    * c[1].powi(j as i32)
                    * c[2].powi(k as i32);
                terms.push(([i, j, k], coeff));
            }
        }
        terms
    };
    let px = expand(xs, a);
    let py = expand(ys, b);
    let g = a + b;
    let mut sum = 0.0;
    for (ex, cx) in &px {
        for (ey, cy) in &py {
            let e = [ex[0] + ey[0], ex[1] + ey[1], ex[2] + ey[2]];
            sum += cx * cy * 2.0 * fact(e[0]) * fact(e[1]) * fact(e[2]) / fact(g + 2);
        }
    }
    sum
}
