//! Triangulations of `Ω = [-1,1]²`: generators, JSON I/O and validation.
//!
//! The JSON mesh format is
//!
//! ```json
//! {"vertices": [[x, y], ...], "triangles": [[i, j, k], ...]}
//! ```
//!
//! with 0-based vertex indices. Unknown keys are ignored on load.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{max_edge_length, Point2, Triangle};
use crate::{Error, Result};

/// Smallest allowed spacing between consecutive randomized breakpoints.
pub const MIN_CELL_WIDTH: f64 = 1e-6;

/// Largest mesh for which [`validate`] runs the sampled overlap check.
pub const DISJOINTNESS_CHECK_LIMIT: usize = 5000;

#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    domain_area: f64,
}

impl Triangulation {
    /// Builds a triangulation from raw parts, rejecting out-of-range indices
    /// and degenerate triangles.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Validation(format!("non-finite vertex ({}, {})", p.x, p.y)));
        }
        for (k, t) in triangles.iter().enumerate() {
            if let Some(&i) = t.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Validation(format!(
                    "triangle {k} references vertex {i} but only {} vertices exist",
                    vertices.len()
                )));
            }
            let geom = Triangle::new(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if geom.is_degenerate() {
                return Err(Error::Validation(format!(
                    "triangle {k} is degenerate (area {:e})",
                    geom.signed_area()
                )));
            }
        }
        Ok(Self::from_parts_unchecked(vertices, triangles))
    }

    fn from_parts_unchecked(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Self {
        let domain_area = triangles
            .iter()
            .map(|t| Triangle::new(vertices[t[0]], vertices[t[1]], vertices[t[2]]).area())
            .sum();
        Self {
            vertices,
            triangles,
            domain_area,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Sum of triangle areas.
    pub fn domain_area(&self) -> f64 {
        self.domain_area
    }

    /// Number of triangles `N`.
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> Triangle {
        let [a, b, c] = self.triangles[i];
        Triangle::new(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn iter(&self) -> impl Iterator<Item = Triangle> + '_ {
        (0..self.len()).map(move |i| self.triangle(i))
    }

    /// Same vertices, triangle list rearranged so that entry `k` is the old
    /// triangle `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "order is not a permutation of 0..{}",
                    self.len()
                )));
            }
        }
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: order.len(),
            });
        }
        let triangles = order.iter().map(|&i| self.triangles[i]).collect();
        Ok(Self {
            vertices: self.vertices.clone(),
            triangles,
            domain_area: self.domain_area,
        })
    }
}

/// Structured triangulation on the breakpoints `xs × ys`, each cell split
/// along its diagonal from the lower-left to the upper-right corner.
fn split_grid(xs: &[f64], ys: &[f64]) -> Triangulation {
    let nx = xs.len();
    let mut vertices = Vec::with_capacity(nx * ys.len());
    for &y in ys {
        for &x in xs {
            vertices.push(Point2::new(x, y));
        }
    }
    let idx = |i: usize, j: usize| j * nx + i;
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ys.len() - 1));
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Triangulation::from_parts_unchecked(vertices, triangles)
}

fn uniform_breakpoints(n: usize) -> Vec<f64> {
    (0..=n).map(|i| 2.0 * i as f64 / n as f64 - 1.0).collect()
}

/// Regular Friedrichs–Keller triangulation of `[-1,1]²` with `n` cells per
/// axis: `(n+1)²` vertices `(2i/n − 1, 2j/n − 1)` and `2n²` triangles.
///
/// Vertex `(i, j)` has index `j(n+1) + i`. Triangles are listed cell by cell,
/// row-major from the bottom-left, lower triangle first.
pub fn friedrichs_keller(n: usize) -> Result<Triangulation> {
    if n == 0 {
        return Err(Error::InvalidArgument("friedrichs_keller needs n >= 1".into()));
    }
    let b = uniform_breakpoints(n);
    Ok(split_grid(&b, &b))
}

fn random_breakpoints(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut interior: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    interior.sort_by(f64::total_cmp);
    let mut b = Vec::with_capacity(n + 1);
    b.push(-1.0);
    b.extend(interior);
    b.push(1.0);
    // enforce the minimum width from both ends so ±1 stay fixed
    for k in 1..n {
        b[k] = b[k].max(b[k - 1] + MIN_CELL_WIDTH);
    }
    for k in (1..n).rev() {
        b[k] = b[k].min(b[k + 1] - MIN_CELL_WIDTH);
    }
    b
}

/// Friedrichs–Keller-type mesh on randomly partitioned axes: `n − 1` sorted
/// uniform samples in `(-1, 1)` per axis plus the endpoints `±1`.
/// Deterministic for a given `(n, seed)`.
pub fn random_axes_fk(n: usize, seed: u64) -> Result<Triangulation> {
    if n == 0 {
        return Err(Error::InvalidArgument("random_axes_fk needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = random_breakpoints(n, &mut rng);
    let ys = random_breakpoints(n, &mut rng);
    Ok(split_grid(&xs, &ys))
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

pub fn save_mesh<W: Write>(tri: &Triangulation, mut out: W) -> Result<()> {
    let file = MeshFile {
        vertices: tri.vertices.iter().map(|p| [p.x, p.y]).collect(),
        triangles: tri.triangles.clone(),
    };
    serde_json::to_writer(&mut out, &file).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_mesh<R: Read>(input: R) -> Result<Triangulation> {
    let file: MeshFile =
        serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))?;
    Triangulation::new(
        file.vertices.into_iter().map(Point2::from).collect(),
        file.triangles,
    )
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, Serialize)]
pub struct MeshDiagnostics {
    pub triangle_count: usize,
    pub vertex_count: usize,
    pub indices_valid: bool,
    pub degenerate_count: usize,
    pub min_area: f64,
    pub area_sum: f64,
    pub h_max: f64,
    /// `None` when the mesh is too large for the sampled check.
    pub disjoint: Option<bool>,
    /// First pair of triangles found to overlap.
    pub overlap: Option<(usize, usize)>,
}

impl MeshDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.indices_valid && self.degenerate_count == 0 && self.disjoint != Some(false)
    }
}

// Interior sample points, in barycentric coordinates, used by the overlap check.
const SAMPLES: [[f64; 3]; 4] = [
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [0.6, 0.2, 0.2],
    [0.2, 0.6, 0.2],
    [0.2, 0.2, 0.6],
];

/// Reports index validity, areas, `h_max`, and (for meshes up to
/// [`DISJOINTNESS_CHECK_LIMIT`] triangles) whether some interior sample point
/// of a triangle lies strictly inside another triangle.
pub fn validate(tri: &Triangulation) -> MeshDiagnostics {
    let n_vert = tri.vertices.len();
    let indices_valid = tri.triangles.iter().all(|t| t.iter().all(|&i| i < n_vert));
    let mut diag = MeshDiagnostics {
        triangle_count: tri.len(),
        vertex_count: n_vert,
        indices_valid,
        degenerate_count: 0,
        min_area: f64::INFINITY,
        area_sum: 0.0,
        h_max: 0.0,
        disjoint: None,
        overlap: None,
    };
    if !indices_valid {
        return diag;
    }
    for t in tri.iter() {
        let a = t.area();
        diag.min_area = diag.min_area.min(a);
        diag.area_sum += a;
        if t.is_degenerate() {
            diag.degenerate_count += 1;
        }
    }
    diag.h_max = max_edge_length(tri).unwrap_or(0.0);
    if tri.len() <= DISJOINTNESS_CHECK_LIMIT && diag.degenerate_count == 0 {
        diag.overlap = find_overlap(tri);
        diag.disjoint = Some(diag.overlap.is_none());
    }
    diag
}

fn find_overlap(tri: &Triangulation) -> Option<(usize, usize)> {
    if tri.is_empty() {
        return None;
    }
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &tri.vertices {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    // bucket triangles by bounding box on a coarse uniform grid
    let cells = ((tri.len() as f64).sqrt().ceil() as usize).max(1);
    let wx = ((hi.x - lo.x) / cells as f64).max(f64::MIN_POSITIVE);
    let wy = ((hi.y - lo.y) / cells as f64).max(f64::MIN_POSITIVE);
    let cell_of = |v: f64, origin: f64, w: f64| (((v - origin) / w) as usize).min(cells - 1);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (k, t) in tri.iter().enumerate() {
        let vs = t.vertices();
        let (x0, x1) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.x), b.max(p.x)));
        let (y0, y1) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.y), b.max(p.y)));
        for cy in cell_of(y0, lo.y, wy)..=cell_of(y1, lo.y, wy) {
            for cx in cell_of(x0, lo.x, wx)..=cell_of(x1, lo.x, wx) {
                buckets[cy * cells + cx].push(k);
            }
        }
    }
    for (k, t) in tri.iter().enumerate() {
        for s in SAMPLES {
            let p = t.point_at(s);
            let bucket = &buckets[cell_of(p.y, lo.y, wy) * cells + cell_of(p.x, lo.x, wx)];
            for &other in bucket {
                if other == k {
                    continue;
                }
                let l = tri.triangle(other).barycentric(p).expect("non-degenerate");
                if l.iter().all(|&v| v > 1e-9) {
                    return Some((k.min(other), k.max(other)));
                }
            }
        }
    }
    None
}
