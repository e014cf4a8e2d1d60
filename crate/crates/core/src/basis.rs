//! Graded total-degree polynomial bases of `P_d(R²)`.
//!
//! Exponent pairs `(a, b)` are ordered by total degree `a + b`, then by `a`
//! ascending, so the first `dimension(m)` elements span `P_m` for every
//! `m ≤ d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::{Error, Result};

/// `dim P_m(R²) = (m+1)(m+2)/2`.
pub const fn dimension(m: usize) -> usize {
    (m + 1) * (m + 2) / 2
}

/// The `m` with `dimension(m) == len`, if any.
pub fn degree_of_dimension(len: usize) -> Option<usize> {
    (0..).take_while(|&m| dimension(m) <= len).find(|&m| dimension(m) == len)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `T_a(x) T_b(y)` with first-kind Chebyshev polynomials.
    #[default]
    ChebyshevProduct,
    /// `x^a y^b`.
    Monomial,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::ChebyshevProduct => "chebyshev_product",
            BasisKind::Monomial => "monomial",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev_product" | "chebyshev" => Ok(BasisKind::ChebyshevProduct),
            "monomial" => Ok(BasisKind::Monomial),
            other => Err(Error::InvalidArgument(format!("unknown basis kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalDegreeBasis {
    kind: BasisKind,
    degree: usize,
    exponents: Vec<(usize, usize)>,
}

impl TotalDegreeBasis {
    pub fn new(kind: BasisKind, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(dimension(degree));
        for g in 0..=degree {
            for a in 0..=g {
                exponents.push((a, g - a));
            }
        }
        Self {
            kind,
            degree,
            exponents,
        }
    }

    pub fn chebyshev(degree: usize) -> Self {
        Self::new(BasisKind::ChebyshevProduct, degree)
    }

    pub fn monomial(degree: usize) -> Self {
        Self::new(BasisKind::Monomial, degree)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    /// Leading sub-basis spanning `P_m`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m > self.degree {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a degree-{} basis to degree {m}",
                self.degree
            )));
        }
        Ok(Self::new(self.kind, m))
    }

    /// Univariate factors `q_0(t), …, q_d(t)`.
    fn univariate(&self, t: f64, out: &mut [f64]) {
        out[0] = 1.0;
        if self.degree == 0 {
            return;
        }
        out[1] = t;
        match self.kind {
            BasisKind::ChebyshevProduct => {
                for k in 2..=self.degree {
                    out[k] = 2.0 * t * out[k - 1] - out[k - 2];
                }
            }
            BasisKind::Monomial => {
                for k in 2..=self.degree {
                    out[k] = t * out[k - 1];
                }
            }
        }
    }

    /// Writes all basis values at `p` into `out` (length [`Self::len`]).
    pub fn eval_into(&self, p: Point2, out: &mut [f64]) {
        const STACK: usize = 64;
        let k = self.degree + 1;
        let (mut xs_s, mut ys_s) = ([0.0; STACK], [0.0; STACK]);
        let (mut xs_h, mut ys_h);
        let (xs, ys): (&mut [f64], &mut [f64]) = if k <= STACK {
            (&mut xs_s[..k], &mut ys_s[..k])
        } else {
            xs_h = vec![0.0; k];
            ys_h = vec![0.0; k];
            (&mut xs_h, &mut ys_h)
        };
        self.univariate(p.x, xs);
        self.univariate(p.y, ys);
        for (o, &(a, b)) in out.iter_mut().zip(&self.exponents) {
            *o = xs[a] * ys[b];
        }
    }

    pub fn eval(&self, p: Point2) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// `Σ_k coeffs[k] p_k(point)`.
    pub fn eval_poly(&self, coeffs: &[f64], p: Point2) -> Result<f64> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: coeffs.len(),
            });
        }
        Ok(self.eval(p).iter().zip(coeffs).map(|(v, c)| v * c).sum())
    }
}

pub fn eval_basis(basis: &TotalDegreeBasis, p: Point2) -> Vec<f64> {
    basis.eval(p)
}

pub fn eval_poly(coeffs: &[f64], basis: &TotalDegreeBasis, p: Point2) -> Result<f64> {
    basis.eval_poly(coeffs, p)
}
