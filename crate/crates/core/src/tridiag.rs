//! Tridiagonal matrices and the Thomas algorithm.
//!
//! Right-hand sides are `Vec3`, so one sweep solves the three Cartesian
//! components at once.

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Tridiagonal matrix stored by diagonals.
///
/// `lower[i]` is entry `(i+1, i)`, `upper[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::param(
                "tridiagonal",
                format!(
                    "inconsistent diagonals: lower {}, diag {}, upper {}",
                    lower.len(),
                    n,
                    upper.len()
                ),
            ));
        }
        Ok(Tridiagonal { lower, diag, upper })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`; zero off the three diagonals.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    /// Sum of all entries.
    pub fn total(&self) -> f64 {
        self.lower.iter().chain(&self.diag).chain(&self.upper).sum()
    }

    /// `y = A x` for a field of 3-vectors.
    pub fn mul_vec3(&self, x: &[Vec3]) -> Vec<Vec3> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = x[i] * self.diag[i];
                if i > 0 {
                    acc += x[i - 1] * self.lower[i - 1];
                }
                if i + 1 < n {
                    acc += x[i + 1] * self.upper[i];
                }
                acc
            })
            .collect()
    }

    /// `y = A x` for a scalar vector.
    pub fn mul_scalar(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = x[i] * self.diag[i];
                if i > 0 {
                    acc += x[i - 1] * self.lower[i - 1];
                }
                if i + 1 < n {
                    acc += x[i + 1] * self.upper[i];
                }
                acc
            })
            .collect()
    }

    /// Precomputes the forward-elimination coefficients.
    ///
    /// Requires strict diagonal dominance, which rules out zero pivots.
    pub fn factor(&self) -> Result<ThomasFactor> {
        let n = self.dim();
        for i in 0..n {
            let off = if i > 0 { self.lower[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.upper[i].abs() } else { 0.0 };
            if !(self.diag[i].abs() > off) {
                return Err(Error::Degenerate(format!(
                    "row {i} is not strictly diagonally dominant"
                )));
            }
        }
        let mut c = vec![0.0; n.saturating_sub(1)];
        let mut inv = vec![0.0; n];
        inv[0] = 1.0 / self.diag[0];
        if n > 1 {
            c[0] = self.upper[0] * inv[0];
        }
        for i in 1..n {
            inv[i] = 1.0 / (self.diag[i] - self.lower[i - 1] * c[i - 1]);
            if i + 1 < n {
                c[i] = self.upper[i] * inv[i];
            }
        }
        Ok(ThomasFactor {
            lower: self.lower.clone(),
            c,
            inv,
        })
    }
}

/// Stored forward sweep of the Thomas algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ThomasFactor {
    lower: Vec<f64>,
    c: Vec<f64>,
    inv: Vec<f64>,
}

impl ThomasFactor {
    pub fn dim(&self) -> usize {
        self.inv.len()
    }

    /// Solves `A x = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [Vec3]) {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        rhs[0] = rhs[0] * self.inv[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - rhs[i - 1] * self.lower[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= rhs[i + 1] * self.c[i];
        }
    }
}
