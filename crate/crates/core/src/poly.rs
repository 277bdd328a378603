//! Dense real bivariate polynomials of bounded total degree.

use crate::error::{Error, Result};

/// Highest total degree accepted for a coupling polynomial.
pub const MAX_DEGREE: usize = 8;

const N: usize = MAX_DEGREE + 1;

/// `p(x, y) = Σ c[i][j] x^i y^j` with `i + j <= MAX_DEGREE`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    coeffs: [[f64; N]; N],
}

impl Default for BivariatePoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self {
            coeffs: [[0.0; N]; N],
        }
    }

    /// Builds a polynomial from `(deg_x, deg_y, coefficient)` terms. Repeated
    /// monomials accumulate.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Result<Self> {
        let mut p = Self::zero();
        for &(i, j, c) in terms {
            if i + j > MAX_DEGREE {
                return Err(Error::Input(format!(
                    "monomial x^{i} y^{j} exceeds maximum total degree {MAX_DEGREE}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::Input(format!("non-finite coefficient for x^{i} y^{j}")));
            }
            p.coeffs[i][j] += c;
        }
        Ok(p)
    }

    /// Nonzero terms in `(deg_x, deg_y, coefficient)` form, ordered by `deg_x` then `deg_y`.
    pub fn terms(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..N {
            for j in 0..N - i {
                if self.coeffs[i][j] != 0.0 {
                    out.push((i, j, self.coeffs[i][j]));
                }
            }
        }
        out
    }

    pub fn coefficient(&self, deg_x: usize, deg_y: usize) -> f64 {
        if deg_x + deg_y > MAX_DEGREE {
            0.0
        } else {
            self.coeffs[deg_x][deg_y]
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms().iter().map(|&(i, j, _)| i + j).max()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in y for each x-power, then Horner in x.
        let mut acc = 0.0;
        for i in (0..N).rev() {
            let mut row = 0.0;
            for j in (0..N - i).rev() {
                row = row * y + self.coeffs[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Sum of the absolute values of every monomial at `(x, y)`; the natural
    /// rounding scale for `eval`.
    pub fn magnitude_scale(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .iter()
            .map(|&(i, j, c)| c.abs() * x.abs().powi(i as i32) * y.abs().powi(j as i32))
            .sum()
    }

    pub fn d_dx(&self) -> Self {
        let mut d = Self::zero();
        for i in 1..N {
            for j in 0..N - i {
                d.coeffs[i - 1][j] = self.coeffs[i][j] * i as f64;
            }
        }
        d
    }

    pub fn d_dy(&self) -> Self {
        let mut d = Self::zero();
        for i in 0..N {
            for j in 1..N - i {
                d.coeffs[i][j - 1] = self.coeffs[i][j] * j as f64;
            }
        }
        d
    }

    /// Largest absolute coefficient, or 1 for the zero polynomial.
    pub fn coefficient_scale(&self) -> f64 {
        let m = self
            .terms()
            .iter()
            .map(|t| t.2.abs())
            .fold(0.0_f64, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }
}
