//! Matrix-valued piecewise polynomials in `t`, optionally carrying monomial
//! factors in the parameter. These back both the random linear families and
//! the inline coefficient tables of scenario files.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `P(t) = Σ_d C_{p,d} (t - breaks[p])^d` on piece `p = [breaks[p], breaks[p+1])`.
///
/// Coefficient matrices are given row-major. Outside `[breaks[0], breaks[last]]`
/// the first or last piece is extended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pub rows: usize,
    pub cols: usize,
    pub breaks: Vec<f64>,
    /// `pieces[p][d]` is the row-major coefficient of degree `d` on piece `p`.
    pub pieces: Vec<Vec<Vec<f64>>>,
}

impl PiecewisePoly {
    pub fn constant(m: &DMatrix<f64>, a: f64, b: f64) -> Self {
        let row_major: Vec<f64> = m.transpose().as_slice().to_vec();
        Self { rows: m.nrows(), cols: m.ncols(), breaks: vec![a, b], pieces: vec![vec![row_major]] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.rows == 0 || self.cols == 0 {
            return bad("piecewise polynomial with an empty shape".into());
        }
        if self.breaks.len() < 2 || self.breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return bad(format!("breaks must ascend strictly, got {:?}", self.breaks));
        }
        if self.pieces.len() != self.breaks.len() - 1 {
            return bad(format!("{} pieces for {} breaks", self.pieces.len(), self.breaks.len()));
        }
        let size = self.rows * self.cols;
        for (p, piece) in self.pieces.iter().enumerate() {
            if piece.is_empty() {
                return bad(format!("piece {p} has no coefficients"));
            }
            if let Some(d) = piece.iter().position(|c| c.len() != size) {
                return bad(format!("piece {p}, degree {d}: expected {size} entries"));
            }
        }
        Ok(())
    }

    /// Interior breakpoints, where the polynomial may jump.
    pub fn interior_breaks(&self) -> &[f64] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    fn piece_index(&self, t: f64) -> usize {
        let k = self.breaks.partition_point(|&b| b <= t);
        k.clamp(1, self.pieces.len()) - 1
    }

    /// Adds `scale · P(t)` into a column-major buffer.
    pub fn add_into(&self, t: f64, scale: f64, out: &mut [f64]) {
        let p = self.piece_index(t);
        let s = t - self.breaks[p];
        let coeffs = &self.pieces[p];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                let v = coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c[idx]);
                out[j * self.rows + i] += scale * v;
            }
        }
    }

    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        self.add_into(t, 1.0, m.as_mut_slice());
        m
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&mut self, s: f64) {
        self.pieces.iter_mut().flatten().flatten().for_each(|c| *c *= s);
    }
}

/// One term `μ^powers · P(t)` of a parameter-dependent coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTerm {
    /// Exponent of each parameter component; empty means the constant monomial.
    #[serde(default)]
    pub mu_powers: Vec<u32>,
    pub poly: PiecewisePoly,
}

/// `Σ_k μ^{powers_k} P_k(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPiecewise {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<ParamTerm>,
}

impl ParamPiecewise {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, terms: Vec::new() }
    }

    pub fn validate(&self, param_dim: usize) -> Result<()> {
        for (k, term) in self.terms.iter().enumerate() {
            term.poly.validate()?;
            if (term.poly.rows, term.poly.cols) != (self.rows, self.cols) {
                return Err(Error::InvalidArgument(format!(
                    "term {k} is {}x{}, expected {}x{}",
                    term.poly.rows, term.poly.cols, self.rows, self.cols
                )));
            }
            if term.mu_powers.len() > param_dim {
                return Err(Error::InvalidArgument(format!("term {k} has more exponents than parameters")));
            }
        }
        Ok(())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.terms.iter().flat_map(|t| t.poly.interior_breaks().iter().copied()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn eval(&self, t: f64, mu: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for term in &self.terms {
            let w: f64 = term.mu_powers.iter().zip(mu).map(|(&p, &m)| m.powi(p as i32)).product();
            term.poly.add_into(t, w, m.as_mut_slice());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_piece() -> PiecewisePoly {
        // 1x1: t on [0, 0.5), 2 + (t - 0.5)^2 on [0.5, 1].
        PiecewisePoly {
            rows: 1,
            cols: 1,
            breaks: vec![0.0, 0.5, 1.0],
            pieces: vec![vec![vec![0.0], vec![1.0]], vec![vec![2.0], vec![0.0], vec![1.0]]],
        }
    }

    #[test]
    fn evaluates_each_piece() {
        let p = two_piece();
        p.validate().unwrap();
        assert_eq!(p.eval(0.25)[(0, 0)], 0.25);
        assert_eq!(p.eval(0.5)[(0, 0)], 2.0);
        assert!((p.eval(0.75)[(0, 0)] - 2.0625).abs() < 1e-15);
        assert_eq!(p.interior_breaks(), &[0.5]);
    }

    #[test]
    fn row_major_coefficients() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p = PiecewisePoly::constant(&m, 0.0, 1.0);
        assert_eq!(p.eval(0.3), m);
    }

    #[test]
    fn parameter_monomials() {
        let f = ParamPiecewise {
            rows: 1,
            cols: 1,
            terms: vec![
                ParamTerm { mu_powers: vec![], poly: two_piece() },
                ParamTerm { mu_powers: vec![2], poly: PiecewisePoly::constant(&DMatrix::from_element(1, 1, 1.0), 0.0, 1.0) },
            ],
        };
        f.validate(1).unwrap();
        assert!((f.eval(0.25, &[3.0])[(0, 0)] - 9.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        let mut p = two_piece();
        p.breaks = vec![0.0, 1.0];
        assert!(p.validate().is_err());
        let mut p = two_piece();
        p.pieces[1][0] = vec![1.0, 2.0];
        assert!(p.validate().is_err());
    }
}
