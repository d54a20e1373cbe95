use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open axis-aligned box `∏ (lo_i, hi_i)` of admissible parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ParamBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument("parameter box needs matching, nonempty bounds".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidArgument(format!("parameter box edge {i} is [{l}, {h}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    /// One-dimensional box `(lo, hi)`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    /// Longest edge; the max-norm diameter of the box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim()).map(|i| self.edge(i)).fold(0.0, f64::max)
    }

    /// Strict membership, the box being open.
    pub fn contains(&self, mu: &[f64]) -> bool {
        mu.len() == self.dim() && mu.iter().zip(&self.lo).zip(&self.hi).all(|((m, l), h)| l < m && m < h)
    }

    pub fn check(&self, mu: &[f64]) -> Result<()> {
        if self.contains(mu) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("parameter {mu:?} outside the open box {:?}", self.as_pairs())))
        }
    }

    /// Smallest distance from `mu` to a face of the box.
    pub fn distance_to_boundary(&self, mu: &[f64]) -> f64 {
        mu.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .map(|((m, l), h)| (m - l).min(h - m))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn as_pairs(&self) -> Vec<[f64; 2]> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| [l, h]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for ParamBox {
    type Error = Error;

    fn try_from(edges: Vec<[f64; 2]>) -> Result<Self> {
        let (lo, hi) = edges.into_iter().map(|[l, h]| (l, h)).unzip();
        Self::new(lo, hi)
    }
}

impl From<ParamBox> for Vec<[f64; 2]> {
    fn from(b: ParamBox) -> Self {
        b.as_pairs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_box_excludes_faces() {
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        assert!(b.contains(&[0.5]));
        assert!(!b.contains(&[0.0]));
        assert!(!b.contains(&[1.0]));
        assert!(!b.contains(&[0.5, 0.5]));
    }

    #[test]
    fn degenerate_edges_rejected() {
        assert!(ParamBox::interval(1.0, 1.0).is_err());
        assert!(ParamBox::new(vec![], vec![]).is_err());
        assert!(ParamBox::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn boundary_distance_and_diameter() {
        let b = ParamBox::new(vec![0.0, -1.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(b.diameter(), 4.0);
        assert!((b.distance_to_boundary(&[0.1, 1.0]) - 0.1).abs() < 1e-15);
    }
}
