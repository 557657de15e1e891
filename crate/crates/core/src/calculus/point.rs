use std::fmt;

use serde::{Deserialize, Serialize};

use super::jet::C;
use crate::error::{GeomError, Result};

/// A point `(z, w)` of the complexified chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    z: Vec<C>,
    w: Vec<C>,
}

impl ChartPoint {
    pub fn new(z: Vec<C>, w: Vec<C>) -> Result<Self> {
        if z.is_empty() || z.len() != w.len() {
            return Err(GeomError::argument(format!(
                "chart point needs equal nonzero lengths, got {} and {}",
                z.len(),
                w.len()
            )));
        }
        if z.iter().chain(&w).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GeomError::argument("chart point has non-finite entries"));
        }
        Ok(Self { z, w })
    }

    /// One-dimensional shorthand.
    pub fn new1(z: C, w: C) -> Result<Self> {
        Self::new(vec![z], vec![w])
    }

    /// The point `(z, z̄)` on the totally real locus.
    pub fn diagonal(z: Vec<C>) -> Result<Self> {
        let w = z.iter().map(|c| c.conj()).collect();
        Self::new(z, w)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[C] {
        &self.z
    }

    pub fn w(&self) -> &[C] {
        &self.w
    }

    /// Holomorphic coordinates `(z, w)` concatenated.
    pub fn hol(&self) -> Vec<C> {
        self.z.iter().chain(&self.w).copied().collect()
    }

    /// Values of all `4n` frame variables `(z, w, z̄, w̄)`.
    pub fn vars(&self) -> Vec<C> {
        let mut v = self.hol();
        v.extend(self.z.iter().map(|c| c.conj()));
        v.extend(self.w.iter().map(|c| c.conj()));
        v
    }

    /// Builds a point from holomorphic coordinates `(z, w)`.
    pub fn from_hol(x: &[C]) -> Result<Self> {
        let n = x.len() / 2;
        Self::new(x[..n].to_vec(), x[n..].to_vec())
    }

    /// Moves along a holomorphic displacement.
    pub fn shifted(&self, dx: &[C]) -> Result<Self> {
        let x: Vec<C> = self.hol().iter().zip(dx).map(|(a, b)| a + b).collect();
        Self::from_hol(&x)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.z.iter().zip(&self.w).all(|(z, w)| (z.conj() - w).norm() <= tol)
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[C]| {
            v.iter()
                .map(|c| format!("{}{:+}i", c.re, c.im))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "(z=[{}], w=[{}])", list(&self.z), list(&self.w))
    }
}

/// Conjugate partner of frame index `a` in a `4n` frame.
pub fn conj_index(a: usize, n: usize) -> usize {
    (a + 2 * n) % (4 * n)
}
