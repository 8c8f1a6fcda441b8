use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform grid of `n` interior nodes on `(0, length)` with homogeneous
/// Dirichlet values at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    length: f64,
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return invalid(format!("domain length must be positive, got {length}"));
        }
        if n < 3 {
            return invalid(format!("need at least 3 interior nodes, got {n}"));
        }
        Ok(Self {
            length,
            n,
            h: length / (n + 1) as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Position of interior node `i` (0-based), i.e. `(i + 1) h`.
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Midpoint `x_{i-1/2}` between node `i-1` and node `i`; `i` runs over
    /// `0..=n`, the ends touching the boundary.
    pub fn midpoint(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.midpoint(i)).collect()
    }

    /// Index of the interior node sitting at `x`, if any (to a few ulps).
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let k = (x / self.h).round();
        if k < 1.0 || k > self.n as f64 {
            return None;
        }
        let i = k as usize - 1;
        ((self.node(i) - x).abs() <= 8.0 * f64::EPSILON * self.length).then_some(i)
    }

    /// The grid with `n' = 2(n + 1) - 1` nodes: halves `h` and keeps every
    /// existing node.
    pub fn refined(&self) -> Self {
        Self::new(self.length, 2 * (self.n + 1) - 1).expect("refinement of a valid grid")
    }
}
