//! Uniform lattices on `[-extent, extent]^d` and the finite-difference
//! operators defined on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Uniform 1-d or 2-d lattice including the boundary points. Nodes are
/// numbered with the first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    nodes_per_axis: usize,
    extent: f64,
}

impl Lattice {
    pub fn new(dim: usize, nodes_per_axis: usize, extent: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Domain(format!(
                "lattice dimension must be 1 or 2, got {dim}"
            )));
        }
        if nodes_per_axis < 2 {
            return Err(Error::Domain(
                "a lattice needs at least 2 nodes per axis".into(),
            ));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Domain(format!("extent must be > 0, got {extent}")));
        }
        Ok(Lattice {
            dim,
            nodes_per_axis,
            extent,
        })
    }

    /// Lattice whose spacing is as close as possible to (and not above) `spacing`.
    pub fn with_spacing(dim: usize, extent: f64, spacing: f64) -> Result<Self> {
        let intervals = (2.0 * extent / spacing - 1e-9).ceil().max(1.0) as usize;
        Lattice::new(dim, intervals + 1, extent)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.nodes_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.nodes_per_axis - 1) as f64
    }

    /// Quadrature weight `h^d` of every node.
    pub fn weights(&self) -> Vec<f64> {
        vec![self.spacing().powi(self.dim as i32); self.len()]
    }

    fn axis_coord(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.spacing()
    }

    fn axis_indices(&self, node: usize) -> [usize; 2] {
        let n = self.nodes_per_axis;
        if self.dim == 1 {
            [node, 0]
        } else {
            [node / n, node % n]
        }
    }

    fn node_index(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.nodes_per_axis + idx[1]
        }
    }

    /// Coordinates of a node (the second entry is 0 in one dimension).
    pub fn coords(&self, node: usize) -> [f64; 2] {
        let [a, b] = self.axis_indices(node);
        if self.dim == 1 {
            [self.axis_coord(a), 0.0]
        } else {
            [self.axis_coord(a), self.axis_coord(b)]
        }
    }

    /// Distance from a node to the boundary of the box.
    pub fn boundary_distance(&self, node: usize) -> f64 {
        let c = self.coords(node);
        (0..self.dim)
            .map(|k| self.extent - c[k].abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Nodes at distance at least `margin` from the boundary.
    pub fn interior(&self, margin: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.boundary_distance(i) >= margin - 1e-12)
            .collect()
    }

    fn neighbour(&self, node: usize, axis: usize, step: isize) -> Option<usize> {
        let mut idx = self.axis_indices(node);
        let k = idx[axis] as isize + step;
        if k < 0 || k >= self.nodes_per_axis as isize {
            return None;
        }
        idx[axis] = k as usize;
        Some(self.node_index(idx))
    }

    /// Centered second-difference Laplacian with zero extension outside the box.
    pub fn laplacian(&self) -> Matrix {
        let n = self.len();
        let h2 = self.spacing().powi(2);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for axis in 0..self.dim {
                m[(i, i)] -= 2.0 / h2;
                for step in [-1, 1] {
                    if let Some(j) = self.neighbour(i, axis, step) {
                        m[(i, j)] += 1.0 / h2;
                    }
                }
            }
        }
        m
    }

    /// Forward difference `(u_{i+e_axis} - u_i) / h` with zero extension.
    pub fn forward_difference(&self, axis: usize) -> Matrix {
        let n = self.len();
        let h = self.spacing();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = -1.0 / h;
            if let Some(j) = self.neighbour(i, axis, 1) {
                m[(i, j)] = 1.0 / h;
            }
        }
        m
    }

    /// Backward difference `(u_i - u_{i-e_axis}) / h` with zero extension.
    pub fn backward_difference(&self, axis: usize) -> Matrix {
        let n = self.len();
        let h = self.spacing();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0 / h;
            if let Some(j) = self.neighbour(i, axis, -1) {
                m[(i, j)] = -1.0 / h;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let l = Lattice::new(1, 5, 2.0).unwrap();
        assert_eq!(l.spacing(), 1.0);
        assert_eq!(l.coords(0)[0], -2.0);
        assert_eq!(l.coords(4)[0], 2.0);
        assert_eq!(l.interior(1.0), vec![1, 2, 3]);
        let l2 = Lattice::new(2, 3, 1.0).unwrap();
        assert_eq!(l2.len(), 9);
        assert_eq!(l2.coords(5), [0.0, 1.0]);
        assert_eq!(l2.interior(1.0), vec![4]);
        let s = Lattice::with_spacing(1, 8.0, 0.05).unwrap();
        assert_eq!(s.nodes_per_axis(), 321);
        assert!((s.spacing() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn laplacian_is_metzler_and_annihilates_linear_functions_inside() {
        let l = Lattice::new(1, 11, 1.0).unwrap();
        let d = l.laplacian();
        assert!(d.is_metzler());
        let lin: Vec<f64> = (0..l.len()).map(|i| 3.0 * l.coords(i)[0] + 1.0).collect();
        let out = d.mat_vec(&lin).unwrap();
        for v in &out[1..10] {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn differences_of_linear_function() {
        let l = Lattice::new(2, 6, 1.0).unwrap();
        let f: Vec<f64> = (0..l.len()).map(|i| 2.0 * l.coords(i)[1]).collect();
        let fwd = l.forward_difference(1).mat_vec(&f).unwrap();
        let bwd = l.backward_difference(1).mat_vec(&f).unwrap();
        let inner = l.interior(0.5);
        for i in inner {
            assert!((fwd[i] - 2.0).abs() < 1e-12);
            assert!((bwd[i] - 2.0).abs() < 1e-12);
        }
        assert!(l.backward_difference(0).scale(-1.0).is_metzler());
    }
}
