//! Partitions of [0, 1] for the piecewise-linear Galerkin method.

use crate::{Error, Result};

/// Tolerance for mesh geometry checks (node ordering, unit-length cover).
pub const GEOMETRY_TOL: f64 = 1e-12;

/// An ordered partition `0 = x_0 < x_1 < ... < x_N = 1`.
///
/// Immutable after construction; share it across simulations with [`std::sync::Arc`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    cell_widths: Vec<f64>,
    h_max: f64,
}

impl Mesh {
    /// Builds a mesh from explicit node coordinates.
    ///
    /// Rejects fewer than two nodes, non-increasing coordinates, and
    /// endpoints that are not exactly 0 and 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Mesh> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidMesh(format!(
                "first node must be 0, got {}",
                nodes[0]
            )));
        }
        if *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidMesh(format!(
                "last node must be 1, got {}",
                nodes.last().unwrap()
            )));
        }
        let mut cell_widths = Vec::with_capacity(nodes.len() - 1);
        for pair in nodes.windows(2) {
            let h = pair[1] - pair[0];
            if h <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "nodes not strictly increasing near x = {}",
                    pair[0]
                )));
            }
            cell_widths.push(h);
        }
        let total: f64 = cell_widths.iter().sum();
        debug_assert!((total - 1.0).abs() <= GEOMETRY_TOL);
        let h_max = cell_widths.iter().cloned().fold(0.0, f64::max);
        Ok(Mesh {
            nodes,
            cell_widths,
            h_max,
        })
    }

    /// Uniform mesh with `n_cells` equal cells. Rejects `n_cells = 0`.
    pub fn uniform(n_cells: usize) -> Result<Mesh> {
        if n_cells == 0 {
            return Err(Error::InvalidMesh("n_cells must be positive".into()));
        }
        let mut nodes: Vec<f64> = (0..=n_cells).map(|j| j as f64 / n_cells as f64).collect();
        // pin the endpoints exactly
        nodes[0] = 0.0;
        nodes[n_cells] = 1.0;
        Mesh::from_nodes(nodes)
    }

    /// Splits every cell into `factor` equal subcells.
    ///
    /// The original nodes are a subset of the refined nodes, so fields on
    /// the refined mesh can be sampled exactly at coarse nodes.
    pub fn refine(&self, factor: usize) -> Result<Mesh> {
        if factor == 0 {
            return Err(Error::InvalidMesh("refinement factor must be positive".into()));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let mut nodes = Vec::with_capacity(self.n_cells() * factor + 1);
        for (j, pair) in self.nodes.windows(2).enumerate() {
            nodes.push(pair[0]);
            let h = self.cell_widths[j];
            for s in 1..factor {
                nodes.push(pair[0] + h * s as f64 / factor as f64);
            }
        }
        nodes.push(1.0);
        Mesh::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cell_widths(&self) -> &[f64] {
        &self.cell_widths
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn n_cells(&self) -> usize {
        self.cell_widths.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Node-wise equality within `GEOMETRY_TOL`.
    pub fn approx_eq(&self, other: &Mesh) -> bool {
        self.n_nodes() == other.n_nodes()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| (a - b).abs() <= GEOMETRY_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_smallest() {
        let m = Mesh::uniform(1).unwrap();
        assert_eq!(m.nodes(), &[0.0, 1.0]);
        assert_eq!(m.h_max(), 1.0);
    }

    #[test]
    fn uniform_bisection() {
        let m = Mesh::uniform(2).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn uniform_sixty() {
        let m = Mesh::uniform(60).unwrap();
        assert!((m.h_max() - 1.0 / 60.0).abs() <= GEOMETRY_TOL);
        assert_eq!(m.n_nodes(), 61);
    }

    #[test]
    fn rejects_zero_cells() {
        assert!(Mesh::uniform(0).is_err());
    }

    #[test]
    fn refine_uniform() {
        let m = Mesh::uniform(2).unwrap();
        let r = m.refine(2).unwrap();
        assert!(r.approx_eq(&Mesh::uniform(4).unwrap()));
    }

    #[test]
    fn refine_identity() {
        let m = Mesh::uniform(5).unwrap();
        assert!(m.refine(1).unwrap().approx_eq(&m));
    }

    #[test]
    fn refine_nonuniform() {
        let m = Mesh::from_nodes(vec![0.0, 0.25, 1.0]).unwrap();
        let r = m.refine(2).unwrap();
        let expected = [0.0, 0.125, 0.25, 0.625, 1.0];
        assert_eq!(r.n_nodes(), 5);
        for (a, b) in r.nodes().iter().zip(expected.iter()) {
            assert!((a - b).abs() <= GEOMETRY_TOL);
        }
    }

    #[test]
    fn refine_node_count_and_hmax() {
        let m = Mesh::uniform(3).unwrap();
        for f in 1..=5 {
            let r = m.refine(f).unwrap();
            assert_eq!(r.n_nodes(), f * m.n_cells() + 1);
            assert!((r.h_max() - m.h_max() / f as f64).abs() <= GEOMETRY_TOL);
        }
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.4, 1.0]).is_err());
        assert!(Mesh::from_nodes(vec![0.1, 1.0]).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 0.9]).is_err());
        assert!(Mesh::from_nodes(vec![0.5]).is_err());
    }

    #[test]
    fn widths_sum_to_one() {
        let m = Mesh::from_nodes(vec![0.0, 0.1, 0.3, 0.7, 1.0]).unwrap();
        let total: f64 = m.cell_widths().iter().sum();
        assert!((total - 1.0).abs() <= GEOMETRY_TOL);
        assert!((m.h_max() - 0.4).abs() <= GEOMETRY_TOL);
    }
}
