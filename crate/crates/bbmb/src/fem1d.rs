//! Piecewise-linear Galerkin assembly on 1D meshes.
//!
//! All operators are built from the hat-function basis: mass, stiffness and
//! linear convection matrices, the nonlinear convection vector `(w w_x, phi_i)`
//! with its Newton linearization, the discrete Laplacian, and the auxiliary
//! elliptic projection used to move analytic initial data into the FEM space.

use std::sync::Arc;

use crate::mesh::Mesh;
use crate::{Error, Result};

/// 4-point Gauss-Legendre rule on [-1, 1]; exact through degree 7.
pub(crate) const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// A continuous piecewise-linear function identified by its nodal values.
#[derive(Debug, Clone)]
pub struct NodalField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl NodalField {
    pub fn zeros(mesh: Arc<Mesh>) -> NodalField {
        let n = mesh.n_nodes();
        NodalField {
            mesh,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<NodalField> {
        if values.len() != mesh.n_nodes() {
            return Err(Error::InvalidMesh(format!(
                "field has {} values for a mesh with {} nodes",
                values.len(),
                mesh.n_nodes()
            )));
        }
        Ok(NodalField { mesh, values })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn(f64) -> f64) -> NodalField {
        let values = mesh.nodes().iter().map(|&x| f(x)).collect();
        NodalField { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at the left endpoint x = 0.
    pub fn left(&self) -> f64 {
        self.values[0]
    }

    /// Value at the right endpoint x = 1.
    pub fn right(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// One-sided slope on the first cell.
    pub fn left_slope(&self) -> f64 {
        (self.values[1] - self.values[0]) / self.mesh.cell_widths()[0]
    }

    /// One-sided slope on the last cell.
    pub fn right_slope(&self) -> f64 {
        let n = self.values.len();
        (self.values[n - 1] - self.values[n - 2]) / self.mesh.cell_widths().last().unwrap()
    }

    /// Evaluates the piecewise-linear interpolant at `x` in [0, 1].
    pub fn eval(&self, x: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let j = match nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(j) => return self.values[j],
            Err(j) => j.clamp(1, nodes.len() - 1),
        };
        let h = nodes[j] - nodes[j - 1];
        let s = (x - nodes[j - 1]) / h;
        self.values[j - 1] * (1.0 - s) + self.values[j] * s
    }
}

/// Tridiagonal matrix stored by bands.
///
/// `lower` and `upper` have length `n - 1`; `lower[i]` sits at `(i+1, i)` and
/// `upper[i]` at `(i, i+1)`.
#[derive(Debug, Clone)]
pub struct TriDiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TriDiag {
    pub fn zeros(n: usize) -> TriDiag {
        assert!(n >= 1);
        TriDiag {
            lower: vec![0.0; n - 1],
            diag: vec![0.0; n],
            upper: vec![0.0; n - 1],
        }
    }

    pub fn identity(n: usize) -> TriDiag {
        let mut m = TriDiag::zeros(n);
        m.diag.fill(1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// `self += s * other`, band by band.
    pub fn scaled_add(&mut self, other: &TriDiag, s: f64) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.diag.iter_mut().zip(&other.diag) {
            *a += s * b;
        }
        for (a, b) in self.lower.iter_mut().zip(&other.lower) {
            *a += s * b;
        }
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += s * b;
        }
    }

    /// Direct elimination without pivoting (Thomas algorithm).
    ///
    /// All systems produced by the scheme are strictly diagonally dominant,
    /// so breakdown signals a genuine modelling error rather than a need to
    /// pivot. A pivot is treated as zero when it falls below `1e-14` times
    /// the largest band entry.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .fold(0.0_f64, |m, &v| m.max(v.abs()));
        let pivot_tol = scale * 1e-14;

        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot.abs() <= pivot_tol {
            return Err(Error::EliminationBreakdown { row: 0, pivot });
        }
        if n > 1 {
            c[0] = self.upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if pivot.abs() <= pivot_tol {
                return Err(Error::EliminationBreakdown { row: i, pivot });
            }
            if i + 1 < n {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        Ok(x)
    }
}

/// Mass matrix `M_ij = (phi_j, phi_i)`; per cell `h/6 * [[2,1],[1,2]]`.
pub fn assemble_mass(mesh: &Mesh) -> TriDiag {
    let mut m = TriDiag::zeros(mesh.n_nodes());
    for (j, &h) in mesh.cell_widths().iter().enumerate() {
        m.diag[j] += h / 3.0;
        m.diag[j + 1] += h / 3.0;
        m.lower[j] += h / 6.0;
        m.upper[j] += h / 6.0;
    }
    m
}

/// Stiffness matrix `A_ij = (phi_j', phi_i')`; per cell `1/h * [[1,-1],[-1,1]]`.
pub fn assemble_stiffness(mesh: &Mesh) -> TriDiag {
    let mut a = TriDiag::zeros(mesh.n_nodes());
    for (j, &h) in mesh.cell_widths().iter().enumerate() {
        a.diag[j] += 1.0 / h;
        a.diag[j + 1] += 1.0 / h;
        a.lower[j] -= 1.0 / h;
        a.upper[j] -= 1.0 / h;
    }
    a
}

/// Linear convection matrix `B_ij = (phi_j', phi_i)`; per cell
/// `[[-1/2, 1/2], [-1/2, 1/2]]` independent of the cell width.
pub fn assemble_convection(mesh: &Mesh) -> TriDiag {
    let mut b = TriDiag::zeros(mesh.n_nodes());
    for j in 0..mesh.n_cells() {
        b.diag[j] -= 0.5;
        b.diag[j + 1] += 0.5;
        b.upper[j] += 0.5;
        b.lower[j] -= 0.5;
    }
    b
}

/// Nonlinear convection vector `N_i(w) = (w w_x, phi_i)`.
///
/// On a cell with endpoint values `(wl, wr)` the integrand is quadratic and
/// integrates exactly to `(wr - wl)(2 wl + wr)/6` against the left hat and
/// `(wr - wl)(wl + 2 wr)/6` against the right hat.
pub fn nonlinear_convection(w: &NodalField) -> Vec<f64> {
    let v = w.values();
    let mut out = vec![0.0; v.len()];
    for j in 0..w.mesh().n_cells() {
        let (wl, wr) = (v[j], v[j + 1]);
        let d = wr - wl;
        out[j] += d * (2.0 * wl + wr) / 6.0;
        out[j + 1] += d * (wl + 2.0 * wr) / 6.0;
    }
    out
}

/// Exact Newton linearization of [`nonlinear_convection`].
///
/// Tridiagonal because `N_i` only sees the nodal values of cells touching
/// node `i`.
pub fn nonlinear_convection_jacobian(w: &NodalField) -> TriDiag {
    let v = w.values();
    let mut j_mat = TriDiag::zeros(v.len());
    for j in 0..w.mesh().n_cells() {
        let (wl, wr) = (v[j], v[j + 1]);
        // d/dwl, d/dwr of the per-cell contributions above
        j_mat.diag[j] += (wr - 4.0 * wl) / 6.0;
        j_mat.upper[j] += (wl + 2.0 * wr) / 6.0;
        j_mat.lower[j] += (-2.0 * wl - wr) / 6.0;
        j_mat.diag[j + 1] += (4.0 * wr - wl) / 6.0;
    }
    j_mat
}

/// Applies the discrete Laplacian defined by
/// `(-Lap_h v, w_h) = (v_x, w_hx) + v_x(0) w_h(0) - v_x(1) w_h(1)`.
///
/// The boundary slopes are the one-sided slopes of `v` on the first and
/// last cell. The mass system is solved directly; it is positive definite
/// for any valid mesh.
pub fn discrete_laplacian_apply(
    v: &NodalField,
    mass: &TriDiag,
    stiffness: &TriDiag,
) -> Result<NodalField> {
    let n = v.values().len();
    assert_eq!(mass.dim(), n);
    assert_eq!(stiffness.dim(), n);
    let mut rhs = stiffness.matvec(v.values());
    rhs[0] += v.left_slope();
    rhs[n - 1] -= v.right_slope();
    let y = mass.solve(&rhs)?;
    NodalField::from_values(v.mesh().clone(), y.into_iter().map(|x| -x).collect())
}

/// Elliptic projection of `f` into the FEM space:
/// `(f' - p', chi') + lambda (f - p, chi) = 0` for all basis functions `chi`.
///
/// With `lambda = 1` this is the H1 inner-product projection used for
/// initial data. Loads use 4-point Gauss per cell.
pub fn auxiliary_projection(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mesh: &Arc<Mesh>,
    lambda: f64,
) -> NodalField {
    assert!(lambda > 0.0, "projection parameter must be positive");
    let n = mesh.n_nodes();
    let mut sys = assemble_stiffness(mesh);
    sys.scaled_add(&assemble_mass(mesh), lambda);

    let mut load = vec![0.0; n];
    let nodes = mesh.nodes();
    for (j, &h) in mesh.cell_widths().iter().enumerate() {
        let mid = 0.5 * (nodes[j] + nodes[j + 1]);
        for &(xi, wgt) in &GAUSS4 {
            let x = mid + 0.5 * h * xi;
            let jac = 0.5 * h * wgt;
            let phi_r = (x - nodes[j]) / h;
            let phi_l = 1.0 - phi_r;
            let fv = f(x);
            let dv = df(x);
            load[j] += jac * (dv * (-1.0 / h) + lambda * fv * phi_l);
            load[j + 1] += jac * (dv * (1.0 / h) + lambda * fv * phi_r);
        }
    }
    let vals = sys.solve(&load).expect("A + lambda*M is positive definite");
    NodalField {
        mesh: mesh.clone(),
        values: vals,
    }
}
