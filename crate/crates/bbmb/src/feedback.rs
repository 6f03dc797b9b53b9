//! Nonlinear Neumann feedback laws, the guaranteed decay rate, and the
//! energy functionals used as runtime monitors.
//!
//! The control laws are cubic in the boundary value of the shifted state:
//!
//! ```text
//! K0(w(0)) =  (1/nu) [ (c0 + 1 + w_d) w(0) + (2/(9 c0)) w(0)^3 ]
//! K1(w(1)) = -(1/nu) [ (c1 + 1 + w_d) w(1) + (2/(9 c1)) w(1)^3 ]
//! ```
//!
//! With these, the Lyapunov value `||w||^2 + mu ||w_x||^2 + (mu/nu) E1(w)`
//! decays like `exp(-2 alpha t)` for any `alpha` up to [`alpha_bound`].

use crate::fem1d::NodalField;
use crate::{Error, Result};

/// Boundary configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Feedback control applied at both endpoints.
    BothNeumannControl,
    /// Zero Neumann data at both endpoints (the unstable baseline).
    UncontrolledZeroNeumann,
    /// Homogeneous Dirichlet at x = 0, feedback control at x = 1.
    DirichletLeftControlRight,
}

impl BoundaryMode {
    pub fn controls_left(self) -> bool {
        matches!(self, BoundaryMode::BothNeumannControl)
    }

    pub fn controls_right(self) -> bool {
        !matches!(self, BoundaryMode::UncontrolledZeroNeumann)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMode::BothNeumannControl => "both_neumann_control",
            BoundaryMode::UncontrolledZeroNeumann => "uncontrolled_zero_neumann",
            BoundaryMode::DirichletLeftControlRight => "dirichlet_left_control_right",
        }
    }

    pub fn parse(s: &str) -> Result<BoundaryMode> {
        match s {
            "both_neumann_control" => Ok(BoundaryMode::BothNeumannControl),
            "uncontrolled_zero_neumann" => Ok(BoundaryMode::UncontrolledZeroNeumann),
            "dirichlet_left_control_right" => Ok(BoundaryMode::DirichletLeftControlRight),
            other => Err(Error::Config(format!("unknown boundary mode `{other}`"))),
        }
    }
}

/// Physical and control configuration of the shifted problem.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Dispersion coefficient, >= 0 (0 is the Burgers limit).
    pub mu: f64,
    /// Dissipation coefficient, > 0.
    pub nu: f64,
    /// Constant steady state being stabilized, >= 0.
    pub w_d: f64,
    /// Left control gain, > 0.
    pub c0: f64,
    /// Right control gain, > 0.
    pub c1: f64,
    pub mode: BoundaryMode,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParams(format!("nu must be > 0, got {}", self.nu)));
        }
        if !(self.mu >= 0.0) {
            return Err(Error::InvalidParams(format!("mu must be >= 0, got {}", self.mu)));
        }
        if !(self.w_d >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "w_d must be >= 0, got {}",
                self.w_d
            )));
        }
        if !(self.c0 > 0.0) || !(self.c1 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "control gains must be > 0, got c0 = {}, c1 = {}",
                self.c0, self.c1
            )));
        }
        Ok(())
    }
}

/// Left feedback law `K0`.
pub fn k0(w0_val: f64, p: &ModelParams) -> f64 {
    ((p.c0 + 1.0 + p.w_d) * w0_val + 2.0 / (9.0 * p.c0) * w0_val.powi(3)) / p.nu
}

/// Right feedback law `K1`.
pub fn k1(w1_val: f64, p: &ModelParams) -> f64 {
    -((p.c1 + 1.0 + p.w_d) * w1_val + 2.0 / (9.0 * p.c1) * w1_val.powi(3)) / p.nu
}

/// Largest decay rate `alpha` guaranteed by the theory:
/// `(1/2) min{ nu/(mu+1), nu/(2 mu + nu), nu g_i/(nu + g_i mu) }` with
/// `g_i = 1 + c_i + w_d`.
pub fn alpha_bound(p: &ModelParams) -> f64 {
    let mut m = (p.nu / (p.mu + 1.0)).min(p.nu / (2.0 * p.mu + p.nu));
    for c in [p.c0, p.c1] {
        let g = 1.0 + c + p.w_d;
        m = m.min(p.nu * g / (p.nu + g * p.mu));
    }
    0.5 * m
}

/// Dissipation margin `beta` associated with a decay rate `alpha`.
///
/// Rejects `alpha` above [`alpha_bound`], where positivity is no longer
/// guaranteed.
pub fn beta_constant(p: &ModelParams, alpha: f64) -> Result<f64> {
    if !(0.0..=alpha_bound(p)).contains(&alpha) {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} outside [0, {}]",
            alpha_bound(p)
        )));
    }
    let mut m = (2.0 * (p.nu - alpha * (p.mu + 1.0))).min(1.0 - 2.0 * alpha * p.mu / p.nu);
    for c in [p.c0, p.c1] {
        let g = 1.0 + c + p.w_d;
        m = m.min(g - 2.0 * alpha * (g * p.mu / p.nu + 1.0));
    }
    Ok(m)
}

fn boundary_energy(w0: f64, w1: f64, p: &ModelParams, quartic_den: f64) -> f64 {
    let mut e = 0.0;
    for (c, v) in [(p.c0, w0), (p.c1, w1)] {
        e += ((c + 1.0 + p.w_d) + v * v / (quartic_den * c)) * v * v;
    }
    e
}

/// Boundary energy `E1` with quartic weight `1/(3 c_i)`.
pub fn energy_e1(w: &NodalField, p: &ModelParams) -> f64 {
    boundary_energy(w.left(), w.right(), p, 3.0)
}

/// Boundary energy `E2` with quartic weight `1/(9 c_i)`; `E2 <= E1` always.
pub fn energy_e2(w: &NodalField, p: &ModelParams) -> f64 {
    boundary_energy(w.left(), w.right(), p, 9.0)
}

/// Boundary-derivative energy `E3`; the time derivatives are discrete
/// backward differences in practice.
pub fn energy_e3(w_t_boundary: (f64, f64), w_boundary: (f64, f64), p: &ModelParams) -> f64 {
    let mut e = 0.0;
    for (c, wt, wv) in [
        (p.c0, w_t_boundary.0, w_boundary.0),
        (p.c1, w_t_boundary.1, w_boundary.1),
    ] {
        e += ((1.0 + c + p.w_d) + 2.0 / (3.0 * c) * wv * wv) * wt * wt;
    }
    e
}

/// Continuous-dependence energy `E4` for the difference `z` of two
/// trajectories, weighted by the first trajectory's boundary values.
pub fn energy_e4(z: &NodalField, w1: &NodalField, p: &ModelParams) -> f64 {
    let mut e = 0.0;
    for (c, zv, wv) in [(p.c0, z.left(), w1.left()), (p.c1, z.right(), w1.right())] {
        e += ((1.0 + c + p.w_d) + wv * wv / (3.0 * c)) * zv * zv;
    }
    p.mu / p.nu * e
}

/// One recorded monitoring sample along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct EnergySample {
    pub t: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    /// `||w||^2 + mu ||w_x||^2 + (mu/nu) E1(w)`.
    pub lyapunov: f64,
    pub v0: f64,
    pub v1: f64,
}
