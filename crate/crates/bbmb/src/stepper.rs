//! Backward-Euler time stepping with Newton's method.
//!
//! Each step solves the nonlinear algebraic system produced by testing the
//! implicit scheme against every hat function. The system is tridiagonal
//! plus diagonal boundary feedback terms, so Newton's linear solves go
//! through direct tridiagonal elimination.

use std::sync::Arc;

use crate::feedback::{self, BoundaryMode, EnergySample, ModelParams};
use crate::fem1d::{
    assemble_convection, assemble_mass, assemble_stiffness, nonlinear_convection,
    nonlinear_convection_jacobian, NodalField, TriDiag,
};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Time-stepping configuration.
#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    /// Time step `k`.
    pub dt: f64,
    pub t_end: f64,
    /// Newton residual tolerance in the max-norm.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Sampling stride for recorded outputs.
    pub record_every: usize,
    /// Keep a copy of the state at every recorded instant.
    pub store_fields: bool,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return Err(Error::InvalidParams(format!(
                "dt and t_end must be positive, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iters < 1 {
            return Err(Error::InvalidParams(
                "newton_tol must be positive and newton_max_iters >= 1".into(),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParams("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 1e-4,
            t_end: 1.0,
            newton_tol: 1e-10,
            newton_max_iters: 25,
            record_every: 100,
            store_fields: false,
        }
    }
}

/// Matrices assembled once per mesh and reused across all steps.
pub struct AssembledOps {
    pub mesh: Arc<Mesh>,
    pub mass: TriDiag,
    pub stiffness: TriDiag,
    pub convection: TriDiag,
}

impl AssembledOps {
    pub fn new(mesh: Arc<Mesh>) -> AssembledOps {
        AssembledOps {
            mass: assemble_mass(&mesh),
            stiffness: assemble_stiffness(&mesh),
            convection: assemble_convection(&mesh),
            mesh,
        }
    }
}

/// Full simulation record.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub times: Vec<f64>,
    pub energy_samples: Vec<EnergySample>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    pub tnorm: Vec<f64>,
    /// Newton iterations of the step ending at each recorded instant (0 at t = 0).
    pub newton_iters: Vec<usize>,
    /// States at recorded instants, when requested.
    pub fields: Option<Vec<NodalField>>,
    pub newton_iters_max: usize,
    pub newton_iters_mean: f64,
    /// Largest per-step relative increase of the Lyapunov value over the
    /// whole run (negative when the sequence is strictly decreasing).
    pub max_lyapunov_step_increase: f64,
    pub final_state: NodalField,
}

// cubic boundary feedback contribution to the residual at one endpoint
fn boundary_residual(c: f64, wn: f64, wo: f64, p: &ModelParams, k: f64) -> f64 {
    let g = 1.0 + c + p.w_d;
    let q = 2.0 / (9.0 * c);
    k * (g * wn + q * wn.powi(3)) + p.mu / p.nu * (g * (wn - wo) + q * (wn.powi(3) - wo.powi(3)))
}

/// Residual of the fully discrete system at a Newton iterate `w_new`.
///
/// Uses the k-multiplied form (time-difference terms carry no 1/k), which
/// keeps the floating-point floor of the residual far below the Newton
/// tolerance even where the cubic boundary terms are large.
pub fn residual(
    w_new: &NodalField,
    w_old: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
    ops: &AssembledOps,
) -> Vec<f64> {
    let k = cfg.dt;
    let n = w_new.values().len();
    let diff: Vec<f64> = w_new
        .values()
        .iter()
        .zip(w_old.values())
        .map(|(a, b)| a - b)
        .collect();

    let m_diff = ops.mass.matvec(&diff);
    let a_diff = ops.stiffness.matvec(&diff);
    let a_new = ops.stiffness.matvec(w_new.values());
    let b_new = ops.convection.matvec(w_new.values());
    let nl = nonlinear_convection(w_new);

    let mut r = vec![0.0; n];
    for i in 0..n {
        r[i] = m_diff[i] + p.mu * a_diff[i]
            + k * (p.nu * a_new[i] + (1.0 + p.w_d) * b_new[i] + nl[i]);
    }
    if p.mode.controls_left() {
        r[0] += boundary_residual(p.c0, w_new.left(), w_old.left(), p, k);
    }
    if p.mode.controls_right() {
        r[n - 1] += boundary_residual(p.c1, w_new.right(), w_old.right(), p, k);
    }
    if p.mode == BoundaryMode::DirichletLeftControlRight {
        // row 0 becomes the constraint W(0) = 0
        r[0] = w_new.left();
    }
    r
}

/// Newton matrix for the fully discrete system at iterate `w_new`.
pub fn jacobian(
    w_new: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
    ops: &AssembledOps,
) -> TriDiag {
    let k = cfg.dt;
    let n = w_new.values().len();
    let mut j = nonlinear_convection_jacobian(w_new);
    for band in [&mut j.lower, &mut j.diag, &mut j.upper] {
        for v in band.iter_mut() {
            *v *= k;
        }
    }
    j.scaled_add(&ops.mass, 1.0);
    j.scaled_add(&ops.stiffness, p.mu + k * p.nu);
    j.scaled_add(&ops.convection, k * (1.0 + p.w_d));

    let time_weight = k + p.mu / p.nu;
    if p.mode.controls_left() {
        let w = w_new.left();
        j.diag[0] += ((1.0 + p.c0 + p.w_d) + 2.0 / (3.0 * p.c0) * w * w) * time_weight;
    }
    if p.mode.controls_right() {
        let w = w_new.right();
        j.diag[n - 1] += ((1.0 + p.c1 + p.w_d) + 2.0 / (3.0 * p.c1) * w * w) * time_weight;
    }
    if p.mode == BoundaryMode::DirichletLeftControlRight {
        j.diag[0] = 1.0;
        j.upper[0] = 0.0;
    }
    j
}

/// Solves a tridiagonal system by direct elimination without pivoting.
pub fn thomas_solve(m: &TriDiag, rhs: &[f64]) -> Result<Vec<f64>> {
    m.solve(rhs)
}

/// One backward-Euler step: Newton iteration starting from `w_old`.
///
/// Returns the accepted state and the iteration count (residual
/// evaluations, so an exact initial root counts as 1).
pub fn advance_step(
    w_old: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
    ops: &AssembledOps,
) -> Result<(NodalField, usize)> {
    let (w, history) = advance_step_traced(w_old, p, cfg, ops)?;
    Ok((w, history.len()))
}

/// Like [`advance_step`] but also returns the max-norm residual at every
/// Newton iterate, for convergence diagnostics.
pub fn advance_step_traced(
    w_old: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
    ops: &AssembledOps,
) -> Result<(NodalField, Vec<f64>)> {
    let mut w = w_old.clone();
    let mut history = Vec::new();
    for _ in 0..cfg.newton_max_iters {
        let r = residual(&w, w_old, p, cfg, ops);
        let norm = r.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        history.push(norm);
        if norm <= cfg.newton_tol {
            return Ok((w, history));
        }
        let j = jacobian(&w, p, cfg, ops);
        let delta = thomas_solve(&j, &r)?;
        let w_inf = w.values().iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let d_inf = delta.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        for (v, d) in w.values_mut().iter_mut().zip(&delta) {
            *v -= d;
        }
        // Stagnation = convergence: when the state grows large, the
        // absolute residual floor (~eps * |w| * |J|) can sit above the
        // tolerance even though the iterate is a root to full precision.
        if d_inf <= 4.0 * f64::EPSILON * w_inf.max(1.0) {
            return Ok((w, history));
        }
    }
    Err(Error::NewtonDivergence {
        time: f64::NAN,
        residual: *history.last().unwrap(),
        iters: cfg.newton_max_iters,
    })
}

/// Lyapunov value `||w||^2 + mu ||w_x||^2 + (mu/nu) E1(w)`.
pub fn lyapunov_value(w: &NodalField, p: &ModelParams, ops: &AssembledOps) -> f64 {
    let wv = w.values();
    let dot = |y: &[f64]| -> f64 { y.iter().zip(wv).map(|(a, b)| a * b).sum() };
    dot(&ops.mass.matvec(wv)) + p.mu * dot(&ops.stiffness.matvec(wv))
        + p.mu / p.nu * feedback::energy_e1(w, p)
}

fn control_values(w: &NodalField, p: &ModelParams) -> (f64, f64) {
    let v0 = if p.mode.controls_left() {
        feedback::k0(w.left(), p)
    } else {
        0.0
    };
    let v1 = if p.mode.controls_right() {
        feedback::k1(w.right(), p)
    } else {
        0.0
    };
    (v0, v1)
}

/// Runs the scheme from `w0h` to `t_end`, recording norms, energies,
/// control values and Newton statistics every `record_every` steps.
pub fn run_simulation(
    w0h: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
) -> Result<SimulationResult> {
    p.validate()?;
    cfg.validate()?;
    let ops = AssembledOps::new(w0h.mesh().clone());
    let n_steps = (cfg.t_end / cfg.dt).round() as usize;
    if n_steps == 0 {
        return Err(Error::InvalidParams(
            "t_end shorter than a single time step".into(),
        ));
    }

    let mut result = SimulationResult {
        times: Vec::new(),
        energy_samples: Vec::new(),
        l2: Vec::new(),
        linf: Vec::new(),
        tnorm: Vec::new(),
        newton_iters: Vec::new(),
        fields: cfg.store_fields.then(Vec::new),
        newton_iters_max: 0,
        newton_iters_mean: 0.0,
        max_lyapunov_step_increase: f64::NEG_INFINITY,
        final_state: w0h.clone(),
    };

    let record = |w: &NodalField, w_prev: Option<&NodalField>, t: f64, iters: usize,
                      result: &mut SimulationResult| {
        let wv = w.values();
        let dot = |y: &[f64]| -> f64 { y.iter().zip(wv).map(|(a, b)| a * b).sum() };
        let l2sq = dot(&ops.mass.matvec(wv));
        let h1sq = dot(&ops.stiffness.matvec(wv));
        let e1 = feedback::energy_e1(w, p);
        let e3 = match w_prev {
            Some(prev) => feedback::energy_e3(
                (
                    (w.left() - prev.left()) / cfg.dt,
                    (w.right() - prev.right()) / cfg.dt,
                ),
                (w.left(), w.right()),
                p,
            ),
            None => 0.0,
        };
        let (v0, v1) = control_values(w, p);
        result.times.push(t);
        result.l2.push(l2sq.max(0.0).sqrt());
        result
            .linf
            .push(wv.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
        result
            .tnorm
            .push((w.left().powi(2) + w.right().powi(2) + h1sq.max(0.0)).sqrt());
        result.energy_samples.push(EnergySample {
            t,
            e1,
            e2: feedback::energy_e2(w, p),
            e3,
            lyapunov: l2sq + p.mu * h1sq + p.mu / p.nu * e1,
            v0,
            v1,
        });
        result.newton_iters.push(iters);
        if let Some(fields) = result.fields.as_mut() {
            fields.push(w.clone());
        }
    };

    record(w0h, None, 0.0, 0, &mut result);

    let mut w = w0h.clone();
    let mut lyap_prev = lyapunov_value(&w, p, &ops);
    let mut iter_total = 0usize;
    for step in 1..=n_steps {
        let t = step as f64 * cfg.dt;
        let (w_next, iters) = advance_step(&w, p, cfg, &ops).map_err(|e| match e {
            Error::NewtonDivergence {
                residual, iters, ..
            } => Error::NewtonDivergence {
                time: t,
                residual,
                iters,
            },
            other => other,
        })?;
        iter_total += iters;
        result.newton_iters_max = result.newton_iters_max.max(iters);

        let lyap = lyapunov_value(&w_next, p, &ops);
        let rel = (lyap - lyap_prev) / lyap_prev.abs().max(f64::MIN_POSITIVE);
        result.max_lyapunov_step_increase = result.max_lyapunov_step_increase.max(rel);
        lyap_prev = lyap;

        if step % cfg.record_every == 0 || step == n_steps {
            record(&w_next, Some(&w), t, iters, &mut result);
        }
        w = w_next;
    }
    result.newton_iters_mean = iter_total as f64 / n_steps as f64;
    result.final_state = w;
    Ok(result)
}
