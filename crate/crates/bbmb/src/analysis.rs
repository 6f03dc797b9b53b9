//! Norms and derived quantities: decay-rate fits, convergence studies
//! against a refined-mesh reference, the dispersion-coefficient sweep, and
//! the continuous-dependence check.

use std::sync::Arc;

use crate::feedback::{self, ModelParams};
use crate::fem1d::{assemble_mass, assemble_stiffness, auxiliary_projection, NodalField};
use crate::mesh::Mesh;
use crate::stepper::{run_simulation, SimulationResult, StepperConfig};
use crate::{Error, Result};

/// Fraction of leading samples excluded from decay fits, to skip the
/// initial transient.
pub const DECAY_FIT_SKIP: f64 = 0.1;

/// `sqrt(w^T M w)` with the exact mass matrix.
pub fn l2_norm(w: &NodalField) -> f64 {
    let m = assemble_mass(w.mesh());
    let wv = w.values();
    m.matvec(wv)
        .iter()
        .zip(wv)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Triple norm `sqrt(w(0)^2 + w(1)^2 + ||w_x||^2)`, equivalent to the
/// H1 norm on the unit interval.
pub fn tnorm(w: &NodalField) -> f64 {
    let a = assemble_stiffness(w.mesh());
    let wv = w.values();
    let h1: f64 = a.matvec(wv).iter().zip(wv).map(|(x, y)| x * y).sum();
    (w.left().powi(2) + w.right().powi(2) + h1.max(0.0)).sqrt()
}

/// Max-norm of the nodal values (exact for piecewise linears).
pub fn linf_norm(w: &NodalField) -> f64 {
    w.values().iter().fold(0.0, |a, &v| a.max(v.abs()))
}

/// Least-squares slope of `-ln(values)` against `t`, so a pure
/// `exp(-alpha t)` series returns `alpha`.
///
/// The first [`DECAY_FIT_SKIP`] fraction of samples is excluded.
/// Rejects windows with fewer than two samples or nonpositive values.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::Analysis("times and values lengths differ".into()));
    }
    let skip = (times.len() as f64 * DECAY_FIT_SKIP).floor() as usize;
    let t = &times[skip..];
    let v = &values[skip..];
    if t.len() < 2 {
        return Err(Error::Analysis("need at least two samples in fit window".into()));
    }
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::Analysis(
            "nonpositive values inside the decay fit window".into(),
        ));
    }
    let n = t.len() as f64;
    let y: Vec<f64> = v.iter().map(|&x| -x.ln()).collect();
    let t_mean = t.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&ti, &yi) in t.iter().zip(&y) {
        num += (ti - t_mean) * (yi - y_mean);
        den += (ti - t_mean) * (ti - t_mean);
    }
    if den == 0.0 {
        return Err(Error::Analysis("degenerate time window".into()));
    }
    Ok(num / den)
}

/// One row of a mesh-refinement study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub h: f64,
    pub e_l2: f64,
    pub e_linf: f64,
    pub e_tnorm: f64,
    pub e_v0: f64,
    pub e_v1: f64,
    pub order_l2: Option<f64>,
    pub order_linf: Option<f64>,
    pub order_tnorm: Option<f64>,
    pub order_v0: Option<f64>,
    pub order_v1: Option<f64>,
}

fn observed_order(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> Option<f64> {
    if e_prev > 0.0 && e_cur > 0.0 {
        Some((e_prev / e_cur).ln() / (h_prev / h_cur).ln())
    } else {
        None
    }
}

/// Runs the scheme on each coarse mesh and on a `ref_factor`-times-finer
/// reference mesh, then reports errors at `t_eval` against the reference.
///
/// The meshes must be nested (every coarse cell count divides the
/// reference count). The coarse solution is prolonged onto the reference
/// mesh — exact for piecewise linears on nested meshes — and the error
/// norms are evaluated there. Comparing at coarse nodes alone would hide
/// the intra-cell gradient error and make every norm superconverge.
pub fn convergence_study(
    p: &ModelParams,
    cfg: &StepperConfig,
    cell_counts: &[usize],
    ref_factor: usize,
    t_eval: f64,
    initial: impl Fn(f64) -> f64 + Sync,
    initial_deriv: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<ConvergenceRow>> {
    if cell_counts.is_empty() {
        return Err(Error::Analysis("empty mesh family".into()));
    }
    if cell_counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Analysis(
            "cell counts must be strictly increasing".into(),
        ));
    }
    let n_ref = cell_counts.last().unwrap() * ref_factor;
    for &n in cell_counts {
        if n_ref % n != 0 {
            return Err(Error::Analysis(format!(
                "mesh family not nested: {n} cells do not divide the {n_ref}-cell reference"
            )));
        }
    }
    let run_cfg = StepperConfig {
        t_end: t_eval,
        record_every: usize::MAX,
        store_fields: false,
        ..*cfg
    };

    let solve_on = |n: usize| -> Result<SimulationResult> {
        let mesh = Arc::new(Mesh::uniform(n)?);
        let w0h = auxiliary_projection(&initial, &initial_deriv, &mesh, 1.0);
        run_simulation(&w0h, p, &run_cfg)
    };

    let reference = solve_on(n_ref)?.final_state;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cell_counts.len());
    for &n in cell_counts {
        let state = solve_on(n)?.final_state;
        let stride = n_ref / n;
        // exact prolongation of the coarse solution to the reference nodes
        let err_vals: Vec<f64> = reference
            .values()
            .iter()
            .enumerate()
            .map(|(j, &r)| {
                let (cell, m) = (j / stride, j % stride);
                let coarse = if m == 0 {
                    state.values()[cell]
                } else {
                    let (wl, wr) = (state.values()[cell], state.values()[cell + 1]);
                    wl + (wr - wl) * (m as f64 / stride as f64)
                };
                coarse - r
            })
            .collect();
        let err = NodalField::from_values(reference.mesh().clone(), err_vals)?;
        let e_v0 = if p.mode.controls_left() {
            (feedback::k0(state.left(), p) - feedback::k0(reference.left(), p)).abs()
        } else {
            0.0
        };
        let e_v1 = if p.mode.controls_right() {
            (feedback::k1(state.right(), p) - feedback::k1(reference.right(), p)).abs()
        } else {
            0.0
        };
        let h = state.mesh().h_max();
        let row = ConvergenceRow {
            h,
            e_l2: l2_norm(&err),
            e_linf: linf_norm(&err),
            e_tnorm: tnorm(&err),
            e_v0,
            e_v1,
            order_l2: None,
            order_linf: None,
            order_tnorm: None,
            order_v0: None,
            order_v1: None,
        };
        let row = match rows.last() {
            Some(prev) => ConvergenceRow {
                order_l2: observed_order(prev.e_l2, row.e_l2, prev.h, h),
                order_linf: observed_order(prev.e_linf, row.e_linf, prev.h, h),
                order_tnorm: observed_order(prev.e_tnorm, row.e_tnorm, prev.h, h),
                order_v0: observed_order(prev.e_v0, row.e_v0, prev.h, h),
                order_v1: observed_order(prev.e_v1, row.e_v1, prev.h, h),
                ..row
            },
            None => row,
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Trajectories and Burgers-limit deviations of a dispersion sweep.
#[derive(Debug, Clone)]
pub struct MuSweep {
    pub times: Vec<f64>,
    /// `(mu, L2 trajectory)` in the order requested.
    pub trajectories: Vec<(f64, Vec<f64>)>,
    /// `(mu, sup_t |l2_mu(t) - l2_0(t)|)` in the order requested.
    pub deviations: Vec<(f64, f64)>,
}

/// Runs one simulation per `mu` (concurrently; runs are independent) and
/// reports each trajectory's sup-deviation from the `mu = 0` Burgers run.
///
/// The list must contain a `mu = 0` entry to compare against.
pub fn mu_sweep(
    w0h: &NodalField,
    base: &ModelParams,
    cfg: &StepperConfig,
    mus: &[f64],
) -> Result<MuSweep> {
    if !mus.contains(&0.0) {
        return Err(Error::Analysis("mu sweep requires a mu = 0 entry".into()));
    }
    if mus.iter().any(|&m| m < 0.0) {
        return Err(Error::Analysis("mu must be nonnegative".into()));
    }

    let results: Vec<Result<SimulationResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = mus
            .iter()
            .map(|&mu| {
                let p = ModelParams { mu, ..*base };
                scope.spawn(move || run_simulation(w0h, &p, cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut times = Vec::new();
    let mut trajectories = Vec::with_capacity(mus.len());
    for (&mu, res) in mus.iter().zip(results) {
        let res = res?;
        if times.is_empty() {
            times = res.times;
        }
        trajectories.push((mu, res.l2));
    }
    let burgers = &trajectories
        .iter()
        .find(|(mu, _)| *mu == 0.0)
        .unwrap()
        .1
        .clone();
    let deviations = trajectories
        .iter()
        .map(|(mu, traj)| {
            let dev = traj
                .iter()
                .zip(burgers)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            (*mu, dev)
        })
        .collect();
    Ok(MuSweep {
        times,
        trajectories,
        deviations,
    })
}

/// Outcome of a paired-trajectory continuous-dependence run.
#[derive(Debug, Clone)]
pub struct DependenceReport {
    /// `D(0) = ||z_0||^2 + mu ||z_0x||^2 + E4(0)`.
    pub d0: f64,
    /// `sup_t D(t)` over recorded instants.
    pub sup_d: f64,
    pub kappa: f64,
    pub passed: bool,
}

/// Runs the two initial conditions side by side and checks that the
/// difference functional `D(t)` stays within `kappa * D(0)`.
///
/// Identical initial data must give `D` identically zero (runs are
/// deterministic, so the trajectories agree bitwise).
pub fn continuous_dependence_check(
    w10: &NodalField,
    w20: &NodalField,
    p: &ModelParams,
    cfg: &StepperConfig,
    kappa: f64,
) -> Result<DependenceReport> {
    if w10.values().len() != w20.values().len() {
        return Err(Error::Analysis("initial fields on different meshes".into()));
    }
    let run_cfg = StepperConfig {
        store_fields: true,
        ..*cfg
    };
    let (r1, r2) = std::thread::scope(|scope| {
        let h1 = scope.spawn(|| run_simulation(w10, p, &run_cfg));
        let h2 = scope.spawn(|| run_simulation(w20, p, &run_cfg));
        (h1.join().unwrap(), h2.join().unwrap())
    });
    let (r1, r2) = (r1?, r2?);
    let f1 = r1.fields.as_ref().unwrap();
    let f2 = r2.fields.as_ref().unwrap();

    let mass = assemble_mass(w10.mesh());
    let stiff = assemble_stiffness(w10.mesh());
    let d_value = |w1: &NodalField, w2: &NodalField| -> f64 {
        let z_vals: Vec<f64> = w1
            .values()
            .iter()
            .zip(w2.values())
            .map(|(a, b)| a - b)
            .collect();
        let z = NodalField::from_values(w1.mesh().clone(), z_vals).unwrap();
        let zv = z.values();
        let dot = |y: &[f64]| -> f64 { y.iter().zip(zv).map(|(a, b)| a * b).sum() };
        dot(&mass.matvec(zv)) + p.mu * dot(&stiff.matvec(zv)) + feedback::energy_e4(&z, w1, p)
    };

    let d0 = d_value(&f1[0], &f2[0]);
    let sup_d = f1
        .iter()
        .zip(f2)
        .map(|(a, b)| d_value(a, b))
        .fold(0.0f64, f64::max);
    let passed = if d0 == 0.0 {
        sup_d == 0.0
    } else {
        sup_d <= kappa * d0
    };
    Ok(DependenceReport {
        d0,
        sup_d,
        kappa,
        passed,
    })
}
