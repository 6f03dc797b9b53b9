//! Subcommand implementations shared by the CLI binary and the tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::analysis::{self, ConvergenceRow};
use crate::config::{self, InitialSpec, ScenarioConfig};
use crate::feedback::ModelParams;
use crate::fem1d::{
    assemble_convection, assemble_mass, assemble_stiffness, discrete_laplacian_apply,
    nonlinear_convection, nonlinear_convection_jacobian, NodalField,
};
use crate::mesh::Mesh;
use crate::stepper::run_simulation;
use crate::{Error, Result};

/// 17 significant digits: round-trip exact for f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `content` next to `path` and renames it into place, so readers
/// never observe a partially written file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the scenario and writes the time-series CSV at `cfg.out_path`.
pub fn cmd_simulate(cfg: &ScenarioConfig) -> Result<PathBuf> {
    let w0 = cfg.initial_field()?;
    let res = run_simulation(&w0, &cfg.params, &cfg.stepper)?;
    let mut out = String::from("t,l2,linf,tnorm,e1,lyapunov,v0,v1,newton_iters\n");
    for (i, &t) in res.times.iter().enumerate() {
        let e = &res.energy_samples[i];
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(t),
            fmt_f64(res.l2[i]),
            fmt_f64(res.linf[i]),
            fmt_f64(res.tnorm[i]),
            fmt_f64(e.e1),
            fmt_f64(e.lyapunov),
            fmt_f64(e.v0),
            fmt_f64(e.v1),
            res.newton_iters[i],
        )
        .unwrap();
    }
    write_atomic(&cfg.out_path, &out)?;
    Ok(cfg.out_path.clone())
}

/// Runs the mesh-refinement study and writes one CSV row per mesh.
///
/// Requires an analytic initial profile; nodal-file data is tied to a
/// single mesh and cannot be re-projected.
pub fn cmd_convergence(
    cfg: &ScenarioConfig,
    cell_counts: &[usize],
    ref_factor: usize,
    t_eval: f64,
) -> Result<PathBuf> {
    let rows = match cfg.initial {
        InitialSpec::Cubic => analysis::convergence_study(
            &cfg.params,
            &cfg.stepper,
            cell_counts,
            ref_factor,
            t_eval,
            config::cubic_profile,
            config::cubic_profile_deriv,
        )?,
        InitialSpec::Sine => analysis::convergence_study(
            &cfg.params,
            &cfg.stepper,
            cell_counts,
            ref_factor,
            t_eval,
            config::sine_profile,
            config::sine_profile_deriv,
        )?,
        InitialSpec::File(_) => {
            return Err(Error::Config(
                "convergence studies need an analytic initial profile (cubic or sine)".into(),
            ))
        }
    };
    let mut out = String::from(
        "h,e_l2,e_linf,e_tnorm,e_v0,e_v1,order_l2,order_linf,order_tnorm,order_v0,order_v1\n",
    );
    let opt = |o: Option<f64>| o.map(fmt_f64).unwrap_or_default();
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.h),
            fmt_f64(r.e_l2),
            fmt_f64(r.e_linf),
            fmt_f64(r.e_tnorm),
            fmt_f64(r.e_v0),
            fmt_f64(r.e_v1),
            opt(r.order_l2),
            opt(r.order_linf),
            opt(r.order_tnorm),
            opt(r.order_v0),
            opt(r.order_v1),
        )
        .unwrap();
    }
    write_atomic(&cfg.out_path, &out)?;
    Ok(cfg.out_path.clone())
}

fn mu_file_name(out_path: &Path, mu: f64) -> PathBuf {
    let stem = out_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep");
    let tag = format!("{mu}").replace('.', "p").replace('-', "m");
    out_path.with_file_name(format!("{stem}_mu_{tag}.csv"))
}

/// Runs the dispersion sweep: one `(t, l2)` trajectory file per entry of
/// `mus` plus a deviation summary at `cfg.out_path`.
pub fn cmd_sweep_mu(cfg: &ScenarioConfig, mus: &[f64]) -> Result<PathBuf> {
    let w0 = cfg.initial_field()?;
    let sweep = analysis::mu_sweep(&w0, &cfg.params, &cfg.stepper, mus)?;
    for (mu, traj) in &sweep.trajectories {
        let mut out = String::from("t,l2\n");
        for (&t, &v) in sweep.times.iter().zip(traj) {
            writeln!(out, "{},{}", fmt_f64(t), fmt_f64(v)).unwrap();
        }
        write_atomic(&mu_file_name(&cfg.out_path, *mu), &out)?;
    }
    let mut out = String::from("mu,sup_deviation,trajectory_path\n");
    for (mu, dev) in &sweep.deviations {
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(*mu),
            fmt_f64(*dev),
            mu_file_name(&cfg.out_path, *mu).display(),
        )
        .unwrap();
    }
    write_atomic(&cfg.out_path, &out)?;
    Ok(cfg.out_path.clone())
}

/// Runs the built-in invariant suite on deterministic pseudo-random data
/// and prints one PASS line per check. Any violation is an error.
pub fn cmd_check() -> Result<()> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0bb1_0b0d);
    let mesh = Arc::new(Mesh::uniform(4)?);
    let n = mesh.n_nodes();
    let mut random_field = |scale: f64| -> NodalField {
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
        NodalField::from_values(mesh.clone(), vals).unwrap()
    };

    let fail = |name: &str, detail: String| -> Result<()> {
        Err(Error::Analysis(format!("check {name} failed: {detail}")))
    };

    // hand-assembled single-cell operators
    {
        let m1 = Arc::new(Mesh::uniform(1)?);
        let mass = assemble_mass(&m1);
        let stiff = assemble_stiffness(&m1);
        let conv = assemble_convection(&m1);
        let expect = [
            (mass.matvec(&[1.0, 0.0]), [1.0 / 3.0, 1.0 / 6.0]),
            (stiff.matvec(&[1.0, 0.0]), [1.0, -1.0]),
            (conv.matvec(&[0.0, 1.0]), [0.5, 0.5]),
        ];
        for (got, want) in expect {
            if got
                .iter()
                .zip(&want)
                .any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return fail("operator_oracle", format!("{got:?} != {want:?}"));
            }
        }
    }
    println!("PASS operator_oracle");

    // discrete Laplacian defining identity against the stiffness form
    {
        let mass = assemble_mass(&mesh);
        let stiff = assemble_stiffness(&mesh);
        let v = random_field(5.0);
        let lap = discrete_laplacian_apply(&v, &mass, &stiff)?;
        let lhs = mass.matvec(lap.values());
        let mut rhs = stiff.matvec(v.values());
        rhs[0] += v.left_slope();
        rhs[n - 1] -= v.right_slope();
        for (a, b) in lhs.iter().zip(&rhs) {
            if (a + b).abs() > 1e-12 {
                return fail("laplacian_identity", format!("{a} vs {}", -b));
            }
        }
    }
    println!("PASS laplacian_identity");

    // nonlinear convection Jacobian vs central differences
    {
        let w = random_field(3.0);
        let jac = nonlinear_convection_jacobian(&w);
        let eps = 1e-6;
        for j in 0..n {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp.values_mut()[j] += eps;
            wm.values_mut()[j] -= eps;
            let fp = nonlinear_convection(&wp);
            let fm = nonlinear_convection(&wm);
            for i in 0..n {
                let fd = (fp[i] - fm[i]) / (2.0 * eps);
                let entry = if i == j {
                    jac.diag[i]
                } else if i == j + 1 {
                    jac.lower[j]
                } else if j == i + 1 {
                    jac.upper[i]
                } else {
                    0.0
                };
                if (fd - entry).abs() > 1e-6 {
                    return fail("jacobian_fd", format!("({i},{j}): {entry} vs {fd}"));
                }
            }
        }
    }
    println!("PASS jacobian_fd");

    // Agmon, Poincare-Wirtinger, and absolute homogeneity on random fields
    for trial in 0..32 {
        let w = random_field(10.0);
        let tn = analysis::tnorm(&w);
        let li = analysis::linf_norm(&w);
        if li > 2.0f64.sqrt() * tn + 1e-12 {
            return fail("agmon", format!("trial {trial}: {li} > sqrt(2)*{tn}"));
        }
        let stiff = assemble_stiffness(&mesh);
        let wv = w.values();
        let h1: f64 = stiff.matvec(wv).iter().zip(wv).map(|(a, b)| a * b).sum();
        let l2sq = analysis::l2_norm(&w).powi(2);
        for bv in [w.left(), w.right()] {
            if l2sq > 2.0 * bv * bv + h1 + 1e-10 {
                return fail("poincare_wirtinger", format!("trial {trial}"));
            }
        }
        let s = -1.75;
        let sw = NodalField::from_values(
            mesh.clone(),
            wv.iter().map(|v| s * v).collect(),
        )?;
        for f in [
            analysis::l2_norm as fn(&NodalField) -> f64,
            analysis::tnorm,
            analysis::linf_norm,
        ] {
            if (f(&sw) - s.abs() * f(&w)).abs() > 1e-12 * f(&w).max(1.0) {
                return fail("homogeneity", format!("trial {trial}"));
            }
        }
    }
    println!("PASS agmon");
    println!("PASS poincare_wirtinger");
    println!("PASS homogeneity");
    Ok(())
}

/// Exposed for tests: the rows behind [`cmd_convergence`].
pub fn convergence_rows(
    p: &ModelParams,
    cfg: &crate::stepper::StepperConfig,
    cell_counts: &[usize],
    ref_factor: usize,
    t_eval: f64,
    initial: &InitialSpec,
) -> Result<Vec<ConvergenceRow>> {
    match initial {
        InitialSpec::Cubic => analysis::convergence_study(
            p,
            cfg,
            cell_counts,
            ref_factor,
            t_eval,
            config::cubic_profile,
            config::cubic_profile_deriv,
        ),
        InitialSpec::Sine => analysis::convergence_study(
            p,
            cfg,
            cell_counts,
            ref_factor,
            t_eval,
            config::sine_profile,
            config::sine_profile_deriv,
        ),
        InitialSpec::File(_) => Err(Error::Config(
            "convergence studies need an analytic initial profile".into(),
        )),
    }
}
