//! Boundary feedback stabilization of the BBM-Burgers equation.
//!
//! The equation `u_t - mu*u_xxt - nu*u_xx + u_x + u*u_x = 0` on (0,1) is
//! driven to a constant steady state `w_d` through cubic Neumann feedback
//! laws applied at the endpoints. Everything works on the shifted state
//! `w = u - w_d`, so "stabilized" means `w -> 0`.
//!
//! The crate provides:
//! - piecewise-linear Galerkin assembly on 1D meshes ([`mesh`], [`fem1d`]),
//! - the feedback laws, decay-rate bounds and energy monitors ([`feedback`]),
//! - a backward-Euler/Newton time stepper ([`stepper`]),
//! - norms, decay-rate fits, convergence studies and related
//!   post-processing ([`analysis`]),
//! - a config-file driven CLI front end ([`config`], [`commands`]).

pub mod analysis;
pub mod commands;
pub mod config;
pub mod feedback;
pub mod fem1d;
pub mod mesh;
pub mod stepper;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("tridiagonal elimination breakdown at row {row} (pivot {pivot:.3e})")]
    EliminationBreakdown { row: usize, pivot: f64 },
    #[error("Newton did not converge at t = {time}: residual {residual:.3e} after {iters} iterations")]
    NewtonDivergence {
        time: f64,
        residual: f64,
        iters: usize,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("analysis error: {0}")]
    Analysis(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
