//! Maximal-acceleration bookkeeping: `epsilon`, the conformal metric `g`,
//! kinematic-constraint residuals and the bare-mass ledger.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{eta_dot, eta_sq, FourVector};
use crate::trajectory::TrajectoryRecord;
use crate::worldline::WorldlineState;

/// Default threshold below which `|eps_dot|` counts as zero.
pub const EPS_DOT_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxAccelParams {
    /// Bound on the `eta`-proper acceleration. `INFINITY` switches the
    /// geometry off (`epsilon = 0`).
    pub a_max: f64,
    /// Largest `epsilon` seen along the trajectory of interest.
    pub epsilon0: f64,
}

impl MaxAccelParams {
    pub fn new(a_max: f64) -> Result<Self> {
        if !(a_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "A_max must be positive, got {a_max}"
            )));
        }
        Ok(MaxAccelParams {
            a_max,
            epsilon0: 0.0,
        })
    }

    pub fn unbounded() -> Self {
        MaxAccelParams {
            a_max: f64::INFINITY,
            epsilon0: 0.0,
        }
    }

    pub fn from_option(a_max: Option<f64>) -> Result<Self> {
        a_max.map_or(Ok(Self::unbounded()), Self::new)
    }

    pub fn with_epsilon0(mut self, epsilon0: f64) -> Self {
        self.epsilon0 = epsilon0;
        self
    }

    pub fn a_max_sq(&self) -> f64 {
        self.a_max * self.a_max
    }

    /// `eta(a, a) / A_max^2`.
    pub fn epsilon_of(&self, a: &FourVector) -> f64 {
        if self.a_max.is_infinite() {
            0.0
        } else {
            eta_sq(a) / self.a_max_sq()
        }
    }

    /// `1 - epsilon`, the conformal factor of `g`.
    pub fn conformal_factor(&self, a: &FourVector, at: f64) -> Result<f64> {
        let eps = self.epsilon_of(a);
        if eps >= 1.0 {
            return Err(Error::DomainBreach { epsilon: eps, at });
        }
        Ok(1.0 - eps)
    }
}

pub fn epsilon(state: &WorldlineState, params: &MaxAccelParams) -> f64 {
    params.epsilon_of(&state.a)
}

/// `g(a, b) = (1 - epsilon) eta(a, b)` at `state`.
pub fn g_dot(
    state: &WorldlineState,
    params: &MaxAccelParams,
    a: &FourVector,
    b: &FourVector,
) -> Result<f64> {
    Ok(params.conformal_factor(&state.a, state.tau)? * eta_dot(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl KinematicResiduals {
    pub fn max_abs(&self) -> f64 {
        self.r1.abs().max(self.r2.abs()).max(self.r3.abs())
    }
}

/// Residuals of the three kinematic constraints of a `g`-normalized curve.
///
/// `eps_dot` and `eps_ddot` are the first two proper-time derivatives of
/// `epsilon` along the curve:
///
/// - `r1 = g(u,u) + 1`
/// - `r2 = g(a,u) - eps_dot eta(u,u) / 2`
/// - `r3 = g(j,u) + g(a,a) - [d/dtau(eps_dot eta(u,u) / 2) + eps_dot]`
pub fn kinematic_residuals(
    state: &WorldlineState,
    jerk: &FourVector,
    eps_dot: f64,
    eps_ddot: f64,
    params: &MaxAccelParams,
) -> Result<KinematicResiduals> {
    let eps = params.epsilon_of(&state.a);
    if eps >= 1.0 {
        return Err(Error::DomainBreach {
            epsilon: eps,
            at: state.tau,
        });
    }
    Ok(kinematic_residuals_with_epsilon(state, jerk, eps, eps_dot, eps_ddot))
}

/// As [`kinematic_residuals`], with `epsilon` supplied by the caller instead
/// of being recomputed from `state.a`.
pub fn kinematic_residuals_with_epsilon(
    state: &WorldlineState,
    jerk: &FourVector,
    epsilon: f64,
    eps_dot: f64,
    eps_ddot: f64,
) -> KinematicResiduals {
    let (u, a) = (&state.u, &state.a);
    let g = 1.0 - epsilon;
    let uu = eta_sq(u);
    let au = eta_dot(a, u);
    let r1 = g * uu + 1.0;
    let r2 = g * au - 0.5 * eps_dot * uu;
    let d_half = 0.5 * eps_ddot * uu + eps_dot * au;
    let r3 = g * (eta_dot(jerk, u) + eta_sq(a)) - (d_half + eps_dot);
    KinematicResiduals { r1, r2, r3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassLedgerEntry {
    pub tau: f64,
    /// `None` where `|eps_dot|` is below threshold and `epsilon != 0`.
    pub m_b: Option<f64>,
    pub m: f64,
    pub epsilon: f64,
    pub epsilon_dot: f64,
    pub degenerate: bool,
    /// Finite-difference residual of `d m_b/dtau + (2/3) e^2 d(a^2/eps_dot)/dtau`,
    /// present where this row and both neighbours are non-degenerate.
    pub derivative_residual: Option<f64>,
}

/// Bare mass `m - (2/3) e^2 a^2 / eps_dot`, or `None` if degenerate.
pub fn bare_mass(e: f64, m: f64, a2: f64, epsilon: f64, eps_dot: f64, eps_dot_min: f64) -> Option<f64> {
    if epsilon == 0.0 {
        Some(m)
    } else if eps_dot.abs() < eps_dot_min {
        None
    } else {
        Some(m - 2.0 / 3.0 * e * e * a2 / eps_dot)
    }
}

pub fn mass_ledger(
    traj: &TrajectoryRecord,
    e: f64,
    m: f64,
    eps_dot_min: f64,
) -> Vec<MassLedgerEntry> {
    let rows = &traj.rows;
    let mut out: Vec<MassLedgerEntry> = rows
        .iter()
        .map(|r| {
            let m_b = bare_mass(e, m, r.a2, r.epsilon, r.epsilon_dot, eps_dot_min);
            MassLedgerEntry {
                tau: r.tau,
                m_b,
                m,
                epsilon: r.epsilon,
                epsilon_dot: r.epsilon_dot,
                degenerate: m_b.is_none(),
                derivative_residual: None,
            }
        })
        .collect();
    let k = 2.0 / 3.0 * e * e;
    let ratio = |i: usize| {
        if rows[i].epsilon == 0.0 {
            0.0
        } else {
            rows[i].a2 / rows[i].epsilon_dot
        }
    };
    for i in 1..rows.len().saturating_sub(1) {
        let (Some(lo), Some(hi)) = (out[i - 1].m_b, out[i + 1].m_b) else {
            continue;
        };
        if out[i].degenerate {
            continue;
        }
        let dt = rows[i + 1].tau - rows[i - 1].tau;
        let dm = (hi - lo) / dt;
        let dr = (ratio(i + 1) - ratio(i - 1)) / dt;
        out[i].derivative_residual = Some(dm + k * dr);
    }
    out
}

/// Writes the ledger with columns `tau, m_b, epsilon, epsilon_dot, degenerate_flag`.
pub fn write_ledger_csv<W: Write>(entries: &[MassLedgerEntry], w: W) -> Result<(), csv::Error> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wr.write_record(["tau", "m_b", "epsilon", "epsilon_dot", "degenerate_flag"])?;
    for en in entries {
        wr.write_record([
            format!("{:.16e}", en.tau),
            en.m_b.map(|v| format!("{v:.16e}")).unwrap_or_default(),
            format!("{:.16e}", en.epsilon),
            format!("{:.16e}", en.epsilon_dot),
            u8::from(en.degenerate).to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
