//! Post-hoc auditing of trajectories, scaling studies and classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{characteristic_time, fl2_identity_residual, ForceModelSpec, ModelKind};
use crate::error::{Error, Result};
use crate::fields::{faraday_at, FieldSpec};
use crate::integrator::{integrate, prepare_initial, SolverOptions};
use crate::maxaccel::kinematic_residuals_with_epsilon;
use crate::minkowski::FourVector;
use crate::trajectory::{TrajectoryRecord, TrajectoryRow};
use crate::worldline::finite_diff_series;

/// Pass/fail thresholds for [`audit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditThresholds {
    pub normalization: f64,
    pub kinematic: f64,
    pub fl2_identity: f64,
    /// Smallest `F_L^2` accepted as roundoff.
    pub spacelike_floor: f64,
    /// Larmor residual bound, in units of `eps0^2 m tau0 a^2`.
    pub larmor_factor: f64,
    pub mass_ledger: f64,
    /// Pre-pulse excess velocity bound, in units of the solver tolerance.
    pub preacceleration_factor: f64,
}

impl Default for AuditThresholds {
    fn default() -> Self {
        AuditThresholds {
            normalization: 1e-6,
            kinematic: 1e-7,
            fl2_identity: 1e-6,
            spacelike_floor: -1e-12,
            larmor_factor: 10.0,
            mass_ledger: 1e-10,
            preacceleration_factor: 10.0,
        }
    }
}

/// Outcome of one named invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub applicable: bool,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn skipped(name: &str) -> Self {
        CheckResult {
            name: name.into(),
            applicable: false,
            max_residual: 0.0,
            mean_residual: 0.0,
            tolerance: 0.0,
            passed: true,
        }
    }

    /// Summarizes nonnegative residuals against `tolerance` (inclusive).
    fn from_residuals(name: &str, residuals: &[f64], tolerance: f64) -> Self {
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        CheckResult {
            name: name.into(),
            applicable: true,
            max_residual: max,
            mean_residual: mean,
            tolerance,
            passed: max <= tolerance && max.is_finite(),
        }
    }
}

/// Least-squares fit of `log y = exponent log x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: PowerFit,
}

/// Exponential growth fit of `a^2` over the middle third of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Growth rate of `a^2`.
    pub rate_a2: f64,
    /// Growth rate of `|a|`, half of `rate_a2`.
    pub rate: f64,
    pub r2: f64,
}

/// Velocity before a Gaussian pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrePulseSummary {
    pub width: f64,
    /// Rows with `tau` below this value are pre-pulse.
    pub window_end: f64,
    /// Largest spatial velocity component before the window end.
    pub max_velocity: f64,
    /// Largest excess of `u^1` over the causal response to the field seen so far.
    pub max_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub model: ModelKind,
    pub epsilon0: f64,
    pub checks: Vec<CheckResult>,
    pub fits: Vec<NamedFit>,
    pub runaway: Option<RateFit>,
    pub runaway_detected: bool,
    pub pre_pulse: Option<PrePulseSummary>,
    pub preacceleration_detected: bool,
}

pub const CHECK_NAMES: [&str; 7] = [
    "normalization",
    "kinematic_constraints",
    "fl2_identity",
    "spacelike_lorentz_force",
    "larmor_contraction",
    "acceleration_bound",
    "mass_ledger_consistency",
];

impl AuditReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Aligned plain-text summary.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "model {}  eps0 {:.3e}\n{:<26} {:>5} {:>12} {:>12} {:>12}  result\n",
            self.model, self.epsilon0, "check", "used", "max", "mean", "tol"
        );
        for c in &self.checks {
            out += &format!(
                "{:<26} {:>5} {:>12.3e} {:>12.3e} {:>12.3e}  {}\n",
                c.name,
                if c.applicable { "yes" } else { "no" },
                c.max_residual,
                c.mean_residual,
                c.tolerance,
                if !c.applicable {
                    "skip"
                } else if c.passed {
                    "pass"
                } else {
                    "FAIL"
                }
            );
        }
        for f in &self.fits {
            out += &format!(
                "fit {:<22} exponent {:.4} r2 {:.5}\n",
                f.name, f.fit.exponent, f.fit.r2
            );
        }
        if let Some(r) = &self.runaway {
            out += &format!("runaway rate {:.6} (r2 {:.6})\n", r.rate, r.r2);
        }
        out += &format!(
            "runaway_detected {}  preacceleration_detected {}\n",
            self.runaway_detected, self.preacceleration_detected
        );
        out
    }
}

/// Ordinary least squares `y = slope x + intercept`, with `r^2`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::InsufficientSamples { required: 2, got: n.min(ys.len()) });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PowerFit {
        exponent: slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Log-log fit; pairs with a non-positive entry are dropped.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

/// Fits `ln a^2` against `tau` over the middle third of the run.
pub fn runaway_rate(traj: &TrajectoryRecord) -> Result<RateFit> {
    let n = traj.rows.len();
    let (lo, hi) = (n / 3, 2 * n / 3);
    let (ts, ls): (Vec<f64>, Vec<f64>) = traj.rows[lo..hi]
        .iter()
        .filter(|r| r.a2 > 0.0)
        .map(|r| (r.tau, r.a2.ln()))
        .unzip();
    let fit = linear_fit(&ts, &ls)?;
    Ok(RateFit {
        rate_a2: fit.exponent,
        rate: 0.5 * fit.exponent,
        r2: fit.r2,
    })
}

/// Pre-pulse velocity and its excess over the causal response
/// `(e/m) integral E_x dtau`, accumulated step by step with Simpson's rule.
pub fn pre_pulse_summary(traj: &TrajectoryRecord) -> Option<PrePulseSummary> {
    let field = &traj.meta.field;
    let width = field.pulse_width()?;
    let window_end = -5.0 * width;
    let (e, m) = (traj.meta.model.charge, traj.meta.model.mass);
    let u1_start = traj.rows.first()?.u[1];
    let ex = |x: &FourVector, tau: f64| faraday_at(field, x, tau).e[0];
    let mut impulse = 0.0;
    let mut prev: Option<&TrajectoryRow> = None;
    let mut max_velocity: f64 = 0.0;
    let mut max_excess: f64 = 0.0;
    for r in traj.rows.iter().take_while(|r| r.tau < window_end) {
        if let Some(p) = prev {
            let mid = ex(&((p.x + r.x) * 0.5), 0.5 * (p.tau + r.tau));
            impulse += (r.tau - p.tau) / 6.0 * (ex(&p.x, p.tau) + 4.0 * mid + ex(&r.x, r.tau));
        }
        prev = Some(r);
        max_velocity = max_velocity.max(r.u.spatial().iter().fold(0.0, |m: f64, c| m.max(c.abs())));
        max_excess = max_excess.max((r.u[1] - u1_start - e / m * impulse).abs());
    }
    Some(PrePulseSummary {
        width,
        window_end,
        max_velocity,
        max_excess,
    })
}

/// Realized-jet residuals of the three kinematic constraints, one triple per
/// row: `a` and `j` are finite differences of the stored velocities and
/// `eps_dot`, `eps_ddot` finite differences of the stored `epsilon`.
pub fn realized_kinematic_residuals(traj: &TrajectoryRecord) -> Result<Vec<[f64; 3]>> {
    let ts = traj.taus();
    let n = ts.len();
    let comps: Vec<Vec<Vec<f64>>> = (0..4)
        .map(|mu| {
            let ys: Vec<f64> = traj.rows.iter().map(|r| r.u[mu]).collect();
            finite_diff_series(&ts, &ys, 2)
        })
        .collect::<Result<_>>()?;
    let eps: Vec<f64> = traj.rows.iter().map(|r| r.epsilon).collect();
    let deps = finite_diff_series(&ts, &eps, 2)?;
    Ok((0..n)
        .map(|i| {
            let mut st = traj.rows[i].state();
            st.a = FourVector(std::array::from_fn(|mu| comps[mu][0][i]));
            let jerk = FourVector(std::array::from_fn(|mu| comps[mu][1][i]));
            let r = kinematic_residuals_with_epsilon(&st, &jerk, eps[i], deps[0][i], deps[1][i]);
            [r.r1.abs(), r.r2.abs(), r.r3.abs()]
        })
        .collect())
}

/// Audits a trajectory against the invariants of its model.
pub fn audit(
    traj: &TrajectoryRecord,
    model: &ForceModelSpec,
    field: &FieldSpec,
    thresholds: &AuditThresholds,
) -> AuditReport {
    let opts = &traj.meta.options;
    let rows = &traj.rows;
    let (e, m) = (model.charge, model.mass);
    let tau0 = characteristic_time(e, m);
    let params = model.params();
    let g_model = model.model.uses_g_normalization();
    let eps0 = traj.epsilon0();
    let mut checks = Vec::with_capacity(CHECK_NAMES.len());

    let norm: Vec<f64> = rows.iter().map(|r| r.g_norm_residual.abs()).collect();
    checks.push(CheckResult::from_residuals(CHECK_NAMES[0], &norm, thresholds.normalization));

    checks.push(match (g_model && rows.len() >= 5).then(|| realized_kinematic_residuals(traj)) {
        Some(Ok(res)) => {
            let flat: Vec<f64> = res.iter().map(|r| r[0].max(r[1]).max(r[2])).collect();
            CheckResult::from_residuals(CHECK_NAMES[1], &flat, thresholds.kinematic)
        }
        _ => CheckResult::skipped(CHECK_NAMES[1]),
    });

    checks.push(if model.model == ModelKind::ImplicitMaxaccel {
        let res: Vec<f64> = rows
            .iter()
            .map(|r| fl2_identity_residual(r.fl2, r.a2, r.epsilon, e, m))
            .collect();
        CheckResult::from_residuals(CHECK_NAMES[2], &res, thresholds.fl2_identity)
    } else {
        CheckResult::skipped(CHECK_NAMES[2])
    });

    let neg: Vec<f64> = rows.iter().map(|r| (-r.fl2).max(0.0)).collect();
    checks.push(CheckResult::from_residuals(CHECK_NAMES[3], &neg, -thresholds.spacelike_floor));

    checks.push(if g_model {
        let res: Vec<f64> = rows
            .iter()
            .filter(|r| r.a2 > 0.0)
            .map(|r| r.larmor_residual.abs() / (m * tau0 * r.a2))
            .collect();
        CheckResult::from_residuals(CHECK_NAMES[4], &res, thresholds.larmor_factor * eps0 * eps0)
    } else {
        CheckResult::skipped(CHECK_NAMES[4])
    });

    checks.push(if params.a_max.is_finite() {
        let res: Vec<f64> = rows.iter().map(|r| r.a2 / params.a_max_sq()).collect();
        let mut c = CheckResult::from_residuals(CHECK_NAMES[5], &res, 1.0);
        c.passed = c.max_residual < 1.0;
        c
    } else {
        CheckResult::skipped(CHECK_NAMES[5])
    });

    checks.push(if params.a_max.is_finite() {
        let k = 2.0 / 3.0 * e * e;
        let res: Vec<f64> = rows
            .iter()
            .filter_map(|r| {
                let mb = r.m_b?;
                Some(if r.epsilon == 0.0 {
                    (mb - m).abs() / m
                } else {
                    ((mb + k * r.a2 / r.epsilon_dot) - m).abs() / m
                })
            })
            .collect();
        CheckResult::from_residuals(CHECK_NAMES[6], &res, thresholds.mass_ledger)
    } else {
        CheckResult::skipped(CHECK_NAMES[6])
    });

    let zero_field = field.is_vacuum() || rows.iter().all(|r| r.fl2 == 0.0);
    let runaway = (zero_field && rows.len() >= 9).then(|| runaway_rate(traj).ok()).flatten();
    let runaway_detected = zero_field
        && match (rows.first(), rows.last()) {
            (Some(a), Some(b)) if a.a2 > 0.0 => b.a2 / a.a2 > opts.runaway_factor,
            _ => false,
        };
    let pre_pulse = pre_pulse_summary(traj);
    let preacceleration_detected = pre_pulse
        .map(|p| p.max_excess > thresholds.preacceleration_factor * opts.tol)
        .unwrap_or(false);

    AuditReport {
        model: model.model,
        epsilon0: eps0,
        checks,
        fits: Vec::new(),
        runaway,
        runaway_detected,
        pre_pulse,
        preacceleration_detected,
    }
}

/// Pulse-probe settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    /// Largest accepted `kappa / a` with `a = 3m / (2e^2)`.
    pub guard: f64,
    /// Integration starts at `-lead * width` and ends at `+lead * width`.
    pub lead: f64,
    pub steps_per_width: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            guard: 0.3,
            lead: 10.0,
            steps_per_width: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseProbeRow {
    pub width: f64,
    pub pre_pulse_max: f64,
    pub pre_pulse_excess: f64,
    pub post_pulse: f64,
    pub target: f64,
    pub error: f64,
}

/// Runs `model` through Gaussian pulses of impulse `kappa` and each width,
/// starting at rest, and compares the final `u^1` with `kappa / a`.
pub fn preacceleration_probe(
    model: &ForceModelSpec,
    widths: &[f64],
    kappa: f64,
    opts: &SolverOptions,
    settings: &ProbeSettings,
) -> Result<Vec<PulseProbeRow>> {
    let a = 3.0 * model.mass / (2.0 * model.charge * model.charge);
    let target = kappa / a;
    if target.abs() > settings.guard {
        return Err(Error::InvalidArgument(format!(
            "kappa / a = {target} exceeds the non-relativistic guard {}",
            settings.guard
        )));
    }
    widths
        .par_iter()
        .map(|&w| {
            let field = FieldSpec::GaussianPulse { kappa, width: w };
            let run_opts = SolverOptions {
                dt: w / settings.steps_per_width,
                ..*opts
            };
            let t0 = -settings.lead * w;
            let init = prepare_initial(model, &field, t0, FourVector::ZERO, [0.0; 3], None, &run_opts)?;
            let traj = integrate(model, &field, &init, (t0, settings.lead * w), &run_opts).map_err(|e| e.error)?;
            let pre = pre_pulse_summary(&traj).expect("pulse field");
            let post = traj.rows.last().map(|r| r.u[1]).unwrap_or(0.0);
            Ok(PulseProbeRow {
                width: w,
                pre_pulse_max: pre.max_velocity,
                pre_pulse_excess: pre.max_excess,
                post_pulse: post,
                target,
                error: (post - target).abs(),
            })
        })
        .collect()
}

/// Base scenario for scaling studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: ForceModelSpec,
    pub field: FieldSpec,
    pub position: FourVector,
    pub velocity: [f64; 3],
    pub tau_span: (f64, f64),
    pub options: SolverOptions,
}

impl Scenario {
    /// Runs the scenario under another model kind.
    pub fn run_as(&self, kind: ModelKind) -> std::result::Result<TrajectoryRecord, Error> {
        let model = ForceModelSpec { model: kind, ..self.model };
        let init = prepare_initial(&model, &self.field, self.tau_span.0, self.position, self.velocity, None, &self.options)?;
        integrate(&model, &self.field, &init, self.tau_span, &self.options).map_err(|e| e.error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub scale: f64,
    pub epsilon0: Option<f64>,
    pub gap: Option<f64>,
    /// Set when the scaled scenario could not be run; excluded from the fit.
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    pub fit: Option<PowerFit>,
}

/// Sup-norm gaps in position and velocity between two runs, with `b`
/// linearly interpolated onto the rows of `a` that lie inside `b`'s span.
pub fn sup_gap(a: &TrajectoryRecord, b: &TrajectoryRecord) -> (f64, f64) {
    let mut gx: f64 = 0.0;
    let mut gu: f64 = 0.0;
    let mut j = 0;
    let bs = &b.rows;
    if bs.is_empty() {
        return (0.0, 0.0);
    }
    for r in &a.rows {
        if r.tau < bs[0].tau || r.tau > bs[bs.len() - 1].tau {
            continue;
        }
        while j + 1 < bs.len() && bs[j + 1].tau < r.tau {
            j += 1;
        }
        let (x, u) = if bs[j].tau == r.tau || j + 1 == bs.len() {
            (bs[j].x, bs[j].u)
        } else {
            let (p, q) = (&bs[j], &bs[j + 1]);
            let s = (r.tau - p.tau) / (q.tau - p.tau);
            (p.x + (q.x - p.x) * s, p.u + (q.u - p.u) * s)
        };
        gx = gx.max((r.x - x).max_abs());
        gu = gu.max((r.u - u).max_abs());
    }
    (gx, gu)
}

/// Gap between the implicit and explicit models as the field is scaled.
pub fn epsilon0_scaling_study(scales: &[f64], base: &Scenario) -> ScalingStudy {
    let rows: Vec<ScalingRow> = scales
        .par_iter()
        .map(|&k| {
            let sc = Scenario {
                field: base.field.scaled(k),
                ..base.clone()
            };
            let both = sc
                .run_as(ModelKind::ImplicitMaxaccel)
                .and_then(|imp| Ok((sc.run_as(ModelKind::ExplicitApprox)?, imp)));
            match both {
                Ok((exp, imp)) => {
                    let (gx, gu) = sup_gap(&imp, &exp);
                    ScalingRow {
                        scale: k,
                        epsilon0: Some(imp.epsilon0()),
                        gap: Some(gx.max(gu)),
                        excluded: None,
                    }
                }
                Err(err) => ScalingRow {
                    scale: k,
                    epsilon0: None,
                    gap: None,
                    excluded: Some(err.to_string()),
                },
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some((r.epsilon0?, r.gap?)))
        .unzip();
    let fit = fit_power_law(&xs, &ys).ok();
    ScalingStudy { rows, fit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Method;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_fit_exact() {
        let f = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(f.exponent, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.intercept, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.r2, 1.0, epsilon = 1e-14);
        let p = fit_power_law(&[1.0, 2.0, 4.0], &[3.0, 12.0, 48.0]).unwrap();
        assert_abs_diff_eq!(p.exponent, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_audit_is_clean() {
        let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0));
        let opts = SolverOptions { dt: 0.01, ..Default::default() };
        let init = prepare_initial(&model, &FieldSpec::Vacuum, 0.0, FourVector::ZERO, [0.2, 0.0, 0.0], None, &opts).unwrap();
        let tr = integrate(&model, &FieldSpec::Vacuum, &init, (0.0, 1.0), &opts).unwrap();
        let rep = audit(&tr, &model, &FieldSpec::Vacuum, &Default::default());
        assert_eq!(rep.checks.len(), 7);
        for (c, name) in rep.checks.iter().zip(CHECK_NAMES) {
            assert_eq!(c.name, name);
            assert!(c.passed, "{c:?}");
            // Finite differences of a constant velocity leave roundoff / dt^2.
            assert!(c.max_residual <= 1e-10, "{c:?}");
        }
        assert!(!rep.runaway_detected && !rep.preacceleration_detected);
        assert!(rep.summary_table().contains("mass_ledger_consistency"));
    }

    #[test]
    fn zero_field_study_has_no_gap() {
        let base = Scenario {
            model: ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0)),
            field: FieldSpec::Vacuum,
            position: FourVector::ZERO,
            velocity: [0.1, 0.0, 0.0],
            tau_span: (0.0, 1.0),
            options: SolverOptions { dt: 0.05, ..Default::default() },
        };
        let s = epsilon0_scaling_study(&[1.0, 0.5], &base);
        assert!(s.rows.iter().all(|r| r.gap == Some(0.0)));
        assert!(s.fit.is_none());
    }

    #[test]
    fn breach_is_excluded() {
        let base = Scenario {
            model: ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(1.0)),
            field: FieldSpec::constant_e([0.5, 0.0, 0.0]),
            position: FourVector::ZERO,
            velocity: [0.0; 3],
            tau_span: (0.0, 0.5),
            options: SolverOptions { dt: 0.01, method: Method::Rk4Fixed, ..Default::default() },
        };
        let s = epsilon0_scaling_study(&[1.0, 100.0], &base);
        assert!(s.rows[0].excluded.is_none());
        assert!(s.rows[1].excluded.as_deref().unwrap().contains("maximal"));
    }

    #[test]
    fn probe_guard_and_zero_kappa() {
        let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(1e4));
        let opts = SolverOptions::default();
        assert!(preacceleration_probe(&model, &[0.1], 0.5, &opts, &Default::default()).is_err());
        let rows = preacceleration_probe(&model, &[0.1, 0.01], 0.0, &opts, &Default::default()).unwrap();
        assert!(rows.iter().all(|r| r.post_pulse == 0.0 && r.pre_pulse_max == 0.0));
    }
}
