//! Built-in scenarios with pinned parameters and pass/fail checks.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    audit, fit_power_law, linear_fit, preacceleration_probe, runaway_rate, ProbeSettings,
};
use crate::dynamics::{
    characteristic_time, operator_m, operator_o, ForceModelSpec, ModelKind,
};
use crate::error::Result;
use crate::fields::{lorentz_force_sq, EMFieldTensor, FieldSpec};
use crate::integrator::{integrate, prepare_initial, SolverOptions};
use crate::maxaccel::MaxAccelParams;
use crate::minkowski::FourVector;
use crate::trajectory::TrajectoryRecord;
use crate::worldline::{
    proper_time_eta, proper_time_maxaccel, reparameterize, SampledCurve, WorldlineState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CanonicalName {
    Pulse,
    Runaway,
    Hyperbolic,
    Reparam,
    IdentitySuite,
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub label: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

impl CheckLine {
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckLine {
            label: label.into(),
            value,
            bound: format!("<= {bound:e}"),
            passed: value <= bound,
        }
    }

    pub fn within(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        CheckLine {
            label: label.into(),
            value,
            bound: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        CheckLine {
            label: label.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: "== 1".into(),
            passed: ok,
        }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.6e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.value,
            self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalOutcome {
    pub name: CanonicalName,
    pub checks: Vec<CheckLine>,
}

impl CanonicalOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(name: CanonicalName, seed: u64) -> Result<CanonicalOutcome> {
    let checks = match name {
        CanonicalName::Pulse => pulse()?,
        CanonicalName::Runaway => runaway()?,
        CanonicalName::Hyperbolic => hyperbolic()?,
        CanonicalName::Reparam => reparam(seed)?,
        CanonicalName::IdentitySuite => identity_suite(seed)?,
    };
    Ok(CanonicalOutcome { name, checks })
}

pub const PULSE_WIDTHS: [f64; 3] = [0.1, 0.01, 0.001];
pub const PULSE_KAPPA: f64 = 0.5;
/// The pinned impulse gives `kappa / a = 1/3`, just above the default guard.
pub const PULSE_GUARD: f64 = 0.35;

fn pulse() -> Result<Vec<CheckLine>> {
    let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(1e4));
    let settings = ProbeSettings {
        guard: PULSE_GUARD,
        ..Default::default()
    };
    let rows = preacceleration_probe(&model, &PULSE_WIDTHS, PULSE_KAPPA, &SolverOptions::default(), &settings)?;
    let mut checks: Vec<CheckLine> = rows
        .iter()
        .map(|r| CheckLine::at_most(format!("pre-pulse max |u1| at w = {}", r.width), r.pre_pulse_max, 1e-9))
        .collect();
    let last = rows.last().expect("widths are nonempty");
    checks.push(CheckLine::at_most(
        format!("|u1 - kappa/a| after the pulse at w = {}", last.width),
        last.error,
        1e-3,
    ));
    let ws: Vec<f64> = rows.iter().map(|r| r.width).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let slope = fit_power_law(&ws, &es).map(|f| f.exponent).unwrap_or(f64::NAN);
    checks.push(CheckLine::within("width convergence slope", slope, 0.8, 1.2));
    Ok(checks)
}

/// Field-free ALD run seeded with a small acceleration along `x`.
pub fn ald_runaway_run(seed_accel: f64, tau_end: f64, dt: f64) -> Result<TrajectoryRecord> {
    let model = ForceModelSpec::new(ModelKind::Ald, 1.0, 1.0, None);
    let opts = SolverOptions {
        dt,
        ..Default::default()
    };
    let init = prepare_initial(
        &model,
        &FieldSpec::Vacuum,
        0.0,
        FourVector::ZERO,
        [0.0; 3],
        Some(FourVector::new(0.0, seed_accel, 0.0, 0.0)),
        &opts,
    )?;
    Ok(match integrate(&model, &FieldSpec::Vacuum, &init, (0.0, tau_end), &opts) {
        Ok(t) => t,
        Err(ab) => ab.partial,
    })
}

/// Implicit model in a constant field that is switched off at `tau = off`.
pub fn switched_off_run(strength: f64, off: f64, tau_end: f64, dt: f64) -> Result<TrajectoryRecord> {
    let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0));
    let field = FieldSpec::Switched {
        inner: Box::new(FieldSpec::constant_e([strength, 0.0, 0.0])),
        on: None,
        off: Some(off),
    };
    let opts = SolverOptions {
        dt,
        ..Default::default()
    };
    let init = prepare_initial(&model, &field, 0.0, FourVector::ZERO, [0.0; 3], None, &opts)?;
    integrate(&model, &field, &init, (0.0, tau_end), &opts).map_err(|ab| ab.error)
}

fn runaway() -> Result<Vec<CheckLine>> {
    let ald = ald_runaway_run(1e-6, 20.0, 1e-3)?;
    let model = ald.meta.model;
    let report = audit(&ald, &model, &FieldSpec::Vacuum, &Default::default());
    let rate = runaway_rate(&ald)?.rate;
    let target = 1.0 / characteristic_time(1.0, 1.0);
    let dt = 1e-3;
    let imp = switched_off_run(1.0, 1.0, 5.0, dt)?;
    let after = imp
        .rows
        .iter()
        .filter(|r| r.tau > 1.0 + dt)
        .map(|r| r.a2.abs())
        .fold(0.0, f64::max);
    Ok(vec![
        CheckLine::holds("ALD flagged as run-away", report.runaway_detected),
        CheckLine::at_most("relative error of the ALD growth rate", (rate - target).abs() / target, 0.02),
        CheckLine::at_most("implicit a^2 after the field is switched off", after, 1e-12),
    ])
}

/// Lorentz run on the hyperbola of unit acceleration.
pub fn hyperbolic_run(dt: f64, tau_end: f64) -> Result<TrajectoryRecord> {
    let model = ForceModelSpec::new(ModelKind::Lorentz, 1.0, 1.0, None);
    let field = FieldSpec::constant_e([1.0, 0.0, 0.0]);
    let opts = SolverOptions {
        dt,
        ..Default::default()
    };
    let init = WorldlineState::hyperbolic(1.0, 0.0);
    integrate(&model, &field, &init, (0.0, tau_end), &opts).map_err(|ab| ab.error)
}

/// Largest error in `x` and `u` against the exact hyperbola, relative to
/// the size of the exact vectors.
pub fn hyperbolic_error(traj: &TrajectoryRecord) -> f64 {
    traj.rows
        .iter()
        .map(|r| {
            let exact = WorldlineState::hyperbolic(1.0, r.tau);
            let ex = (r.x - exact.x).max_abs() / exact.x.max_abs();
            let eu = (r.u - exact.u).max_abs() / exact.u.max_abs();
            ex.max(eu)
        })
        .fold(0.0, f64::max)
}

/// Steps for the convergence fit. Below about `3e-3` the error over
/// `[0, 5]` reaches the roundoff floor, amplified by the `e^tau` growth.
pub const CONVERGENCE_STEPS: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

fn hyperbolic() -> Result<Vec<CheckLine>> {
    let err = hyperbolic_error(&hyperbolic_run(1e-3, 5.0)?);
    let errs = CONVERGENCE_STEPS
        .iter()
        .map(|dt| Ok(hyperbolic_error(&hyperbolic_run(*dt, 5.0)?)))
        .collect::<Result<Vec<_>>>()?;
    let slope = fit_power_law(&CONVERGENCE_STEPS, &errs)?.exponent;
    Ok(vec![
        CheckLine::at_most("relative error at dt = 1e-3", err, 1e-8),
        CheckLine::within("rk4 convergence slope", slope, 3.8, 4.2),
    ])
}

/// Smooth increasing map `t + amp sin(k t + phase) / k` with `|amp| < 0.9`.
pub fn random_monotone_map(rng: &mut impl Rng) -> impl Fn(f64) -> f64 {
    let amp = rng.random_range(-0.9..0.9);
    let k = rng.random_range(0.5..3.0);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    move |t: f64| t + amp * (k * t + phase).sin() / k
}

/// Proper times (`eta`, maximal-acceleration) of the unit hyperbola over
/// `[0, 2]` under the identity and `maps` random reparameterizations.
pub fn reparam_proper_times(seed: u64, maps: usize, params: &MaxAccelParams) -> Result<Vec<(f64, f64)>> {
    let curve = SampledCurve::from_fn(0.0, 2.0, 4001, "hyperbola", |t| WorldlineState::hyperbolic(1.0, t).x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![(proper_time_eta(&curve)?.value, proper_time_maxaccel(&curve, params)?.value)];
    for _ in 0..maps {
        let c = reparameterize(&curve, random_monotone_map(&mut rng))?;
        out.push((proper_time_eta(&c)?.value, proper_time_maxaccel(&c, params)?.value));
    }
    Ok(out)
}

fn relative_spread(vs: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = vs.clone().fold(f64::MIN, f64::max);
    let lo = vs.fold(f64::MAX, f64::min);
    (hi - lo) / hi.abs()
}

fn reparam(seed: u64) -> Result<Vec<CheckLine>> {
    let params = MaxAccelParams::new(10.0)?;
    let taus = reparam_proper_times(seed, 20, &params)?;
    Ok(vec![
        CheckLine::at_most("relative spread of the eta proper time", relative_spread(taus.iter().map(|t| t.0)), 1e-6),
        CheckLine::at_most("relative spread of the g proper time", relative_spread(taus.iter().map(|t| t.1)), 1e-6),
        CheckLine::at_most("eta proper time vs exact 2", (taus[0].0 - 2.0).abs() / 2.0, 1e-6),
    ])
}

/// A random normalized state with random field, charge and mass.
pub fn random_sample(rng: &mut impl Rng) -> (WorldlineState, EMFieldTensor, f64, f64) {
    let mut comp = || rng.random_range(-1.0..1.0);
    let spatial = [comp(), comp(), comp()];
    let f = EMFieldTensor::new([comp(), comp(), comp()], [comp(), comp(), comp()]);
    let x = FourVector::new(comp(), comp(), comp(), comp());
    let e = rng.random_range(0.5..2.0);
    let m = rng.random_range(0.5..2.0);
    let s = WorldlineState::new(0.0, x, FourVector::complete_timelike(spatial, 1.0), FourVector::ZERO);
    (s, f, e, m)
}

/// Largest `||M O - I||_inf` (maximum row sum) over `n` random states and
/// fields, with `e = m = 1`.
pub fn operator_inverse_defect(seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (s, f, _, _) = random_sample(&mut rng);
            let (e, m) = (1.0, 1.0);
            let d = operator_m(&s, &f, e, m) * operator_o(&s, &f, e, m) - nalgebra::Matrix4::identity();
            d.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Constant `E` for which the implicit model in that field (starting at
/// rest) has `epsilon = eps0`.
pub fn tuned_field_strength(e: f64, m: f64, a_max: f64, eps0: f64) -> f64 {
    let tau0 = characteristic_time(e, m);
    let s = eps0 * a_max * a_max;
    let n = 1.0 / (1.0 - eps0);
    let s0 = s + tau0 * tau0 * n * s * s;
    m / e * (s0 / n).sqrt()
}

/// Implicit model in a constant field tuned to `eps0`, with `A_max = 100`.
pub fn tuned_constant_run(eps0: f64, tau_end: f64, dt: f64) -> Result<TrajectoryRecord> {
    let a_max = 100.0;
    let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(a_max));
    let field = FieldSpec::constant_e([tuned_field_strength(1.0, 1.0, a_max, eps0), 0.0, 0.0]);
    let opts = SolverOptions {
        dt,
        ..Default::default()
    };
    let init = prepare_initial(&model, &field, 0.0, FourVector::ZERO, [0.0; 3], None, &opts)?;
    integrate(&model, &field, &init, (0.0, tau_end), &opts).map_err(|ab| ab.error)
}

fn identity_suite(seed: u64) -> Result<Vec<CheckLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst_fl2 = (0..1000)
        .map(|_| {
            let (s, f, e, _) = random_sample(&mut rng);
            lorentz_force_sq(&f, e, &s.u)
        })
        .fold(f64::INFINITY, f64::min);
    let traj = tuned_constant_run(1e-4, 5.0, 1e-3)?;
    let model = traj.meta.model;
    let report = audit(&traj, &model, &traj.meta.field, &Default::default());
    let fl2 = report.check("fl2_identity").expect("present");
    let larmor = report.check("larmor_contraction").expect("present");
    let eps_spread = linear_fit(&traj.taus(), &traj.rows.iter().map(|r| r.epsilon).collect::<Vec<_>>())?;
    Ok(vec![
        CheckLine::at_most("negated smallest Lorentz-force square", -worst_fl2, 1e-12),
        CheckLine::at_most("||M O - I|| over 1000 samples", operator_inverse_defect(seed, 1000), 1e-13),
        CheckLine::at_most("F_L^2 identity relative residual", fl2.max_residual, fl2.tolerance),
        CheckLine::at_most("Larmor contraction / (m tau0 a^2)", larmor.max_residual, larmor.tolerance),
        CheckLine::at_most("drift of epsilon along the run", eps_spread.exponent.abs(), 1e-9),
    ])
}
