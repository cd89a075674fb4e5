//! Time stepping with per-step renormalization, diagnostics and event detection.

use std::cell::Cell;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    explicit_approx_accel, landau_lifshitz_accel, ald_rhs, solve_implicit_accel, ForceModelSpec,
    IndexRaising, ModelKind, RootOptions,
};
use crate::error::{Error, Result};
use crate::fields::{faraday_at, field_rate, lorentz_force, FieldSpec};
use crate::maxaccel::{bare_mass, MaxAccelParams, EPS_DOT_MIN};
use crate::minkowski::{eta_dot, eta_sq, FourVector, NORMALIZATION_TOL};
use crate::trajectory::{Event, EventKind, Termination, TrajectoryMeta, TrajectoryRecord, TrajectoryRow};
use crate::worldline::{finite_diff_series, WorldlineState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub method: Method,
    /// Fixed step, or initial step for the adaptive method.
    pub dt: f64,
    /// Adaptive error tolerance and implicit-root tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub eps_dot_min: f64,
    /// ALD aborts once `a^2` exceeds this multiple of its initial value in zero field.
    pub runaway_factor: f64,
    /// Rescale `u` onto the model's unit shell after every step.
    pub renormalize: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::Rk4Fixed,
            dt: 1e-3,
            tol: 1e-12,
            max_iter: 50,
            eps_dot_min: EPS_DOT_MIN,
            runaway_factor: 1e12,
            renormalize: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.eps_dot_min > 0.0) {
            return bad(format!("eps_dot_min must be positive, got {}", self.eps_dot_min));
        }
        if !(self.runaway_factor > 1.0) {
            return bad(format!("runaway_factor must exceed 1, got {}", self.runaway_factor));
        }
        Ok(())
    }

    pub fn root(&self) -> RootOptions {
        RootOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

/// A run that stopped early, with everything accepted up to that point.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct Aborted {
    pub error: Error,
    pub partial: TrajectoryRecord,
}

/// Rows required before a run of near-zero `eps_dot` counts as a stratum.
pub const STRATUM_MIN_ROWS: usize = 3;

/// Largest absolute step count for one integration.
const MAX_STEPS: usize = 20_000_000;

type Vec12 = SVector<f64, 12>;

fn pack(x: &FourVector, u: &FourVector, a: &FourVector) -> Vec12 {
    let mut y = Vec12::zeros();
    for i in 0..4 {
        y[i] = x[i];
        y[4 + i] = u[i];
        y[8 + i] = a[i];
    }
    y
}

fn part(y: &Vec12, k: usize) -> FourVector {
    FourVector(std::array::from_fn(|i| y[4 * k + i]))
}

/// Right-hand side evaluator for one model and field.
struct System<'a> {
    model: &'a ForceModelSpec,
    field: &'a FieldSpec,
    params: MaxAccelParams,
    root: RootOptions,
    seed: Cell<Option<FourVector>>,
}

impl<'a> System<'a> {
    fn new(model: &'a ForceModelSpec, field: &'a FieldSpec, opts: &SolverOptions) -> Self {
        System {
            model,
            field,
            params: model.params(),
            root: opts.root(),
            seed: Cell::new(None),
        }
    }

    fn e(&self) -> f64 {
        self.model.charge
    }

    fn m(&self) -> f64 {
        self.model.mass
    }

    /// Model acceleration at `(tau, x, u)`; `a_state` is used only by ALD.
    fn accel(&self, tau: f64, x: &FourVector, u: &FourVector, a_state: &FourVector, stage: Option<usize>) -> Result<FourVector> {
        let (e, m) = (self.e(), self.m());
        let f = faraday_at(self.field, x, tau);
        let st = WorldlineState::new(tau, *x, *u, *a_state);
        match self.model.model {
            ModelKind::Lorentz | ModelKind::UniformCovariant => Ok(lorentz_force(&f, e, u) * (1.0 / m)),
            ModelKind::LandauLifshitz => Ok(landau_lifshitz_accel(&st, self.field, e, m, tau)),
            ModelKind::ExplicitApprox => Ok(explicit_approx_accel(&st, &f, e, m)),
            ModelKind::Ald => Ok(*a_state),
            ModelKind::ImplicitMaxaccel => {
                let raising = self.model.index_raising;
                let solve = |seed| solve_implicit_accel(&st, &f, e, m, &self.params, raising, seed, &self.root);
                let out = match solve(self.seed.get()) {
                    Err(Error::NoConvergence { .. }) if self.seed.get().is_some() => solve(None),
                    other => other,
                };
                match out {
                    Ok(a) => {
                        self.seed.set(Some(a));
                        Ok(a)
                    }
                    Err(Error::NoConvergence { iterations, residual, .. }) => Err(Error::NoConvergence {
                        iterations,
                        residual,
                        stage,
                    }),
                    Err(other) => Err(other),
                }
            }
        }
    }

    fn deriv(&self, tau: f64, y: &Vec12, stage: Option<usize>) -> Result<Vec12> {
        let (x, u, a) = (part(y, 0), part(y, 1), part(y, 2));
        if !u.is_finite() || !x.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        let acc = self.accel(tau, &x, &u, &a, stage)?;
        let jerk = if self.model.model.is_third_order() {
            let f = faraday_at(self.field, &x, tau);
            ald_rhs(&WorldlineState::new(tau, x, u, a), &f, self.e(), self.m())
        } else {
            FourVector::ZERO
        };
        Ok(pack(&u, &acc, &jerk))
    }

    fn normalized_with_g(&self) -> bool {
        self.model.model.uses_g_normalization()
    }

    /// Rescales `u` onto the model's unit shell. Returns the state and the
    /// relative rescale applied.
    ///
    /// The rescale is covariant. Recomputing `u^0` from the spatial part would
    /// keep more digits at large boosts but depends on the frame: it leaves
    /// the spatial part of any component of `a` along `u` in the dynamics.
    fn renormalize(&self, tau: f64, y: &Vec12) -> Result<(Vec12, f64)> {
        let x = part(y, 0);
        let mut u = part(y, 1);
        let mut a = part(y, 2);
        let n = eta_sq(&u);
        if !(n < 0.0) || !(u[0] > 0.0) {
            // Beyond rapidity about 13, eta(u, u) is lost to roundoff.
            return Err(Error::Normalization {
                value: n,
                tolerance: NORMALIZATION_TOL,
            });
        }
        let mut total = 1.0;
        if self.normalized_with_g() {
            for _ in 0..30 {
                let acc = self.accel(tau, &x, &u, &a, None)?;
                let conf = self.params.conformal_factor(&acc, tau)?;
                let s = 1.0 / (-conf * eta_sq(&u)).sqrt();
                u = u * s;
                total *= s;
                if (s - 1.0).abs() < 1e-15 {
                    break;
                }
            }
        } else {
            let s = 1.0 / (-n).sqrt();
            u = u * s;
            total = s;
            if self.model.model.is_third_order() {
                a += u * eta_dot(&a, &u);
            }
        }
        Ok((pack(&x, &u, &a), (total - 1.0).abs()))
    }

    /// Diagnostics at an accepted point; `epsilon_dot` and `m_b` are filled later
    /// except where known analytically.
    fn row(&self, tau: f64, y: &Vec12) -> Result<(TrajectoryRow, FourVector)> {
        let (e, m) = (self.e(), self.m());
        let (x, u, a_state) = (part(y, 0), part(y, 1), part(y, 2));
        let a = self.accel(tau, &x, &u, &a_state, None)?;
        let f = faraday_at(self.field, &x, tau);
        let a2 = eta_sq(&a);
        let epsilon = self.params.epsilon_of(&a);
        let conf = 1.0 - epsilon;
        let mut force = lorentz_force(&f, e, &u);
        if self.model.model == ModelKind::ImplicitMaxaccel && self.model.index_raising == IndexRaising::G {
            force = force * (1.0 / conf);
        }
        let uu = eta_sq(&u);
        let g_norm_residual = if self.normalized_with_g() { conf * uu + 1.0 } else { uu + 1.0 };
        let larmor_residual = m * conf * eta_dot(&a, &u) + 2.0 / 3.0 * e * e * a2;
        let mut epsilon_dot = 0.0;
        let mut jerk = FourVector::ZERO;
        if self.params.a_max.is_finite() {
            match self.model.model {
                ModelKind::Ald => {
                    jerk = ald_rhs(&WorldlineState::new(tau, x, u, a), &f, e, m);
                    epsilon_dot = 2.0 * eta_dot(&a, &jerk) / self.params.a_max_sq();
                }
                ModelKind::UniformCovariant => {
                    let rate = field_rate(self.field, &x, &u, tau, crate::dynamics::FIELD_RATE_STEP);
                    let a_dot = (rate.apply(&u) + f.apply(&a)) * (e / m);
                    epsilon_dot = 2.0 * eta_dot(&a, &a_dot) / self.params.a_max_sq();
                }
                _ => {}
            }
        }
        Ok((
            TrajectoryRow {
                tau,
                x,
                u,
                a,
                epsilon,
                epsilon_dot,
                a2,
                fl2: eta_sq(&force),
                m_b: None,
                larmor_residual,
                g_norm_residual,
            },
            jerk,
        ))
    }

    fn rk4(&self, tau: f64, y: &Vec12, h: f64) -> Result<Vec12> {
        let k1 = self.deriv(tau, y, Some(1))?;
        let k2 = self.deriv(tau + 0.5 * h, &(y + k1 * (0.5 * h)), Some(2))?;
        let k3 = self.deriv(tau + 0.5 * h, &(y + k2 * (0.5 * h)), Some(3))?;
        let k4 = self.deriv(tau + h, &(y + k3 * h), Some(4))?;
        Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    }

    /// Dormand-Prince 5(4): fifth-order solution and the embedded error vector.
    fn dopri(&self, tau: f64, y: &Vec12, h: f64) -> Result<(Vec12, Vec12)> {
        const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
        const A: [[f64; 6]; 7] = [
            [0.0; 6],
            [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
        const B4: [f64; 7] = [
            5179.0 / 57600.0,
            0.0,
            7571.0 / 16695.0,
            393.0 / 640.0,
            -92097.0 / 339200.0,
            187.0 / 2100.0,
            1.0 / 40.0,
        ];
        let mut k: Vec<Vec12> = Vec::with_capacity(7);
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate() {
                ys += kj * (h * A[s][j]);
            }
            k.push(self.deriv(tau + C[s] * h, &ys, Some(s + 1))?);
        }
        let mut y5 = *y;
        let mut err = Vec12::zeros();
        for s in 0..7 {
            y5 += k[s] * (h * B5[s]);
            err += k[s] * (h * (B5[s] - B4[s]));
        }
        Ok((y5, err))
    }
}

/// Completes an initial state for `model`: `u^0` is chosen so the spatial
/// velocity lies on the model's unit shell, and ALD gets an acceleration
/// projected orthogonal to `u` (the Lorentz acceleration if none is given).
pub fn prepare_initial(
    model: &ForceModelSpec,
    field: &FieldSpec,
    tau: f64,
    x: FourVector,
    spatial_u: [f64; 3],
    accel: Option<FourVector>,
    opts: &SolverOptions,
) -> Result<WorldlineState> {
    let sys = System::new(model, field, opts);
    let mut u = FourVector::complete_timelike(spatial_u, 1.0);
    if model.model.uses_g_normalization() {
        for _ in 0..100 {
            let a = sys.accel(tau, &x, &u, &FourVector::ZERO, None)?;
            let conf = sys.params.conformal_factor(&a, tau)?;
            let next = FourVector::complete_timelike(spatial_u, 1.0 / conf);
            let done = (next[0] - u[0]).abs() <= 1e-16 * u[0];
            u = next;
            if done {
                break;
            }
        }
    }
    let a = if model.model.is_third_order() {
        let seed = accel.unwrap_or_else(|| {
            lorentz_force(&faraday_at(field, &x, tau), model.charge, &u) * (1.0 / model.mass)
        });
        seed + u * eta_dot(&seed, &u)
    } else {
        sys.accel(tau, &x, &u, &FourVector::ZERO, None)?
    };
    Ok(WorldlineState::new(tau, x, u, a))
}

/// Normalization residual of `init` under the model's metric.
pub fn normalization_residual(model: &ForceModelSpec, field: &FieldSpec, init: &WorldlineState, opts: &SolverOptions) -> Result<f64> {
    let uu = eta_sq(&init.u);
    if !model.model.uses_g_normalization() {
        return Ok(uu + 1.0);
    }
    let sys = System::new(model, field, opts);
    let a = sys.accel(init.tau, &init.x, &init.u, &init.a, None)?;
    Ok(sys.params.conformal_factor(&a, init.tau)? * uu + 1.0)
}

struct Run<'a> {
    sys: System<'a>,
    opts: &'a SolverOptions,
    rows: Vec<TrajectoryRow>,
    jerks: Vec<FourVector>,
    events: Vec<Event>,
    max_shift: f64,
    a2_initial: f64,
}

impl<'a> Run<'a> {
    fn finish(mut self, termination: Termination) -> TrajectoryRecord {
        fill_epsilon_dot(&self.sys, &mut self.rows);
        let (e, m) = (self.sys.e(), self.sys.m());
        for r in &mut self.rows {
            r.m_b = bare_mass(e, m, r.a2, r.epsilon, r.epsilon_dot, self.opts.eps_dot_min);
        }
        let mut record = TrajectoryRecord {
            rows: self.rows,
            meta: TrajectoryMeta {
                model: *self.sys.model,
                field: self.sys.field.clone(),
                options: *self.opts,
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                events: Vec::new(),
                termination,
                max_renorm_shift: self.max_shift,
            },
        };
        let mut events = detect_events(&record, self.opts);
        events.append(&mut self.events);
        events.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        record.meta.events = events;
        record
    }

    fn abort(mut self, error: Error, tau: f64) -> Box<Aborted> {
        let kind = match &error {
            Error::NoConvergence { .. } => Some(EventKind::NoConvergence),
            Error::MaximalAccelBreach { .. } | Error::DomainBreach { .. } => Some(EventKind::MaxaccelBreach),
            Error::RunawayAbort { .. } => Some(EventKind::RunawayAbort),
            Error::RegimeViolation { .. } => Some(EventKind::UniformStratumExit),
            _ => None,
        };
        if let Some(kind) = kind {
            self.events.push(Event {
                kind,
                tau,
                detail: error.to_string(),
            });
        }
        let reason = error.to_string();
        Box::new(Aborted {
            error,
            partial: self.finish(Termination::Aborted { reason }),
        })
    }

    /// Renormalizes, records the row and runs the per-step checks.
    fn accept(&mut self, tau: f64, y: &Vec12) -> Result<Vec12> {
        let (y, shift) = if self.opts.renormalize {
            self.sys.renormalize(tau, y)?
        } else {
            (*y, 0.0)
        };
        self.max_shift = self.max_shift.max(shift);
        let (row, jerk) = self.sys.row(tau, &y)?;
        let model = self.sys.model.model;
        let params = self.sys.params;
        self.rows.push(row);
        self.jerks.push(jerk);
        if model.uses_g_normalization() && row.a2 >= params.a_max_sq() {
            return Err(Error::MaximalAccelBreach {
                a2: row.a2,
                limit: params.a_max_sq(),
            });
        }
        if model == ModelKind::UniformCovariant && row.epsilon_dot.abs() >= self.opts.eps_dot_min {
            return Err(Error::RegimeViolation {
                eps_dot: row.epsilon_dot,
                eps_dot_min: self.opts.eps_dot_min,
            });
        }
        if model == ModelKind::Ald && self.a2_initial > 0.0 && row.fl2 == 0.0 {
            let f = faraday_at(self.sys.field, &row.x, tau);
            let ratio = row.a2 / self.a2_initial;
            if f.is_zero() && ratio > self.opts.runaway_factor {
                return Err(Error::RunawayAbort { ratio, tau });
            }
        }
        Ok(y)
    }
}

fn fill_epsilon_dot(sys: &System, rows: &mut [TrajectoryRow]) {
    let analytic = matches!(sys.model.model, ModelKind::Ald | ModelKind::UniformCovariant);
    if analytic || !sys.params.a_max.is_finite() || rows.len() < 3 {
        return;
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    if let Ok(d) = finite_diff_series(&ts, &eps, 1) {
        for (r, v) in rows.iter_mut().zip(&d[0]) {
            r.epsilon_dot = *v;
        }
    }
}

/// Integrates `model` in `field` from `init` over `tau_span`.
pub fn integrate(
    model: &ForceModelSpec,
    field: &FieldSpec,
    init: &WorldlineState,
    tau_span: (f64, f64),
    opts: &SolverOptions,
) -> std::result::Result<TrajectoryRecord, Box<Aborted>> {
    let sys = System::new(model, field, opts);
    let (t0, t1) = tau_span;
    let mut run = Run {
        sys,
        opts,
        rows: Vec::new(),
        jerks: Vec::new(),
        events: Vec::new(),
        max_shift: 0.0,
        a2_initial: eta_sq(&init.a),
    };
    let checks = (|| -> Result<()> {
        model.validate()?;
        field.validate()?;
        opts.validate()?;
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument(format!("empty tau span [{t0}, {t1}]")));
        }
        if !init.x.is_finite() || !init.u.is_finite() || !init.a.is_finite() {
            return Err(Error::NonFinite("initial state"));
        }
        let res = normalization_residual(model, field, init, opts)?;
        if res.abs() > 1e-8 {
            return Err(Error::Normalization {
                value: res - 1.0,
                tolerance: 1e-8,
            });
        }
        Ok(())
    })();
    if let Err(e) = checks {
        return Err(run.abort(e, t0));
    }
    let mut y = pack(&init.x, &init.u, &init.a);
    run.sys.seed.set(None);
    y = match run.accept(t0, &y) {
        Ok(y) => y,
        Err(e) => return Err(run.abort(e, t0)),
    };
    if model.model == ModelKind::Ald {
        run.a2_initial = run.rows[0].a2;
    }
    let span = t1 - t0;
    match opts.method {
        Method::Rk4Fixed => {
            let n = ((span / opts.dt) - 1e-9).ceil().max(1.0) as usize;
            if n > MAX_STEPS {
                return Err(run.abort(Error::InvalidArgument(format!("{n} steps exceed the step limit")), t0));
            }
            let h = span / n as f64;
            for i in 0..n {
                let tau = t0 + h * i as f64;
                let next_tau = if i + 1 == n { t1 } else { t0 + h * (i + 1) as f64 };
                let stepped = run.sys.rk4(tau, &y, next_tau - tau).and_then(|yn| run.accept(next_tau, &yn));
                match stepped {
                    Ok(yn) => y = yn,
                    Err(e) => return Err(run.abort(e, next_tau)),
                }
            }
        }
        Method::Rk45Adaptive => {
            let mut tau = t0;
            let mut h = opts.dt.min(span);
            let mut steps = 0usize;
            while tau < t1 {
                if steps > MAX_STEPS {
                    return Err(run.abort(Error::StepSizeUnderflow { tau, dt: h }, tau));
                }
                steps += 1;
                let last = tau + h >= t1;
                let h_try = if last { t1 - tau } else { h };
                let (y5, err) = match run.sys.dopri(tau, &y, h_try) {
                    Ok(v) => v,
                    Err(e) => return Err(run.abort(e, tau)),
                };
                let norm = (0..12)
                    .map(|i| err[i].abs() / (opts.tol * (1.0 + y[i].abs().max(y5[i].abs()))))
                    .fold(0.0, f64::max);
                if norm <= 1.0 {
                    let next_tau = if last { t1 } else { tau + h_try };
                    match run.accept(next_tau, &y5) {
                        Ok(yn) => y = yn,
                        Err(e) => return Err(run.abort(e, next_tau)),
                    }
                    tau = next_tau;
                }
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                h = h_try * factor;
                if h < 1e-14 * span.max(1.0) {
                    return Err(run.abort(Error::StepSizeUnderflow { tau, dt: h }, tau));
                }
            }
        }
    }
    Ok(run.finish(Termination::Completed))
}

/// Advances `state` by one RK4 step of size `dt`, then renormalizes and
/// recomputes the acceleration at the new point.
pub fn step(
    model: &ForceModelSpec,
    field: &FieldSpec,
    state: &WorldlineState,
    dt: f64,
    opts: &SolverOptions,
) -> Result<WorldlineState> {
    let sys = System::new(model, field, opts);
    sys.seed.set(Some(state.a));
    let y = pack(&state.x, &state.u, &state.a);
    let tau = state.tau + dt;
    let yn = sys.rk4(state.tau, &y, dt)?;
    let (yn, _) = if opts.renormalize { sys.renormalize(tau, &yn)? } else { (yn, 0.0) };
    let (row, jerk) = sys.row(tau, &yn)?;
    let mut out = row.state();
    if model.model.is_third_order() {
        out.jerk = Some(jerk);
    }
    Ok(out)
}

/// [`step`] for the implicit model; stage failures carry the stage index.
pub fn step_implicit(
    state: &WorldlineState,
    model: &ForceModelSpec,
    field: &FieldSpec,
    dt: f64,
    opts: &SolverOptions,
) -> Result<WorldlineState> {
    if model.model != ModelKind::ImplicitMaxaccel {
        return Err(Error::InvalidArgument(format!(
            "step_implicit needs the implicit model, got {}",
            model.model
        )));
    }
    step(model, field, state, dt, opts)
}

/// Scans `eps_dot`, `a^2` for events.
///
/// Rows with `|eps_dot| < eps_dot_min` count as zero. A run of at least
/// [`STRATUM_MIN_ROWS`] zero rows, or one touching either end, is a uniform
/// stratum; a sign change, or a shorter zero run between nonzero rows, is a
/// continuation point. The first row with `a^2 >= A_max^2` is a breach.
pub fn detect_events(traj: &TrajectoryRecord, opts: &SolverOptions) -> Vec<Event> {
    let rows = &traj.rows;
    let n = rows.len();
    let mut events = Vec::new();
    let class: Vec<i8> = rows
        .iter()
        .map(|r| {
            if r.epsilon_dot.abs() < opts.eps_dot_min {
                0
            } else if r.epsilon_dot > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut i = 0;
    let mut last_nonzero: Option<usize> = None;
    while i < n {
        if class[i] == 0 {
            let start = i;
            while i < n && class[i] == 0 {
                i += 1;
            }
            let len = i - start;
            if len >= STRATUM_MIN_ROWS || start == 0 || i == n {
                events.push(Event {
                    kind: EventKind::UniformStratumEntry,
                    tau: rows[start].tau,
                    detail: format!("|eps_dot| < {:e} over {len} rows", opts.eps_dot_min),
                });
                if i < n {
                    events.push(Event {
                        kind: EventKind::UniformStratumExit,
                        tau: rows[i].tau,
                        detail: format!("eps_dot = {:e}", rows[i].epsilon_dot),
                    });
                }
            } else {
                let tau = 0.5 * (rows[start].tau + rows[i - 1].tau);
                events.push(Event {
                    kind: EventKind::ContinuationPoint,
                    tau,
                    detail: format!("isolated eps_dot zero over {len} rows"),
                });
            }
            last_nonzero = None;
        } else {
            if let Some(j) = last_nonzero {
                if class[j] != class[i] {
                    let (d0, d1) = (rows[j].epsilon_dot, rows[i].epsilon_dot);
                    let tau = rows[j].tau + (rows[i].tau - rows[j].tau) * d0 / (d0 - d1);
                    events.push(Event {
                        kind: EventKind::ContinuationPoint,
                        tau,
                        detail: "eps_dot sign change".into(),
                    });
                }
            }
            last_nonzero = Some(i);
            i += 1;
        }
    }
    if let Some(limit) = traj.meta.model.a_max.map(|a| a * a) {
        if let Some(r) = rows.iter().find(|r| r.a2 >= limit) {
            events.push(Event {
                kind: EventKind::MaxaccelBreach,
                tau: r.tau,
                detail: format!("a^2 = {} >= {limit}", r.a2),
            });
        }
    }
    events
}
