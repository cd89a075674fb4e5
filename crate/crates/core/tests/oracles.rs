//! Cross-module checks against closed forms and scaling laws.

use radreact::diagnostics::{audit, epsilon0_scaling_study, Scenario};
use radreact::dynamics::{
    characteristic_time, explicit_approx_accel, landau_lifshitz_accel, solve_implicit_accel, RootOptions,
};
use radreact::experiments::canonical::tuned_field_strength;
use radreact::fields::{faraday_at, lorentz_force};
use radreact::integrator::step;
use radreact::{
    integrate, prepare_initial, FieldSpec, ForceModelSpec, FourVector, IndexRaising,
    MaxAccelParams, ModelKind, SolverOptions, TrajectoryRecord, WorldlineState,
};

fn opts(dt: f64) -> SolverOptions {
    SolverOptions {
        dt,
        ..Default::default()
    }
}

fn run(model: &ForceModelSpec, field: &FieldSpec, span: (f64, f64), dt: f64) -> TrajectoryRecord {
    let o = opts(dt);
    let init = prepare_initial(model, field, span.0, FourVector::ZERO, [0.0; 3], None, &o).unwrap();
    integrate(model, field, &init, span, &o).unwrap()
}

#[test]
fn hyperbolic_lorentz_run_has_constant_epsilon() {
    let model = ForceModelSpec::new(ModelKind::Lorentz, 1.0, 1.0, Some(100.0));
    let t = run(&model, &FieldSpec::constant_e([1.0, 0.0, 0.0]), (0.0, 3.0), 1e-3);
    for r in &t.rows {
        assert!((r.epsilon - 1e-4).abs() <= 1e-12, "{} at {}", r.epsilon, r.tau);
    }
}

#[test]
fn landau_lifshitz_correction_is_linear_in_field() {
    let x = FourVector::new(0.0, 0.1, 0.2, 0.3);
    let u = FourVector::complete_timelike([0.2, -0.1, 0.3], 1.0);
    let state = WorldlineState::new(0.0, x, u, FourVector::ZERO);
    let rel = |k: f64| {
        let spec = FieldSpec::Constant {
            e: [0.3 * k, 0.0, 0.1 * k],
            b: [0.0, 0.2 * k, 0.0],
        };
        let lorentz = lorentz_force(&faraday_at(&spec, &x, 0.0), 1.0, &u);
        let ll = landau_lifshitz_accel(&state, &spec, 1.0, 1.0, 0.0);
        (ll - lorentz).max_abs() / lorentz.max_abs()
    };
    let (r1, r2, r4) = (rel(1e-2), rel(5e-3), rel(2.5e-3));
    assert!((r1 / r2 - 2.0).abs() < 1e-3, "{r1} {r2}");
    assert!((r2 / r4 - 2.0).abs() < 1e-3, "{r2} {r4}");
}

#[test]
fn explicit_law_gap_is_cubic_in_tau0_a() {
    // At rest the implicit root is a = f/m - tau0 s u with s0 - s = tau0^2 s^2,
    // so the relative gap to the explicit law is (tau0 a)^3 to leading order.
    let (e, m) = (1.0, 1.0);
    let tau0 = characteristic_time(e, m);
    let a_max = 1.0 / tau0;
    let params = MaxAccelParams::new(a_max).unwrap();
    let rest = WorldlineState::new(0.0, FourVector::ZERO, FourVector::new(1.0, 0.0, 0.0, 0.0), FourVector::ZERO);
    for eps0 in [1e-4, 4e-4] {
        let strength = tuned_field_strength(e, m, a_max, eps0);
        let f = faraday_at(&FieldSpec::constant_e([strength, 0.0, 0.0]), &FourVector::ZERO, 0.0);
        let imp = solve_implicit_accel(&rest, &f, e, m, &params, IndexRaising::Eta, None, &RootOptions::default()).unwrap();
        let exp = explicit_approx_accel(&rest, &f, e, m);
        let rel = (imp - exp).max_abs() / imp.max_abs();
        let want = (tau0 * (-imp.0[0] * imp.0[0] + imp.0[1] * imp.0[1]).sqrt()).powi(3);
        assert!((rel / want - 1.0).abs() < 0.05, "{rel} vs {want}");
        assert!(rel <= 1.1e-6 * (eps0 / 1e-4).powf(1.5), "{rel}");
    }
}

#[test]
fn uniform_model_keeps_a2_constant() {
    let model = ForceModelSpec::new(ModelKind::UniformCovariant, 1.0, 1.0, Some(3.0));
    let t = run(&model, &FieldSpec::constant_e([1.0, 0.0, 0.0]), (0.0, 3.0), 1e-3);
    let a0 = t.rows[0].a2;
    for r in &t.rows {
        assert!((r.a2 - a0).abs() <= 1e-8, "{} at {}", r.a2, r.tau);
    }
}

#[test]
fn weak_field_step_gap_is_quadratic_in_field() {
    // The implicit model lives on the g-shell, so its u is longer by about
    // eps/2 with eps = (E/A)^2; that dominates the radiation term here.
    let gap = |strength: f64| {
        let field = FieldSpec::constant_e([strength, 0.0, 0.0]);
        let o = opts(1e-2);
        let step_with = |kind| {
            let model = ForceModelSpec::new(kind, 1.0, 1.0, Some(10.0));
            let init = prepare_initial(&model, &field, 0.0, FourVector::ZERO, [0.1, 0.0, 0.0], None, &o).unwrap();
            step(&model, &field, &init, o.dt, &o).unwrap()
        };
        (step_with(ModelKind::ImplicitMaxaccel).u - step_with(ModelKind::Lorentz).u).max_abs()
    };
    let fields = [0.1, 0.05, 0.025];
    let gaps: Vec<f64> = fields.iter().map(|s| gap(*s)).collect();
    for w in gaps.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.05, "{gaps:?}");
    }
    let lead = 0.5 * (0.1f64 / 10.0).powi(2) * 1.005;
    assert!((gaps[0] / lead - 1.0).abs() < 0.05, "{} vs {lead}", gaps[0]);
}

#[test]
fn halving_dt_gains_fourth_order() {
    let model = ForceModelSpec::new(ModelKind::Lorentz, 1.0, 1.0, None);
    let field = FieldSpec::constant_e([1.0, 0.0, 0.0]);
    let err = |dt: f64| {
        let init = WorldlineState::hyperbolic(1.0, 0.0);
        let t = integrate(&model, &field, &init, (0.0, 2.0), &opts(dt)).unwrap();
        let last = t.rows.last().unwrap();
        (last.x - WorldlineState::hyperbolic(1.0, last.tau).x).max_abs()
    };
    let ratio = err(0.04) / err(0.02);
    assert!(ratio >= 14.0, "{ratio}");
}

#[test]
fn implicit_pulse_run_is_not_flagged() {
    let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(1e4));
    let w = 0.01;
    let field = FieldSpec::GaussianPulse { kappa: 0.5, width: w };
    let t = run(&model, &field, (-10.0 * w, 10.0 * w), w / 50.0);
    let report = audit(&t, &model, &field, &Default::default());
    assert!(!report.preacceleration_detected, "{:?}", report.pre_pulse);
    assert!(!report.runaway_detected);
}

#[test]
fn gap_scaling_over_halved_fields() {
    let base = Scenario {
        model: ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0)),
        field: FieldSpec::constant_e([1.0, 0.0, 0.0]),
        position: FourVector::ZERO,
        velocity: [0.0; 3],
        tau_span: (0.0, 2.0),
        options: opts(1e-3),
    };
    let study = epsilon0_scaling_study(&[1.0, 0.5, 0.25, 0.125], &base);
    let fit = study.fit.unwrap();
    assert!(fit.exponent >= 1.0 && fit.r2 >= 0.99, "{fit:?}");
    let gaps: Vec<f64> = study.rows.iter().map(|r| r.gap.unwrap()).collect();
    assert!(gaps.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn extreme_scale_is_reported_as_breach() {
    // The root stays below A_max^2 while E < tau0 A^2 = 66.7 here.
    let base = Scenario {
        model: ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0)),
        field: FieldSpec::constant_e([1.0, 0.0, 0.0]),
        position: FourVector::ZERO,
        velocity: [0.0; 3],
        tau_span: (0.0, 1.0),
        options: opts(1e-2),
    };
    let study = epsilon0_scaling_study(&[1.0, 100.0], &base);
    assert!(study.rows[0].excluded.is_none());
    let why = study.rows[1].excluded.as_deref().unwrap();
    assert!(why.contains("maximal"), "{why}");
}
