//! Force models as pure evaluators, and the algebraic identities they obey.
//!
//! Conventions: `tau0 = 2 e^2 / (3 m)`, `f = e F^mu_nu u^nu`, `F_L^2 = eta(f, f)`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{faraday_at, field_rate, lorentz_force, EMFieldTensor, FieldSpec};
use crate::maxaccel::MaxAccelParams;
use crate::minkowski::{eta_dot, eta_sq, outer, FourVector};
use crate::worldline::WorldlineState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lorentz,
    Ald,
    LandauLifshitz,
    ImplicitMaxaccel,
    ExplicitApprox,
    UniformCovariant,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Lorentz,
        ModelKind::Ald,
        ModelKind::LandauLifshitz,
        ModelKind::ImplicitMaxaccel,
        ModelKind::ExplicitApprox,
        ModelKind::UniformCovariant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lorentz => "lorentz",
            ModelKind::Ald => "ald",
            ModelKind::LandauLifshitz => "landau_lifshitz",
            ModelKind::ImplicitMaxaccel => "implicit_maxaccel",
            ModelKind::ExplicitApprox => "explicit_approx",
            ModelKind::UniformCovariant => "uniform_covariant",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Models whose velocity is normalized with `g` rather than `eta`.
    pub fn uses_g_normalization(self) -> bool {
        matches!(
            self,
            ModelKind::ImplicitMaxaccel | ModelKind::ExplicitApprox | ModelKind::UniformCovariant
        )
    }

    pub fn requires_a_max(self) -> bool {
        self.uses_g_normalization()
    }

    /// Third-order models carry the acceleration as state.
    pub fn is_third_order(self) -> bool {
        self == ModelKind::Ald
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which metric raises the first index of `F` in the implicit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRaising {
    #[default]
    Eta,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceModelSpec {
    pub model: ModelKind,
    pub charge: f64,
    pub mass: f64,
    #[serde(default)]
    pub a_max: Option<f64>,
    #[serde(default)]
    pub index_raising: IndexRaising,
}

impl ForceModelSpec {
    pub fn new(model: ModelKind, charge: f64, mass: f64, a_max: Option<f64>) -> Self {
        ForceModelSpec {
            model,
            charge,
            mass,
            a_max,
            index_raising: IndexRaising::Eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if !self.charge.is_finite() {
            return Err(Error::InvalidArgument("charge must be finite".into()));
        }
        if let Some(a) = self.a_max {
            MaxAccelParams::new(a)?;
        } else if self.model.requires_a_max() {
            return Err(Error::InvalidArgument(format!(
                "model {} requires A_max",
                self.model
            )));
        }
        if self.model == ModelKind::Ald && self.charge == 0.0 {
            return Err(Error::InvalidArgument(
                "the ALD model needs a nonzero charge".into(),
            ));
        }
        Ok(())
    }

    /// `tau0 = 2 e^2 / (3 m)`.
    pub fn tau0(&self) -> f64 {
        characteristic_time(self.charge, self.mass)
    }

    pub fn params(&self) -> MaxAccelParams {
        MaxAccelParams::from_option(self.a_max).unwrap_or_else(|_| MaxAccelParams::unbounded())
    }
}

pub fn characteristic_time(e: f64, m: f64) -> f64 {
    2.0 * e * e / (3.0 * m)
}

/// Jerk solved from the ALD equation:
/// `j = (m a - f) / (tau0 m) + eta(a, a) u`.
pub fn ald_rhs(state: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> FourVector {
    let tau0 = characteristic_time(e, m);
    let force = lorentz_force(f, e, &state.u);
    (state.a * m - force) * (1.0 / (tau0 * m)) + state.u * eta_sq(&state.a)
}

/// `m a - f - (2/3) e^2 (j - eta(a, a) u)`.
pub fn ald_residual(state: &WorldlineState, jerk: &FourVector, f: &EMFieldTensor, e: f64, m: f64) -> FourVector {
    let k = 2.0 / 3.0 * e * e;
    state.a * m - lorentz_force(f, e, &state.u) - (*jerk - state.u * eta_sq(&state.a)) * k
}

/// Finite-difference step for the field rate in the reduced-order model.
pub const FIELD_RATE_STEP: f64 = 1e-5;

/// Reduced-order acceleration: the Lorentz acceleration plus the radiation
/// correction with the jerk replaced by its Lorentz value,
/// `tau0 [(e/m) F' u + (e/m)^2 F F u - (F_L^2 / m^2) u]`.
pub fn landau_lifshitz_accel(state: &WorldlineState, spec: &FieldSpec, e: f64, m: f64, tau: f64) -> FourVector {
    let u = &state.u;
    let f = faraday_at(spec, &state.x, tau);
    let fu = f.apply(u);
    let force = fu * e;
    let tau0 = characteristic_time(e, m);
    let rate = field_rate(spec, &state.x, u, tau, FIELD_RATE_STEP);
    let correction = rate.apply(u) * (e / m) + f.apply(&fu) * (e * e / (m * m))
        - *u * (eta_sq(&force) / (m * m));
    force * (1.0 / m) + correction * tau0
}

/// The force the implicit model uses: `f / (1 - eps(a))` under `g`-raising.
fn raised_force(force: &FourVector, a: &FourVector, params: &MaxAccelParams, raising: IndexRaising) -> FourVector {
    match raising {
        IndexRaising::Eta => *force,
        IndexRaising::G => *force * (1.0 / (1.0 - params.epsilon_of(a))),
    }
}

/// `R = m a - f + (2/3) e^2 eta(a, a) u`.
pub fn implicit_residual(a_trial: &FourVector, state: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> FourVector {
    implicit_residual_raised(a_trial, state, f, e, m, &MaxAccelParams::unbounded(), IndexRaising::Eta)
}

pub fn implicit_residual_raised(
    a_trial: &FourVector,
    state: &WorldlineState,
    f: &EMFieldTensor,
    e: f64,
    m: f64,
    params: &MaxAccelParams,
    raising: IndexRaising,
) -> FourVector {
    let force = raised_force(&lorentz_force(f, e, &state.u), a_trial, params, raising);
    *a_trial * m - force + state.u * (2.0 / 3.0 * e * e * eta_sq(a_trial))
}

/// Iteration controls for the implicit root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Residual tolerance, relative to the size of the residual's terms.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-12,
            max_iter: 50,
        }
    }
}

/// Solves the implicit equation for the acceleration.
///
/// Starts from `seed`, or from the closed-form root of the `eta`-raised
/// equation if `None`. While the estimated contraction factor
/// `2 tau0^2 n F_L^2 / m^2` is below 1/2 it iterates `a <- M(a)^{-1} f` with
/// `M(b) = m (I + tau0 u b_low^T)`, then polishes with Newton on the residual.
///
/// The residual is measured against the size of its terms,
/// `1 + |f| + m |a| + tau0 m |u| sum(a_mu^2)`; at large boost `eta(a, a)`
/// cancels between components of order `|u| sqrt(a^2)` and a tolerance
/// relative to `|f|` alone falls below roundoff.
pub fn solve_implicit_accel(
    state: &WorldlineState,
    f: &EMFieldTensor,
    e: f64,
    m: f64,
    params: &MaxAccelParams,
    raising: IndexRaising,
    seed: Option<FourVector>,
    opts: &RootOptions,
) -> Result<FourVector> {
    let u = state.u;
    let force = lorentz_force(f, e, &u);
    if force == FourVector::ZERO {
        return Ok(FourVector::ZERO);
    }
    let tau0 = characteristic_time(e, m);
    let residual = |a: &FourVector| {
        let size = 1.0 + force.max_abs() + m * a.max_abs() + tau0 * m * u.max_abs() * a.0.iter().map(|c| c * c).sum::<f64>();
        (*a * m - raised_force(&force, a, params, raising) + u * (tau0 * m * eta_sq(a))).max_abs() / size
    };
    let n = -eta_sq(&u);
    let mut a = seed.unwrap_or_else(|| eta_raised_root(&force, &u, n, tau0, m));
    let contraction = 2.0 * tau0 * tau0 * n * eta_sq(&force).max(0.0) / (m * m);
    let mut res = residual(&a);
    let mut iter = 0;
    if contraction < 0.5 {
        while res > opts.tol && iter < opts.max_iter {
            let fr = raised_force(&force, &a, params, raising);
            let denom = 1.0 + tau0 * eta_dot(&a, &u);
            a = (fr - u * (tau0 * eta_dot(&a, &fr) / denom)) * (1.0 / m);
            res = residual(&a);
            iter += 1;
            if !a.is_finite() {
                break;
            }
        }
    }
    while res > opts.tol && iter < opts.max_iter && a.is_finite() {
        let jac = implicit_jacobian(&a, &u, &force, m, tau0, params, raising);
        let r = a * m - raised_force(&force, &a, params, raising) + u * (tau0 * m * eta_sq(&a));
        let Some(step) = jac.lu().solve(&r.to_vector4()) else {
            break;
        };
        a -= FourVector::from_vector4(&step);
        res = residual(&a);
        iter += 1;
    }
    if !a.is_finite() || res > opts.tol {
        return Err(Error::NoConvergence {
            iterations: iter,
            residual: res,
            stage: None,
        });
    }
    let a2 = eta_sq(&a);
    if params.a_max.is_finite() && a2 >= params.a_max_sq() {
        return Err(Error::MaximalAccelBreach {
            a2,
            limit: params.a_max_sq(),
        });
    }
    Ok(a)
}

/// `a = f/m - tau0 s u` with `s = 2 s0 / (1 + sqrt(1 + 4 tau0^2 n s0))`,
/// `s0 = F_L^2 / m^2`: the root for `eta` raising.
fn eta_raised_root(force: &FourVector, u: &FourVector, n: f64, tau0: f64, m: f64) -> FourVector {
    let s0 = eta_sq(force).max(0.0) / (m * m);
    let s = 2.0 * s0 / (1.0 + (1.0 + 4.0 * tau0 * tau0 * n * s0).sqrt());
    *force * (1.0 / m) - *u * (tau0 * s)
}

fn implicit_jacobian(
    a: &FourVector,
    u: &FourVector,
    force: &FourVector,
    m: f64,
    tau0: f64,
    params: &MaxAccelParams,
    raising: IndexRaising,
) -> Matrix4<f64> {
    let mut j = Matrix4::identity() * m + outer(u, &a.lower()) * (2.0 * tau0 * m);
    if raising == IndexRaising::G && params.a_max.is_finite() {
        let conf = 1.0 - params.epsilon_of(a);
        let k = 2.0 / (params.a_max_sq() * conf * conf);
        j -= outer(force, &a.lower()) * k;
    }
    j
}

/// `M = m I + (2 e^3 / 3m) u (F u)_low^T`.
pub fn operator_m(state: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> Matrix4<f64> {
    let w = f.apply(&state.u).lower();
    Matrix4::identity() * m + outer(&state.u, &w) * (2.0 * e.powi(3) / (3.0 * m))
}

/// Exact inverse of [`operator_m`]: `O = I/m - (2 e^3 / 3m^3) u (F u)_low^T`.
pub fn operator_o(state: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> Matrix4<f64> {
    let w = f.apply(&state.u).lower();
    Matrix4::identity() * (1.0 / m) - outer(&state.u, &w) * (2.0 * e.powi(3) / (3.0 * m.powi(3)))
}

/// `O f = f/m - tau0 (F_L^2 / m^2) u`.
pub fn explicit_approx_accel(state: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> FourVector {
    let force = lorentz_force(f, e, &state.u);
    force.transformed(&operator_o(state, f, e, m))
}

/// Rank-3 tensor `T^mu_{nu sigma}` stored as `t[mu][nu][sigma]`.
pub type Rank3 = [[[f64; 4]; 4]; 4];

/// Contracts `T^mu_{nu sigma} v^nu w^sigma`.
pub fn contract_rank3(t: &Rank3, v: &FourVector, w: &FourVector) -> FourVector {
    FourVector(std::array::from_fn(|mu| {
        (0..4)
            .flat_map(|nu| (0..4).map(move |s| (nu, s)))
            .map(|(nu, s)| t[mu][nu][s] * v[nu] * w[s])
            .sum()
    }))
}

/// Coefficients `(K, L)` for which the explicit law reads as a geodesic
/// equation `a + (K + L)(u, u) = 0` on the `g` shell:
///
/// - `K^mu_{nu s} = (e / 2m) (F^mu_nu ug_s + F^mu_s ug_nu)` with `ug = g(u, .)`
/// - `L^mu_{nu s} = (2 e^4 / 3 m^3) F_{rho s} F^rho_nu u^mu`
pub fn connection_coeffs(
    state: &WorldlineState,
    f: &EMFieldTensor,
    e: f64,
    m: f64,
    params: &MaxAccelParams,
) -> Result<(Rank3, Rank3)> {
    let conf = params.conformal_factor(&state.a, state.tau)?;
    let ug = state.u.lower().0.map(|c| c * conf);
    let mixed = f.mixed();
    let lower = f.lower_matrix();
    let mut k = [[[0.0; 4]; 4]; 4];
    let mut l = [[[0.0; 4]; 4]; 4];
    let kc = e / (2.0 * m);
    let lc = 2.0 * e.powi(4) / (3.0 * m.powi(3));
    for mu in 0..4 {
        for nu in 0..4 {
            for s in 0..4 {
                k[mu][nu][s] = kc * (mixed[(mu, nu)] * ug[s] + mixed[(mu, s)] * ug[nu]);
                let ff: f64 = (0..4).map(|rho| lower[(rho, s)] * mixed[(rho, nu)]).sum();
                l[mu][nu][s] = lc * ff * state.u[mu];
            }
        }
    }
    Ok((k, l))
}

/// `P_rad = -(2/3) e^2 eta(a, a) u`.
pub fn larmor_power(state: &WorldlineState, e: f64) -> FourVector {
    state.u * (-2.0 / 3.0 * e * e * eta_sq(&state.a))
}

/// Lorentz-form law valid on the `eps_dot = 0` stratum.
pub fn uniform_covariant_rhs(
    state: &WorldlineState,
    f: &EMFieldTensor,
    e: f64,
    m: f64,
    eps_dot: f64,
    eps_dot_min: f64,
) -> Result<FourVector> {
    if eps_dot.abs() >= eps_dot_min {
        return Err(Error::RegimeViolation {
            eps_dot,
            eps_dot_min,
        });
    }
    Ok(lorentz_force(f, e, &state.u) * (1.0 / m))
}

/// Relative residual of `F_L^2 = tau0^2 m^2 (a^2)^2 / (1 - eps) + m^2 a^2`.
pub fn fl2_identity_residual(fl2: f64, a2: f64, epsilon: f64, e: f64, m: f64) -> f64 {
    let tau0 = characteristic_time(e, m);
    let rhs = tau0 * tau0 * m * m * a2 * a2 / (1.0 - epsilon) + m * m * a2;
    let diff = fl2 - rhs;
    if fl2.abs() > 0.0 {
        (diff / fl2).abs()
    } else {
        diff.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rest() -> WorldlineState {
        WorldlineState::at_rest(0.0, FourVector::ZERO)
    }

    #[test]
    fn ald_examples() {
        let s = rest();
        assert_eq!(ald_rhs(&s, &EMFieldTensor::ZERO, 1.0, 1.0), FourVector::ZERO);
        let mut s = rest();
        s.a = FourVector::new(0.0, 0.3, 0.0, 0.0);
        let j = ald_rhs(&s, &EMFieldTensor::ZERO, 1.0, 1.0);
        let want = FourVector::new(0.09, 0.3 * 1.5, 0.0, 0.0);
        for i in 0..4 {
            assert_abs_diff_eq!(j[i], want[i], epsilon = 1e-15);
        }
        assert!(ald_residual(&s, &j, &EMFieldTensor::ZERO, 1.0, 1.0).max_abs() < 1e-12);
    }

    #[test]
    fn ald_schott_balance_on_hyperbola() {
        let f = EMFieldTensor::electric([1.0, 0.0, 0.0]);
        for tau in [0.0, 0.4, 1.3] {
            let s = WorldlineState::hyperbolic(1.0, tau);
            let j = s.jerk.unwrap();
            let schott = j - s.u * eta_sq(&s.a);
            assert!(schott.max_abs() < 1e-12);
            assert!(ald_residual(&s, &j, &f, 1.0, 1.0).max_abs() < 1e-12);
        }
    }

    #[test]
    fn landau_lifshitz_basics() {
        let s = rest();
        assert_eq!(landau_lifshitz_accel(&s, &FieldSpec::Vacuum, 1.0, 1.0, 0.0), FourVector::ZERO);
        let u = FourVector::complete_timelike([0.2, -0.4, 0.1], 1.0);
        let s = WorldlineState::new(0.0, FourVector::ZERO, u, FourVector::ZERO);
        let spec = FieldSpec::Constant {
            e: [0.3, 0.1, 0.0],
            b: [0.0, 0.2, 0.5],
        };
        let a = landau_lifshitz_accel(&s, &spec, 1.0, 1.0, 0.0);
        assert!(eta_dot(&u, &a).abs() < 1e-10);
        let gap = |k: f64| {
            let f = spec.scaled(k);
            let lorentz = lorentz_force(&faraday_at(&f, &s.x, 0.0), 1.0, &u);
            (landau_lifshitz_accel(&s, &f, 1.0, 1.0, 0.0) - lorentz).max_abs()
                / lorentz.max_abs()
        };
        assert_abs_diff_eq!(gap(1.0) / gap(0.5), 2.0, epsilon = 1e-9);
        let pulse = FieldSpec::GaussianPulse {
            kappa: 0.5,
            width: 0.01,
        };
        let early = landau_lifshitz_accel(&rest(), &pulse, 1.0, 1.0, -0.1);
        assert!(early.max_abs() <= 1e-12);
    }

    #[test]
    fn implicit_residual_examples() {
        let s = rest();
        assert_eq!(implicit_residual(&FourVector::ZERO, &s, &EMFieldTensor::ZERO, 1.0, 1.0), FourVector::ZERO);
        let a = FourVector::new(0.0, 0.7, 0.0, 0.0);
        let r = implicit_residual(&a, &s, &EMFieldTensor::electric([3.0, 0.0, 0.0]), 0.0, 2.0);
        assert_eq!(r, a * 2.0);
    }

    /// Closed-form root: `a = f/m - tau0 s u`, `s = 2 s0 / (1 + sqrt(1 + 4 tau0^2 n s0))`.
    fn closed_form_root(s: &WorldlineState, f: &EMFieldTensor, e: f64, m: f64) -> FourVector {
        let force = lorentz_force(f, e, &s.u);
        let tau0 = characteristic_time(e, m);
        let s0 = eta_sq(&force) / (m * m);
        let n = -eta_sq(&s.u);
        let root = 2.0 * s0 / (1.0 + (1.0 + 4.0 * tau0 * tau0 * n * s0).sqrt());
        force * (1.0 / m) - s.u * (tau0 * root)
    }

    #[test]
    fn implicit_solver_matches_closed_form() {
        let p = MaxAccelParams::new(1e3).unwrap();
        for (ex, e) in [(1e-3, 1.0), (1.0, 1.0), (30.0, 1.0), (2.0, -0.7)] {
            let f = EMFieldTensor::new([ex, 0.2 * ex, 0.0], [0.0, 0.0, 0.5 * ex]);
            let u = FourVector::complete_timelike([0.3, 0.1, -0.2], 1.0);
            let s = WorldlineState::new(0.0, FourVector::ZERO, u, FourVector::ZERO);
            let a = solve_implicit_accel(&s, &f, e, 1.3, &p, IndexRaising::Eta, None, &RootOptions::default()).unwrap();
            let want = closed_form_root(&s, &f, e, 1.3);
            for i in 0..4 {
                assert_abs_diff_eq!(a[i], want[i], epsilon = 1e-10 * (1.0 + want.max_abs()));
            }
            assert!(implicit_residual(&a, &s, &f, e, 1.3).max_abs() <= 1e-10 * (1.0 + ex));
        }
    }

    #[test]
    fn implicit_solver_zero_field_and_breach() {
        let p = MaxAccelParams::new(1.0).unwrap();
        let a = solve_implicit_accel(&rest(), &EMFieldTensor::ZERO, 1.0, 1.0, &p, IndexRaising::Eta, None, &RootOptions::default())
            .unwrap();
        assert_eq!(a, FourVector::ZERO);
        let strong = EMFieldTensor::electric([50.0, 0.0, 0.0]);
        assert!(matches!(
            solve_implicit_accel(&rest(), &strong, 1.0, 1.0, &p, IndexRaising::Eta, None, &RootOptions::default()),
            Err(Error::MaximalAccelBreach { .. })
        ));
        let tight = RootOptions { tol: 1e-30, max_iter: 3 };
        assert!(matches!(
            solve_implicit_accel(&rest(), &EMFieldTensor::electric([0.5, 0.0, 0.0]), 1.0, 1.0,
                &MaxAccelParams::unbounded(), IndexRaising::Eta, None, &tight),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn g_raising_solves_its_own_residual() {
        let p = MaxAccelParams::new(3.0).unwrap();
        let f = EMFieldTensor::electric([1.0, 0.0, 0.0]);
        let s = rest();
        let a = solve_implicit_accel(&s, &f, 1.0, 1.0, &p, IndexRaising::G, None, &RootOptions::default()).unwrap();
        let r = implicit_residual_raised(&a, &s, &f, 1.0, 1.0, &p, IndexRaising::G);
        assert!(r.max_abs() < 1e-11, "{}", r.max_abs());
        let a_eta = solve_implicit_accel(&s, &f, 1.0, 1.0, &p, IndexRaising::Eta, None, &RootOptions::default()).unwrap();
        assert!(a[1] > a_eta[1]);
    }

    #[test]
    fn operators_are_inverse() {
        let s = WorldlineState::new(0.0, FourVector::ZERO, FourVector::complete_timelike([0.4, -0.3, 0.9], 1.0), FourVector::ZERO);
        let f = EMFieldTensor::new([0.3, -1.2, 0.5], [2.0, 0.1, -0.7]);
        for e in [1.3, -1.3] {
            let id = operator_m(&s, &f, e, 0.8) * operator_o(&s, &f, e, 0.8);
            assert!((id - Matrix4::identity()).abs().max() <= 1e-13);
        }
        assert_eq!(operator_m(&s, &EMFieldTensor::ZERO, 1.0, 2.0), Matrix4::identity() * 2.0);
        assert_eq!(operator_o(&s, &EMFieldTensor::ZERO, 1.0, 2.0), Matrix4::identity() * 0.5);
    }

    #[test]
    fn explicit_expansion_term_by_term() {
        let u = FourVector::complete_timelike([0.1, 0.2, 0.3], 1.0);
        let s = WorldlineState::new(0.0, FourVector::ZERO, u, FourVector::ZERO);
        let f = EMFieldTensor::new([0.3, 0.0, 0.2], [0.0, 0.4, 0.0]);
        let (e, m) = (0.9, 1.7);
        let force = lorentz_force(&f, e, &u);
        let want = force * (1.0 / m) - u * (characteristic_time(e, m) * eta_sq(&force) / (m * m));
        let got = explicit_approx_accel(&s, &f, e, m);
        for i in 0..4 {
            assert_abs_diff_eq!(got[i], want[i], epsilon = 1e-15);
        }
        assert_eq!(explicit_approx_accel(&s, &EMFieldTensor::ZERO, e, m), FourVector::ZERO);
    }

    #[test]
    fn connection_geodesic_form() {
        let p = MaxAccelParams::new(5.0).unwrap();
        let f = EMFieldTensor::new([0.3, -0.2, 0.1], [0.05, 0.4, 0.0]);
        let (e, m) = (1.1, 0.9);
        let mut s = WorldlineState::new(0.0, FourVector::ZERO, FourVector::complete_timelike([0.2, 0.5, -0.1], 1.0), FourVector::ZERO);
        // Put u on the g shell of its own explicit acceleration.
        for _ in 0..50 {
            s.a = explicit_approx_accel(&s, &f, e, m);
            let conf = 1.0 - p.epsilon_of(&s.a);
            s.u = s.u * (1.0 / (-conf * eta_sq(&s.u)).sqrt());
        }
        let (k, l) = connection_coeffs(&s, &f, e, m, &p).unwrap();
        let geo = -(contract_rank3(&k, &s.u, &s.u) + contract_rank3(&l, &s.u, &s.u));
        let a = explicit_approx_accel(&s, &f, e, m);
        assert!((geo - a).max_abs() <= 1e-10);
        let (k0, l0) = connection_coeffs(&s, &EMFieldTensor::ZERO, e, m, &p).unwrap();
        assert!(k0.iter().flatten().flatten().all(|c| *c == 0.0));
        assert!(l0.iter().flatten().flatten().all(|c| *c == 0.0));
    }

    #[test]
    fn l_is_quartic_in_charge() {
        let p = MaxAccelParams::new(5.0).unwrap();
        let s = WorldlineState::new(0.0, FourVector::ZERO, FourVector::complete_timelike([0.2, 0.0, 0.1], 1.0), FourVector::ZERO);
        let f = EMFieldTensor::new([0.3, -0.2, 0.1], [0.05, 0.4, 0.0]);
        let (_, l1) = connection_coeffs(&s, &f, 1.0, 1.0, &p).unwrap();
        let (_, l2) = connection_coeffs(&s, &f, 2.0, 1.0, &p).unwrap();
        for (x, y) in l1.iter().flatten().flatten().zip(l2.iter().flatten().flatten()) {
            assert_abs_diff_eq!(*y, 16.0 * x, epsilon = 1e-14);
        }
    }

    #[test]
    fn larmor_examples() {
        assert_eq!(larmor_power(&rest(), 1.0), FourVector::ZERO);
        let mut s = rest();
        s.a = FourVector::basis(1);
        let p = larmor_power(&s, 1.0);
        assert_abs_diff_eq!(p[0], -2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(&p.0[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn uniform_rhs_regime() {
        let f = EMFieldTensor::electric([1.0, 0.0, 0.0]);
        let a = uniform_covariant_rhs(&rest(), &f, 1.0, 1.0, 0.0, 1e-8).unwrap();
        assert_eq!(a, FourVector::basis(1));
        assert!(matches!(
            uniform_covariant_rhs(&rest(), &f, 1.0, 1.0, 1e-6, 1e-8),
            Err(Error::RegimeViolation { .. })
        ));
    }

    #[test]
    fn model_spec_validation() {
        assert!(ForceModelSpec::new(ModelKind::Lorentz, 1.0, 1.0, None).validate().is_ok());
        assert!(ForceModelSpec::new(ModelKind::Lorentz, 1.0, -1.0, None).validate().is_err());
        assert!(ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, None).validate().is_err());
        assert!(ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(0.0)).validate().is_err());
        assert_eq!(ModelKind::from_name("landau_lifshitz"), Some(ModelKind::LandauLifshitz));
        assert_abs_diff_eq!(ForceModelSpec::new(ModelKind::Ald, 1.0, 1.0, None).tau0(), 2.0 / 3.0);
    }
}
