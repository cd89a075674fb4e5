//! External field catalog and the worldline correction tensor built from jets.
//!
//! Components: `F_{i0} = E_i` and `F_{ij} = eps_{ijk} B_k` (both indices
//! down). A static charge in `E = (E, 0, 0)` is then pushed along `+x`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxaccel::MaxAccelParams;
use crate::minkowski::{eta_sq, FourVector};
use crate::worldline::WorldlineState;

/// Antisymmetric field value, stored as its electric and magnetic parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EMFieldTensor {
    pub e: [f64; 3],
    pub b: [f64; 3],
}

impl EMFieldTensor {
    pub const ZERO: EMFieldTensor = EMFieldTensor {
        e: [0.0; 3],
        b: [0.0; 3],
    };

    pub fn new(e: [f64; 3], b: [f64; 3]) -> Self {
        EMFieldTensor { e, b }
    }

    pub fn electric(e: [f64; 3]) -> Self {
        EMFieldTensor { e, b: [0.0; 3] }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().chain(&self.b).all(|c| *c == 0.0)
    }

    /// `F_{mu nu}`.
    pub fn lower_matrix(&self) -> Matrix4<f64> {
        let [e1, e2, e3] = self.e;
        let [b1, b2, b3] = self.b;
        Matrix4::new(
            0.0, -e1, -e2, -e3, //
            e1, 0.0, b3, -b2, //
            e2, -b3, 0.0, b1, //
            e3, b2, -b1, 0.0,
        )
    }

    /// Reads the independent components of an antisymmetric `F_{mu nu}`.
    pub fn from_lower_matrix(f: &Matrix4<f64>) -> Self {
        EMFieldTensor {
            e: [f[(1, 0)], f[(2, 0)], f[(3, 0)]],
            b: [f[(2, 3)], f[(3, 1)], f[(1, 2)]],
        }
    }

    /// `F^mu_nu = eta^{mu rho} F_{rho nu}`.
    pub fn mixed(&self) -> Matrix4<f64> {
        let mut m = self.lower_matrix();
        for j in 0..4 {
            m[(0, j)] = -m[(0, j)];
        }
        m
    }

    /// `F^mu_nu v^nu`.
    pub fn apply(&self, v: &FourVector) -> FourVector {
        v.transformed(&self.mixed())
    }
}

impl Add for EMFieldTensor {
    type Output = EMFieldTensor;
    fn add(self, o: EMFieldTensor) -> EMFieldTensor {
        EMFieldTensor {
            e: std::array::from_fn(|i| self.e[i] + o.e[i]),
            b: std::array::from_fn(|i| self.b[i] + o.b[i]),
        }
    }
}

impl Sub for EMFieldTensor {
    type Output = EMFieldTensor;
    fn sub(self, o: EMFieldTensor) -> EMFieldTensor {
        self + o * -1.0
    }
}

impl Mul<f64> for EMFieldTensor {
    type Output = EMFieldTensor;
    fn mul(self, k: f64) -> EMFieldTensor {
        EMFieldTensor {
            e: self.e.map(|c| c * k),
            b: self.b.map(|c| c * k),
        }
    }
}

/// Field catalog. Serialized with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Vacuum,
    Constant {
        e: [f64; 3],
        #[serde(default)]
        b: [f64; 3],
    },
    /// `E_x(tau) = kappa / (width sqrt(2 pi)) exp(-tau^2 / (2 width^2))`,
    /// with impulse `kappa` for every width.
    GaussianPulse { kappa: f64, width: f64 },
    /// `E = amplitude cos(k.x - |k| t + phase)`, `B = k_hat x E`.
    PlaneWave {
        amplitude: [f64; 3],
        wave_vector: [f64; 3],
        #[serde(default)]
        phase: f64,
    },
    /// `inner` restricted to `on <= tau < off`.
    Switched {
        inner: Box<FieldSpec>,
        #[serde(default)]
        on: Option<f64>,
        #[serde(default)]
        off: Option<f64>,
    },
    Sum { fields: Vec<FieldSpec> },
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl FieldSpec {
    pub fn constant_e(e: [f64; 3]) -> Self {
        FieldSpec::Constant { e, b: [0.0; 3] }
    }

    /// Checks the numeric parameters.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            FieldSpec::Vacuum => Ok(()),
            FieldSpec::Constant { e, b } => {
                if e.iter().chain(b).all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    bad("constant field has non-finite components".into())
                }
            }
            FieldSpec::GaussianPulse { kappa, width } => {
                if !(*width > 0.0) || !width.is_finite() {
                    bad(format!("pulse width must be positive, got {width}"))
                } else if !kappa.is_finite() {
                    bad("pulse kappa must be finite".into())
                } else {
                    Ok(())
                }
            }
            FieldSpec::PlaneWave {
                amplitude,
                wave_vector,
                phase,
            } => {
                let k2 = dot3(*wave_vector, *wave_vector);
                if !(k2 > 0.0) || !k2.is_finite() {
                    return bad("plane wave needs a nonzero finite wave vector".into());
                }
                if !amplitude.iter().all(|c| c.is_finite()) || !phase.is_finite() {
                    return bad("plane wave amplitude and phase must be finite".into());
                }
                let along = dot3(*amplitude, *wave_vector);
                let scale = dot3(*amplitude, *amplitude).sqrt() * k2.sqrt();
                if along.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return bad("plane wave amplitude must be transverse to the wave vector".into());
                }
                Ok(())
            }
            FieldSpec::Switched { inner, on, off } => {
                if let (Some(a), Some(b)) = (on, off) {
                    if a >= b {
                        return bad(format!("switch window is empty: on = {a}, off = {b}"));
                    }
                }
                inner.validate()
            }
            FieldSpec::Sum { fields } => fields.iter().try_for_each(|f| f.validate()),
        }
    }

    /// The same field with every amplitude multiplied by `k`.
    pub fn scaled(&self, k: f64) -> FieldSpec {
        match self {
            FieldSpec::Vacuum => FieldSpec::Vacuum,
            FieldSpec::Constant { e, b } => FieldSpec::Constant {
                e: e.map(|c| c * k),
                b: b.map(|c| c * k),
            },
            FieldSpec::GaussianPulse { kappa, width } => FieldSpec::GaussianPulse {
                kappa: kappa * k,
                width: *width,
            },
            FieldSpec::PlaneWave {
                amplitude,
                wave_vector,
                phase,
            } => FieldSpec::PlaneWave {
                amplitude: amplitude.map(|c| c * k),
                wave_vector: *wave_vector,
                phase: *phase,
            },
            FieldSpec::Switched { inner, on, off } => FieldSpec::Switched {
                inner: Box::new(inner.scaled(k)),
                on: *on,
                off: *off,
            },
            FieldSpec::Sum { fields } => FieldSpec::Sum {
                fields: fields.iter().map(|f| f.scaled(k)).collect(),
            },
        }
    }

    /// True if the field vanishes everywhere by construction.
    pub fn is_vacuum(&self) -> bool {
        match self {
            FieldSpec::Vacuum => true,
            FieldSpec::Constant { e, b } => e.iter().chain(b).all(|c| *c == 0.0),
            FieldSpec::GaussianPulse { kappa, .. } => *kappa == 0.0,
            FieldSpec::PlaneWave { amplitude, .. } => amplitude.iter().all(|c| *c == 0.0),
            FieldSpec::Switched { inner, .. } => inner.is_vacuum(),
            FieldSpec::Sum { fields } => fields.iter().all(|f| f.is_vacuum()),
        }
    }

    /// Width of the first Gaussian pulse in the spec, if any.
    pub fn pulse_width(&self) -> Option<f64> {
        match self {
            FieldSpec::GaussianPulse { width, .. } => Some(*width),
            FieldSpec::Switched { inner, .. } => inner.pulse_width(),
            FieldSpec::Sum { fields } => fields.iter().find_map(|f| f.pulse_width()),
            _ => None,
        }
    }
}

/// Evaluates the field at event `x` and proper time `tau`.
pub fn faraday_at(spec: &FieldSpec, x: &FourVector, tau: f64) -> EMFieldTensor {
    match spec {
        FieldSpec::Vacuum => EMFieldTensor::ZERO,
        FieldSpec::Constant { e, b } => EMFieldTensor::new(*e, *b),
        FieldSpec::GaussianPulse { kappa, width } => {
            let ex = kappa / (width * (2.0 * PI).sqrt()) * (-0.5 * (tau / width).powi(2)).exp();
            EMFieldTensor::electric([ex, 0.0, 0.0])
        }
        FieldSpec::PlaneWave {
            amplitude,
            wave_vector,
            phase,
        } => {
            let k = *wave_vector;
            let omega = dot3(k, k).sqrt();
            let c = (dot3(k, x.spatial()) - omega * x[0] + phase).cos();
            let e = amplitude.map(|a| a * c);
            let khat = k.map(|v| v / omega);
            EMFieldTensor::new(e, cross(khat, e))
        }
        FieldSpec::Switched { inner, on, off } => {
            let active = on.is_none_or(|a| tau >= a) && off.is_none_or(|b| tau < b);
            if active {
                faraday_at(inner, x, tau)
            } else {
                EMFieldTensor::ZERO
            }
        }
        FieldSpec::Sum { fields } => fields
            .iter()
            .fold(EMFieldTensor::ZERO, |acc, f| acc + faraday_at(f, x, tau)),
    }
}

/// `e F^mu_nu u^nu` with the index raised by `eta`.
pub fn lorentz_force(f: &EMFieldTensor, e: f64, u: &FourVector) -> FourVector {
    f.apply(u) * e
}

/// `eta(f, f)` for the Lorentz force; nonnegative up to roundoff.
pub fn lorentz_force_sq(f: &EMFieldTensor, e: f64, u: &FourVector) -> f64 {
    eta_sq(&lorentz_force(f, e, u))
}

/// Rate of change of the field seen along the worldline through `x` with
/// velocity `u`, by central differences with step `h`.
pub fn field_rate(spec: &FieldSpec, x: &FourVector, u: &FourVector, tau: f64, h: f64) -> EMFieldTensor {
    let fwd = faraday_at(spec, &(*x + *u * h), tau + h);
    let bwd = faraday_at(spec, &(*x - *u * h), tau - h);
    (fwd - bwd) * (0.5 / h)
}

/// Expansion coefficients of the jet correction: `B = beta . (u, a, j)`,
/// `C = gamma . (u, a, j)`, `D = delta . (u, a, j)`. Higher jets are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JetCorrectionCoefficients {
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
    pub delta: [f64; 3],
}

impl JetCorrectionCoefficients {
    /// Second-order selection: only `beta_2 = (4/3) e^2 a^2 / eps_dot`.
    pub fn second_order(e: f64, a2: f64, eps_dot: f64, eps_dot_min: f64) -> Result<Self> {
        if eps_dot.abs() < eps_dot_min {
            return Err(Error::DegenerateRegime {
                eps_dot,
                eps_dot_min,
            });
        }
        Ok(JetCorrectionCoefficients {
            beta: [0.0, 4.0 / 3.0 * e * e * a2 / eps_dot, 0.0],
            ..Default::default()
        })
    }

    pub fn is_second_order(&self) -> bool {
        self.beta[0] == 0.0 && self.beta[2] == 0.0 && self.gamma == [0.0; 3] && self.delta == [0.0; 3]
    }
}

/// The correction tensor `B_mu u_nu - B_nu u_mu + C_mu a_nu - C_nu a_mu + D_mu j_nu - D_nu j_mu`,
/// with indices lowered by `g`.
pub fn upsilon_worldline(
    coeffs: &JetCorrectionCoefficients,
    state: &WorldlineState,
    jerk: &FourVector,
    params: &MaxAccelParams,
) -> Result<EMFieldTensor> {
    let conf = params.conformal_factor(&state.a, state.tau)?;
    let jets = [state.u, state.a, *jerk];
    let combo = |c: &[f64; 3]| {
        c.iter()
            .zip(&jets)
            .fold(FourVector::ZERO, |acc, (k, v)| acc + *v * *k)
    };
    let pairs = [
        (combo(&coeffs.beta), state.u),
        (combo(&coeffs.gamma), state.a),
        (combo(&coeffs.delta), *jerk),
    ];
    let mut f = Matrix4::zeros();
    for (p, q) in pairs {
        let (pl, ql) = (p.lower(), q.lower());
        for mu in 0..4 {
            for nu in 0..4 {
                f[(mu, nu)] += conf * conf * (pl.0[mu] * ql.0[nu] - pl.0[nu] * ql.0[mu]);
            }
        }
    }
    Ok(EMFieldTensor::from_lower_matrix(&f))
}

/// `Upsilon^mu_nu u^nu` with the first index raised by `g`.
pub fn upsilon_contract(
    upsilon: &EMFieldTensor,
    state: &WorldlineState,
    params: &MaxAccelParams,
) -> Result<FourVector> {
    let conf = params.conformal_factor(&state.a, state.tau)?;
    Ok(upsilon.apply(&state.u) * (1.0 / conf))
}
