//! Worldline jets, sampled curves and the two proper-time functionals.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxaccel::MaxAccelParams;
use crate::minkowski::{eta_dot, eta_sq, FourVector};

/// Jets of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldlineState {
    pub x: FourVector,
    pub u: FourVector,
    pub a: FourVector,
    pub jerk: Option<FourVector>,
    pub tau: f64,
}

impl WorldlineState {
    pub fn new(tau: f64, x: FourVector, u: FourVector, a: FourVector) -> Self {
        WorldlineState {
            x,
            u,
            a,
            jerk: None,
            tau,
        }
    }

    pub fn with_jerk(mut self, jerk: FourVector) -> Self {
        self.jerk = Some(jerk);
        self
    }

    /// State at rest at the origin of proper time.
    pub fn at_rest(tau: f64, x: FourVector) -> Self {
        Self::new(tau, x, FourVector::basis(0), FourVector::ZERO)
    }

    /// Exact state on the hyperbolic worldline of proper acceleration `alpha`
    /// through `x = (0, 1/alpha, 0, 0)` at `tau = 0`.
    pub fn hyperbolic(alpha: f64, tau: f64) -> Self {
        let (s, c) = ((alpha * tau).sinh(), (alpha * tau).cosh());
        WorldlineState {
            x: FourVector::new(s / alpha, c / alpha, 0.0, 0.0),
            u: FourVector::new(c, s, 0.0, 0.0),
            a: FourVector::new(alpha * s, alpha * c, 0.0, 0.0),
            jerk: Some(FourVector::new(alpha * alpha * c, alpha * alpha * s, 0.0, 0.0)),
            tau,
        }
    }
}

/// A curve given by samples `(t, x(t))` with strictly increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    samples: Vec<(f64, FourVector)>,
    pub label: String,
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
}

const CSV_HEADER: [&str; 5] = ["t", "x0", "x1", "x2", "x3"];

impl SampledCurve {
    pub fn new(samples: Vec<(f64, FourVector)>, label: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                required: 2,
                got: samples.len(),
            });
        }
        for (i, (t, x)) in samples.iter().enumerate() {
            if !t.is_finite() || !x.is_finite() {
                return Err(Error::NonFinite("curve sample"));
            }
            if i > 0 && *t <= samples[i - 1].0 {
                return Err(Error::NotMonotone { index: i });
            }
        }
        Ok(SampledCurve {
            samples,
            label: label.into(),
        })
    }

    /// Samples `f` on `n` equally spaced parameter values over `[t0, t1]`.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        n: usize,
        label: impl Into<String>,
        f: impl Fn(f64) -> FourVector,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InsufficientSamples { required: 2, got: n });
        }
        let h = (t1 - t0) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| {
                let t = if i == n - 1 { t1 } else { t0 + h * i as f64 };
                (t, f(t))
            })
            .collect();
        Self::new(samples, label)
    }

    pub fn samples(&self) -> &[(f64, FourVector)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    /// Sub-curve of samples `[0, end)`.
    pub fn prefix(&self, end: usize) -> Result<Self> {
        Self::new(self.samples[..end].to_vec(), self.label.clone())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        wr.write_record(CSV_HEADER)?;
        for (t, x) in &self.samples {
            let mut rec = vec![format!("{t:.16e}")];
            rec.extend(x.0.iter().map(|c| format!("{c:.16e}")));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, label: impl Into<String>) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd
            .headers()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::InvalidArgument(format!(
                "expected curve header {CSV_HEADER:?}, got {header:?}"
            )));
        }
        let mut samples = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            if vals.len() != 5 {
                return Err(Error::InvalidArgument(format!(
                    "curve row has {} fields",
                    vals.len()
                )));
            }
            samples.push((vals[0], FourVector([vals[1], vals[2], vals[3], vals[4]])));
        }
        Self::new(samples, label)
    }
}

/// Finite-difference weights for derivatives `0..=max_order` at `z` over the
/// nodes `xs` (Fornberg's recursion). Returns `w[k][j]`.
pub fn fornberg_weights(z: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Start index of a stencil of `width` nodes around sample `i`, shifted
/// inward at the ends.
fn stencil_start(i: usize, width: usize, n: usize) -> usize {
    i.saturating_sub(width / 2).min(n - width)
}

/// Derivatives up to `order` of scalar samples `ys` over parameters `ts`,
/// evaluated at every sample. Returns `d[k][i]` for `k = 1..=order`.
pub fn finite_diff_series(ts: &[f64], ys: &[f64], order: usize) -> Result<Vec<Vec<f64>>> {
    let n = ts.len();
    let required = 2 * order + 1;
    if n < required {
        return Err(Error::InsufficientSamples { required, got: n });
    }
    let width = required.max(5).min(n);
    let mut out = vec![vec![0.0; n]; order];
    for i in 0..n {
        let s = stencil_start(i, width, n);
        let w = fornberg_weights(ts[i], &ts[s..s + width], order);
        for k in 1..=order {
            out[k - 1][i] = (0..width).map(|j| w[k][j] * ys[s + j]).sum();
        }
    }
    Ok(out)
}

/// Jets of a sampled curve with respect to its own parameter.
///
/// `u`, `a` and (for `order == 3`) `jerk` are the first three parameter
/// derivatives; derivatives above `order` are left at zero.
pub fn finite_diff_jets(curve: &SampledCurve, order: usize) -> Result<Vec<WorldlineState>> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "jet order must be 1, 2 or 3, got {order}"
        )));
    }
    let ts = curve.params();
    let n = ts.len();
    let mut comps: Vec<Vec<Vec<f64>>> = Vec::with_capacity(4);
    for mu in 0..4 {
        let ys: Vec<f64> = curve.samples.iter().map(|s| s.1[mu]).collect();
        comps.push(finite_diff_series(&ts, &ys, order)?);
    }
    let jet = |k: usize, i: usize| FourVector(std::array::from_fn(|mu| comps[mu][k][i]));
    Ok((0..n)
        .map(|i| {
            let mut st = WorldlineState::new(ts[i], curve.samples[i].1, jet(0, i), FourVector::ZERO);
            if order >= 2 {
                st.a = jet(1, i);
            }
            if order == 3 {
                st.jerk = Some(jet(2, i));
            }
            st
        })
        .collect())
}

/// Composite Simpson on a possibly non-uniform grid. The error estimate is
/// the difference from the trapezoid rule on the same grid.
pub fn simpson_nonuniform(ts: &[f64], fs: &[f64]) -> Result<QuadratureEstimate> {
    let n = ts.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { required: 2, got: n });
    }
    let trap: f64 = (1..n).map(|i| 0.5 * (ts[i] - ts[i - 1]) * (fs[i] + fs[i - 1])).sum();
    if n == 2 {
        return Ok(QuadratureEstimate {
            value: trap,
            error: trap.abs(),
        });
    }
    let intervals = n - 1;
    let mut sum = 0.0;
    let mut i = 0;
    while i + 2 <= intervals {
        let h0 = ts[i + 1] - ts[i];
        let h1 = ts[i + 2] - ts[i + 1];
        let hs = h0 + h1;
        sum += hs / 6.0
            * ((2.0 - h1 / h0) * fs[i]
                + hs * hs / (h0 * h1) * fs[i + 1]
                + (2.0 - h0 / h1) * fs[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        // Last interval from the quadratic through the final three nodes.
        let h0 = ts[n - 2] - ts[n - 3];
        let h1 = ts[n - 1] - ts[n - 2];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let gamma = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        sum += alpha * fs[n - 1] + beta * fs[n - 2] - gamma * fs[n - 3];
    }
    Ok(QuadratureEstimate {
        value: sum,
        error: (sum - trap).abs(),
    })
}

/// Arc length under `eta`: the integral of `sqrt(-eta(x', x'))`.
pub fn proper_time_eta(curve: &SampledCurve) -> Result<QuadratureEstimate> {
    let jets = finite_diff_jets(curve, 1)?;
    let mut fs = Vec::with_capacity(jets.len());
    for (i, j) in jets.iter().enumerate() {
        let n = eta_sq(&j.u);
        if n >= 0.0 {
            return Err(Error::NotTimelike { index: i, norm: n });
        }
        fs.push((-n).sqrt());
    }
    simpson_nonuniform(&curve.params(), &fs)
}

/// `eta`-proper acceleration from parameter jets `v = x'`, `w = x''`.
///
/// With `n = -eta(v, v)` and `U = v / sqrt(n)`, the proper acceleration is
/// `(w + eta(w, U) U) / n`; this is the same for every parameterization.
pub fn proper_acceleration(v: &FourVector, w: &FourVector) -> FourVector {
    let n = -eta_sq(v);
    let unit = *v * (1.0 / n.sqrt());
    (*w + unit * eta_dot(w, &unit)) * (1.0 / n)
}

/// `epsilon` at every sample, from jets in the curve's own parameter.
pub fn epsilon_along(curve: &SampledCurve, params: &MaxAccelParams) -> Result<Vec<f64>> {
    let jets = finite_diff_jets(curve, 2)?;
    jets.iter()
        .enumerate()
        .map(|(i, j)| {
            let n = eta_sq(&j.u);
            if n >= 0.0 {
                return Err(Error::NotTimelike { index: i, norm: n });
            }
            Ok(params.epsilon_of(&proper_acceleration(&j.u, &j.a)))
        })
        .collect()
}

/// Proper time under the maximal-acceleration metric `g = (1 - eps) eta`.
pub fn proper_time_maxaccel(
    curve: &SampledCurve,
    params: &MaxAccelParams,
) -> Result<QuadratureEstimate> {
    let jets = finite_diff_jets(curve, 2)?;
    let mut fs = Vec::with_capacity(jets.len());
    for (i, j) in jets.iter().enumerate() {
        let n = eta_sq(&j.u);
        if n >= 0.0 {
            return Err(Error::NotTimelike { index: i, norm: n });
        }
        let eps = params.epsilon_of(&proper_acceleration(&j.u, &j.a));
        if eps >= 1.0 {
            return Err(Error::DomainBreach {
                epsilon: eps,
                at: j.tau,
            });
        }
        fs.push(((1.0 - eps) * -n).sqrt());
    }
    simpson_nonuniform(&curve.params(), &fs)
}

/// Relabels the parameter by `map`, keeping the positions.
pub fn reparameterize(curve: &SampledCurve, map: impl Fn(f64) -> f64) -> Result<SampledCurve> {
    let samples: Vec<(f64, FourVector)> =
        curve.samples.iter().map(|(t, x)| (map(*t), *x)).collect();
    for (i, (t, _)) in samples.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::NonFinite("reparameterization"));
        }
        if i > 0 && *t <= samples[i - 1].0 {
            return Err(Error::NotMonotone { index: i });
        }
    }
    Ok(SampledCurve {
        samples,
        label: format!("{} (reparameterized)", curve.label),
    })
}

/// `ds/dtau = 1 / (1 - eps_dot)`, taken literally from the rate relation
/// between the two proper times. Not used by the integrator.
pub fn ds_dtau_literal(eps_dot: f64) -> f64 {
    1.0 / (1.0 - eps_dot)
}

/// `dtau_g / dtau_eta = sqrt(1 - eps)`, from the conformal relation.
pub fn dtau_ds_geometric(epsilon: f64) -> Result<f64> {
    if epsilon >= 1.0 {
        return Err(Error::DomainBreach { epsilon, at: f64::NAN });
    }
    Ok((1.0 - epsilon).sqrt())
}
