//! Point-charge dynamics with radiation reaction.
//!
//! Five force models share one integrator: the Lorentz force, the
//! Abraham-Lorentz-Dirac equation, the Landau-Lifshitz reduction, and a
//! second-order implicit law built on a metric of maximal acceleration
//! (with its explicit approximation and the covariant uniform stratum).
//! Trajectories carry per-step diagnostics that [`diagnostics::audit`]
//! checks after the fact.
//!
//! Units have `c = 1` and the metric signature is `(-, +, +, +)`.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod integrator;
pub mod maxaccel;
pub mod minkowski;
pub mod trajectory;
pub mod worldline;

pub use dynamics::{ForceModelSpec, IndexRaising, ModelKind};
pub use error::{Error, Result};
pub use fields::{EMFieldTensor, FieldSpec};
pub use integrator::{integrate, prepare_initial, Method, SolverOptions};
pub use maxaccel::MaxAccelParams;
pub use minkowski::FourVector;
pub use trajectory::{TrajectoryRecord, TrajectoryRow};
pub use worldline::{SampledCurve, WorldlineState};

#[cfg(test)]
pub(crate) mod test_support {
    use crate::dynamics::{ForceModelSpec, ModelKind};
    use crate::fields::FieldSpec;
    use crate::trajectory::{Termination, TrajectoryMeta, TrajectoryRecord, TrajectoryRow};

    /// Wraps bare rows in a record with placeholder metadata.
    pub fn record_from_rows(rows: Vec<TrajectoryRow>) -> TrajectoryRecord {
        TrajectoryRecord {
            rows,
            meta: TrajectoryMeta {
                model: ForceModelSpec::new(ModelKind::Lorentz, 1.0, 1.0, None),
                field: FieldSpec::Vacuum,
                options: Default::default(),
                code_version: env!("CARGO_PKG_VERSION").into(),
                events: Vec::new(),
                termination: Termination::Completed,
                max_renorm_shift: 0.0,
            },
        }
    }
}
