//! Narrowing Gaussian pulses of fixed area: causality before the pulse and
//! the velocity kick after it.

use radreact::diagnostics::{preacceleration_probe, ProbeSettings};
use radreact::{ForceModelSpec, ModelKind, SolverOptions};

fn main() -> radreact::Result<()> {
    let settings = ProbeSettings {
        guard: 0.35,
        ..Default::default()
    };
    for kind in [ModelKind::Lorentz, ModelKind::ImplicitMaxaccel] {
        let model = ForceModelSpec::new(kind, 1.0, 1.0, Some(1e4));
        let rows = preacceleration_probe(&model, &[0.1, 0.01, 0.001], 0.5, &SolverOptions::default(), &settings)?;
        println!("{}", kind.name());
        for r in rows {
            println!(
                "  w {:<6} pre-pulse |u1| {:.3e}  excess {:.3e}  after {:.6}  target {:.6}",
                r.width, r.pre_pulse_max, r.pre_pulse_excess, r.post_pulse, r.target
            );
        }
    }
    Ok(())
}
