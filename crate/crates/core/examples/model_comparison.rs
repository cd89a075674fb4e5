//! Sup-norm gap between the implicit and explicit models as the field shrinks.

use radreact::diagnostics::{epsilon0_scaling_study, Scenario};
use radreact::{FieldSpec, ForceModelSpec, FourVector, ModelKind, SolverOptions};

fn main() {
    let base = Scenario {
        model: ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0)),
        field: FieldSpec::constant_e([1.0, 0.0, 0.0]),
        position: FourVector::ZERO,
        velocity: [0.0; 3],
        tau_span: (0.0, 2.0),
        options: SolverOptions {
            dt: 1e-3,
            ..Default::default()
        },
    };
    let study = epsilon0_scaling_study(&[1.0, 0.3, 0.1, 0.03], &base);
    for r in &study.rows {
        match (&r.excluded, r.epsilon0, r.gap) {
            (Some(why), _, _) => println!("scale {:<5} excluded: {why}", r.scale),
            (None, Some(eps0), Some(gap)) => println!("scale {:<5} eps0 {eps0:.3e} gap {gap:.3e}", r.scale),
            _ => {}
        }
    }
    if let Some(fit) = study.fit {
        println!("gap ~ eps0^{:.3} (r2 {:.5})", fit.exponent, fit.r2);
    }
}
