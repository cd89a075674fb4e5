//! Bare-mass ledger along a run in a plane wave, where `epsilon` oscillates.

use radreact::maxaccel::{mass_ledger, write_ledger_csv};
use radreact::{integrate, prepare_initial, FieldSpec, ForceModelSpec, FourVector, ModelKind, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ForceModelSpec::new(ModelKind::ImplicitMaxaccel, 1.0, 1.0, Some(10.0));
    let field = FieldSpec::PlaneWave {
        amplitude: [0.1, 0.0, 0.0],
        wave_vector: [0.0, 0.0, 1.0],
        phase: 0.0,
    };
    let opts = SolverOptions {
        dt: 1e-2,
        ..Default::default()
    };
    let init = prepare_initial(&model, &field, 0.0, FourVector::ZERO, [0.0; 3], None, &opts)?;
    let traj = integrate(&model, &field, &init, (0.0, 10.0), &opts).map_err(|ab| ab.error)?;
    let ledger = mass_ledger(&traj, 1.0, 1.0, 1e-6);
    write_ledger_csv(&ledger[100..106], std::io::stdout())?;
    let worst = ledger
        .iter()
        .filter_map(|e| e.derivative_residual)
        .fold(0.0f64, |w, r| w.max(r.abs()));
    println!("largest |d m_b/dtau + (2/3) e^2 d(a^2/eps_dot)/dtau|: {worst:.3e}");
    let degenerate = ledger.iter().filter(|e| e.degenerate).count();
    println!("{} entries, {degenerate} degenerate", ledger.len());
    Ok(())
}
