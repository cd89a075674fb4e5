//! The constant-`epsilon` model holds `a^2` fixed in a tuned field and leaves
//! that stratum quickly under a transverse perturbation.

use radreact::trajectory::EventKind;
use radreact::{integrate, prepare_initial, FieldSpec, ForceModelSpec, FourVector, ModelKind, SolverOptions};

fn main() -> radreact::Result<()> {
    let model = ForceModelSpec::new(ModelKind::UniformCovariant, 1.0, 1.0, Some(3.0));
    let opts = SolverOptions {
        dt: 1e-3,
        ..Default::default()
    };
    let tuned = FieldSpec::constant_e([1.0, 0.0, 0.0]);
    let perturbed = FieldSpec::Sum {
        fields: vec![
            tuned.clone(),
            FieldSpec::PlaneWave {
                amplitude: [1e-6, 0.0, 0.0],
                wave_vector: [0.0, 1.0, 0.0],
                phase: 0.0,
            },
        ],
    };
    for (label, field) in [("tuned", tuned), ("perturbed", perturbed)] {
        let init = prepare_initial(&model, &field, 0.0, FourVector::ZERO, [0.0; 3], None, &opts)?;
        let traj = match integrate(&model, &field, &init, (0.0, 2.0), &opts) {
            Ok(t) => t,
            Err(ab) => ab.partial,
        };
        let a2: Vec<f64> = traj.rows.iter().map(|r| r.a2).collect();
        let spread = a2.iter().cloned().fold(f64::MIN, f64::max) - a2.iter().cloned().fold(f64::MAX, f64::min);
        let exit = traj.events_of(EventKind::UniformStratumExit).map(|e| e.tau).next();
        println!("{label:<9} spread of a^2 {spread:.3e}, stratum exit {exit:?}");
    }
    Ok(())
}
