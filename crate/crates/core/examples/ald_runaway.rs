//! The field-free ALD equation grows `a` like `exp(tau / tau0)`; the implicit
//! model returns to free motion once the field is switched off.

use radreact::diagnostics::runaway_rate;
use radreact::experiments::canonical::{ald_runaway_run, switched_off_run};

fn main() -> radreact::Result<()> {
    let ald = ald_runaway_run(1e-6, 20.0, 1e-3)?;
    let fit = runaway_rate(&ald)?;
    println!(
        "ALD: {} rows, stopped at tau {:.3} ({:?}), rate {:.6} (1/tau0 = 1.5)",
        ald.len(),
        ald.rows.last().map_or(0.0, |r| r.tau),
        ald.meta.termination,
        fit.rate
    );

    let imp = switched_off_run(1.0, 1.0, 3.0, 1e-3)?;
    for r in imp.rows.iter().step_by(500) {
        println!("implicit tau {:.2} a^2 {:.3e} u1 {:.6}", r.tau, r.a2, r.u[1]);
    }
    Ok(())
}
