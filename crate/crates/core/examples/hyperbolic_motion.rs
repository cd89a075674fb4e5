//! Lorentz motion in a constant electric field against the exact hyperbola.

use radreact::experiments::canonical::{hyperbolic_error, hyperbolic_run};

fn main() -> radreact::Result<()> {
    for dt in [0.08, 0.04, 0.02, 0.01] {
        let traj = hyperbolic_run(dt, 5.0)?;
        println!("dt {dt:<5} max relative error {:.3e}", hyperbolic_error(&traj));
    }
    let last = hyperbolic_run(1e-3, 5.0)?.rows.pop().expect("nonempty");
    println!("u at tau = 5: {:?} (cosh 5 = {:.6})", last.u.0, 5f64.cosh());
    Ok(())
}
