//! Pointwise identities: `M O = I`, the spacelike Lorentz force, and the
//! implicit root against its closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use radreact::dynamics::{characteristic_time, solve_implicit_accel, RootOptions};
use radreact::experiments::canonical::{operator_inverse_defect, random_sample};
use radreact::fields::{lorentz_force, lorentz_force_sq};
use radreact::minkowski::eta_sq;
use radreact::{IndexRaising, MaxAccelParams};

fn main() -> radreact::Result<()> {
    println!("max ||M O - I|| over 1000 samples: {:.3e}", operator_inverse_defect(1, 1000));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut min_fl2 = f64::INFINITY;
    for _ in 0..1000 {
        let (s, f, e, m) = random_sample(&mut rng);
        min_fl2 = min_fl2.min(lorentz_force_sq(&f, e, &s.u));
        let a = solve_implicit_accel(&s, &f, e, m, &MaxAccelParams::unbounded(), IndexRaising::Eta, None, &RootOptions::default())?;
        let force = lorentz_force(&f, e, &s.u);
        let tau0 = characteristic_time(e, m);
        let s0 = eta_sq(&force) / (m * m);
        let n = -eta_sq(&s.u);
        let root = 2.0 * s0 / (1.0 + (1.0 + 4.0 * tau0 * tau0 * n * s0).sqrt());
        let want = force * (1.0 / m) - s.u * (tau0 * root);
        worst = worst.max((a - want).max_abs() / want.max_abs());
    }
    println!("smallest F_L^2: {min_fl2:.3e}");
    println!("implicit root vs closed form: {worst:.3e}");
    Ok(())
}
