//! Both proper times of a sampled hyperbola are unchanged by reparameterization.

use radreact::experiments::canonical::reparam_proper_times;
use radreact::MaxAccelParams;

fn main() -> radreact::Result<()> {
    let params = MaxAccelParams::new(10.0)?;
    let taus = reparam_proper_times(7, 5, &params)?;
    println!("map       eta              g");
    for (i, (eta, g)) in taus.iter().enumerate() {
        let label = if i == 0 { "identity".to_string() } else { format!("random {i}") };
        println!("{label:<9} {eta:.12}  {g:.12}");
    }
    // With a^2 = 1 the g proper time is 2 sqrt(1 - 1/A^2).
    println!("exact g: {:.12}", 2.0 * (1.0 - 0.01f64).sqrt());
    Ok(())
}
