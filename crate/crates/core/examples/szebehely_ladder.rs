//! Szebehely ladder and regime for a mass triple given on the command line.
//!
//! cargo run --example szebehely_ladder -- 0.15 0.15 [c0]

use caledonia::szebehely::{ladder, regime};
use caledonia::MassRatios;

fn main() -> caledonia::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (mu0, mu1) = match args.as_slice() {
        [a, b, ..] => (*a, *b),
        _ => (0.2, 0.2),
    };
    let r = MassRatios::from_mu0_mu1(mu0, mu1)?;
    let l = ladder(&r)?;
    for (k, (c, y)) in l.rungs().iter().zip(l.argmins).enumerate() {
        println!("R{} = {c:.10}  at y = {y:.8}", k + 1);
    }
    println!("C_crit = {:.10}", l.c_crit);
    if let Some(c0) = args.get(2) {
        println!("C0 = {c0}: {:?}", regime(*c0, &l));
    }
    Ok(())
}
