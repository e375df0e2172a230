//! Integrate one equal-mass CS5BP orbit and print its outcome.

use caledonia::dynamics::{initial_state, integrate, HierarchyRegions, IntegratorConfig, Mode, Monitors};
use caledonia::MassRatios;

fn main() -> caledonia::Result<()> {
    let r = MassRatios::equal_cs5bp();
    let (c0, e0) = (0.03, 0.2);
    let start = initial_state(0.9, 0.5, c0, e0, &r, Mode::Cs5bp, 0.0)?;
    let mon = Monitors { regions: Some(HierarchyRegions::new(&r, c0, e0)?), ..Default::default() };
    let out = integrate(&start, &r, &IntegratorConfig::default(), &mon)?;
    println!("terminal:      {:?}", out.terminal);
    println!("steps:         {}", out.steps_taken);
    println!("t_final:       {}", out.final_state.t());
    println!("energy drift:  {:.3e}", out.energy_drift);
    println!("angmom drift:  {:.3e}", out.angmom_drift);
    println!("start label:   {}", out.initial_hierarchy);
    for ch in &out.hierarchy_changes {
        println!("  t = {:10.4}  {} -> {}", ch.t, ch.from, ch.to);
    }
    Ok(())
}
