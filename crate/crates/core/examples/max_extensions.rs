//! Maximum-extension projections in the (ρ1, ρ2) plane across the ladder.

use caledonia::szebehely::{ladder, project_max_extensions, regime};
use caledonia::MassRatios;

fn main() -> caledonia::Result<()> {
    let r = MassRatios::equal_cs5bp();
    let l = ladder(&r)?;
    for c0 in [0.03, 0.05, 0.07] {
        let curves = project_max_extensions(&r, c0, 400)?;
        println!("C0 = {c0}: {:?}", regime(c0, &l));
        for c in &curves {
            let (first, last) = (c.points[0], c.points[c.points.len() - 1]);
            println!("  {:6} {:4} points, y from {:.3} to {:.3}", c.label(), c.points.len(), first[0], last[0]);
        }
    }
    Ok(())
}
