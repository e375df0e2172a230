//! Hierarchy-change census of equal-mass CSFBP orbits across a C0 ladder.

use caledonia::harness::{run_change_census, Grid};
use caledonia::MassRatios;

fn main() -> caledonia::Result<()> {
    let r = MassRatios::equal_csfbp();
    let e0 = 0.2;
    let grid = Grid::new((1..=10).map(|k| 0.3 * k as f64).collect(), (1..=10).map(|k| 0.25 * k as f64).collect())?;
    let steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    println!("{:>8} {:>7} {:>7}  by transition", "C0", "orbits", "total");
    for c0 in [0.01, 0.028, 0.031, 0.038, 0.042, 0.046] {
        let t = run_change_census(&r, c0, e0, &grid, steps)?;
        let detail: Vec<String> = t
            .entries()
            .iter()
            .filter(|e| e.2 > 0)
            .map(|(f, to, n, _)| format!("{f}->{to}:{n}"))
            .collect();
        println!("{c0:>8} {:>7} {:>7}  {}", t.orbits, t.total(), detail.join(" "));
    }
    Ok(())
}
