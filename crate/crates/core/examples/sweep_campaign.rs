//! Resumable general four-body sweep written to a directory.
//!
//! cargo run --release --example sweep_campaign -- /tmp/csfbp_sweep

use caledonia::dynamics::Mode;
use caledonia::harness::{run_campaign, CampaignOptions, SweepSpec};
use caledonia::MassRatios;

fn main() -> caledonia::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "sweep_out".into());
    let spec = SweepSpec {
        ratios: MassRatios::equal_csfbp(),
        c0: 0.038,
        e0: 0.2,
        r1_range: [0.05, 1.5],
        r2_range: [0.05, 1.5],
        step: 0.05,
        perturbation: 1e-6,
        max_steps: 2000,
        mode: Mode::General4,
        energy_threshold: 1e-9,
        symmetry_threshold: 1e-4,
    };
    let rep = run_campaign(dir.as_ref(), &spec, &CampaignOptions::default())?;
    println!("{} of {} cells ({} resumed)", rep.done, rep.cells, rep.resumed);
    if let Some((grid, _)) = rep.results {
        for (code, n) in grid.tally() {
            println!("{code:>9} {n}");
        }
    }
    Ok(())
}
