//! Critical constant over the (μ0, μ1) triangle and its maximum.

use caledonia::szebehely::{axis, c_crit_surface};

fn main() -> caledonia::Result<()> {
    let step = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let s = c_crit_surface(&axis(0.0, 1.0, step), &axis(0.0, 0.5, step))?;
    let m = s.argmax;
    println!("{} points, max C_crit = {:.7} at mu0 = {:.3}, mu1 = {:.4}", s.points.len(), m.c_crit, m.mu0, m.mu1);
    println!("mirror: mu1 = {:.4}", 0.5 * (1.0 - m.mu0) - m.mu1);
    Ok(())
}
