//! Shape parameters of every equilibrium family at a few mass ratios.

use caledonia::equilibrium::{rotation_rate2, solve, Family};

fn main() -> caledonia::Result<()> {
    for fam in Family::ALL {
        let mus: &[f64] = if fam.uses_mu() { &[0.25, 0.5, 1.0] } else { &[1.0] };
        for &mu in mus {
            let sols = match solve(fam, mu) {
                Ok(s) => s,
                Err(e) => {
                    println!("{fam:?} mu={mu}: {e}");
                    continue;
                }
            };
            for s in sols {
                let (_, err) = rotation_rate2(&s.bodies);
                let p: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
                println!("{fam:?} mu={mu} n={:.6} {} (violation {err:.1e})", s.n, p.join(" "));
            }
        }
    }
    Ok(())
}
