//! Linear stability of the test body for the trapezoid family.

use caledonia::equilibrium::solve_trapezoid;
use caledonia::stability::{analyze, characteristic_roots, square_fixture};

fn main() -> caledonia::Result<()> {
    let sq = characteristic_roots(&square_fixture(1.3937));
    println!("square fixture: {:?} {:?}", sq.verdict, sq.lambdas);
    for k in (1..=10).rev() {
        let mu = k as f64 / 10.0;
        let s = solve_trapezoid(mu)?;
        let sp = analyze(&s, s.default_test_body())?;
        let l = sp.lambdas[0];
        println!("mu={mu:.1}  {:?}  lambda = ±({:.5} {:+.5}i)  max Re = {:.5}", sp.verdict, l.re, l.im, sp.max_real_part);
    }
    Ok(())
}
