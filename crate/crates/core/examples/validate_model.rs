//! Structural checks on the reference pair and on a coupling that vanishes
//! at the crossing.

use crossres::model::{crossing_slopes, turning_points, validate_assumptions, CouplingSpec, ProblemSpec};
use num_complex::Complex64;

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference();
    print!("{}", validate_assumptions(&p)?);

    let tp = turning_points(&p, Complex64::new(p.window.e0, 0.0))?;
    let s = crossing_slopes(&p)?;
    println!("a = {:.10}  b = {:.10}  c = {:.10}", tp.a.re, tp.b.re, tp.c.re);
    println!("tau1 = {:.6}  tau2 = {:.6}  gamma = {:.9}", s.tau1, s.tau2, s.gamma);
    println!("box [{:.3}, {:.3}]", p.x_min, p.x_max);

    match ProblemSpec::reference().with_theta(2.0) {
        Ok(_) => println!("theta = 2 accepted"),
        Err(e) => println!("theta = 2 rejected: {e}"),
    }

    let mut q = ProblemSpec::reference();
    q.coupling = CouplingSpec::constant(0.0, 0.0);
    match validate_assumptions(&q) {
        Ok(r) if !r.all_passed() => println!("zero coupling without the degenerate flag fails validation"),
        Ok(_) => println!("zero coupling passed?"),
        Err(e) => println!("zero coupling rejected: {e}"),
    }
    Ok(())
}
