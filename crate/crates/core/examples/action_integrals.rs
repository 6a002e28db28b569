//! Action integrals on the harmonic well, where `A(E) = pi E / 2`, and on the
//! reference pair.

use crossres::actions::action_set_real;
use crossres::model::{ContourParams, CouplingSpec, EnergyWindow, PotentialSpec, ProblemSpec};
use std::f64::consts::PI;

fn main() -> crossres::Result<()> {
    let harmonic = ProblemSpec::new(
        PotentialSpec::Polynomial { coefficients: vec![0.0, 0.0, 1.0] },
        PotentialSpec::TanhStep { offset: 0.0, amplitude: -3.0, center: 0.0, scale: 1.0 },
        CouplingSpec::constant(0.0, 1.0),
        EnergyWindow { e0: 1.25, delta0: 0.8, c0: 2.0 },
        ContourParams { theta: 0.3, x_infty: 3.0, ramp_width: 1.0 },
        None,
    )?;
    println!("{:>5} {:>22} {:>12} {:>12}", "E", "A(E)", "A - piE/2", "A' - pi/2");
    for e in [0.5, 1.0, 1.5, 2.0] {
        let s = action_set_real(&harmonic, e)?;
        println!(
            "{e:>5} {:>22.16} {:>12.2e} {:>12.2e}",
            s.a.re,
            s.a.re - PI * e / 2.0,
            s.da_de.re - PI / 2.0
        );
    }

    let p = ProblemSpec::reference();
    let s = action_set_real(&p, 1.0)?;
    println!("\nreference pair at E = 1");
    println!("A = {:.11}  B = {:.11}", s.a.re, s.b.re);
    println!("A' = {:.11}  B' = {:.11}", s.da_de.re, s.db_de.re);
    println!("S1l + S1r - A = {:.2e}", (s.s1l + s.s1r - s.a).norm());
    Ok(())
}
