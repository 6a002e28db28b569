//! Resonances as zeros of the outgoing Wronskian, seeded from the predictions.

use crossres::model::ProblemSpec;
use crossres::oracle::{wronskian, wronskian_roots, RootOptions};
use crossres::semiclassics::predict;
use num_complex::Complex64;

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference();
    let h = 0.05;
    let seeds: Vec<Complex64> = predict(&p, h)?.iter().map(|r| r.predicted).collect();
    for r in wronskian_roots(&p, h, &seeds, &RootOptions::default())? {
        let seed = r.seed.unwrap_or_default();
        println!(
            "{:.10} {:+.6e}i  from {:.6} {:+.3e}i  |W| ratio {:.1e}  converged {}",
            r.energy.re, r.energy.im, seed.re, seed.im, r.residual, r.converged
        );
    }
    let off = Complex64::new(1.0, -0.02);
    println!("|W({off})| = {:.3e}", wronskian(&p, off, h)?.norm());
    Ok(())
}
