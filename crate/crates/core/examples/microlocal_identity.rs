//! The width from the Green formula against `C(E, h) h^2`, and the
//! monodromy residual on the grid.

use crossres::harness::consistency_scan;
use crossres::microlocal::{monodromy_residual, mu_constants, transfer_matrices};
use crossres::model::ProblemSpec;
use crossres::semiclassics::bohr_grid;
use num_complex::Complex64;

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference();
    let mu = mu_constants(&p, 1.0)?;
    println!("mu = {:.10}  mu_hat = {:.10}", mu.mu, mu.mu_hat);
    let t = transfer_matrices(&p, 1.0, 0.02)?;
    println!("T- = {:.4}", t.minus);

    let rows = consistency_scan(&p, 5, &[0.05, 0.01])?;
    for r in &rows {
        println!("E = {:.3} h = {:<5} green = {:.6e} relative gap = {:.1e}", r.energy, r.h, r.green, r.relative);
    }

    let h = 0.02;
    let worst = bohr_grid(&p, h)?
        .into_iter()
        .map(|(_, e)| monodromy_residual(&p, Complex64::new(e, 0.0), h).map(|r| r.norm()))
        .collect::<crossres::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("largest monodromy residual at h = {h}: {worst:.2e}");
    Ok(())
}
