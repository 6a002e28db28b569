//! With `r1 = 0` the width coefficient vanishes on a discrete set of energies.

use crossres::model::{CouplingSpec, ProblemSpec};
use crossres::semiclassics::{bohr_grid, width_coefficient, width_zero_loci};

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference_with(CouplingSpec::constant(1.0, 0.0));
    let h = 0.02;
    let grid = bohr_grid(&p, h)?;
    for e in width_zero_loci(&p, h)? {
        let nearest = grid
            .iter()
            .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()))
            .expect("non-empty grid");
        println!(
            "E* = {e:.8}  C(E*) = {:.1e}  nearest e_{} = {:.8}  C = {:.4e}",
            width_coefficient(&p, e, h)?,
            nearest.0,
            nearest.1,
            width_coefficient(&p, nearest.1, h)?
        );
    }
    Ok(())
}
