//! Complex-scaled eigenvalues in the window, with the theta-stability check.

use crossres::model::ProblemSpec;
use crossres::oracle::{theta_stable, EcsOptions};
use crossres::semiclassics::predict;

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference();
    let h = 0.05;
    let st = theta_stable(&p, h, &EcsOptions::with_nodes(4096))?;
    println!("grid: {} nodes, spacing {:.3e}", st.grid.n, st.grid.dx);
    let preds = predict(&p, h)?;
    for c in &st.checks {
        let e = c.resonance.energy;
        let nearest = preds
            .iter()
            .min_by(|a, b| (a.predicted - e).norm().total_cmp(&(b.predicted - e).norm()))
            .expect("predictions");
        println!(
            "{:.10} {:+.4e}i  residual {:.1e}  theta shift {:.1e}  stable {}  k = {} predicted {:+.4e}i",
            e.re, e.im, c.resonance.residual, c.shift, c.stable, nearest.k, nearest.predicted.im
        );
    }
    Ok(())
}
