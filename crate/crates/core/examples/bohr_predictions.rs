//! Bohr-Sommerfeld grid and predicted resonances `e_k - i C(e_k, h) h^2`.

use crossres::model::ProblemSpec;
use crossres::semiclassics::predict;

fn main() -> crossres::Result<()> {
    let p = ProblemSpec::reference();
    for h in [0.08, 0.04] {
        println!("h = {h}");
        println!("{:>4} {:>14} {:>12} {:>14}", "k", "e_k", "C", "Im E");
        for r in predict(&p, h)? {
            println!("{:>4} {:>14.10} {:>12.6} {:>14.6e}", r.k, r.e_k, r.width_coeff, r.predicted.im);
        }
    }
    Ok(())
}
