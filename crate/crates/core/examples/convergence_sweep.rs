//! Sweep over h: pair predictions with both oracles, fit log-log slopes and
//! run the checks. Pass a config path to override the quick default.

use crossres::harness::{convergence_fit, run_compare, sweep_checks, ExperimentConfig};

fn main() -> crossres::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/quick.json").to_string());
    let cfg = ExperimentConfig::load(&path)?;
    let out = run_compare(&cfg)?;
    let rows = out.rows();
    for r in &rows {
        println!(
            "h = {:<5} k = {:<3} {:<9} ratio {:.4}  residual re {:.2e} im {:.2e}",
            r.h,
            r.k,
            r.method.to_string(),
            r.width_ratio(),
            r.residual_re,
            r.residual_im
        );
    }
    let fit = convergence_fit(&rows)?;
    for m in &fit.per_method {
        println!(
            "{}: slope re {:?} im {:?}",
            m.method,
            m.re.map(|f| f.slope),
            m.im.map(|f| f.slope)
        );
    }
    for c in sweep_checks(&cfg, &out, Some(&fit)) {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
