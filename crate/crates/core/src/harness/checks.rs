//! Pass/fail checks run by the `sweep` and `consistency` commands.

use super::compare::CompareOutput;
use super::config::ExperimentConfig;
use super::fit::ConvergenceFit;
use crate::error::Result;
use crate::microlocal::{outgoing_coefficient, width_from_green};
use crate::model::ProblemSpec;
use crate::oracle::Method;
use crate::semiclassics::width_coefficient;
use rayon::prelude::*;
use serde::Serialize;

pub const MIN_SLOPE_RE: f64 = 1.8;
pub const MIN_SLOPE_IM: f64 = 2.1;
pub const RATIO_TOLERANCE: f64 = 0.15;
/// Rows with `C` below this fraction of the largest `C` are left out of the
/// ratio check.
pub const RATIO_FLOOR: f64 = 0.1;
pub const DUAL_ORACLE_TOLERANCE: f64 = 1e-4;
pub const DECOUPLED_IMAG_LIMIT: f64 = 1e-8;
pub const CONSISTENCY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct SweepCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SweepCheck {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn min_distance(e: num_complex::Complex64, others: &[num_complex::Complex64]) -> f64 {
    others.iter().map(|o| (o - e).norm()).fold(f64::INFINITY, f64::min)
}

/// Checks on a finished comparison. Slope checks need a fit over at least
/// three h values and are skipped otherwise.
pub fn sweep_checks(config: &ExperimentConfig, out: &CompareOutput, fit: Option<&ConvergenceFit>) -> Vec<SweepCheck> {
    let methods = &config.sweep.methods;
    let degenerate = config.coupling.is_zero_at_crossing();
    let mut checks = Vec::new();
    for run in &out.runs {
        for &m in methods {
            let missing = run.unpaired(m);
            checks.push(SweepCheck::new(
                format!("pairing {m} h={}", run.h),
                missing.is_empty(),
                if missing.is_empty() {
                    format!("{} predictions paired", run.predictions.len())
                } else {
                    format!("unpaired k = {missing:?}")
                },
            ));
        }
        if methods.contains(&Method::Ecs) && methods.contains(&Method::Wronskian) {
            let ecs = run.oracle.accepted(Method::Ecs);
            let wr = run.oracle.accepted(Method::Wronskian);
            let worst = ecs
                .iter()
                .map(|e| min_distance(*e, &wr))
                .chain(wr.iter().map(|w| min_distance(*w, &ecs)))
                .fold(0.0, f64::max);
            checks.push(SweepCheck::new(
                format!("dual oracle h={}", run.h),
                worst < DUAL_ORACLE_TOLERANCE,
                format!("largest mismatch {worst:.3e}"),
            ));
            let removed_but_confirmed = run
                .oracle
                .ecs
                .iter()
                .filter(|c| !c.stable && min_distance(c.resonance.energy, &wr) < DUAL_ORACLE_TOLERANCE)
                .count();
            checks.push(SweepCheck::new(
                format!("stability filter h={}", run.h),
                removed_but_confirmed == 0,
                format!("{removed_but_confirmed} confirmed resonances filtered out"),
            ));
        }
        if degenerate && methods.contains(&Method::Ecs) {
            let worst = run
                .oracle
                .accepted(Method::Ecs)
                .iter()
                .map(|e| e.im.abs())
                .fold(0.0, f64::max);
            checks.push(SweepCheck::new(
                format!("decoupled realness h={}", run.h),
                worst < DECOUPLED_IMAG_LIMIT,
                format!("max |Im E| = {worst:.3e}"),
            ));
        }
    }
    if let Some(fit) = fit {
        for mf in &fit.per_method {
            if let Some(re) = mf.re {
                checks.push(SweepCheck::new(
                    format!("slope re {}", mf.method),
                    re.slope >= MIN_SLOPE_RE,
                    format!("{:.3} over {} h values (need >= {MIN_SLOPE_RE})", re.slope, re.points),
                ));
            }
            if !degenerate {
                let (passed, detail) = match mf.im {
                    Some(im) => (
                        im.slope >= MIN_SLOPE_IM,
                        format!("{:.3} over {} h values (need >= {MIN_SLOPE_IM})", im.slope, im.points),
                    ),
                    None => (false, "no fit".to_string()),
                };
                checks.push(SweepCheck::new(format!("slope im {}", mf.method), passed, detail));
            }
        }
        if !degenerate {
            if let Some(&h_min) = config.sweep.h_values.last() {
                for &m in methods {
                    let rows: Vec<_> = fit.ratios.iter().filter(|r| r.method == m && r.h == h_min).collect();
                    let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max);
                    let judged: Vec<_> = rows.iter().filter(|r| r.c > RATIO_FLOOR * c_max).collect();
                    let worst = judged.iter().map(|r| (r.ratio - 1.0).abs()).fold(0.0, f64::max);
                    checks.push(SweepCheck::new(
                        format!("width ratio {m} h={h_min}"),
                        !judged.is_empty() && worst <= RATIO_TOLERANCE,
                        format!("{} rows, largest |ratio - 1| = {worst:.4}", judged.len()),
                    ));
                }
            }
        }
    }
    checks
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConsistencyRow {
    pub energy: f64,
    pub h: f64,
    pub green: f64,
    pub asymptotic: f64,
    /// `|green - asymptotic| / (asymptotic + 1e-30)`
    pub relative: f64,
    /// Relative gap between the composed and closed outgoing coefficients.
    pub outgoing_gap: f64,
}

impl ConsistencyRow {
    pub fn passed(&self) -> bool {
        self.relative < CONSISTENCY_TOLERANCE && self.outgoing_gap < CONSISTENCY_TOLERANCE
    }
}

pub const CONSISTENCY_HEADER: &str = "E,h,green,asymptotic,relative,outgoing_gap";

impl ConsistencyRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.energy, self.h, self.green, self.asymptotic, self.relative, self.outgoing_gap
        )
    }
}

/// Green-formula width against `C(E, h) h^2` on an `energies x h` grid over
/// the real window.
pub fn consistency_scan(problem: &ProblemSpec, energies: usize, h_values: &[f64]) -> Result<Vec<ConsistencyRow>> {
    let (lo, hi) = problem.window.real_range();
    let points: Vec<(f64, f64)> = h_values
        .iter()
        .flat_map(|&h| {
            (0..energies).map(move |i| {
                let t = if energies > 1 { i as f64 / (energies - 1) as f64 } else { 0.5 };
                (lo + t * (hi - lo), h)
            })
        })
        .collect();
    points
        .into_par_iter()
        .map(|(energy, h)| {
            let green = width_from_green(problem, energy, h)?;
            let asymptotic = width_coefficient(problem, energy, h)? * h * h;
            let t = outgoing_coefficient(problem, energy, h)?;
            Ok(ConsistencyRow {
                energy,
                h,
                green,
                asymptotic,
                relative: (green - asymptotic).abs() / (asymptotic + 1e-30),
                outgoing_gap: (t.composed - t.closed).norm() / (t.composed.norm() + t.closed.norm()).max(1e-300),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_consistency_scan_passes() {
        let rows = consistency_scan(&ProblemSpec::reference(), 7, &[0.08, 0.02]).unwrap();
        assert_eq!(rows.len(), 14);
        assert!(rows.iter().all(ConsistencyRow::passed));
    }
}
