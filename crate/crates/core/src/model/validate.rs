//! Desk-scale check of the structural assumptions on the potentials and the
//! coupling by dense sampling of the computational box.

use super::{real_turning_point, ProblemSpec};
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Assumption {
    /// Limits at plus/minus infinity relative to E0.
    A2,
    /// Three simple turning points a < b < 0 < c.
    A3,
    /// The curves cross below E0 only at the origin, with the slope signs.
    A4,
    /// Ellipticity of the coupling at the crossing points.
    A5,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub assumption: Assumption,
    pub passed: bool,
    pub detail: String,
    pub offending_x: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, assumption: Assumption) -> Option<&Check> {
        self.checks.iter().find(|c| c.assumption == assumption)
    }

    fn push(&mut self, assumption: Assumption, failure: Option<(String, Option<f64>)>, ok: &str) {
        let (passed, detail, offending_x) = match failure {
            None => (true, ok.to_string(), None),
            Some((msg, x)) => (false, msg, x),
        };
        self.checks.push(Check {
            assumption,
            passed,
            detail,
            offending_x,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{:?}: {status} - {}", c.assumption, c.detail)?;
            if let Some(x) = c.offending_x {
                write!(f, " (x = {x})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Samples {
    x: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

fn sample(problem: &ProblemSpec, n: usize) -> Result<Samples> {
    let n = n.max(2);
    let dx = (problem.x_max - problem.x_min) / (n - 1) as f64;
    let mut s = Samples {
        x: Vec::with_capacity(n),
        v1: Vec::with_capacity(n),
        v2: Vec::with_capacity(n),
    };
    for i in 0..n {
        let x = problem.x_min + dx * i as f64;
        let v1 = problem.v1.at_real(x).0;
        let v2 = problem.v2.at_real(x).0;
        let r0 = problem.coupling.r0.at_real(x).0;
        let r1 = problem.coupling.r1.at_real(x).0;
        for (name, val) in [("V1", v1), ("V2", v2), ("r0", r0), ("r1", r1)] {
            if !val.is_finite() {
                return Err(Error::Evaluation {
                    potential: name.into(),
                    x,
                });
            }
        }
        s.x.push(x);
        s.v1.push(v1);
        s.v2.push(v2);
    }
    Ok(s)
}

/// Midpoints of the sample intervals where `values` changes sign.
fn sign_changes(x: &[f64], values: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| (v[0] > 0.0) != (v[1] > 0.0))
        .map(|(x, _)| 0.5 * (x[0] + x[1]))
        .collect()
}

fn check_limits(problem: &ProblemSpec) -> Option<(String, Option<f64>)> {
    let e0 = problem.window.e0;
    let conditions = [
        ("V1(-inf)", problem.v1.limit(-1.0), true),
        ("V2(-inf)", problem.v2.limit(-1.0), true),
        ("V1(+inf)", problem.v1.limit(1.0), true),
        ("V2(+inf)", problem.v2.limit(1.0), false),
    ];
    let failures: Vec<String> = conditions
        .iter()
        .filter(|(_, value, above)| if *above { !(*value > e0) } else { !(*value < e0) })
        .map(|(name, value, above)| format!("{name} = {value} should be {} E0 = {e0}", if *above { ">" } else { "<" }))
        .collect();
    if failures.is_empty() {
        None
    } else {
        Some((failures.join("; "), None))
    }
}

fn check_turning_points(problem: &ProblemSpec, s: &Samples) -> Option<(String, Option<f64>)> {
    let e0 = problem.window.e0;
    let d1: Vec<f64> = s.v1.iter().map(|v| v - e0).collect();
    let d2: Vec<f64> = s.v2.iter().map(|v| v - e0).collect();
    let roots1 = sign_changes(&s.x, &d1);
    let roots2 = sign_changes(&s.x, &d2);
    if roots1.len() != 2 {
        return Some((
            format!("V1 = E0 has {} sign changes on the box, expected 2", roots1.len()),
            roots1.get(2).or(roots1.first()).copied(),
        ));
    }
    if roots2.len() != 1 {
        return Some((
            format!("V2 = E0 has {} sign changes on the box, expected 1", roots2.len()),
            roots2.get(1).or(roots2.first()).copied(),
        ));
    }
    let (a, c, b) = match (
        real_turning_point(&problem.v1, e0, -1.0, "a"),
        real_turning_point(&problem.v1, e0, 1.0, "c"),
        real_turning_point(&problem.v2, e0, -1.0, "b"),
    ) {
        (Ok(a), Ok(c), Ok(b)) => (a, c, b),
        _ => return Some(("could not refine the turning points".into(), None)),
    };
    if !(a < b && b < 0.0 && 0.0 < c) {
        return Some((format!("ordering a < b < 0 < c fails: a = {a}, b = {b}, c = {c}"), Some(b)));
    }
    let slopes = [
        ("V1'(a)", a, problem.v1.at_real(a).1, false),
        ("V1'(c)", c, problem.v1.at_real(c).1, true),
        ("V2'(b)", b, problem.v2.at_real(b).1, false),
    ];
    for (name, x, slope, positive) in slopes {
        let ok = if positive { slope > 1e-10 } else { slope < -1e-10 };
        if !ok {
            return Some((format!("{name} = {slope} has the wrong sign or vanishes"), Some(x)));
        }
    }
    None
}

fn check_crossing(problem: &ProblemSpec, s: &Samples) -> Option<(String, Option<f64>)> {
    let (v1_0, dv1_0, _) = problem.v1.at_real(0.0);
    let (v2_0, dv2_0, _) = problem.v2.at_real(0.0);
    if v1_0.abs() > 1e-12 || v2_0.abs() > 1e-12 {
        return Some((format!("V1(0) = {v1_0}, V2(0) = {v2_0}, both should vanish"), Some(0.0)));
    }
    if !(dv1_0 > 0.0) || !(dv2_0 < 0.0) {
        return Some((format!("slopes at 0: V1'(0) = {dv1_0} (need > 0), V2'(0) = {dv2_0} (need < 0)"), Some(0.0)));
    }
    let e0 = problem.window.e0;
    let spacing = s.x[1] - s.x[0];
    let eligible = |i: usize| s.v1[i] <= e0 && s.v2[i] <= e0;
    let diff = |i: usize| s.v1[i] - s.v2[i];
    for i in 0..s.x.len() {
        if !eligible(i) {
            continue;
        }
        let x = s.x[i];
        if diff(i).abs() <= 1e-12 && x.abs() > spacing {
            return Some(("V1 = V2 below E0 away from the origin".into(), Some(x)));
        }
        if i + 1 < s.x.len() && eligible(i + 1) && (diff(i) > 0.0) != (diff(i + 1) > 0.0) {
            let brackets_origin = s.x[i] <= 0.0 && 0.0 <= s.x[i + 1];
            if !brackets_origin {
                return Some(("V1 - V2 changes sign below E0 away from the origin".into(), Some(x)));
            }
        }
    }
    None
}

fn check_coupling(problem: &ProblemSpec) -> Option<(String, Option<f64>)> {
    let (r0, r1) = problem.coupling.at_crossing();
    if r0 == 0.0 && r1 == 0.0 && !problem.coupling.degenerate {
        return Some(("W is not elliptic at (0, +-sqrt(E0)): r0(0) = r1(0) = 0".into(), Some(0.0)));
    }
    None
}

pub fn validate_assumptions(problem: &ProblemSpec) -> Result<ValidationReport> {
    validate_assumptions_with(problem, DEFAULT_SAMPLES)
}

pub fn validate_assumptions_with(problem: &ProblemSpec, samples: usize) -> Result<ValidationReport> {
    let s = sample(problem, samples.max(DEFAULT_SAMPLES))?;
    let mut report = ValidationReport::default();
    report.push(Assumption::A2, check_limits(problem), "asymptotic limits on the correct sides of E0");
    report.push(
        Assumption::A3,
        check_turning_points(problem, &s),
        "three simple turning points a < b < 0 < c",
    );
    report.push(Assumption::A4, check_crossing(problem, &s), "curves cross below E0 only at x = 0");
    let degenerate = problem.coupling.is_zero_at_crossing() && problem.coupling.degenerate;
    report.push(
        Assumption::A5,
        check_coupling(problem),
        if degenerate {
            "degenerate coupling explicitly enabled"
        } else {
            "coupling elliptic at the crossing points"
        },
    );
    Ok(report)
}
