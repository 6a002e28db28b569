//! Direct numerical oracles for the resonances: exterior complex scaling of
//! a finite-difference discretization, and Wronskian shooting with complex
//! root finding.

pub mod banded;
pub mod contour;
pub mod discretize;
pub mod eigen;
pub mod shooting;

pub use contour::{build_contour, ContourPoint, DeformedContour};
pub use discretize::{discretize, DiscretizedOperator, GridMeta, DEFAULT_HALF_WIDTH, MIN_NODES};
pub use eigen::{eigenvalues_in_disc, DiscEigenvalues, EigenOptions, EigenPair};
pub use shooting::{wronskian, wronskian_detail, wronskian_roots, RootOptions, WronskianValue};

use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest residual accepted for an ECS eigenpair.
pub const ECS_RESIDUAL_LIMIT: f64 = 1e-8;
/// Shift of the contour angle used by the stability filter.
pub const THETA_STEP: f64 = 0.05;
/// Largest motion of a resonance under the angle shift.
pub const THETA_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ecs,
    Wronskian,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ecs => "ecs",
            Self::Wronskian => "wronskian",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ecs" => Ok(Self::Ecs),
            "wronskian" => Ok(Self::Wronskian),
            other => Err(Error::Config(format!("unknown oracle method {other:?}"))),
        }
    }
}

/// A resonance found by one of the oracles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResonance {
    pub energy: Complex64,
    /// ECS: `||(M - E) v|| / ||v||`. Wronskian: `|W(E)| / |W(seed)|`.
    pub residual: f64,
    pub method: Method,
    pub theta_used: f64,
    pub grid: Option<GridMeta>,
    pub converged: bool,
    /// Starting point of the root search.
    pub seed: Option<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EcsOptions {
    pub n: usize,
    pub half_width: usize,
    pub eigen: EigenOptions,
}

impl EcsOptions {
    pub fn with_nodes(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }
}

impl Default for EcsOptions {
    fn default() -> Self {
        Self {
            n: 4096,
            half_width: DEFAULT_HALF_WIDTH,
            eigen: EigenOptions::default(),
        }
    }
}

/// Disc `(center, radius)` circumscribing the window
/// `[E0 - delta0, E0 + delta0] - i [0, C0 h]`.
pub fn window_disc(problem: &ProblemSpec, h: f64) -> (Complex64, f64) {
    let w = &problem.window;
    let depth = 0.5 * w.c0 * h;
    (Complex64::new(w.e0, -depth), w.delta0.hypot(depth))
}

/// Eigenvalues of the discretized operator within `radius` of `center`.
/// Pairs whose polished residual stays above [`ECS_RESIDUAL_LIMIT`] are
/// returned with `converged = false`.
pub fn resonances_in_window(
    op: &DiscretizedOperator,
    center: Complex64,
    radius: f64,
    opts: &EigenOptions,
) -> Result<(Vec<OracleResonance>, bool)> {
    let found = eigenvalues_in_disc(&op.matrix, center, radius, opts)?;
    let list = found
        .pairs
        .into_iter()
        .map(|p| OracleResonance {
            energy: p.value,
            residual: p.residual,
            method: Method::Ecs,
            theta_used: op.theta,
            grid: Some(op.grid),
            converged: p.residual < ECS_RESIDUAL_LIMIT,
            seed: None,
        })
        .collect();
    Ok((list, found.partial))
}

#[derive(Clone, Debug, Serialize)]
pub struct EcsRun {
    pub resonances: Vec<OracleResonance>,
    /// The disc search hit its recursion limit somewhere.
    pub partial: bool,
    pub grid: GridMeta,
}

/// ECS eigenvalues inside the energy window at the problem's contour angle.
pub fn ecs_window(problem: &ProblemSpec, h: f64, opts: &EcsOptions) -> Result<EcsRun> {
    let contour = build_contour(problem)?;
    let op = discretize(problem, &contour, opts.n, h, opts.half_width)?;
    let (center, radius) = window_disc(problem, h);
    let (all, partial) = resonances_in_window(&op, center, radius, &opts.eigen)?;
    let resonances = all
        .into_iter()
        .filter(|r| problem.window.contains(r.energy, h))
        .collect();
    Ok(EcsRun {
        resonances,
        partial,
        grid: op.grid,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaCheck {
    pub resonance: OracleResonance,
    /// Distance to the nearest eigenvalue at the shifted angle.
    pub shift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaStability {
    pub checks: Vec<ThetaCheck>,
    pub partial: bool,
    pub grid: GridMeta,
}

impl ThetaStability {
    pub fn accepted(&self) -> Vec<OracleResonance> {
        self.checks
            .iter()
            .filter(|c| c.stable)
            .map(|c| c.resonance.clone())
            .collect()
    }
}

/// Radius searched around each resonance for its partner at the shifted
/// angle.
const PARTNER_RADIUS: f64 = 1e-3;

/// Window eigenvalues at the problem's angle, each compared against the
/// nearest eigenvalue at the angle shifted by [`THETA_STEP`]. Only
/// converged eigenvalues that move by less than [`THETA_TOLERANCE`] are
/// stable.
pub fn theta_stable(problem: &ProblemSpec, h: f64, opts: &EcsOptions) -> Result<ThetaStability> {
    theta_stable_against(problem, h, opts, &[problem.contour.theta + THETA_STEP])
}

/// As [`theta_stable`], with the largest motion over several partner angles.
pub fn theta_stable_against(
    problem: &ProblemSpec,
    h: f64,
    opts: &EcsOptions,
    partners: &[f64],
) -> Result<ThetaStability> {
    let base = ecs_window(problem, h, opts)?;
    let mut shifts = vec![0.0f64; base.resonances.len()];
    for &theta in partners {
        let shifted = problem.with_theta(theta)?;
        let op = discretize(&shifted, &build_contour(&shifted)?, opts.n, h, opts.half_width)?;
        for (r, shift) in base.resonances.iter().zip(shifts.iter_mut()) {
            let near = eigenvalues_in_disc(&op.matrix, r.energy, PARTNER_RADIUS, &opts.eigen)?;
            let d = near
                .pairs
                .iter()
                .map(|o| (o.value - r.energy).norm())
                .fold(f64::INFINITY, f64::min);
            *shift = shift.max(d);
        }
    }
    let checks = base
        .resonances
        .into_iter()
        .zip(shifts)
        .map(|(r, shift)| ThetaCheck {
            stable: r.converged && shift < THETA_TOLERANCE,
            resonance: r,
            shift,
        })
        .collect();
    Ok(ThetaStability {
        checks,
        partial: base.partial,
        grid: base.grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::harmonic_problem;
    use crate::model::CouplingSpec;
    use crate::semiclassics::bohr_grid;

    #[test]
    fn decoupled_eigenvalues_are_real_and_near_the_grid() {
        let p = ProblemSpec::reference_with(CouplingSpec::decoupled());
        let h = 0.05;
        let run = ecs_window(&p, h, &EcsOptions::with_nodes(2048)).unwrap();
        let grid = bohr_grid(&p, h).unwrap();
        assert_eq!(run.resonances.len(), grid.len());
        for (r, (_, e_k)) in run.resonances.iter().zip(&grid) {
            assert!(r.converged);
            assert!(r.energy.im.abs() < 1e-8, "{}", r.energy);
            assert!((r.energy.re - e_k).abs() < h * h, "{} vs {e_k}", r.energy);
        }
    }

    #[test]
    fn second_order_stencil_converges_at_rate_four() {
        let mut p = harmonic_problem();
        p.coupling = CouplingSpec::decoupled();
        let h = 0.1;
        let contour = build_contour(&p).unwrap();
        let target = Complex64::new(1.3, 0.0);
        let e: Vec<Complex64> = [1024, 2048, 4096]
            .iter()
            .map(|&n| {
                let op = discretize(&p, &contour, n, h, 1).unwrap();
                let (found, _) = resonances_in_window(&op, target, 0.05, &EigenOptions::default()).unwrap();
                assert_eq!(found.len(), 1);
                found[0].energy
            })
            .collect();
        let ratio = (e[0] - e[1]).norm() / (e[1] - e[2]).norm();
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn empty_disc_gives_no_resonances() {
        let p = ProblemSpec::reference();
        let op = discretize(&p, &build_contour(&p).unwrap(), 1024, 0.05, 4).unwrap();
        let (found, partial) = resonances_in_window(&op, Complex64::new(1.0, -0.5), 0.01, &EigenOptions::default()).unwrap();
        assert!(found.is_empty());
        assert!(!partial);
    }

    #[test]
    fn reference_resonances_are_theta_stable() {
        let p = ProblemSpec::reference();
        let st = theta_stable(&p, 0.05, &EcsOptions::with_nodes(4096)).unwrap();
        assert!(!st.checks.is_empty());
        for c in &st.checks {
            assert!(c.stable, "{c:?}");
            assert!(c.resonance.energy.im < 0.0);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Ecs, Method::Wronskian] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("dense".parse::<Method>().is_err());
    }
}
