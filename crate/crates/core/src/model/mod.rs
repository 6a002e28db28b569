//! The coupled two-channel model: potentials, coupling, energy window,
//! contour parameters, turning points and crossing slopes.

mod potential;
mod validate;

pub use potential::{Jet, PotentialSpec};
pub use validate::{validate_assumptions, validate_assumptions_with, Assumption, Check, ValidationReport};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coupling operator `W = r0(x) + i r1(x) h D_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub r0: PotentialSpec,
    pub r1: PotentialSpec,
    /// Permits `r0(0) = r1(0) = 0` (decoupled sanity runs).
    #[serde(default)]
    pub degenerate: bool,
}

impl CouplingSpec {
    pub fn constant(r0: f64, r1: f64) -> Self {
        Self {
            r0: PotentialSpec::constant(r0),
            r1: PotentialSpec::constant(r1),
            degenerate: false,
        }
    }

    pub fn decoupled() -> Self {
        Self {
            degenerate: true,
            ..Self::constant(0.0, 0.0)
        }
    }

    /// `(r0(0), r1(0))`
    pub fn at_crossing(&self) -> (f64, f64) {
        (self.r0.at_real(0.0).0, self.r1.at_real(0.0).0)
    }

    pub fn is_zero_at_crossing(&self) -> bool {
        let (r0, r1) = self.at_crossing();
        r0 == 0.0 && r1 == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyWindow {
    pub e0: f64,
    pub delta0: f64,
    /// Depth of the window below the real axis, in units of h.
    pub c0: f64,
}

impl EnergyWindow {
    pub fn real_range(&self) -> (f64, f64) {
        (self.e0 - self.delta0, self.e0 + self.delta0)
    }

    /// Membership in `[E0 - delta0, E0 + delta0] - i [0, C0 h]`, with a
    /// small allowance above the axis for round-off.
    pub fn contains(&self, energy: Complex64, h: f64) -> bool {
        (energy.re - self.e0).abs() <= self.delta0
            && energy.im <= 1e-10
            && energy.im >= -self.c0 * h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourParams {
    pub theta: f64,
    pub x_infty: f64,
    #[serde(default = "default_ramp_width")]
    pub ramp_width: f64,
}

fn default_ramp_width() -> f64 {
    1.0
}

/// The full model. Built through [`ProblemSpec::new`], which fills in the
/// default computational box and checks the invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub v1: PotentialSpec,
    pub v2: PotentialSpec,
    pub coupling: CouplingSpec,
    pub window: EnergyWindow,
    pub contour: ContourParams,
    pub x_min: f64,
    pub x_max: f64,
}

/// Margin of the box beyond `a(E0)` on the left.
pub const BOX_LEFT_MARGIN: f64 = 6.0;
/// Margin of the box beyond `x_infty` on the right.
pub const BOX_RIGHT_MARGIN: f64 = 14.0;

impl ProblemSpec {
    pub fn new(
        v1: PotentialSpec,
        v2: PotentialSpec,
        coupling: CouplingSpec,
        window: EnergyWindow,
        contour: ContourParams,
        bounds: Option<(f64, f64)>,
    ) -> Result<Self> {
        let mut problem = Self {
            v1,
            v2,
            coupling,
            window,
            contour,
            x_min: f64::NAN,
            x_max: f64::NAN,
        };
        if !(window.e0 > 0.0) {
            return Err(Error::InvalidProblem(format!("E0 = {} must be positive", window.e0)));
        }
        let (x_min, x_max) = match bounds {
            Some(b) => b,
            None => {
                let a = real_turning_point(&problem.v1, window.e0, -1.0, "a")?;
                (a - BOX_LEFT_MARGIN, contour.x_infty + BOX_RIGHT_MARGIN)
            }
        };
        problem.x_min = x_min;
        problem.x_max = x_max;
        problem.check()?;
        Ok(problem)
    }

    /// The shipped reference pair in the physical coupling case
    /// `r0 = 0, r1 = 1`.
    pub fn reference() -> Self {
        Self::reference_with(CouplingSpec::constant(0.0, 1.0))
    }

    /// Reference potentials and window with a different coupling.
    pub fn reference_with(coupling: CouplingSpec) -> Self {
        Self::new(
            PotentialSpec::ShiftedSechWell {
                asymptote: 2.0,
                // 2 cosh^2(1/2), so that V1(0) = 0.
                depth: 1.0 + 1f64.cosh(),
                center: -0.5,
                scale: 1.0,
            },
            PotentialSpec::TanhStep {
                offset: 0.0,
                amplitude: -1.5,
                center: 0.0,
                scale: 1.0,
            },
            coupling,
            EnergyWindow {
                e0: 1.0,
                delta0: 0.1,
                c0: 2.0,
            },
            ContourParams {
                theta: 0.3,
                x_infty: 3.0,
                ramp_width: 1.0,
            },
            None,
        )
        .expect("reference problem is valid")
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let mut p = self.clone();
        p.contour.theta = theta;
        p.check()?;
        Ok(p)
    }

    /// Invariants: `E0 > 0`, `delta0 > 0`, `0 < theta < pi/4`,
    /// `x_infty > c(E0)`, and the box covers `[a(E0) - 5, x_infty + 10]`.
    pub fn check(&self) -> Result<()> {
        let w = &self.window;
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if !(w.e0 > 0.0) {
            return bad(format!("E0 = {} must be positive", w.e0));
        }
        if !(w.delta0 > 0.0) {
            return bad(format!("delta0 = {} must be positive", w.delta0));
        }
        if !(w.c0 > 0.0) {
            return bad(format!("C0 = {} must be positive", w.c0));
        }
        let theta = self.contour.theta;
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_4) {
            return bad(format!("theta = {theta} outside (0, pi/4)"));
        }
        if !(self.contour.ramp_width > 0.0) {
            return bad("ramp width must be positive".into());
        }
        let a = real_turning_point(&self.v1, w.e0, -1.0, "a")?;
        let c = real_turning_point(&self.v1, w.e0, 1.0, "c")?;
        if !(self.contour.x_infty > c) {
            return bad(format!("x_infty = {} must exceed c(E0) = {c}", self.contour.x_infty));
        }
        if !(self.x_min <= a - 5.0 && self.x_max >= self.contour.x_infty + 10.0) {
            return bad(format!(
                "box [{}, {}] must contain [{}, {}]",
                self.x_min,
                self.x_max,
                a - 5.0,
                self.contour.x_infty + 10.0
            ));
        }
        Ok(())
    }

    pub fn v(&self, channel: Channel) -> &PotentialSpec {
        match channel {
            Channel::One => &self.v1,
            Channel::Two => &self.v2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    One,
    Two,
}

impl Channel {
    pub fn other(self) -> Self {
        match self {
            Self::One => Self::Two,
            Self::Two => Self::One,
        }
    }
}

/// `a(E), c(E)` solve `V1 = E`, `b(E)` solves `V2 = E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurningPoints {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSlopes {
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
}

const SCAN_STEP: f64 = 0.02;
const SCAN_LIMIT: f64 = 60.0;
const NEWTON_ITERATIONS: usize = 50;

fn residual_tolerance(energy: Complex64) -> f64 {
    1e-13 * energy.norm().max(1.0)
}

/// Real root of `V(x) = e` found by walking outward from the origin in the
/// given direction until the sign of `V - e` flips, then bisecting and
/// polishing with Newton.
pub(crate) fn real_turning_point(v: &PotentialSpec, e: f64, direction: f64, label: &str) -> Result<f64> {
    let f = |x: f64| v.at_real(x).0 - e;
    let f0 = f(0.0);
    if !f0.is_finite() {
        return Err(Error::Evaluation {
            potential: v.describe().into(),
            x: 0.0,
        });
    }
    let mut inner = 0.0;
    let mut outer = f64::NAN;
    let mut x = 0.0f64;
    while x.abs() < SCAN_LIMIT {
        x += direction * SCAN_STEP;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Evaluation {
                potential: v.describe().into(),
                x,
            });
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != f0.signum() {
            outer = x;
            break;
        }
        inner = x;
    }
    if outer.is_nan() {
        return Err(Error::Bracketing(format!("turning point {label} at E = {e}")));
    }
    let (mut lo, mut hi) = (inner, outer);
    let flo = f(lo).signum();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-9 {
            break;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..NEWTON_ITERATIONS {
        let (val, d1, _) = v.at_real(root);
        let r = val - e;
        if r.abs() < 1e-15 * e.abs().max(1.0) || d1 == 0.0 {
            break;
        }
        let next = root - r / d1;
        if (next - root).abs() < 1e-16 * root.abs().max(1.0) {
            root = next;
            break;
        }
        root = next;
    }
    Ok(root)
}

/// Newton continuation of a root of `V(x) = E` from the real root at
/// `Re E` along the straight segment to `E`.
fn continue_root(v: &PotentialSpec, start: f64, energy: Complex64, label: &str) -> Result<Complex64> {
    let steps = ((energy.im.abs() / 1e-3).ceil() as usize).max(1);
    let mut x = Complex64::new(start, 0.0);
    for step in 1..=steps {
        let target = Complex64::new(energy.re, energy.im * step as f64 / steps as f64);
        let tol = residual_tolerance(target);
        let mut converged = false;
        for _ in 0..NEWTON_ITERATIONS {
            let j = v.jet(x);
            let r = j.value - target;
            if !r.is_finite() {
                return Err(Error::Evaluation {
                    potential: v.describe().into(),
                    x: x.re,
                });
            }
            let next = x - r / j.d1;
            if !next.is_finite() {
                return Err(Error::AssumptionViolated(format!(
                    "turning point {label} is not simple near x = {x}"
                )));
            }
            x = next;
            if r.norm() < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NewtonNonConvergence {
                what: format!("turning point {label}"),
                iterations: NEWTON_ITERATIONS,
                last: x,
            });
        }
    }
    Ok(x)
}

/// Turning points `a(E) < b(E) < 0 < c(E)` (real parts) at a possibly
/// complex energy near the window.
pub fn turning_points(problem: &ProblemSpec, energy: Complex64) -> Result<TurningPoints> {
    let w = &problem.window;
    if (energy.re - w.e0).abs() > 2.0 * w.delta0 {
        return Err(Error::Domain(format!(
            "Re E = {} is outside [E0 - 2 delta0, E0 + 2 delta0]",
            energy.re
        )));
    }
    let e = energy.re;
    let a = continue_root(&problem.v1, real_turning_point(&problem.v1, e, -1.0, "a")?, energy, "a")?;
    let c = continue_root(&problem.v1, real_turning_point(&problem.v1, e, 1.0, "c")?, energy, "c")?;
    let b = continue_root(&problem.v2, real_turning_point(&problem.v2, e, -1.0, "b")?, energy, "b")?;
    for (first, second, p, q) in [("a", "b", a, b), ("b", "c", b, c), ("a", "c", a, c)] {
        let separation = (p - q).norm();
        if separation < 1e-6 {
            return Err(Error::TurningPointCollision {
                first,
                second,
                energy,
                separation,
            });
        }
    }
    Ok(TurningPoints { a, b, c })
}

pub fn crossing_slopes(problem: &ProblemSpec) -> Result<CrossingSlopes> {
    let tau1 = problem.v1.at_real(0.0).1;
    let tau2 = -problem.v2.at_real(0.0).1;
    if !(tau1 > 0.0) {
        return Err(Error::AssumptionViolated(format!("V1'(0) = {tau1} must be positive")));
    }
    if !(tau2 > 0.0) {
        return Err(Error::AssumptionViolated(format!("V2'(0) = {} must be negative", -tau2)));
    }
    let gamma = tau1 + tau2;
    if !(gamma > 0.0) {
        return Err(Error::AssumptionViolated(format!("gamma = {gamma} must be positive")));
    }
    Ok(CrossingSlopes { tau1, tau2, gamma })
}
