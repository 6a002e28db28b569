//! Composite Gauss-Legendre on straight complex segments, with the
//! substitution `t = end -+ u^2` at endpoints that carry a square-root
//! type singularity.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use std::sync::OnceLock;

const DEGREE: usize = 20;
const MAX_PANELS: usize = 1024;
/// Agreement required between the P-panel and 2P-panel estimates.
pub const REFINEMENT_TOLERANCE: f64 = 1e-13;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(DEGREE)
            .expect("degree >= 2")
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// Which ends of the segment carry an inverse-square-root (or square-root)
/// singularity of the integrand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SingularEnds {
    pub lo: bool,
    pub hi: bool,
}

impl SingularEnds {
    pub const NONE: Self = Self { lo: false, hi: false };
    pub const LO: Self = Self { lo: true, hi: false };
    pub const HI: Self = Self { lo: false, hi: true };
    pub const BOTH: Self = Self { lo: true, hi: true };
}

fn composite<F>(upper: f64, panels: usize, g: &F) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let width = upper / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = width * (p as f64 + 0.5);
        let half = 0.5 * width;
        for &(node, weight) in rule() {
            total += g(mid + half * node)? * (weight * half);
        }
    }
    Ok(total)
}

/// Integral of a smooth function of `u` over `[0, upper]`, refined until two
/// successive panel doublings agree.
fn smooth_integral<F>(upper: f64, g: F) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut panels = 2;
    let mut coarse = composite(upper, panels, &g)?;
    let mut diff = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let fine = composite(upper, panels, &g)?;
        diff = (fine - coarse).norm();
        if diff <= REFINEMENT_TOLERANCE * fine.norm().max(1.0) {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::QuadratureAccuracy {
        tolerance: REFINEMENT_TOLERANCE,
        achieved: diff,
    })
}

/// Quadrature node on a segment: the point and its exact displacement from
/// each end, free of the cancellation in `t - end`.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub t: Complex64,
    pub from_lo: Complex64,
    pub from_hi: Complex64,
}

/// `int_lo^hi f(t) dt` along the straight segment, where `f` may behave like
/// `(t - end)^(+-1/2)` at ends flagged in `ends`.
pub fn segment_integral<F>(lo: Complex64, hi: Complex64, ends: SingularEnds, f: F) -> Result<Complex64>
where
    F: Fn(Node) -> Result<Complex64>,
{
    if lo == hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let span = hi - lo;
    // t = lo + s * span with s in [0, 1]; s near an end is passed as the
    // distance to that end.
    let near_lo = |s: f64| {
        let from_lo = span * s;
        f(Node {
            t: lo + from_lo,
            from_lo,
            from_hi: -span * (1.0 - s),
        })
        .map(|v| v * span)
    };
    let near_hi = |r: f64| {
        let from_hi = -span * r;
        f(Node {
            t: hi + from_hi,
            from_lo: span * (1.0 - r),
            from_hi,
        })
        .map(|v| v * span)
    };
    match (ends.lo, ends.hi) {
        (false, false) => smooth_integral(1.0, near_lo),
        (true, false) => smooth_integral(1.0, |u| Ok(near_lo(u * u)? * (2.0 * u))),
        (false, true) => smooth_integral(1.0, |u| Ok(near_hi(u * u)? * (2.0 * u))),
        (true, true) => {
            let upper = 0.5f64.sqrt();
            let left = smooth_integral(upper, |u| Ok(near_lo(u * u)? * (2.0 * u)))?;
            let right = smooth_integral(upper, |u| Ok(near_hi(u * u)? * (2.0 * u)))?;
            Ok(left + right)
        }
    }
}

/// Principal square root with a guard against landing on the cut away from
/// the (vanishing) endpoints.
pub(crate) fn principal_sqrt(w: Complex64, at: Complex64) -> Result<Complex64> {
    if w.re < 0.0 && w.im.abs() <= 1e-14 * (1.0 + w.norm()) && w.norm() > 1e-10 {
        return Err(Error::BranchAmbiguity { at });
    }
    Ok(w.sqrt())
}
