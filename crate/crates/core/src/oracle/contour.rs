//! Exterior complex deformation `F(x) = x + i theta f(x)` with a quintic
//! smoothstep ramp, so that `F` is C^2 at both joints.

use crate::actions::{segment_integral, SingularEnds};
use crate::error::{Error, Result};
use crate::model::{ContourParams, ProblemSpec};
use num_complex::Complex64;

/// Number of probe points for the outgoing-decay check.
const DECAY_PROBES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformedContour {
    pub theta: f64,
    pub x_infty: f64,
    pub ramp_width: f64,
}

/// `F, F', F''` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourPoint {
    pub z: Complex64,
    pub dz: Complex64,
    pub d2z: Complex64,
}

impl DeformedContour {
    pub fn new(params: ContourParams) -> Self {
        Self {
            theta: params.theta,
            x_infty: params.x_infty,
            ramp_width: params.ramp_width,
        }
    }

    /// `(f, f', f'')`
    fn profile(&self, x: f64) -> (f64, f64, f64) {
        let w = self.ramp_width;
        if x <= self.x_infty {
            (0.0, 0.0, 0.0)
        } else if x >= self.x_infty + w {
            (x - self.x_infty - 0.5 * w, 1.0, 0.0)
        } else {
            let t = (x - self.x_infty) / w;
            let t2 = t * t;
            let f = w * t2 * t2 * (t2 - 3.0 * t + 2.5);
            let df = t2 * t * (6.0 * t2 - 15.0 * t + 10.0);
            let d2f = 30.0 * t2 * (t2 - 2.0 * t + 1.0) / w;
            (f, df, d2f)
        }
    }

    pub fn at(&self, x: f64) -> ContourPoint {
        let (f, df, d2f) = self.profile(x);
        ContourPoint {
            z: Complex64::new(x, self.theta * f),
            dz: Complex64::new(1.0, self.theta * df),
            d2z: Complex64::new(0.0, self.theta * d2f),
        }
    }

    pub fn map(&self, x: f64) -> Complex64 {
        self.at(x).z
    }

    /// `Im int_{x_infty}^{F(x)} sqrt(E - V2(z)) dz` along the contour.
    pub fn tail_phase(&self, problem: &ProblemSpec, energy: f64, x: f64) -> Result<f64> {
        let e = Complex64::new(energy, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        let mut lo = self.x_infty;
        // Ramp first, then unit pieces of the straight tail.
        let mut cuts = vec![(self.x_infty + self.ramp_width).min(x)];
        while *cuts.last().unwrap() < x {
            cuts.push((cuts.last().unwrap() + 1.0).min(x));
        }
        for hi in cuts {
            if hi <= lo {
                continue;
            }
            let piece = segment_integral(
                Complex64::new(lo, 0.0),
                Complex64::new(hi, 0.0),
                SingularEnds::NONE,
                |n| {
                    let p = self.at(n.t.re);
                    Ok((e - problem.v2.value(p.z)).sqrt() * p.dz)
                },
            )?;
            total += piece;
            lo = hi;
        }
        Ok(total.im)
    }
}

/// The contour of a problem, after checking that outgoing channel-2 waves
/// decay along the tail: `Im int sqrt(E0 - V2) dz >= 0` beyond the ramp.
pub fn build_contour(problem: &ProblemSpec) -> Result<DeformedContour> {
    let contour = DeformedContour::new(problem.contour);
    let start = contour.x_infty + contour.ramp_width;
    if problem.x_max <= start {
        return Err(Error::Contour(format!(
            "box ends at {} before the ramp is complete at {start}",
            problem.x_max
        )));
    }
    let step = (problem.x_max - start) / DECAY_PROBES as f64;
    let mut previous = start;
    let mut phase = contour.tail_phase(problem, problem.window.e0, start)?;
    for i in 0..=DECAY_PROBES {
        let x = start + step * i as f64;
        if i > 0 {
            // Accumulate piecewise to keep the probe loop linear.
            let e = Complex64::new(problem.window.e0, 0.0);
            phase += segment_integral(
                Complex64::new(previous, 0.0),
                Complex64::new(x, 0.0),
                SingularEnds::NONE,
                |n| {
                    let p = contour.at(n.t.re);
                    Ok((e - problem.v2.value(p.z)).sqrt() * p.dz)
                },
            )?
            .im;
            previous = x;
        }
        if phase < -1e-12 {
            return Err(Error::Contour(format!(
                "outgoing waves grow along the tail (Im phase = {phase:e} at x = {x}); increase theta or x_infty"
            )));
        }
    }
    Ok(contour)
}
