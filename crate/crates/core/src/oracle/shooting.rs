//! Wronskian shooting. The system `(P - E) u = 0` is written for the state
//! `(u1, h u1', u2, h u2')` along the deformed contour and integrated with
//! classical RK4 from both ends towards the crossing point `x = 0`.

use super::contour::{build_contour, DeformedContour};
use super::{Method, OracleResonance};
use crate::error::{Error, Result};
use crate::model::{real_turning_point, ProblemSpec};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

type State = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Steps per unit of `h`.
const STEPS_PER_H: f64 = 40.0;
/// RK4 steps between renormalizations.
const RENORMALIZE_EVERY: usize = 8;
/// Margin left of `a(E0)` where the left columns start.
const LEFT_MARGIN: f64 = 4.0;

/// A determinant carried as `value * exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WronskianValue {
    pub value: Complex64,
    pub log_scale: f64,
}

impl WronskianValue {
    pub fn ln_abs(&self) -> f64 {
        self.value.norm().ln() + self.log_scale
    }
}

struct Coefficients {
    dz: Complex64,
    /// `(V1 - E) / h`
    v1: Complex64,
    /// `(V2 - E) / h`
    v2: Complex64,
    r0: Complex64,
    r1: Complex64,
    dr1: Complex64,
}

struct System<'a> {
    problem: &'a ProblemSpec,
    contour: DeformedContour,
    energy: Complex64,
    h: f64,
    coupled: bool,
}

impl System<'_> {
    fn at(&self, x: f64) -> Coefficients {
        let p = self.contour.at(x);
        let c = &self.problem.coupling;
        let r1 = c.r1.jet(p.z);
        Coefficients {
            dz: p.dz,
            v1: (self.problem.v1.value(p.z) - self.energy) / self.h,
            v2: (self.problem.v2.value(p.z) - self.energy) / self.h,
            r0: c.r0.value(p.z),
            r1: r1.value,
            dr1: r1.d1,
        }
    }

    /// Derivative of the state with respect to the real contour parameter.
    fn rhs(&self, c: &Coefficients, y: &State) -> State {
        let inv_h = 1.0 / self.h;
        let mut d1 = c.v1 * y[0];
        let mut d3 = c.v2 * y[2];
        if self.coupled {
            d1 += c.r0 * y[2] + c.r1 * y[3];
            d3 += (c.r0 - self.h * c.dr1) * y[0] - c.r1 * y[1];
        }
        [c.dz * y[1] * inv_h, c.dz * d1, c.dz * y[3] * inv_h, c.dz * d3]
    }

    /// Decaying data `(1, h lambda)` in one channel at parameter `x`, with
    /// `Re(lambda F') > 0` when `towards_right` and `< 0` otherwise.
    fn decaying(&self, x: f64, channel: usize, grows_rightward: bool) -> State {
        let c = self.at(x);
        let v = if channel == 0 { c.v1 } else { c.v2 };
        let mut lambda = (v / self.h).sqrt();
        if ((lambda * c.dz).re > 0.0) != grows_rightward {
            lambda = -lambda;
        }
        let mut y = [ZERO; 4];
        y[2 * channel] = Complex64::new(1.0, 0.0);
        y[2 * channel + 1] = lambda * self.h;
        y
    }

    /// Integrates the columns from `x0` to `x1`, renormalizing on the way.
    /// Returns the accumulated log of the removed scale.
    fn march(&self, x0: f64, x1: f64, cols: &mut [State]) -> Result<f64> {
        let target = self.h / STEPS_PER_H;
        let steps = ((x1 - x0).abs() / target).ceil().max(1.0) as usize;
        let dx = (x1 - x0) / steps as f64;
        let mut log_scale = normalize(cols);
        let mut start = self.at(x0);
        for i in 0..steps {
            let x = x0 + dx * i as f64;
            let mid = self.at(x + 0.5 * dx);
            let end = self.at(x + dx);
            for y in cols.iter_mut() {
                let k1 = self.rhs(&start, y);
                let k2 = self.rhs(&mid, &axpy(y, 0.5 * dx, &k1));
                let k3 = self.rhs(&mid, &axpy(y, 0.5 * dx, &k2));
                let k4 = self.rhs(&end, &axpy(y, dx, &k3));
                for j in 0..4 {
                    y[j] += dx / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
            }
            start = end;
            if (i + 1) % RENORMALIZE_EVERY == 0 || i + 1 == steps {
                log_scale += normalize(cols);
                if !log_scale.is_finite() {
                    return Err(Error::Domain(format!(
                        "shooting overflowed near x = {} at E = {}; reduce the step",
                        x + dx,
                        self.energy
                    )));
                }
            }
        }
        Ok(log_scale)
    }
}

fn axpy(y: &State, a: f64, k: &State) -> State {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]]
}

fn col_norm(y: &State) -> f64 {
    y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram-Schmidt on the columns (spans and the determinant up to the
/// returned log-scale are preserved).
fn normalize(cols: &mut [State]) -> f64 {
    let mut log_scale = 0.0;
    for j in 0..cols.len() {
        for i in 0..j {
            let c: Complex64 = (0..4).map(|k| cols[i][k].conj() * cols[j][k]).sum();
            let prev = cols[i];
            for k in 0..4 {
                cols[j][k] -= c * prev[k];
            }
        }
        let n = col_norm(&cols[j]);
        if !(n > 0.0) || !n.is_finite() {
            return f64::NAN;
        }
        for k in 0..4 {
            cols[j][k] /= n;
        }
        log_scale += n.ln();
    }
    log_scale
}

fn system<'a>(problem: &'a ProblemSpec, energy: Complex64, h: f64, coupled: bool) -> Result<System<'a>> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    Ok(System {
        problem,
        contour: DeformedContour::new(problem.contour),
        energy,
        h,
        coupled,
    })
}

fn left_start(problem: &ProblemSpec) -> Result<f64> {
    Ok(real_turning_point(&problem.v1, problem.window.e0, -1.0, "a")? - LEFT_MARGIN)
}

/// Determinant of the two left-decaying and two right-decaying solutions,
/// in the state variables at `x = 0`, with its log-scale.
pub fn wronskian_detail(problem: &ProblemSpec, energy: Complex64, h: f64) -> Result<WronskianValue> {
    let sys = system(problem, energy, h, true)?;
    let x_left = left_start(problem)?;
    let x_right = problem.x_max;
    let mut left = [sys.decaying(x_left, 0, true), sys.decaying(x_left, 1, true)];
    let mut right = [sys.decaying(x_right, 0, false), sys.decaying(x_right, 1, false)];
    let (sl, sr) = rayon::join(|| sys.march(x_left, 0.0, &mut left), || sys.march(x_right, 0.0, &mut right));
    let m = Matrix4::from_fn(|r, c| match c {
        0 | 1 => left[c][r],
        _ => right[c - 2][r],
    });
    let value = m.determinant();
    if !value.is_finite() {
        return Err(Error::Domain(format!("non-finite Wronskian at E = {energy}")));
    }
    Ok(WronskianValue {
        value,
        log_scale: sl? + sr?,
    })
}

/// The renormalized Wronskian; its zeros are the resonances.
pub fn wronskian(problem: &ProblemSpec, energy: Complex64, h: f64) -> Result<Complex64> {
    Ok(wronskian_detail(problem, energy, h)?.value)
}

/// Scalar Wronskians `u p' - u' p` (state variables) of each channel with
/// the coupling switched off.
pub fn channel_wronskians(problem: &ProblemSpec, energy: Complex64, h: f64) -> Result<[WronskianValue; 2]> {
    let sys = system(problem, energy, h, false)?;
    let x_left = left_start(problem)?;
    let mut out = [WronskianValue {
        value: ZERO,
        log_scale: 0.0,
    }; 2];
    for (ch, slot) in out.iter_mut().enumerate() {
        let mut l = [sys.decaying(x_left, ch, true)];
        let mut r = [sys.decaying(problem.x_max, ch, false)];
        let sl = sys.march(x_left, 0.0, &mut l)?;
        let sr = sys.march(problem.x_max, 0.0, &mut r)?;
        let (i, j) = (2 * ch, 2 * ch + 1);
        let w = Matrix2::new(l[0][i], r[0][i], l[0][j], r[0][j]).determinant();
        *slot = WronskianValue {
            value: w,
            log_scale: sl + sr,
        };
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Required decrease of `|W|` from the seed.
    pub min_decrease: f64,
    /// Final step size.
    pub step_tolerance: f64,
    /// Roots closer than this are duplicates.
    pub merge_distance: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 60,
            min_decrease: 1e6,
            step_tolerance: 1e-11,
            merge_distance: 1e-9,
        }
    }
}

struct Root {
    energy: Complex64,
    decrease: f64,
    last_step: f64,
}

/// Muller's method on `W` from three points around the seed.
fn muller(problem: &ProblemSpec, seed: Complex64, h: f64, opts: &RootOptions) -> Result<Root> {
    let f = |e: Complex64| wronskian(problem, e, h);
    let d = Complex64::new(1e-2 * h * h, 0.0);
    let mut x = [seed - d, seed + d, seed];
    let mut y = [f(x[0])?, f(x[1])?, f(x[2])?];
    let w_seed = y[2].norm();
    let mut last_step = f64::INFINITY;
    let mut best = (x[2], y[2].norm());
    for _ in 0..opts.max_iterations {
        let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
        let (d1, d2) = ((y[1] - y[0]) / h1, (y[2] - y[1]) / h2);
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * y[2]).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
        let step = if den.norm() > 0.0 {
            -2.0 * y[2] / den
        } else {
            // Degenerate parabola: fall back to a secant step.
            -y[2] / d2
        };
        if !step.is_finite() {
            break;
        }
        let next = x[2] + step;
        let value = f(next)?;
        last_step = step.norm();
        x = [x[1], x[2], next];
        y = [y[1], y[2], value];
        if value.norm() < best.1 {
            best = (next, value.norm());
        }
        if last_step < opts.step_tolerance || value.norm() == 0.0 {
            break;
        }
    }
    Ok(Root {
        energy: best.0,
        decrease: if best.1 > 0.0 { w_seed / best.1 } else { f64::INFINITY },
        last_step,
    })
}

/// Roots of the Wronskian started from each seed, deduplicated. A seed whose
/// iteration diverges, fails to reduce `|W|` enough, or leaves the window is
/// reported with `converged = false`.
pub fn wronskian_roots(problem: &ProblemSpec, h: f64, seeds: &[Complex64], opts: &RootOptions) -> Result<Vec<OracleResonance>> {
    build_contour(problem)?;
    let found: Vec<OracleResonance> = seeds
        .par_iter()
        .map(|&seed| {
            let outcome = muller(problem, seed, h, opts);
            let (energy, residual, converged) = match outcome {
                Ok(r) => {
                    let ok = r.decrease >= opts.min_decrease
                        && r.last_step < opts.step_tolerance
                        && problem.window.contains(r.energy, h);
                    (r.energy, 1.0 / r.decrease, ok)
                }
                Err(_) => (seed, f64::NAN, false),
            };
            OracleResonance {
                energy,
                residual,
                method: Method::Wronskian,
                theta_used: problem.contour.theta,
                grid: None,
                converged,
                seed: Some(seed),
            }
        })
        .collect();
    let mut out: Vec<OracleResonance> = Vec::with_capacity(found.len());
    for r in found {
        let duplicate = r.converged
            && out
                .iter()
                .any(|o| o.converged && (o.energy - r.energy).norm() < opts.merge_distance);
        if !duplicate {
            out.push(r);
        }
    }
    Ok(out)
}
