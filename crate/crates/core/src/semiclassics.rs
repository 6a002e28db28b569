//! Bohr-Sommerfeld grid, width coefficient and resonance predictions.

use crate::actions::{action_set_real, ActionSet};
use crate::error::{Error, Result};
use crate::model::{crossing_slopes, ProblemSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Tolerance on `A(e_k) - (k + 1/2) pi h`.
pub const QUANTIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonancePrediction {
    pub k: i64,
    pub e_k: f64,
    pub width_coeff: f64,
    pub predicted: Complex64,
    pub h: f64,
}

/// Root of a strictly increasing `f` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`:
/// Newton steps kept inside a shrinking bracket, bisection otherwise.
fn monotone_root<F>(f: F, mut lo: f64, mut hi: f64, tolerance: f64, what: &str) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x)?;
        if fx.abs() < tolerance {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let (fx, _) = f(x)?;
            if fx.abs() < tolerance {
                return Ok(x);
            }
            break;
        }
    }
    Err(Error::NewtonNonConvergence {
        what: what.into(),
        iterations: 200,
        last: Complex64::new(x, 0.0),
    })
}

/// All `(k, e_k)` with `A(e_k) = (k + 1/2) pi h` inside the real window,
/// in increasing order.
pub fn bohr_grid(problem: &ProblemSpec, h: f64) -> Result<Vec<(i64, f64)>> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let (lo, hi) = problem.window.real_range();
    let a_lo = action_set_real(problem, lo)?.a.re;
    let a_hi = action_set_real(problem, hi)?.a.re;
    let k_min = (a_lo / (PI * h) - 0.5).ceil() as i64;
    let k_max = (a_hi / (PI * h) - 0.5).floor() as i64;
    if k_max < k_min {
        return Ok(Vec::new());
    }
    (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let target = (k as f64 + 0.5) * PI * h;
            let f = |e: f64| {
                let s = action_set_real(problem, e)?;
                Ok((s.a.re - target, s.da_de.re))
            };
            let e = monotone_root(f, lo, hi, QUANTIZATION_TOLERANCE, &format!("e_{k}"))?;
            Ok((k, e))
        })
        .collect()
}

/// The width coefficient from its ingredients:
/// `pi / (gamma A') |r0 E^(-1/4) sin(B/h + pi/4) + r1 E^(1/4) cos(B/h + pi/4)|^2`.
pub fn width_coefficient_from_parts(r0: f64, r1: f64, gamma: f64, da_de: f64, b: f64, energy: f64, h: f64) -> f64 {
    let phi = b / h + FRAC_PI_4;
    let q = energy.powf(0.25);
    let amp = r0 / q * phi.sin() + r1 * q * phi.cos();
    PI / (gamma * da_de) * amp * amp
}

fn width_from_set(problem: &ProblemSpec, gamma: f64, s: &ActionSet, h: f64) -> f64 {
    let (r0, r1) = problem.coupling.at_crossing();
    width_coefficient_from_parts(r0, r1, gamma, s.da_de.re, s.b.re, s.energy.re, h)
}

/// `C(E, h)`; depends on `h` through `B(E) / h`.
pub fn width_coefficient(problem: &ProblemSpec, energy: f64, h: f64) -> Result<f64> {
    let gamma = crossing_slopes(problem)?.gamma;
    let s = action_set_real(problem, energy)?;
    Ok(width_from_set(problem, gamma, &s, h))
}

pub fn predict(problem: &ProblemSpec, h: f64) -> Result<Vec<ResonancePrediction>> {
    let gamma = crossing_slopes(problem)?.gamma;
    let grid = bohr_grid(problem, h)?;
    grid.into_par_iter()
        .map(|(k, e_k)| {
            let s = action_set_real(problem, e_k)?;
            let width_coeff = width_from_set(problem, gamma, &s, h);
            Ok(ResonancePrediction {
                k,
                e_k,
                width_coeff,
                predicted: Complex64::new(e_k, -width_coeff * h * h),
                h,
            })
        })
        .collect()
}

/// Phase offset `psi(E)` and its derivative: zeros of the width coefficient
/// are `B/h + pi/4 - psi(E) = m pi`.
fn zero_phase(r0: f64, r1: f64, energy: f64) -> (f64, f64) {
    if r0 == 0.0 {
        return (FRAC_PI_2, 0.0);
    }
    let root = energy.sqrt();
    let psi = (-r1 * root / r0).atan();
    let dpsi = -r0 * r1 / (2.0 * root * (r0 * r0 + r1 * r1 * energy));
    (psi, dpsi)
}

/// Energies in the real window where `C(E, h)` vanishes.
pub fn width_zero_loci(problem: &ProblemSpec, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let (r0, r1) = problem.coupling.at_crossing();
    if r0 == 0.0 && r1 == 0.0 {
        return Err(Error::AssumptionViolated(
            "width coefficient vanishes identically for r0(0) = r1(0) = 0".into(),
        ));
    }
    let g = |e: f64| -> Result<(f64, f64)> {
        let s = action_set_real(problem, e)?;
        let (psi, dpsi) = zero_phase(r0, r1, e);
        Ok((s.b.re / h + FRAC_PI_4 - psi, s.db_de.re / h - dpsi))
    };
    let (lo, hi) = problem.window.real_range();
    let g_lo = g(lo)?.0;
    let g_hi = g(hi)?.0;
    let m_min = (g_lo / PI).ceil() as i64;
    let m_max = (g_hi / PI).floor() as i64;
    if m_max < m_min {
        return Ok(Vec::new());
    }
    (m_min..=m_max)
        .into_par_iter()
        .map(|m| {
            let target = m as f64 * PI;
            let f = |e: f64| g(e).map(|(v, d)| (v - target, d));
            monotone_root(f, lo, hi, 1e-12, &format!("width zero m = {m}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::harmonic_problem;
    use crate::model::CouplingSpec;
    use proptest::prelude::*;

    #[test]
    fn harmonic_grid_is_odd_multiples_of_h() {
        let p = harmonic_problem();
        let h = 0.05;
        let grid = bohr_grid(&p, h).unwrap();
        assert!(!grid.is_empty());
        for (k, e) in grid {
            assert!((e - (2 * k + 1) as f64 * h).abs() < 1e-11, "k = {k}, e = {e}");
        }
    }

    #[test]
    fn reference_grid_spacing_and_quantization() {
        let p = ProblemSpec::reference();
        let h = 0.05;
        let grid = bohr_grid(&p, h).unwrap();
        assert!(grid.len() >= 2);
        for w in grid.windows(2) {
            assert_eq!(w[1].0, w[0].0 + 1);
            assert!(w[1].1 > w[0].1);
            let mid = action_set_real(&p, 0.5 * (w[0].1 + w[1].1)).unwrap();
            let expected = PI * h / mid.da_de.re;
            assert!(((w[1].1 - w[0].1) - expected).abs() / expected < 0.05);
        }
        for (k, e) in grid {
            let a = action_set_real(&p, e).unwrap().a.re;
            assert!((a - (k as f64 + 0.5) * PI * h).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_h_gives_empty_grid() {
        let p = ProblemSpec::reference();
        // The window spans A in about [1.71, 2.03]; no half-integer multiple
        // of pi h lands there for h = 0.8.
        assert!(bohr_grid(&p, 0.8).unwrap().is_empty());
        assert!(bohr_grid(&p, -1.0).is_err());
    }

    #[test]
    fn width_formula_by_hand() {
        // phi = pi/2: sin = 1, cos = 0.
        let h = 0.1;
        let b = (FRAC_PI_2 - FRAC_PI_4) * h;
        let c = width_coefficient_from_parts(1.0, 0.0, 2.0, FRAC_PI_2, b, 1.0, h);
        assert!((c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn physical_case_formula() {
        let (gamma, da, b, e, h, r1) = (3.3, 1.4, 0.83, 1.05, 0.03, 0.7);
        let c = width_coefficient_from_parts(0.0, r1, gamma, da, b, e, h);
        let expected = PI / (gamma * da) * r1 * r1 * e.sqrt() * (b / h + FRAC_PI_4).cos().powi(2);
        assert!((c - expected).abs() < 1e-14);
    }

    #[test]
    fn width_vanishes_on_its_zero_loci() {
        let (gamma, da, e, h) = (3.0, 1.5, 1.0, 0.02);
        for m in [3, 17, 40] {
            let b = (m as f64 - 0.25) * PI * h;
            assert!(width_coefficient_from_parts(1.0, 0.0, gamma, da, b, e, h) < 1e-25);
            let b = (m as f64 + 0.25) * PI * h;
            assert!(width_coefficient_from_parts(0.0, 1.0, gamma, da, b, e, h) < 1e-25);
        }
    }

    #[test]
    fn predictions_sit_in_the_window() {
        let p = ProblemSpec::reference();
        let h = 0.05;
        let preds = predict(&p, h).unwrap();
        assert!(!preds.is_empty());
        for r in &preds {
            assert!(r.width_coeff >= 0.0);
            assert!(r.predicted.im <= 0.0 && r.predicted.im >= -p.window.c0 * h);
            assert_eq!(r.predicted.re, r.e_k);
        }
        let off = ProblemSpec::reference_with(CouplingSpec::decoupled());
        assert!(predict(&off, h).unwrap().iter().all(|r| r.width_coeff == 0.0));
    }

    fn zero_loci_case(r0: f64, r1: f64, shift: f64) {
        let p = ProblemSpec::reference_with(CouplingSpec::constant(r0, r1));
        let h = 0.02;
        let zeros = width_zero_loci(&p, h).unwrap();
        assert!(zeros.len() >= 3);
        let (lo, hi) = p.window.real_range();
        let max = (0..=400)
            .map(|i| width_coefficient(&p, lo + (hi - lo) * i as f64 / 400.0, h).unwrap())
            .fold(0.0, f64::max);
        for &e in &zeros {
            let b = action_set_real(&p, e).unwrap().b.re;
            if shift.is_finite() {
                let m = (b / (PI * h) - shift).round();
                assert!((b - (m + shift) * PI * h).abs() < 1e-10);
            }
            assert!(width_coefficient(&p, e, h).unwrap() <= 1e-12 * max);
        }
        assert!(zeros.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_loci_for_each_coupling_type() {
        zero_loci_case(1.0, 0.0, -0.25);
        zero_loci_case(0.0, 1.0, 0.25);
        zero_loci_case(0.6, -0.8, f64::NAN);
    }

    #[test]
    fn zero_loci_need_a_nonzero_coupling() {
        let p = ProblemSpec::reference_with(CouplingSpec::decoupled());
        assert!(width_zero_loci(&p, 0.02).is_err());
    }

    proptest! {
        #[test]
        fn width_is_nonnegative_and_periodic_in_b(
            r0 in -2.0f64..2.0, r1 in -2.0f64..2.0, b in 0.1f64..3.0,
            e in 0.5f64..1.5, h in 0.005f64..0.2,
        ) {
            let c = width_coefficient_from_parts(r0, r1, 3.0, 1.5, b, e, h);
            let shifted = width_coefficient_from_parts(r0, r1, 3.0, 1.5, b + 2.0 * PI * h, e, h);
            prop_assert!(c >= 0.0);
            prop_assert!((c - shifted).abs() <= 1e-12 * c.max(1.0));
        }
    }
}
