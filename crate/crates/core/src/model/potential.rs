//! Closed-form analytic profiles used for the potentials and the coupling
//! coefficients.
//!
//! Every family reduces internally to either a polynomial in
//! `tanh((x - center) / scale)` or a polynomial in `x`, so values and the
//! first two derivatives are exact at complex arguments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}

/// Value and first two derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `asymptote - depth * sech^2((x - center) / scale)`
    ShiftedSechWell {
        asymptote: f64,
        depth: f64,
        center: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `offset + amplitude * tanh((x - center) / scale)`
    TanhStep {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `sum_n coefficients[n] * tanh((x - center) / scale)^n`
    PolynomialInTanh {
        coefficients: Vec<f64>,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `sum_n coefficients[n] * x^n`
    Polynomial { coefficients: Vec<f64> },
    Constant { value: f64 },
}

enum Form<'a> {
    Tanh {
        coefficients: std::borrow::Cow<'a, [f64]>,
        center: f64,
        scale: f64,
    },
    Power(&'a [f64]),
}

/// Horner evaluation of p, p', p''.
fn horner(coefficients: &[f64], t: Complex64) -> (Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut dp, mut ddp) = (zero, zero, zero);
    for &c in coefficients.iter().rev() {
        ddp = ddp * t + dp * 2.0;
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp, ddp)
}

fn tanh_guarded(u: Complex64) -> Complex64 {
    // tanh(u) = sign(Re u) to double precision once |Re u| > 20; the
    // library formula overflows to NaN far out.
    if u.re > 20.0 {
        Complex64::new(1.0, 0.0)
    } else if u.re < -20.0 {
        Complex64::new(-1.0, 0.0)
    } else {
        u.tanh()
    }
}

impl PotentialSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    fn form(&self) -> Form<'_> {
        use std::borrow::Cow;
        match self {
            Self::ShiftedSechWell {
                asymptote,
                depth,
                center,
                scale,
            } => Form::Tanh {
                coefficients: Cow::Owned(vec![asymptote - depth, 0.0, *depth]),
                center: *center,
                scale: *scale,
            },
            Self::TanhStep {
                offset,
                amplitude,
                center,
                scale,
            } => Form::Tanh {
                coefficients: Cow::Owned(vec![*offset, *amplitude]),
                center: *center,
                scale: *scale,
            },
            Self::PolynomialInTanh {
                coefficients,
                center,
                scale,
            } => Form::Tanh {
                coefficients: Cow::Borrowed(coefficients),
                center: *center,
                scale: *scale,
            },
            Self::Polynomial { coefficients } => Form::Power(coefficients),
            Self::Constant { value } => Form::Power(std::slice::from_ref(value)),
        }
    }

    /// Value and derivatives at complex `z`.
    pub fn jet(&self, z: Complex64) -> Jet {
        match self.form() {
            Form::Tanh {
                coefficients,
                center,
                scale,
            } => {
                let t = tanh_guarded((z - center) / scale);
                let s = Complex64::new(1.0, 0.0) - t * t;
                let (p, dp, ddp) = horner(&coefficients, t);
                Jet {
                    value: p,
                    d1: dp * s / scale,
                    d2: (ddp * s * s - t * s * dp * 2.0) / (scale * scale),
                }
            }
            Form::Power(coefficients) => {
                let (p, dp, ddp) = horner(coefficients, z);
                Jet {
                    value: p,
                    d1: dp,
                    d2: ddp,
                }
            }
        }
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.jet(z).value
    }

    /// Real evaluation on the real line: (value, first, second derivative).
    pub fn at_real(&self, x: f64) -> (f64, f64, f64) {
        let j = self.jet(Complex64::new(x, 0.0));
        (j.value.re, j.d1.re, j.d2.re)
    }

    /// Limit as x -> +inf (`sign > 0`) or x -> -inf. May be infinite.
    pub fn limit(&self, sign: f64) -> f64 {
        match self.form() {
            Form::Tanh {
                coefficients,
                scale,
                ..
            } => {
                let t = Complex64::new(sign * scale.signum(), 0.0);
                horner(&coefficients, t).0.re
            }
            Form::Power(coefficients) => {
                let degree = coefficients.iter().rposition(|c| *c != 0.0);
                match degree {
                    None => 0.0,
                    Some(0) => coefficients[0],
                    Some(d) => {
                        let lead = coefficients[d];
                        let s = if d % 2 == 0 { lead.signum() } else { lead.signum() * sign };
                        s * f64::INFINITY
                    }
                }
            }
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::ShiftedSechWell { .. } => "shifted-sech-well",
            Self::TanhStep { .. } => "tanh-step",
            Self::PolynomialInTanh { .. } => "polynomial-in-tanh",
            Self::Polynomial { .. } => "polynomial",
            Self::Constant { .. } => "constant",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_well() -> PotentialSpec {
        PotentialSpec::ShiftedSechWell {
            asymptote: 2.0,
            depth: 1.0 + 1f64.cosh(),
            center: -0.5,
            scale: 1.0,
        }
    }

    fn family() -> Vec<PotentialSpec> {
        vec![
            reference_well(),
            PotentialSpec::TanhStep {
                offset: 0.0,
                amplitude: -1.5,
                center: 0.0,
                scale: 1.0,
            },
            PotentialSpec::PolynomialInTanh {
                coefficients: vec![0.3, -1.0, 0.5, 0.25],
                center: 0.2,
                scale: 0.7,
            },
            PotentialSpec::Polynomial {
                coefficients: vec![0.0, 0.0, 1.0],
            },
        ]
    }

    #[test]
    fn reference_well_crosses_zero_at_origin() {
        let (v, dv, _) = reference_well().at_real(0.0);
        assert!(v.abs() < 1e-14);
        assert!((dv - 4.0 * 0.5f64.tanh()).abs() < 1e-14);
        assert_eq!(reference_well().limit(1.0), 2.0);
        assert_eq!(reference_well().limit(-1.0), 2.0);
    }

    #[test]
    fn polynomial_limits() {
        let p = PotentialSpec::Polynomial {
            coefficients: vec![0.0, 0.0, 1.0],
        };
        assert_eq!(p.limit(-1.0), f64::INFINITY);
        let q = PotentialSpec::Polynomial {
            coefficients: vec![1.0, -2.0],
        };
        assert_eq!(q.limit(1.0), f64::NEG_INFINITY);
        assert_eq!(q.limit(-1.0), f64::INFINITY);
    }

    #[test]
    fn far_field_is_finite() {
        for p in family() {
            let j = p.jet(Complex64::new(300.0, 0.5));
            assert!(j.value.is_finite() && j.d1.is_finite() && j.d2.is_finite());
        }
    }

    #[test]
    fn parses_kebab_kinds() {
        let p: PotentialSpec =
            serde_json::from_str(r#"{"kind":"tanh-step","amplitude":-1.5}"#).unwrap();
        assert!((p.at_real(1.0).0 + 1.5 * 1f64.tanh()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn real_inputs_give_exactly_real_values(x in -8.0f64..8.0) {
            for p in family() {
                let j = p.jet(Complex64::new(x, 0.0));
                prop_assert_eq!(j.value.im, 0.0);
                prop_assert_eq!(j.d1.im, 0.0);
                prop_assert_eq!(j.d2.im, 0.0);
            }
        }

        #[test]
        fn derivatives_match_central_differences(x in -4.0f64..4.0, y in -0.2f64..0.2) {
            let step = 1e-5;
            let z = Complex64::new(x, y);
            for p in family() {
                let j = p.jet(z);
                let fd1 = (p.value(z + step) - p.value(z - step)) / (2.0 * step);
                let fd2 = (p.jet(z + step).d1 - p.jet(z - step).d1) / (2.0 * step);
                let scale1 = j.d1.norm().max(1.0);
                let scale2 = j.d2.norm().max(1.0);
                prop_assert!((fd1 - j.d1).norm() / scale1 < 1e-6);
                prop_assert!((fd2 - j.d2).norm() / scale2 < 1e-6);
            }
        }
    }
}
