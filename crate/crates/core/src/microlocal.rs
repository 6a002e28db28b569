//! Leading-order microlocal constants at the crossing: the exponents `mu`,
//! transfer matrices across the crossing, Maslov factors, the outgoing
//! coefficient and the width it produces through the Green formula.

use crate::actions::{action_set, action_set_real};
use crate::error::{Error, Result};
use crate::model::{crossing_slopes, Channel, ProblemSpec};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative disagreement between the composed and closed outgoing
/// coefficients that is reported as an internal error.
pub const CONSISTENCY_LIMIT: f64 = 1e-8;

/// Everything the leading-order formulas need at one real energy. Built from
/// a problem or directly from numbers for synthetic checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingData {
    pub energy: f64,
    pub r0: f64,
    pub r1: f64,
    pub gamma: f64,
    pub a: f64,
    pub da_de: f64,
    pub s1l: f64,
    pub s1r: f64,
    pub s2l: f64,
}

impl CrossingData {
    pub fn from_problem(problem: &ProblemSpec, energy: f64) -> Result<Self> {
        let s = action_set_real(problem, energy)?;
        let (r0, r1) = problem.coupling.at_crossing();
        Ok(Self {
            energy,
            r0,
            r1,
            gamma: crossing_slopes(problem)?.gamma,
            a: s.a.re,
            da_de: s.da_de.re,
            s1l: s.s1l.re,
            s1r: s.s1r.re,
            s2l: s.s2l.re,
        })
    }

    pub fn b(&self) -> f64 {
        self.s2l + self.s1r
    }

    fn check(&self) -> Result<()> {
        if !(self.energy > 0.0) {
            return Err(Error::Domain(format!("E = {} must be positive", self.energy)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::AssumptionViolated(format!("gamma = {} must be positive", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuConstants {
    pub mu: f64,
    pub mu_hat: f64,
}

pub fn mu_from(d: &CrossingData) -> Result<MuConstants> {
    d.check()?;
    let mu = -(d.r0 * d.r0 + d.r1 * d.r1 * d.energy) / (2.0 * d.gamma * d.energy.sqrt());
    Ok(MuConstants { mu, mu_hat: -mu })
}

pub fn mu_constants(problem: &ProblemSpec, energy: f64) -> Result<MuConstants> {
    if !(energy > 0.0) {
        return Err(Error::Domain(format!("E = {energy} must be positive")));
    }
    let gamma = crossing_slopes(problem)?.gamma;
    let (r0, r1) = problem.coupling.at_crossing();
    let mu = -(r0 * r0 + r1 * r1 * energy) / (2.0 * gamma * energy.sqrt());
    Ok(MuConstants { mu, mu_hat: -mu })
}

/// `(tau_+, tau_-) = sqrt(pi / gamma) (r0 E^(-1/4) +- i r1 E^(1/4))`.
pub fn tau_from(d: &CrossingData) -> Result<(Complex64, Complex64)> {
    d.check()?;
    let q = d.energy.powf(0.25);
    let scale = (PI / d.gamma).sqrt();
    let re = d.r0 / q;
    let im = d.r1 * q;
    Ok((Complex64::new(re, im) * scale, Complex64::new(re, -im) * scale))
}

pub fn tau_pm(problem: &ProblemSpec, energy: f64) -> Result<(Complex64, Complex64)> {
    let gamma = crossing_slopes(problem)?.gamma;
    let (r0, r1) = problem.coupling.at_crossing();
    tau_from(&CrossingData {
        energy,
        r0,
        r1,
        gamma,
        a: f64::NAN,
        da_de: f64::NAN,
        s1l: f64::NAN,
        s1r: f64::NAN,
        s2l: f64::NAN,
    })
}

/// `h^(i mu h)`, of unit modulus for real `mu`.
pub fn h_power(mu: f64, h: f64) -> Complex64 {
    (I * (mu * h * h.ln())).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrices {
    pub minus: Matrix2<Complex64>,
    pub plus: Matrix2<Complex64>,
}

pub fn transfer_from(d: &CrossingData, h: f64) -> Result<TransferMatrices> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let mu = mu_from(d)?.mu;
    let (tp, tm) = tau_from(d)?;
    let one = Complex64::new(1.0, 0.0);
    let e_pos = Complex64::from_polar(1.0, FRAC_PI_4);
    let e_neg = e_pos.conj();
    let root = h.sqrt();
    let up = tm * e_pos * root * h_power(mu, h);
    let down = tp * e_neg * root * h_power(mu, h).conj();
    Ok(TransferMatrices {
        minus: Matrix2::new(one, up, down, one),
        plus: Matrix2::new(one, -down, -up, one),
    })
}

pub fn transfer_matrices(problem: &ProblemSpec, energy: f64, h: f64) -> Result<TransferMatrices> {
    transfer_from(&CrossingData::from_problem(problem, energy)?, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaslovFactors {
    pub sigma_1l: Complex64,
    pub sigma_1r: Complex64,
    pub sigma_2l: Complex64,
}

pub fn maslov_from(d: &CrossingData, h: f64) -> MaslovFactors {
    MaslovFactors {
        sigma_1l: -I * (I * (2.0 * d.s1l / h)).exp(),
        sigma_1r: I * (-I * (2.0 * d.s1r / h)).exp(),
        sigma_2l: -I * (I * (2.0 * d.s2l / h)).exp(),
    }
}

pub fn maslov_factors(problem: &ProblemSpec, energy: f64, h: f64) -> Result<MaslovFactors> {
    Ok(maslov_from(&CrossingData::from_problem(problem, energy)?, h))
}

/// The outgoing coefficient on the right branch of channel 2, three ways.
///
/// `composed` multiplies Maslov factors and transfer entries. `closed` is the
/// same quantity in closed form, with the bracket phase
/// `B/h + pi/4 - mu h log h`. `display` drops the `mu h log h` shift, which
/// is of the size of the neglected corrections; it is the value returned by
/// [`outgoing_coefficient`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutgoingCoefficient {
    pub composed: Complex64,
    pub closed: Complex64,
    pub display: Complex64,
}

fn bracket(d: &CrossingData, phase: f64) -> f64 {
    let q = d.energy.powf(0.25);
    d.r0 / q * phase.sin() + d.r1 * q * phase.cos()
}

pub fn outgoing_from(d: &CrossingData, h: f64) -> Result<OutgoingCoefficient> {
    let t = transfer_from(d, h)?;
    let s = maslov_from(d, h);
    let first = s.sigma_1r * t.plus[(1, 0)] * t.minus[(0, 0)];
    let second = s.sigma_2l * t.plus[(1, 1)] * t.minus[(1, 0)];
    let composed = first + second;

    let mu = mu_from(d)?.mu;
    let prefactor = -2.0 * I * (PI * h / d.gamma).sqrt() * (I * ((d.s2l - d.s1r) / h)).exp();
    let phi = d.b() / h + FRAC_PI_4;
    let closed = prefactor * bracket(d, phi - mu * h * h.ln());
    let display = prefactor * bracket(d, phi);

    // Measured against the size of the two terms, which may cancel.
    let scale = first.norm() + second.norm();
    if (composed - closed).norm() > CONSISTENCY_LIMIT * scale {
        return Err(Error::InternalConsistency(format!(
            "composed outgoing coefficient {composed} differs from closed form {closed}"
        )));
    }
    Ok(OutgoingCoefficient {
        composed,
        closed,
        display,
    })
}

pub fn outgoing_coefficient(problem: &ProblemSpec, energy: f64, h: f64) -> Result<OutgoingCoefficient> {
    outgoing_from(&CrossingData::from_problem(problem, energy)?, h)
}

/// `exp(2 i A(E) / h) + 1`.
pub fn monodromy_residual(problem: &ProblemSpec, energy: Complex64, h: f64) -> Result<Complex64> {
    let a = action_set(problem, energy)?.a;
    Ok((I * a * 2.0 / h).exp() + 1.0)
}

/// `|t|^2 h / (4 A'(E))`: the Green-formula width with the leading norm of
/// the resonant state.
pub fn width_from_green_parts(d: &CrossingData, h: f64) -> Result<f64> {
    let t = outgoing_from(d, h)?.display;
    Ok(t.norm_sqr() * h / (4.0 * d.da_de))
}

pub fn width_from_green(problem: &ProblemSpec, energy: f64, h: f64) -> Result<f64> {
    width_from_green_parts(&CrossingData::from_problem(problem, energy)?, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub channel: Channel,
    pub side: Side,
    pub sign: Sign,
}

/// Leading WKB amplitudes `(channel 1, channel 2)` on a branch, without the
/// factor `h` carried by the cross-channel component.
pub fn wkb_leading(problem: &ProblemSpec, branch: Branch, x: f64, energy: f64) -> Result<[Complex64; 2]> {
    if x == 0.0 {
        return Err(Error::Domain("WKB symbol is singular at the crossing x = 0".into()));
    }
    match (branch.side, x > 0.0) {
        (Side::Left, true) | (Side::Right, false) => {
            return Err(Error::Domain(format!("x = {x} is not on the {:?} side", branch.side)));
        }
        _ => {}
    }
    let own = problem.v(branch.channel).at_real(x).0;
    let other = problem.v(branch.channel.other()).at_real(x).0;
    let kinetic = energy - own;
    if !(kinetic > 0.0) {
        return Err(Error::Domain(format!(
            "x = {x} is outside the allowed region of channel {:?}",
            branch.channel
        )));
    }
    let r0 = problem.coupling.r0.at_real(x).0;
    let r1 = problem.coupling.r1.at_real(x).0;
    let root = kinetic.sqrt();
    let quarter = kinetic.powf(0.25);
    // Sign of the i r1 term: + for (1, -) and (2, +).
    let s = match (branch.channel, branch.sign) {
        (Channel::One, Sign::Minus) | (Channel::Two, Sign::Plus) => 1.0,
        _ => -1.0,
    };
    let main = Complex64::new(1.0 / quarter, 0.0);
    let cross = Complex64::new(r0, s * r1 * root) / ((own - other) * quarter);
    Ok(match branch.channel {
        Channel::One => [main, cross],
        Channel::Two => [cross, main],
    })
}
