//! Action integrals of `sqrt(E - V)` between turning points, at real and
//! slightly complex energies.
//!
//! All square roots are principal (cut along the negative reals). Paths are
//! straight segments in the complex x-plane; for `|Im E| = O(h)` they stay in
//! the region where the closed-form potentials are analytic.

mod quadrature;

pub use quadrature::{segment_integral, Node, SingularEnds, REFINEMENT_TOLERANCE};

use crate::error::{Error, Result};
use crate::model::{turning_points, Channel, PotentialSpec, ProblemSpec, TurningPoints};
use num_complex::Complex64;
use quadrature::principal_sqrt;

/// Below this distance from a turning point, `V(t) - V(end)` is formed by
/// Simpson's rule on `V'` instead of by subtraction.
const NEAR_END: f64 = 1e-3;

fn increment(v: &PotentialSpec, end: Complex64, d: Complex64) -> Complex64 {
    let d1 = |z: Complex64| v.jet(z).d1;
    d / 6.0 * (d1(end) + d1(end + d * 0.5) * 4.0 + d1(end + d))
}

/// `E - V(t)`, taking `V(end) = E` exactly near a flagged end so that the
/// residual of the turning-point solve does not move the branch point.
fn gap(v: &PotentialSpec, energy: Complex64, lo: Complex64, hi: Complex64, ends: SingularEnds, n: Node) -> Complex64 {
    if ends.lo && n.from_lo.norm() <= NEAR_END && n.from_lo.norm() <= n.from_hi.norm() {
        return -increment(v, lo, n.from_lo);
    }
    if ends.hi && n.from_hi.norm() <= NEAR_END && n.from_hi.norm() < n.from_lo.norm() {
        return -increment(v, hi, n.from_hi);
    }
    energy - v.value(n.t)
}

/// `int_lo^hi sqrt(E - V(t)) dt` on the principal branch.
pub fn sqrt_integral(
    v: &PotentialSpec,
    lo: Complex64,
    hi: Complex64,
    energy: Complex64,
    ends: SingularEnds,
) -> Result<Complex64> {
    segment_integral(lo, hi, ends, |n| principal_sqrt(gap(v, energy, lo, hi, ends, n), n.t))
}

/// `int_lo^hi (E - V(t))^(-1/2) dt` on the principal branch.
pub fn inv_sqrt_integral(
    v: &PotentialSpec,
    lo: Complex64,
    hi: Complex64,
    energy: Complex64,
    ends: SingularEnds,
) -> Result<Complex64> {
    segment_integral(lo, hi, ends, |n| Ok(principal_sqrt(gap(v, energy, lo, hi, ends, n), n.t)?.inv()))
}

/// Actions at one energy.
///
/// `a` runs over the V1 well from `a(E)` to `c(E)`; `s1l`, `s1r` split it at
/// the crossing; `s2l` runs from `b(E)` to 0 on V2; `b = s2l + s1r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionSet {
    pub energy: Complex64,
    pub turning: TurningPoints,
    pub a: Complex64,
    pub b: Complex64,
    pub s1l: Complex64,
    pub s1r: Complex64,
    pub s2l: Complex64,
    pub da_de: Complex64,
    pub db_de: Complex64,
}

pub fn action_set(problem: &ProblemSpec, energy: Complex64) -> Result<ActionSet> {
    let tp = turning_points(problem, energy)?;
    let zero = Complex64::new(0.0, 0.0);
    let (v1, v2) = (&problem.v1, &problem.v2);
    let a = sqrt_integral(v1, tp.a, tp.c, energy, SingularEnds::BOTH)?;
    let s1l = sqrt_integral(v1, tp.a, zero, energy, SingularEnds::LO)?;
    let s1r = sqrt_integral(v1, zero, tp.c, energy, SingularEnds::HI)?;
    let s2l = sqrt_integral(v2, tp.b, zero, energy, SingularEnds::LO)?;
    let da_de = 0.5 * inv_sqrt_integral(v1, tp.a, tp.c, energy, SingularEnds::BOTH)?;
    let db_de = 0.5
        * (inv_sqrt_integral(v2, tp.b, zero, energy, SingularEnds::LO)?
            + inv_sqrt_integral(v1, zero, tp.c, energy, SingularEnds::HI)?);
    Ok(ActionSet {
        energy,
        turning: tp,
        a,
        b: s2l + s1r,
        s1l,
        s1r,
        s2l,
        da_de,
        db_de,
    })
}

pub fn action_set_real(problem: &ProblemSpec, energy: f64) -> Result<ActionSet> {
    action_set(problem, Complex64::new(energy, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseBase {
    /// `nu_1` from `a(E)`, `nu_2` from `b(E)`.
    TurningPoint,
    /// `nu_j^0` from the crossing point.
    Origin,
}

/// `x -> int_base^x sqrt(E - V_j(t)) dt` for one channel and energy.
#[derive(Clone, Debug)]
pub struct PhaseFunction<'a> {
    problem: &'a ProblemSpec,
    pub channel: Channel,
    pub base: PhaseBase,
    pub energy: Complex64,
    turning: TurningPoints,
}

impl<'a> PhaseFunction<'a> {
    pub fn new(problem: &'a ProblemSpec, channel: Channel, base: PhaseBase, energy: Complex64) -> Result<Self> {
        Ok(Self {
            problem,
            channel,
            base,
            energy,
            turning: turning_points(problem, energy)?,
        })
    }

    pub fn base_point(&self) -> Complex64 {
        match (self.base, self.channel) {
            (PhaseBase::Origin, _) => Complex64::new(0.0, 0.0),
            (PhaseBase::TurningPoint, Channel::One) => self.turning.a,
            (PhaseBase::TurningPoint, Channel::Two) => self.turning.b,
        }
    }

    /// Allowed region on the real line: `[a, c]` for channel 1,
    /// `[b, inf)` for channel 2.
    fn allowed(&self) -> (Complex64, Option<Complex64>) {
        match self.channel {
            Channel::One => (self.turning.a, Some(self.turning.c)),
            Channel::Two => (self.turning.b, None),
        }
    }

    pub fn at(&self, x: f64) -> Result<Complex64> {
        let (left, right) = self.allowed();
        let near = |p: Complex64| (x - p.re).abs() <= 1e-12 * x.abs().max(1.0);
        let snapped = if near(left) {
            Some(left)
        } else {
            right.filter(|r| near(*r))
        };
        if snapped.is_none() && (x < left.re || right.is_some_and(|r| x > r.re)) {
            return Err(Error::Domain(format!(
                "x = {x} outside the classically allowed region of channel {:?}",
                self.channel
            )));
        }
        let hi = snapped.unwrap_or(Complex64::new(x, 0.0));
        let lo = self.base_point();
        let ends = SingularEnds {
            lo: self.base == PhaseBase::TurningPoint,
            hi: snapped.is_some(),
        };
        sqrt_integral(self.problem.v(self.channel), lo, hi, self.energy, ends)
    }
}

pub fn phase(problem: &ProblemSpec, channel: Channel, base: PhaseBase, x: f64, energy: Complex64) -> Result<Complex64> {
    PhaseFunction::new(problem, channel, base, energy)?.at(x)
}
