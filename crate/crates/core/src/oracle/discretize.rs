//! Finite-difference discretization of the coupled operator along the
//! deformed contour.
//!
//! Unknowns are interleaved, `(u1_0, u2_0, u1_1, u2_1, ...)`, so a central
//! stencil of half-width `p` gives a band matrix with `2p + 1` sub- and
//! super-diagonals. Dirichlet conditions hold at both box ends.

use super::banded::BandMatrix;
use super::contour::DeformedContour;
use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use num_complex::Complex64;
use serde::Serialize;

pub const MIN_NODES: usize = 512;
pub const DEFAULT_HALF_WIDTH: usize = 4;

/// Fornberg's weights for derivatives `0..=max_order` at 0 on the nodes.
pub fn fornberg_weights(nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central weights on `-p..=p` for the first and second derivative at unit
/// spacing.
pub fn central_weights(half_width: usize) -> (Vec<f64>, Vec<f64>) {
    let p = half_width as i64;
    let nodes: Vec<f64> = (-p..=p).map(|k| k as f64).collect();
    let w = fornberg_weights(&nodes, 2);
    (w[1].clone(), w[2].clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridMeta {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub half_width: usize,
    /// Set when `h / sqrt(E0) < 8 L / N`.
    pub under_resolved: bool,
}

#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    pub matrix: BandMatrix,
    pub grid: GridMeta,
    pub h: f64,
    pub theta: f64,
}

impl DiscretizedOperator {
    pub fn node(&self, i: usize) -> f64 {
        self.grid.x_min + self.grid.dx * (i + 1) as f64
    }
}

pub fn discretize(
    problem: &ProblemSpec,
    contour: &DeformedContour,
    n: usize,
    h: f64,
    half_width: usize,
) -> Result<DiscretizedOperator> {
    if n < MIN_NODES {
        return Err(Error::Domain(format!("N = {n} is below the minimum {MIN_NODES}")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    if half_width == 0 || 2 * half_width >= n {
        return Err(Error::Domain(format!("stencil half-width {half_width} unusable for N = {n}")));
    }
    let length = problem.x_max - problem.x_min;
    let dx = length / (n + 1) as f64;
    let (w1, w2) = central_weights(half_width);
    let p = half_width as i64;
    let band = 2 * half_width + 1;
    let mut m = BandMatrix::zeros(2 * n, band, band);
    let h2 = h * h;
    let r = &problem.coupling;

    let nodes: Vec<_> = (0..n)
        .map(|i| contour.at(problem.x_min + dx * (i + 1) as f64))
        .collect();
    let r1_at: Vec<Complex64> = nodes.iter().map(|c| r.r1.value(c.z)).collect();

    for (i, c) in nodes.iter().enumerate() {
        let inv = c.dz.inv();
        let inv2 = inv * inv;
        let drift = c.d2z * inv2 * inv;
        let r0 = r.r0.value(c.z);
        let row1 = 2 * i;
        let row2 = 2 * i + 1;
        m.add(row1, row1, problem.v1.value(c.z));
        m.add(row2, row2, problem.v2.value(c.z));
        m.add(row1, row2, r0 * h);
        m.add(row2, row1, r0 * h);
        for k in -p..=p {
            let j = i as i64 + k;
            if j < 0 || j >= n as i64 {
                continue;
            }
            let j = j as usize;
            let a1 = w1[(k + p) as usize] / dx;
            let a2 = w2[(k + p) as usize] / (dx * dx);
            // -h^2 d^2/dz^2 with d/dz = (1/F') d/dx.
            let kinetic = -(inv2 * a2 - drift * a1) * h2;
            m.add(row1, 2 * j, kinetic);
            m.add(row2, 2 * j + 1, kinetic);
            if a1 != 0.0 {
                // h W = h r0 + h^2 r1 d/dz, and h W* = h r0 - h^2 d/dz (r1 .).
                m.add(row1, 2 * j + 1, r1_at[i] * inv * a1 * h2);
                m.add(row2, 2 * j, -inv * a1 * r1_at[j] * h2);
            }
        }
    }
    if !m.all_finite() {
        return Err(Error::Evaluation {
            potential: "discretized operator".into(),
            x: f64::NAN,
        });
    }
    let under_resolved = h / problem.window.e0.sqrt() < 8.0 * length / n as f64;
    Ok(DiscretizedOperator {
        matrix: m,
        grid: GridMeta {
            n,
            x_min: problem.x_min,
            x_max: problem.x_max,
            dx,
            half_width,
            under_resolved,
        },
        h,
        theta: contour.theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingSpec;
    use crate::oracle::contour::build_contour;

    #[test]
    fn classic_weights() {
        let (d1, d2) = central_weights(1);
        assert_eq!(d1, vec![-0.5, 0.0, 0.5]);
        assert_eq!(d2, vec![1.0, -2.0, 1.0]);
        let (d1, d2) = central_weights(2);
        let expect1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let expect2 = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        for k in 0..5 {
            assert!((d1[k] - expect1[k]).abs() < 1e-14);
            assert!((d2[k] - expect2[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_are_exact_on_polynomials() {
        for p in 1..=5usize {
            let (d1, d2) = central_weights(p);
            for power in 0..=(2 * p) as i32 {
                let f = |x: f64| (x + 0.3).powi(power);
                let nodes = -(p as i64)..=p as i64;
                let g1: f64 = nodes.clone().map(|k| d1[(k + p as i64) as usize] * f(k as f64)).sum();
                let g2: f64 = nodes.map(|k| d2[(k + p as i64) as usize] * f(k as f64)).sum();
                let e1 = if power >= 1 { power as f64 * 0.3f64.powi(power - 1) } else { 0.0 };
                let e2 = if power >= 2 {
                    (power * (power - 1)) as f64 * 0.3f64.powi(power - 2)
                } else {
                    0.0
                };
                assert!((g1 - e1).abs() < 1e-8 * e1.abs().max(1.0));
                assert!((g2 - e2).abs() < 1e-8 * e2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn decoupled_undeformed_is_block_diagonal_and_symmetric() {
        let p = ProblemSpec::reference_with(CouplingSpec::decoupled());
        let mut c = build_contour(&p).unwrap();
        c.theta = 0.0;
        let op = discretize(&p, &c, 600, 0.05, 2).unwrap();
        let m = &op.matrix;
        let n = m.dim();
        for i in 0..n {
            for j in i.saturating_sub(m.lower())..=(i + m.upper()).min(n - 1) {
                let v = m.get(i, j);
                assert_eq!(v.im, 0.0);
                if i % 2 != j % 2 {
                    assert_eq!(v, Complex64::new(0.0, 0.0));
                }
                assert!((v - m.get(j, i)).norm() <= 1e-12 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn coupling_is_transpose_pattern_when_undeformed() {
        let p = ProblemSpec::reference_with(CouplingSpec::constant(0.4, 0.9));
        let mut c = build_contour(&p).unwrap();
        c.theta = 0.0;
        let op = discretize(&p, &c, 512, 0.05, 4).unwrap();
        let m = &op.matrix;
        for i in 0..m.dim() {
            for j in i.saturating_sub(m.lower())..=(i + m.upper()).min(m.dim() - 1) {
                assert!((m.get(i, j) - m.get(j, i)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_vector_reproduces_potentials() {
        let p = ProblemSpec::reference();
        let c = build_contour(&p).unwrap();
        let n = 1024;
        let half = 4;
        let op = discretize(&p, &c, n, 0.05, half).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 2 * n];
        let mut y = vec![Complex64::new(0.0, 0.0); 2 * n];
        op.matrix.matvec(&ones, &mut y);
        for i in half..n - half {
            let z = c.map(op.node(i));
            assert!((y[2 * i] - p.v1.value(z)).norm() < 1e-8);
            assert!((y[2 * i + 1] - p.v2.value(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_coarse_grids_and_flags_resolution() {
        let p = ProblemSpec::reference();
        let c = build_contour(&p).unwrap();
        assert!(discretize(&p, &c, 100, 0.05, 4).is_err());
        assert!(discretize(&p, &c, 512, 0.01, 4).unwrap().grid.under_resolved);
        assert!(!discretize(&p, &c, 8192, 0.05, 4).unwrap().grid.under_resolved);
    }
}
