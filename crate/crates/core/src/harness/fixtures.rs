//! Derived constants of a configuration, regenerated rather than typed in.

use super::config::ExperimentConfig;
use crate::actions::action_set_real;
use crate::error::Result;
use crate::microlocal::mu_constants;
use crate::model::crossing_slopes;
use crate::semiclassics::predict;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub k: i64,
    pub e_k: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFixture {
    pub h: f64,
    pub points: Vec<GridPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixtures {
    pub e0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
    pub action_a: f64,
    pub action_b: f64,
    pub da_de: f64,
    pub db_de: f64,
    pub mu: f64,
    pub grids: Vec<GridFixture>,
}

impl Fixtures {
    pub fn compute(config: &ExperimentConfig) -> Result<Self> {
        let problem = config.problem()?;
        let e0 = problem.window.e0;
        let s = action_set_real(&problem, e0)?;
        let slopes = crossing_slopes(&problem)?;
        let grids = config
            .sweep
            .h_values
            .iter()
            .map(|&h| {
                Ok(GridFixture {
                    h,
                    points: predict(&problem, h)?
                        .into_iter()
                        .map(|p| GridPoint {
                            k: p.k,
                            e_k: p.e_k,
                            c: p.width_coeff,
                        })
                        .collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            e0,
            a: s.turning.a.re,
            b: s.turning.b.re,
            c: s.turning.c.re,
            tau1: slopes.tau1,
            tau2: slopes.tau2,
            gamma: slopes.gamma,
            action_a: s.a.re,
            action_b: s.b.re,
            da_de: s.da_de.re,
            db_de: s.db_de.re,
            mu: mu_constants(&problem, e0)?.mu,
            grids,
        })
    }

    /// Largest relative difference over every number in the two fixtures,
    /// or infinity when their shapes differ.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        let scalars = |f: &Self| {
            vec![
                f.e0, f.a, f.b, f.c, f.tau1, f.tau2, f.gamma, f.action_a, f.action_b, f.da_de, f.db_de, f.mu,
            ]
        };
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
        let mut worst = scalars(self)
            .into_iter()
            .zip(scalars(other))
            .map(|(x, y)| if x == y { 0.0 } else { rel(x, y) })
            .fold(0.0, f64::max);
        if self.grids.len() != other.grids.len() {
            return f64::INFINITY;
        }
        for (g, o) in self.grids.iter().zip(&other.grids) {
            if g.points.len() != o.points.len() || g.h != o.h {
                return f64::INFINITY;
            }
            for (p, q) in g.points.iter().zip(&o.points) {
                if p.k != q.k {
                    return f64::INFINITY;
                }
                worst = worst.max(rel(p.e_k, q.e_k));
                if p.c != q.c {
                    worst = worst.max(rel(p.c, q.c));
                }
            }
        }
        worst
    }
}
