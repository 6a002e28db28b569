//! Experiment configuration: one JSON document with the sections
//! `potentials`, `coupling`, `window`, `contour` and `sweep`.

use crate::error::{Error, Result};
use crate::model::{ContourParams, CouplingSpec, EnergyWindow, PotentialSpec, ProblemSpec};
use crate::oracle::{EcsOptions, Method, MIN_NODES, THETA_STEP};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potentials {
    pub v1: PotentialSpec,
    pub v2: PotentialSpec,
    /// Computational box; derived from `a(E0)` and `x_infty` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Strictly decreasing, positive.
    #[serde(default)]
    pub h_values: Vec<f64>,
    /// Grid size for the ECS oracle.
    pub n: usize,
    /// Per-h grid sizes overriding `n`, aligned with `h_values`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_per_h: Vec<usize>,
    /// Contour angles compared by the stability filter. The first is the
    /// angle of the reported values; empty means `[theta, theta + 0.05]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta_values: Vec<f64>,
    #[serde(default = "both_methods")]
    pub methods: Vec<Method>,
}

fn both_methods() -> Vec<Method> {
    vec![Method::Ecs, Method::Wronskian]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potentials: Potentials,
    pub coupling: CouplingSpec,
    pub window: EnergyWindow,
    pub contour: ContourParams,
    pub sweep: Sweep,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The reference pair with the given sweep.
    pub fn reference(sweep: Sweep) -> Self {
        Self::from_problem(&ProblemSpec::reference(), sweep)
    }

    pub fn from_problem(problem: &ProblemSpec, sweep: Sweep) -> Self {
        Self {
            potentials: Potentials {
                v1: problem.v1.clone(),
                v2: problem.v2.clone(),
                bounds: None,
            },
            coupling: problem.coupling.clone(),
            window: problem.window,
            contour: problem.contour,
            sweep,
        }
    }

    pub fn check(&self) -> Result<()> {
        let s = &self.sweep;
        if s.h_values.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Config("h values must be positive".into()));
        }
        if s.h_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("h values must be strictly decreasing".into()));
        }
        if !s.n_per_h.is_empty() && s.n_per_h.len() != s.h_values.len() {
            return Err(Error::Config(format!(
                "n_per_h has {} entries for {} h values",
                s.n_per_h.len(),
                s.h_values.len()
            )));
        }
        if let Some(n) = std::iter::once(s.n).chain(s.n_per_h.iter().copied()).find(|&n| n < MIN_NODES) {
            return Err(Error::Config(format!("grid size {n} is below {MIN_NODES}")));
        }
        if s.methods.is_empty() {
            return Err(Error::Config("no oracle method selected".into()));
        }
        self.problem()?;
        Ok(())
    }

    /// Angles for the stability filter; the first is the working angle.
    pub fn thetas(&self) -> Vec<f64> {
        if self.sweep.theta_values.is_empty() {
            vec![self.contour.theta, self.contour.theta + THETA_STEP]
        } else {
            self.sweep.theta_values.clone()
        }
    }

    /// The model at the working angle.
    pub fn problem(&self) -> Result<ProblemSpec> {
        let mut contour = self.contour;
        contour.theta = self.thetas()[0];
        ProblemSpec::new(
            self.potentials.v1.clone(),
            self.potentials.v2.clone(),
            self.coupling.clone(),
            self.window,
            contour,
            self.potentials.bounds,
        )
    }

    /// Grid size used at the `i`-th h value.
    pub fn nodes(&self, i: usize) -> usize {
        self.sweep.n_per_h.get(i).copied().unwrap_or(self.sweep.n)
    }

    pub fn ecs_options(&self, i: usize) -> EcsOptions {
        EcsOptions::with_nodes(self.nodes(i))
    }

    /// Grid size for an `h` not necessarily in the sweep.
    pub fn nodes_for(&self, h: f64) -> usize {
        match self.sweep.h_values.iter().position(|&x| x == h) {
            Some(i) => self.nodes(i),
            None => self.sweep.n,
        }
    }
}
