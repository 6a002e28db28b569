//! Predictions against oracle resonances, one h at a time.

use super::config::ExperimentConfig;
use crate::actions::action_set_real;
use crate::error::{Error, Result};
use crate::model::{validate_assumptions, ProblemSpec};
use crate::oracle::{theta_stable_against, wronskian_roots, EcsOptions, GridMeta, Method, OracleResonance, RootOptions, ThetaCheck};
use crate::semiclassics::{predict, ResonancePrediction};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

pub const CSV_HEADER: &str = "h,k,method,e_k,C,pred_re,pred_im,orc_re,orc_im,res_re,res_im,pair_dist";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub h: f64,
    pub k: i64,
    pub method: Method,
    pub e_k: f64,
    pub c: f64,
    pub predicted: Complex64,
    pub oracle: Complex64,
    /// `|Re E - e_k|`
    pub residual_re: f64,
    /// `|Im E + C h^2|`
    pub residual_im: f64,
    /// `|Re E - e_k|` in units of the local grid spacing.
    pub pair_distance: f64,
}

impl ComparisonRow {
    pub fn new(p: &ResonancePrediction, method: Method, oracle: Complex64, spacing: f64) -> Self {
        let residual_re = (oracle.re - p.e_k).abs();
        Self {
            h: p.h,
            k: p.k,
            method,
            e_k: p.e_k,
            c: p.width_coeff,
            predicted: p.predicted,
            oracle,
            residual_re,
            residual_im: (oracle.im + p.width_coeff * p.h * p.h).abs(),
            pair_distance: residual_re / spacing,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.h,
            self.k,
            self.method,
            self.e_k,
            self.c,
            self.predicted.re,
            self.predicted.im,
            self.oracle.re,
            self.oracle.im,
            self.residual_re,
            self.residual_im,
            self.pair_distance
        )
    }

    /// `-Im E / h^2` over `C(e_k, h)`.
    pub fn width_ratio(&self) -> f64 {
        -self.oracle.im / (self.h * self.h) / self.c
    }
}

/// Oracle output at one h.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleOutput {
    /// Every ECS eigenvalue in the window with its stability verdict.
    pub ecs: Vec<ThetaCheck>,
    pub ecs_partial: bool,
    pub grid: Option<GridMeta>,
    /// Every Wronskian root, converged or not.
    pub wronskian: Vec<OracleResonance>,
}

impl OracleOutput {
    /// Accepted resonances of one method: theta-stable ECS eigenvalues, or
    /// converged Wronskian roots.
    pub fn accepted(&self, method: Method) -> Vec<Complex64> {
        match method {
            Method::Ecs => self.ecs.iter().filter(|c| c.stable).map(|c| c.resonance.energy).collect(),
            Method::Wronskian => self.wronskian.iter().filter(|r| r.converged).map(|r| r.energy).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HRun {
    pub h: f64,
    pub nodes: usize,
    pub predictions: Vec<ResonancePrediction>,
    pub oracle: OracleOutput,
    pub rows: Vec<ComparisonRow>,
}

impl HRun {
    /// Predictions without a pairing for `method`.
    pub fn unpaired(&self, method: Method) -> Vec<i64> {
        self.predictions
            .iter()
            .filter(|p| !self.rows.iter().any(|r| r.method == method && r.k == p.k))
            .map(|p| p.k)
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareOutput {
    pub runs: Vec<HRun>,
}

impl CompareOutput {
    pub fn rows(&self) -> Vec<ComparisonRow> {
        self.runs.iter().flat_map(|r| r.rows.iter().copied()).collect()
    }
}

/// Grid spacing `pi h / A'(e_k)` at each prediction.
pub fn spacings(problem: &ProblemSpec, predictions: &[ResonancePrediction]) -> Result<Vec<f64>> {
    predictions
        .iter()
        .map(|p| Ok(PI * p.h / action_set_real(problem, p.e_k)?.da_de.re))
        .collect()
}

/// Injective pairing of oracle energies with predictions. Oracle values are
/// taken in order of increasing real part; each goes to the nearest free
/// `e_k` within half a spacing, ties broken towards the `k` following the
/// previous match. Returns `(prediction index, oracle index)`.
pub fn pair(predictions: &[ResonancePrediction], spacing: &[f64], oracle: &[Complex64]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..oracle.len()).collect();
    order.sort_by(|&a, &b| oracle[a].re.total_cmp(&oracle[b].re).then(oracle[a].im.total_cmp(&oracle[b].im)));
    let mut taken = vec![false; predictions.len()];
    let mut previous: Option<i64> = None;
    let mut out = Vec::new();
    for o in order {
        let e = oracle[o];
        let best = (0..predictions.len())
            .filter(|&i| !taken[i])
            .map(|i| (i, (e.re - predictions[i].e_k).abs()))
            .filter(|&(i, d)| d < 0.5 * spacing[i])
            .min_by(|&(i, d), &(j, f)| {
                let key = |k: i64| previous.map_or(0, |p| (k - p - 1).abs());
                d.total_cmp(&f).then(key(predictions[i].k).cmp(&key(predictions[j].k)))
            });
        if let Some((i, _)) = best {
            taken[i] = true;
            previous = Some(predictions[i].k);
            out.push((i, o));
        }
    }
    out.sort_unstable();
    out
}

/// Both oracles (as selected) at one h.
pub fn run_oracles(
    problem: &ProblemSpec,
    h: f64,
    predictions: &[ResonancePrediction],
    methods: &[Method],
    ecs: &EcsOptions,
    partners: &[f64],
) -> Result<OracleOutput> {
    let mut out = OracleOutput::default();
    if methods.contains(&Method::Ecs) {
        let st = theta_stable_against(problem, h, ecs, partners)?;
        out.ecs = st.checks;
        out.ecs_partial = st.partial;
        out.grid = Some(st.grid);
    }
    if methods.contains(&Method::Wronskian) {
        let seeds: Vec<Complex64> = predictions.iter().map(|p| p.predicted).collect();
        out.wronskian = wronskian_roots(problem, h, &seeds, &RootOptions::default())?;
    }
    Ok(out)
}

/// Predictions, oracles and pairings at one h.
pub fn compare_at(config: &ExperimentConfig, h: f64) -> Result<HRun> {
    let problem = config.problem()?;
    let thetas = config.thetas();
    let nodes = config.nodes_for(h);
    let predictions = predict(&problem, h)?;
    let spacing = spacings(&problem, &predictions)?;
    let oracle = run_oracles(
        &problem,
        h,
        &predictions,
        &config.sweep.methods,
        &EcsOptions::with_nodes(nodes),
        &thetas[1..],
    )?;
    let mut rows = Vec::new();
    for &method in &[Method::Ecs, Method::Wronskian] {
        if !config.sweep.methods.contains(&method) {
            continue;
        }
        let accepted = oracle.accepted(method);
        for (i, o) in pair(&predictions, &spacing, &accepted) {
            rows.push(ComparisonRow::new(&predictions[i], method, accepted[o], spacing[i]));
        }
    }
    if rows.is_empty() && !predictions.is_empty() {
        return Err(Error::NoPairings { h });
    }
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.k.cmp(&b.k)));
    Ok(HRun {
        h,
        nodes,
        predictions,
        oracle,
        rows,
    })
}

/// The full table over the configured h values, in their order.
pub fn run_compare(config: &ExperimentConfig) -> Result<CompareOutput> {
    config.check()?;
    let report = validate_assumptions(&config.problem()?)?;
    if let Some(c) = report.checks.iter().find(|c| !c.passed) {
        return Err(Error::AssumptionViolated(format!("{:?}: {}", c.assumption, c.detail)));
    }
    let runs = config
        .sweep
        .h_values
        .iter()
        .map(|&h| compare_at(config, h))
        .collect::<Result<_>>()?;
    Ok(CompareOutput { runs })
}
