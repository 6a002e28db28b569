//! Log-log slopes of the residuals against h.

use super::compare::ComparisonRow;
use crate::error::{Error, Result};
use crate::oracle::Method;
use serde::Serialize;
use std::collections::BTreeMap;

/// Residuals below this are treated as round-off and left out of fits.
pub const UNDERFLOW: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least squares `log y = slope log x + intercept`; needs three points.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<LineFit> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        points: points.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KFit {
    pub method: Method,
    pub k: i64,
    pub re: Option<LineFit>,
    pub im: Option<LineFit>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioRow {
    pub method: Method,
    pub h: f64,
    pub k: i64,
    pub e_k: f64,
    pub c: f64,
    /// `-Im E / h^2` over `C`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodFit {
    pub method: Method,
    /// Fit of the largest residual over the paired `k` at each h.
    pub re: Option<LineFit>,
    pub im: Option<LineFit>,
    /// `(h, max residual_re, max residual_im)`
    pub envelope: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceFit {
    pub per_k: Vec<KFit>,
    pub per_method: Vec<MethodFit>,
    pub ratios: Vec<RatioRow>,
    pub notes: Vec<String>,
}

impl ConvergenceFit {
    pub fn method(&self, m: Method) -> Option<&MethodFit> {
        self.per_method.iter().find(|f| f.method == m)
    }
}

fn kept(value: f64, what: &str, row: &ComparisonRow, notes: &mut Vec<String>) -> Option<f64> {
    if value < UNDERFLOW {
        notes.push(format!(
            "{} h = {} k = {}: {what} = {value:e} below {UNDERFLOW:e}, dropped",
            row.method, row.h, row.k
        ));
        None
    } else {
        Some(value)
    }
}

/// Slopes per `k` (where a `k` is paired at three or more h values) and per
/// method (on the largest residual at each h), plus the width ratios.
pub fn convergence_fit(rows: &[ComparisonRow]) -> Result<ConvergenceFit> {
    let distinct: std::collections::BTreeSet<u64> = rows.iter().map(|r| r.h.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} distinct h values, at least 3 needed",
            distinct.len()
        )));
    }
    let mut notes = Vec::new();
    let mut by_k: BTreeMap<(Method, i64), (Vec<(f64, f64)>, Vec<(f64, f64)>)> = BTreeMap::new();
    let mut by_h: BTreeMap<(Method, u64), (f64, Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in rows {
        let re = kept(r.residual_re, "residual_re", r, &mut notes);
        let im = kept(r.residual_im, "residual_im", r, &mut notes);
        let entry = by_k.entry((r.method, r.k)).or_default();
        if let Some(v) = re {
            entry.0.push((r.h, v));
        }
        if let Some(v) = im {
            entry.1.push((r.h, v));
        }
        let env = by_h.entry((r.method, r.h.to_bits())).or_insert((r.h, None, None));
        env.1 = max_opt(env.1, re);
        env.2 = max_opt(env.2, im);
    }
    let per_k = by_k
        .into_iter()
        .map(|((method, k), (re, im))| KFit {
            method,
            k,
            re: loglog_fit(&re),
            im: loglog_fit(&im),
        })
        .collect();
    let mut per_method = Vec::new();
    for method in [Method::Ecs, Method::Wronskian] {
        let mut envelope: Vec<(f64, f64, f64)> = by_h
            .iter()
            .filter(|((m, _), _)| *m == method)
            .map(|(_, &(h, re, im))| (h, re.unwrap_or(f64::NAN), im.unwrap_or(f64::NAN)))
            .collect();
        if envelope.is_empty() {
            continue;
        }
        envelope.sort_by(|a, b| b.0.total_cmp(&a.0));
        let re: Vec<(f64, f64)> = envelope.iter().filter(|e| e.1.is_finite()).map(|e| (e.0, e.1)).collect();
        let im: Vec<(f64, f64)> = envelope.iter().filter(|e| e.2.is_finite()).map(|e| (e.0, e.2)).collect();
        per_method.push(MethodFit {
            method,
            re: loglog_fit(&re),
            im: loglog_fit(&im),
            envelope,
        });
    }
    let ratios = rows
        .iter()
        .filter(|r| r.c > 0.0)
        .map(|r| RatioRow {
            method: r.method,
            h: r.h,
            k: r.k,
            e_k: r.e_k,
            c: r.c,
            ratio: r.width_ratio(),
        })
        .collect();
    Ok(ConvergenceFit {
        per_k,
        per_method,
        ratios,
        notes,
    })
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn row(h: f64, k: i64, re: f64, im: f64) -> ComparisonRow {
        ComparisonRow {
            h,
            k,
            method: Method::Ecs,
            e_k: 1.0,
            c: 0.5,
            predicted: Complex64::new(1.0, -0.5 * h * h),
            oracle: Complex64::new(1.0 + re, -0.5 * h * h - im),
            residual_re: re,
            residual_im: im,
            pair_distance: 0.0,
        }
    }

    #[test]
    fn exact_power_laws() {
        let hs = [0.08f64, 0.04, 0.02, 0.01];
        let rows: Vec<_> = hs.iter().map(|&h| row(h, 3, h * h, h.powf(7.0 / 3.0))).collect();
        let fit = convergence_fit(&rows).unwrap();
        let m = fit.method(Method::Ecs).unwrap();
        assert!((m.re.unwrap().slope - 2.0).abs() < 1e-12);
        assert!((m.im.unwrap().slope - 7.0 / 3.0).abs() < 1e-6);
        assert!((fit.per_k[0].re.unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn underflow_rows_are_dropped_with_a_note() {
        let rows: Vec<_> = [0.08f64, 0.04, 0.02].iter().map(|&h| row(h, 1, h * h, 1e-16)).collect();
        let fit = convergence_fit(&rows).unwrap();
        assert_eq!(fit.notes.len(), 3);
        assert!(fit.method(Method::Ecs).unwrap().im.is_none());
    }

    #[test]
    fn two_h_values_are_not_enough() {
        let rows = vec![row(0.1, 0, 1e-2, 1e-3), row(0.05, 0, 2.5e-3, 1e-4)];
        assert!(matches!(convergence_fit(&rows), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn envelope_takes_the_worst_k() {
        let rows = vec![
            row(0.08, 1, 1e-3, 1e-4),
            row(0.08, 2, 2e-3, 1e-5),
            row(0.04, 3, 1e-4, 1e-6),
            row(0.02, 4, 1e-5, 1e-7),
        ];
        let fit = convergence_fit(&rows).unwrap();
        let env = &fit.method(Method::Ecs).unwrap().envelope;
        assert_eq!(env[0], (0.08, 2e-3, 1e-4));
    }

    proptest! {
        #[test]
        fn slope_recovers_any_power(p in 0.5f64..4.0, c in 1e-3f64..1e3) {
            let pts: Vec<(f64, f64)> = [0.1f64, 0.05, 0.02, 0.01].iter().map(|&h| (h, c * h.powf(p))).collect();
            let f = loglog_fit(&pts).unwrap();
            prop_assert!((f.slope - p).abs() < 1e-9);
            prop_assert!((f.intercept - c.ln()).abs() < 1e-8);
        }
    }
}
