//! Eigenvalues of a band matrix inside a disc: shift-invert subspace
//! iteration with Rayleigh-Ritz extraction, a recursive cover of the disc by
//! smaller discs when one shift does not reach the rim, and inverse-iteration
//! polishing of every eigenpair.

use super::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Iterations after which an eigenvalue closer than half the distance of the
/// first unconverged Ritz value would have been amplified into the block by
/// at least 2^20.
const MIN_ITERATIONS_FOR_GAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenOptions {
    pub block: usize,
    /// Block size is doubled up to this before a disc is subdivided.
    pub max_block: usize,
    pub max_iterations: usize,
    pub max_depth: usize,
    /// Ritz residual, relative to the matrix norm, counted as converged.
    pub ritz_tolerance: f64,
    /// Target residual of the polished pairs.
    pub residual_tolerance: f64,
    /// Eigenvalues closer than this are merged.
    pub merge_distance: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            block: 8,
            max_block: 32,
            max_iterations: 600,
            max_depth: 7,
            ritz_tolerance: 1e-11,
            residual_tolerance: 1e-10,
            merge_distance: 1e-9,
            seed: 0x5eed_cafe,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: Complex64,
    /// `||(M - value) v|| / ||v||`
    pub residual: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiscEigenvalues {
    pub pairs: Vec<EigenPair>,
    /// Some part of the disc was not resolved within the recursion limit.
    pub partial: bool,
}

struct Candidate {
    value: Complex64,
    vector: Vec<Complex64>,
    residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(a: &mut [Complex64], s: f64) {
    a.iter_mut().for_each(|z| *z *= s);
}

/// Modified Gram-Schmidt, applied twice. Columns that vanish are replaced
/// with fresh random vectors.
fn orthonormalize(q: &mut [Vec<Complex64>], rng: &mut ChaCha8Rng) {
    for j in 0..q.len() {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = q.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= c * y;
                }
            }
        }
        let mut nrm = norm(&q[j]);
        if !(nrm > 1e-300) || !nrm.is_finite() {
            q[j] = random_vector(q[j].len(), rng);
            for i in 0..j {
                let (head, tail) = q.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= c * y;
                }
            }
            nrm = norm(&q[j]);
        }
        scale(&mut q[j], 1.0 / nrm);
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Eigenpairs of a small dense matrix via the Schur form.
fn small_eigen(h: DMatrix<Complex64>) -> Vec<(Complex64, Vec<Complex64>)> {
    let b = h.nrows();
    let (u, t) = nalgebra::linalg::Schur::new(h).unpack();
    let mut out = Vec::with_capacity(b);
    for k in 0..b {
        let lambda = t[(k, k)];
        let mut y = vec![ZERO; b];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in i + 1..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < 1e-14 * lambda.norm().max(1.0) {
                d = Complex64::new(1e-14 * lambda.norm().max(1.0), 0.0);
            }
            y[i] = -acc / d;
        }
        let v: Vec<Complex64> = (0..b).map(|r| (0..b).map(|c| u[(r, c)] * y[c]).sum()).collect();
        out.push((lambda, v));
    }
    out
}

fn factor_near(m: &BandMatrix, shift: Complex64, scale_hint: f64) -> Result<(BandLu, Complex64)> {
    let mut s = shift;
    for attempt in 0..4 {
        match m.factor_shifted(s) {
            Ok(lu) => return Ok((lu, s)),
            Err(Error::SingularPivot { .. }) if attempt < 3 => {
                s += Complex64::new(1.0, 0.7) * scale_hint * 10f64.powi(attempt);
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

struct SubspaceResult {
    candidates: Vec<Candidate>,
    guaranteed: f64,
}

fn subspace_iteration(
    m: &BandMatrix,
    center: Complex64,
    radius: f64,
    block: usize,
    warm: Vec<Vec<Complex64>>,
    norm_m: f64,
    opts: &EigenOptions,
) -> Result<SubspaceResult> {
    let n = m.dim();
    let b = block.min(n);
    let (lu, sigma) = factor_near(m, center, 1e-9 * radius.max(1e-12))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ center.re.to_bits().rotate_left(17) ^ center.im.to_bits());
    let mut q: Vec<Vec<Complex64>> = warm.into_iter().take(b).collect();
    while q.len() < b {
        q.push(random_vector(n, &mut rng));
    }
    orthonormalize(&mut q, &mut rng);
    let tol = opts.ritz_tolerance * norm_m.max(1.0);
    let mut best = SubspaceResult {
        candidates: Vec::new(),
        guaranteed: 0.0,
    };
    for iteration in 0..opts.max_iterations {
        q.par_iter_mut().for_each(|col| lu.solve(col));
        orthonormalize(&mut q, &mut rng);

        let mq: Vec<Vec<Complex64>> = q
            .par_iter()
            .map(|col| {
                let mut y = vec![ZERO; n];
                m.matvec(col, &mut y);
                y
            })
            .collect();
        let small = DMatrix::from_fn(b, b, |i, j| dot(&q[i], &mq[j]));
        let mut ritz: Vec<Candidate> = small_eigen(small)
            .into_iter()
            .map(|(theta, y)| {
                let mut x = vec![ZERO; n];
                let mut r = vec![ZERO; n];
                for (k, yk) in y.iter().enumerate() {
                    for i in 0..n {
                        x[i] += q[k][i] * yk;
                        r[i] += mq[k][i] * yk;
                    }
                }
                let nx = norm(&x);
                for i in 0..n {
                    r[i] -= theta * x[i];
                }
                let residual = norm(&r) / nx;
                scale(&mut x, 1.0 / nx);
                Candidate {
                    value: theta,
                    vector: x,
                    residual,
                }
            })
            .collect();
        ritz.sort_by(|a, c| (a.value - sigma).norm().total_cmp(&(c.value - sigma).norm()));
        let converged = ritz.iter().take_while(|c| c.residual < tol).count().min(b - 1);
        let mut guaranteed = if converged == 0 {
            0.0
        } else {
            (ritz[converged - 1].value - sigma).norm()
        };
        if iteration + 1 >= MIN_ITERATIONS_FOR_GAP && converged < ritz.len() {
            guaranteed = guaranteed.max(0.5 * (ritz[converged].value - sigma).norm());
        }
        if converged >= best.candidates.len() {
            ritz.truncate(converged);
            let done = guaranteed >= radius || converged >= b.saturating_sub(2).max(1);
            best = SubspaceResult {
                candidates: ritz,
                guaranteed,
            };
            if done {
                break;
            }
        }
    }
    Ok(best)
}

fn search_disc(
    m: &BandMatrix,
    center: Complex64,
    radius: f64,
    depth: usize,
    norm_m: f64,
    opts: &EigenOptions,
) -> Result<(Vec<Candidate>, bool)> {
    let mut block = opts.block;
    let mut found = subspace_iteration(m, center, radius, block, Vec::new(), norm_m, opts)?;
    while found.guaranteed < radius && 2 * block <= opts.max_block.min(m.dim()) {
        block *= 2;
        let warm = found.candidates.into_iter().map(|c| c.vector).collect();
        found = subspace_iteration(m, center, radius, block, warm, norm_m, opts)?;
    }
    let g = found.guaranteed;
    let mut candidates = found.candidates;
    if g >= radius {
        return Ok((candidates, false));
    }
    if depth >= opts.max_depth {
        return Ok((candidates, true));
    }
    let half = 0.5 * radius;
    let ring = 0.5 * 3f64.sqrt() * radius;
    let centers: Vec<Complex64> = std::iter::once(center)
        .chain((0..6).map(|k| center + Complex64::from_polar(ring, std::f64::consts::FRAC_PI_3 * k as f64)))
        .filter(|c| (c - center).norm() + half > g)
        .collect();
    let results: Vec<Result<(Vec<Candidate>, bool)>> = centers
        .par_iter()
        .map(|&c| search_disc(m, c, half, depth + 1, norm_m, opts))
        .collect();
    let mut partial = false;
    for r in results {
        let (c, p) = r?;
        candidates.extend(c);
        partial |= p;
    }
    Ok((candidates, partial))
}

/// Inverse iteration at the Ritz value, updating the shift with the
/// Rayleigh quotient.
fn polish(m: &BandMatrix, c: Candidate, opts: &EigenOptions) -> Result<EigenPair> {
    let n = m.dim();
    let mut value = c.value;
    let mut x = c.vector;
    let mut residual = c.residual;
    let mut y = vec![ZERO; n];
    for _ in 0..4 {
        if residual < opts.residual_tolerance {
            break;
        }
        let (lu, _) = factor_near(m, value, 1e-13 * value.norm().max(1.0))?;
        let mut z = x.clone();
        lu.solve(&mut z);
        let nz = norm(&z);
        if !(nz.is_finite() && nz > 0.0) {
            break;
        }
        scale(&mut z, 1.0 / nz);
        m.matvec(&z, &mut y);
        let next = dot(&z, &y);
        let r = y.iter().zip(&z).map(|(a, b)| (a - next * b).norm_sqr()).sum::<f64>().sqrt();
        if r >= residual {
            break;
        }
        value = next;
        residual = r;
        x = z;
    }
    Ok(EigenPair { value, residual })
}

/// All eigenvalues of `m` within `radius` of `center`.
pub fn eigenvalues_in_disc(m: &BandMatrix, center: Complex64, radius: f64, opts: &EigenOptions) -> Result<DiscEigenvalues> {
    if !(radius > 0.0) {
        return Ok(DiscEigenvalues::default());
    }
    let norm_m = m.norm_inf();
    let (candidates, partial) = search_disc(m, center, radius, 0, norm_m, opts)?;
    let inside: Vec<Candidate> = candidates
        .into_iter()
        .filter(|c| (c.value - center).norm() <= radius * (1.0 + 1e-9))
        .collect();
    // Coarse merge before polishing to avoid repeated work.
    let mut coarse: Vec<Candidate> = Vec::new();
    for c in inside {
        match coarse.iter_mut().find(|d| (d.value - c.value).norm() < 1e3 * opts.merge_distance) {
            Some(d) if c.residual < d.residual => *d = c,
            Some(_) => {}
            None => coarse.push(c),
        }
    }
    let polished: Vec<EigenPair> = coarse
        .into_par_iter()
        .map(|c| polish(m, c, opts))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<EigenPair> = Vec::new();
    for p in polished {
        if (p.value - center).norm() > radius {
            continue;
        }
        match pairs.iter_mut().find(|d| (d.value - p.value).norm() < opts.merge_distance) {
            Some(d) if p.residual < d.residual => *d = p,
            Some(_) => {}
            None => pairs.push(p),
        }
    }
    pairs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(DiscEigenvalues { pairs, partial })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tridiagonal matrix with known eigenvalues `d + 2 cos(k pi / (n + 1))`.
    fn laplacian(n: usize, d: Complex64) -> BandMatrix {
        let mut m = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.add(i, i, d);
            if i + 1 < n {
                m.add(i, i + 1, Complex64::new(1.0, 0.0));
                m.add(i + 1, i, Complex64::new(1.0, 0.0));
            }
        }
        m
    }

    fn exact(n: usize, d: Complex64) -> Vec<Complex64> {
        (1..=n)
            .map(|k| d + 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect()
    }

    #[test]
    fn finds_all_eigenvalues_in_a_disc() {
        let n = 400;
        let d = Complex64::new(0.0, -0.1);
        let m = laplacian(n, d);
        let center = Complex64::new(0.3, -0.1);
        let radius = 0.2;
        let got = eigenvalues_in_disc(&m, center, radius, &EigenOptions::default()).unwrap();
        let want: Vec<Complex64> = exact(n, d).into_iter().filter(|e| (e - center).norm() <= radius).collect();
        assert!(want.len() > 20, "test needs recursion: {}", want.len());
        assert!(!got.partial);
        assert_eq!(got.pairs.len(), want.len());
        for w in want {
            let best = got.pairs.iter().map(|p| (p.value - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "missing {w}");
        }
        assert!(got.pairs.iter().all(|p| p.residual < 1e-8));
    }

    #[test]
    fn empty_disc() {
        let m = laplacian(100, Complex64::new(0.0, 0.0));
        let got = eigenvalues_in_disc(&m, Complex64::new(10.0, 0.0), 0.5, &EigenOptions::default()).unwrap();
        assert!(got.pairs.is_empty());
    }

    #[test]
    fn shift_on_an_eigenvalue_is_perturbed() {
        let n = 99;
        let m = laplacian(n, Complex64::new(0.0, 0.0));
        // k = 50 gives exactly 0.
        let got = eigenvalues_in_disc(&m, Complex64::new(0.0, 0.0), 0.05, &EigenOptions::default()).unwrap();
        assert!(got.pairs.iter().any(|p| p.value.norm() < 1e-10));
    }

    #[test]
    fn small_eigen_on_triangular_input() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(3.0, 1.0),
            ],
        );
        for (lambda, v) in small_eigen(h.clone()) {
            let hv: Vec<Complex64> = (0..2).map(|r| (0..2).map(|c| h[(r, c)] * v[c]).sum()).collect();
            for i in 0..2 {
                assert!((hv[i] - lambda * v[i]).norm() < 1e-12);
            }
        }
    }
}
