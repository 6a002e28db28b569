//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

use crossres::actions::action_set_real;
use crossres::harness::{pair, ComparisonRow};
use crossres::harness::compare::spacings;
use crossres::harness::fit::loglog_fit;
use crossres::microlocal::{monodromy_residual, width_from_green};
use crossres::model::{ContourParams, CouplingSpec, EnergyWindow, PotentialSpec, ProblemSpec};
use crossres::oracle::{
    ecs_window, theta_stable, wronskian_roots, EcsOptions, Method, OracleResonance, RootOptions,
};
use crossres::semiclassics::{bohr_grid, predict, width_coefficient, width_zero_loci};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let elapsed = start.elapsed();
    v.detail = format!("{}; {:.2} s", v.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            v.passed = false;
            v.detail = format!("{} exceeds {:.0} s", v.detail, limit.as_secs_f64());
        }
    }
    v
}

fn harmonic() -> ProblemSpec {
    ProblemSpec::new(
        PotentialSpec::Polynomial {
            coefficients: vec![0.0, 0.0, 1.0],
        },
        PotentialSpec::TanhStep {
            offset: 0.0,
            amplitude: -3.0,
            center: 0.0,
            scale: 1.0,
        },
        CouplingSpec::constant(0.0, 1.0),
        EnergyWindow {
            e0: 1.25,
            delta0: 0.8,
            c0: 2.0,
        },
        ContourParams {
            theta: 0.3,
            x_infty: 3.0,
            ramp_width: 1.0,
        },
        None,
    )
    .expect("harmonic problem")
}

fn criterion_1() -> Verdict {
    let p = harmonic();
    let mut worst_a = 0.0f64;
    let mut worst_d = 0.0f64;
    for e in [0.5, 1.0, 2.0] {
        let s = action_set_real(&p, e).expect("action set");
        worst_a = worst_a.max((s.a.re - PI * e / 2.0).abs());
        worst_d = worst_d.max((s.da_de.re - FRAC_PI_2).abs());
    }
    verdict(
        worst_a < 1e-10 && worst_d < 1e-9,
        format!("max |A - pi E/2| = {worst_a:.2e} (< 1e-10), max |A' - pi/2| = {worst_d:.2e} (< 1e-9)"),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 200 {
        let e = rng.random_range(0.9..=1.1);
        let h = rng.random_range(0.005..=0.1);
        let r0: f64 = rng.random_range(-2.0..=2.0);
        let r1: f64 = rng.random_range(-2.0..=2.0);
        if r0 == 0.0 && r1 == 0.0 {
            continue;
        }
        draws += 1;
        let p = ProblemSpec::reference_with(CouplingSpec::constant(r0, r1));
        let green = width_from_green(&p, e, h).expect("green width");
        let asymptotic = width_coefficient(&p, e, h).expect("width coefficient") * h * h;
        worst = worst.max((green - asymptotic).abs() / (asymptotic + 1e-30));
    }
    verdict(worst < 1e-10, format!("200 draws, max relative gap {worst:.2e} (< 1e-10)"))
}

/// ECS eigenvalues in the window paired with predictions, at each h.
fn paired_rows(p: &ProblemSpec, h: f64, found: &[OracleResonance]) -> Vec<ComparisonRow> {
    let preds = predict(p, h).expect("predictions");
    let spacing = spacings(p, &preds).expect("spacings");
    let energies: Vec<Complex64> = found.iter().map(|r| r.energy).collect();
    pair(&preds, &spacing, &energies)
        .into_iter()
        .map(|(i, o)| ComparisonRow::new(&preds[i], Method::Ecs, energies[o], spacing[i]))
        .collect()
}

fn criterion_3() -> Verdict {
    let p = ProblemSpec::reference_with(CouplingSpec::decoupled());
    let mut worst_im = 0.0f64;
    let mut envelope = Vec::new();
    let mut missing = 0;
    for h in [0.08, 0.04, 0.02] {
        let run = ecs_window(&p, h, &EcsOptions::with_nodes(8192)).expect("ecs");
        worst_im = run.resonances.iter().map(|r| r.energy.im.abs()).fold(worst_im, f64::max);
        let rows = paired_rows(&p, h, &run.resonances);
        missing += bohr_grid(&p, h).expect("grid").len() - rows.len();
        let worst_re = rows.iter().map(|r| r.residual_re).fold(0.0, f64::max);
        envelope.push((h, worst_re));
    }
    let slope = loglog_fit(&envelope).map_or(f64::NAN, |f| f.slope);
    verdict(
        worst_im < 1e-8 && slope >= 1.8 && missing == 0,
        format!("max |Im E| = {worst_im:.2e} (< 1e-8), slope of max_k |Re E - e_k| = {slope:.3} (>= 1.8), unpaired {missing}"),
    )
}

fn criterion_4() -> Verdict {
    let p = ProblemSpec::reference();
    let mut envelope = Vec::new();
    let mut ratio_detail = String::new();
    let mut ratio_ok = false;
    for (h, n) in [(0.08, 8192), (0.04, 8192), (0.02, 16384), (0.01, 16384)] {
        let st = theta_stable(&p, h, &EcsOptions::with_nodes(n)).expect("ecs");
        let rows = paired_rows(&p, h, &st.accepted());
        let worst_im = rows.iter().map(|r| r.residual_im).fold(0.0, f64::max);
        envelope.push((h, worst_im));
        if h == 0.01 {
            let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max);
            let judged: Vec<&ComparisonRow> = rows.iter().filter(|r| r.c > 0.1 * c_max).collect();
            let worst = judged.iter().map(|r| (r.width_ratio() - 1.0).abs()).fold(0.0, f64::max);
            ratio_ok = !judged.is_empty() && worst <= 0.15;
            ratio_detail = format!("(a) {} rows at h = 0.01, max |ratio - 1| = {worst:.4} (<= 0.15)", judged.len());
        }
    }
    let slope = loglog_fit(&envelope).map_or(f64::NAN, |f| f.slope);
    verdict(
        ratio_ok && slope >= 2.1,
        format!("{ratio_detail}; (b) slope of max_k |Im E + C h^2| = {slope:.3} (>= 2.1)"),
    )
}

fn criterion_5() -> Verdict {
    let h = 0.02;
    let p = ProblemSpec::reference_with(CouplingSpec::constant(1.0, 0.0));
    let loci = width_zero_loci(&p, h).expect("zero loci");
    let grid = bohr_grid(&p, h).expect("grid");
    // The locus closest to a grid point: the best case for a small width.
    let e_star = loci
        .iter()
        .copied()
        .min_by(|a, b| {
            let d = |x: f64| grid.iter().map(|(_, e)| (e - x).abs()).fold(f64::INFINITY, f64::min);
            d(*a).total_cmp(&d(*b))
        })
        .expect("a zero locus in the window");
    // Widen the window by two spacings so both neighbours in k are found.
    let spacing = PI * h / action_set_real(&p, e_star).expect("actions").da_de.re;
    let mut wide = p.clone();
    wide.window.delta0 += 2.0 * spacing;
    let st = theta_stable(&wide, h, &EcsOptions::with_nodes(16384)).expect("ecs");
    let mut stable = st.accepted();
    stable.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re));
    let Some(i) = (0..stable.len()).min_by(|&a, &b| {
        (stable[a].energy.re - e_star)
            .abs()
            .total_cmp(&(stable[b].energy.re - e_star).abs())
    }) else {
        return verdict(false, "no theta-stable resonance".into());
    };
    if i == 0 || i + 1 == stable.len() {
        return verdict(false, format!("resonance nearest E* = {e_star:.6} lacks a neighbour"));
    }
    let width = |r: &OracleResonance| -r.energy.im;
    let w = width(&stable[i]);
    let (left, right) = (width(&stable[i - 1]), width(&stable[i + 1]));
    let ratio = w / (0.5 * (left + right));
    verdict(
        ratio <= 0.15,
        format!(
            "E* = {e_star:.6}, nearest resonance {:.6}{:+.3e}i, neighbour widths {left:.3e} and {right:.3e}, width / their median = {ratio:.3} (<= 0.15)",
            stable[i].energy.re, stable[i].energy.im
        ),
    )
}

fn criterion_6() -> Verdict {
    let p = ProblemSpec::reference();
    let h = 0.05;
    let run = ecs_window(&p, h, &EcsOptions::with_nodes(8192)).expect("ecs");
    let ecs: Vec<Complex64> = run.resonances.iter().map(|r| r.energy).collect();
    let seeds: Vec<Complex64> = predict(&p, h).expect("predictions").iter().map(|r| r.predicted).collect();
    let roots: Vec<Complex64> = wronskian_roots(&p, h, &seeds, &RootOptions::default())
        .expect("roots")
        .into_iter()
        .filter(|r| r.converged)
        .map(|r| r.energy)
        .collect();
    let nearest = |e: &Complex64, set: &[Complex64]| set.iter().map(|o| (o - e).norm()).fold(f64::INFINITY, f64::min);
    let worst = ecs
        .iter()
        .map(|e| nearest(e, &roots))
        .chain(roots.iter().map(|r| nearest(r, &ecs)))
        .fold(0.0, f64::max);
    verdict(
        !ecs.is_empty() && worst < 1e-4,
        format!("{} ECS, {} Wronskian, max mismatch {worst:.2e} (< 1e-4)", ecs.len(), roots.len()),
    )
}

fn criterion_7() -> Verdict {
    let p = ProblemSpec::reference();
    let mut worst = 0.0f64;
    let mut count = 0;
    for h in [0.05, 0.02] {
        for (_, e) in bohr_grid(&p, h).expect("grid") {
            worst = worst.max(monodromy_residual(&p, Complex64::new(e, 0.0), h).expect("residual").norm());
            count += 1;
        }
    }
    verdict(worst < 1e-9, format!("{count} grid points, max |residual| = {worst:.2e} (< 1e-9)"))
}

fn criterion_8() -> Verdict {
    let p = ProblemSpec::reference();
    let h = 0.04;
    let st = theta_stable(&p, h, &EcsOptions::with_nodes(8192)).expect("ecs");
    let converged: Vec<OracleResonance> = st.checks.iter().filter(|c| c.resonance.converged).map(|c| c.resonance.clone()).collect();
    let rows = paired_rows(&p, h, &converged);
    let worst = st
        .checks
        .iter()
        .filter(|c| rows.iter().any(|r| r.oracle == c.resonance.energy))
        .map(|c| c.shift)
        .fold(0.0, f64::max);
    verdict(
        !rows.is_empty() && worst < 1e-6,
        format!("{} paired resonances, max |E(0.3) - E(0.35)| = {worst:.2e} (< 1e-6)", rows.len()),
    )
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Verdict); 8] = [
        ("quadrature oracle", Some(Duration::from_secs(1)), criterion_1),
        ("consistency identity", Some(Duration::from_secs(10)), criterion_2),
        ("decoupled sanity", None, criterion_3),
        ("coupled width reproduction", None, criterion_4),
        ("vanishing width", None, criterion_5),
        ("dual-oracle agreement", Some(Duration::from_secs(300)), criterion_6),
        ("monodromy residual", Some(Duration::from_secs(1)), criterion_7),
        ("theta stability", None, criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let v = timed(limit, run);
        println!("{} criterion {} ({name}): {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
