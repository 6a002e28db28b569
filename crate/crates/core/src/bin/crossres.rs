use clap::{Parser, Subcommand, ValueEnum};
use crossres::harness::{
    checks::CONSISTENCY_HEADER, consistency_scan, convergence_fit, run_compare, sweep_checks, write_plot_data,
    ExperimentConfig, Fixtures, SweepCheck, CSV_HEADER,
};
use crossres::model::validate_assumptions;
use crossres::oracle::{theta_stable_against, wronskian_roots, EcsOptions, Method, RootOptions};
use crossres::semiclassics::predict;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "crossres", version, about = "Resonances above an energy-level crossing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for two-column plot data files.
    #[arg(long, global = true)]
    plot_data: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ecs,
    Wronskian,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural assumptions on the configured model.
    Validate { config: PathBuf },
    /// Bohr-Sommerfeld grid and predicted resonances at one h.
    Predict {
        config: PathBuf,
        #[arg(long)]
        h: f64,
    },
    /// Resonances in the window from one oracle at one h.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Prediction/oracle table over the configured h values.
    Compare { config: PathBuf },
    /// Comparison plus slope fits and every acceptance check.
    Sweep { config: PathBuf },
    /// Green-formula width against C(E, h) h^2 over the window.
    Consistency { config: PathBuf },
    /// Derived constants of the configuration as JSON.
    Fixtures { config: PathBuf },
}

struct Outcome {
    body: String,
    summary: String,
    passed: bool,
}

fn summarize(checks: &[SweepCheck]) -> (String, bool) {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    (s, checks.iter().all(|c| c.passed))
}

fn run(cli: &Cli) -> crossres::Result<Outcome> {
    match &cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let report = validate_assumptions(&cfg.problem()?)?;
            let mut body = String::from("assumption,passed,detail,offending_x\n");
            for c in &report.checks {
                let x = c.offending_x.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(body, "{:?},{},\"{}\",{x}", c.assumption, c.passed, c.detail.replace('"', "'"));
            }
            Ok(Outcome {
                body,
                summary: report.to_string(),
                passed: report.all_passed(),
            })
        }
        Command::Predict { config, h } => {
            let cfg = ExperimentConfig::load(config)?;
            let preds = predict(&cfg.problem()?, *h)?;
            let mut body = String::from("h,k,e_k,C,pred_re,pred_im\n");
            for p in &preds {
                let _ = writeln!(body, "{},{},{},{},{},{}", p.h, p.k, p.e_k, p.width_coeff, p.predicted.re, p.predicted.im);
            }
            Ok(Outcome {
                body,
                summary: format!("{} predicted resonances at h = {h}\n", preds.len()),
                passed: true,
            })
        }
        Command::Oracle { config, h, method } => {
            let cfg = ExperimentConfig::load(config)?;
            let problem = cfg.problem()?;
            let mut body = String::from("h,method,re,im,residual,converged,shift,stable\n");
            let mut all_ok = true;
            let count;
            match method {
                MethodArg::Ecs => {
                    let thetas = cfg.thetas();
                    let st = theta_stable_against(&problem, *h, &EcsOptions::with_nodes(cfg.nodes_for(*h)), &thetas[1..])?;
                    count = st.checks.len();
                    for c in &st.checks {
                        let r = &c.resonance;
                        all_ok &= r.converged;
                        let _ = writeln!(
                            body,
                            "{h},{},{},{},{},{},{},{}",
                            Method::Ecs,
                            r.energy.re,
                            r.energy.im,
                            r.residual,
                            r.converged,
                            c.shift,
                            c.stable
                        );
                    }
                    all_ok &= !st.partial;
                }
                MethodArg::Wronskian => {
                    let seeds: Vec<Complex64> = predict(&problem, *h)?.iter().map(|p| p.predicted).collect();
                    let roots = wronskian_roots(&problem, *h, &seeds, &RootOptions::default())?;
                    count = roots.len();
                    for r in &roots {
                        all_ok &= r.converged;
                        let _ = writeln!(
                            body,
                            "{h},{},{},{},{},{},,",
                            Method::Wronskian,
                            r.energy.re,
                            r.energy.im,
                            r.residual,
                            r.converged
                        );
                    }
                }
            }
            Ok(Outcome {
                body,
                summary: format!("{count} oracle resonances at h = {h}\n"),
                passed: all_ok,
            })
        }
        Command::Compare { config } | Command::Sweep { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let out = run_compare(&cfg)?;
            let rows = out.rows();
            let full = matches!(cli.command, Command::Sweep { .. });
            let fit = if full || cli.plot_data.is_some() {
                convergence_fit(&rows).ok()
            } else {
                None
            };
            let mut checks = sweep_checks(&cfg, &out, if full { fit.as_ref() } else { None });
            if !full {
                checks.retain(|c| c.name.starts_with("pairing"));
            }
            let (mut summary, mut passed) = summarize(&checks);
            if full && fit.is_none() && cfg.sweep.h_values.len() >= 3 {
                summary.push_str("FAIL slope fit: not enough paired h values\n");
                passed = false;
            }
            if let Some(f) = &fit {
                for n in &f.notes {
                    let _ = writeln!(summary, "note: {n}");
                }
            }
            if let Some(dir) = &cli.plot_data {
                let files = write_plot_data(dir, &rows, fit.as_ref())?;
                let _ = writeln!(summary, "plot data: {} files in {}", files.len(), dir.display());
            }
            let mut body = String::new();
            let _ = writeln!(body, "{CSV_HEADER}");
            for r in &rows {
                let _ = writeln!(body, "{}", r.csv());
            }
            Ok(Outcome { body, summary, passed })
        }
        Command::Consistency { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let hs = if cfg.sweep.h_values.is_empty() {
                vec![0.1, 0.05, 0.02, 0.01, 0.005]
            } else {
                cfg.sweep.h_values.clone()
            };
            let rows = consistency_scan(&cfg.problem()?, 21, &hs)?;
            let worst = rows.iter().map(|r| r.relative.max(r.outgoing_gap)).fold(0.0, f64::max);
            let passed = rows.iter().all(|r| r.passed());
            let mut body = format!("{CONSISTENCY_HEADER}\n");
            for r in &rows {
                let _ = writeln!(body, "{}", r.csv());
            }
            if let Some(dir) = &cli.plot_data {
                std::fs::create_dir_all(dir)?;
                let data: Vec<(f64, f64)> = rows.iter().map(|r| (r.energy, r.relative)).collect();
                crossres::harness::report::write_columns(&dir.join("consistency.dat"), ("E", "relative"), &data)?;
            }
            Ok(Outcome {
                body,
                summary: format!(
                    "{} {} points, largest relative gap {worst:.3e}\n",
                    if passed { "PASS" } else { "FAIL" },
                    rows.len()
                ),
                passed,
            })
        }
        Command::Fixtures { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let f = Fixtures::compute(&cfg)?;
            Ok(Outcome {
                body: serde_json::to_string_pretty(&f)? + "\n",
                summary: format!("fixtures for {} h values\n", f.grids.len()),
                passed: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.body),
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            eprint!("{}", outcome.summary);
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
