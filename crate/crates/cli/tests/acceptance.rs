//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::f64::consts::TAU;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use elsim_cli::commands::{simulate, simulate_with, RunReport};
use elsim_cli::presets::{initial_preset, taylor_green};
use elsim_cli::{suites, RunConfig};
use elsim_core::{Model, State};

const SEED: u64 = 2024;

/// Coefficients of the reference example: γ1 = 3, γ2 = 1, β = (1/3, 2, 2/3).
const REFERENCE_ALPHAS: [f64; 6] = [0.0, -1.0, 2.0, 2.0, 0.0, 1.0];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn coefficients(alphas: [f64; 6], gamma: f64, re: f64, k: [f64; 3]) -> String {
    format!(
        "[coefficients]\nalpha1 = {:?}\nalpha2 = {:?}\nalpha3 = {:?}\nalpha4 = {:?}\nalpha5 = {:?}\nalpha6 = {:?}\n\
         gamma = {gamma:?}\nreynolds = {re:?}\nk1 = {:?}\nk2 = {:?}\nk3 = {:?}\n",
        alphas[0], alphas[1], alphas[2], alphas[3], alphas[4], alphas[5], k[0], k[1], k[2]
    )
}

fn config(text: &str) -> RunConfig {
    let cfg = RunConfig::parse(text).expect("acceptance config parses");
    cfg.validate().expect("acceptance config validates");
    cfg
}

/// Twisted director with a mode-8 Taylor-Green flow on the reference coefficients.
fn energy_law_config(dt: f64) -> RunConfig {
    config(&format!(
        "[grid]\nn = 128\n\n{}\n[solver]\ndt = {dt:?}\nt_end = 1.0\nscheme = \"rk4\"\n\n\
         [initial]\npreset = \"twist\"\namplitude = 0.5\n\n[initial.flow]\namplitude = 1.0\nmode = 8\n",
        coefficients(REFERENCE_ALPHAS, 0.5, 10.0, [0.25, 0.3, 0.2])
    ))
}

fn suite(id: u32, name: &'static str, report: suites::SuiteReport, seconds: f64, budget: Option<f64>) -> Outcome {
    let in_time = budget.is_none_or(|b| seconds <= b);
    Outcome {
        id,
        name,
        pass: report.passed() && in_time,
        detail: format!(
            "{} cases, worst {:.3e} (tolerance {:.1e}), failures {}, {seconds:.2} s{}",
            report.cases,
            report.worst,
            report.tolerance,
            report.failures,
            budget.map(|b| format!(" (budget {b} s)")).unwrap_or_default()
        ),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn criterion_6_and_9() -> Vec<Outcome> {
    let mut max_div = 0.0f64;
    let mut observed = 0usize;
    let (coarse, t_coarse) = timed(|| {
        let mut div = |m: &Model, s: &State| -> elsim_core::Result<()> {
            max_div = max_div.max(m.grid.divergence2(&s.v).max_abs());
            observed += 1;
            Ok(())
        };
        simulate_with(&energy_law_config(1e-3), None, SEED, &mut [&mut div])
    });
    let (fine, t_fine) = timed(|| simulate(&energy_law_config(5e-4), None, SEED));
    let seconds = t_coarse + t_fine;
    let (coarse, fine): (RunReport, RunReport) = match (coarse, fine) {
        (Ok(c), Ok(f)) if c.failure.is_none() && f.failure.is_none() => (c, f),
        (c, f) => {
            let why = format!(
                "run failed: {:?} / {:?}",
                c.map(|r| r.failure.map(|e| e.to_string())).map_err(|e| e.to_string()),
                f.map(|r| r.failure.map(|e| e.to_string())).map_err(|e| e.to_string())
            );
            return vec![
                Outcome {
                    id: 6,
                    name: "energy law",
                    pass: false,
                    detail: why.clone(),
                },
                Outcome {
                    id: 9,
                    name: "divergence-free velocity",
                    pass: false,
                    detail: why,
                },
            ];
        }
    };
    let e0 = coarse.rows[0].ledger.energy;
    let increase = coarse.max_energy_increase;
    let ratio = coarse.residual / fine.residual;
    let pass6 = increase <= 1e-9 * e0 && ratio >= 8.0 && seconds <= 120.0;
    vec![
        Outcome {
            id: 6,
            name: "energy law",
            pass: pass6,
            detail: format!(
                "E0 = {e0:.6e}, max step increase {increase:.3e} (limit {:.3e}), residual {:.3e} -> {:.3e}, \
                 ratio {ratio:.2} (need >= 8), {seconds:.1} s (budget 120 s)",
                1e-9 * e0,
                coarse.residual,
                fine.residual
            ),
        },
        Outcome {
            id: 9,
            name: "divergence-free velocity",
            pass: max_div <= 1e-10 && observed == coarse.steps + 1,
            detail: format!("max |div v| = {max_div:.3e} over {observed} states (limit 1e-10)"),
        },
    ]
}

/// Uniform director with all elastic and anisotropic terms inactive: the
/// Taylor-Green vortex decays like the Navier-Stokes one.
fn criterion_7() -> Outcome {
    let (gamma, re, mode) = (0.5, 1.0, 1u32);
    let cfg = config(&format!(
        "[grid]\nn = 32\n\n{}\n[solver]\ndt = 1e-3\nt_end = 1.0\n\n\
         [initial]\npreset = \"taylor-green\"\namplitude = 1.0\nmode = {mode}\n",
        coefficients([0.0, -1.0, 1.0, 0.0, 0.0, 0.0], gamma, re, [1.0, 1.0, 1.0])
    ));
    let report = match simulate(&cfg, None, SEED) {
        Ok(r) if r.failure.is_none() => r,
        other => {
            return Outcome {
                id: 7,
                name: "Navier-Stokes reduction",
                pass: false,
                detail: format!("run failed: {:?}", other.map(|r| r.failure)),
            }
        }
    };
    let g = cfg.grid().unwrap();
    let k2 = 2.0 * (TAU * mode as f64 / g.length()).powi(2);
    let decay = (-(gamma / re) * k2 * 1.0).exp();
    let exact = taylor_green(&g, decay, mode);
    let v = &report.final_state.as_ref().unwrap().v;
    let mut diff = v.clone();
    diff.axpy(-1.0, &exact);
    let rel = g.l2_norm(&diff) / g.l2_norm(&exact);
    Outcome {
        id: 7,
        name: "Navier-Stokes reduction",
        pass: rel <= 1e-4,
        detail: format!("relative L2 error at t = 1: {rel:.3e} (limit 1e-4)"),
    }
}

/// Largest pre-renormalization drift over a short run and the largest
/// post-renormalization defect over all states.
fn unit_drift(dt: f64) -> Result<(f64, f64), String> {
    let mut cfg = energy_law_config(dt);
    cfg.solver.as_mut().unwrap().t_end = 0.05;
    let model = cfg.model().map_err(|e| e.to_string())?;
    let init = initial_preset(cfg.initial().unwrap(), &model.grid).map_err(|e| e.to_string())?;
    let mut defect = 0.0f64;
    let mut obs = |_: &Model, s: &State| -> elsim_core::Result<()> {
        defect = defect.max(s.n.unit_defect());
        Ok(())
    };
    let sc = cfg.solver().unwrap().solver_config();
    let tr = elsim_core::run(&model, init, &sc, 0.05, 1, &mut [&mut obs]).map_err(|e| e.to_string())?;
    Ok((tr.max_unit_drift, defect))
}

fn criterion_8() -> Outcome {
    match (unit_drift(1e-3), unit_drift(5e-4)) {
        (Ok((d1, u1)), Ok((d2, u2))) => {
            let ratio = d1 / d2;
            let defect = u1.max(u2);
            Outcome {
                id: 8,
                name: "unit-length preservation",
                pass: ratio >= 4.0 && defect <= 1e-12,
                detail: format!(
                    "drift {d1:.3e} -> {d2:.3e}, ratio {ratio:.2} (order >= 2 needs >= 4), \
                     max ||n|-1| after renormalization {defect:.3e} (limit 1e-12)"
                ),
            }
        }
        (a, b) => Outcome {
            id: 8,
            name: "unit-length preservation",
            pass: false,
            detail: format!("run failed: {a:?} / {b:?}"),
        },
    }
}

fn bump_config(dt: f64, center: [f64; 2]) -> RunConfig {
    config(&format!(
        "[grid]\nn = 64\n\n{}\n[solver]\ndt = {dt:?}\nt_end = 0.2\n\n\
         [initial]\npreset = \"bump\"\ndirector = [0.0, 0.0, 1.0]\namplitude = 1.0\ncenter = [{:?}, {:?}]\n\n\
         [monitors]\nradius = 0.5\nstride = 4\npoints = [[{:?}, {:?}]]\n",
        coefficients(REFERENCE_ALPHAS, 0.5, 10.0, [0.25, 0.3, 0.2]),
        center[0],
        center[1],
        center[0],
        center[1]
    ))
}

fn criterion_11() -> Outcome {
    let center = [2.2, 3.9];
    let runs = (
        simulate(&bump_config(1e-3, center), None, SEED),
        simulate(&bump_config(5e-4, center), None, SEED),
    );
    let (a, b) = match runs {
        (Ok(a), Ok(b)) if a.failure.is_none() && b.failure.is_none() => (a, b),
        (a, b) => {
            return Outcome {
                id: 11,
                name: "monitors",
                pass: false,
                detail: format!(
                    "run failed: {:?} / {:?}",
                    a.map(|r| r.failure).map_err(|e| e.to_string()),
                    b.map(|r| r.failure).map_err(|e| e.to_string())
                ),
            }
        }
    };
    let cfg = bump_config(1e-3, center);
    let g = cfg.grid().unwrap();
    let reach = cfg.monitors.stride as f64 * g.spacing();
    let c0 = a.rows[0].concentration;
    let wrap = |d: f64| {
        let d = d.rem_euclid(g.length());
        d.min(g.length() - d)
    };
    let (dx, dy) = (wrap(c0.x - center[0]), wrap(c0.y - center[1]));
    let located = dx <= reach && dy <= reach;
    let finite = a.blowup_integral.is_finite() && b.blowup_integral.is_finite();
    let (r1, r2) = (a.monotonicity[0].sup_ratio, b.monotonicity[0].sup_ratio);
    let change = (r1 - r2).abs() / r1.abs().max(r2.abs());
    Outcome {
        id: 11,
        name: "monitors",
        pass: located && finite && r1.is_finite() && r2.is_finite() && change < 0.1,
        detail: format!(
            "concentration at ({:.3}, {:.3}) vs bump ({}, {}), offset ({dx:.3}, {dy:.3}) within stride {reach:.3}; \
             blowup integral {:.4e} / {:.4e}; sup rho {r1:.6e} -> {r2:.6e}, change {:.3}% (limit 10%)",
            c0.x,
            c0.y,
            center[0],
            center[1],
            a.blowup_integral,
            b.blowup_integral,
            100.0 * change
        ),
    }
}

fn criterion_12() -> Outcome {
    let cfg = config(&format!(
        "[grid]\nn = 32\n\n{}\n[solver]\ndt = 1e-3\nt_end = 0.02\n\n\
         [initial]\npreset = \"twist\"\namplitude = 0.5\n\n[initial.flow]\namplitude = 0.5\nmode = 2\n",
        coefficients(REFERENCE_ALPHAS, 0.5, 10.0, [0.25, 0.3, 0.2])
    ));
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut ledgers = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        if let Err(e) = simulate(&cfg, Some(&out), SEED) {
            return Outcome {
                id: 12,
                name: "determinism",
                pass: false,
                detail: e.to_string(),
            };
        }
        ledgers.push(fs::read(out.join("ledger.csv")).expect("ledger written"));
    }
    Outcome {
        id: 12,
        name: "determinism",
        pass: ledgers[0] == ledgers[1] && !ledgers[0].is_empty(),
        detail: format!(
            "ledgers of {} bytes, identical: {}",
            ledgers[0].len(),
            ledgers[0] == ledgers[1]
        ),
    }
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();
    let (r, s) = timed(|| suites::h_equivalence(SEED, 20));
    outcomes.push(suite(1, "molecular-field oracle equivalence", r, s, Some(10.0)));
    let (r, s) = timed(|| suites::wp_dot_n_identity(SEED, 20));
    outcomes.push(suite(2, "div W_p . n identity", r, s, None));
    let (r, s) = timed(|| suites::equal_constants(SEED, 20));
    outcomes.push(suite(3, "equal-constant reduction", r, s, None));
    let (r, s) = timed(|| suites::admissibility(SEED, 100));
    outcomes.push(suite(4, "admissibility oracle", r, s, Some(5.0)));
    let (r, s) = timed(|| suites::stress_power(SEED, 20));
    outcomes.push(suite(5, "stress-power identity", r, s, None));
    outcomes.extend(criterion_6_and_9());
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    let (r, s) = timed(|| suites::variational_consistency(SEED, 10));
    outcomes.push(suite(10, "variational consistency of h", r, s, None));
    outcomes.push(criterion_11());
    outcomes.push(criterion_12());

    outcomes.sort_by_key(|o| o.id);
    for o in &outcomes {
        println!(
            "{} criterion {:>2} ({}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
