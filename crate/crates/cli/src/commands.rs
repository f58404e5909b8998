//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use elsim_core::diagnostics::{
    energy_law_residual, max_energy_increase, monotonicity_report, read_ledger_csv, running_residuals,
    write_ledger_csv, Concentration, LocalRecorder, MonotonicityReport,
};
use elsim_core::dynamics::step_plan;
use elsim_core::snapshot::write_state;
use elsim_core::{EnergyLedger, LedgerRecorder, LedgerRow, Model, Observer, State};

use crate::config::{CoefficientVerdict, RunConfig};
use crate::error::{CliError, CliResult};
use crate::presets::initial_preset;
use crate::suites;

/// Passes every `stride`-th step and the final step to `inner`.
pub struct Strided<O> {
    pub inner: O,
    stride: usize,
    t0: f64,
    dt: f64,
    last: usize,
}

impl<O> Strided<O> {
    /// `stride = 0` keeps only the first and last steps.
    pub fn new(inner: O, stride: usize, t0: f64, dt: f64, last: usize) -> Self {
        Self {
            inner,
            stride,
            t0,
            dt,
            last,
        }
    }

    fn step_of(&self, t: f64) -> usize {
        ((t - self.t0) / self.dt).round() as usize
    }

    fn wants(&self, step: usize) -> bool {
        step == self.last
            || if self.stride == 0 {
                step == 0
            } else {
                step.is_multiple_of(self.stride)
            }
    }
}

impl<O: Observer> Observer for Strided<O> {
    fn observe(&mut self, model: &Model, state: &State) -> elsim_core::Result<()> {
        if self.wants(self.step_of(state.t)) {
            self.inner.observe(model, state)?;
        }
        Ok(())
    }
}

/// Writes `snapshots/step_<k>.bin`.
pub struct SnapshotWriter {
    dir: PathBuf,
    t0: f64,
    dt: f64,
    pub written: Vec<PathBuf>,
}

impl Observer for SnapshotWriter {
    fn observe(&mut self, model: &Model, state: &State) -> elsim_core::Result<()> {
        let step = ((state.t - self.t0) / self.dt).round() as usize;
        let path = self.dir.join(format!("step_{step:07}.bin"));
        let mut out = BufWriter::new(File::create(&path)?);
        write_state(&mut out, &model.grid, state)?;
        out.flush()?;
        self.written.push(path);
        Ok(())
    }
}

/// Everything a `run` produced, including on numerical failure.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub verdict: CoefficientVerdict,
    /// `None` on success, the numerical failure otherwise.
    pub failure: Option<elsim_core::Error>,
    pub steps: usize,
    pub dt: f64,
    pub rows: Vec<LedgerRow>,
    pub residual: f64,
    pub max_energy_increase: f64,
    pub blowup_integral: f64,
    /// Largest concentration over all ledger rows.
    pub concentration: Option<Concentration>,
    pub monotonicity: Vec<MonotonicityReport>,
    pub final_state: Option<State>,
    pub snapshots: Vec<PathBuf>,
}

impl RunReport {
    pub fn series(&self) -> Vec<EnergyLedger> {
        self.rows.iter().map(|r| r.ledger).collect()
    }

    pub fn verdict_text(&self, seed: u64) -> String {
        let mut s = String::new();
        s.push_str(&format!("coefficients: {}\n", self.verdict.describe()));
        s.push_str(&format!(
            "admissible_3d: {}\n",
            if self.verdict.admissible_3d { "yes" } else { "no" }
        ));
        match &self.failure {
            None => s.push_str("status: ok\n"),
            Some(m) => s.push_str(&format!("status: failed: {m}\n")),
        }
        s.push_str(&format!("seed: {seed}\n"));
        s.push_str(&format!("steps: {}\n", self.steps));
        s.push_str(&format!("dt: {:.16e}\n", self.dt));
        s.push_str(&format!("ledger_rows: {}\n", self.rows.len()));
        s.push_str(&format!("energy_law_residual: {:.16e}\n", self.residual));
        s.push_str(&format!("max_energy_increase: {:.16e}\n", self.max_energy_increase));
        s.push_str(&format!("blowup_integral: {:.16e}\n", self.blowup_integral));
        if let Some(c) = self.concentration {
            s.push_str(&format!(
                "concentration_max: {:.16e} at ({:.6}, {:.6})\n",
                c.value, c.x, c.y
            ));
        }
        for (k, m) in self.monotonicity.iter().enumerate() {
            s.push_str(&format!("sup_ratio[{k}]: {:.16e}\n", m.sup_ratio));
        }
        s
    }
}

fn write_local_csv(path: &Path, rec: &LocalRecorder, rep: &MonotonicityReport) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "t,energy,energy_2r,total,d_visc,d_relax,lhs,shape,ratio")?;
    for (k, p) in rec.samples.iter().enumerate() {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.t, p.energy, p.energy_2r, p.total, p.d_visc, p.d_relax, rep.lhs[k], rep.shape[k], rep.ratio[k]
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the simulation described by `cfg`, writing artifacts into `out_dir`
/// when given. Numerical failures still produce the partial ledger and the
/// verdict; the returned report then carries `failure`.
pub fn simulate(cfg: &RunConfig, out_dir: Option<&Path>, seed: u64) -> CliResult<RunReport> {
    simulate_with(cfg, out_dir, seed, &mut [])
}

/// [`simulate`] with additional observers called after every step.
pub fn simulate_with(
    cfg: &RunConfig,
    out_dir: Option<&Path>,
    seed: u64,
    extra: &mut [&mut dyn Observer],
) -> CliResult<RunReport> {
    cfg.validate()?;
    let model = cfg.model()?;
    let solver = *cfg.solver()?;
    let initial = initial_preset(cfg.initial()?, &model.grid)?;
    let verdict = CoefficientVerdict::new(&model.visc);
    let sc = solver.solver_config();
    let t0 = initial.t;
    let (steps, dt) = step_plan(t0, solver.t_end, sc.dt)?;
    let l = model.grid.length();
    let radius = cfg.monitors.radius_for(l);

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir.join("snapshots"))?;
        let mut echo = cfg.clone();
        echo.output.directory = dir.to_path_buf();
        fs::write(dir.join("config.toml"), echo.to_toml())?;
    }
    let ledger_stride = cfg.output.ledger_stride;
    let mut ledger = Strided::new(
        LedgerRecorder::new(radius, cfg.monitors.stride),
        ledger_stride,
        t0,
        dt,
        steps,
    );
    let mut locals: Vec<Strided<LocalRecorder>> = cfg
        .monitors
        .points
        .iter()
        .map(|p| Strided::new(LocalRecorder::new((p[0], p[1]), radius), ledger_stride, t0, dt, steps))
        .collect();
    let mut snaps = out_dir.map(|dir| {
        Strided::new(
            SnapshotWriter {
                dir: dir.join("snapshots"),
                t0,
                dt,
                written: Vec::new(),
            },
            cfg.output.snapshot_stride,
            t0,
            dt,
            steps,
        )
    });

    let result = {
        let mut obs: Vec<&mut dyn Observer> = vec![&mut ledger];
        for l in locals.iter_mut() {
            obs.push(l);
        }
        if let Some(s) = snaps.as_mut() {
            obs.push(s);
        }
        for o in extra.iter_mut() {
            obs.push(&mut **o);
        }
        elsim_core::run(&model, initial, &sc, solver.t_end, 1, &mut obs)
    };
    let (failure, final_state) = match result {
        Ok(tr) => (None, Some(tr.final_state)),
        Err(e @ (elsim_core::Error::NonFinite { .. } | elsim_core::Error::UnitDrift { .. })) => (Some(e), None),
        Err(e) => return Err(e.into()),
    };

    let rows = if ledger.inner.series().is_empty() {
        Vec::new()
    } else {
        ledger.inner.rows()?
    };
    let series: Vec<EnergyLedger> = rows.iter().map(|r| r.ledger).collect();
    let residual = if series.is_empty() {
        0.0
    } else {
        energy_law_residual(&series)?
    };
    let concentration = rows
        .iter()
        .map(|r| r.concentration)
        .fold(None, |best: Option<Concentration>, c| match best {
            Some(b) if b.value >= c.value => Some(b),
            _ => Some(c),
        });
    let mut monotonicity = Vec::new();
    for l in &locals {
        if !l.inner.samples.is_empty() {
            monotonicity.push(monotonicity_report(&l.inner.samples)?);
        }
    }
    let report = RunReport {
        verdict,
        failure,
        steps,
        dt,
        residual,
        max_energy_increase: max_energy_increase(&series),
        blowup_integral: ledger.inner.blowup_integral(),
        concentration,
        monotonicity,
        final_state,
        snapshots: snaps.map(|s| s.inner.written).unwrap_or_default(),
        rows,
    };
    if let Some(dir) = out_dir {
        let mut out = BufWriter::new(File::create(dir.join("ledger.csv"))?);
        write_ledger_csv(&mut out, &report.rows)?;
        out.flush()?;
        for (k, (l, m)) in locals.iter().zip(&report.monotonicity).enumerate() {
            write_local_csv(&dir.join(format!("local_{k}.csv")), &l.inner, m)?;
        }
        fs::write(dir.join("verdict.txt"), report.verdict_text(seed))?;
    }
    Ok(report)
}

/// `run`: simulate and write the run directory; numerical failure exits 3
/// after the partial artifacts are on disk.
pub fn cmd_run(cfg: &RunConfig, out: Option<PathBuf>, seed: u64, quiet: bool) -> CliResult<()> {
    let dir = out.unwrap_or_else(|| cfg.output.directory.clone());
    if !CoefficientVerdict::new(&cfg.coefficients.viscosities()?).admissible_2d {
        eprintln!("warning: coefficients are not admissible in 2-D; the energy law is not guaranteed");
    }
    let report = simulate(cfg, Some(&dir), seed)?;
    if !quiet {
        print!("{}", report.verdict_text(seed));
        println!("output: {}", dir.display());
    }
    match report.failure {
        None => Ok(()),
        Some(e) => Err(CliError::Numerical(e)),
    }
}

pub fn coefficient_report(cfg: &RunConfig) -> CliResult<String> {
    let visc = cfg.coefficients.viscosities()?;
    let d = visc.derived;
    let v = CoefficientVerdict::new(&visc);
    let mut s = String::new();
    s.push_str(&format!("gamma1 = {}\n", d.gamma1));
    s.push_str(&format!("gamma2 = {}\n", d.gamma2));
    s.push_str(&format!("mu1 = {}\n", d.mu1));
    s.push_str(&format!("mu2 = {}\n", d.mu2));
    s.push_str(&format!("beta = ({}, {}, {})\n", d.beta1, d.beta2, d.beta3));
    s.push_str(&format!("2-D margin = {}\n", v.margin_2d));
    s.push_str(&format!("{}\n", v.describe()));
    s.push_str(&format!(
        "3-D: {}\n",
        if v.admissible_3d {
            "admissible"
        } else {
            "NOT admissible"
        }
    ));
    Ok(s)
}

pub fn cmd_check_coefficients(cfg: &RunConfig, quiet: bool) -> CliResult<()> {
    let text = coefficient_report(cfg)?;
    if !quiet {
        print!("{text}");
    }
    Ok(())
}

pub fn cmd_verify_identities(seed: u64, quiet: bool) -> CliResult<()> {
    let reports = suites::all(seed);
    if !quiet {
        print!("{}", suites::format_table(&reports));
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failing suites: {}", failed.join(", "))))
    }
}

/// Result of re-reading a ledger file.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub rows: usize,
    pub residual: f64,
    pub sign_violations: Vec<String>,
    /// Rows whose residual column differs from the recomputed value.
    pub residual_mismatches: Vec<usize>,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.sign_violations.is_empty() && self.residual_mismatches.is_empty()
    }
}

pub fn certify(path: &Path) -> CliResult<Certificate> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    let rows = read_ledger_csv(BufReader::new(file)).map_err(|e| CliError::Parse(e.to_string()))?;
    let series: Vec<EnergyLedger> = rows.iter().map(|r| r.ledger).collect();
    let running = running_residuals(&series)?;
    Ok(Certificate {
        rows: rows.len(),
        residual: energy_law_residual(&series)?,
        sign_violations: series.iter().filter_map(|l| l.sign_violation()).collect(),
        residual_mismatches: rows
            .iter()
            .zip(&running)
            .enumerate()
            .filter(|(_, (row, r))| row.residual.to_bits() != r.to_bits())
            .map(|(k, _)| k)
            .collect(),
    })
}

pub fn cmd_certify_ledger(path: &Path, quiet: bool) -> CliResult<()> {
    let c = certify(path)?;
    if !quiet {
        println!("rows: {}", c.rows);
        println!("energy_law_residual: {:.16e}", c.residual);
        println!("sign_violations: {}", c.sign_violations.len());
        for v in &c.sign_violations {
            println!("  {v}");
        }
        println!("residual_column_mismatches: {}", c.residual_mismatches.len());
    }
    if c.ok() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} sign violations, {} residual mismatches",
            c.sign_violations.len(),
            c.residual_mismatches.len()
        )))
    }
}
