//! Energies, the dissipation ledger and singularity monitors.
//!
//! Time integrals of dissipation use piecewise cubic interpolation through
//! four neighbouring samples, integrated exactly by two-point Gauss rules.
//! The quadrature error is fourth order in the sample spacing, so a run with
//! a ledger row per step measures the integrator's own error.
//!
//! `‖·‖_{L∞}` is the grid maximum, a lower bound of the true supremum.

use std::io::{BufRead, Write};

use crate::coefficients::TOL_FORM;
use crate::dynamics::{Model, Observer, State};
use crate::error::{Error, Result};
use crate::fields::{Axis, Director, Grid, ScalarField, Spectrum, Velocity};
use crate::leslie_stress::{strain, velocity_gradient};
use crate::oseen_frank::{density, molecular_field, ElasticState};
use crate::tensor::{cross, matvec, norm2, quad, Mat3, ZERO33};

/// Global energy and the integrands of the dissipation, all integrated over the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLedger {
    pub t: f64,
    /// `∫ W + (Re/(2(1 − γ)))|v|²`.
    pub energy: f64,
    /// `(γ/(1 − γ)) ∫ |∇v|²`.
    pub d_visc: f64,
    /// `(1/γ1) ∫ |n × h|²`.
    pub d_relax: f64,
    /// `(α1 + γ2²/γ1) ∫ (nn:D)²`.
    pub d_beta1: f64,
    /// `α4 ∫ D:D`.
    pub d_beta2: f64,
    /// `(α5 + α6 − γ2²/γ1) ∫ |D·n|²`.
    pub d_beta3: f64,
}

impl EnergyLedger {
    /// Total dissipation rate.
    pub fn dissipation(&self) -> f64 {
        self.d_visc + self.d_relax + self.d_beta1 + self.d_beta2 + self.d_beta3
    }

    /// Describes the first violated sign condition. The viscous form may dip
    /// below zero only by `TOL_FORM` relative to the magnitudes involved,
    /// which bound `‖D‖²` up to the weights.
    pub fn sign_violation(&self) -> Option<String> {
        if self.d_visc < 0.0 {
            return Some(format!("d_visc = {:e} < 0 at t = {}", self.d_visc, self.t));
        }
        if self.d_relax < 0.0 {
            return Some(format!("d_relax = {:e} < 0 at t = {}", self.d_relax, self.t));
        }
        let form = self.d_beta1 + self.d_beta2 + self.d_beta3;
        let scale = self.d_visc + self.d_beta1.abs() + self.d_beta2.abs() + self.d_beta3.abs();
        if form < -TOL_FORM * scale {
            return Some(format!("d_beta1 + d_beta2 + d_beta3 = {form:e} < 0 at t = {}", self.t));
        }
        None
    }
}

/// `e += w |v|²`.
fn add_speed_sq(e: &mut ScalarField, v: &Velocity, w: f64) {
    for (x, (v1, v2)) in e.0.iter_mut().zip(v.0[0].0.iter().zip(&v.0[1].0)) {
        *x += w * (v1 * v1 + v2 * v2);
    }
}

/// Fields shared by the ledger and the monitors of one state.
struct Measured {
    el: ElasticState,
    h: Director,
    grad_v: [[ScalarField; 2]; 2],
}

impl Measured {
    fn new(model: &Model, state: &State) -> Self {
        let grid = &model.grid;
        let el = ElasticState::relaxed(grid, state.n.clone());
        let h = molecular_field(grid, &el, &model.elastic);
        let grad_v = velocity_gradient(grid, &state.v);
        Self { el, h, grad_v }
    }

    #[inline]
    fn grad_v_at(&self, idx: usize) -> Mat3 {
        let mut g = ZERO33;
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = self.grad_v[i][j].0[idx];
            }
        }
        g
    }

    fn energy_density(&self, model: &Model, state: &State) -> ScalarField {
        let w = model.kinetic_weight();
        let mut e = density(&self.el, &model.elastic);
        add_speed_sq(&mut e, &state.v, w);
        e
    }

    /// `|v|² + |∇n|²`.
    fn concentration_density(&self, state: &State) -> ScalarField {
        let mut e = self.el.grad_sq();
        add_speed_sq(&mut e, &state.v, 1.0);
        e
    }

    fn grad_v_sq(&self) -> ScalarField {
        ScalarField(
            (0..self.el.len())
                .map(|idx| self.grad_v.iter().flatten().map(|f| f.0[idx] * f.0[idx]).sum())
                .collect(),
        )
    }

    fn relax_density(&self) -> ScalarField {
        ScalarField(
            (0..self.el.len())
                .map(|idx| norm2(&cross(&self.el.n_at(idx), &self.h.at(idx))))
                .collect(),
        )
    }

    fn ledger(&self, model: &Model, state: &State) -> EnergyLedger {
        let grid = &model.grid;
        let dc = &model.visc.derived;
        let gamma = model.visc.leslie.gamma;
        let (mut gv, mut relax, mut b1, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for idx in 0..self.el.len() {
            let g = self.grad_v_at(idx);
            let d = strain(&g);
            let n = self.el.n_at(idx);
            gv += g.iter().flatten().map(|x| x * x).sum::<f64>();
            relax += norm2(&cross(&n, &self.h.at(idx)));
            let nnd = quad(&d, &n, &n);
            b1 += nnd * nnd;
            b2 += d.iter().flatten().map(|x| x * x).sum::<f64>();
            b3 += norm2(&matvec(&d, &n));
        }
        let da = grid.cell_area();
        EnergyLedger {
            t: state.t,
            energy: grid.integrate(&self.energy_density(model, state)),
            d_visc: gamma / (1.0 - gamma) * gv * da,
            d_relax: relax * da / dc.gamma1,
            d_beta1: dc.beta1 * b1 * da,
            d_beta2: dc.beta2 * b2 * da,
            d_beta3: dc.beta3 * b3 * da,
        }
    }

    fn blowup(&self, grid: &Grid) -> f64 {
        let curl = (0..grid.size())
            .map(|idx| (self.grad_v[0][1].0[idx] - self.grad_v[1][0].0[idx]).abs())
            .fold(0.0, f64::max);
        curl + self.el.grad_sq().max_abs()
    }
}

/// Pointwise energy density `e(v, n) = W(n, ∇n) + (Re/(2(1 − γ)))|v|²`.
pub fn energy_density(model: &Model, state: &State) -> ScalarField {
    let el = ElasticState::relaxed(&model.grid, state.n.clone());
    let w = model.kinetic_weight();
    let mut e = density(&el, &model.elastic);
    add_speed_sq(&mut e, &state.v, w);
    e
}

/// Total energy `∫ e(v, n)`.
pub fn energy(model: &Model, state: &State) -> f64 {
    model.grid.integrate(&energy_density(model, state))
}

/// Energy and the five dissipation integrals at one state.
pub fn ledger(model: &Model, state: &State) -> EnergyLedger {
    Measured::new(model, state).ledger(model, state)
}

/// Cumulative integrals `∫_{t0}^{t_i} f` of samples at increasing times.
pub fn cumulative_integral(times: &[f64], values: &[f64]) -> Vec<f64> {
    let m = times.len();
    let mut out = vec![0.0; m];
    if m < 2 {
        return out;
    }
    // nodes per local interpolant
    let k = m.min(4);
    let g = 0.5 / 3f64.sqrt();
    for i in 0..m - 1 {
        let w = i.saturating_sub(1).min(m - k);
        let nodes = &times[w..w + k];
        let vals = &values[w..w + k];
        let (a, b) = (times[i], times[i + 1]);
        let mid = 0.5 * (a + b);
        let h = b - a;
        let piece = 0.5 * h * (lagrange(nodes, vals, mid - g * h) + lagrange(nodes, vals, mid + g * h));
        out[i + 1] = out[i] + piece;
    }
    out
}

fn lagrange(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for (i, (&xi, &yi)) in nodes.iter().zip(vals).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i {
                l *= (x - xj) / (xi - xj);
            }
        }
        s += yi * l;
    }
    s
}

/// Signed balance `E(t) + ∫₀ᵗ dissipation − E(0)` at every sample, divided by
/// `E(0)` unless it vanishes.
pub fn running_residuals(series: &[EnergyLedger]) -> Result<Vec<f64>> {
    let first = series.first().ok_or(Error::EmptySeries)?;
    let times: Vec<f64> = series.iter().map(|l| l.t).collect();
    let rates: Vec<f64> = series.iter().map(EnergyLedger::dissipation).collect();
    let dissipated = cumulative_integral(&times, &rates);
    let scale = if first.energy > 0.0 { first.energy } else { 1.0 };
    Ok(series
        .iter()
        .zip(dissipated)
        .map(|(l, d)| (l.energy + d - first.energy) / scale)
        .collect())
}

/// `max_t |E(t) + ∫₀ᵗ dissipation − E(0)|`, relative to `E(0)` when positive.
pub fn energy_law_residual(series: &[EnergyLedger]) -> Result<f64> {
    Ok(running_residuals(series)?.into_iter().fold(0.0, |m, r| m.max(r.abs())))
}

/// Largest energy increase between consecutive samples, zero if `E` never grows.
pub fn max_energy_increase(series: &[EnergyLedger]) -> f64 {
    series.windows(2).map(|w| w[1].energy - w[0].energy).fold(0.0, f64::max)
}

/// Terms of the higher-order energy `E_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HigherEnergy {
    /// `‖n − n0‖²`.
    pub anchor: f64,
    /// `(Re/(2(1 − γ)))‖v‖²`.
    pub kinetic: f64,
    /// `∫ W`.
    pub elastic: f64,
    /// `a‖Δˢ∇n‖²`.
    pub gradient: f64,
    /// `(k1 − a)‖Δˢ div n‖²`.
    pub splay: f64,
    /// `(k2 − a)‖n × Δˢ curl n‖²`.
    pub twist: f64,
    /// `(k3 − a)‖n · Δˢ curl n‖²`.
    pub bend: f64,
    /// `(Re/(2(1 − γ)))‖Δˢ v‖²`.
    pub kinetic_high: f64,
}

impl HigherEnergy {
    pub fn total(&self) -> f64 {
        self.anchor
            + self.kinetic
            + self.elastic
            + self.gradient
            + self.splay
            + self.twist
            + self.bend
            + self.kinetic_high
    }
}

/// `E_s` relative to the reference director `n0`, every derivative taken spectrally.
pub fn higher_energy(model: &Model, state: &State, s: u32, n0: &Director) -> HigherEnergy {
    let grid = &model.grid;
    let k = &model.elastic;
    let w = model.kinetic_weight();
    let el = ElasticState::relaxed(grid, state.n.clone());
    let pow = |sp: &Spectrum| {
        let mut out = sp.clone();
        grid.apply_real(&mut out, |a, b| grid.laplacian_symbol(a, b).powi(s as i32));
        out
    };
    let n_hat = el.spectrum();
    let ls: [Spectrum; 3] = std::array::from_fn(|c| pow(&n_hat[c]));
    // ‖Δˢ∇n‖² in spectral space
    let mut grad = 0.0;
    for lc in &ls {
        let mut g = lc.clone();
        grid.apply_real(&mut g, |a, b| (-grid.laplacian_symbol(a, b)).sqrt());
        grad += grid.spectral_l2_norm(&g).powi(2);
    }
    let mut div_hat = grid.diff_spectrum(&ls[0], Axis::X1);
    div_hat.axpy(1.0, &grid.diff_spectrum(&ls[1], Axis::X2));
    let curl = grid.inverse_vector(&grid.curl3_spectrum(&ls));
    let (mut twist, mut bend) = (0.0, 0.0);
    for idx in 0..grid.size() {
        let n = el.n_at(idx);
        let c = curl.at(idx);
        twist += norm2(&cross(&n, &c));
        let nc = n[0] * c[0] + n[1] * c[1] + n[2] * c[2];
        bend += nc * nc;
    }
    let da = grid.cell_area();
    let v_hat = grid.forward_vector(&state.v);
    let high: f64 = v_hat.iter().map(|sp| grid.spectral_l2_norm(&pow(sp)).powi(2)).sum();
    let mut diff = state.n.clone();
    diff.axpy(-1.0, n0);
    HigherEnergy {
        anchor: grid.l2_norm(&diff).powi(2),
        kinetic: w * grid.l2_norm(&state.v).powi(2),
        elastic: grid.integrate(&density(&el, k)),
        gradient: k.a * grad,
        splay: (k.k1 - k.a) * grid.spectral_l2_norm(&div_hat).powi(2),
        twist: (k.k2 - k.a) * twist * da,
        bend: (k.k3 - k.a) * bend * da,
        kinetic_high: w * high,
    }
}

/// `∫_{B_R(x0)} e(v, n)`.
pub fn local_energy(model: &Model, state: &State, center: (f64, f64), radius: f64) -> Result<f64> {
    model.grid.ball_integral(&energy_density(model, state), center, radius)
}

/// `∫_{B_R(x0)} |v|² + |∇n|²`, the quantity in the concentration criterion.
pub fn local_concentration(grid: &Grid, state: &State, center: (f64, f64), radius: f64) -> Result<f64> {
    let el = ElasticState::relaxed(grid, state.n.clone());
    let mut e = el.grad_sq();
    add_speed_sq(&mut e, &state.v, 1.0);
    grid.ball_integral(&e, center, radius)
}

/// Largest ball integral of `|v|² + |∇n|²` over strided grid centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration {
    pub value: f64,
    pub x: f64,
    pub y: f64,
}

fn concentration_of(grid: &Grid, e: &ScalarField, radius: f64, stride: usize) -> Result<Concentration> {
    let max = grid.length() / 2.0;
    if !(radius > 0.0 && radius <= max) {
        return Err(Error::RadiusTooLarge { radius, max });
    }
    let stride = stride.max(1);
    let n = grid.n();
    // in row offset dj the disk around a grid point is a periodic run of
    // `count` cells centered on the point's column (odd unless the full row)
    let origin = grid.point(0);
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for dj in 0..n {
        let count = (0..n)
            .filter(|&di| grid.periodic_distance(grid.point(dj * n + di), origin) <= radius)
            .count();
        if count > 0 {
            rows.push((dj, count));
        }
    }
    // per-row prefix sums turn each interval into two lookups
    let mut prefix = vec![0.0; n * (n + 1)];
    for j in 0..n {
        let p = &mut prefix[j * (n + 1)..(j + 1) * (n + 1)];
        for i in 0..n {
            p[i + 1] = p[i] + e.0[j * n + i];
        }
    }
    let interval = |j: usize, start: usize, count: usize| {
        let p = &prefix[j * (n + 1)..(j + 1) * (n + 1)];
        let end = start + count;
        if end <= n {
            p[end] - p[start]
        } else {
            p[n] - p[start] + p[end - n]
        }
    };
    let mut best: Option<Concentration> = None;
    for j in (0..n).step_by(stride) {
        for i in (0..n).step_by(stride) {
            let sum: f64 = rows
                .iter()
                .map(|&(dj, count)| {
                    let start = if count == n { 0 } else { (i + n - count / 2) % n };
                    interval((j + dj) % n, start, count)
                })
                .sum();
            let value = sum * grid.cell_area();
            // strict comparison keeps the lowest index on ties
            if best.is_none_or(|b| value > b.value) {
                let (x, y) = grid.point(j * n + i);
                best = Some(Concentration { value, x, y });
            }
        }
    }
    Ok(best.expect("grid has at least one center"))
}

/// Maximum over centers on every `stride`-th grid point of `∫_{B_R}|v|² + |∇n|²`.
pub fn concentration_max(grid: &Grid, state: &State, radius: f64, stride: usize) -> Result<Concentration> {
    let el = ElasticState::relaxed(grid, state.n.clone());
    let mut e = el.grad_sq();
    add_speed_sq(&mut e, &state.v, 1.0);
    concentration_of(grid, &e, radius, stride)
}

/// `‖curl v‖_{L∞} + ‖∇n‖²_{L∞}`, whose time integral must diverge at a singular time.
pub fn blowup_indicator(grid: &Grid, state: &State) -> f64 {
    let grad_v = velocity_gradient(grid, &state.v);
    let curl = (0..grid.size())
        .map(|idx| (grad_v[0][1].0[idx] - grad_v[1][0].0[idx]).abs())
        .fold(0.0, f64::max);
    curl + ElasticState::relaxed(grid, state.n.clone()).grad_sq().max_abs()
}

/// One row of the ledger file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub ledger: EnergyLedger,
    /// Signed running energy-law residual up to this row.
    pub residual: f64,
    /// Instantaneous blow-up indicator.
    pub blowup: f64,
    pub concentration: Concentration,
}

pub const LEDGER_HEADER: &str = "t,E,d_visc,d_relax,d_beta1,d_beta2,d_beta3,residual,blowup,conc_max,conc_x,conc_y";

/// Recomputes the residual column from the ledger entries.
pub fn fill_residuals(rows: &mut [LedgerRow]) -> Result<()> {
    let series: Vec<EnergyLedger> = rows.iter().map(|r| r.ledger).collect();
    for (row, r) in rows.iter_mut().zip(running_residuals(&series)?) {
        row.residual = r;
    }
    Ok(())
}

pub fn write_ledger_csv(mut out: impl Write, rows: &[LedgerRow]) -> Result<()> {
    writeln!(out, "{LEDGER_HEADER}")?;
    for r in rows {
        let l = &r.ledger;
        let vals = [
            l.t,
            l.energy,
            l.d_visc,
            l.d_relax,
            l.d_beta1,
            l.d_beta2,
            l.d_beta3,
            r.residual,
            r.blowup,
            r.concentration.value,
            r.concentration.x,
            r.concentration.y,
        ];
        let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_ledger_csv(input: impl BufRead) -> Result<Vec<LedgerRow>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::EmptySeries)??;
    if header.trim() != LEDGER_HEADER {
        return Err(Error::LedgerFormat(format!("unexpected header `{}`", header.trim())));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::LedgerFormat(format!("line {}: {e}", k + 2)))?;
        if vals.len() != 12 {
            return Err(Error::LedgerFormat(format!(
                "line {}: expected 12 columns, found {}",
                k + 2,
                vals.len()
            )));
        }
        rows.push(LedgerRow {
            ledger: EnergyLedger {
                t: vals[0],
                energy: vals[1],
                d_visc: vals[2],
                d_relax: vals[3],
                d_beta1: vals[4],
                d_beta2: vals[5],
                d_beta3: vals[6],
            },
            residual: vals[7],
            blowup: vals[8],
            concentration: Concentration {
                value: vals[9],
                x: vals[10],
                y: vals[11],
            },
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(rows)
}

/// Observer producing ledger rows with the concentration monitor attached.
#[derive(Debug, Clone)]
pub struct LedgerRecorder {
    radius: f64,
    stride: usize,
    rows: Vec<LedgerRow>,
}

impl LedgerRecorder {
    /// `radius` and `stride` configure [`concentration_max`].
    pub fn new(radius: f64, stride: usize) -> Self {
        Self {
            radius,
            stride,
            rows: Vec::new(),
        }
    }

    /// Rows with the residual column filled.
    pub fn rows(&self) -> Result<Vec<LedgerRow>> {
        let mut rows = self.rows.clone();
        fill_residuals(&mut rows)?;
        Ok(rows)
    }

    pub fn series(&self) -> Vec<EnergyLedger> {
        self.rows.iter().map(|r| r.ledger).collect()
    }

    /// `∫ blowup_indicator dt` over the recorded samples.
    pub fn blowup_integral(&self) -> f64 {
        let times: Vec<f64> = self.rows.iter().map(|r| r.ledger.t).collect();
        let vals: Vec<f64> = self.rows.iter().map(|r| r.blowup).collect();
        cumulative_integral(&times, &vals).last().copied().unwrap_or(0.0)
    }
}

impl Observer for LedgerRecorder {
    fn observe(&mut self, model: &Model, state: &State) -> Result<()> {
        let m = Measured::new(model, state);
        let conc = concentration_of(&model.grid, &m.concentration_density(state), self.radius, self.stride)?;
        self.rows.push(LedgerRow {
            ledger: m.ledger(model, state),
            residual: 0.0,
            blowup: m.blowup(&model.grid),
            concentration: conc,
        });
        Ok(())
    }
}

/// Local quantities of the monotonicity inequality at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSample {
    pub t: f64,
    pub center: (f64, f64),
    pub radius: f64,
    /// `∫_{B_R} e`.
    pub energy: f64,
    /// `∫_{B_2R} e`.
    pub energy_2r: f64,
    /// `∫ e` over the torus.
    pub total: f64,
    /// `(γ/(1 − γ)) ∫_{B_R} |∇v|²`.
    pub d_visc: f64,
    /// `(1/(2γ1)) ∫_{B_R} |n × h|²`.
    pub d_relax: f64,
}

/// Local sample at `center`; needs `R ≤ L/4` so that `B_2R` fits on the torus.
pub fn local_sample(model: &Model, state: &State, center: (f64, f64), radius: f64) -> Result<LocalSample> {
    let grid = &model.grid;
    let max = grid.length() / 4.0;
    if !(radius > 0.0 && radius <= max) {
        return Err(Error::RadiusTooLarge { radius, max });
    }
    let m = Measured::new(model, state);
    let e = m.energy_density(model, state);
    let gamma = model.visc.leslie.gamma;
    let gamma1 = model.visc.derived.gamma1;
    Ok(LocalSample {
        t: state.t,
        center,
        radius,
        energy: grid.ball_integral(&e, center, radius)?,
        energy_2r: grid.ball_integral(&e, center, 2.0 * radius)?,
        total: grid.integrate(&e),
        d_visc: gamma / (1.0 - gamma) * grid.ball_integral(&m.grad_v_sq(), center, radius)?,
        d_relax: grid.ball_integral(&m.relax_density(), center, radius)? / (2.0 * gamma1),
    })
}

/// Observer collecting [`LocalSample`]s at a fixed ball.
#[derive(Debug, Clone)]
pub struct LocalRecorder {
    pub center: (f64, f64),
    pub radius: f64,
    pub samples: Vec<LocalSample>,
}

impl LocalRecorder {
    pub fn new(center: (f64, f64), radius: f64) -> Self {
        Self {
            center,
            radius,
            samples: Vec::new(),
        }
    }
}

impl Observer for LocalRecorder {
    fn observe(&mut self, model: &Model, state: &State) -> Result<()> {
        self.samples.push(local_sample(model, state, self.center, self.radius)?);
        Ok(())
    }
}

/// Left side of the local monotonicity inequality against its bound shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// Elapsed time `s` since the first sample.
    pub s: Vec<f64>,
    /// Local energy plus accumulated local dissipation.
    pub lhs: Vec<f64>,
    /// `(s^{1/2}/R)(1 + s/R²)^{1/2} E0`.
    pub shape: Vec<f64>,
    /// `(lhs − ∫_{B_2R} e0) / shape`, zero where the shape vanishes.
    pub ratio: Vec<f64>,
    /// `∫_{B_2R} e0`.
    pub initial_2r: f64,
    /// Supremum of the ratio over `s > 0`, an empirical lower estimate of the constant.
    pub sup_ratio: f64,
}

pub fn monotonicity_report(series: &[LocalSample]) -> Result<MonotonicityReport> {
    let first = *series.first().ok_or(Error::EmptySeries)?;
    if series
        .iter()
        .any(|p| p.center != first.center || p.radius != first.radius)
    {
        return Err(Error::InvalidConfig("local samples mix different balls".into()));
    }
    let r = first.radius;
    let s: Vec<f64> = series.iter().map(|p| p.t - first.t).collect();
    let rate: Vec<f64> = series.iter().map(|p| p.d_visc + p.d_relax).collect();
    let acc = cumulative_integral(&s, &rate);
    let lhs: Vec<f64> = series.iter().zip(&acc).map(|(p, a)| p.energy + a).collect();
    let shape: Vec<f64> = s
        .iter()
        .map(|&si| si.sqrt() / r * (1.0 + si / (r * r)).sqrt() * first.total)
        .collect();
    let ratio: Vec<f64> = lhs
        .iter()
        .zip(&shape)
        .map(|(l, b)| if *b > 0.0 { (l - first.energy_2r) / b } else { 0.0 })
        .collect();
    let sup_ratio = ratio
        .iter()
        .zip(&s)
        .filter(|(_, si)| **si > 0.0)
        .map(|(q, _)| *q)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MonotonicityReport {
        s,
        lhs,
        shape,
        ratio,
        initial_2r: first.energy_2r,
        sup_ratio: if sup_ratio.is_finite() { sup_ratio } else { 0.0 },
    })
}
