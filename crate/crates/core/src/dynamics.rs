//! Right-hand sides of the Ericksen-Leslie system, pressure recovery and time
//! stepping.
//!
//! ```text
//! v_t + v·∇v = −∇p + (γ/Re)Δv + ((1−γ)/Re)∇·(σ^L + σ^E),   div v = 0,
//! n_t + v·∇n + n × ((Ωn − μ1 h − μ2 Dn) × n) = 0.
//! ```
//!
//! Advection uses the skew-symmetric form `½[v·∇v + ∇·(v⊗v)]`, whose discrete
//! kinetic-energy contribution vanishes identically. The director equation is
//! never dealiased: truncating it would break the pointwise `n_t · n = 0`.

use crate::coefficients::{ElasticConstants, LeslieCoefficients, Viscosities};
use crate::error::{Error, Result};
use crate::fields::{Axis, Director, Grid, ScalarField, Spectrum, VectorField, Velocity};
use crate::leslie_stress::{ericksen_stress_point, leslie_stress_point, regularized_stress_point, strain, vorticity};
use crate::oseen_frank::{molecular_field, regularized_molecular_field, ElasticState};
use crate::tensor::{cross, matvec, Mat3, Vec3, ZERO33};

/// Bound on `‖div v‖_∞` for a valid state.
pub const TOL_DIV: f64 = 1e-10;
/// Bound on `|n_t · n|` for the director equation.
pub const TOL_PERP: f64 = 1e-10;
/// Pre-renormalization drift above which a step is rejected.
pub const MAX_UNIT_DRIFT: f64 = 0.1;
/// Bound on `max ||n| − 1|` for a valid state.
pub const TOL_UNIT_STATE: f64 = 1e-12;

/// Grid, viscosities and Frank constants of one simulation.
#[derive(Debug, Clone)]
pub struct Model {
    pub grid: Grid,
    pub visc: Viscosities,
    pub elastic: ElasticConstants,
}

impl Model {
    pub fn new(grid: Grid, leslie: LeslieCoefficients, elastic: ElasticConstants) -> Result<Self> {
        Ok(Self {
            grid,
            visc: Viscosities::new(leslie)?,
            elastic,
        })
    }

    /// Kinematic viscosity `γ/Re`.
    pub fn viscosity(&self) -> f64 {
        self.visc.leslie.gamma / self.visc.leslie.reynolds
    }

    /// Stress coupling `(1 − γ)/Re`.
    pub fn coupling(&self) -> f64 {
        (1.0 - self.visc.leslie.gamma) / self.visc.leslie.reynolds
    }

    /// Weight `Re/(2(1 − γ))` of the kinetic energy.
    pub fn kinetic_weight(&self) -> f64 {
        self.visc.leslie.reynolds / (2.0 * (1.0 - self.visc.leslie.gamma))
    }
}

/// Velocity, director and time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub v: Velocity,
    pub n: Director,
    pub t: f64,
}

impl State {
    /// Validates finiteness, incompressibility and the unit constraint.
    pub fn new(grid: &Grid, v: Velocity, n: Director, t: f64) -> Result<Self> {
        let state = Self::relaxed(v, n, t);
        state.check_finite()?;
        if state.v.len() != grid.size() || state.n.len() != grid.size() {
            return Err(Error::InvalidGrid("state does not match grid size".into()));
        }
        let div = grid.divergence2(&state.v).max_abs();
        if !(div <= TOL_DIV) {
            return Err(Error::NotSolenoidal(div));
        }
        let defect = state.n.unit_defect();
        if !(defect <= TOL_UNIT_STATE) {
            return Err(Error::DirectorNotUnit(defect));
        }
        Ok(state)
    }

    /// Builds a state without validation (mollified mode allows `|n| ≠ 1`).
    pub fn relaxed(v: Velocity, n: Director, t: f64) -> Self {
        Self { v, n, t }
    }

    /// Resting fluid with a constant director.
    pub fn uniform(grid: &Grid, b: Vec3) -> Self {
        let len = grid.size();
        Self::relaxed(VectorField::zeros(len), Director::from_fn(len, |_| b), 0.0)
    }

    fn check_finite(&self) -> Result<()> {
        if self.v.is_finite() && self.n.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { t: self.t })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Classical explicit fourth-order Runge-Kutta.
    Rk4,
    /// Integrating-factor RK4 with both Laplacians treated exactly.
    Imex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Retained wavenumber `K` of the mollified system; `None` steps the plain system.
    pub mollify_cutoff: Option<f64>,
    pub dealias: bool,
    pub renormalize: bool,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            scheme: Scheme::Rk4,
            mollify_cutoff: None,
            dealias: true,
            renormalize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        if let Some(k) = self.mollify_cutoff {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "mollifier cutoff K = {k} must be at least 1"
                )));
            }
        }
        Ok(())
    }
}

/// Time derivatives of the two unknowns.
#[derive(Debug, Clone)]
pub struct Rates {
    pub v: Velocity,
    pub n: Director,
}

/// Pieces of one right-hand-side evaluation.
struct Evaluation {
    /// Director rate `n_t`.
    n_t: Director,
    /// Unprojected momentum forcing without the viscous term.
    forcing: [Spectrum; 2],
    v_hat: [Spectrum; 2],
}

/// `(∇v)_ij` at one point from the gradient fields.
#[inline]
fn grad_at(g: &[[ScalarField; 2]; 2], idx: usize) -> Mat3 {
    let mut m = ZERO33;
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = g[i][j].0[idx];
        }
    }
    m
}

fn gradient_from_spectrum(grid: &Grid, v_hat: &[Spectrum; 2]) -> [[ScalarField; 2]; 2] {
    let d = [
        grid.diff_spectrum(&v_hat[0], Axis::X1),
        grid.diff_spectrum(&v_hat[1], Axis::X1),
        grid.diff_spectrum(&v_hat[0], Axis::X2),
        grid.diff_spectrum(&v_hat[1], Axis::X2),
    ];
    let mut f = grid.inverse_many(&d.iter().collect::<Vec<_>>()).into_iter();
    std::array::from_fn(|_| std::array::from_fn(|_| f.next().unwrap()))
}

/// `Σ_i ∂_i τ_ij − a_j` in spectral space from the six fields
/// `τ11, τ12, τ21, τ22, a1, a2`.
fn momentum_spectrum(grid: &Grid, fields: &[ScalarField; 6]) -> [Spectrum; 2] {
    let s = grid.forward_many(&fields.iter().collect::<Vec<_>>());
    std::array::from_fn(|j| {
        let mut f = grid.diff_spectrum(&s[j], Axis::X1);
        f.axpy(1.0, &grid.diff_spectrum(&s[2 + j], Axis::X2));
        f.axpy(-1.0, &s[4 + j]);
        f
    })
}

/// `−v·∇n − n × ((Ωn − μ1 h − μ2 Dn) × n)` at one point.
#[inline]
fn director_rate_point(mu1: f64, mu2: f64, n: &Vec3, g: &Mat3, h: &Vec3, adv: &Vec3) -> Vec3 {
    let w = matvec(&vorticity(g), n);
    let dn = matvec(&strain(g), n);
    let inner: Vec3 = std::array::from_fn(|c| w[c] - mu1 * h[c] - mu2 * dn[c]);
    let t = cross(n, &cross(&inner, n));
    std::array::from_fn(|c| -adv[c] - t[c])
}

fn evaluate(model: &Model, v: &Velocity, n: &Director, dealias: bool) -> Evaluation {
    let grid = &model.grid;
    let k = &model.elastic;
    let al = &model.visc.leslie;
    let dc = &model.visc.derived;
    let el = ElasticState::relaxed(grid, n.clone());
    let h = molecular_field(grid, &el, k);
    let v_hat = grid.forward_vector(v);
    let gv = gradient_from_spectrum(grid, &v_hat);
    let gn = el.gradient();
    let c = model.coupling();
    let len = grid.size();
    let mut n_t = Director::zeros(len);
    let mut fields: [ScalarField; 6] = std::array::from_fn(|_| ScalarField::zeros(len));
    for idx in 0..len {
        let nv = el.n_at(idx);
        let p = el.p_at(idx);
        let g = grad_at(&gv, idx);
        let vv = [v.0[0].0[idx], v.0[1].0[idx]];
        let adv: Vec3 = std::array::from_fn(|l| vv[0] * gn[0][l].0[idx] + vv[1] * gn[1][l].0[idx]);
        let rate = director_rate_point(dc.mu1, dc.mu2, &nv, &g, &h.at(idx), &adv);
        n_t.set(idx, rate);
        let w = matvec(&vorticity(&g), &nv);
        let big_n: Vec3 = std::array::from_fn(|l| rate[l] + adv[l] + w[l]);
        let sl = leslie_stress_point(al, &nv, &strain(&g), &big_n);
        let se = ericksen_stress_point(&nv, &p, k);
        for i in 0..2 {
            for j in 0..2 {
                fields[2 * i + j].0[idx] = c * (sl[i][j] + se[i][j]) - 0.5 * vv[i] * vv[j];
            }
        }
        for j in 0..2 {
            fields[4 + j].0[idx] = 0.5 * (vv[0] * g[0][j] + vv[1] * g[1][j]);
        }
    }
    let mut forcing = momentum_spectrum(grid, &fields);
    if dealias {
        for f in forcing.iter_mut() {
            grid.dealias_spectrum(f);
        }
    }
    Evaluation { n_t, forcing, v_hat }
}

fn evaluate_mollified(model: &Model, v: &Velocity, n: &Director, cutoff: f64) -> Evaluation {
    let grid = &model.grid;
    let k = &model.elastic;
    let dc = &model.visc.derived;
    let len = grid.size();
    let v_hat = grid.forward_vector(v);
    let jv_hat = v_hat.clone().map(|mut s| {
        grid.mollify_spectrum(&mut s, cutoff);
        s
    });
    let jv = grid.inverse_vector(&jv_hat);
    let mut jn_hat = grid.forward_vector(n);
    for s in jn_hat.iter_mut() {
        grid.mollify_spectrum(s, cutoff);
    }
    let jn = grid.inverse_vector(&jn_hat);
    let el = ElasticState::from_spectrum(grid, jn, jn_hat);
    let h = regularized_molecular_field(grid, &el, k);
    let gv = gradient_from_spectrum(grid, &jv_hat);
    let gn = el.gradient();
    let c = model.coupling();
    let mut r = Director::zeros(len);
    let mut fields: [ScalarField; 6] = std::array::from_fn(|_| ScalarField::zeros(len));
    for idx in 0..len {
        let nv = el.n_at(idx);
        let p = el.p_at(idx);
        let g = grad_at(&gv, idx);
        let vv = [jv.0[0].0[idx], jv.0[1].0[idx]];
        let hv = h.at(idx);
        let adv: Vec3 = std::array::from_fn(|l| vv[0] * gn[0][l].0[idx] + vv[1] * gn[1][l].0[idx]);
        r.set(idx, director_rate_point(dc.mu1, dc.mu2, &nv, &g, &hv, &adv));
        let s12 = regularized_stress_point(dc, &nv, &strain(&g), &hv);
        let se = ericksen_stress_point(&nv, &p, k);
        for i in 0..2 {
            for j in 0..2 {
                fields[2 * i + j].0[idx] = c * (s12[i][j] + se[i][j]);
            }
        }
        for j in 0..2 {
            fields[4 + j].0[idx] = vv[0] * g[0][j] + vv[1] * g[1][j];
        }
    }
    let mut forcing = momentum_spectrum(grid, &fields);
    for f in forcing.iter_mut() {
        grid.mollify_spectrum(f, cutoff);
    }
    let n_t = grid.mollify_vector(&r, cutoff);
    Evaluation { n_t, forcing, v_hat }
}

/// Linear symbols of the velocity and director equations at spectral index `(a, b)`.
fn linear_symbols(model: &Model, cutoff: Option<f64>, a: usize, b: usize) -> (f64, f64) {
    let grid = &model.grid;
    let lap = grid.laplacian_symbol(a, b);
    let phi2 = cutoff.map_or(1.0, |k| {
        let m = Grid::mollifier_symbol(grid.mode(a), grid.mode(b), k);
        m * m
    });
    let dn = 2.0 * model.elastic.a * model.visc.derived.mu1;
    (model.viscosity() * lap * phi2, dn * lap * phi2)
}

/// Projected velocity rate from an evaluation, with the viscous term added
/// when `viscous` is set.
fn velocity_rate(model: &Model, ev: &Evaluation, cutoff: Option<f64>, viscous: bool) -> Velocity {
    let grid = &model.grid;
    let mut f = ev.forcing.clone();
    if viscous {
        let n = grid.n();
        for a in 0..n {
            for b in 0..n {
                let (lv, _) = linear_symbols(model, cutoff, a, b);
                let idx = a * n + b;
                for c in 0..2 {
                    f[c].0[idx] += ev.v_hat[c].0[idx] * lv;
                }
            }
        }
    }
    grid.project_spectrum(&mut f);
    grid.inverse_vector(&f)
}

/// Director equation right-hand side `−v·∇n − n × ((Ωn − μ1 h − μ2 Dn) × n)`.
pub fn director_rhs(model: &Model, state: &State) -> Director {
    evaluate(model, &state.v, &state.n, false).n_t
}

/// Projected momentum right-hand side, with `N` taken from the simultaneously
/// evaluated director equation.
pub fn velocity_rhs(model: &Model, state: &State, dealias: bool) -> Velocity {
    let ev = evaluate(model, &state.v, &state.n, dealias);
    velocity_rate(model, &ev, None, true)
}

/// Both rates of the plain system.
pub fn rhs(model: &Model, state: &State, dealias: bool) -> Rates {
    let ev = evaluate(model, &state.v, &state.n, dealias);
    Rates {
        v: velocity_rate(model, &ev, None, true),
        n: ev.n_t,
    }
}

/// Both rates of the mollified system with cutoff `K`.
pub fn rhs_mollified(model: &Model, state: &State, cutoff: f64) -> Rates {
    let ev = evaluate_mollified(model, &state.v, &state.n, cutoff);
    Rates {
        v: velocity_rate(model, &ev, Some(cutoff), true),
        n: ev.n_t,
    }
}

/// Unprojected momentum forcing `−(v·∇)v + (γ/Re)Δv + ((1−γ)/Re)∇·σ`.
pub fn momentum_forcing(model: &Model, state: &State, dealias: bool) -> Velocity {
    let grid = &model.grid;
    let ev = evaluate(model, &state.v, &state.n, dealias);
    let mut f = ev.forcing;
    for (c, fc) in f.iter_mut().enumerate() {
        fc.axpy(model.viscosity(), &grid.laplacian_spectrum(&ev.v_hat[c]));
    }
    grid.inverse_vector(&f)
}

/// Zero-mean pressure solving `Δp = div F` for the unprojected forcing `F`,
/// so that `−∇p` is exactly the part removed by the projection.
pub fn pressure_field(model: &Model, state: &State, dealias: bool) -> ScalarField {
    let grid = &model.grid;
    let ev = evaluate(model, &state.v, &state.n, dealias);
    let n = grid.n();
    let mut p = Spectrum::zeros(grid.size());
    for a in 0..n {
        for b in 0..n {
            let lap = grid.laplacian_symbol(a, b);
            if lap == 0.0 {
                continue;
            }
            let idx = a * n + b;
            let (k1, k2) = (grid.derivative_wavenumber(a), grid.derivative_wavenumber(b));
            // the viscous term is solenoidal and does not contribute
            let f = ev.forcing[0].0[idx] * k1 + ev.forcing[1].0[idx] * k2;
            // div F = i k·F, p = div F / (−|k|²)
            p.0[idx] = crate::fields::Complex::new(-f.im, f.re) / lap;
        }
    }
    grid.inverse(&p)
}

struct Stepper<'a> {
    model: &'a Model,
    config: &'a SolverConfig,
}

impl Stepper<'_> {
    fn evaluation(&self, v: &Velocity, n: &Director) -> Evaluation {
        match self.config.mollify_cutoff {
            Some(k) => evaluate_mollified(self.model, v, n, k),
            None => evaluate(self.model, v, n, self.config.dealias),
        }
    }

    /// Full rates for RK4; rates minus the linear part for the integrating-factor scheme.
    fn rates(&self, v: &Velocity, n: &Director) -> (Velocity, Director) {
        let cutoff = self.config.mollify_cutoff;
        let ev = self.evaluation(v, n);
        match self.config.scheme {
            Scheme::Rk4 => (velocity_rate(self.model, &ev, cutoff, true), ev.n_t),
            Scheme::Imex => {
                let vr = velocity_rate(self.model, &ev, cutoff, false);
                let grid = &self.model.grid;
                let mut lin = grid.forward_vector(n);
                let size = grid.n();
                for a in 0..size {
                    for b in 0..size {
                        let (_, ln) = linear_symbols(self.model, cutoff, a, b);
                        for s in lin.iter_mut() {
                            s.0[a * size + b] *= ln;
                        }
                    }
                }
                let mut nr = ev.n_t;
                nr.axpy(-1.0, &grid.inverse_vector(&lin));
                (vr, nr)
            }
        }
    }

    /// Applies `exp(L τ)` to both unknowns.
    fn propagate(&self, v: &Velocity, n: &Director, tau: f64) -> (Velocity, Director) {
        let grid = &self.model.grid;
        let cutoff = self.config.mollify_cutoff;
        let mut vs = grid.forward_vector(v);
        let mut ns = grid.forward_vector(n);
        let size = grid.n();
        for a in 0..size {
            for b in 0..size {
                let (lv, ln) = linear_symbols(self.model, cutoff, a, b);
                let (ev, en) = ((lv * tau).exp(), (ln * tau).exp());
                let idx = a * size + b;
                for s in vs.iter_mut() {
                    s.0[idx] *= ev;
                }
                for s in ns.iter_mut() {
                    s.0[idx] *= en;
                }
            }
        }
        (grid.inverse_vector(&vs), grid.inverse_vector(&ns))
    }

    fn rk4(&self, s: &State) -> (Velocity, Director) {
        let dt = self.config.dt;
        let (k1v, k1n) = self.rates(&s.v, &s.n);
        let stage = |kv: &Velocity, kn: &Director, h: f64| {
            let mut v = s.v.clone();
            v.axpy(h, kv);
            let mut n = s.n.clone();
            n.axpy(h, kn);
            (v, n)
        };
        let (v2, n2) = stage(&k1v, &k1n, 0.5 * dt);
        let (k2v, k2n) = self.rates(&v2, &n2);
        let (v3, n3) = stage(&k2v, &k2n, 0.5 * dt);
        let (k3v, k3n) = self.rates(&v3, &n3);
        let (v4, n4) = stage(&k3v, &k3n, dt);
        let (k4v, k4n) = self.rates(&v4, &n4);
        let mut v = s.v.clone();
        let mut n = s.n.clone();
        for (w, kv, kn) in [
            (1.0, &k1v, &k1n),
            (2.0, &k2v, &k2n),
            (2.0, &k3v, &k3n),
            (1.0, &k4v, &k4n),
        ] {
            v.axpy(w * dt / 6.0, kv);
            n.axpy(w * dt / 6.0, kn);
        }
        (v, n)
    }

    /// Lawson RK4 with `E = exp(L dt/2)`.
    fn lawson(&self, s: &State) -> (Velocity, Director) {
        let dt = self.config.dt;
        let half = 0.5 * dt;
        let (k1v, k1n) = self.rates(&s.v, &s.n);
        let combine = |v: &Velocity, n: &Director, kv: &Velocity, kn: &Director, h: f64| {
            let mut v = v.clone();
            v.axpy(h, kv);
            let mut n = n.clone();
            n.axpy(h, kn);
            (v, n)
        };
        // k2 = N(E(u + dt/2 k1))
        let (a, b) = combine(&s.v, &s.n, &k1v, &k1n, half);
        let (v2, n2) = self.propagate(&a, &b, half);
        let (k2v, k2n) = self.rates(&v2, &n2);
        // k3 = N(E u + dt/2 k2)
        let (eu_v, eu_n) = self.propagate(&s.v, &s.n, half);
        let (v3, n3) = combine(&eu_v, &eu_n, &k2v, &k2n, half);
        let (k3v, k3n) = self.rates(&v3, &n3);
        // k4 = N(E(E u + dt k3))
        let (a, b) = combine(&eu_v, &eu_n, &k3v, &k3n, dt);
        let (v4, n4) = self.propagate(&a, &b, half);
        let (k4v, k4n) = self.rates(&v4, &n4);
        // u⁺ = E(E(u + dt/6 k1) + dt/3 (k2 + k3)) + dt/6 k4
        let (mut a, mut b) = combine(&s.v, &s.n, &k1v, &k1n, dt / 6.0);
        let (pa, pb) = self.propagate(&a, &b, half);
        a = pa;
        b = pb;
        a.axpy(dt / 3.0, &k2v);
        a.axpy(dt / 3.0, &k3v);
        b.axpy(dt / 3.0, &k2n);
        b.axpy(dt / 3.0, &k3n);
        let (mut v, mut n) = self.propagate(&a, &b, half);
        v.axpy(dt / 6.0, &k4v);
        n.axpy(dt / 6.0, &k4n);
        (v, n)
    }
}

/// Result of one step together with the pre-renormalization unit drift.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    /// `max ||n| − 1|` before renormalization (0 in mollified mode).
    pub unit_drift: f64,
}

/// Advances `state` by `config.dt`, reporting the unit drift.
pub fn advance(model: &Model, state: &State, config: &SolverConfig) -> Result<StepOutcome> {
    config.validate()?;
    let stepper = Stepper { model, config };
    let (v, n) = match config.scheme {
        Scheme::Rk4 => stepper.rk4(state),
        Scheme::Imex => stepper.lawson(state),
    };
    let t = state.t + config.dt;
    let mut next = State::relaxed(v, n, t);
    next.check_finite()?;
    let mut drift = 0.0;
    if config.mollify_cutoff.is_none() {
        drift = next.n.unit_defect();
        if drift > MAX_UNIT_DRIFT {
            return Err(Error::UnitDrift { drift, t });
        }
        if config.renormalize {
            next.n = next.n.normalized().map_err(|_| Error::NonFinite { t })?;
        }
    }
    Ok(StepOutcome {
        state: next,
        unit_drift: drift,
    })
}

/// Advances `state` by one step of the configured scheme.
pub fn step(model: &Model, state: &State, config: &SolverConfig) -> Result<State> {
    Ok(advance(model, state, config)?.state)
}

/// One step of the mollified system; `config.mollify_cutoff` must be set.
pub fn step_mollified(model: &Model, state: &State, config: &SolverConfig) -> Result<State> {
    if config.mollify_cutoff.is_none() {
        return Err(Error::InvalidConfig("mollified stepping needs a cutoff K".into()));
    }
    step(model, state, config)
}

/// Mollifies both unknowns once, as the regularized system prescribes for
/// its initial data.
pub fn mollify_state(grid: &Grid, state: &State, cutoff: f64) -> State {
    State::relaxed(
        grid.mollify_vector(&state.v, cutoff),
        grid.mollify_vector(&state.n, cutoff),
        state.t,
    )
}

/// Receives states during [`run`].
pub trait Observer {
    fn observe(&mut self, model: &Model, state: &State) -> Result<()>;
}

impl<F: FnMut(&Model, &State) -> Result<()>> Observer for F {
    fn observe(&mut self, model: &Model, state: &State) -> Result<()> {
        self(model, state)
    }
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Times at which observers were called.
    pub times: Vec<f64>,
    pub final_state: State,
    pub steps: usize,
    /// Uniform step actually used.
    pub dt: f64,
    /// Largest pre-renormalization unit drift over all steps.
    pub max_unit_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Number of uniform steps and their size covering `[t0, t_end]` with steps
/// no larger than `dt`.
pub fn step_plan(t0: f64, t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end >= t0) {
        return Err(Error::InvalidEndTime { t0, t_end });
    }
    let span = t_end - t0;
    if span == 0.0 {
        return Ok((0, dt));
    }
    let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, span / steps as f64))
}

/// Steps from `initial.t` to `t_end`, calling every observer on the initial
/// state, every `stride` steps and on the final state.
pub fn run(
    model: &Model,
    initial: State,
    config: &SolverConfig,
    t_end: f64,
    stride: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    config.validate()?;
    let stride = stride.max(1);
    let (steps, dt) = step_plan(initial.t, t_end, config.dt)?;
    let cfg = SolverConfig { dt, ..*config };
    let t0 = initial.t;
    let mut state = match cfg.mollify_cutoff {
        Some(k) => mollify_state(&model.grid, &initial, k),
        None => initial,
    };
    let mut times = Vec::new();
    let mut notify = |state: &State, times: &mut Vec<f64>| -> Result<()> {
        for o in observers.iter_mut() {
            o.observe(model, state)?;
        }
        times.push(state.t);
        Ok(())
    };
    notify(&state, &mut times)?;
    let mut max_drift = 0.0f64;
    for m in 1..=steps {
        let out = advance(model, &state, &cfg)?;
        state = out.state;
        // avoid accumulating rounding in t
        state.t = t0 + m as f64 * dt;
        max_drift = max_drift.max(out.unit_drift);
        if m % stride == 0 || m == steps {
            notify(&state, &mut times)?;
        }
    }
    Ok(Trajectory {
        times,
        final_state: state,
        steps,
        dt,
        max_unit_drift: max_drift,
    })
}
