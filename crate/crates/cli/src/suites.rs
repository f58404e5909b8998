//! Oracle suites on seeded random smooth states.
//!
//! Each suite evaluates one identity on a fixed corpus and reports the worst
//! normalized error against its tolerance. Random directors are band-limited
//! (modes ≤ 4 ≤ N/4) perturbations of a random unit vector, normalized
//! pointwise.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use elsim_core::coefficients::{admissibility_margin_2d, admissible, admissible_bruteforce};
use elsim_core::dynamics::director_rhs;
use elsim_core::leslie_stress::{stress_power_identity, velocity_gradient};
use elsim_core::oseen_frank::{density, molecular_field, molecular_field_oracle, wp_dot_n_residual};
use elsim_core::sampling::{random_director, random_elastic_constants, random_scalar, random_unit, random_velocity};
use elsim_core::{
    Betas, Dim, Director, ElasticConstants, ElasticState, Grid, LeslieCoefficients, Model, State, VectorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Resolution of the field suites; the random directors are resolved to
/// round-off here but not at N = 64.
pub const SUITE_N: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Worst normalized error over the corpus.
    pub worst: f64,
    pub tolerance: f64,
    /// Extra count reported by suites that tally disagreements.
    pub failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.worst <= self.tolerance
    }
}

fn grid() -> Grid {
    Grid::new(SUITE_N, TAU).expect("valid grid")
}

fn case_seed(seed: u64, case: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(case as u64)
}

fn random_state(g: &Grid, seed: u64) -> ElasticState {
    ElasticState::new(g, random_director(g, seed, random_unit(seed ^ 0xba5e))).expect("unit director")
}

fn random_constants(seed: u64) -> ElasticConstants {
    random_elastic_constants(seed ^ 0xc0ff, 0.5, 2.0)
}

/// Decomposed molecular field against the divergence form, relative L².
pub fn h_equivalence(seed: u64, cases: usize) -> SuiteReport {
    let g = grid();
    let mut worst = 0.0f64;
    for c in 0..cases {
        let s = case_seed(seed, c);
        let st = random_state(&g, s);
        let k = random_constants(s);
        let h = molecular_field(&g, &st, &k);
        let mut d = molecular_field_oracle(&g, &st, &k);
        d.axpy(-1.0, &h);
        worst = worst.max(g.l2_norm(&d) / g.l2_norm(&h));
    }
    SuiteReport {
        name: "molecular field decomposition",
        cases,
        worst,
        tolerance: 1e-6,
        failures: 0,
    }
}

/// `(div W_p)·n` identity, `‖residual‖_∞ / (1 + ‖∇n‖²_∞)`.
pub fn wp_dot_n_identity(seed: u64, cases: usize) -> SuiteReport {
    let g = grid();
    let mut worst = 0.0f64;
    for c in 0..cases {
        let s = case_seed(seed, c);
        let st = random_state(&g, s);
        let k = random_constants(s);
        let r = wp_dot_n_residual(&g, &st, &k).max_abs();
        worst = worst.max(r / (1.0 + st.grad_sq().max_abs()));
    }
    SuiteReport {
        name: "div W_p . n identity",
        cases,
        worst,
        tolerance: 1e-6,
        failures: 0,
    }
}

/// `‖h − 2aΔn‖_∞` for equal Frank constants.
pub fn equal_constants(seed: u64, cases: usize) -> SuiteReport {
    let g = grid();
    let mut worst = 0.0f64;
    for c in 0..cases {
        let s = case_seed(seed, c);
        let st = random_state(&g, s);
        let a = random_constants(s).k1;
        let k = ElasticConstants::equal(a).expect("positive");
        let mut d = molecular_field(&g, &st, &k);
        d.axpy(-2.0 * a, &g.laplacian_vector(st.director()));
        worst = worst.max(d.max_abs());
    }
    SuiteReport {
        name: "equal-constant reduction",
        cases,
        worst,
        tolerance: 1e-10,
        failures: 0,
    }
}

/// Leslie coefficients with `α3 > α2` and Parodi's relation exact.
pub fn random_leslie(seed: u64) -> LeslieCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
    if a[2] - a[1] < 0.1 {
        a[2] = a[1] + rng.gen_range(0.1..1.5);
    }
    a[5] = a[1] + a[2] + a[4];
    LeslieCoefficients::with_alphas(a, rng.gen_range(0.1..0.9), 1.0)
}

/// Stress-power identity with `n_t` from the director equation, residual
/// over `‖∇v‖²_{L²} + ‖h‖²_{L²}`.
pub fn stress_power(seed: u64, cases: usize) -> SuiteReport {
    let g = grid();
    let mut worst = 0.0f64;
    for c in 0..cases {
        let s = case_seed(seed, c);
        let st = random_state(&g, s);
        let k = random_constants(s);
        let model = Model::new(g.clone(), random_leslie(s ^ 0xa1fa), k).expect("consistent coefficients");
        let v = random_velocity(&g, s, 1.0);
        let n_t = director_rhs(&model, &State::relaxed(v.clone(), st.director().clone(), 0.0));
        let sp = stress_power_identity(&g, &model.visc, &k, &v, &st, &n_t);
        let gv: f64 = velocity_gradient(&g, &v)
            .iter()
            .flatten()
            .map(|f| g.scalar_l2_norm(f).powi(2))
            .sum();
        let scale = gv + g.l2_norm(&molecular_field(&g, &st, &k)).powi(2);
        worst = worst.max(sp.residual() / scale);
    }
    SuiteReport {
        name: "stress-power identity",
        cases,
        worst,
        tolerance: 1e-6,
        failures: 0,
    }
}

fn elastic_energy(g: &Grid, n: &Director, k: &ElasticConstants) -> f64 {
    g.integrate(&density(&ElasticState::relaxed(g, n.clone()), k))
}

/// `d/dε ∫W(n_ε)` at `ε = 0` for `n_ε = (n + εφ)/|n + εφ|` with tangent `φ`,
/// by the fourth-order central difference with step `eps`.
pub fn directional_derivative(g: &Grid, n: &Director, phi: &Director, k: &ElasticConstants, eps: f64) -> f64 {
    let at = |e: f64| {
        let mut u = n.clone();
        u.axpy(e, phi);
        elastic_energy(g, &u.normalized().expect("small step"), k)
    };
    (8.0 * (at(eps) - at(-eps)) - (at(2.0 * eps) - at(-2.0 * eps))) / (12.0 * eps)
}

/// Variational consistency: the directional derivative of `∫W` along a
/// tangent perturbation equals `−∫h·φ`; relative error.
pub fn variational_consistency(seed: u64, cases: usize) -> SuiteReport {
    let g = grid();
    let mut worst = 0.0f64;
    for c in 0..cases {
        let s = case_seed(seed, c);
        let st = random_state(&g, s);
        let k = random_constants(s);
        let n = st.director();
        let raw: [_; 3] = std::array::from_fn(|m| random_scalar(&g, s ^ (0x7a9 + m as u64), 1.0));
        let phi = Director::from_fn(g.size(), |idx| {
            let p = [raw[0].0[idx], raw[1].0[idx], raw[2].0[idx]];
            let nv = n.at(idx);
            let pn = p[0] * nv[0] + p[1] * nv[1] + p[2] * nv[2];
            std::array::from_fn(|m| p[m] - pn * nv[m])
        });
        let h = molecular_field(&g, &st, &k);
        let hphi = VectorField([0, 1, 2].map(|m| h.0[m].zip_map(&phi.0[m], |a, b| a * b)));
        let work = -g.integrate(&hphi.0[0]) - g.integrate(&hphi.0[1]) - g.integrate(&hphi.0[2]);
        let fd = directional_derivative(&g, n, &phi, &k, 1e-3);
        worst = worst.max((fd - work).abs() / work.abs());
    }
    SuiteReport {
        name: "variational consistency of h",
        cases,
        worst,
        tolerance: 1e-4,
        failures: 0,
    }
}

/// Closed-form 2-D admissibility against the sampled minimum on random
/// `β` triples kept away from the region boundary.
pub fn admissibility(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xad31);
    let mut failures = 0;
    let mut drawn = 0;
    while drawn < cases {
        let b = Betas(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
        if admissibility_margin_2d(b) <= 1e-3 {
            continue;
        }
        drawn += 1;
        if admissible(b, Dim::Two) != admissible_bruteforce(b, 10_000, Dim::Two) {
            failures += 1;
        }
    }
    SuiteReport {
        name: "admissibility closed form vs sampling",
        cases,
        worst: failures as f64,
        tolerance: 0.0,
        failures,
    }
}

/// Suites run by `verify-identities`, in table order.
pub fn all(seed: u64) -> Vec<SuiteReport> {
    vec![
        h_equivalence(seed, 20),
        wp_dot_n_identity(seed, 20),
        equal_constants(seed, 20),
        stress_power(seed, 20),
        variational_consistency(seed, 10),
        admissibility(seed, 100),
    ]
}

pub fn format_table(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<40} {:>5} {:>12} {:>12}  result",
        "suite", "cases", "worst", "tolerance"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<40} {:>5} {:>12.3e} {:>12.1e}  {}",
            r.name,
            r.cases,
            r.worst,
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    out
}
