//! Oseen-Frank elasticity: energy density, its partial derivatives and the
//! molecular field `h`.
//!
//! The density is
//! `W = a|∇n|² + (k1 − a)(div n)² + (k2 − a)|n × curl n|² + (k3 − a)(n · curl n)²`
//! with `a = min(k1, k2, k3)`. Gradients are stored as `p[α][l] = ∂_α n^l`
//! with the third row identically zero (fields do not depend on `x3`).

use crate::coefficients::{ElasticConstants, TOL_UNIT};
use crate::error::{Error, Result};
use crate::fields::{Axis, Director, Grid, ScalarField, Spectrum, VectorField};
use crate::tensor::{cross, dot, levi_civita, norm2, Mat3, Vec3, ZERO33};

/// Nine scalar fields indexed `[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField(pub [[ScalarField; 3]; 3]);

impl TensorField {
    pub fn zeros(len: usize) -> Self {
        Self(std::array::from_fn(|_| {
            std::array::from_fn(|_| ScalarField::zeros(len))
        }))
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].0[idx]))
    }

    #[inline]
    pub fn set(&mut self, idx: usize, m: &Mat3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j].0[idx] = m[i][j];
            }
        }
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> Mat3) -> Self {
        let mut out = Self::zeros(len);
        for idx in 0..len {
            out.set(idx, &f(idx));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// `(∇·σ)_j = ∂1 σ_1j + ∂2 σ_2j` in spectral space, `j = 1, 2, 3`.
    pub fn divergence_spectrum(&self, grid: &Grid) -> [Spectrum; 3] {
        let rows: Vec<&ScalarField> = self.0[0].iter().chain(self.0[1].iter()).collect();
        let s = grid.forward_many(&rows);
        std::array::from_fn(|j| {
            let mut d = grid.diff_spectrum(&s[j], Axis::X1);
            d.axpy(1.0, &grid.diff_spectrum(&s[3 + j], Axis::X2));
            d
        })
    }

    /// `(∇·σ)_j = ∂1 σ_1j + ∂2 σ_2j`.
    pub fn divergence(&self, grid: &Grid) -> Director {
        grid.inverse_vector(&self.divergence_spectrum(grid))
    }
}

/// Director together with its spectral gradient.
#[derive(Debug, Clone)]
pub struct ElasticState {
    n: Director,
    n_hat: [Spectrum; 3],
    grad: [[ScalarField; 3]; 2],
}

impl ElasticState {
    /// Builds the state from a unit director field.
    pub fn new(grid: &Grid, n: Director) -> Result<Self> {
        if !n.is_finite() {
            return Err(Error::NonFinite { t: f64::NAN });
        }
        let defect = n.unit_defect();
        if !(defect <= TOL_UNIT) {
            return Err(Error::DirectorNotUnit(defect));
        }
        Ok(Self::relaxed(grid, n))
    }

    /// Builds the state without the unit-length check.
    pub fn relaxed(grid: &Grid, n: Director) -> Self {
        let n_hat = grid.forward_vector(&n);
        Self::from_spectrum(grid, n, n_hat)
    }

    pub(crate) fn from_spectrum(grid: &Grid, n: Director, n_hat: [Spectrum; 3]) -> Self {
        let d: Vec<Spectrum> = [Axis::X1, Axis::X2]
            .iter()
            .flat_map(|&ax| n_hat.iter().map(move |s| (ax, s)))
            .map(|(ax, s)| grid.diff_spectrum(s, ax))
            .collect();
        let refs: Vec<&Spectrum> = d.iter().collect();
        let mut g = grid.inverse_many(&refs).into_iter();
        let grad = std::array::from_fn(|_| std::array::from_fn(|_| g.next().unwrap()));
        Self { n, n_hat, grad }
    }

    pub fn director(&self) -> &Director {
        &self.n
    }

    pub fn spectrum(&self) -> &[Spectrum; 3] {
        &self.n_hat
    }

    /// `∂_α n^l` for `α ∈ {0, 1}`.
    pub fn gradient(&self) -> &[[ScalarField; 3]; 2] {
        &self.grad
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    #[inline]
    pub fn n_at(&self, idx: usize) -> Vec3 {
        self.n.at(idx)
    }

    /// `p[α][l] = ∂_α n^l` at one point; the `α = 3` row is zero.
    #[inline]
    pub fn p_at(&self, idx: usize) -> Mat3 {
        let mut p = ZERO33;
        for a in 0..2 {
            for l in 0..3 {
                p[a][l] = self.grad[a][l].0[idx];
            }
        }
        p
    }

    /// `|∇n|²` pointwise.
    pub fn grad_sq(&self) -> ScalarField {
        ScalarField(
            (0..self.len())
                .map(|idx| self.grad.iter().flatten().map(|f| f.0[idx] * f.0[idx]).sum())
                .collect(),
        )
    }
}

/// `div n = tr p`.
#[inline]
pub fn div_of(p: &Mat3) -> f64 {
    p[0][0] + p[1][1] + p[2][2]
}

/// `(curl n)_m = ε_{mαl} p[α][l]`.
#[inline]
pub fn curl_of(p: &Mat3) -> Vec3 {
    [p[1][2] - p[2][1], p[2][0] - p[0][2], p[0][1] - p[1][0]]
}

/// Pointwise density `W(n, p)`.
pub fn density_point(n: &Vec3, p: &Mat3, k: &ElasticConstants) -> f64 {
    let c = curl_of(p);
    let d = div_of(p);
    let pp: f64 = p.iter().flatten().map(|x| x * x).sum();
    let nc = dot(n, &c);
    k.a * pp + (k.k1 - k.a) * d * d + (k.k2 - k.a) * norm2(&cross(n, &c)) + (k.k3 - k.a) * nc * nc
}

/// Pointwise `∂W/∂p[α][l]`, valid without the unit constraint.
pub fn w_p_point(n: &Vec3, p: &Mat3, k: &ElasticConstants) -> Mat3 {
    let c = curl_of(p);
    let d = div_of(p);
    let nn = norm2(n);
    let nc = dot(n, &c);
    // ∂W/∂c_m
    let g: Vec3 = std::array::from_fn(|m| 2.0 * ((k.k2 - k.a) * (nn * c[m] - nc * n[m]) + (k.k3 - k.a) * nc * n[m]));
    let mut out = ZERO33;
    for a in 0..3 {
        for l in 0..3 {
            let mut v = 2.0 * k.a * p[a][l];
            if a == l {
                v += 2.0 * (k.k1 - k.a) * d;
            }
            for (m, gm) in g.iter().enumerate() {
                v += levi_civita(m, a, l) * gm;
            }
            out[a][l] = v;
        }
    }
    out
}

/// Pointwise `∂W/∂n` of the density with `|n × c|² = |c|² − (n·c)²`
/// substituted: `2(k3 − k2)(n · c) c`.
pub fn w_n_point(n: &Vec3, p: &Mat3, k: &ElasticConstants) -> Vec3 {
    let c = curl_of(p);
    let s = 2.0 * (k.k3 - k.k2) * dot(n, &c);
    [s * c[0], s * c[1], s * c[2]]
}

pub fn density(state: &ElasticState, k: &ElasticConstants) -> ScalarField {
    ScalarField(
        (0..state.len())
            .map(|idx| density_point(&state.n_at(idx), &state.p_at(idx), k))
            .collect(),
    )
}

/// `W_{p_α^l}` as a tensor field indexed `[α][l]`.
pub fn w_p(state: &ElasticState, k: &ElasticConstants) -> TensorField {
    TensorField::from_fn(state.len(), |idx| w_p_point(&state.n_at(idx), &state.p_at(idx), k))
}

pub fn w_n(state: &ElasticState, k: &ElasticConstants) -> Director {
    VectorField::from_fn(state.len(), |idx| w_n_point(&state.n_at(idx), &state.p_at(idx), k))
}

/// Linear part `2aΔn + 2(k1 − a)∇div n − 2(k2 − a) curl curl n` in spectral space.
fn linear_part(grid: &Grid, n_hat: &[Spectrum; 3], k: &ElasticConstants) -> [Spectrum; 3] {
    let size = grid.size();
    let n = grid.n();
    let mut out = [Spectrum::zeros(size), Spectrum::zeros(size), Spectrum::zeros(size)];
    let (ca, c1, c2) = (2.0 * k.a, 2.0 * (k.k1 - k.a), 2.0 * (k.k2 - k.a));
    for a in 0..n {
        let k1 = grid.derivative_wavenumber(a);
        for b in 0..n {
            let k2 = grid.derivative_wavenumber(b);
            let idx = a * n + b;
            let (u1, u2, u3) = (n_hat[0].0[idx], n_hat[1].0[idx], n_hat[2].0[idx]);
            let ksq = k1 * k1 + k2 * k2;
            // ∇div: −k_i (k·u); curl curl = ∇div − Δ on each component
            let kdotu = u1 * k1 + u2 * k2;
            let gd = [-(kdotu * k1), -(kdotu * k2), kdotu * 0.0];
            let lap = [u1 * -ksq, u2 * -ksq, u3 * -ksq];
            for c in 0..3 {
                let cc = gd[c] - lap[c];
                out[c].0[idx] = lap[c] * ca + gd[c] * c1 - cc * c2;
            }
        }
    }
    out
}

/// Molecular field from the decomposition
/// `h = 2aΔn + 2(k1 − a)∇div n − 2(k2 − a) curl curl n
///      − 2(k3 − k2) curl((n · curl n) n) − 2(k3 − k2)(n · curl n) curl n`.
pub fn molecular_field(grid: &Grid, state: &ElasticState, k: &ElasticConstants) -> Director {
    let mut h_hat = linear_part(grid, &state.n_hat, k);
    let len = state.len();
    let mut q = Director::zeros(len);
    let mut tail = Director::zeros(len);
    let s = 2.0 * (k.k3 - k.k2);
    for idx in 0..len {
        let n = state.n_at(idx);
        let c = curl_of(&state.p_at(idx));
        let nc = dot(&n, &c);
        q.set(idx, [nc * n[0], nc * n[1], nc * n[2]]);
        tail.set(idx, [s * nc * c[0], s * nc * c[1], s * nc * c[2]]);
    }
    if s != 0.0 {
        let cq = grid.curl3_spectrum(&grid.forward_vector(&q));
        for c in 0..3 {
            h_hat[c].axpy(-s, &cq[c]);
        }
    }
    let mut h = grid.inverse_vector(&h_hat);
    h.axpy(-1.0, &tail);
    h
}

/// Molecular field in divergence form `h^l = ∂_α W_{p_α^l} − W_{n^l}`.
pub fn molecular_field_oracle(grid: &Grid, state: &ElasticState, k: &ElasticConstants) -> Director {
    let mut h = w_p(state, k).divergence(grid);
    h.axpy(-1.0, &w_n(state, k));
    h
}

/// Molecular field of the regularized system, evaluated as written for
/// directors of arbitrary length:
/// `2aΔn + 2(k1 − a)∇div n − 2(k2 − a) curl(n × (curl n × n))
///  − 2(k3 − a) curl((n · curl n) n) − 2(k3 − k2)(n · curl n) curl n`.
pub fn regularized_molecular_field(grid: &Grid, state: &ElasticState, k: &ElasticConstants) -> Director {
    let ka = ElasticConstants { k2: k.a, ..*k };
    // linear part with the curl-curl term removed; k2 − a enters through q below
    let mut h_hat = linear_part(grid, &state.n_hat, &ka);
    let len = state.len();
    let mut q = Director::zeros(len);
    let mut tail = Director::zeros(len);
    let (s2, s3, s32) = (2.0 * (k.k2 - k.a), 2.0 * (k.k3 - k.a), 2.0 * (k.k3 - k.k2));
    for idx in 0..len {
        let n = state.n_at(idx);
        let c = curl_of(&state.p_at(idx));
        let nc = dot(&n, &c);
        let t = cross(&n, &cross(&c, &n));
        q.set(idx, std::array::from_fn(|m| s2 * t[m] + s3 * nc * n[m]));
        tail.set(idx, [s32 * nc * c[0], s32 * nc * c[1], s32 * nc * c[2]]);
    }
    let cq = grid.curl3_spectrum(&grid.forward_vector(&q));
    for c in 0..3 {
        h_hat[c].axpy(-1.0, &cq[c]);
    }
    let mut h = grid.inverse_vector(&h_hat);
    h.axpy(-1.0, &tail);
    h
}

/// `(∂_α W_{p_α^l}) n^l` minus
/// `−2k2|∇n|² − 2(k3 − k2)(n · curl n)² − 2(k1 − k2)(div n)² + 2(k1 − k2) ∂_l(n^l div n)`.
pub fn wp_dot_n_residual(grid: &Grid, state: &ElasticState, k: &ElasticConstants) -> ScalarField {
    let div_wp = w_p(state, k).divergence(grid);
    let len = state.len();
    let mut ndiv = VectorField::<2>::zeros(len);
    for idx in 0..len {
        let n = state.n_at(idx);
        let d = div_of(&state.p_at(idx));
        ndiv.set(idx, [n[0] * d, n[1] * d]);
    }
    let dn = grid.divergence2(&ndiv);
    ScalarField(
        (0..len)
            .map(|idx| {
                let n = state.n_at(idx);
                let p = state.p_at(idx);
                let lhs = dot(&div_wp.at(idx), &n);
                let c = curl_of(&p);
                let d = div_of(&p);
                let nc = dot(&n, &c);
                let pp: f64 = p.iter().flatten().map(|x| x * x).sum();
                let rhs = -2.0 * k.k2 * pp - 2.0 * (k.k3 - k.k2) * nc * nc - 2.0 * (k.k1 - k.k2) * d * d
                    + 2.0 * (k.k1 - k.k2) * dn.0[idx];
                lhs - rhs
            })
            .collect(),
    )
}
