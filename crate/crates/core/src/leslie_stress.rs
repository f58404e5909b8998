//! Kinematic tensors and the viscous, elastic and regularized stresses.
//!
//! Conventions: `(∇v)_ij = ∂_i v^j`, `κ = (∇v)ᵀ`, `D = ½(κᵀ + κ)`,
//! `Ω = ½(κᵀ − κ)`, and the stress divergence is `(∇·σ)_j = ∂_i σ_ij`, so the
//! stress power is `σ : ∇v = σ_ij ∂_i v^j`. Only rows and columns 1, 2 of a
//! stress enter the planar momentum balance.

use crate::coefficients::{DerivedCoefficients, ElasticConstants, LeslieCoefficients, Viscosities};
use crate::fields::{Axis, Director, Grid, ScalarField, Velocity};
use crate::oseen_frank::{molecular_field, w_p_point, ElasticState, TensorField};
use crate::tensor::{dot, matvec, norm2, perp, quad, Mat3, Vec3, ZERO33};

/// Velocity gradient and co-rotational director rate.
#[derive(Debug, Clone)]
pub struct Kinematics {
    /// `grad_v[i][j] = ∂_i v^j`.
    pub grad_v: [[ScalarField; 2]; 2],
    /// `v · ∇n`.
    pub advection: Director,
    /// `N = n_t + v · ∇n + Ω n`.
    pub rate: Director,
}

impl Kinematics {
    /// `(∇v)_ij` at one point, zero outside the plane.
    #[inline]
    pub fn grad_v_at(&self, idx: usize) -> Mat3 {
        let mut g = ZERO33;
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = self.grad_v[i][j].0[idx];
            }
        }
        g
    }

    #[inline]
    pub fn strain_at(&self, idx: usize) -> Mat3 {
        strain(&self.grad_v_at(idx))
    }

    #[inline]
    pub fn vorticity_at(&self, idx: usize) -> Mat3 {
        vorticity(&self.grad_v_at(idx))
    }

    pub fn len(&self) -> usize {
        self.rate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rate.is_empty()
    }
}

/// `D_ij = ½(∂_i v^j + ∂_j v^i)`.
#[inline]
pub fn strain(g: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (g[i][j] + g[j][i])))
}

/// `Ω_ij = ½(∂_i v^j − ∂_j v^i)`.
#[inline]
pub fn vorticity(g: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (g[i][j] - g[j][i])))
}

/// Spectral gradient `[i][j] = ∂_i v^j`.
pub fn velocity_gradient(grid: &Grid, v: &Velocity) -> [[ScalarField; 2]; 2] {
    let s = grid.forward_vector(v);
    let d = [
        grid.diff_spectrum(&s[0], Axis::X1),
        grid.diff_spectrum(&s[1], Axis::X1),
        grid.diff_spectrum(&s[0], Axis::X2),
        grid.diff_spectrum(&s[1], Axis::X2),
    ];
    let mut f = grid.inverse_many(&d.iter().collect::<Vec<_>>()).into_iter();
    std::array::from_fn(|_| std::array::from_fn(|_| f.next().unwrap()))
}

/// `v · ∇n` from the cached director gradient.
pub fn advect_director(v: &Velocity, state: &ElasticState) -> Director {
    let g = state.gradient();
    Director::from_fn(v.len(), |idx| {
        let (v1, v2) = (v.0[0].0[idx], v.0[1].0[idx]);
        std::array::from_fn(|l| v1 * g[0][l].0[idx] + v2 * g[1][l].0[idx])
    })
}

pub fn kinematics(grid: &Grid, v: &Velocity, state: &ElasticState, n_t: &Director) -> Kinematics {
    let grad_v = velocity_gradient(grid, v);
    kinematics_from_gradient(grad_v, v, state, n_t)
}

pub(crate) fn kinematics_from_gradient(
    grad_v: [[ScalarField; 2]; 2],
    v: &Velocity,
    state: &ElasticState,
    n_t: &Director,
) -> Kinematics {
    let advection = advect_director(v, state);
    let mut kin = Kinematics {
        grad_v,
        advection,
        rate: Director::zeros(v.len()),
    };
    for idx in 0..v.len() {
        let n = state.n_at(idx);
        let w = matvec(&kin.vorticity_at(idx), &n);
        let a = kin.advection.at(idx);
        let nt = n_t.at(idx);
        kin.rate.set(idx, std::array::from_fn(|c| nt[c] + a[c] + w[c]));
    }
    kin
}

/// Pointwise Leslie stress
/// `α1(nn:D)nn + α2 nN + α3 Nn + α4 D + α5 nn·D + α6 D·nn`.
pub fn leslie_stress_point(al: &LeslieCoefficients, n: &Vec3, d: &Mat3, rate: &Vec3) -> Mat3 {
    let nnd = quad(d, n, n);
    let dn = matvec(d, n);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            al.alpha1 * nnd * n[i] * n[j]
                + al.alpha2 * n[i] * rate[j]
                + al.alpha3 * rate[i] * n[j]
                + al.alpha4 * d[i][j]
                + al.alpha5 * n[i] * dn[j]
                + al.alpha6 * dn[i] * n[j]
        })
    })
}

pub fn leslie_stress(al: &LeslieCoefficients, kin: &Kinematics, n: &Director) -> TensorField {
    TensorField::from_fn(n.len(), |idx| {
        leslie_stress_point(al, &n.at(idx), &kin.strain_at(idx), &kin.rate.at(idx))
    })
}

/// Pointwise Ericksen stress `σ^E_ij = −W_{p_i^l} ∂_j n^l`, `i, j ∈ {1, 2}`.
pub fn ericksen_stress_point(n: &Vec3, p: &Mat3, k: &ElasticConstants) -> Mat3 {
    let wp = w_p_point(n, p, k);
    let mut s = ZERO33;
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = -(0..3).map(|l| wp[i][l] * p[j][l]).sum::<f64>();
        }
    }
    s
}

pub fn ericksen_stress(state: &ElasticState, k: &ElasticConstants) -> TensorField {
    TensorField::from_fn(state.len(), |idx| {
        ericksen_stress_point(&state.n_at(idx), &state.p_at(idx), k)
    })
}

/// Pointwise `σ1 + σ2` of the regularized system:
/// `σ1 = β1(nn:D)nn + β2|n|⁴D + (β3/2)|n|²(n(Dn) + (Dn)n)`,
/// `σ2 = ½(−1 − μ2) n h⊥ + ½(1 − μ2) h⊥ n` with `h⊥ = n × (h × n)`.
pub fn regularized_stress_point(dc: &DerivedCoefficients, n: &Vec3, d: &Mat3, h: &Vec3) -> Mat3 {
    let nn = norm2(n);
    let nnd = quad(d, n, n);
    let dn = matvec(d, n);
    let hp = perp(h, n);
    let (b1, b2, b3) = (dc.beta1, dc.beta2 * nn * nn, 0.5 * dc.beta3 * nn);
    let (s_nh, s_hn) = (0.5 * (-1.0 - dc.mu2), 0.5 * (1.0 - dc.mu2));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            b1 * nnd * n[i] * n[j]
                + b2 * d[i][j]
                + b3 * (n[i] * dn[j] + dn[i] * n[j])
                + s_nh * n[i] * hp[j]
                + s_hn * hp[i] * n[j]
        })
    })
}

pub fn regularized_stress(dc: &DerivedCoefficients, n: &Director, kin: &Kinematics, h: &Director) -> TensorField {
    TensorField::from_fn(n.len(), |idx| {
        regularized_stress_point(dc, &n.at(idx), &kin.strain_at(idx), &h.at(idx))
    })
}

/// `∫ σ_ij ∂_i v^j`.
pub fn stress_power(grid: &Grid, sigma: &TensorField, kin: &Kinematics) -> f64 {
    let mut s = 0.0;
    for idx in 0..kin.len() {
        let g = kin.grad_v_at(idx);
        for i in 0..2 {
            for j in 0..2 {
                s += sigma.0[i][j].0[idx] * g[i][j];
            }
        }
    }
    s * grid.cell_area()
}

/// Both sides of the Leslie stress-power identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressPower {
    /// `∫ σ^L : ∇v`.
    pub lhs: f64,
    /// `∫ [β1(nn:D)² + β3|Dn|² + β2 D:D] + ∫ h·Ωn + (γ2/γ1) ∫ h⊥·Dn`.
    pub rhs: f64,
}

impl StressPower {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Evaluates the stress-power identity for `(v, n)` with director rate `n_t`.
pub fn stress_power_identity(
    grid: &Grid,
    visc: &Viscosities,
    k: &ElasticConstants,
    v: &Velocity,
    state: &ElasticState,
    n_t: &Director,
) -> StressPower {
    let kin = kinematics(grid, v, state, n_t);
    let h = molecular_field(grid, state, k);
    let sigma = leslie_stress(&visc.leslie, &kin, state.director());
    let lhs = stress_power(grid, &sigma, &kin);
    let dc = &visc.derived;
    let mut rhs = 0.0;
    for idx in 0..kin.len() {
        let n = state.n_at(idx);
        let d = kin.strain_at(idx);
        let om = kin.vorticity_at(idx);
        let hv = h.at(idx);
        let nnd = quad(&d, &n, &n);
        let dn = matvec(&d, &n);
        let dd: f64 = d.iter().flatten().map(|x| x * x).sum();
        rhs += dc.beta1 * nnd * nnd + dc.beta3 * norm2(&dn) + dc.beta2 * dd;
        rhs += dot(&hv, &matvec(&om, &n));
        rhs += dc.gamma2 / dc.gamma1 * dot(&perp(&hv, &n), &dn);
    }
    StressPower {
        lhs,
        rhs: rhs * grid.cell_area(),
    }
}

/// `|∫σ^L:∇v − RHS|` of the stress-power identity.
pub fn stress_power_residual(
    grid: &Grid,
    visc: &Viscosities,
    k: &ElasticConstants,
    v: &Velocity,
    state: &ElasticState,
    n_t: &Director,
) -> f64 {
    stress_power_identity(grid, visc, k, v, state, n_t).residual()
}
