//! Material parameters of the Ericksen-Leslie model.
//!
//! [`LeslieCoefficients`] holds the six Leslie viscosities together with the
//! viscosity split `gamma` and the Reynolds number. [`DerivedCoefficients`]
//! are the reduced combinations that appear in the director equation and in
//! the energy dissipation. Admissibility of the viscous dissipation is
//! decided in closed form by [`admissible`] and by sampling in
//! [`admissible_bruteforce`].

use crate::error::{Error, Result};
use crate::tensor::{matvec, norm2, quad, Mat3, Vec3};

/// Absolute tolerance for the Parodi relation.
pub const TOL_PARODI: f64 = 1e-12;
/// Absolute tolerance for symmetry / trace checks on strain matrices.
pub const TOL_SYM: f64 = 1e-12;
/// Tolerance on the sign of the dissipation quadratic form.
pub const TOL_FORM: f64 = 1e-10;
/// Tolerance on unit length of single director samples.
pub const TOL_UNIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeslieCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub alpha5: f64,
    pub alpha6: f64,
    /// Viscosity split, strictly inside (0, 1).
    pub gamma: f64,
    pub reynolds: f64,
}

impl LeslieCoefficients {
    pub fn alphas(&self) -> [f64; 6] {
        [
            self.alpha1,
            self.alpha2,
            self.alpha3,
            self.alpha4,
            self.alpha5,
            self.alpha6,
        ]
    }

    pub fn with_alphas(alphas: [f64; 6], gamma: f64, reynolds: f64) -> Self {
        Self {
            alpha1: alphas[0],
            alpha2: alphas[1],
            alpha3: alphas[2],
            alpha4: alphas[3],
            alpha5: alphas[4],
            alpha6: alphas[5],
            gamma,
            reynolds,
        }
    }

    /// `|α2 + α3 − (α6 − α5)|`.
    pub fn parodi_residual(&self) -> f64 {
        (self.alpha2 + self.alpha3 - (self.alpha6 - self.alpha5)).abs()
    }
}

/// Reduced coefficients computed from the Leslie viscosities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Relaxation rate `1/γ1`.
    pub mu1: f64,
    /// Flow-alignment parameter `−γ2/γ1`.
    pub mu2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl DerivedCoefficients {
    pub fn betas(&self) -> Betas {
        Betas([self.beta1, self.beta2, self.beta3])
    }
}

/// The triple `(β1, β2, β3)` weighting the viscous dissipation form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Betas(pub [f64; 3]);

/// Validates `alphas` and computes the reduced coefficients.
pub fn derive(alphas: &LeslieCoefficients) -> Result<DerivedCoefficients> {
    if !(alphas.gamma > 0.0 && alphas.gamma < 1.0) {
        return Err(Error::GammaOutOfRange(alphas.gamma));
    }
    if !(alphas.reynolds > 0.0) {
        return Err(Error::NonpositiveReynolds(alphas.reynolds));
    }
    let residual = alphas.parodi_residual();
    if !(residual <= TOL_PARODI) {
        return Err(Error::ParodiViolation {
            residual,
            tolerance: TOL_PARODI,
        });
    }
    let gamma1 = alphas.alpha3 - alphas.alpha2;
    if !(gamma1 > 0.0) {
        return Err(Error::NonpositiveGamma1 { gamma1 });
    }
    let gamma2 = alphas.alpha6 - alphas.alpha5;
    let g2g1 = gamma2 * gamma2 / gamma1;
    Ok(DerivedCoefficients {
        gamma1,
        gamma2,
        mu1: 1.0 / gamma1,
        mu2: -gamma2 / gamma1,
        beta1: alphas.alpha1 + g2g1,
        beta2: alphas.alpha4,
        beta3: alphas.alpha5 + alphas.alpha6 - g2g1,
    })
}

/// Leslie viscosities bundled with their validated reduced form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viscosities {
    pub leslie: LeslieCoefficients,
    pub derived: DerivedCoefficients,
}

impl Viscosities {
    pub fn new(leslie: LeslieCoefficients) -> Result<Self> {
        let derived = derive(&leslie)?;
        Ok(Self { leslie, derived })
    }
}

/// Frank elastic constants for splay (`k1`), twist (`k2`) and bend (`k3`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// `min(k1, k2, k3)`.
    pub a: f64,
}

impl ElasticConstants {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        if !(k1 > 0.0 && k2 > 0.0 && k3 > 0.0) {
            return Err(Error::NonpositiveFrank(k1, k2, k3));
        }
        Ok(Self {
            k1,
            k2,
            k3,
            a: k1.min(k2).min(k3),
        })
    }

    /// One-constant approximation `k1 = k2 = k3 = k`.
    pub fn equal(k: f64) -> Result<Self> {
        Self::new(k, k, k)
    }
}

/// Spatial dimension for the admissibility test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Two,
    Three,
}

/// Closed-form admissibility of the viscous dissipation.
///
/// Borderline inputs (a constraint exactly zero) are admissible.
pub fn admissible(betas: Betas, dim: Dim) -> bool {
    let [b1, b2, b3] = betas.0;
    match dim {
        Dim::Three => b2 >= 0.0 && 2.0 * b2 + b3 >= 0.0 && 1.5 * b2 + b3 + b1 >= 0.0,
        Dim::Two => {
            (b2 >= 0.0 && b1 + 2.0 * b2 + b3 >= 0.0 && b1 < 0.0) || (b2 >= 0.0 && 2.0 * b2 + b3 >= 0.0 && b1 >= 0.0)
        }
    }
}

/// Distance of `betas` from the nearest constraint boundary of the 2-D
/// admissibility region (used to exclude borderline samples).
pub fn admissibility_margin_2d(betas: Betas) -> f64 {
    let [b1, b2, b3] = betas.0;
    [b1, b2, 2.0 * b2 + b3, b1 + 2.0 * b2 + b3]
        .iter()
        .fold(f64::INFINITY, |m, c| m.min(c.abs()))
}

/// `β1 (n·D·n)² + β2 D:D + β3 |D n|²` for unit `n` and symmetric trace-free `D`.
pub fn dissipation_form(betas: Betas, n: &Vec3, d: &Mat3) -> Result<f64> {
    let len = norm2(n).sqrt();
    if !((len - 1.0).abs() <= TOL_UNIT) {
        return Err(Error::NotUnit(len));
    }
    let mut defect = (d[0][0] + d[1][1] + d[2][2]).abs();
    for i in 0..3 {
        for j in 0..i {
            defect = defect.max((d[i][j] - d[j][i]).abs());
        }
    }
    if !(defect <= TOL_SYM) {
        return Err(Error::NotSymmetricTraceFree(defect));
    }
    Ok(dissipation_form_unchecked(betas, n, d))
}

pub(crate) fn dissipation_form_unchecked(betas: Betas, n: &Vec3, d: &Mat3) -> f64 {
    let [b1, b2, b3] = betas.0;
    let nn_d = quad(d, n, n);
    let dd: f64 = d.iter().flatten().map(|x| x * x).sum();
    let dn = matvec(d, n);
    b1 * nn_d * nn_d + b2 * dd + b3 * norm2(&dn)
}

/// Admissibility decided by minimizing the dissipation form over sampled
/// unit directors and unit planar strains.
///
/// Directors are drawn from an equal-area lattice on the upper hemisphere
/// (the form is even in `n`) and strains `[[x, y, 0], [y, −x, 0], [0, 0, 0]]`
/// from a uniform grid on `x² + y² = 1`. For `Dim::Three` the strain is a
/// general unit trace-free symmetric matrix built from five angles.
pub fn admissible_bruteforce(betas: Betas, samples: usize, dim: Dim) -> bool {
    let samples = samples.max(10_000);
    match dim {
        Dim::Two => bruteforce_min_2d(betas, samples) >= -TOL_FORM,
        Dim::Three => bruteforce_min_3d(betas, samples) >= -TOL_FORM,
    }
}

/// Sampled minimum of the 2-D dissipation form.
pub fn bruteforce_min_2d(betas: Betas, samples: usize) -> f64 {
    let per_axis = (samples as f64).cbrt().ceil() as usize;
    // multiples of four keep the angles 0, π/2, π, 3π/2 on the grid
    let n_angle = per_axis.div_ceil(4) * 4;
    let n_height = per_axis.max(2);
    let mut min = f64::INFINITY;
    for iz in 0..n_height {
        let z = iz as f64 / (n_height - 1) as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        for ip in 0..n_angle {
            let psi = std::f64::consts::TAU * ip as f64 / n_angle as f64;
            let n = [rho * psi.cos(), rho * psi.sin(), z];
            for ia in 0..n_angle {
                let alpha = std::f64::consts::TAU * ia as f64 / n_angle as f64;
                let (x, y) = (alpha.cos(), alpha.sin());
                let d = [[x, y, 0.0], [y, -x, 0.0], [0.0, 0.0, 0.0]];
                min = min.min(dissipation_form_unchecked(betas, &n, &d));
            }
        }
    }
    min
}

fn bruteforce_min_3d(betas: Betas, samples: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_d155);
    let mut min = f64::INFINITY;
    for _ in 0..samples {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let psi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let rho = (1.0 - z * z).sqrt();
        let n = [rho * psi.cos(), rho * psi.sin(), z];
        let mut e = [0.0f64; 5];
        for x in e.iter_mut() {
            *x = rng.gen_range(-1.0..=1.0);
        }
        let (a, b, c, p, q) = (e[0], e[1], e[2], e[3], e[4]);
        let mut d = [[a, c, p], [c, b, q], [p, q, -a - b]];
        let frob: f64 = d.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        if frob == 0.0 {
            continue;
        }
        for row in d.iter_mut() {
            for x in row.iter_mut() {
                *x /= frob;
            }
        }
        min = min.min(dissipation_form_unchecked(betas, &n, &d));
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_alphas() -> LeslieCoefficients {
        LeslieCoefficients::with_alphas([0.0, -1.0, 2.0, 2.0, 0.0, 1.0], 0.5, 1.0)
    }

    #[test]
    fn derive_example() {
        let d = derive(&example_alphas()).unwrap();
        assert_eq!(d.gamma1, 3.0);
        assert_eq!(d.gamma2, 1.0);
        assert!((d.mu1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.mu2 + 1.0 / 3.0).abs() < 1e-15);
        assert!((d.beta1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.beta2, 2.0);
        assert!((d.beta3 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn derive_rejects_parodi_violation() {
        let c = LeslieCoefficients::with_alphas([0.0, 1.0, 1.0, 0.0, 1.0, 1.0], 0.5, 1.0);
        assert!(matches!(derive(&c), Err(Error::ParodiViolation { .. })));
    }

    #[test]
    fn derive_rejects_nonpositive_gamma1() {
        let c = LeslieCoefficients::with_alphas([0.0, 2.0, 1.0, 0.0, 0.0, 3.0], 0.5, 1.0);
        assert_eq!(derive(&c), Err(Error::NonpositiveGamma1 { gamma1: -1.0 }));
        // with α6 = −1 the Parodi relation fails as well and is reported first
        let c = LeslieCoefficients::with_alphas([0.0, 2.0, 1.0, 0.0, 0.0, -1.0], 0.5, 1.0);
        assert!(matches!(derive(&c), Err(Error::ParodiViolation { .. })));
    }

    #[test]
    fn derive_rejects_bad_gamma_and_reynolds() {
        let mut c = example_alphas();
        c.gamma = 1.0;
        assert!(matches!(derive(&c), Err(Error::GammaOutOfRange(_))));
        c.gamma = 0.5;
        c.reynolds = 0.0;
        assert!(matches!(derive(&c), Err(Error::NonpositiveReynolds(_))));
    }

    #[test]
    fn elastic_minimum() {
        let k = ElasticConstants::new(1.5, 0.7, 2.0).unwrap();
        assert_eq!(k.a, 0.7);
        assert!(ElasticConstants::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn admissible_examples() {
        assert!(admissible(Betas([1.0 / 3.0, 2.0, 2.0 / 3.0]), Dim::Two));
        assert!(admissible(Betas([-1.0, 1.0, 0.0]), Dim::Two));
        assert!(!admissible(Betas([-3.0, 1.0, 0.0]), Dim::Two));
        // borderline counts as admissible
        assert!(admissible(Betas([-2.0, 1.0, 0.0]), Dim::Two));
        assert!(admissible(Betas([0.0, 0.0, 0.0]), Dim::Three));
    }

    #[test]
    fn dissipation_form_examples() {
        let b = Betas([5.0, 2.0, 7.0]);
        let d = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]];
        // n = e1 gives β1 (n·D·n)² + β2 D:D + β3 |Dn|² = 5 + 4 + 7
        assert!((dissipation_form(b, &[0.0, 0.0, 1.0], &d).unwrap() - 4.0).abs() < 1e-14);
        assert!((dissipation_form(b, &[1.0, 0.0, 0.0], &d).unwrap() - 16.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((dissipation_form(b, &[s, s, 0.0], &d).unwrap() - 11.0).abs() < 1e-14);
    }

    #[test]
    fn dissipation_form_rejects_bad_input() {
        let b = Betas([1.0, 1.0, 1.0]);
        let d = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(matches!(
            dissipation_form(b, &[1.0, 1.0, 0.0], &d),
            Err(Error::NotUnit(_))
        ));
        let bad = [[1.0, 0.5, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(matches!(
            dissipation_form(b, &[1.0, 0.0, 0.0], &bad),
            Err(Error::NotSymmetricTraceFree(_))
        ));
        let traced = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(dissipation_form(b, &[1.0, 0.0, 0.0], &traced).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        assert!(admissible_bruteforce(
            Betas([1.0 / 3.0, 2.0, 2.0 / 3.0]),
            10_000,
            Dim::Two
        ));
        assert!(!admissible_bruteforce(Betas([-3.0, 1.0, 0.0]), 10_000, Dim::Two));
        assert!(admissible_bruteforce(Betas([0.0, 0.0, 0.0]), 10_000, Dim::Two));
        // the witness n = e1, D = diag(1, -1, 0) gives -3 + 2 = -1
        let min = bruteforce_min_2d(Betas([-3.0, 1.0, 0.0]), 10_000);
        assert!((min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_three_dimensional() {
        assert!(admissible_bruteforce(Betas([1.0, 1.0, 0.0]), 20_000, Dim::Three));
        assert!(!admissible_bruteforce(Betas([0.0, 1.0, -3.0]), 20_000, Dim::Three));
    }

    fn rotate_z(theta: f64) -> Mat3 {
        let (c, s) = (theta.cos(), theta.sin());
        [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    }

    fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        m
    }

    fn unit(z: f64, psi: f64) -> Vec3 {
        let rho = (1.0 - z * z).sqrt();
        [rho * psi.cos(), rho * psi.sin(), z]
    }

    proptest! {
        #[test]
        fn scaling_alphas(lambda in 0.1f64..10.0, a1 in -2.0f64..2.0, a4 in 0.0f64..3.0,
                          a2 in -3.0f64..-0.1, a3 in 0.1f64..3.0, a5 in -1.0f64..1.0) {
            let a6 = a2 + a3 + a5;
            let base = LeslieCoefficients::with_alphas([a1, a2, a3, a4, a5, a6], 0.5, 1.0);
            let mut scaled = base;
            let s = [a1, a2, a3, a4, a5, a6].map(|x| x * lambda);
            scaled.alpha1 = s[0]; scaled.alpha2 = s[1]; scaled.alpha3 = s[2];
            scaled.alpha4 = s[3]; scaled.alpha5 = s[4]; scaled.alpha6 = s[5];
            // Parodi holds up to rounding of the scaled values
            prop_assume!(scaled.parodi_residual() <= TOL_PARODI);
            let d0 = derive(&base).unwrap();
            let d1 = derive(&scaled).unwrap();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()));
            prop_assert!(close(d1.gamma1, lambda * d0.gamma1));
            prop_assert!(close(d1.gamma2, lambda * d0.gamma2));
            prop_assert!(close(d1.beta1, lambda * d0.beta1));
            prop_assert!(close(d1.beta2, lambda * d0.beta2));
            prop_assert!(close(d1.beta3, lambda * d0.beta3));
            prop_assert!(close(d1.mu2, d0.mu2));
            prop_assert!(close(d1.mu1, d0.mu1 / lambda));
        }

        #[test]
        fn admissible_form_is_nonnegative(b1 in -3.0f64..3.0, b2 in 0.0f64..3.0, b3 in -3.0f64..3.0,
                                          z in -1.0f64..1.0, psi in 0.0f64..6.3, alpha in 0.0f64..6.3) {
            let betas = Betas([b1, b2, b3]);
            prop_assume!(admissible(betas, Dim::Two));
            let (x, y) = (alpha.cos(), alpha.sin());
            let d = [[x, y, 0.0], [y, -x, 0.0], [0.0, 0.0, 0.0]];
            let n = unit(z, psi);
            prop_assert!(dissipation_form_unchecked(betas, &n, &d) >= -TOL_FORM);
        }

        #[test]
        fn form_is_invariant_under_x3_rotation(b1 in -3.0f64..3.0, b2 in -3.0f64..3.0, b3 in -3.0f64..3.0,
                                               z in -1.0f64..1.0, psi in 0.0f64..6.3,
                                               x in -1.0f64..1.0, y in -1.0f64..1.0, theta in 0.0f64..6.3) {
            let betas = Betas([b1, b2, b3]);
            let n = unit(z, psi);
            let d = [[x, y, 0.0], [y, -x, 0.0], [0.0, 0.0, 0.0]];
            let r = rotate_z(theta);
            let rn = matvec(&r, &n);
            let rd = mat_mul(&mat_mul(&r, &d), &crate::tensor::transpose(&r));
            let f0 = dissipation_form_unchecked(betas, &n, &d);
            let f1 = dissipation_form_unchecked(betas, &rn, &rd);
            prop_assert!((f0 - f1).abs() <= 1e-12 * (1.0 + f0.abs()));
        }
    }
}
