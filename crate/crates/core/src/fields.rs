//! Periodic pseudospectral discretization on the square torus `[0, L)²`.
//!
//! Physical samples are stored row-major with `x1` varying fastest:
//! `idx = j * N + i` holds the value at `(i L / N, j L / N)`. Spectra are
//! stored transposed, `idx = a * N + b` for the mode `(m1, m2) = (m(a), m(b))`,
//! which saves one transpose per transform.
//!
//! All derivative multipliers zero the Nyquist mode so that real fields stay
//! real and `laplacian == divergence ∘ gradient` holds exactly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type Complex = Complex64;

thread_local! {
    // FFT scratch and transpose buffers, reused across transforms
    static WORKSPACE: std::cell::RefCell<(Vec<Complex>, Vec<Complex>)> =
        const { std::cell::RefCell::new((Vec::new(), Vec::new())) };
}

/// Spatial axis of the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Real samples of a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(pub Vec<f64>);

impl ScalarField {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| f(*a, *b)).collect())
    }
}

/// Real samples of a field with `C` components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<const C: usize>(pub [ScalarField; C]);

pub type Velocity = VectorField<2>;
pub type Director = VectorField<3>;

impl<const C: usize> VectorField<C> {
    pub fn zeros(len: usize) -> Self {
        Self(std::array::from_fn(|_| ScalarField::zeros(len)))
    }

    pub fn len(&self) -> usize {
        self.0[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.0[0].is_empty()
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; C] {
        std::array::from_fn(|c| self.0[c].0[idx])
    }

    #[inline]
    pub fn set(&mut self, idx: usize, value: [f64; C]) {
        for (c, v) in value.into_iter().enumerate() {
            self.0[c].0[idx] = v;
        }
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> [f64; C]) -> Self {
        let mut out = Self::zeros(len);
        for idx in 0..len {
            out.set(idx, f(idx));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(ScalarField::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.axpy(s, b);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(std::array::from_fn(|c| self.0[c].scaled(s)))
    }

    /// Pointwise Euclidean norm.
    pub fn magnitude(&self) -> ScalarField {
        ScalarField(
            (0..self.len())
                .map(|i| self.at(i).iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect(),
        )
    }
}

impl Director {
    /// `max_x ||n(x)| − 1|`.
    pub fn unit_defect(&self) -> f64 {
        self.magnitude().0.iter().fold(0.0, |m, r| m.max((r - 1.0).abs()))
    }

    /// Pointwise `n / |n|`.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        for idx in 0..self.len() {
            let n = self.at(idx);
            let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::DegenerateDirector(idx));
            }
            out.set(idx, [n[0] / r, n[1] / r, n[2] / r]);
        }
        Ok(out)
    }
}

/// Fourier coefficients of a real field, transposed layout `[k1][k2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(pub Vec<Complex>);

impl Spectrum {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex::new(0.0, 0.0); len])
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * s;
        }
    }
}

/// Square periodic grid with cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed integer frequency for each FFT index.
    modes: Vec<i64>,
    /// Physical wavenumbers `2π m / L`, Nyquist kept.
    k: Vec<f64>,
    /// Derivative wavenumbers, Nyquist zeroed.
    kd: Vec<f64>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N = {n} must be even and at least 8")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {length} must be positive")));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let modes: Vec<i64> = (0..n)
            .map(|a| if a <= n / 2 { a as i64 } else { a as i64 - n as i64 })
            .collect();
        let scale = std::f64::consts::TAU / length;
        let k: Vec<f64> = modes.iter().map(|&m| m as f64 * scale).collect();
        let kd: Vec<f64> = modes
            .iter()
            .map(|&m| if m == (n / 2) as i64 { 0.0 } else { m as f64 * scale })
            .collect();
        Ok(Self {
            n,
            length,
            fwd,
            inv,
            modes,
            k,
            kd,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of samples, `N²`.
    pub fn size(&self) -> usize {
        self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Coordinates of sample `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    /// Signed integer frequency of FFT index `a`.
    pub fn mode(&self, a: usize) -> i64 {
        self.modes[a]
    }

    /// Physical wavenumber of FFT index `a` (Nyquist kept).
    pub fn wavenumber(&self, a: usize) -> f64 {
        self.k[a]
    }

    /// Wavenumber used by derivative multipliers (Nyquist zeroed).
    pub fn derivative_wavenumber(&self, a: usize) -> f64 {
        self.kd[a]
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        ScalarField(
            (0..self.size())
                .map(|idx| {
                    let (x1, x2) = self.point(idx);
                    f(x1, x2)
                })
                .collect(),
        )
    }

    fn check(&self, len: usize) {
        assert_eq!(len, self.size(), "field does not match grid size");
    }

    fn transpose(&self, src: &[Complex], dst: &mut [Complex]) {
        let n = self.n;
        const B: usize = 16;
        for jb in (0..n).step_by(B) {
            for ib in (0..n).step_by(B) {
                for j in jb..(jb + B).min(n) {
                    for i in ib..(ib + B).min(n) {
                        dst[i * n + j] = src[j * n + i];
                    }
                }
            }
        }
    }

    fn fft2(&self, buf: &mut [Complex], plan: &Arc<dyn Fft<f64>>) {
        WORKSPACE.with(|w| {
            let mut w = w.borrow_mut();
            let (scratch, tmp) = &mut *w;
            let need = plan.get_inplace_scratch_len();
            if scratch.len() < need {
                scratch.resize(need, Complex::new(0.0, 0.0));
            }
            if tmp.len() < buf.len() {
                tmp.resize(buf.len(), Complex::new(0.0, 0.0));
            }
            let tmp = &mut tmp[..buf.len()];
            plan.process_with_scratch(buf, &mut scratch[..need]);
            self.transpose(buf, tmp);
            plan.process_with_scratch(tmp, &mut scratch[..need]);
            buf.copy_from_slice(tmp);
        });
    }

    fn forward_complex(&self, mut buf: Vec<Complex>) -> Vec<Complex> {
        self.fft2(&mut buf, &self.fwd);
        buf
    }

    fn inverse_complex(&self, mut buf: Vec<Complex>) -> Vec<Complex> {
        self.fft2(&mut buf, &self.inv);
        let s = 1.0 / (self.size() as f64);
        for z in buf.iter_mut() {
            *z *= s;
        }
        buf
    }

    pub fn forward(&self, f: &ScalarField) -> Spectrum {
        self.check(f.len());
        let buf = f.0.iter().map(|&x| Complex::new(x, 0.0)).collect();
        Spectrum(self.forward_complex(buf))
    }

    pub fn inverse(&self, s: &Spectrum) -> ScalarField {
        self.check(s.0.len());
        ScalarField(self.inverse_complex(s.0.clone()).into_iter().map(|z| z.re).collect())
    }

    /// Transforms two real fields with one complex FFT.
    pub fn forward_pair(&self, f: &ScalarField, g: &ScalarField) -> (Spectrum, Spectrum) {
        self.check(f.len());
        self.check(g.len());
        let buf = f.0.iter().zip(&g.0).map(|(&a, &b)| Complex::new(a, b)).collect();
        let z = self.forward_complex(buf);
        let n = self.n;
        let mut fs = Vec::with_capacity(z.len());
        let mut gs = Vec::with_capacity(z.len());
        for a in 0..n {
            let row = a * n;
            let crow = ((n - a) % n) * n;
            for b in 0..n {
                let zk = z[row + b];
                let zc = z[crow + (n - b) % n].conj();
                fs.push((zk + zc) * 0.5);
                let d = zk - zc;
                // (Z(k) − conj Z(−k)) / 2i
                gs.push(Complex::new(d.im * 0.5, -d.re * 0.5));
            }
        }
        (Spectrum(fs), Spectrum(gs))
    }

    /// Inverse of two Hermitian spectra with one complex FFT.
    pub fn inverse_pair(&self, f: &Spectrum, g: &Spectrum) -> (ScalarField, ScalarField) {
        let buf =
            f.0.iter()
                .zip(&g.0)
                .map(|(a, b)| a + Complex::new(-b.im, b.re))
                .collect();
        let mut z: Vec<Complex> = buf;
        self.fft2(&mut z, &self.inv);
        let s = 1.0 / (self.size() as f64);
        (
            ScalarField(z.iter().map(|c| c.re * s).collect()),
            ScalarField(z.iter().map(|c| c.im * s).collect()),
        )
    }

    /// Forward transforms of several fields, paired two at a time.
    pub fn forward_many(&self, fields: &[&ScalarField]) -> Vec<Spectrum> {
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            match chunk {
                [f, g] => {
                    let (a, b) = self.forward_pair(f, g);
                    out.push(a);
                    out.push(b);
                }
                [f] => out.push(self.forward(f)),
                _ => unreachable!(),
            }
        }
        out
    }

    /// Inverse transforms of several Hermitian spectra, paired two at a time.
    pub fn inverse_many(&self, spectra: &[&Spectrum]) -> Vec<ScalarField> {
        let mut out = Vec::with_capacity(spectra.len());
        for chunk in spectra.chunks(2) {
            match chunk {
                [f, g] => {
                    let (a, b) = self.inverse_pair(f, g);
                    out.push(a);
                    out.push(b);
                }
                [f] => out.push(self.inverse(f)),
                _ => unreachable!(),
            }
        }
        out
    }

    pub fn forward_vector<const C: usize>(&self, v: &VectorField<C>) -> [Spectrum; C] {
        let refs: Vec<&ScalarField> = v.0.iter().collect();
        let mut out = self.forward_many(&refs).into_iter();
        std::array::from_fn(|_| out.next().unwrap())
    }

    pub fn inverse_vector<const C: usize>(&self, s: &[Spectrum; C]) -> VectorField<C> {
        let refs: Vec<&Spectrum> = s.iter().collect();
        let mut out = self.inverse_many(&refs).into_iter();
        VectorField(std::array::from_fn(|_| out.next().unwrap()))
    }

    /// Applies a real multiplier `m(a, b)` in place.
    pub fn apply_real(&self, s: &mut Spectrum, m: impl Fn(usize, usize) -> f64) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                s.0[a * n + b] *= m(a, b);
            }
        }
    }

    /// Spectral `∂_axis`.
    pub fn diff_spectrum(&self, s: &Spectrum, axis: Axis) -> Spectrum {
        let n = self.n;
        let mut out = Vec::with_capacity(s.0.len());
        for a in 0..n {
            let row = &s.0[a * n..(a + 1) * n];
            match axis {
                Axis::X1 => {
                    let k = self.kd[a];
                    out.extend(row.iter().map(|z| Complex::new(-k * z.im, k * z.re)));
                }
                Axis::X2 => {
                    out.extend(
                        row.iter()
                            .zip(&self.kd)
                            .map(|(z, &k)| Complex::new(-k * z.im, k * z.re)),
                    );
                }
            }
        }
        Spectrum(out)
    }

    /// Multiplier of the Laplacian at spectral index `(a, b)`.
    #[inline]
    pub fn laplacian_symbol(&self, a: usize, b: usize) -> f64 {
        -(self.kd[a] * self.kd[a] + self.kd[b] * self.kd[b])
    }

    pub fn laplacian_spectrum(&self, s: &Spectrum) -> Spectrum {
        let mut out = s.clone();
        self.apply_real(&mut out, |a, b| self.laplacian_symbol(a, b));
        out
    }

    pub fn diff(&self, f: &ScalarField, axis: Axis) -> ScalarField {
        self.inverse(&self.diff_spectrum(&self.forward(f), axis))
    }

    pub fn gradient(&self, f: &ScalarField) -> VectorField<2> {
        let s = self.forward(f);
        let (g1, g2) = self.inverse_pair(&self.diff_spectrum(&s, Axis::X1), &self.diff_spectrum(&s, Axis::X2));
        VectorField([g1, g2])
    }

    /// `∂1 u¹ + ∂2 u²`, using only the first two components.
    pub fn divergence2<const C: usize>(&self, u: &VectorField<C>) -> ScalarField {
        assert!(C >= 2);
        let (s1, s2) = self.forward_pair(&u.0[0], &u.0[1]);
        let mut d = self.diff_spectrum(&s1, Axis::X1);
        d.axpy(1.0, &self.diff_spectrum(&s2, Axis::X2));
        self.inverse(&d)
    }

    pub fn laplacian(&self, f: &ScalarField) -> ScalarField {
        self.inverse(&self.laplacian_spectrum(&self.forward(f)))
    }

    /// Componentwise Laplacian.
    pub fn laplacian_vector<const C: usize>(&self, u: &VectorField<C>) -> VectorField<C> {
        let s = self.forward_vector(u);
        self.inverse_vector(&s.map(|c| self.laplacian_spectrum(&c)))
    }

    /// Curl of a 3-vector field independent of `x3`:
    /// `(∂2 n³, −∂1 n³, ∂1 n² − ∂2 n¹)`.
    pub fn curl3(&self, u: &VectorField<3>) -> VectorField<3> {
        let s = self.forward_vector(u);
        self.inverse_vector(&self.curl3_spectrum(&s))
    }

    pub fn curl3_spectrum(&self, s: &[Spectrum; 3]) -> [Spectrum; 3] {
        let c1 = self.diff_spectrum(&s[2], Axis::X2);
        let mut c2 = self.diff_spectrum(&s[2], Axis::X1);
        c2.0.iter_mut().for_each(|z| *z = -*z);
        let mut c3 = self.diff_spectrum(&s[1], Axis::X1);
        c3.axpy(-1.0, &self.diff_spectrum(&s[0], Axis::X2));
        [c1, c2, c3]
    }

    /// Leray projection onto divergence-free fields, in spectral space.
    pub fn project_spectrum(&self, s: &mut [Spectrum; 2]) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let (k1, k2) = (self.kd[a], self.kd[b]);
                let k2sum = k1 * k1 + k2 * k2;
                if k2sum == 0.0 {
                    continue;
                }
                let idx = a * n + b;
                let dot = (s[0].0[idx] * k1 + s[1].0[idx] * k2) / k2sum;
                s[0].0[idx] -= dot * k1;
                s[1].0[idx] -= dot * k2;
            }
        }
    }

    pub fn leray_project(&self, v: &VectorField<2>) -> VectorField<2> {
        let mut s = self.forward_vector(v);
        self.project_spectrum(&mut s);
        self.inverse_vector(&s)
    }

    /// Mollifier multiplier for integer mode `(m1, m2)` and cutoff `K`.
    pub fn mollifier_symbol(m1: i64, m2: i64, cutoff: f64) -> f64 {
        let r = ((m1 * m1 + m2 * m2) as f64).sqrt() / cutoff;
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let u = 2.0 - r;
            u * u * (3.0 - 2.0 * u)
        }
    }

    pub fn mollify_spectrum(&self, s: &mut Spectrum, cutoff: f64) {
        self.apply_real(s, |a, b| Self::mollifier_symbol(self.modes[a], self.modes[b], cutoff));
    }

    /// Smooth Fourier cutoff keeping modes with `|m| ≤ K` and removing `|m| ≥ 2K`.
    pub fn mollify(&self, f: &ScalarField, cutoff: f64) -> ScalarField {
        let mut s = self.forward(f);
        self.mollify_spectrum(&mut s, cutoff);
        self.inverse(&s)
    }

    pub fn mollify_vector<const C: usize>(&self, u: &VectorField<C>, cutoff: f64) -> VectorField<C> {
        let mut s = self.forward_vector(u);
        for c in s.iter_mut() {
            self.mollify_spectrum(c, cutoff);
        }
        self.inverse_vector(&s)
    }

    /// Two-thirds rule: zeroes modes with `3 |m_i| ≥ N` on either axis.
    pub fn dealias_spectrum(&self, s: &mut Spectrum) {
        let n = self.n as i64;
        self.apply_real(s, |a, b| {
            if 3 * self.modes[a].abs() < n && 3 * self.modes[b].abs() < n {
                1.0
            } else {
                0.0
            }
        });
    }

    pub fn dealias(&self, f: &ScalarField) -> ScalarField {
        let mut s = self.forward(f);
        self.dealias_spectrum(&mut s);
        self.inverse(&s)
    }

    /// `∫ f dx` by the rectangle rule (spectrally accurate on the torus).
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        self.check(f.len());
        f.0.iter().sum::<f64>() * self.cell_area()
    }

    /// `‖u‖_{L²}` over all components.
    pub fn l2_norm<const C: usize>(&self, u: &VectorField<C>) -> f64 {
        let s: f64 = u.0.iter().flat_map(|c| c.0.iter()).map(|x| x * x).sum();
        (s * self.cell_area()).sqrt()
    }

    pub fn scalar_l2_norm(&self, f: &ScalarField) -> f64 {
        (f.0.iter().map(|x| x * x).sum::<f64>() * self.cell_area()).sqrt()
    }

    /// `‖f‖_{L²}` computed from Fourier coefficients.
    pub fn spectral_l2_norm(&self, s: &Spectrum) -> f64 {
        let n2 = self.size() as f64;
        (s.0.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area() / n2).sqrt()
    }

    /// Periodic minimum-image distance between two points.
    #[inline]
    pub fn periodic_distance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let l = self.length;
        let wrap = |d: f64| {
            let d = d.rem_euclid(l);
            d.min(l - d)
        };
        let (dx, dy) = (wrap(a.0 - b.0), wrap(a.1 - b.1));
        (dx * dx + dy * dy).sqrt()
    }

    /// `∫_{B_R(x0)} e dx` using the sampled indicator of the periodic ball.
    pub fn ball_integral(&self, e: &ScalarField, center: (f64, f64), radius: f64) -> Result<f64> {
        self.check(e.len());
        let max = self.length / 2.0;
        if !(radius > 0.0 && radius <= max) {
            return Err(Error::RadiusTooLarge { radius, max });
        }
        let h = self.spacing();
        let n = self.n as i64;
        let reach = (radius / h).ceil() as i64 + 1;
        let ci = (center.0 / h).round() as i64;
        let cj = (center.1 / h).round() as i64;
        let span = reach.min(n / 2);
        let mut sum = 0.0;
        let mut seen = vec![false; if 2 * span + 1 > n { self.size() } else { 0 }];
        for dj in -span..=span {
            for di in -span..=span {
                let i = (ci + di).rem_euclid(n) as usize;
                let j = (cj + dj).rem_euclid(n) as usize;
                let idx = j * self.n + i;
                if !seen.is_empty() {
                    if seen[idx] {
                        continue;
                    }
                    seen[idx] = true;
                }
                if self.periodic_distance(self.point(idx), center) <= radius {
                    sum += e.0[idx];
                }
            }
        }
        Ok(sum * self.cell_area())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> Grid {
        Grid::new(n, TAU).unwrap()
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.0.iter().zip(&b.0).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, 1.0).is_ok());
    }

    #[test]
    fn derivative_of_sine() {
        let l = 3.0;
        let g = Grid::new(64, l).unwrap();
        let w = TAU / l;
        let f = g.sample(|x, _| (w * x).sin());
        let exact = g.sample(|x, _| w * (w * x).cos());
        assert!(max_diff(&g.diff(&f, Axis::X1), &exact) < 1e-12);
        assert!(g.diff(&f, Axis::X2).max_abs() < 1e-12);
    }

    #[test]
    fn derivative_of_plane_wave_matches_wavenumber() {
        let g = grid(16);
        for (m1, m2) in [(1i64, 0i64), (3, -2), (-7, 5)] {
            let c = g.sample(|x, y| (m1 as f64 * x + m2 as f64 * y).cos());
            let s = g.sample(|x, y| (m1 as f64 * x + m2 as f64 * y).sin());
            let dc = g.diff(&c, Axis::X2);
            assert!(max_diff(&dc, &s.scaled(-(m2 as f64))) < 1e-11);
            let ds = g.diff(&s, Axis::X1);
            assert!(max_diff(&ds, &c.scaled(m1 as f64)) < 1e-11);
        }
    }

    #[test]
    fn curl_of_planar_director() {
        let g = grid(64);
        let theta = |x: f64| 0.4 * x.sin();
        let n = VectorField([
            g.sample(|x, _| theta(x).cos()),
            g.sample(|x, _| theta(x).sin()),
            ScalarField::zeros(g.size()),
        ]);
        // θ is not band-limited in cos θ, but the spectrum decays fast
        let c = g.curl3(&n);
        let exact = g.sample(|x, _| 0.4 * x.cos() * theta(x).cos());
        assert!(c.0[0].max_abs() < 1e-12);
        assert!(c.0[1].max_abs() < 1e-12);
        assert!(max_diff(&c.0[2], &exact) < 1e-10);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let g = grid(16);
        assert!(g.laplacian(&ScalarField::constant(g.size(), 2.5)).max_abs() < 1e-14);
    }

    #[test]
    fn laplacian_equals_div_grad() {
        let g = grid(16);
        let f = g.sample(|x, y| (x.sin() * 2.0 * y).cos().exp());
        let lhs = g.laplacian(&f);
        let rhs = g.divergence2(&g.gradient(&f));
        assert!(max_diff(&lhs, &rhs) < 1e-11);
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = grid(32);
        let phi = g.sample(|x, y| (x + 2.0 * y).sin() + (3.0 * x).cos() * y.sin());
        let p = g.leray_project(&g.gradient(&phi));
        assert!(p.max_abs() < 1e-12);
    }

    #[test]
    fn leray_fixes_solenoidal_fields() {
        let g = grid(32);
        let psi = g.sample(|x, y| (x + 2.0 * y).sin() + (3.0 * x).cos() * y.sin());
        let grad = g.gradient(&psi);
        let v = VectorField([grad.0[1].scaled(-1.0), grad.0[0].clone()]);
        let p = g.leray_project(&v);
        assert!(max_diff(&p.0[0], &v.0[0]) < 1e-12);
        assert!(max_diff(&p.0[1], &v.0[1]) < 1e-12);
    }

    #[test]
    fn leray_matches_per_mode_oracle() {
        let g = grid(16);
        let v = VectorField([
            g.sample(|x, y| x.sin() + (2.0 * x + y).cos()),
            g.sample(|x, y| (x - 3.0 * y).sin()),
        ]);
        let p = g.leray_project(&v);
        // each mode of v is a plane wave; project it by hand
        let oracle = |x: f64, y: f64| -> [f64; 2] {
            let mut out = [0.0; 2];
            // sin(x) e1: k = (1, 0), amplitude parallel to k
            // cos(2x + y) e1: k = (2, 1), P e1 = e1 − k k1 / |k|²
            let c = (2.0 * x + y).cos();
            out[0] += c * (1.0 - 4.0 / 5.0);
            out[1] += c * (-2.0 / 5.0);
            // sin(x − 3y) e2: k = (1, −3), P e2 = e2 − k k2 / |k|²
            let s = (x - 3.0 * y).sin();
            out[0] += s * (3.0 / 10.0);
            out[1] += s * (1.0 - 9.0 / 10.0);
            out
        };
        for idx in 0..g.size() {
            let (x, y) = g.point(idx);
            let o = oracle(x, y);
            assert!((p.0[0].0[idx] - o[0]).abs() < 1e-12);
            assert!((p.0[1].0[idx] - o[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn mollifier_regions() {
        let g = grid(64);
        let c = ScalarField::constant(g.size(), 1.3);
        assert!(max_diff(&g.mollify(&c, 1.0), &c) < 1e-14);
        let low = g.sample(|x, y| (3.0 * x + 4.0 * y).sin());
        assert!(max_diff(&g.mollify(&low, 5.0), &low) < 1e-12);
        let high = g.sample(|x, y| (6.0 * x + 8.0 * y).cos());
        assert!(g.mollify(&high, 5.0).max_abs() < 1e-12);
        let mid = g.sample(|x, _| (7.0 * x).cos());
        let r: f64 = 7.0 / 5.0;
        let u = 2.0 - r;
        let phi = u * u * (3.0 - 2.0 * u);
        assert!(max_diff(&g.mollify(&mid, 5.0), &mid.scaled(phi)) < 1e-12);
    }

    #[test]
    fn dealias_truncates_high_modes() {
        let g = grid(24);
        let keep = g.sample(|x, _| (7.0 * x).sin());
        let drop = g.sample(|_, y| (8.0 * y).sin());
        assert!(max_diff(&g.dealias(&keep), &keep) < 1e-12);
        assert!(g.dealias(&drop).max_abs() < 1e-12);
    }

    #[test]
    fn pair_transforms_match_single() {
        let g = grid(16);
        let f = g.sample(|x, y| (x + y).sin() + 0.3 * (2.0 * y).cos());
        let h = g.sample(|x, y| x.cos() * (3.0 * y).sin() + 1.0);
        let (a, b) = g.forward_pair(&f, &h);
        let (a1, b1) = (g.forward(&f), g.forward(&h));
        for i in 0..a.0.len() {
            assert!((a.0[i] - a1.0[i]).norm() < 1e-12);
            assert!((b.0[i] - b1.0[i]).norm() < 1e-12);
        }
        let (f2, h2) = g.inverse_pair(&a, &b);
        assert!(max_diff(&f, &f2) < 1e-13);
        assert!(max_diff(&h, &h2) < 1e-13);
    }

    #[test]
    fn ball_integral_examples() {
        let g = Grid::new(128, 1.0).unwrap();
        let one = ScalarField::constant(g.size(), 1.0);
        let r = 0.25;
        let area = g.ball_integral(&one, (0.5, 0.5), r).unwrap();
        assert!((area - PI * r * r).abs() / (PI * r * r) < 0.02);
        let wrapped = g.ball_integral(&one, (0.0, 0.0), r).unwrap();
        assert_eq!(area, wrapped);
        let full = g.ball_integral(&one, (0.3, 0.7), 0.5).unwrap();
        assert!(full <= g.integrate(&one));
        let zero = ScalarField::zeros(g.size());
        assert_eq!(g.ball_integral(&zero, (0.1, 0.1), 0.2).unwrap(), 0.0);
        assert!(matches!(
            g.ball_integral(&one, (0.0, 0.0), 0.6),
            Err(Error::RadiusTooLarge { .. })
        ));
    }

    fn smooth_field(g: &Grid, c: [f64; 6]) -> ScalarField {
        g.sample(|x, y| {
            c[0] * (x + c[1]).sin() + c[2] * (2.0 * y - x).cos() + c[3] * (c[4] * x.cos() + c[5] * y.sin()).exp()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trip(c in proptest::array::uniform6(-1.0f64..1.0)) {
            let g = grid(16);
            let f = smooth_field(&g, c);
            let back = g.inverse(&g.forward(&f));
            prop_assert!(max_diff(&f, &back) <= 1e-12 * (1.0 + f.max_abs()));
        }

        #[test]
        fn diff_commutes_with_mollify(c in proptest::array::uniform6(-1.0f64..1.0), k in 1.0f64..8.0) {
            let g = grid(32);
            let f = smooth_field(&g, c);
            let a = g.mollify(&g.diff(&f, Axis::X1), k);
            let b = g.diff(&g.mollify(&f, k), Axis::X1);
            prop_assert!(max_diff(&a, &b) < 1e-12);
        }

        #[test]
        fn projection_is_idempotent_and_contracting(c in proptest::array::uniform6(-1.0f64..1.0),
                                                    d in proptest::array::uniform6(-1.0f64..1.0)) {
            let g = grid(32);
            let v = VectorField([smooth_field(&g, c), smooth_field(&g, d)]);
            let p = g.leray_project(&v);
            let pp = g.leray_project(&p);
            prop_assert!(max_diff(&p.0[0], &pp.0[0]) < 1e-12);
            prop_assert!(max_diff(&p.0[1], &pp.0[1]) < 1e-12);
            prop_assert!(g.l2_norm(&p) <= g.l2_norm(&v) * (1.0 + 1e-14));
            prop_assert!(g.divergence2(&p).max_abs() < 1e-10);
        }

        #[test]
        fn parseval(c in proptest::array::uniform6(-1.0f64..1.0)) {
            let g = grid(16);
            let f = smooth_field(&g, c);
            let a = g.scalar_l2_norm(&f);
            let b = g.spectral_l2_norm(&g.forward(&f));
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
        }
    }
}
