//! Initial conditions built from an `[initial]` table.
//!
//! Every preset returns a state that passes `State::new`: solenoidal velocity
//! and a director normalized pointwise.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::BufReader;

use elsim_core::snapshot::read_state;
use elsim_core::{Director, Grid, State, VectorField, Velocity};
use thiserror::Error;

use crate::config::InitialConfig;
use crate::error::CliError;

pub const PRESETS: [&str; 5] = ["uniform", "taylor-green", "twist", "bump", "snapshot"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("unknown preset `{0}` (expected one of uniform, taylor-green, twist, bump, snapshot)")]
    UnknownPreset(String),
    #[error("preset `{preset}`: {reason}")]
    BadParams { preset: String, reason: String },
}

impl From<PresetError> for CliError {
    fn from(e: PresetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn bad(init: &InitialConfig, reason: impl Into<String>) -> PresetError {
    PresetError::BadParams {
        preset: init.preset.clone(),
        reason: reason.into(),
    }
}

/// Checks the parameters of `init` against `grid` without building the state.
pub fn check_params(init: &InitialConfig, grid: &Grid) -> Result<(), PresetError> {
    if !PRESETS.contains(&init.preset.as_str()) {
        return Err(PresetError::UnknownPreset(init.preset.clone()));
    }
    let b = init.director;
    let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if !((len - 1.0).abs() <= 1e-9) {
        return Err(bad(init, format!("director {b:?} must be a unit vector (|b| = {len})")));
    }
    let needs_amplitude = matches!(init.preset.as_str(), "taylor-green" | "twist" | "bump");
    match init.amplitude {
        Some(a) if !a.is_finite() => return Err(bad(init, "amplitude must be finite")),
        None if needs_amplitude => return Err(bad(init, "missing `amplitude`")),
        _ => {}
    }
    let max_mode = (grid.n() / 2).saturating_sub(1) as u32;
    let check_mode = |m: u32, key: &str| {
        if m == 0 || m > max_mode {
            Err(bad(
                init,
                format!("{key} = {m} must lie in 1..={max_mode} on an N = {} grid", grid.n()),
            ))
        } else {
            Ok(())
        }
    };
    if init.preset == "taylor-green" {
        check_mode(init.mode.unwrap_or(1), "mode")?;
    }
    if let Some(f) = &init.flow {
        if init.preset == "taylor-green" {
            return Err(bad(
                init,
                "`flow` overlays a director preset; taylor-green already sets the flow",
            ));
        }
        if !f.amplitude.is_finite() {
            return Err(bad(init, "flow.amplitude must be finite"));
        }
        check_mode(f.mode, "flow.mode")?;
    }
    if init.preset == "bump" {
        let w = bump_width(init, grid);
        if !(w.is_finite() && w >= 2.0 * grid.spacing()) {
            return Err(bad(
                init,
                format!(
                    "width = {w} must be at least two grid spacings ({})",
                    2.0 * grid.spacing()
                ),
            ));
        }
        if let Some(c) = init.center {
            if !(c[0].is_finite() && c[1].is_finite()) {
                return Err(bad(init, "center must be finite"));
            }
        }
    }
    if init.preset == "snapshot" {
        match &init.path {
            None => return Err(bad(init, "missing `path`")),
            Some(p) if !p.is_file() => return Err(bad(init, format!("snapshot file {} does not exist", p.display()))),
            _ => {}
        }
    }
    Ok(())
}

fn bump_width(init: &InitialConfig, grid: &Grid) -> f64 {
    init.width.unwrap_or(grid.length() / 16.0)
}

/// Single-mode Taylor-Green vortex `U (sin kx cos ky, −cos kx sin ky)` with `k = 2πm/L`.
pub fn taylor_green(grid: &Grid, amplitude: f64, mode: u32) -> Velocity {
    let k = TAU * mode as f64 / grid.length();
    VectorField([
        grid.sample(|x, y| amplitude * (k * x).sin() * (k * y).cos()),
        grid.sample(|x, y| -amplitude * (k * x).cos() * (k * y).sin()),
    ])
}

/// Planar twist `n = (cos θ, sin θ, 0)`, `θ = A sin(2πx/L)`.
pub fn twist(grid: &Grid, amplitude: f64) -> Director {
    let w = TAU / grid.length();
    Director::from_fn(grid.size(), |idx| {
        let (x, _) = grid.point(idx);
        let th = amplitude * (w * x).sin();
        [th.cos(), th.sin(), 0.0]
    })
}

/// Director tilted from `b` by `A exp(−d²/w²)` towards a fixed unit vector
/// perpendicular to `b`, with `d` the periodic distance to `center`.
pub fn bump(grid: &Grid, b: [f64; 3], amplitude: f64, width: f64, center: (f64, f64)) -> Director {
    let e = if b[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let eb = e[0] * b[0] + e[1] * b[1] + e[2] * b[2];
    let p: [f64; 3] = std::array::from_fn(|c| e[c] - eb * b[c]);
    let pl = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let p = p.map(|x| x / pl);
    Director::from_fn(grid.size(), |idx| {
        let d = grid.periodic_distance(grid.point(idx), center);
        let a = amplitude * (-(d * d) / (width * width)).exp();
        let u: [f64; 3] = std::array::from_fn(|c| a.cos() * b[c] + a.sin() * p[c]);
        let l = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        u.map(|x| x / l)
    })
}

fn unit(b: [f64; 3]) -> [f64; 3] {
    let l = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    b.map(|x| x / l)
}

/// Builds the initial state at `t = 0` (or the snapshot's time).
pub fn initial_preset(init: &InitialConfig, grid: &Grid) -> Result<State, CliError> {
    check_params(init, grid)?;
    let b = unit(init.director);
    let size = grid.size();
    let amplitude = init.amplitude.unwrap_or(0.0);
    let constant = || Director::from_fn(size, |_| b);
    let (v, n, t) = match init.preset.as_str() {
        "uniform" => (VectorField::zeros(size), constant(), 0.0),
        "taylor-green" => (taylor_green(grid, amplitude, init.mode.unwrap_or(1)), constant(), 0.0),
        "twist" => (VectorField::zeros(size), twist(grid, amplitude), 0.0),
        "bump" => {
            let l = grid.length();
            let c = init.center.unwrap_or([l / 2.0, l / 2.0]);
            let n = bump(grid, b, amplitude, bump_width(init, grid), (c[0], c[1]));
            (VectorField::zeros(size), n, 0.0)
        }
        "snapshot" => {
            let path = init.path.as_ref().expect("checked");
            let file = File::open(path)?;
            let s = read_state(BufReader::new(file), grid)?;
            (s.v, s.n, s.t)
        }
        other => return Err(PresetError::UnknownPreset(other.to_string()).into()),
    };
    let v = match &init.flow {
        Some(f) => {
            let mut v = v;
            v.axpy(1.0, &taylor_green(grid, f.amplitude, f.mode));
            v
        }
        None => v,
    };
    State::new(grid, v, n, t).map_err(|e| bad(init, e.to_string()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FlowConfig;
    use elsim_core::diagnostics::{energy, local_concentration};
    use elsim_core::{ElasticConstants, LeslieCoefficients, Model};

    fn init(preset: &str) -> InitialConfig {
        InitialConfig {
            preset: preset.to_string(),
            director: [0.0, 0.0, 1.0],
            amplitude: None,
            mode: None,
            width: None,
            center: None,
            flow: None,
            path: None,
        }
    }

    fn model(n: usize) -> Model {
        let leslie = LeslieCoefficients::with_alphas([0.0, -1.0, 2.0, 2.0, 0.0, 1.0], 0.5, 3.0);
        Model::new(
            Grid::new(n, TAU).unwrap(),
            leslie,
            ElasticConstants::new(1.0, 2.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_has_zero_energy() {
        let m = model(16);
        let s = initial_preset(&init("uniform"), &m.grid).unwrap();
        assert_eq!(energy(&m, &s), 0.0);
    }

    #[test]
    fn taylor_green_energy_closed_form() {
        let m = model(32);
        let mut c = init("taylor-green");
        c.amplitude = Some(0.7);
        c.mode = Some(2);
        let s = initial_preset(&c, &m.grid).unwrap();
        let area = m.grid.length().powi(2);
        // ∫|v|² = U² · area/2 for the single-mode vortex
        let exact = 3.0 / (2.0 * 0.5) * 0.7 * 0.7 * area / 2.0;
        assert!((energy(&m, &s) - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn zero_twist_is_uniform() {
        let g = Grid::new(16, TAU).unwrap();
        let mut c = init("twist");
        c.amplitude = Some(0.0);
        let mut u = init("uniform");
        u.director = [1.0, 0.0, 0.0];
        assert_eq!(initial_preset(&c, &g).unwrap(), initial_preset(&u, &g).unwrap());
    }

    #[test]
    fn bump_concentrates_at_center() {
        let g = Grid::new(64, TAU).unwrap();
        let mut c = init("bump");
        c.amplitude = Some(1.0);
        c.center = Some([2.0, 4.0]);
        c.flow = Some(FlowConfig {
            amplitude: 0.1,
            mode: 1,
        });
        let s = initial_preset(&c, &g).unwrap();
        let near = local_concentration(&g, &s, (2.0, 4.0), 0.5).unwrap();
        let far = local_concentration(&g, &s, (5.0, 1.0), 0.5).unwrap();
        assert!(near > 10.0 * far, "{near} vs {far}");
    }

    #[test]
    fn parameter_errors() {
        let g = Grid::new(16, TAU).unwrap();
        assert_eq!(
            check_params(&init("vortex"), &g),
            Err(PresetError::UnknownPreset("vortex".into()))
        );
        assert!(matches!(
            check_params(&init("twist"), &g),
            Err(PresetError::BadParams { .. })
        ));
        let mut tg = init("taylor-green");
        tg.amplitude = Some(1.0);
        tg.mode = Some(8);
        assert!(check_params(&tg, &g).is_err());
        tg.mode = Some(7);
        assert!(check_params(&tg, &g).is_ok());
        let mut b = init("uniform");
        b.director = [1.0, 1.0, 0.0];
        assert!(check_params(&b, &g).is_err());
        let mut sn = init("snapshot");
        sn.path = Some("/nonexistent/state.bin".into());
        assert!(check_params(&sn, &g).is_err());
    }
}
