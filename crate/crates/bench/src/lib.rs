//! Fixtures shared by the benchmarks: the reference coefficient set and a
//! twisted director carried by a Taylor-Green flow.

use std::f64::consts::TAU;

use elsim_core::{Director, ElasticConstants, Grid, LeslieCoefficients, Model, State, VectorField};

pub fn reference_model(n: usize) -> Model {
    let leslie = LeslieCoefficients::with_alphas([0.0, -1.0, 2.0, 2.0, 0.0, 1.0], 0.5, 10.0);
    let grid = Grid::new(n, TAU).expect("valid grid");
    Model::new(grid, leslie, ElasticConstants::new(0.25, 0.3, 0.2).expect("positive")).expect("consistent")
}

pub fn reference_state(model: &Model) -> State {
    let g = &model.grid;
    let v = VectorField([g.sample(|x, y| x.sin() * y.cos()), g.sample(|x, y| -x.cos() * y.sin())]);
    let n = Director::from_fn(g.size(), |idx| {
        let th = 0.5 * g.point(idx).0.sin();
        [th.cos(), th.sin(), 0.0]
    });
    State::new(g, v, n, 0.0).expect("valid state")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        let m = reference_model(16);
        let s = reference_state(&m);
        assert_eq!(s.v.len(), 256);
    }
}
