//! Pseudospectral simulation of the two-dimensional Ericksen-Leslie system
//! with general Oseen-Frank energy, with diagnostics for its energy law,
//! stress identities and singularity criteria.

pub mod coefficients;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod leslie_stress;
pub mod oseen_frank;
pub mod sampling;
pub mod snapshot;
pub mod tensor;

pub use coefficients::{
    admissible, admissible_bruteforce, derive, Betas, DerivedCoefficients, Dim, ElasticConstants, LeslieCoefficients,
    Viscosities,
};
pub use diagnostics::{EnergyLedger, LedgerRecorder, LedgerRow};
pub use dynamics::{run, Model, Observer, Scheme, SolverConfig, State, Trajectory};
pub use error::{Error, Result};
pub use fields::{Axis, Director, Grid, ScalarField, Spectrum, VectorField, Velocity};
pub use oseen_frank::ElasticState;
