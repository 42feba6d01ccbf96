//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use pf_core::{Constants, EquationForm, SpectralProblem};

/// Unit-mass infinite box of width pi in natural units.
pub fn unit_box() -> SpectralProblem {
    SpectralProblem::infinite_box(PI, 1.0, EquationForm::MassIndependent).expect("valid box")
}

pub fn natural() -> Constants {
    Constants::natural()
}
