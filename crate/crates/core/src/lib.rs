//! Particle-field (PF) theory: a particle and its accompanying field moving
//! together, from classical trajectories through Lorentz invariance of the
//! PF interval to the stationary relativistic spectrum.
//!
//! Everything runs in natural units (`c = hbar = 1`) unless a [`Constants`]
//! in SI mode is supplied.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod field;
pub mod io;
pub mod kinematics;
pub mod quadrature;
pub mod relativity;
pub mod spectral;

pub use constants::{make_constants, ConstantOverrides, Constants, PfCoupling, SiScale, UnitSystem};
pub use error::{PfError, Result};
pub use field::{box_eigenfield, CubicSpline, Domain, FieldKind, FieldProfile};
pub use kinematics::{EnergyBreakdown, ParticleState, TrajectoryRecord, TrajectorySample};
pub use relativity::{Event, FrameContext, InvarianceConfig, InvarianceReport, PhotonLimitRow};
pub use spectral::{EquationForm, Level, Potential, SpectralProblem, Spectrum, SpectrumReport};
