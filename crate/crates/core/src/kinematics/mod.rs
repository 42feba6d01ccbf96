//! Non-relativistic particle-field mechanics: field velocity and force, the
//! PF arc-length coordinate `q`, the PF force and Newtonian trajectories.

mod trajectory;

use serde::{Deserialize, Serialize};

pub use trajectory::{
    integrate_particle, pf_force_residuals, Constant, ForceLaw, Free, Harmonic, TrajectoryRecord,
    TrajectoryReport, TrajectorySample,
};

use crate::constants::PfCoupling;
use crate::error::{PfError, Result};
use crate::field::{FieldKind, FieldProfile};
use crate::quadrature;

/// Absolute tolerance used for the arc-length quadrature of `q`.
pub const PF_POSITION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub x: f64,
    pub v: f64,
    mass: f64,
}

impl ParticleState {
    pub fn new(x: f64, v: f64, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(PfError::InvalidArgument(format!(
                "particle mass must be positive, got {mass}"
            )));
        }
        if !(x.is_finite() && v.is_finite()) {
            return Err(PfError::InvalidArgument(
                "particle position and velocity must be finite".into(),
            ));
        }
        Ok(ParticleState { x, v, mass })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// `v_F = |chi'| |v_P|`.
pub fn field_velocity(state: &ParticleState, profile: &FieldProfile) -> Result<f64> {
    Ok(profile.slope(state.x)?.abs() * state.v.abs())
}

/// `f_F = m v_P^2 d|chi'|/dx + |chi'| f_P`, with the absolute values as
/// written (see [`FieldProfile::abs_slope_derivative`]).
pub fn field_force(state: &ParticleState, f_p: f64, profile: &FieldProfile) -> Result<f64> {
    let slope = profile.slope(state.x)?;
    let d_abs = profile.abs_slope_derivative(state.x)?;
    Ok(state.mass * state.v * state.v * d_abs + slope.abs() * f_p)
}

/// PF position `q(x) = g * integral_{x_ref}^{x} sqrt(1 + chi'^2) dx`, so that
/// `q(x_ref) = 0` and the sign follows `x - x_ref`.
pub fn pf_position(x: f64, profile: &FieldProfile, g: PfCoupling, x_ref: f64) -> Result<f64> {
    let domain = profile.domain();
    domain.check(x)?;
    domain.check(x_ref)?;
    let g = g.get();
    match profile.kind() {
        FieldKind::Zero => Ok(g * (x - x_ref)),
        FieldKind::Linear { slope } => Ok(g * (1.0 + slope * slope).sqrt() * (x - x_ref)),
        _ => {
            let integrand = |s: f64| {
                let d = profile.slope(s.clamp(domain.lo, domain.hi)).unwrap_or(f64::NAN);
                (1.0 + d * d).sqrt()
            };
            let arc = quadrature::integrate(integrand, x_ref, x, PF_POSITION_TOLERANCE / g)?;
            Ok(g * arc)
        }
    }
}

/// `q_dot = g sqrt(v_P^2 + v_F^2)`.
pub fn pf_speed(state: &ParticleState, profile: &FieldProfile, g: PfCoupling) -> Result<f64> {
    let v_f = field_velocity(state, profile)?;
    Ok(g.get() * state.v.hypot(v_f))
}

/// `f_PF = g [ f_P sqrt(1 + chi'^2) + m v_P^2 chi' chi'' / sqrt(1 + chi'^2) ]`.
pub fn pf_force(
    state: &ParticleState,
    f_p: f64,
    profile: &FieldProfile,
    g: PfCoupling,
) -> Result<f64> {
    let slope = profile.slope(state.x)?;
    let curvature = profile.curvature(state.x)?;
    let stretch = (1.0 + slope * slope).sqrt();
    Ok(g.get()
        * (f_p * stretch + state.mass * state.v * state.v * slope * curvature / stretch))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `K_P = m v^2 / 2`
    pub kinetic_particle: f64,
    /// `K_F = K_P chi'^2`
    pub kinetic_field: f64,
    /// `E_P = V_P + K_P`
    pub particle: f64,
    /// `E = V_P + K_P + E_F`
    pub total: f64,
}

/// Energy bookkeeping; the field energy `E_F` is supplied by the caller since
/// no functional form for the field potential energy is available.
pub fn energy_decomposition(
    state: &ParticleState,
    profile: &FieldProfile,
    particle_potential: f64,
    field_energy: f64,
) -> Result<EnergyBreakdown> {
    let slope = profile.slope(state.x)?;
    let k_p = 0.5 * state.mass * state.v * state.v;
    Ok(EnergyBreakdown {
        kinetic_particle: k_p,
        kinetic_field: k_p * slope * slope,
        particle: particle_potential + k_p,
        total: particle_potential + k_p + field_energy,
    })
}
