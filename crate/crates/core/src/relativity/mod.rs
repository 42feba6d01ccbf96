//! Relativistic PF kinematics and the frame-matching of the PF interval.
//!
//! All speeds are signed velocities along the boost axis; `c` is passed
//! explicitly so the same code serves natural and SI inputs.

mod invariance;

use serde::{Deserialize, Serialize};

pub use invariance::{
    full_form_scaling, verify_invariance, InvarianceConfig, InvarianceReport, InvarianceRow,
    InvarianceSummary, ScalingFit,
};

use crate::error::{PfError, Result};

/// Truncated expansions are refused beyond this slope.
pub const EXPANSION_SLOPE_LIMIT: f64 = 0.1;
/// A warning is logged for truncated expansions beyond this slope.
pub const EXPANSION_SLOPE_WARN: f64 = 0.05;

fn check_speed(v: f64, c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "speed of light must be positive, got {c}"
        )));
    }
    if v.is_finite() && v.abs() < c {
        Ok(())
    } else {
        Err(PfError::Superluminal { v, c })
    }
}

fn check_gamma(gamma_p: f64) -> Result<()> {
    if gamma_p.is_finite() && gamma_p >= 1.0 {
        Ok(())
    } else {
        Err(PfError::InvalidArgument(format!(
            "Lorentz factor must be at least 1, got {gamma_p}"
        )))
    }
}

/// `(1 - v^2/c^2)^(-1/2)`, factored for accuracy near `|v| = c`.
pub fn gamma(v: f64, c: f64) -> Result<f64> {
    check_speed(v, c)?;
    let beta = v / c;
    Ok(1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt())
}

/// Speed with Lorentz factor `gamma`, as a fraction-of-`c` times `c`.
pub fn speed_from_gamma(gamma: f64, c: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let inv2 = 1.0 / (gamma * gamma);
    Ok(c * (1.0 - inv2).sqrt())
}

/// `K_rP = m0 c^2 (gamma_p - 1)`.
pub fn rel_kinetic_particle(v_p: f64, m0: f64, c: f64) -> Result<f64> {
    if !(m0.is_finite() && m0 >= 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "rest mass must be non-negative, got {m0}"
        )));
    }
    check_speed(v_p, c)?;
    // gamma - 1 = beta^2 gamma^2 / (gamma + 1) keeps small speeds exact
    let beta = v_p / c;
    let g = gamma(v_p, c)?;
    Ok(m0 * c * c * beta * beta * g * g / (g + 1.0))
}

/// `K_rF = K_rP chi'^2`.
pub fn rel_kinetic_field(v_p: f64, m0: f64, chi_slope: f64, c: f64) -> Result<f64> {
    Ok(rel_kinetic_particle(v_p, m0, c)? * chi_slope * chi_slope)
}

/// Kinematic PF Lorentz factor `(gamma_p - 1)(1 + chi'^2) + 1`.
pub fn gamma_pf_kinematic(gamma_p: f64, chi_slope: f64) -> Result<f64> {
    check_gamma(gamma_p)?;
    Ok((gamma_p - 1.0) * (1.0 + chi_slope * chi_slope) + 1.0)
}

/// PF speed `q_dot = c sqrt(1 - gamma_PF^-2)`; strictly below `c` for finite
/// `gamma_p`.
pub fn pf_speed_relativistic(gamma_p: f64, chi_slope: f64, c: f64) -> Result<f64> {
    let g = gamma_pf_kinematic(gamma_p, chi_slope)?;
    Ok(c * (1.0 - 1.0 / (g * g)).sqrt())
}

/// `1 - q_dot / c`, evaluated without cancellation as
/// `x / (1 + sqrt(1 - x))` with `x = gamma_PF^-2`.
pub fn pf_speed_deficit(gamma_p: f64, chi_slope: f64) -> Result<f64> {
    let g = gamma_pf_kinematic(gamma_p, chi_slope)?;
    let x = 1.0 / (g * g);
    Ok(x / (1.0 + (1.0 - x).sqrt()))
}

/// One row of the photon-limit sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonLimitRow {
    pub gamma_p: f64,
    pub chi_slope: f64,
    pub gamma_pf: f64,
    /// `1 - q_dot / c`
    pub deficit: f64,
    /// `1 / (2 gamma_PF^2)`
    pub bound: f64,
    pub ratio: f64,
    pub within_bound: bool,
}

/// `1 - q_dot / c` against `1 / (2 gamma_PF^2)` over every pair of inputs.
pub fn photon_limit_report(gammas: &[f64], slopes: &[f64]) -> Result<Vec<PhotonLimitRow>> {
    let mut rows = Vec::with_capacity(gammas.len() * slopes.len());
    for &gamma_p in gammas {
        for &chi_slope in slopes {
            let gamma_pf = gamma_pf_kinematic(gamma_p, chi_slope)?;
            let deficit = pf_speed_deficit(gamma_p, chi_slope)?;
            let bound = 0.5 / (gamma_pf * gamma_pf);
            rows.push(PhotonLimitRow {
                gamma_p,
                chi_slope,
                gamma_pf,
                deficit,
                bound,
                ratio: deficit / bound,
                within_bound: deficit <= bound,
            });
        }
    }
    Ok(rows)
}

/// Unprimed-frame PF interval `c^2 dt^2 / [(gamma_p - 1)(1 + chi'^2) + 1]^2`.
pub fn interval_unprimed(dt: f64, gamma_p: f64, chi_slope: f64, c: f64) -> Result<f64> {
    let g = gamma_pf_kinematic(gamma_p, chi_slope)?;
    let ds2 = (c * dt / g).powi(2);
    debug_assert!({
        let q_dot = pf_speed_relativistic(gamma_p, chi_slope, c)?;
        let alt = c * c * dt * dt * (1.0 - (q_dot / c).powi(2));
        (alt - ds2).abs() <= 1e-12 * (c * dt).powi(2)
    });
    Ok(ds2)
}

/// Event in the PF coordinate plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub q: f64,
}

impl Event {
    /// `c^2 t^2 - q^2` relative to the origin.
    pub fn interval_from_origin(&self, c: f64) -> f64 {
        (c * self.t).powi(2) - self.q * self.q
    }
}

/// Standard-configuration boost into the frame moving at `v_pf`.
pub fn lorentz_boost(event: Event, v_pf: f64, c: f64) -> Result<Event> {
    let g = gamma(v_pf, c)?;
    Ok(Event {
        t: g * (event.t - v_pf * event.q / (c * c)),
        q: g * (event.q - v_pf * event.t),
    })
}

/// Relativistic composition `(u' + v) / (1 + u' v / c^2)`.
pub fn velocity_addition(u_prime: f64, v: f64, c: f64) -> Result<f64> {
    check_speed(u_prime, c)?;
    check_speed(v, c)?;
    let w = (u_prime + v) / (1.0 + u_prime * v / (c * c));
    // rounding can land exactly on c for extreme inputs
    Ok(w.clamp(-c * (1.0 - f64::EPSILON), c * (1.0 - f64::EPSILON)))
}

/// Kinematic data of one particle seen from the frames `Q` and `Q'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameContext {
    /// particle velocity in `Q`
    pub v_p: f64,
    /// particle velocity in `Q'`
    pub v_p_prime: f64,
    /// velocity of `Q'` relative to `Q`
    pub v_pf: f64,
    /// `d chi / dx'`
    pub chi_slope_primed: f64,
    /// `d chi / dx`
    pub chi_slope: f64,
}

/// Build a consistent [`FrameContext`]: `v_p` by velocity composition and
/// `d chi/dx = gamma(v_pf) (d chi/dx') (1 - v_pf v_p'/c^2)` by the chain rule.
pub fn make_frame_context(
    v_p_prime: f64,
    v_pf: f64,
    chi_slope_primed: f64,
    c: f64,
) -> Result<FrameContext> {
    if !chi_slope_primed.is_finite() {
        return Err(PfError::InvalidArgument("field slope must be finite".into()));
    }
    let v_p = velocity_addition(v_p_prime, v_pf, c)?;
    let chi_slope = gamma(v_pf, c)? * chi_slope_primed * (1.0 - v_pf * v_p_prime / (c * c));
    Ok(FrameContext {
        v_p,
        v_p_prime,
        v_pf,
        chi_slope_primed,
        chi_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbFactors {
    pub a: f64,
    pub b: f64,
}

/// `a = gamma_p (1 - v_p v_pf / c^2)`, `b = (d chi/dx') (1 - v_pf v_p' / c^2)`.
pub fn ab_factors(ctx: &FrameContext, c: f64) -> Result<AbFactors> {
    let c2 = c * c;
    Ok(AbFactors {
        a: gamma(ctx.v_p, c)? * (1.0 - ctx.v_p * ctx.v_pf / c2),
        b: ctx.chi_slope_primed * (1.0 - ctx.v_pf * ctx.v_p_prime / c2),
    })
}

/// Primed-frame PF interval
/// `c^2 dt'^2 / [(gamma_PF a - 1)(1 + gamma_PF^2 b^2) + 1]^2`.
///
/// Requires `gamma_PF a >= 1`; below that the bracket can vanish.
pub fn interval_primed(dt_prime: f64, ctx: &FrameContext, gamma_pf: f64, c: f64) -> Result<f64> {
    let AbFactors { a, b } = ab_factors(ctx, c)?;
    let ga = gamma_pf * a;
    if !(ga >= 1.0 - 1e-12) {
        return Err(PfError::out_of_regime(
            "gamma_PF * a below 1 in the primed interval",
            ga,
        ));
    }
    let bracket = (ga - 1.0) * (1.0 + gamma_pf * gamma_pf * b * b) + 1.0;
    Ok((c * dt_prime / bracket).powi(2))
}

/// Bracket `D` of the matching condition `gamma_PF^2 D = gamma_p'^2`:
/// `D = (1 - 2 s'^2) a^2 + 2 gamma_p'^2 b^2` with `s' = d chi/dx'`.
fn matching_bracket(ctx: &FrameContext, c: f64) -> Result<(f64, f64)> {
    let AbFactors { a, b } = ab_factors(ctx, c)?;
    let gp_prime = gamma(ctx.v_p_prime, c)?;
    let s2 = ctx.chi_slope_primed * ctx.chi_slope_primed;
    let d = (1.0 - 2.0 * s2) * a * a + 2.0 * gp_prime * gp_prime * b * b;
    Ok((d, gp_prime))
}

/// Frame-matching PF Lorentz factor: the value making the second-order
/// expansions of the interval take the same form in `Q` and `Q'`,
/// `gamma_p'^-2 [1 - 2 s'^2] = (gamma_PF a)^-2 [1 - 2 b^2 gamma_PF^2]`.
pub fn gamma_pf_matching(ctx: &FrameContext, c: f64) -> Result<f64> {
    let (d, gp_prime) = matching_bracket(ctx, c)?;
    if !(d > 0.0) {
        return Err(PfError::out_of_regime(
            "non-positive bracket in the matching factor",
            d,
        ));
    }
    Ok(gp_prime / d.sqrt())
}

/// Signed residual `gamma_PF^2 D - gamma_p'^2` of the matching condition.
pub fn matching_residual(ctx: &FrameContext, gamma_pf: f64, c: f64) -> Result<f64> {
    let (d, gp_prime) = matching_bracket(ctx, c)?;
    Ok(gamma_pf * gamma_pf * d - gp_prime * gp_prime)
}

/// Second-order truncation `c^2 dt^2 gamma^-2 [1 - 2 slope^2]` of the PF
/// interval, valid for small slopes only.
pub fn expansion_interval(dt: f64, gamma_like: f64, slope_like: f64, c: f64) -> Result<f64> {
    let s = slope_like.abs();
    if !(s <= EXPANSION_SLOPE_LIMIT) {
        return Err(PfError::out_of_regime(
            "slope too large for the truncated interval",
            slope_like,
        ));
    }
    if s > EXPANSION_SLOPE_WARN {
        log::warn!("truncated interval evaluated at slope {slope_like}; accuracy degrades");
    }
    if !(gamma_like.is_finite() && gamma_like > 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "gamma-like factor must be positive, got {gamma_like}"
        )));
    }
    Ok((c * dt / gamma_like).powi(2) * (1.0 - 2.0 * slope_like * slope_like))
}
