//! Randomized verification of the interval matching across frames.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    ab_factors, expansion_interval, gamma, gamma_pf_kinematic, gamma_pf_matching,
    interval_primed, interval_unprimed, make_frame_context, matching_residual, speed_from_gamma,
    AbFactors, FrameContext,
};
use crate::error::{PfError, Result};
use crate::io::fmt_f64;

pub const CSV_HEADER: &str = "seed,v_p,v_p_prime,v_pf,chi_slope,gamma_pf_kinematic,gamma_pf_matching,residual_a18,delta_truncated,delta_full";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    /// contexts drawn with `|v_p'|, |v_pf| <= max_speed`
    pub samples: usize,
    /// extra contexts with `gamma_p'` log-uniform in `[gamma_min, gamma_max]`
    pub high_gamma_samples: usize,
    pub seed: u64,
    pub max_speed: f64,
    pub max_slope: f64,
    /// truncated forms are compared only when both particle factors reach this
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub c: f64,
    /// pass threshold for the relative matching residual and truncated gap
    pub tolerance: f64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        InvarianceConfig {
            samples: 10_000,
            high_gamma_samples: 10_000,
            seed: 0,
            max_speed: 0.9,
            max_slope: 0.1,
            gamma_min: 10.0,
            gamma_max: 1e6,
            c: 1.0,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub seed: u64,
    pub v_p: f64,
    pub v_p_prime: f64,
    pub v_pf: f64,
    /// `d chi / dx` in the unprimed frame
    pub chi_slope: f64,
    pub chi_slope_primed: f64,
    pub gamma_p: f64,
    pub gamma_p_prime: f64,
    pub gamma_pf_kinematic: f64,
    pub gamma_pf_matching: f64,
    /// matching residual divided by `gamma_p'^2`
    pub matching_residual: f64,
    /// `|gamma_PF a - gamma_p'| / gamma_p'`
    pub classical_gap: f64,
    /// relative gap of the truncated forms; `None` when out of regime
    pub delta_truncated: Option<f64>,
    /// relative gap of the untruncated forms; `None` when out of regime
    pub delta_full: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceSummary {
    pub rows: usize,
    pub max_matching_residual: f64,
    /// over rows with both particle factors at least `gamma_min`
    pub max_delta_truncated: f64,
    pub truncated_compared: usize,
    pub max_classical_gap: f64,
    pub out_of_regime: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub config: InvarianceConfig,
    pub summary: InvarianceSummary,
    pub rows: Vec<InvarianceRow>,
}

impl InvarianceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), fmt_f64);
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.seed,
                fmt_f64(r.v_p),
                fmt_f64(r.v_p_prime),
                fmt_f64(r.v_pf),
                fmt_f64(r.chi_slope),
                fmt_f64(r.gamma_pf_kinematic),
                fmt_f64(r.gamma_pf_matching),
                fmt_f64(r.matching_residual),
                opt(r.delta_truncated),
                opt(r.delta_full),
            )?;
        }
        Ok(())
    }
}

fn relative_gap(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}

/// Evaluate every diagnostic for one context.
fn evaluate_context(seed: u64, ctx: &FrameContext, c: f64) -> Result<InvarianceRow> {
    let gamma_p = gamma(ctx.v_p, c)?;
    let gamma_p_prime = gamma(ctx.v_p_prime, c)?;
    let gpf = gamma_pf_matching(ctx, c)?;
    let AbFactors { a, b } = ab_factors(ctx, c)?;
    let residual = matching_residual(ctx, gpf, c)? / (gamma_p_prime * gamma_p_prime);

    let truncated = expansion_interval(1.0, gamma_p_prime, ctx.chi_slope_primed, c)
        .and_then(|t1| Ok((t1, expansion_interval(1.0, a * gpf, b * gpf, c)?)))
        .ok()
        .map(|(t1, t2)| relative_gap(t2, t1));
    let full = interval_primed(1.0, ctx, gpf, c)
        .ok()
        .map(|f2| relative_gap(f2, interval_unprimed(1.0, gamma_p_prime, ctx.chi_slope_primed, c).unwrap_or(f64::NAN)));

    Ok(InvarianceRow {
        seed,
        v_p: ctx.v_p,
        v_p_prime: ctx.v_p_prime,
        v_pf: ctx.v_pf,
        chi_slope: ctx.chi_slope,
        chi_slope_primed: ctx.chi_slope_primed,
        gamma_p,
        gamma_p_prime,
        gamma_pf_kinematic: gamma_pf_kinematic(gamma_p, ctx.chi_slope)?,
        gamma_pf_matching: gpf,
        matching_residual: residual,
        classical_gap: relative_gap(gpf * a, gamma_p_prime),
        delta_truncated: truncated,
        delta_full: full,
    })
}

fn symmetric(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    if bound > 0.0 {
        rng.random_range(-bound..=bound)
    } else {
        0.0
    }
}

/// Draw seeded random frame contexts and check the matching identity and the
/// agreement of the truncated interval forms. Each row uses its own RNG stream
/// seeded by `seed + index`, so results do not depend on evaluation order.
pub fn verify_invariance(config: &InvarianceConfig) -> Result<InvarianceReport> {
    let c = config.c;
    if !(config.max_speed >= 0.0 && config.max_speed < 1.0) {
        return Err(PfError::InvalidConfiguration(format!(
            "max speed must lie in [0, 1) of c, got {}",
            config.max_speed
        )));
    }
    if !(config.max_slope >= 0.0 && config.max_slope < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(PfError::InvalidConfiguration(format!(
            "max slope must lie in [0, 1/sqrt(2)), got {}",
            config.max_slope
        )));
    }
    if !(config.gamma_min >= 1.0 && config.gamma_max >= config.gamma_min) {
        return Err(PfError::InvalidConfiguration(
            "gamma range must satisfy 1 <= gamma_min <= gamma_max".into(),
        ));
    }

    let total = config.samples + config.high_gamma_samples;
    let mut rows = Vec::with_capacity(total);
    let mut out_of_regime = 0;
    for i in 0..total {
        let seed = config.seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v_pf = symmetric(&mut rng, config.max_speed) * c;
        let v_p_prime = if i < config.samples {
            symmetric(&mut rng, config.max_speed) * c
        } else {
            let (lo, hi) = (config.gamma_min.ln(), config.gamma_max.ln());
            let g = if hi > lo { rng.random_range(lo..hi).exp() } else { config.gamma_min };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            sign * speed_from_gamma(g, c)?
        };
        let slope = symmetric(&mut rng, config.max_slope);
        let ctx = make_frame_context(v_p_prime, v_pf, slope, c)?;
        match evaluate_context(seed, &ctx, c) {
            Ok(row) => {
                if row.delta_truncated.is_none() || row.delta_full.is_none() {
                    out_of_regime += 1;
                }
                rows.push(row);
            }
            Err(PfError::OutOfRegime { .. }) => out_of_regime += 1,
            Err(e) => return Err(e),
        }
    }

    let max_matching_residual = rows
        .iter()
        .map(|r| r.matching_residual.abs())
        .fold(0.0, f64::max);
    let compared: Vec<f64> = rows
        .iter()
        .filter(|r| r.gamma_p.min(r.gamma_p_prime) >= config.gamma_min)
        .filter_map(|r| r.delta_truncated)
        .collect();
    let max_delta_truncated = compared.iter().cloned().fold(0.0, f64::max);
    let max_classical_gap = rows.iter().map(|r| r.classical_gap).fold(0.0, f64::max);
    let passed = max_matching_residual <= config.tolerance
        && max_delta_truncated <= config.tolerance;

    Ok(InvarianceReport {
        config: config.clone(),
        summary: InvarianceSummary {
            rows: rows.len(),
            max_matching_residual,
            max_delta_truncated,
            truncated_compared: compared.len(),
            max_classical_gap,
            out_of_regime,
            passed,
        },
        rows,
    })
}

/// Power-law fit `delta_full ~ C s^p` over a set of primed slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slopes: Vec<f64>,
    pub deltas: Vec<f64>,
    /// least-squares exponent `p`
    pub exponent: f64,
    /// least-squares prefactor `C`
    pub constant: f64,
    /// `max delta / s^4`
    pub quartic_constant: f64,
}

/// Relative gap between the untruncated interval forms in the two frames
/// as the primed slope shrinks, with `gamma_PF` from the matching condition.
pub fn full_form_scaling(v_p_prime: f64, v_pf: f64, slopes: &[f64], c: f64) -> Result<ScalingFit> {
    if slopes.len() < 2 {
        return Err(PfError::InvalidArgument("need at least two slopes to fit".into()));
    }
    let mut deltas = Vec::with_capacity(slopes.len());
    for &s in slopes {
        if !(s > 0.0) {
            return Err(PfError::InvalidArgument("slopes must be positive".into()));
        }
        let ctx = make_frame_context(v_p_prime, v_pf, s, c)?;
        let gpf = gamma_pf_matching(&ctx, c)?;
        let f1 = interval_unprimed(1.0, gamma(v_p_prime, c)?, s, c)?;
        let f2 = interval_primed(1.0, &ctx, gpf, c)?;
        deltas.push(relative_gap(f2, f1));
    }
    let n = slopes.len() as f64;
    let lx: Vec<f64> = slopes.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let constant = (my - exponent * mx).exp();
    let quartic_constant = slopes
        .iter()
        .zip(&deltas)
        .map(|(s, d)| d / s.powi(4))
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        slopes: slopes.to_vec(),
        deltas,
        exponent,
        constant,
        quartic_constant,
    })
}
