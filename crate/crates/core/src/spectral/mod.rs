//! Relativistic stationary-field spectra: the relativistic field force, the
//! oscillator postulate, the two momentum relations and the eigen-solvers for
//! both forms of the relativistic time-independent equation.

mod analytic;
mod fd;
mod shooting;
pub(crate) mod tridiag;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use analytic::{free_photon_energy, nonrel_limit_report, solve_box_analytic, NonrelRow};
pub use fd::solve_fd;
pub use shooting::{auto_bracket, solve_shooting, ShootingOptions};

use crate::constants::Constants;
use crate::error::{PfError, Result};
use crate::field::{CubicSpline, Domain, FieldProfile};
use crate::io::fmt_f64;
use crate::kinematics::ParticleState;
use crate::relativity::gamma;

pub const DEFAULT_GRID_SIZE: usize = 2000;
pub const DEFAULT_SHOOTING_TOLERANCE: f64 = 1e-10;

/// Non-relativistic particle potential `V(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    /// `V = 0` on `[0, a]`; the walls are Dirichlet conditions.
    InfiniteBox { a: f64 },
    SampledGrid(CubicSpline),
}

impl Potential {
    pub fn infinite_box(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(Potential::InfiniteBox { a })
        } else {
            Err(PfError::InvalidArgument(format!("box width must be positive, got {a}")))
        }
    }

    pub fn sampled(xs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        Ok(Potential::SampledGrid(CubicSpline::natural(xs, vs)?))
    }

    /// Read a two-column `x,V` CSV with an optional header.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let (xs, vs) = crate::field::read_two_columns(reader)?;
        Self::sampled(xs, vs)
    }

    /// `V(x)`; callers keep `x` inside the problem domain.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Zero | Potential::InfiniteBox { .. } => 0.0,
            Potential::SampledGrid(s) => s.eval(x, 0),
        }
    }

    /// The constant value when `V` does not vary.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Potential::Zero | Potential::InfiniteBox { .. } => Some(0.0),
            Potential::SampledGrid(s) => {
                let v0 = s.ys()[0];
                s.ys().iter().all(|&v| v == v0).then_some(v0)
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Potential::Zero => "zero",
            Potential::InfiniteBox { .. } => "infinite_box",
            Potential::SampledGrid(_) => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationForm {
    /// potential scales with the relativistic mass: `E^2 (1 + V/m0c^2)^-2`
    MassDependent,
    /// potential independent of mass: `(E - V)^2`
    MassIndependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProblem {
    pub potential: Potential,
    pub m0: f64,
    pub form: EquationForm,
    pub domain: Domain,
}

impl SpectralProblem {
    pub fn new(potential: Potential, m0: f64, form: EquationForm, domain: Domain) -> Result<Self> {
        if !(m0.is_finite() && m0 >= 0.0) {
            return Err(PfError::InvalidArgument(format!(
                "rest mass must be non-negative, got {m0}"
            )));
        }
        if form == EquationForm::MassDependent && m0 == 0.0 {
            return Err(PfError::InvalidArgument(
                "the mass-dependent form needs m0 > 0; use the mass-independent form for photonic systems".into(),
            ));
        }
        match &potential {
            Potential::InfiniteBox { a } if domain.lo != 0.0 || domain.hi != *a => {
                return Err(PfError::InvalidArgument(format!(
                    "an infinite box of width {a} lives on [0, {a}]"
                )))
            }
            Potential::SampledGrid(s) if domain.lo < s.lo() || domain.hi > s.hi() => {
                return Err(PfError::InvalidArgument(
                    "domain extends beyond the sampled potential".into(),
                ))
            }
            _ => {}
        }
        Ok(SpectralProblem {
            potential,
            m0,
            form,
            domain,
        })
    }

    pub fn infinite_box(a: f64, m0: f64, form: EquationForm) -> Result<Self> {
        let potential = Potential::infinite_box(a)?;
        Self::new(potential, m0, form, Domain::new(0.0, a)?)
    }

    pub fn describe(&self, constants: &Constants) -> ProblemDescription {
        ProblemDescription {
            potential: self.potential.name().to_string(),
            box_width: match self.potential {
                Potential::InfiniteBox { a } => Some(a),
                _ => None,
            },
            m0: self.m0,
            form: self.form,
            domain: self.domain,
            c: constants.c(),
            hbar: constants.hbar(),
        }
    }

    /// Check `1 + V/(m0 c^2) > 0` at each point and return the weights
    /// `(1 + V/(m0 c^2))^-2` of the mass-dependent form.
    fn mass_dependent_weights(&self, xs: &[f64], c: f64) -> Result<Vec<f64>> {
        let rest = self.m0 * c * c;
        xs.iter()
            .map(|&x| {
                let f = 1.0 + self.potential.value(x) / rest;
                if f > 0.0 {
                    Ok(1.0 / (f * f))
                } else {
                    Err(PfError::out_of_regime(
                        format!("1 + V/(m0 c^2) not positive at x = {x}"),
                        f,
                    ))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescription {
    pub potential: String,
    pub box_width: Option<f64>,
    pub m0: f64,
    pub form: EquationForm,
    pub domain: Domain,
    pub c: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Analytic,
    FiniteDifference,
    Shooting,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Analytic => "analytic",
            Backend::FiniteDifference => "finite-difference",
            Backend::Shooting => "shooting",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub backend: Backend,
    pub grid_size: usize,
    /// eigen-residual (finite differences) or boundary residual (shooting)
    pub residuals: Vec<f64>,
    /// refinement steps per level (shooting only)
    pub iterations: Vec<usize>,
    pub bracket: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n: usize,
    pub energy: f64,
    /// `E - m0 c^2`, evaluated without cancellation where the solver allows
    pub excess: f64,
    pub nodes: usize,
    /// eigenfield on the spectrum grid, zero at both walls
    pub chi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub grid: Vec<f64>,
    pub meta: SolverMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n: usize,
    pub energy: f64,
    pub nodes: usize,
}

/// Serialized spectrum: `{problem, levels: [{n, energy, nodes}], meta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub problem: ProblemDescription,
    pub levels: Vec<LevelSummary>,
    pub meta: SolverMeta,
    /// relative deviation from the closed-form box levels, when applicable
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_rel_diff: Option<Vec<f64>>,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn level(&self, n: usize) -> Option<&Level> {
        self.levels.iter().find(|l| l.n == n)
    }

    /// Spline profile through the sampled eigenfield of level `n`.
    pub fn eigenfield(&self, n: usize) -> Result<FieldProfile> {
        let level = self
            .level(n)
            .ok_or_else(|| PfError::InvalidArgument(format!("no level {n} in spectrum")))?;
        FieldProfile::sampled(self.grid.clone(), level.chi.clone())
    }

    pub fn report(&self, problem: ProblemDescription) -> SpectrumReport {
        SpectrumReport {
            problem,
            levels: self
                .levels
                .iter()
                .map(|l| LevelSummary {
                    n: l.n,
                    energy: l.energy,
                    nodes: l.nodes,
                })
                .collect(),
            meta: self.meta.clone(),
            analytic_rel_diff: None,
        }
    }

    /// `n,E` table.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,E")?;
        for l in &self.levels {
            writeln!(w, "{},{}", l.n, fmt_f64(l.energy))?;
        }
        Ok(())
    }

    /// `x,chi` table for level `n`.
    pub fn write_eigenfield_csv<W: Write>(&self, n: usize, mut w: W) -> std::io::Result<()> {
        let level = self.level(n).ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::NotFound, format!("no level {n}"))
        })?;
        writeln!(w, "x,chi")?;
        for (x, c) in self.grid.iter().zip(&level.chi) {
            writeln!(w, "{},{}", fmt_f64(*x), fmt_f64(*c))?;
        }
        Ok(())
    }
}

/// Sign changes among the interior samples, ignoring exact zeros.
pub fn count_nodes(chi: &[f64]) -> usize {
    if chi.len() < 3 {
        return 0;
    }
    sign_changes(&chi[1..chi.len() - 1])
}

pub(crate) fn sign_changes(values: &[f64]) -> usize {
    let mut nodes = 0;
    let mut last = 0.0f64;
    for &v in values {
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
    }
    nodes
}

/// Scale to unit grid L2 norm (`sum chi^2 h = 1`) and make the first
/// significant interior value positive.
pub(crate) fn normalize_eigenfield(chi: &mut [f64], h: f64) {
    let norm = (chi.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    if norm == 0.0 {
        return;
    }
    let peak = chi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = chi
        .iter()
        .find(|v| v.abs() > 1e-8 * peak)
        .map_or(1.0, |v| v.signum());
    chi.iter_mut().for_each(|v| *v *= sign / norm);
}

/// `f_rF = f_rP chi' + gamma_P m0 v_P^2 chi''`.
pub fn rel_field_force(state: &ParticleState, f_rp: f64, profile: &FieldProfile, c: f64) -> Result<f64> {
    let g = gamma(state.v, c)?;
    let slope = profile.slope(state.x)?;
    let curvature = profile.curvature(state.x)?;
    Ok(f_rp * slope + g * state.mass() * state.v * state.v * curvature)
}

/// `max |hbar^2 chi'' + p^2 chi| / max |p^2 chi|` over `grid`: how far the
/// profile is from solving `-hbar^2 chi'' = p^2 chi`.
pub fn oscillator_postulate_residual(
    profile: &FieldProfile,
    p: f64,
    hbar: f64,
    grid: &[f64],
) -> Result<f64> {
    let p2 = p * p;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for &x in grid {
        let chi = profile.value(x)?;
        let curv = profile.curvature(x)?;
        num = num.max((hbar * hbar * curv + p2 * chi).abs());
        den = den.max((p2 * chi).abs());
    }
    if den == 0.0 {
        return Err(PfError::UndefinedResidual);
    }
    Ok(num / den)
}

/// Same measure with `chi''` taken from central second differences of samples
/// on a uniform grid; only interior points enter.
pub fn discrete_postulate_residual(grid: &[f64], chi: &[f64], p: f64, hbar: f64) -> Result<f64> {
    if grid.len() != chi.len() || grid.len() < 3 {
        return Err(PfError::InvalidArgument(
            "need matching grid and samples with at least 3 points".into(),
        ));
    }
    let h = grid[1] - grid[0];
    let p2 = p * p;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 1..chi.len() - 1 {
        let curv = (chi[i + 1] - 2.0 * chi[i] + chi[i - 1]) / (h * h);
        num = num.max((hbar * hbar * curv + p2 * chi[i]).abs());
        den = den.max((p2 * chi[i]).abs());
    }
    if den == 0.0 {
        return Err(PfError::UndefinedResidual);
    }
    Ok(num / den)
}

/// Mass-dependent momentum relation
/// `p^2 = (1 + V/m0c^2)^-2 [E^2/c^2 - m0^2 c^2 (1 + V/m0c^2)^2]`.
pub fn momentum_sq_mass_dep(e: f64, v: f64, m0: f64, c: f64) -> Result<f64> {
    if !(m0 > 0.0) {
        return Err(PfError::InvalidArgument(
            "mass-dependent momentum needs m0 > 0".into(),
        ));
    }
    let f = 1.0 + v / (m0 * c * c);
    if !(f > 0.0) {
        return Err(PfError::out_of_regime("1 + V/(m0 c^2) not positive", f));
    }
    Ok((e * e / (c * c) - (m0 * c * f).powi(2)) / (f * f))
}

/// Mass-independent momentum relation `p^2 = (E - V)^2/c^2 - m0^2 c^2`.
pub fn momentum_sq_mass_indep(e: f64, v: f64, m0: f64, c: f64) -> f64 {
    ((e - v) / c).powi(2) - (m0 * c).powi(2)
}
