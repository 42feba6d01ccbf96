//! Closed-form box spectrum, free photons and the non-relativistic limit.

use serde::{Deserialize, Serialize};

use super::{count_nodes, Backend, Level, SolverMeta, Spectrum, DEFAULT_GRID_SIZE};
use crate::constants::Constants;
use crate::error::{PfError, Result};
use crate::field::Domain;

/// `E_n = c sqrt(n^2 h^2 / 4a^2 + m0^2 c^2)` with eigenfields `sin(n pi x / a)`
/// of unit amplitude sampled on the default grid.
pub fn solve_box_analytic(m0: f64, a: f64, n_max: usize, constants: &Constants) -> Result<Spectrum> {
    if !(m0.is_finite() && m0 >= 0.0) {
        return Err(PfError::InvalidArgument(format!("rest mass must be non-negative, got {m0}")));
    }
    if n_max == 0 {
        return Err(PfError::InvalidArgument("levels start at n = 1".into()));
    }
    let domain = Domain::new(0.0, a)?;
    let c = constants.c();
    let grid = domain.uniform_grid(DEFAULT_GRID_SIZE);
    let mc = m0 * c;
    let levels = (1..=n_max)
        .map(|n| {
            let p = n as f64 * constants.h() / (2.0 * a);
            let root = p.hypot(mc);
            let k = n as f64 * std::f64::consts::PI / a;
            let mut chi: Vec<f64> = grid.iter().map(|x| (k * x).sin()).collect();
            chi[0] = 0.0;
            chi[DEFAULT_GRID_SIZE - 1] = 0.0;
            Level {
                n,
                energy: c * root,
                excess: c * p * p / (root + mc),
                nodes: count_nodes(&chi),
                chi,
            }
        })
        .collect();
    Ok(Spectrum {
        levels,
        grid,
        meta: SolverMeta {
            backend: Backend::Analytic,
            grid_size: DEFAULT_GRID_SIZE,
            residuals: vec![0.0; n_max],
            iterations: Vec::new(),
            bracket: None,
        },
    })
}

/// `E = h c / lambda`.
pub fn free_photon_energy(wavelength: f64, constants: &Constants) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(constants.h() * constants.c() / wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonrelRow {
    pub m0: f64,
    pub n: usize,
    /// `E_n - m0 c^2`
    pub excess: f64,
    /// `n^2 h^2 / (8 m0 a^2)`
    pub nonrel: f64,
    pub relative_deviation: f64,
    /// leading correction `excess / (2 m0 c^2)`
    pub bound: f64,
}

/// Compare each box level with its non-relativistic counterpart.
pub fn nonrel_limit_report(
    spectrum: &Spectrum,
    m0: f64,
    a: f64,
    constants: &Constants,
) -> Result<Vec<NonrelRow>> {
    if m0 == 0.0 {
        return Err(PfError::PhotonicNotApplicable);
    }
    if !(m0 > 0.0 && m0.is_finite()) {
        return Err(PfError::InvalidArgument(format!("rest mass must be positive, got {m0}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(PfError::InvalidArgument(format!("box width must be positive, got {a}")));
    }
    let rest = m0 * constants.c().powi(2);
    let h = constants.h();
    Ok(spectrum
        .levels
        .iter()
        .map(|l| {
            let n = l.n as f64;
            let nonrel = n * n * h * h / (8.0 * m0 * a * a);
            NonrelRow {
                m0,
                n: l.n,
                excess: l.excess,
                nonrel,
                relative_deviation: (l.excess - nonrel).abs() / nonrel,
                bound: l.excess / (2.0 * rest),
            }
        })
        .collect())
}
