//! Finite-difference back end: a linear symmetric eigenproblem in `E^2`
//! (mass-dependent form) or `(E - V0)^2` (mass-independent, constant `V0`).

use super::tridiag::SymTridiagonal;
use super::{count_nodes, normalize_eigenfield, Backend, EquationForm, Level, SolverMeta, SpectralProblem, Spectrum};
use crate::constants::Constants;
use crate::error::{PfError, Result};

pub const MIN_FD_GRID: usize = 64;

/// Lowest `n_levels` levels on a uniform grid of `grid_size` points, walls
/// included. The operator is `-hbar^2 D2 + m0^2 c^2` against the weight
/// `(1 + V/m0c^2)^-2` (mass-dependent) or unity (mass-independent).
pub fn solve_fd(
    problem: &SpectralProblem,
    grid_size: usize,
    n_levels: usize,
    constants: &Constants,
) -> Result<Spectrum> {
    if grid_size < MIN_FD_GRID {
        return Err(PfError::InvalidArgument(format!(
            "finite-difference grid needs at least {MIN_FD_GRID} points, got {grid_size}"
        )));
    }
    let interior = grid_size - 2;
    if n_levels == 0 || n_levels > interior {
        return Err(PfError::InvalidArgument(format!(
            "cannot resolve {n_levels} levels on {interior} interior points"
        )));
    }
    let c = constants.c();
    let hbar = constants.hbar();
    let m0 = problem.m0;
    let grid = problem.domain.uniform_grid(grid_size);
    let h = grid[1] - grid[0];
    let xs = &grid[1..grid_size - 1];

    let (weights, shift) = match problem.form {
        EquationForm::MassDependent => (problem.mass_dependent_weights(xs, c)?, 0.0),
        EquationForm::MassIndependent => {
            let v0 = problem.potential.constant_value().ok_or_else(|| {
                PfError::InvalidArgument(
                    "mass-independent form with a varying potential needs the shooting solver".into(),
                )
            })?;
            (vec![1.0; interior], v0)
        }
    };
    let unweighted = weights.iter().all(|&w| w == 1.0);

    let d0 = 2.0 * hbar * hbar / (h * h);
    let o0 = -hbar * hbar / (h * h);
    let rest_sq = (m0 * c).powi(2);
    // With unit weights the kinetic part alone gives p^2 and E follows without
    // cancellation; otherwise transform B^-1/2 A B^-1/2 and solve for E^2/c^2.
    let matrix = if unweighted {
        SymTridiagonal::new(vec![d0; interior], vec![o0; interior - 1])
    } else {
        let diag = weights.iter().map(|w| (d0 + rest_sq) / w).collect();
        let off = weights
            .windows(2)
            .map(|p| o0 / (p[0] * p[1]).sqrt())
            .collect();
        SymTridiagonal::new(diag, off)
    };
    let pairs = matrix.lowest(n_levels)?;

    let mut levels = Vec::with_capacity(n_levels);
    let mut residuals = Vec::with_capacity(n_levels);
    for (k, pair) in pairs.into_iter().enumerate() {
        let (energy, excess) = if unweighted {
            let p2 = pair.value;
            let root = (p2 + rest_sq).sqrt();
            (shift + c * root, shift + c * p2 / (root + m0 * c))
        } else {
            let e = c * pair.value.sqrt();
            (e, e - m0 * c * c)
        };
        if !(energy >= 0.0) {
            return Err(PfError::numerical(
                format!("level {} has negative energy", k + 1),
                energy,
            ));
        }
        let mut chi = Vec::with_capacity(grid_size);
        chi.push(0.0);
        chi.extend(pair.vector.iter().zip(&weights).map(|(y, w)| y / w.sqrt()));
        chi.push(0.0);
        normalize_eigenfield(&mut chi, h);
        residuals.push(pair.residual);
        levels.push(Level {
            n: k + 1,
            energy,
            excess,
            nodes: count_nodes(&chi),
            chi,
        });
    }
    Ok(Spectrum {
        levels,
        grid,
        meta: SolverMeta {
            backend: Backend::FiniteDifference,
            grid_size,
            residuals,
            iterations: Vec::new(),
            bracket: None,
        },
    })
}
