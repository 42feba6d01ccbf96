//! Shooting back end for the mass-independent form, where `E` enters through
//! `(E - V)^2` and the problem is non-linear in `E`.

use super::{
    count_nodes, normalize_eigenfield, sign_changes, Backend, EquationForm, Level, SolverMeta,
    SpectralProblem, Spectrum, DEFAULT_GRID_SIZE, DEFAULT_SHOOTING_TOLERANCE,
};
use crate::constants::Constants;
use crate::error::{PfError, Result};

const RESCALE_LIMIT: f64 = 1e100;
const MAX_BRACKET_DOUBLINGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// energy window containing levels `1..=n_target`
    pub bracket: (f64, f64),
    pub n_target: usize,
    /// bound on `|chi(x_hi)| / max |chi|`
    pub tol: f64,
    pub grid_size: usize,
    /// bisection plus secant steps allowed per level
    pub max_iterations: usize,
}

impl ShootingOptions {
    pub fn new(bracket: (f64, f64), n_target: usize) -> Self {
        ShootingOptions {
            bracket,
            n_target,
            tol: DEFAULT_SHOOTING_TOLERANCE,
            grid_size: DEFAULT_GRID_SIZE,
            max_iterations: 200,
        }
    }
}

struct Shooter {
    /// `V` on the half-step grid, `2 (N - 1) + 1` samples
    v_half: Vec<f64>,
    h: f64,
    c: f64,
    m0: f64,
    hbar: f64,
    n: usize,
}

impl Shooter {
    fn new(problem: &SpectralProblem, grid: &[f64], constants: &Constants) -> Self {
        let n = grid.len();
        let h = grid[1] - grid[0];
        let lo = problem.domain.lo;
        let v_half = (0..2 * (n - 1) + 1)
            .map(|j| {
                let x = (lo + 0.5 * j as f64 * h).min(problem.domain.hi);
                problem.potential.value(x)
            })
            .collect();
        Shooter {
            v_half,
            h,
            c: constants.c(),
            m0: problem.m0,
            hbar: constants.hbar(),
            n,
        }
    }

    /// RK4 for `chi'' = -[(E - V)^2/c^2 - m0^2 c^2] chi / hbar^2` from
    /// `chi = 0, chi' = 1`, rescaled as needed to stay finite.
    fn shoot(&self, e: f64) -> Vec<f64> {
        let k = |j: usize| {
            (((e - self.v_half[j]) / self.c).powi(2) - (self.m0 * self.c).powi(2))
                / (self.hbar * self.hbar)
        };
        let h = self.h;
        let mut chi = Vec::with_capacity(self.n);
        let (mut y, mut dy) = (0.0f64, 1.0f64);
        chi.push(y);
        for i in 0..self.n - 1 {
            let (k0, k1, k2) = (k(2 * i), k(2 * i + 1), k(2 * i + 2));
            let (a1, b1) = (dy, -k0 * y);
            let (a2, b2) = (dy + 0.5 * h * b1, -k1 * (y + 0.5 * h * a1));
            let (a3, b3) = (dy + 0.5 * h * b2, -k1 * (y + 0.5 * h * a2));
            let (a4, b4) = (dy + h * b3, -k2 * (y + h * a3));
            y += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            dy += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            chi.push(y);
            if y.abs() > RESCALE_LIMIT || dy.abs() > RESCALE_LIMIT {
                let s = 1.0 / RESCALE_LIMIT;
                y *= s;
                dy *= s;
                chi.iter_mut().for_each(|v| *v *= s);
            }
        }
        chi
    }

    fn nodes(&self, e: f64) -> usize {
        sign_changes(&self.shoot(e)[1..])
    }

    fn residual(chi: &[f64]) -> f64 {
        let peak = chi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        chi[chi.len() - 1] / peak
    }
}

fn check_problem(problem: &SpectralProblem) -> Result<()> {
    if problem.form != EquationForm::MassIndependent {
        return Err(PfError::InvalidArgument(
            "the shooting solver handles the mass-independent form; use finite differences for the mass-dependent form".into(),
        ));
    }
    Ok(())
}

/// Energy window holding levels `1..=n_target`: starts at `m0 c^2 + min V`
/// and doubles the width until the trial solution has `n_target` nodes.
pub fn auto_bracket(
    problem: &SpectralProblem,
    n_target: usize,
    grid_size: usize,
    constants: &Constants,
) -> Result<(f64, f64)> {
    check_problem(problem)?;
    if grid_size < 3 || n_target == 0 {
        return Err(PfError::InvalidArgument(
            "bracket search needs a grid of at least 3 points and n_target >= 1".into(),
        ));
    }
    let grid = problem.domain.uniform_grid(grid_size);
    let shooter = Shooter::new(problem, &grid, constants);
    let v_min = shooter.v_half.iter().copied().fold(f64::INFINITY, f64::min);
    let c = constants.c();
    let lo = (problem.m0 * c * c + v_min).max(0.0);
    let mut width = constants.hbar() * c * std::f64::consts::PI / problem.domain.width();
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        if shooter.nodes(lo + width) >= n_target {
            return Ok((lo, lo + width));
        }
        width *= 2.0;
    }
    Err(PfError::LevelNotFound {
        n: n_target,
        lo,
        hi: lo + width,
    })
}

/// Levels `1..=n_target` by node-count bisection followed by Illinois
/// regula falsi on the boundary residual.
pub fn solve_shooting(
    problem: &SpectralProblem,
    options: &ShootingOptions,
    constants: &Constants,
) -> Result<Spectrum> {
    check_problem(problem)?;
    let (lo, hi) = options.bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(PfError::InvalidArgument(format!(
            "energy bracket must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(options.tol > 0.0) || options.n_target == 0 || options.grid_size < 3 {
        return Err(PfError::InvalidArgument(
            "shooting needs tol > 0, n_target >= 1 and a grid of at least 3 points".into(),
        ));
    }
    let grid = problem.domain.uniform_grid(options.grid_size);
    let h = grid[1] - grid[0];
    let shooter = Shooter::new(problem, &grid, constants);
    let rest = problem.m0 * constants.c().powi(2);

    let mut levels = Vec::with_capacity(options.n_target);
    let mut residuals = Vec::with_capacity(options.n_target);
    let mut iterations = Vec::with_capacity(options.n_target);
    for n in 1..=options.n_target {
        let (energy, mut chi, residual, iters) = solve_level(&shooter, n, lo, hi, options)?;
        let last = chi.len() - 1;
        chi[last] = 0.0;
        normalize_eigenfield(&mut chi, h);
        residuals.push(residual);
        iterations.push(iters);
        levels.push(Level {
            n,
            energy,
            excess: energy - rest,
            nodes: count_nodes(&chi),
            chi,
        });
    }
    Ok(Spectrum {
        levels,
        grid,
        meta: SolverMeta {
            backend: Backend::Shooting,
            grid_size: options.grid_size,
            residuals,
            iterations,
            bracket: Some((lo, hi)),
        },
    })
}

/// One trial integration: nodes counted through the far wall, interior
/// nodes alone, and the boundary residual.
struct Trial {
    e: f64,
    chi: Vec<f64>,
    nodes: usize,
    interior: usize,
    residual: f64,
}

impl Trial {
    fn new(shooter: &Shooter, e: f64) -> Self {
        let chi = shooter.shoot(e);
        Trial {
            e,
            nodes: sign_changes(&chi[1..]),
            interior: count_nodes(&chi),
            residual: Shooter::residual(&chi),
            chi,
        }
    }

    /// Converged on an eigenvalue other than level `n`: happens when a window
    /// edge sits on a neighbouring level.
    fn on_neighbour(&self, n: usize, tol: f64) -> bool {
        self.residual.abs() <= tol && self.interior != n - 1
    }
}

fn solve_level(
    shooter: &Shooter,
    n: usize,
    lo: f64,
    hi: f64,
    options: &ShootingOptions,
) -> Result<(f64, Vec<f64>, f64, usize)> {
    let not_found = || PfError::LevelNotFound { n, lo, hi };
    let tol = options.tol;
    let mut a = Trial::new(shooter, lo);
    let mut b = Trial::new(shooter, hi);
    if a.nodes > n - 1 || b.nodes < n {
        return Err(not_found());
    }
    let mut iters = 0;
    let budget = |iters: usize, residual: f64| {
        if iters > options.max_iterations {
            Err(PfError::numerical(
                format!("level {n} not converged in {} iterations", options.max_iterations),
                residual,
            ))
        } else {
            Ok(())
        }
    };

    // isolate the window where the node count steps from n-1 to n
    while a.nodes != n - 1 || b.nodes != n || a.on_neighbour(n, tol) || b.on_neighbour(n, tol) {
        iters += 1;
        budget(iters, f64::NAN)?;
        let mid = 0.5 * (a.e + b.e);
        if mid <= a.e || mid >= b.e {
            return Err(not_found());
        }
        let m = Trial::new(shooter, mid);
        if m.nodes >= n {
            b = m;
        } else {
            a = m;
        }
    }

    for edge in [&a, &b] {
        if edge.residual.abs() <= tol {
            return Ok((edge.e, edge.chi.clone(), edge.residual.abs(), iters));
        }
    }
    let (mut ea, mut fa) = (a.e, a.residual);
    let (mut eb, mut fb) = (b.e, b.residual);
    let mut side = 0i8;
    loop {
        iters += 1;
        budget(iters, fa.abs().min(fb.abs()))?;
        let mut e = (ea * fb - eb * fa) / (fb - fa);
        if !(e > ea && e < eb) {
            e = 0.5 * (ea + eb);
        }
        let t = Trial::new(shooter, e);
        let r = t.residual;
        if r.abs() <= tol && t.interior == n - 1 {
            return Ok((e, t.chi, r.abs(), iters));
        }
        if (eb - ea) <= 4.0 * f64::EPSILON * eb.abs() {
            return Err(PfError::numerical(
                format!("level {n}: bracket collapsed above tolerance"),
                r.abs(),
            ));
        }
        if r.signum() == fb.signum() {
            eb = e;
            fb = r;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            ea = e;
            fa = r;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
}
