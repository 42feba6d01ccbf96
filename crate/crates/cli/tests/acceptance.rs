//! Acceptance criteria. Each test prints one PASS/FAIL line straight to the
//! process stdout so the verdicts show up even when output is captured.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use pf_core::constants::{Constants, PfCoupling};
use pf_core::field::{box_eigenfield, Domain, FieldProfile};
use pf_core::kinematics::{
    integrate_particle, pf_force_residuals, pf_position, Free, Harmonic, ParticleState,
};
use pf_core::relativity::{
    full_form_scaling, gamma_pf_kinematic, pf_speed_deficit, pf_speed_relativistic,
    speed_from_gamma, verify_invariance, InvarianceConfig,
};
use pf_core::spectral::{
    count_nodes, nonrel_limit_report, solve_box_analytic, solve_fd, solve_shooting, EquationForm,
    ShootingOptions, SpectralProblem, Spectrum,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, title: &str, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|(_, pass)| *pass);
    let detail: Vec<String> = checks
        .iter()
        .map(|(what, pass)| format!("{}{what}", if *pass { "" } else { "!! " }))
        .collect();
    let line = format!(
        "acceptance {id:>2} {} {title}: {}\n",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{}", line.trim_end());
}

fn natural() -> Constants {
    Constants::natural()
}

fn box_problem(m0: f64, form: EquationForm) -> SpectralProblem {
    SpectralProblem::infinite_box(PI, m0, form).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

#[test]
fn c01_box_spectrum() {
    let start = Instant::now();
    let k = natural();
    let exact: Vec<f64> = (1..=5).map(|n| f64::from(n * n + 1).sqrt()).collect();
    let analytic = solve_box_analytic(1.0, PI, 5, &k).unwrap().energies();
    let fd = solve_fd(&box_problem(1.0, EquationForm::MassDependent), 2000, 5, &k)
        .unwrap()
        .energies();
    let shooting = solve_shooting(
        &box_problem(1.0, EquationForm::MassIndependent),
        &ShootingOptions::new((1.0, 6.0), 5),
        &k,
    )
    .unwrap()
    .energies();
    let elapsed = start.elapsed().as_secs_f64();

    let d_an = max_of(analytic.iter().zip(&exact).map(|(a, e)| rel(*a, *e)));
    let d_fd = max_of(fd.iter().zip(&exact).map(|(a, e)| rel(*a, *e)));
    let d_sh = max_of(shooting.iter().zip(&exact).map(|(a, e)| rel(*a, *e)));
    verdict(
        1,
        "box spectrum",
        &[
            (format!("analytic max rel {d_an:.2e} <= 1e-14"), d_an <= 1e-14),
            (format!("fd max rel {d_fd:.2e} <= 1e-5"), d_fd <= 1e-5),
            (format!("shooting max rel {d_sh:.2e} <= 1e-8"), d_sh <= 1e-8),
            (format!("runtime {elapsed:.2}s < 5s"), elapsed < 5.0),
        ],
    );
}

#[test]
fn c02_photonic_box() {
    let k = natural();
    let shooting = solve_shooting(
        &box_problem(0.0, EquationForm::MassIndependent),
        &ShootingOptions::new((0.0, 5.5), 5),
        &k,
    )
    .unwrap();
    let analytic = solve_box_analytic(0.0, PI, 5, &k).unwrap();
    let d_sh = max_of(shooting.levels.iter().map(|l| (l.energy - l.n as f64).abs()));
    let exact = analytic.levels.iter().all(|l| l.energy == l.n as f64);
    verdict(
        2,
        "photonic box",
        &[
            (format!("shooting max |E_n - n| {d_sh:.2e} <= 1e-8"), d_sh <= 1e-8),
            (format!("analytic exact: {exact}"), exact),
        ],
    );
}

#[test]
fn c03_form_equivalence() {
    let k = natural();
    let dep = solve_fd(&box_problem(1.0, EquationForm::MassDependent), 2000, 5, &k).unwrap();
    let ind = solve_fd(&box_problem(1.0, EquationForm::MassIndependent), 2000, 5, &k).unwrap();
    let d = max_of(dep.levels.iter().zip(&ind.levels).map(|(a, b)| rel(a.energy, b.energy)));
    verdict(
        3,
        "form equivalence at V=0",
        &[(format!("max rel {d:.2e} <= 1e-10"), d <= 1e-10)],
    );
}

#[test]
fn c04_nonrelativistic_limit() {
    let k = natural();
    let mut checks = Vec::new();
    let mut last = f64::INFINITY;
    let mut monotone = true;
    for m0 in [1e2, 1e3, 1e4] {
        let spectrum = solve_box_analytic(m0, PI, 1, &k).unwrap();
        let row = nonrel_limit_report(&spectrum, m0, PI, &k).unwrap()[0];
        // independent oracle from the closed form with h = 2 pi, c = 1
        let nonrel = TAU * TAU / (8.0 * m0 * PI * PI);
        let dev = ((row.excess - nonrel) / nonrel).abs();
        let bound = 1.0 / (m0 * m0);
        checks.push((format!("m0={m0:e} dev {dev:.2e} <= {bound:.0e}"), dev <= bound));
        monotone &= dev < last;
        last = dev;
    }
    checks.push((format!("decreasing in m0: {monotone}"), monotone));
    verdict(4, "non-relativistic limit", &checks);
}

#[test]
fn c05_photon_speed_limit() {
    let mut checks = Vec::new();
    for gp in [1e3, 1e6, 1e9] {
        for s in [0.0, 0.5, 2.0] {
            let g = gamma_pf_kinematic(gp, s).unwrap();
            let deficit = pf_speed_deficit(gp, s).unwrap();
            let bound = 0.5 / (g * g);
            checks.push((
                format!("gp={gp:e} s={s}: 1-q/c {deficit:.6e} <= {bound:.6e}"),
                deficit <= bound,
            ));
        }
    }
    // q < c on random inputs: the stably computed gap c - q must stay
    // positive everywhere, and q itself below c while it is representable
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gap_positive = true;
    let mut speed_below = true;
    for _ in 0..10_000 {
        let gp = rng.random_range(0.0..9.0f64 * std::f64::consts::LN_10).exp();
        let s = rng.random_range(-2.0..2.0);
        gap_positive &= pf_speed_deficit(gp, s).unwrap() > 0.0;
        if gamma_pf_kinematic(gp, s).unwrap() < 1e7 {
            speed_below &= pf_speed_relativistic(gp, s, 1.0).unwrap() < 1.0;
        }
    }
    checks.push((format!("c - q > 0 on 1e4 random inputs: {gap_positive}"), gap_positive));
    checks.push((format!("q < c (f64) on 1e4 random inputs: {speed_below}"), speed_below));
    verdict(5, "photon speed limit", &checks);
}

#[test]
fn c06_lorentz_matching() {
    let start = Instant::now();
    let config = InvarianceConfig {
        samples: 10_000,
        high_gamma_samples: 0,
        seed: 6,
        ..InvarianceConfig::default()
    };
    let report = verify_invariance(&config).unwrap();
    let classical = verify_invariance(&InvarianceConfig {
        max_slope: 0.0,
        ..config.clone()
    })
    .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let r = report.summary.max_matching_residual;
    let g = classical.summary.max_classical_gap;
    verdict(
        6,
        "Lorentz matching",
        &[
            (format!("rows {}", report.summary.rows), report.summary.rows == 10_000),
            (format!("max matching residual {r:.2e} <= 1e-10"), r <= 1e-10),
            (format!("zero-slope composition gap {g:.2e} <= 1e-12"), g <= 1e-12),
            (format!("runtime {elapsed:.2}s < 10s"), elapsed < 10.0),
        ],
    );
}

#[test]
fn c07_truncated_interval_invariance() {
    let config = InvarianceConfig {
        samples: 0,
        high_gamma_samples: 10_000,
        seed: 7,
        ..InvarianceConfig::default()
    };
    let report = verify_invariance(&config).unwrap();
    let d = report.summary.max_delta_truncated;
    let n = report.summary.truncated_compared;
    let fit = full_form_scaling(
        speed_from_gamma(1e6, 1.0).unwrap(),
        -0.5,
        &[0.1, 0.05, 0.025, 0.0125],
        1.0,
    )
    .unwrap();
    verdict(
        7,
        "truncated-interval invariance",
        &[
            (format!("{n} rows with gamma >= 10 compared"), n >= 1000),
            (format!("max truncated gap {d:.2e} <= 1e-10"), d <= 1e-10),
            (
                format!("full-form exponent {:.3} in [3.5, 4.5], C = {:.3e}", fit.exponent, fit.constant),
                (3.5..=4.5).contains(&fit.exponent),
            ),
        ],
    );
}

#[test]
fn c08_kinematics_oracles() {
    // arc length of sin over one period against a 1e7-point midpoint sum
    let domain = Domain::new(-1.0, 7.0).unwrap();
    let sine = FieldProfile::sine(1.0, 1.0, domain).unwrap();
    let q = pf_position(TAU, &sine, PfCoupling::default(), 0.0).unwrap();
    let n = 10_000_000;
    let h = TAU / n as f64;
    let riemann: f64 = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            (1.0 + x.cos().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h;
    let d_q = rel(q, riemann);

    // harmonic oscillator over 1000 periods
    let free_field = FieldProfile::zero(Domain::new(-2.0, 2.0).unwrap());
    let law = Harmonic {
        stiffness: 1.0,
        center: 0.0,
    };
    let st = ParticleState::new(1.0, 0.0, 1.0).unwrap();
    let steps = (1000.0 * TAU / 1e-3).round() as usize;
    let rec = integrate_particle(&law, st, 1e-3, steps, &free_field, PfCoupling::default(), 0.0).unwrap();
    let e0 = rec.energy[0];
    let drift = max_of(rec.energy.iter().map(|e| ((e - e0) / e0).abs()));

    // m q'' against the PF force along a trajectory through a box eigenfield
    let profile = box_eigenfield(1, PI, 1.0).unwrap();
    let law = Harmonic {
        stiffness: 1.0,
        center: PI / 2.0,
    };
    let st = ParticleState::new(PI / 2.0 + 1.0, 0.0, 1.0).unwrap();
    let g = PfCoupling::default();
    let rec = integrate_particle(&law, st, 1e-2, 700, &profile, g, 0.0).unwrap();
    let worst = max_of(pf_force_residuals(&rec, &law, &profile, g).unwrap());
    let free_ok = integrate_particle(&Free, ParticleState::new(0.0, 1.0, 1.0).unwrap(), 0.01, 100, &free_field, g, 0.0)
        .unwrap()
        .xs
        .iter()
        .enumerate()
        .all(|(i, x)| (x - 0.01 * i as f64).abs() <= 1e-12);

    verdict(
        8,
        "kinematics oracles",
        &[
            (format!("arc length rel {d_q:.2e} <= 1e-8"), d_q <= 1e-8),
            (format!("energy drift {drift:.2e} <= 1e-6"), drift <= 1e-6),
            (format!("f_PF residual {worst:.2e} <= 1e-4"), worst <= 1e-4),
            (format!("free particle exact: {free_ok}"), free_ok),
        ],
    );
}

fn nodes_ok(s: &Spectrum) -> bool {
    s.levels.iter().all(|l| l.nodes == l.n - 1 && count_nodes(&l.chi) == l.n - 1)
}

fn above_rest(s: &Spectrum, m0: f64) -> bool {
    s.levels.iter().all(|l| l.energy >= m0) && s.levels.windows(2).all(|w| w[0].energy < w[1].energy)
}

#[test]
fn c09_solver_properties() {
    let k = natural();
    let analytic = solve_box_analytic(1.0, PI, 6, &k).unwrap();
    let fd = solve_fd(&box_problem(1.0, EquationForm::MassIndependent), 1000, 6, &k).unwrap();
    let dep = solve_fd(&box_problem(1.0, EquationForm::MassDependent), 1000, 6, &k).unwrap();
    let shooting = solve_shooting(
        &box_problem(1.0, EquationForm::MassIndependent),
        &ShootingOptions::new((1.0, 7.0), 6),
        &k,
    )
    .unwrap();
    let photonic = solve_shooting(
        &box_problem(0.0, EquationForm::MassIndependent),
        &ShootingOptions::new((0.0, 6.5), 6),
        &k,
    )
    .unwrap();

    let nodes = [&analytic, &fd, &dep, &shooting, &photonic].iter().all(|s| nodes_ok(s));
    let h = fd.grid[1] - fd.grid[0];
    let mut worst_dot = 0.0f64;
    for (i, a) in fd.levels.iter().enumerate() {
        for b in &fd.levels[..i] {
            let dot: f64 = a.chi.iter().zip(&b.chi).map(|(x, y)| x * y).sum::<f64>() * h;
            worst_dot = worst_dot.max(dot.abs());
        }
    }
    let exact = 2f64.sqrt();
    let p = box_problem(1.0, EquationForm::MassDependent);
    let coarse = solve_fd(&p, 201, 1, &k).unwrap().levels[0].energy - exact;
    let fine = solve_fd(&p, 401, 1, &k).unwrap().levels[0].energy - exact;
    let factor = coarse.abs() / fine.abs();
    let positive = above_rest(&analytic, 1.0)
        && above_rest(&fd, 1.0)
        && above_rest(&dep, 1.0)
        && above_rest(&shooting, 1.0)
        && above_rest(&photonic, 0.0);
    verdict(
        9,
        "solver properties",
        &[
            (format!("node counts n-1: {nodes}"), nodes),
            (format!("max |<chi_m, chi_n>| {worst_dot:.2e} <= 1e-8"), worst_dot <= 1e-8),
            (format!("convergence factor {factor:.3} in [3.5, 4.5]"), (3.5..=4.5).contains(&factor)),
            (format!("ordered and >= m0 c^2: {positive}"), positive),
        ],
    );
}

fn run_pf(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_pf"))
        .args(args)
        .env_remove("PF_SEED")
        .output()
        .expect("run pf");
    assert!(out.status.success(), "pf {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn c10_determinism() {
    let runs: [&[&str]; 4] = [
        &["lorentz-check", "--seed", "10", "--samples", "2000", "--high-gamma-samples", "2000"],
        &["lorentz-check", "--seed", "10", "--samples", "2000", "--high-gamma-samples", "2000", "--format", "json"],
        &["spectrum", "--box", "--a", "pi", "--m0", "1", "--levels", "4", "--format", "json"],
        &["spectrum", "--box", "--a", "pi", "--m0", "1", "--levels", "4", "--form", "mass-dependent"],
    ];
    let mut checks = Vec::new();
    for args in runs {
        let first = run_pf(args);
        let second = run_pf(args);
        let same = !first.is_empty() && first == second;
        checks.push((format!("{} ({} bytes) identical: {same}", args.join(" "), first.len()), same));
    }
    verdict(10, "determinism", &checks);
}
