use std::f64::consts::PI;
use std::process::{Command, Output};

use pf_core::constants::{HBAR_SI, SPEED_OF_LIGHT_SI};
use pf_core::kinematics::TrajectoryReport;
use pf_core::relativity::{InvarianceReport, PhotonLimitRow};
use pf_core::spectral::{NonrelRow, SpectrumReport};

fn pf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pf"))
        .args(args)
        .env_remove("PF_SEED")
        .output()
        .expect("run pf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows of a CSV table as numbers, header dropped.
fn table(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let at = header.iter().position(|h| *h == name).unwrap();
    table(text).iter().map(|r| r[at]).collect()
}

#[test]
#[allow(clippy::approx_constant)]
fn box_spectrum_table() {
    let out = pf(&["spectrum", "--box", "--a", "pi", "--m0", "1", "--levels", "3", "--units", "natural"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,E,analytic_rel_diff\n"));
    let rows = table(&text);
    for (row, expected) in rows.iter().zip([1.4142136, 2.2360680, 3.1622777]) {
        assert!((row[1] - expected).abs() < 5e-8);
        assert!(row[2] <= 1e-5);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("backend: shooting"));
}

#[test]
fn photonic_box_spectrum() {
    let out = pf(&["spectrum", "--box", "--a", "pi", "--m0", "0", "--levels", "3"]);
    assert!(out.status.success());
    for (row, n) in table(&stdout(&out)).iter().zip(1..) {
        assert!((row[1] - f64::from(n)).abs() <= 1e-8);
    }
}

#[test]
fn every_solver_agrees_on_the_box() {
    for solver in ["analytic", "fd", "shooting"] {
        let out = pf(&["spectrum", "--box", "--a", "pi", "--levels", "4", "--solver", solver]);
        assert!(out.status.success(), "{solver}");
        let diffs = column(&stdout(&out), "analytic_rel_diff");
        assert!(diffs.iter().all(|d| *d <= 1e-5), "{solver}: {diffs:?}");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pf(&["spectrum", "--box", "--m0", "1"]).status.code(), Some(1));
    assert_eq!(pf(&["spectrum"]).status.code(), Some(1));
    assert_eq!(pf(&["limits", "quantum"]).status.code(), Some(1));
    assert_eq!(pf(&["spectrum", "--box", "--a", "pie"]).status.code(), Some(1));
    assert_eq!(pf(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pf(&["spectrum", "--box", "--a", "pi", "--m0", "0", "--form", "mass-dependent"]).status.code(), Some(1));
    assert_eq!(pf(&["--help"]).status.code(), Some(0));
}

#[test]
fn spectrum_json_round_trips_and_dumps_eigenfields() {
    let dir = tempfile::tempdir().unwrap();
    let out = pf(&[
        "spectrum", "--box", "--a", "pi", "--levels", "3", "--format", "json", "--eigenfields",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: SpectrumReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.levels.len(), 3);
    assert_eq!(report.levels[2].nodes, 2);
    assert_eq!(report.problem.potential, "infinite_box");
    assert_eq!(serde_json::to_value(&report).unwrap(), serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap());

    let dump = std::fs::read_to_string(dir.path().join("level_2.csv")).unwrap();
    assert!(dump.starts_with("x,chi\n0,0\n"));
    assert_eq!(dump.lines().count(), 2001);
}

#[test]
fn sampled_potential_picks_a_back_end() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let mut csv = String::from("x,V\n");
    for i in 0..=32 {
        let x = PI * f64::from(i) / 32.0;
        csv.push_str(&format!("{x},{}\n", 0.2 * (x - PI / 2.0).powi(2)));
    }
    std::fs::write(&path, csv).unwrap();
    let p = path.to_str().unwrap();

    let ind = pf(&["spectrum", "--potential", p, "--levels", "2"]);
    assert!(ind.status.success());
    assert!(String::from_utf8_lossy(&ind.stderr).contains("backend: shooting"));
    let dep = pf(&["spectrum", "--potential", p, "--levels", "2", "--form", "mass-dependent"]);
    assert!(dep.status.success());
    assert!(String::from_utf8_lossy(&dep.stderr).contains("backend: finite-difference"));
    // no closed form to compare against
    assert!(stdout(&dep).starts_with("n,E\n"));
    // the linear solver cannot take a varying potential in the mass-independent form
    assert_eq!(pf(&["spectrum", "--potential", p, "--solver", "fd"]).status.code(), Some(1));

    // a potential deep enough to flip 1 + V/(m0 c^2) is a regime violation
    std::fs::write(&path, "x,V\n0,-2\n1,-2\n2,-2\n3,-2\n").unwrap();
    let out = pf(&["spectrum", "--potential", p, "--form", "mass-dependent"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn si_box_matches_closed_form() {
    let m_e = 9.109_383_701_5e-31;
    let a = 1e-9;
    let out = pf(&["--units", "si", "spectrum", "--box", "--a", "1e-9", "--m0", "9.1093837015e-31", "--levels", "2", "--solver", "analytic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = 2.0 * PI * HBAR_SI;
    let c = SPEED_OF_LIGHT_SI;
    for (row, n) in table(&stdout(&out)).iter().zip(1..) {
        let p = f64::from(n) * h / (2.0 * a);
        let e = c * (p * p + (m_e * c).powi(2)).sqrt();
        assert!(((row[1] - e) / e).abs() < 1e-12, "{} vs {e}", row[1]);
    }
    let fd = pf(&["--units", "si", "spectrum", "--box", "--a", "1e-9", "--m0", "9.1093837015e-31", "--solver", "fd"]);
    let analytic = pf(&["--units", "si", "spectrum", "--box", "--a", "1e-9", "--m0", "9.1093837015e-31", "--solver", "analytic"]);
    for (x, y) in table(&stdout(&fd)).iter().zip(table(&stdout(&analytic))) {
        assert!(((x[1] - y[1]) / y[1]).abs() < 1e-9);
        assert!(x[2] < 1e-9);
    }
}

#[test]
fn free_particle_trajectory() {
    let out = pf(&["trajectory", "--field", "zero", "--v0", "1", "--dt", "0.01", "--steps", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,x,v,q,E,residual\n"));
    let rows = table(&text);
    assert_eq!(rows.len(), 101);
    // q is measured from the left edge of the default domain
    assert!(rows.iter().all(|r| (r[3] - (r[1] + 10.0)).abs() <= 1e-12));

    let single = pf(&["trajectory", "--steps", "0"]);
    assert!(single.status.success());
    assert_eq!(stdout(&single).lines().count(), 2);
}

#[test]
fn box_eigenfield_trajectory_residual() {
    let x0 = (PI / 2.0 + 1.0).to_string();
    let out = pf(&[
        "trajectory", "--field", "box", "--a", "pi", "--force", "harmonic", "--center", "pi/2", "--x0", &x0,
        "--dt", "0.01", "--steps", "700",
    ]);
    assert!(out.status.success());
    let residual = column(&stdout(&out), "residual");
    assert!(residual.iter().all(|r| *r <= 1e-4));
}

#[test]
fn domain_exit_writes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = pf(&[
        "trajectory", "--v0", "1", "--lo", "-1", "--hi", "1", "--dt", "0.1", "--steps", "100", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = table(&text);
    assert!(rows.len() > 1 && rows.len() < 101);
    assert!(rows.iter().all(|r| r[1] <= 1.0));
}

#[test]
fn trajectory_json_round_trips() {
    let out = pf(&["trajectory", "--field", "sine", "--amplitude", "0.1", "--v0", "0.5", "--steps", "20", "--format", "json"]);
    assert!(out.status.success());
    let report: TrajectoryReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.samples.len(), 21);
    assert_eq!(report.residual.len(), 21);
    assert!(!report.exited_domain);
    assert!(report.samples[20].q > report.samples[20].x);
}

#[test]
fn lorentz_check_default_run() {
    let out = pf(&["lorentz-check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with(
        "seed,v_p,v_p_prime,v_pf,chi_slope,gamma_pf_kinematic,gamma_pf_matching,residual_a18,delta_truncated,delta_full\n"
    ));
    assert_eq!(text.lines().count(), 20_001);
    let residual = column(&text, "residual_a18");
    assert!(residual.iter().all(|r| r.abs() <= 1e-10));
}

fn lorentz_gamma(v: f64) -> f64 {
    1.0 / ((1.0 - v) * (1.0 + v)).sqrt()
}

#[test]
fn lorentz_check_without_field_slope() {
    let out = pf(&["lorentz-check", "--max-slope", "0", "--samples", "2000", "--high-gamma-samples", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (v_p, v_pp, v_pf, gpf) = (
        column(&text, "v_p"),
        column(&text, "v_p_prime"),
        column(&text, "v_pf"),
        column(&text, "gamma_pf_matching"),
    );
    for i in 0..v_p.len() {
        let a = lorentz_gamma(v_p[i]) * (1.0 - v_p[i] * v_pf[i]);
        let target = lorentz_gamma(v_pp[i]);
        assert!(((gpf[i] * a - target) / target).abs() <= 1e-12, "row {i}");
    }
}

#[test]
fn lorentz_check_seed_handling() {
    let base = ["lorentz-check", "--samples", "50", "--high-gamma-samples", "50"];
    let a = pf(&[&base[..], &["--seed", "3"]].concat());
    let b = pf(&[&base[..], &["--seed", "3"]].concat());
    let c = pf(&[&base[..], &["--seed", "4"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_pf"))
        .args([&base[..], &["--seed", "4"]].concat())
        .env("PF_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_pf"))
        .args(base)
        .env("PF_SEED", "three")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn lorentz_check_json_and_failure_exit() {
    let out = pf(&["lorentz-check", "--samples", "100", "--high-gamma-samples", "100", "--format", "json"]);
    assert!(out.status.success());
    let report: InvarianceReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.summary.passed);
    assert_eq!(report.rows.len(), report.summary.rows);

    let strict = pf(&["lorentz-check", "--samples", "100", "--high-gamma-samples", "100", "--tolerance", "1e-300"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(!strict.stdout.is_empty());
}

#[test]
fn nonrel_limits() {
    let out = pf(&["limits", "nonrel", "--a", "pi"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let m0 = column(&text, "m0");
    let dev = column(&text, "relative_deviation");
    assert_eq!(m0, [1e2, 1e3, 1e4]);
    assert!(dev[1] <= 5e-7);
    assert!(dev[0] > dev[1] && dev[1] > dev[2]);

    let json = pf(&["limits", "nonrel", "--m0", "1000", "--levels", "2", "--format", "json"]);
    let rows: Vec<NonrelRow> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.len(), 2);
    let ratio = rows[1].relative_deviation / rows[0].relative_deviation;
    assert!((3.8..=4.2).contains(&ratio));

    assert_eq!(pf(&["limits", "nonrel", "--m0", "0"]).status.code(), Some(1));
}

#[test]
fn photon_limits() {
    let out = pf(&["limits", "photon", "--gamma-p", "1e6", "--chi-slope", "0.5"]);
    assert!(out.status.success());
    assert!(column(&stdout(&out), "deficit")[0] <= 1e-12);

    let out = pf(&["limits", "photon", "--gamma-p", "1e3", "--chi-slope", "0"]);
    let deficit = column(&stdout(&out), "deficit")[0];
    assert!((deficit - 5e-7).abs() <= 1e-12);

    let json = pf(&["limits", "photon", "--format", "json"]);
    let rows: Vec<PhotonLimitRow> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.len(), 9);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# photonic box\nbox = true\na = pi\nm0 = 0\nlevels = 2\n").unwrap();
    let c = cfg.to_str().unwrap();

    let out = pf(&["--config", c, "spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let e = column(&stdout(&out), "E");
    assert_eq!(e.len(), 2);
    assert!((e[1] - 2.0).abs() <= 1e-8);

    let out = pf(&["spectrum", "--config", c, "--levels", "4", "--m0", "1"]);
    assert!(out.status.success());
    let e = column(&stdout(&out), "E");
    assert_eq!(e.len(), 4);
    assert!((e[0] - 2f64.sqrt()).abs() <= 1e-8);

    std::fs::write(&cfg, "levels\n").unwrap();
    assert_eq!(pf(&["--config", c, "spectrum"]).status.code(), Some(1));
    assert_eq!(pf(&["--config", "/nonexistent/pf.cfg", "spectrum"]).status.code(), Some(1));
}
