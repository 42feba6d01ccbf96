use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use log::warn;
use pf_core::constants::{make_constants, ConstantOverrides, Constants, PfCoupling, SiScale, UnitSystem};
use pf_core::field::{box_eigenfield, Domain, FieldProfile};
use pf_core::io::fmt_f64;
use pf_core::kinematics::{
    integrate_particle, pf_force_residuals, Constant, ForceLaw, Free, Harmonic, ParticleState,
    TrajectoryReport,
};
use pf_core::relativity::{photon_limit_report, verify_invariance, InvarianceConfig};
use pf_core::spectral::{
    auto_bracket, nonrel_limit_report, solve_box_analytic, solve_fd, solve_shooting, EquationForm,
    Potential, ShootingOptions, SpectralProblem,
};

use crate::args::{
    Cli, Command, Family, FieldPreset, ForcePreset, Form, Format, LimitsArgs, LorentzArgs, Solver,
    SpectrumArgs, TrajectoryArgs, Units,
};
use crate::CliError;

pub const SEED_ENV: &str = "PF_SEED";

/// Output settings and unit conversion. Solvers always run with
/// `c = hbar = 1`; in SI mode lengths stay in metres and everything else is
/// converted on the way in and out.
struct Context {
    scale: Option<SiScale>,
    format: Format,
    output: Option<PathBuf>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let overrides = ConstantOverrides {
            c: cli.c,
            hbar: cli.hbar,
        };
        let scale = match cli.units {
            Units::Natural => {
                if cli.c.is_some() || cli.hbar.is_some() {
                    warn!("--c and --hbar only apply with --units si; ignored");
                }
                make_constants(UnitSystem::Natural, overrides)?;
                None
            }
            Units::Si => Some(SiScale::new(&make_constants(UnitSystem::Si, overrides)?)),
        };
        Ok(Context {
            scale,
            format: cli.format,
            output: cli.output.clone(),
        })
    }

    fn internal(&self) -> Constants {
        Constants::natural()
    }

    fn convert(&self, v: f64, f: impl Fn(&SiScale, f64) -> f64) -> f64 {
        self.scale.as_ref().map_or(v, |s| f(s, v))
    }

    fn mass_in(&self, v: f64) -> f64 {
        self.convert(v, SiScale::mass_to_natural)
    }

    fn mass_out(&self, v: f64) -> f64 {
        self.convert(v, |s, m| m / s.mass_to_natural(1.0))
    }

    fn energy_in(&self, v: f64) -> f64 {
        self.convert(v, SiScale::energy_to_natural)
    }

    fn energy_out(&self, v: f64) -> f64 {
        self.convert(v, SiScale::energy_from_natural)
    }

    fn time_in(&self, v: f64) -> f64 {
        self.convert(v, SiScale::time_to_natural)
    }

    fn time_out(&self, v: f64) -> f64 {
        self.convert(v, SiScale::time_from_natural)
    }

    fn speed_in(&self, v: f64) -> f64 {
        self.convert(v, SiScale::speed_to_natural)
    }

    fn speed_out(&self, v: f64) -> f64 {
        self.convert(v, SiScale::speed_from_natural)
    }

    /// forces, and stiffnesses per metre of length
    fn force_in(&self, v: f64) -> f64 {
        self.convert(v, SiScale::force_to_natural)
    }

    fn emit(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.output {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context::new(&cli)?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(&ctx, a),
        Command::Trajectory(a) => trajectory(&ctx, a),
        Command::LorentzCheck(a) => lorentz_check(&ctx, a),
        Command::Limits(a) => limits(&ctx, a),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}

fn open(path: &PathBuf) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn spectrum(ctx: &Context, args: &SpectrumArgs) -> Result<(), CliError> {
    let k = ctx.internal();
    let m0 = ctx.mass_in(args.m0);
    let form = match args.form {
        Form::MassDependent => EquationForm::MassDependent,
        Form::MassIndependent => EquationForm::MassIndependent,
    };
    let (problem, box_width) = if args.infinite_box {
        let a = args.a.ok_or_else(|| CliError::Usage("--box needs --a".into()))?;
        (SpectralProblem::infinite_box(a, m0, form)?, Some(a))
    } else {
        let path = args
            .potential
            .as_ref()
            .ok_or_else(|| CliError::Usage("give --box or --potential".into()))?;
        let potential = match Potential::from_csv(open(path)?)? {
            Potential::SampledGrid(s) => {
                let vs = s.ys().iter().map(|&v| ctx.energy_in(v)).collect();
                Potential::sampled(s.xs().to_vec(), vs)?
            }
            other => other,
        };
        let Potential::SampledGrid(spline) = &potential else {
            unreachable!("csv potentials are sampled")
        };
        let domain = Domain::new(args.lo.unwrap_or(spline.lo()), args.hi.unwrap_or(spline.hi()))?;
        (SpectralProblem::new(potential, m0, form, domain)?, None)
    };

    let solver = match args.solver {
        Solver::Auto if form == EquationForm::MassDependent => Solver::Fd,
        Solver::Auto => Solver::Shooting,
        s => s,
    };
    let spectrum = match solver {
        Solver::Analytic => {
            let a = box_width
                .ok_or_else(|| CliError::Usage("the analytic solver only handles --box".into()))?;
            solve_box_analytic(m0, a, args.levels, &k)?
        }
        Solver::Fd => solve_fd(&problem, args.grid, args.levels, &k)?,
        Solver::Shooting | Solver::Auto => {
            let bracket = match (args.bracket_lo, args.bracket_hi) {
                (Some(lo), Some(hi)) => (ctx.energy_in(lo), ctx.energy_in(hi)),
                _ => auto_bracket(&problem, args.levels, args.grid, &k)?,
            };
            let mut options = ShootingOptions::new(bracket, args.levels);
            options.tol = args.tol;
            options.grid_size = args.grid;
            solve_shooting(&problem, &options, &k)?
        }
    };

    eprintln!("backend: {} (grid {})", spectrum.meta.backend, spectrum.meta.grid_size);
    for (level, r) in spectrum.levels.iter().zip(&spectrum.meta.residuals) {
        eprintln!("  n={} residual {}", level.n, fmt_f64(*r));
    }

    let analytic = match box_width {
        Some(a) => {
            let exact = solve_box_analytic(m0, a, args.levels, &k)?;
            Some(
                spectrum
                    .levels
                    .iter()
                    .zip(&exact.levels)
                    .map(|(l, e)| ((l.energy - e.energy) / e.energy).abs())
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };
    if let Some(diff) = &analytic {
        let worst = diff.iter().cloned().fold(0.0, f64::max);
        eprintln!("max relative deviation from the closed-form box: {}", fmt_f64(worst));
    }

    if let Some(dir) = &args.eigenfields {
        std::fs::create_dir_all(dir)?;
        for level in &spectrum.levels {
            let file = File::create(dir.join(format!("level_{}.csv", level.n)))?;
            spectrum.write_eigenfield_csv(level.n, std::io::BufWriter::new(file))?;
        }
    }

    let bytes = match ctx.format {
        Format::Csv => {
            let mut out = String::from("n,E");
            if analytic.is_some() {
                out.push_str(",analytic_rel_diff");
            }
            out.push('\n');
            for (i, level) in spectrum.levels.iter().enumerate() {
                out.push_str(&format!("{},{}", level.n, fmt_f64(ctx.energy_out(level.energy))));
                if let Some(diff) = &analytic {
                    out.push_str(&format!(",{}", fmt_f64(diff[i])));
                }
                out.push('\n');
            }
            out.into_bytes()
        }
        Format::Json => {
            let mut description = problem.describe(&k);
            if let Some(scale) = ctx.scale {
                description.m0 = args.m0;
                description.c = scale.speed_from_natural(1.0);
                description.hbar = scale.energy_from_natural(1.0) / description.c;
            }
            let mut report = spectrum.report(description);
            for level in &mut report.levels {
                level.energy = ctx.energy_out(level.energy);
            }
            report.analytic_rel_diff = analytic;
            json(&report)
        }
    };
    ctx.emit(&bytes)
}

fn trajectory(ctx: &Context, args: &TrajectoryArgs) -> Result<(), CliError> {
    let profile = match args.field {
        FieldPreset::Box => box_eigenfield(args.level, args.a, args.amplitude)?,
        FieldPreset::Sampled => {
            let path = args
                .profile
                .as_ref()
                .ok_or_else(|| CliError::Usage("--field sampled needs --profile".into()))?;
            FieldProfile::from_csv(open(path)?)?
        }
        preset => {
            let domain = Domain::new(args.lo, args.hi)?;
            match preset {
                FieldPreset::Linear => FieldProfile::linear(args.slope, domain)?,
                FieldPreset::Sine => FieldProfile::sine(args.amplitude, args.wavenumber, domain)?,
                _ => FieldProfile::zero(domain),
            }
        }
    };
    let law: Box<dyn ForceLaw> = match args.force {
        ForcePreset::Free => Box::new(Free),
        ForcePreset::Harmonic => Box::new(Harmonic {
            stiffness: ctx.force_in(args.stiffness),
            center: args.center,
        }),
        ForcePreset::Constant => Box::new(Constant {
            force: ctx.force_in(args.force_value),
        }),
    };
    let state = ParticleState::new(args.x0, ctx.speed_in(args.v0), ctx.mass_in(args.mass))?;
    let g = PfCoupling::new(args.g)?;
    let x_ref = args.x_ref.unwrap_or(profile.domain().lo);
    let mut rec = integrate_particle(
        law.as_ref(),
        state,
        ctx.time_in(args.dt),
        args.steps,
        &profile,
        g,
        x_ref,
    )?;
    let residual = pf_force_residuals(&rec, law.as_ref(), &profile, g)?;
    let worst = residual.iter().cloned().fold(0.0, f64::max);
    eprintln!("samples: {}  max f_PF residual: {}", rec.len(), fmt_f64(worst));

    rec.ts.iter_mut().for_each(|t| *t = ctx.time_out(*t));
    rec.vs.iter_mut().for_each(|v| *v = ctx.speed_out(*v));
    rec.energy.iter_mut().for_each(|e| *e = ctx.energy_out(*e));
    let bytes = match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            rec.write_csv(&mut buf, &[("residual", &residual)])?;
            buf
        }
        Format::Json => json(&TrajectoryReport::new(&rec, residual)),
    };
    ctx.emit(&bytes)?;
    if rec.exited_domain {
        let t = rec.ts.last().copied().unwrap_or(0.0);
        warn!("particle left the field domain after t = {}", fmt_f64(t));
        return Err(CliError::Regime(format!(
            "particle left the field domain after t = {}; partial trajectory written",
            fmt_f64(t)
        )));
    }
    Ok(())
}

fn seed(args: &LorentzArgs) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(args.seed),
    }
}

fn lorentz_check(ctx: &Context, args: &LorentzArgs) -> Result<(), CliError> {
    let config = InvarianceConfig {
        samples: args.samples,
        high_gamma_samples: args.high_gamma_samples,
        seed: seed(args)?,
        max_speed: args.max_speed,
        max_slope: args.max_slope,
        gamma_min: args.gamma_min,
        gamma_max: args.gamma_max,
        c: 1.0,
        tolerance: args.tolerance,
    };
    let report = verify_invariance(&config)?;
    let s = &report.summary;
    eprintln!("rows: {}  seed: {}", s.rows, config.seed);
    eprintln!("max |residual_a18|: {}", fmt_f64(s.max_matching_residual));
    eprintln!(
        "max truncated-form discrepancy: {} over {} rows",
        fmt_f64(s.max_delta_truncated),
        s.truncated_compared
    );
    if s.out_of_regime > 0 {
        warn!("{} rows outside the expansion regime were skipped", s.out_of_regime);
    }
    let bytes = match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        Format::Json => json(&report),
    };
    ctx.emit(&bytes)?;
    if s.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "invariance check above tolerance {}",
            fmt_f64(config.tolerance)
        )))
    }
}

fn limits(ctx: &Context, args: &LimitsArgs) -> Result<(), CliError> {
    let bytes = match args.family {
        Family::Nonrel => {
            let k = ctx.internal();
            let mut rows = Vec::new();
            for &m0 in &args.m0 {
                let m = ctx.mass_in(m0);
                let spectrum = solve_box_analytic(m, args.a, args.levels, &k)?;
                for mut row in nonrel_limit_report(&spectrum, m, args.a, &k)? {
                    row.m0 = ctx.mass_out(row.m0);
                    row.excess = ctx.energy_out(row.excess);
                    row.nonrel = ctx.energy_out(row.nonrel);
                    rows.push(row);
                }
            }
            match ctx.format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut out = String::from("m0,n,excess,nonrel,relative_deviation,bound\n");
                    for r in &rows {
                        out.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            fmt_f64(r.m0),
                            r.n,
                            fmt_f64(r.excess),
                            fmt_f64(r.nonrel),
                            fmt_f64(r.relative_deviation),
                            fmt_f64(r.bound)
                        ));
                    }
                    out.into_bytes()
                }
            }
        }
        Family::Photon => {
            let rows = photon_limit_report(&args.gamma_p, &args.chi_slope)?;
            match ctx.format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut out = String::from("gamma_p,chi_slope,gamma_pf,deficit,bound,ratio,within_bound\n");
                    for r in &rows {
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            fmt_f64(r.gamma_p),
                            fmt_f64(r.chi_slope),
                            fmt_f64(r.gamma_pf),
                            fmt_f64(r.deficit),
                            fmt_f64(r.bound),
                            fmt_f64(r.ratio),
                            r.within_bound
                        ));
                    }
                    out.into_bytes()
                }
            }
        }
    };
    ctx.emit(&bytes)
}
