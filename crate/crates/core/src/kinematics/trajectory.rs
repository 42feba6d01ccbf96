use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{pf_force, pf_position, ParticleState};
use crate::constants::PfCoupling;
use crate::error::{PfError, Result};
use crate::field::{FieldKind, FieldProfile};
use crate::io::fmt_f64;

/// Particle force law `f_P(x)`, optionally with its potential `V_P(x)`.
pub trait ForceLaw {
    fn force(&self, x: f64) -> f64;

    fn potential(&self, _x: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64) -> f64> ForceLaw for F {
    fn force(&self, x: f64) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Free;

impl ForceLaw for Free {
    fn force(&self, _x: f64) -> f64 {
        0.0
    }

    fn potential(&self, _x: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `f = -k (x - center)`, `V = k (x - center)^2 / 2`.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub stiffness: f64,
    pub center: f64,
}

impl ForceLaw for Harmonic {
    fn force(&self, x: f64) -> f64 {
        -self.stiffness * (x - self.center)
    }

    fn potential(&self, x: f64) -> Option<f64> {
        let d = x - self.center;
        Some(0.5 * self.stiffness * d * d)
    }
}

/// Uniform force `f`, `V = -f x`.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub force: f64,
}

impl ForceLaw for Constant {
    fn force(&self, _x: f64) -> f64 {
        self.force
    }

    fn potential(&self, x: f64) -> Option<f64> {
        Some(-self.force * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub q: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// Sampled particle trajectory with the PF coordinate `q` alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
    pub qs: Vec<f64>,
    pub energy: Vec<f64>,
    pub mass: f64,
    /// Set when the particle left the profile domain; the record then holds
    /// the samples up to the last in-domain step.
    pub exited_domain: bool,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn samples(&self) -> Vec<TrajectorySample> {
        (0..self.len())
            .map(|i| TrajectorySample {
                t: self.ts[i],
                x: self.xs[i],
                v: self.vs[i],
                q: self.qs[i],
                energy: self.energy[i],
            })
            .collect()
    }

    /// CSV with header `t,x,v,q,E`, plus any extra named columns.
    pub fn write_csv<W: Write>(&self, mut w: W, extra: &[(&str, &[f64])]) -> std::io::Result<()> {
        write!(w, "t,x,v,q,E")?;
        for (name, _) in extra {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(
                w,
                "{},{},{},{},{}",
                fmt_f64(self.ts[i]),
                fmt_f64(self.xs[i]),
                fmt_f64(self.vs[i]),
                fmt_f64(self.qs[i]),
                fmt_f64(self.energy[i])
            )?;
            for (_, col) in extra {
                write!(w, ",{}", fmt_f64(col[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.samples()).expect("samples serialize")
    }
}

/// Serialized trajectory with the `f_PF` consistency residual per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub samples: Vec<TrajectorySample>,
    pub residual: Vec<f64>,
    pub exited_domain: bool,
}

impl TrajectoryReport {
    pub fn new(rec: &TrajectoryRecord, residual: Vec<f64>) -> Self {
        TrajectoryReport {
            samples: rec.samples(),
            residual,
            exited_domain: rec.exited_domain,
        }
    }
}

/// Integrate `m x'' = f_P(x)` with classical fixed-step RK4, recording `q`
/// (anchored at `q(x_ref) = 0`) and `E_P` at every step.
pub fn integrate_particle<L: ForceLaw + ?Sized>(
    law: &L,
    state0: ParticleState,
    dt: f64,
    n_steps: usize,
    profile: &FieldProfile,
    g: PfCoupling,
    x_ref: f64,
) -> Result<TrajectoryRecord> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let domain = profile.domain();
    domain.check(state0.x)?;
    let m = state0.mass();
    let closed_form_q = matches!(profile.kind(), FieldKind::Zero | FieldKind::Linear { .. });
    let energy_at = |x: f64, v: f64| 0.5 * m * v * v + law.potential(x).unwrap_or(0.0);

    let mut rec = TrajectoryRecord {
        ts: Vec::with_capacity(n_steps + 1),
        xs: Vec::with_capacity(n_steps + 1),
        vs: Vec::with_capacity(n_steps + 1),
        qs: Vec::with_capacity(n_steps + 1),
        energy: Vec::with_capacity(n_steps + 1),
        mass: m,
        exited_domain: false,
    };
    let (mut x, mut v) = (state0.x, state0.v);
    let mut q = pf_position(x, profile, g, x_ref)?;
    rec.push(0.0, x, v, q, energy_at(x, v));

    let accel = |x: f64| law.force(x) / m;
    for step in 1..=n_steps {
        let k1x = v;
        let k1v = accel(x);
        let k2x = v + 0.5 * dt * k1v;
        let k2v = accel(x + 0.5 * dt * k1x);
        let k3x = v + 0.5 * dt * k2v;
        let k3v = accel(x + 0.5 * dt * k2x);
        let k4x = v + dt * k3v;
        let k4v = accel(x + dt * k3x);
        let x_new = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let v_new = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        if !(x_new.is_finite() && v_new.is_finite()) {
            return Err(PfError::numerical(
                format!("non-finite state at step {step}"),
                f64::NAN,
            ));
        }
        if !domain.contains(x_new) {
            rec.exited_domain = true;
            break;
        }
        q = if closed_form_q {
            pf_position(x_new, profile, g, x_ref)?
        } else {
            q + pf_position(x_new, profile, g, x)?
        };
        x = x_new;
        v = v_new;
        rec.push(step as f64 * dt, x, v, q, energy_at(x, v));
    }
    Ok(rec)
}

impl TrajectoryRecord {
    fn push(&mut self, t: f64, x: f64, v: f64, q: f64, e: f64) {
        self.ts.push(t);
        self.xs.push(x);
        self.vs.push(v);
        self.qs.push(q);
        self.energy.push(e);
    }
}

/// Per-sample `|m q'' - f_PF|`, with `q''` from second differences of the
/// recorded `q(t)`, divided by `max |f_PF|` over the record (left absolute
/// when that maximum is zero). Records shorter than three samples give zeros.
pub fn pf_force_residuals<L: ForceLaw + ?Sized>(
    rec: &TrajectoryRecord,
    law: &L,
    profile: &FieldProfile,
    g: PfCoupling,
) -> Result<Vec<f64>> {
    let n = rec.len();
    if n < 3 {
        return Ok(vec![0.0; n]);
    }
    let dt = rec.ts[1] - rec.ts[0];
    let q = &rec.qs;
    let mut qdd = vec![0.0; n];
    for i in 1..n - 1 {
        qdd[i] = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (dt * dt);
    }
    // one-sided at the ends, third order where enough samples exist
    let one_sided = |p: [f64; 5]| {
        (35.0 * p[0] - 104.0 * p[1] + 114.0 * p[2] - 56.0 * p[3] + 11.0 * p[4]) / (12.0 * dt * dt)
    };
    if n >= 5 {
        qdd[0] = one_sided([q[0], q[1], q[2], q[3], q[4]]);
        qdd[n - 1] = one_sided([q[n - 1], q[n - 2], q[n - 3], q[n - 4], q[n - 5]]);
    } else if n == 4 {
        qdd[0] = (2.0 * q[0] - 5.0 * q[1] + 4.0 * q[2] - q[3]) / (dt * dt);
        qdd[n - 1] = (2.0 * q[n - 1] - 5.0 * q[n - 2] + 4.0 * q[n - 3] - q[n - 4]) / (dt * dt);
    } else {
        qdd[0] = qdd[1];
        qdd[n - 1] = qdd[1];
    }

    let mut f_pf = Vec::with_capacity(n);
    for i in 0..n {
        let st = ParticleState::new(rec.xs[i], rec.vs[i], rec.mass)?;
        f_pf.push(pf_force(&st, law.force(rec.xs[i]), profile, g)?);
    }
    let scale = f_pf.iter().fold(0.0f64, |acc, f| acc.max(f.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok((0..n)
        .map(|i| (rec.mass * qdd[i] - f_pf[i]).abs() / scale)
        .collect())
}
