//! Stationary field profiles `chi(x)` and their first two derivatives.

mod spline;

use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};

pub use spline::CubicSpline;

use crate::error::{PfError, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Domain { lo, hi })
        } else {
            Err(PfError::InvalidArgument(format!(
                "domain [{lo}, {hi}] must be finite and non-empty"
            )))
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(PfError::Domain {
                x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` uniformly spaced points including both ends.
    pub fn uniform_grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = self.width() / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|i| self.lo + i as f64 * h).collect();
        grid[n - 1] = self.hi;
        grid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Zero,
    Linear { slope: f64 },
    Sine { amplitude: f64, wavenumber: f64 },
    BoxEigenfield { n: u32, a: f64, amplitude: f64 },
    Sampled(CubicSpline),
}

/// A stationary field `chi(x)` defined on a closed domain. Evaluation outside
/// the domain is an error, never an extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    kind: FieldKind,
    domain: Domain,
}

impl FieldProfile {
    pub fn zero(domain: Domain) -> Self {
        FieldProfile {
            kind: FieldKind::Zero,
            domain,
        }
    }

    /// `chi(x) = slope * x`.
    pub fn linear(slope: f64, domain: Domain) -> Result<Self> {
        finite("slope", slope)?;
        Ok(FieldProfile {
            kind: FieldKind::Linear { slope },
            domain,
        })
    }

    /// `chi(x) = amplitude * sin(wavenumber * x)`.
    pub fn sine(amplitude: f64, wavenumber: f64, domain: Domain) -> Result<Self> {
        finite("amplitude", amplitude)?;
        finite("wavenumber", wavenumber)?;
        Ok(FieldProfile {
            kind: FieldKind::Sine {
                amplitude,
                wavenumber,
            },
            domain,
        })
    }

    /// Build a profile from samples, interpolated by a natural cubic spline.
    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::natural(xs, ys)?;
        let domain = Domain::new(spline.lo(), spline.hi())?;
        Ok(FieldProfile {
            kind: FieldKind::Sampled(spline),
            domain,
        })
    }

    /// Read a two-column `x,chi` CSV. A header row is optional.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let (xs, ys) = read_two_columns(reader)?;
        Self::sampled(xs, ys)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, FieldKind::Zero)
    }

    /// `chi(x)` for `order = 0`, `chi'(x)` for 1, `chi''(x)` for 2.
    pub fn evaluate(&self, x: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(PfError::UnsupportedOrder(order));
        }
        self.domain.check(x)?;
        Ok(match &self.kind {
            FieldKind::Zero => 0.0,
            FieldKind::Linear { slope } => match order {
                0 => slope * x,
                1 => *slope,
                _ => 0.0,
            },
            FieldKind::Sine {
                amplitude,
                wavenumber,
            } => {
                let phase = wavenumber * x;
                match order {
                    0 => amplitude * phase.sin(),
                    1 => amplitude * wavenumber * phase.cos(),
                    _ => -amplitude * wavenumber * wavenumber * phase.sin(),
                }
            }
            FieldKind::BoxEigenfield { n, a, amplitude } => {
                let k = f64::from(*n) * PI / a;
                // sin(n pi) is not exactly zero in floating point
                let at_wall = x == 0.0 || x == *a;
                match order {
                    0 if at_wall => 0.0,
                    0 => amplitude * (k * x).sin(),
                    1 => amplitude * k * (k * x).cos(),
                    _ if at_wall => 0.0,
                    _ => -amplitude * k * k * (k * x).sin(),
                }
            }
            FieldKind::Sampled(spline) => spline.eval(x, order),
        })
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.evaluate(x, 0)
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        self.evaluate(x, 1)
    }

    pub fn curvature(&self, x: f64) -> Result<f64> {
        self.evaluate(x, 2)
    }

    /// `d|chi'|/dx`, taken as `sign(chi') chi''` and as 0 where `chi' = 0`.
    pub fn abs_slope_derivative(&self, x: f64) -> Result<f64> {
        let slope = self.slope(x)?;
        if slope == 0.0 {
            return Ok(0.0);
        }
        Ok(slope.signum() * self.curvature(x)?)
    }
}

/// `chi_n(x) = amplitude * sin(n pi x / a)` on `[0, a]`.
pub fn box_eigenfield(n: u32, a: f64, amplitude: f64) -> Result<FieldProfile> {
    if n == 0 {
        return Err(PfError::InvalidArgument(
            "box eigenfield index starts at 1".into(),
        ));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(PfError::InvalidArgument(format!(
            "box width must be positive, got {a}"
        )));
    }
    finite("amplitude", amplitude)?;
    Ok(FieldProfile {
        kind: FieldKind::BoxEigenfield { n, a, amplitude },
        domain: Domain { lo: 0.0, hi: a },
    })
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(PfError::InvalidArgument(format!("{name} must be finite")))
    }
}

/// Parse a two-column numeric CSV, skipping a leading non-numeric header.
pub(crate) fn read_two_columns<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| PfError::Parse(e.to_string()))?;
        if record.len() < 2 {
            return Err(PfError::Parse(format!("row {} has fewer than 2 columns", row + 1)));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if row == 0 => continue,
            _ => {
                return Err(PfError::Parse(format!(
                    "row {}: cannot parse '{}', '{}'",
                    row + 1,
                    &record[0],
                    &record[1]
                )))
            }
        }
    }
    Ok((xs, ys))
}
