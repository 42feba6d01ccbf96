//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm-sequence
//! bisection and inverse iteration.

use crate::error::{PfError, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`
    pub off: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// unit 2-norm
    pub vector: Vec<f64>,
    /// `||T v - lambda v||_2`
    pub residual: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len());
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            d = self.diag[i] - x
                - if i > 0 { self.off[i - 1] * self.off[i - 1] / d } else { 0.0 };
            // a zero pivot is taken as a tiny negative one
            if d.abs() < tiny {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn mul(&self, v: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// The `k`-th smallest eigenvalue (0-based) to full precision.
    fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest `count` eigenpairs, ascending.
    pub fn lowest(&self, count: usize) -> Result<Vec<Eigenpair>> {
        let n = self.len();
        if count == 0 || count > n {
            return Err(PfError::InvalidArgument(format!(
                "requested {count} eigenpairs of a {n}x{n} matrix"
            )));
        }
        let (glo, ghi) = self.gershgorin();
        let span = (ghi - glo).max(f64::MIN_POSITIVE);
        let (glo, ghi) = (glo - 1e-12 * span, ghi + 1e-12 * span);
        let norm = glo.abs().max(ghi.abs());

        let mut pairs: Vec<Eigenpair> = Vec::with_capacity(count);
        for k in 0..count {
            let value = self.eigenvalue(k, glo, ghi);
            let vector = self.inverse_iteration(value, norm, &pairs)?;
            let mut tv = vec![0.0; n];
            self.mul(&vector, &mut tv);
            let residual = tv
                .iter()
                .zip(&vector)
                .map(|(a, b)| (a - value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if !(residual <= 1e-8 * norm.max(1.0)) {
                return Err(PfError::numerical(
                    format!("inverse iteration stalled for eigenvalue {k}"),
                    residual,
                ));
            }
            pairs.push(Eigenpair {
                value,
                vector,
                residual,
            });
        }
        Ok(pairs)
    }

    fn inverse_iteration(&self, value: f64, norm: f64, previous: &[Eigenpair]) -> Result<Vec<f64>> {
        let n = self.len();
        // nudge the shift off the eigenvalue so the factorization stays regular
        let shift = value + 4.0 * f64::EPSILON * norm.max(value.abs());
        let lu = TridiagonalLu::factor(self, shift);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i as f64) * 0.731).sin()).collect();
        normalize(&mut v);
        let mut tv = vec![0.0; n];
        for _ in 0..8 {
            lu.solve(&mut v);
            for p in previous {
                // reorthogonalize against close neighbours only
                if (p.value - value).abs() <= 1e-3 * norm {
                    let dot: f64 = p.vector.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(&p.vector).for_each(|(x, y)| *x -= dot * y);
                }
            }
            if normalize(&mut v) == 0.0 {
                return Err(PfError::numerical("inverse iteration collapsed", f64::NAN));
            }
            self.mul(&v, &mut tv);
            let r = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if r <= 64.0 * f64::EPSILON * norm * (n as f64).sqrt() {
                break;
            }
        }
        Ok(v)
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// LU factorization of `T - shift I` with partial pivoting; `U` has two
/// superdiagonals.
struct TridiagonalLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.len();
        let tiny = f64::EPSILON * t.diag.iter().map(|d| d.abs()).fold(1e-300, f64::max);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];

        // current row i holds (d, e, f) in columns i, i+1, i+2
        let mut d = t.diag[0] - shift;
        let mut e = if n > 1 { t.off[0] } else { 0.0 };
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if d.abs() < tiny { tiny } else { d };
                break;
            }
            let sub = t.off[i];
            let nd = t.diag[i + 1] - shift;
            let ne = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > d.abs() {
                // swap rows i and i+1
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = nd;
                u2[i] = ne;
                let m = d / sub;
                l[i] = m;
                d = e - m * nd;
                e = -m * ne;
            } else {
                let piv = if d.abs() < tiny { tiny } else { d };
                u0[i] = piv;
                u1[i] = e;
                u2[i] = 0.0;
                let m = sub / piv;
                l[i] = m;
                d = nd - m * e;
                e = ne;
            }
        }
        TridiagonalLu { u0, u1, u2, l, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}
