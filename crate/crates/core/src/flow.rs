//! Adaptive classical RK4 (step doubling with Richardson correction) for
//! autonomous systems `y' = f(y)`.

use crate::{Error, Result};

const MAX_STEPS: usize = 100_000;

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4_step<F>(f: &F, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k1 = f(y)?;
    let k2 = f(&axpy(y, 0.5 * h, &k1))?;
    let k3 = f(&axpy(y, 0.5 * h, &k2))?;
    let k4 = f(&axpy(y, h, &k3))?;
    Ok((0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Integrates from `t = 0` to `t = t_end` (either sign) with local error
/// below `tol` relative to `1 + |y|`.
pub(crate) fn integrate<F>(f: F, y0: Vec<f64>, t_end: f64, tol: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let wrap = |e: Error| Error::Integrator(format!("flow left the chart domain: {e}"));
    let mut y = y0;
    let mut t = 0.0;
    let mut h = t_end;
    let min_step = t_end.abs() * 1e-12;
    for _ in 0..MAX_STEPS {
        let remaining = t_end - t;
        if remaining.abs() <= min_step {
            return Ok(y);
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        let full = rk4_step(&f, &y, h).map_err(wrap)?;
        let half = rk4_step(&f, &y, 0.5 * h).map_err(wrap)?;
        let two_halves = rk4_step(&f, &half, 0.5 * h).map_err(wrap)?;
        let scale = 1.0 + two_halves.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let err = full.iter().zip(&two_halves).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())) / (15.0 * scale);
        if !err.is_finite() {
            return Err(Error::Integrator("non-finite state".into()));
        }
        if err <= tol {
            y = two_halves.iter().zip(&full).map(|(b, a)| b + (b - a) / 15.0).collect();
            t += h;
            if err < tol / 64.0 {
                h *= 2.0;
            }
        } else {
            h *= 0.5;
            if h.abs() < min_step {
                return Err(Error::Integrator("step size underflow".into()));
            }
        }
    }
    Err(Error::Integrator("too many steps".into()))
}
