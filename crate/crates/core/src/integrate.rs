//! Classical fourth-order Runge-Kutta on flat state vectors.

use crate::error::{Error, Result};

/// One RK4 step of `y' = f(y)` from time `t`. Non-finite output is
/// reported as a blow-up at `t + dt`.
pub fn rk4_step<F>(y: &[f64], t: f64, dt: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = y.len();
    let k1 = f(y)?;
    let mut tmp = vec![0.0; n];
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(&tmp)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(&tmp)?;
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    let k4 = f(&tmp)?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationBlowup {
            time: t + dt,
            reason: "non-finite state".into(),
        });
    }
    Ok(out)
}

/// Number of steps of size `dt` needed to reach `t_end`, rejecting
/// non-positive steps.
pub fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Validation(format!("time step must be > 0, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Validation(format!("final time must be >= 0, got {t_end}")));
    }
    Ok((t_end / dt - 1e-9).ceil().max(0.0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let err = |dt: f64| {
            let mut y = vec![1.0];
            let n = step_count(dt, 1.0).unwrap();
            for s in 0..n {
                y = rk4_step(&y, s as f64 * dt, dt, |v| Ok(vec![-v[0]])).unwrap();
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn blowup_reports_time() {
        let r = rk4_step(&[1.0], 2.0, 0.5, |_| Ok(vec![f64::INFINITY]));
        assert!(matches!(r, Err(Error::IntegrationBlowup { time, .. }) if time == 2.5));
    }

    #[test]
    fn step_count_rounds_to_cover_interval() {
        assert_eq!(step_count(1e-3, 1.0).unwrap(), 1000);
        assert_eq!(step_count(0.3, 1.0).unwrap(), 4);
        assert!(step_count(0.0, 1.0).is_err());
    }
}
