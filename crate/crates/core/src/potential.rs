//! Static `o`-valued one-forms `A` on R^n (the magnetic potential of the
//! Kaluza-Klein Lagrangian).
//!
//! Values are laid out `A[a * d + b]` (space index `a`, algebra index `b`);
//! gradients `dA[(c * n + a) * d + b] = d_c A_a^b`.

use std::fmt::Debug;

use crate::error::{check_len, Error, Result};
use crate::spectral::Grid1D;

pub trait MagneticPotential: Debug + Send + Sync {
    fn space_dim(&self) -> usize;
    fn algebra_dim(&self) -> usize;
    fn value(&self, x: &[f64], out: &mut [f64]);
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn descriptor(&self) -> String;
}

/// One Fourier mode `amplitude * sin(k . x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub amplitude: Vec<f64>,
    pub wavevector: Vec<f64>,
    pub phase: f64,
}

/// Constant offset plus a finite sum of sinusoidal modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalPotential {
    n: usize,
    d: usize,
    offset: Vec<f64>,
    modes: Vec<Mode>,
}

impl ModalPotential {
    pub fn new(n: usize, d: usize, offset: Vec<f64>, modes: Vec<Mode>) -> Result<Self> {
        check_len("potential offset", n * d, offset.len())?;
        for m in &modes {
            check_len("potential mode amplitude", n * d, m.amplitude.len())?;
            check_len("potential mode wavevector", n, m.wavevector.len())?;
        }
        let finite = offset.iter().all(|v| v.is_finite())
            && modes
                .iter()
                .all(|m| m.amplitude.iter().chain(&m.wavevector).all(|v| v.is_finite()) && m.phase.is_finite());
        if !finite {
            return Err(Error::Validation("non-finite potential parameters".into()));
        }
        Ok(Self { n, d, offset, modes })
    }

    pub fn zero(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            offset: vec![0.0; n * d],
            modes: Vec::new(),
        }
    }

    pub fn constant(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(n, d, values, Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty() && self.offset.iter().all(|&v| v == 0.0)
    }

    /// Samples `A_x` on a 1D grid as an `N x d` row-major array.
    pub fn sample_1d(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        check_len("1D potential space dimension", 1, self.n)?;
        let mut out = vec![0.0; grid.n * self.d];
        for i in 0..grid.n {
            self.value(&[grid.x(i)], &mut out[i * self.d..(i + 1) * self.d]);
        }
        Ok(out)
    }
}

impl MagneticPotential for ModalPotential {
    fn space_dim(&self) -> usize {
        self.n
    }
    fn algebra_dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.offset);
        for m in &self.modes {
            let s = (dot(&m.wavevector, x) + m.phase).sin();
            for (o, a) in out.iter_mut().zip(&m.amplitude) {
                *o += a * s;
            }
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let nd = self.n * self.d;
        for m in &self.modes {
            let c = (dot(&m.wavevector, x) + m.phase).cos();
            for (cidx, kc) in m.wavevector.iter().enumerate() {
                for (q, a) in m.amplitude.iter().enumerate() {
                    out[cidx * nd + q] += a * kc * c;
                }
            }
        }
    }

    fn descriptor(&self) -> String {
        if self.is_zero() {
            "zero".into()
        } else if self.modes.is_empty() {
            format!("constant{:?}", self.offset)
        } else {
            format!("modal(offset={:?}, modes={})", self.offset, self.modes.len())
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences (step `h`) over the given probe points.
pub fn gradient_check(pot: &dyn MagneticPotential, probes: &[Vec<f64>], h: f64) -> f64 {
    let n = pot.space_dim();
    let d = pot.algebra_dim();
    let mut worst: f64 = 0.0;
    let mut g = vec![0.0; n * n * d];
    let mut plus = vec![0.0; n * d];
    let mut minus = vec![0.0; n * d];
    for x in probes {
        pot.gradient(x, &mut g);
        let scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-8);
        for c in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            pot.value(&xp, &mut plus);
            pot.value(&xm, &mut minus);
            for q in 0..n * d {
                let fd = (plus[q] - minus[q]) / (2.0 * h);
                worst = worst.max((g[c * n * d + q] - fd).abs() / scale);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modal_gradient_matches_central_differences() {
        let p = ModalPotential::new(
            2,
            3,
            vec![0.1, 0.0, -0.2, 0.3, 0.0, 0.0],
            vec![
                Mode {
                    amplitude: vec![1.0, 0.5, 0.0, -0.3, 0.2, 0.7],
                    wavevector: vec![0.8, -0.4],
                    phase: 0.3,
                },
                Mode {
                    amplitude: vec![0.0, 0.2, 0.1, 0.4, -0.6, 0.0],
                    wavevector: vec![0.0, 1.3],
                    phase: -1.0,
                },
            ],
        )
        .unwrap();
        let probes = vec![vec![0.1, 0.2], vec![-1.5, 2.0], vec![3.0, -0.7]];
        assert!(gradient_check(&p, &probes, 1e-5) < 1e-6);
    }

    #[test]
    fn zero_and_constant() {
        let z = ModalPotential::zero(1, 2);
        assert!(z.is_zero());
        assert_eq!(z.descriptor(), "zero");
        let c = ModalPotential::constant(1, 1, vec![2.5]).unwrap();
        let mut v = [0.0];
        c.value(&[10.0], &mut v);
        assert_eq!(v[0], 2.5);
        assert!(ModalPotential::constant(1, 2, vec![1.0]).is_err());
    }
}
