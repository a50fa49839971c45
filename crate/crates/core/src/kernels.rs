//! Green's functions of the Helmholtz operator `1 - alpha^2 d^2/dx^2` and
//! the companion spectral inverses on periodic grids.
//!
//! On a grid, convolution is carried out with the kernel's exact Fourier
//! symbol, so convolving with a Helmholtz kernel is the same operation as
//! [`invert_helmholtz`].

use rustfft::num_complex::Complex64;

use crate::error::{check_len, Error, Result};
pub use crate::spectral::Grid1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `exp(-|r|/alpha) / (2 alpha)` on the line.
    HelmholtzLine,
    /// Periodic Green's function on a circle of length `L`.
    HelmholtzPeriodic,
    /// Unnormalized Gaussian `exp(-r^2 / (2 alpha^2))`.
    Gaussian,
    /// Dirac kernel (the operator `Q = 1`).
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    alpha: f64,
    period: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("kernel length scale alpha must be > 0, got {alpha}")))
    }
}

impl Kernel {
    pub fn helmholtz_line(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kind: KernelKind::HelmholtzLine,
            alpha,
            period: f64::INFINITY,
        })
    }

    pub fn helmholtz_periodic(alpha: f64, l: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Validation(format!("period must be > 0, got {l}")));
        }
        Ok(Self {
            kind: KernelKind::HelmholtzPeriodic,
            alpha,
            period: l,
        })
    }

    pub fn gaussian(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kind: KernelKind::Gaussian,
            alpha,
            period: f64::INFINITY,
        })
    }

    pub fn identity() -> Self {
        Self {
            kind: KernelKind::Identity,
            alpha: 0.0,
            period: f64::INFINITY,
        }
    }

    /// Helmholtz kernel for `alpha > 0`, identity for `alpha == 0`.
    pub fn helmholtz_or_identity(alpha: f64) -> Result<Self> {
        if alpha == 0.0 {
            Ok(Self::identity())
        } else {
            Self::helmholtz_line(alpha)
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn period(&self) -> Option<f64> {
        self.period.is_finite().then_some(self.period)
    }

    /// Whether the kernel has pointwise values (everything but the Dirac kernel).
    pub fn is_pointwise(&self) -> bool {
        self.kind != KernelKind::Identity
    }

    fn reduce(&self, r: f64) -> f64 {
        if self.period.is_finite() {
            let l = self.period;
            let mut s = r.rem_euclid(l);
            if s > 0.5 * l {
                s -= l;
            }
            s
        } else {
            r
        }
    }

    /// Kernel value at signed separation `r`. The Dirac kernel has no
    /// pointwise values and yields NaN.
    pub fn value(&self, r: f64) -> f64 {
        let a = self.alpha;
        match self.kind {
            KernelKind::HelmholtzLine => (-r.abs() / a).exp() / (2.0 * a),
            KernelKind::HelmholtzPeriodic => {
                let s = self.reduce(r).abs();
                let h = 0.5 * self.period;
                ((h - s) / a).cosh() / (2.0 * a * (h / a).sinh())
            }
            KernelKind::Gaussian => (-r * r / (2.0 * a * a)).exp(),
            KernelKind::Identity => f64::NAN,
        }
    }

    /// Radial profile derivative `d value / d r` for `r > 0`.
    pub fn profile_derivative(&self, r: f64) -> f64 {
        let a = self.alpha;
        match self.kind {
            KernelKind::HelmholtzLine => -(-r / a).exp() / (2.0 * a * a),
            KernelKind::HelmholtzPeriodic => {
                let s = self.reduce(r);
                let sign = s.signum();
                let h = 0.5 * self.period;
                -sign * ((h - s.abs()) / a).sinh() / (2.0 * a * a * (h / a).sinh())
            }
            KernelKind::Gaussian => -r / (a * a) * (-r * r / (2.0 * a * a)).exp(),
            KernelKind::Identity => f64::NAN,
        }
    }

    /// 1D derivative `d/dr value(r)`, with the convention `grad(0) = 0`.
    pub fn grad(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match self.kind {
            KernelKind::HelmholtzPeriodic => {
                let s = self.reduce(r);
                if s == 0.0 {
                    0.0
                } else {
                    self.profile_derivative(r)
                }
            }
            _ => r.signum() * self.profile_derivative(r.abs()),
        }
    }

    /// Radial value `G(|x|)` for an n-dimensional separation.
    pub fn radial_value(&self, x: &[f64]) -> f64 {
        self.value(norm(x))
    }

    /// Gradient of `G(|x|)`; zero at the origin.
    pub fn radial_grad(&self, x: &[f64], out: &mut [f64]) {
        let r = norm(x);
        if r == 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let d = self.profile_derivative(r) / r;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = d * xi;
        }
    }

    /// Fourier symbol `int G(r) e^{-ikr} dr`.
    pub fn symbol(&self, k: f64) -> f64 {
        let a = self.alpha;
        match self.kind {
            KernelKind::HelmholtzLine | KernelKind::HelmholtzPeriodic => 1.0 / (1.0 + a * a * k * k),
            KernelKind::Gaussian => a * (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * a * a * k * k).exp(),
            KernelKind::Identity => 1.0,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Spectral division by `1 + alpha^2 k^2`; `alpha = 0` returns `f`.
pub fn invert_helmholtz(grid: &Grid1D, f: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_len("invert_helmholtz", grid.n, f.len())?;
    if alpha == 0.0 {
        return Ok(f.to_vec());
    }
    grid.apply_symbol(f, |j| {
        let k = grid.k(j);
        Complex64::new(1.0 / (1.0 + alpha * alpha * k * k), 0.0)
    })
}

/// Applies `1 - alpha^2 d^2/dx^2` spectrally.
pub fn apply_helmholtz(grid: &Grid1D, f: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_len("apply_helmholtz", grid.n, f.len())?;
    if alpha == 0.0 {
        return Ok(f.to_vec());
    }
    grid.apply_symbol(f, |j| {
        let k = grid.k(j);
        Complex64::new(1.0 + alpha * alpha * k * k, 0.0)
    })
}

/// Circular convolution of a grid field with a kernel through its Fourier symbol.
pub fn convolve_periodic(grid: &Grid1D, kernel: &Kernel, f: &[f64]) -> Result<Vec<f64>> {
    check_len("convolve_periodic", grid.n, f.len())?;
    if let Some(p) = kernel.period() {
        if (p - grid.l).abs() > 1e-12 * grid.l {
            return Err(Error::Validation(format!(
                "kernel period {p} does not match grid length {}",
                grid.l
            )));
        }
    }
    if kernel.kind() == KernelKind::Identity {
        return Ok(f.to_vec());
    }
    grid.apply_symbol(f, |j| Complex64::new(kernel.symbol(grid.k(j)), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn line_kernel_value_and_symmetry() {
        let k = Kernel::helmholtz_line(1.0).unwrap();
        assert_eq!(k.value(0.0), 0.5);
        for r in [0.1, 1.3, 7.0] {
            assert_eq!(k.value(r) / k.value(-r), 1.0);
        }
        assert!(Kernel::helmholtz_line(0.0).is_err());
        assert!(Kernel::helmholtz_line(-1.0).is_err());
    }

    #[test]
    fn periodic_kernel_value_at_origin_is_coth_pi_over_two() {
        let k = Kernel::helmholtz_periodic(1.0, 2.0 * PI).unwrap();
        let expect = 0.5 / PI.tanh();
        assert!((k.value(0.0) - expect).abs() < 1e-15);
        // truncated Fourier series (1/L) sum_{|k|<=1e4} 1/(1+k^2), tail ~ 1/(pi K)
        let mut sum = 1.0;
        for m in 1..=10_000 {
            sum += 2.0 / (1.0 + (m * m) as f64);
        }
        let oracle = sum / (2.0 * PI);
        assert!((k.value(0.0) - oracle).abs() < 4e-5);
        assert!((k.value(0.0) - 0.501871).abs() < 1e-6);
        for r in [0.3, 2.0, 5.5] {
            assert!((k.value(r) - k.value(r + 2.0 * PI)).abs() < 1e-14);
            assert!(k.value(r) > 0.0);
        }
    }

    #[test]
    fn periodic_kernel_approaches_line_kernel() {
        let alpha = 0.7;
        let per = Kernel::helmholtz_periodic(alpha, 40.0 * alpha).unwrap();
        let line = Kernel::helmholtz_line(alpha).unwrap();
        for r in [0.0, 0.2, 1.0, 3.0] {
            assert!((per.value(r) - line.value(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn grad_convention_and_central_differences() {
        for k in [
            Kernel::helmholtz_line(0.8).unwrap(),
            Kernel::helmholtz_periodic(0.8, 5.0).unwrap(),
            Kernel::gaussian(0.6).unwrap(),
        ] {
            assert_eq!(k.grad(0.0), 0.0);
            for r in [-1.7, -0.3, 0.25, 0.9, 2.2] {
                let h = 1e-6;
                let fd = (k.value(r + h) - k.value(r - h)) / (2.0 * h);
                assert!(
                    (k.grad(r) - fd).abs() <= 1e-6 * fd.abs().max(1e-12),
                    "{:?} r={r}: {} vs {}",
                    k.kind(),
                    k.grad(r),
                    fd
                );
            }
        }
    }

    #[test]
    fn invert_helmholtz_examples() {
        let g = Grid1D::new(2.0 * PI, 64).unwrap();
        let c = vec![3.5; 64];
        let r = invert_helmholtz(&g, &c, 1.3).unwrap();
        assert!(r.iter().all(|v| (v - 3.5).abs() < 1e-14));

        let f: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
        let r = invert_helmholtz(&g, &f, 1.0).unwrap();
        for (i, v) in r.iter().enumerate() {
            assert!((v - 0.5 * g.x(i).cos()).abs() < 1e-15);
        }
        assert_eq!(invert_helmholtz(&g, &f, 0.0).unwrap(), f);
        assert!(invert_helmholtz(&g, &f[..10], 1.0).is_err());
    }

    #[test]
    fn identity_convolution_is_identity() {
        let g = Grid1D::new(1.0, 16).unwrap();
        let f: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        assert_eq!(convolve_periodic(&g, &Kernel::identity(), &f).unwrap(), f);
    }

    #[test]
    fn mismatched_period_is_rejected() {
        let g = Grid1D::new(1.0, 16).unwrap();
        let k = Kernel::helmholtz_periodic(0.2, 2.0).unwrap();
        assert!(convolve_periodic(&g, &k, &[0.0; 16]).is_err());
    }
}
