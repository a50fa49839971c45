//! Uniform periodic grids with cached FFT plans.
//!
//! 2D fields are stored row-major with the x index outermost:
//! `f[i * ny + j] = f(x_i, y_j)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};

/// Signed integer wavenumber index for position `j` of an `n`-point FFT.
#[inline]
pub fn mode_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// 2/3-rule mask: keeps modes with `3|m| < n`.
#[inline]
pub fn dealias_keep(j: usize, n: usize) -> bool {
    3 * mode_index(j, n).unsigned_abs() < n as u64
}

#[derive(Clone)]
struct Plan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            fwd: p.plan_fft_forward(n),
            inv: p.plan_fft_inverse(n),
        }
    }
}

/// Periodic grid on `[0, L)` with `N` points.
#[derive(Clone)]
pub struct Grid1D {
    pub l: f64,
    pub n: usize,
    plan: Plan,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D").field("l", &self.l).field("n", &self.n).finish()
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.l == other.l && self.n == other.n
    }
}

impl Grid1D {
    /// `n` must be a power of two, at least 8.
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Validation(format!("grid length must be positive, got {l}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Self {
            l,
            n,
            plan: Plan::new(n),
        })
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumber of FFT slot `j`.
    pub fn k(&self, j: usize) -> f64 {
        2.0 * PI / self.l * mode_index(j, self.n) as f64
    }

    /// Wavenumber for odd-order derivatives: the Nyquist slot is zeroed.
    fn k_odd(&self, j: usize) -> f64 {
        if j == self.n / 2 {
            0.0
        } else {
            self.k(j)
        }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.plan.fwd.process(&mut buf);
        buf
    }

    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.plan.inv.process(&mut spec);
        let s = 1.0 / self.n as f64;
        spec.iter().map(|c| c.re * s).collect()
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        check_len("grid field", self.n, f.len())
    }

    /// Multiplies the spectrum by `symbol(j)`.
    pub fn apply_symbol(&self, f: &[f64], symbol: impl Fn(usize) -> Complex64) -> Result<Vec<f64>> {
        self.check(f)?;
        let mut s = self.forward(f);
        for (j, c) in s.iter_mut().enumerate() {
            *c *= symbol(j);
        }
        Ok(self.inverse(s))
    }

    /// Spectral first derivative.
    pub fn dx_field(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_symbol(f, |j| Complex64::new(0.0, self.k_odd(j)))
    }

    /// Zeroes modes outside the 2/3 band.
    pub fn dealias(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        self.apply_symbol(f, |j| {
            if dealias_keep(j, n) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Grid quadrature `dx * sum f`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.dx() * f.iter().sum::<f64>()
    }

    /// Fourier coefficients scaled for trigonometric interpolation.
    pub fn interpolant(&self, f: &[f64]) -> Result<Interpolant1D> {
        self.check(f)?;
        let s = self.forward(f);
        let n = self.n;
        let scale = 1.0 / n as f64;
        // keep modes 0..n/2 with conjugate symmetry folded in
        let mut coeffs = Vec::with_capacity(n / 2 + 1);
        for (j, c) in s.iter().take(n / 2 + 1).enumerate() {
            let w = if j == 0 || j == n / 2 { 1.0 } else { 2.0 };
            coeffs.push(*c * (w * scale));
        }
        Ok(Interpolant1D {
            coeffs,
            k0: 2.0 * PI / self.l,
        })
    }
}

/// Band-limited trigonometric interpolant of a periodic grid field.
#[derive(Debug, Clone)]
pub struct Interpolant1D {
    coeffs: Vec<Complex64>,
    k0: f64,
}

impl Interpolant1D {
    pub fn eval(&self, x: f64) -> f64 {
        let step = Complex64::from_polar(1.0, self.k0 * x);
        let mut rot = Complex64::new(1.0, 0.0);
        let mut s = 0.0;
        let last = self.coeffs.len() - 1;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j == last {
                // Nyquist term: real cosine only
                s += c.re * rot.re;
            } else {
                s += (c * rot).re;
            }
            rot *= step;
        }
        s
    }

    /// Value and derivative in one pass.
    pub fn eval_with_dx(&self, x: f64) -> (f64, f64) {
        let step = Complex64::from_polar(1.0, self.k0 * x);
        let mut rot = Complex64::new(1.0, 0.0);
        let (mut v, mut d) = (0.0, 0.0);
        let last = self.coeffs.len() - 1;
        for (j, c) in self.coeffs.iter().enumerate() {
            let t = c * rot;
            if j == last {
                v += c.re * rot.re;
            } else {
                v += t.re;
                // Re(i k t) = -k Im(t)
                d -= self.k0 * j as f64 * t.im;
            }
            rot *= step;
        }
        (v, d)
    }

    /// Derivative of the interpolant (Nyquist term dropped).
    pub fn eval_dx(&self, x: f64) -> f64 {
        let step = Complex64::from_polar(1.0, self.k0 * x);
        let mut rot = Complex64::new(1.0, 0.0);
        let mut s = 0.0;
        let last = self.coeffs.len() - 1;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j != 0 && j != last {
                let k = self.k0 * j as f64;
                s += (c * rot * Complex64::new(0.0, k)).re;
            }
            rot *= step;
        }
        s
    }
}

/// Doubly periodic grid on `[0, Lx) x [0, Ly)`.
#[derive(Clone)]
pub struct Grid2D {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    px: Plan,
    py: Plan,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, o: &Self) -> bool {
        self.lx == o.lx && self.ly == o.ly && self.nx == o.nx && self.ny == o.ny
    }
}

/// Complex spectrum of a 2D field, same layout as the physical field.
pub type Spectrum2D = Vec<Complex64>;

impl Grid2D {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        for (l, n) in [(lx, nx), (ly, ny)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Validation(format!("domain length must be positive, got {l}")));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Validation(format!(
                    "grid size must be a power of two >= 8, got {n}"
                )));
            }
        }
        Ok(Self {
            lx,
            ly,
            nx,
            ny,
            px: Plan::new(nx),
            py: Plan::new(ny),
        })
    }

    /// `[0, 2 pi)^2` with `n x n` points.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(2.0 * PI, 2.0 * PI, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn kx(&self, i: usize) -> f64 {
        2.0 * PI / self.lx * mode_index(i, self.nx) as f64
    }
    pub fn ky(&self, j: usize) -> f64 {
        2.0 * PI / self.ly * mode_index(j, self.ny) as f64
    }
    fn kx_odd(&self, i: usize) -> f64 {
        if i == self.nx / 2 {
            0.0
        } else {
            self.kx(i)
        }
    }
    fn ky_odd(&self, j: usize) -> f64 {
        if j == self.ny / 2 {
            0.0
        } else {
            self.ky(j)
        }
    }

    /// `|k|^2` at slot `(i, j)`.
    pub fn k2(&self, i: usize, j: usize) -> f64 {
        let a = self.kx(i);
        let b = self.ky(j);
        a * a + b * b
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for i in 0..self.nx {
            for j in 0..self.ny {
                out[self.idx(i, j)] = f(self.x(i), self.y(j));
            }
        }
        out
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        check_len("2D grid field", self.len(), f.len())
    }

    pub fn forward(&self, f: &[f64]) -> Spectrum2D {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        buf
    }

    pub fn inverse(&self, mut s: Spectrum2D) -> Vec<f64> {
        self.transform(&mut s, false);
        let scale = 1.0 / self.len() as f64;
        s.iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let (py, px) = if forward {
            (&self.py.fwd, &self.px.fwd)
        } else {
            (&self.py.inv, &self.px.inv)
        };
        // rows along y are contiguous
        py.process(buf);
        let mut col = vec![Complex64::new(0.0, 0.0); self.nx];
        for j in 0..self.ny {
            for i in 0..self.nx {
                col[i] = buf[i * self.ny + j];
            }
            px.process(&mut col);
            for i in 0..self.nx {
                buf[i * self.ny + j] = col[i];
            }
        }
    }

    pub fn apply_symbol(&self, f: &[f64], symbol: impl Fn(usize, usize) -> Complex64) -> Result<Vec<f64>> {
        self.check(f)?;
        let mut s = self.forward(f);
        self.scale_spectrum(&mut s, symbol);
        Ok(self.inverse(s))
    }

    pub fn scale_spectrum(&self, s: &mut [Complex64], symbol: impl Fn(usize, usize) -> Complex64) {
        for i in 0..self.nx {
            for j in 0..self.ny {
                s[i * self.ny + j] *= symbol(i, j);
            }
        }
    }

    /// `(d/dx f, d/dy f)` from one forward transform.
    pub fn gradient(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(f)?;
        let s = self.forward(f);
        Ok(self.gradient_of_spectrum(&s))
    }

    pub fn gradient_of_spectrum(&self, s: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut sx = s.to_vec();
        let mut sy = s.to_vec();
        self.scale_spectrum(&mut sx, |i, _| Complex64::new(0.0, self.kx_odd(i)));
        self.scale_spectrum(&mut sy, |_, j| Complex64::new(0.0, self.ky_odd(j)));
        (self.inverse(sx), self.inverse(sy))
    }

    pub fn dx_field(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_symbol(f, |i, _| Complex64::new(0.0, self.kx_odd(i)))
    }

    pub fn dy_field(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_symbol(f, |_, j| Complex64::new(0.0, self.ky_odd(j)))
    }

    pub fn keep(&self, i: usize, j: usize) -> bool {
        dealias_keep(i, self.nx) && dealias_keep(j, self.ny)
    }

    pub fn dealias(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_symbol(f, |i, j| {
            if self.keep(i, j) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Solves `(-Delta) psi = f` with the zero mode set to zero.
    pub fn inverse_laplacian(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_symbol(f, |i, j| {
            let k2 = self.k2(i, j);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / k2, 0.0)
            }
        })
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.cell_area() * f.iter().sum::<f64>()
    }

    pub fn mean(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / f.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(1.0, 6).is_err());
        assert!(Grid1D::new(1.0, 4).is_err());
        assert!(Grid1D::new(-1.0, 16).is_err());
        assert!(Grid1D::new(1.0, 16).is_ok());
        assert!(Grid2D::new(1.0, 1.0, 16, 12).is_err());
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let g = Grid1D::new(2.0 * PI, 64).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin()).collect();
        let d = g.dx_field(&f).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((v - 3.0 * (3.0 * g.x(i)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_reproduces_band_limited_function() {
        let g = Grid1D::new(3.0, 32).unwrap();
        let f = |x: f64| 1.0 + (2.0 * PI * x / 3.0).cos() - 0.4 * (2.0 * PI * 5.0 * x / 3.0).sin();
        let df = |x: f64| {
            -(2.0 * PI / 3.0) * (2.0 * PI * x / 3.0).sin()
                - 0.4 * (2.0 * PI * 5.0 / 3.0) * (2.0 * PI * 5.0 * x / 3.0).cos()
        };
        let samples: Vec<f64> = g.points().iter().map(|&x| f(x)).collect();
        let it = g.interpolant(&samples).unwrap();
        for x in [0.1, 0.77, 1.5, 2.93] {
            assert!((it.eval(x) - f(x)).abs() < 1e-12);
            assert!((it.eval_dx(x) - df(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn laplacian_inverse_and_gradient_2d() {
        let g = Grid2D::new(2.0 * PI, 4.0 * PI, 32, 64).unwrap();
        let f = g.sample(|x, y| (2.0 * x).cos() * (0.5 * y).sin());
        let psi = g.inverse_laplacian(&f).unwrap();
        let (px, py) = g.gradient(&psi).unwrap();
        let k2 = 4.0 + 0.25;
        for i in 0..g.nx {
            for j in 0..g.ny {
                let (x, y) = (g.x(i), g.y(j));
                let id = g.idx(i, j);
                assert!((psi[id] - f[id] / k2).abs() < 1e-13);
                assert!((px[id] + 2.0 * (2.0 * x).sin() * (0.5 * y).sin() / k2).abs() < 1e-12);
                assert!((py[id] - 0.5 * (2.0 * x).cos() * (0.5 * y).cos() / k2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dealias_mask_bounds() {
        assert!(dealias_keep(42, 128));
        assert!(!dealias_keep(43, 128));
        assert!(dealias_keep(128 - 42, 128));
        assert!(!dealias_keep(64, 128));
    }
}
