//! Pseudospectral solver for the incompressible charged fluid on the flat torus
//!
//! ```text
//! varpi_t = -{varpi, psi} - sum_i {sigma_i, nu_i}
//! sigma_t = -{sigma, psi} - ad*_nu sigma
//! ```
//!
//! with `varpi = -Delta psi`, `u = (psi_y, -psi_x)`, `{f, g} = f_x g_y - f_y g_x`
//! and `sigma = gamma (-Delta) nu` for the default Lagrangian
//! `l = 1/2 int |grad psi|^2 + |grad nu|^2`. All quadratic terms are evaluated
//! on 2/3-truncated spectra and truncated again, so the semi-discrete system
//! is a Galerkin truncation that keeps energy and the quadratic Casimirs.
//!
//! Fields live in the zero-mean (and zero-harmonic) sector; charges are
//! stored `sigma[p * d + a]` with `p` the flat grid index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::integrate::{rk4_step, step_count};
use crate::lie::LieAlgebraSpec;
use crate::spectral::{Grid2D, Spectrum2D};

/// Relative tolerance for the zero-mean gauge.
pub const MEAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState2D {
    pub varpi: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FieldState2D {
    pub fn zeros(len: usize, d: usize) -> Self {
        Self {
            varpi: vec![0.0; len],
            sigma: vec![0.0; len * d],
        }
    }

    fn flatten(&self) -> Vec<f64> {
        let mut y = self.varpi.clone();
        y.extend_from_slice(&self.sigma);
        y
    }

    fn unflatten(len: usize, y: &[f64]) -> Self {
        Self {
            varpi: y[..len].to_vec(),
            sigma: y[len..].to_vec(),
        }
    }
}

/// Length scales of the Lagrangian `1/2 int psi (-Delta)(1 - a^2 Delta) psi + ...`;
/// zero gives the low-beta reduced-MHD family.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lagrangian2D {
    pub alpha_psi: f64,
    pub alpha_nu: f64,
}

#[derive(Debug, Clone)]
pub struct Model2D {
    pub grid: Grid2D,
    pub spec: LieAlgebraSpec,
    pub lagrangian: Lagrangian2D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Casimirs {
    pub total_vorticity: f64,
    pub total_charge: Vec<f64>,
    /// `int sigma_i^2` per component.
    pub charge_squares: Vec<f64>,
    /// `int <sigma, gamma^-1 sigma>`.
    pub charge_norm: f64,
    /// `1/2 int varpi^2`.
    pub enstrophy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory2D {
    pub times: Vec<f64>,
    pub states: Vec<FieldState2D>,
}

/// Closed polyline of Lagrangian markers; the last marker connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLoop {
    pub markers: Vec<[f64; 2]>,
}

pub const MIN_MARKERS: usize = 32;

impl MaterialLoop {
    pub fn new(markers: Vec<[f64; 2]>) -> Result<Self> {
        if markers.len() < MIN_MARKERS {
            return Err(Error::DegenerateLoop(format!(
                "{} markers, need at least {MIN_MARKERS}",
                markers.len()
            )));
        }
        let lp = Self { markers };
        if !(lp.length() > 0.0) || lp.markers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateLoop("loop has zero length".into()));
        }
        Ok(lp)
    }

    pub fn circle(center: [f64; 2], radius: f64, count: usize) -> Result<Self> {
        let m = (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        Self::new(m)
    }

    /// Counter-clockwise rectangle `[x0, x1] x [y0, y1]` with `per_side` markers per edge.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, per_side: usize) -> Result<Self> {
        let mut m = Vec::with_capacity(4 * per_side);
        let n = per_side as f64;
        for k in 0..per_side {
            m.push([x0 + (x1 - x0) * k as f64 / n, y0]);
        }
        for k in 0..per_side {
            m.push([x1, y0 + (y1 - y0) * k as f64 / n]);
        }
        for k in 0..per_side {
            m.push([x1 - (x1 - x0) * k as f64 / n, y1]);
        }
        for k in 0..per_side {
            m.push([x0, y1 - (y1 - y0) * k as f64 / n]);
        }
        Self::new(m)
    }

    pub fn length(&self) -> f64 {
        let n = self.markers.len();
        (0..n)
            .map(|k| {
                let (a, b) = (self.markers[k], self.markers[(k + 1) % n]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }
}

/// Periodic bicubic Hermite interpolant built from spectral derivatives.
#[derive(Debug, Clone)]
pub struct Bicubic {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    f: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

fn hermite(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    ]
}

impl Bicubic {
    pub fn new(grid: &Grid2D, f: &[f64]) -> Result<Self> {
        check_len("bicubic samples", grid.len(), f.len())?;
        let s = grid.forward(f);
        let (fx, fy) = grid.gradient_of_spectrum(&s);
        let fxy = grid.dy_field(&fx)?;
        Ok(Self {
            nx: grid.nx,
            ny: grid.ny,
            dx: grid.dx(),
            dy: grid.dy(),
            f: f.to_vec(),
            fx,
            fy,
            fxy,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let gx = x / self.dx;
        let gy = y / self.dy;
        let (fi, fj) = (gx.floor(), gy.floor());
        let (t, s) = (gx - fi, gy - fj);
        let i0 = (fi as i64).rem_euclid(self.nx as i64) as usize;
        let j0 = (fj as i64).rem_euclid(self.ny as i64) as usize;
        let i1 = (i0 + 1) % self.nx;
        let j1 = (j0 + 1) % self.ny;
        let hx = hermite(t);
        let hy = hermite(s);
        let mut v = 0.0;
        for (ci, wi, wdi) in [(i0, hx[0], hx[1]), (i1, hx[2], hx[3])] {
            for (cj, wj, wdj) in [(j0, hy[0], hy[1]), (j1, hy[2], hy[3])] {
                let p = ci * self.ny + cj;
                v += wi * wj * self.f[p]
                    + wdi * self.dx * wj * self.fx[p]
                    + wi * wdj * self.dy * self.fy[p]
                    + wdi * wdj * self.dx * self.dy * self.fxy[p];
            }
        }
        v
    }
}

/// Zero-mean field with random Fourier modes `1 <= |k|_inf <= kmax`, amplitudes
/// decaying like `1 / (1 + |k|^2)`, scaled to unit maximum magnitude.
pub fn random_band_limited(grid: &Grid2D, kmax: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k0x = 2.0 * std::f64::consts::PI / grid.lx;
    let k0y = 2.0 * std::f64::consts::PI / grid.ly;
    let km = kmax as i64;
    let mut modes = Vec::new();
    for a in 0..=km {
        for b in -km..=km {
            if a == 0 && b <= 0 {
                continue;
            }
            let amp = 1.0 / (1.0 + (a * a + b * b) as f64);
            let c: f64 = rng.gen_range(-1.0..1.0);
            let s: f64 = rng.gen_range(-1.0..1.0);
            modes.push((a as f64 * k0x, b as f64 * k0y, amp * c, amp * s));
        }
    }
    let mut f = grid.sample(|x, y| {
        modes
            .iter()
            .map(|&(kx, ky, c, s)| {
                let ph = kx * x + ky * y;
                c * ph.cos() + s * ph.sin()
            })
            .sum()
    });
    let m = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        f.iter_mut().for_each(|v| *v /= m);
    }
    f
}

/// Projects onto the dealiased band and removes the mean.
pub fn band_project(grid: &Grid2D, f: &[f64]) -> Result<Vec<f64>> {
    grid.apply_symbol(f, |i, j| {
        if (i == 0 && j == 0) || !grid.keep(i, j) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Two smooth shear layers with a small transverse perturbation.
pub fn preset_shear(grid: &Grid2D) -> Result<Vec<f64>> {
    let (ky, kx) = (2.0 * std::f64::consts::PI / grid.ly, 2.0 * std::f64::consts::PI / grid.lx);
    let f = grid.sample(|x, y| (ky * y).cos() + 0.5 * (2.0 * ky * y).cos() + 0.1 * (kx * x).sin());
    band_project(grid, &f)
}

/// Counter-rotating Gaussian vortex pair.
pub fn preset_dipole(grid: &Grid2D) -> Result<Vec<f64>> {
    let (cx, cy) = (0.5 * grid.lx, 0.5 * grid.ly);
    let w = 0.08 * grid.lx.min(grid.ly);
    let sep = 1.5 * w;
    let f = grid.sample(|x, y| {
        let g = |x0: f64| (-((x - x0).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp();
        g(cx - sep) - g(cx + sep)
    });
    band_project(grid, &f)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Model2D {
    pub fn new(grid: Grid2D, spec: LieAlgebraSpec, lagrangian: Lagrangian2D) -> Result<Self> {
        for a in [lagrangian.alpha_psi, lagrangian.alpha_nu] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::Validation(format!("Lagrangian length scale must be >= 0, got {a}")));
            }
        }
        Ok(Self { grid, spec, lagrangian })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn check(&self, s: &FieldState2D) -> Result<()> {
        check_len("field varpi", self.grid.len(), s.varpi.len())?;
        check_len("field sigma", self.grid.len() * self.dim(), s.sigma.len())
    }

    fn check_mean(&self, f: &[f64]) -> Result<()> {
        let scale = f.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let mean = self.grid.mean(f);
        if mean.abs() > MEAN_TOL * scale {
            return Err(Error::NonzeroMean(mean));
        }
        Ok(())
    }

    /// Validates shapes and the zero-mean gauge of every field.
    pub fn validate_state(&self, s: &FieldState2D) -> Result<()> {
        self.check(s)?;
        self.check_mean(&s.varpi)?;
        let d = self.dim();
        for b in 0..d {
            self.check_mean(&crate::epaut1d::column(&s.sigma, d, b))?;
        }
        Ok(())
    }

    fn inverse_symbol(&self, alpha: f64, i: usize, j: usize) -> f64 {
        let k2 = self.grid.k2(i, j);
        if k2 == 0.0 {
            0.0
        } else {
            1.0 / (k2 * (1.0 + alpha * alpha * k2))
        }
    }

    /// `psi = L^-1 varpi` with the zero mode removed.
    pub fn stream(&self, varpi: &[f64]) -> Result<Vec<f64>> {
        check_len("field varpi", self.grid.len(), varpi.len())?;
        self.check_mean(varpi)?;
        let a = self.lagrangian.alpha_psi;
        self.grid
            .apply_symbol(varpi, |i, j| Complex64::new(self.inverse_symbol(a, i, j), 0.0))
    }

    /// `u = (psi_y, -psi_x)`.
    pub fn velocity(&self, psi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (px, py) = self.grid.gradient(psi)?;
        Ok((py, px.into_iter().map(|v| -v).collect()))
    }

    /// `nu = gamma^-1 L^-1 sigma`, `N x d`.
    pub fn charge_potential(&self, sigma: &[f64]) -> Result<Vec<f64>> {
        check_len("field sigma", self.grid.len() * self.dim(), sigma.len())?;
        let d = self.dim();
        let a = self.lagrangian.alpha_nu;
        let mut inv = Vec::with_capacity(d);
        for b in 0..d {
            let col = crate::epaut1d::column(sigma, d, b);
            inv.push(self.grid.apply_symbol(&col, |i, j| Complex64::new(self.inverse_symbol(a, i, j), 0.0))?);
        }
        let mut out = vec![0.0; sigma.len()];
        let mut tmp = vec![0.0; d];
        let mut raised = vec![0.0; d];
        for p in 0..self.grid.len() {
            for b in 0..d {
                tmp[b] = inv[b][p];
            }
            self.spec.raise_into(&tmp, &mut raised);
            out[p * d..(p + 1) * d].copy_from_slice(&raised);
        }
        Ok(out)
    }

    fn truncate(&self, s: &mut [Complex64]) {
        let g = &self.grid;
        for i in 0..g.nx {
            for j in 0..g.ny {
                if !g.keep(i, j) {
                    s[g.idx(i, j)] = zero();
                }
            }
        }
    }

    fn truncated(&self, f: &[f64]) -> Spectrum2D {
        let mut s = self.grid.forward(f);
        self.truncate(&mut s);
        s
    }

    fn project(&self, f: &[f64]) -> Vec<f64> {
        let s = self.truncated(f);
        self.grid.inverse(s)
    }

    /// Dealiased `{f, g} = f_x g_y - f_y g_x`.
    pub fn poisson_bracket(&self, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        check_len("bracket operand", self.grid.len(), f.len())?;
        check_len("bracket operand", self.grid.len(), g.len())?;
        let (fx, fy) = self.grid.gradient_of_spectrum(&self.truncated(f));
        let (gx, gy) = self.grid.gradient_of_spectrum(&self.truncated(g));
        let raw: Vec<f64> = (0..f.len()).map(|p| fx[p] * gy[p] - fy[p] * gx[p]).collect();
        Ok(self.project(&raw))
    }

    pub fn rhs(&self, s: &FieldState2D) -> Result<FieldState2D> {
        self.check(s)?;
        let g = &self.grid;
        let d = self.dim();
        let len = g.len();
        let (ap, an) = (self.lagrangian.alpha_psi, self.lagrangian.alpha_nu);

        let sw = self.truncated(&s.varpi);
        let mut sp = sw.clone();
        g.scale_spectrum(&mut sp, |i, j| Complex64::new(self.inverse_symbol(ap, i, j), 0.0));
        let (wx, wy) = g.gradient_of_spectrum(&sw);
        let (px, py) = g.gradient_of_spectrum(&sp);

        let mut sig_spec = Vec::with_capacity(d);
        let mut sig_phys = Vec::with_capacity(d);
        let mut sig_grad = Vec::with_capacity(d);
        let mut inv_spec = Vec::with_capacity(d);
        for b in 0..d {
            let ss = self.truncated(&crate::epaut1d::column(&s.sigma, d, b));
            sig_grad.push(g.gradient_of_spectrum(&ss));
            sig_phys.push(g.inverse(ss.clone()));
            let mut inv = ss.clone();
            g.scale_spectrum(&mut inv, |i, j| Complex64::new(self.inverse_symbol(an, i, j), 0.0));
            inv_spec.push(inv);
            sig_spec.push(ss);
        }
        // nu_a = sum_b gamma^-1_ab L^-1 sigma_b, in spectral space
        let ginv = self.spec.gamma_inv();
        let mut nu_phys = Vec::with_capacity(d);
        let mut nu_grad = Vec::with_capacity(d);
        for a in 0..d {
            let mut acc = vec![zero(); len];
            for b in 0..d {
                let c = ginv[(a, b)];
                if c != 0.0 {
                    for (o, v) in acc.iter_mut().zip(&inv_spec[b]) {
                        *o += v * c;
                    }
                }
            }
            nu_grad.push(g.gradient_of_spectrum(&acc));
            nu_phys.push(g.inverse(acc));
        }

        let mut dw = vec![0.0; len];
        for p in 0..len {
            let mut v = -(wx[p] * py[p] - wy[p] * px[p]);
            for b in 0..d {
                let (sx, sy) = (&sig_grad[b].0, &sig_grad[b].1);
                let (nx, ny) = (&nu_grad[b].0, &nu_grad[b].1);
                v -= sx[p] * ny[p] - sy[p] * nx[p];
            }
            dw[p] = v;
        }
        let mut dsig = vec![0.0; len * d];
        let mut nu_p = vec![0.0; d];
        let mut sg_p = vec![0.0; d];
        let mut ad = vec![0.0; d];
        let abelian = self.spec.is_abelian();
        for p in 0..len {
            if !abelian {
                for b in 0..d {
                    nu_p[b] = nu_phys[b][p];
                    sg_p[b] = sig_phys[b][p];
                }
                self.spec.ad_star_into(&nu_p, &sg_p, &mut ad);
            }
            for b in 0..d {
                let (sx, sy) = (&sig_grad[b].0, &sig_grad[b].1);
                let adv = sx[p] * py[p] - sy[p] * px[p];
                dsig[p * d + b] = -adv - if abelian { 0.0 } else { ad[b] };
            }
        }
        let dw = self.project(&dw);
        let mut out = vec![0.0; len * d];
        for b in 0..d {
            let c = self.project(&crate::epaut1d::column(&dsig, d, b));
            for p in 0..len {
                out[p * d + b] = c[p];
            }
        }
        Ok(FieldState2D { varpi: dw, sigma: out })
    }

    /// `1/2 int psi varpi + 1/2 int <nu, sigma>`.
    pub fn energy(&self, s: &FieldState2D) -> Result<f64> {
        self.check(s)?;
        let psi = self.stream(&s.varpi)?;
        let nu = self.charge_potential(&s.sigma)?;
        let a: f64 = psi.iter().zip(&s.varpi).map(|(x, y)| x * y).sum();
        let b: f64 = nu.iter().zip(&s.sigma).map(|(x, y)| x * y).sum();
        Ok(0.5 * self.grid.cell_area() * (a + b))
    }

    pub fn casimirs(&self, s: &FieldState2D) -> Result<Casimirs> {
        self.check(s)?;
        let d = self.dim();
        let g = &self.grid;
        let cols: Vec<Vec<f64>> = (0..d).map(|b| crate::epaut1d::column(&s.sigma, d, b)).collect();
        let mut norm = 0.0;
        for p in 0..g.len() {
            norm += self.spec.dual_inner(&s.sigma[p * d..(p + 1) * d], &s.sigma[p * d..(p + 1) * d]);
        }
        Ok(Casimirs {
            total_vorticity: g.integrate(&s.varpi),
            total_charge: cols.iter().map(|c| g.integrate(c)).collect(),
            charge_squares: cols
                .iter()
                .map(|c| g.integrate(&c.iter().map(|v| v * v).collect::<Vec<_>>()))
                .collect(),
            charge_norm: norm * g.cell_area(),
            enstrophy: 0.5 * g.integrate(&s.varpi.iter().map(|v| v * v).collect::<Vec<_>>()),
        })
    }

    pub fn total_vorticity(&self, s: &FieldState2D) -> f64 {
        self.grid.integrate(&s.varpi)
    }

    /// `0.5 min(dx, dy) / max|u|`.
    pub fn cfl_limit(&self, s: &FieldState2D) -> Result<f64> {
        let psi = self.stream(&s.varpi)?;
        let (u1, u2) = self.velocity(&psi)?;
        let umax = u1.iter().zip(&u2).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)));
        let h = self.grid.dx().min(self.grid.dy());
        Ok(if umax == 0.0 { f64::INFINITY } else { 0.5 * h / umax })
    }

    pub fn step_rk4(&self, s: &FieldState2D, t: f64, dt: f64) -> Result<FieldState2D> {
        let limit = self.cfl_limit(s)?;
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        let len = self.grid.len();
        let y = rk4_step(&s.flatten(), t, dt, |v| Ok(self.rhs(&FieldState2D::unflatten(len, v))?.flatten()))?;
        Ok(FieldState2D::unflatten(len, &y))
    }

    pub fn run(&self, s: &FieldState2D, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory2D> {
        self.validate_state(s)?;
        let steps = step_count(dt, t_end)?;
        let stride = stride.max(1);
        let mut out = Trajectory2D {
            times: vec![0.0],
            states: vec![s.clone()],
        };
        let mut cur = s.clone();
        for k in 0..steps {
            cur = self.step_rk4(&cur, k as f64 * dt, dt)?;
            if (k + 1) % stride == 0 || k + 1 == steps {
                out.times.push((k + 1) as f64 * dt);
                out.states.push(cur.clone());
            }
        }
        Ok(out)
    }

    fn velocity_interpolants(&self, s: &FieldState2D) -> Result<(Bicubic, Bicubic)> {
        let psi = self.stream(&s.varpi)?;
        let (u1, u2) = self.velocity(&psi)?;
        Ok((Bicubic::new(&self.grid, &u1)?, Bicubic::new(&self.grid, &u2)?))
    }

    /// Trapezoid `closed-integral u . dl` along the loop.
    pub fn circulation(&self, s: &FieldState2D, lp: &MaterialLoop) -> Result<f64> {
        self.check(s)?;
        let (b1, b2) = self.velocity_interpolants(s)?;
        Ok(loop_integral(&b1, &b2, &lp.markers))
    }

    /// Advances field and markers together; returns `(t, state, loop, circulation)` every `stride` steps.
    #[allow(clippy::type_complexity)]
    pub fn run_with_loop(
        &self,
        s: &FieldState2D,
        lp: &MaterialLoop,
        dt: f64,
        t_end: f64,
        stride: usize,
    ) -> Result<Vec<(f64, FieldState2D, MaterialLoop, f64)>> {
        self.validate_state(s)?;
        let steps = step_count(dt, t_end)?;
        let stride = stride.max(1);
        let len = self.grid.len();
        let nf = s.varpi.len() + s.sigma.len();
        let nm = lp.markers.len();
        let mut y = s.flatten();
        y.extend(lp.markers.iter().flatten());
        let unpack = |y: &[f64]| -> (FieldState2D, MaterialLoop) {
            let st = FieldState2D::unflatten(len, &y[..nf]);
            let markers = (0..nm).map(|k| [y[nf + 2 * k], y[nf + 2 * k + 1]]).collect();
            (st, MaterialLoop { markers })
        };
        let mut out = vec![(0.0, s.clone(), lp.clone(), self.circulation(s, lp)?)];
        for k in 0..steps {
            let (st, _) = unpack(&y);
            let limit = self.cfl_limit(&st)?;
            if dt > limit {
                return Err(Error::Cfl { dt, limit });
            }
            y = rk4_step(&y, k as f64 * dt, dt, |v| {
                let st = FieldState2D::unflatten(len, &v[..nf]);
                let mut o = self.rhs(&st)?.flatten();
                let (b1, b2) = self.velocity_interpolants(&st)?;
                for m in 0..nm {
                    let (x, yy) = (v[nf + 2 * m], v[nf + 2 * m + 1]);
                    o.push(b1.eval(x, yy));
                    o.push(b2.eval(x, yy));
                }
                Ok(o)
            })?;
            if (k + 1) % stride == 0 || k + 1 == steps {
                let (st, l) = unpack(&y);
                let c = self.circulation(&st, &l)?;
                out.push(((k + 1) as f64 * dt, st, l, c));
            }
        }
        Ok(out)
    }
}

fn loop_integral(b1: &Bicubic, b2: &Bicubic, markers: &[[f64; 2]]) -> f64 {
    let n = markers.len();
    let vel: Vec<[f64; 2]> = markers.iter().map(|p| [b1.eval(p[0], p[1]), b2.eval(p[0], p[1])]).collect();
    (0..n)
        .map(|k| {
            let k1 = (k + 1) % n;
            let dl = [markers[k1][0] - markers[k][0], markers[k1][1] - markers[k][1]];
            0.5 * ((vel[k][0] + vel[k1][0]) * dl[0] + (vel[k][1] + vel[k1][1]) * dl[1])
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler(n: usize) -> Model2D {
        Model2D::new(Grid2D::square(n).unwrap(), LieAlgebraSpec::abelian(1), Lagrangian2D::default()).unwrap()
    }

    #[test]
    fn stream_and_velocity_of_cosine() {
        let m = euler(32);
        let w = m.grid.sample(|x, _| x.cos());
        let psi = m.stream(&w).unwrap();
        let (u1, u2) = m.velocity(&psi).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let p = m.grid.idx(i, j);
                let x = m.grid.x(i);
                assert!((psi[p] - x.cos()).abs() < 1e-14);
                assert!(u1[p].abs() < 1e-14);
                assert!((u2[p] - x.sin()).abs() < 1e-14);
            }
        }
        assert!(matches!(m.stream(&vec![1.0; 1024]), Err(Error::NonzeroMean(_))));
    }

    #[test]
    fn bracket_of_sines() {
        let m = euler(32);
        let f = m.grid.sample(|x, _| x.sin());
        let g = m.grid.sample(|_, y| y.sin());
        let b = m.poisson_bracket(&f, &g).unwrap();
        let e = m.grid.sample(|x, y| x.cos() * y.cos());
        assert!(b.iter().zip(&e).all(|(a, c)| (a - c).abs() < 1e-13));
        assert!(m.poisson_bracket(&f, &f).unwrap().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn eigenmode_is_steady_and_energy_is_pi_squared() {
        let m = euler(32);
        let w = m.grid.sample(|x, _| x.cos());
        let s = FieldState2D {
            varpi: w,
            sigma: vec![0.0; 1024],
        };
        let r = m.rhs(&s).unwrap();
        assert!(r.varpi.iter().all(|v| v.abs() < 1e-14));
        let e = m.energy(&s).unwrap();
        assert!((e - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn bicubic_reproduces_band_limited_field() {
        let g = Grid2D::square(64).unwrap();
        let f = g.sample(|x, y| (x + 2.0 * y).sin() + 0.3 * (3.0 * x).cos());
        let b = Bicubic::new(&g, &f).unwrap();
        for &(x, y) in &[(0.123_f64, 4.0_f64), (6.2, 0.05), (-1.0, 7.5)] {
            let exact = (x + 2.0 * y).sin() + 0.3 * (3.0 * x).cos();
            assert!((b.eval(x, y) - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn degenerate_loops_rejected() {
        assert!(MaterialLoop::new(vec![[0.0, 0.0]; 40]).is_err());
        assert!(MaterialLoop::circle([1.0, 1.0], 0.5, 8).is_err());
    }

    #[test]
    fn random_fields_are_seeded_and_zero_mean() {
        let g = Grid2D::square(32).unwrap();
        let a = random_band_limited(&g, 4, 7);
        assert_eq!(a, random_band_limited(&g, 4, 7));
        assert_ne!(a, random_band_limited(&g, 4, 8));
        assert!(g.mean(&a).abs() < 1e-15);
    }
}
