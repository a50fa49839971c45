//! Periodic 1D solver for the compressible Lie-Poisson system
//!
//! ```text
//! m_t     = -(u m_x + 2 u_x m) - <sigma, nu_x>
//! sigma_t = -(u sigma)_x - ad*_nu sigma
//! u  = G1 * (m - sigma . A)
//! nu = gamma^-1 G2 * sigma - A u
//! ```
//!
//! CH2 is `G2 = identity`, MCH2 uses a Helmholtz `G2`. Charges are stored
//! row-major, `sigma[i * d + a]`.

use crate::error::{check_len, Error, Result};
use crate::integrate::{rk4_step, step_count};
use crate::kernels::{convolve_periodic, Kernel};
use crate::lie::LieAlgebraSpec;
use crate::spectral::Grid1D;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState1D {
    pub m: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FieldState1D {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            m: vec![0.0; n],
            sigma: vec![0.0; n * d],
        }
    }

    fn flatten(&self) -> Vec<f64> {
        let mut y = self.m.clone();
        y.extend_from_slice(&self.sigma);
        y
    }

    fn unflatten(n: usize, y: &[f64]) -> Self {
        Self {
            m: y[..n].to_vec(),
            sigma: y[n..].to_vec(),
        }
    }
}

/// Grid, metrics, structure algebra and sampled potential of a 1D run.
#[derive(Debug, Clone)]
pub struct Model1D {
    pub grid: Grid1D,
    pub kernel1: Kernel,
    pub kernel2: Kernel,
    pub spec: LieAlgebraSpec,
    /// `A` sampled on the grid, `N x d`.
    pub a: Vec<f64>,
}

/// Snapshot sequence of a 1D run.
#[derive(Debug, Clone)]
pub struct Trajectory1D {
    pub times: Vec<f64>,
    pub states: Vec<FieldState1D>,
}

pub(crate) fn column(f: &[f64], d: usize, b: usize) -> Vec<f64> {
    f.iter().skip(b).step_by(d).copied().collect()
}

fn set_column(f: &mut [f64], d: usize, b: usize, col: &[f64]) {
    for (i, v) in col.iter().enumerate() {
        f[i * d + b] = *v;
    }
}

impl Model1D {
    pub fn new(grid: Grid1D, kernel1: Kernel, kernel2: Kernel, spec: LieAlgebraSpec, a: Vec<f64>) -> Result<Self> {
        check_len("potential samples", grid.n * spec.dim(), a.len())?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite potential samples".into()));
        }
        for k in [&kernel1, &kernel2] {
            if let Some(p) = k.period() {
                if (p - grid.l).abs() > 1e-12 * grid.l {
                    return Err(Error::IncompatibleGrid(format!("kernel period {p} vs grid length {}", grid.l)));
                }
            }
        }
        Ok(Self {
            grid,
            kernel1,
            kernel2,
            spec,
            a,
        })
    }

    /// Helmholtz metrics with length scales `alpha1`, `alpha2` (0 selects the identity) and no potential.
    pub fn helmholtz(grid: Grid1D, alpha1: f64, alpha2: f64, spec: LieAlgebraSpec) -> Result<Self> {
        let a = vec![0.0; grid.n * spec.dim()];
        Self::new(
            grid,
            Kernel::helmholtz_or_identity(alpha1)?,
            Kernel::helmholtz_or_identity(alpha2)?,
            spec,
            a,
        )
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn check(&self, s: &FieldState1D) -> Result<()> {
        check_len("field m", self.grid.n, s.m.len())?;
        check_len("field sigma", self.grid.n * self.dim(), s.sigma.len())
    }

    /// `sigma . A` pointwise.
    fn sigma_dot_a(&self, sigma: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..self.grid.n)
            .map(|i| (0..d).map(|b| sigma[i * d + b] * self.a[i * d + b]).sum())
            .collect()
    }

    /// `gamma^-1 (G2 * sigma)`, i.e. `nu + A u`.
    fn raised_potential(&self, sigma: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let n = self.grid.n;
        let mut g2s = vec![0.0; n * d];
        for b in 0..d {
            let c = convolve_periodic(&self.grid, &self.kernel2, &column(sigma, d, b))?;
            set_column(&mut g2s, d, b, &c);
        }
        let mut out = vec![0.0; n * d];
        for i in 0..n {
            self.spec.raise_into(&g2s[i * d..(i + 1) * d], &mut out[i * d..(i + 1) * d]);
        }
        Ok(out)
    }

    /// `(u, nu)` with `nu` laid out `N x d`.
    pub fn velocities(&self, s: &FieldState1D) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(s)?;
        let d = self.dim();
        let sa = self.sigma_dot_a(&s.sigma);
        let shifted: Vec<f64> = s.m.iter().zip(&sa).map(|(m, x)| m - x).collect();
        let u = convolve_periodic(&self.grid, &self.kernel1, &shifted)?;
        let mut nu = self.raised_potential(&s.sigma)?;
        for i in 0..self.grid.n {
            for b in 0..d {
                nu[i * d + b] -= self.a[i * d + b] * u[i];
            }
        }
        Ok((u, nu))
    }

    fn dealias_state(&self, mut ds: FieldState1D) -> Result<FieldState1D> {
        let d = self.dim();
        ds.m = self.grid.dealias(&ds.m)?;
        for b in 0..d {
            let c = self.grid.dealias(&column(&ds.sigma, d, b))?;
            set_column(&mut ds.sigma, d, b, &c);
        }
        Ok(ds)
    }

    /// `-(u sigma)_x - ad*_xi sigma` for a given `xi` field.
    fn sigma_tendency(&self, u: &[f64], sigma: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let n = self.grid.n;
        let mut out = vec![0.0; n * d];
        for b in 0..d {
            let flux: Vec<f64> = (0..n).map(|i| u[i] * sigma[i * d + b]).collect();
            let fx = self.grid.dx_field(&flux)?;
            set_column(&mut out, d, b, &fx.iter().map(|v| -v).collect::<Vec<_>>());
        }
        if !self.spec.is_abelian() {
            let mut tmp = vec![0.0; d];
            for i in 0..n {
                self.spec
                    .ad_star_into(&xi[i * d..(i + 1) * d], &sigma[i * d..(i + 1) * d], &mut tmp);
                for b in 0..d {
                    out[i * d + b] -= tmp[b];
                }
            }
        }
        Ok(out)
    }

    fn x_derivative_columns(&self, f: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let mut out = vec![0.0; f.len()];
        for b in 0..d {
            set_column(&mut out, d, b, &self.grid.dx_field(&column(f, d, b))?);
        }
        Ok(out)
    }

    /// Tendency without the final 2/3 filter.
    pub fn rhs_raw(&self, s: &FieldState1D) -> Result<FieldState1D> {
        let (u, nu) = self.velocities(s)?;
        let d = self.dim();
        let n = self.grid.n;
        let ux = self.grid.dx_field(&u)?;
        let mx = self.grid.dx_field(&s.m)?;
        let nux = self.x_derivative_columns(&nu)?;
        let mut dm = vec![0.0; n];
        for i in 0..n {
            let force: f64 = (0..d).map(|b| s.sigma[i * d + b] * nux[i * d + b]).sum();
            dm[i] = -(u[i] * mx[i] + 2.0 * ux[i] * s.m[i]) - force;
        }
        let dsigma = self.sigma_tendency(&u, &s.sigma, &nu)?;
        Ok(FieldState1D { m: dm, sigma: dsigma })
    }

    /// Dealiased tendency `(m_t, sigma_t)`.
    pub fn rhs(&self, s: &FieldState1D) -> Result<FieldState1D> {
        let raw = self.rhs_raw(s)?;
        self.dealias_state(raw)
    }

    /// The same evolution written for `M = m - sigma . A` and `omega = nu + A u`:
    ///
    /// ```text
    /// M_t     = -(u M_x + 2 u_x M) - <sigma, omega_x + [A, omega]>
    /// sigma_t = -(u sigma)_x - ad*_{omega - A u} sigma
    /// ```
    ///
    /// mapped back through `m_t = M_t + sigma_t . A`.
    pub fn rhs_curvature(&self, s: &FieldState1D) -> Result<FieldState1D> {
        self.check(s)?;
        let d = self.dim();
        let n = self.grid.n;
        let sa = self.sigma_dot_a(&s.sigma);
        let big_m: Vec<f64> = s.m.iter().zip(&sa).map(|(m, x)| m - x).collect();
        let u = convolve_periodic(&self.grid, &self.kernel1, &big_m)?;
        let omega = self.raised_potential(&s.sigma)?;
        let ux = self.grid.dx_field(&u)?;
        let bmx = self.grid.dx_field(&big_m)?;
        let omx = self.x_derivative_columns(&omega)?;
        let mut br = vec![0.0; d];
        let mut dbig = vec![0.0; n];
        for i in 0..n {
            let (ai, oi) = (&self.a[i * d..(i + 1) * d], &omega[i * d..(i + 1) * d]);
            self.spec.bracket_into(ai, oi, &mut br);
            let force: f64 = (0..d).map(|b| s.sigma[i * d + b] * (omx[i * d + b] + br[b])).sum();
            dbig[i] = -(u[i] * bmx[i] + 2.0 * ux[i] * big_m[i]) - force;
        }
        let mut xi = omega.clone();
        for i in 0..n {
            for b in 0..d {
                xi[i * d + b] -= self.a[i * d + b] * u[i];
            }
        }
        let dsigma = self.sigma_tendency(&u, &s.sigma, &xi)?;
        let back = self.sigma_dot_a(&dsigma);
        let dm = dbig.iter().zip(&back).map(|(x, y)| x + y).collect();
        self.dealias_state(FieldState1D { m: dm, sigma: dsigma })
    }

    /// `h = 1/2 <m - sigma.A, u> + 1/2 <sigma, gamma^-1 G2 * sigma>` with `dx * sum` quadrature.
    pub fn hamiltonian(&self, s: &FieldState1D) -> Result<f64> {
        self.check(s)?;
        let sa = self.sigma_dot_a(&s.sigma);
        let shifted: Vec<f64> = s.m.iter().zip(&sa).map(|(m, x)| m - x).collect();
        let u = convolve_periodic(&self.grid, &self.kernel1, &shifted)?;
        let om = self.raised_potential(&s.sigma)?;
        let k1: f64 = shifted.iter().zip(&u).map(|(a, b)| a * b).sum();
        let k2: f64 = s.sigma.iter().zip(&om).map(|(a, b)| a * b).sum();
        Ok(0.5 * self.grid.dx() * (k1 + k2))
    }

    /// `int sigma_b dx` per component.
    pub fn total_charge(&self, s: &FieldState1D) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|b| self.grid.integrate(&column(&s.sigma, d, b))).collect()
    }

    /// Largest stable step `0.5 dx / max|u|` (infinite at rest).
    pub fn cfl_limit(&self, s: &FieldState1D) -> Result<f64> {
        let (u, _) = self.velocities(s)?;
        let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(if umax == 0.0 { f64::INFINITY } else { 0.5 * self.grid.dx() / umax })
    }

    pub fn step_rk4(&self, s: &FieldState1D, t: f64, dt: f64) -> Result<FieldState1D> {
        let limit = self.cfl_limit(s)?;
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        let n = self.grid.n;
        let y = rk4_step(&s.flatten(), t, dt, |v| Ok(self.rhs(&FieldState1D::unflatten(n, v))?.flatten()))?;
        Ok(FieldState1D::unflatten(n, &y))
    }

    pub fn run(&self, s: &FieldState1D, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory1D> {
        self.check(s)?;
        let steps = step_count(dt, t_end)?;
        let stride = stride.max(1);
        let mut out = Trajectory1D {
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
}

/// Periodic Gaussian of width `width` centred at `x0`, normalized so that
/// `dx * sum = 1` on the grid.
pub fn mollified_delta(grid: &Grid1D, x0: f64, width: f64) -> Vec<f64> {
    let l = grid.l;
    let mut f: Vec<f64> = (0..grid.n)
        .map(|i| {
            let mut s = (grid.x(i) - x0).rem_euclid(l);
            if s > 0.5 * l {
                s -= l;
            }
            (-s * s / (2.0 * width * width)).exp()
        })
        .collect();
    let mass = grid.integrate(&f);
    f.iter_mut().for_each(|v| *v /= mass);
    f
}

/// Lagrangian labels `a` carried to `eta(a, t)`, with Jacobian `J = d eta / da`
/// and reference density `rho0`, so that `rho(eta) J = rho0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMap1D {
    pub eta: Vec<f64>,
    pub jac: Vec<f64>,
    pub rho0: Vec<f64>,
}

impl FlowMap1D {
    /// Identity map with unit reference density.
    pub fn identity(grid: &Grid1D) -> Self {
        Self {
            eta: grid.points(),
            jac: vec![1.0; grid.n],
            rho0: vec![1.0; grid.n],
        }
    }

    /// Identity map with `rho0` equal to the charge density (abelian, single component).
    pub fn with_density(grid: &Grid1D, rho0: Vec<f64>) -> Result<Self> {
        check_len("reference density", grid.n, rho0.len())?;
        if rho0.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Validation("reference density must be positive".into()));
        }
        Ok(Self {
            eta: grid.points(),
            jac: vec![1.0; grid.n],
            rho0,
        })
    }

    /// Advected density `rho(eta(a)) = rho0(a) / J(a)` at the labels.
    pub fn rho(&self) -> Vec<f64> {
        self.rho0.iter().zip(&self.jac).map(|(r, j)| r / j).collect()
    }

    fn check_monotone(&self, time: f64) -> Result<()> {
        if self.jac.iter().any(|&j| !(j > 0.0)) {
            return Err(Error::FlowMapDegenerate { time });
        }
        Ok(())
    }
}

/// One Kelvin-Noether sample: circulation `I`, its centred time derivative
/// and the predicted source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinSample {
    pub t: f64,
    pub circulation: f64,
    pub d_circulation: f64,
    pub source: f64,
}

impl KelvinSample {
    pub fn residual(&self) -> f64 {
        (self.d_circulation - self.source).abs()
    }
}

impl Model1D {
    /// Co-evolves the field and a flow map with RK4; `eta' = u(eta)`,
    /// `J' = u_x(eta) J`. Returns every step.
    pub fn run_with_flow_map(
        &self,
        s: &FieldState1D,
        flow: &FlowMap1D,
        dt: f64,
        t_end: f64,
    ) -> Result<(Vec<FieldState1D>, Vec<FlowMap1D>)> {
        self.check(s)?;
        let n = self.grid.n;
        check_len("flow map labels", n, flow.eta.len())?;
        let steps = step_count(dt, t_end)?;
        let nf = s.m.len() + s.sigma.len();
        let mut states = vec![s.clone()];
        let mut flows = vec![flow.clone()];
        let mut y = s.flatten();
        y.extend_from_slice(&flow.eta);
        y.extend_from_slice(&flow.jac);
        for k in 0..steps {
            let t = k as f64 * dt;
            let limit = self.cfl_limit(states.last().unwrap())?;
            if dt > limit {
                return Err(Error::Cfl { dt, limit });
            }
            y = rk4_step(&y, t, dt, |v| {
                let st = FieldState1D::unflatten(n, &v[..nf]);
                let mut out = self.rhs(&st)?.flatten();
                let (u, _) = self.velocities(&st)?;
                let interp = self.grid.interpolant(&u)?;
                let eta = &v[nf..nf + n];
                let jac = &v[nf + n..];
                let mut deta = vec![0.0; n];
                let mut djac = vec![0.0; n];
                for i in 0..n {
                    let (ui, uxi) = interp.eval_with_dx(eta[i]);
                    deta[i] = ui;
                    djac[i] = uxi * jac[i];
                }
                out.extend(deta);
                out.extend(djac);
                Ok(out)
            })?;
            let fm = FlowMap1D {
                eta: y[nf..nf + n].to_vec(),
                jac: y[nf + n..].to_vec(),
                rho0: flow.rho0.clone(),
            };
            fm.check_monotone(t + dt)?;
            states.push(FieldState1D::unflatten(n, &y[..nf]));
            flows.push(fm);
        }
        Ok((states, flows))
    }

    /// `I = int (m / rho)(eta) J da` and `S = -int (<sigma, nu_x> / rho)(eta) J da`.
    pub fn circulation_and_source(&self, s: &FieldState1D, flow: &FlowMap1D) -> Result<(f64, f64)> {
        let (_, nu) = self.velocities(s)?;
        let d = self.dim();
        let n = self.grid.n;
        let nux = self.x_derivative_columns(&nu)?;
        let force: Vec<f64> = (0..n)
            .map(|i| (0..d).map(|b| s.sigma[i * d + b] * nux[i * d + b]).sum())
            .collect();
        let mi = self.grid.interpolant(&s.m)?;
        let fi = self.grid.interpolant(&force)?;
        let (mut circ, mut src) = (0.0, 0.0);
        for i in 0..n {
            // 1 / rho(eta) = J / rho0
            let w = flow.jac[i] * flow.jac[i] / flow.rho0[i];
            circ += mi.eval(flow.eta[i]) * w;
            src -= fi.eval(flow.eta[i]) * w;
        }
        let da = self.grid.dx();
        Ok((circ * da, src * da))
    }

    /// Centred-difference Kelvin-Noether balance on equally spaced samples.
    pub fn kelvin_noether_residual(
        &self,
        states: &[FieldState1D],
        flows: &[FlowMap1D],
        dt: f64,
    ) -> Result<Vec<KelvinSample>> {
        check_len("flow map samples", states.len(), flows.len())?;
        let mut vals = Vec::with_capacity(states.len());
        for (k, (s, f)) in states.iter().zip(flows).enumerate() {
            f.check_monotone(k as f64 * dt)?;
            vals.push(self.circulation_and_source(s, f)?);
        }
        let mut out = Vec::new();
        for k in 1..vals.len().saturating_sub(1) {
            out.push(KelvinSample {
                t: k as f64 * dt,
                circulation: vals[k].0,
                d_circulation: (vals[k + 1].0 - vals[k - 1].0) / (2.0 * dt),
                source: vals[k].1,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ch(n: usize, alpha: f64) -> Model1D {
        Model1D::helmholtz(Grid1D::new(2.0 * PI, n).unwrap(), alpha, 0.0, LieAlgebraSpec::abelian(1)).unwrap()
    }

    #[test]
    fn constant_momentum_gives_constant_velocity() {
        let m = ch(32, 1.0);
        let s = FieldState1D {
            m: vec![1.5; 32],
            sigma: vec![0.0; 32],
        };
        let (u, nu) = m.velocities(&s).unwrap();
        assert!(u.iter().all(|v| (v - 1.5).abs() < 1e-14));
        assert!(nu.iter().all(|v| v.abs() < 1e-14));
        let r = m.rhs(&s).unwrap();
        assert!(r.m.iter().chain(&r.sigma).all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn constant_charge_with_constant_potential() {
        let g = Grid1D::new(2.0 * PI, 32).unwrap();
        let (sv, av) = (0.7, 0.4);
        let m = Model1D::new(
            g,
            Kernel::helmholtz_line(1.0).unwrap(),
            Kernel::helmholtz_line(0.5).unwrap(),
            LieAlgebraSpec::abelian(1),
            vec![av; 32],
        )
        .unwrap();
        let s = FieldState1D {
            m: vec![0.0; 32],
            sigma: vec![sv; 32],
        };
        let (u, nu) = m.velocities(&s).unwrap();
        let u0 = -sv * av;
        assert!(u.iter().all(|v| (v - u0).abs() < 1e-14));
        assert!(nu.iter().all(|v| (v - (sv - av * u0)).abs() < 1e-14));
    }

    #[test]
    fn hamiltonian_of_cosine() {
        let m = ch(64, 1.0);
        let s = FieldState1D {
            m: (0..64).map(|i| m.grid.x(i).cos()).collect(),
            sigma: vec![0.0; 64],
        };
        // 1/2 int cos (cos / 2) over one period
        assert!((m.hamiltonian(&s).unwrap() - PI / 4.0).abs() < 1e-13);
        assert_eq!(m.hamiltonian(&FieldState1D::zeros(64, 1)).unwrap(), 0.0);
    }

    #[test]
    fn curvature_form_matches_without_potential() {
        let g = Grid1D::new(2.0 * PI, 64).unwrap();
        let m = Model1D::helmholtz(g, 1.0, 0.5, LieAlgebraSpec::so3()).unwrap();
        let s = FieldState1D {
            m: (0..64).map(|i| (m.grid.x(i)).sin() + 0.3).collect(),
            sigma: (0..192).map(|k| ((k / 3) as f64 * 0.1 + k as f64).cos()).collect(),
        };
        let a = m.rhs(&s).unwrap();
        let b = m.rhs_curvature(&s).unwrap();
        for (x, y) in a.m.iter().chain(&a.sigma).zip(b.m.iter().chain(&b.sigma)) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn cfl_guard_rejects_large_steps() {
        let m = ch(64, 1.0);
        let s = FieldState1D {
            m: vec![10.0; 64],
            sigma: vec![0.0; 64],
        };
        assert!(matches!(m.step_rk4(&s, 0.0, 1.0), Err(Error::Cfl { .. })));
    }

    #[test]
    fn mollified_delta_has_unit_mass() {
        let g = Grid1D::new(10.0, 128).unwrap();
        let f = mollified_delta(&g, 9.9, 3.0 * g.dx());
        assert!((g.integrate(&f) - 1.0).abs() < 1e-14);
        assert!(f[127] > f[100]);
    }

    #[test]
    fn uncharged_circulation_source_vanishes() {
        let m = ch(64, 1.0);
        let s = FieldState1D {
            m: (0..64).map(|i| 1.0 + 0.2 * m.grid.x(i).sin()).collect(),
            sigma: vec![0.0; 64],
        };
        let (states, flows) = m.run_with_flow_map(&s, &FlowMap1D::identity(&m.grid), 1e-2, 0.2).unwrap();
        let ks = m.kelvin_noether_residual(&states, &flows, 1e-2).unwrap();
        assert!(ks.iter().all(|k| k.source == 0.0));
        let i0 = ks[0].circulation;
        assert!(ks.iter().all(|k| (k.circulation - i0).abs() < 1e-6 * i0.abs()));
    }
}
