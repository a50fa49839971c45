//! Clebsch variables `(Q, P, sigma, theta)` on the torus and their two
//! momentum maps.
//!
//! The right leg sends a Clebsch state to the incompressible Lie-Poisson
//! variables
//!
//! ```text
//! alpha     = sum_a P_a dQ^a + <sigma, d theta theta^-1> - <sigma_bar, A_S>
//! varpi     = curl alpha
//! sigma_bar = Ad*_theta sigma
//! ```
//!
//! and the left leg pairs the state with functions `h(q, p, zeta)`. The
//! collective flow transports every field with the fluid velocity and
//! rotates `theta` by the body-frame potential:
//!
//! ```text
//! d/dt (Q, P, sigma, theta) = s (u.grad Q, u.grad P, u.grad sigma, u.grad theta + theta nu),  s = -1
//! ```
//!
//! so that `J_R` follows the direct solver. Each `Q^a` is stored as a
//! winding `c . x` plus a periodic part, which lets `Q = x` live on the torus.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::epaut2d::{FieldState2D, Model2D};
use crate::error::{check_len, Error, Result};
use crate::integrate::{rk4_step, step_count};
use crate::lie::{polar_project, LieAlgebraSpec};
use crate::potential::MagneticPotential;
use crate::spectral::{mode_index, Grid2D};

/// Sign of the collective flow relative to the infinitesimal action.
pub const CLEBSCH_SIGN: f64 = -1.0;

/// Steps between polar re-projections of `theta`.
pub const REPROJECT_EVERY: usize = 50;

/// Orthogonality defect that triggers a re-projection.
pub const REPROJECT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ClebschState {
    /// winding coefficients `c_a`, `Q^a = c_a . x + q_a`
    pub q_lin: Vec<[f64; 2]>,
    /// periodic parts `q_a`
    pub q: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    /// `len x d`
    pub sigma: Vec<f64>,
    /// `len x r x r`, row-major per node
    pub theta: Vec<f64>,
    pub w: Vec<f64>,
}

impl ClebschState {
    pub fn pairs(&self) -> usize {
        self.q.len()
    }

    /// `Q = x`, `P = p`, no charges, `theta = 1`.
    pub fn euler_seed(grid: &Grid2D, spec: &LieAlgebraSpec, p: Vec<f64>) -> Result<Self> {
        check_len("seed momentum", grid.len(), p.len())?;
        let len = grid.len();
        Ok(Self {
            q_lin: vec![[1.0, 0.0]],
            q: vec![vec![0.0; len]],
            p: vec![p],
            sigma: vec![0.0; len * spec.dim()],
            theta: identity_field(len, spec.rep_dim()),
            w: vec![1.0; len],
        })
    }

    /// Sets `theta = exp(xi)` pointwise from an algebra-valued field `len x d`.
    pub fn set_theta_from_algebra(&mut self, spec: &LieAlgebraSpec, xi: &[f64]) -> Result<()> {
        let d = spec.dim();
        let r = spec.rep_dim();
        let len = self.w.len();
        check_len("theta generator", len * d, xi.len())?;
        for p in 0..len {
            let g = crate::lie::expm(&spec.to_matrix(&xi[p * d..(p + 1) * d]));
            for a in 0..r {
                for b in 0..r {
                    self.theta[p * r * r + a * r + b] = g[(a, b)];
                }
            }
        }
        Ok(())
    }

    fn flatten(&self) -> Vec<f64> {
        let mut y = Vec::new();
        for f in self.q.iter().chain(&self.p) {
            y.extend_from_slice(f);
        }
        y.extend_from_slice(&self.sigma);
        y.extend_from_slice(&self.theta);
        y
    }

    fn unflatten(&self, y: &[f64]) -> Self {
        let len = self.w.len();
        let k = self.pairs();
        let mut out = self.clone();
        let mut off = 0;
        for a in 0..k {
            out.q[a].copy_from_slice(&y[off..off + len]);
            off += len;
        }
        for a in 0..k {
            out.p[a].copy_from_slice(&y[off..off + len]);
            off += len;
        }
        let ns = self.sigma.len();
        out.sigma.copy_from_slice(&y[off..off + ns]);
        off += ns;
        out.theta.copy_from_slice(&y[off..]);
        out
    }
}

fn identity_field(len: usize, r: usize) -> Vec<f64> {
    let mut t = vec![0.0; len * r * r];
    for p in 0..len {
        for a in 0..r {
            t[p * r * r + a * r + a] = 1.0;
        }
    }
    t
}

/// A function `h(q, p, zeta)` on `R^2k x o*` with analytic partials.
pub trait TestHamiltonian {
    fn value(&self, q: &[f64], p: &[f64], zeta: &[f64]) -> f64;
    /// Fills `(dh/dq, dh/dp, dh/dzeta)`.
    fn partials(&self, q: &[f64], p: &[f64], zeta: &[f64], dq: &mut [f64], dp: &mut [f64], dz: &mut [f64]);
}

/// `h = 1/2 a |q|^2 + 1/2 b |p|^2 + 1/2 c <zeta, zeta> + <zeta, e>`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: Vec<f64>,
}

impl TestHamiltonian for QuadraticHamiltonian {
    fn value(&self, q: &[f64], p: &[f64], z: &[f64]) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        0.5 * self.a * sq(q) + 0.5 * self.b * sq(p) + 0.5 * self.c * sq(z)
            + z.iter().zip(&self.e).map(|(x, y)| x * y).sum::<f64>()
    }

    fn partials(&self, q: &[f64], p: &[f64], z: &[f64], dq: &mut [f64], dp: &mut [f64], dz: &mut [f64]) {
        for (o, v) in dq.iter_mut().zip(q) {
            *o = self.a * v;
        }
        for (o, v) in dp.iter_mut().zip(p) {
            *o = self.b * v;
        }
        for (i, o) in dz.iter_mut().enumerate() {
            *o = self.c * z[i] + self.e.get(i).copied().unwrap_or(0.0);
        }
    }
}

/// Largest relative mismatch between analytic partials and central differences.
pub fn check_partials(h: &dyn TestHamiltonian, probes: &[(Vec<f64>, Vec<f64>, Vec<f64>)], step: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (q, p, z) in probes {
        let (mut dq, mut dp, mut dz) = (vec![0.0; q.len()], vec![0.0; p.len()], vec![0.0; z.len()]);
        h.partials(q, p, z, &mut dq, &mut dp, &mut dz);
        let scale = dq.iter().chain(&dp).chain(&dz).fold(1e-8_f64, |m, v| m.max(v.abs()));
        let mut probe = |which: usize, i: usize, exact: f64| {
            let mut v = [q.clone(), p.clone(), z.clone()];
            v[which][i] += step;
            let plus = h.value(&v[0], &v[1], &v[2]);
            v[which][i] -= 2.0 * step;
            let minus = h.value(&v[0], &v[1], &v[2]);
            let fd = (plus - minus) / (2.0 * step);
            worst = worst.max((fd - exact).abs() / scale);
        };
        for i in 0..q.len() {
            probe(0, i, dq[i]);
        }
        for i in 0..p.len() {
            probe(1, i, dp[i]);
        }
        for i in 0..z.len() {
            probe(2, i, dz[i]);
        }
    }
    worst
}

/// Functional derivatives with respect to `dx dy` of a functional on Clebsch space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClebschPartials {
    pub dq: Vec<Vec<f64>>,
    pub dp: Vec<Vec<f64>>,
    pub dsigma: Vec<f64>,
    pub dtheta: Vec<f64>,
}

impl ClebschPartials {
    pub fn zeros(s: &ClebschState) -> Self {
        Self {
            dq: vec![vec![0.0; s.w.len()]; s.pairs()],
            dp: vec![vec![0.0; s.w.len()]; s.pairs()],
            dsigma: vec![0.0; s.sigma.len()],
            dtheta: vec![0.0; s.theta.len()],
        }
    }

    fn check(&self, s: &ClebschState) -> Result<()> {
        let ok = self.dq.len() == s.pairs()
            && self.dp.len() == s.pairs()
            && self.dq.iter().chain(&self.dp).all(|f| f.len() == s.w.len())
            && self.dsigma.len() == s.sigma.len()
            && self.dtheta.len() == s.theta.len();
        if ok {
            Ok(())
        } else {
            Err(Error::MissingPartials("functional derivative shapes do not match the state".into()))
        }
    }
}

/// Exact grid symmetries used for the equivariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Identity,
    /// `x -> x + (di dx, dj dy)`
    Translation { di: usize, dj: usize },
    /// `(x, y) -> (-y, x)`
    Rotation90,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencySample {
    pub t: f64,
    pub varpi_mismatch: f64,
    pub sigma_mismatch: f64,
    /// Largest relative equivariance residual over the requested symmetries.
    pub equivariance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub samples: Vec<ConsistencySample>,
    /// Re-projections of `theta` performed along the run.
    pub reprojections: usize,
}

impl ConsistencyReport {
    pub fn max_mismatch(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0_f64, |m, s| m.max(s.varpi_mismatch).max(s.sigma_mismatch))
    }

    pub fn max_equivariance(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.equivariance))
    }
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let nb = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if nb > 0.0 {
        diff / nb
    } else {
        diff
    }
}

#[derive(Debug, Clone)]
pub struct ClebschModel {
    pub flow: Model2D,
}

impl ClebschModel {
    pub fn new(flow: Model2D) -> Self {
        Self { flow }
    }

    fn grid(&self) -> &Grid2D {
        &self.flow.grid
    }
    fn spec(&self) -> &LieAlgebraSpec {
        &self.flow.spec
    }

    pub fn check(&self, s: &ClebschState) -> Result<()> {
        let len = self.grid().len();
        let (d, r) = (self.spec().dim(), self.spec().rep_dim());
        check_len("winding coefficients", s.q.len(), s.q_lin.len())?;
        check_len("momentum components", s.q.len(), s.p.len())?;
        for f in s.q.iter().chain(&s.p) {
            check_len("Clebsch field", len, f.len())?;
        }
        check_len("Clebsch sigma", len * d, s.sigma.len())?;
        check_len("Clebsch theta", len * r * r, s.theta.len())?;
        check_len("volume weight", len, s.w.len())?;
        if s.w.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Validation("volume weight must be positive".into()));
        }
        Ok(())
    }

    fn theta_at(&self, s: &ClebschState, p: usize) -> DMatrix<f64> {
        let r = self.spec().rep_dim();
        DMatrix::from_row_slice(r, r, &s.theta[p * r * r..(p + 1) * r * r])
    }

    /// Full values `c . x + q` of `Q^a`.
    pub fn q_values(&self, s: &ClebschState, a: usize) -> Vec<f64> {
        let g = self.grid();
        let c = s.q_lin[a];
        let mut out = s.q[a].clone();
        for i in 0..g.nx {
            for j in 0..g.ny {
                out[g.idx(i, j)] += c[0] * g.x(i) + c[1] * g.y(j);
            }
        }
        out
    }

    fn q_gradient(&self, s: &ClebschState, a: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut gx, mut gy) = self.grid().gradient(&s.q[a])?;
        let c = s.q_lin[a];
        gx.iter_mut().for_each(|v| *v += c[0]);
        gy.iter_mut().for_each(|v| *v += c[1]);
        Ok((gx, gy))
    }

    fn theta_gradients(&self, s: &ClebschState) -> Result<(Vec<f64>, Vec<f64>)> {
        let len = self.grid().len();
        let rr = self.spec().rep_dim().pow(2);
        let mut tx = vec![0.0; s.theta.len()];
        let mut ty = vec![0.0; s.theta.len()];
        for e in 0..rr {
            let f: Vec<f64> = (0..len).map(|p| s.theta[p * rr + e]).collect();
            let (gx, gy) = self.grid().gradient(&f)?;
            for p in 0..len {
                tx[p * rr + e] = gx[p];
                ty[p * rr + e] = gy[p];
            }
        }
        Ok((tx, ty))
    }

    /// Clebsch one-form `alpha` and `sigma_bar = Ad*_theta sigma`.
    pub fn one_form(
        &self,
        s: &ClebschState,
        a_s: Option<&dyn MagneticPotential>,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        self.check(s)?;
        let g = self.grid();
        let spec = self.spec();
        let len = g.len();
        let (d, r) = (spec.dim(), spec.rep_dim());
        let mut ax = vec![0.0; len];
        let mut ay = vec![0.0; len];
        for a in 0..s.pairs() {
            let (gx, gy) = self.q_gradient(s, a)?;
            for p in 0..len {
                ax[p] += s.p[a][p] * gx[p];
                ay[p] += s.p[a][p] * gy[p];
            }
        }
        let (tx, ty) = self.theta_gradients(s)?;
        let mut sbar = vec![0.0; len * d];
        let mut apot = vec![0.0; 2 * d];
        for p in 0..len {
            let th = self.theta_at(s, p);
            let inv = th
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::SingularMatrix(format!("theta not invertible at node {p}")))?;
            let sig = &s.sigma[p * d..(p + 1) * d];
            let dx = DMatrix::from_row_slice(r, r, &tx[p * r * r..(p + 1) * r * r]) * &inv;
            let dy = DMatrix::from_row_slice(r, r, &ty[p * r * r..(p + 1) * r * r]) * &inv;
            let ex = spec.expand_matrix(&dx);
            let ey = spec.expand_matrix(&dy);
            ax[p] += (0..d).map(|b| sig[b] * ex[b]).sum::<f64>();
            ay[p] += (0..d).map(|b| sig[b] * ey[b]).sum::<f64>();
            // <Ad*_theta sigma, e_i> = <sigma, theta e_i theta^-1>
            for (i, basis) in spec.rep_basis().iter().enumerate() {
                let conj = spec.expand_matrix(&(&th * basis * &inv));
                sbar[p * d + i] = (0..d).map(|b| sig[b] * conj[b]).sum();
            }
        }
        if let Some(pot) = a_s {
            check_len("connection space dimension", 2, pot.space_dim())?;
            check_len("connection algebra dimension", d, pot.algebra_dim())?;
            for i in 0..g.nx {
                for j in 0..g.ny {
                    let p = g.idx(i, j);
                    pot.value(&[g.x(i), g.y(j)], &mut apot);
                    let sb = &sbar[p * d..(p + 1) * d];
                    ax[p] -= (0..d).map(|b| sb[b] * apot[b]).sum::<f64>();
                    ay[p] -= (0..d).map(|b| sb[b] * apot[d + b]).sum::<f64>();
                }
            }
        }
        Ok((ax, ay, sbar))
    }

    /// Right momentum map `(curl alpha, Ad*_theta sigma)`.
    pub fn j_right(&self, s: &ClebschState, a_s: Option<&dyn MagneticPotential>) -> Result<(Vec<f64>, Vec<f64>)> {
        let (ax, ay, sbar) = self.one_form(s, a_s)?;
        let g = self.grid();
        let dyx = g.dx_field(&ay)?;
        let dxy = g.dy_field(&ax)?;
        Ok((dyx.iter().zip(&dxy).map(|(a, b)| a - b).collect(), sbar))
    }

    fn node_args(&self, s: &ClebschState, qv: &[Vec<f64>], p: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.spec().dim();
        (
            qv.iter().map(|f| f[p]).collect(),
            s.p.iter().map(|f| f[p]).collect(),
            s.sigma[p * d..(p + 1) * d].to_vec(),
        )
    }

    /// `<J_L, h> = int h(Q, P, sigma) w dx dy`.
    pub fn j_left_pair(&self, s: &ClebschState, h: &dyn TestHamiltonian) -> Result<f64> {
        self.check(s)?;
        let qv: Vec<Vec<f64>> = (0..s.pairs()).map(|a| self.q_values(s, a)).collect();
        let mut total = 0.0;
        for p in 0..s.w.len() {
            let (q, pp, z) = self.node_args(s, &qv, p);
            total += h.value(&q, &pp, &z) * s.w[p];
        }
        Ok(total * self.grid().cell_area())
    }

    /// Functional derivatives of `H = int h w`.
    pub fn hamiltonian_partials(&self, s: &ClebschState, h: &dyn TestHamiltonian) -> Result<ClebschPartials> {
        self.check(s)?;
        let k = s.pairs();
        let d = self.spec().dim();
        let qv: Vec<Vec<f64>> = (0..k).map(|a| self.q_values(s, a)).collect();
        let mut out = ClebschPartials::zeros(s);
        let (mut dq, mut dp, mut dz) = (vec![0.0; k], vec![0.0; k], vec![0.0; d]);
        for p in 0..s.w.len() {
            let (q, pp, z) = self.node_args(s, &qv, p);
            h.partials(&q, &pp, &z, &mut dq, &mut dp, &mut dz);
            for a in 0..k {
                out.dq[a][p] = s.w[p] * dq[a];
                out.dp[a][p] = s.w[p] * dp[a];
            }
            for b in 0..d {
                out.dsigma[p * d + b] = s.w[p] * dz[b];
            }
        }
        Ok(out)
    }

    /// Pointwise flow `(dh/dp, -dh/dq, -ad*_{dh/dzeta} sigma, (dh/dzeta) theta)`.
    pub fn canonical_rhs(&self, s: &ClebschState, h: &dyn TestHamiltonian) -> Result<ClebschState> {
        self.check(s)?;
        let spec = self.spec();
        let k = s.pairs();
        let (d, r) = (spec.dim(), spec.rep_dim());
        let qv: Vec<Vec<f64>> = (0..k).map(|a| self.q_values(s, a)).collect();
        let mut out = s.clone();
        out.q_lin = vec![[0.0; 2]; k];
        let (mut dq, mut dp, mut dz) = (vec![0.0; k], vec![0.0; k], vec![0.0; d]);
        let mut ad = vec![0.0; d];
        for p in 0..s.w.len() {
            let (q, pp, z) = self.node_args(s, &qv, p);
            h.partials(&q, &pp, &z, &mut dq, &mut dp, &mut dz);
            for a in 0..k {
                out.q[a][p] = dp[a];
                out.p[a][p] = -dq[a];
            }
            spec.ad_star_into(&dz, &z, &mut ad);
            for b in 0..d {
                out.sigma[p * d + b] = -ad[b];
            }
            let th = spec.to_matrix(&dz) * self.theta_at(s, p);
            for a in 0..r {
                for b in 0..r {
                    out.theta[p * r * r + a * r + b] = th[(a, b)];
                }
            }
        }
        Ok(out)
    }

    /// Clebsch bracket of two functionals:
    /// `int (1/w) [dF_Q dG_P - dG_Q dF_P + <sigma, [dF_sigma, dG_sigma]>
    ///  + dF_theta : (dG_sigma theta) - dG_theta : (dF_sigma theta)]`.
    pub fn bracket(&self, s: &ClebschState, f: &ClebschPartials, g: &ClebschPartials) -> Result<f64> {
        self.check(s)?;
        f.check(s)?;
        g.check(s)?;
        let spec = self.spec();
        let (d, r) = (spec.dim(), spec.rep_dim());
        let mut br = vec![0.0; d];
        let mut total = 0.0;
        for p in 0..s.w.len() {
            let mut v = 0.0;
            for a in 0..s.pairs() {
                v += f.dq[a][p] * g.dp[a][p] - g.dq[a][p] * f.dp[a][p];
            }
            let (fs, gs) = (&f.dsigma[p * d..(p + 1) * d], &g.dsigma[p * d..(p + 1) * d]);
            spec.bracket_into(fs, gs, &mut br);
            v += (0..d).map(|b| s.sigma[p * d + b] * br[b]).sum::<f64>();
            let th = self.theta_at(s, p);
            let gt = spec.to_matrix(gs) * &th;
            let ft = spec.to_matrix(fs) * &th;
            for a in 0..r {
                for b in 0..r {
                    let e = p * r * r + a * r + b;
                    v += f.dtheta[e] * gt[(a, b)] - g.dtheta[e] * ft[(a, b)];
                }
            }
            total += v / s.w[p];
        }
        Ok(total * self.grid().cell_area())
    }

    /// `dF(state) . tangent`.
    pub fn directional(&self, s: &ClebschState, f: &ClebschPartials, tangent: &ClebschState) -> Result<f64> {
        self.check(s)?;
        f.check(s)?;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut total = dot(&f.dsigma, &tangent.sigma) + dot(&f.dtheta, &tangent.theta);
        for a in 0..s.pairs() {
            total += dot(&f.dq[a], &tangent.q[a]) + dot(&f.dp[a], &tangent.p[a]);
        }
        Ok(total * self.grid().cell_area())
    }

    fn advective_signed(&self, s: &ClebschState, u1: &[f64], u2: &[f64], zeta: &[f64], sign: f64) -> Result<ClebschState> {
        self.check(s)?;
        let g = self.grid();
        let spec = self.spec();
        let len = g.len();
        let (d, r) = (spec.dim(), spec.rep_dim());
        check_len("velocity", len, u1.len())?;
        check_len("velocity", len, u2.len())?;
        check_len("gauge generator", len * d, zeta.len())?;
        let div: Vec<f64> = g
            .dx_field(u1)?
            .iter()
            .zip(g.dy_field(u2)?)
            .map(|(a, b)| a + b)
            .collect();
        let umax = u1.iter().chain(u2).fold(1.0_f64, |m, v| m.max(v.abs()));
        let dmax = div.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if dmax > 1e-10 * umax {
            return Err(Error::Compressible(dmax));
        }
        let adv = |gx: &[f64], gy: &[f64]| -> Result<Vec<f64>> {
            let raw: Vec<f64> = (0..len).map(|p| sign * (u1[p] * gx[p] + u2[p] * gy[p])).collect();
            g.dealias(&raw)
        };
        let mut out = s.clone();
        out.q_lin = vec![[0.0; 2]; s.pairs()];
        for a in 0..s.pairs() {
            let (gx, gy) = self.q_gradient(s, a)?;
            out.q[a] = adv(&gx, &gy)?;
            let (gx, gy) = g.gradient(&s.p[a])?;
            out.p[a] = adv(&gx, &gy)?;
        }
        for b in 0..d {
            let col = crate::epaut1d::column(&s.sigma, d, b);
            let (gx, gy) = g.gradient(&col)?;
            let v = adv(&gx, &gy)?;
            for p in 0..len {
                out.sigma[p * d + b] = v[p];
            }
        }
        let (tx, ty) = self.theta_gradients(s)?;
        let rr = r * r;
        let mut raw = vec![0.0; s.theta.len()];
        for p in 0..len {
            let rot = self.theta_at(s, p) * spec.to_matrix(&zeta[p * d..(p + 1) * d]);
            for a in 0..r {
                for b in 0..r {
                    let e = p * rr + a * r + b;
                    raw[e] = sign * (u1[p] * tx[e] + u2[p] * ty[e] + rot[(a, b)]);
                }
            }
        }
        for e in 0..rr {
            let f: Vec<f64> = (0..len).map(|p| raw[p * rr + e]).collect();
            let f = g.dealias(&f)?;
            for p in 0..len {
                out.theta[p * rr + e] = f[p];
            }
        }
        Ok(out)
    }

    /// Collective flow generated by a divergence-free `u` and gauge generator `zeta` (`len x d`).
    pub fn advective_rhs(&self, s: &ClebschState, u1: &[f64], u2: &[f64], zeta: &[f64]) -> Result<ClebschState> {
        self.advective_signed(s, u1, u2, zeta, CLEBSCH_SIGN)
    }

    /// Collective flow of the quadratic energy of `J_R`.
    pub fn collective_rhs(&self, s: &ClebschState) -> Result<ClebschState> {
        self.collective_rhs_signed(s, CLEBSCH_SIGN)
    }

    fn collective_rhs_signed(&self, s: &ClebschState, sign: f64) -> Result<ClebschState> {
        let (varpi, sbar) = self.j_right(s, None)?;
        let psi = self.flow.stream(&varpi)?;
        let (u1, u2) = self.flow.velocity(&psi)?;
        let nu = self.flow.charge_potential(&sbar)?;
        self.advective_signed(s, &u1, &u2, &nu, sign)
    }

    fn reproject(&self, s: &mut ClebschState) -> bool {
        let spec = self.spec();
        if !spec.has_orthogonal_rep() {
            return false;
        }
        let r = spec.rep_dim();
        let id = DMatrix::<f64>::identity(r, r);
        let mut any = false;
        for p in 0..s.w.len() {
            let th = self.theta_at(s, p);
            if (th.transpose() * &th - &id).amax() > REPROJECT_TOL {
                let pr = polar_project(&th);
                for a in 0..r {
                    for b in 0..r {
                        s.theta[p * r * r + a * r + b] = pr[(a, b)];
                    }
                }
                any = true;
            }
        }
        any
    }

    pub fn step_rk4(&self, s: &ClebschState, t: f64, dt: f64) -> Result<ClebschState> {
        let y = rk4_step(&s.flatten(), t, dt, |v| Ok(self.collective_rhs(&s.unflatten(v))?.flatten()))?;
        Ok(s.unflatten(&y))
    }

    /// RK4 collective evolution; returns `(t, state)` every `stride` steps and
    /// the number of re-projections.
    pub fn collective_evolve(
        &self,
        s: &ClebschState,
        dt: f64,
        t_end: f64,
        stride: usize,
    ) -> Result<(Vec<(f64, ClebschState)>, usize)> {
        self.check(s)?;
        let steps = step_count(dt, t_end)?;
        let stride = stride.max(1);
        let mut out = vec![(0.0, s.clone())];
        let mut cur = s.clone();
        let mut count = 0;
        for k in 0..steps {
            cur = self.step_rk4(&cur, k as f64 * dt, dt)?;
            if (k + 1) % REPROJECT_EVERY == 0 && self.reproject(&mut cur) {
                count += 1;
            }
            if (k + 1) % stride == 0 || k + 1 == steps {
                out.push(((k + 1) as f64 * dt, cur.clone()));
            }
        }
        Ok((out, count))
    }

    /// Evolves the Clebsch state and, side by side, the direct solver from
    /// `J_R(state)`; reports the relative L2 mismatch of `(varpi, sigma_bar)`
    /// and the equivariance residual of each sampled state.
    pub fn consistency_report(
        &self,
        s: &ClebschState,
        dt: f64,
        t_end: f64,
        stride: usize,
        symmetries: &[Symmetry],
    ) -> Result<ConsistencyReport> {
        let (traj, reprojections) = self.collective_evolve(s, dt, t_end, stride)?;
        let (w0, s0) = self.j_right(s, None)?;
        let direct = self.flow.run(&FieldState2D { varpi: w0, sigma: s0 }, dt, t_end, stride)?;
        let mut samples = Vec::with_capacity(traj.len());
        for ((t, cs), ds) in traj.iter().zip(&direct.states) {
            let (w, sb) = self.j_right(cs, None)?;
            let scale = w.iter().chain(&sb).fold(1.0_f64, |m, v| m.max(v.abs()));
            let mut equivariance: f64 = 0.0;
            for &sym in symmetries {
                equivariance = equivariance.max(self.equivariance_check(cs, sym)? / scale);
            }
            samples.push(ConsistencySample {
                t: *t,
                varpi_mismatch: rel_l2(&w, &ds.varpi),
                sigma_mismatch: rel_l2(&sb, &ds.sigma),
                equivariance,
            });
        }
        Ok(ConsistencyReport { samples, reprojections })
    }

    /// Index map `target -> source` of a symmetry, i.e. `(f o eta)[target] = f[source]`.
    fn symmetry_map(&self, sym: Symmetry) -> Result<Vec<usize>> {
        let g = self.grid();
        let (nx, ny) = (g.nx, g.ny);
        if sym == Symmetry::Rotation90 && (nx != ny || g.lx != g.ly) {
            return Err(Error::IncompatibleGrid("90 degree rotation needs a square grid".into()));
        }
        let mut map = vec![0; g.len()];
        for i in 0..nx {
            for j in 0..ny {
                map[g.idx(i, j)] = match sym {
                    Symmetry::Identity => g.idx(i, j),
                    Symmetry::Translation { di, dj } => g.idx((i + di) % nx, (j + dj) % ny),
                    Symmetry::Rotation90 => g.idx((nx - j) % nx, i),
                };
            }
        }
        Ok(map)
    }

    fn permute(map: &[usize], f: &[f64], comps: usize) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for (t, &src) in map.iter().enumerate() {
            out[t * comps..(t + 1) * comps].copy_from_slice(&f[src * comps..(src + 1) * comps]);
        }
        out
    }

    /// Pull-back `state o eta` of a Clebsch state by a grid symmetry.
    pub fn transform_state(&self, s: &ClebschState, sym: Symmetry) -> Result<ClebschState> {
        self.check(s)?;
        let map = self.symmetry_map(sym)?;
        let g = self.grid();
        let (d, r) = (self.spec().dim(), self.spec().rep_dim());
        let mut out = s.clone();
        for a in 0..s.pairs() {
            let c = s.q_lin[a];
            out.q[a] = Self::permute(&map, &s.q[a], 1);
            out.p[a] = Self::permute(&map, &s.p[a], 1);
            match sym {
                Symmetry::Identity => {}
                Symmetry::Translation { di, dj } => {
                    let shift = c[0] * di as f64 * g.dx() + c[1] * dj as f64 * g.dy();
                    out.q[a].iter_mut().for_each(|v| *v += shift);
                }
                Symmetry::Rotation90 => out.q_lin[a] = [c[1], -c[0]],
            }
        }
        out.sigma = Self::permute(&map, &s.sigma, d);
        out.theta = Self::permute(&map, &s.theta, r * r);
        out.w = Self::permute(&map, &s.w, 1);
        Ok(out)
    }

    /// `max |J_R(state o eta) - eta^* J_R(state)|`.
    pub fn equivariance_check(&self, s: &ClebschState, sym: Symmetry) -> Result<f64> {
        let map = self.symmetry_map(sym)?;
        let d = self.spec().dim();
        let (w0, s0) = self.j_right(s, None)?;
        let (w1, s1) = self.j_right(&self.transform_state(s, sym)?, None)?;
        let pw = Self::permute(&map, &w0, 1);
        let ps = Self::permute(&map, &s0, d);
        Ok(w1
            .iter()
            .zip(&pw)
            .chain(s1.iter().zip(&ps))
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Chooses the sign of the collective flow on a one-mode abelian probe by
    /// comparing `d/dt J_R` with the direct right-hand side. Returns the
    /// selected sign and the relative mismatch of both candidates.
    pub fn calibrate_sign() -> Result<(f64, [f64; 2])> {
        let grid = Grid2D::square(32)?;
        let spec = LieAlgebraSpec::abelian(1);
        let model = ClebschModel::new(Model2D::new(grid.clone(), spec.clone(), Default::default())?);
        let p = grid.sample(|x, y| 0.6 * y.sin() + 0.4 * x.cos());
        let mut s = ClebschState::euler_seed(&grid, &spec, p)?;
        s.sigma = grid.sample(|x, y| 0.5 * (x + y).cos());
        s.set_theta_from_algebra(&spec, &grid.sample(|_, y| 0.3 * y.sin()))?;
        let (w, sb) = model.j_right(&s, None)?;
        let target = model.flow.rhs(&FieldState2D { varpi: w, sigma: sb })?;
        let mut mism = [0.0; 2];
        for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
            let tan = model.collective_rhs_signed(&s, sign)?;
            let eps = 1e-5;
            let shifted = |e: f64| {
                let y: Vec<f64> = s.flatten().iter().zip(tan.flatten()).map(|(a, b)| a + e * b).collect();
                s.unflatten(&y)
            };
            let (wp, sp) = model.j_right(&shifted(eps), None)?;
            let (wm, sm) = model.j_right(&shifted(-eps), None)?;
            let dw: Vec<f64> = wp.iter().zip(&wm).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
            let ds: Vec<f64> = sp.iter().zip(&sm).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
            mism[slot] = rel_l2(&dw, &target.varpi).max(rel_l2(&ds, &target.sigma));
        }
        let sign = if mism[1] < mism[0] { -1.0 } else { 1.0 };
        Ok((sign, mism))
    }
}

/// Spectral gradient of a field on the periodic cube `[0, l)^3` with `n^3`
/// points, layout `(i * n + j) * n + k`.
pub fn gradient_3d(n: usize, l: f64, f: &[f64]) -> Result<[Vec<f64>; 3]> {
    check_len("3D field", n * n * n, f.len())?;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let k0 = 2.0 * std::f64::consts::PI / l;
    let stride = [n * n, n, 1];
    let mut out: [Vec<f64>; 3] = [vec![0.0; f.len()], vec![0.0; f.len()], vec![0.0; f.len()]];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for (axis, res) in out.iter_mut().enumerate() {
        let st = stride[axis];
        for base in 0..n * n * n {
            // first element of each line along `axis`
            if (base / st) % n != 0 {
                continue;
            }
            for m in 0..n {
                line[m] = Complex64::new(f[base + m * st], 0.0);
            }
            fwd.process(&mut line);
            for (m, c) in line.iter_mut().enumerate() {
                let k = if m == n / 2 { 0.0 } else { k0 * mode_index(m, n) as f64 };
                *c *= Complex64::new(0.0, k / n as f64);
            }
            inv.process(&mut line);
            for m in 0..n {
                res[base + m * st] = line[m].re;
            }
        }
    }
    Ok(out)
}

/// Spectral curl of a vector field on the periodic cube.
pub fn curl_3d(n: usize, l: f64, v: [&[f64]; 3]) -> Result<[Vec<f64>; 3]> {
    let g: Vec<[Vec<f64>; 3]> = v.iter().map(|c| gradient_3d(n, l, c)).collect::<Result<_>>()?;
    let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();
    Ok([
        sub(&g[2][1], &g[1][2]),
        sub(&g[0][2], &g[2][0]),
        sub(&g[1][0], &g[0][1]),
    ])
}

/// Clebsch one-form `sum_a P_a grad Q^a + <sigma, grad theta theta^-1>` on the periodic cube.
/// `charge` carries `(spec, sigma len x d, theta len x r x r)`.
pub fn clebsch_one_form_3d(
    n: usize,
    l: f64,
    q: &[Vec<f64>],
    p: &[Vec<f64>],
    charge: Option<(&LieAlgebraSpec, &[f64], &[f64])>,
) -> Result<[Vec<f64>; 3]> {
    check_len("momentum components", q.len(), p.len())?;
    let len = n * n * n;
    let mut alpha = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for (qa, pa) in q.iter().zip(p) {
        check_len("3D momentum", len, pa.len())?;
        let gq = gradient_3d(n, l, qa)?;
        for c in 0..3 {
            for i in 0..len {
                alpha[c][i] += pa[i] * gq[c][i];
            }
        }
    }
    if let Some((spec, sigma, theta)) = charge {
        let (d, r) = (spec.dim(), spec.rep_dim());
        check_len("3D sigma", len * d, sigma.len())?;
        check_len("3D theta", len * r * r, theta.len())?;
        let mut grads = Vec::with_capacity(r * r);
        for e in 0..r * r {
            let f: Vec<f64> = (0..len).map(|i| theta[i * r * r + e]).collect();
            grads.push(gradient_3d(n, l, &f)?);
        }
        for i in 0..len {
            let th = DMatrix::from_row_slice(r, r, &theta[i * r * r..(i + 1) * r * r]);
            let inv = th
                .try_inverse()
                .ok_or_else(|| Error::SingularMatrix(format!("theta not invertible at node {i}")))?;
            for c in 0..3 {
                let dth = DMatrix::from_fn(r, r, |a, b| grads[a * r + b][c][i]);
                let xi = spec.expand_matrix(&(dth * &inv));
                alpha[c][i] += (0..d).map(|b| sigma[i * d + b] * xi[b]).sum::<f64>();
            }
        }
    }
    Ok(alpha)
}
