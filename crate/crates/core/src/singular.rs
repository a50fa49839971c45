//! Charged peakons: point-particle solutions `(Q_i, P_i, mu_i)` obtained by
//! pulling the Kaluza-Klein Hamiltonian back along the left momentum map.
//!
//! Substituting `m = sum_i P_i delta(x - Q_i)` and `sigma = sum_i mu_i delta(x - Q_i)`
//! into the Green's-function form of the reduced Hamiltonian gives the
//! collective Hamiltonian
//!
//! ```text
//! H_N = 1/2 sum_ij G1(|Q_i - Q_j|) Pi_i . Pi_j + 1/2 sum_ij G2(|Q_i - Q_j|) <mu_i, mu_j>_{gamma^-1}
//! Pi_i = P_i - mu_i . A(Q_i)
//! ```
//!
//! evolved by `Q' = dH/dP`, `P' = -dH/dQ`, `mu' = -ad*_{dH/dmu} mu` and, when
//! group elements are carried along, `theta' = (dH/dmu) theta`. With that
//! reconstruction the body-frame charges `Ad*_theta mu` are constants of
//! motion.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::integrate::{rk4_step, step_count};
use crate::kernels::Kernel;
use crate::lie::{CoalgebraElement, GroupElement, LieAlgebraSpec};
use crate::potential::{MagneticPotential, ModalPotential};

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    /// number of particles
    pub count: usize,
    /// spatial dimension
    pub space_dim: usize,
    /// charge dimension (dim of the algebra)
    pub charge_dim: usize,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub mu: Vec<f64>,
    pub theta: Option<Vec<GroupElement>>,
}

impl ParticleState {
    pub fn new(
        space_dim: usize,
        charge_dim: usize,
        q: Vec<f64>,
        p: Vec<f64>,
        mu: Vec<f64>,
    ) -> Result<Self> {
        if space_dim == 0 {
            return Err(Error::Validation("spatial dimension must be positive".into()));
        }
        let count = q.len() / space_dim;
        check_len("particle positions", count * space_dim, q.len())?;
        check_len("particle momenta", count * space_dim, p.len())?;
        check_len("particle charges", count * charge_dim, mu.len())?;
        if q.iter().chain(&p).chain(&mu).any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite particle data".into()));
        }
        Ok(Self {
            count,
            space_dim,
            charge_dim,
            q,
            p,
            mu,
            theta: None,
        })
    }

    /// Attaches identity group elements for reconstruction.
    pub fn with_identity_theta(mut self, rep_dim: usize) -> Self {
        self.theta = Some(vec![GroupElement::identity(rep_dim); self.count]);
        self
    }

    pub fn qi(&self, i: usize) -> &[f64] {
        &self.q[i * self.space_dim..(i + 1) * self.space_dim]
    }
    pub fn pi(&self, i: usize) -> &[f64] {
        &self.p[i * self.space_dim..(i + 1) * self.space_dim]
    }
    pub fn mui(&self, i: usize) -> &[f64] {
        &self.mu[i * self.charge_dim..(i + 1) * self.charge_dim]
    }

    /// Relabels particles: particle `k` of the result is particle `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let (n, d) = (self.space_dim, self.charge_dim);
        let mut out = self.clone();
        for (k, &src) in perm.iter().enumerate() {
            out.q[k * n..(k + 1) * n].copy_from_slice(self.qi(src));
            out.p[k * n..(k + 1) * n].copy_from_slice(self.pi(src));
            out.mu[k * d..(k + 1) * d].copy_from_slice(self.mui(src));
            if let (Some(t), Some(src_t)) = (out.theta.as_mut(), self.theta.as_ref()) {
                t[k] = src_t[src].clone();
            }
        }
        out
    }

    pub fn total_momentum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.space_dim];
        for i in 0..self.count {
            for (a, v) in self.pi(i).iter().enumerate() {
                s[a] += v;
            }
        }
        s
    }

    fn flatten(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.q.len() * 2 + self.mu.len());
        y.extend_from_slice(&self.q);
        y.extend_from_slice(&self.p);
        y.extend_from_slice(&self.mu);
        if let Some(th) = &self.theta {
            for g in th {
                // row-major
                for r in 0..g.0.nrows() {
                    for c in 0..g.0.ncols() {
                        y.push(g.0[(r, c)]);
                    }
                }
            }
        }
        y
    }

    fn unflatten(&self, y: &[f64]) -> Self {
        let nq = self.q.len();
        let nm = self.mu.len();
        let mut out = self.clone();
        out.q.copy_from_slice(&y[..nq]);
        out.p.copy_from_slice(&y[nq..2 * nq]);
        out.mu.copy_from_slice(&y[2 * nq..2 * nq + nm]);
        if let Some(th) = out.theta.as_mut() {
            let mut off = 2 * nq + nm;
            for g in th.iter_mut() {
                let r = g.0.nrows();
                g.0 = DMatrix::from_row_slice(r, r, &y[off..off + r * r]);
                off += r * r;
            }
        }
        out
    }
}

/// Partial derivatives of a phase-space function at a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dmu: Vec<f64>,
}

impl Partials {
    pub fn zeros(state: &ParticleState) -> Self {
        Self {
            dq: vec![0.0; state.q.len()],
            dp: vec![0.0; state.p.len()],
            dmu: vec![0.0; state.mu.len()],
        }
    }

    fn check(&self, state: &ParticleState) -> Result<()> {
        if self.dq.len() != state.q.len() {
            return Err(Error::MissingPartials(format!("dF/dQ has {} of {} entries", self.dq.len(), state.q.len())));
        }
        if self.dp.len() != state.p.len() {
            return Err(Error::MissingPartials(format!("dF/dP has {} of {} entries", self.dp.len(), state.p.len())));
        }
        if self.dmu.len() != state.mu.len() {
            return Err(Error::MissingPartials(format!("dF/dmu has {} of {} entries", self.dmu.len(), state.mu.len())));
        }
        Ok(())
    }
}

/// Sampled trajectory of a peakon run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ParticleState>,
}

/// Collective Hamiltonian system for charged peakons.
#[derive(Debug, Clone)]
pub struct PeakonSystem {
    pub kernel1: Kernel,
    pub kernel2: Kernel,
    pub potential: Arc<dyn MagneticPotential>,
    pub spec: LieAlgebraSpec,
}

impl PeakonSystem {
    pub fn new(
        kernel1: Kernel,
        kernel2: Kernel,
        potential: Arc<dyn MagneticPotential>,
        spec: LieAlgebraSpec,
    ) -> Result<Self> {
        if !kernel1.is_pointwise() || !kernel2.is_pointwise() {
            return Err(Error::Validation(
                "particle dynamics need pointwise (radial) kernels; the Dirac kernel is not allowed".into(),
            ));
        }
        if potential.algebra_dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                context: "potential algebra dimension",
                expected: spec.dim(),
                got: potential.algebra_dim(),
            });
        }
        Ok(Self {
            kernel1,
            kernel2,
            potential,
            spec,
        })
    }

    /// Uncharged, field-free system with a single Helmholtz kernel.
    pub fn camassa_holm(alpha: f64, space_dim: usize) -> Result<Self> {
        let k = Kernel::helmholtz_line(alpha)?;
        Self::new(
            k,
            k,
            Arc::new(ModalPotential::zero(space_dim, 1)),
            LieAlgebraSpec::abelian(1),
        )
    }

    fn check(&self, s: &ParticleState) -> Result<()> {
        check_len("state space dimension", self.potential.space_dim(), s.space_dim)?;
        check_len("state charge dimension", self.spec.dim(), s.charge_dim)?;
        if let Some(th) = &s.theta {
            check_len("theta count", s.count, th.len())?;
            for g in th {
                check_len("theta size", self.spec.rep_dim(), g.0.nrows())?;
            }
        }
        Ok(())
    }

    /// `Pi_i = P_i - mu_i . A(Q_i)` for all particles.
    fn shifted_momenta(&self, s: &ParticleState) -> Vec<f64> {
        let (n, d) = (s.space_dim, s.charge_dim);
        let mut a = vec![0.0; n * d];
        let mut out = s.p.clone();
        for i in 0..s.count {
            self.potential.value(s.qi(i), &mut a);
            let mu = s.mui(i);
            for ax in 0..n {
                let mut c = 0.0;
                for b in 0..d {
                    c += mu[b] * a[ax * d + b];
                }
                out[i * n + ax] -= c;
            }
        }
        out
    }

    pub fn collective_hamiltonian(&self, s: &ParticleState) -> Result<f64> {
        self.check(s)?;
        let (n, d) = (s.space_dim, s.charge_dim);
        let pi = self.shifted_momenta(s);
        let mut sep = vec![0.0; n];
        let mut h = 0.0;
        for i in 0..s.count {
            for j in 0..s.count {
                for a in 0..n {
                    sep[a] = s.q[i * n + a] - s.q[j * n + a];
                }
                let g1 = self.kernel1.radial_value(&sep);
                let g2 = self.kernel2.radial_value(&sep);
                let pp: f64 = (0..n).map(|a| pi[i * n + a] * pi[j * n + a]).sum();
                let mm = self.spec.dual_inner(&s.mu[i * d..(i + 1) * d], &s.mu[j * d..(j + 1) * d]);
                h += 0.5 * (g1 * pp + g2 * mm);
            }
        }
        Ok(h)
    }

    /// Exact partials `(dH/dQ, dH/dP, dH/dmu)` using the `grad(0) = 0` kernel convention.
    pub fn hamiltonian_gradients(&self, s: &ParticleState) -> Result<Partials> {
        self.check(s)?;
        let (n, d) = (s.space_dim, s.charge_dim);
        let pi = self.shifted_momenta(s);
        let mut out = Partials::zeros(s);
        let mut sep = vec![0.0; n];
        let mut g1grad = vec![0.0; n];
        let mut g2grad = vec![0.0; n];
        let mut raised = vec![0.0; s.mu.len()];
        for i in 0..s.count {
            self.spec
                .raise_into(&s.mu[i * d..(i + 1) * d], &mut raised[i * d..(i + 1) * d]);
        }
        // pairwise sums, fixed j-order per i
        let mut v = vec![0.0; s.mu.len()];
        for i in 0..s.count {
            for j in 0..s.count {
                for a in 0..n {
                    sep[a] = s.q[i * n + a] - s.q[j * n + a];
                }
                let g1 = self.kernel1.radial_value(&sep);
                let g2 = self.kernel2.radial_value(&sep);
                self.kernel1.radial_grad(&sep, &mut g1grad);
                self.kernel2.radial_grad(&sep, &mut g2grad);
                let pp: f64 = (0..n).map(|a| pi[i * n + a] * pi[j * n + a]).sum();
                let mm: f64 = (0..d).map(|b| s.mu[i * d + b] * raised[j * d + b]).sum();
                for a in 0..n {
                    out.dp[i * n + a] += g1 * pi[j * n + a];
                    out.dq[i * n + a] += g1grad[a] * pp + g2grad[a] * mm;
                }
                for b in 0..d {
                    v[i * d + b] += g2 * raised[j * d + b];
                }
            }
        }
        // potential contributions
        let mut av = vec![0.0; n * d];
        let mut dav = vec![0.0; n * n * d];
        for i in 0..s.count {
            self.potential.value(s.qi(i), &mut av);
            self.potential.gradient(s.qi(i), &mut dav);
            let u = &out.dp[i * n..(i + 1) * n];
            let mu = s.mui(i);
            for b in 0..d {
                let mut c = 0.0;
                for a in 0..n {
                    c += av[a * d + b] * u[a];
                }
                out.dmu[i * d + b] = v[i * d + b] - c;
            }
            for c in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..d {
                        acc += u[a] * mu[b] * dav[(c * n + a) * d + b];
                    }
                }
                out.dq[i * n + c] -= acc;
            }
        }
        Ok(out)
    }

    /// Time derivative of the full state; `theta` blocks are filled only
    /// when the state carries group elements.
    pub fn rhs(&self, s: &ParticleState) -> Result<ParticleState> {
        let g = self.hamiltonian_gradients(s)?;
        let d = s.charge_dim;
        let mut out = s.clone();
        out.q = g.dp.clone();
        out.p = g.dq.iter().map(|v| -v).collect();
        let mut tmp = vec![0.0; d];
        for i in 0..s.count {
            let zeta = &g.dmu[i * d..(i + 1) * d];
            self.spec.ad_star_into(zeta, s.mui(i), &mut tmp);
            for b in 0..d {
                out.mu[i * d + b] = -tmp[b];
            }
        }
        if let (Some(th), Some(dth)) = (s.theta.as_ref(), out.theta.as_mut()) {
            for i in 0..s.count {
                let z = self.spec.to_matrix(&g.dmu[i * d..(i + 1) * d]);
                dth[i] = GroupElement(z * &th[i].0);
            }
        }
        Ok(out)
    }

    pub fn step_rk4(&self, s: &ParticleState, t: f64, dt: f64) -> Result<ParticleState> {
        self.check(s)?;
        let y = s.flatten();
        let y1 = rk4_step(&y, t, dt, |v| Ok(self.rhs(&s.unflatten(v))?.flatten()))?;
        Ok(s.unflatten(&y1))
    }

    /// Integrates to `t_end`, storing every `stride`-th state (plus the initial one).
    pub fn run(&self, s: &ParticleState, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory> {
        let steps = step_count(dt, t_end)?;
        let stride = stride.max(1);
        let mut traj = Trajectory {
            times: vec![0.0],
            states: vec![s.clone()],
        };
        let mut cur = s.clone();
        for k in 0..steps {
            let t = k as f64 * dt;
            cur = self.step_rk4(&cur, t, dt)?;
            if (k + 1) % stride == 0 || k + 1 == steps {
                traj.times.push((k + 1) as f64 * dt);
                traj.states.push(cur.clone());
            }
        }
        Ok(traj)
    }

    /// Body-frame charges `Ad*_{theta_i} mu_i`.
    pub fn noether_charges(&self, s: &ParticleState) -> Result<Vec<CoalgebraElement>> {
        let th = s.theta.as_ref().ok_or(Error::MissingTheta)?;
        (0..s.count)
            .map(|i| {
                self.spec
                    .ad_star_group(&th[i], &CoalgebraElement(s.mui(i).to_vec()))
            })
            .collect()
    }

    /// `<J_L(state), (w, xi)> = sum_i P_i . w(Q_i) + sum_i <mu_i, xi(Q_i)>`.
    /// With `shifted`, `P_i` is replaced by `P_i - mu_i . A(Q_i)`.
    pub fn j_left_pair(
        &self,
        s: &ParticleState,
        w: &dyn Fn(&[f64]) -> Vec<f64>,
        xi: &dyn Fn(&[f64]) -> Vec<f64>,
        shifted: bool,
    ) -> Result<f64> {
        self.check(s)?;
        let mom = if shifted { self.shifted_momenta(s) } else { s.p.clone() };
        let (n, d) = (s.space_dim, s.charge_dim);
        let mut total = 0.0;
        for i in 0..s.count {
            let wv = w(s.qi(i));
            let xv = xi(s.qi(i));
            check_len("test vector field", n, wv.len())?;
            check_len("test algebra field", d, xv.len())?;
            total += (0..n).map(|a| mom[i * n + a] * wv[a]).sum::<f64>();
            total += (0..d).map(|b| s.mu[i * d + b] * xv[b]).sum::<f64>();
        }
        Ok(total)
    }

    /// Canonical bracket in `(Q, P)` plus the Lie-Poisson term
    /// `sum_i <mu_i, [dF/dmu_i, dG/dmu_i]>`.
    pub fn reduced_bracket(&self, f: &Partials, g: &Partials, s: &ParticleState) -> Result<f64> {
        self.check(s)?;
        f.check(s)?;
        g.check(s)?;
        let d = s.charge_dim;
        let mut total = 0.0;
        for k in 0..s.q.len() {
            total += f.dq[k] * g.dp[k] - f.dp[k] * g.dq[k];
        }
        let mut br = vec![0.0; d];
        for i in 0..s.count {
            self.spec
                .bracket_into(&f.dmu[i * d..(i + 1) * d], &g.dmu[i * d..(i + 1) * d], &mut br);
            total += (0..d).map(|b| s.mu[i * d + b] * br[b]).sum::<f64>();
        }
        Ok(total)
    }
}
