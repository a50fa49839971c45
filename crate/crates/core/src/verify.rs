//! Fast self-checks grouped by module, each with an identifier and threshold.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clebsch::{ClebschModel, ClebschPartials, ClebschState, QuadraticHamiltonian, Symmetry};
use crate::epaut1d::{FieldState1D, Model1D};
use crate::epaut2d::{random_band_limited, FieldState2D, Lagrangian2D, Model2D};
use crate::error::{Error, Result};
use crate::kernels::{apply_helmholtz, convolve_periodic, Kernel};
use crate::lie::{AlgebraElement, LieAlgebraSpec};
use crate::potential::{ModalPotential, Mode};
use crate::singular::{ParticleState, PeakonSystem};
use crate::spectral::{Grid1D, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Module {
    Lie,
    Kernels,
    Singular,
    Epaut1d,
    Epaut2d,
    Clebsch,
}

impl Module {
    pub const ALL: [Module; 6] = [
        Module::Lie,
        Module::Kernels,
        Module::Singular,
        Module::Epaut1d,
        Module::Epaut2d,
        Module::Clebsch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::Lie => "lie",
            Module::Kernels => "kernels",
            Module::Singular => "singular",
            Module::Epaut1d => "epaut1d",
            Module::Epaut2d => "epaut2d",
            Module::Clebsch => "clebsch",
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Module {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Module::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown module `{s}`")))
    }
}

/// Outcome of one check: passes when `value < threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub module: Module,
    pub description: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value < self.threshold
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn rel_drift(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max((x - v[0]).abs())) / v[0].abs().max(f64::MIN_POSITIVE)
}

fn lie_checks() -> Result<Vec<Check>> {
    let mut res: f64 = 0.0;
    for spec in (1..=4).map(LieAlgebraSpec::abelian).chain([LieAlgebraSpec::so3()]) {
        res = res.max(spec.structure_residuals().into_iter().fold(0.0, f64::max));
    }
    let so3 = LieAlgebraSpec::so3();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut rod, mut hom): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let v: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let xi = AlgebraElement(v[..3].to_vec());
        let th = xi.0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let k = so3.to_matrix(&xi.0);
        let r = nalgebra::DMatrix::identity(3, 3) + &k * (th.sin() / th) + &k * &k * ((1.0 - th.cos()) / (th * th));
        let g = so3.exp(&xi)?;
        rod = rod.max((&g.0 - r).amax());
        let (a, b) = (AlgebraElement(v[3..6].to_vec()), AlgebraElement(v[6..].to_vec()));
        let lhs = so3.ad_group(&g, &so3.bracket(&a, &b)?)?;
        let rhs = so3.bracket(&so3.ad_group(&g, &a)?, &so3.ad_group(&g, &b)?)?;
        hom = hom.max(max_diff(&lhs.0, &rhs.0));
    }
    Ok(vec![
        Check { id: "lie-structure", module: Module::Lie, description: "antisymmetry, Jacobi and representation residuals", value: res, threshold: 1e-12 },
        Check { id: "lie-exp", module: Module::Lie, description: "so3 exponential vs Rodrigues formula", value: rod, threshold: 1e-12 },
        Check { id: "lie-ad-hom", module: Module::Lie, description: "Ad_g preserves the bracket", value: hom, threshold: 1e-12 },
    ])
}

fn kernel_checks() -> Result<Vec<Check>> {
    let (alpha, l) = (0.8, 2.0 * PI);
    let k = Kernel::helmholtz_periodic(alpha, l)?;
    let closed = 1.0 / (2.0 * alpha * (0.5 * l / alpha).tanh());
    let grid = Grid1D::new(l, 256)?;
    let f: Vec<f64> = grid.points().iter().map(|x| 0.2 + x.sin() + 0.3 * (5.0 * x).cos()).collect();
    let g = convolve_periodic(&grid, &k, &f)?;
    let round = max_diff(&apply_helmholtz(&grid, &g, alpha)?, &f);
    let mut grad: f64 = 0.0;
    for kern in [Kernel::helmholtz_line(0.7)?, k, Kernel::gaussian(1.3)?] {
        for r in [0.3, 1.1, -2.0] {
            let h = 1e-6;
            let fd = (kern.value(r + h) - kern.value(r - h)) / (2.0 * h);
            grad = grad.max((fd - kern.grad(r)).abs());
        }
    }
    Ok(vec![
        Check { id: "kernels-periodic-origin", module: Module::Kernels, description: "periodic Green's function at 0 vs coth formula", value: (k.value(0.0) - closed).abs(), threshold: 1e-12 },
        Check { id: "kernels-round-trip", module: Module::Kernels, description: "convolution then Helmholtz operator", value: round, threshold: 1e-10 },
        Check { id: "kernels-grad", module: Module::Kernels, description: "kernel derivative vs central difference", value: grad, threshold: 1e-6 },
    ])
}

fn singular_checks() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = LieAlgebraSpec::so3();
    let pot = ModalPotential::new(
        2,
        3,
        (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        vec![Mode { amplitude: (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect(), wavevector: vec![0.7, -1.1], phase: 0.4 }],
    )?;
    let sys = PeakonSystem::new(Kernel::helmholtz_line(1.0)?, Kernel::gaussian(0.6)?, Arc::new(pot), spec)?;
    let s = ParticleState::new(
        2,
        3,
        (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )?;
    let g = sys.hamiltonian_gradients(&s)?;
    let h = 1e-6;
    let (mut num, mut den): (f64, f64) = (0.0, 0.0);
    for field in 0..3 {
        let exact = [&g.dq, &g.dp, &g.dmu][field];
        for (i, e) in exact.iter().enumerate() {
            let mut plus = s.clone();
            let mut minus = s.clone();
            [&mut plus.q, &mut plus.p, &mut plus.mu][field][i] += h;
            [&mut minus.q, &mut minus.p, &mut minus.mu][field][i] -= h;
            let fd = (sys.collective_hamiltonian(&plus)? - sys.collective_hamiltonian(&minus)?) / (2.0 * h);
            num = num.max((fd - e).abs());
            den = den.max(e.abs());
        }
    }
    let ch = PeakonSystem::camassa_holm(1.0, 1)?;
    let two = ParticleState::new(1, 1, vec![-2.0, 0.0], vec![2.0, 1.0], vec![0.0, 0.0])?;
    let traj = ch.run(&two, 1e-3, 2.0, 100)?;
    let hs = traj.states.iter().map(|st| ch.collective_hamiltonian(st)).collect::<Result<Vec<_>>>()?;
    let perm = [2, 0, 3, 1];
    let a = sys.rhs(&s.permuted(&perm))?;
    let b = sys.rhs(&s)?.permuted(&perm);
    let eqv = max_diff(&a.q, &b.q).max(max_diff(&a.p, &b.p)).max(max_diff(&a.mu, &b.mu));
    Ok(vec![
        Check { id: "singular-gradients", module: Module::Singular, description: "Hamiltonian gradients vs central differences", value: num / den, threshold: 1e-6 },
        Check { id: "singular-energy", module: Module::Singular, description: "two-peakon energy drift over T=2", value: rel_drift(&hs), threshold: 1e-8 },
        Check { id: "singular-permutation", module: Module::Singular, description: "right-hand side commutes with relabelling", value: eqv, threshold: 1e-13 },
    ])
}

fn epaut1d_checks() -> Result<Vec<Check>> {
    let grid = Grid1D::new(2.0 * PI, 128)?;
    let x = grid.points();
    let spec = LieAlgebraSpec::so3();
    let a: Vec<f64> = x.iter().flat_map(|x| [0.3 * x.sin(), 0.2 * (2.0 * x).cos(), 0.1]).collect();
    let m = Model1D::new(
        grid.clone(),
        Kernel::helmholtz_periodic(1.0, 2.0 * PI)?,
        Kernel::helmholtz_periodic(0.5, 2.0 * PI)?,
        spec,
        a,
    )?;
    let s = FieldState1D {
        m: x.iter().map(|x| 0.4 + x.sin() + 0.2 * (3.0 * x).cos()).collect(),
        sigma: x.iter().flat_map(|x| [x.cos(), 0.5 * (2.0 * x).sin(), 0.3 + 0.1 * x.sin()]).collect(),
    };
    let r1 = m.rhs(&s)?;
    let r2 = m.rhs_curvature(&s)?;
    let curv = max_diff(&r1.m, &r2.m).max(max_diff(&r1.sigma, &r2.sigma));
    let traj = m.run(&s, 1e-3, 0.2, 20)?;
    let hs = traj.states.iter().map(|st| m.hamiltonian(st)).collect::<Result<Vec<_>>>()?;
    let ch = Model1D::helmholtz(grid.clone(), 1.0, 0.0, LieAlgebraSpec::abelian(1))?;
    let cs = FieldState1D { m: x.iter().map(|x| x.cos()).collect(), sigma: vec![0.0; grid.n] };
    // u = cos / 2, m_t = -(u m_x + 2 u_x m) = 3 sin cos / 2
    let expect: Vec<f64> = x.iter().map(|x| 1.5 * x.sin() * x.cos()).collect();
    let chd = max_diff(&ch.rhs(&cs)?.m, &expect);
    Ok(vec![
        Check { id: "epaut1d-curvature", module: Module::Epaut1d, description: "right-hand side vs curvature form", value: curv, threshold: 1e-10 },
        Check { id: "epaut1d-energy", module: Module::Epaut1d, description: "charged energy drift over T=0.2", value: rel_drift(&hs), threshold: 1e-8 },
        Check { id: "epaut1d-ch-cosine", module: Module::Epaut1d, description: "uncharged tendency of cos x", value: chd, threshold: 1e-12 },
    ])
}

fn epaut2d_checks() -> Result<Vec<Check>> {
    let grid = Grid2D::square(64)?;
    let m = Model2D::new(grid.clone(), LieAlgebraSpec::so3(), Lagrangian2D::default())?;
    let mut sigma = vec![0.0; grid.len() * 3];
    for b in 0..3 {
        for (p, v) in random_band_limited(&grid, 4, 20 + b as u64).iter().enumerate() {
            sigma[p * 3 + b] = 0.5 * v;
        }
    }
    let s = FieldState2D { varpi: random_band_limited(&grid, 4, 19), sigma };
    let traj = m.run(&s, 2e-3, 0.2, 10)?;
    let mut e = Vec::new();
    let mut z = Vec::new();
    for st in &traj.states {
        e.push(m.energy(st)?);
        z.push(m.casimirs(st)?.charge_norm);
    }
    let eig = FieldState2D { varpi: grid.sample(|x, y| (x + y).cos()), sigma: vec![0.0; grid.len() * 3] };
    let steady = m.rhs(&eig)?.varpi.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(vec![
        Check { id: "epaut2d-energy", module: Module::Epaut2d, description: "so3 charged energy drift over T=0.2", value: rel_drift(&e), threshold: 1e-8 },
        Check { id: "epaut2d-charge-norm", module: Module::Epaut2d, description: "integrated charge norm drift over T=0.2", value: rel_drift(&z), threshold: 1e-8 },
        Check { id: "epaut2d-eigenmode", module: Module::Epaut2d, description: "Laplacian eigenmode is steady", value: steady, threshold: 1e-12 },
    ])
}

fn clebsch_checks() -> Result<Vec<Check>> {
    let grid = Grid2D::square(32)?;
    let so3 = LieAlgebraSpec::so3();
    let model = ClebschModel::new(Model2D::new(grid.clone(), so3.clone(), Lagrangian2D::default())?);
    let mut s = ClebschState::euler_seed(&grid, &so3, random_band_limited(&grid, 3, 50))?;
    s.q[0] = random_band_limited(&grid, 3, 51);
    let base = random_band_limited(&grid, 3, 52);
    s.sigma = (0..grid.len() * 3).map(|k| base[k / 3] * (1.0 + (k % 3) as f64)).collect();
    let gen = random_band_limited(&grid, 2, 53);
    let xi: Vec<f64> = (0..grid.len() * 3).map(|k| 0.4 * gen[k / 3] * (k % 3) as f64).collect();
    s.set_theta_from_algebra(&so3, &xi)?;
    let (w0, s0) = model.j_right(&s, None)?;
    let scale = w0.iter().chain(&s0).fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut eq: f64 = 0.0;
    for sym in [Symmetry::Translation { di: 5, dj: 2 }, Symmetry::Rotation90] {
        eq = eq.max(model.equivariance_check(&s, sym)? / scale);
    }

    let h = QuadraticHamiltonian { a: 0.3, b: 1.0, c: 0.7, e: vec![0.1, -0.2, 0.3] };
    let hp = model.hamiltonian_partials(&s, &h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let mut f = ClebschPartials::zeros(&s);
    for v in f.dq.iter_mut().chain(f.dp.iter_mut()).flatten().chain(f.dsigma.iter_mut()).chain(f.dtheta.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let lhs = model.bracket(&s, &f, &hp)?;
    let rhs = model.directional(&s, &f, &model.canonical_rhs(&s, &h)?)?;
    let (_, mism) = ClebschModel::calibrate_sign()?;
    Ok(vec![
        Check { id: "clebsch-equivariance", module: Module::Clebsch, description: "J_R commutes with translations and rotations", value: eq, threshold: 1e-12 },
        Check { id: "clebsch-bracket", module: Module::Clebsch, description: "{F, H} equals dF along the canonical flow", value: (lhs - rhs).abs() / rhs.abs().max(1.0), threshold: 1e-12 },
        Check { id: "clebsch-collective", module: Module::Clebsch, description: "d/dt J_R matches the direct right-hand side", value: mism[1], threshold: 1e-6 },
    ])
}

/// Runs the checks of one module, or of all modules.
pub fn run(module: Option<Module>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for m in Module::ALL {
        if module.is_some_and(|sel| sel != m) {
            continue;
        }
        out.extend(match m {
            Module::Lie => lie_checks()?,
            Module::Kernels => kernel_checks()?,
            Module::Singular => singular_checks()?,
            Module::Epaut1d => epaut1d_checks()?,
            Module::Epaut2d => epaut2d_checks()?,
            Module::Clebsch => clebsch_checks()?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_names_round_trip() {
        for m in Module::ALL {
            assert_eq!(m.name().parse::<Module>().unwrap(), m);
        }
        assert!("fluids".parse::<Module>().is_err());
    }

    #[test]
    fn all_checks_pass() {
        let checks = run(None).unwrap();
        assert_eq!(checks.len(), 18);
        for c in &checks {
            assert!(c.passed(), "{} = {:e} (threshold {:e})", c.id, c.value, c.threshold);
        }
    }

    #[test]
    fn module_filter() {
        let checks = run(Some(Module::Lie)).unwrap();
        assert!(checks.iter().all(|c| c.module == Module::Lie));
    }
}
