use std::sync::Arc;

use epaut_core::epaut2d::{Lagrangian2D, Model2D};
use epaut_core::kernels::{apply_helmholtz, invert_helmholtz, Kernel};
use epaut_core::lie::{AlgebraElement, CoalgebraElement, LieAlgebraSpec};
use epaut_core::potential::ModalPotential;
use epaut_core::singular::{ParticleState, PeakonSystem};
use epaut_core::spectral::{Grid1D, Grid2D};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0_f64, 3)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn so3_bracket_is_antisymmetric_and_satisfies_jacobi(x in vec3(), y in vec3(), z in vec3()) {
        let g = LieAlgebraSpec::so3();
        let br = |a: &[f64], b: &[f64]| g.bracket(&AlgebraElement(a.to_vec()), &AlgebraElement(b.to_vec())).unwrap().0;
        let xy = br(&x, &y);
        let yx: Vec<f64> = br(&y, &x).iter().map(|v| -v).collect();
        prop_assert!(close(&xy, &yx, 1e-14));
        let j: Vec<f64> = (0..3)
            .map(|k| br(&x, &br(&y, &z))[k] + br(&y, &br(&z, &x))[k] + br(&z, &br(&x, &y))[k])
            .collect();
        prop_assert!(j.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn ad_star_is_dual_to_ad(x in vec3(), mu in vec3(), eta in vec3()) {
        let g = LieAlgebraSpec::so3();
        let lhs = g.ad_star(&AlgebraElement(x.clone()), &CoalgebraElement(mu.clone())).unwrap().pair(&AlgebraElement(eta.clone()));
        let rhs = dot(&mu, &g.bracket(&AlgebraElement(x), &AlgebraElement(eta)).unwrap().0);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn exp_of_a_multiple_commutes_with_its_generator(x in vec3(), s in -3.0..3.0_f64) {
        let g = LieAlgebraSpec::so3();
        let xi = AlgebraElement(x.iter().map(|v| s * v).collect());
        let m = g.exp(&xi).unwrap();
        prop_assert!(g.in_group(&m));
        let ad = g.ad_group(&m, &AlgebraElement(x.clone())).unwrap();
        prop_assert!(close(&ad.0, &x, 1e-12));
    }

    #[test]
    fn helmholtz_inverse_round_trips(coeffs in prop::collection::vec(-1.0..1.0_f64, 6), alpha in 0.1..2.0_f64) {
        let grid = Grid1D::new(10.0, 64).unwrap();
        let f: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| coeffs.iter().enumerate().map(|(k, c)| c * (0.6 * (k as f64 + 1.0) * x).sin()).sum::<f64>() + coeffs[0])
            .collect();
        let g = invert_helmholtz(&grid, &apply_helmholtz(&grid, &f, alpha).unwrap(), alpha).unwrap();
        prop_assert!(close(&f, &g, 1e-11));
    }

    #[test]
    fn line_kernels_are_even_and_peak_at_the_origin(r in 0.0..20.0_f64, alpha in 0.2..3.0_f64) {
        for k in [Kernel::helmholtz_line(alpha).unwrap(), Kernel::gaussian(alpha).unwrap()] {
            prop_assert!((k.value(r) - k.value(-r)).abs() < 1e-15);
            prop_assert!(k.value(r) <= k.value(0.0) + 1e-15);
            prop_assert!(k.value(r) >= 0.0);
        }
    }

    #[test]
    fn peakon_energy_is_labelling_invariant(
        q in prop::collection::vec(-5.0..5.0_f64, 4),
        p in prop::collection::vec(-1.0..1.0_f64, 4),
        mu in prop::collection::vec(-1.0..1.0_f64, 2),
    ) {
        let sys = PeakonSystem::new(
            Kernel::helmholtz_line(1.0).unwrap(),
            Kernel::gaussian(0.7).unwrap(),
            Arc::new(ModalPotential::constant(2, 1, vec![0.3, -0.2]).unwrap()),
            LieAlgebraSpec::abelian(1),
        )
        .unwrap();
        let s = ParticleState::new(2, 1, q, p, mu).unwrap();
        let h = sys.collective_hamiltonian(&s).unwrap();
        let hp = sys.collective_hamiltonian(&s.permuted(&[1, 0])).unwrap();
        prop_assert!((h - hp).abs() <= 1e-13 * h.abs().max(1.0));
        prop_assert!(h >= 0.0);
    }

    #[test]
    fn poisson_bracket_is_antisymmetric(a in -1.0..1.0_f64, b in -1.0..1.0_f64, c in -1.0..1.0_f64) {
        let grid = Grid2D::square(16).unwrap();
        let m = Model2D::new(grid.clone(), LieAlgebraSpec::abelian(1), Lagrangian2D::default()).unwrap();
        let f = grid.sample(|x, y| a * x.sin() + b * (x + y).cos());
        let g = grid.sample(|x, y| c * (2.0 * y).sin() + a * (x - y).sin());
        let fg = m.poisson_bracket(&f, &g).unwrap();
        let gf = m.poisson_bracket(&g, &f).unwrap();
        prop_assert!(fg.iter().zip(&gf).all(|(x, y)| (x + y).abs() < 1e-13));
        let ff = m.poisson_bracket(&f, &f).unwrap();
        prop_assert!(ff.iter().all(|v| v.abs() < 1e-13));
    }
}
