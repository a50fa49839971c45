use epaut_core::clebsch::{ClebschModel, ClebschState, Symmetry, CLEBSCH_SIGN};
use epaut_core::epaut2d::{random_band_limited, Lagrangian2D, Model2D};
use epaut_core::lie::LieAlgebraSpec;
use epaut_core::spectral::Grid2D;

fn model(grid: &Grid2D, spec: &LieAlgebraSpec) -> ClebschModel {
    ClebschModel::new(Model2D::new(grid.clone(), spec.clone(), Lagrangian2D::default()).unwrap())
}

#[test]
fn pure_gauge_states_carry_no_vorticity() {
    // resolved composite data: sin(x + q) is not band limited
    let grid = Grid2D::square(64).unwrap();
    let spec = LieAlgebraSpec::abelian(1);
    let q = random_band_limited(&grid, 3, 1).iter().map(|v| 0.3 * v).collect::<Vec<_>>();
    let mut p = vec![0.0; grid.len()];
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let k = grid.idx(i, j);
            p[k] = (grid.x(i) + q[k]).sin();
        }
    }
    let mut s = ClebschState::euler_seed(&grid, &spec, p).unwrap();
    s.q[0] = q;
    s.set_theta_from_algebra(&spec, &random_band_limited(&grid, 2, 2)).unwrap();
    let (w, _) = model(&grid, &spec).j_right(&s, None).unwrap();
    let worst = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn calibrated_sign_is_the_frozen_one() {
    let (sign, mism) = ClebschModel::calibrate_sign().unwrap();
    assert_eq!(sign, CLEBSCH_SIGN);
    let chosen = if sign > 0.0 { mism[0] } else { mism[1] };
    let other = if sign > 0.0 { mism[1] } else { mism[0] };
    assert!(chosen < 1e-6 && other > 0.1, "{mism:?}");
}

#[test]
fn short_collective_run_tracks_the_direct_solver() {
    let grid = Grid2D::square(32).unwrap();
    let spec = LieAlgebraSpec::abelian(1);
    let mut s = ClebschState::euler_seed(&grid, &spec, random_band_limited(&grid, 3, 5)).unwrap();
    s.sigma = random_band_limited(&grid, 3, 6).iter().map(|v| 0.5 * v).collect();
    let rep = model(&grid, &spec)
        .consistency_report(&s, 1e-3, 0.05, 10, &[Symmetry::Translation { di: 2, dj: 7 }, Symmetry::Rotation90])
        .unwrap();
    assert_eq!(rep.samples.len(), 6);
    assert!(rep.max_mismatch() < 1e-3, "{}", rep.max_mismatch());
    assert!(rep.max_equivariance() < 1e-12, "{}", rep.max_equivariance());
}
