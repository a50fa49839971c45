//! Dispatches a validated scenario to the solvers and collects its outputs.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use epaut_core::clebsch::{ClebschModel, ClebschState, Symmetry};
use epaut_core::epaut1d::{mollified_delta, FieldState1D, FlowMap1D, Model1D};
use epaut_core::epaut2d::{
    band_project, preset_dipole, preset_shear, random_band_limited, FieldState2D, Lagrangian2D, MaterialLoop, Model2D,
};
use epaut_core::kernels::Kernel;
use epaut_core::potential::{ModalPotential, Mode};
use epaut_core::singular::{ParticleState, PeakonSystem};
use epaut_core::spectral::{Grid1D, Grid2D};
use epaut_core::verify;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::output::{fmt_float, Csv, Files};
use crate::plot;
use crate::scenario::{
    ClebschParams, Field1DParams, Field2DParams, Format, Group, Init, Kind, KernelChoice, Params, PeakonInit,
    PeakonParams, PotentialChoice, Scenario, SymmetryChoice,
};
use crate::{CliError, Result};

/// Markers on the material loop of 2D runs.
pub const LOOP_MARKERS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub id: String,
    pub value: f64,
    /// `None` marks an informational value.
    pub threshold: Option<f64>,
}

impl Diagnostic {
    fn info(id: &str, value: f64) -> Self {
        Self { id: id.into(), value, threshold: None }
    }

    fn check(id: &str, value: f64, threshold: f64) -> Self {
        Self { id: id.into(), value, threshold: Some(threshold) }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.threshold.is_none_or(|t| self.value < t)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub wall_time: Duration,
    pub diagnostics: Vec<Diagnostic>,
}

impl RunReport {
    pub fn failures(&self) -> usize {
        self.diagnostics.iter().filter(|d| !d.passed()).count()
    }

    /// `id,value,threshold,pass`; wall time is deliberately left out so the file is reproducible.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut c = Csv::with_header(&["id", "value", "threshold", "pass"]);
        for d in &self.diagnostics {
            c.line(&[
                d.id.clone(),
                fmt_float(d.value),
                d.threshold.map(fmt_float).unwrap_or_default(),
                d.passed().to_string(),
            ]);
        }
        c.into_bytes()
    }
}

/// Largest `|x - x0|` relative to `|x0|` (absolute when `x0 = 0`).
pub fn drift(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    let m = xs.iter().fold(0.0_f64, |m, v| m.max((v - x0).abs()));
    if x0 != 0.0 {
        m / x0.abs()
    } else {
        m
    }
}

fn core_err(ctx: &str) -> impl Fn(epaut_core::Error) -> CliError + '_ {
    move |source| CliError::Run { context: ctx.to_string(), source }
}

fn expr_err(e: String) -> CliError {
    CliError::Data(e)
}

/// Runs a scenario and returns its report plus every output file, in a fixed order.
pub fn run(s: &Scenario) -> Result<(RunReport, Files)> {
    let start = Instant::now();
    let ctx = format!("scenario `{}` ({})", s.name, s.kind);
    let stride = s.output.stride;
    let (diagnostics, mut files) = match &s.params {
        Params::Peakons(p) => run_peakons(p, s.seed, stride, &ctx)?,
        Params::Field1D(p) => run_1d(p, s.kind, stride, &ctx)?,
        Params::Field2D(p) => run_2d(p, s.kind, s.seed, stride, s.output.formats.contains(&Format::Svg), &ctx)?,
        Params::Clebsch(p) => run_clebsch(p, s.seed, stride, &ctx)?,
        Params::Verify(mods) => run_verify(mods, &ctx)?,
    };
    if s.output.formats.contains(&Format::Svg) {
        let mut svgs = Vec::new();
        for (name, bytes) in &files {
            if let Some(stem) = name.strip_suffix(".csv") {
                if stem.starts_with("varpi_") || stem == "report" {
                    continue;
                }
                let text = String::from_utf8_lossy(bytes);
                svgs.push((format!("{stem}.svg"), plot::render(&text, &format!("{} {stem}", s.name))?.into_bytes()));
            }
        }
        files.extend(svgs);
    }
    let report = RunReport { name: s.name.clone(), wall_time: start.elapsed(), diagnostics };
    files.push(("report.csv".into(), report.to_csv()));
    Ok((report, files))
}

type Outputs = (Vec<Diagnostic>, Files);

fn kernel(choice: KernelChoice, alpha: f64) -> epaut_core::Result<Kernel> {
    match choice {
        KernelChoice::Helmholtz => Kernel::helmholtz_line(alpha),
        KernelChoice::Gaussian => Kernel::gaussian(alpha),
    }
}

fn labels(prefix: &str, count: usize, comps: usize) -> Vec<String> {
    (1..=count)
        .flat_map(|i| {
            (1..=comps).map(move |a| if comps == 1 { format!("{prefix}{i}") } else { format!("{prefix}{i}_{a}") })
        })
        .collect()
}

fn initial_particles(p: &PeakonParams, seed: u64) -> epaut_core::Result<ParticleState> {
    let (n, d) = (p.dim, p.group.dim());
    match &p.init {
        PeakonInit::Explicit { q, p: mom, mu } => ParticleState::new(n, d, q.clone(), mom.clone(), mu.clone()),
        PeakonInit::Preset { name, count } if name == "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = (0..count * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mom = (0..count * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mu = (0..count * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            ParticleState::new(n, d, q, mom, mu)
        }
        PeakonInit::Preset { .. } => {
            let mut q = vec![0.0; 2 * n];
            let mut mom = vec![0.0; 2 * n];
            q[0] = -4.0;
            mom[0] = 2.0;
            mom[n] = 1.0;
            ParticleState::new(n, d, q, mom, vec![0.0; 2 * d])
        }
    }
}

fn run_peakons(p: &PeakonParams, seed: u64, stride: usize, ctx: &str) -> Result<Outputs> {
    let e = core_err(ctx);
    let (n, d) = (p.dim, p.group.dim());
    let spec = p.group.spec();
    let potential = match &p.potential {
        PotentialChoice::Zero => ModalPotential::zero(n, d),
        PotentialChoice::Constant(v) => ModalPotential::constant(n, d, v.clone()).map_err(&e)?,
        PotentialChoice::Wave { amplitude, wavenumber } => {
            let mut k = vec![0.0; n];
            k[0] = *wavenumber;
            let mode = Mode { amplitude: vec![*amplitude; n * d], wavevector: k, phase: 0.0 };
            ModalPotential::new(n, d, vec![0.0; n * d], vec![mode]).map_err(&e)?
        }
    };
    let field_free = !matches!(p.potential, PotentialChoice::Wave { .. });
    let a_zero = potential.is_zero();
    let sys = PeakonSystem::new(
        kernel(p.kernel1, p.alpha1).map_err(&e)?,
        kernel(p.kernel2, p.alpha2).map_err(&e)?,
        Arc::new(potential),
        spec.clone(),
    )
    .map_err(&e)?;
    let s0 = initial_particles(p, seed).map_err(&e)?.with_identity_theta(spec.rep_dim());
    let traj = sys.run(&s0, p.dt, p.t_end, stride).map_err(&e)?;
    let count = s0.count;

    let mut cols = vec!["t".to_string()];
    cols.extend(labels("Q", count, n));
    cols.extend(labels("P", count, n));
    cols.push("H".into());
    cols.extend(labels("mu", count, d));
    cols.extend(labels("N", count, d));
    let mut csv = Csv::with_header(&cols);
    let mut hs = Vec::new();
    let mut moms: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut charges: Vec<Vec<f64>> = Vec::new();
    for (t, st) in traj.times.iter().zip(&traj.states) {
        let h = sys.collective_hamiltonian(st).map_err(&e)?;
        let nc: Vec<f64> = sys.noether_charges(st).map_err(&e)?.into_iter().flat_map(|c| c.0).collect();
        let mut row = vec![*t];
        row.extend(&st.q);
        row.extend(&st.p);
        row.push(h);
        row.extend(&st.mu);
        row.extend(&nc);
        csv.row(row);
        hs.push(h);
        for (a, v) in st.total_momentum().into_iter().enumerate() {
            moms[a].push(v);
        }
        charges.push(nc);
    }
    let mut diags = vec![Diagnostic::check("energy_drift", drift(&hs), 1e-8)];
    let mdrift = moms.iter().fold(0.0_f64, |m, c| m.max(drift(c)));
    diags.push(if field_free {
        Diagnostic::check("momentum_drift", mdrift, 1e-10)
    } else {
        Diagnostic::info("momentum_drift", mdrift)
    });
    let ndrift = charges
        .iter()
        .flat_map(|c| c.iter().zip(&charges[0]).map(|(a, b)| (a - b).abs()))
        .fold(0.0_f64, f64::max);
    diags.push(if a_zero || matches!(p.group, Group::Abelian(_)) {
        Diagnostic::check("noether_charge_drift", ndrift, 1e-6)
    } else {
        Diagnostic::info("noether_charge_drift", ndrift)
    });
    diags.push(Diagnostic::info("final_time", *traj.times.last().unwrap()));
    Ok((diags, vec![("trajectory.csv".into(), csv.into_bytes())]))
}

fn sample_1d(init: &Init, grid: &Grid1D, comps: usize, preset: impl Fn(&str, usize, f64) -> f64) -> Result<Vec<f64>> {
    let n = grid.n;
    let mut out = vec![0.0; n * comps];
    match init {
        Init::Preset(name) => {
            for i in 0..n {
                for b in 0..comps {
                    out[i * comps + b] = preset(name, b, grid.x(i));
                }
            }
        }
        Init::Expr(exprs) => {
            for (b, src) in exprs.iter().enumerate() {
                let ex = Expr::parse(src).map_err(expr_err)?;
                let vals = ex.sample((0..n).map(|i| (grid.x(i), 0.0)), grid.l).map_err(expr_err)?;
                for (i, v) in vals.into_iter().enumerate() {
                    out[i * comps + b] = v;
                }
            }
        }
    }
    if let Some(v) = out.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Data(format!("initial data evaluates to {v}")));
    }
    Ok(out)
}

fn run_1d(p: &Field1DParams, kind: Kind, stride: usize, ctx: &str) -> Result<Outputs> {
    let e = core_err(ctx);
    let grid = Grid1D::new(p.length, p.n).map_err(&e)?;
    let d = p.group.dim();
    let l = p.length;
    let bump = |x: f64, c: f64| (-((x - c) / (0.1 * l)).powi(2)).exp();
    let m = match &p.m {
        Init::Preset(name) if name == "peakon" => mollified_delta(&grid, 0.5 * l, 3.0 * grid.dx()),
        other => sample_1d(other, &grid, 1, |name, _, x| match name {
            "gaussian" => bump(x, 0.5 * l),
            "cosine" => 0.5 + 0.4 * (2.0 * PI * x / l).cos(),
            _ => 0.0,
        })?,
    };
    let sigma = sample_1d(&p.sigma, &grid, d, |name, b, x| match name {
        "bump" => 1.0 + 0.3 * bump(x, (0.3 + 0.2 * b as f64) * l),
        "constant" => 1.0,
        _ => 0.0,
    })?;
    let a = sample_1d(&p.a, &grid, d, |name, _, x| match name {
        "constant" => 0.3,
        "wave" => 0.3 * (2.0 * PI * x / l).sin(),
        _ => 0.0,
    })?;
    let model = Model1D::new(
        grid.clone(),
        Kernel::helmholtz_or_identity(p.alpha1).map_err(&e)?,
        Kernel::helmholtz_or_identity(p.alpha2).map_err(&e)?,
        p.group.spec(),
        a,
    )
    .map_err(&e)?;
    debug_assert!(kind == Kind::Ch2 || p.alpha2 > 0.0);
    let s0 = FieldState1D { m, sigma };
    let (states, flows) = model.run_with_flow_map(&s0, &FlowMap1D::identity(&grid), p.dt, p.t_end).map_err(&e)?;
    let last = states.len() - 1;
    let samples: Vec<usize> = (0..=last).filter(|k| k % stride == 0 || *k == last).collect();
    let circ = |k: usize| model.circulation_and_source(&states[k], &flows[k]).map_err(&e);

    let mut cols = vec!["t".to_string(), "h".to_string()];
    cols.extend((1..=d).map(|b| format!("int_sigma_{b}")));
    cols.push("kn_residual".into());
    let mut diag = Csv::with_header(&cols);
    let mut m_csv = Csv::headerless();
    let mut sigma_csv: Vec<Csv> = (0..d).map(|_| Csv::headerless()).collect();
    let (mut hs, mut charges, mut kn) = (Vec::new(), vec![Vec::new(); d], 0.0_f64);
    for &k in &samples {
        let st = &states[k];
        let h = model.hamiltonian(st).map_err(&e)?;
        let q = model.total_charge(st);
        let (c, src) = circ(k)?;
        let dc = if last == 0 {
            0.0
        } else if k == 0 {
            (circ(1)?.0 - c) / p.dt
        } else if k == last {
            (c - circ(k - 1)?.0) / p.dt
        } else {
            (circ(k + 1)?.0 - circ(k - 1)?.0) / (2.0 * p.dt)
        };
        let res = (dc - src).abs() / c.abs().max(1.0);
        if k != 0 && k != last {
            kn = kn.max(res);
        }
        let mut row = vec![k as f64 * p.dt, h];
        row.extend(&q);
        row.push(res);
        diag.row(row);
        m_csv.row(st.m.iter().copied());
        for (b, csv) in sigma_csv.iter_mut().enumerate() {
            csv.row(st.sigma.iter().skip(b).step_by(d).copied());
        }
        hs.push(h);
        for (b, v) in q.into_iter().enumerate() {
            charges[b].push(v);
        }
    }
    let mut diags = vec![Diagnostic::check("energy_drift", drift(&hs), 1e-6)];
    let cd = charges.iter().fold(0.0_f64, |m, c| m.max(drift(c)));
    diags.push(if matches!(p.group, Group::Abelian(_)) {
        Diagnostic::check("charge_drift", cd, 1e-10)
    } else {
        Diagnostic::info("charge_drift", cd)
    });
    diags.push(Diagnostic::check("kelvin_noether_residual", kn, 1e-3));
    let mut files: Files = vec![("diagnostics.csv".into(), diag.into_bytes()), ("m.csv".into(), m_csv.into_bytes())];
    for (b, csv) in sigma_csv.into_iter().enumerate() {
        let name = if d == 1 { "sigma.csv".to_string() } else { format!("sigma_{}.csv", b + 1) };
        files.push((name, csv.into_bytes()));
    }
    Ok((diags, files))
}

fn sample_2d(init: &Init, grid: &Grid2D, comps: usize, preset: impl Fn(&str, usize) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let len = grid.len();
    let mut out = vec![0.0; len * comps];
    for b in 0..comps {
        let col = match init {
            Init::Preset(name) => preset(name, b)?,
            Init::Expr(exprs) => {
                let ex = Expr::parse(&exprs[b]).map_err(expr_err)?;
                let pts = (0..grid.nx).flat_map(|i| (0..grid.ny).map(move |j| (i, j)));
                let raw = ex.sample(pts.map(|(i, j)| (grid.x(i), grid.y(j))), grid.lx).map_err(expr_err)?;
                if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::Data(format!("initial data evaluates to {v}")));
                }
                band_project(grid, &raw).map_err(|source| CliError::Run { context: "band projection".into(), source })?
            }
        };
        for (p, v) in col.into_iter().enumerate() {
            out[p * comps + b] = v;
        }
    }
    Ok(out)
}

fn snapshot(grid: &Grid2D, f: &[f64]) -> Vec<u8> {
    let mut c = Csv::headerless();
    for j in 0..grid.ny {
        c.row((0..grid.nx).map(|i| f[grid.idx(i, j)]));
    }
    c.into_bytes()
}

fn run_2d(p: &Field2DParams, kind: Kind, seed: u64, stride: usize, svg: bool, ctx: &str) -> Result<Outputs> {
    let e = core_err(ctx);
    let grid = Grid2D::new(p.length, p.length, p.n, p.n).map_err(&e)?;
    let d = p.group.dim();
    let varpi = sample_2d(&p.varpi, &grid, 1, |name, _| {
        Ok(match name {
            "random" => random_band_limited(&grid, p.kmax, seed),
            "shear" => preset_shear(&grid).map_err(&e)?,
            "dipole" => preset_dipole(&grid).map_err(&e)?,
            _ => vec![0.0; grid.len()],
        })
    })?;
    let sigma = sample_2d(&p.sigma, &grid, d, |name, b| {
        Ok(match name {
            "random" => random_band_limited(&grid, p.kmax, seed + 1 + b as u64).into_iter().map(|v| 0.5 * v).collect(),
            _ => vec![0.0; grid.len()],
        })
    })?;
    let charged = sigma.iter().any(|v| *v != 0.0);
    let model = Model2D::new(
        grid.clone(),
        p.group.spec(),
        Lagrangian2D { alpha_psi: p.alpha_psi, alpha_nu: p.alpha_nu },
    )
    .map_err(&e)?;
    debug_assert!(kind == Kind::Euler2d || matches!(p.group, Group::Abelian(_)));
    let s0 = FieldState2D { varpi, sigma };
    let c = 0.5 * p.length;
    let lp = MaterialLoop::circle([c, c], p.loop_radius, LOOP_MARKERS).map_err(&e)?;
    let circ_scale = {
        let psi = model.stream(&s0.varpi).map_err(&e)?;
        let (u1, u2) = model.velocity(&psi).map_err(&e)?;
        let umax = u1.iter().zip(&u2).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)));
        lp.length() * umax
    };
    let samples = model.run_with_loop(&s0, &lp, p.dt, p.t_end, stride).map_err(&e)?;

    let mut cols = vec!["t", "energy", "total_vorticity", "enstrophy"].into_iter().map(String::from).collect::<Vec<_>>();
    cols.extend((1..=d).map(|b| format!("charge_square_{b}")));
    cols.push("charge_norm".into());
    cols.push("circulation".into());
    let mut diag = Csv::with_header(&cols);
    let mut files: Files = Vec::new();
    let (mut es, mut zs, mut gs) = (Vec::new(), Vec::new(), Vec::new());
    let mut squares: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (k, (t, st, _, gamma)) in samples.iter().enumerate() {
        let en = model.energy(st).map_err(&e)?;
        let cas = model.casimirs(st).map_err(&e)?;
        let mut row = vec![*t, en, cas.total_vorticity, cas.enstrophy];
        row.extend(&cas.charge_squares);
        row.push(cas.charge_norm);
        row.push(*gamma);
        diag.row(row);
        es.push(en);
        zs.push(cas.enstrophy);
        gs.push(*gamma);
        for (b, v) in cas.charge_squares.iter().enumerate() {
            squares[b].push(*v);
        }
        let name = format!("varpi_{k:05}");
        let bytes = snapshot(&grid, &st.varpi);
        if svg {
            let text = String::from_utf8_lossy(&bytes);
            let title = format!("varpi t = {t}");
            files.push((format!("{name}.svg"), plot::render(&text, &title)?.into_bytes()));
        }
        files.push((format!("{name}.csv"), bytes));
    }
    let mut diags = vec![Diagnostic::check("energy_drift", drift(&es), 1e-6)];
    let zd = drift(&zs);
    diags.push(if charged { Diagnostic::info("enstrophy_drift", zd) } else { Diagnostic::check("enstrophy_drift", zd, 1e-6) });
    let sd = squares.iter().fold(0.0_f64, |m, c| m.max(drift(c)));
    diags.push(if matches!(p.group, Group::Abelian(_)) {
        Diagnostic::check("charge_square_drift", sd, 1e-6)
    } else {
        Diagnostic::info("charge_square_drift", sd)
    });
    let g0 = gs[0];
    let gd = gs.iter().fold(0.0_f64, |m, g| m.max((g - g0).abs())) / circ_scale.max(f64::MIN_POSITIVE);
    diags.push(if charged { Diagnostic::info("circulation_drift", gd) } else { Diagnostic::check("circulation_drift", gd, 1e-3) });
    files.insert(0, ("diagnostics.csv".into(), diag.into_bytes()));
    Ok((diags, files))
}

fn clebsch_seed(p: &ClebschParams, grid: &Grid2D, seed: u64) -> Result<ClebschState> {
    let spec = p.group.spec();
    let d = spec.dim();
    let e = core_err("clebsch seed");
    let rnd = |k: u64, kmax: usize| random_band_limited(grid, kmax, seed + k);
    let mut s = match p.seed_preset.as_str() {
        "generating" => {
            let q = rnd(0, p.kmax).into_iter().map(|v| 0.3 * v).collect::<Vec<_>>();
            let pv = (0..grid.nx)
                .flat_map(|i| (0..grid.ny).map(move |j| (i, j)))
                .map(|(i, j)| (grid.x(i) + q[grid.idx(i, j)]).sin())
                .collect();
            let mut s = ClebschState::euler_seed(grid, &spec, pv).map_err(&e)?;
            s.q[0] = q;
            s
        }
        _ => ClebschState::euler_seed(grid, &spec, rnd(0, p.kmax)).map_err(&e)?,
    };
    if p.seed_preset == "charged" {
        let cols: Vec<Vec<f64>> = (0..d).map(|b| rnd(1 + b as u64, p.kmax)).collect();
        s.sigma = (0..grid.len() * d).map(|k| 0.5 * cols[k % d][k / d]).collect();
        if matches!(p.group, Group::Abelian(_)) {
            let gens: Vec<Vec<f64>> = (0..d).map(|b| rnd(10 + b as u64, p.kmax)).collect();
            let phase: Vec<f64> = (0..grid.len() * d).map(|k| 0.4 * gens[k % d][k / d]).collect();
            s.set_theta_from_algebra(&spec, &phase).map_err(&e)?;
        }
    }
    Ok(s)
}

fn run_clebsch(p: &ClebschParams, seed: u64, stride: usize, ctx: &str) -> Result<Outputs> {
    let e = core_err(ctx);
    let grid = Grid2D::square(p.n).map_err(&e)?;
    let model = ClebschModel::new(Model2D::new(grid.clone(), p.group.spec(), Lagrangian2D::default()).map_err(&e)?);
    let s0 = clebsch_seed(p, &grid, seed)?;
    let syms: Vec<Symmetry> = p
        .symmetries
        .iter()
        .map(|s| match s {
            SymmetryChoice::Translation => Symmetry::Translation { di: 3 % p.n, dj: 5 % p.n },
            SymmetryChoice::Rotation => Symmetry::Rotation90,
        })
        .collect();
    let rep = model.consistency_report(&s0, p.dt, p.t_end, stride, &syms).map_err(&e)?;
    let mut csv = Csv::with_header(&["t", "varpi_mismatch", "sigma_mismatch", "equivariance"]);
    for smp in &rep.samples {
        csv.row([smp.t, smp.varpi_mismatch, smp.sigma_mismatch, smp.equivariance]);
    }
    let mut diags = vec![Diagnostic::check("consistency_mismatch", rep.max_mismatch(), 1e-3)];
    if !syms.is_empty() {
        diags.push(Diagnostic::check("equivariance_residual", rep.max_equivariance(), 1e-12));
    }
    diags.push(Diagnostic::info("reprojections", rep.reprojections as f64));
    Ok((diags, vec![("consistency.csv".into(), csv.into_bytes())]))
}

fn run_verify(mods: &[verify::Module], ctx: &str) -> Result<Outputs> {
    let e = core_err(ctx);
    let mut diags = Vec::new();
    for m in mods {
        for c in verify::run(Some(*m)).map_err(&e)? {
            diags.push(Diagnostic::check(c.id, c.value, c.threshold));
        }
    }
    Ok((diags, Vec::new()))
}
