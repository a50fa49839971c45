//! Finite-dimensional Lie algebra kernel.
//!
//! A [`LieAlgebraSpec`] carries structure constants `c[i][j][k]` with
//! `[e_i, e_j] = sum_k c[i][j][k] e_k`, an inner product `gamma` on the
//! algebra and a faithful matrix representation. Coalgebra elements are
//! identified with coefficient vectors in the dual basis, so the pairing
//! `<mu, xi>` is the plain dot product and `gamma` only enters through the
//! kinetic-energy norms.
//!
//! `ad*` follows the duality convention `<ad*_xi mu, eta> = <mu, [xi, eta]>`.

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{check_len, Error, Result};

/// Residual tolerance for the structural checks in [`LieAlgebraSpec::validate`].
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for group membership and basis expansion in the representation.
pub const REP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct CoalgebraElement(pub Vec<f64>);

/// Matrix representative of an element of the structure group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(pub DMatrix<f64>);

impl AlgebraElement {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }
}

impl CoalgebraElement {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }
    /// Duality pairing with an algebra element.
    pub fn pair(&self, xi: &AlgebraElement) -> f64 {
        self.0.iter().zip(&xi.0).map(|(a, b)| a * b).sum()
    }
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }
}

/// Structure constants, inner product and matrix representation of the
/// order-parameter algebra.
#[derive(Debug, Clone)]
pub struct LieAlgebraSpec {
    name: String,
    dim: usize,
    c: Vec<f64>,
    gamma: DMatrix<f64>,
    gamma_inv: DMatrix<f64>,
    rep_dim: usize,
    rep_basis: Vec<DMatrix<f64>>,
    // maps a flattened rep matrix to basis coefficients
    expansion: DMatrix<f64>,
    ad_invariant: bool,
    abelian: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    name: Option<String>,
    dim: usize,
    structure_constants: Vec<f64>,
    gamma: Vec<f64>,
    rep_dim: usize,
    rep_basis: Vec<Vec<f64>>,
    #[serde(default)]
    ad_invariant: bool,
}

impl LieAlgebraSpec {
    /// Builds and validates a spec. `structure_constants` is flattened as
    /// `c[(i * dim + j) * dim + k]`, `gamma` row-major, and each rep matrix
    /// row-major.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        structure_constants: Vec<f64>,
        gamma: Vec<f64>,
        rep_dim: usize,
        rep_basis: Vec<Vec<f64>>,
        ad_invariant: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dim must be positive".into()));
        }
        if rep_dim == 0 {
            return Err(Error::Validation("rep_dim must be positive".into()));
        }
        check_len("structure constants", dim * dim * dim, structure_constants.len())?;
        check_len("gamma", dim * dim, gamma.len())?;
        check_len("rep basis count", dim, rep_basis.len())?;
        for m in &rep_basis {
            check_len("rep basis matrix", rep_dim * rep_dim, m.len())?;
        }
        if structure_constants.iter().chain(&gamma).any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite entries in spec".into()));
        }
        let gamma = DMatrix::from_row_slice(dim, dim, &gamma);
        let rep_basis: Vec<DMatrix<f64>> = rep_basis
            .iter()
            .map(|m| DMatrix::from_row_slice(rep_dim, rep_dim, m))
            .collect();

        let mut b = DMatrix::zeros(rep_dim * rep_dim, dim);
        for (i, m) in rep_basis.iter().enumerate() {
            for r in 0..rep_dim {
                for s in 0..rep_dim {
                    b[(r * rep_dim + s, i)] = m[(r, s)];
                }
            }
        }
        let svd = b.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-12 * smax.max(1.0)) {
            return Err(Error::Validation(
                "representation basis matrices are linearly dependent".into(),
            ));
        }
        let expansion = svd
            .pseudo_inverse(1e-14)
            .map_err(|e| Error::Validation(e.to_string()))?;

        let gamma_inv = gamma
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Validation("gamma is singular".into()))?;
        let abelian = structure_constants.iter().all(|&v| v == 0.0);

        let spec = Self {
            name: name.into(),
            dim,
            c: structure_constants,
            gamma,
            gamma_inv,
            rep_dim,
            rep_basis,
            expansion,
            ad_invariant,
            abelian,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `abelian(k)`: zero bracket, identity metric, diagonal representation.
    pub fn abelian(k: usize) -> Self {
        let rep_basis = (0..k)
            .map(|i| {
                let mut m = vec![0.0; k * k];
                m[i * k + i] = 1.0;
                m
            })
            .collect();
        let mut gamma = vec![0.0; k * k];
        for i in 0..k {
            gamma[i * k + i] = 1.0;
        }
        Self::new(
            format!("abelian({k})"),
            k,
            vec![0.0; k * k * k],
            gamma,
            k,
            rep_basis,
            true,
        )
        .expect("built-in abelian spec is valid")
    }

    /// so(3) with `c[i][j][k] = eps_ijk`, identity metric and the standard
    /// 3x3 antisymmetric basis `(L_i)_{jk} = -eps_ijk`.
    pub fn so3() -> Self {
        let mut c = vec![0.0; 27];
        let mut rep = vec![vec![0.0; 9]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita(i, j, k);
                    c[(i * 3 + j) * 3 + k] = e;
                    rep[i][j * 3 + k] = -e;
                }
            }
        }
        let gamma = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        Self::new("so3", 3, c, gamma, 3, rep, true).expect("built-in so3 spec is valid")
    }

    /// Parses the TOML spec schema:
    ///
    /// ```toml
    /// name = "so3"                 # optional
    /// dim = 3
    /// structure_constants = [...]  # dim^3 values, c[(i*dim + j)*dim + k]
    /// gamma = [...]                # dim^2 values, row-major
    /// rep_dim = 3
    /// rep_basis = [[...], ...]     # dim matrices, rep_dim^2 values each
    /// ad_invariant = true          # optional, default false
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: SpecFile = toml::from_str(text).map_err(|e| Error::Validation(e.to_string()))?;
        Self::new(
            f.name.unwrap_or_else(|| "custom".into()),
            f.dim,
            f.structure_constants,
            f.gamma,
            f.rep_dim,
            f.rep_basis,
            f.ad_invariant,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }
    pub fn is_abelian(&self) -> bool {
        self.abelian
    }
    pub fn is_ad_invariant(&self) -> bool {
        self.ad_invariant
    }
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }
    pub fn gamma_inv(&self) -> &DMatrix<f64> {
        &self.gamma_inv
    }
    pub fn rep_basis(&self) -> &[DMatrix<f64>] {
        &self.rep_basis
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Largest residuals of the structural identities, in the order
    /// (antisymmetry, Jacobi, gamma symmetry, rep commutators, Ad-invariance).
    pub fn structure_residuals(&self) -> [f64; 5] {
        let d = self.dim;
        let mut anti: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    anti = anti.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        let mut jac: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.c(i, j, m) * self.c(m, k, l)
                                + self.c(j, k, m) * self.c(m, i, l)
                                + self.c(k, i, m) * self.c(m, j, l);
                        }
                        jac = jac.max(s.abs());
                    }
                }
            }
        }
        let sym = (&self.gamma - self.gamma.transpose()).amax();
        let mut rep: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let comm = &self.rep_basis[i] * &self.rep_basis[j]
                    - &self.rep_basis[j] * &self.rep_basis[i];
                let mut rhs = DMatrix::zeros(self.rep_dim, self.rep_dim);
                for k in 0..d {
                    rhs += &self.rep_basis[k] * self.c(i, j, k);
                }
                rep = rep.max((comm - rhs).amax());
            }
        }
        let mut adinv: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for e in 0..d {
                    // gamma([e_a, e_b], e_e) + gamma(e_b, [e_a, e_e])
                    let mut s = 0.0;
                    for k in 0..d {
                        s += self.c(a, b, k) * self.gamma[(k, e)]
                            + self.c(a, e, k) * self.gamma[(b, k)];
                    }
                    adinv = adinv.max(s.abs());
                }
            }
        }
        [anti, jac, sym, rep, adinv]
    }

    /// Checks antisymmetry, Jacobi, positivity and symmetry of gamma, the
    /// representation commutators, and Ad-invariance when flagged.
    pub fn validate(&self) -> Result<()> {
        let scale = self.c.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let tol = STRUCTURE_TOL * scale * scale;
        let [anti, jac, sym, rep, adinv] = self.structure_residuals();
        if anti > tol {
            return Err(Error::Validation(format!("structure constants not antisymmetric ({anti:e})")));
        }
        if jac > tol {
            return Err(Error::Validation(format!("Jacobi identity fails ({jac:e})")));
        }
        if sym > STRUCTURE_TOL * self.gamma.amax().max(1.0) {
            return Err(Error::Validation(format!("gamma not symmetric ({sym:e})")));
        }
        if self.gamma.clone().cholesky().is_none() {
            return Err(Error::Validation("gamma is not positive definite".into()));
        }
        if rep > tol.max(STRUCTURE_TOL) * self.rep_scale() {
            return Err(Error::Validation(format!(
                "representation does not realize the bracket ({rep:e})"
            )));
        }
        if self.ad_invariant && adinv > STRUCTURE_TOL * scale * self.gamma.amax().max(1.0) {
            return Err(Error::Validation(format!("gamma is not Ad-invariant ({adinv:e})")));
        }
        Ok(())
    }

    fn rep_scale(&self) -> f64 {
        self.rep_basis.iter().fold(1.0_f64, |m, b| m.max(b.amax())).powi(2)
    }

    pub fn bracket(&self, xi: &AlgebraElement, eta: &AlgebraElement) -> Result<AlgebraElement> {
        check_len("bracket lhs", self.dim, xi.0.len())?;
        check_len("bracket rhs", self.dim, eta.0.len())?;
        let mut out = vec![0.0; self.dim];
        self.bracket_into(&xi.0, &eta.0, &mut out);
        Ok(AlgebraElement(out))
    }

    /// Slice form of [`bracket`](Self::bracket); lengths are not checked.
    pub fn bracket_into(&self, xi: &[f64], eta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if self.abelian {
            return;
        }
        let d = self.dim;
        for i in 0..d {
            if xi[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = xi[i] * eta[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += self.c[base + k] * w;
                }
            }
        }
    }

    pub fn ad_star(&self, xi: &AlgebraElement, mu: &CoalgebraElement) -> Result<CoalgebraElement> {
        check_len("ad* algebra argument", self.dim, xi.0.len())?;
        check_len("ad* coalgebra argument", self.dim, mu.0.len())?;
        let mut out = vec![0.0; self.dim];
        self.ad_star_into(&xi.0, &mu.0, &mut out);
        Ok(CoalgebraElement(out))
    }

    /// `(ad*_xi mu)_j = sum_{i,k} c[i][j][k] xi_i mu_k`; lengths are not checked.
    pub fn ad_star_into(&self, xi: &[f64], mu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if self.abelian {
            return;
        }
        let d = self.dim;
        for i in 0..d {
            if xi[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let base = (i * d + j) * d;
                let mut s = 0.0;
                for k in 0..d {
                    s += self.c[base + k] * mu[k];
                }
                out[j] += xi[i] * s;
            }
        }
    }

    /// Raises a coalgebra element with `gamma^{-1}`.
    pub fn raise_into(&self, mu: &[f64], out: &mut [f64]) {
        for a in 0..self.dim {
            out[a] = (0..self.dim).map(|b| self.gamma_inv[(a, b)] * mu[b]).sum();
        }
    }

    /// `<mu, nu>_{gamma^{-1}}`.
    pub fn dual_inner(&self, mu: &[f64], nu: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                s += mu[a] * self.gamma_inv[(a, b)] * nu[b];
            }
        }
        s
    }

    /// Image of an algebra element in the matrix representation.
    pub fn to_matrix(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rep_dim, self.rep_dim);
        for (b, &x) in self.rep_basis.iter().zip(xi) {
            if x != 0.0 {
                m += b * x;
            }
        }
        m
    }

    /// Expands a representation matrix in the basis; fails when it lies
    /// outside the span beyond [`REP_TOL`].
    pub fn from_matrix(&self, m: &DMatrix<f64>) -> Result<Vec<f64>> {
        if m.nrows() != self.rep_dim || m.ncols() != self.rep_dim {
            return Err(Error::DimensionMismatch {
                context: "representation matrix",
                expected: self.rep_dim,
                got: m.nrows(),
            });
        }
        let r = self.rep_dim;
        let flat = nalgebra::DVector::from_fn(r * r, |idx, _| m[(idx / r, idx % r)]);
        let coeffs = &self.expansion * &flat;
        let recon = self.to_matrix(coeffs.as_slice());
        let resid = (&recon - m).amax();
        if resid > REP_TOL * m.amax().max(1.0) {
            return Err(Error::Representation(format!(
                "matrix not in span of representation basis (residual {resid:e})"
            )));
        }
        Ok(coeffs.as_slice().to_vec())
    }

    /// Least-squares basis coefficients of a representation matrix, without
    /// the span check.
    pub fn expand_matrix(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let r = self.rep_dim;
        let flat = nalgebra::DVector::from_fn(r * r, |idx, _| m[(idx / r, idx % r)]);
        (&self.expansion * flat).as_slice().to_vec()
    }

    /// Whether every basis matrix is antisymmetric, so the represented
    /// group consists of rotations.
    pub fn has_orthogonal_rep(&self) -> bool {
        !self.abelian && self.rep_basis.iter().all(|b| (b + b.transpose()).amax() == 0.0)
    }

    fn check_group(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        if g.0.nrows() != self.rep_dim || g.0.ncols() != self.rep_dim {
            return Err(Error::DimensionMismatch {
                context: "group element",
                expected: self.rep_dim,
                got: g.0.nrows(),
            });
        }
        g.0.clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix("group element is not invertible".into()))
    }

    /// Matrix of `Ad_g` in the basis: column `i` holds `Ad_g e_i`.
    pub fn ad_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        let ginv = self.check_group(g)?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (i, b) in self.rep_basis.iter().enumerate() {
            let conj = &g.0 * b * &ginv;
            let coeffs = self.from_matrix(&conj)?;
            for k in 0..self.dim {
                out[(k, i)] = coeffs[k];
            }
        }
        Ok(out)
    }

    /// `Ad_g xi = g xi g^{-1}` re-expressed in the basis.
    pub fn ad_group(&self, g: &GroupElement, xi: &AlgebraElement) -> Result<AlgebraElement> {
        check_len("Ad argument", self.dim, xi.0.len())?;
        let ginv = self.check_group(g)?;
        let conj = &g.0 * self.to_matrix(&xi.0) * ginv;
        Ok(AlgebraElement(self.from_matrix(&conj)?))
    }

    /// `Ad*_g` defined by `<Ad*_g mu, xi> = <mu, Ad_g xi>`.
    pub fn ad_star_group(&self, g: &GroupElement, mu: &CoalgebraElement) -> Result<CoalgebraElement> {
        check_len("Ad* argument", self.dim, mu.0.len())?;
        let ad = self.ad_matrix(g)?;
        let v = ad.transpose() * nalgebra::DVector::from_column_slice(&mu.0);
        Ok(CoalgebraElement(v.as_slice().to_vec()))
    }

    /// Matrix exponential of the represented element.
    pub fn exp(&self, xi: &AlgebraElement) -> Result<GroupElement> {
        check_len("exp argument", self.dim, xi.0.len())?;
        if xi.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("exp of non-finite element".into()));
        }
        Ok(GroupElement(expm(&self.to_matrix(&xi.0))))
    }

    /// Whether `g` is invertible and, for orthogonal representations such
    /// as so(3), orthogonal with unit determinant.
    pub fn in_group(&self, g: &GroupElement) -> bool {
        if self.check_group(g).is_err() {
            return false;
        }
        let antisym = self
            .rep_basis
            .iter()
            .all(|b| (b + b.transpose()).amax() == 0.0);
        if antisym && !self.abelian {
            let n = self.rep_dim;
            let orth = (&g.0.transpose() * &g.0 - DMatrix::<f64>::identity(n, n)).amax();
            return orth < REP_TOL && (g.0.determinant() - 1.0).abs() < REP_TOL;
        }
        true
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Matrix exponential by scaling and squaring around a degree-18 Taylor core.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::<f64>::identity(n, n);
    // Horner evaluation of sum_{k<=18} X^k / k!
    for k in (1..=18).rev() {
        result = DMatrix::identity(n, n) + &scaled * result / k as f64;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Nearest orthogonal matrix (polar factor). Used to keep accumulated
/// rotations on the group.
pub fn polar_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rodrigues(axis: [f64; 3], angle: f64) -> DMatrix<f64> {
        let k = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, -axis[2], axis[1], axis[2], 0.0, -axis[0], -axis[1], axis[0], 0.0],
        );
        DMatrix::identity(3, 3) + &k * angle.sin() + &k * &k * (1.0 - angle.cos())
    }

    #[test]
    fn so3_bracket_e1_e2_is_e3() {
        let s = LieAlgebraSpec::so3();
        let r = s
            .bracket(&AlgebraElement::basis(3, 0), &AlgebraElement::basis(3, 1))
            .unwrap();
        assert_eq!(r.0, vec![0.0, 0.0, 1.0]);
        // same answer from the matrix commutator
        let b = s.rep_basis();
        let comm = &b[0] * &b[1] - &b[1] * &b[0];
        assert!((comm - &b[2]).amax() < 1e-15);
    }

    #[test]
    fn abelian_bracket_and_ad_star_vanish() {
        let s = LieAlgebraSpec::abelian(3);
        let xi = AlgebraElement(vec![1.0, -2.0, 0.5]);
        let eta = AlgebraElement(vec![0.3, 4.0, 1.0]);
        assert_eq!(s.bracket(&xi, &eta).unwrap().0, vec![0.0; 3]);
        let mu = CoalgebraElement(vec![1.0, 1.0, 1.0]);
        assert_eq!(s.ad_star(&xi, &mu).unwrap().0, vec![0.0; 3]);
    }

    #[test]
    fn ad_star_e1_e2_is_minus_e3() {
        let s = LieAlgebraSpec::so3();
        let xi = AlgebraElement::basis(3, 0);
        let mu = CoalgebraElement::basis(3, 1);
        let r = s.ad_star(&xi, &mu).unwrap();
        // brute-force pairing identity over the basis
        for k in 0..3 {
            let eta = AlgebraElement::basis(3, k);
            let br = s.bracket(&xi, &eta).unwrap();
            assert!((r.pair(&eta) - mu.pair(&br)).abs() < 1e-15);
        }
        assert_eq!(r.0, vec![0.0, 0.0, -1.0]);
        let zero = s.ad_star(&AlgebraElement::zeros(3), &mu).unwrap();
        assert_eq!(zero.0, vec![0.0; 3]);
    }

    #[test]
    fn self_bracket_vanishes() {
        let s = LieAlgebraSpec::so3();
        let xi = AlgebraElement(vec![0.3, -1.2, 2.5]);
        assert!(s.bracket(&xi, &xi).unwrap().0.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = LieAlgebraSpec::so3();
        let err = s
            .bracket(&AlgebraElement(vec![1.0, 0.0]), &AlgebraElement::zeros(3))
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn ad_of_quarter_turn_maps_e1_to_e2() {
        let s = LieAlgebraSpec::so3();
        let g = GroupElement(rodrigues([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2));
        let r = s.ad_group(&g, &AlgebraElement::basis(3, 0)).unwrap();
        let expect = [0.0, 1.0, 0.0];
        for k in 0..3 {
            assert!((r.0[k] - expect[k]).abs() < 1e-14);
        }
        let id = GroupElement::identity(3);
        let xi = AlgebraElement(vec![0.1, 0.2, -0.7]);
        let back = s.ad_group(&id, &xi).unwrap();
        for k in 0..3 {
            assert!((back.0[k] - xi.0[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_group_element_rejected() {
        let s = LieAlgebraSpec::so3();
        let g = GroupElement(DMatrix::zeros(3, 3));
        assert!(matches!(
            s.ad_group(&g, &AlgebraElement::basis(3, 0)),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn out_of_span_matrix_is_a_representation_error() {
        let s = LieAlgebraSpec::so3();
        // a symmetric matrix has no so(3) expansion
        let m = DMatrix::identity(3, 3);
        assert!(matches!(s.from_matrix(&m), Err(Error::Representation(_))));
    }

    #[test]
    fn exp_examples() {
        let s = LieAlgebraSpec::so3();
        let id = s.exp(&AlgebraElement::zeros(3)).unwrap();
        assert!((id.0 - DMatrix::<f64>::identity(3, 3)).amax() == 0.0);

        let g = s
            .exp(&AlgebraElement(vec![0.0, 0.0, std::f64::consts::FRAC_PI_2]))
            .unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((g.0 - expect).amax() < 1e-14);

        let a = LieAlgebraSpec::abelian(1);
        let e = a.exp(&AlgebraElement(vec![0.7])).unwrap();
        assert!((e.0[(0, 0)] - 0.7f64.exp()).abs() < 1e-15 * 0.7f64.exp());
    }

    #[test]
    fn exp_large_argument_matches_rodrigues() {
        let s = LieAlgebraSpec::so3();
        let axis = [0.48, -0.6, 0.64];
        let angle = 7.3;
        let xi = AlgebraElement(axis.iter().map(|a| a * angle).collect());
        let g = s.exp(&xi).unwrap();
        assert!((g.0 - rodrigues(axis, angle)).amax() < 1e-12);
        assert!(s.in_group(&s.exp(&xi).unwrap()));
    }

    #[test]
    fn bad_specs_are_rejected() {
        // not antisymmetric
        let mut c = vec![0.0; 8];
        c[(0 * 2 + 1) * 2 + 0] = 1.0;
        let r = LieAlgebraSpec::new(
            "bad",
            2,
            c,
            vec![1.0, 0.0, 0.0, 1.0],
            2,
            vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]],
            false,
        );
        assert!(matches!(r, Err(Error::Validation(_))));

        // indefinite gamma
        let r = LieAlgebraSpec::new(
            "bad",
            1,
            vec![0.0],
            vec![-1.0],
            1,
            vec![vec![1.0]],
            false,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn toml_round_trip_of_so3() {
        let s = LieAlgebraSpec::so3();
        let mut c = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c.push(s.c(i, j, k).to_string());
                }
            }
        }
        let basis: Vec<String> = s
            .rep_basis()
            .iter()
            .map(|b| {
                let v: Vec<String> = (0..9).map(|q| b[(q / 3, q % 3)].to_string()).collect();
                format!("[{}]", v.join(", "))
            })
            .collect();
        let text = format!(
            "name = \"so3-file\"\ndim = 3\nstructure_constants = [{}]\ngamma = [1.0,0.0,0.0,0.0,1.0,0.0,0.0,0.0,1.0]\nrep_dim = 3\nrep_basis = [{}]\nad_invariant = true\n",
            c.join(", "),
            basis.join(", ")
        );
        let parsed = LieAlgebraSpec::from_toml_str(&text).unwrap();
        assert_eq!(parsed.dim(), 3);
        assert_eq!(parsed.name(), "so3-file");
        assert!(!parsed.is_abelian());
        assert!(LieAlgebraSpec::from_toml_str("dim = 1\nbogus = 2").is_err());
    }
}
