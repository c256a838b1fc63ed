//! Representation data `(rho, psi, e)`: a positive definite symmetric form on
//! a real vector space `U`, a linear map from the algebra `V` into the
//! rho-self-adjoint endomorphisms of `U`, and a base point with `psi(e) = I`.
//!
//! Shipped configurations are the natural special representations of each
//! algebra kind: the real line acting on itself, symmetric matrices acting on
//! column vectors, Hermitian matrices acting on the realified `R^{2n}`,
//! spin factors acting through anticommuting symmetric Clifford generators,
//! and blockwise direct sums. Custom configurations enter through the raw
//! pipeline (symmetrize, reduce, normalize) with exact rational data.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jordan::{AlgebraDescriptor, AlgebraElement, AlgebraKind};
use crate::linalg::{cholesky, sym_eigen, sym_sqrt, CMat, LuReal, Mat};
use crate::rational::{
    is_integer_matrix, rat_inverse, rat_int, rat_kernel, rat_rank, rat_solve, rmat_to_float,
    rvec_to_float, Rat, RMat,
};
use crate::scalar::{Real, C};

/// Positive definite symmetric bilinear form, stored as its Gram matrix.
#[derive(Debug, Clone)]
pub struct BilinearFormRho {
    gram: RMat,
}

impl BilinearFormRho {
    pub fn new(gram: RMat) -> Result<Self> {
        if gram.rows() != gram.cols() {
            return Err(Error::InvalidConfiguration("rho Gram must be square".into()));
        }
        if gram != gram.transpose() {
            return Err(Error::InvalidConfiguration("rho Gram must be symmetric".into()));
        }
        let f: Mat<f64> = rmat_to_float(&gram);
        cholesky(&f).map_err(|_| {
            Error::InvalidConfiguration("rho Gram must be positive definite".into())
        })?;
        Ok(BilinearFormRho { gram })
    }

    pub fn standard(dim: usize) -> Self {
        BilinearFormRho {
            gram: RMat::identity(dim),
        }
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }
}

/// Raw (pre-normalization) representation data, exact rational throughout.
#[derive(Debug, Clone)]
pub struct RawRepresentation {
    pub dim_v: usize,
    pub dim_u: usize,
    pub rho: RMat,
    pub psi_basis: Vec<RMat>,
    pub base_point: Vec<Rat>,
}

impl RawRepresentation {
    pub fn new(rho: RMat, psi_basis: Vec<RMat>, base_point: Vec<Rat>) -> Result<Self> {
        let dim_u = rho.rows();
        let dim_v = psi_basis.len();
        if base_point.len() != dim_v {
            return Err(Error::DimensionMismatch {
                expected: dim_v,
                got: base_point.len(),
            });
        }
        for m in &psi_basis {
            if m.rows() != dim_u || m.cols() != dim_u {
                return Err(Error::DimensionMismatch {
                    expected: dim_u,
                    got: m.rows(),
                });
            }
        }
        BilinearFormRho::new(rho.clone())?;
        Ok(RawRepresentation {
            dim_v,
            dim_u,
            rho,
            psi_basis,
            base_point,
        })
    }

    pub fn psi_of(&self, coords: &[Rat]) -> RMat {
        let mut acc = RMat::zeros(self.dim_u, self.dim_u);
        for (c, m) in coords.iter().zip(&self.psi_basis) {
            acc = acc.add(&m.scale(c.clone()));
        }
        acc
    }

    fn is_rho_symmetric(&self) -> bool {
        self.psi_basis
            .iter()
            .all(|m| m.transpose().mul(&self.rho) == self.rho.mul(m))
    }
}

/// `psi_0(x) = (psi(x) + psi^rho(x)) / 2`: the unique rho-self-adjoint map
/// inducing the same quadratic values `rho(psi(x)u, u)`.
pub fn symmetrize_psi(raw: &RawRepresentation) -> RawRepresentation {
    let rho_inv = rat_inverse(&raw.rho).expect("rho is positive definite");
    let half = Rat::new(1.into(), 2.into());
    let psi_basis = raw
        .psi_basis
        .iter()
        .map(|m| {
            let adj = rho_inv.mul(&m.transpose()).mul(&raw.rho);
            m.add(&adj).scale(half.clone())
        })
        .collect();
    RawRepresentation {
        psi_basis,
        ..raw.clone()
    }
}

/// Quotient the domain by the kernel of `psi`, leaving an injective map and a
/// regular cone. Errors when the kernel is everything.
pub fn reduce_domain(raw: &RawRepresentation) -> Result<RawRepresentation> {
    if !raw.is_rho_symmetric() {
        return Err(Error::UnsupportedConfiguration(
            "reduce_domain expects a symmetrized representation".into(),
        ));
    }
    let nn = raw.dim_u * raw.dim_u;
    let stacked = RMat::from_fn(nn, raw.dim_v, |i, j| {
        raw.psi_basis[j].at(i / raw.dim_u, i % raw.dim_u).clone()
    });
    let kernel = rat_kernel(&stacked);
    if kernel.cols() == 0 {
        return Ok(raw.clone());
    }
    // Pivot coordinates give a complement of the kernel.
    let pivots = pivot_columns(&stacked);
    if pivots.is_empty() {
        return Err(Error::UnsupportedConfiguration(
            "psi vanishes identically: no cone".into(),
        ));
    }
    let psi_basis: Vec<RMat> = pivots.iter().map(|&p| raw.psi_basis[p].clone()).collect();
    // Express psi(e) in the reduced basis via exact normal equations.
    let pe = raw.psi_of(&raw.base_point);
    let a = RMat::from_fn(nn, pivots.len(), |i, j| {
        psi_basis[j].at(i / raw.dim_u, i % raw.dim_u).clone()
    });
    let b: Vec<Rat> = (0..nn)
        .map(|i| pe.at(i / raw.dim_u, i % raw.dim_u).clone())
        .collect();
    let at = a.transpose();
    let base_point = rat_solve(&at.mul(&a), &at.mul_vec(&b))?;
    RawRepresentation::new(raw.rho.clone(), psi_basis, base_point)
}

fn pivot_columns(m: &RMat) -> Vec<usize> {
    // Rank-revealing pass: a column is a pivot if it increases the rank of
    // the prefix.
    let mut pivots = Vec::new();
    let mut current = RMat::zeros(m.rows(), 0);
    for c in 0..m.cols() {
        let candidate = RMat::from_fn(m.rows(), current.cols() + 1, |i, j| {
            if j < current.cols() {
                current.at(i, j).clone()
            } else {
                m.at(i, c).clone()
            }
        });
        if rat_rank(&candidate) > current.cols() {
            pivots.push(c);
            current = candidate;
        }
    }
    pivots
}

/// Rescale a representation with `psi(e) != I` (but positive definite) into
/// one with `psi(e) = I`, transforming the lattice along.
///
/// With `P = psi(e)` the normalized data is `rho_new = rho P` (as Grams),
/// `psi_new(x) = P^{-1} psi(x)` and `lattice_new = P^{-1} lattice`; theta
/// values are unchanged under `u -> P^{-1} u`.
pub fn normalize_basepoint(
    raw: &RawRepresentation,
    lattice: &crate::lattice::Lattice,
) -> Result<(RawRepresentation, crate::lattice::Lattice)> {
    let p = raw.psi_of(&raw.base_point);
    let pf: Mat<f64> = rmat_to_float(&p);
    cholesky(&pf).map_err(|_| Error::NotPositiveDefinite)?;
    if p == RMat::identity(raw.dim_u) {
        return Ok((raw.clone(), lattice.clone()));
    }
    let p_inv = rat_inverse(&p)?;
    let rho_new = raw.rho.mul(&p);
    if rho_new != rho_new.transpose() {
        return Err(Error::UnsupportedConfiguration(
            "psi(e) is not rho-self-adjoint".into(),
        ));
    }
    let psi_basis = raw.psi_basis.iter().map(|m| p_inv.mul(m)).collect();
    let normalized = RawRepresentation::new(rho_new, psi_basis, raw.base_point.clone())?;
    let new_lattice = lattice.transformed(&p_inv)?;
    Ok((normalized, new_lattice))
}

/// Cone membership verdict with the boundary reported separately.
#[derive(Debug, Clone, Copy)]
pub struct ConeStatus<R> {
    pub inside: bool,
    pub boundary: bool,
    pub min_eigenvalue: R,
    pub max_eigenvalue: R,
}

/// The full configuration used by the theta engine and the identity checks.
///
/// Float mirrors of the exact data are precomputed once; the struct is
/// immutable afterwards and safe to share across threads.
#[derive(Clone)]
pub struct RepresentationConfig<R: Real> {
    algebra: Option<Arc<AlgebraDescriptor>>,
    dim_v: usize,
    dim_u: usize,
    rho_exact: RMat,
    sigma_exact: RMat,
    psi_basis_exact: Vec<RMat>,
    base_point_exact: Vec<Rat>,
    rho: Mat<R>,
    sigma: Mat<R>,
    psi_basis: Vec<Mat<R>>,
    base_point: Vec<R>,
    rho_sqrt: Mat<R>,
    rho_sqrt_inv: Mat<R>,
    sigma_lu: Arc<LuReal<R>>,
    cone_eps: R,
    sigma_convention: String,
}

impl<R: Real> std::fmt::Debug for RepresentationConfig<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepresentationConfig")
            .field("algebra", &self.algebra)
            .field("dim_v", &self.dim_v)
            .field("dim_u", &self.dim_u)
            .finish_non_exhaustive()
    }
}

impl<R: Real> RepresentationConfig<R> {
    pub fn from_exact(
        algebra: Option<Arc<AlgebraDescriptor>>,
        rho_exact: RMat,
        psi_basis_exact: Vec<RMat>,
        base_point_exact: Vec<Rat>,
        sigma_exact: RMat,
        sigma_convention: String,
    ) -> Result<Self> {
        let dim_u = rho_exact.rows();
        let dim_v = psi_basis_exact.len();
        if let Some(d) = &algebra {
            if d.dim() != dim_v {
                return Err(Error::DimensionMismatch {
                    expected: d.dim(),
                    got: dim_v,
                });
            }
        }
        BilinearFormRho::new(rho_exact.clone())?;
        if sigma_exact.rows() != dim_v || sigma_exact != sigma_exact.transpose() {
            return Err(Error::InvalidConfiguration(
                "sigma Gram must be symmetric of dimension dim V".into(),
            ));
        }

        // psi(x) must be rho-self-adjoint for every basis x.
        for m in &psi_basis_exact {
            if m.transpose().mul(&rho_exact) != rho_exact.mul(m) {
                return Err(Error::InvalidConfiguration(
                    "psi(x) is not rho-self-adjoint; symmetrize first".into(),
                ));
            }
        }
        // psi must be injective.
        let nn = dim_u * dim_u;
        let stacked = RMat::from_fn(nn, dim_v, |i, j| {
            psi_basis_exact[j].at(i / dim_u, i % dim_u).clone()
        });
        if rat_rank(&stacked) != dim_v {
            return Err(Error::InvalidConfiguration(
                "psi has a nontrivial kernel; reduce the domain first".into(),
            ));
        }
        // psi(e) = I exactly (configurations normalize before arriving here).
        let mut pe = RMat::zeros(dim_u, dim_u);
        for (c, m) in base_point_exact.iter().zip(&psi_basis_exact) {
            pe = pe.add(&m.scale(c.clone()));
        }
        if pe != RMat::identity(dim_u) {
            return Err(Error::InvalidConfiguration(
                "psi(e) != I; run normalize_basepoint first".into(),
            ));
        }

        let rho: Mat<R> = rmat_to_float(&rho_exact);
        let sigma: Mat<R> = rmat_to_float(&sigma_exact);
        cholesky(&sigma).map_err(|_| {
            Error::InvalidConfiguration("sigma Gram must be positive definite".into())
        })?;
        let psi_basis: Vec<Mat<R>> = psi_basis_exact.iter().map(rmat_to_float).collect();
        let base_point: Vec<R> = rvec_to_float(&base_point_exact);
        let rho_sqrt = sym_sqrt(&rho)?;
        let rho_sqrt_inv = crate::linalg::inverse_real::<R>(&rho_sqrt)?;
        let sigma_lu = Arc::new(LuReal::new(&sigma)?);

        Ok(RepresentationConfig {
            algebra,
            dim_v,
            dim_u,
            rho_exact,
            sigma_exact,
            psi_basis_exact,
            base_point_exact,
            rho,
            sigma,
            psi_basis,
            base_point,
            rho_sqrt,
            rho_sqrt_inv,
            sigma_lu,
            cone_eps: R::of(1e-10),
            sigma_convention,
        })
    }

    /// Natural representation of an algebra kind.
    pub fn natural(descriptor: &Arc<AlgebraDescriptor>) -> Result<Self> {
        let (rho, psi_basis, dim_u) = natural_psi_data(descriptor)?;
        let base: Vec<Rat> = crate::jordan::unit::<f64>(descriptor)
            .real_coords()
            .iter()
            .map(|&x| rat_int(x as i64))
            .collect();
        let sigma = crate::jordan::trace_form_gram_exact(descriptor);
        let convention = sigma_convention_for(descriptor.kind());
        let _ = dim_u;
        Self::from_exact(
            Some(descriptor.clone()),
            rho,
            psi_basis,
            base,
            sigma,
            convention,
        )
    }

    /// Custom configuration from raw data; `sigma` defaults to the identity.
    pub fn from_raw(raw: &RawRepresentation, sigma: Option<RMat>) -> Result<Self> {
        let sigma = sigma.unwrap_or_else(|| RMat::identity(raw.dim_v));
        Self::from_exact(
            None,
            raw.rho.clone(),
            raw.psi_basis.clone(),
            raw.base_point.clone(),
            sigma,
            "identity Gram on V (custom configuration)".to_string(),
        )
    }

    pub fn algebra(&self) -> Option<&Arc<AlgebraDescriptor>> {
        self.algebra.as_ref()
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_u(&self) -> usize {
        self.dim_u
    }

    pub fn rho(&self) -> &Mat<R> {
        &self.rho
    }

    pub fn rho_exact(&self) -> &RMat {
        &self.rho_exact
    }

    pub fn sigma(&self) -> &Mat<R> {
        &self.sigma
    }

    pub fn sigma_exact(&self) -> &RMat {
        &self.sigma_exact
    }

    pub fn psi_basis(&self) -> &[Mat<R>] {
        &self.psi_basis
    }

    pub fn psi_basis_exact(&self) -> &[RMat] {
        &self.psi_basis_exact
    }

    pub fn base_point_coords(&self) -> &[R] {
        &self.base_point
    }

    pub fn base_point_exact(&self) -> &[Rat] {
        &self.base_point_exact
    }

    pub fn sigma_convention(&self) -> &str {
        &self.sigma_convention
    }

    pub fn cone_eps(&self) -> R {
        self.cone_eps
    }

    pub fn with_cone_eps(mut self, eps: R) -> Self {
        self.cone_eps = eps;
        self
    }

    /// Base point as an algebra element (Jordan configurations only).
    pub fn base_element(&self) -> Option<AlgebraElement<R>> {
        let d = self.algebra.as_ref()?;
        AlgebraElement::from_real(d.clone(), &self.base_point).ok()
    }

    /// The C-linear map `psi` applied to complex coordinates on `V`.
    pub fn psi_apply_coords(&self, z: &[C<R>]) -> Result<CMat<R>> {
        if z.len() != self.dim_v {
            return Err(Error::DimensionMismatch {
                expected: self.dim_v,
                got: z.len(),
            });
        }
        let mut acc = CMat::<R>::zeros(self.dim_u, self.dim_u);
        for (c, m) in z.iter().zip(&self.psi_basis) {
            for i in 0..self.dim_u {
                for j in 0..self.dim_u {
                    let v = *acc.at(i, j) + C::new(*m.at(i, j), R::zero()) * *c;
                    acc.set(i, j, v);
                }
            }
        }
        Ok(acc)
    }

    pub fn psi_apply(&self, z: &AlgebraElement<R>) -> Result<CMat<R>> {
        match (&self.algebra, z.descriptor()) {
            (Some(a), d) if a == d => self.psi_apply_coords(z.coords()),
            (None, _) => Err(Error::UnsupportedConfiguration(
                "configuration has no algebra structure".into(),
            )),
            _ => Err(Error::DescriptorMismatch),
        }
    }

    /// Real part of `psi` on real coordinates.
    pub fn psi_apply_real(&self, x: &[R]) -> Result<Mat<R>> {
        if x.len() != self.dim_v {
            return Err(Error::DimensionMismatch {
                expected: self.dim_v,
                got: x.len(),
            });
        }
        let mut acc = Mat::<R>::zeros(self.dim_u, self.dim_u);
        for (c, m) in x.iter().zip(&self.psi_basis) {
            acc = acc.add(&m.scale(*c));
        }
        Ok(acc)
    }

    /// Eigenvalue range of a rho-self-adjoint operator `a` on `U`.
    pub fn rho_eig_range(&self, a: &Mat<R>) -> (R, R) {
        let s = self.rho_sqrt.mul(a).mul(&self.rho_sqrt_inv);
        // Symmetrize away the rounding noise before Jacobi.
        let sym = Mat::from_fn(s.rows(), s.cols(), |i, j| {
            (*s.at(i, j) + *s.at(j, i)) * R::of(0.5)
        });
        let eig = sym_eigen(&sym);
        (eig.values[0], eig.values[eig.values.len() - 1])
    }

    /// Membership of real coordinates `x` in the positivity cone `Y`, i.e.
    /// positive definiteness of `psi(x)`, with the boundary flagged.
    pub fn cone_status_coords(&self, x: &[R]) -> Result<ConeStatus<R>> {
        let a = self.psi_apply_real(x)?;
        let (lo, hi) = self.rho_eig_range(&a);
        let scale = lo.abs().max(hi.abs()).max(R::epsilon());
        let cut = self.cone_eps * scale;
        Ok(ConeStatus {
            inside: lo > cut,
            boundary: lo.abs() <= cut,
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        })
    }

    pub fn cone_status(&self, x: &AlgebraElement<R>) -> Result<ConeStatus<R>> {
        if !x.is_real() {
            return Err(Error::UnsupportedConfiguration(
                "cone membership is defined for real elements".into(),
            ));
        }
        match (&self.algebra, x.descriptor()) {
            (Some(a), d) if a == d => self.cone_status_coords(&x.real_coords()),
            (None, _) => self.cone_status_coords(&x.real_coords()),
            _ => Err(Error::DescriptorMismatch),
        }
    }

    /// Strict cone membership (boundary points are non-members).
    pub fn cone_contains(&self, x: &AlgebraElement<R>) -> Result<bool> {
        Ok(self.cone_status(x)?.inside)
    }

    /// Tube domain membership: `Im z` inside the cone.
    pub fn tube_contains(&self, z: &AlgebraElement<R>) -> Result<ConeStatus<R>> {
        let im: Vec<R> = z.coords().iter().map(|c| c.im).collect();
        self.cone_status_coords(&im)
    }

    /// Siegel domain membership: `Im z - S(u,u)` inside the cone. Shipped
    /// configurations are self-dual under sigma, so the same cone test
    /// applies.
    pub fn siegel_contains(&self, z: &AlgebraElement<R>, u: &[C<R>]) -> Result<ConeStatus<R>> {
        let s = self.s_form(u, u)?;
        let w: Vec<R> = z
            .coords()
            .iter()
            .zip(&s)
            .map(|(zc, sc)| zc.im - sc.re)
            .collect();
        self.cone_status_coords(&w)
    }

    /// The sesquilinear map `S(u, v)` in `V` coordinates, defined by
    /// `sigma(S(u,v), x) = rho(psi(x) u, conj(v))` for all `x`.
    pub fn s_form(&self, u: &[C<R>], v: &[C<R>]) -> Result<Vec<C<R>>> {
        if u.len() != self.dim_u || v.len() != self.dim_u {
            return Err(Error::DimensionMismatch {
                expected: self.dim_u,
                got: u.len(),
            });
        }
        let v_conj: Vec<C<R>> = v.iter().map(|z| z.conj()).collect();
        let mut rhs_re = Vec::with_capacity(self.dim_v);
        let mut rhs_im = Vec::with_capacity(self.dim_v);
        for m in &self.psi_basis {
            let mut acc = C::<R>::zero();
            for i in 0..self.dim_u {
                for j in 0..self.dim_u {
                    // rho(psi u, conj v) with real psi basis and real rho.
                    let w = C::new(*m.at(i, j), R::zero()) * u[j];
                    let mut inner = C::<R>::zero();
                    for k in 0..self.dim_u {
                        inner += C::new(*self.rho.at(i, k), R::zero()) * v_conj[k];
                    }
                    acc += w * inner;
                }
            }
            rhs_re.push(acc.re);
            rhs_im.push(acc.im);
        }
        let sre = self.sigma_lu.solve(&rhs_re);
        let sim = self.sigma_lu.solve(&rhs_im);
        Ok(sre
            .into_iter()
            .zip(sim)
            .map(|(a, b)| C::new(a, b))
            .collect())
    }

    /// Exact `S(u, v)` for rational real arguments.
    pub fn s_form_exact(&self, u: &[Rat], v: &[Rat]) -> Result<Vec<Rat>> {
        if u.len() != self.dim_u || v.len() != self.dim_u {
            return Err(Error::DimensionMismatch {
                expected: self.dim_u,
                got: u.len(),
            });
        }
        let rhs: Vec<Rat> = self
            .psi_basis_exact
            .iter()
            .map(|m| {
                let mu = m.mul_vec(u);
                crate::linalg::bilinear(&self.rho_exact, &mu, v)
            })
            .collect();
        rat_solve(&self.sigma_exact, &rhs)
    }

    /// sigma-adjoint of a linear map `w` on `V` (float).
    pub fn sigma_adjoint(&self, w: &Mat<R>) -> Result<Mat<R>> {
        let sigma_inv = crate::linalg::inverse_real::<R>(&self.sigma)?;
        Ok(sigma_inv.mul(&w.transpose()).mul(&self.sigma))
    }

    /// rho-adjoint of a linear map on `U` (float).
    pub fn rho_adjoint(&self, b: &Mat<R>) -> Result<Mat<R>> {
        let rho_inv = crate::linalg::inverse_real::<R>(&self.rho)?;
        Ok(rho_inv.mul(&b.transpose()).mul(&self.rho))
    }

    /// rho-adjoint of an exact rational map on `U`.
    pub fn rho_adjoint_exact(&self, b: &RMat) -> Result<RMat> {
        let rho_inv = rat_inverse(&self.rho_exact)?;
        Ok(rho_inv.mul(&b.transpose()).mul(&self.rho_exact))
    }
}

fn sigma_convention_for(kind: &AlgebraKind) -> String {
    match kind {
        AlgebraKind::RealLine => "sigma(a,b) = ab".to_string(),
        AlgebraKind::SymReal(_) | AlgebraKind::HermComplex(_) => {
            "sigma(a,b) = trace(ab)".to_string()
        }
        AlgebraKind::SpinFactor(_) => "sigma((t,v),(s,w)) = 2(ts + <v,w>)".to_string(),
        AlgebraKind::DirectSum(_) => "componentwise trace forms".to_string(),
    }
}

/// Exact psi data of the natural representation of each kind.
fn natural_psi_data(descriptor: &Arc<AlgebraDescriptor>) -> Result<(RMat, Vec<RMat>, usize)> {
    match descriptor.kind() {
        AlgebraKind::RealLine => Ok((RMat::identity(1), vec![RMat::identity(1)], 1)),
        AlgebraKind::SymReal(n) => {
            let n = *n;
            let mut basis = Vec::with_capacity(descriptor.dim());
            for i in 0..n {
                let mut m = RMat::zeros(n, n);
                m.set(i, i, rat_int(1));
                basis.push(m);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut m = RMat::zeros(n, n);
                    m.set(i, j, rat_int(1));
                    m.set(j, i, rat_int(1));
                    basis.push(m);
                }
            }
            Ok((RMat::identity(n), basis, n))
        }
        AlgebraKind::HermComplex(n) => {
            let n = *n;
            let nu = 2 * n;
            // Realification (a + ib) -> (a, b): S + iT maps to [[S,-T],[T,S]].
            let realify = |s: &RMat, t: &RMat| {
                RMat::from_fn(nu, nu, |i, j| {
                    let (bi, ii) = (i / n, i % n);
                    let (bj, jj) = (j / n, j % n);
                    match (bi, bj) {
                        (0, 0) | (1, 1) => s.at(ii, jj).clone(),
                        (0, 1) => -t.at(ii, jj).clone(),
                        (1, 0) => t.at(ii, jj).clone(),
                        _ => unreachable!(),
                    }
                })
            };
            let mut basis = Vec::with_capacity(descriptor.dim());
            for i in 0..n {
                let mut s = RMat::zeros(n, n);
                s.set(i, i, rat_int(1));
                basis.push(realify(&s, &RMat::zeros(n, n)));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut s = RMat::zeros(n, n);
                    s.set(i, j, rat_int(1));
                    s.set(j, i, rat_int(1));
                    basis.push(realify(&s, &RMat::zeros(n, n)));
                    let mut t = RMat::zeros(n, n);
                    t.set(i, j, rat_int(1));
                    t.set(j, i, rat_int(-1));
                    basis.push(realify(&RMat::zeros(n, n), &t));
                }
            }
            Ok((RMat::identity(nu), basis, nu))
        }
        AlgebraKind::SpinFactor(d) => {
            let gens = clifford_generators(d - 1);
            let nu = gens[0].rows();
            let mut basis = vec![RMat::identity(nu)];
            basis.extend(gens);
            Ok((RMat::identity(nu), basis, nu))
        }
        AlgebraKind::DirectSum(parts) => {
            let mut sub = Vec::new();
            let mut dim_u = 0;
            for p in parts {
                let d = Arc::new(p.clone());
                let (rho, basis, du) = natural_psi_data(&d)?;
                debug_assert!(rho == RMat::identity(du));
                sub.push((basis, du));
                dim_u += du;
            }
            let mut basis = Vec::with_capacity(descriptor.dim());
            let mut off = 0;
            for (part_basis, du) in &sub {
                for b in part_basis {
                    let mut m = RMat::zeros(dim_u, dim_u);
                    for i in 0..*du {
                        for j in 0..*du {
                            m.set(off + i, off + j, b.at(i, j).clone());
                        }
                    }
                    basis.push(m);
                }
                off += du;
            }
            Ok((RMat::identity(dim_u), basis, dim_u))
        }
    }
}

/// `k` real symmetric anticommuting involutions by the recursive tensor
/// construction: seed with the 2x2 diagonal and off-diagonal reflections,
/// then `gens(k) = {s3 (x) I} + {s1 (x) g : g in gens(k-1)}`.
pub fn clifford_generators(k: usize) -> Vec<RMat> {
    assert!(k >= 1);
    let s3 = crate::rational::rmat_from_i64(vec![vec![1, 0], vec![0, -1]]);
    let s1 = crate::rational::rmat_from_i64(vec![vec![0, 1], vec![1, 0]]);
    if k == 1 {
        return vec![s3];
    }
    if k == 2 {
        return vec![s3, s1];
    }
    let prev = clifford_generators(k - 1);
    let n = prev[0].rows();
    let mut out = vec![kron(&s3, &RMat::identity(n))];
    for g in &prev {
        out.push(kron(&s1, g));
    }
    out
}

fn kron(a: &RMat, b: &RMat) -> RMat {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    RMat::from_fn(ar * br, ac * bc, |i, j| {
        a.at(i / br, j / bc).clone() * b.at(i % br, j % bc).clone()
    })
}

/// Convenience: the native lattice `Z^dim_u` of a configuration.
pub fn standard_lattice<R: Real>(rep: &RepresentationConfig<R>) -> crate::lattice::Lattice {
    crate::lattice::Lattice::new(RMat::identity(rep.dim_u())).expect("identity basis")
}

/// True when the exact coordinates are integers (used by scenario loading).
pub fn integer_config(rep: &RepresentationConfig<f64>) -> bool {
    rep.psi_basis_exact().iter().all(is_integer_matrix) && is_integer_matrix(rep.rho_exact())
}

impl<R: Real> RepresentationConfig<R> {
    /// Theta-invariant rescaled copy with base point `t * e`, used to
    /// exercise the normalization pipeline.
    pub fn rescaled_raw(&self, t: Rat) -> Result<RawRepresentation> {
        if t <= Rat::zero() {
            return Err(Error::InvalidConfiguration("scale must be positive".into()));
        }
        let base: Vec<Rat> = self
            .base_point_exact
            .iter()
            .map(|c| c.clone() * t.clone())
            .collect();
        RawRepresentation::new(self.rho_exact.clone(), self.psi_basis_exact.clone(), base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{jordan_product, unit};
    use crate::lattice::Lattice;
    use crate::rational::{rat, rmat_from_i64};
    use num_complex::Complex;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn all_reps() -> Vec<RepresentationConfig<f64>> {
        vec![
            RepresentationConfig::natural(&AlgebraDescriptor::real_line()).unwrap(),
            RepresentationConfig::natural(&AlgebraDescriptor::sym_real(2).unwrap()).unwrap(),
            RepresentationConfig::natural(&AlgebraDescriptor::herm_complex(2).unwrap()).unwrap(),
            RepresentationConfig::natural(&AlgebraDescriptor::spin_factor(3).unwrap()).unwrap(),
            RepresentationConfig::natural(&AlgebraDescriptor::spin_factor(4).unwrap()).unwrap(),
            RepresentationConfig::natural(
                &AlgebraDescriptor::direct_sum(vec![
                    AlgebraDescriptor::real_line(),
                    AlgebraDescriptor::sym_real(2).unwrap(),
                ])
                .unwrap(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn psi_of_base_point_is_identity() {
        for rep in all_reps() {
            let e = rep.base_element().unwrap();
            let pe = rep.psi_apply(&e).unwrap();
            for i in 0..rep.dim_u() {
                for j in 0..rep.dim_u() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((pe.at(i, j).re - want).abs() < 1e-15);
                    assert!(pe.at(i, j).im.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn psi_matrix_action_example() {
        // SymReal(2), psi(diag(1,2)) applied to (1,1) gives (1,2).
        let rep = RepresentationConfig::natural(&AlgebraDescriptor::sym_real(2).unwrap()).unwrap();
        let z = AlgebraElement::from_real(
            AlgebraDescriptor::sym_real(2).unwrap(),
            &[1.0, 2.0, 0.0],
        )
        .unwrap();
        let m = rep.psi_apply(&z).unwrap();
        let out = m.mul_vec(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((out[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((out[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn clifford_generators_anticommute() {
        for k in 1..=5 {
            let gens = clifford_generators(k);
            assert_eq!(gens.len(), k);
            let n = gens[0].rows();
            for (i, a) in gens.iter().enumerate() {
                assert_eq!(a, &a.transpose(), "generator {} not symmetric", i);
                assert_eq!(a.mul(a), RMat::identity(n), "generator {} not involutive", i);
                for b in gens.iter().skip(i + 1) {
                    let anti = a.mul(b).add(&b.mul(a));
                    assert_eq!(anti, RMat::zeros(n, n));
                }
            }
        }
    }

    #[test]
    fn spin_psi_squares_to_identity() {
        // psi(0,(1,0))^2 = I on SpinFactor(3).
        let rep = RepresentationConfig::natural(&AlgebraDescriptor::spin_factor(3).unwrap())
            .unwrap();
        let x = AlgebraElement::from_real(
            AlgebraDescriptor::spin_factor(3).unwrap(),
            &[0.0, 1.0, 0.0],
        )
        .unwrap();
        let m = rep.psi_apply(&x).unwrap();
        let sq = m.mul(&m);
        for i in 0..rep.dim_u() {
            for j in 0..rep.dim_u() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sq.at(i, j) - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn psi_is_rho_self_adjoint_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rep in all_reps() {
            for m in rep.psi_basis() {
                for _ in 0..20 {
                    let u: Vec<f64> =
                        (0..rep.dim_u()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let v: Vec<f64> =
                        (0..rep.dim_u()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let mu = m.mul_vec(&u);
                    let mv = m.mul_vec(&v);
                    let lhs = crate::linalg::bilinear(rep.rho(), &mu, &v);
                    let rhs = crate::linalg::bilinear(rep.rho(), &u, &mv);
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn psi_is_jordan_homomorphism_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for rep in all_reps() {
            let d = rep.algebra().unwrap().clone();
            for _ in 0..50 {
                let a = AlgebraElement::from_real(
                    d.clone(),
                    &(0..d.dim())
                        .map(|_| rng.gen_range(-1.0..1.0))
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let b = AlgebraElement::from_real(
                    d.clone(),
                    &(0..d.dim())
                        .map(|_| rng.gen_range(-1.0..1.0))
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let pa = rep.psi_apply(&a).unwrap();
                let pb = rep.psi_apply(&b).unwrap();
                let anti = pa.mul(&pb).add(&pb.mul(&pa)).scale(c(0.5, 0.0));
                let pab = rep.psi_apply(&jordan_product(&a, &b).unwrap()).unwrap();
                for i in 0..rep.dim_u() {
                    for j in 0..rep.dim_u() {
                        assert!((anti.at(i, j) - pab.at(i, j)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cone_examples() {
        let d = AlgebraDescriptor::sym_real(2).unwrap();
        let rep = RepresentationConfig::natural(&d).unwrap();
        let e = unit::<f64>(&d);
        assert!(rep.cone_contains(&e).unwrap());

        let indefinite = AlgebraElement::from_real(d.clone(), &[1.0, -1.0, 0.0]).unwrap();
        assert!(!rep.cone_contains(&indefinite).unwrap());

        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let x = AlgebraElement::from_real(d.clone(), &[2.0, 2.0, 1.0]).unwrap();
        let st = rep.cone_status(&x).unwrap();
        assert!(st.inside);
        assert!((st.min_eigenvalue - 1.0).abs() < 1e-12);
        assert!((st.max_eigenvalue - 3.0).abs() < 1e-12);

        // Scale invariance of membership.
        for t in [0.5, 2.0, 10.0] {
            let xt = x.scaled(c(t, 0.0));
            assert!(rep.cone_contains(&xt).unwrap());
        }

        // Inverse stays in the cone.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = AlgebraElement::from_real(
                d.clone(),
                &[
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ],
            )
            .unwrap();
            let sq = jordan_product(&a, &a).unwrap();
            let x = sq.add(&e.scaled(c(0.3, 0.0))).unwrap();
            assert!(rep.cone_contains(&x).unwrap());
            let inv = crate::jordan::inverse(&x).unwrap();
            assert!(rep.cone_contains(&inv).unwrap());
        }
    }

    #[test]
    fn tube_and_siegel_membership() {
        let d = AlgebraDescriptor::real_line();
        let rep = RepresentationConfig::natural(&d).unwrap();
        let zi = AlgebraElement::new(d.clone(), vec![c(0.0, 1.0)]).unwrap();
        assert!(rep.tube_contains(&zi).unwrap().inside);
        // (z,u) = (i e, 0) is in the Siegel domain.
        assert!(rep.siegel_contains(&zi, &[c(0.0, 0.0)]).unwrap().inside);
        // (i, 1): Im z - S(u,u) = 0 -> boundary, not a member.
        let st = rep.siegel_contains(&zi, &[c(1.0, 0.0)]).unwrap();
        assert!(!st.inside);
        assert!(st.boundary);
        // (2i, 1): 2 - 1 > 0.
        let z2 = AlgebraElement::new(d.clone(), vec![c(0.0, 2.0)]).unwrap();
        assert!(rep.siegel_contains(&z2, &[c(1.0, 0.0)]).unwrap().inside);
        // Siegel membership implies tube membership.
        assert!(rep.tube_contains(&z2).unwrap().inside);
    }

    #[test]
    fn s_form_examples_and_properties() {
        // Real line: S(u,v) = u conj(v).
        let rep = RepresentationConfig::natural(&AlgebraDescriptor::real_line()).unwrap();
        let s = rep.s_form(&[c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap();
        assert!((s[0] - c(1.0, 0.0)).norm() < 1e-15);

        // SymReal(2): S(e1, e1) = E11.
        let rep2 = RepresentationConfig::natural(&AlgebraDescriptor::sym_real(2).unwrap())
            .unwrap();
        let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let s = rep2.s_form(&e1, &e1).unwrap();
        assert!((s[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(s[1].norm() < 1e-14 && s[2].norm() < 1e-14);

        // S(0, v) = 0.
        let z = [c(0.0, 0.0), c(0.0, 0.0)];
        let v = [c(0.3, 0.2), c(-0.4, 0.9)];
        let s0 = rep2.s_form(&z, &v).unwrap();
        assert!(s0.iter().all(|x| x.norm() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for rep in all_reps() {
            for _ in 0..30 {
                let u: Vec<Complex<f64>> = (0..rep.dim_u())
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let v: Vec<Complex<f64>> = (0..rep.dim_u())
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                // Defining identity at random x.
                let x: Vec<f64> = (0..rep.dim_v()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = rep.s_form(&u, &v).unwrap();
                let zx: Vec<Complex<f64>> = x.iter().map(|&t| c(t, 0.0)).collect();
                let lhs = {
                    // sigma(S, x)
                    let mut acc = c(0.0, 0.0);
                    for i in 0..rep.dim_v() {
                        for j in 0..rep.dim_v() {
                            acc += s[i] * c(*rep.sigma().at(i, j), 0.0) * zx[j];
                        }
                    }
                    acc
                };
                let rhs = {
                    let m = rep.psi_apply_real(&x).unwrap();
                    let mut acc = c(0.0, 0.0);
                    for i in 0..rep.dim_u() {
                        let mut mu = c(0.0, 0.0);
                        for j in 0..rep.dim_u() {
                            mu += c(*m.at(i, j), 0.0) * u[j];
                        }
                        let mut rv = c(0.0, 0.0);
                        for k in 0..rep.dim_u() {
                            rv += c(*rep.rho().at(i, k), 0.0) * v[k].conj();
                        }
                        acc += mu * rv;
                    }
                    acc
                };
                assert!((lhs - rhs).norm() < 1e-11);

                // Hermitian symmetry.
                let svu = rep.s_form(&v, &u).unwrap();
                for (a, b) in s.iter().zip(&svu) {
                    assert!((a - b.conj()).norm() < 1e-12);
                }

                // S(u,u) is real and in the closed cone; zero only at u = 0.
                let suu = rep.s_form(&u, &u).unwrap();
                let coords: Vec<f64> = suu
                    .iter()
                    .map(|z| {
                        assert!(z.im.abs() < 1e-12);
                        z.re
                    })
                    .collect();
                let st = rep.cone_status_coords(&coords).unwrap();
                assert!(st.min_eigenvalue > -1e-10);
            }
        }
    }

    #[test]
    fn symmetrize_matches_hand_computation() {
        // dim_U = 2, raw psi(x) = [[x, x], [0, x]] with standard rho:
        // the symmetrization is [[x, x/2], [x/2, x]].
        let raw = RawRepresentation::new(
            RMat::identity(2),
            vec![rmat_from_i64(vec![vec![1, 1], vec![0, 1]])],
            vec![rat_int(1)],
        )
        .unwrap();
        let sym = symmetrize_psi(&raw);
        let expect = RMat::from_rows(vec![
            vec![rat_int(1), rat(1, 2)],
            vec![rat(1, 2), rat_int(1)],
        ]);
        assert_eq!(sym.psi_basis[0], expect);

        // Already symmetric input is a fixed point.
        let again = symmetrize_psi(&sym);
        assert_eq!(again.psi_basis[0], sym.psi_basis[0]);

        // Adding a skew perturbation does not change the symmetrization.
        let skew = rmat_from_i64(vec![vec![0, 3], vec![-3, 0]]);
        let perturbed = RawRepresentation::new(
            RMat::identity(2),
            vec![raw.psi_basis[0].add(&skew)],
            vec![rat_int(1)],
        )
        .unwrap();
        assert_eq!(symmetrize_psi(&perturbed).psi_basis[0], expect);
    }

    #[test]
    fn reduce_domain_quotients_kernel() {
        // V~ = R^2 with psi(x1, x2) = x1 * I: the second axis is killed.
        let raw = RawRepresentation::new(
            RMat::identity(2),
            vec![rmat_from_i64(vec![vec![1, 0], vec![0, 1]]), RMat::zeros(2, 2)],
            vec![rat_int(1), rat_int(5)],
        )
        .unwrap();
        let red = reduce_domain(&raw).unwrap();
        assert_eq!(red.dim_v, 1);
        assert_eq!(red.psi_basis[0], RMat::identity(2));
        assert_eq!(red.base_point, vec![rat_int(1)]);

        // Injective input passes through unchanged.
        let inj = RawRepresentation::new(
            RMat::identity(2),
            vec![
                rmat_from_i64(vec![vec![1, 0], vec![0, 1]]),
                rmat_from_i64(vec![vec![1, 0], vec![0, -1]]),
            ],
            vec![rat_int(1), rat_int(0)],
        )
        .unwrap();
        let red2 = reduce_domain(&inj).unwrap();
        assert_eq!(red2.dim_v, 2);

        // Rank oracle: a three-block map with one null block reduces by the
        // nullity.
        let raw3 = RawRepresentation::new(
            RMat::identity(2),
            vec![
                rmat_from_i64(vec![vec![1, 0], vec![0, 0]]),
                rmat_from_i64(vec![vec![0, 0], vec![0, 1]]),
                rmat_from_i64(vec![vec![2, 0], vec![0, 2]]), // dependent
            ],
            vec![rat_int(1), rat_int(1), rat_int(0)],
        )
        .unwrap();
        let nn = 4;
        let stacked = RMat::from_fn(nn, 3, |i, j| raw3.psi_basis[j].at(i / 2, i % 2).clone());
        let nullity = 3 - rat_rank(&stacked);
        let red3 = reduce_domain(&raw3).unwrap();
        assert_eq!(red3.dim_v, 3 - nullity);

        // Everything in the kernel: no cone.
        let dead = RawRepresentation::new(
            RMat::identity(2),
            vec![RMat::zeros(2, 2)],
            vec![rat_int(1)],
        )
        .unwrap();
        assert!(reduce_domain(&dead).is_err());
    }

    #[test]
    fn normalize_basepoint_real_line_example() {
        // psi(x) = 4x, e = 1, lattice Z: normalized psi(x) = x, rho scaled
        // by 4, lattice divided by 4.
        let raw = RawRepresentation::new(
            RMat::identity(1),
            vec![rmat_from_i64(vec![vec![4]])],
            vec![rat_int(1)],
        )
        .unwrap();
        let lat = Lattice::new(RMat::identity(1)).unwrap();
        let (norm, new_lat) = normalize_basepoint(&raw, &lat).unwrap();
        assert_eq!(norm.psi_basis[0], RMat::identity(1));
        assert_eq!(*norm.rho.at(0, 0), rat_int(4));
        assert_eq!(*new_lat.basis().at(0, 0), rat(1, 4));

        // psi(e) = I passes through unchanged.
        let ok = RawRepresentation::new(
            RMat::identity(1),
            vec![RMat::identity(1)],
            vec![rat_int(1)],
        )
        .unwrap();
        let (same, same_lat) = normalize_basepoint(&ok, &lat).unwrap();
        assert_eq!(same.psi_basis[0], RMat::identity(1));
        assert_eq!(same_lat.basis(), lat.basis());
    }

    #[test]
    fn normalize_rejects_indefinite_base() {
        let raw = RawRepresentation::new(
            RMat::identity(1),
            vec![rmat_from_i64(vec![vec![-1]])],
            vec![rat_int(1)],
        )
        .unwrap();
        let lat = Lattice::new(RMat::identity(1)).unwrap();
        assert!(normalize_basepoint(&raw, &lat).is_err());
    }

    #[test]
    fn config_rejects_unnormalized_data() {
        let raw = RawRepresentation::new(
            RMat::identity(1),
            vec![rmat_from_i64(vec![vec![4]])],
            vec![rat_int(1)],
        )
        .unwrap();
        assert!(RepresentationConfig::<f64>::from_raw(&raw, None).is_err());
    }

    #[test]
    fn s_spanning_over_lattice_points() {
        // The family S(l, l) over small lattice vectors spans V (exact rank).
        for rep in all_reps() {
            let dim_u = rep.dim_u();
            let dim_v = rep.dim_v();
            let mut cols: Vec<Vec<Rat>> = Vec::new();
            let mut counters = vec![-2i64; dim_u];
            loop {
                let l: Vec<Rat> = counters.iter().map(|&k| rat_int(k)).collect();
                cols.push(rep.s_form_exact(&l, &l).unwrap());
                let mut c = 0;
                loop {
                    if c == dim_u {
                        break;
                    }
                    counters[c] += 1;
                    if counters[c] <= 2 {
                        break;
                    }
                    counters[c] = -2;
                    c += 1;
                }
                if c == dim_u {
                    break;
                }
            }
            let m = RMat::from_fn(dim_v, cols.len(), |i, j| cols[j][i].clone());
            assert_eq!(rat_rank(&m), dim_v, "S(l,l) fails to span V");
        }
    }
}
