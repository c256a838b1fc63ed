//! Full-rank lattices with exact rational bases: duals with respect to a
//! bilinear form, transforms, covolume, ellipsoid enumeration, and the
//! period lattice of a representation.
//!
//! Dual and period-lattice computations are integrality statements, so they
//! run in exact arithmetic; floating point appears only in enumeration radii
//! and covolume square roots.

use std::ops::ControlFlow;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, Mat};
use crate::rational::{rat_det, rat_inverse, rat_solve, rational_span_basis, rmat_to_float, Rat, RMat};
use crate::representation::RepresentationConfig;
use crate::scalar::Real;

/// Full-rank lattice given by basis vectors as matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dim: usize,
    basis: RMat,
}

impl Lattice {
    pub fn new(basis: RMat) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::InvalidConfiguration(
                "lattice basis must be square".into(),
            ));
        }
        if rat_det(&basis).is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(Lattice {
            dim: basis.rows(),
            basis,
        })
    }

    pub fn standard(dim: usize) -> Self {
        Lattice {
            dim,
            basis: RMat::identity(dim),
        }
    }

    /// `t * Z^dim`.
    pub fn scaled_standard(dim: usize, t: Rat) -> Result<Self> {
        Self::new(RMat::identity(dim).scale(t))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    pub fn basis_float<R: Real>(&self) -> Mat<R> {
        rmat_to_float(&self.basis)
    }

    /// Dual lattice with respect to `rho`: the basis `D` with
    /// `D^T rho B = I`, so all pairings `rho(Lattice, Dual)` are integers.
    pub fn dual(&self, rho: &RMat) -> Result<Lattice> {
        let btr = self.basis.transpose().mul(rho);
        Lattice::new(rat_inverse(&btr)?)
    }

    /// Image lattice under an invertible rational map.
    pub fn transformed(&self, map: &RMat) -> Result<Lattice> {
        Lattice::new(map.mul(&self.basis))
    }

    /// Covolume measured in rho-orthonormal coordinates:
    /// `sqrt(det(B^T rho B))`.
    pub fn covolume<R: Real>(&self, rho: &RMat) -> R {
        let gram = self.basis.transpose().mul(rho).mul(&self.basis);
        let det = rat_det(&gram);
        R::of(det.to_f64().expect("gram det fits f64")).sqrt()
    }

    /// Integer coordinates of `v` in this basis, when `v` is a member.
    pub fn coords_of(&self, v: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let c = rat_solve(&self.basis, v)?;
        Ok(if c.iter().all(|q| q.is_integer()) {
            Some(c)
        } else {
            None
        })
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        Ok(self.coords_of(v)?.is_some())
    }

    /// Same point set: each basis expresses the other integrally.
    pub fn same_lattice(&self, other: &Lattice) -> Result<bool> {
        if self.dim != other.dim {
            return Ok(false);
        }
        let a = rat_inverse(&self.basis)?.mul(&other.basis);
        let b = rat_inverse(&other.basis)?.mul(&self.basis);
        Ok(crate::rational::is_integer_matrix(&a) && crate::rational::is_integer_matrix(&b))
    }
}

/// Checks the dual-transform identity: the dual of the transformed lattice
/// equals the inverse rho-adjoint applied to the dual.
pub fn dual_transform_check(lat: &Lattice, bhat: &RMat, rho: &RMat) -> Result<bool> {
    let transformed = lat.transformed(bhat)?;
    let lhs = transformed.dual(rho)?;
    let adjoint = rat_inverse(rho)?.mul(&bhat.transpose()).mul(rho);
    let rhs = lat.dual(rho)?.transformed(&rat_inverse(&adjoint)?)?;
    lhs.same_lattice(&rhs)
}

// ---------------------------------------------------------------------------
// Ellipsoid enumeration
// ---------------------------------------------------------------------------

/// Integer points of an ellipsoid, as a flat buffer of coordinate tuples.
#[derive(Debug, Clone)]
pub struct EllipsoidPoints {
    dim: usize,
    flat: Vec<i64>,
}

impl EllipsoidPoints {
    pub fn len(&self) -> usize {
        self.flat.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.flat.chunks_exact(self.dim)
    }
}

/// Streams every `n` in `Z^dim` with `n^T gram n <= bound` to the visitor,
/// in the deterministic Fincke-Pohst traversal order, together with the
/// quadratic value. The visitor may break off early (budget guards); the
/// return value says whether the enumeration ran to completion.
pub fn enumerate_streaming<R: Real>(
    gram: &Mat<R>,
    bound: R,
    mut visit: impl FnMut(&[i64], R) -> ControlFlow<()>,
) -> Result<bool> {
    let n = gram.rows();
    assert_eq!(n, gram.cols());
    if bound < R::zero() {
        return Ok(true);
    }
    let low = cholesky(gram)?;
    // Pruning gets a whisker of slack; final acceptance is the plain
    // comparison n^T G n <= bound.
    let slack = bound * R::of(1e-9) + R::of(1e-9);
    let mut state = EnumState {
        gram,
        low: &low,
        bound,
        prune_bound: bound + slack,
        point: vec![0i64; n],
        complete: true,
        visit: &mut visit,
    };
    state.descend(n, R::zero());
    Ok(state.complete)
}

struct EnumState<'a, R: Real, F: FnMut(&[i64], R) -> ControlFlow<()>> {
    gram: &'a Mat<R>,
    low: &'a Mat<R>,
    bound: R,
    prune_bound: R,
    point: Vec<i64>,
    complete: bool,
    visit: &'a mut F,
}

impl<R: Real, F: FnMut(&[i64], R) -> ControlFlow<()>> EnumState<'_, R, F> {
    /// Levels run from `len` down to zero; level `i` fixes coordinate `i-1`.
    fn descend(&mut self, level: usize, partial: R) {
        if !self.complete {
            return;
        }
        if level == 0 {
            let q = crate::linalg::bilinear(
                self.gram,
                &self
                    .point
                    .iter()
                    .map(|&k| R::of(k as f64))
                    .collect::<Vec<_>>(),
                &self
                    .point
                    .iter()
                    .map(|&k| R::of(k as f64))
                    .collect::<Vec<_>>(),
            );
            if q <= self.bound {
                if let ControlFlow::Break(()) = (self.visit)(&self.point, q) {
                    self.complete = false;
                }
            }
            return;
        }
        let i = level - 1;
        let lii = *self.low.at(i, i);
        let mut c = R::zero();
        for j in (i + 1)..self.point.len() {
            c += *self.low.at(j, i) * R::of(self.point[j] as f64);
        }
        let room = self.prune_bound - partial;
        if room < R::zero() {
            return;
        }
        let s = room.sqrt();
        let lo = ((-s - c) / lii).ceil();
        let hi = ((s - c) / lii).floor();
        let (lo, hi) = (
            lo.to_f64_lossy() as i64,
            hi.to_f64_lossy() as i64,
        );
        for k in lo..=hi {
            self.point[i] = k;
            let comp = lii * R::of(k as f64) + c;
            self.descend(i, partial + comp * comp);
            if !self.complete {
                return;
            }
        }
        self.point[i] = 0;
    }
}

/// All integer points with `n^T gram n <= bound`, sorted lexicographically.
pub fn enumerate_integer_ellipsoid<R: Real>(gram: &Mat<R>, bound: R) -> Result<EllipsoidPoints> {
    let n = gram.rows();
    let mut flat: Vec<i64> = Vec::new();
    enumerate_streaming(gram, bound, |point, _| {
        flat.extend_from_slice(point);
        ControlFlow::Continue(())
    })?;
    let mut order: Vec<usize> = (0..flat.len() / n.max(1)).collect();
    order.sort_by(|&a, &b| flat[a * n..(a + 1) * n].cmp(&flat[b * n..(b + 1) * n]));
    let mut sorted = Vec::with_capacity(flat.len());
    for idx in order {
        sorted.extend_from_slice(&flat[idx * n..(idx + 1) * n]);
    }
    Ok(EllipsoidPoints { dim: n, flat: sorted })
}

/// Lattice points `l` with `Q(l) <= bound` for an ambient positive definite
/// form `Q`; returns integer coordinates in the lattice basis.
pub fn enumerate_ellipsoid<R: Real>(
    lat: &Lattice,
    q_ambient: &Mat<R>,
    bound: R,
) -> Result<EllipsoidPoints> {
    let b = lat.basis_float::<R>();
    let gram = b.transpose().mul(q_ambient).mul(&b);
    enumerate_integer_ellipsoid(&gram, bound)
}

// ---------------------------------------------------------------------------
// Period lattice
// ---------------------------------------------------------------------------

/// The lattice of real translations `x` in `V` with
/// `rho(psi(x) l, l) in 2Z` for every dual lattice vector `l`.
#[derive(Debug, Clone)]
pub struct PeriodLattice {
    dim: usize,
    rank: usize,
    basis: RMat,
}

impl PeriodLattice {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> Vec<Rat> {
        self.basis.col(j)
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let c = rat_solve(&self.basis, x)?;
        Ok(c.iter().all(|q| q.is_integer()))
    }

    pub fn as_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.basis.clone())
    }
}

/// Computes the period lattice of a configuration.
///
/// With a dual basis `{b_i}`, the membership condition is equivalent to
/// `sigma(x, S(b_i,b_i)) in 2Z` and `sigma(x, S(b_i,b_j)) in Z` for `i < j`,
/// so the period lattice is the sigma-integral dual of the Z-span of
/// `{S(b_i,b_i)/2} + {S(b_i,b_j)}`, reduced by exact Hermite normal form.
pub fn period_lattice<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
) -> Result<PeriodLattice> {
    let dim_v = rep.dim_v();
    if lat.dim() != rep.dim_u() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim_u(),
            got: lat.dim(),
        });
    }
    let dual = lat.dual(rep.rho_exact())?;
    let nd = dual.dim();
    let half = Rat::new(1.into(), 2.into());
    let mut generators: Vec<Vec<Rat>> = Vec::new();
    for i in 0..nd {
        let bi = dual.basis().col(i);
        for j in i..nd {
            let bj = dual.basis().col(j);
            let s = rep.s_form_exact(&bi, &bj)?;
            if i == j {
                generators.push(s.iter().map(|q| q * half.clone()).collect());
            } else {
                generators.push(s);
            }
        }
    }
    let gmat = RMat::from_fn(dim_v, generators.len(), |i, j| generators[j][i].clone());
    let (span, rank) = rational_span_basis(&gmat);
    if rank < dim_v {
        return Err(Error::UnsupportedConfiguration(format!(
            "period-lattice generators span only {rank} of {dim_v} dimensions; \
             psi is not injective on this configuration"
        )));
    }
    let basis = rat_inverse(&span.transpose().mul(rep.sigma_exact()))?;

    // Exact re-verification on a sample of dual vectors.
    let sample = sample_combinations(nd, 2);
    for j in 0..dim_v {
        let x = basis.col(j);
        let psi_x = {
            let mut acc = RMat::zeros(rep.dim_u(), rep.dim_u());
            for (c, m) in x.iter().zip(rep.psi_basis_exact()) {
                acc = acc.add(&m.scale(c.clone()));
            }
            acc
        };
        for coeffs in &sample {
            let l: Vec<Rat> = {
                let mut v = vec![Rat::zero(); rep.dim_u()];
                for (k, &c) in coeffs.iter().enumerate() {
                    let col = dual.basis().col(k);
                    for (vi, ci) in v.iter_mut().zip(col) {
                        *vi += ci * crate::rational::rat_int(c);
                    }
                }
                v
            };
            let q = crate::linalg::bilinear(&rep.rho_exact().clone(), &psi_x.mul_vec(&l), &l);
            let half_q = q * half.clone();
            if !half_q.is_integer() {
                return Err(Error::UnsupportedConfiguration(
                    "period-lattice verification failed".into(),
                ));
            }
        }
    }

    Ok(PeriodLattice {
        dim: dim_v,
        rank,
        basis,
    })
}

fn sample_combinations(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![-radius; dim];
    loop {
        out.push(current.clone());
        let mut c = 0;
        loop {
            if c == dim {
                return out;
            }
            current[c] += 1;
            if current[c] <= radius {
                break;
            }
            current[c] = -radius;
            c += 1;
        }
    }
}
