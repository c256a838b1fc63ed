//! Certified evaluation of theta series on the tube domain.
//!
//! The engine sums `exp(i pi rho(M l + 2 v, l))` over a full-rank lattice,
//! where `M` is a complex rho-symmetric matrix whose imaginary part is
//! positive definite. For the theta series itself the summation lattice is
//! the rho-dual of the configured lattice and `M = psi(z)`, but the Poisson
//! and full transformation checks reuse the same kernel with other data.
//!
//! Truncation is certified. In the integer coordinates `n` of the summation
//! basis the term modulus is `exp(-pi n^T A n - 2 pi w^T n)` with
//! `A = B^T rho Im(M) B` positive definite and `w = B^T rho Im(v)`, so with
//! `a` the smallest eigenvalue of `A` and `b = |w|` every term at Euclidean
//! distance `s` is at most `exp(-pi a s^2 + 2 pi b s)`. Summing unit annuli
//! with a packing count of the integer points in each turns the tail
//! outside an ellipsoid radius into a computable one-dimensional series
//! with a geometric cap. The single-eigenvalue bound is crude but honest;
//! sharpening it would change performance, not correctness.

use std::ops::ControlFlow;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jordan::AlgebraElement;
use crate::lattice::{enumerate_streaming, Lattice};
use crate::linalg::{re_im_parts, CMat, Mat};
use crate::representation::RepresentationConfig;
use crate::scalar::{exp_i_pi, CompensatedSum, Real, C};

/// Default guardrail on the number of summed lattice points.
pub const DEFAULT_POINT_BUDGET: usize = 10_000_000;

const RADIUS_STEP: f64 = 0.25;
const MAX_RADIUS_STEPS: usize = 16_384;

/// Result of a certified evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ThetaEvaluation<R: Real> {
    pub value: C<R>,
    /// Certified absolute bound on the truncation error.
    pub tail_bound: R,
    pub points_summed: usize,
    pub radius_used: R,
}

/// Geometry of a summation problem, reused by the radius search and sum.
struct SumGeometry<R: Real> {
    dim: usize,
    gram: Mat<R>,
    g_min: R,
    g_max: R,
    /// Smallest eigenvalue of `B^T rho Im(M) B` (decay of the terms).
    a_min: R,
    /// Euclidean norm of `B^T rho Im(v)` (linear growth of the terms).
    b_lin: R,
}

impl<R: Real> SumGeometry<R> {
    fn build(basis: &Mat<R>, rho: &Mat<R>, m_matrix: &CMat<R>, shift: &[C<R>]) -> Result<Self> {
        let dim = basis.cols();
        let gram = basis.transpose().mul(rho).mul(basis);
        let eig = crate::linalg::sym_eigen(&gram);
        let g_min = eig.values[0];
        let g_max = eig.values[dim - 1];
        if g_min <= R::zero() {
            return Err(Error::NotPositiveDefinite);
        }
        let (_, im) = re_im_parts(m_matrix);
        let a_raw = basis.transpose().mul(rho).mul(&im).mul(basis);
        // Im(M) is rho-self-adjoint, so this is symmetric up to rounding.
        let a = Mat::from_fn(dim, dim, |i, j| {
            (*a_raw.at(i, j) + *a_raw.at(j, i)) * R::of(0.5)
        });
        let a_min = crate::linalg::sym_eigen(&a).values[0];
        if a_min <= R::zero() {
            return Err(Error::OutsideCone);
        }
        let im_shift: Vec<R> = shift.iter().map(|z| z.im).collect();
        let rv = rho.mul_vec(&im_shift);
        let wv = basis.transpose().mul_vec(&rv);
        let b_lin = wv
            .iter()
            .fold(R::zero(), |acc, &x| acc + x * x)
            .sqrt();
        Ok(SumGeometry {
            dim,
            gram,
            g_min,
            g_max,
            a_min,
            b_lin,
        })
    }

    /// Certified bound on the absolute sum of all terms with
    /// `rho(l,l) > radius^2`.
    ///
    /// Points outside the ellipsoid have Euclidean norm beyond
    /// `radius / sqrt(g_max)`; unit annuli are counted by disjoint unit
    /// cubes inside a slightly inflated ball, and the term modulus on an
    /// annulus is maximized explicitly (the exponent's peak sits at
    /// `b_lin / a_min`). The series is cut with a geometric remainder once
    /// past the peak.
    fn tail_bound(&self, radius: R) -> R {
        let pi = R::PI();
        let n = self.dim;
        let a = pi * self.a_min;
        let b = R::of(2.0) * pi * self.b_lin;
        let half_diag = R::of(n as f64).sqrt() * R::of(0.5);
        let mut omega = [R::one(), R::of(2.0)];
        let mut omega_n = omega[n.min(1)];
        for k in 2..=n {
            let next = omega[0] * R::of(2.0) * pi / R::of(k as f64);
            omega = [omega[1], next];
            omega_n = next;
        }
        let r0 = (radius / self.g_max.sqrt()).max(R::zero());
        let peak = self.b_lin / self.a_min;
        let exponent = |s: R| -> R { -a * s * s + b * s };
        let seg_max = |lo: R, hi: R| -> R {
            if lo >= peak {
                exponent(lo)
            } else if hi <= peak {
                exponent(hi)
            } else {
                exponent(peak)
            }
        };
        let count = |s: R| -> R { omega_n * (s + half_diag).powi(n as i32) };
        let annulus = |lo: R| -> R {
            let hi = lo + R::one();
            count(hi) * seg_max(lo, hi).exp()
        };

        let mut total = R::zero();
        let mut j: i64 = 0;
        loop {
            let lo = r0 + R::of(j as f64);
            let t = annulus(lo);
            let t_next = annulus(lo + R::one());
            if lo > peak && t_next < t * R::of(0.5) && t > R::zero() {
                let r = t_next / t;
                total += t + t_next / (R::one() - r);
                break;
            }
            total += t;
            j += 1;
            if j > 500_000 {
                return R::infinity();
            }
        }
        total
    }

    /// Smallest grid radius whose certified tail is within tolerance.
    fn radius_for(&self, tol: R) -> Result<(R, R)> {
        let mut last = R::infinity();
        for step in 0..=MAX_RADIUS_STEPS {
            let radius = R::of(RADIUS_STEP * step as f64);
            let bound = self.tail_bound(radius);
            if bound <= tol {
                return Ok((radius, bound));
            }
            last = bound;
        }
        Err(Error::BudgetExceeded {
            achieved: last.to_f64_lossy(),
            requested: tol.to_f64_lossy(),
        })
    }

    /// Radius guaranteed affordable by the packing count bound
    /// `(2R/sqrt(g_min) + 1)^n <= budget`.
    fn affordable_radius(&self, budget: usize) -> R {
        let nth = R::of(budget as f64).powf(R::one() / R::of(self.dim as f64));
        ((nth - R::one()) * self.g_min.sqrt() * R::of(0.5)).max(R::zero())
    }
}

/// Above this many (bounded) points the sum streams in traversal order
/// instead of materializing and sorting; both orders are deterministic.
pub const DEFAULT_STREAM_THRESHOLD: usize = 2_000_000;

/// Sums `exp(i pi rho(M l + 2 v, l))` over the lattice spanned by `basis`
/// columns, to absolute accuracy `tol`.
///
/// Terms are accumulated in a fixed order with compensated summation, so the
/// result is bit-stable for identical inputs and build: ascending quadratic
/// value (ties broken lexicographically) in the default mode, the
/// enumeration traversal order when the point-count bound exceeds the
/// streaming threshold.
pub fn lattice_sum<R: Real>(
    basis: &Mat<R>,
    rho: &Mat<R>,
    m_matrix: &CMat<R>,
    shift: &[C<R>],
    tol: R,
    budget: usize,
) -> Result<ThetaEvaluation<R>> {
    lattice_sum_with(
        basis,
        rho,
        m_matrix,
        shift,
        tol,
        budget,
        DEFAULT_STREAM_THRESHOLD,
    )
}

pub fn lattice_sum_with<R: Real>(
    basis: &Mat<R>,
    rho: &Mat<R>,
    m_matrix: &CMat<R>,
    shift: &[C<R>],
    tol: R,
    budget: usize,
    stream_threshold: usize,
) -> Result<ThetaEvaluation<R>> {
    let dim_u = rho.rows();
    if shift.len() != dim_u {
        return Err(Error::DimensionMismatch {
            expected: dim_u,
            got: shift.len(),
        });
    }
    let geom = SumGeometry::build(basis, rho, m_matrix, shift)?;
    let (mut radius, mut bound) = geom.radius_for(tol)?;

    // Complexified quadratic and linear data in enumeration coordinates:
    // rho(M l + 2 v, l) = n^T (B^T rho M B) n + (2 B^T rho v)^T n.
    let rho_c = crate::linalg::to_complex(rho);
    let basis_c = crate::linalg::to_complex(basis);
    let ghat = basis_c.transpose().mul(&rho_c).mul(m_matrix).mul(&basis_c);
    let w = {
        let rv = rho_c.mul_vec(shift);
        let btv = basis_c.transpose().mul_vec(&rv);
        btv.into_iter()
            .map(|z| z * C::new(R::of(2.0), R::zero()))
            .collect::<Vec<_>>()
    };
    let n = geom.dim;
    let term_of = |p: &[i64]| -> C<R> {
        let mut q = C::<R>::zero();
        for i in 0..n {
            let pi_ = C::new(R::of(p[i] as f64), R::zero());
            let mut row = C::<R>::zero();
            for j in 0..n {
                row += *ghat.at(i, j) * C::new(R::of(p[j] as f64), R::zero());
            }
            q += pi_ * (row + w[i]);
        }
        exp_i_pi(q)
    };
    // Rigorous upper bound on the point count inside the ellipsoid, by the
    // packing argument behind `affordable_radius`.
    let count_bound = |r: R| -> R {
        (R::of(2.0) * r / geom.g_min.sqrt() + R::one()).powi(n as i32)
    };

    loop {
        let streaming = count_bound(radius) > R::of(stream_threshold as f64);
        let attempt: Option<(C<R>, usize)> = if streaming {
            let mut re = CompensatedSum::<R>::new();
            let mut im = CompensatedSum::<R>::new();
            let mut count = 0usize;
            let mut over = false;
            enumerate_streaming(&geom.gram, radius * radius, |p, _| {
                if count >= budget {
                    over = true;
                    return ControlFlow::Break(());
                }
                let t = term_of(p);
                re.add(t.re);
                im.add(t.im);
                count += 1;
                ControlFlow::Continue(())
            })?;
            if over {
                None
            } else {
                Some((C::new(re.value(), im.value()), count))
            }
        } else {
            let mut points: Vec<i64> = Vec::new();
            let mut qvals: Vec<R> = Vec::new();
            let mut over = false;
            enumerate_streaming(&geom.gram, radius * radius, |p, q| {
                if qvals.len() >= budget {
                    over = true;
                    return ControlFlow::Break(());
                }
                points.extend_from_slice(p);
                qvals.push(q);
                ControlFlow::Continue(())
            })?;
            if over {
                None
            } else {
                let count = qvals.len();
                let mut order: Vec<u32> = (0..count as u32).collect();
                order.sort_by(|&a, &b| {
                    let (a, b) = (a as usize, b as usize);
                    qvals[a]
                        .partial_cmp(&qvals[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| {
                            points[a * n..(a + 1) * n].cmp(&points[b * n..(b + 1) * n])
                        })
                });
                let mut re = CompensatedSum::<R>::new();
                let mut im = CompensatedSum::<R>::new();
                for &idx in &order {
                    let t = term_of(&points[idx as usize * n..(idx as usize + 1) * n]);
                    re.add(t.re);
                    im.add(t.im);
                }
                Some((C::new(re.value(), im.value()), count))
            }
        };
        match attempt {
            Some((value, count)) => {
                return Ok(ThetaEvaluation {
                    value,
                    tail_bound: bound,
                    points_summed: count,
                    radius_used: radius,
                });
            }
            None => {
                // The budget was hit; fall back to the radius the packing
                // bound guarantees affordable, or give up honestly.
                let afford = geom.affordable_radius(budget).min(radius);
                let achieved = geom.tail_bound(afford);
                if achieved > tol {
                    return Err(Error::BudgetExceeded {
                        achieved: achieved.to_f64_lossy(),
                        requested: tol.to_f64_lossy(),
                    });
                }
                radius = afford;
                bound = achieved;
            }
        }
    }
}

/// Truncation radius for the theta series of a configuration: summing all
/// dual-lattice vectors with `rho(l,l) <= R^2` leaves a certified absolute
/// tail at most `tol`.
pub fn tail_radius<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z: &AlgebraElement<R>,
    u: &[C<R>],
    tol: R,
) -> Result<(R, R)> {
    let m_matrix = rep.psi_apply(z)?;
    let dual = lat.dual(rep.rho_exact())?;
    let basis: Mat<R> = dual.basis_float();
    let geom = SumGeometry::build(&basis, rep.rho(), &m_matrix, u)?;
    geom.radius_for(tol)
}

/// Certified theta value of a configuration at `(z, u)`.
///
/// The series runs over the rho-dual of `lat`; `Im z` must lie inside the
/// positivity cone or the series diverges.
pub fn theta_eval<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z: &AlgebraElement<R>,
    u: &[C<R>],
    tol: R,
) -> Result<ThetaEvaluation<R>> {
    theta_eval_with(rep, lat, z, u, tol, DEFAULT_POINT_BUDGET)
}

pub fn theta_eval_with<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z: &AlgebraElement<R>,
    u: &[C<R>],
    tol: R,
    budget: usize,
) -> Result<ThetaEvaluation<R>> {
    let m_matrix = rep.psi_apply(z)?;
    theta_eval_matrix(rep, lat, &m_matrix, u, tol, budget)
}

/// Theta evaluation with raw complex coordinates on `V` (custom
/// configurations without algebra structure).
pub fn theta_eval_coords<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z_coords: &[C<R>],
    u: &[C<R>],
    tol: R,
) -> Result<ThetaEvaluation<R>> {
    let m_matrix = rep.psi_apply_coords(z_coords)?;
    theta_eval_matrix(rep, lat, &m_matrix, u, tol, DEFAULT_POINT_BUDGET)
}

fn theta_eval_matrix<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    m_matrix: &CMat<R>,
    u: &[C<R>],
    tol: R,
    budget: usize,
) -> Result<ThetaEvaluation<R>> {
    if lat.dim() != rep.dim_u() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim_u(),
            got: lat.dim(),
        });
    }
    let dual = lat.dual(rep.rho_exact())?;
    let basis: Mat<R> = dual.basis_float();
    lattice_sum(&basis, rep.rho(), m_matrix, u, tol, budget)
}

/// Fourier coefficient extraction by trapezoidal quadrature.
#[derive(Debug, Clone, Copy)]
pub struct FourierCoefficient<R: Real> {
    pub value: C<R>,
    /// Disagreement between the two quadrature grids (2^8 and 2^9 points
    /// per dimension); trapezoid converges exponentially for these smooth
    /// periodic integrands, so this should sit at rounding level.
    pub grid_residual: R,
}

/// Numerical Fourier coefficient of `theta(z, .)` at the dual-lattice vector
/// with integer coordinates `l_coords`, for `dim U <= 2`.
pub fn fourier_coefficient<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z: &AlgebraElement<R>,
    l_coords: &[i64],
    tol: R,
) -> Result<FourierCoefficient<R>> {
    let out = fourier_coefficients(rep, lat, z, std::slice::from_ref(&l_coords.to_vec()), tol)?;
    Ok(out.into_iter().next().expect("one request, one result"))
}

/// Batch variant of [`fourier_coefficient`]: the theta grid is built once
/// and reused for every requested coefficient.
pub fn fourier_coefficients<R: Real>(
    rep: &RepresentationConfig<R>,
    lat: &Lattice,
    z: &AlgebraElement<R>,
    l_list: &[Vec<i64>],
    tol: R,
) -> Result<Vec<FourierCoefficient<R>>> {
    let dim = rep.dim_u();
    if dim > 2 {
        return Err(Error::UnsupportedDimension { got: dim, max: 2 });
    }
    for l_coords in l_list {
        if l_coords.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: l_coords.len(),
            });
        }
    }
    let m_matrix = rep.psi_apply(z)?;
    let dual = lat.dual(rep.rho_exact())?;
    let basis: Mat<R> = dual.basis_float();

    // Enumerate once; all grid points share u real, so the radius at m = 0
    // covers every node.
    let geom = SumGeometry::build(&basis, rep.rho(), &m_matrix, &vec![C::zero(); dim])?;
    let (radius, _) = geom.radius_for(tol * R::of(1e-2))?;
    let mut points: Vec<i64> = Vec::new();
    enumerate_streaming(&geom.gram, radius * radius, |p, _| {
        points.extend_from_slice(p);
        ControlFlow::Continue(())
    })?;
    let count = points.len() / dim.max(1);

    // Per-point constants c_l = exp(i pi rho(psi(z) l, l)).
    let rho_c = crate::linalg::to_complex(rep.rho());
    let basis_c = crate::linalg::to_complex(&basis);
    let ghat = basis_c.transpose().mul(&rho_c).mul(&m_matrix).mul(&basis_c);
    let consts: Vec<C<R>> = (0..count)
        .map(|idx| {
            let p = &points[idx * dim..(idx + 1) * dim];
            let mut q = C::<R>::zero();
            for i in 0..dim {
                for j in 0..dim {
                    q += *ghat.at(i, j)
                        * C::new(R::of((p[i] * p[j]) as f64), R::zero());
                }
            }
            exp_i_pi(q)
        })
        .collect();

    let coarse_grid = theta_grid(dim, 1 << 8, &points, &consts);
    let fine_grid = theta_grid(dim, 1 << 9, &points, &consts);
    Ok(l_list
        .iter()
        .map(|l_coords| {
            let coarse = extract_coefficient(dim, 1 << 8, &coarse_grid, l_coords);
            let fine = extract_coefficient(dim, 1 << 9, &fine_grid, l_coords);
            FourierCoefficient {
                value: fine,
                grid_residual: (fine - coarse).norm(),
            }
        })
        .collect())
}

/// Theta values on the periodic M^dim grid. The node `j` stands for
/// `u = B (j / M)` with `B` the lattice basis, where every pairing against a
/// dual vector becomes an integer dot product, so phases come from a table
/// of M-th roots of unity.
fn theta_grid<R: Real>(dim: usize, m: usize, points: &[i64], consts: &[C<R>]) -> Vec<C<R>> {
    let omega = root_table::<R>(m);
    let total = m.pow(dim as u32);
    let mut grid = vec![C::<R>::zero(); total];
    let mi = m as i64;
    for (idx, &c) in consts.iter().enumerate() {
        let p = &points[idx * dim..(idx + 1) * dim];
        match dim {
            1 => {
                let step = ((p[0] % mi) + mi) as usize % m;
                let mut t = 0usize;
                for cell in grid.iter_mut() {
                    *cell += c * omega[t];
                    t += step;
                    if t >= m {
                        t -= m;
                    }
                }
            }
            2 => {
                let s0 = ((p[0] % mi) + mi) as usize % m;
                let s1 = ((p[1] % mi) + mi) as usize % m;
                let mut t_row = 0usize;
                for j0 in 0..m {
                    let row = &mut grid[j0 * m..(j0 + 1) * m];
                    let base = c * omega[t_row];
                    let mut t = 0usize;
                    for cell in row.iter_mut() {
                        *cell += base * omega[t];
                        t += s1;
                        if t >= m {
                            t -= m;
                        }
                    }
                    t_row += s0;
                    if t_row >= m {
                        t_row -= m;
                    }
                }
            }
            _ => unreachable!("dimension checked above"),
        }
    }
    grid
}

/// Rectangle-rule quadrature against the conjugate phase of `l`.
fn extract_coefficient<R: Real>(dim: usize, m: usize, grid: &[C<R>], l_coords: &[i64]) -> C<R> {
    let omega = root_table::<R>(m);
    let mi = m as i64;
    let mut acc_re = CompensatedSum::<R>::new();
    let mut acc_im = CompensatedSum::<R>::new();
    match dim {
        1 => {
            let step = ((l_coords[0] % mi) + mi) as usize % m;
            let mut t = 0usize;
            for cell in grid {
                let v = *cell * omega[t].conj();
                acc_re.add(v.re);
                acc_im.add(v.im);
                t += step;
                if t >= m {
                    t -= m;
                }
            }
        }
        2 => {
            let s0 = ((l_coords[0] % mi) + mi) as usize % m;
            let s1 = ((l_coords[1] % mi) + mi) as usize % m;
            let mut t_row = 0usize;
            for j0 in 0..m {
                let row = &grid[j0 * m..(j0 + 1) * m];
                let base = omega[t_row].conj();
                let mut t = 0usize;
                for cell in row {
                    let v = *cell * base * omega[t].conj();
                    acc_re.add(v.re);
                    acc_im.add(v.im);
                    t += s1;
                    if t >= m {
                        t -= m;
                    }
                }
                t_row += s0;
                if t_row >= m {
                    t_row -= m;
                }
            }
        }
        _ => unreachable!(),
    }
    let scale = R::one() / R::of(grid.len() as f64);
    C::new(acc_re.value() * scale, acc_im.value() * scale)
}

fn root_table<R: Real>(m: usize) -> Vec<C<R>> {
    let two_pi = R::of(2.0) * R::PI();
    (0..m)
        .map(|t| C::from_polar(R::one(), two_pi * R::of(t as f64) / R::of(m as f64)))
        .collect()
}
