//! Small dense matrices and the handful of factorizations the crate needs.
//!
//! Dimensions here are tiny (at most a few dozen), so everything is plain
//! row-major `Vec` storage with textbook algorithms: LU with partial
//! pivoting, Cholesky, and cyclic Jacobi for symmetric eigenproblems.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Row-major dense matrix over any scalar (floats, complexes, rationals).
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type CMat<R> = Mat<C<R>>;

impl<T: std::fmt::Debug> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl<T: Clone + Zero> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }
}

impl<T: Clone + Zero + One> Mat<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    pub fn mul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.at(i, k).clone() * rhs.at(k, j).clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.at(i, k).clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: T) -> Mat<T> {
        self.map(|x| x.clone() * s.clone())
    }
}

impl<T> Mat<T>
where
    T: Clone + std::ops::Add<Output = T>,
{
    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() + rhs.at(i, j).clone()
        })
    }
}

impl<T> Mat<T>
where
    T: Clone + std::ops::Sub<Output = T>,
{
    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() - rhs.at(i, j).clone()
        })
    }
}

/// `a^T M b` for any scalar with plain ring ops.
pub fn bilinear<T>(m: &Mat<T>, a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    assert_eq!(m.rows(), a.len());
    assert_eq!(m.cols(), b.len());
    let mut acc = T::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            acc = acc + a[i].clone() * m.at(i, j).clone() * b[j].clone();
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// LU with partial pivoting, generic in the scalar via an explicit magnitude.
// ---------------------------------------------------------------------------

struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

fn lu_generic<T, R, F>(m: &Mat<T>, mag: F) -> Lu<T>
where
    T: Clone
        + Zero
        + One
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
    R: Real,
    F: Fn(&T) -> R,
{
    assert_eq!(m.rows(), m.cols(), "LU needs a square matrix");
    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut singular = false;
    for k in 0..n {
        let mut piv = k;
        let mut best = mag(lu.at(k, k));
        for i in (k + 1)..n {
            let v = mag(lu.at(i, k));
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == R::zero() {
            singular = true;
            continue;
        }
        if piv != k {
            lu.swap_rows(piv, k);
            perm.swap(piv, k);
            swaps += 1;
        }
        let pivot = lu.at(k, k).clone();
        for i in (k + 1)..n {
            let factor = lu.at(i, k).clone() / pivot.clone();
            lu.set(i, k, factor.clone());
            for j in (k + 1)..n {
                let v = lu.at(i, j).clone() - factor.clone() * lu.at(k, j).clone();
                lu.set(i, j, v);
            }
        }
    }
    Lu {
        lu,
        perm,
        swaps,
        singular,
    }
}

fn lu_solve_generic<T>(f: &Lu<T>, b: &[T]) -> Vec<T>
where
    T: Clone
        + Zero
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
{
    let n = f.lu.rows();
    let mut x: Vec<T> = f.perm.iter().map(|&p| b[p].clone()).collect();
    for i in 1..n {
        let mut acc = x[i].clone();
        for j in 0..i {
            acc = acc - f.lu.at(i, j).clone() * x[j].clone();
        }
        x[i] = acc;
    }
    for i in (0..n).rev() {
        let mut acc = x[i].clone();
        for j in (i + 1)..n {
            acc = acc - f.lu.at(i, j).clone() * x[j].clone();
        }
        x[i] = acc / f.lu.at(i, i).clone();
    }
    x
}

fn lu_det_generic<T>(f: &Lu<T>) -> T
where
    T: Clone + Zero + One + std::ops::Mul<Output = T> + std::ops::Neg<Output = T>,
{
    if f.singular {
        return T::zero();
    }
    let mut d = T::one();
    for i in 0..f.lu.rows() {
        d = d * f.lu.at(i, i).clone();
    }
    if f.swaps % 2 == 1 {
        d = -d;
    }
    d
}

macro_rules! lu_frontend {
    ($name:ident, $solve:ident, $det:ident, $inv:ident, $t:ty, $mag:expr) => {
        /// LU factorization handle for repeated solves.
        pub struct $name<R: Real>(Lu<$t>);

        impl<R: Real> $name<R> {
            pub fn new(m: &Mat<$t>) -> Result<Self> {
                let f = lu_generic(m, $mag);
                if f.singular {
                    return Err(Error::SingularMatrix);
                }
                Ok(Self(f))
            }

            pub fn solve(&self, b: &[$t]) -> Vec<$t> {
                lu_solve_generic(&self.0, b)
            }

            pub fn det(&self) -> $t {
                lu_det_generic(&self.0)
            }

            pub fn inverse(&self) -> Mat<$t> {
                let n = self.0.lu.rows();
                let mut out = Mat::<$t>::zeros(n, n);
                for j in 0..n {
                    let mut e = vec![<$t>::zero(); n];
                    e[j] = <$t>::one();
                    let x = self.solve(&e);
                    for i in 0..n {
                        out.set(i, j, x[i]);
                    }
                }
                out
            }
        }

        pub fn $solve<R: Real>(m: &Mat<$t>, b: &[$t]) -> Result<Vec<$t>> {
            Ok($name::new(m)?.solve(b))
        }

        pub fn $det<R: Real>(m: &Mat<$t>) -> $t {
            lu_det_generic(&lu_generic(m, $mag))
        }

        pub fn $inv<R: Real>(m: &Mat<$t>) -> Result<Mat<$t>> {
            Ok($name::new(m)?.inverse())
        }
    };
}

lu_frontend!(LuReal, solve_real, det_real, inverse_real, R, |x: &R| x
    .abs());
lu_frontend!(
    LuComplex,
    solve_complex,
    det_complex,
    inverse_complex,
    Complex<R>,
    |x: &Complex<R>| x.norm_sqr()
);

// ---------------------------------------------------------------------------
// Cholesky and symmetric eigenproblems (real scalars only).
// ---------------------------------------------------------------------------

/// Lower-triangular `L` with `m = L L^T`; fails if `m` is not positive
/// definite (within floating point).
pub fn cholesky<R: Real>(m: &Mat<R>) -> Result<Mat<R>> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut l = Mat::<R>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = *m.at(i, j);
            for k in 0..j {
                acc -= *l.at(i, k) * *l.at(j, k);
            }
            if i == j {
                if acc <= R::zero() {
                    return Err(Error::NotPositiveDefinite);
                }
                l.set(i, j, acc.sqrt());
            } else {
                l.set(i, j, acc / *l.at(j, j));
            }
        }
    }
    Ok(l)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric
/// matrix, by cyclic Jacobi rotations.
pub struct SymEigen<R> {
    pub values: Vec<R>,
    pub vectors: Mat<R>,
}

pub fn sym_eigen<R: Real>(m: &Mat<R>) -> SymEigen<R> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Mat::<R>::identity(n);
    if n <= 1 {
        return SymEigen {
            values: (0..n).map(|i| *a.at(i, i)).collect(),
            vectors: v,
        };
    }
    let eps = R::epsilon();
    for _sweep in 0..64 {
        let mut off = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += *a.at(i, j) * *a.at(i, j);
            }
        }
        let mut norm = off;
        for i in 0..n {
            norm += *a.at(i, i) * *a.at(i, i);
        }
        if off <= eps * eps * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = *a.at(p, q);
                if apq == R::zero() {
                    continue;
                }
                let app = *a.at(p, p);
                let aqq = *a.at(q, q);
                let tau = (aqq - app) / (R::of(2.0) * apq);
                let t = {
                    let s = if tau >= R::zero() { R::one() } else { -R::one() };
                    s / (tau.abs() + (R::one() + tau * tau).sqrt())
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = *a.at(k, p);
                    let akq = *a.at(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = *a.at(p, k);
                    let aqk = *a.at(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = *v.at(k, p);
                    let vkq = *v.at(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.at(i, i)
            .partial_cmp(a.at(j, j))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| *a.at(i, i)).collect();
    let vectors = Mat::from_fn(n, n, |i, j| *v.at(i, order[j]));
    SymEigen { values, vectors }
}

/// Symmetric square root of a positive definite matrix.
pub fn sym_sqrt<R: Real>(m: &Mat<R>) -> Result<Mat<R>> {
    let eig = sym_eigen(m);
    if eig.values.iter().any(|&v| v <= R::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    let n = m.rows();
    let d = Mat::from_fn(n, n, |i, j| {
        if i == j {
            eig.values[i].sqrt()
        } else {
            R::zero()
        }
    });
    Ok(eig.vectors.mul(&d).mul(&eig.vectors.transpose()))
}

/// Split a complex matrix into `(real, imaginary)` parts.
pub fn re_im_parts<R: Real>(m: &CMat<R>) -> (Mat<R>, Mat<R>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// Promote a real matrix to complex.
pub fn to_complex<R: Real>(m: &Mat<R>) -> CMat<R> {
    m.map(|&x| C::new(x, R::zero()))
}

pub fn max_abs<R: Real>(m: &Mat<R>) -> R {
    m.data()
        .iter()
        .fold(R::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn max_abs_c<R: Real>(m: &CMat<R>) -> R {
    m.data()
        .iter()
        .fold(R::zero(), |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Mat<f64> {
        Mat::from_rows(vec![vec![a, b], vec![c, d]])
    }

    #[test]
    fn lu_solves_and_inverts() {
        let m = m2(2.0, 1.0, 1.0, 3.0);
        let x = solve_real::<f64>(&m, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
        assert!((det_real::<f64>(&m) - 5.0).abs() < 1e-14);
        let inv = inverse_real::<f64>(&m).unwrap();
        let prod = m.mul(&inv);
        assert!((prod.at(0, 0) - 1.0).abs() < 1e-14);
        assert!(prod.at(0, 1).abs() < 1e-14);
    }

    #[test]
    fn lu_reports_singular() {
        let m = m2(1.0, 2.0, 2.0, 4.0);
        assert!(matches!(
            solve_real::<f64>(&m, &[1.0, 1.0]),
            Err(Error::SingularMatrix)
        ));
        assert_eq!(det_real::<f64>(&m), 0.0);
    }

    #[test]
    fn complex_lu_inverts() {
        let i = C::new(0.0, 1.0);
        let m = Mat::from_rows(vec![
            vec![C::new(1.0, 0.0) + i, C::new(0.5, 0.0)],
            vec![C::new(0.5, 0.0), C::new(2.0, 0.0) - i],
        ]);
        let inv = inverse_complex::<f64>(&m).unwrap();
        let prod = m.mul(&inv);
        assert!((prod.at(0, 0) - C::new(1.0, 0.0)).norm() < 1e-13);
        assert!(prod.at(1, 0).norm() < 1e-13);
    }

    #[test]
    fn cholesky_and_rejection() {
        let m = m2(4.0, 2.0, 2.0, 3.0);
        let l = cholesky(&m).unwrap();
        let back = l.mul(&l.transpose());
        assert!((back.at(1, 1) - 3.0).abs() < 1e-14);
        assert!(cholesky(&m2(1.0, 2.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn jacobi_eigenvalues_known() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let e = sym_eigen(&m2(2.0, 1.0, 1.0, 2.0));
        assert!((e.values[0] - 1.0).abs() < 1e-13);
        assert!((e.values[1] - 3.0).abs() < 1e-13);
        // Eigenvector equation holds.
        let m = m2(2.0, 1.0, 1.0, 2.0);
        for j in 0..2 {
            let v = e.vectors.col(j);
            let mv = m.mul_vec(&v);
            for i in 0..2 {
                assert!((mv[i] - e.values[j] * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sym_sqrt_squares_back() {
        let m = m2(5.0, 1.0, 1.0, 2.0);
        let s = sym_sqrt(&m).unwrap();
        let back = s.mul(&s);
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.at(i, j) - m.at(i, j)).abs() < 1e-12);
            }
        }
    }
}
