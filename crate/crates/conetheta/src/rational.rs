//! Exact rational linear algebra for lattice work.
//!
//! Dual lattices and the period-lattice construction are integrality
//! statements, so this module works over `BigRational` throughout and only
//! hands floats to callers on request.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;

pub type Rat = BigRational;
pub type RMat = Mat<Rat>;

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"-3/2"`, `"7"` or plain decimals like `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let err = || Error::RationalParse(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || frac_part.contains(['+', '-']) {
            return Err(err());
        }
        let negative = int_part.trim_start().starts_with('-');
        let i: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let f: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigRational::new(f, scale);
        let whole = BigRational::from_integer(i);
        return Ok(if negative { whole - frac } else { whole + frac });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

pub fn rmat_from_i64(rows: Vec<Vec<i64>>) -> RMat {
    Mat::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(rat_int).collect())
            .collect(),
    )
}

pub fn rmat_to_float<R: Real>(m: &RMat) -> Mat<R> {
    m.map(|q| R::of(q.to_f64().expect("rational fits f64")))
}

pub fn rvec_to_float<R: Real>(v: &[Rat]) -> Vec<R> {
    v.iter()
        .map(|q| R::of(q.to_f64().expect("rational fits f64")))
        .collect()
}

/// Gauss-Jordan inverse; errors on singular input.
pub fn rat_inverse(m: &RMat) -> Result<RMat> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = RMat::identity(n);
    for k in 0..n {
        let piv = (k..n)
            .find(|&i| !a.at(i, k).is_zero())
            .ok_or(Error::SingularMatrix)?;
        a.swap_rows(piv, k);
        inv.swap_rows(piv, k);
        let p = a.at(k, k).clone();
        for j in 0..n {
            let v = a.at(k, j).clone() / p.clone();
            a.set(k, j, v);
            let w = inv.at(k, j).clone() / p.clone();
            inv.set(k, j, w);
        }
        for i in 0..n {
            if i == k || a.at(i, k).is_zero() {
                continue;
            }
            let f = a.at(i, k).clone();
            for j in 0..n {
                let v = a.at(i, j).clone() - f.clone() * a.at(k, j).clone();
                a.set(i, j, v);
                let w = inv.at(i, j).clone() - f.clone() * inv.at(k, j).clone();
                inv.set(i, j, w);
            }
        }
    }
    Ok(inv)
}

pub fn rat_det(m: &RMat) -> Rat {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut det = Rat::one();
    for k in 0..n {
        let piv = match (k..n).find(|&i| !a.at(i, k).is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != k {
            a.swap_rows(piv, k);
            det = -det;
        }
        let p = a.at(k, k).clone();
        det *= p.clone();
        for i in (k + 1)..n {
            if a.at(i, k).is_zero() {
                continue;
            }
            let f = a.at(i, k).clone() / p.clone();
            for j in k..n {
                let v = a.at(i, j).clone() - f.clone() * a.at(k, j).clone();
                a.set(i, j, v);
            }
        }
    }
    det
}

pub fn rat_solve(m: &RMat, b: &[Rat]) -> Result<Vec<Rat>> {
    let inv = rat_inverse(m)?;
    Ok(inv.mul_vec(b))
}

/// Row echelon reduction; returns (reduced matrix, pivot columns).
fn rref(m: &RMat) -> (RMat, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let piv = match (r..rows).find(|&i| !a.at(i, c).is_zero()) {
            Some(p) => p,
            None => continue,
        };
        a.swap_rows(piv, r);
        let p = a.at(r, c).clone();
        for j in 0..cols {
            let v = a.at(r, j).clone() / p.clone();
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || a.at(i, c).is_zero() {
                continue;
            }
            let f = a.at(i, c).clone();
            for j in 0..cols {
                let v = a.at(i, j).clone() - f.clone() * a.at(r, j).clone();
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rat_rank(m: &RMat) -> usize {
    rref(m).1.len()
}

/// Basis of the kernel of `m` (columns of the returned matrix).
pub fn rat_kernel(m: &RMat) -> RMat {
    let (red, pivots) = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = RMat::zeros(cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        out.set(fc, k, Rat::one());
        for (r, &pc) in pivots.iter().enumerate() {
            out.set(pc, k, -red.at(r, fc).clone());
        }
    }
    out
}

/// True when every entry is an integer.
pub fn is_integer_matrix(m: &RMat) -> bool {
    m.data().iter().all(|q| q.is_integer())
}

/// Column-style Hermite normal form.
///
/// Input columns generate a Z-module; the output columns are a canonical
/// basis of that module (pivot entries positive, entries to the right of a
/// pivot reduced modulo it). Returns the basis matrix and its rank.
pub fn column_hnf(m: &Mat<BigInt>) -> (Mat<BigInt>, usize) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut pivot_col = 0;
    for r in 0..rows {
        if pivot_col >= cols {
            break;
        }
        // Gather the gcd of row r across active columns into `pivot_col`.
        loop {
            let mut idx = None;
            for c in (pivot_col + 1)..cols {
                if !a.at(r, c).is_zero() {
                    idx = Some(c);
                    break;
                }
            }
            let c = match idx {
                Some(c) => c,
                None => break,
            };
            let x = a.at(r, pivot_col).clone();
            let y = a.at(r, c).clone();
            let e = x.extended_gcd(&y);
            // g = e.x * x + e.y * y; replace columns by (gcd combo, kill combo).
            let (u, v) = (e.x, e.y);
            let (p, q) = (&y / &e.gcd, &x / &e.gcd);
            for i in 0..rows {
                let ai = a.at(i, pivot_col).clone();
                let bi = a.at(i, c).clone();
                a.set(i, pivot_col, &u * &ai + &v * &bi);
                a.set(i, c, &p * &ai - &q * &bi);
            }
        }
        if a.at(r, pivot_col).is_zero() {
            continue;
        }
        if a.at(r, pivot_col).is_negative() {
            for i in 0..rows {
                let v = -a.at(i, pivot_col).clone();
                a.set(i, pivot_col, v);
            }
        }
        // Reduce earlier columns against this pivot for canonical form.
        let pivot = a.at(r, pivot_col).clone();
        for c in 0..pivot_col {
            let entry = a.at(r, c).clone();
            let q = entry.div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            for i in 0..rows {
                let v = a.at(i, c).clone() - &q * a.at(i, pivot_col).clone();
                a.set(i, c, v);
            }
        }
        pivot_col += 1;
    }
    let rank = pivot_col;
    let basis = Mat::from_fn(rows, rank, |i, j| a.at(i, j).clone());
    (basis, rank)
}

/// HNF basis for the Z-span of rational generator columns.
pub fn rational_span_basis(generators: &RMat) -> (RMat, usize) {
    let mut denom = BigInt::one();
    for q in generators.data() {
        denom = denom.lcm(q.denom());
    }
    let scaled = generators.map(|q| {
        let r = q * BigRational::from_integer(denom.clone());
        debug_assert!(r.is_integer());
        r.to_integer()
    });
    let (h, rank) = column_hnf(&scaled);
    let basis = h.map(|z| BigRational::new(z.clone(), denom.clone()));
    (basis, rank)
}
