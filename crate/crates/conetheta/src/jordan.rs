//! Euclidean (formally real) Jordan algebras: the real line, real symmetric
//! and complex Hermitian matrices, spin factors, and direct sums.
//!
//! Elements always carry complex coordinates; real elements are those with
//! vanishing imaginary parts. This gives one arithmetic path for the algebra
//! and its complexification.
//!
//! The exceptional 27-dimensional simple algebra is deliberately absent: no
//! theta series of the kind built here exists over it, so only special kinds
//! (embeddable in an associative algebra) ship.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{det_complex, inverse_complex, CMat};
use crate::scalar::{Real, C};

/// Which algebra, with dimension bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    /// The reals with ordinary multiplication.
    RealLine,
    /// Real symmetric `n x n` matrices under the symmetrized product.
    SymReal(usize),
    /// Complex Hermitian `n x n` matrices under the symmetrized product.
    HermComplex(usize),
    /// Spin factor of total dimension `d >= 2`: pairs `(t, v)` with
    /// `v` in `R^{d-1}` and product `(t,v)(s,w) = (ts + <v,w>, tw + sv)`.
    SpinFactor(usize),
    /// Direct sum with componentwise operations.
    DirectSum(Vec<AlgebraDescriptor>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDescriptor {
    kind: AlgebraKind,
    dim: usize,
    rank: usize,
    labels: Vec<String>,
}

impl AlgebraDescriptor {
    pub fn new(kind: AlgebraKind) -> Result<Arc<Self>> {
        let (dim, rank, labels) = match &kind {
            AlgebraKind::RealLine => (1, 1, vec!["x".to_string()]),
            AlgebraKind::SymReal(n) => {
                if *n == 0 {
                    return Err(Error::InvalidConfiguration(
                        "SymReal needs n >= 1".into(),
                    ));
                }
                let mut labels = Vec::new();
                for i in 0..*n {
                    labels.push(format!("x{}{}", i + 1, i + 1));
                }
                for i in 0..*n {
                    for j in (i + 1)..*n {
                        labels.push(format!("x{}{}", i + 1, j + 1));
                    }
                }
                (n * (n + 1) / 2, *n, labels)
            }
            AlgebraKind::HermComplex(n) => {
                if *n == 0 {
                    return Err(Error::InvalidConfiguration(
                        "HermComplex needs n >= 1".into(),
                    ));
                }
                let mut labels = Vec::new();
                for i in 0..*n {
                    labels.push(format!("x{}{}", i + 1, i + 1));
                }
                for i in 0..*n {
                    for j in (i + 1)..*n {
                        labels.push(format!("re{}{}", i + 1, j + 1));
                        labels.push(format!("im{}{}", i + 1, j + 1));
                    }
                }
                (n * n, *n, labels)
            }
            AlgebraKind::SpinFactor(d) => {
                if *d < 2 {
                    return Err(Error::InvalidConfiguration(
                        "SpinFactor needs d >= 2".into(),
                    ));
                }
                let mut labels = vec!["t".to_string()];
                for i in 0..(d - 1) {
                    labels.push(format!("v{}", i + 1));
                }
                (*d, 2, labels)
            }
            AlgebraKind::DirectSum(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidConfiguration(
                        "DirectSum needs at least one summand".into(),
                    ));
                }
                let dim = parts.iter().map(|p| p.dim).sum();
                let rank = parts.iter().map(|p| p.rank).sum();
                let mut labels = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    for l in &p.labels {
                        labels.push(format!("s{}.{}", k + 1, l));
                    }
                }
                (dim, rank, labels)
            }
        };
        Ok(Arc::new(AlgebraDescriptor {
            kind,
            dim,
            rank,
            labels,
        }))
    }

    pub fn real_line() -> Arc<Self> {
        Self::new(AlgebraKind::RealLine).expect("valid")
    }

    pub fn sym_real(n: usize) -> Result<Arc<Self>> {
        Self::new(AlgebraKind::SymReal(n))
    }

    pub fn herm_complex(n: usize) -> Result<Arc<Self>> {
        Self::new(AlgebraKind::HermComplex(n))
    }

    pub fn spin_factor(d: usize) -> Result<Arc<Self>> {
        Self::new(AlgebraKind::SpinFactor(d))
    }

    pub fn direct_sum(parts: Vec<Arc<Self>>) -> Result<Arc<Self>> {
        Self::new(AlgebraKind::DirectSum(
            parts.iter().map(|p| (**p).clone()).collect(),
        ))
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn summands(&self) -> Option<&[AlgebraDescriptor]> {
        match &self.kind {
            AlgebraKind::DirectSum(parts) => Some(parts),
            _ => None,
        }
    }
}

/// Element of the algebra or its complexification, as coordinates in the
/// descriptor's fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<R: Real> {
    descriptor: Arc<AlgebraDescriptor>,
    coords: Vec<C<R>>,
}

impl<R: Real> AlgebraElement<R> {
    pub fn new(descriptor: Arc<AlgebraDescriptor>, coords: Vec<C<R>>) -> Result<Self> {
        if coords.len() != descriptor.dim() {
            return Err(Error::DimensionMismatch {
                expected: descriptor.dim(),
                got: coords.len(),
            });
        }
        Ok(AlgebraElement { descriptor, coords })
    }

    pub fn from_real(descriptor: Arc<AlgebraDescriptor>, coords: &[R]) -> Result<Self> {
        Self::new(
            descriptor,
            coords.iter().map(|&x| C::new(x, R::zero())).collect(),
        )
    }

    pub fn zero(descriptor: Arc<AlgebraDescriptor>) -> Self {
        let dim = descriptor.dim();
        AlgebraElement {
            descriptor,
            coords: vec![C::zero(); dim],
        }
    }

    pub fn descriptor(&self) -> &Arc<AlgebraDescriptor> {
        &self.descriptor
    }

    pub fn coords(&self) -> &[C<R>] {
        &self.coords
    }

    pub fn real_coords(&self) -> Vec<R> {
        self.coords.iter().map(|z| z.re).collect()
    }

    pub fn is_real(&self) -> bool {
        let scale = self.scale().max(R::one());
        self.coords
            .iter()
            .all(|z| z.im.abs() <= scale * R::epsilon() * R::of(16.0))
    }

    /// Largest coordinate magnitude, used for relative thresholds.
    pub fn scale(&self) -> R {
        self.coords
            .iter()
            .fold(R::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Self::new(
            self.descriptor.clone(),
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Self::new(
            self.descriptor.clone(),
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scaled(&self, s: C<R>) -> Self {
        AlgebraElement {
            descriptor: self.descriptor.clone(),
            coords: self.coords.iter().map(|z| z * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(C::new(-R::one(), R::zero()))
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.descriptor != rhs.descriptor {
            return Err(Error::DescriptorMismatch);
        }
        Ok(())
    }

    fn split_sum(&self) -> Vec<AlgebraElement<R>> {
        let parts = self
            .descriptor
            .summands()
            .expect("split_sum on non-sum descriptor");
        let mut out = Vec::with_capacity(parts.len());
        let mut off = 0;
        for p in parts {
            let d = Arc::new(p.clone());
            out.push(AlgebraElement {
                descriptor: d,
                coords: self.coords[off..off + p.dim()].to_vec(),
            });
            off += p.dim();
        }
        out
    }
}

/// Unit element of the Jordan product.
pub fn unit<R: Real>(descriptor: &Arc<AlgebraDescriptor>) -> AlgebraElement<R> {
    let one = C::new(R::one(), R::zero());
    let coords = match descriptor.kind() {
        AlgebraKind::RealLine => vec![one],
        AlgebraKind::SymReal(n) | AlgebraKind::HermComplex(n) => {
            let mut c = vec![C::zero(); descriptor.dim()];
            for i in 0..*n {
                c[i] = one;
            }
            c
        }
        AlgebraKind::SpinFactor(_) => {
            let mut c = vec![C::zero(); descriptor.dim()];
            c[0] = one;
            c
        }
        AlgebraKind::DirectSum(parts) => {
            let mut c = Vec::with_capacity(descriptor.dim());
            for p in parts {
                let d = Arc::new(p.clone());
                c.extend(unit::<R>(&d).coords);
            }
            c
        }
    };
    AlgebraElement {
        descriptor: descriptor.clone(),
        coords,
    }
}

// --- matrix realizations ----------------------------------------------------

/// Coordinates of a symmetric-kind element as a complex symmetric matrix.
pub fn sym_to_matrix<R: Real>(n: usize, coords: &[C<R>]) -> CMat<R> {
    let mut m = CMat::<R>::zeros(n, n);
    for i in 0..n {
        m.set(i, i, coords[i]);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            m.set(i, j, coords[k]);
            m.set(j, i, coords[k]);
            k += 1;
        }
    }
    m
}

pub fn sym_from_matrix<R: Real>(n: usize, m: &CMat<R>) -> Vec<C<R>> {
    let mut coords = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        coords.push(*m.at(i, i));
    }
    let half = C::new(R::of(0.5), R::zero());
    for i in 0..n {
        for j in (i + 1)..n {
            coords.push((*m.at(i, j) + *m.at(j, i)) * half);
        }
    }
    coords
}

/// Hermitian-kind coordinates as a complex matrix. Real elements map to
/// Hermitian matrices; complexified elements to arbitrary complex matrices.
pub fn herm_to_matrix<R: Real>(n: usize, coords: &[C<R>]) -> CMat<R> {
    let i_unit = C::new(R::zero(), R::one());
    let mut m = CMat::<R>::zeros(n, n);
    for d in 0..n {
        m.set(d, d, coords[d]);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let re = coords[k];
            let im = coords[k + 1];
            k += 2;
            m.set(i, j, re + i_unit * im);
            m.set(j, i, re - i_unit * im);
        }
    }
    m
}

pub fn herm_from_matrix<R: Real>(n: usize, m: &CMat<R>) -> Vec<C<R>> {
    let half = C::new(R::of(0.5), R::zero());
    let minus_i_half = C::new(R::zero(), -R::of(0.5));
    let mut coords = Vec::with_capacity(n * n);
    for d in 0..n {
        coords.push(*m.at(d, d));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            coords.push((*m.at(i, j) + *m.at(j, i)) * half);
            coords.push((*m.at(i, j) - *m.at(j, i)) * minus_i_half);
        }
    }
    coords
}

// --- operations --------------------------------------------------------------

/// Jordan product; commutative and bilinear, with `unit` as identity.
pub fn jordan_product<R: Real>(
    a: &AlgebraElement<R>,
    b: &AlgebraElement<R>,
) -> Result<AlgebraElement<R>> {
    a.check_same(b)?;
    let half = C::new(R::of(0.5), R::zero());
    let coords = match a.descriptor.kind() {
        AlgebraKind::RealLine => vec![a.coords[0] * b.coords[0]],
        AlgebraKind::SymReal(n) => {
            let (ma, mb) = (sym_to_matrix(*n, &a.coords), sym_to_matrix(*n, &b.coords));
            let prod = ma.mul(&mb).add(&mb.mul(&ma)).scale(half);
            sym_from_matrix(*n, &prod)
        }
        AlgebraKind::HermComplex(n) => {
            let (ma, mb) = (herm_to_matrix(*n, &a.coords), herm_to_matrix(*n, &b.coords));
            let prod = ma.mul(&mb).add(&mb.mul(&ma)).scale(half);
            herm_from_matrix(*n, &prod)
        }
        AlgebraKind::SpinFactor(d) => {
            let (la, va) = (a.coords[0], &a.coords[1..]);
            let (lb, vb) = (b.coords[0], &b.coords[1..]);
            let mut dot = C::zero();
            for k in 0..(d - 1) {
                dot += va[k] * vb[k];
            }
            let mut c = Vec::with_capacity(*d);
            c.push(la * lb + dot);
            for k in 0..(d - 1) {
                c.push(la * vb[k] + lb * va[k]);
            }
            c
        }
        AlgebraKind::DirectSum(_) => {
            let (pa, pb) = (a.split_sum(), b.split_sum());
            let mut c = Vec::with_capacity(a.descriptor.dim());
            for (x, y) in pa.iter().zip(&pb) {
                c.extend(jordan_product(x, y)?.coords);
            }
            c
        }
    };
    AlgebraElement::new(a.descriptor.clone(), coords)
}

/// Jordan determinant (reduced norm) of an element.
pub fn determinant<R: Real>(a: &AlgebraElement<R>) -> C<R> {
    match a.descriptor.kind() {
        AlgebraKind::RealLine => a.coords[0],
        AlgebraKind::SymReal(n) => det_complex::<R>(&sym_to_matrix(*n, &a.coords)),
        AlgebraKind::HermComplex(n) => det_complex::<R>(&herm_to_matrix(*n, &a.coords)),
        AlgebraKind::SpinFactor(d) => {
            let mut q = C::zero();
            for k in 1..*d {
                q += a.coords[k] * a.coords[k];
            }
            a.coords[0] * a.coords[0] - q
        }
        AlgebraKind::DirectSum(_) => {
            let mut d = C::new(R::one(), R::zero());
            for p in a.split_sum() {
                d *= determinant(&p);
            }
            d
        }
    }
}

/// Jordan inverse. Errors when the Jordan determinant is below the relative
/// singularity threshold `1e-12 * scale^rank`.
pub fn inverse<R: Real>(a: &AlgebraElement<R>) -> Result<AlgebraElement<R>> {
    inverse_with_threshold(a, R::of(1e-12))
}

/// Jordan inverse with a caller-chosen relative singularity threshold.
pub fn inverse_with_threshold<R: Real>(
    a: &AlgebraElement<R>,
    threshold_factor: R,
) -> Result<AlgebraElement<R>> {
    let det = determinant(a);
    let scale = a.scale().max(R::epsilon());
    let threshold = threshold_factor * scale.powi(a.descriptor.rank() as i32);
    if det.norm() <= threshold {
        return Err(Error::NotInvertible {
            determinant: format!("{:e}+{:e}i", det.re.to_f64_lossy(), det.im.to_f64_lossy()),
        });
    }
    let coords = match a.descriptor.kind() {
        AlgebraKind::RealLine => vec![C::new(R::one(), R::zero()) / a.coords[0]],
        AlgebraKind::SymReal(n) => {
            let m = sym_to_matrix(*n, &a.coords);
            sym_from_matrix(*n, &inverse_complex::<R>(&m)?)
        }
        AlgebraKind::HermComplex(n) => {
            let m = herm_to_matrix(*n, &a.coords);
            herm_from_matrix(*n, &inverse_complex::<R>(&m)?)
        }
        AlgebraKind::SpinFactor(d) => {
            let mut c = Vec::with_capacity(*d);
            c.push(a.coords[0] / det);
            for k in 1..*d {
                c.push(-a.coords[k] / det);
            }
            c
        }
        AlgebraKind::DirectSum(_) => {
            let mut c = Vec::with_capacity(a.descriptor.dim());
            for p in a.split_sum() {
                c.extend(inverse(&p)?.coords);
            }
            c
        }
    };
    AlgebraElement::new(a.descriptor.clone(), coords)
}

/// The associative trace form, normalized per kind:
/// matrix kinds `trace(ab)`, spin factor `2(ts + <v,w>)`, real line `ab`,
/// direct sums componentwise.
pub fn trace_form<R: Real>(a: &AlgebraElement<R>, b: &AlgebraElement<R>) -> Result<C<R>> {
    a.check_same(b)?;
    let v = match a.descriptor.kind() {
        AlgebraKind::RealLine => a.coords[0] * b.coords[0],
        AlgebraKind::SymReal(n) | AlgebraKind::HermComplex(n) => {
            // trace(AB) in coordinates: diagonal entries weight 1, each
            // off-diagonal coordinate weight 2.
            let _ = n;
            gram_weighted(a, b)
        }
        AlgebraKind::SpinFactor(_) => {
            let mut acc = a.coords[0] * b.coords[0];
            for k in 1..a.descriptor.dim() {
                acc += a.coords[k] * b.coords[k];
            }
            acc * C::new(R::of(2.0), R::zero())
        }
        AlgebraKind::DirectSum(_) => {
            let mut acc = C::zero();
            for (x, y) in a.split_sum().iter().zip(&b.split_sum()) {
                acc += trace_form(x, y)?;
            }
            acc
        }
    };
    Ok(v)
}

fn gram_weighted<R: Real>(a: &AlgebraElement<R>, b: &AlgebraElement<R>) -> C<R> {
    let diag = match a.descriptor.kind() {
        AlgebraKind::SymReal(n) | AlgebraKind::HermComplex(n) => *n,
        _ => unreachable!(),
    };
    let two = C::new(R::of(2.0), R::zero());
    let mut acc = C::zero();
    for k in 0..a.coords.len() {
        let w = if k < diag {
            C::new(R::one(), R::zero())
        } else {
            two
        };
        acc += a.coords[k] * b.coords[k] * w;
    }
    acc
}

/// Gram matrix of the trace form in the coordinate basis, as exact rationals.
pub fn trace_form_gram_exact(descriptor: &AlgebraDescriptor) -> crate::rational::RMat {
    use crate::rational::{rat_int, RMat};
    let dim = descriptor.dim();
    let mut g = RMat::zeros(dim, dim);
    match descriptor.kind() {
        AlgebraKind::RealLine => g.set(0, 0, rat_int(1)),
        AlgebraKind::SymReal(n) | AlgebraKind::HermComplex(n) => {
            for k in 0..dim {
                g.set(k, k, if k < *n { rat_int(1) } else { rat_int(2) });
            }
        }
        AlgebraKind::SpinFactor(_) => {
            for k in 0..dim {
                g.set(k, k, rat_int(2));
            }
        }
        AlgebraKind::DirectSum(parts) => {
            let mut off = 0;
            for p in parts {
                let sub = trace_form_gram_exact(p);
                for i in 0..p.dim() {
                    for j in 0..p.dim() {
                        g.set(off + i, off + j, sub.at(i, j).clone());
                    }
                }
                off += p.dim();
            }
        }
    }
    g
}

/// Multiplication operator `L(a): x -> a o x` as a matrix on coordinates.
/// Only used by tests as an independent oracle for the trace form.
pub fn mult_operator<R: Real>(a: &AlgebraElement<R>) -> Result<CMat<R>> {
    let dim = a.descriptor.dim();
    let mut m = CMat::<R>::zeros(dim, dim);
    for j in 0..dim {
        let mut coords = vec![C::zero(); dim];
        coords[j] = C::new(R::one(), R::zero());
        let ej = AlgebraElement::new(a.descriptor.clone(), coords)?;
        let col = jordan_product(a, &ej)?;
        for i in 0..dim {
            m.set(i, j, col.coords[i]);
        }
    }
    Ok(m)
}
