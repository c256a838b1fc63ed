//! The numeric kernels are generic over the scalar; instantiate everything
//! at `f32` and sanity-check against the `f64` path at loose tolerance.

use conetheta::jordan::{self, AlgebraDescriptor, AlgebraElement};
use conetheta::lattice::Lattice;
use conetheta::representation::RepresentationConfig;
use conetheta::theta::theta_eval;
use num_complex::Complex;

#[test]
fn f32_theta_tracks_f64() {
    let desc = AlgebraDescriptor::sym_real(2).unwrap();
    let lat = Lattice::standard(2);

    let rep32 = RepresentationConfig::<f32>::natural(&desc).unwrap();
    let z32 = AlgebraElement::new(
        desc.clone(),
        vec![
            Complex::new(0.2f32, 1.1),
            Complex::new(-0.1, 0.9),
            Complex::new(0.15, 0.2),
        ],
    )
    .unwrap();
    let u32 = [Complex::new(0.2f32, 0.1), Complex::new(-0.1, 0.05)];
    let e32 = theta_eval(&rep32, &lat, &z32, &u32, 1e-4f32).unwrap();

    let rep64 = RepresentationConfig::<f64>::natural(&desc).unwrap();
    let z64 = AlgebraElement::new(
        desc.clone(),
        vec![
            Complex::new(0.2f64, 1.1),
            Complex::new(-0.1, 0.9),
            Complex::new(0.15, 0.2),
        ],
    )
    .unwrap();
    let u64 = [Complex::new(0.2f64, 0.1), Complex::new(-0.1, 0.05)];
    let e64 = theta_eval(&rep64, &lat, &z64, &u64, 1e-12f64).unwrap();

    let diff = ((e32.value.re as f64 - e64.value.re).powi(2)
        + (e32.value.im as f64 - e64.value.im).powi(2))
    .sqrt();
    assert!(diff < 1e-3, "f32/f64 disagreement: {diff}");
}

#[test]
fn f32_jordan_arithmetic() {
    let desc = AlgebraDescriptor::spin_factor(3).unwrap();
    let a = AlgebraElement::<f32>::from_real(desc.clone(), &[2.0, 1.0, 0.5]).unwrap();
    let inv = jordan::inverse(&a).unwrap();
    let prod = jordan::jordan_product(&a, &inv).unwrap();
    let e = jordan::unit::<f32>(&desc);
    for (x, y) in prod.coords().iter().zip(e.coords()) {
        assert!((x - y).norm() < 1e-5);
    }
}
