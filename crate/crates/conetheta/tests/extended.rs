//! Stress coverage beyond the bundled configurations: wider spin factors,
//! custom-pipeline data, anisotropic arguments, and randomized lattices.

use std::sync::Arc;

use conetheta::jordan::AlgebraDescriptor;
use conetheta::lattice::Lattice;
use conetheta::rational::{rat, rat_int, rmat_from_i64, RMat};
use conetheta::representation::{
    normalize_basepoint, reduce_domain, symmetrize_psi, RawRepresentation, RepresentationConfig,
};
use conetheta::sampling::PointSampler;
use conetheta::suite::{run_check_kind, CheckKind, SuiteSpec};
use conetheta::theta::theta_eval;
use conetheta::verify;
use conetheta::{AlgebraElement, Complex64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn spin_factor_4_passes_core_identities() {
    // dim V = 4, dim U = 4 through three anticommuting generators.
    let d = AlgebraDescriptor::spin_factor(4).unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    let lat = Lattice::standard(4);
    let mut spec = SuiteSpec::new("spin4", 31);
    spec.points = 6;
    for kind in [
        CheckKind::PeriodicityU,
        CheckKind::Quasiperiodicity,
        CheckKind::PeriodicityZ,
        CheckKind::PartialTransformation,
        CheckKind::FullTransformation,
        CheckKind::JordanHom,
        CheckKind::SProperties,
        CheckKind::LinearSubstitution,
    ] {
        let checks = run_check_kind(&rep, &lat, &spec, kind).unwrap();
        for ch in checks {
            assert!(
                ch.pass,
                "spin4 {} residual {:e} note {:?}",
                ch.tag, ch.residual, ch.note
            );
        }
    }
}

#[test]
fn direct_sum_with_spin_component() {
    let d = AlgebraDescriptor::direct_sum(vec![
        AlgebraDescriptor::spin_factor(3).unwrap(),
        AlgebraDescriptor::real_line(),
    ])
    .unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    let lat = Lattice::standard(3);
    let mut spec = SuiteSpec::new("spin_plus_line", 37);
    spec.points = 6;
    for kind in [
        CheckKind::PeriodicityU,
        CheckKind::PeriodicityZ,
        CheckKind::FullTransformation,
        CheckKind::JordanHom,
    ] {
        let checks = run_check_kind(&rep, &lat, &spec, kind).unwrap();
        for ch in checks {
            assert!(
                ch.pass,
                "spin+line {} residual {:e} note {:?}",
                ch.tag, ch.residual, ch.note
            );
        }
    }
}

#[test]
fn custom_pipeline_from_messy_data() {
    // Raw data with a skew part, a dead direction, and a rescaled base
    // point; the pipeline must deliver a valid normalized configuration
    // whose theta values match the clean equivalent.
    let skew = rmat_from_i64(vec![vec![0, 2], vec![-2, 0]]);
    let scaled_id = rmat_from_i64(vec![vec![3, 0], vec![0, 3]]);
    let raw = RawRepresentation::new(
        RMat::identity(2),
        vec![
            scaled_id.add(&skew),        // symmetrizes back to 3*I
            RMat::zeros(2, 2),           // dead direction
            rmat_from_i64(vec![vec![1, 0], vec![0, -1]]),
        ],
        vec![rat_int(1), rat_int(5), rat_int(0)],
    )
    .unwrap();
    let sym = symmetrize_psi(&raw);
    let red = reduce_domain(&sym).unwrap();
    assert_eq!(red.dim_v, 2);
    let lat = Lattice::standard(2);
    let (norm, norm_lat) = normalize_basepoint(&red, &lat).unwrap();
    let rep = RepresentationConfig::<f64>::from_raw(&norm, None).unwrap();

    // The normalized configuration is the diag(x0 + x1, x0 - x1) action
    // with rho scaled by 3 and the lattice by 1/3. Compare against the
    // clean construction at matching arguments.
    let clean = {
        let basis = vec![
            rmat_from_i64(vec![vec![1, 0], vec![0, 1]]),
            rat_scale(&rmat_from_i64(vec![vec![1, 0], vec![0, -1]]), rat(1, 3)),
        ];
        let raw = RawRepresentation::new(
            rat_scale(&RMat::identity(2), rat_int(3)),
            basis,
            vec![rat_int(1), rat_int(0)],
        )
        .unwrap();
        RepresentationConfig::<f64>::from_raw(&raw, None).unwrap()
    };
    let z = [c(0.2, 1.0), c(0.1, 0.2)];
    let u = [c(0.1, 0.05), c(-0.2, 0.0)];
    let a = conetheta::theta::theta_eval_coords(&rep, &norm_lat, &z, &u, 1e-11).unwrap();
    let b = conetheta::theta::theta_eval_coords(&clean, &norm_lat, &z, &u, 1e-11).unwrap();
    assert!((a.value - b.value).norm() < 1e-10);
}

fn rat_scale(m: &RMat, s: conetheta::rational::Rat) -> RMat {
    m.scale(s)
}

#[test]
fn anisotropic_arguments_stay_certified() {
    // Eigenvalues of psi(Im z) spread over [0.15, 5]; the certified bound
    // must still hold against a halved-tolerance evaluation.
    let d = AlgebraDescriptor::sym_real(2).unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    let lat = Lattice::standard(2);
    let z = AlgebraElement::new(
        d.clone(),
        vec![c(0.7, 0.2), c(-0.4, 5.0), c(0.3, 0.1)],
    )
    .unwrap();
    let st = rep.tube_contains(&z).unwrap();
    assert!(st.inside, "min eigenvalue {:?}", st.min_eigenvalue);
    let u = [c(0.4, 0.2), c(-0.3, 0.15)];
    let tol = 1e-9;
    let a = theta_eval(&rep, &lat, &z, &u, tol).unwrap();
    let b = theta_eval(&rep, &lat, &z, &u, tol * 1e-3).unwrap();
    assert!((a.value - b.value).norm() <= a.tail_bound + b.tail_bound);
    assert!(a.tail_bound <= tol);

    // The same identities hold at the anisotropic point.
    let (ch, _) = verify::check_full_transformation(&rep, &lat, &z, &u, 1e-8).unwrap();
    assert!(ch.pass, "residual {:e}", ch.residual);
    let ch = verify::check_partial_transformation(&rep, &lat, &z, &u, 1e-8).unwrap();
    assert!(ch.pass, "residual {:e}", ch.residual);
}

#[test]
fn branch_stays_continuous_far_from_base_point() {
    // Walk the automorphy factor along a long horizontal path; the
    // determinant argument winds through many quadrants without jumps.
    let d = AlgebraDescriptor::sym_real(2).unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    // Both real-part eigenvalues positive, so the determinant argument
    // drifts toward its extreme without cancellation.
    let far = [c(12.0, 1.0), c(9.0, 1.3), c(6.0, 0.4)];
    let mut prev = c(1.0, 0.0);
    let mut total_turn = 0.0f64;
    for step in 0..=400 {
        let t = step as f64 / 400.0;
        let coords: Vec<Complex64> = (0..3)
            .map(|k| {
                let base = if k < 2 { c(0.0, 1.0) } else { c(0.0, 0.0) };
                base * (1.0 - t) + far[k] * t
            })
            .collect();
        let z = AlgebraElement::new(d.clone(), coords).unwrap();
        let h = verify::h_factor(&rep, &z, &[c(0.0, 0.0); 2]).unwrap();
        if step > 0 {
            let rel = (h - prev).norm() / prev.norm().max(1e-30);
            assert!(rel < 0.2, "jump at t={t}: {prev} -> {h}");
            total_turn += (h / prev).arg().abs();
        }
        prev = h;
    }
    // The argument moves substantially (the path is not trivial), while the
    // branch keeps it from ever jumping.
    assert!(total_turn > 0.3, "path barely moved: {total_turn}");
}

#[test]
fn periodicity_on_random_rational_lattices() {
    // theta(z, u + m) = theta(z, u) over random bases, exercising the
    // exact dual construction inside the engine.
    let d = AlgebraDescriptor::sym_real(2).unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    let mut sampler = PointSampler::<f64>::new(4311);
    for case in 0..12 {
        let basis = loop {
            let m = RMat::from_rows(vec![
                vec![
                    rat(sampler.gen_range_i64(-2, 2), sampler.gen_range_i64(1, 2)),
                    rat(sampler.gen_range_i64(-2, 2), 1),
                ],
                vec![
                    rat(sampler.gen_range_i64(-2, 2), 1),
                    rat(sampler.gen_range_i64(-2, 2), sampler.gen_range_i64(1, 2)),
                ],
            ]);
            if !conetheta::rational::rat_det(&m).eq(&rat_int(0)) {
                break m;
            }
        };
        let lat = Lattice::new(basis).unwrap();
        let z = sampler.tube_element(&rep);
        let u = sampler.u_point(&rep);
        let m = sampler.lattice_vector(lat.basis());
        let ch = verify::check_periodicity_u(&rep, &lat, &z, &u, &m, 1e-9).unwrap();
        assert!(ch.pass, "case {case}: residual {:e}", ch.residual);
    }
}

#[test]
fn herm3_jordan_structure() {
    // Larger Hermitian kind: algebra identities and the homomorphism on the
    // realified R^6 action.
    let d = AlgebraDescriptor::herm_complex(3).unwrap();
    let rep = RepresentationConfig::<f64>::natural(&d).unwrap();
    assert_eq!(rep.dim_v(), 9);
    assert_eq!(rep.dim_u(), 6);
    let mut sampler = PointSampler::<f64>::new(88);
    let samples: Vec<_> = (0..200).map(|_| sampler.algebra_point(&rep)).collect();
    for ch in verify::check_jordan_hom(&rep, &samples, 1e-11).unwrap() {
        assert!(ch.pass, "{} residual {:e}", ch.tag, ch.residual);
    }
    // One theta identity at a interior point over Z^6.
    let lat = Lattice::standard(6);
    let z = sampler.tube_element(&rep);
    let u = sampler.u_point(&rep);
    let m = sampler.lattice_vector_in_range(lat.basis(), 1);
    let ch = verify::check_periodicity_u(&rep, &lat, &z, &u, &m, 1e-8).unwrap();
    assert!(ch.pass, "residual {:e}", ch.residual);
}

#[test]
fn descriptor_registry_roundtrip() {
    // Arc-shared descriptors compare structurally across construction paths.
    let a = AlgebraDescriptor::direct_sum(vec![
        AlgebraDescriptor::spin_factor(3).unwrap(),
        AlgebraDescriptor::sym_real(2).unwrap(),
    ])
    .unwrap();
    let b = AlgebraDescriptor::direct_sum(vec![
        AlgebraDescriptor::spin_factor(3).unwrap(),
        AlgebraDescriptor::sym_real(2).unwrap(),
    ])
    .unwrap();
    assert_eq!(a, b);
    assert!(!Arc::ptr_eq(&a, &b));
    assert_eq!(a.dim(), 6);
    assert_eq!(a.rank(), 4);
    assert_eq!(a.labels().len(), 6);
}
