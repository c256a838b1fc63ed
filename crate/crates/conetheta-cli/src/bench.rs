//! Lattice-sum strategy comparison: recursive ellipsoid enumeration against
//! the naive bounding box, on identical summation problems.
//!
//! Both strategies must produce bit-identical values (they visit the same
//! final point set and sum it in the same order); the interesting columns
//! are the visited-point counts and wall times.

use std::ops::ControlFlow;
use std::time::Instant;

use conetheta::jordan::unit;
use conetheta::lattice::enumerate_streaming;
use conetheta::linalg::{inverse_real, to_complex, Mat};
use conetheta::scalar::{exp_i_pi, CompensatedSum};
use conetheta::theta::tail_radius;
use conetheta::{Complex64, Config64, Lattice};

pub struct BenchRow {
    pub config: String,
    pub strategy: &'static str,
    pub tol: f64,
    pub terms_visited: usize,
    pub terms_summed: usize,
    pub wall_ms: f64,
    pub tail_bound: f64,
    pub value: Complex64,
}

pub fn csv_header() -> &'static str {
    "config,strategy,tol,terms_visited,terms_summed,wall_ms,tail_bound,value_re,value_im"
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{},{},{:.3},{:e},{:e},{:e}\n",
            r.config,
            r.strategy,
            r.tol,
            r.terms_visited,
            r.terms_summed,
            r.wall_ms,
            r.tail_bound,
            r.value.re,
            r.value.im
        ));
    }
    out
}

fn deterministic_sum(
    points: &[Vec<i64>],
    qvals: &[f64],
    ghat: &Mat<Complex64>,
) -> Complex64 {
    let n = ghat.rows();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        qvals[a]
            .partial_cmp(&qvals[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| points[a].cmp(&points[b]))
    });
    let mut re = CompensatedSum::<f64>::new();
    let mut im = CompensatedSum::<f64>::new();
    for &idx in &order {
        let p = &points[idx];
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += *ghat.at(i, j) * Complex64::new(p[j] as f64, 0.0);
            }
            q += Complex64::new(p[i] as f64, 0.0) * row;
        }
        let t = exp_i_pi(q);
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Runs both strategies on one configuration at one tolerance.
fn bench_config(name: &str, rep: &Config64, lat: &Lattice, tol: f64) -> Vec<BenchRow> {
    let desc = rep.algebra().expect("bench configs are algebra-backed");
    let e = unit::<f64>(desc);
    let z = e.scaled(Complex64::new(0.0, 1.0));
    let u = vec![Complex64::new(0.0, 0.0); rep.dim_u()];
    let (radius, tail_bound) = tail_radius(rep, lat, &z, &u, tol).expect("radius exists");

    let dual = lat.dual(rep.rho_exact()).expect("dual exists");
    let basis: Mat<f64> = dual.basis_float();
    let gram = basis.transpose().mul(rep.rho()).mul(&basis);
    let psi_z = rep.psi_apply(&z).expect("psi applies");
    let basis_c = to_complex(&basis);
    let rho_c = to_complex(rep.rho());
    let ghat = basis_c.transpose().mul(&rho_c).mul(&psi_z).mul(&basis_c);
    let bound = radius * radius;
    let dim = gram.rows();

    // Ellipsoid strategy: recursive bound propagation.
    let t0 = Instant::now();
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut qvals: Vec<f64> = Vec::new();
    enumerate_streaming(&gram, bound, |p, q| {
        points.push(p.to_vec());
        qvals.push(q);
        ControlFlow::Continue(())
    })
    .expect("enumeration succeeds");
    let ellipsoid_value = deterministic_sum(&points, &qvals, &ghat);
    let ellipsoid_ms = t0.elapsed().as_secs_f64() * 1e3;
    let ellipsoid_count = points.len();

    // Box strategy: axis-aligned bounding box of the ellipsoid, filtered.
    let t0 = Instant::now();
    let gram_inv = inverse_real::<f64>(&gram).expect("gram invertible");
    let half_widths: Vec<i64> = (0..dim)
        .map(|i| (radius * gram_inv.at(i, i).sqrt()).ceil() as i64)
        .collect();
    let mut visited = 0usize;
    let mut box_points: Vec<Vec<i64>> = Vec::new();
    let mut box_qvals: Vec<f64> = Vec::new();
    let mut cur: Vec<i64> = half_widths.iter().map(|&k| -k).collect();
    'outer: loop {
        visited += 1;
        let fc: Vec<f64> = cur.iter().map(|&x| x as f64).collect();
        let q = conetheta::linalg::bilinear(&gram, &fc, &fc);
        if q <= bound {
            box_points.push(cur.clone());
            box_qvals.push(q);
        }
        let mut c = 0;
        loop {
            if c == dim {
                break 'outer;
            }
            cur[c] += 1;
            if cur[c] <= half_widths[c] {
                break;
            }
            cur[c] = -half_widths[c];
            c += 1;
        }
    }
    let box_value = deterministic_sum(&box_points, &box_qvals, &ghat);
    let box_ms = t0.elapsed().as_secs_f64() * 1e3;

    assert_eq!(
        box_points.len(),
        ellipsoid_count,
        "strategies disagree on the point set"
    );
    assert_eq!(
        (box_value.re.to_bits(), box_value.im.to_bits()),
        (ellipsoid_value.re.to_bits(), ellipsoid_value.im.to_bits()),
        "strategies disagree on the summed value"
    );

    vec![
        BenchRow {
            config: name.to_string(),
            strategy: "ellipsoid",
            tol,
            terms_visited: ellipsoid_count,
            terms_summed: ellipsoid_count,
            wall_ms: ellipsoid_ms,
            tail_bound,
            value: ellipsoid_value,
        },
        BenchRow {
            config: name.to_string(),
            strategy: "box",
            tol,
            terms_visited: visited,
            terms_summed: box_points.len(),
            wall_ms: box_ms,
            tail_bound,
            value: box_value,
        },
    ]
}

pub fn run_bench() -> Vec<BenchRow> {
    use conetheta::jordan::AlgebraDescriptor;
    use conetheta::representation::RepresentationConfig;

    let mut rows = Vec::new();

    // Tolerance sweep on the two-dimensional configuration.
    let sym = RepresentationConfig::natural(&AlgebraDescriptor::sym_real(2).unwrap()).unwrap();
    let lat2 = Lattice::standard(2);
    for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
        rows.extend(bench_config("sym_real_2/Z2", &sym, &lat2, tol));
    }

    // Four-dimensional realification: the box pays a dimension penalty.
    let herm =
        RepresentationConfig::natural(&AlgebraDescriptor::herm_complex(2).unwrap()).unwrap();
    let lat4 = Lattice::standard(4);
    rows.extend(bench_config("herm_complex_2/Z4", &herm, &lat4, 1e-10));

    let rl = RepresentationConfig::natural(&AlgebraDescriptor::real_line()).unwrap();
    let lat1 = Lattice::standard(1);
    rows.extend(bench_config("real_line/Z", &rl, &lat1, 1e-12));

    rows
}
