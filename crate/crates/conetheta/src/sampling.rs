//! Seeded, deterministic sample points for the identity checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jordan::AlgebraElement;
use crate::rational::{rat_int, Rat};
use crate::representation::RepresentationConfig;
use crate::scalar::{Real, C};

pub struct PointSampler<R: Real> {
    rng: ChaCha8Rng,
    _marker: std::marker::PhantomData<R>,
}

impl<R: Real> PointSampler<R> {
    pub fn new(seed: u64) -> Self {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            _marker: std::marker::PhantomData,
        }
    }

    fn range(&mut self, lo: f64, hi: f64) -> R {
        R::of(self.rng.gen_range(lo..hi))
    }

    /// Point strictly inside the positivity cone, with the smallest
    /// eigenvalue of `psi(y)` placed in roughly `[0.5, 2.5]`.
    pub fn cone_point(&mut self, rep: &RepresentationConfig<R>) -> Vec<R> {
        let dim = rep.dim_v();
        let spread = 0.3 / (dim as f64).sqrt();
        loop {
            let mut y: Vec<R> = rep.base_point_coords().to_vec();
            for c in y.iter_mut() {
                *c += self.range(-spread, spread);
            }
            let st = rep.cone_status_coords(&y).expect("dimension fixed");
            if st.min_eigenvalue <= R::of(0.25) {
                continue;
            }
            let target = self.range(0.5, 2.5);
            let factor = target / st.min_eigenvalue;
            for c in y.iter_mut() {
                *c *= factor;
            }
            return y;
        }
    }

    /// Tube domain point `z = x + i y` with `y` from [`Self::cone_point`].
    pub fn tube_point(&mut self, rep: &RepresentationConfig<R>) -> Vec<C<R>> {
        let y = self.cone_point(rep);
        (0..rep.dim_v())
            .map(|k| C::new(self.range(-0.8, 0.8), y[k]))
            .collect()
    }

    pub fn tube_element(&mut self, rep: &RepresentationConfig<R>) -> AlgebraElement<R> {
        let coords = self.tube_point(rep);
        let desc = rep.algebra().expect("algebra-backed configuration").clone();
        AlgebraElement::new(desc, coords).expect("dimension fixed")
    }

    /// Complex vector in `U` with a modest imaginary part (keeps the
    /// truncation radius small).
    pub fn u_point(&mut self, rep: &RepresentationConfig<R>) -> Vec<C<R>> {
        (0..rep.dim_u())
            .map(|_| C::new(self.range(-0.6, 0.6), self.range(-0.25, 0.25)))
            .collect()
    }

    /// Real coordinates in `U`, for checks restricted to real arguments.
    pub fn real_u_point(&mut self, rep: &RepresentationConfig<R>) -> Vec<C<R>> {
        (0..rep.dim_u())
            .map(|_| C::new(self.range(-0.6, 0.6), R::zero()))
            .collect()
    }

    /// Random algebra element with coordinates in `[-1, 1]`.
    pub fn algebra_point(&mut self, rep: &RepresentationConfig<R>) -> AlgebraElement<R> {
        let desc = rep.algebra().expect("algebra-backed configuration").clone();
        let coords: Vec<R> = (0..rep.dim_v()).map(|_| self.range(-1.0, 1.0)).collect();
        AlgebraElement::from_real(desc, &coords).expect("dimension fixed")
    }

    /// Nonzero integer combination of the columns of a rational basis.
    pub fn lattice_vector(&mut self, basis: &crate::rational::RMat) -> Vec<Rat> {
        self.lattice_vector_in_range(basis, 2)
    }

    /// Same, with coefficients restricted to `[-range, range]`. The
    /// quasi-periodicity factor grows like `exp(pi rho(psi(y) n, n))`, so
    /// checks that exponentiate the draw keep it small.
    pub fn lattice_vector_in_range(
        &mut self,
        basis: &crate::rational::RMat,
        range: i64,
    ) -> Vec<Rat> {
        let dim = basis.cols();
        loop {
            let coeffs: Vec<i64> = (0..dim)
                .map(|_| self.rng.gen_range(-range..=range))
                .collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let mut v = vec![Rat::from_integer(0.into()); basis.rows()];
            for (j, &c) in coeffs.iter().enumerate() {
                for (vi, bi) in v.iter_mut().zip(basis.col(j)) {
                    *vi += bi * rat_int(c);
                }
            }
            return v;
        }
    }

    pub fn gen_range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}
