//! Floating-point scalar abstraction used by all inexact kernels.
//!
//! Everything numeric in this crate is generic over [`Real`]; exact lattice
//! arithmetic lives in [`crate::rational`] and is not scalar-generic.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar for floating-point kernels: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over a [`Real`].
pub type C<R> = Complex<R>;

/// `exp(i*pi*q)` for complex `q`, written to keep the modulus exact in the
/// exponent: `|exp(i*pi*q)| = exp(-pi*Im q)`.
pub fn exp_i_pi<R: Real>(q: C<R>) -> C<R> {
    let pi = R::PI();
    C::from_polar((-pi * q.im).exp(), pi * q.re)
}

/// Neumaier-compensated accumulator; summation order defines the result.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            comp: R::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: R) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 repeated: naive f64 loses the small increments entirely.
        let mut c = CompensatedSum::<f64>::new();
        c.add(1.0);
        for _ in 0..1000 {
            c.add(1e-16);
        }
        assert!((c.value() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }

    #[test]
    fn exp_i_pi_quarter_turns() {
        let v = exp_i_pi(C::new(0.5f64, 0.0));
        assert!((v.re).abs() < 1e-15 && (v.im - 1.0).abs() < 1e-15);
        let w = exp_i_pi(C::new(0.0f64, 1.0));
        assert!((w.re - (-std::f64::consts::PI).exp()).abs() < 1e-16);
        assert_eq!(w.im, 0.0);
    }
}
