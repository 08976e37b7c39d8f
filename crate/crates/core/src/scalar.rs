//! Scalar abstraction shared by the simulator, the kernel and the
//! state-preparation builders.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar the generic parts of the crate are written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used for unitarity and normalization checks at this precision.
    fn unitary_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {
    fn unitary_tol() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn unitary_tol() -> Self {
        1e-10
    }
}

/// Pairwise (tree) summation. Keeps roundoff at O(log n) for the long Gaussian sums.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn pairwise_sum_complex<T: Real>(xs: &[Complex<T>]) -> Complex<T> {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &x| acc + x);
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum_complex(a) + pairwise_sum_complex(b)
}
