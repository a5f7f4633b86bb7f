//! Coefficient types.
//!
//! Everything algebraic (products, inverses, exp/log, shuffle pairings,
//! signatures of piecewise-linear paths) only needs field operations and is
//! written against [`Scalar`]. Norms and Hölder quantities need roots and
//! powers and are written against [`Real`].

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, NumAssign, Signed};

/// Field of coefficients for the truncated tensor algebra.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + NumAssign + Signed + Send + Sync + 'static
{
    /// False for NaN or infinite floats; always true for exact types.
    fn is_finite_value(&self) -> bool;

    /// Lossy conversion used for diagnostics and reports.
    fn to_f64_lossy(&self) -> f64;

    /// `n · 1`.
    fn from_count(n: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..n {
            acc += Self::one();
        }
        acc
    }
}

/// Floating-point scalars: f32 and f64.
pub trait Real: Scalar + Float {
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn from_count(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
    fn from_count(n: usize) -> Self {
        n as f32
    }
}

impl Scalar for Rational64 {
    fn is_finite_value(&self) -> bool {
        true
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn from_count(n: usize) -> Self {
        Rational64::from_integer(n as i64)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
}

/// `1 / n!` in the scalar field.
pub fn inv_factorial<S: Scalar>(n: usize) -> S {
    let mut f = S::one();
    for k in 2..=n {
        f *= S::from_count(k);
    }
    S::one() / f
}

/// `n!` as a float; exact for the small depths used here.
pub fn factorial_f64(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}
