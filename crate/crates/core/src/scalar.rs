//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("representable scalar")
    }

    /// Machine epsilon relative to `f64`; 1 for `f64`, about 5e8 for `f32`.
    #[inline]
    fn precision_ratio() -> f64 {
        Self::epsilon().as_f64() / f64::EPSILON
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerical tolerances used across the crate.
///
/// The `f64` values are the reference settings; lower precision scalars get
/// relative tolerances inflated by their epsilon ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Edges with weight below this are not part of the support.
    pub support: T,
    /// Relative PSD slack (multiplied by the largest eigenvalue).
    pub psd: T,
    /// Mixture trace / orthonormality / reconstruction tolerance.
    pub mix: T,
    /// Relative kernel threshold.
    pub rank: T,
    /// Relative residual target of the Laplacian solves.
    pub solve: T,
    /// Wiener sandwich slack, multiplied by `1 + |mass|`.
    pub wiener: T,
    /// Node balance tolerance relative to the largest weight.
    pub balance: T,
    /// Geometric merge / intersection tolerance on the torus.
    pub geom: T,
}

impl<T: Real> Tolerances<T> {
    pub fn standard() -> Self {
        let ratio = T::precision_ratio();
        let rel = |base: f64| T::lit((base * ratio).min(1e-2));
        let abs = |base: f64| T::lit(base).max(T::epsilon() * T::lit(16.0));
        Self {
            support: abs(1e-12),
            psd: rel(1e-10),
            mix: rel(1e-9),
            rank: rel(1e-8),
            solve: rel(1e-11),
            wiener: rel(1e-8),
            balance: rel(1e-10),
            geom: abs(1e-9),
        }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_tolerances_are_reference_values() {
        let t = Tolerances::<f64>::standard();
        assert_eq!(t.support, 1e-12);
        assert_eq!(t.mix, 1e-9);
        assert_eq!(t.rank, 1e-8);
        assert_eq!(t.solve, 1e-11);
        assert_eq!(t.geom, 1e-9);
    }

    #[test]
    fn f32_tolerances_are_inflated() {
        let t = Tolerances::<f32>::standard();
        assert!(t.solve > 1e-6);
        assert!(t.support >= f32::EPSILON);
    }
}
