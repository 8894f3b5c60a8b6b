//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Everything that touches real numbers is written against [`Scalar`] so the
//! same code runs in `f64` (the default used by the CLI) or `f32`.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Machine epsilon of the underlying float type.
    fn eps() -> Self;

    /// Tolerance below which a negative eigenvalue is treated as rounding noise.
    fn clamp_tolerance() -> Self {
        let floor = Self::lit(1e-10);
        let scaled = Self::eps() * Self::lit(1e3);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// `|x|` without tripping over the several `abs` methods in scope for `RealField`.
#[inline]
pub fn abs<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}
