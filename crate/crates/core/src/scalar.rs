//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the linear algebra and channel models are written against.
///
/// Implemented for `f32` and `f64`. Tolerances that the algorithms need are
/// exposed per type so the same code can run at either precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for "this eigenvalue is zero" style decisions.
    const SPECTRAL_TOL: f64;
    /// Threshold below which a Fiedler vector component is treated as zero
    /// when fixing the sign.
    const SIGN_TOL: f64;
    /// Largest allowed |L[i][j] - L[j][i]| for a matrix to count as symmetric.
    const SYMMETRY_TOL: f64;

    /// Lossy conversion from `f64` literal values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in float")
    }
}

impl Scalar for f32 {
    const SPECTRAL_TOL: f64 = 1e-4;
    const SIGN_TOL: f64 = 1e-6;
    const SYMMETRY_TOL: f64 = 1e-5;
}

impl Scalar for f64 {
    const SPECTRAL_TOL: f64 = 1e-9;
    const SIGN_TOL: f64 = 1e-12;
    const SYMMETRY_TOL: f64 = 1e-9;
}

/// Converts a ratio in dB to a linear ratio.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Converts a linear ratio to dB.
pub fn linear_to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// dBm to watts.
pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    db_to_linear(dbm - T::lit(30.0))
}

/// Watts to dBm.
pub fn watts_to_dbm<T: Scalar>(w: T) -> T {
    linear_to_db(w) + T::lit(30.0)
}
