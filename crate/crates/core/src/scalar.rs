//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Real`]. Concrete aliases for `f64` live
//! at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar: `f32` or `f64`.
///
/// The `Display`/`FromStr` pair must round-trip exactly (shortest-repr
/// formatting guarantees this for the primitive floats), which is what makes
/// text checkpoints bit-exact.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal (tolerances, fixed constants). Lossy for `f32`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn half() -> Self {
        Self::of(0.5)
    }

    fn two() -> Self {
        Self::of(2.0)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum<Self>
        + Debug
        + Display
        + FromStr
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}
