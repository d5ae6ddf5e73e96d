//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type the solver can run on.
///
/// The tolerance hooks let each precision carry thresholds that make sense
/// for its own machine epsilon. For `f64` they are the documented defaults
/// (`1e-9` for probability mass and tight/slack classification, `1e-8` for
/// the "old distribution is still optimal" test).
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance on the mass of a probability distribution.
    fn prob_tolerance() -> Self;
    /// Slack below which an LP constraint counts as tight.
    fn slack_tolerance() -> Self;
    /// Tolerance for keeping the current distribution during improvement.
    fn opt_tolerance() -> Self;
    /// Pivot magnitude below which a matrix is treated as singular.
    fn pivot_tolerance() -> Self;

    /// Lossless for `f64`, rounding for narrower types.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn prob_tolerance() -> Self {
        1e-9
    }
    fn slack_tolerance() -> Self {
        1e-9
    }
    fn opt_tolerance() -> Self {
        1e-8
    }
    fn pivot_tolerance() -> Self {
        1e-13
    }
}

impl Scalar for f32 {
    fn prob_tolerance() -> Self {
        1e-5
    }
    fn slack_tolerance() -> Self {
        1e-5
    }
    fn opt_tolerance() -> Self {
        1e-4
    }
    fn pivot_tolerance() -> Self {
        1e-6
    }
}

/// Largest element of a non-empty slice.
pub(crate) fn max_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::neg_infinity(), T::max)
}

/// Smallest element of a non-empty slice.
pub(crate) fn min_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::infinity(), T::min)
}
