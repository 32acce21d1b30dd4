//! Scalar abstraction for durations.
//!
//! Every timing routine is generic over [`Time`]. The crate-root aliases fix
//! it to integer nanoseconds ([`crate::Nanos`]), which keeps equality checks
//! exact; `f64` works for continuous models.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{NumCast, Signed};

/// A duration scalar. Signed so that derived quantities such as the
/// mitigatable delay can go negative when explicit subcircuits overlap.
pub trait Time:
    Copy + PartialOrd + Debug + Display + Signed + NumCast + FromStr + Send + Sync + 'static
{
    /// Larger of two values; ties keep `self`.
    fn later(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Sum of an iterator of durations.
    fn total<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    /// Lossy conversion used for ratios and reporting.
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }

    /// Conversion from a count (gate index, register width).
    fn from_count(count: usize) -> Self {
        <Self as NumCast>::from(count).expect("count representable in time scalar")
    }
}

impl<T> Time for T where
    T: Copy + PartialOrd + Debug + Display + Signed + NumCast + FromStr + Send + Sync + 'static
{
}
