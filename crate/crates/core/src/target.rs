//! The target floating-point format and its ordinal enumeration.
//!
//! Target values are carried as `f64` for both formats; binary32 values are
//! simply the subset of `f64` that converts to `f32` exactly.

use std::fmt;
use std::str::FromStr;

use gmp_mpfr_sys::mpfr;
use rug::Float;

use crate::backend::RoundDir;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TargetFormat {
    #[default]
    Binary64,
    Binary32,
}

impl TargetFormat {
    pub fn name(self) -> &'static str {
        match self {
            TargetFormat::Binary64 => "binary64",
            TargetFormat::Binary32 => "binary32",
        }
    }

    /// Significand bits, including the implicit one.
    pub fn precision(self) -> u32 {
        match self {
            TargetFormat::Binary64 => 53,
            TargetFormat::Binary32 => 24,
        }
    }

    pub fn k_plus(self) -> f64 {
        match self {
            TargetFormat::Binary64 => f64::MAX,
            TargetFormat::Binary32 => f32::MAX as f64,
        }
    }

    pub fn k_minus(self) -> f64 {
        -self.k_plus()
    }

    fn bits(self, x: f64) -> u64 {
        match self {
            TargetFormat::Binary64 => x.abs().to_bits(),
            TargetFormat::Binary32 => (x.abs() as f32).to_bits() as u64,
        }
    }

    fn max_bits(self) -> u64 {
        self.bits(f64::INFINITY)
    }

    /// Whether `x` is a member of the format (finite or infinite, not NaN).
    pub fn contains(self, x: f64) -> bool {
        match self {
            TargetFormat::Binary64 => !x.is_nan(),
            TargetFormat::Binary32 => !x.is_nan() && (x as f32) as f64 == x,
        }
    }

    /// Number of members, counting both infinities and a single zero.
    pub fn total_count(self) -> u64 {
        2 * self.max_bits() + 1
    }

    /// Position of `x` in the increasing enumeration of the format, with
    /// zero at ordinal 0. Both zeros share that ordinal.
    pub fn ordinal(self, x: f64) -> Option<i64> {
        if !self.contains(x) {
            return None;
        }
        let b = self.bits(x) as i64;
        Some(if x < 0.0 { -b } else { b })
    }

    pub fn ordinal_inverse(self, i: i64) -> Option<f64> {
        let mag = i.unsigned_abs();
        if mag > self.max_bits() {
            return None;
        }
        let v = match self {
            TargetFormat::Binary64 => f64::from_bits(mag),
            TargetFormat::Binary32 => f32::from_bits(mag as u32) as f64,
        };
        Some(if i < 0 { -v } else { v })
    }

    pub fn min_ordinal(self) -> i64 {
        -(self.max_bits() as i64)
    }

    pub fn max_ordinal(self) -> i64 {
        self.max_bits() as i64
    }

    /// Number of members in `[lo, hi]`.
    ///
    /// # Panics
    /// If either bound is not a member or `lo > hi`.
    pub fn count_in(self, lo: f64, hi: f64) -> u64 {
        let a = self.ordinal(lo).expect("lower bound in format");
        let b = self.ordinal(hi).expect("upper bound in format");
        assert!(a <= b, "count_in requires lo <= hi");
        (b as i128 - a as i128) as u64 + 1
    }

    /// Split `[lo, hi]` at the ordinal midpoint. Returns `(mid, next)` where
    /// `[lo, mid]` and `[next, hi]` partition the members of `[lo, hi]`, or
    /// `None` when the interval holds a single member.
    pub fn split_point(self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let a = self.ordinal(lo)? as i128;
        let b = self.ordinal(hi)? as i128;
        if b <= a {
            return None;
        }
        let mid = (a + b).div_euclid(2) as i64;
        Some((self.ordinal_inverse(mid)?, self.ordinal_inverse(mid + 1)?))
    }

    pub fn next_up(self, x: f64) -> Option<f64> {
        self.ordinal_inverse(self.ordinal(x)? + 1)
    }

    pub fn next_down(self, x: f64) -> Option<f64> {
        self.ordinal_inverse(self.ordinal(x)? - 1)
    }

    /// Correctly rounded conversion into the format, including subnormals.
    /// `-0` is returned as `+0`.
    pub fn round(self, x: &Float, dir: RoundDir) -> f64 {
        let rnd = match dir {
            RoundDir::Down => mpfr::rnd_t::RNDD,
            RoundDir::Up => mpfr::rnd_t::RNDU,
            RoundDir::Nearest => mpfr::rnd_t::RNDN,
        };
        // SAFETY: `x` is an initialized MPFR value.
        let v = unsafe {
            match self {
                TargetFormat::Binary64 => mpfr::get_d(x.as_raw(), rnd),
                TargetFormat::Binary32 => mpfr::get_flt(x.as_raw(), rnd) as f64,
            }
        };
        if v == 0.0 {
            0.0
        } else {
            v
        }
    }

    /// Round-to-nearest from an `f64` that may not be a member.
    pub fn from_f64(self, x: f64) -> f64 {
        match self {
            TargetFormat::Binary64 => x,
            TargetFormat::Binary32 => x as f32 as f64,
        }
    }
}

impl fmt::Display for TargetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary64" => Ok(TargetFormat::Binary64),
            "binary32" => Ok(TargetFormat::Binary32),
            other => Err(format!("unknown target format '{other}' (expected binary64 or binary32)")),
        }
    }
}
