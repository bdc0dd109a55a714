//! Exact positive rational slopes.
//!
//! Slopes are kept in lowest terms with positive numerator and denominator.
//! General signed rational values elsewhere in the crate use
//! [`num_rational::BigRational`] directly; this type only models surgery
//! coefficients `p/q > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A positive rational slope `p/q` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosRational {
    num: BigInt,
    den: BigInt,
}

impl PosRational {
    /// Builds `p/q`, reducing to lowest terms. Rejects non-positive inputs.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::from_bigint(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_bigint(num: BigInt, den: BigInt) -> Result<Self> {
        if num.is_zero() || den.is_zero() || num.is_negative() || den.is_negative() {
            return Err(Error::InvalidSlope(format!("{num}/{den} is not positive")));
        }
        let g = num.gcd(&den);
        Ok(PosRational {
            num: num / &g,
            den: den / g,
        })
    }

    pub fn from_integer(n: i64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Numerator as `i64`; callers stay within desk-scale slopes.
    pub fn num_i64(&self) -> i64 {
        self.num.to_i64().expect("slope numerator exceeds i64")
    }

    pub fn den_i64(&self) -> i64 {
        self.den.to_i64().expect("slope denominator exceeds i64")
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Ceiling of `p/q`.
    pub fn ceil(&self) -> BigInt {
        // ceil(p/q) = floor((p + q - 1)/q) for positive p, q
        (&self.num + &self.den - BigInt::one()).div_floor(&self.den)
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    /// Exact comparison against an arbitrary rational value.
    pub fn cmp_rational(&self, other: &BigRational) -> Ordering {
        self.to_big_rational().cmp(other)
    }
}

impl PartialOrd for PosRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PosRational {
    fn cmp(&self, other: &Self) -> Ordering {
        // p/q < r/s  <=>  p*s < r*q for positive denominators
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for PosRational {
    type Err = Error;

    /// Parses `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| Error::InvalidSlope(format!("cannot parse numerator in {s:?}")))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| Error::InvalidSlope(format!("cannot parse denominator in {s:?}")))?;
        PosRational::from_bigint(num, den)
    }
}

/// Renders a signed rational in the stable `num/den` wire format.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = PosRational::new(42, 8).unwrap();
        assert_eq!(r.num_i64(), 21);
        assert_eq!(r.den_i64(), 4);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(PosRational::new(0, 1).is_err());
        assert!(PosRational::new(-3, 2).is_err());
        assert!(PosRational::new(3, 0).is_err());
    }

    #[test]
    fn parses_slash_and_integer_forms() {
        let r: PosRational = "21/4".parse().unwrap();
        assert_eq!((r.num_i64(), r.den_i64()), (21, 4));
        let n: PosRational = "7".parse().unwrap();
        assert!(n.is_integer());
        assert_eq!(n.num_i64(), 7);
        assert!("0/1".parse::<PosRational>().is_err());
    }

    #[test]
    fn ceil_matches_hand_values() {
        let r = PosRational::new(21, 4).unwrap();
        assert_eq!(r.ceil(), BigInt::from(6));
        let n = PosRational::new(7, 1).unwrap();
        assert_eq!(n.ceil(), BigInt::from(7));
        let small = PosRational::new(2, 3).unwrap();
        assert_eq!(small.ceil(), BigInt::from(1));
    }

    #[test]
    fn ordering_is_exact() {
        let a = PosRational::new(7, 2).unwrap();
        let b = PosRational::new(4, 1).unwrap();
        assert!(a < b);
        assert!(b > a);
        assert_eq!(a, PosRational::new(14, 4).unwrap());
    }
}
