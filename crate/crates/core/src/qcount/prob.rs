use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A probability held as a reduced fraction of big integers, with a
/// double-precision approximation alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProbability {
    num: BigUint,
    den: BigUint,
    approx: f64,
}

impl ExactProbability {
    /// Reduces `num / den`. Panics if `den` is zero.
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "probability with zero denominator");
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        let approx = ratio_to_f64(&num, &den);
        ExactProbability { num, den, approx }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }
}

/// `num / den` correctly scaled even when both exceed the `f64` range.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // keep 64 significant bits in the integer quotient
    let shift = 64 - (num.bits() as i64 - den.bits() as i64);
    let quotient = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    quotient.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32)
}

/// Natural log of a big integer; `-inf` for zero.
#[cfg(test)]
pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(0.0).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({})", self.num, self.den, self.approx)
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ExactProbability", 3)?;
        st.serialize_field("num", &self.num.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.serialize_field("approx", &self.approx)?;
        st.end()
    }
}
