//! Exact rational scalars and their textual form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn big(v: BigInt) -> Scalar {
    Scalar::from_integer(v)
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseScalarError(pub String);

pub fn parse_scalar(text: &str) -> Result<Scalar, ParseScalarError> {
    let err = || ParseScalarError(text.to_string());
    let t = text.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Scalar::new(p, q))
        }
        None => Ok(big(t.parse().map_err(|_| err())?)),
    }
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive(coords: &[Scalar]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in coords {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coords
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    primitive_int(ints)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
        if g.is_one() {
            return v;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Rescales positive weights to the smallest integer vector with the same ratios.
pub fn normalize_weights(w: &[Scalar]) -> Vec<Scalar> {
    primitive(w).into_iter().map(big).collect()
}

pub fn is_nonneg(s: &Scalar) -> bool {
    !s.is_negative()
}
