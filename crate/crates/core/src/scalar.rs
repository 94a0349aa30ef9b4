//! Exact rational scalars and their textual round trip.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Ratio = BigRational;

/// `rat(p, q)` builds p/q; panics on q = 0 (programmer error, not input).
pub fn rat(p: i64, q: i64) -> Ratio {
    assert!(q != 0, "zero denominator");
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(p))
}

/// Parses "p/q" or "p" with optional sign and arbitrary precision.
pub fn parse_ratio(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let mk = |part: &str| -> Result<BigInt> {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::parse(format!("bad integer `{part}` in rational `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(mk(s)?)),
        Some((p, q)) => {
            let den = mk(q)?;
            if den.is_zero() {
                return Err(Error::parse(format!("zero denominator in `{s}`")));
            }
            Ok(Ratio::new(mk(p)?, den))
        }
    }
}

/// Prints as "p" for integers and "p/q" otherwise; '-' binds to the numerator.
pub fn format_ratio(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact factorial as a rational (used by symmetrization prefactors).
pub fn factorial(n: u64) -> Ratio {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Ratio::from_integer(acc)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> Ratio {
    if k > n {
        return Ratio::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Ratio::new(num, den)
}

/// Sign helper: (-1)^n as a rational.
pub fn neg_one_pow(n: usize) -> Ratio {
    if n % 2 == 0 {
        Ratio::one()
    } else {
        -Ratio::one()
    }
}

pub fn is_negative(r: &Ratio) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["3", "-7", "2/3", "-5/9", "0"] {
            let r = parse_ratio(s).unwrap();
            assert_eq!(format_ratio(&r), s);
        }
        // Normalization on parse.
        assert_eq!(format_ratio(&parse_ratio("4/6").unwrap()), "2/3");
        assert_eq!(format_ratio(&parse_ratio("4/-6").unwrap()), "-2/3");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/2").is_err());
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(5), int(120));
        assert_eq!(binomial(6, 2), int(15));
        assert_eq!(binomial(4, 0), int(1));
        assert_eq!(binomial(3, 5), int(0));
    }
}
