//! Truncated one-variable power series over the rationals, and the Todd-type
//! generating series built from them.

use crate::error::{Error, Result};
use crate::scalar::{factorial, Ratio};
use num_traits::{One, Zero};

/// Coefficient list `coeffs[k]` of x^k, truncated at a fixed order
/// (`coeffs.len() - 1`). Binary operations truncate to the smaller order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Ratio>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Ratio>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Ratio::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Ratio::one();
        s
    }

    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Ratio::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Ratio {
        self.coeffs.get(k).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn coeffs(&self) -> &[Ratio] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> PowerSeries {
        let mut c = self.coeffs.clone();
        c.truncate(order + 1);
        c.resize(order + 1, Ratio::zero());
        PowerSeries { coeffs: c }
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| self.coeff(k) + other.coeff(k)).collect();
        PowerSeries { coeffs }
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        self.add(&other.scale(&-Ratio::one()))
    }

    pub fn scale(&self, c: &Ratio) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Ratio::zero(); order + 1];
        for i in 0..=order {
            if self.coeff(i).is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                coeffs[i + j] = coeffs[i + j].clone() + self.coeff(i) * other.coeff(j);
            }
        }
        PowerSeries { coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<PowerSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::precondition("series has no constant term to invert"));
        }
        let order = self.order();
        let c0_inv = Ratio::one() / self.coeffs[0].clone();
        let mut g = vec![Ratio::zero(); order + 1];
        g[0] = c0_inv.clone();
        for k in 1..=order {
            let mut acc = Ratio::zero();
            for i in 1..=k {
                acc = acc + self.coeff(i) * g[k - i].clone();
            }
            g[k] = -c0_inv.clone() * acc;
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// exp of a series with zero constant term.
    pub fn exp(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::precondition("exp needs zero constant term"));
        }
        let order = self.order();
        let mut out = PowerSeries::one(order);
        let mut pow = PowerSeries::one(order);
        for k in 1..=order {
            pow = pow.mul(self);
            out = out.add(&pow.scale(&(Ratio::one() / factorial(k as u64))));
        }
        Ok(out)
    }

    /// log of a series with constant term one.
    pub fn log(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::precondition("log needs constant term one"));
        }
        let order = self.order();
        let u = self.sub(&PowerSeries::one(order));
        let mut out = PowerSeries::zero(order);
        let mut pow = PowerSeries::one(order);
        for k in 1..=order {
            pow = pow.mul(&u);
            let sign = if k % 2 == 1 { Ratio::one() } else { -Ratio::one() };
            out = out.add(&pow.scale(&(sign / Ratio::from_integer((k as i64).into()))));
        }
        Ok(out)
    }

    /// Square root with constant term one: exp(log(f)/2).
    pub fn sqrt(&self) -> Result<PowerSeries> {
        let half = Ratio::new(1.into(), 2.into());
        self.log()?.scale(&half).exp()
    }

    /// Coefficients of x^1, x^2, ... (the constant term dropped), as used
    /// for trace expansions of matrix logarithms.
    pub fn tail_coefficients(&self) -> Vec<Ratio> {
        self.coeffs[1..].to_vec()
    }
}

/// (1 - e^{-x})/x = sum_k (-x)^k/(k+1)!.
pub fn todd_denominator(order: usize) -> PowerSeries {
    let coeffs = (0..=order)
        .map(|k| {
            let sign = if k % 2 == 0 { Ratio::one() } else { -Ratio::one() };
            sign / factorial(k as u64 + 1)
        })
        .collect();
    PowerSeries::new(coeffs)
}

/// Todd series x/(1 - e^{-x}), truncated at `order`.
pub fn todd_series(order: usize) -> PowerSeries {
    todd_denominator(order)
        .invert()
        .expect("unit constant term")
}

/// 2 sinh(x/2)/x = sum over odd j of x^{j-1} / (2^{j-1} j!).
pub fn tilde_todd_denominator(order: usize) -> PowerSeries {
    let mut coeffs = vec![Ratio::zero(); order + 1];
    let mut j = 1u64;
    while (j - 1) as usize <= order {
        let two_pow = Ratio::from_integer(num::BigInt::from(2).pow((j - 1) as u32));
        coeffs[(j - 1) as usize] = Ratio::one() / (two_pow * factorial(j));
        j += 2;
    }
    PowerSeries::new(coeffs)
}

/// The symmetrized Todd-type series x/(2 sinh(x/2)) = td(x) e^{-x/2}.
pub fn tilde_todd_series(order: usize) -> PowerSeries {
    tilde_todd_denominator(order)
        .invert()
        .expect("unit constant term")
}
