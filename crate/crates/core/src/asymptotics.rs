//! Growth classes `C * rho^n * n^p * (log n)^q` of positive sequences.
//!
//! Limits and series verdicts that the boundedness, compactness and spectral
//! criteria depend on are decided on these classes exactly, so that numerics
//! are only needed when a sequence carries no class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::snap_exponent;

/// A sequence asymptotic to `constant * geo_base^n * n^power * (ln n)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClass {
    pub constant: f64,
    pub geo_base: f64,
    pub power: f64,
    pub log_power: f64,
}

/// Where a sequence goes as `n -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Zero,
    FiniteNonzero,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumVerdict {
    Convergent,
    Divergent,
    UndecidedBoundary,
}

/// Verdict on `sum_k t_k` for a term class, with the growth of the partial
/// sums (divergent) or of the tails `sum_{k>n} t_k` (convergent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumClass {
    pub verdict: SumVerdict,
    pub growth: Option<AsymptoticClass>,
}

fn snap_base(rho: f64) -> f64 {
    if (rho - 1.0).abs() <= 4.0 * f64::EPSILON {
        1.0
    } else {
        rho
    }
}

impl AsymptoticClass {
    pub fn new(constant: f64, geo_base: f64, power: f64, log_power: f64) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidClass(format!(
                "constant must be positive and finite, got {constant}"
            )));
        }
        if !(geo_base > 0.0 && geo_base.is_finite()) {
            return Err(Error::InvalidClass(format!(
                "geometric base must be positive, got {geo_base}"
            )));
        }
        if !power.is_finite() || !log_power.is_finite() {
            return Err(Error::InvalidClass("exponents must be finite".into()));
        }
        Ok(Self {
            constant,
            geo_base,
            power,
            log_power,
        })
    }

    /// `C * n^p`.
    pub fn power_law(constant: f64, power: f64) -> Self {
        Self {
            constant,
            geo_base: 1.0,
            power,
            log_power: 0.0,
        }
    }

    /// The constant sequence 1.
    pub fn one() -> Self {
        Self::power_law(1.0, 0.0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let constant = self.constant * other.constant;
        if !constant.is_finite() {
            return Err(Error::ClassOverflow);
        }
        if constant == 0.0 {
            return Err(Error::InvalidClass("constant underflowed to zero".into()));
        }
        Ok(Self {
            constant,
            geo_base: snap_base(self.geo_base * other.geo_base),
            power: snap_exponent(self.power + other.power),
            log_power: snap_exponent(self.log_power + other.log_power),
        })
    }

    pub fn reciprocal(&self) -> Self {
        Self {
            constant: 1.0 / self.constant,
            geo_base: snap_base(1.0 / self.geo_base),
            power: -self.power,
            log_power: -self.log_power,
        }
    }

    pub fn limit_class(&self) -> LimitClass {
        let (rho, p, q) = (self.geo_base, self.power, self.log_power);
        if rho < 1.0 || (rho == 1.0 && (p < 0.0 || (p == 0.0 && q < 0.0))) {
            LimitClass::Zero
        } else if rho == 1.0 && p == 0.0 && q == 0.0 {
            LimitClass::FiniteNonzero
        } else {
            LimitClass::Infinite
        }
    }

    /// Natural log of the class value at `n`; `(ln n)^q` is only evaluated for `n >= 2`.
    pub fn ln_value(&self, n: usize) -> f64 {
        let nf = n as f64;
        let mut v = self.constant.ln() + nf * self.geo_base.ln() + self.power * nf.ln();
        if self.log_power != 0.0 {
            if n < 2 {
                return f64::NAN;
            }
            v += self.log_power * nf.ln().ln();
        }
        v
    }

    pub fn value(&self, n: usize) -> f64 {
        self.ln_value(n).exp()
    }

    /// Series verdict and partial-sum (or tail) growth for this term class.
    pub fn partial_sum(&self) -> SumClass {
        let (c, rho, p, q) = (self.constant, self.geo_base, self.power, self.log_power);
        let class = |constant: f64, geo_base: f64, power: f64, log_power: f64| {
            Some(AsymptoticClass {
                constant,
                geo_base,
                power,
                log_power,
            })
        };
        if rho > 1.0 {
            return SumClass {
                verdict: SumVerdict::Divergent,
                growth: class(c * rho / (rho - 1.0), rho, p, q),
            };
        }
        if rho < 1.0 {
            return SumClass {
                verdict: SumVerdict::Convergent,
                growth: class(c * rho / (1.0 - rho), rho, p, q),
            };
        }
        if p > -1.0 {
            SumClass {
                verdict: SumVerdict::Divergent,
                growth: class(c / (p + 1.0), 1.0, p + 1.0, q),
            }
        } else if p < -1.0 {
            SumClass {
                verdict: SumVerdict::Convergent,
                growth: class(c / (-p - 1.0), 1.0, p + 1.0, q),
            }
        } else if q == 0.0 {
            SumClass {
                verdict: SumVerdict::Divergent,
                growth: class(c, 1.0, 0.0, 1.0),
            }
        } else if q > 0.0 {
            SumClass {
                verdict: SumVerdict::Divergent,
                growth: class(c / (q + 1.0), 1.0, 0.0, q + 1.0),
            }
        } else if q < -1.0 {
            SumClass {
                verdict: SumVerdict::Convergent,
                growth: class(c / (-q - 1.0), 1.0, 0.0, q + 1.0),
            }
        } else {
            SumClass {
                verdict: SumVerdict::UndecidedBoundary,
                growth: None,
            }
        }
    }

    /// Class of the partial sums `sum_{k<=n} t_k`.
    ///
    /// For a convergent series the partial sums tend to a positive constant
    /// whose value the class algebra does not know; the returned class then
    /// has constant 1 and only its limit behaviour is meaningful.
    pub fn partial_sum_growth(&self) -> Option<AsymptoticClass> {
        let ps = self.partial_sum();
        match ps.verdict {
            SumVerdict::Divergent => ps.growth,
            SumVerdict::Convergent => Some(AsymptoticClass::one()),
            SumVerdict::UndecidedBoundary => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(constant: f64, rho: f64, p: f64, q: f64) -> AsymptoticClass {
        AsymptoticClass::new(constant, rho, p, q).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            c(1.0, 1.0, -1.0, 0.0).mul(&c(1.0, 1.0, 1.0, 0.0)).unwrap(),
            c(1.0, 1.0, 0.0, 0.0)
        );
        assert_eq!(
            c(2.0, 0.5, 0.0, 0.0).mul(&c(3.0, 2.0, 1.0, 0.0)).unwrap(),
            c(6.0, 1.0, 1.0, 0.0)
        );
        let with_exponent = c(1.0, 1.0, -1.0, 0.0)
            .mul(&AsymptoticClass::power_law(1.0, 2.0))
            .unwrap();
        assert_eq!(
            (
                with_exponent.geo_base,
                with_exponent.power,
                with_exponent.log_power
            ),
            (1.0, 1.0, 0.0)
        );
    }

    #[test]
    fn mul_overflow() {
        let big = c(1e300, 1.0, 0.0, 0.0);
        assert_eq!(big.mul(&big), Err(Error::ClassOverflow));
        assert_eq!(big.mul(&big).unwrap_err().code(), "class-overflow");
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(c(2.0, 1.0, 1.0, 0.0).reciprocal(), c(0.5, 1.0, -1.0, 0.0));
        assert_eq!(c(1.0, 0.5, 0.0, 0.0).reciprocal(), c(1.0, 2.0, 0.0, 0.0));
        assert_eq!(c(1.0, 1.0, 0.0, 1.0).reciprocal(), c(1.0, 1.0, 0.0, -1.0));
    }

    #[test]
    fn limit_examples() {
        assert_eq!(c(1.0, 1.0, -1.0, 0.0).limit_class(), LimitClass::Zero);
        assert_eq!(
            c(5.0, 1.0, 0.0, 0.0).limit_class(),
            LimitClass::FiniteNonzero
        );
        // (2^{n+1} - 2) / (2^n log(n+1)) ~ 2 / log n
        assert_eq!(c(2.0, 1.0, 0.0, -1.0).limit_class(), LimitClass::Zero);
        assert_eq!(c(1.0, 1.0, 0.0, 1.0).limit_class(), LimitClass::Infinite);
        assert_eq!(c(1.0, 1.01, -5.0, 0.0).limit_class(), LimitClass::Infinite);
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(
            c(1.0, 1.0, -2.0, 0.0).partial_sum().verdict,
            SumVerdict::Convergent
        );
        let harmonic = c(1.0, 1.0, -1.0, 0.0).partial_sum();
        assert_eq!(harmonic.verdict, SumVerdict::Divergent);
        assert_eq!(harmonic.growth, Some(c(1.0, 1.0, 0.0, 1.0)));
        // sum_{k<=n} 2^k = 2^{n+1} - 2 ~ 2 * 2^n
        let geo = c(1.0, 2.0, 0.0, 0.0).partial_sum();
        assert_eq!(geo.verdict, SumVerdict::Divergent);
        assert_eq!(geo.growth, Some(c(2.0, 2.0, 0.0, 0.0)));
        for n in [5usize, 20, 50] {
            let exact = 2f64.powi(n as i32 + 1) - 2.0;
            let ratio = exact / geo.growth.unwrap().value(n);
            // exact ratio is 1 - 2^{-n}
            assert!((ratio - (1.0 - 2f64.powi(-(n as i32)))).abs() < 1e-13);
        }
    }

    #[test]
    fn boundary_is_undecided() {
        for q in [-1.0, -0.5, -0.01] {
            let s = c(1.0, 1.0, -1.0, q).partial_sum();
            assert_eq!(s.verdict, SumVerdict::UndecidedBoundary);
            assert!(s.growth.is_none());
        }
        assert_eq!(
            c(1.0, 1.0, -1.0, -2.0).partial_sum().verdict,
            SumVerdict::Convergent
        );
        assert_eq!(
            c(1.0, 1.0, -1.0, 0.5).partial_sum().verdict,
            SumVerdict::Divergent
        );
    }

    #[test]
    fn invalid_classes_rejected() {
        assert!(AsymptoticClass::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(AsymptoticClass::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(AsymptoticClass::new(f64::INFINITY, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn self_ratio_is_finite_nonzero_even_with_inexact_base() {
        let a = c(3.7, 49.0, 1.3, -0.7);
        assert_eq!(
            a.mul(&a.reciprocal()).unwrap().limit_class(),
            LimitClass::FiniteNonzero
        );
    }
}
