//! Positive sequences: the diagonal entries `a_n` and the weights `r_n`, `s_n`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticClass, LimitClass};
use crate::error::{Error, Result};
use crate::numeric::dyadic_probes;

/// A user-supplied evaluator for the `custom` family.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub f: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFn({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// `chi / n`
    CesaroScaled {
        chi: f64,
    },
    /// `n^{-p}`
    PCesaro {
        p: f64,
    },
    /// `1 / ln(n + 1)`
    LogReciprocal,
    /// `n^{-beta}`
    PowerWeight {
        beta: f64,
    },
    /// `ratio^n`
    Geometric {
        ratio: f64,
    },
    Constant {
        value: f64,
    },
    /// Finite data, `values[n - 1]`.
    Table {
        values: Vec<f64>,
    },
    Custom(CustomFn),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::CesaroScaled { .. } => "cesaro_scaled",
            Family::PCesaro { .. } => "p_cesaro",
            Family::LogReciprocal => "log_reciprocal",
            Family::PowerWeight { .. } => "power_weight",
            Family::Geometric { .. } => "geometric",
            Family::Constant { .. } => "constant",
            Family::Table { .. } => "table",
            Family::Custom(_) => "custom",
        }
    }
}

/// An evaluable positive sequence with an optional growth class.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    family: Family,
    asym: Option<AsymptoticClass>,
}

/// JSON form of a sequence: `{"family": "...", "params": {...}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    pub family: String,
    #[serde(default)]
    pub params: SequenceParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asym: Option<AsymptoticClass>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn invalid(family: &str, reason: impl Into<String>) -> Error {
    Error::InvalidFamilyParam {
        family: family.to_string(),
        reason: reason.into(),
    }
}

fn require_positive(family: &str, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(
            family,
            format!("`{name}` must be positive and finite, got {v}"),
        ))
    }
}

fn require_finite(family: &str, name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(family, format!("`{name}` must be finite")))
    }
}

impl SequenceSpec {
    /// Build a built-in family, attaching its growth class.
    pub fn make_family(family: Family) -> Result<Self> {
        let asym = match &family {
            Family::CesaroScaled { chi } => {
                let chi = require_positive("cesaro_scaled", "chi", *chi)?;
                Some(AsymptoticClass::power_law(chi, -1.0))
            }
            Family::PCesaro { p } => Some(AsymptoticClass::power_law(
                1.0,
                -require_finite("p_cesaro", "p", *p)?,
            )),
            Family::LogReciprocal => Some(AsymptoticClass {
                constant: 1.0,
                geo_base: 1.0,
                power: 0.0,
                log_power: -1.0,
            }),
            Family::PowerWeight { beta } => Some(AsymptoticClass::power_law(
                1.0,
                -require_finite("power_weight", "beta", *beta)?,
            )),
            Family::Geometric { ratio } => {
                let ratio = require_positive("geometric", "ratio", *ratio)?;
                Some(AsymptoticClass {
                    constant: 1.0,
                    geo_base: ratio,
                    power: 0.0,
                    log_power: 0.0,
                })
            }
            Family::Constant { value } => Some(AsymptoticClass::power_law(
                require_positive("constant", "value", *value)?,
                0.0,
            )),
            Family::Table { values } => {
                if values.is_empty() {
                    return Err(invalid("table", "table must not be empty"));
                }
                if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return Err(invalid(
                        "table",
                        format!("entries must be positive and finite, got {v}"),
                    ));
                }
                None
            }
            Family::Custom(_) => None,
        };
        Ok(Self { family, asym })
    }

    pub fn cesaro_scaled(chi: f64) -> Result<Self> {
        Self::make_family(Family::CesaroScaled { chi })
    }
    pub fn p_cesaro(p: f64) -> Result<Self> {
        Self::make_family(Family::PCesaro { p })
    }
    pub fn log_reciprocal() -> Self {
        Self::make_family(Family::LogReciprocal).expect("parameter-free family")
    }
    pub fn power_weight(beta: f64) -> Result<Self> {
        Self::make_family(Family::PowerWeight { beta })
    }
    pub fn geometric(ratio: f64) -> Result<Self> {
        Self::make_family(Family::Geometric { ratio })
    }
    pub fn constant(value: f64) -> Result<Self> {
        Self::make_family(Family::Constant { value })
    }
    pub fn table(values: Vec<f64>) -> Result<Self> {
        Self::make_family(Family::Table { values })
    }
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            family: Family::Custom(CustomFn {
                name: name.into(),
                f: Arc::new(f),
            }),
            asym: None,
        }
    }

    /// Replace (or drop) the attached growth class.
    pub fn with_asym(mut self, asym: Option<AsymptoticClass>) -> Self {
        self.asym = asym;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn asym(&self) -> Option<&AsymptoticClass> {
        self.asym.as_ref()
    }

    pub fn table_len(&self) -> Option<usize> {
        match &self.family {
            Family::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    /// Largest index that can be evaluated, capped at `cap`.
    pub fn max_index(&self, cap: usize) -> usize {
        self.table_len().map_or(cap, |len| len.min(cap))
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidInput("sequence indices start at 1".into()));
        }
        if let Some(len) = self.table_len() {
            if n > len {
                return Err(Error::IndexOutOfRange { index: n, len });
            }
        }
        Ok(())
    }

    /// `x * w_n`, evaluated so that exact cancellations survive (for
    /// `cesaro_scaled`, `n * a_n` is computed as `chi * n / n`).
    pub fn mul_term(&self, n: usize, x: f64) -> Result<f64> {
        self.check_index(n)?;
        let nf = n as f64;
        Ok(match &self.family {
            Family::CesaroScaled { chi } => chi * x / nf,
            Family::PCesaro { p } => x / nf.powf(*p),
            Family::LogReciprocal => x / nf.ln_1p(),
            Family::PowerWeight { beta } => x / nf.powf(*beta),
            Family::Geometric { ratio } => {
                if n <= i32::MAX as usize {
                    x * ratio.powi(n as i32)
                } else {
                    x * (nf * ratio.ln()).exp()
                }
            }
            Family::Constant { value } => value * x,
            Family::Table { values } => values[n - 1] * x,
            Family::Custom(c) => (c.f)(n) * x,
        })
    }

    pub fn eval(&self, n: usize) -> Result<f64> {
        self.mul_term(n, 1.0)
    }

    /// `ln w_n`; stays finite where `eval` under- or overflows.
    pub fn ln_eval(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        let nf = n as f64;
        Ok(match &self.family {
            Family::CesaroScaled { chi } => chi.ln() - nf.ln(),
            Family::PCesaro { p } => -p * nf.ln(),
            Family::PowerWeight { beta } => -beta * nf.ln(),
            Family::Geometric { ratio } => nf * ratio.ln(),
            _ => self.eval(n)?.ln(),
        })
    }

    /// True when the family is known to be non-increasing in `n`.
    pub fn known_nonincreasing(&self) -> bool {
        match &self.family {
            Family::CesaroScaled { .. } | Family::LogReciprocal | Family::Constant { .. } => true,
            Family::PCesaro { p } => *p >= 0.0,
            Family::PowerWeight { beta } => *beta >= 0.0,
            Family::Geometric { ratio } => *ratio <= 1.0,
            Family::Table { values } => values.windows(2).all(|w| w[1] <= w[0]),
            Family::Custom(_) => false,
        }
    }

    pub fn from_config(cfg: &SequenceConfig) -> Result<Self> {
        let fam = cfg.family.as_str();
        let p = &cfg.params;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| invalid(fam, format!("missing parameter `{name}`")))
        };
        let family = match fam {
            "cesaro_scaled" => Family::CesaroScaled {
                chi: need(p.chi, "chi")?,
            },
            "p_cesaro" => Family::PCesaro { p: need(p.p, "p")? },
            "log_reciprocal" => Family::LogReciprocal,
            "power_weight" => Family::PowerWeight {
                beta: need(p.beta, "beta")?,
            },
            "geometric" => Family::Geometric {
                ratio: need(p.ratio, "ratio")?,
            },
            "constant" => Family::Constant {
                value: need(p.value, "value")?,
            },
            "table" => Family::Table {
                values: p
                    .values
                    .clone()
                    .ok_or_else(|| invalid(fam, "missing parameter `values`"))?,
            },
            "custom" => {
                return Err(invalid(
                    fam,
                    "custom sequences can only be built through the library API",
                ))
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        let spec = Self::make_family(family)?;
        Ok(match cfg.asym {
            Some(a) => {
                AsymptoticClass::new(a.constant, a.geo_base, a.power, a.log_power)?;
                spec.with_asym(Some(a))
            }
            None => spec,
        })
    }

    pub fn to_config(&self) -> SequenceConfig {
        let mut params = SequenceParams::default();
        match &self.family {
            Family::CesaroScaled { chi } => params.chi = Some(*chi),
            Family::PCesaro { p } => params.p = Some(*p),
            Family::LogReciprocal | Family::Custom(_) => {}
            Family::PowerWeight { beta } => params.beta = Some(*beta),
            Family::Geometric { ratio } => params.ratio = Some(*ratio),
            Family::Constant { value } => params.value = Some(*value),
            Family::Table { values } => params.values = Some(values.clone()),
        }
        SequenceConfig {
            family: self.family.name().to_string(),
            params,
            asym: self.asym,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    Analytic,
    Numeric,
}

/// Estimate of `chi = lim n a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub chi: f64,
    pub method: ChiMethod,
    /// `max |n a_n - chi|` over the dyadic probes of the window.
    pub residual: f64,
}

/// Relative drift between consecutive dyadic probes above which `n a_n` is
/// considered not to converge.
pub const CHI_DRIFT_TOL: f64 = 0.10;
pub const CHI_ZERO_TOL: f64 = 1e-9;

pub fn estimate_chi(a: &SequenceSpec, window: (usize, usize)) -> Result<ChiEstimate> {
    let (lo, hi) = window;
    if lo < 1 || hi <= lo {
        return Err(Error::InvalidInput(format!(
            "chi window must satisfy 1 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    let probes = dyadic_probes(lo, hi);
    let values = probes
        .iter()
        .map(|&n| a.mul_term(n, n as f64))
        .collect::<Result<Vec<_>>>()?;
    let residual_for = |chi: f64| values.iter().map(|v| (v - chi).abs()).fold(0.0, f64::max);

    if let Some(c) = a.asym() {
        if c.geo_base == 1.0 && c.power == -1.0 && c.log_power == 0.0 {
            let chi = c.constant;
            return Ok(ChiEstimate {
                chi,
                method: ChiMethod::Analytic,
                residual: residual_for(chi),
            });
        }
    }

    let drifts: Vec<f64> = values.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    if let Some(&last) = drifts.last() {
        let monotone = drifts.len() < 2 || drifts[drifts.len() - 2].signum() == last.signum();
        if last.abs() > CHI_DRIFT_TOL && monotone {
            return Err(Error::ChiNotConvergent { drift: last });
        }
    }
    let chi = *values.last().expect("at least one probe");
    if chi.abs() < CHI_ZERO_TOL {
        return Err(Error::ChiZero(chi));
    }
    Ok(ChiEstimate {
        chi,
        method: ChiMethod::Numeric,
        residual: residual_for(chi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFlags {
    pub bounded: bool,
    pub strictly_positive: bool,
    /// Non-strict: `w_{n+1} <= w_n` on the scanned range.
    pub decreasing: bool,
    /// `inf w_n > 0`, in which case the weighted space coincides with plain `c_0`.
    pub bounded_below: bool,
}

pub fn verify_weight(w: &SequenceSpec, n_max: usize) -> Result<WeightFlags> {
    if n_max < 2 {
        return Err(Error::InvalidInput("verify_weight needs n_max >= 2".into()));
    }
    let n_max = w.max_index(n_max);
    let mut logs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let v = w.eval(n)?;
        let lv = w.ln_eval(n)?;
        if v < 0.0
            || !lv.is_finite()
            || (v == 0.0 && !matches!(w.family(), Family::Geometric { .. }))
        {
            return Err(Error::WeightNotPositive(n));
        }
        logs.push(lv);
    }
    let decreasing = if w.known_nonincreasing() {
        true
    } else {
        logs.windows(2).all(|p| p[1] <= p[0])
    };
    let (bounded, bounded_below) = match w.asym() {
        Some(c) => (
            c.limit_class() != LimitClass::Infinite,
            c.limit_class() != LimitClass::Zero,
        ),
        None => {
            let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
            (max < f64::MAX.ln(), min > f64::MIN_POSITIVE.ln())
        }
    };
    Ok(WeightFlags {
        bounded,
        strictly_positive: true,
        decreasing,
        bounded_below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_evaluate() {
        let c1 = SequenceSpec::cesaro_scaled(1.0).unwrap();
        assert_eq!(c1.eval(4).unwrap(), 0.25);
        assert_eq!(
            SequenceSpec::cesaro_scaled(2.0).unwrap().eval(4).unwrap(),
            0.5
        );
        let l = SequenceSpec::log_reciprocal();
        assert!((l.eval(1).unwrap() - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(
            SequenceSpec::geometric(0.5).unwrap().eval(3).unwrap(),
            0.125
        );
        assert_eq!(
            SequenceSpec::power_weight(-1.0).unwrap().eval(7).unwrap(),
            7.0
        );
    }

    #[test]
    fn asym_autofill() {
        let a = SequenceSpec::cesaro_scaled(3.0).unwrap();
        assert_eq!(a.asym(), Some(&AsymptoticClass::power_law(3.0, -1.0)));
        let g = SequenceSpec::geometric(0.5).unwrap();
        assert_eq!(g.asym().unwrap().geo_base, 0.5);
        assert_eq!(
            SequenceSpec::log_reciprocal().asym().unwrap().log_power,
            -1.0
        );
        assert_eq!(
            SequenceSpec::power_weight(2.0)
                .unwrap()
                .asym()
                .unwrap()
                .power,
            -2.0
        );
        assert!(SequenceSpec::table(vec![1.0]).unwrap().asym().is_none());
    }

    #[test]
    fn invalid_params() {
        for r in [
            SequenceSpec::cesaro_scaled(0.0),
            SequenceSpec::geometric(-0.5),
            SequenceSpec::constant(0.0),
            SequenceSpec::table(vec![1.0, -2.0]),
            SequenceSpec::table(vec![]),
        ] {
            assert_eq!(r.unwrap_err().code(), "invalid-family-param");
        }
    }

    #[test]
    fn table_out_of_range() {
        let t = SequenceSpec::table(vec![2.0, 1.0]).unwrap();
        assert_eq!(t.eval(2).unwrap(), 1.0);
        assert_eq!(
            t.eval(3).unwrap_err(),
            Error::IndexOutOfRange { index: 3, len: 2 }
        );
    }

    #[test]
    fn geometric_log_eval_survives_underflow() {
        let g = SequenceSpec::geometric(0.5).unwrap();
        assert_eq!(g.eval(2000).unwrap(), 0.0);
        assert!((g.ln_eval(2000).unwrap() + 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn chi_examples() {
        let e = estimate_chi(&SequenceSpec::cesaro_scaled(1.0).unwrap(), (1, 1 << 16)).unwrap();
        assert_eq!((e.chi, e.method), (1.0, ChiMethod::Analytic));
        let err = estimate_chi(&SequenceSpec::log_reciprocal(), (1, 1 << 20)).unwrap_err();
        assert_eq!(err.code(), "chi-not-convergent");
        let t = SequenceSpec::table(vec![2.0, 1.0, 2.0 / 3.0, 0.5]).unwrap();
        let e = estimate_chi(&t, (1, 4)).unwrap();
        assert_eq!(e.method, ChiMethod::Numeric);
        assert_eq!(e.chi, 2.0);
        assert!(e.residual < 1e-15);
    }

    #[test]
    fn chi_zero_detected() {
        let a = SequenceSpec::power_weight(2.0).unwrap().with_asym(None);
        // n * n^-2 = 1/n drifts by -50% per dyadic step, so the drift check fires first
        assert_eq!(
            estimate_chi(&a, (1, 1 << 12)).unwrap_err().code(),
            "chi-not-convergent"
        );
        let tiny = SequenceSpec::custom("tiny", |n| 1e-12 / n as f64);
        assert_eq!(
            estimate_chi(&tiny, (1, 1 << 12)).unwrap_err().code(),
            "chi-zero"
        );
    }

    #[test]
    fn weight_flags() {
        let f = verify_weight(&SequenceSpec::geometric(0.5).unwrap(), 64).unwrap();
        assert!(f.bounded && f.strictly_positive && f.decreasing && !f.bounded_below);
        let f = verify_weight(&SequenceSpec::constant(1.0).unwrap(), 64).unwrap();
        assert!(f.bounded && f.strictly_positive && f.decreasing && f.bounded_below);
        let f = verify_weight(&SequenceSpec::power_weight(-1.0).unwrap(), 64).unwrap();
        assert!(!f.bounded && !f.decreasing);
        let f = verify_weight(&SequenceSpec::table(vec![1.0, 2.0, 0.5]).unwrap(), 64).unwrap();
        assert!(f.bounded && !f.decreasing);
        let neg = SequenceSpec::custom("neg", |n| if n == 3 { -1.0 } else { 1.0 });
        assert_eq!(
            verify_weight(&neg, 10).unwrap_err(),
            Error::WeightNotPositive(3)
        );
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"family": "geometric", "params": {"ratio": 0.5}}"#;
        let cfg: SequenceConfig = serde_json::from_str(json).unwrap();
        let spec = SequenceSpec::from_config(&cfg).unwrap();
        assert_eq!(spec.eval(1).unwrap(), 0.5);
        let back = spec.to_config();
        assert_eq!(back.family, "geometric");
        assert_eq!(back.params.ratio, Some(0.5));
        let bad: SequenceConfig = serde_json::from_str(r#"{"family": "cesaro"}"#).unwrap();
        assert_eq!(
            SequenceSpec::from_config(&bad).unwrap_err().code(),
            "unknown-family"
        );
        let missing: SequenceConfig =
            serde_json::from_str(r#"{"family": "cesaro_scaled"}"#).unwrap();
        assert_eq!(
            SequenceSpec::from_config(&missing).unwrap_err().code(),
            "invalid-family-param"
        );
    }
}
