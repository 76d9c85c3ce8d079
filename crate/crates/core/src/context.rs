//! Working precision and truncation policy shared by every evaluator.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Multiprecision real used throughout the crate.
pub type Real = Float;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_MAX_TERMS: usize = 4_000_000;
pub const DEFAULT_QUAD_LEVELS: u32 = 10;

/// Precision, tolerance and truncation caps governing one evaluation.
///
/// Every evaluator is a pure function of its inputs and a context, so a
/// context can be shared freely between threads.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    precision_bits: u32,
    target_tol: f64,
    max_terms: usize,
    quad_levels: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(DEFAULT_PRECISION_BITS).expect("default precision is valid")
    }
}

impl PrecisionContext {
    /// Context with the default tolerance for `precision_bits`:
    /// `max(1e-30, 2^(16 - precision_bits))`.
    pub fn new(precision_bits: u32) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::Context(format!(
                "precision_bits must be at least 64, got {precision_bits}"
            )));
        }
        let floor = 2f64.powi(16 - precision_bits as i32);
        Ok(PrecisionContext {
            precision_bits,
            target_tol: floor.max(1e-30),
            max_terms: DEFAULT_MAX_TERMS,
            quad_levels: DEFAULT_QUAD_LEVELS,
        })
    }

    pub fn with_target_tol(mut self, tol: f64) -> Result<Self> {
        let floor = 2f64.powi(16 - self.precision_bits as i32);
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Context(format!("target_tol must be positive, got {tol}")));
        }
        if tol < floor {
            return Err(Error::Context(format!(
                "target_tol {tol:e} leaves no guard digits at {} bits (minimum {floor:e})",
                self.precision_bits
            )));
        }
        self.target_tol = tol;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Context("max_terms must be positive".into()));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn with_quad_levels(mut self, levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Context("quad_levels must be positive".into()));
        }
        self.quad_levels = levels;
        Ok(self)
    }

    /// Same caps at `factor` times the precision. The tolerance is kept,
    /// so the escalated context isolates truncation error from method error.
    pub fn escalated(&self, factor: u32) -> Self {
        PrecisionContext {
            precision_bits: self.precision_bits * factor.max(1),
            ..self.clone()
        }
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn target_tol(&self) -> f64 {
        self.target_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn quad_levels(&self) -> u32 {
        self.quad_levels
    }

    /// Mantissa bits for new values.
    pub fn prec(&self) -> u32 {
        self.precision_bits
    }

    pub fn real<T>(&self, v: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.prec())
    }

    pub fn one(&self) -> Real {
        self.real(1)
    }

    /// Parse a decimal literal at working precision.
    pub fn parse(&self, s: &str) -> Result<Real> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::domain(format!("cannot parse real number {s:?}: {e}")))?;
        Ok(Float::with_val(self.prec(), parsed))
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.prec(), Constant::Pi)
    }

    /// Absolute truncation threshold for series: `2^(8 - precision_bits)`.
    pub fn series_eps(&self) -> Real {
        Float::with_val(self.prec(), Float::i_exp(1, 8 - self.precision_bits as i32))
    }

    pub fn log2_series_eps(&self) -> f64 {
        8.0 - self.precision_bits as f64
    }

    pub fn tol(&self) -> Real {
        self.real(self.target_tol)
    }
}

/// `n!` as a real.
pub fn factorial(n: u32, prec: u32) -> Real {
    let f = rug::Integer::from(rug::Integer::factorial(n));
    Float::with_val(prec, &f)
}

/// `v^k` for a non-negative integer power.
pub fn powu(v: &Real, k: u32) -> Real {
    Float::with_val(v.prec(), v.pow(k))
}

/// Decimal string with `digits` significant digits.
pub fn to_sig_digits(v: &Real, digits: usize) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let s = v.to_string_radix(10, Some(digits.max(1)));
    normalize_decimal(&s)
}

/// Decimal string carrying every digit the precision supports.
pub fn to_full_string(v: &Real) -> String {
    let digits = (v.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize;
    to_sig_digits(v, digits)
}

fn normalize_decimal(s: &str) -> String {
    // MPFR prints exponents as `e-5` / `e5`; keep them, strip a trailing
    // run of zeros in the mantissa so equal values print identically.
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let mant = if mant.contains('.') {
        let t = mant.trim_end_matches('0');
        t.trim_end_matches('.')
    } else {
        mant
    };
    match exp {
        Some(e) => format!("{mant}e{e}"),
        None => mant.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(32).is_err());
        assert!(PrecisionContext::new(64).is_ok());
    }

    #[test]
    fn tolerance_needs_guard_digits() {
        let ctx = PrecisionContext::new(64).unwrap();
        assert!(ctx.clone().with_target_tol(1e-30).is_err());
        assert!(ctx.clone().with_target_tol(1e-12).is_ok());
        assert!(ctx.with_target_tol(-1.0).is_err());
        let ctx = PrecisionContext::default();
        assert_eq!(ctx.target_tol(), 1e-30);
    }

    #[test]
    fn escalation_keeps_caps() {
        let ctx = PrecisionContext::default().with_max_terms(10).unwrap();
        let hi = ctx.escalated(3);
        assert_eq!(hi.precision_bits(), 768);
        assert_eq!(hi.max_terms(), 10);
        assert_eq!(hi.target_tol(), ctx.target_tol());
    }

    #[test]
    fn decimal_formatting() {
        let ctx = PrecisionContext::default();
        assert_eq!(to_sig_digits(&ctx.real(0.5), 20), "5e-1");
        assert_eq!(to_sig_digits(&ctx.zero(), 20), "0");
        let third = ctx.one() / ctx.real(3);
        assert_eq!(to_sig_digits(&third, 5), "3.3333e-1");
    }
}
