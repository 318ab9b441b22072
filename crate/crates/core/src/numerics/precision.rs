use rug::Float;

use crate::error::{Error, Result};

/// Default number of requested decimal digits.
pub const DEFAULT_TARGET_DIGITS: u32 = 50;
/// Default number of extra working digits.
pub const DEFAULT_GUARD_DIGITS: u32 = 10;
/// Extra digits per unit of truncation order, the alternating-binomial
/// cancellation bound `log10(2)`.
pub const DEFAULT_CANCELLATION_FACTOR: f64 = std::f64::consts::LOG10_2;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Working-precision policy threaded through every evaluation.
///
/// The effective precision for an order-`K` sum is
/// `target_digits + guard_digits + ceil(K * cancellation_factor)` decimal
/// digits. Families whose binomial weights alternate in sign with a larger
/// growth per order (negative `lambda` in the pi and Catalan families) ask for
/// more through [`PrecisionContext::working_bits_with_growth`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    target_digits: u32,
    guard_digits: u32,
    cancellation_factor: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            target_digits: DEFAULT_TARGET_DIGITS,
            guard_digits: DEFAULT_GUARD_DIGITS,
            cancellation_factor: DEFAULT_CANCELLATION_FACTOR,
        }
    }
}

impl PrecisionContext {
    pub fn new(target_digits: u32, guard_digits: u32) -> Result<Self> {
        Self::with_cancellation_factor(target_digits, guard_digits, DEFAULT_CANCELLATION_FACTOR)
    }

    pub fn with_cancellation_factor(target_digits: u32, guard_digits: u32, cancellation_factor: f64) -> Result<Self> {
        if target_digits < 1 {
            return Err(Error::domain("target_digits must be at least 1"));
        }
        if !(cancellation_factor >= 0.0 && cancellation_factor.is_finite()) {
            return Err(Error::domain("cancellation factor must be finite and non-negative"));
        }
        Ok(PrecisionContext {
            target_digits,
            guard_digits,
            cancellation_factor,
        })
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn cancellation_factor(&self) -> f64 {
        self.cancellation_factor
    }

    /// Same policy with a different target.
    pub fn with_target(&self, target_digits: u32) -> Result<Self> {
        Self::with_cancellation_factor(target_digits, self.guard_digits, self.cancellation_factor)
    }

    /// Decimal digits carried for an order-`order` sum.
    pub fn working_digits(&self, order: usize) -> u32 {
        self.working_digits_with_growth(order, 1.0)
    }

    /// Like [`working_digits`](Self::working_digits), but `growth` is the
    /// per-order magnitude ratio of the largest summand to the result. The
    /// larger of `log10(growth)` and the context factor is charged per order.
    pub fn working_digits_with_growth(&self, order: usize, growth: f64) -> u32 {
        let per_order = self
            .cancellation_factor
            .max(if growth > 1.0 { growth.log10() } else { 0.0 });
        let extra = (order as f64 * per_order).ceil() as u32;
        self.target_digits + self.guard_digits + extra
    }

    pub fn working_bits(&self, order: usize) -> u32 {
        digits_to_bits(self.working_digits(order))
    }

    pub fn working_bits_with_growth(&self, order: usize, growth: f64) -> u32 {
        digits_to_bits(self.working_digits_with_growth(order, growth))
    }

    /// Precision for order-independent work (direct sums, constants).
    pub fn base_bits(&self) -> u32 {
        digits_to_bits(self.target_digits + self.guard_digits)
    }

    /// `10^-target_digits` at base precision.
    pub fn tolerance(&self) -> Float {
        pow10(-(self.target_digits as i32), self.base_bits())
    }

    pub fn real(&self, x: f64) -> Float {
        Float::with_val(self.base_bits(), x)
    }

    /// Parses a decimal literal at base precision, so `"0.3"` is not
    /// routed through binary64.
    pub fn parse(&self, text: &str) -> Result<Float> {
        let parsed = Float::parse(text.trim()).map_err(|e| Error::Parse(format!("invalid number {text:?}: {e}")))?;
        Ok(Float::with_val(self.base_bits(), parsed))
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * BITS_PER_DIGIT).ceil() as u32 + 8
}

/// `10^exponent` rounded to `bits`.
pub fn pow10(exponent: i32, bits: u32) -> Float {
    use rug::ops::Pow;
    Float::with_val(bits, Float::with_val(bits, 10).pow(exponent))
}
