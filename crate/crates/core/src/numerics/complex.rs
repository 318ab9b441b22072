use std::fmt;

use rug::Float;

use crate::error::{Error, Result};

/// Complex number with `Float` parts at a common precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn with_val(bits: u32, re: f64, im: f64) -> Self {
        Complex {
            re: Float::with_val(bits, re),
            im: Float::with_val(bits, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Copy rounded to `bits`.
    pub fn to_prec(&self, bits: u32) -> Self {
        Complex {
            re: Float::with_val(bits, &self.re),
            im: Float::with_val(bits, &self.im),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn add(&self, other: &Complex) -> Complex {
        let bits = self.prec().max(other.prec());
        Complex {
            re: Float::with_val(bits, &self.re + &other.re),
            im: Float::with_val(bits, &self.im + &other.im),
        }
    }

    pub fn sub(&self, other: &Complex) -> Complex {
        let bits = self.prec().max(other.prec());
        Complex {
            re: Float::with_val(bits, &self.re - &other.re),
            im: Float::with_val(bits, &self.im - &other.im),
        }
    }

    pub fn mul(&self, other: &Complex) -> Complex {
        let bits = self.prec().max(other.prec());
        let ac = Float::with_val(bits, &self.re * &other.re);
        let bd = Float::with_val(bits, &self.im * &other.im);
        let ad = Float::with_val(bits, &self.re * &other.im);
        let bc = Float::with_val(bits, &self.im * &other.re);
        Complex {
            re: ac - bd,
            im: ad + bc,
        }
    }

    pub fn scale(&self, factor: &Float) -> Complex {
        let bits = self.prec().max(factor.prec());
        Complex {
            re: Float::with_val(bits, &self.re * factor),
            im: Float::with_val(bits, &self.im * factor),
        }
    }

    pub fn recip(&self) -> Result<Complex> {
        if self.is_zero() {
            return Err(Error::domain("reciprocal of zero"));
        }
        let bits = self.prec();
        let norm = Float::with_val(bits, self.re.square_ref()) + Float::with_val(bits, self.im.square_ref());
        Ok(Complex {
            re: Float::with_val(bits, &self.re / &norm),
            im: -Float::with_val(bits, &self.im / &norm),
        })
    }

    pub fn div(&self, other: &Complex) -> Result<Complex> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn exp(&self) -> Complex {
        let bits = self.prec();
        let modulus = Float::with_val(bits, self.re.exp_ref());
        let (sin, cos) = Float::with_val(bits, &self.im).sin_cos(Float::new(bits));
        Complex {
            re: Float::with_val(bits, &modulus * &cos),
            im: modulus * sin,
        }
    }

    /// Principal logarithm; `|z| > 0` is required.
    pub fn ln(&self) -> Result<Complex> {
        if self.is_zero() {
            return Err(Error::domain("logarithm of zero"));
        }
        let bits = self.prec();
        Ok(Complex {
            re: self.abs().ln(),
            im: Float::with_val(bits, self.im.atan2_ref(&self.re)),
        })
    }

    /// `self^w = exp(w * log self)` on the principal branch.
    pub fn pow(&self, w: &Complex) -> Result<Complex> {
        Ok(w.mul(&self.ln()?).exp())
    }

    /// `base^w` for a positive real base, avoiding the generic logarithm.
    pub fn real_base_pow(base: &Float, w: &Complex) -> Result<Complex> {
        if *base <= 0 {
            return Err(Error::domain("real base must be positive"));
        }
        let bits = w.prec().max(base.prec());
        let ln_base = Float::with_val(bits, base.ln_ref());
        Ok(w.scale(&ln_base).exp())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, Float::with_val(self.im.prec(), -&self.im))
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}
