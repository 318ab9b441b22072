//! Arithmetic substrate: precision policy, complex numbers, binomial
//! coefficients, the binomial-weighted summation kernel shared by every
//! accelerated family, and the incomplete gamma function.

mod complex;
mod gamma;
mod precision;

use rug::{Float, Integer};

pub use complex::Complex;
pub use gamma::{regularized_gamma_pq, upper_incomplete_gamma};
pub use precision::{
    digits_to_bits, pow10, PrecisionContext, DEFAULT_CANCELLATION_FACTOR, DEFAULT_GUARD_DIGITS, DEFAULT_TARGET_DIGITS,
};

use crate::error::{Error, Result};

/// Real number carried at an explicit binary precision.
pub type Real = Float;

/// A partial sum together with the order and `lambda` that produced it and an
/// estimate of its truncation error.
#[derive(Debug, Clone)]
pub struct PartialSumResult {
    pub value: Real,
    pub order: usize,
    pub lambda: Real,
    pub error_estimate: Real,
}

/// `C(m, k)` as an exact integer held in a `Float` wide enough to carry it.
pub fn binomial(m: u32, k: u32, ctx: &PrecisionContext) -> Result<Real> {
    if k > m {
        return Err(Error::domain(format!("binomial({m}, {k}) needs k <= m")));
    }
    let exact = Integer::from(Integer::binomial_u(m, k));
    let bits = ctx.base_bits().max(exact.significant_bits() + 1);
    Ok(Float::with_val(bits, exact))
}

/// Partial sums `S_0, ..., S_K` (with `K = coeffs.len() - 1`) of
///
/// ```text
/// S_K = sum_{k=0}^{K} sum_{j=0}^{k} C(k,j) lambda^(k-j) / (1+lambda)^(k+1) * coeffs[j]
/// ```
///
/// for each coefficient set. The weights are carried row by row with the
/// Pascal recurrence `w[k+1][j] = (lambda*w[k][j] + w[k][j-1]) / (1+lambda)`,
/// so the whole table costs `O(K^2)` multiplications and no large binomials
/// are formed. Each inner sum is a correctly rounded dot product.
pub fn binomial_weighted_partials(lambda: &Float, coeff_sets: &[&[Float]], bits: u32) -> Result<Vec<Vec<Float>>> {
    let order_plus_one = coeff_sets.first().map_or(0, |c| c.len());
    if coeff_sets.iter().any(|c| c.len() != order_plus_one) {
        return Err(Error::domain("coefficient sets must have equal length"));
    }
    let lambda = Float::with_val(bits, lambda);
    let one_plus = Float::with_val(bits, &lambda + 1u32);
    if one_plus.is_zero() {
        return Err(Error::domain("lambda = -1 is excluded"));
    }
    let inv = Float::with_val(bits, one_plus.recip_ref());

    let mut weights: Vec<Float> = Vec::with_capacity(order_plus_one);
    let mut running: Vec<Float> = vec![Float::new(bits); coeff_sets.len()];
    let mut out: Vec<Vec<Float>> = vec![Vec::with_capacity(order_plus_one); coeff_sets.len()];

    for k in 0..order_plus_one {
        if k == 0 {
            weights.push(inv.clone());
        } else {
            weights.push(Float::new(bits));
            for j in (1..=k).rev() {
                let (lo, hi) = weights.split_at_mut(j);
                hi[0] *= &lambda;
                hi[0] += &lo[j - 1];
                hi[0] *= &inv;
            }
            weights[0] *= &lambda;
            weights[0] *= &inv;
        }
        for (set, coeffs) in coeff_sets.iter().enumerate() {
            let term = Float::with_val(bits, Float::dot(weights.iter().zip(coeffs.iter())));
            running[set] += term;
            out[set].push(running[set].clone());
        }
    }
    Ok(out)
}

/// Natural-log growth of the largest binomial-weighted summand per order:
/// `(1+|lambda|)/|1+lambda|`. Equals 1 for `lambda >= 0`.
pub fn weight_growth(lambda: f64) -> f64 {
    (1.0 + lambda.abs()) / (1.0 + lambda).abs()
}
