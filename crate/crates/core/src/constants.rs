//! Direct and accelerated series for pi and Catalan's constant `G`.
//!
//! The accelerated forms share one shape,
//!
//! ```text
//! S_M(lambda) = sum_{m=1}^{M} (1/(1+lambda))^(m+1) sum_{k=1}^{m} C(m,k) lambda^(m-k) b_k
//! ```
//!
//! with `b_k` built from `zeta(k+1)`, and converge for `lambda > -1/2`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numerics::{binomial_weighted_partials, digits_to_bits, weight_growth, PrecisionContext, Real};
use crate::riemann::zeta_reference;

#[derive(Debug, Clone)]
pub struct PiSeriesParams {
    pub lambda: Real,
    pub order: usize,
}

impl PiSeriesParams {
    pub fn new(lambda: Real, order: usize) -> Result<Self> {
        check_lambda(&lambda)?;
        check_order(order)?;
        Ok(PiSeriesParams { lambda, order })
    }
}

#[derive(Debug, Clone)]
pub struct CatalanSeriesParams {
    pub lambda: Real,
    pub order: usize,
    pub shift_a: Real,
}

impl CatalanSeriesParams {
    pub fn new(lambda: Real, order: usize, shift_a: Real) -> Result<Self> {
        check_lambda(&lambda)?;
        check_order(order)?;
        if !(Float::with_val(shift_a.prec(), shift_a.abs_ref()) < 1) {
            return Err(Error::domain("shift a must satisfy |a| < 1"));
        }
        Ok(CatalanSeriesParams { lambda, order, shift_a })
    }

    pub fn unshifted(lambda: Real, order: usize) -> Result<Self> {
        let zero = Float::new(lambda.prec());
        Self::new(lambda, order, zero)
    }
}

fn check_lambda(lambda: &Real) -> Result<()> {
    if !(*lambda > -0.5) {
        return Err(Error::domain("lambda must exceed -1/2"));
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order < 1 {
        return Err(Error::domain("order M must be at least 1"));
    }
    Ok(())
}

/// Working precision for an order-`order` sum at `lambda`: negative `lambda`
/// makes the binomial weights alternate, so the growth of their absolute sum
/// is charged on top of the context's per-order guard.
fn working_digits(lambda: &Real, order: usize, ctx: &PrecisionContext) -> u32 {
    ctx.working_digits_with_growth(order, weight_growth(lambda.to_f64()))
}

/// `zeta(k+1)` for `k = 0..=max_k` (entry 0 is unused and set to zero),
/// accurate to `digits`.
fn zeta_shifted(max_k: usize, digits: u32, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let coeff_ctx = PrecisionContext::new(digits.saturating_sub(ctx.guard_digits()).max(1), ctx.guard_digits())?;
    let bits = digits_to_bits(digits);
    let mut out = Vec::with_capacity(max_k + 1);
    out.push(Float::new(bits));
    if max_k >= 1 {
        for z in crate::riemann::zeta_integers(2, max_k as u32 + 1, &coeff_ctx)? {
            out.push(Float::with_val(bits, z));
        }
    }
    Ok(out)
}

/// Shared driver: builds `b_k` from `zeta(k+1)` and returns the partial sums
/// indexed by order, entry 0 being the empty sum.
fn accelerated_partials<F>(lambda: &Real, order: usize, ctx: &PrecisionContext, coefficient: F) -> Result<Vec<Real>>
where
    F: Fn(u32, &Float, u32) -> Float,
{
    let digits = working_digits(lambda, order, ctx);
    let bits = digits_to_bits(digits);
    let zetas = zeta_shifted(order, digits, ctx)?;
    let coeffs: Vec<Float> = (0..=order)
        .map(|k| {
            if k == 0 {
                Float::new(bits)
            } else {
                coefficient(k as u32, &zetas[k], bits)
            }
        })
        .collect();
    let mut sums = binomial_weighted_partials(lambda, &[&coeffs], bits)?;
    Ok(sums.pop().unwrap_or_default())
}

/// Gregory partial sums `4 sum_{n=1}^{N} [1/(4n-3) - 1/(4n-1)]` for
/// `N = 0..=terms`.
pub fn gregory_partials(terms: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let bits = ctx.base_bits();
    let mut acc = Float::new(bits);
    let mut out = Vec::with_capacity(terms + 1);
    out.push(acc.clone());
    for n in 1..=terms as u64 {
        acc += Float::with_val(bits, 4u32) / Float::with_val(bits, 4 * n - 3);
        acc -= Float::with_val(bits, 4u32) / Float::with_val(bits, 4 * n - 1);
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn gregory_partial(terms: usize, ctx: &PrecisionContext) -> Result<Real> {
    check_order(terms)?;
    Ok(gregory_partials(terms, ctx)?.pop().expect("non-empty"))
}

/// Accelerated pi partial sums for orders `0..=params.order`, with
/// `b_k = (3^k - 1)/4^k zeta(k+1)`.
pub fn pi_accel_partials(params: &PiSeriesParams, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_lambda(&params.lambda)?;
    accelerated_partials(&params.lambda, params.order, ctx, pi_coefficient)
}

fn pi_coefficient(k: u32, zeta: &Float, bits: u32) -> Float {
    let three = Float::with_val(bits, Float::with_val(bits, 3u32).pow(k)) - 1u32;
    let four = Float::with_val(bits, Float::with_val(bits, 4u32).pow(k));
    three / four * zeta
}

pub fn pi_accel_partial(params: &PiSeriesParams, ctx: &PrecisionContext) -> Result<Real> {
    Ok(pi_accel_partials(params, ctx)?.pop().expect("non-empty"))
}

/// Termwise `d/dlambda` of the accelerated pi partial sum.
pub fn pi_accel_derivative(params: &PiSeriesParams, ctx: &PrecisionContext) -> Result<Real> {
    check_lambda(&params.lambda)?;
    let digits = working_digits(&params.lambda, params.order, ctx);
    let bits = digits_to_bits(digits);
    let zetas = zeta_shifted(params.order, digits, ctx)?;
    let lambda = Float::with_val(bits, &params.lambda);
    let one_plus = Float::with_val(bits, &lambda + 1u32);
    let mut total = Float::new(bits);
    for m in 1..=params.order as u32 {
        let inv_m1 = Float::with_val(bits, (&one_plus).pow(m + 1)).recip();
        let inv_m2 = Float::with_val(bits, &inv_m1 / &one_plus);
        for k in 1..=m {
            let b = pi_coefficient(k, &zetas[k as usize], bits);
            let c = Float::with_val(bits, Integer::from(Integer::binomial_u(m, k)));
            // d/dl [l^(m-k) (1+l)^-(m+1)] = (m-k) l^(m-k-1) (1+l)^-(m+1) - (m+1) l^(m-k) (1+l)^-(m+2)
            let mut dw = Float::with_val(bits, (&lambda).pow(m - k)) * &inv_m2 * (m + 1);
            dw = -dw;
            if m > k {
                dw += Float::with_val(bits, (&lambda).pow(m - k - 1)) * &inv_m1 * (m - k);
            }
            total += dw * c * b;
        }
    }
    Ok(total)
}

/// Lowest-order stationary point of the pi family, `-3 zeta(3)/pi^2`.
pub fn pi_pms_lambda1(ctx: &PrecisionContext) -> Result<Real> {
    let bits = ctx.base_bits();
    let z3 = zeta_reference(&Float::with_val(bits, 3u32), ctx)?;
    let pi = pi_reference(ctx);
    Ok(Float::with_val(bits, -3 * z3) / Float::with_val(bits, pi.square_ref()))
}

/// Partial sums `sum_{n=1}^{N} [1/(4n-3)^2 - 1/(4n-1)^2]` for `N = 0..=terms`.
pub fn catalan_direct_partials(terms: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let bits = ctx.base_bits();
    let mut acc = Float::new(bits);
    let mut out = Vec::with_capacity(terms + 1);
    out.push(acc.clone());
    for n in 1..=terms as u64 {
        let a = Float::with_val(bits, 4 * n - 3);
        let b = Float::with_val(bits, 4 * n - 1);
        acc += Float::with_val(bits, a.square().recip_ref());
        acc -= Float::with_val(bits, b.square().recip_ref());
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn catalan_direct_partial(terms: usize, ctx: &PrecisionContext) -> Result<Real> {
    check_order(terms)?;
    Ok(catalan_direct_partials(terms, ctx)?.pop().expect("non-empty"))
}

/// Accelerated Catalan partial sums for orders `0..=order`, with
/// `b_k = k (3^(k-1) - 1)/4^(k+1) zeta(k+1)`. The shift of `params` is
/// ignored.
pub fn catalan_accel_partials(params: &CatalanSeriesParams, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_lambda(&params.lambda)?;
    accelerated_partials(&params.lambda, params.order, ctx, |k, zeta, bits| {
        let three = Float::with_val(bits, Float::with_val(bits, 3u32).pow(k - 1)) - 1u32;
        let four = Float::with_val(bits, Float::with_val(bits, 4u32).pow(k + 1));
        three * k / four * zeta
    })
}

pub fn catalan_accel_partial(params: &CatalanSeriesParams, ctx: &PrecisionContext) -> Result<Real> {
    Ok(catalan_accel_partials(params, ctx)?.pop().expect("non-empty"))
}

/// Partial sums of the shifted family
/// `S~(a) = sum [1/(4n-3-a) - 1/(4n-1-a)]` in accelerated form, with
/// `b_k = [(3+a)^k - (1+a)^k]/4^(k+1) zeta(k+1)`. `S~(0) = pi/4` and
/// `d/da S~(a)` at `a = 0` is `G`.
pub fn catalan_shifted_partials(params: &CatalanSeriesParams, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_lambda(&params.lambda)?;
    let a = params.shift_a.clone();
    accelerated_partials(&params.lambda, params.order, ctx, move |k, zeta, bits| {
        let hi = Float::with_val(bits, Float::with_val(bits, &a + 3u32).pow(k));
        let lo = Float::with_val(bits, Float::with_val(bits, &a + 1u32).pow(k));
        let four = Float::with_val(bits, Float::with_val(bits, 4u32).pow(k + 1));
        (hi - lo) / four * zeta
    })
}

pub fn catalan_shifted_partial(params: &CatalanSeriesParams, ctx: &PrecisionContext) -> Result<Real> {
    Ok(catalan_shifted_partials(params, ctx)?.pop().expect("non-empty"))
}

/// Catalan series obtained by making the shifted family stationary in
/// `lambda` at lowest order, evaluated at `lambda_0 = -3 zeta(3)/pi^2`:
///
/// ```text
/// (1/3) sum_{m=1}^{M} sum_{k=1}^{m} 2^-(3+2k) lambda_0^(m-k)/(1+lambda_0)^(m+2) C(m,k) zeta(k+1)
///     * [-(3+3^k) k (1+lambda_0) - 3 (3^k-1) (lambda_0 - m)]
/// ```
///
/// Partial sums for orders `0..=order`.
pub fn catalan_optimized_partials(order: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_order(order)?;
    let lambda0 = pi_pms_lambda1(ctx)?;
    let digits = working_digits(&lambda0, order, ctx);
    let bits = digits_to_bits(digits);
    let zetas = zeta_shifted(order, digits, ctx)?;
    // Recompute lambda_0 at working precision from the same zeta(3).
    let pi = pi_reference(&PrecisionContext::new(digits, ctx.guard_digits())?);
    let lambda0 = Float::with_val(bits, -3 * &zetas[2]) / Float::with_val(bits, pi.square_ref());
    let one_plus = Float::with_val(bits, &lambda0 + 1u32);

    let lambda_pows: Vec<Float> = (0..=order as u32)
        .map(|e| Float::with_val(bits, (&lambda0).pow(e)))
        .collect();
    let mut acc = Float::new(bits);
    let mut out = Vec::with_capacity(order + 1);
    out.push(acc.clone());
    for m in 1..=order as u32 {
        let denom = Float::with_val(bits, (&one_plus).pow(m + 2));
        let lambda_minus_m = Float::with_val(bits, &lambda0 - m);
        let mut row = Float::new(bits);
        for k in 1..=m {
            let three_k = Float::with_val(bits, Float::with_val(bits, 3u32).pow(k));
            let first = Float::with_val(bits, &three_k + 3u32) * k * &one_plus;
            let second = Float::with_val(bits, &three_k - 1u32) * 3u32 * &lambda_minus_m;
            let bracket = -first - second;
            let two_pow = Float::with_val(bits, Float::with_val(bits, 2u32).pow(3 + 2 * k));
            let c = Float::with_val(bits, Integer::from(Integer::binomial_u(m, k)));
            row += bracket * c * &zetas[k as usize] * &lambda_pows[(m - k) as usize] / two_pow;
        }
        acc += row / denom / 3u32;
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn catalan_optimized_partial(order: usize, ctx: &PrecisionContext) -> Result<Real> {
    Ok(catalan_optimized_partials(order, ctx)?.pop().expect("non-empty"))
}

/// Leading-order size of the `m`-th term, `m ((lambda+3/4)/(1+lambda))^m`.
#[derive(Debug, Clone)]
pub struct RateEstimate {
    pub order: u64,
    pub estimate: Real,
    pub ratio: Real,
}

pub fn rate_estimate(lambda: &Real, order: u64) -> Result<RateEstimate> {
    check_lambda(lambda)?;
    if order < 1 {
        return Err(Error::domain("order m must be at least 1"));
    }
    let bits = lambda.prec().max(64);
    let ratio = Float::with_val(bits, lambda + 0.75) / Float::with_val(bits, lambda + 1u32);
    let estimate = Float::with_val(bits, (&ratio).pow(order)) * order;
    Ok(RateEstimate { order, estimate, ratio })
}

/// Per-order decay of the accelerated pi and Catalan terms including the
/// slower subleading components: `max(|lambda+3/4|, |lambda|)/(1+lambda)`.
pub fn constants_geometric_rate(lambda: f64) -> f64 {
    (lambda + 0.75).abs().max(lambda.abs()) / (1.0 + lambda)
}

/// Smallest `M` with `M r^M <= 10^-digits` at the family's geometric rate.
pub fn constants_order_for_digits(lambda: f64, digits: u32) -> Result<usize> {
    if !(lambda > -0.5) {
        return Err(Error::domain("lambda must exceed -1/2"));
    }
    let r = constants_geometric_rate(lambda);
    let target = -(digits as f64) * std::f64::consts::LN_10;
    let mut m = 1usize;
    while (m as f64).ln() + m as f64 * r.ln() > target {
        m += 1;
        if m > 1_000_000 {
            return Err(Error::NotConverged {
                cap: m,
                residual: "rate estimate".into(),
            });
        }
    }
    Ok(m)
}

/// `pi` by Machin's formula `16 arctan(1/5) - 4 arctan(1/239)` evaluated at
/// twice the context's digits and rounded to base precision.
pub fn pi_reference(ctx: &PrecisionContext) -> Real {
    let wp = digits_to_bits(2 * (ctx.target_digits() + ctx.guard_digits()));
    let pi = Float::with_val(wp, arctan_inverse(5, wp) * 16u32) - Float::with_val(wp, arctan_inverse(239, wp) * 4u32);
    Float::with_val(ctx.base_bits(), pi)
}

/// `arctan(1/x)` by its Taylor series.
fn arctan_inverse(x: u32, bits: u32) -> Float {
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    let x2 = Float::with_val(bits, x) * x;
    let mut power = Float::with_val(bits, x).recip();
    let mut sum = power.clone();
    let mut n = 0u32;
    loop {
        n += 1;
        power /= &x2;
        let term = Float::with_val(bits, &power / (2 * n + 1));
        if n % 2 == 1 {
            sum -= &term
        } else {
            sum += &term
        }
        if term < eps {
            return sum;
        }
    }
}

/// Closed form of the shifted family,
/// `S~(a) = [digamma((3-a)/4) - digamma((1-a)/4)]/4`, from the partial
/// fraction expansion of the digamma function.
pub fn shifted_reference(a: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !(Float::with_val(a.prec(), a.abs_ref()) < 1) {
        return Err(Error::domain("shift a must satisfy |a| < 1"));
    }
    let wp = ctx.base_bits() + 32;
    let hi = Float::with_val(wp, Float::with_val(wp, 3u32 - a) / 4u32).digamma();
    let lo = Float::with_val(wp, Float::with_val(wp, 1u32 - a) / 4u32).digamma();
    Ok(Float::with_val(ctx.base_bits(), (hi - lo) / 4u32))
}

fn catalan_cache() -> &'static RwLock<HashMap<(u32, u32), Float>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), Float>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `G` to the context's target digits from the accelerated Catalan series at
/// `lambda = 0` and `lambda = 1/4`, each at the order its rate requires,
/// certified by their agreement. Both have positive weights and
/// coefficients, so no cancellation digits are needed.
pub fn catalan_reference(ctx: &PrecisionContext) -> Result<Real> {
    let key = (ctx.target_digits(), ctx.guard_digits());
    if let Some(hit) = catalan_cache().read().ok().and_then(|c| c.get(&key).cloned()) {
        return Ok(hit);
    }
    let bits = ctx.base_bits();
    let digits = ctx.target_digits() + ctx.guard_digits();
    let flat = PrecisionContext::with_cancellation_factor(ctx.target_digits(), ctx.guard_digits(), 0.0)?;
    let evaluate = |lambda: f64| -> Result<Float> {
        let order = constants_order_for_digits(lambda, digits)?;
        let params = CatalanSeriesParams::unshifted(Float::with_val(bits, lambda), order)?;
        catalan_accel_partial(&params, &flat)
    };
    let primary = evaluate(0.0)?;
    let check = evaluate(0.25)?;
    let diff = Float::with_val(bits, &primary - &check).abs();
    if diff > ctx.tolerance() {
        return Err(Error::Consistency(format!(
            "Catalan series at lambda = 0 and lambda = 1/4 differ by {}",
            diff.to_string_radix(10, Some(6))
        )));
    }
    let value = Float::with_val(bits, primary);
    if let Ok(mut cache) = catalan_cache().write() {
        cache.insert(key, value.clone());
    }
    Ok(value)
}
