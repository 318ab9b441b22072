//! Accelerated lambda-family for the Riemann zeta function,
//!
//! ```text
//! zeta(s) = 1/(1 - 2^(1-s)) * sum_{k>=0} sum_{j=0}^{k} C(k,j) lambda^(k-j)/(1+lambda)^(k+1) * (-1)^j/(1+j)^s
//! ```
//!
//! valid for `Re(s) > 0`, `s != 1`, `lambda > 0`. At `lambda = 1` this is the
//! Knopp-Hasse-Sondow series. The module also carries the tail bounds on the
//! `k`-th inner sum, the fitted model for high-order stationary `lambda`, and
//! a self-hosted `zeta` oracle for real `s > 1` that the other families use
//! for their coefficients.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{binomial_weighted_partials, pow10, regularized_gamma_pq, Complex, PrecisionContext, Real};

/// Parameters of one partial sum of the accelerated zeta series.
#[derive(Debug, Clone)]
pub struct ZetaSeriesParams {
    pub s: Complex,
    pub lambda: Real,
    pub order: usize,
}

impl ZetaSeriesParams {
    pub fn new(s: Complex, lambda: Real, order: usize) -> Result<Self> {
        check_lambda(&lambda)?;
        check_argument(&s)?;
        Ok(ZetaSeriesParams { s, lambda, order })
    }

    pub fn real(s: Real, lambda: Real, order: usize) -> Result<Self> {
        Self::new(Complex::from_real(s), lambda, order)
    }
}

fn check_lambda(lambda: &Real) -> Result<()> {
    if !(*lambda > 0) {
        return Err(Error::domain("lambda must be positive"));
    }
    Ok(())
}

fn check_argument(s: &Complex) -> Result<()> {
    if !(s.re > 0) {
        return Err(Error::domain("Re(s) must be positive"));
    }
    if s.re == 1 && s.im.is_zero() {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    Ok(())
}

/// `1 / (1 - 2^(1-s))`.
pub fn zeta_prefactor(s: &Complex, bits: u32) -> Result<Complex> {
    let s = s.to_prec(bits);
    let one_minus_s = Complex::new(Float::with_val(bits, 1u32 - &s.re), Float::with_val(bits, -&s.im));
    let two = Float::with_val(bits, 2u32);
    let power = if one_minus_s.is_real() {
        Complex::from_real(Float::with_val(bits, (&two).pow(&one_minus_s.re)))
    } else {
        Complex::real_base_pow(&two, &one_minus_s)?
    };
    let denom = Complex::new(
        Float::with_val(bits, 1u32 - &power.re),
        Float::with_val(bits, -&power.im),
    );
    if denom.is_zero() {
        return Err(Error::Pole("1 - 2^(1-s) vanishes".into()));
    }
    if denom.is_real() {
        return Ok(Complex::from_real(Float::with_val(bits, denom.re.recip_ref())));
    }
    denom.recip()
}

/// `(-1)^j (1+j)^(-s)` for `j = 0..=order`, split into real and imaginary parts.
fn alternating_coefficients(
    s: &Complex,
    order: usize,
    bits: u32,
    force_complex: bool,
) -> Result<(Vec<Float>, Option<Vec<Float>>)> {
    let s = s.to_prec(bits);
    if s.is_real() && !force_complex {
        let neg_s = Float::with_val(bits, -&s.re);
        let re: Vec<Float> = (0..=order)
            .into_par_iter()
            .map(|j| {
                let base = Float::with_val(bits, j as u64 + 1);
                let mut v = Float::with_val(bits, base.pow(&neg_s));
                if j % 2 == 1 {
                    v = -v;
                }
                v
            })
            .collect();
        return Ok((re, None));
    }
    let neg_s = Complex::new(Float::with_val(bits, -&s.re), Float::with_val(bits, -&s.im));
    let terms: Vec<Complex> = (0..=order)
        .into_par_iter()
        .map(|j| {
            let base = Float::with_val(bits, j as u64 + 1);
            let mut v = Complex::real_base_pow(&base, &neg_s)?;
            if j % 2 == 1 {
                v = Complex::new(-v.re, -v.im);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let (re, im) = terms.into_iter().map(|c| (c.re, c.im)).unzip();
    Ok((re, Some(im)))
}

/// Inner sums without the `1/(1-2^(1-s))` prefactor, for every order
/// `0..=order`. This is the accelerated Dirichlet eta series; it is finite at
/// `s = 1` and is the object whose `lambda`-stationarity the optimizer
/// studies (the prefactor does not depend on `lambda`).
pub fn eta_accel_partials(s: &Complex, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    check_lambda(lambda)?;
    if !(s.re > 0) {
        return Err(Error::domain("Re(s) must be positive"));
    }
    eta_partials_unchecked(s, lambda, order, ctx, false)
}

fn eta_partials_unchecked(
    s: &Complex,
    lambda: &Real,
    order: usize,
    ctx: &PrecisionContext,
    force_complex: bool,
) -> Result<Vec<Complex>> {
    let bits = ctx.working_bits(order);
    let (re, im) = alternating_coefficients(s, order, bits, force_complex)?;
    match im {
        None => {
            let sums = binomial_weighted_partials(lambda, &[&re], bits)?;
            Ok(sums
                .into_iter()
                .next()
                .unwrap_or_default()
                .into_iter()
                .map(Complex::from_real)
                .collect())
        }
        Some(im) => {
            let mut sums = binomial_weighted_partials(lambda, &[&re, &im], bits)?.into_iter();
            let re_sums = sums.next().unwrap_or_default();
            let im_sums = sums.next().unwrap_or_default();
            Ok(re_sums
                .into_iter()
                .zip(im_sums)
                .map(|(r, i)| Complex::new(r, i))
                .collect())
        }
    }
}

/// Partial sums `zeta^(K)(lambda, s)` for `K = 0..=params.order`.
pub fn zeta_accel_partials(params: &ZetaSeriesParams, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    accel_partials_impl(params, ctx, false)
}

fn accel_partials_impl(params: &ZetaSeriesParams, ctx: &PrecisionContext, force_complex: bool) -> Result<Vec<Complex>> {
    check_lambda(&params.lambda)?;
    check_argument(&params.s)?;
    let bits = ctx.working_bits(params.order);
    let prefactor = zeta_prefactor(&params.s, bits)?;
    let inner = eta_partials_unchecked(&params.s, &params.lambda, params.order, ctx, force_complex)?;
    Ok(inner
        .into_iter()
        .map(|c| {
            if prefactor.is_real() && c.is_real() && !force_complex {
                Complex::from_real(Float::with_val(bits, &c.re * &prefactor.re))
            } else {
                c.mul(&prefactor)
            }
        })
        .collect())
}

/// One partial sum of the accelerated series. For real `s` the imaginary
/// part is exactly zero.
pub fn zeta_accel_partial(params: &ZetaSeriesParams, ctx: &PrecisionContext) -> Result<Complex> {
    let mut all = zeta_accel_partials(params, ctx)?;
    Ok(all.pop().expect("order 0 always yields one partial sum"))
}

/// Real-argument partial sum.
pub fn zeta_accel_partial_real(s: &Real, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
    let params = ZetaSeriesParams::real(s.clone(), lambda.clone(), order)?;
    Ok(zeta_accel_partial(&params, ctx)?.re)
}

/// The `lambda -> 0` end of the family: the alternating series
/// `sum_{k} (-1)^k/(1+k)^s` times the prefactor. Converges only
/// algebraically; kept as the comparison curve.
pub fn zeta_alternating_partials(s: &Complex, order: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    check_argument(s)?;
    let bits = ctx.working_bits(order);
    let prefactor = zeta_prefactor(s, bits)?;
    let (re, im) = alternating_coefficients(s, order, bits, false)?;
    let mut acc = Complex::from_real(Float::new(bits));
    let mut out = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let term = match &im {
            None => Complex::from_real(re[j].clone()),
            Some(im) => Complex::new(re[j].clone(), im[j].clone()),
        };
        acc = acc.add(&term);
        out.push(acc.mul(&prefactor));
    }
    Ok(out)
}

/// Direct series `sum_{n=0}^{N} 1/(n+1)^s` for every `N = 0..=terms`.
pub fn zeta_direct_partials(s: &Complex, terms: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    if !(s.re > 1) {
        return Err(Error::domain("the direct zeta series needs Re(s) > 1"));
    }
    let bits = ctx.base_bits();
    let (re, im) = alternating_coefficients(s, terms, bits, false)?;
    let mut acc = Complex::from_real(Float::new(bits));
    let mut out = Vec::with_capacity(terms + 1);
    for j in 0..=terms {
        // Undo the alternating sign.
        let sign_re = if j % 2 == 1 {
            Float::with_val(bits, -&re[j])
        } else {
            re[j].clone()
        };
        let term = match &im {
            None => Complex::from_real(sign_re),
            Some(im) => {
                let sign_im = if j % 2 == 1 {
                    Float::with_val(bits, -&im[j])
                } else {
                    im[j].clone()
                };
                Complex::new(sign_re, sign_im)
            }
        };
        acc = acc.add(&term);
        out.push(acc.clone());
    }
    Ok(out)
}

/// Lowest-order stationary point `lambda^(1) = 2^(-Re s)`.
///
/// The closed form is `2^-s`, which is complex off the real axis; only its
/// modulus is a usable real `lambda`.
pub fn zeta_pms_lowest(s: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    if !(s.re > 0) {
        return Err(Error::domain("Re(s) must be positive"));
    }
    let bits = ctx.base_bits();
    let two = Float::with_val(bits, 2u32);
    Ok(Float::with_val(bits, two.pow(Float::with_val(bits, -&s.re))))
}

/// Which inequality produced a [`TailBound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRegime {
    /// `lambda >= 1`: `|lambda - e^-t| <= lambda` on the whole half-line.
    LambdaAtLeastOne,
    /// `0 < lambda < 1`: the half-line is split at `t = log(1/lambda)`.
    LambdaBelowOne,
}

/// Bound on the `K`-th inner sum `|c_K(lambda, s)|`.
#[derive(Debug, Clone)]
pub struct TailBound {
    pub order: usize,
    pub bound: Real,
    pub regime: TailRegime,
}

/// Bound on `|c_K(lambda, s)|`, where
///
/// ```text
/// c_K = (1/Gamma(s)) int_0^inf e^-t t^(s-1) (lambda - e^-t)^K / (1+lambda)^(K+1) dt.
/// ```
///
/// For `lambda >= 1` the bound is `lambda^K/(1+lambda)^(K+1)`. For
/// `0 < lambda < 1`, with `L = log(1/lambda)`:
///
/// * on `t < L`, `|lambda - e^-t| = e^-t - lambda <= (1-lambda) e^-t`, giving
///   `(1-lambda)^K P(s, (K+1)L) / (K+1)^s`;
/// * on `t > L`, `|lambda - e^-t| <= lambda`, giving `lambda^K Q(s, L)`;
///
/// both divided by `(1+lambda)^(K+1)`, with `P`, `Q` the regularized
/// incomplete gamma functions.
pub fn zeta_tail_bound(lambda: &Real, s: &Real, order: usize, ctx: &PrecisionContext) -> Result<TailBound> {
    check_lambda(lambda)?;
    if !(*s > 0) {
        return Err(Error::domain("s must be positive"));
    }
    let bits = ctx.base_bits();
    let lambda = Float::with_val(bits, lambda);
    let one_plus = Float::with_val(bits, &lambda + 1u32);
    let k = order as u32;
    let denom = Float::with_val(bits, (&one_plus).pow(k + 1));
    if lambda >= 1 {
        let bound = Float::with_val(bits, (&lambda).pow(k)) / denom;
        return Ok(TailBound {
            order,
            bound,
            regime: TailRegime::LambdaAtLeastOne,
        });
    }
    let split = Float::with_val(bits, lambda.recip_ref()).ln();
    let (_, q_split) = regularized_gamma_pq(s, &split, ctx)?;
    let far = Float::with_val(bits, &split * (k + 1));
    let (p_far, _) = regularized_gamma_pq(s, &far, ctx)?;
    let near_region = Float::with_val(bits, Float::with_val(bits, 1u32 - &lambda).pow(k)) * p_far
        / Float::with_val(bits, Float::with_val(bits, k + 1).pow(s));
    let far_region = Float::with_val(bits, (&lambda).pow(k)) * q_split;
    let bound = (near_region + far_region) / denom;
    Ok(TailBound {
        order,
        bound,
        regime: TailRegime::LambdaBelowOne,
    })
}

/// Upper bound on `sum_{k > K} |c_k(lambda, s)|`, i.e. on the remainder of the
/// inner series after order `K` (multiply by `|1/(1-2^(1-s))|` for the zeta
/// remainder).
///
/// Sums the per-order bounds in closed form: `(lambda/(1+lambda))^(K+1)` for
/// `lambda >= 1`, and for `0 < lambda < 1`
/// `Q(s,L) (lambda/(1+lambda))^(K+1) + ((1-lambda)/(1+lambda))^(K+1) / (2 lambda (K+2)^s)`,
/// which dominates the term-by-term sum since `P <= 1` and `(k+1)^s >= (K+2)^s`.
pub fn zeta_remainder_bound(lambda: &Real, s: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
    check_lambda(lambda)?;
    if !(*s > 0) {
        return Err(Error::domain("s must be positive"));
    }
    let bits = ctx.base_bits();
    let lambda = Float::with_val(bits, lambda);
    let one_plus = Float::with_val(bits, &lambda + 1u32);
    let k1 = order as u32 + 1;
    let far_ratio = Float::with_val(bits, &lambda / &one_plus);
    let far = Float::with_val(bits, far_ratio.pow(k1));
    if lambda >= 1 {
        return Ok(far);
    }
    let split = Float::with_val(bits, lambda.recip_ref()).ln();
    let (_, q_split) = regularized_gamma_pq(s, &split, ctx)?;
    let near_ratio = Float::with_val(bits, 1u32 - &lambda) / &one_plus;
    let near = Float::with_val(bits, near_ratio.pow(k1))
        / (Float::with_val(bits, &lambda * 2u32)
            * Float::with_val(bits, Float::with_val(bits, order as u64 + 2).pow(s)));
    Ok(q_split * far + near)
}

/// Per-order geometric rate of `c_K`: `max(lambda, 1-lambda)/(1+lambda)`.
pub fn zeta_geometric_rate(lambda: f64) -> f64 {
    lambda.max(1.0 - lambda) / (1.0 + lambda)
}

/// Smallest order `K` whose certified remainder, including the prefactor,
/// is at most `tol`.
pub fn zeta_order_for_tolerance(lambda: &Real, s: &Real, tol: &Real, ctx: &PrecisionContext) -> Result<usize> {
    const CAP: usize = 1_000_000;
    check_lambda(lambda)?;
    let bits = ctx.base_bits();
    let prefactor = zeta_prefactor(&Complex::from_real(Float::with_val(bits, s)), bits)?.abs();
    let target = Float::with_val(bits, tol / &prefactor);
    // The closed form is monotone in K: bracket by doubling, then bisect.
    let fits = |k: usize| -> Result<bool> { Ok(zeta_remainder_bound(lambda, s, k, ctx)? <= target) };
    if fits(0)? {
        return Ok(0);
    }
    let mut hi = 1usize;
    while !fits(hi)? {
        hi *= 2;
        if hi > CAP {
            return Err(Error::NotConverged {
                cap: CAP,
                residual: "tail bound".into(),
            });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Coefficients of the model `lambda_FIT(K) = k1 + k2 K ln K / (k3 K + (k4 + K) ln K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCoefficients {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
}

impl FitCoefficients {
    /// Published fits for `s = 2, 3, 4, 5`.
    #[allow(clippy::approx_constant)]
    pub fn published(s: u32) -> Option<Self> {
        let (kappa1, kappa2, kappa3, kappa4) = match s {
            2 => (0.201, 0.318, 0.416, 3.9396),
            3 => (0.0655, 0.461, 0.415, 5.791),
            4 => (0.0035, 0.514, 0.288, 8.283),
            5 => (-0.0245, 0.515, 0.0031, 11.31),
            _ => return None,
        };
        Some(FitCoefficients {
            kappa1,
            kappa2,
            kappa3,
            kappa4,
        })
    }
}

/// Fitted high-order stationary `lambda` at order `K >= 2`.
pub fn lambda_fit(order: u64, coeffs: &FitCoefficients) -> Result<f64> {
    if order < 2 {
        return Err(Error::domain("lambda_fit needs K >= 2"));
    }
    let k = order as f64;
    let log_k = k.ln();
    let denom = coeffs.kappa3 * k + (coeffs.kappa4 + k) * log_k;
    if denom == 0.0 {
        return Err(Error::domain("lambda_fit denominator vanishes"));
    }
    Ok(coeffs.kappa1 + coeffs.kappa2 * k * log_k / denom)
}

/// Cached values per argument, each with the `(target, guard)` digits it was
/// certified to.
type ZetaCache = HashMap<String, Vec<(u32, u32, Float)>>;

fn zeta_cache() -> &'static RwLock<ZetaCache> {
    static CACHE: OnceLock<RwLock<ZetaCache>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached_zeta(key: &str, ctx: &PrecisionContext) -> Option<Float> {
    let cache = zeta_cache().read().ok()?;
    cache.get(key)?.iter().find_map(|(target, guard, value)| {
        (*target >= ctx.target_digits() && target + guard >= ctx.target_digits() + ctx.guard_digits())
            .then(|| Float::with_val(ctx.base_bits(), value))
    })
}

/// `zeta(s)` for real `s > 1` to the context's target digits.
///
/// Evaluated with the `lambda = 1` series at the order its tail bound
/// requires, then certified against an independent `lambda = 1/2`
/// evaluation. Results are cached per argument and reused for any request
/// needing no more digits than were certified.
pub fn zeta_reference(s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !(*s > 1) {
        return Err(Error::domain("zeta_reference needs s > 1"));
    }
    let key = s.to_string_radix(16, None);
    if let Some(hit) = cached_zeta(&key, ctx) {
        return Ok(hit);
    }

    let bits = ctx.base_bits();
    let tol = pow10(-((ctx.target_digits() + ctx.guard_digits()) as i32), bits);
    let s_complex = Complex::from_real(Float::with_val(bits, s));
    let evaluate = |lambda: f64| -> Result<Float> {
        let lambda = Float::with_val(bits, lambda);
        let order = zeta_order_for_tolerance(&lambda, s, &tol, ctx)?;
        let params = ZetaSeriesParams::new(s_complex.clone(), lambda, order)?;
        Ok(zeta_accel_partial(&params, ctx)?.re)
    };
    let primary = evaluate(1.0)?;
    let check = evaluate(0.5)?;

    let scale = Float::with_val(bits, primary.abs_ref()).max(&Float::with_val(bits, 1u32));
    let allowed = ctx.tolerance() * scale;
    let diff = Float::with_val(bits, &primary - &check).abs();
    if diff > allowed {
        return Err(Error::Consistency(format!(
            "zeta({}) at lambda = 1 and lambda = 1/2 differ by {}",
            s.to_string_radix(10, Some(12)),
            diff.to_string_radix(10, Some(6))
        )));
    }
    let value = Float::with_val(bits, primary);
    if let Ok(mut cache) = zeta_cache().write() {
        cache
            .entry(key)
            .or_default()
            .push((ctx.target_digits(), ctx.guard_digits(), value.clone()));
    }
    Ok(value)
}

/// `zeta(k)` for each integer `k` in `from..=to` (all `> 1`), evaluated in
/// parallel.
pub fn zeta_integers(from: u32, to: u32, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    if from < 2 {
        return Err(Error::domain("zeta_integers needs arguments >= 2"));
    }
    let bits = ctx.base_bits();
    (from..=to)
        .into_par_iter()
        .map(|k| zeta_reference(&Float::with_val(bits, k), ctx))
        .collect()
}

/// `zeta(s)` at any `Re(s) > 0`, `s != 1`, certified by agreement of the
/// `lambda = 1/2` and `lambda = 1` series at a common order. The order
/// doubles from 64 until the two agree to the target digits.
pub fn zeta_reference_complex(s: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    const CAP: usize = 8192;
    check_argument(s)?;
    if s.is_real() && s.re > 1 {
        return Ok(Complex::from_real(zeta_reference(&s.re, ctx)?));
    }
    let bits = ctx.base_bits();
    let mut order = 64usize;
    let mut last_diff = String::new();
    while order <= CAP {
        let a = zeta_accel_partial(
            &ZetaSeriesParams::new(s.clone(), Float::with_val(bits, 0.5), order)?,
            ctx,
        )?;
        let b = zeta_accel_partial(
            &ZetaSeriesParams::new(s.clone(), Float::with_val(bits, 1u32), order)?,
            ctx,
        )?;
        let diff = a.sub(&b).abs();
        let scale = a.abs().max(&Float::with_val(bits, 1u32));
        if diff <= ctx.tolerance() * scale {
            return Ok(a.to_prec(bits));
        }
        last_diff = diff.to_string_radix(10, Some(6));
        order *= 2;
    }
    Err(Error::NotConverged {
        cap: CAP,
        residual: last_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::binomial;
    use rug::float::Constant;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn f(x: f64) -> Float {
        ctx().real(x)
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(a.prec().max(b.prec()), a - b).abs() <= tol
    }

    fn pi(bits: u32) -> Float {
        Float::with_val(bits, Constant::Pi)
    }

    #[test]
    fn order_zero_and_one_at_s_two() {
        let p0 = zeta_accel_partial_real(&f(2.0), &f(1.0), 0, &ctx()).unwrap();
        assert_eq!(p0, 1);
        let p1 = zeta_accel_partial_real(&f(2.0), &f(1.0), 1, &ctx()).unwrap();
        assert!(close(&p1, &f(1.375), 1e-58));
    }

    #[test]
    fn khs_order_sixty_reaches_pi_squared_over_six() {
        let bits = ctx().base_bits();
        let want = Float::with_val(bits, pi(bits).square()) / 6u32;
        let got = zeta_accel_partial_real(&f(2.0), &f(1.0), 60, &ctx()).unwrap();
        assert!(close(&got, &want, 1e-14));
    }

    #[test]
    fn lambda_one_matches_knopp_hasse_sondow_term_by_term() {
        let c = ctx();
        let bits = c.working_bits(20);
        let s = f(3.0);
        let partials = zeta_accel_partials(&ZetaSeriesParams::real(s.clone(), f(1.0), 20).unwrap(), &c).unwrap();
        let prefactor = zeta_prefactor(&Complex::from_real(s.clone()), bits).unwrap().re;
        let mut acc = Float::new(bits);
        for k in 0..=20u32 {
            let mut inner = Float::new(bits);
            for j in 0..=k {
                let t = binomial(k, j, &c).unwrap() / Float::with_val(bits, Float::with_val(bits, j + 1).pow(&s));
                if j % 2 == 1 {
                    inner -= t
                } else {
                    inner += t
                }
            }
            acc += inner / Float::with_val(bits, Float::with_val(bits, 2u32).pow(k + 1));
            let want = Float::with_val(bits, &acc * &prefactor);
            assert!(close(&partials[k as usize].re, &want, 1e-55), "k={k}");
        }
    }

    #[test]
    fn real_s_has_exactly_zero_imaginary_part() {
        let p = zeta_accel_partial(&ZetaSeriesParams::real(f(2.5), f(0.7), 30).unwrap(), &ctx()).unwrap();
        assert!(p.im.is_zero());
    }

    #[test]
    fn complex_path_matches_real_path() {
        for (s, lambda) in [(2.0, 0.5), (3.5, 1.0), (0.5, 0.3)] {
            let params = ZetaSeriesParams::real(f(s), f(lambda), 40).unwrap();
            let real = zeta_accel_partials(&params, &ctx()).unwrap();
            let complex = accel_partials_impl(&params, &ctx(), true).unwrap();
            for (r, c) in real.iter().zip(&complex) {
                assert!(close(&r.re, &c.re, 1e-56));
                assert!(c.im.clone().abs() < 1e-56);
            }
        }
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            ZetaSeriesParams::real(f(2.0), f(0.0), 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ZetaSeriesParams::real(f(2.0), f(-1.0), 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(ZetaSeriesParams::real(f(1.0), f(1.0), 3), Err(Error::Pole(_))));
        assert!(matches!(
            ZetaSeriesParams::real(f(0.0), f(1.0), 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ZetaSeriesParams::real(f(-2.0), f(1.0), 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pms_lowest_is_two_to_minus_s() {
        for (s, want) in [(1.0, 0.5), (2.0, 0.25), (3.0, 0.125)] {
            let got = zeta_pms_lowest(&Complex::from_real(f(s)), &ctx()).unwrap();
            assert_eq!(got, want);
        }
        let off_axis = Complex::new(f(2.0), f(7.0));
        assert_eq!(zeta_pms_lowest(&off_axis, &ctx()).unwrap(), 0.25);
    }

    #[test]
    fn tail_bound_above_one_is_geometric() {
        let b = zeta_tail_bound(&f(2.0), &f(2.0), 10, &ctx()).unwrap();
        assert_eq!(b.regime, TailRegime::LambdaAtLeastOne);
        let want = Float::with_val(ctx().base_bits(), 1024) / Float::with_val(ctx().base_bits(), 177_147);
        assert!(close(&b.bound, &want, 1e-58));
        for k in 0..30 {
            let a = zeta_tail_bound(&f(2.0), &f(2.0), k, &ctx()).unwrap().bound;
            let b = zeta_tail_bound(&f(2.0), &f(2.0), k + 1, &ctx()).unwrap().bound;
            assert!(close(&(b / a), &(f(2.0) / f(3.0)), 1e-55));
        }
    }

    #[test]
    fn tail_bound_at_lambda_one_uses_the_upper_branch() {
        let b = zeta_tail_bound(&f(1.0), &f(3.0), 5, &ctx()).unwrap();
        assert_eq!(b.regime, TailRegime::LambdaAtLeastOne);
        assert_eq!(b.bound, 1.0 / 64.0);
    }

    /// `c_K` by composite Simpson quadrature of its integral representation.
    fn c_k_quadrature(lambda: f64, s: f64, k: i32) -> f64 {
        let gamma_s = f(s).gamma().to_f64();
        let g = |t: f64| (-t).exp() * t.powf(s - 1.0) * (lambda - (-t).exp()).powi(k);
        let upper = 200.0;
        let n = 400_000;
        let h = upper / n as f64;
        let mut acc = g(0.0) + g(upper);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        acc * h / 3.0 / gamma_s / (1.0 + lambda).powi(k + 1)
    }

    #[test]
    fn tail_bound_dominates_quadrature_of_c_k() {
        for (lambda, s, k) in [
            (0.5, 3.0, 20),
            (0.3, 2.0, 30),
            (0.9, 2.0, 20),
            (0.1, 2.0, 10),
            (0.5, 2.0, 40),
        ] {
            let c_k = c_k_quadrature(lambda, s, k).abs();
            let b = zeta_tail_bound(&f(lambda), &f(s), k as usize, &ctx()).unwrap();
            assert_eq!(b.regime, TailRegime::LambdaBelowOne);
            assert!(
                b.bound.to_f64() >= c_k,
                "lambda={lambda} s={s} K={k}: {} < {c_k}",
                b.bound
            );
        }
        // Also against the exact finite sum at lambda = 0.5, s = 3, K = 20.
        let exact = {
            let bits = 256;
            let mut v = Float::new(bits);
            for j in 0..=20u32 {
                let t = binomial(20, j, &ctx()).unwrap() * Float::with_val(bits, 0.5f64.powi(20 - j as i32))
                    / Float::with_val(bits, (j as f64 + 1.0).powi(3));
                if j % 2 == 1 {
                    v -= t
                } else {
                    v += t
                }
            }
            v / Float::with_val(bits, 1.5f64.powi(21))
        };
        assert!((exact.to_f64() - c_k_quadrature(0.5, 3.0, 20)).abs() < 1e-20);
    }

    #[test]
    fn remainder_bound_dominates_sum_of_term_bounds() {
        for (lambda, s, k) in [(0.3, 2.0, 10usize), (0.5, 3.0, 25), (2.0, 2.0, 7)] {
            let closed = zeta_remainder_bound(&f(lambda), &f(s), k, &ctx()).unwrap();
            let mut sum = Float::new(ctx().base_bits());
            for j in k + 1..k + 400 {
                sum += zeta_tail_bound(&f(lambda), &f(s), j, &ctx()).unwrap().bound;
            }
            // Equality holds in the limit for lambda >= 1; allow rounding.
            assert!(
                Float::with_val(closed.prec(), &sum - &closed) <= 1e-55,
                "lambda={lambda}"
            );
        }
    }

    #[test]
    fn lambda_fit_matches_published_high_order_values() {
        for (s, want) in [(2, 0.482), (3, 0.467), (4, 0.452), (5, 0.439)] {
            let got = lambda_fit(101, &FitCoefficients::published(s).unwrap()).unwrap();
            assert!((got - want).abs() < 0.01, "s={s}: {got}");
        }
        assert!(lambda_fit(1, &FitCoefficients::published(2).unwrap()).is_err());
        assert!(FitCoefficients::published(6).is_none());
    }

    #[test]
    fn lambda_fit_approaches_kappa1_plus_kappa2() {
        // The gap is kappa2 (kappa3/ln K + kappa4/K) / (1 + ...), i.e. it
        // closes only logarithmically when kappa3 is not small.
        let s5 = FitCoefficients::published(5).unwrap();
        assert!((lambda_fit(1_000_000, &s5).unwrap() - (s5.kappa1 + s5.kappa2)).abs() < 1e-3);
        for s in 2..=5 {
            let c = FitCoefficients::published(s).unwrap();
            let limit = c.kappa1 + c.kappa2;
            let mut last = f64::INFINITY;
            for k in [10u64, 1_000, 100_000, 10_000_000, u64::MAX / 2] {
                let gap = (limit - lambda_fit(k, &c).unwrap()).abs();
                assert!(gap < last);
                last = gap;
            }
            let k = (u64::MAX / 2) as f64;
            let predicted = c.kappa2 * (c.kappa3 / k.ln()) / (1.0 + c.kappa3 / k.ln());
            assert!((last - predicted).abs() < 1e-6, "s={s}");
        }
    }

    #[test]
    fn reference_matches_closed_forms() {
        let bits = ctx().base_bits();
        let p = pi(bits * 2);
        let z2 = Float::with_val(bits, p.clone().square() / 6u32);
        let z4 = Float::with_val(bits, p.pow(4u32) / 90u32);
        assert!(close(&zeta_reference(&f(2.0), &ctx()).unwrap(), &z2, 1e-50));
        assert!(close(&zeta_reference(&f(4.0), &ctx()).unwrap(), &z4, 1e-50));
    }

    #[test]
    fn reference_at_three_matches_direct_sum_with_tail() {
        // Oracle: 10^6 direct terms in binary64 plus the Euler-Maclaurin tail
        // 1/(2N^2) - 1/(2N^3) + 1/(4N^4) (the sum over n <= N is included).
        let n = 1_000_000u64;
        let mut direct = 0.0f64;
        for k in (1..=n).rev() {
            let x = k as f64;
            direct += 1.0 / (x * x * x);
        }
        let nf = n as f64;
        let oracle = direct + 1.0 / (2.0 * nf * nf) - 1.0 / (2.0 * nf * nf * nf);
        let got = zeta_reference(&f(3.0), &ctx()).unwrap().to_f64();
        assert!((got - oracle).abs() < 1e-14);
        assert!(zeta_reference(&f(3.0), &ctx())
            .unwrap()
            .to_string()
            .starts_with("1.2020569"));
    }

    #[test]
    fn reference_matches_mpfr_zeta_at_non_integer_arguments() {
        for s in [1.2, 1.8, 2.4, 7.3] {
            let got = zeta_reference(&f(s), &ctx()).unwrap();
            let want = f(s).zeta();
            let rel = Float::with_val(ctx().base_bits(), &got - &want).abs() / &want;
            assert!(rel < 1e-50, "s={s}");
        }
    }

    #[test]
    fn reference_rejects_s_at_most_one() {
        assert!(zeta_reference(&f(1.0), &ctx()).is_err());
        assert!(zeta_reference(&f(0.5), &ctx()).is_err());
    }

    #[test]
    fn order_for_tolerance_is_minimal() {
        let tol = pow10(-30, ctx().base_bits());
        for lambda in [0.3, 1.0, 2.0] {
            let k = zeta_order_for_tolerance(&f(lambda), &f(2.0), &tol, &ctx()).unwrap();
            let pref = 2.0;
            assert!(zeta_remainder_bound(&f(lambda), &f(2.0), k, &ctx()).unwrap() * pref <= tol);
            assert!(zeta_remainder_bound(&f(lambda), &f(2.0), k - 1, &ctx()).unwrap() * pref > tol);
        }
    }

    #[test]
    fn alternating_limit_converges_slowly_to_zeta() {
        let s = Complex::from_real(f(3.0));
        let p = zeta_alternating_partials(&s, 100, &ctx()).unwrap();
        let z = zeta_reference(&f(3.0), &ctx()).unwrap();
        let err = Float::with_val(ctx().base_bits(), &p[100].re - &z).abs().to_f64();
        // prefactor 4/3 times half the first omitted term 1/102^3
        assert!(err > 1e-7 && err < 1e-6, "{err}");
    }

    #[test]
    fn direct_partials_need_re_s_above_one() {
        assert!(zeta_direct_partials(&Complex::with_val(128, 0.5, 50.0), 10, &ctx()).is_err());
        let d = zeta_direct_partials(&Complex::from_real(f(2.0)), 3, &ctx()).unwrap();
        let want = f(1.0) + f(0.25) + f(1.0) / 9u32 + f(1.0) / 16u32;
        assert!(close(&d[3].re, &want, 1e-58));
    }

    #[test]
    fn complex_reference_on_the_critical_line() {
        let c = PrecisionContext::new(30, 10).unwrap();
        let s = Complex::with_val(c.base_bits(), 0.5, 50.0);
        let z = zeta_reference_complex(&s, &c).unwrap();
        // mpmath: zeta(0.5+50j) = -0.0817121083209799750481931468022 + 0.330792194038661295587815274014j
        assert!((z.re.to_f64() + 0.081_712_108_320_979_97).abs() < 1e-15);
        assert!((z.im.to_f64() - 0.330_792_194_038_661_3).abs() < 1e-15);
    }
}
