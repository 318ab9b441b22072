//! Generalized Hurwitz zeta `zeta_bar(s, u, xi) = sum_{n>=0} 1/(n^u + xi)^s`.
//!
//! The accelerated form is
//!
//! ```text
//! zeta_bar = 1/xi^s + sum_{k>=0} (s)_k Psi_k
//! Psi_k    = sum_{j=0}^{k} (-xi)^j/(j! (k-j)!) lambda^(2(k-j))/(1+lambda^2)^(s+k) zeta(us+uj)
//! ```
//!
//! valid for `su > 1`, `xi > 0`, `lambda^2 > (xi-1)/2`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numerics::{digits_to_bits, PartialSumResult, PrecisionContext, Real};
use crate::riemann::zeta_reference;

#[derive(Debug, Clone)]
pub struct HurwitzParams {
    pub s: Real,
    pub u: Real,
    pub xi: Real,
    pub lambda: Real,
    pub order: usize,
}

impl HurwitzParams {
    pub fn new(s: Real, u: Real, xi: Real, lambda: Real, order: usize) -> Result<Self> {
        check_arguments(&s, &u, &xi)?;
        check_convergence(&lambda, &xi)?;
        Ok(HurwitzParams {
            s,
            u,
            xi,
            lambda,
            order,
        })
    }
}

fn check_arguments(s: &Real, u: &Real, xi: &Real) -> Result<()> {
    if !(*u > 0) {
        return Err(Error::domain("u must be positive"));
    }
    if !(Float::with_val(s.prec(), s * u) > 1) {
        return Err(Error::domain("s*u must exceed 1"));
    }
    if !(*xi > 0) {
        return Err(Error::domain("xi must be positive"));
    }
    Ok(())
}

fn check_convergence(lambda: &Real, xi: &Real) -> Result<()> {
    if !convergent(lambda, xi) {
        return Err(Error::domain("lambda^2 must exceed (xi-1)/2"));
    }
    Ok(())
}

fn convergent(lambda: &Real, xi: &Real) -> bool {
    let bits = lambda.prec().max(xi.prec());
    let lambda2 = Float::with_val(bits, lambda.square_ref());
    let half = Float::with_val(bits, xi - 1u32) / 2u32;
    lambda2 > half
}

/// Direct partial sums `sum_{n=0}^{N} 1/(n^u + xi)^s` for `N = 0..=terms`.
pub fn hurwitz_direct_partials(
    s: &Real,
    u: &Real,
    xi: &Real,
    terms: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Real>> {
    check_arguments(s, u, xi)?;
    let bits = ctx.base_bits();
    let neg_s = Float::with_val(bits, -s);
    let mut acc = Float::new(bits);
    let mut out = Vec::with_capacity(terms + 1);
    for n in 0..=terms as u64 {
        let base = Float::with_val(bits, Float::with_val(bits, n).pow(u)) + xi;
        acc += base.pow(&neg_s);
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn hurwitz_direct_partial(s: &Real, u: &Real, xi: &Real, terms: usize, ctx: &PrecisionContext) -> Result<Real> {
    if terms < 1 {
        return Err(Error::domain("N must be at least 1"));
    }
    Ok(hurwitz_direct_partials(s, u, xi, terms, ctx)?.pop().expect("non-empty"))
}

/// Decimal digits lost per order to the alternating `(-xi)^j` signs:
/// `log10((xi + lambda^2)/max(lambda^2, |xi - lambda^2|))`.
fn working_digits(lambda: &Real, xi: &Real, order: usize, ctx: &PrecisionContext) -> u32 {
    let l2 = lambda.to_f64().powi(2);
    let x = xi.to_f64();
    let growth = (x + l2) / l2.max((x - l2).abs());
    ctx.working_digits_with_growth(order, growth)
}

/// `zeta(us + uj)` for `j = 0..=order`.
fn zeta_column(s: &Real, u: &Real, order: usize, digits: u32, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let bits = digits_to_bits(digits);
    let coeff_ctx = PrecisionContext::new(digits.saturating_sub(ctx.guard_digits()).max(1), ctx.guard_digits())?;
    // Exact arguments, so the cached zeta values are shared across orders.
    let exact = 2 * s.prec().max(u.prec()) + 64;
    let base = Float::with_val(exact, s * u);
    (0..=order)
        .into_par_iter()
        .map(|j| {
            let arg = Float::with_val(exact, u * j as u64) + &base;
            if !(arg > 1) {
                return Err(Error::domain("zeta argument u*s + u*j must exceed 1"));
            }
            match short_direct_zeta(&arg, digits, bits) {
                Some(value) => Ok(value),
                None => Ok(Float::with_val(bits, zeta_reference(&arg, &coeff_ctx)?)),
            }
        })
        .collect()
}

/// Terms of the direct sum allowed before deferring to the series.
const SHORT_SUM_TERMS: u64 = 2048;

/// `zeta(sigma)` as `sum_{n<=N} n^-sigma` when the tail bound
/// `N^(1-sigma)/(sigma-1)` is below `10^-(digits+2)` for some `N <= 2048`.
fn short_direct_zeta(sigma: &Float, digits: u32, bits: u32) -> Option<Float> {
    let sig = sigma.to_f64();
    let want = -((digits + 2) as f64) * std::f64::consts::LN_10;
    let tail = |n: f64| (1.0 - sig) * n.ln() - (sig - 1.0).ln();
    let n = (2..=SHORT_SUM_TERMS).find(|&n| tail(n as f64) < want)?;
    let neg = Float::with_val(bits, -sigma);
    let terms: Vec<Float> = (1..=n)
        .map(|k| Float::with_val(bits, Float::with_val(bits, k).pow(&neg)))
        .collect();
    Some(Float::with_val(bits, Float::sum(terms.iter().rev())))
}

/// `Psi_0 .. Psi_order` at `bits`, given the zeta column. `lambda` enters
/// only through `lambda^2`, so no convergence check happens here.
fn psi_all(s: &Real, xi: &Real, lambda: &Real, zetas: &[Real], bits: u32) -> Vec<Real> {
    let order = zetas.len() - 1;
    let lambda2 = Float::with_val(bits, lambda.square_ref());
    let one_plus = Float::with_val(bits, &lambda2 + 1u32);
    let neg_xi = Float::with_val(bits, -xi);
    let lambda_pows: Vec<Float> = (0..=order as u32)
        .map(|e| Float::with_val(bits, (&lambda2).pow(e)))
        .collect();
    let xi_pows: Vec<Float> = (0..=order as u32)
        .map(|e| Float::with_val(bits, (&neg_xi).pow(e)))
        .collect();
    let s_power = Float::with_val(bits, (&one_plus).pow(s));

    let mut row = vec![Integer::from(1)];
    let mut factorial = Float::with_val(bits, 1u32);
    let mut one_plus_k = Float::with_val(bits, 1u32);
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k > 0 {
            let mut next = Vec::with_capacity(k + 1);
            next.push(Integer::from(1));
            for w in row.windows(2) {
                next.push(Integer::from(&w[0] + &w[1]));
            }
            next.push(Integer::from(1));
            row = next;
            factorial *= k as u32;
            one_plus_k *= &one_plus;
        }
        // 1/(j!(k-j)!) = C(k,j)/k!
        let sum = Float::with_val(
            bits,
            Float::sum(
                (0..=k)
                    .map(|j| {
                        Float::with_val(bits, &row[j] * Float::with_val(bits, &xi_pows[j] * &lambda_pows[k - j]))
                            * &zetas[j]
                    })
                    .collect::<Vec<_>>()
                    .iter(),
            ),
        );
        out.push(sum / &factorial / &one_plus_k / &s_power);
    }
    out
}

/// `Psi_k(lambda, u, s, xi)`.
pub fn psi_k(k: usize, params: &HurwitzParams, ctx: &PrecisionContext) -> Result<Real> {
    check_arguments(&params.s, &params.u, &params.xi)?;
    check_convergence(&params.lambda, &params.xi)?;
    let digits = working_digits(&params.lambda, &params.xi, k, ctx);
    let zetas = zeta_column(&params.s, &params.u, k, digits, ctx)?;
    let psi = psi_all(&params.s, &params.xi, &params.lambda, &zetas, digits_to_bits(digits));
    Ok(Float::with_val(ctx.base_bits(), &psi[k]))
}

fn accel_partials_unchecked(
    s: &Real,
    u: &Real,
    xi: &Real,
    lambda: &Real,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Real>> {
    let digits = working_digits(lambda, xi, order, ctx);
    let bits = digits_to_bits(digits);
    let zetas = zeta_column(s, u, order, digits, ctx)?;
    let psi = psi_all(s, xi, lambda, &zetas, bits);
    let s = Float::with_val(bits, s);
    let mut acc = Float::with_val(bits, Float::with_val(bits, xi).pow(Float::with_val(bits, -&s)));
    let mut rising = Float::with_val(bits, 1u32);
    let mut out = Vec::with_capacity(order + 1);
    for (k, p) in psi.iter().enumerate() {
        if k > 0 {
            rising *= Float::with_val(bits, &s + (k as u32 - 1));
        }
        acc += Float::with_val(bits, &rising * p);
        out.push(Float::with_val(ctx.base_bits(), &acc));
    }
    Ok(out)
}

/// Accelerated partial sums for orders `0..=params.order`.
pub fn hurwitz_accel_partials(params: &HurwitzParams, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_arguments(&params.s, &params.u, &params.xi)?;
    check_convergence(&params.lambda, &params.xi)?;
    accel_partials_unchecked(&params.s, &params.u, &params.xi, &params.lambda, params.order, ctx)
}

pub fn hurwitz_accel_partial(params: &HurwitzParams, ctx: &PrecisionContext) -> Result<Real> {
    Ok(hurwitz_accel_partials(params, ctx)?.pop().expect("non-empty"))
}

/// The `lambda = 0` expansion in powers of `xi`, evaluated without the
/// convergence check; it diverges once `xi > 1`.
pub fn hurwitz_perturbative_partials(
    s: &Real,
    u: &Real,
    xi: &Real,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Real>> {
    check_arguments(s, u, xi)?;
    accel_partials_unchecked(s, u, xi, &Float::new(ctx.base_bits()), order, ctx)
}

/// Lowest-order stationary `lambda` and whether it lies in the convergence
/// domain.
#[derive(Debug, Clone)]
pub struct HurwitzPms {
    pub lambda: Real,
    pub usable: bool,
}

/// `lambda = sqrt(xi zeta(u(1+s)) / zeta(su))`.
pub fn hurwitz_pms_lowest(s: &Real, u: &Real, xi: &Real, ctx: &PrecisionContext) -> Result<HurwitzPms> {
    check_arguments(s, u, xi)?;
    let bits = ctx.base_bits();
    let upper = Float::with_val(bits, Float::with_val(bits, s + 1u32) * u);
    let lower = Float::with_val(bits, s * u);
    let ratio = zeta_reference(&upper, ctx)? / zeta_reference(&lower, ctx)?;
    let lambda = Float::with_val(bits, ratio * xi).sqrt();
    let usable = convergent(&lambda, xi);
    Ok(HurwitzPms { lambda, usable })
}

/// Evaluates the accelerated series until two successive partial sums agree
/// to the target digits (checked twice in a row), doubling the order from 16
/// up to `cap`.
pub fn hurwitz_accel_converged(
    s: &Real,
    u: &Real,
    xi: &Real,
    lambda: &Real,
    cap: usize,
    ctx: &PrecisionContext,
) -> Result<PartialSumResult> {
    check_arguments(s, u, xi)?;
    check_convergence(lambda, xi)?;
    let tol = ctx.tolerance();
    let mut order = 16usize.min(cap.max(2));
    loop {
        let partials = accel_partials_unchecked(s, u, xi, lambda, order, ctx)?;
        let steps: Vec<Float> = partials
            .windows(2)
            .map(|w| Float::with_val(ctx.base_bits(), &w[1] - &w[0]).abs())
            .collect();
        let hit = steps.windows(2).position(|w| w[0] <= tol && w[1] <= tol);
        if let Some(i) = hit {
            let k = i + 2;
            return Ok(PartialSumResult {
                value: partials[k].clone(),
                order: k,
                lambda: lambda.clone(),
                error_estimate: steps[i + 1].clone(),
            });
        }
        if order >= cap {
            let residual = steps.last().map(|r| r.to_string_radix(10, Some(6))).unwrap_or_default();
            return Err(Error::NotConverged { cap, residual });
        }
        order = (order * 2).min(cap);
    }
}

/// Limit of the accelerated series, certified by two converged evaluations
/// at different `lambda` inside the convergence domain: the lowest-order
/// stationary value when usable (else half a unit past the domain edge) and
/// that value plus `1/4`.
pub fn hurwitz_reference(s: &Real, u: &Real, xi: &Real, ctx: &PrecisionContext) -> Result<Real> {
    const CAP: usize = 4096;
    check_arguments(s, u, xi)?;
    let bits = ctx.base_bits();
    let pms = hurwitz_pms_lowest(s, u, xi, ctx)?;
    let first = if pms.usable {
        pms.lambda
    } else {
        let edge = Float::with_val(bits, Float::with_val(bits, xi - 1u32) / 2u32)
            .max(&Float::new(bits))
            .sqrt();
        edge + 0.5
    };
    let second = Float::with_val(bits, &first + 0.25);
    let a = hurwitz_accel_converged(s, u, xi, &first, CAP, ctx)?;
    let b = hurwitz_accel_converged(s, u, xi, &second, CAP, ctx)?;
    let diff = Float::with_val(bits, &a.value - &b.value).abs();
    let scale = Float::with_val(bits, a.value.abs_ref()).max(&Float::with_val(bits, 1u32));
    if diff > ctx.tolerance() * scale {
        return Err(Error::Consistency(format!(
            "generalized Hurwitz series at lambda = {} and {} differ by {}",
            first.to_f64(),
            second.to_f64(),
            diff.to_string_radix(10, Some(6))
        )));
    }
    Ok(a.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn f(x: f64) -> Float {
        ctx().real(x)
    }

    fn diff(a: &Float, b: &Float) -> f64 {
        Float::with_val(a.prec().max(b.prec()), a - b).abs().to_f64()
    }

    fn zeta(s: f64) -> Float {
        zeta_reference(&f(s), &ctx()).unwrap()
    }

    fn params(s: f64, u: f64, xi: f64, lambda: f64, order: usize) -> HurwitzParams {
        HurwitzParams::new(f(s), f(u), f(xi), f(lambda), order).unwrap()
    }

    #[test]
    fn direct_sum_first_term_and_riemann_limit() {
        let p = hurwitz_direct_partials(&f(2.0), &f(1.0), &f(1.0), 2000, &ctx()).unwrap();
        assert_eq!(p[0], 1);
        let z2 = Float::with_val(ctx().base_bits(), Constant::Pi).square() / 6u32;
        // Tail after n = 2000 is about 1/2001.
        let e = diff(&p[2000], &z2);
        assert!(e > 4.9e-4 && e < 5.0e-4, "{e}");
    }

    #[test]
    fn direct_sum_domain_errors() {
        assert!(hurwitz_direct_partial(&f(1.0), &f(1.0), &f(1.0), 5, &ctx()).is_err());
        assert!(hurwitz_direct_partial(&f(2.0), &f(1.0), &f(0.0), 5, &ctx()).is_err());
        assert!(hurwitz_direct_partial(&f(-2.0), &f(-1.0), &f(1.0), 5, &ctx()).is_err());
    }

    #[test]
    fn psi_low_orders() {
        let p = params(2.0, 1.0, 1.0, 1.0, 1);
        let psi0 = psi_k(0, &p, &ctx()).unwrap();
        assert!(diff(&psi0, &(zeta(2.0) / 4u32)) < 1e-58);
        let psi1 = psi_k(1, &p, &ctx()).unwrap();
        let want = (zeta(2.0) - zeta(3.0)) / 8u32;
        assert!(diff(&psi1, &want) < 1e-58);
        assert!((psi1.to_f64() - 0.05536).abs() < 1e-5);
    }

    #[test]
    fn psi_signs_alternate_when_xi_dominates() {
        let p = params(2.0, 1.0, 9.0, 2.1, 12);
        let mut last_sign = None;
        for k in 4..12 {
            let sign = psi_k(k, &p, &ctx()).unwrap().is_sign_positive();
            if let Some(prev) = last_sign {
                assert_ne!(sign, prev, "k={k}");
            }
            last_sign = Some(sign);
        }
    }

    #[test]
    fn order_zero_value() {
        let v = hurwitz_accel_partial(&params(2.0, 1.0, 1.0, 1.0, 0), &ctx()).unwrap();
        assert!(diff(&v, &(zeta(2.0) / 4u32 + 1u32)) < 1e-58);
        assert!((v.to_f64() - 1.411234).abs() < 1e-6);
    }

    #[test]
    fn riemann_special_case_at_order_sixty() {
        let v = hurwitz_accel_partial(&params(2.0, 1.0, 1.0, 1.0, 60), &ctx()).unwrap();
        let z2 = Float::with_val(ctx().base_bits(), Constant::Pi).square() / 6u32;
        assert!(diff(&v, &z2) < 1e-12);
    }

    #[test]
    fn convergence_domain_errors() {
        assert!(HurwitzParams::new(f(2.0), f(1.0), f(4.0), f(1.2), 3).is_err());
        assert!(HurwitzParams::new(f(2.0), f(1.0), f(4.0), f(1.3), 3).is_ok());
        assert!(HurwitzParams::new(f(2.0), f(0.5), f(1.0), f(1.0), 3).is_err());
    }

    #[test]
    fn pms_lowest_values() {
        let base = hurwitz_pms_lowest(&f(2.0), &f(1.0), &f(1.0), &ctx()).unwrap();
        let want = Float::with_val(ctx().base_bits(), zeta(3.0) / zeta(2.0)).sqrt();
        assert!(diff(&base.lambda, &want) < 1e-58);
        assert!((base.lambda.to_f64() - 0.854_846_752).abs() < 1e-9);
        assert!(base.usable);
        let four = hurwitz_pms_lowest(&f(2.0), &f(1.0), &f(4.0), &ctx()).unwrap();
        assert!(diff(&four.lambda, &(base.lambda.clone() * 2u32)) < 1e-58);
        assert!((four.lambda.to_f64() - 1.7097).abs() < 1e-4);
        assert!(four.usable);
        // lambda^2 = 0.7308 xi grows faster than (xi-1)/2, so every xi is usable here.
        let far = hurwitz_pms_lowest(&f(2.0), &f(1.0), &f(40.0), &ctx()).unwrap();
        assert!(far.lambda.to_f64().powi(2) > 19.5);
        assert!(far.usable);
    }

    #[test]
    fn pms_lowest_can_fall_outside_the_domain() {
        // s = 1.2, u = 1: zeta(2.2)/zeta(1.2) is small, so xi = 3 fails lambda^2 > 1.
        let r = hurwitz_pms_lowest(&f(1.2), &f(1.0), &f(3.0), &ctx()).unwrap();
        assert!(!r.usable);
    }

    #[test]
    fn lambda_independence_of_the_limit() {
        let c = PrecisionContext::new(20, 10).unwrap();
        let a = hurwitz_accel_converged(&f(2.0), &f(1.0), &f(2.5), &f(1.1), 512, &c).unwrap();
        let b = hurwitz_accel_converged(&f(2.0), &f(1.0), &f(2.5), &f(1.6), 512, &c).unwrap();
        assert!(diff(&a.value, &b.value) < 1e-18);
    }

    #[test]
    fn term_ratio_matches_geometric_bound() {
        for (xi, lambda) in [(1.0, 0.58), (2.0, 1.2), (1.0, 1.0)] {
            let p = params(2.0, 1.0, xi, lambda, 61);
            let s = hurwitz_accel_partials(&p, &ctx()).unwrap();
            let l2 = lambda * lambda;
            let bound = l2.max((xi - l2).abs()) / (1.0 + l2);
            let mut total = 0.0;
            for k in 20..60 {
                let t1 = diff(&s[k + 1], &s[k]);
                let t0 = diff(&s[k], &s[k - 1]);
                total += t1 / t0;
            }
            let mean = total / 40.0;
            assert!(
                (mean / bound - 1.0).abs() < 0.15,
                "xi={xi} lambda={lambda}: {mean} vs {bound}"
            );
        }
    }

    #[test]
    fn perturbative_expansion_diverges_while_pms_converges() {
        let c = PrecisionContext::new(20, 10).unwrap();
        let pert = hurwitz_perturbative_partials(&f(2.0), &f(1.0), &f(2.0), 60, &c).unwrap();
        let step = diff(&pert[60], &pert[59]);
        assert!(step > 1.0, "{step}");
        let lambda = hurwitz_pms_lowest(&f(2.0), &f(1.0), &f(2.0), &c).unwrap().lambda;
        let acc = hurwitz_accel_partials(&HurwitzParams::new(f(2.0), f(1.0), f(2.0), lambda, 60).unwrap(), &c).unwrap();
        assert!(diff(&acc[60], &acc[59]) < 1e-8);
    }

    #[test]
    fn short_direct_sum_matches_series_reference() {
        let c = PrecisionContext::new(40, 10).unwrap();
        for sigma in [20.0, 30.5, 80.0] {
            let got = short_direct_zeta(&f(sigma), 50, 200).expect("short sum applies");
            let want = zeta_reference(&f(sigma), &c).unwrap();
            assert!(diff(&got, &want) < 1e-48, "sigma = {sigma}");
        }
        assert!(short_direct_zeta(&f(2.0), 50, 200).is_none());
    }

    #[test]
    fn reference_reduces_to_riemann_zeta() {
        let c = PrecisionContext::new(30, 10).unwrap();
        let got = hurwitz_reference(&f(3.0), &f(1.0), &f(1.0), &c).unwrap();
        let want = zeta_reference(&f(3.0), &c).unwrap();
        assert!(diff(&got, &want) < 1e-29);
    }

    #[test]
    fn converged_evaluation_reports_cap() {
        let c = PrecisionContext::new(40, 10).unwrap();
        let err = hurwitz_accel_converged(&f(2.0), &f(1.0), &f(1.0), &f(3.0), 8, &c).unwrap_err();
        assert!(matches!(err, Error::NotConverged { cap: 8, .. }));
    }
}
