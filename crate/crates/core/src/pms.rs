//! Minimal-sensitivity tuning of `lambda`: stationary points of a partial
//! sum `S_K(lambda)` located by a derivative sign scan and bisection.

use std::fmt;

use rayon::prelude::*;
use rug::Float;

use crate::constants::{catalan_accel_partial, pi_accel_partial, CatalanSeriesParams, PiSeriesParams};
use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_accel_partial, HurwitzParams};
use crate::numerics::{pow10, Complex, PrecisionContext, Real};
use crate::riemann::eta_accel_partials;

/// Default number of interior grid points in the sign scan.
pub const GRID_POINTS: usize = 64;
const MAX_STEP_SHRINKS: u32 = 8;

/// Open interval of admissible `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaDomain {
    pub lower: f64,
    pub upper: f64,
}

impl LambdaDomain {
    pub fn new(lower: f64, upper: f64) -> Self {
        LambdaDomain { lower, upper }
    }

    pub fn contains(&self, lambda: &Real) -> bool {
        *lambda > self.lower && *lambda < self.upper
    }
}

/// A partial-sum family `S_K(lambda)`, smooth in `lambda` on its domain.
pub trait SeriesFamily: Sync {
    fn name(&self) -> String;
    fn domain(&self) -> LambdaDomain;
    fn evaluate(&self, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real>;
}

/// Accelerated pi series.
#[derive(Debug, Clone, Copy, Default)]
pub struct PiFamily;

impl SeriesFamily for PiFamily {
    fn name(&self) -> String {
        "pi".into()
    }

    fn domain(&self) -> LambdaDomain {
        LambdaDomain::new(-0.5, f64::INFINITY)
    }

    fn evaluate(&self, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
        pi_accel_partial(&PiSeriesParams::new(lambda.clone(), order)?, ctx)
    }
}

/// Accelerated Catalan series.
#[derive(Debug, Clone, Copy, Default)]
pub struct CatalanFamily;

impl SeriesFamily for CatalanFamily {
    fn name(&self) -> String {
        "catalan".into()
    }

    fn domain(&self) -> LambdaDomain {
        LambdaDomain::new(-0.5, f64::INFINITY)
    }

    fn evaluate(&self, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
        catalan_accel_partial(&CatalanSeriesParams::unshifted(lambda.clone(), order)?, ctx)
    }
}

/// Accelerated zeta series at real `s`. The `lambda`-independent factor
/// `1/(1-2^(1-s))` is dropped, which leaves the stationary points unchanged
/// and keeps `s = 1` usable.
#[derive(Debug, Clone)]
pub struct ZetaFamily {
    pub s: Real,
}

impl ZetaFamily {
    pub fn new(s: Real) -> Result<Self> {
        if !(s > 0) {
            return Err(Error::domain("s must be positive"));
        }
        Ok(ZetaFamily { s })
    }
}

impl SeriesFamily for ZetaFamily {
    fn name(&self) -> String {
        format!("zeta(s={})", self.s.to_f64())
    }

    fn domain(&self) -> LambdaDomain {
        LambdaDomain::new(0.0, f64::INFINITY)
    }

    fn evaluate(&self, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
        let mut sums = eta_accel_partials(&Complex::from_real(self.s.clone()), lambda, order, ctx)?;
        Ok(sums.pop().expect("non-empty").re)
    }
}

/// Accelerated generalized Hurwitz series at fixed `(s, u, xi)`, on the
/// positive branch `lambda > sqrt(max(0, (xi-1)/2))`.
#[derive(Debug, Clone)]
pub struct HurwitzFamily {
    pub s: Real,
    pub u: Real,
    pub xi: Real,
}

impl SeriesFamily for HurwitzFamily {
    fn name(&self) -> String {
        format!(
            "hurwitz(s={}, u={}, xi={})",
            self.s.to_f64(),
            self.u.to_f64(),
            self.xi.to_f64()
        )
    }

    fn domain(&self) -> LambdaDomain {
        let edge = ((self.xi.to_f64() - 1.0) / 2.0).max(0.0).sqrt();
        LambdaDomain::new(edge, f64::INFINITY)
    }

    fn evaluate(&self, lambda: &Real, order: usize, ctx: &PrecisionContext) -> Result<Real> {
        let params = HurwitzParams::new(self.s.clone(), self.u.clone(), self.xi.clone(), lambda.clone(), order)?;
        hurwitz_accel_partial(&params, ctx)
    }
}

fn step(ctx: &PrecisionContext) -> Float {
    let exponent = -((ctx.target_digits() as f64 / 3.0).ceil() as i32);
    pow10(exponent, ctx.base_bits())
}

fn central<F: SeriesFamily + ?Sized>(
    family: &F,
    lambda: &Real,
    h: &Float,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let bits = ctx.base_bits() + h.prec();
    let plus = family.evaluate(&Float::with_val(bits, lambda + h), order, ctx)?;
    let minus = family.evaluate(&Float::with_val(bits, lambda - h), order, ctx)?;
    let wp = plus.prec().max(minus.prec());
    Ok(Float::with_val(wp, &plus - &minus) / Float::with_val(wp, h * 2u32))
}

/// Fits `lambda +- h` inside the domain, shrinking `h` by 10 at a time.
fn fitted_step<F: SeriesFamily + ?Sized>(family: &F, lambda: &Real, ctx: &PrecisionContext) -> Result<Float> {
    let domain = family.domain();
    if !domain.contains(lambda) {
        return Err(Error::domain(format!(
            "lambda = {} is outside the {} domain ({}, {})",
            lambda.to_f64(),
            family.name(),
            domain.lower,
            domain.upper
        )));
    }
    let mut h = step(ctx);
    for _ in 0..=MAX_STEP_SHRINKS {
        let bits = ctx.base_bits() + h.prec();
        let lo = Float::with_val(bits, lambda - &h);
        let hi = Float::with_val(bits, lambda + &h);
        if lo > domain.lower && hi < domain.upper {
            return Ok(h);
        }
        h /= 10u32;
    }
    Err(Error::domain(format!(
        "lambda = {} is too close to the {} domain boundary for a finite difference",
        lambda.to_f64(),
        family.name()
    )))
}

/// `dS_K/dlambda` by a central difference with step `h = 10^-(target/3)`,
/// Richardson-extrapolated once: `(4 D(h/2) - D(h))/3`.
pub fn derivative<F: SeriesFamily + ?Sized>(
    family: &F,
    lambda: &Real,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let h = fitted_step(family, lambda, ctx)?;
    let coarse = central(family, lambda, &h, order, ctx)?;
    let half = Float::with_val(h.prec(), &h / 2u32);
    let fine = central(family, lambda, &half, order, ctx)?;
    let wp = coarse.prec().max(fine.prec());
    Ok((Float::with_val(wp, &fine * 4u32) - coarse) / 3u32)
}

/// Second difference `(S(l+h) - 2 S(l) + S(l-h))/h^2` with `h = 10^-(target/4)`.
fn second_derivative<F: SeriesFamily + ?Sized>(
    family: &F,
    lambda: &Real,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let mut h = pow10(-((ctx.target_digits() as f64 / 4.0).ceil() as i32), ctx.base_bits());
    let domain = family.domain();
    while !(Float::with_val(ctx.base_bits(), lambda - &h) > domain.lower
        && Float::with_val(ctx.base_bits(), lambda + &h) < domain.upper)
    {
        h /= 10u32;
        if h.is_zero() {
            return Err(Error::domain("no room for a second difference"));
        }
    }
    let bits = ctx.base_bits() + h.prec();
    let plus = family.evaluate(&Float::with_val(bits, lambda + &h), order, ctx)?;
    let mid = family.evaluate(lambda, order, ctx)?;
    let minus = family.evaluate(&Float::with_val(bits, lambda - &h), order, ctx)?;
    let wp = plus.prec().max(mid.prec());
    let num = Float::with_val(wp, &plus + &minus) - Float::with_val(wp, &mid * 2u32);
    Ok(num / Float::with_val(wp, h.square_ref()))
}

/// Outcome of a stationary-point search.
#[derive(Debug, Clone)]
pub struct StationaryResult {
    /// The chosen stationary point; when `found` is false, the grid point of
    /// smallest `|dS/dlambda|`.
    pub lambda_star: Real,
    pub derivative_residual: Real,
    pub bracket: (Real, Real),
    pub order: usize,
    pub found: bool,
    /// Every stationary point located, including the chosen one.
    pub candidates: Vec<Real>,
    pub diagnostic: Option<String>,
}

impl fmt::Display for StationaryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.found {
            write!(
                f,
                "lambda* = {} at order {} (residual {}, bracket [{}, {}])",
                self.lambda_star.to_string_radix(10, Some(20)),
                self.order,
                self.derivative_residual.to_string_radix(10, Some(3)),
                self.bracket.0.to_string_radix(10, Some(20)),
                self.bracket.1.to_string_radix(10, Some(20))
            )
        } else {
            write!(
                f,
                "no stationary point at order {}: {}",
                self.order,
                self.diagnostic.as_deref().unwrap_or("")
            )
        }
    }
}

/// Finds stationary points of `S_order(lambda)` inside `search`, scanning
/// [`GRID_POINTS`] interior points.
pub fn find_stationary<F: SeriesFamily + ?Sized>(
    family: &F,
    order: usize,
    search: (&Real, &Real),
    ctx: &PrecisionContext,
) -> Result<StationaryResult> {
    find_stationary_with_grid(family, order, search, GRID_POINTS, ctx)
}

/// [`find_stationary`] with an explicit number of interior grid points.
///
/// Sign changes of the derivative between neighbouring grid points are
/// refined by bisection until the bracket is narrower than
/// `10^-(target/2)` and the derivative residual is below the same tolerance
/// (or the bracket reaches `10^-target`). When several are found, the one with the smallest
/// second difference is returned and all are listed in `candidates`. No
/// sign change is a normal outcome with `found = false`.
pub fn find_stationary_with_grid<F: SeriesFamily + ?Sized>(
    family: &F,
    order: usize,
    search: (&Real, &Real),
    grid_points: usize,
    ctx: &PrecisionContext,
) -> Result<StationaryResult> {
    let bits = ctx.base_bits();
    let (lo, hi) = (Float::with_val(bits, search.0), Float::with_val(bits, search.1));
    let domain = family.domain();
    if !(lo < hi) {
        return Err(Error::domain("search interval must have lower < upper"));
    }
    if lo < domain.lower || hi > domain.upper {
        return Err(Error::domain(format!(
            "search interval [{}, {}] leaves the {} domain ({}, {})",
            lo.to_f64(),
            hi.to_f64(),
            family.name(),
            domain.lower,
            domain.upper
        )));
    }
    if grid_points < 2 {
        return Err(Error::domain("grid needs at least two points"));
    }

    let width = Float::with_val(bits, &hi - &lo);
    let grid: Vec<Float> = (0..grid_points)
        .map(|i| Float::with_val(bits, &width * (i as u32 + 1)) / (grid_points as u32 + 1) + &lo)
        .collect();
    let slopes: Vec<Real> = grid
        .par_iter()
        .map(|l| derivative(family, l, order, ctx))
        .collect::<Result<_>>()?;

    let tol = pow10(-((ctx.target_digits() as f64 / 2.0).ceil() as i32), bits);
    let mut roots: Vec<(Real, Real, (Real, Real))> = Vec::new();
    for i in 0..grid_points {
        if slopes[i].is_zero() {
            roots.push((grid[i].clone(), Float::new(bits), (grid[i].clone(), grid[i].clone())));
            continue;
        }
        if i + 1 < grid_points
            && !slopes[i + 1].is_zero()
            && slopes[i].is_sign_negative() != slopes[i + 1].is_sign_negative()
        {
            roots.push(bisect(family, order, &grid[i], &grid[i + 1], &slopes[i], &tol, ctx)?);
        }
    }

    if roots.is_empty() {
        let (best, slope) = grid
            .iter()
            .zip(&slopes)
            .min_by(|a, b| {
                let (x, y) = (
                    Float::with_val(bits, a.1.abs_ref()),
                    Float::with_val(bits, b.1.abs_ref()),
                );
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("grid is non-empty");
        return Ok(StationaryResult {
            lambda_star: best.clone(),
            derivative_residual: Float::with_val(bits, slope.abs_ref()),
            bracket: (lo, hi),
            order,
            found: false,
            candidates: Vec::new(),
            diagnostic: Some(format!(
                "dS/dlambda has no sign change on {grid_points} grid points of [{}, {}] for {} at order {order}",
                search.0.to_f64(),
                search.1.to_f64(),
                family.name()
            )),
        });
    }

    let chosen = if roots.len() == 1 {
        0
    } else {
        let curvatures: Vec<Real> = roots
            .par_iter()
            .map(|r| second_derivative(family, &r.0, order, ctx).map(|c| c.abs()))
            .collect::<Result<_>>()?;
        (0..roots.len())
            .min_by(|&a, &b| {
                curvatures[a]
                    .partial_cmp(&curvatures[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty")
    };
    let candidates: Vec<Real> = roots.iter().map(|r| r.0.clone()).collect();
    let (lambda_star, residual, bracket) = roots.swap_remove(chosen);
    let found = residual <= tol;
    let diagnostic = (!found).then(|| {
        format!(
            "bracket closed but |dS/dlambda| = {} exceeds {}",
            residual.to_string_radix(10, Some(3)),
            tol.to_string_radix(10, Some(3))
        )
    });
    Ok(StationaryResult {
        lambda_star,
        derivative_residual: residual,
        bracket,
        order,
        found,
        candidates,
        diagnostic,
    })
}

fn bisect<F: SeriesFamily + ?Sized>(
    family: &F,
    order: usize,
    lo: &Real,
    hi: &Real,
    lo_slope: &Real,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<(Real, Real, (Real, Real))> {
    let bits = ctx.base_bits();
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let lo_negative = lo_slope.is_sign_negative();
    // Keep halving past the width tolerance until the residual also meets it,
    // down to the target resolution.
    let floor = pow10(-(ctx.target_digits() as i32), bits);
    loop {
        let mid = Float::with_val(bits, &a + &b) / 2u32;
        let slope = derivative(family, &mid, order, ctx)?;
        if slope.is_zero() {
            return Ok((mid.clone(), Float::new(bits), (mid.clone(), mid)));
        }
        if slope.is_sign_negative() == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
        let width = Float::with_val(bits, &b - &a);
        if width <= *tol {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let residual = derivative(family, &mid, order, ctx)?.abs();
            if residual <= *tol || width <= floor {
                return Ok((mid, Float::with_val(bits, residual), (a, b)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{pi_accel_derivative, pi_pms_lambda1};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn f(x: f64) -> Float {
        ctx().real(x)
    }

    #[test]
    fn pi_derivative_vanishes_at_lowest_order_stationary_point() {
        let l = pi_pms_lambda1(&ctx()).unwrap();
        let d = derivative(&PiFamily, &l, 2, &ctx()).unwrap();
        assert!(d.abs() < 1e-8);
    }

    #[test]
    fn zeta_derivative_vanishes_at_two_to_minus_s() {
        let family = ZetaFamily::new(f(2.0)).unwrap();
        let d = derivative(&family, &f(0.25), 1, &ctx()).unwrap();
        assert!(d.abs() < 1e-8);
    }

    #[test]
    fn finite_difference_matches_analytic_pi_derivative() {
        for lambda in [-0.3, 0.0, 0.5] {
            for order in [2usize, 10, 30] {
                let fd = derivative(&PiFamily, &f(lambda), order, &ctx()).unwrap();
                let exact = pi_accel_derivative(&PiSeriesParams::new(f(lambda), order).unwrap(), &ctx()).unwrap();
                let err = Float::with_val(256, &fd - &exact).abs();
                let scale = Float::with_val(256, exact.abs_ref()).max(&Float::with_val(256, 1));
                assert!(err / scale < 1e-30, "lambda={lambda} M={order}");
            }
        }
    }

    #[test]
    fn derivative_flattens_with_order() {
        let family = ZetaFamily::new(f(2.0)).unwrap();
        let mut last = f64::INFINITY;
        for order in [5usize, 15, 31, 61] {
            let d = derivative(&family, &f(0.45), order, &ctx()).unwrap().abs().to_f64();
            assert!(d < last, "K={order}");
            last = d;
        }
    }

    #[test]
    fn derivative_rejects_points_outside_the_domain() {
        assert!(derivative(&PiFamily, &f(-0.6), 2, &ctx()).is_err());
        let zeta = ZetaFamily::new(f(2.0)).unwrap();
        assert!(derivative(&zeta, &f(0.0), 2, &ctx()).is_err());
        // Just inside the boundary the step shrinks instead of failing.
        assert!(derivative(&zeta, &f(1e-19), 1, &ctx()).is_ok());
    }

    #[test]
    fn zeta_lowest_order() {
        for (s, want) in [(1.0, 0.5), (2.0, 0.25), (3.0, 0.125)] {
            let family = ZetaFamily::new(f(s)).unwrap();
            let r = find_stationary(&family, 1, (&f(0.0), &f(1.0)), &ctx()).unwrap();
            assert!(r.found);
            assert!((r.lambda_star.to_f64() - want).abs() < 1e-24, "s={s}");
            assert_eq!(r.candidates.len(), 1);
        }
    }

    #[test]
    fn pi_lowest_order_matches_closed_form() {
        let r = find_stationary(&PiFamily, 2, (&f(-0.49), &f(0.5)), &ctx()).unwrap();
        assert!(r.found, "{r}");
        let l = pi_pms_lambda1(&ctx()).unwrap();
        assert!(Float::with_val(256, &r.lambda_star - &l).abs() < 1e-10);
        assert!((r.lambda_star.to_f64() + 0.365381).abs() < 1e-5);
    }

    #[test]
    fn even_order_has_no_stationary_point() {
        let family = ZetaFamily::new(f(2.0)).unwrap();
        let r = find_stationary(&family, 2, (&f(0.0), &f(1.0)), &ctx()).unwrap();
        assert!(!r.found);
        assert!(r.diagnostic.unwrap().contains("no sign change"));
    }

    #[test]
    fn search_interval_must_lie_in_domain() {
        assert!(find_stationary(&PiFamily, 2, (&f(-0.7), &f(0.5)), &ctx()).is_err());
        assert!(find_stationary(&PiFamily, 2, (&f(0.5), &f(0.1)), &ctx()).is_err());
    }

    #[test]
    fn grid_refinement_does_not_move_the_root() {
        let family = ZetaFamily::new(f(3.0)).unwrap();
        let a = find_stationary_with_grid(&family, 15, (&f(0.0), &f(1.0)), 64, &ctx()).unwrap();
        let b = find_stationary_with_grid(&family, 15, (&f(0.0), &f(1.0)), 128, &ctx()).unwrap();
        assert!(a.found && b.found);
        assert!(Float::with_val(256, &a.lambda_star - &b.lambda_star).abs() < 1e-25);
    }

    #[test]
    fn hurwitz_family_has_a_stationary_point_near_the_closed_form() {
        let family = HurwitzFamily {
            s: f(2.0),
            u: f(1.0),
            xi: f(1.0),
        };
        let c = PrecisionContext::new(20, 10).unwrap();
        let r = find_stationary(&family, 1, (&f(0.1), &f(2.0)), &c).unwrap();
        assert!(r.found);
        // At order 1 the stationary condition is Psi_1 = 0, i.e. lambda^2 = xi zeta(3)/zeta(2).
        assert!((r.lambda_star.to_f64() - 0.854_846_752).abs() < 1e-9);
    }
}
