//! Command-line front end: evaluates a series family over a range of orders,
//! optionally alongside baseline curves, and emits error tables.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde::Serialize;

use crate::constants::{
    catalan_accel_partials, catalan_direct_partials, catalan_optimized_partials, catalan_reference,
    catalan_shifted_partials, gregory_partials, pi_accel_partials, pi_pms_lambda1, pi_reference, shifted_reference,
    CatalanSeriesParams, PiSeriesParams,
};
use crate::error::{Error, Result};
use crate::hurwitz::{
    hurwitz_accel_partials, hurwitz_direct_partials, hurwitz_perturbative_partials, hurwitz_pms_lowest,
    hurwitz_reference, HurwitzParams,
};
use crate::numerics::{Complex, PrecisionContext, Real, DEFAULT_GUARD_DIGITS, DEFAULT_TARGET_DIGITS};
use crate::pms::{find_stationary, CatalanFamily, HurwitzFamily, PiFamily, SeriesFamily, StationaryResult, ZetaFamily};
use crate::riemann::{
    zeta_accel_partials, zeta_alternating_partials, zeta_direct_partials, zeta_pms_lowest, zeta_reference,
    zeta_reference_complex, ZetaSeriesParams,
};
use crate::table::{build_rows, write_table, ErrorTableRow, OutputFormat};

/// Exit status for a domain violation.
pub const EXIT_DOMAIN: i32 = 2;
/// Exit status when the requested accuracy is unreachable.
pub const EXIT_NOT_CONVERGED: i32 = 3;
/// Exit status for any other failure.
pub const EXIT_FAILURE: i32 = 1;

/// How many lower orders `--lambda pms` tries when the requested order has no
/// stationary point.
const PMS_FALLBACK_ORDERS: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "variaccel",
    version,
    about = "Accelerated series for zeta, pi, Catalan and Hurwitz-type sums"
)]
pub struct Cli {
    /// Requested decimal digits.
    #[arg(long, global = true, env = "VARIACCEL_DIGITS", default_value_t = DEFAULT_TARGET_DIGITS)]
    pub precision_digits: u32,

    /// Extra working digits.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD_DIGITS)]
    pub guard_digits: u32,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: FormatArg,

    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: CommandArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Plain,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Plain => OutputFormat::Plain,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CommandArg {
    /// Accelerated pi series.
    Pi(PiArgs),
    /// Catalan's constant and the shifted family.
    Catalan(CatalanArgs),
    /// Riemann zeta at real or complex s.
    Zeta(ZetaArgs),
    /// Generalized Hurwitz zeta sum_{n>=0} 1/(n^u + xi)^s.
    Hurwitz(HurwitzArgs),
    /// Stationary point of S_K(lambda).
    Pms(PmsArgs),
    /// Error table for any family.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Pi,
    Catalan,
    Zeta,
    Hurwitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CatalanVariant {
    /// Accelerated series in lambda.
    Accel,
    /// Shifted family S~(a).
    Shifted,
    /// Shift derivative at the lowest-order stationary lambda.
    Optimized,
    /// Plain alternating series.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    /// Untransformed series.
    Direct,
    /// lambda = 0 for pi and Catalan.
    Fv,
    Lambda0,
    Lambda1,
    /// Stationary lambda at the top order.
    Pms,
}

impl Baseline {
    pub fn tag(self) -> &'static str {
        match self {
            Baseline::Direct => "direct",
            Baseline::Fv => "fv",
            Baseline::Lambda0 => "lambda0",
            Baseline::Lambda1 => "lambda1",
            Baseline::Pms => "pms",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// A number, `pms` (stationary point at the top order) or `pms1`
    /// (lowest-order closed form).
    #[arg(long, default_value = "pms1", allow_hyphen_values = true)]
    pub lambda: String,

    /// Orders 1..=TERMS.
    #[arg(long, conflicts_with = "orders", required_unless_present = "orders")]
    pub terms: Option<usize>,

    /// Inclusive order range `A..B`.
    #[arg(long)]
    pub orders: Option<String>,

    /// Baseline curves, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub compare: Vec<Baseline>,
}

#[derive(Debug, Clone, Args)]
pub struct PiArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CatalanArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_enum, default_value = "accel")]
    pub variant: CatalanVariant,
    /// Shift of the shifted variant, |a| < 1.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub s_re: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s_im: String,
}

#[derive(Debug, Clone, Args)]
pub struct HurwitzArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, alias = "s", allow_hyphen_values = true)]
    pub s_re: String,
    #[arg(long, default_value = "1")]
    pub u: String,
    #[arg(long, default_value = "1")]
    pub xi: String,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyParamArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value = "accel")]
    pub variant: CatalanVariant,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, alias = "s", allow_hyphen_values = true)]
    pub s_re: Option<String>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s_im: String,
    #[arg(long, default_value = "1")]
    pub u: String,
    #[arg(long, default_value = "1")]
    pub xi: String,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub params: FamilyParamArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PmsArgs {
    #[command(flatten)]
    pub params: FamilyParamArgs,
    #[arg(long, alias = "terms")]
    pub order: usize,
    /// Search interval `lo..hi`; defaults depend on the family.
    #[arg(long, allow_hyphen_values = true)]
    pub search: Option<String>,
}

/// A series family with its arguments still in decimal form, so they are
/// parsed at the run's precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Pi,
    Catalan { variant: CatalanVariant, a: Option<String> },
    Zeta { s_re: String, s_im: String },
    Hurwitz { s: String, u: String, xi: String },
}

impl FamilySpec {
    fn name(&self) -> &'static str {
        match self {
            FamilySpec::Pi => "pi",
            FamilySpec::Catalan { .. } => "catalan",
            FamilySpec::Zeta { .. } => "zeta",
            FamilySpec::Hurwitz { .. } => "hurwitz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaChoice {
    Value(String),
    Pms,
    Pms1,
}

impl std::str::FromStr for LambdaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pms" => Ok(LambdaChoice::Pms),
            "pms1" => Ok(LambdaChoice::Pms1),
            other => {
                Float::parse(other).map_err(|e| Error::Parse(format!("invalid lambda {other:?}: {e}")))?;
                Ok(LambdaChoice::Value(other.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Pi,
    Catalan,
    Zeta,
    Hurwitz,
    Pms,
    Table,
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: FamilySpec,
    pub lambda: LambdaChoice,
    pub orders: RangeInclusive<usize>,
    pub search: Option<String>,
    pub precision_digits: u32,
    pub guard_digits: u32,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub compare: Vec<Baseline>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, family, series, search) = match cli.command {
            CommandArg::Pi(a) => (CommandKind::Pi, FamilySpec::Pi, Some(a.series), None),
            CommandArg::Catalan(a) => (
                CommandKind::Catalan,
                FamilySpec::Catalan {
                    variant: a.variant,
                    a: a.a,
                },
                Some(a.series),
                None,
            ),
            CommandArg::Zeta(a) => (
                CommandKind::Zeta,
                FamilySpec::Zeta {
                    s_re: a.s_re,
                    s_im: a.s_im,
                },
                Some(a.series),
                None,
            ),
            CommandArg::Hurwitz(a) => (
                CommandKind::Hurwitz,
                FamilySpec::Hurwitz {
                    s: a.s_re,
                    u: a.u,
                    xi: a.xi,
                },
                Some(a.series),
                None,
            ),
            CommandArg::Table(a) => (CommandKind::Table, family_from_params(a.params)?, Some(a.series), None),
            CommandArg::Pms(a) => {
                let family = family_from_params(a.params)?;
                let config = RunConfig {
                    command: CommandKind::Pms,
                    family,
                    lambda: LambdaChoice::Pms,
                    orders: a.order..=a.order,
                    search: a.search,
                    precision_digits: cli.precision_digits,
                    guard_digits: cli.guard_digits,
                    output_format: cli.format.into(),
                    output_path: cli.output,
                    compare: Vec::new(),
                };
                return Ok(config);
            }
        };
        let series = series.expect("series commands carry series arguments");
        let orders = match (&series.orders, series.terms) {
            (Some(text), _) => parse_orders(text)?,
            (None, Some(n)) => 1..=n,
            (None, None) => return Err(Error::Parse("one of --terms or --orders is required".into())),
        };
        Ok(RunConfig {
            command,
            family,
            lambda: series.lambda.parse()?,
            orders,
            search,
            precision_digits: cli.precision_digits,
            guard_digits: cli.guard_digits,
            output_format: cli.format.into(),
            output_path: cli.output,
            compare: series.compare,
        })
    }

    fn context(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.precision_digits, self.guard_digits)
    }
}

fn family_from_params(p: FamilyParamArgs) -> Result<FamilySpec> {
    let need_s = |s: Option<String>| s.ok_or_else(|| Error::Parse(format!("--s-re is required for {:?}", p.family)));
    Ok(match p.family {
        FamilyArg::Pi => FamilySpec::Pi,
        FamilyArg::Catalan => FamilySpec::Catalan {
            variant: p.variant,
            a: p.a.clone(),
        },
        FamilyArg::Zeta => FamilySpec::Zeta {
            s_re: need_s(p.s_re.clone())?,
            s_im: p.s_im.clone(),
        },
        FamilyArg::Hurwitz => FamilySpec::Hurwitz {
            s: need_s(p.s_re.clone())?,
            u: p.u.clone(),
            xi: p.xi.clone(),
        },
    })
}

/// Parses `A..B`, `A..=B` (both inclusive) or a single order `N`.
pub fn parse_orders(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("invalid order range {text:?}; expected A..B"));
    let number = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let range = match text.split_once("..") {
        Some((a, b)) => number(a)?..=number(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let n = number(text)?;
            n..=n
        }
    };
    if range.start() > range.end() {
        return Err(bad());
    }
    Ok(range)
}

fn parse_interval(text: &str, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("invalid search interval {text:?}; expected lo..hi")))?;
    let lo = ctx.parse(a)?;
    let hi = ctx.parse(b)?;
    if !(lo < hi) {
        return Err(Error::domain("search interval needs lo < hi"));
    }
    Ok((lo, hi))
}

/// One emitted table.
#[derive(Debug, Clone)]
pub struct NamedTable {
    pub tag: String,
    pub rows: Vec<ErrorTableRow>,
}

/// Serializable form of a [`StationaryResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StationaryReport {
    pub family: String,
    pub order: usize,
    pub found: bool,
    pub lambda_star: String,
    pub derivative_residual: String,
    pub bracket_lo: String,
    pub bracket_hi: String,
    pub candidates: String,
    pub diagnostic: String,
}

impl StationaryReport {
    fn new(family: &str, r: &StationaryResult, ctx: &PrecisionContext) -> Self {
        let digits = Some((ctx.target_digits() + ctx.guard_digits()) as usize);
        let text = |x: &Float| x.to_string_radix(10, digits);
        StationaryReport {
            family: family.to_string(),
            order: r.order,
            found: r.found,
            lambda_star: text(&r.lambda_star),
            derivative_residual: r.derivative_residual.to_string_radix(10, Some(6)),
            bracket_lo: text(&r.bracket.0),
            bracket_hi: text(&r.bracket.1),
            candidates: r.candidates.iter().map(text).collect::<Vec<_>>().join(";"),
            diagnostic: r.diagnostic.clone().unwrap_or_default(),
        }
    }
}

/// Result of [`run`]: tables (main table first) or a stationary-point
/// report, plus metadata lines for stderr.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub tables: Vec<NamedTable>,
    pub stationary: Option<StationaryReport>,
    pub metadata: Vec<String>,
}

/// Family arguments parsed at the run's precision.
enum Family {
    Pi,
    Catalan { variant: CatalanVariant, a: Real },
    Zeta { s: Complex },
    Hurwitz { s: Real, u: Real, xi: Real },
}

impl Family {
    fn parse(given: &FamilySpec, ctx: &PrecisionContext) -> Result<Self> {
        Ok(match given {
            FamilySpec::Pi => Family::Pi,
            FamilySpec::Catalan { variant, a } => {
                let a = match a {
                    Some(text) if *variant != CatalanVariant::Shifted => {
                        let value = ctx.parse(text)?;
                        if !value.is_zero() {
                            return Err(Error::domain("--a applies only to the shifted variant"));
                        }
                        value
                    }
                    Some(text) => ctx.parse(text)?,
                    None => ctx.real(0.0),
                };
                if !(Float::with_val(a.prec(), a.abs_ref()) < 1) {
                    return Err(Error::domain("shift a must satisfy |a| < 1"));
                }
                Family::Catalan { variant: *variant, a }
            }
            FamilySpec::Zeta { s_re, s_im } => {
                let s = Complex::new(ctx.parse(s_re)?, ctx.parse(s_im)?);
                if !(s.re > 0) {
                    return Err(Error::domain("Re(s) must be positive"));
                }
                if s.is_real() && s.re == 1 {
                    return Err(Error::Pole("zeta has a pole at s = 1".into()));
                }
                Family::Zeta { s }
            }
            FamilySpec::Hurwitz { s, u, xi } => {
                let (s, u, xi) = (ctx.parse(s)?, ctx.parse(u)?, ctx.parse(xi)?);
                // Argument checks shared with the series.
                hurwitz_direct_partials(&s, &u, &xi, 0, ctx)?;
                Family::Hurwitz { s, u, xi }
            }
        })
    }

    fn pms_family(&self) -> Result<Box<dyn SeriesFamily>> {
        Ok(match self {
            Family::Pi => Box::new(PiFamily),
            Family::Catalan {
                variant: CatalanVariant::Shifted,
                ..
            } => {
                return Err(Error::domain(
                    "--lambda pms is not available for the shifted variant; use pms1",
                ))
            }
            Family::Catalan { .. } => Box::new(CatalanFamily),
            Family::Zeta { s } => {
                if !s.is_real() {
                    return Err(Error::domain("--lambda pms needs real s; use pms1 or a number"));
                }
                Box::new(ZetaFamily::new(s.re.clone())?)
            }
            Family::Hurwitz { s, u, xi } => Box::new(HurwitzFamily {
                s: s.clone(),
                u: u.clone(),
                xi: xi.clone(),
            }),
        })
    }

    fn default_search(&self, ctx: &PrecisionContext) -> (Real, Real) {
        match self {
            Family::Pi | Family::Catalan { .. } => (ctx.real(-0.49), ctx.real(1.0)),
            Family::Zeta { .. } => (ctx.real(0.0), ctx.real(1.0)),
            Family::Hurwitz { xi, .. } => {
                let bits = ctx.base_bits();
                let edge = Float::with_val(bits, Float::with_val(bits, xi - 1u32) / 2u32)
                    .max(&Float::new(bits))
                    .sqrt();
                let width = Float::with_val(bits, Float::with_val(bits, xi.sqrt_ref()) * 2u32)
                    .max(&Float::with_val(bits, 2u32));
                let hi = Float::with_val(bits, &edge + &width);
                (edge, hi)
            }
        }
    }

    fn reference(&self, ctx: &PrecisionContext) -> Result<Complex> {
        Ok(match self {
            Family::Pi => Complex::from_real(pi_reference(ctx)),
            Family::Catalan {
                variant: CatalanVariant::Shifted,
                a,
            } => Complex::from_real(shifted_reference(a, ctx)?),
            Family::Catalan { .. } => Complex::from_real(catalan_reference(ctx)?),
            Family::Zeta { s } if s.is_real() && s.re > 1 => Complex::from_real(zeta_reference(&s.re, ctx)?),
            Family::Zeta { s } => zeta_reference_complex(s, ctx)?,
            Family::Hurwitz { s, u, xi } => Complex::from_real(hurwitz_reference(s, u, xi, ctx)?),
        })
    }

    fn lambda_pms1(&self, ctx: &PrecisionContext) -> Result<Real> {
        match self {
            Family::Pi | Family::Catalan { .. } => pi_pms_lambda1(ctx),
            Family::Zeta { s } => zeta_pms_lowest(s, ctx),
            Family::Hurwitz { s, u, xi } => {
                let pms = hurwitz_pms_lowest(s, u, xi, ctx)?;
                if !pms.usable {
                    return Err(Error::domain(format!(
                        "lowest-order stationary lambda = {} violates lambda^2 > (xi-1)/2",
                        pms.lambda.to_f64()
                    )));
                }
                Ok(pms.lambda)
            }
        }
    }

    /// Partial sums at `lambda` for orders `0..=top`.
    fn accel(&self, lambda: &Real, top: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
        match self {
            Family::Pi => real(pi_accel_partials(
                &PiSeriesParams::new(lambda.clone(), top.max(1))?,
                ctx,
            )),
            Family::Catalan { variant, a } => match variant {
                CatalanVariant::Shifted => real(catalan_shifted_partials(
                    &CatalanSeriesParams::new(lambda.clone(), top.max(1), a.clone())?,
                    ctx,
                )),
                _ => real(catalan_accel_partials(
                    &CatalanSeriesParams::unshifted(lambda.clone(), top.max(1))?,
                    ctx,
                )),
            },
            Family::Zeta { s } => {
                if lambda.is_zero() {
                    zeta_alternating_partials(s, top, ctx)
                } else {
                    zeta_accel_partials(&ZetaSeriesParams::new(s.clone(), lambda.clone(), top)?, ctx)
                }
            }
            Family::Hurwitz { s, u, xi } => {
                if lambda.is_zero() {
                    real(hurwitz_perturbative_partials(s, u, xi, top, ctx))
                } else {
                    real(hurwitz_accel_partials(
                        &HurwitzParams::new(s.clone(), u.clone(), xi.clone(), lambda.clone(), top)?,
                        ctx,
                    ))
                }
            }
        }
    }

    fn direct(&self, top: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
        match self {
            Family::Pi => real(gregory_partials(top, ctx)),
            Family::Catalan {
                variant: CatalanVariant::Shifted,
                ..
            } => Err(Error::domain(
                "the direct baseline is not available for the shifted variant",
            )),
            Family::Catalan { .. } => real(catalan_direct_partials(top, ctx)),
            Family::Zeta { s } => zeta_direct_partials(s, top, ctx),
            Family::Hurwitz { s, u, xi } => real(hurwitz_direct_partials(s, u, xi, top, ctx)),
        }
    }
}

fn real(v: Result<Vec<Real>>) -> Result<Vec<Complex>> {
    Ok(v?.into_iter().map(Complex::from_real).collect())
}

fn describe(x: &Real) -> String {
    x.to_string_radix(10, Some(20))
}

/// Resolves `--lambda pms`: the stationary point at `order`, falling back to
/// the next lower orders when there is none.
fn resolve_pms(
    family: &Family,
    order: usize,
    search: Option<&str>,
    ctx: &PrecisionContext,
    metadata: &mut Vec<String>,
) -> Result<Real> {
    let series = family.pms_family()?;
    let (lo, hi) = match search {
        Some(text) => parse_interval(text, ctx)?,
        None => family.default_search(ctx),
    };
    let lowest = order.saturating_sub(PMS_FALLBACK_ORDERS).max(1);
    let mut last = None;
    for k in (lowest..=order.max(1)).rev() {
        let result = find_stationary(series.as_ref(), k, (&lo, &hi), ctx)?;
        if result.found {
            metadata.push(format!(
                "lambda_pms={} found_at_order={} requested_order={}",
                describe(&result.lambda_star),
                k,
                order
            ));
            return Ok(result.lambda_star);
        }
        last = Some(result);
    }
    let diagnostic = last.and_then(|r| r.diagnostic).unwrap_or_default();
    Err(Error::domain(format!(
        "no stationary point for orders {lowest}..={order} in ({}, {}): {diagnostic}",
        lo.to_f64(),
        hi.to_f64()
    )))
}

fn resolve_lambda(
    choice: &LambdaChoice,
    family: &Family,
    top: usize,
    search: Option<&str>,
    ctx: &PrecisionContext,
    metadata: &mut Vec<String>,
) -> Result<Real> {
    match choice {
        LambdaChoice::Value(text) => ctx.parse(text),
        LambdaChoice::Pms1 => family.lambda_pms1(ctx),
        LambdaChoice::Pms => resolve_pms(family, top, search, ctx, metadata),
    }
}

fn select(partials: &[Complex], orders: &RangeInclusive<usize>) -> Vec<(usize, Complex)> {
    orders
        .clone()
        .filter_map(|k| partials.get(k).map(|v| (k, v.clone())))
        .collect()
}

/// Evaluates `config` and returns the tables without writing them.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let ctx = config.context()?;
    let family = Family::parse(&config.family, &ctx)?;
    let mut out = RunOutput::default();
    let top = *config.orders.end();

    if config.command == CommandKind::Pms {
        let series = family.pms_family()?;
        let (lo, hi) = match &config.search {
            Some(text) => parse_interval(text, &ctx)?,
            None => family.default_search(&ctx),
        };
        let result = find_stationary(series.as_ref(), top, (&lo, &hi), &ctx)?;
        out.metadata.push(format!(
            "family={} search=({}, {})",
            series.name(),
            lo.to_f64(),
            hi.to_f64()
        ));
        out.stationary = Some(StationaryReport::new(&series.name(), &result, &ctx));
        return Ok(out);
    }

    let main = if let Family::Catalan {
        variant: v @ (CatalanVariant::Optimized | CatalanVariant::Direct),
        ..
    } = &family
    {
        let partials = match v {
            CatalanVariant::Optimized => real(catalan_optimized_partials(top.max(1), &ctx))?,
            _ => real(catalan_direct_partials(top, &ctx))?,
        };
        out.metadata.push(format!("table=main variant={v:?}"));
        partials
    } else {
        let lambda = resolve_lambda(
            &config.lambda,
            &family,
            top,
            config.search.as_deref(),
            &ctx,
            &mut out.metadata,
        )?;
        out.metadata.push(format!("table=main lambda={}", describe(&lambda)));
        family.accel(&lambda, top, &ctx)?
    };
    let reference = family.reference(&ctx)?;
    let shown = if reference.is_real() {
        describe(&reference.re)
    } else {
        reference.to_string()
    };
    out.metadata
        .push(format!("family={} reference={}", config.family.name(), shown));
    out.tables.push(NamedTable {
        tag: "main".into(),
        rows: build_rows(&select(&main, &config.orders), &reference, &ctx),
    });

    for baseline in &config.compare {
        let partials = match baseline {
            Baseline::Direct => family.direct(top, &ctx)?,
            Baseline::Fv | Baseline::Lambda0 => {
                if *baseline == Baseline::Fv && !matches!(family, Family::Pi | Family::Catalan { .. }) {
                    return Err(Error::domain("the fv baseline applies to the pi and catalan families"));
                }
                family.accel(&ctx.real(0.0), top, &ctx)?
            }
            Baseline::Lambda1 => family.accel(&ctx.real(1.0), top, &ctx)?,
            Baseline::Pms => {
                let lambda = resolve_pms(&family, top, config.search.as_deref(), &ctx, &mut out.metadata)?;
                family.accel(&lambda, top, &ctx)?
            }
        };
        out.metadata.push(format!("table={}", baseline.tag()));
        out.tables.push(NamedTable {
            tag: baseline.tag().into(),
            rows: build_rows(&select(&partials, &config.orders), &reference, &ctx),
        });
    }
    Ok(out)
}

/// `PATH` for the main table; `stem.tag.ext` beside it for baselines.
pub fn table_path(path: &Path, tag: &str) -> PathBuf {
    if tag == "main" {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_report<W: Write>(report: &StationaryReport, format: OutputFormat, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: "<output>".into(),
        source: e,
    };
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(report).map_err(|e| Error::Parse(format!("csv: {e}")))?;
            w.flush().map_err(io)?;
        }
        OutputFormat::Json => {
            serde_json::to_writer(&mut out, report).map_err(|e| Error::Parse(e.to_string()))?;
            out.write_all(b"\n").map_err(io)?;
        }
        OutputFormat::Plain => {
            let mut text = String::new();
            let _ = writeln!(text, "family       {}", report.family);
            let _ = writeln!(text, "order        {}", report.order);
            let _ = writeln!(text, "found        {}", report.found);
            let _ = writeln!(text, "lambda*      {}", report.lambda_star);
            let _ = writeln!(text, "residual     {}", report.derivative_residual);
            let _ = writeln!(text, "bracket      [{}, {}]", report.bracket_lo, report.bracket_hi);
            if !report.candidates.is_empty() {
                let _ = writeln!(text, "candidates   {}", report.candidates);
            }
            if !report.diagnostic.is_empty() {
                let _ = writeln!(text, "diagnostic   {}", report.diagnostic);
            }
            out.write_all(text.as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

/// Writes every table to stdout (`out`) or to files derived from
/// `config.output_path`. Several tables on one stream are separated by a
/// blank line; as JSON they become one object keyed by tag.
pub fn emit_output<W: Write>(output: &RunOutput, config: &RunConfig, mut out: W) -> Result<()> {
    let format = config.output_format;
    if let Some(report) = &output.stationary {
        return match &config.output_path {
            Some(p) => write_report(report, format, std::fs::File::create(p).map_err(io_error(p))?),
            None => write_report(report, format, &mut out),
        };
    }
    if let Some(path) = &config.output_path {
        for table in &output.tables {
            let p = table_path(path, &table.tag);
            let file = std::fs::File::create(&p).map_err(io_error(&p))?;
            write_table(&table.rows, format, std::io::BufWriter::new(file)).map_err(|e| match e {
                Error::Io { source, .. } => Error::Io {
                    path: p.clone(),
                    source,
                },
                other => other,
            })?;
        }
        return Ok(());
    }
    let io = |e: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source: e,
    };
    if format == OutputFormat::Json && output.tables.len() > 1 {
        let map: serde_json::Map<String, serde_json::Value> = output
            .tables
            .iter()
            .map(|t| (t.tag.clone(), serde_json::to_value(&t.rows).expect("rows serialize")))
            .collect();
        serde_json::to_writer(&mut out, &map).map_err(|e| Error::Parse(e.to_string()))?;
        out.write_all(b"\n").map_err(io)?;
        return Ok(());
    }
    for (i, table) in output.tables.iter().enumerate() {
        if i > 0 {
            out.write_all(b"\n").map_err(io)?;
        }
        write_table(&table.rows, format, &mut out)?;
    }
    Ok(())
}

/// Exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Domain(_) | Error::Pole(_) | Error::Parse(_) => EXIT_DOMAIN,
        Error::NotConverged { .. } | Error::Consistency(_) => EXIT_NOT_CONVERGED,
        Error::Io { .. } => EXIT_FAILURE,
    }
}

/// Machine-readable error record, one JSON object per line.
pub fn error_record(error: &Error) -> String {
    let mut record = serde_json::json!({
        "error": error.kind(),
        "message": error.to_string(),
        "exit_code": exit_code(error),
    });
    if let Error::NotConverged { cap, residual } = error {
        record["cap"] = (*cap).into();
        record["residual"] = residual.clone().into();
    }
    record.to_string()
}

/// Parses `args`, runs, writes tables to `stdout` and metadata or the error
/// record to `stderr`, and returns the exit status.
pub fn main_with_args<I, T, O, E>(args: I, stdout: O, mut stderr: E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { 0 };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let output = run(&config)?;
        for line in &output.metadata {
            let _ = writeln!(stderr, "# {line}");
        }
        emit_output(&output, &config, stdout)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_record(&e));
            exit_code(&e)
        }
    }
}
