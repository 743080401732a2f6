//! One function per subcommand. Each takes its resolved flags and returns a
//! [`Report`]; nothing here touches files or the process exit code.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use logevo_core::asymptotics::{
    band_ratio, fit_rate, last_decade_variation, CONVERGENCE_VARIATION,
};
use logevo_core::multiplier::symbol_at;
use logevo_core::profile::{RadialTable, DEFAULT_DELTA};
use logevo_core::quadrature::{ip_ratio_curve, jp_ratio_curve, log_space};
use logevo_core::{
    check_pointwise_estimates, energy_density, energy_rate_sweep, integrate, mode_evaluate,
    ode_oracle, profile_error_sweep, verify_sandwich, Complex64, DataFamily, DataPair, Evolver,
    Field, GridSpec, InitialDatum, IntegralKind, IntegralSpec, ModeClosedForm, RateFit, Regime,
    SandwichClaim, SandwichOptions, Space, SweepBackend, SymbolPoint, Tolerance,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{usage, CliError};
use crate::output::{Cell, Report};

type Out = Result<Report, CliError>;

fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn tolerance(rel: Option<f64>, abs: Option<f64>) -> Tolerance {
    let d = Tolerance::default();
    Tolerance::new(rel.unwrap_or(d.rel), abs.unwrap_or(d.abs))
}

fn linear_grid(tmin: f64, tmax: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 || !(tmax >= tmin) || !tmin.is_finite() || !tmax.is_finite() {
        return Err(usage(format!(
            "bad time grid [{tmin}, {tmax}] with {points} points"
        )));
    }
    if points == 1 {
        return Ok(vec![tmin]);
    }
    let h = (tmax - tmin) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                tmax
            } else {
                tmin + h * k as f64
            }
        })
        .collect())
}

fn geometric_grid(tmin: f64, tmax: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 || !(tmin > 0.0) || !(tmax >= tmin) || !tmax.is_finite() {
        return Err(usage(format!(
            "bad log-spaced grid [{tmin}, {tmax}] with {points} points"
        )));
    }
    if points == 1 {
        return Ok(vec![tmin]);
    }
    Ok(log_space(tmin, tmax, points))
}

fn fit_json(f: &RateFit) -> Value {
    json!({
        "exponent": f.exponent,
        "amplitude": f.amplitude,
        "r_squared": f.r_squared,
        "window": [f.window.0, f.window.1],
        "n_points": f.n_points,
    })
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Complex => "complex",
        Regime::Degenerate => "degenerate",
        Regime::Real => "real",
    }
}

fn point_from(sigma: Option<f64>, r: Option<f64>) -> Result<SymbolPoint, CliError> {
    match (sigma, r) {
        (Some(s), None) => Ok(SymbolPoint::from_sigma(s)?),
        (None, Some(r)) => Ok(symbol_at(r)?),
        _ => Err(usage("give exactly one of --sigma and --r")),
    }
}

// ---------------------------------------------------------------- roots

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct RootsArgs {
    /// Symbol value σ = log(1 + r²).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Frequency magnitude |ξ|.
    #[arg(long)]
    pub r: Option<f64>,
}

pub const ROOTS_COLUMNS: &[&str] = &[
    "r",
    "sigma",
    "rho",
    "regime",
    "lambda_plus_re",
    "lambda_plus_im",
    "lambda_minus_re",
    "lambda_minus_im",
    "a",
    "b",
];

pub fn roots(args: RootsArgs) -> Out {
    let p = point_from(args.sigma, args.r)?;
    let roots = p.roots();
    let mut rep = Report::new("roots", echo(&args), ROOTS_COLUMNS);
    rep.push(vec![
        p.r.into(),
        p.sigma.into(),
        p.rho.into(),
        regime_name(p.regime).into(),
        roots.lambda_plus.re.into(),
        roots.lambda_plus.im.into(),
        roots.lambda_minus.re.into(),
        roots.lambda_minus.im.into(),
        roots.a.into(),
        roots.b.into(),
    ]);
    let text = if p.regime == Regime::Degenerate {
        format!("lambda = {} (double)", roots.lambda_plus.re)
    } else if p.regime == Regime::Complex {
        format!("lambda = {} +/- {}i", roots.lambda_plus.re, roots.b)
    } else {
        format!(
            "lambda = {}, {}",
            roots.lambda_plus.re, roots.lambda_minus.re
        )
    };
    rep.summary = json!({
        "regime": regime_name(p.regime),
        "double_root": p.regime == Regime::Degenerate,
        "lambda_plus": [roots.lambda_plus.re, roots.lambda_plus.im],
        "lambda_minus": [roots.lambda_minus.re, roots.lambda_minus.im],
        "text": text,
    });
    Ok(rep)
}

// ----------------------------------------------------------------- mode

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct ModeArgs {
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Re û₀ (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u0_im: Option<f64>,
    /// Re û₁ (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub u1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u1_im: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Linearly spaced output times.
    #[arg(long)]
    pub points: Option<usize>,
    /// RK4 step of the reference integrator.
    #[arg(long)]
    pub oracle_dt: Option<f64>,
}

pub const MODE_COLUMNS: &[&str] = &[
    "t",
    "u_re",
    "u_im",
    "ut_re",
    "ut_im",
    "e0",
    "e",
    "oracle_err",
];

/// Closed-form and integrated modes must agree to this mixed tolerance.
pub const ORACLE_TOL: f64 = 1e-8;

pub fn mode(mut args: ModeArgs) -> Out {
    let p = point_from(args.sigma, args.r)?;
    args.u0 = Some(args.u0.unwrap_or(0.0));
    args.u0_im = Some(args.u0_im.unwrap_or(0.0));
    args.u1 = Some(args.u1.unwrap_or(1.0));
    args.u1_im = Some(args.u1_im.unwrap_or(0.0));
    args.tmin = Some(args.tmin.unwrap_or(0.0));
    args.tmax = Some(args.tmax.unwrap_or(10.0));
    args.points = Some(args.points.unwrap_or(101));
    args.oracle_dt = Some(args.oracle_dt.unwrap_or(1e-3));
    let u0 = Complex64::new(args.u0.unwrap(), args.u0_im.unwrap());
    let u1 = Complex64::new(args.u1.unwrap(), args.u1_im.unwrap());
    let dt = args.oracle_dt.unwrap();
    let times = linear_grid(args.tmin.unwrap(), args.tmax.unwrap(), args.points.unwrap())?;
    if times[0] < 0.0 {
        return Err(usage("times must be nonnegative"));
    }
    let m = ModeClosedForm::new(p, u0, u1);
    let rows: Vec<(f64, Complex64, Complex64, f64, f64, f64)> = times
        .par_iter()
        .map(|&t| {
            let (u, v) = mode_evaluate(&m, t)?;
            let d = energy_density(&m, t)?;
            let o = ode_oracle(&p, u0, u1, t, dt)?;
            Ok((t, u, v, d.e0, d.e, (u - o).norm() / (1.0 + u.norm())))
        })
        .collect::<logevo_core::Result<_>>()?;
    let mut rep = Report::new("mode", echo(&args), MODE_COLUMNS);
    let worst = rows.iter().map(|r| r.5).fold(0.0, f64::max);
    for (t, u, v, e0, e, err) in rows {
        rep.push(vec![
            t.into(),
            u.re.into(),
            u.im.into(),
            v.re.into(),
            v.im.into(),
            e0.into(),
            e.into(),
            err.into(),
        ]);
    }
    rep.pass = Some(worst <= ORACLE_TOL);
    rep.summary = json!({
        "sigma": p.sigma,
        "regime": regime_name(p.regime),
        "max_oracle_err": worst,
        "oracle_tol": ORACLE_TOL,
    });
    Ok(rep)
}

// ------------------------------------------------------------- integral

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum KindArg {
    #[value(name = "Ip")]
    #[serde(rename = "Ip")]
    Ip,
    #[value(name = "Jp")]
    #[serde(rename = "Jp")]
    Jp,
    #[value(name = "Middle")]
    #[serde(rename = "Middle")]
    Middle,
    #[value(name = "ScriptI")]
    #[serde(rename = "ScriptI")]
    ScriptI,
    #[value(name = "CosOverY")]
    #[serde(rename = "CosOverY")]
    CosOverY,
}

impl From<KindArg> for IntegralKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ip => IntegralKind::Ip,
            KindArg::Jp => IntegralKind::Jp,
            KindArg::Middle => IntegralKind::Middle,
            KindArg::ScriptI => IntegralKind::ScriptI,
            KindArg::CosOverY => IntegralKind::CosOverY,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct IntegralArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Exponent p, or the dimension n for ScriptI.
    #[arg(long, visible_alias = "n", allow_hyphen_values = true)]
    #[serde(alias = "n")]
    pub p: Option<f64>,
    /// Single time; otherwise a log-spaced sweep over [tmin, tmax].
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Lower limit for Middle (default 0.5).
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

pub const INTEGRAL_COLUMNS: &[&str] = &[
    "kind",
    "p_or_n",
    "t",
    "value",
    "error_estimate",
    "nodes",
    "converged",
];

pub fn integral(mut args: IntegralArgs) -> Out {
    let kind: IntegralKind = args.kind.ok_or_else(|| usage("--kind is required"))?.into();
    let p = match (kind, args.p) {
        (IntegralKind::CosOverY, p) => p.unwrap_or(0.0),
        (_, Some(p)) => p,
        (_, None) => return Err(usage("--p is required for this kind")),
    };
    args.p = Some(p);
    args.eta = Some(args.eta.unwrap_or(0.5));
    let tol = tolerance(args.rel_tol, args.abs_tol);
    args.rel_tol = Some(tol.rel);
    args.abs_tol = Some(tol.abs);
    let times = match (args.t, args.tmin, args.tmax) {
        (Some(t), None, None) => vec![t],
        (None, Some(lo), Some(hi)) => {
            args.points = Some(args.points.unwrap_or(13));
            geometric_grid(lo, hi, args.points.unwrap())?
        }
        _ => return Err(usage("give either --t or both --tmin and --tmax")),
    };
    let specs: Vec<IntegralSpec> = times
        .iter()
        .map(|&t| {
            IntegralSpec::new(kind, p, t)
                .with_eta(args.eta.unwrap())
                .with_tolerance(tol.rel, tol.abs)
        })
        .collect();
    for s in &specs {
        s.validate()?;
    }
    let results = specs
        .par_iter()
        .map(integrate)
        .collect::<logevo_core::Result<Vec<_>>>()?;
    let mut rep = Report::new("integral", echo(&args), INTEGRAL_COLUMNS);
    for (s, r) in specs.iter().zip(&results) {
        if !r.converged {
            rep.warn(format!(
                "no convergence at t = {}: estimate {} +/- {}",
                s.t, r.value, r.abs_error_estimate
            ));
        }
        rep.push(vec![
            kind.to_string().into(),
            p.into(),
            s.t.into(),
            r.value.into(),
            r.abs_error_estimate.into(),
            r.nodes_used.into(),
            r.converged.into(),
        ]);
    }
    let all = results.iter().all(|r| r.converged);
    rep.pass = Some(all);
    rep.summary = json!({ "kind": kind.to_string(), "all_converged": all });
    Ok(rep)
}

// ---------------------------------------------------------------- ratio

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct RatioArgs {
    /// Ip or Jp.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

pub const RATIO_COLUMNS: &[&str] = &["kind", "p", "t", "ratio"];

pub fn ratio(mut args: RatioArgs) -> Out {
    let kind = args.kind.ok_or_else(|| usage("--kind is required"))?;
    let p = args.p.ok_or_else(|| usage("--p is required"))?;
    let (lo, hi) = match kind {
        KindArg::Ip => (1e2, 1e5),
        KindArg::Jp => (10.0, 1e4),
        _ => return Err(usage("ratio curves exist for Ip and Jp only")),
    };
    args.tmin = Some(args.tmin.unwrap_or(lo));
    args.tmax = Some(args.tmax.unwrap_or(hi));
    args.points = Some(args.points.unwrap_or(13));
    let tol = tolerance(args.rel_tol, args.abs_tol);
    args.rel_tol = Some(tol.rel);
    args.abs_tol = Some(tol.abs);
    let grid = geometric_grid(args.tmin.unwrap(), args.tmax.unwrap(), args.points.unwrap())?;
    let curve = if kind == KindArg::Ip {
        ip_ratio_curve(p, &grid, &tol)?
    } else {
        jp_ratio_curve(p, &grid, &tol)?
    };
    let mut rep = Report::new("ratio", echo(&args), RATIO_COLUMNS);
    let name = IntegralKind::from(kind).to_string();
    for &(t, v) in &curve {
        rep.push(vec![name.as_str().into(), p.into(), t.into(), v.into()]);
    }
    let variation = last_decade_variation(&curve)?;
    rep.pass = Some(variation < CONVERGENCE_VARIATION);
    rep.summary = json!({
        "last_decade_variation": variation,
        "threshold": CONVERGENCE_VARIATION,
        "limit_estimate": curve.last().map(|c| c.1),
    });
    Ok(rep)
}

// ------------------------------------------------------------- sandwich

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ClaimArg {
    P51,
    P61,
    P62,
    L21,
    L22,
}

impl From<ClaimArg> for SandwichClaim {
    fn from(c: ClaimArg) -> Self {
        match c {
            ClaimArg::P51 => SandwichClaim::P51,
            ClaimArg::P61 => SandwichClaim::P61,
            ClaimArg::P62 => SandwichClaim::P62,
            ClaimArg::L21 => SandwichClaim::L21,
            ClaimArg::L22 => SandwichClaim::L22,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct SandwichArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub claim: Option<ClaimArg>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Dimension for P51 (default 3).
    #[arg(long)]
    pub n: Option<u32>,
    /// Exponent for L21/L22 (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

pub const SANDWICH_COLUMNS: &[&str] =
    &["claim", "t", "raw", "compensated", "lower", "upper", "pass"];

/// Exponent of the rate that the claim compensates by, when it is a power.
fn claimed_exponent(claim: SandwichClaim, n: u32, p: f64) -> Option<f64> {
    match claim {
        SandwichClaim::P51 => Some(-0.5 * (f64::from(n) - 2.0)),
        SandwichClaim::P61 => Some(1.0),
        SandwichClaim::L21 => Some(-0.5 * (p + 1.0)),
        SandwichClaim::P62 | SandwichClaim::L22 => None,
    }
}

pub fn sandwich(mut args: SandwichArgs) -> Out {
    let claim: SandwichClaim = args
        .claim
        .ok_or_else(|| usage("--claim is required"))?
        .into();
    let (lo, hi, pts) = match claim {
        SandwichClaim::P61 | SandwichClaim::P62 => (1e3, 1e5, 9),
        SandwichClaim::P51 | SandwichClaim::L21 => (1e2, 1e4, 13),
        SandwichClaim::L22 => (10.0, 1e4, 13),
    };
    args.tmin = Some(args.tmin.unwrap_or(lo));
    args.tmax = Some(args.tmax.unwrap_or(hi));
    args.points = Some(args.points.unwrap_or(pts));
    args.n = Some(args.n.unwrap_or(3));
    args.p = Some(args.p.unwrap_or(1.0));
    let tol = tolerance(args.rel_tol, args.abs_tol);
    args.rel_tol = Some(tol.rel);
    args.abs_tol = Some(tol.abs);
    let grid = geometric_grid(args.tmin.unwrap(), args.tmax.unwrap(), args.points.unwrap())?;
    let opts = SandwichOptions {
        n: args.n.unwrap(),
        p: args.p.unwrap(),
        tol,
    };
    let r = verify_sandwich(claim, &grid, &opts)?;
    let mut rep = Report::new("sandwich", echo(&args), SANDWICH_COLUMNS);
    for row in &r.rows {
        rep.push(vec![
            row.claim.to_string().into(),
            row.t.into(),
            row.raw.into(),
            row.compensated.into(),
            row.lower.into(),
            row.upper.into(),
            row.pass.into(),
        ]);
    }
    let raw: Vec<(f64, f64)> = r.rows.iter().map(|row| (row.t, row.raw)).collect();
    let fit = if raw.len() >= 3 {
        fit_rate(&raw, (f64::NEG_INFINITY, f64::INFINITY)).ok()
    } else {
        None
    };
    rep.pass = Some(r.pass);
    rep.summary = json!({
        "claim": claim.to_string(),
        "lower_coef": r.lower_coef,
        "upper_coef": r.upper_coef,
        "empirical_min": r.empirical_min,
        "empirical_max": r.empirical_max,
        "last_decade_variation": r.last_decade_variation,
        "raw_fit": fit.as_ref().map(fit_json),
        "claimed_exponent": claimed_exponent(claim, opts.n, opts.p),
    });
    Ok(rep)
}

// -------------------------------------------------------- profile-error

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Gaussian,
    Ball,
    Tabulated,
}

impl From<FamilyArg> for DataFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => DataFamily::Gaussian,
            FamilyArg::Ball => DataFamily::BallIndicator,
            FamilyArg::Tabulated => DataFamily::Tabulated,
        }
    }
}

/// Reads `r,value` rows. Lines starting with `#` and a non-numeric header
/// row are skipped.
pub fn read_table(path: &PathBuf) -> Result<RadialTable, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(format!("cannot read table {}: {e}", path.display())))?;
    let (mut r, mut v) = (Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| usage(format!("table {}: {e}", path.display())))?;
        let parsed: Option<(f64, f64)> = match (rec.get(0), rec.get(1)) {
            (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                r.push(a);
                v.push(b);
            }
            None if k == 0 => {}
            None => {
                return Err(usage(format!(
                    "table {}: bad row {}",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    Ok(RadialTable::new(r, v)?)
}

fn datum(
    family: FamilyArg,
    amplitude: f64,
    width: f64,
    n: u32,
    table: Option<&PathBuf>,
) -> Result<InitialDatum, CliError> {
    match family {
        FamilyArg::Tabulated => {
            let path = table.ok_or_else(|| usage("--family tabulated needs --table"))?;
            Ok(InitialDatum::tabulated(read_table(path)?, amplitude, n)?)
        }
        f => Ok(InitialDatum::new(f.into(), amplitude, width, n)?),
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct ProfileErrorArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// CSV of `r,value` samples of û₁ for the tabulated family.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Frequency split between the low and high parts.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

pub const PROFILE_ERROR_COLUMNS: &[&str] = &[
    "family",
    "n",
    "t",
    "delta",
    "low_err_sq",
    "high_err_sq",
    "total_err",
    "i0",
    "p1",
];

/// Slack on the fitted profile-error slope.
pub const SLOPE_SLACK: f64 = 0.05;

pub fn profile_error(mut args: ProfileErrorArgs) -> Out {
    let family = *args.family.get_or_insert(FamilyArg::Gaussian);
    let amplitude = *args.amplitude.get_or_insert(1.0);
    let width = *args.width.get_or_insert(1.0);
    let n = *args.n.get_or_insert(1);
    let grid = geometric_grid(
        *args.tmin.get_or_insert(10.0),
        *args.tmax.get_or_insert(160.0),
        *args.points.get_or_insert(5),
    )?;
    let delta = *args.delta.get_or_insert(DEFAULT_DELTA);
    let tol = tolerance(args.rel_tol, args.abs_tol);
    args.rel_tol = Some(tol.rel);
    args.abs_tol = Some(tol.abs);
    let d = datum(family, amplitude, width, n, args.table.as_ref())?;
    let mut rep = Report::new("profile-error", echo(&args), PROFILE_ERROR_COLUMNS);
    let (reports, fit) = if grid.len() >= 3 {
        let (r, f) = profile_error_sweep(&d, &grid, delta, &tol)?;
        (r, Some(f))
    } else {
        let r = grid
            .iter()
            .map(|&t| logevo_core::profile::profile_error_with(&d, t, delta, &tol))
            .collect::<logevo_core::Result<Vec<_>>>()?;
        (r, None)
    };
    for r in &reports {
        if !r.converged {
            rep.warn(format!("profile error at t = {} did not converge", r.t));
        }
        rep.push(vec![
            r.family.to_string().into(),
            r.n.into(),
            r.t.into(),
            r.delta.into(),
            r.low_freq_error_sq.into(),
            r.high_freq_error_sq.into(),
            r.total_error().into(),
            r.i0.into(),
            r.p1.into(),
        ]);
    }
    let claimed = -f64::from(n) / 4.0;
    rep.pass =
        fit.map(|f| f.exponent <= claimed + SLOPE_SLACK && reports.iter().all(|r| r.converged));
    rep.summary = json!({
        "fit": fit.as_ref().map(fit_json),
        "claimed_exponent": claimed,
        "slack": SLOPE_SLACK,
        "norm": "frequency side; multiply squares by (2 pi)^-n for physical norms",
    });
    Ok(rep)
}

// ---------------------------------------------------------------- solve

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: Option<u32>,
    /// Gaussian or ball; the datum is u₁, with u₀ a multiple of it.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    /// u₀ = this amplitude times the same profile (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub u0_amplitude: Option<f64>,
    /// Box half-length L of [−L, L)ⁿ.
    #[arg(long)]
    pub half_length: Option<f64>,
    /// Grid points per axis, a power of two.
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Output times are k·tmax/steps, k = 0..=steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Left end of the energy fit window.
    #[arg(long)]
    pub fit_from: Option<f64>,
}

pub const SOLVE_COLUMNS: &[&str] = &["t", "l2_u", "energy", "linf_u"];

fn default_grid_points(n: u32) -> usize {
    match n {
        1 => 4096,
        2 => 512,
        _ => 128,
    }
}

fn data_pair(
    family: FamilyArg,
    amplitude: f64,
    width: f64,
    u0_amplitude: f64,
    n: u32,
) -> Result<DataPair, CliError> {
    if family == FamilyArg::Tabulated {
        return Err(usage(
            "tabulated data are frequency-side only; use gaussian or ball",
        ));
    }
    let u1 = datum(family, amplitude, width, n, None)?;
    let u0 = if u0_amplitude != 0.0 {
        Some(datum(family, u0_amplitude, width, n, None)?)
    } else {
        None
    };
    Ok(DataPair::new(u0, u1)?)
}

/// Energy may not grow between consecutive outputs beyond rounding.
fn energy_monotone(energy: &[f64]) -> bool {
    energy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10))
}

pub fn solve(mut args: SolveArgs) -> Out {
    let n = *args.n.get_or_insert(1);
    let family = *args.family.get_or_insert(FamilyArg::Gaussian);
    let amplitude = *args.amplitude.get_or_insert(1.0);
    let width = *args.width.get_or_insert(1.0);
    let u0_amp = *args.u0_amplitude.get_or_insert(0.0);
    let half_length = *args.half_length.get_or_insert(80.0);
    let points = *args.grid_points.get_or_insert(default_grid_points(n));
    let tmax = *args.tmax.get_or_insert(50.0);
    let steps = *args.steps.get_or_insert(100);
    let fit_from = *args.fit_from.get_or_insert(5.0);
    if steps == 0 || !(tmax > 0.0) {
        return Err(usage("need tmax > 0 and steps >= 1"));
    }
    let pair = data_pair(family, amplitude, width, u0_amp, n)?;
    let grid = GridSpec::new(n, half_length, points)?;
    let u1 = Field::radial(grid, &pair.u1)?;
    let (u0, support0) = match &pair.u0 {
        Some(d) => (Field::radial(grid, d)?, d.support_radius()?),
        None => (Field::zeros(grid, Space::Physical), 0.0),
    };
    let horizon = grid.trusted_horizon(pair.u1.support_radius()?.max(support0));
    let times = linear_grid(0.0, tmax, steps + 1)?;
    let snaps = Evolver::new(&u0, &u1)?.series(&times)?;
    let mut rep = Report::new("solve", echo(&args), SOLVE_COLUMNS);
    let beyond = times.iter().filter(|&&t| t > horizon).count();
    if beyond > 0 {
        rep.warn(format!(
            "{beyond} output times exceed the trusted horizon {horizon:.6}; periodic images contaminate them"
        ));
    }
    for s in &snaps {
        rep.push(vec![
            s.t.into(),
            s.l2_u.into(),
            s.energy.into(),
            s.linf_u.into(),
        ]);
    }
    let energy: Vec<f64> = snaps.iter().map(|s| s.energy).collect();
    let trusted: Vec<f64> = snaps
        .iter()
        .filter(|s| s.t <= horizon)
        .map(|s| s.energy)
        .collect();
    let monotone = energy_monotone(&trusted);
    let pts: Vec<(f64, f64)> = snaps.iter().map(|s| (s.t, s.energy)).collect();
    let fit = fit_rate(&pts, (fit_from, horizon)).ok();
    rep.pass = Some(monotone);
    rep.summary = json!({
        "trusted_horizon": horizon,
        "energy_nonincreasing": monotone,
        "energy_nonincreasing_all_outputs": energy_monotone(&energy),
        "energy_fit": fit.as_ref().map(fit_json),
        "claimed_energy_exponent": -f64::from(n) / 2.0,
    });
    Ok(rep)
}

// ---------------------------------------------------------------- rates

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Auto,
    Solver,
    Quadrature,
}

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct RatesArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u0_amplitude: Option<f64>,
    /// Where the norms come from (default quadrature).
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long)]
    pub half_length: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// Tolerance on fitted `‖u‖` exponents and slack on the energy exponent.
pub const RATE_TOL: f64 = 0.05;
pub const ENERGY_SLACK: f64 = 0.1;
/// Largest accepted max/min of `‖u‖²/log t` in two dimensions.
pub const LOG_BAND: f64 = 3.0;

pub fn rates(mut args: RatesArgs) -> Out {
    let n = *args.n.get_or_insert(1);
    let family = *args.family.get_or_insert(FamilyArg::Gaussian);
    let amplitude = *args.amplitude.get_or_insert(1.0);
    let width = *args.width.get_or_insert(1.0);
    let u0_amp = *args.u0_amplitude.get_or_insert(0.0);
    let backend_arg = *args.backend.get_or_insert(BackendArg::Quadrature);
    let half_length = *args.half_length.get_or_insert(80.0);
    let grid_points = *args.grid_points.get_or_insert(default_grid_points(n));
    let solver_backend =
        backend_arg == BackendArg::Solver || (backend_arg == BackendArg::Auto && n == 1);
    let (lo, hi, pts) = if solver_backend {
        (5.0, 30.0, 26)
    } else {
        (1e2, 1e5, 13)
    };
    let grid = if solver_backend {
        linear_grid(
            *args.tmin.get_or_insert(lo),
            *args.tmax.get_or_insert(hi),
            *args.points.get_or_insert(pts),
        )?
    } else {
        geometric_grid(
            *args.tmin.get_or_insert(lo),
            *args.tmax.get_or_insert(hi),
            *args.points.get_or_insert(pts),
        )?
    };
    let backend = match backend_arg {
        BackendArg::Auto => SweepBackend::Auto,
        BackendArg::Quadrature => SweepBackend::Quadrature,
        BackendArg::Solver => SweepBackend::Solver {
            half_length,
            points: grid_points,
        },
    };
    let pair = data_pair(family, amplitude, width, u0_amp, n)?;
    let sweep = energy_rate_sweep(&pair, &grid, backend)?;
    let mut rep = Report::new("rates", echo(&args), SOLVE_COLUMNS);
    if let Some(h) = sweep.trusted_horizon {
        let beyond = grid.iter().filter(|&&t| t > h).count();
        if beyond > 0 {
            rep.warn(format!(
                "{beyond} times exceed the trusted horizon {h:.6} and are left out of the fits"
            ));
        }
    }
    for s in &sweep.samples {
        rep.push(vec![
            s.t.into(),
            s.l2_u.into(),
            s.energy.into(),
            Cell::Empty,
        ]);
    }
    let energy_ok = sweep.energy_fit.exponent <= -f64::from(n) / 2.0 + ENERGY_SLACK;
    let (l2_claim, l2_ok, band) = match n {
        2 => {
            let comp: Vec<f64> = sweep
                .samples
                .iter()
                .filter(|s| s.t > 1.0)
                .map(|s| s.l2_u * s.l2_u / s.t.ln())
                .collect();
            let b = band_ratio(&comp);
            (None, b <= LOG_BAND, Some(b))
        }
        _ => {
            let c = if n == 1 {
                0.5
            } else {
                -(f64::from(n) - 2.0) / 4.0
            };
            (Some(c), (sweep.l2_fit.exponent - c).abs() <= RATE_TOL, None)
        }
    };
    rep.pass = Some(energy_ok && l2_ok);
    rep.summary = json!({
        "backend": match sweep.backend {
            SweepBackend::Solver { .. } => "solver",
            _ => "quadrature",
        },
        "trusted_horizon": sweep.trusted_horizon,
        "energy_fit": fit_json(&sweep.energy_fit),
        "l2_fit": fit_json(&sweep.l2_fit),
        "claimed_energy_exponent": -f64::from(n) / 2.0,
        "claimed_l2_exponent": l2_claim,
        "l2_sq_over_log_band": band,
        "energy_pass": energy_ok,
        "l2_pass": l2_ok,
    });
    Ok(rep)
}

// ----------------------------------------------------- verify-pointwise

#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct PointwiseArgs {
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    pub sigma_points: Option<usize>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    /// Random closed-form vs RK4 comparisons (0 to skip).
    #[arg(long)]
    pub oracle_cases: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub const POINTWISE_COLUMNS: &[&str] = &[
    "sigma", "t", "u0", "u1", "lhs6", "rhs6", "lhs7", "rhs7", "pass",
];

/// Worst mixed error of `cases` random closed-form vs RK4 comparisons;
/// every fourth σ is drawn near the double root.
pub fn oracle_sweep(cases: usize, seed: u64) -> Result<f64, CliError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let draws: Vec<(f64, Complex64, Complex64, f64)> = (0..cases)
        .map(|k| {
            let sigma = if k % 4 == 0 {
                rng.random_range(3.9..4.1)
            } else {
                rng.random_range(0.0..50.0)
            };
            let u0 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let u1 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (sigma, u0, u1, rng.random_range(0.0..10.0))
        })
        .collect();
    let errs = draws
        .par_iter()
        .map(|&(sigma, u0, u1, t)| {
            let p = SymbolPoint::from_sigma(sigma)?;
            let (u, _) = mode_evaluate(&ModeClosedForm::new(p, u0, u1), t)?;
            let o = ode_oracle(&p, u0, u1, t, 1e-3)?;
            Ok((u - o).norm() / (1.0 + u.norm()))
        })
        .collect::<logevo_core::Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

pub fn verify_pointwise(mut args: PointwiseArgs) -> Out {
    let sigmas = geometric_grid(
        *args.sigma_min.get_or_insert(1e-2),
        *args.sigma_max.get_or_insert(1e2),
        *args.sigma_points.get_or_insert(40),
    )?;
    let times = linear_grid(
        *args.tmin.get_or_insert(0.1),
        *args.tmax.get_or_insert(50.0),
        *args.t_points.get_or_insert(40),
    )?;
    let cases = *args.oracle_cases.get_or_insert(200);
    let seed = *args.seed.get_or_insert(1);
    let data = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let mut rep = Report::new("verify-pointwise", echo(&args), POINTWISE_COLUMNS);
    let mut violations = 0usize;
    for &s in &sigmas {
        for &(u0, u1) in &data {
            let m = ModeClosedForm::with_sigma(s, u0, u1)?;
            for &t in &times {
                let c = check_pointwise_estimates(&m, t)?;
                violations += usize::from(!c.pass);
                rep.push(vec![
                    s.into(),
                    t.into(),
                    u0.into(),
                    u1.into(),
                    c.lhs6.into(),
                    c.rhs6.into(),
                    c.lhs7.into(),
                    c.rhs7.into(),
                    c.pass.into(),
                ]);
            }
        }
    }
    let worst = if cases > 0 {
        Some(oracle_sweep(cases, seed)?)
    } else {
        None
    };
    let oracle_ok = worst.is_none_or(|w| w <= ORACLE_TOL);
    rep.pass = Some(violations == 0 && oracle_ok);
    rep.summary = json!({
        "cases": rep.rows.len(),
        "violations": violations,
        "oracle_cases": cases,
        "oracle_max_err": worst,
        "oracle_tol": ORACLE_TOL,
    });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_their_endpoints() {
        let g = linear_grid(0.0, 50.0, 101).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 50.0);
        assert_eq!(g[1], 0.5);
        assert!(linear_grid(1.0, 0.0, 3).is_err());
        assert!(geometric_grid(0.0, 1.0, 3).is_err());
        assert_eq!(geometric_grid(5.0, 9.0, 1).unwrap(), vec![5.0]);
    }

    #[test]
    fn roots_needs_one_coordinate() {
        assert!(roots(RootsArgs::default()).is_err());
        assert!(roots(RootsArgs {
            sigma: Some(1.0),
            r: Some(1.0)
        })
        .is_err());
        let rep = roots(RootsArgs {
            sigma: Some(4.0),
            r: None,
        })
        .unwrap();
        assert_eq!(rep.summary["double_root"], json!(true));
        assert_eq!(rep.rows[0][4], Cell::Real(-2.0));
    }

    #[test]
    fn energy_monotonicity_tolerates_rounding_only() {
        assert!(energy_monotone(&[3.0, 2.0, 2.0 * (1.0 + 1e-12)]));
        assert!(!energy_monotone(&[3.0, 2.0, 2.1]));
    }
}
