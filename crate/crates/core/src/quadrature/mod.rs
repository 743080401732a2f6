//! Radial integrals of the logarithmic symbol.
//!
//! * `I_p(t) = ∫₀¹ (1+r²)^{−t} r^p dr` and `J_p(t) = ∫₁^∞ (1+r²)^{−t} r^p dr`,
//! * the middle-frequency piece `∫_η¹ (1+r²)^{−t} r^p dr`,
//! * `ℐ_n(t) = ∫_{Rⁿ} (1+|ξ|²)^{−t} sin²(t√σ)/σ dξ`, computed as
//!   `ω_n ∫₀^∞ g(r) r^{n−1} dr`,
//! * the cosine integral `∫₂^{2√t} cos(y)/y dy`.
//!
//! Powers `(1+r²)^{−t}` are always formed as `exp(−t·log1p(r²))`. Integrals
//! that decay or grow exponentially in `t` have "compensated" variants which
//! integrate the rescaled integrand directly, so their values stay O(1) for
//! any `t`.

mod gauss_kronrod;

use std::f64::consts::{FRAC_PI_2, LN_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use gauss_kronrod::{gk15, integrate_interval, integrate_panels, QuadratureResult, Tolerance};

use crate::error::{domain, Error, Result};
use crate::multiplier::{radius_of, sigma_of};
use crate::special::{sinc, sphere_area};

/// Decay exponent `t·σ` beyond which `e^{−tσ}` is treated as negligible when
/// placing oscillation breakpoints.
pub(crate) const ENVELOPE_EXPONENT: f64 = 60.0;

/// Which radial integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegralKind {
    Ip,
    Jp,
    Middle,
    ScriptI,
    CosOverY,
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IntegralKind::Ip => "Ip",
            IntegralKind::Jp => "Jp",
            IntegralKind::Middle => "Middle",
            IntegralKind::ScriptI => "ScriptI",
            IntegralKind::CosOverY => "CosOverY",
        };
        f.write_str(name)
    }
}

impl FromStr for IntegralKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ip" | "ip" => Ok(IntegralKind::Ip),
            "Jp" | "jp" => Ok(IntegralKind::Jp),
            "Middle" | "middle" => Ok(IntegralKind::Middle),
            "ScriptI" | "ScriptI_n" | "scripti" | "In" => Ok(IntegralKind::ScriptI),
            "CosOverY" | "cosovery" | "cos" => Ok(IntegralKind::CosOverY),
            other => Err(domain(format!("unknown integral kind {other:?}"))),
        }
    }
}

/// A request for one radial integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralSpec {
    pub kind: IntegralKind,
    /// `p` for `Ip`, `Jp`, `Middle`; the dimension `n` for `ScriptI`.
    pub p_or_n: f64,
    pub t: f64,
    /// Lower limit of the middle-frequency integral, in `(0, 1]`.
    pub eta: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl IntegralSpec {
    pub fn new(kind: IntegralKind, p_or_n: f64, t: f64) -> IntegralSpec {
        let tol = Tolerance::default();
        IntegralSpec {
            kind,
            p_or_n,
            t,
            eta: 1.0,
            rel_tol: tol.rel,
            abs_tol: tol.abs,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> IntegralSpec {
        self.eta = eta;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64, abs_tol: f64) -> IntegralSpec {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.t;
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain(format!("t must be positive and finite, got {t}")));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        let p = self.p_or_n;
        if !p.is_finite() {
            return Err(domain("p/n must be finite"));
        }
        match self.kind {
            IntegralKind::Ip => check_ip(p),
            IntegralKind::Jp => check_jp(p, t),
            IntegralKind::Middle => check_eta(self.eta),
            IntegralKind::ScriptI => dimension(p).and_then(|n| check_script_i(n, t)),
            IntegralKind::CosOverY => {
                if t < 1.0 {
                    Err(domain(format!("cosine integral needs t >= 1, got {t}")))
                } else {
                    Ok(())
                }
            }
        }
    }
}

fn check_ip(p: f64) -> Result<()> {
    if p > -1.0 {
        Ok(())
    } else {
        Err(domain(format!("I_p needs p > -1, got {p}")))
    }
}

fn check_jp(p: f64, t: f64) -> Result<()> {
    if 2.0 * t - p - 1.0 > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "J_p diverges unless 2t > p + 1 (p = {p}, t = {t})"
        )))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("eta must lie in (0, 1], got {eta}")))
    }
}

fn check_script_i(n: u32, t: f64) -> Result<()> {
    if 2.0 * t > f64::from(n) {
        Ok(())
    } else {
        Err(domain(format!(
            "the n = {n} integral diverges unless t > n/2, got t = {t}"
        )))
    }
}

fn dimension(p: f64) -> Result<u32> {
    if p >= 1.0 && p.fract() == 0.0 && p <= 64.0 {
        Ok(p as u32)
    } else {
        Err(domain(format!(
            "dimension must be an integer >= 1, got {p}"
        )))
    }
}

/// Evaluates the integral described by `spec`.
pub fn integrate(spec: &IntegralSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let tol = spec.tolerance();
    let (p, t) = (spec.p_or_n, spec.t);
    match spec.kind {
        IntegralKind::Ip => ip(p, t, &tol),
        IntegralKind::Jp => jp(p, t, &tol),
        IntegralKind::Middle => middle(p, spec.eta, t, &tol),
        IntegralKind::ScriptI => script_i(dimension(p)?, t, &tol),
        IntegralKind::CosOverY => cos_over_y(t, &tol),
    }
}

// ---------------------------------------------------------------------------
// breakpoints and tails

/// Breakpoints on `[lo, hi]`: one at every quarter period of `sin(t√σ(r))`
/// while `σ < sigma_osc`, then a doubling sequence up to `hi`.
pub(crate) fn oscillation_breaks(
    t: f64,
    lo: f64,
    hi: f64,
    sigma_osc: f64,
    max_panels: usize,
) -> Vec<f64> {
    let mut out = vec![lo];
    let r_osc = radius_of(sigma_osc).min(hi);
    let first = (t * sigma_of(lo).sqrt() / FRAC_PI_2).floor() + 1.0;
    let mut k = first;
    while out.len() < max_panels {
        let r = radius_of((k * FRAC_PI_2 / t).powi(2));
        if !(r < r_osc) {
            break;
        }
        if r > lo {
            out.push(r);
        }
        k += 1.0;
    }
    let mut x = *out.last().unwrap_or(&lo);
    if x <= 0.0 {
        x = r_osc.max(hi * 2f64.powi(-50)).min(hi);
        if x > lo && x < hi {
            out.push(x);
        }
    }
    while 2.0 * x < hi {
        x *= 2.0;
        out.push(x);
    }
    if hi > *out.last().unwrap_or(&lo) {
        out.push(hi);
    }
    out
}

/// `anchor, anchor + first, anchor + 2·first, anchor + 4·first, …, end`.
fn doubling_breaks(anchor: f64, first: f64, end: f64) -> Vec<f64> {
    let mut out = vec![anchor];
    let mut offset = first;
    while anchor + offset < end {
        out.push(anchor + offset);
        offset *= 2.0;
    }
    out.push(end);
    out
}

/// Cutoff `R ≥ r_min` for tails dominated by
/// `w·(1+r²)^{−t} r^q [/ σ(r)]`, using
/// `∫_R^∞ (1+r²)^{−t} r^q dr ≤ R^{q+1−2t}/(2t−q−1)` (and `1/σ` decreasing).
///
/// Returns `(R, bound on the discarded tail)`; requires `2t > q + 1`.
pub(crate) fn tail_cutoff(
    t: f64,
    q: f64,
    ln_weight: f64,
    over_sigma: bool,
    eps: f64,
    r_min: f64,
) -> (f64, f64) {
    let slope = q + 1.0 - 2.0 * t;
    let denom = (-slope).ln();
    let bound_ln = |ln_r: f64| {
        let base = ln_weight + slope * ln_r - denom;
        if over_sigma {
            base - sigma_of(ln_r.exp()).ln()
        } else {
            base
        }
    };
    let target = eps.ln();
    let lo_start = r_min.ln();
    if bound_ln(lo_start) <= target {
        return (r_min, bound_ln(lo_start).exp());
    }
    let ceiling = 700.0;
    if bound_ln(ceiling) > target {
        return (ceiling.exp(), bound_ln(ceiling).exp());
    }
    let (mut lo, mut hi) = (lo_start, ceiling);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound_ln(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    (hi.exp(), bound_ln(hi).exp())
}

fn with_tail(mut result: QuadratureResult, tail: f64, tol: &Tolerance) -> QuadratureResult {
    result.abs_error_estimate += tail;
    result.converged = result.converged && result.abs_error_estimate <= tol.target(result.value);
    result
}

fn max_panels(tol: &Tolerance) -> usize {
    (tol.max_nodes / 30).max(2)
}

/// `min(abs·scale, cap)`: tolerance on a rescaled integral that keeps the
/// unscaled error within `abs`.
fn scaled_abs(abs: f64, scale: f64, cap: f64) -> f64 {
    let s = abs * scale;
    if s.is_finite() {
        s.min(cap)
    } else {
        cap
    }
}

// ---------------------------------------------------------------------------
// low-frequency template integral I_p

/// `t^{(p+1)/2} I_p(t)`, integrated in the variable `y = r√t`.
pub fn ip_compensated(p: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    check_ip(p)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    let y_max = t.sqrt();
    let mut y_breaks = vec![0.0];
    let mut y = 2f64.powi(-12).min(0.5 * y_max);
    while y < y_max {
        y_breaks.push(y);
        y *= 2.0;
    }
    y_breaks.push(y_max);
    let weight = move |y: f64| (-t * (y * y / t).ln_1p()).exp();
    let result = if p < 0.0 {
        // y = s^{1/(p+1)} turns y^p dy into ds/(p+1)
        let q = p + 1.0;
        let s_breaks: Vec<f64> = y_breaks.iter().map(|y| y.powf(q)).collect();
        integrate_panels(move |s: f64| weight(s.powf(1.0 / q)) / q, &s_breaks, tol)
    } else {
        integrate_panels(move |y: f64| weight(y) * y.powf(p), &y_breaks, tol)
    };
    Ok(result)
}

/// `I_p(t) = ∫₀¹ (1+r²)^{−t} r^p dr`, `p > −1`.
pub fn ip(p: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    let scale = t.powf(0.5 * (p + 1.0));
    let inner = Tolerance {
        abs: scaled_abs(tol.abs, scale, f64::INFINITY),
        ..*tol
    };
    Ok(ip_compensated(p, t, &inner)?.scaled(1.0 / scale))
}

// ---------------------------------------------------------------------------
// high-frequency template integral J_p

/// `2^t J_p(t)`.
pub fn jp_scaled(p: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    check_jp(p, t)?;
    let eps = 1e-2 * tol.abs;
    let (r_max, tail) = tail_cutoff(t, p, t * LN_2, false, eps, 10.0);
    let breaks = doubling_breaks(1.0, (1.0 / (16.0 * t)).min(0.25), r_max);
    let result = integrate_panels(
        move |r: f64| (-t * (sigma_of(r) - LN_2)).exp() * r.powf(p),
        &breaks,
        tol,
    );
    Ok(with_tail(result, tail, tol))
}

/// `J_p(t) = ∫₁^∞ (1+r²)^{−t} r^p dr`; underflows to 0 for very large `t`.
pub fn jp(p: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    let scale = (t * LN_2).exp();
    let inner = Tolerance {
        abs: scaled_abs(tol.abs, scale, 1e-12),
        ..*tol
    };
    Ok(jp_scaled(p, t, &inner)?.scaled((-t * LN_2).exp()))
}

/// `J_p(t)·(t − 1)·2^t`, for `t > 1`.
pub fn jp_ratio(p: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    if !(t > 1.0) {
        return Err(domain(format!("J_p ratio needs t > 1, got {t}")));
    }
    let inner = Tolerance {
        abs: tol.abs / (t - 1.0),
        ..*tol
    };
    Ok(jp_scaled(p, t, &inner)?.scaled(t - 1.0))
}

// ---------------------------------------------------------------------------
// middle frequencies

/// `(1+η²)^t ∫_η¹ (1+r²)^{−t} r^p dr`.
pub fn middle_compensated(p: f64, eta: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    check_eta(eta)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("t must be nonnegative, got {t}")));
    }
    let sigma_eta = sigma_of(eta);
    let breaks = doubling_breaks(
        eta,
        (1.0 / (16.0 * t.max(1.0)))
            .min(0.25 * (1.0 - eta))
            .max(f64::MIN_POSITIVE),
        1.0,
    );
    Ok(integrate_panels(
        move |r: f64| (-t * (sigma_of(r) - sigma_eta)).exp() * r.powf(p),
        &breaks,
        tol,
    ))
}

/// `∫_η¹ (1+r²)^{−t} r^p dr`.
pub fn middle(p: f64, eta: f64, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    let scale = (t * sigma_of(eta)).exp();
    let inner = Tolerance {
        abs: scaled_abs(tol.abs, scale, 1e-12),
        ..*tol
    };
    Ok(middle_compensated(p, eta, t, &inner)?.scaled(1.0 / scale))
}

// ---------------------------------------------------------------------------
// the profile integral

/// Radial integrand `(1+r²)^{−t} sin²(t√σ)/σ`, equal to `t²` at `r = 0`.
#[inline]
pub fn script_i_kernel(t: f64, r: f64) -> f64 {
    let s = sigma_of(r);
    let x = t * s.sqrt();
    let sc = sinc(x);
    t * t * sc * sc * (-t * s).exp()
}

/// `ℐ_n(t)`, finite for `t > n/2`.
pub fn script_i(n: u32, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    if n == 0 {
        return Err(domain("dimension must be >= 1"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    check_script_i(n, t)?;
    let q = f64::from(n - 1);
    let omega = sphere_area(n);
    let sigma_osc = ENVELOPE_EXPONENT / (t - 0.5 * q);
    let (r_max, tail) = tail_cutoff(
        t,
        q,
        omega.ln(),
        true,
        1e-2 * tol.abs,
        10f64.max(radius_of(sigma_osc.min(700.0))),
    );
    let breaks = oscillation_breaks(t, 0.0, r_max, sigma_osc, max_panels(tol));
    let power = (n - 1) as i32;
    let result = integrate_panels(
        move |r: f64| omega * script_i_kernel(t, r) * r.powi(power),
        &breaks,
        tol,
    );
    Ok(with_tail(result, tail, tol))
}

// ---------------------------------------------------------------------------
// cosine integral

/// `∫₂^{2√t} cos(y)/y dy`, `t ≥ 1`.
pub fn cos_over_y(t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(domain(format!("cosine integral needs t >= 1, got {t}")));
    }
    let upper = 2.0 * t.sqrt();
    let mut breaks = vec![2.0];
    let mut k = (2.0 / FRAC_PI_2).floor() + 1.0;
    while k * FRAC_PI_2 < upper {
        breaks.push(k * FRAC_PI_2);
        k += 1.0;
    }
    breaks.push(upper);
    Ok(integrate_panels(|y: f64| y.cos() / y, &breaks, tol))
}

// ---------------------------------------------------------------------------
// compensated ratio curves

fn check_grid(t_grid: &[f64], min: f64) -> Result<()> {
    if t_grid.is_empty() {
        return Err(domain("empty t grid"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("t grid must be strictly increasing"));
    }
    if t_grid[0] < min {
        return Err(domain(format!(
            "t grid must start at or above {min}, got {}",
            t_grid[0]
        )));
    }
    Ok(())
}

fn require_converged(r: QuadratureResult, what: &str, t: f64) -> Result<f64> {
    if r.converged && r.value.is_finite() {
        Ok(r.value)
    } else {
        Err(Error::Unverifiable {
            what: what.to_string(),
            t,
        })
    }
}

/// `(t, I_p(t)·t^{(p+1)/2})` over `t_grid` (increasing, `min ≥ 10`).
pub fn ip_ratio_curve(p: f64, t_grid: &[f64], tol: &Tolerance) -> Result<Vec<(f64, f64)>> {
    check_ip(p)?;
    check_grid(t_grid, 10.0)?;
    t_grid
        .par_iter()
        .map(|&t| {
            Ok((
                t,
                require_converged(ip_compensated(p, t, tol)?, "I_p ratio", t)?,
            ))
        })
        .collect()
}

/// `(t, J_p(t)·(t−1)·2^t)` over `t_grid` (increasing, `min ≥ 10`).
pub fn jp_ratio_curve(p: f64, t_grid: &[f64], tol: &Tolerance) -> Result<Vec<(f64, f64)>> {
    check_grid(t_grid, 10.0)?;
    t_grid
        .par_iter()
        .map(|&t| Ok((t, require_converged(jp_ratio(p, t, tol)?, "J_p ratio", t)?)))
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
