//! The large-time profile `φ(t,ξ) = P₁ e^{−σt/2} sin(t√σ)/√σ`, the initial
//! data families with closed-form Fourier transforms, and the split
//! frequency-side error `‖û(t) − φ(t)‖²`.
//!
//! Fourier convention: `û(ξ) = ∫ e^{−ix·ξ} u(x) dx`, so
//! `‖u‖²_{L²} = (2π)^{−n} ‖û‖²_{L²}`. All norms reported here are
//! frequency-side; [`plancherel_factor`] converts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::modes::fundamental_at;
use crate::multiplier::{sigma_of, SymbolPoint};
use crate::quadrature::{
    integrate_panels, oscillation_breaks, tail_cutoff, QuadratureResult, Tolerance,
    ENVELOPE_EXPONENT,
};
use crate::special::{bessel_j1, gamma_half, sinc, sphere_area};

/// Default split radius between low and high frequencies.
pub const DEFAULT_DELTA: f64 = 0.2;

/// Frequency radius beyond which tails are no longer pushed out.
const MAX_CUTOFF: f64 = 1e8;

/// Landau's uniform bound `|J₁(x)| ≤ 0.7858·x^{−1/3}`.
const LANDAU_J1: f64 = 0.7858;

/// `(2π)^{−n}`: multiply a frequency-side squared norm by this to get the
/// physical one.
pub fn plancherel_factor(n: u32) -> f64 {
    (2.0 * PI).powi(-(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DataFamily {
    /// `A·exp(−|x|²/w²)`.
    Gaussian,
    /// `A` on the ball of radius `w`, zero outside. Only `n ≤ 3`.
    BallIndicator,
    /// Radial samples of `û₁` itself, linearly interpolated and zero past
    /// the last node.
    Tabulated,
}

impl fmt::Display for DataFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFamily::Gaussian => "gaussian",
            DataFamily::BallIndicator => "ball",
            DataFamily::Tabulated => "tabulated",
        })
    }
}

impl FromStr for DataFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(DataFamily::Gaussian),
            "ball" | "ballindicator" | "ball-indicator" => Ok(DataFamily::BallIndicator),
            "tabulated" => Ok(DataFamily::Tabulated),
            other => Err(domain(format!("unknown data family {other:?}"))),
        }
    }
}

/// Frequency-side radial samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    r: Vec<f64>,
    values: Vec<f64>,
}

impl RadialTable {
    /// `r` must start at 0 and increase strictly.
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<RadialTable> {
        if r.len() < 2 || r.len() != values.len() {
            return Err(domain(
                "table needs at least two (r, value) pairs of equal length",
            ));
        }
        if r[0] != 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("table radii must start at 0 and increase strictly"));
        }
        if values.iter().chain(&r).any(|v| !v.is_finite()) {
            return Err(domain("table entries must be finite"));
        }
        Ok(RadialTable { r, values })
    }

    pub fn last_radius(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.last_radius() {
            return 0.0;
        }
        let k = self
            .r
            .partition_point(|&x| x <= r)
            .clamp(1, self.r.len() - 1);
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let s = (r - r0) / (r1 - r0);
        self.values[k - 1] + s * (self.values[k] - self.values[k - 1])
    }
}

/// A radial, real initial datum.
#[derive(Debug, Clone, Serialize)]
pub struct InitialDatum {
    pub family: DataFamily,
    pub amplitude: f64,
    /// Gaussian width or ball radius; unused for tabulated data.
    pub width: f64,
    pub dim: u32,
    #[serde(skip)]
    table: Option<Arc<RadialTable>>,
}

impl InitialDatum {
    pub fn gaussian(amplitude: f64, width: f64, dim: u32) -> Result<InitialDatum> {
        InitialDatum {
            family: DataFamily::Gaussian,
            amplitude,
            width,
            dim,
            table: None,
        }
        .validated()
    }

    pub fn ball(amplitude: f64, radius: f64, dim: u32) -> Result<InitialDatum> {
        InitialDatum {
            family: DataFamily::BallIndicator,
            amplitude,
            width: radius,
            dim,
            table: None,
        }
        .validated()
    }

    /// `amplitude` multiplies the table values.
    pub fn tabulated(table: RadialTable, amplitude: f64, dim: u32) -> Result<InitialDatum> {
        InitialDatum {
            family: DataFamily::Tabulated,
            amplitude,
            width: 1.0,
            dim,
            table: Some(Arc::new(table)),
        }
        .validated()
    }

    pub fn new(family: DataFamily, amplitude: f64, width: f64, dim: u32) -> Result<InitialDatum> {
        match family {
            DataFamily::Gaussian => InitialDatum::gaussian(amplitude, width, dim),
            DataFamily::BallIndicator => InitialDatum::ball(amplitude, width, dim),
            DataFamily::Tabulated => Err(Error::Unsupported("tabulated data needs a table".into())),
        }
    }

    fn validated(self) -> Result<InitialDatum> {
        if self.dim == 0 {
            return Err(domain("dimension must be >= 1"));
        }
        if !self.amplitude.is_finite() {
            return Err(domain("amplitude must be finite"));
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(domain(format!(
                "width must be positive, got {}",
                self.width
            )));
        }
        if self.family == DataFamily::BallIndicator && self.dim > 3 {
            return Err(Error::Unsupported(format!(
                "ball indicator transform for n = {}",
                self.dim
            )));
        }
        Ok(self)
    }

    /// Same datum with the amplitude multiplied by `c`.
    pub fn scaled(&self, c: f64) -> InitialDatum {
        InitialDatum {
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    /// `û₁(r)`.
    pub fn hat(&self, r: f64) -> f64 {
        let (a, w, n) = (self.amplitude, self.width, self.dim);
        match self.family {
            DataFamily::Gaussian => {
                a * (w * PI.sqrt()).powi(n as i32) * (-0.25 * w * w * r * r).exp()
            }
            DataFamily::BallIndicator => {
                let x = w * r;
                match n {
                    1 => 2.0 * a * w * sinc(x),
                    2 => {
                        if x < 1e-8 {
                            a * PI * w * w
                        } else {
                            2.0 * PI * w * a * bessel_j1(x) / r
                        }
                    }
                    _ => {
                        if x < 1e-2 {
                            let x2 = x * x;
                            4.0 * PI * a * w.powi(3) * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0)
                        } else {
                            4.0 * PI * a * w.powi(3) * (x.sin() - x * x.cos()) / x.powi(3)
                        }
                    }
                }
            }
            DataFamily::Tabulated => a * self.table.as_ref().map_or(0.0, |t| t.eval(r)),
        }
    }

    /// `P₁ = ∫u₁ dx = û₁(0)`.
    pub fn p1(&self) -> f64 {
        self.hat(0.0)
    }

    fn physical_only(&self, what: &str) -> Result<()> {
        if self.family == DataFamily::Tabulated {
            Err(Error::Unsupported(format!(
                "{what} of tabulated frequency data"
            )))
        } else {
            Ok(())
        }
    }

    /// Physical `‖u₁‖_{L²}`.
    pub fn l2_norm(&self) -> Result<f64> {
        self.physical_only("L2 norm")?;
        let (a, w, n) = (self.amplitude.abs(), self.width, self.dim);
        Ok(match self.family {
            DataFamily::Gaussian => a * (w * (0.5 * PI).sqrt()).powf(0.5 * f64::from(n)),
            _ => a * (sphere_area(n) * w.powi(n as i32) / f64::from(n)).sqrt(),
        })
    }

    /// `∫(1+|x|)|u₁| dx`.
    pub fn l1_moment(&self) -> Result<f64> {
        self.physical_only("weighted L1 norm")?;
        let (a, w, n) = (self.amplitude.abs(), self.width, self.dim);
        let omega = sphere_area(n);
        Ok(match self.family {
            DataFamily::Gaussian => {
                a * (w * PI.sqrt()).powi(n as i32)
                    + a * omega * w.powi(n as i32 + 1) * gamma_half(n + 1) / 2.0
            }
            _ => {
                a * omega * w.powi(n as i32) / f64::from(n)
                    + a * omega * w.powi(n as i32 + 1) / f64::from(n + 1)
            }
        })
    }

    /// `I₀ = ‖u₁‖_{L²} + ‖(1+|x|)u₁‖_{L¹}`.
    pub fn i0(&self) -> Result<f64> {
        Ok(self.l2_norm()? + self.l1_moment()?)
    }

    /// Radius outside which the datum is negligible (Gaussian: below 1e−17
    /// of its peak).
    pub fn support_radius(&self) -> Result<f64> {
        self.physical_only("support")?;
        Ok(match self.family {
            DataFamily::Gaussian => self.width * (17.0 * 10f64.ln()).sqrt(),
            _ => self.width,
        })
    }

    /// `u₁` at distance `rho` from the origin; the ball takes the value
    /// `A/2` on its boundary.
    pub fn physical_value(&self, rho: f64) -> Result<f64> {
        self.physical_only("physical values")?;
        let (a, w) = (self.amplitude, self.width);
        Ok(match self.family {
            DataFamily::Gaussian => a * (-(rho / w).powi(2)).exp(),
            _ => {
                if rho < w {
                    a
                } else if rho == w {
                    0.5 * a
                } else {
                    0.0
                }
            }
        })
    }

    /// Bound on `ω_n ∫_R^∞ |û₁(r)|² r^{n−1} [σ(r)] dr`; infinite when no
    /// bound is available at this `R`.
    pub fn tail_mass(&self, big_r: f64, sigma_weight: bool) -> f64 {
        let (a, w, n) = (self.amplitude, self.width, self.dim);
        if a == 0.0 {
            return 0.0;
        }
        let omega = sphere_area(n);
        match self.family {
            DataFamily::Gaussian => {
                // ∫_R^∞ e^{−βr²} r^m dr ≤ e^{−βR²} R^m / (2βR − m/R), using σ ≤ r²
                let c = a * (w * PI.sqrt()).powi(n as i32);
                let beta = 0.5 * w * w;
                let m = f64::from(n - 1) + if sigma_weight { 2.0 } else { 0.0 };
                let denom = 2.0 * beta * big_r - m / big_r;
                if denom <= 0.0 {
                    return f64::INFINITY;
                }
                omega * c * c * (-beta * big_r * big_r).exp() * big_r.powf(m) / denom
            }
            DataFamily::BallIndicator => {
                // |û₁|² r^{n−1} ≤ C r^{−α}; σ ≤ 2 log r + 1 for r ≥ 1
                if big_r < 1.0 || w * big_r < 1.0 {
                    return f64::INFINITY;
                }
                let (c, alpha) = match n {
                    1 => (4.0 * a * a, 2.0),
                    2 => (
                        (2.0 * PI * w * a).powi(2) * LANDAU_J1 * LANDAU_J1 * w.powf(-2.0 / 3.0),
                        5.0 / 3.0,
                    ),
                    _ => (64.0 * PI * PI * a * a * w * w, 2.0),
                };
                let base = omega * c * big_r.powf(1.0 - alpha);
                if sigma_weight {
                    base * ((2.0 * big_r.ln() + 1.0) / (alpha - 1.0) + 2.0 / (alpha - 1.0).powi(2))
                } else {
                    base / (alpha - 1.0)
                }
            }
            DataFamily::Tabulated => {
                if self
                    .table
                    .as_ref()
                    .is_some_and(|t| big_r >= t.last_radius())
                {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// A radius where the frequency content starts to be negligible.
    fn frequency_scale(&self) -> f64 {
        match self.family {
            DataFamily::Tabulated => self.table.as_ref().map_or(1.0, |t| t.last_radius()),
            _ => (10.0 / self.width).max(1.0),
        }
    }
}

/// `u₀` (optional, zero when absent) and `u₁` in the same dimension.
#[derive(Debug, Clone, Serialize)]
pub struct DataPair {
    pub u0: Option<InitialDatum>,
    pub u1: InitialDatum,
}

impl DataPair {
    pub fn new(u0: Option<InitialDatum>, u1: InitialDatum) -> Result<DataPair> {
        if let Some(d) = &u0 {
            if d.dim != u1.dim {
                return Err(domain(format!(
                    "u0 has dimension {} but u1 has {}",
                    d.dim, u1.dim
                )));
            }
        }
        Ok(DataPair { u0, u1 })
    }

    pub fn dim(&self) -> u32 {
        self.u1.dim
    }

    fn hat0(&self, r: f64) -> f64 {
        self.u0.as_ref().map_or(0.0, |d| d.hat(r))
    }
}

/// Value of the profile at symbol `sigma`; the `σ → 0` limit is `p1·t`.
#[inline]
fn profile_value(p1: f64, sigma: f64, t: f64) -> f64 {
    p1 * t * (-0.5 * sigma * t).exp() * sinc(t * sigma.sqrt())
}

/// `φ(t,ξ) = P₁ e^{−σt/2} sin(t√σ)/√σ`, real for real `P₁`.
pub fn phi_at(p1: f64, point: &SymbolPoint, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    Ok(profile_value(p1, point.sigma, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionRow {
    pub r: f64,
    pub a_abs: f64,
    pub b_abs: f64,
    /// `r·‖u₁‖_{1,1}`, the bound with `K = 1`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub rows: Vec<DecompositionRow>,
    /// Smallest `K` with `|A(r)| ≤ K r ‖u₁‖_{1,1}` on the grid.
    pub k_min: f64,
    pub norm_11: f64,
    /// `k_min ≤ 1`.
    pub pass: bool,
}

/// Splits `û₁ = A − iB + P₁` on `r_grid`. For real radial data `B = 0` and
/// `A = û₁ − P₁`.
pub fn decomposition_bounds(datum: &InitialDatum, r_grid: &[f64]) -> Result<DecompositionReport> {
    let norm_11 = datum.l1_moment()?;
    let p1 = datum.p1();
    let mut k_min: f64 = 0.0;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain(format!(
                "radius must be finite and nonnegative, got {r}"
            )));
        }
        let a_abs = (datum.hat(r) - p1).abs();
        if r > 0.0 && norm_11 > 0.0 {
            k_min = k_min.max(a_abs / (r * norm_11));
        }
        rows.push(DecompositionRow {
            r,
            a_abs,
            b_abs: 0.0,
            bound: r * norm_11,
        });
    }
    Ok(DecompositionReport {
        rows,
        k_min,
        norm_11,
        pass: k_min <= 1.0 + 1e-12,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileErrorReport {
    pub family: DataFamily,
    pub n: u32,
    pub t: f64,
    pub delta: f64,
    /// `∫_{|ξ|≤δ} |û − φ|² dξ`.
    pub low_freq_error_sq: f64,
    /// `∫_{|ξ|>δ} |û − φ|² dξ`.
    pub high_freq_error_sq: f64,
    /// `None` for tabulated data, whose physical norms are unknown.
    pub i0: Option<f64>,
    pub p1: f64,
    /// `(2π)^{−n}`; the error fields are frequency-side.
    pub plancherel_factor: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

impl ProfileErrorReport {
    /// `‖û(t) − φ(t)‖_{L²}`, frequency side.
    pub fn total_error(&self) -> f64 {
        (self.low_freq_error_sq + self.high_freq_error_sq).sqrt()
    }
}

/// Bounds `(sup|φ0|², sup|φ1|²)` over `r ≥ R`.
///
/// Everywhere `|φ0| ≤ 1 + 2t` and `|φ1| ≤ t`. Once `σ ≥ 8` the roots are
/// real with `λ₊ ≤ −1` and `λ₊ − λ₋ ≥ σ/√2`, so `|φ1| ≤ √2 e^{−t}/σ` and
/// `|φ0| ≤ 2 e^{−t}`.
fn multiplier_sq_bounds(t: f64, big_r: f64) -> (f64, f64) {
    let s = sigma_of(big_r);
    if s >= 8.0 {
        let e = (-2.0 * t).exp();
        (4.0 * e, 2.0 * e / (s * s))
    } else {
        ((1.0 + 2.0 * t).powi(2), t * t)
    }
}

/// Doubles `r` from `start` until `bound(r) ≤ eps` or [`MAX_CUTOFF`].
fn push_cutoff(start: f64, eps: f64, bound: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut r = start;
    let mut b = bound(r);
    while b > eps && r < MAX_CUTOFF {
        r *= 2.0;
        b = bound(r);
    }
    (r, b)
}

fn sigma_osc(t: f64, q: f64) -> f64 {
    ENVELOPE_EXPONENT / (t - 0.5 * q).max(1.0)
}

/// Splits `‖û(t) − φ(t)‖²` at `|ξ| = delta`, with `u₀ = 0`.
pub fn profile_error(datum: &InitialDatum, t: f64, delta: f64) -> Result<ProfileErrorReport> {
    profile_error_with(datum, t, delta, &Tolerance::default())
}

pub fn profile_error_with(
    datum: &InitialDatum,
    t: f64,
    delta: f64,
    tol: &Tolerance,
) -> Result<ProfileErrorReport> {
    let n = datum.dim;
    if !(t >= 1.0) || !t.is_finite() {
        return Err(domain(format!("profile error needs t >= 1, got {t}")));
    }
    if 2.0 * t <= f64::from(n) {
        return Err(domain(format!(
            "the profile has infinite L2 norm unless t > n/2 (n = {n}, t = {t})"
        )));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(domain(format!("delta must be positive, got {delta}")));
    }
    let q = f64::from(n - 1);
    let omega = sphere_area(n);
    let p1 = datum.p1();
    let power = (n - 1) as i32;
    let integrand = |r: f64| {
        let s = sigma_of(r);
        let u = fundamental_at(r, t).phi1 * datum.hat(r);
        let d = u - profile_value(p1, s, t);
        omega * d * d * r.powi(power)
    };

    // |û − φ|² ≤ 2|û|² + 2|φ|² in the discarded tail
    let eps = 1e-2 * tol.abs;
    let (r_phi, _) = tail_cutoff(t, q, (p1 * p1 * omega).ln(), true, eps, delta.max(10.0));
    let (r_max, _) = push_cutoff(r_phi.max(datum.frequency_scale()), eps, |r| {
        multiplier_sq_bounds(t, r).1 * datum.tail_mass(r, false)
    });
    let phi_tail = if p1 == 0.0 {
        0.0
    } else {
        let slope = q + 1.0 - 2.0 * t;
        p1 * p1 * omega * r_max.powf(slope) / (-slope * sigma_of(r_max))
    };
    let tail =
        2.0 * phi_tail + 2.0 * multiplier_sq_bounds(t, r_max).1 * datum.tail_mass(r_max, false);

    let s_osc = sigma_osc(t, q);
    let max_panels = (tol.max_nodes / 30).max(2);
    let low = integrate_panels(
        integrand,
        &oscillation_breaks(t, 0.0, delta, s_osc, max_panels),
        tol,
    );
    let high = if r_max > delta {
        integrate_panels(
            integrand,
            &oscillation_breaks(t, delta, r_max, s_osc, max_panels),
            tol,
        )
    } else {
        QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        }
    };
    let abs_error_estimate = low.abs_error_estimate + high.abs_error_estimate + tail;
    let total = low.value + high.value;
    let converged = low.converged && high.converged && tail <= tol.target(total).max(tol.abs);
    let i0 = match datum.family {
        DataFamily::Tabulated => None,
        _ => Some(datum.i0()?),
    };
    Ok(ProfileErrorReport {
        family: datum.family,
        n,
        t,
        delta,
        low_freq_error_sq: low.value.max(0.0),
        high_freq_error_sq: high.value.max(0.0),
        i0,
        p1,
        plancherel_factor: plancherel_factor(n),
        abs_error_estimate,
        converged,
    })
}

/// Frequency-side `∫|û(t)|²` and energy `½∫(|û_t|² + σ|û|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyNorms {
    pub t: f64,
    pub l2_sq: f64,
    pub energy: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

impl FrequencyNorms {
    /// Physical `‖u(t)‖_{L²}` in dimension `n`.
    pub fn physical_l2(&self, n: u32) -> f64 {
        (self.l2_sq * plancherel_factor(n)).sqrt()
    }

    /// Physical energy in dimension `n`.
    pub fn physical_energy(&self, n: u32) -> f64 {
        self.energy * plancherel_factor(n)
    }
}

/// Evaluates [`FrequencyNorms`] by radial quadrature.
pub fn frequency_norms(pair: &DataPair, t: f64, tol: &Tolerance) -> Result<FrequencyNorms> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("t must be nonnegative, got {t}")));
    }
    let n = pair.dim();
    let q = f64::from(n - 1);
    let omega = sphere_area(n);
    let power = (n - 1) as i32;
    let eps = 1e-2 * tol.abs;
    let t0_mass = |r: f64, w: bool| pair.u0.as_ref().map_or(0.0, |d| d.tail_mass(r, w));
    let l2_tail = |r: f64| {
        let (m0, m1) = multiplier_sq_bounds(t, r);
        2.0 * (m0 * t0_mass(r, false) + m1 * pair.u1.tail_mass(r, false))
    };
    // the pointwise energy |v|² + σ|u|² never exceeds its initial value
    let energy_tail = |r: f64| 0.5 * (pair.u1.tail_mass(r, false) + t0_mass(r, true));
    let start = pair
        .u0
        .as_ref()
        .map_or(1.0, |d| d.frequency_scale())
        .max(pair.u1.frequency_scale());
    let (r_l2, tail_l2) = push_cutoff(start, eps, l2_tail);
    let (r_en, tail_en) = push_cutoff(start, eps, energy_tail);
    let s_osc = sigma_osc(t, q);
    let max_panels = (tol.max_nodes / 30).max(2);

    let l2 = integrate_panels(
        |r: f64| {
            let f = fundamental_at(r, t);
            let u = f.phi0 * pair.hat0(r) + f.phi1 * pair.u1.hat(r);
            omega * u * u * r.powi(power)
        },
        &oscillation_breaks(t, 0.0, r_l2, s_osc, max_panels),
        tol,
    );
    let energy = integrate_panels(
        |r: f64| {
            let f = fundamental_at(r, t);
            let (h0, h1) = (pair.hat0(r), pair.u1.hat(r));
            let u = f.phi0 * h0 + f.phi1 * h1;
            let v = f.dphi0 * h0 + f.dphi1 * h1;
            0.5 * omega * (v * v + sigma_of(r) * u * u) * r.powi(power)
        },
        &oscillation_breaks(t, 0.0, r_en, s_osc, max_panels),
        tol,
    );
    let converged = l2.converged
        && energy.converged
        && tail_l2 <= tol.target(l2.value).max(tol.abs)
        && tail_en <= tol.target(energy.value).max(tol.abs);
    Ok(FrequencyNorms {
        t,
        l2_sq: l2.value,
        energy: energy.value,
        abs_error_estimate: l2.abs_error_estimate + energy.abs_error_estimate + tail_l2 + tail_en,
        converged,
    })
}
