//! Exact evolution of a single Fourier mode of
//! `û_tt + σ û_t + σ û = 0`, the frequency-space energy functionals, and a
//! Runge–Kutta oracle for cross-checking the closed form.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::multiplier::{rho_of, roots_at, sigma_of, Regime, RootPair, SymbolPoint};

/// Below this value of `|d²| t²` (with `d = (λ₊ − λ₋)/2`) the fundamental
/// solutions are evaluated from their Taylor series in `d²`.
const SERIES_THRESHOLD: f64 = 1e-3;

/// Fundamental solutions of the mode ODE at time `t`.
///
/// `phi0` has data `(1, 0)`, `phi1` has data `(0, 1)`; the `d` fields are
/// the time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalPair {
    pub phi0: f64,
    pub dphi0: f64,
    pub phi1: f64,
    pub dphi1: f64,
}

impl FundamentalPair {
    /// Evaluates the pair for the given symbol value and roots. `t` must be
    /// nonnegative; this is not checked.
    pub fn at(sigma: f64, roots: &RootPair, t: f64) -> FundamentalPair {
        let m = -0.5 * sigma;
        let d2 = match roots.regime {
            Regime::Degenerate => 0.0,
            _ => 0.25 * sigma * (sigma - 4.0),
        };
        let z = d2 * t * t;
        if z.abs() < SERIES_THRESHOLD {
            // sinh(dt)/d and cosh(dt) as series in z = d²t²
            let s = t * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0)));
            let c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0));
            let e = (m * t).exp();
            let phi1 = e * s;
            return FundamentalPair {
                phi0: e * (c - m * s),
                dphi0: -sigma * phi1,
                phi1,
                dphi1: e * (c + m * s),
            };
        }
        if d2 < 0.0 {
            let b = roots.b;
            let e = (m * t).exp();
            let (sn, cs) = (b * t).sin_cos();
            let s = sn / b;
            let phi1 = e * s;
            FundamentalPair {
                phi0: e * (cs - m * s),
                dphi0: -sigma * phi1,
                phi1,
                dphi1: e * (cs + m * s),
            }
        } else {
            let lp = roots.lambda_plus.re;
            let lm = roots.lambda_minus.re;
            let delta = lp - lm;
            let ep = (lp * t).exp();
            let em = (lm * t).exp();
            let phi1 = ep * (-((lm - lp) * t).exp_m1()) / delta;
            FundamentalPair {
                phi0: (lp * em - lm * ep) / delta,
                dphi0: -sigma * phi1,
                phi1,
                dphi1: (lp * ep - lm * em) / delta,
            }
        }
    }

    /// `(û, û_t)` for initial data `(u0, u1)`.
    #[inline]
    pub fn apply(&self, u0: Complex64, u1: Complex64) -> (Complex64, Complex64) {
        (
            u0 * self.phi0 + u1 * self.phi1,
            u0 * self.dphi0 + u1 * self.dphi1,
        )
    }
}

/// A single Fourier mode with its initial pair `(û₀(ξ), û₁(ξ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeClosedForm {
    pub point: SymbolPoint,
    pub roots: RootPair,
    pub u0_hat: Complex64,
    pub u1_hat: Complex64,
}

impl ModeClosedForm {
    pub fn new(point: SymbolPoint, u0_hat: Complex64, u1_hat: Complex64) -> ModeClosedForm {
        ModeClosedForm {
            point,
            roots: roots_at(&point),
            u0_hat,
            u1_hat,
        }
    }

    /// Mode with real data at the given symbol value.
    pub fn with_sigma(sigma: f64, u0: f64, u1: f64) -> Result<ModeClosedForm> {
        Ok(ModeClosedForm::new(
            SymbolPoint::from_sigma(sigma)?,
            Complex64::new(u0, 0.0),
            Complex64::new(u1, 0.0),
        ))
    }

    /// `(û(t), û_t(t))`.
    pub fn evaluate(&self, t: f64) -> Result<(Complex64, Complex64)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(format!(
                "mode evaluation needs finite t >= 0, got {t}"
            )));
        }
        Ok(FundamentalPair::at(self.point.sigma, &self.roots, t).apply(self.u0_hat, self.u1_hat))
    }

    /// Same as [`energy_density`].
    pub fn energy(&self, t: f64) -> Result<EnergyDensity> {
        energy_density(self, t)
    }
}

/// Fundamental pair at radius `r` (finite, nonnegative) and time `t ≥ 0`.
pub fn fundamental_at(r: f64, t: f64) -> FundamentalPair {
    let sigma = sigma_of(r);
    let point = SymbolPoint {
        r,
        sigma,
        rho: rho_of(sigma),
        regime: Regime::classify(sigma),
    };
    FundamentalPair::at(sigma, &roots_at(&point), t)
}

/// Same as [`ModeClosedForm::evaluate`].
pub fn mode_evaluate(m: &ModeClosedForm, t: f64) -> Result<(Complex64, Complex64)> {
    m.evaluate(t)
}

/// Integrates the mode ODE with the classical fourth-order Runge–Kutta
/// method. Independent of the closed form; used only as a cross-check.
///
/// The step is shrunk so that an integer number of steps lands on `t`.
pub fn ode_oracle(
    point: &SymbolPoint,
    u0_hat: Complex64,
    u1_hat: Complex64,
    t: f64,
    dt: f64,
) -> Result<Complex64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(domain(format!("oracle step must be positive, got {dt}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("oracle needs finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0_hat);
    }
    let sigma = point.sigma;
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let rhs = |u: Complex64, v: Complex64| (v, -sigma * (u + v));
    let (mut u, mut v) = (u0_hat, u1_hat);
    for _ in 0..steps {
        let (k1u, k1v) = rhs(u, v);
        let (k2u, k2v) = rhs(u + k1u * (0.5 * h), v + k1v * (0.5 * h));
        let (k3u, k3v) = rhs(u + k2u * (0.5 * h), v + k2v * (0.5 * h));
        let (k4u, k4v) = rhs(u + k3u * h, v + k3v * h);
        u += (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
    Ok(u)
}

/// Per-frequency energy functionals of the multiplier method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyDensity {
    /// `|û_t|²/2 + σ|û|²/2`.
    pub e0: f64,
    /// `E₀ + ρ Re(û_t ū) + (ρ/2) σ |û|²`.
    pub e: f64,
    /// `σ|û_t|² + ρσ|û|²`.
    pub f: f64,
    /// `ρ|û_t|²`.
    pub rr: f64,
}

fn densities(sigma: f64, rho: f64, u: Complex64, v: Complex64) -> EnergyDensity {
    let u2 = u.norm_sqr();
    let v2 = v.norm_sqr();
    let e0 = 0.5 * v2 + 0.5 * sigma * u2;
    let cross = (v * u.conj()).re;
    EnergyDensity {
        e0,
        e: e0 + rho * cross + 0.5 * rho * sigma * u2,
        f: sigma * v2 + rho * sigma * u2,
        rr: rho * v2,
    }
}

pub fn energy_density(m: &ModeClosedForm, t: f64) -> Result<EnergyDensity> {
    let (u, v) = m.evaluate(t)?;
    Ok(densities(m.point.sigma, m.point.rho, u, v))
}

/// Default centered-difference step at time `t`.
pub fn default_fd_step(t: f64) -> f64 {
    1e-4 * t.max(1.0)
}

/// Residual of the pointwise energy identity `dE₀/dt + σ|û_t|² = 0`, with
/// the derivative taken by a centered difference of step `h`.
pub fn check_energy_identity(m: &ModeClosedForm, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(t > h) {
        return Err(domain(format!(
            "energy identity check needs 0 < h < t, got t = {t}, h = {h}"
        )));
    }
    let ahead = energy_density(m, t + h)?.e0;
    let behind = energy_density(m, t - h)?.e0;
    let (_, v) = m.evaluate(t)?;
    Ok(((ahead - behind) / (2.0 * h) + m.point.sigma * v.norm_sqr()).abs())
}

/// Outcome of the two pointwise decay estimates at one `(t, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseCheck {
    /// `|û_t|² + σ|û|²`.
    pub lhs6: f64,
    /// `6(|û₁|² + σ|û₀|²) e^{−ρt/2}`.
    pub rhs6: f64,
    /// `|û|²`; `None` when σ = 0 where the bound is not defined.
    pub lhs7: Option<f64>,
    /// `6(|û₁|²/σ + |û₀|²) e^{−ρt/2}`.
    pub rhs7: Option<f64>,
    pub pass: bool,
}

impl PointwiseCheck {
    pub fn skipped_second(&self) -> bool {
        self.lhs7.is_none()
    }
}

pub fn check_pointwise_estimates(m: &ModeClosedForm, t: f64) -> Result<PointwiseCheck> {
    let (u, v) = m.evaluate(t)?;
    let sigma = m.point.sigma;
    let decay = (-0.5 * m.point.rho * t).exp();
    let slack = 1.0 + 1e-12;
    let lhs6 = v.norm_sqr() + sigma * u.norm_sqr();
    let rhs6 = 6.0 * (m.u1_hat.norm_sqr() + sigma * m.u0_hat.norm_sqr()) * decay;
    let mut pass = lhs6 <= rhs6 * slack;
    let (lhs7, rhs7) = if sigma > 0.0 {
        let lhs = u.norm_sqr();
        let rhs = 6.0 * (m.u1_hat.norm_sqr() / sigma + m.u0_hat.norm_sqr()) * decay;
        pass &= lhs <= rhs * slack;
        (Some(lhs), Some(rhs))
    } else {
        (None, None)
    };
    Ok(PointwiseCheck {
        lhs6,
        rhs6,
        lhs7,
        rhs7,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn free_mode_is_linear() {
        let m = ModeClosedForm::with_sigma(0.0, 0.0, 1.0).unwrap();
        let (u, v) = m.evaluate(3.0).unwrap();
        assert_eq!(u, c(3.0));
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn double_root_mode() {
        let m = ModeClosedForm::with_sigma(4.0, 0.0, 1.0).unwrap();
        let (u, _) = m.evaluate(1.0).unwrap();
        assert!((u.re - (-2f64).exp()).abs() < 1e-15);
        assert!((u.re - 0.135_335).abs() < 1e-6);
    }

    #[test]
    fn real_regime_two_root_formula() {
        let m = ModeClosedForm::with_sigma(12.0, 0.0, 1.0).unwrap();
        let (u, _) = m.evaluate(1.0).unwrap();
        let s6 = 6f64.sqrt();
        let want = ((-6.0 + 2.0 * s6).exp() - (-6.0 - 2.0 * s6).exp()) / (4.0 * s6);
        assert!((u.re - want).abs() < 1e-15);
        let oracle = ode_oracle(&m.point, m.u0_hat, m.u1_hat, 1.0, 1e-3).unwrap();
        assert!((oracle - u).norm() < 1e-10);
    }

    #[test]
    fn complex_regime_matches_sine_formula() {
        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        let b = 3f64.sqrt() / 2.0;
        for t in [0.5, 2.0, 7.0] {
            let (u, _) = m.evaluate(t).unwrap();
            let want = (-0.5 * t).exp() * (b * t).sin() / b;
            assert!((u.re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn initial_data_reproduced() {
        for sigma in [0.0, 1e-9, 0.3, 3.999_999_9, 4.0, 4.000_000_1, 12.0, 500.0] {
            let m = ModeClosedForm::new(
                SymbolPoint::from_sigma(sigma).unwrap(),
                Complex64::new(0.7, -0.2),
                Complex64::new(-1.3, 0.4),
            );
            let (u, v) = m.evaluate(0.0).unwrap();
            assert!((u - m.u0_hat).norm() <= 1e-12 * m.u0_hat.norm());
            assert!((v - m.u1_hat).norm() <= 1e-12 * m.u1_hat.norm());
        }
    }

    #[test]
    fn negative_time_rejected() {
        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        assert!(m.evaluate(-1.0).is_err());
        assert!(ode_oracle(&m.point, m.u0_hat, m.u1_hat, 1.0, 0.0).is_err());
        assert!(ode_oracle(&m.point, m.u0_hat, m.u1_hat, 1.0, -1e-3).is_err());
    }

    #[test]
    fn oracle_examples() {
        let free = SymbolPoint::from_sigma(0.0).unwrap();
        let u = ode_oracle(&free, c(0.0), c(1.0), 1.0, 0.1).unwrap();
        assert!((u - c(1.0)).norm() < 1e-15);

        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        let diff = (ode_oracle(&m.point, m.u0_hat, m.u1_hat, 2.0, 1e-3).unwrap()
            - m.evaluate(2.0).unwrap().0)
            .norm();
        assert!(diff <= 1e-10, "diff {diff}");

        let m = ModeClosedForm::with_sigma(12.0, 1.0, 0.0).unwrap();
        let diff = (ode_oracle(&m.point, m.u0_hat, m.u1_hat, 2.0, 1e-3).unwrap()
            - m.evaluate(2.0).unwrap().0)
            .norm();
        assert!(diff <= 1e-9, "diff {diff}");
    }

    #[test]
    fn energy_density_examples() {
        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        let d = m.energy(0.0).unwrap();
        assert_eq!(d.e0, 0.5);
        assert_eq!(d.f, 1.0);

        let zero = ModeClosedForm::with_sigma(2.0, 0.0, 0.0).unwrap();
        let d = zero.energy(0.0).unwrap();
        assert_eq!((d.e0, d.e, d.f, d.rr), (0.0, 0.0, 0.0, 0.0));

        let m = ModeClosedForm::with_sigma(1.0, 1.0, 0.0).unwrap();
        let d = m.energy(0.0).unwrap();
        assert_eq!(d.e0, 0.5);
        assert!((d.e - 0.75).abs() < 1e-15);
    }

    #[test]
    fn energy_identity_residuals() {
        let free = ModeClosedForm::with_sigma(0.0, 0.0, 1.0).unwrap();
        assert_eq!(check_energy_identity(&free, 1.0, 1e-4).unwrap(), 0.0);

        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        assert!(check_energy_identity(&m, 1.0, 1e-4).unwrap() <= 1e-6);

        let m = ModeClosedForm::with_sigma(12.0, 1.0, 0.0).unwrap();
        assert!(check_energy_identity(&m, 1.0, 1e-4).unwrap() <= 1e-6);

        assert!(check_energy_identity(&m, 1e-5, 1e-4).is_err());
    }

    #[test]
    fn energy_identity_is_second_order() {
        let m = ModeClosedForm::with_sigma(1.0, 0.3, 1.0).unwrap();
        let coarse = check_energy_identity(&m, 1.0, 1e-2).unwrap();
        let fine = check_energy_identity(&m, 1.0, 5e-3).unwrap();
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn pointwise_examples() {
        for (u0, u1) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let m = ModeClosedForm::with_sigma(0.7, u0, u1).unwrap();
            assert!(check_pointwise_estimates(&m, 0.0).unwrap().pass);
        }
        let m = ModeClosedForm::with_sigma(1.0, 0.0, 1.0).unwrap();
        assert!(check_pointwise_estimates(&m, 10.0).unwrap().pass);

        let free = ModeClosedForm::with_sigma(0.0, 0.0, 1.0).unwrap();
        let check = check_pointwise_estimates(&free, 2.0).unwrap();
        assert!(check.skipped_second());
        assert!(check.pass);
    }

    #[test]
    fn pointwise_sweep_no_violations() {
        let sigmas: Vec<f64> = (0..=40)
            .map(|k| 10f64.powf(-2.0 + 4.0 * f64::from(k) / 40.0))
            .collect();
        let times: Vec<f64> = (0..=40)
            .map(|k| 0.1 + (50.0 - 0.1) * f64::from(k) / 40.0)
            .collect();
        for &s in &sigmas {
            for &t in &times {
                for (u0, u1) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                    let m = ModeClosedForm::with_sigma(s, u0, u1).unwrap();
                    assert!(
                        check_pointwise_estimates(&m, t).unwrap().pass,
                        "sigma {s}, t {t}"
                    );
                }
            }
        }
    }
}
