//! Symbol of `L = log(I − Δ)`, the damping weight ρ of the frequency-space
//! energy method, and the characteristic roots of
//! `λ² + σλ + σ = 0`, `σ = log(1 + |ξ|²)`.
//!
//! Every quantity depends on |ξ| only, so a frequency is represented by its
//! radius `r`.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};

/// σ at which the characteristic polynomial has a double root.
pub const SIGMA_DEGENERATE: f64 = 4.0;

/// Relative tolerance used to classify σ as the degenerate value 4.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Radius where ρ changes branch, `√(e − 1)` (σ = 1 there).
pub fn rho_branch_radius() -> f64 {
    (E - 1.0).sqrt()
}

/// Radius of the double root, `√(e⁴ − 1)` (σ = 4 there).
pub fn degenerate_radius() -> f64 {
    SIGMA_DEGENERATE.exp_m1().sqrt()
}

/// `log(1 + r²)` without cancellation for small `r`.
#[inline]
pub fn sigma_of(r: f64) -> f64 {
    (r * r).ln_1p()
}

/// Inverse of [`sigma_of`] on `[0, ∞)`.
#[inline]
pub fn radius_of(sigma: f64) -> f64 {
    if sigma > 1.0 {
        // exp(σ/2)·√(1 − e^{−σ}) stays finite up to σ ≈ 1418
        (0.5 * sigma).exp() * (-(-sigma).exp_m1()).sqrt()
    } else {
        sigma.exp_m1().sqrt()
    }
}

/// ρ as a function of σ: σ/2 below the branch point, 1/2 above.
#[inline]
pub fn rho_of(sigma: f64) -> f64 {
    (0.5 * sigma).min(0.5)
}

/// Shape of the characteristic roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `0 < σ < 4`: complex conjugate roots `−a ± ib`.
    Complex,
    /// `σ = 4` (double root −2) or `σ = 0` (double root 0).
    Degenerate,
    /// `σ > 4`: two distinct negative real roots.
    Real,
}

impl Regime {
    pub fn classify(sigma: f64) -> Regime {
        if sigma == 0.0 || (sigma - SIGMA_DEGENERATE).abs() <= DEGENERACY_REL_TOL * sigma.max(1.0) {
            Regime::Degenerate
        } else if sigma < SIGMA_DEGENERATE {
            Regime::Complex
        } else {
            Regime::Real
        }
    }
}

/// A frequency magnitude with its cached symbol values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolPoint {
    pub r: f64,
    pub sigma: f64,
    pub rho: f64,
    pub regime: Regime,
}

impl SymbolPoint {
    /// Same as [`symbol_at`].
    pub fn at_radius(r: f64) -> Result<SymbolPoint> {
        symbol_at(r)
    }

    /// Builds the point with the given symbol value; `r` is recovered from σ.
    pub fn from_sigma(sigma: f64) -> Result<SymbolPoint> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(domain(format!(
                "sigma must be finite and nonnegative, got {sigma}"
            )));
        }
        Ok(SymbolPoint {
            r: radius_of(sigma),
            sigma,
            rho: rho_of(sigma),
            regime: Regime::classify(sigma),
        })
    }

    pub fn roots(&self) -> RootPair {
        roots_at(self)
    }
}

/// Evaluates the symbol data at radius `r`.
pub fn symbol_at(r: f64) -> Result<SymbolPoint> {
    if !r.is_finite() || r < 0.0 {
        return Err(domain(format!(
            "frequency radius must be finite and nonnegative, got {r}"
        )));
    }
    let sigma = sigma_of(r);
    Ok(SymbolPoint {
        r,
        sigma,
        rho: rho_of(sigma),
        regime: Regime::classify(sigma),
    })
}

/// Roots of `λ² + σλ + σ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootPair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// `−Re λ± = σ/2`.
    pub a: f64,
    /// `Im λ₊` in the complex regime, 0 otherwise.
    pub b: f64,
    pub regime: Regime,
}

pub fn roots_at(p: &SymbolPoint) -> RootPair {
    let sigma = p.sigma;
    let a = 0.5 * sigma;
    match p.regime {
        Regime::Degenerate => RootPair {
            lambda_plus: Complex64::new(-a, 0.0),
            lambda_minus: Complex64::new(-a, 0.0),
            a,
            b: 0.0,
            regime: p.regime,
        },
        Regime::Complex => {
            let b = 0.5 * (sigma * (SIGMA_DEGENERATE - sigma)).sqrt();
            RootPair {
                lambda_plus: Complex64::new(-a, b),
                lambda_minus: Complex64::new(-a, -b),
                a,
                b,
                regime: p.regime,
            }
        }
        Regime::Real => {
            let s = (sigma * (sigma - SIGMA_DEGENERATE)).sqrt();
            let minus = -0.5 * (sigma + s);
            // product of the roots is σ; avoids cancellation in −σ/2 + s/2
            let plus = sigma / minus;
            RootPair {
                lambda_plus: Complex64::new(plus, 0.0),
                lambda_minus: Complex64::new(minus, 0.0),
                a,
                b: 0.0,
                regime: p.regime,
            }
        }
    }
}

/// Checks `√σ ≤ 2b(r) ≤ 2√σ` at `r ∈ [0, 1]`.
pub fn b_bounds_check(r: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(format!(
            "the two-sided bound on b is only established for r in [0, 1], got {r}"
        )));
    }
    let p = symbol_at(r)?;
    let two_b = 2.0 * roots_at(&p).b;
    let root_sigma = p.sigma.sqrt();
    let slack = 4.0 * f64::EPSILON * root_sigma;
    Ok(root_sigma <= two_b + slack && two_b <= 2.0 * root_sigma + slack)
}
