//! Independent reference computations for cross-checking the library.
//!
//! Everything here uses a different rule (adaptive Simpson), different
//! integration variables and different panel placement from the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Recursive adaptive Simpson on `[a, b]` with absolute tolerance `eps`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 48)
}

/// Simpson over consecutive panels.
pub fn simpson_panels(f: &dyn Fn(f64) -> f64, breaks: &[f64], eps: f64) -> f64 {
    let per = eps / breaks.len().max(1) as f64;
    breaks.windows(2).map(|w| simpson(f, w[0], w[1], per)).sum()
}

pub fn omega(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => panic!("omega only tabulated for n <= 4"),
    }
}

/// `ℐ_n(t)` in the variable `s = √log(1+r²)`:
/// `ω_n ∫₀^∞ e^{−(t−1)s²} (sin(ts)/s)² · s · r(s)^{n−2} ds`.
pub fn script_i(n: u32, t: f64, eps: f64) -> f64 {
    let r_of = |s: f64| (s * s).exp_m1().sqrt();
    let f = move |s: f64| {
        if s == 0.0 {
            // s·r^{n−2} → 1 (n=1), 0 (n≥2... times t²)
            return if n == 1 { t * t } else { 0.0 };
        }
        let sinc = (t * s).sin() / s;
        let geom = match n {
            1 => s / r_of(s),
            _ => s * r_of(s).powi(n as i32 - 2),
        };
        omega(n) * (-(t - 1.0) * s * s).exp() * sinc * sinc * geom
    };
    let s_max = (60.0 / (t - 0.5 * f64::from(n))).sqrt();
    let mut breaks = vec![0.0];
    let step = PI / t;
    let mut s = step;
    while s < s_max {
        breaks.push(s);
        s += step;
    }
    breaks.push(s_max);
    simpson_panels(&f, &breaks, eps)
}

/// `I_p(t)` for `p ≥ 0` directly, for `p < 0` via `r = u²`.
pub fn ip(p: f64, t: f64, eps: f64) -> f64 {
    if p >= 0.0 {
        let f = move |r: f64| (1.0 + r * r).powf(-t) * r.powf(p);
        let breaks: Vec<f64> = (0..=64).map(|k| (k as f64 / 64.0).powi(2)).collect();
        simpson_panels(&f, &breaks, eps)
    } else {
        let f = move |u: f64| 2.0 * (1.0 + u.powi(4)).powf(-t) * u.powf(2.0 * p + 1.0);
        let breaks: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
        simpson_panels(&f, &breaks, eps)
    }
}

/// `2^t J_p(t)` via `r = 1/u`: `∫₀¹ (2u²/(1+u²))^t u^{−p−2} du`.
pub fn jp_scaled(p: f64, t: f64, eps: f64) -> f64 {
    let f = move |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        (t * (2.0 * u * u / (1.0 + u * u)).ln()).exp() * u.powf(-p - 2.0)
    };
    let breaks: Vec<f64> = (0..=128)
        .map(|k| 1.0 - (1.0 - k as f64 / 128.0).powi(3))
        .collect();
    simpson_panels(&f, &breaks, eps)
}

/// `∫_η¹ (1+r²)^{−t} r^p dr` directly.
pub fn middle(p: f64, eta: f64, t: f64, eps: f64) -> f64 {
    let f = move |r: f64| (1.0 + r * r).powf(-t) * r.powf(p);
    let breaks: Vec<f64> = (0..=64)
        .map(|k| eta + (1.0 - eta) * k as f64 / 64.0)
        .collect();
    simpson_panels(&f, &breaks, eps)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Cosine integral `Ci(x) = γ + ln x + Σ_{k≥1} (−x²)^k / (2k (2k)!)`,
/// accurate for moderate `x`.
pub fn ci(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0; // (−x²)^k/(2k)!
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        let add = term / (2.0 * kf);
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}
