//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use logevo_core::asymptotics::{
    band_ratio, fit_rate, last_decade_variation, p61_lower, p62_lower, p62_upper,
    profile_error_sweep, quadrature_norm_series, solver_norm_series, verify_sandwich,
    SandwichClaim, SandwichOptions, P61_UPPER,
};
use logevo_core::modes::{check_pointwise_estimates, mode_evaluate, ode_oracle, ModeClosedForm};
use logevo_core::multiplier::SymbolPoint;
use logevo_core::profile::{DataPair, InitialDatum, DEFAULT_DELTA};
use logevo_core::quadrature::{
    cos_over_y, ip_ratio_curve, jp_ratio, jp_ratio_curve, log_space, middle_compensated, Tolerance,
};
use logevo_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn low_frequency_template() -> Check {
    let grid = log_space(1e2, 1e5, 13);
    let mut worst: f64 = 0.0;
    let mut limit_p1 = f64::NAN;
    for p in [-0.5, 0.0, 1.0, 3.0] {
        let curve = ip_ratio_curve(p, &grid, &tol()).map_err(err)?;
        let v = last_decade_variation(&curve).map_err(err)?;
        worst = worst.max(v);
        if p == 1.0 {
            limit_p1 = curve.last().unwrap().1;
        }
    }
    ensure(
        worst < 0.05 && (limit_p1 - 0.5).abs() < 1e-3,
        format!("max last-decade variation {worst:.2e}, p=1 limit {limit_p1:.8}"),
    )
}

fn high_frequency_template() -> Check {
    let mut worst_exact: f64 = 0.0;
    for t in [10.0, 20.0, 50.0] {
        let r = jp_ratio(1.0, t, &tol()).map_err(err)?;
        worst_exact = worst_exact.max((r.value - 1.0).abs());
    }
    let grid = log_space(10.0, 1e4, 13);
    let mut worst_var: f64 = 0.0;
    for p in [-2.0, 0.0, 3.0] {
        let curve = jp_ratio_curve(p, &grid, &tol()).map_err(err)?;
        worst_var = worst_var.max(last_decade_variation(&curve).map_err(err)?);
    }
    ensure(
        worst_exact < 1e-6 && worst_var < 0.05,
        format!("p=1 max |ratio-1| {worst_exact:.2e}, max last-decade variation {worst_var:.2e}"),
    )
}

fn middle_frequencies() -> Check {
    let mut violations = 0;
    for eta in [0.25, 0.5, 0.75] {
        for p in [-1.0, 0.0, 2.0] {
            let series: Vec<(f64, f64)> = (1..=200)
                .map(|k| {
                    let t = k as f64;
                    middle_compensated(p, eta, t, &tol()).map(|r| (t, r.value))
                })
                .collect::<Result<_, _>>()
                .map_err(err)?;
            let start = series[0].1;
            for w in series.windows(2).filter(|w| w[0].0 >= 5.0) {
                if w[1].1 > w[0].1 * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
            if series
                .iter()
                .any(|s| !s.1.is_finite() || s.1 > start * (1.0 + 1e-12))
            {
                violations += 1;
            }
        }
    }
    ensure(
        violations == 0,
        format!("{violations} monotonicity/boundedness violations over 9 (eta, p) pairs"),
    )
}

fn pointwise_estimates() -> Check {
    let sigmas = log_space(1e-2, 1e2, 40);
    let times: Vec<f64> = (0..40)
        .map(|k| 0.1 + (50.0 - 0.1) * k as f64 / 39.0)
        .collect();
    let mut violations = 0;
    let mut cases = 0;
    for &s in &sigmas {
        for (u0, u1) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let m = ModeClosedForm::with_sigma(s, u0, u1).map_err(err)?;
            for &t in &times {
                cases += 1;
                if !check_pointwise_estimates(&m, t).map_err(err)?.pass {
                    violations += 1;
                }
            }
        }
    }
    ensure(
        violations == 0,
        format!("{violations} violations in {cases} cases"),
    )
}

fn mode_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let sigma = if k % 4 == 0 {
            rng.random_range(3.9..4.1)
        } else {
            rng.random_range(0.0..50.0)
        };
        let u0 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let u1 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let t = rng.random_range(0.0..10.0);
        let point = SymbolPoint::from_sigma(sigma).map_err(err)?;
        let (v, _) = mode_evaluate(&ModeClosedForm::new(point, u0, u1), t).map_err(err)?;
        let o = ode_oracle(&point, u0, u1, t, 1e-3).map_err(err)?;
        worst = worst.max((v - o).norm() / (1.0 + v.norm()));
    }
    ensure(
        worst <= 1e-8,
        format!("worst |closed - RK4|/(1+|u|) = {worst:.2e} over 200 cases"),
    )
}

fn decay_n3() -> Check {
    let grid = log_space(1e2, 1e4, 13);
    let rep =
        verify_sandwich(SandwichClaim::P51, &grid, &SandwichOptions::default()).map_err(err)?;
    let raw: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.t, r.raw)).collect();
    let fit = fit_rate(&raw, (1e2, 1e4)).map_err(err)?;
    ensure(
        rep.pass && (fit.exponent + 0.5).abs() <= 0.02,
        format!(
            "compensated in [{:.5}, {:.5}] above {:.5}, variation {:.2e}, exponent {:.4}",
            rep.empirical_min,
            rep.empirical_max,
            rep.lower_coef,
            rep.last_decade_variation,
            fit.exponent
        ),
    )
}

const SIXTH_GRID: [f64; 5] = [1e3, 3e3, 1e4, 3e4, 1e5];

fn growth_n1() -> Check {
    let rep = verify_sandwich(SandwichClaim::P61, &SIXTH_GRID, &SandwichOptions::default())
        .map_err(err)?;
    ensure(
        rep.pass && rep.lower_coef == p61_lower() && rep.upper_coef == P61_UPPER,
        format!(
            "I_1/t in [{:.5}, {:.5}], band [{:.5}, {}]",
            rep.empirical_min,
            rep.empirical_max,
            p61_lower(),
            P61_UPPER
        ),
    )
}

fn growth_n2() -> Check {
    let rep = verify_sandwich(SandwichClaim::P62, &SIXTH_GRID, &SandwichOptions::default())
        .map_err(err)?;
    ensure(
        rep.pass && rep.lower_coef == p62_lower() && rep.upper_coef == p62_upper(),
        format!(
            "I_2/log t in [{:.5}, {:.5}], band [{:.5}, {:.5}]",
            rep.empirical_min,
            rep.empirical_max,
            p62_lower(),
            p62_upper()
        ),
    )
}

fn cosine_integral() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..=50 {
        let t = 10f64.powf(6.0 * k as f64 / 50.0);
        let r = cos_over_y(t, &tol()).map_err(err)?;
        if !r.converged {
            return Err(format!("no convergence at t = {t}"));
        }
        worst = worst.max(r.value.abs());
    }
    ensure(worst <= 1.0, format!("max |integral| = {worst:.6}"))
}

fn profile_rate() -> Check {
    let grid = [10.0, 20.0, 40.0, 80.0, 160.0];
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 1..=3u32 {
        let d = InitialDatum::gaussian(1.0, 1.0, n).map_err(err)?;
        let (_, fit) = profile_error_sweep(&d, &grid, DEFAULT_DELTA, &tol()).map_err(err)?;
        let bound = -f64::from(n) / 4.0 + 0.05;
        ok &= fit.exponent <= bound;
        parts.push(format!("n={n} slope {:.4} (<= {bound:.2})", fit.exponent));
    }
    ensure(ok, parts.join(", "))
}

fn norm_growth_and_decay() -> Check {
    let grid = log_space(1e2, 1e5, 13);
    let series = |n: u32| -> Result<Vec<(f64, f64)>, String> {
        let pair =
            DataPair::new(None, InitialDatum::gaussian(1.0, 1.0, n).map_err(err)?).map_err(err)?;
        let s = quadrature_norm_series(&pair, &grid, &tol()).map_err(err)?;
        Ok(s.iter().map(|x| (x.t, x.l2_u)).collect())
    };
    let s1 = fit_rate(&series(1)?, (0.0, f64::INFINITY))
        .map_err(err)?
        .exponent;
    let s3 = fit_rate(&series(3)?, (0.0, f64::INFINITY))
        .map_err(err)?
        .exponent;
    let comp: Vec<f64> = series(2)?.iter().map(|&(t, v)| v * v / t.ln()).collect();
    let band = band_ratio(&comp);
    ensure(
        (s1 - 0.5).abs() <= 0.05 && (s3 + 0.25).abs() <= 0.05 && band <= 3.0,
        format!("n=1 slope {s1:.4}, n=3 slope {s3:.4}, n=2 |u|^2/log t max/min {band:.4}"),
    )
}

fn solver_pair() -> Result<DataPair, String> {
    DataPair::new(None, InitialDatum::gaussian(1.0, 1.0, 1).map_err(err)?).map_err(err)
}

fn solver_energy() -> Check {
    let times: Vec<f64> = (0..=100).map(|k| 0.5 * k as f64).collect();
    let (s, horizon) = solver_norm_series(&solver_pair()?, &times, 80.0, 4096).map_err(err)?;
    let increases = s
        .windows(2)
        .filter(|w| w[1].energy > w[0].energy * (1.0 + 1e-10))
        .count();
    let pts: Vec<(f64, f64)> = s.iter().map(|x| (x.t, x.energy)).collect();
    let fit = fit_rate(&pts, (5.0, horizon)).map_err(err)?;
    ensure(
        increases == 0 && fit.exponent <= -0.5 + 0.1,
        format!(
            "{increases} energy increases, slope {:.4} on [5, {horizon:.2}]",
            fit.exponent
        ),
    )
}

fn solver_vs_quadrature() -> Check {
    let pair = solver_pair()?;
    let times: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let (s, horizon) = solver_norm_series(&pair, &times, 80.0, 4096).map_err(err)?;
    let trusted: Vec<f64> = times.iter().copied().filter(|&t| t <= horizon).collect();
    let q = quadrature_norm_series(&pair, &trusted, &tol()).map_err(err)?;
    let worst = s
        .iter()
        .zip(&q)
        .map(|(a, b)| (a.l2_u - b.l2_u).abs() / b.l2_u)
        .fold(0.0, f64::max);
    ensure(
        worst <= 0.01,
        format!(
            "max relative gap {worst:.2e} over {} times up to {horizon:.2}",
            q.len()
        ),
    )
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion {
            name: "low-frequency template integral converges",
            budget: Duration::from_secs(10),
            run: low_frequency_template,
        },
        Criterion {
            name: "high-frequency template integral ratio",
            budget: Duration::from_secs(10),
            run: high_frequency_template,
        },
        Criterion {
            name: "middle-frequency bound",
            budget: Duration::from_secs(5),
            run: middle_frequencies,
        },
        Criterion {
            name: "pointwise energy estimates (factor 6)",
            budget: Duration::from_secs(5),
            run: pointwise_estimates,
        },
        Criterion {
            name: "closed form vs RK4 oracle",
            budget: Duration::from_secs(30),
            run: mode_oracle,
        },
        Criterion {
            name: "profile integral decay, n = 3",
            budget: Duration::from_secs(60),
            run: decay_n3,
        },
        Criterion {
            name: "profile integral growth band, n = 1",
            budget: Duration::from_secs(60),
            run: growth_n1,
        },
        Criterion {
            name: "profile integral growth band, n = 2",
            budget: Duration::from_secs(60),
            run: growth_n2,
        },
        Criterion {
            name: "cosine integral bounded by 1",
            budget: Duration::from_secs(5),
            run: cosine_integral,
        },
        Criterion {
            name: "profile error rate",
            budget: Duration::from_secs(120),
            run: profile_rate,
        },
        Criterion {
            name: "solution norm growth and decay",
            budget: Duration::from_secs(120),
            run: norm_growth_and_decay,
        },
        Criterion {
            name: "solver energy inequality and decay",
            budget: Duration::from_secs(60),
            run: solver_energy,
        },
        Criterion {
            name: "solver vs quadrature norms",
            budget: Duration::from_secs(60),
            run: solver_vs_quadrature,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:<42} {:>9.3}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
