//! `report`: every headline check in one run, one CSV row per check.

use logevo_core::asymptotics::{
    fit_rate, last_decade_variation, p61_lower, p62_lower, p62_upper, quadrature_norm_series,
    solver_norm_series, CONVERGENCE_VARIATION,
};
use logevo_core::quadrature::{
    cos_over_y, ip_ratio_curve, jp_ratio, jp_ratio_curve, log_space, middle_compensated,
};
use logevo_core::{
    verify_sandwich, DataPair, InitialDatum, SandwichClaim, SandwichOptions, Tolerance,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{
    self, BackendArg, FamilyArg, PointwiseArgs, ProfileErrorArgs, RatesArgs, SolveArgs,
};
use crate::error::CliError;
use crate::output::Report;

#[derive(clap::Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct ReportArgs {
    /// Seed for the randomized mode comparisons.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub const REPORT_COLUMNS: &[&str] = &["check", "pass", "detail"];

type Check = Result<(bool, String), CliError>;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn low_frequency() -> Check {
    let grid = log_space(1e2, 1e5, 13);
    let mut worst: f64 = 0.0;
    let mut limit = f64::NAN;
    for p in [-0.5, 0.0, 1.0, 3.0] {
        let c = ip_ratio_curve(p, &grid, &tol())?;
        worst = worst.max(last_decade_variation(&c)?);
        if p == 1.0 {
            limit = c[c.len() - 1].1;
        }
    }
    Ok((
        worst < CONVERGENCE_VARIATION && (limit - 0.5).abs() < 1e-3,
        format!("variation {worst:.3e}; p = 1 limit {limit:.9}"),
    ))
}

fn high_frequency() -> Check {
    let mut exact: f64 = 0.0;
    for t in [10.0, 20.0, 50.0] {
        exact = exact.max((jp_ratio(1.0, t, &tol())?.value - 1.0).abs());
    }
    let grid = log_space(10.0, 1e4, 13);
    let mut worst: f64 = 0.0;
    for p in [-2.0, 0.0, 3.0] {
        worst = worst.max(last_decade_variation(&jp_ratio_curve(p, &grid, &tol())?)?);
    }
    Ok((
        exact < 1e-6 && worst < CONVERGENCE_VARIATION,
        format!("p = 1 error {exact:.3e}; variation {worst:.3e}"),
    ))
}

fn middle_frequency() -> Check {
    let mut bad = 0;
    for eta in [0.25, 0.5, 0.75] {
        for p in [-1.0, 0.0, 2.0] {
            let v = (1..=200)
                .map(|k| middle_compensated(p, eta, f64::from(k), &tol()).map(|r| r.value))
                .collect::<logevo_core::Result<Vec<f64>>>()?;
            bad += v[4..]
                .windows(2)
                .filter(|w| w[1] > w[0] * (1.0 + 1e-12))
                .count();
            bad += v
                .iter()
                .filter(|&&x| !x.is_finite() || x > v[0] * (1.0 + 1e-12))
                .count();
        }
    }
    Ok((bad == 0, format!("{bad} violations")))
}

fn pointwise(seed: u64) -> Check {
    let rep = commands::verify_pointwise(PointwiseArgs {
        seed: Some(seed),
        ..Default::default()
    })?;
    Ok((
        rep.pass == Some(true),
        format!(
            "{} violations in {} cases; oracle error {:.3e}",
            rep.summary["violations"],
            rep.summary["cases"],
            rep.summary["oracle_max_err"].as_f64().unwrap_or(f64::NAN)
        ),
    ))
}

fn sandwich(claim: SandwichClaim, grid: &[f64]) -> Check {
    let r = verify_sandwich(claim, grid, &SandwichOptions::default())?;
    let mut ok = r.pass;
    let mut detail = format!(
        "compensated in [{:.6}, {:.6}] vs [{:.6}, {:.6}]",
        r.empirical_min, r.empirical_max, r.lower_coef, r.upper_coef
    );
    match claim {
        SandwichClaim::P51 => {
            let raw: Vec<(f64, f64)> = r.rows.iter().map(|row| (row.t, row.raw)).collect();
            let e = fit_rate(&raw, (f64::NEG_INFINITY, f64::INFINITY))?.exponent;
            ok &= (e + 0.5).abs() <= 0.02;
            detail.push_str(&format!("; exponent {e:.5}"));
        }
        SandwichClaim::P61 => ok &= r.lower_coef == p61_lower() && r.upper_coef == 12.0,
        SandwichClaim::P62 => ok &= r.lower_coef == p62_lower() && r.upper_coef == p62_upper(),
        _ => {}
    }
    Ok((ok, detail))
}

fn cosine() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..=50 {
        let t = 10f64.powf(6.0 * f64::from(k) / 50.0);
        let r = cos_over_y(t, &tol())?;
        if !r.converged {
            return Ok((false, format!("no convergence at t = {t}")));
        }
        worst = worst.max(r.value.abs());
    }
    Ok((worst <= 1.0, format!("max |integral| {worst:.6}")))
}

fn profile_rates() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let rep = commands::profile_error(ProfileErrorArgs {
            n: Some(n),
            ..Default::default()
        })?;
        ok &= rep.pass == Some(true);
        parts.push(format!(
            "n = {n}: {:.4}",
            rep.summary["fit"]["exponent"].as_f64().unwrap_or(f64::NAN)
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn norm_rates() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let rep = commands::rates(RatesArgs {
            n: Some(n),
            backend: Some(BackendArg::Quadrature),
            ..Default::default()
        })?;
        ok &= rep.pass == Some(true);
        let s = &rep.summary;
        parts.push(match n {
            2 => format!(
                "n = 2: band {:.4}",
                s["l2_sq_over_log_band"].as_f64().unwrap_or(f64::NAN)
            ),
            _ => format!(
                "n = {n}: l2 {:.4}, energy {:.4}",
                s["l2_fit"]["exponent"].as_f64().unwrap_or(f64::NAN),
                s["energy_fit"]["exponent"].as_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    Ok((ok, parts.join("; ")))
}

fn solver_energy() -> Check {
    let rep = commands::solve(SolveArgs {
        family: Some(FamilyArg::Gaussian),
        ..Default::default()
    })?;
    let slope = rep.summary["energy_fit"]["exponent"]
        .as_f64()
        .unwrap_or(f64::NAN);
    Ok((
        rep.pass == Some(true) && slope <= -0.5 + 0.1,
        format!(
            "energy slope {slope:.4} up to horizon {:.4}",
            rep.summary["trusted_horizon"].as_f64().unwrap_or(f64::NAN)
        ),
    ))
}

fn cross_module() -> Check {
    let pair = DataPair::new(None, InitialDatum::gaussian(1.0, 1.0, 1)?)?;
    let times: Vec<f64> = (1..=50).map(f64::from).collect();
    let (s, horizon) = solver_norm_series(&pair, &times, 80.0, 4096)?;
    let inside: Vec<f64> = times.into_iter().filter(|&t| t <= horizon).collect();
    let q = quadrature_norm_series(&pair, &inside, &tol())?;
    let worst = s
        .iter()
        .zip(&q)
        .map(|(a, b)| (a.l2_u - b.l2_u).abs() / b.l2_u)
        .fold(0.0, f64::max);
    Ok((worst <= 0.01, format!("max relative gap {worst:.3e}")))
}

pub fn report(mut args: ReportArgs) -> Result<Report, CliError> {
    let seed = *args.seed.get_or_insert(1);
    let sixth = [1e3, 3e3, 1e4, 3e4, 1e5];
    let checks: Vec<(&str, Check)> = vec![
        ("low-frequency integral", low_frequency()),
        ("high-frequency integral", high_frequency()),
        ("middle-frequency integral", middle_frequency()),
        ("pointwise estimates and mode oracle", pointwise(seed)),
        (
            "n = 3 decay band",
            sandwich(SandwichClaim::P51, &log_space(1e2, 1e4, 13)),
        ),
        ("n = 1 growth band", sandwich(SandwichClaim::P61, &sixth)),
        ("n = 2 growth band", sandwich(SandwichClaim::P62, &sixth)),
        ("cosine integral", cosine()),
        ("profile error rates", profile_rates()),
        ("solution norm rates", norm_rates()),
        ("solver energy", solver_energy()),
        ("solver vs quadrature", cross_module()),
    ];
    let mut rep = Report::new(
        "report",
        serde_json::to_value(&args).unwrap_or_default(),
        REPORT_COLUMNS,
    );
    let mut failed = Vec::new();
    for (name, outcome) in checks {
        let (ok, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, e.to_string()),
        };
        if !ok {
            failed.push(name);
        }
        rep.push(vec![name.into(), ok.into(), detail.into()]);
    }
    rep.pass = Some(failed.is_empty());
    rep.summary = json!({ "checks": rep.rows.len(), "failed": failed });
    Ok(rep)
}
