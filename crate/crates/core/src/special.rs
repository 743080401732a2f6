//! Elementary special functions used by the radial integrals and the
//! analytic Fourier transforms of the test data.

use std::f64::consts::PI;

/// `sin(x) / x` with its removable singularity at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Γ(k/2) for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half: k must be positive");
    let (mut acc, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = f64::from(k) / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// Surface measure of the unit sphere in R^n, `2 π^{n/2} / Γ(n/2)`.
///
/// For `n = 1` this is 2 (the two points ±1), which is the factor that turns
/// a half-line integral of an even function into the full-line integral.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

/// Volume of the ball of radius `radius` in R^n.
pub fn ball_volume(n: u32, radius: f64) -> f64 {
    sphere_area(n) * radius.powi(n as i32) / f64::from(n)
}

/// Bessel function of the first kind, order one.
///
/// Below |x| = 200 this is the trapezoid rule on Bessel's integral
/// `J₁(x) = (1/2π) ∫₀^{2π} cos(τ − x sin τ) dτ`, which converges
/// geometrically once the node count exceeds |x|. Above, the Hankel
/// asymptotic expansion is used.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 0.0;
    }
    let value = if ax < 200.0 {
        let nodes = 64 + 2 * ax.ceil() as usize;
        let h = 2.0 * PI / nodes as f64;
        let sum: f64 = (0..nodes)
            .map(|j| {
                let tau = j as f64 * h;
                (tau - ax * tau.sin()).cos()
            })
            .sum();
        sum / nodes as f64
    } else {
        // mu = 4 nu^2 = 4
        let mu = 4.0;
        let z = 8.0 * ax;
        let z2 = z * z;
        let p = 1.0 - (mu - 1.0) * (mu - 9.0) / (2.0 * z2)
            + (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) / (24.0 * z2 * z2)
            - (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) * (mu - 81.0) * (mu - 121.0)
                / (720.0 * z2 * z2 * z2);
        let q = (mu - 1.0) / z - (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / (6.0 * z2 * z)
            + (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) * (mu - 81.0)
                / (120.0 * z2 * z2 * z);
        let chi = ax - 0.75 * PI;
        (2.0 / (PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(4), 1.0);
        assert_eq!(gamma_half(6), 2.0);
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gamma_half_matches_reference_table() {
        // Γ(k/2) for k = 1..=40 from mpmath at 30 digits, rounded to 17.
        #[allow(clippy::excessive_precision)]
        let reference = [
            1.772453850905516,
            1.0,
            8.8622692545275801e-1,
            1.0,
            1.329340388179137,
            2.0,
            3.3233509704478426,
            6.0,
            1.1631728396567449e+1,
            2.4e+1,
            5.234277778455352e+1,
            1.2e+2,
            2.8788527781504436e+2,
            7.2e+2,
            1.8712543057977883e+3,
            5.04e+3,
            1.4034407293483413e+4,
            4.032e+4,
            1.1929246199460901e+5,
            3.6288e+5,
            1.1332783889487856e+6,
            3.6288e+6,
            1.1899423083962248e+7,
            3.99168e+7,
            1.3684336546556586e+8,
            4.790016e+8,
            1.7105420683195732e+9,
            6.2270208e+9,
            2.3092317922314238e+10,
            8.71782912e+10,
            3.3483860987355646e+11,
            1.307674368e+12,
            5.1899984530401251e+12,
            2.0922789888e+13,
            8.5634974475162064e+13,
            3.55687428096e+14,
            1.4986120533153361e+15,
            6.402373705728e+15,
            2.7724322986333718e+16,
            1.21645100408832e+17,
        ];
        for (k, want) in (1..=40u32).zip(reference) {
            assert!((gamma_half(k) - want).abs() <= 1e-15 * want, "k = {k}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_volume(3, 1.0) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sinc_is_continuous_at_switch() {
        let a = sinc(1e-4 - 1e-12);
        let b = sinc(1e-4 + 1e-12);
        assert!((a - b).abs() < 1e-14);
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn bessel_j1_reference_values() {
        // Abramowitz & Stegun table 9.1
        let table = [
            (0.5, 0.242_268_457_674_873_9),
            (1.0, 0.440_050_585_744_933_5),
            (2.0, 0.576_724_807_756_873_4),
            (5.0, -0.327_579_137_591_465_2),
            (10.0, 0.043_472_746_168_861_44),
            (30.0, -0.118_751_062_616_623_05),
            (25.0, -0.125_350_249_580_289_8),
        ];
        for (x, want) in table {
            let got = bessel_j1(x);
            assert!((got - want).abs() < 1e-12, "J1({x}) = {got}, want {want}");
        }
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(-1.0) + bessel_j1(1.0)).abs() < 1e-16);
    }

    #[test]
    fn bessel_j1_branches_agree() {
        // reference values on either side of the switch
        let below = bessel_j1(199.999_999_9);
        let above = bessel_j1(200.000_000_1);
        assert!((below + 0.054_304_536_665_786_43).abs() < 1e-14);
        assert!((above + 0.054_304_539_698_969_714).abs() < 1e-14);
        assert!((bessel_j1(150.0) + 0.065_145_163_657_727_37).abs() < 1e-14);
    }
}
