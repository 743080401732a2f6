//! Globally adaptive Gauss–Kronrod (7/15) quadrature over a set of
//! breakpoints.
//!
//! Every panel between consecutive breakpoints gets one 15-point Kronrod
//! evaluation; the segment with the largest error estimate is then bisected
//! until the summed estimate meets the tolerance or the node budget runs
//! out. The error estimate per segment follows the QUADPACK heuristic.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights for the odd Kronrod abscissae and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const NODES_PER_RULE: usize = 15;

/// Requested accuracy and work limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Maximum number of integrand evaluations.
    pub max_nodes: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
            max_nodes: 2_000_000,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Tolerance {
        Tolerance {
            rel,
            abs,
            ..Tolerance::default()
        }
    }

    /// Target absolute error for an integral of the given magnitude.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Value of an adaptive integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    /// `true` only if `abs_error_estimate` met the requested tolerance.
    pub converged: bool,
}

impl QuadratureResult {
    /// Multiplies value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> QuadratureResult {
        QuadratureResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }

    /// Sum of two independent integrals.
    pub fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            nodes_used: self.nodes_used + other.nodes_used,
            converged: self.converged && other.converged,
        }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Kronrod evaluation on `[a, b]`: `(value, error)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_kronrod - res_gauss) * half;
    let abs_half = half.abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    )
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`.
///
/// `breaks` must be nondecreasing; zero-width panels are skipped. When the
/// node budget is too small even for one rule per panel the result is
/// `NaN` and not converged.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: &Tolerance,
) -> QuadratureResult {
    debug_assert!(
        breaks.windows(2).all(|w| w[0] <= w[1]),
        "breakpoints must be sorted"
    );
    let panels: Vec<(f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        };
    }
    if panels.len() * NODES_PER_RULE > tol.max_nodes {
        return QuadratureResult {
            value: f64::NAN,
            abs_error_estimate: f64::INFINITY,
            nodes_used: 0,
            converged: false,
        };
    }

    let mut heap = BinaryHeap::with_capacity(panels.len() * 2);
    let mut frozen: Vec<Segment> = Vec::new();
    let mut nodes = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (a, b) in panels {
        let (value, error) = gk15(&f, a, b);
        nodes += NODES_PER_RULE;
        total += value;
        total_err += error;
        heap.push(Segment { a, b, value, error });
    }

    let exact_sums = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
    };

    let mut converged = false;
    loop {
        if total_err <= tol.target(total) {
            (total, total_err) = exact_sums(&heap, &frozen);
            if total_err <= tol.target(total) {
                converged = true;
                break;
            }
        }
        if nodes + 2 * NODES_PER_RULE > tol.max_nodes {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || worst.b - worst.a <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        nodes += 2 * NODES_PER_RULE;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    if !converged {
        (total, total_err) = exact_sums(&heap, &frozen);
    }
    QuadratureResult {
        value: total,
        abs_error_estimate: total_err,
        nodes_used: nodes,
        converged,
    }
}

/// Single-interval convenience wrapper around [`integrate_panels`].
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> QuadratureResult {
    integrate_panels(f, &[a, b], tol)
}
