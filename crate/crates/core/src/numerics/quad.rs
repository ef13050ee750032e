//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Kronrod nodes are interior to each panel, so integrable endpoint
//! singularities are never evaluated at the singular point.

use super::Tolerance;
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // error estimate is at the floating-point floor; refining cannot help
    at_roundoff: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    let mut at_roundoff = false;
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * abs_sum;
        if floor >= error {
            error = floor;
            at_roundoff = true;
        }
    }
    if !value.is_finite() {
        error = f64::INFINITY;
        at_roundoff = false;
    }
    Panel {
        a,
        b,
        value,
        error,
        at_roundoff,
    }
}

/// Adaptive integration over the union of consecutive panels `[p0,p1], [p1,p2], ...`.
///
/// Breakpoints let callers split at known kinks (piecewise densities, window
/// edges) so the refinement does not have to discover them.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<QuadEstimate> {
    if breakpoints.len() < 2 {
        return Ok(QuadEstimate {
            value: 0.0,
            error_bound: 0.0,
            subdivisions: 0,
        });
    }
    for w in breakpoints.windows(2) {
        if !(w[0] <= w[1]) {
            return Err(Error::Domain(format!(
                "integration limits must be ordered, got [{}, {}]",
                w[0], w[1]
            )));
        }
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(&f, w[0], w[1]));
        }
    }
    let mut subdivisions = 0;
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadEstimate {
                value,
                error_bound: error,
                subdivisions,
            });
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => {
                return Ok(QuadEstimate {
                    value: 0.0,
                    error_bound: 0.0,
                    subdivisions,
                })
            }
        };
        if worst.at_roundoff {
            return Ok(QuadEstimate {
                value,
                error_bound: error,
                subdivisions,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let unresolvable = !(mid > worst.a && mid < worst.b);
        if subdivisions >= tol.max_iter || unresolvable {
            return Err(Error::NoConvergence {
                estimate: value,
                error_bound: error,
                iterations: subdivisions,
            });
        }
        heap.pop();
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        subdivisions += 1;
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_pieces(f, &[a, b], tol).map(|q| q.value)
}

/// Integral over `[a, ∞)` through the map `x = a + t/(1-t)`, `t ∈ [0, 1)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<f64> {
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let v = f(a + t / one_minus) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(mapped, 0.0, 1.0, tol)
}
