//! Adaptive Gauss–Kronrod quadrature (7–15 pair).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("invalid integration bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("quadrature did not converge: value {value:.6e}, achieved error {error:.3e} (requested {requested:.3e})")]
    DidNotConverge {
        value: f64,
        error: f64,
        requested: f64,
    },
}

/// Integral estimate with the achieved absolute-error bound.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

// Kronrod-15 abscissae (positive half) and weights, with the embedded
// Gauss-7 weights. Values from the QUADPACK QK15 rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_26,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut result_gauss = fc * WG[3];
    let mut result_kronrod = fc * WGK[7];
    let mut resabs = result_kronrod.abs();

    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = result_kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let result = result_kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();

    let mut err = ((result_kronrod - result_gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(f64::EPSILON * 50.0 * resabs);
    }
    (result, err)
}

struct Segment {
    value: f64,
    error: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Integrate `f` over `[a, b]` until the error bound drops below
/// `max(abs_tol, rel_tol * |integral|)`. Globally adaptive: the segment
/// with the largest error estimate is bisected first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature, QuadError> {
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(QuadError::InvalidBounds(a, b));
    }
    const MAX_SEGMENTS: usize = 4096;

    let (v, e) = qk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        value: v,
        error: e,
        a,
        b,
    });
    let mut total_value = v;
    let mut total_error = e;
    let mut evals = 15;

    while total_error > abs_tol.max(rel_tol * total_value.abs()) && heap.len() < MAX_SEGMENTS {
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable at f64 resolution
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        evals += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            value: v1,
            error: e1,
            a: worst.a,
            b: mid,
        });
        heap.push(Segment {
            value: v2,
            error: e2,
            a: mid,
            b: worst.b,
        });
    }

    // recompute totals to shed accumulated cancellation
    total_value = heap.iter().map(|s| s.value).sum();
    total_error = heap.iter().map(|s| s.error).sum();

    if total_error > abs_tol.max(rel_tol * total_value.abs()) {
        return Err(QuadError::DidNotConverge {
            value: total_value,
            error: total_error,
            requested: abs_tol.max(rel_tol * total_value.abs()),
        });
    }
    Ok(Quadrature {
        value: total_value,
        error: total_error,
        evals,
    })
}
