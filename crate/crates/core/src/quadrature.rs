//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an integration: value and estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
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

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut magnitude = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (fl, fr) = (f(c - x), f(c + x));
        let s = fl + fr;
        kronrod += WGK[j] * s;
        magnitude += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
        magnitude: magnitude * h.abs(),
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_panels: 20_000,
        }
    }
}

/// Integrates `f` over `[a, b]`, starting from one panel per gap between the
/// sorted `breaks` that fall strictly inside the interval, and bisecting the
/// worst panel until the summed error estimate meets
/// `max(abs_tol, rel_tol·|I|, 50·ε·∫|f|)`. The last term is the rounding
/// floor of integrands whose integral cancels far below their magnitude.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!("bad integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let mut nodes: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut heap = BinaryHeap::new();
    let (mut value, mut error, mut magnitude) = (0.0, 0.0, 0.0);
    for w in nodes.windows(2) {
        let p = gk15(&mut f, w[0], w[1]);
        value += p.value;
        error += p.error;
        magnitude += p.magnitude;
        heap.push(p);
    }
    let target = |value: f64, magnitude: f64| {
        opts.abs_tol
            .max(opts.rel_tol * value.abs())
            .max(50.0 * f64::EPSILON * magnitude)
    };
    while error > target(value, magnitude) {
        let worst = heap.pop().expect("non-empty panel heap");
        let m = 0.5 * (worst.a + worst.b);
        // the second test catches panels that can no longer be split
        if heap.len() + 1 >= opts.max_panels || m <= worst.a || m >= worst.b {
            return Err(Error::QuadratureNonconvergence {
                error,
                target: target(value, magnitude),
            });
        }
        let l = gk15(&mut f, worst.a, m);
        let r = gk15(&mut f, m, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        magnitude += l.magnitude + r.magnitude - worst.magnitude;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed drift from the incremental updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Integral { value, error })
}
