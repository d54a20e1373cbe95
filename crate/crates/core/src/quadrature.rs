//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! Integrands may be vector valued; the error of an interval is the max-norm of
//! the difference between the Kronrod and Gauss estimates. Known breakpoints of
//! the integrand split the range before any bisection takes place.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
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

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerance and work limits for [`integrate`] and [`integrate_vec`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute tolerance on the whole integral (max-norm for vector integrands).
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_intervals: 50_000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
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

/// Applies the 15-point Kronrod rule on `[a, b]`; returns the error estimate and
/// the integral magnitude scale (`∫|f|` under the same rule).
fn kronrod<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    out: &mut [f64],
    buf: &mut [f64],
) -> (f64, f64) {
    let dim = out.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut gauss = vec![0.0; dim];
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut mag = 0.0;
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let is_gauss = k % 2 == 1;
        let wg = if is_gauss { WG[k / 2] } else { 0.0 };
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sign in nodes {
            f(center + sign * half * x, buf);
            for i in 0..dim {
                out[i] += w * buf[i];
                gauss[i] += wg * buf[i];
            }
            mag += w * crate::norm::vec_norm(buf);
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        out[i] *= half;
        err = err.max((out[i] - gauss[i] * half).abs());
    }
    (err, mag * half.abs())
}

/// Integrates a `dim`-valued function over `[a, b]` (either orientation),
/// splitting first at the interior points of `breaks`.
pub fn integrate_vec<F>(
    dim: usize,
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(vec![0.0; dim]);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| t > lo && t < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    let mut total_mag = 0.0;
    for w in edges.windows(2) {
        let mut value = vec![0.0; dim];
        let (error, mag) = kronrod(&mut f, w[0], w[1], &mut value, &mut buf);
        total_err += error;
        total_mag += mag;
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }

    // Below this level the Kronrod/Gauss gap is rounding noise.
    let floor = 50.0 * f64::EPSILON * total_mag;
    while total_err > opts.abs_tol.max(floor) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure { a, b, tol: opts.abs_tol, estimate: total_err });
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(Panel { error: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.error).sum();
            continue;
        }
        let mut left = vec![0.0; dim];
        let mut right = vec![0.0; dim];
        let (el, _) = kronrod(&mut f, worst.a, mid, &mut left, &mut buf);
        let (er, _) = kronrod(&mut f, mid, worst.b, &mut right, &mut buf);
        total_err += el + er - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: left, error: el });
        heap.push(Panel { a: mid, b: worst.b, value: right, error: er });
    }

    // Sum in position order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut sum = vec![0.0; dim];
    for p in &panels {
        for (s, v) in sum.iter_mut().zip(&p.value) {
            *s += v;
        }
    }
    sum.iter_mut().for_each(|v| *v *= sign);
    Ok(sum)
}

/// Scalar convenience wrapper over [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(1, |t, out: &mut [f64]| out[0] = f(t), a, b, breaks, opts).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, &[], QuadOptions::default()).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_orientation_negates() {
        let f = |x: f64| x.exp();
        let fwd = integrate(f, 0.0, 1.0, &[], QuadOptions::default()).unwrap();
        let bwd = integrate(f, 1.0, 0.0, &[], QuadOptions::default()).unwrap();
        assert_eq!(fwd, -bwd);
        assert!((fwd - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn kink_resolved_by_bisection() {
        let v = integrate(|x| (x - 0.3).abs(), 0.0, 1.0, &[], QuadOptions::with_tol(1e-12)).unwrap();
        let exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn jump_at_breakpoint() {
        let f = |x: f64| if x < 0.5 { 1.0 } else { 3.0 };
        let v = integrate(f, 0.0, 1.0, &[0.5], QuadOptions::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn vector_integrand() {
        let v = integrate_vec(
            2,
            |t, out: &mut [f64]| {
                out[0] = t.sin();
                out[1] = t.cos();
            },
            0.0,
            std::f64::consts::PI,
            &[],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12);
        assert!(v[1].abs() < 1e-12);
    }

    #[test]
    fn failure_when_budget_exhausted() {
        let opts = QuadOptions { abs_tol: 1e-14, max_intervals: 4 };
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 1.0, &[], opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
