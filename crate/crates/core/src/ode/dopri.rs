//! Dormand–Prince 5(4) with PI step control and the standard fourth-order
//! continuous extension.

use super::trajectory::{DenseStep, Trajectory};
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants.
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SolverOptions {
    /// Used as both the absolute and the relative tolerance.
    pub tol: f64,
    pub state_bound: Option<f64>,
    pub max_steps: usize,
}

impl SolverOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, state_bound: None, max_steps: 500_000 }
    }
}

struct Work {
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
}

impl Work {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            y_stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` across `[a, b]` in both directions,
/// restarting at each breakpoint strictly inside the interval.
pub(crate) fn integrate<F>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    (a, b): (f64, f64),
    breakpoints: &[f64],
    opts: SolverOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(a < b) || !(a..=b).contains(&t0) {
        return Err(Error::InvalidInterval { a, b });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let dim = y0.len();
    if dim == 0 {
        return Err(Error::InvalidArgument("empty state vector".into()));
    }
    let floor = 1e-13 * (b - a);

    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&t| t > a && t < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();

    let mut fwd = Leg::new(t0, y0);
    let mut stops: Vec<f64> = inner.iter().copied().filter(|&t| t > t0).collect();
    stops.push(b);
    for (i, &end) in stops.iter().enumerate() {
        let start = if i == 0 { t0 } else { stops[i - 1] };
        if end > start {
            fwd.run(&mut rhs, start, end, floor, opts)?;
        }
    }

    let mut bwd = Leg::new(t0, y0);
    let mut stops: Vec<f64> = inner.iter().rev().copied().filter(|&t| t < t0).collect();
    stops.push(a);
    for (i, &end) in stops.iter().enumerate() {
        let start = if i == 0 { t0 } else { stops[i - 1] };
        if end < start {
            bwd.run(&mut rhs, start, end, floor, opts)?;
        }
    }

    // Backward nodes arrive in descending order; flip and splice at t0.
    let mut nodes: Vec<f64> = bwd.nodes.iter().rev().copied().collect();
    let mut states: Vec<f64> = bwd.states.chunks_exact(dim).rev().flatten().copied().collect();
    let mut segments: Vec<DenseStep> = bwd.segments.into_iter().rev().collect();
    nodes.pop();
    states.truncate(states.len() - dim);
    nodes.extend(fwd.nodes);
    states.extend(fwd.states);
    segments.extend(fwd.segments);

    let accuracy = fwd.max_err.max(bwd.max_err).max(f64::MIN_POSITIVE);
    Ok(Trajectory { dim, t0, nodes, states, segments, accuracy })
}

struct Leg {
    nodes: Vec<f64>,
    states: Vec<f64>,
    segments: Vec<DenseStep>,
    y: Vec<f64>,
    max_err: f64,
}

impl Leg {
    fn new(t0: f64, y0: &[f64]) -> Self {
        Self { nodes: vec![t0], states: y0.to_vec(), segments: Vec::new(), y: y0.to_vec(), max_err: 0.0 }
    }

    fn run<F>(&mut self, rhs: &mut F, start: f64, end: f64, floor: f64, opts: SolverOptions) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let dim = self.y.len();
        let dir = (end - start).signum();
        let (lo, hi) = if dir > 0.0 { (start, end) } else { (end, start) };
        // Stage times stay strictly inside the leg so piecewise data is sampled
        // from the piece being integrated, not its neighbour.
        let eta = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        let clamp = |t: f64| t.clamp(lo + eta, hi - eta);
        let tol = opts.tol;

        let mut w = Work::new(dim);
        let mut t = start;
        rhs(clamp(t), &self.y, &mut w.k[0]);
        let mut h = dir * initial_step(rhs, t, &self.y, &w.k[0], (end - start).abs(), tol, &clamp);
        let mut fac_old: f64 = 1e-4;
        let mut rejected = false;
        let mut steps = 0usize;

        loop {
            let remaining = end - t;
            if remaining * dir <= 0.0 {
                break;
            }
            let mut last = false;
            if (h.abs() * 1.01) >= remaining.abs() {
                h = remaining;
                last = true;
            }
            if h.abs() < floor || steps >= opts.max_steps {
                return Err(Error::StepFailure { t, h: h.abs(), floor });
            }
            steps += 1;

            let err = stages(rhs, t, h, &self.y, &mut w, tol, &clamp);
            if err <= 1.0 {
                let fac11 = err.powf(EXPO1);
                let mut fac = fac11 / fac_old.powf(BETA);
                fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFE));
                let mut h_new = h / fac;
                fac_old = err.max(1e-4);
                if rejected {
                    h_new = dir * h_new.abs().min(h.abs());
                }
                rejected = false;

                let t_new = if last { end } else { t + h };
                let mut local: f64 = 0.0;
                for i in 0..dim {
                    let e = h * (E1 * w.k[0][i] + E3 * w.k[2][i] + E4 * w.k[3][i] + E5 * w.k[4][i]
                        + E6 * w.k[5][i]
                        + E7 * w.k[6][i]);
                    local = local.max(e.abs());
                }
                self.max_err = self.max_err.max(local);

                let mut coef = vec![0.0; 5 * dim];
                for i in 0..dim {
                    let y0 = self.y[i];
                    let y1 = w.y_new[i];
                    let dy = y1 - y0;
                    let bspl = h * w.k[0][i] - dy;
                    coef[i] = y0;
                    coef[dim + i] = dy;
                    coef[2 * dim + i] = bspl;
                    coef[3 * dim + i] = dy - h * w.k[6][i] - bspl;
                    coef[4 * dim + i] = h
                        * (D1 * w.k[0][i] + D3 * w.k[2][i] + D4 * w.k[3][i] + D5 * w.k[4][i]
                            + D6 * w.k[5][i]
                            + D7 * w.k[6][i]);
                }
                self.segments.push(DenseStep { t_from: t, h: t_new - t, coef });

                std::mem::swap(&mut self.y, &mut w.y_new);
                w.k.swap(0, 6);
                t = t_new;
                self.nodes.push(t);
                self.states.extend_from_slice(&self.y);

                if let Some(bound) = opts.state_bound {
                    let norm = crate::norm::vec_norm(&self.y);
                    if norm > bound {
                        return Err(Error::DomainEscape { t, norm, bound });
                    }
                }
                h = h_new;
            } else {
                let fac11 = if err.is_finite() { err.powf(EXPO1) } else { 1.0 / FAC_MIN * SAFE };
                h /= (1.0 / FAC_MIN).min(fac11 / SAFE);
                rejected = true;
            }
        }
        Ok(())
    }
}

/// Evaluates stages 2–7 (stage 1 is in `w.k[0]`), writes the proposal into
/// `w.y_new` and returns the scaled error norm.
fn stages<F, C>(rhs: &mut F, t: f64, h: f64, y: &[f64], w: &mut Work, tol: f64, clamp: &C) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
    C: Fn(f64) -> f64,
{
    let dim = y.len();
    let Work { k, y_stage, y_new } = w;
    let [k1, k2, k3, k4, k5, k6, k7] = k;

    for i in 0..dim {
        y_stage[i] = y[i] + h * A21 * k1[i];
    }
    rhs(clamp(t + C2 * h), y_stage, k2);
    for i in 0..dim {
        y_stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    rhs(clamp(t + C3 * h), y_stage, k3);
    for i in 0..dim {
        y_stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    rhs(clamp(t + C4 * h), y_stage, k4);
    for i in 0..dim {
        y_stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    rhs(clamp(t + C5 * h), y_stage, k5);
    for i in 0..dim {
        y_stage[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    rhs(clamp(t + h), y_stage, k6);
    for i in 0..dim {
        y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
    }
    rhs(clamp(t + h), y_new, k7);

    let mut err: f64 = 0.0;
    for i in 0..dim {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sk = tol + tol * y[i].abs().max(y_new[i].abs());
        let r = e.abs() / sk;
        if !r.is_finite() {
            return f64::INFINITY;
        }
        err = err.max(r);
    }
    err
}

fn initial_step<F, C>(rhs: &mut F, t: f64, y: &[f64], f0: &[f64], hmax: f64, tol: f64, clamp: &C) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
    C: Fn(f64) -> f64,
{
    let dim = y.len();
    let sk = |i: usize| tol + tol * y[i].abs();
    let rms = |v: &dyn Fn(usize) -> f64| ((0..dim).map(|i| v(i).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let dnf = rms(&|i| f0[i] / sk(i));
    let dny = rms(&|i| y[i] / sk(i));
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
    h = h.min(hmax);

    let y1: Vec<f64> = (0..dim).map(|i| y[i] + h * f0[i]).collect();
    let mut f1 = vec![0.0; dim];
    rhs(clamp(t + h), &y1, &mut f1);
    let der2 = rms(&|i| (f1[i] - f0[i]) / sk(i)) / h;
    let der12 = der2.abs().max(dnf);
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    (100.0 * h).min(h1).min(hmax)
}
