use crate::error::{Error, Result};

/// Continuous extension of one accepted Dormand–Prince step.
///
/// `coef` stores the five coefficient vectors `r1..r5` back to back; the state
/// at `t = t_from + θ h` is `r1 + θ(r2 + (1-θ)(r3 + θ(r4 + (1-θ) r5)))`.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub t_from: f64,
    pub h: f64,
    pub coef: Vec<f64>,
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let dim = out.len();
        let theta = (t - self.t_from) / self.h;
        let theta1 = 1.0 - theta;
        let c = &self.coef;
        for i in 0..dim {
            out[i] = c[i]
                + theta
                    * (c[dim + i]
                        + theta1 * (c[2 * dim + i] + theta * (c[3 * dim + i] + theta1 * c[4 * dim + i])));
        }
    }
}

/// Numerical solution over a closed interval with dense output.
///
/// Nodes ascend strictly and cover `[a, b]` including `t0`; `segments[k]` spans
/// `nodes[k]..nodes[k + 1]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub(crate) dim: usize,
    pub(crate) t0: f64,
    pub(crate) nodes: Vec<f64>,
    pub(crate) states: Vec<f64>,
    pub(crate) segments: Vec<DenseStep>,
    pub(crate) accuracy: f64,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().expect("trajectory has nodes"))
    }

    /// Stored state at `nodes[k]`.
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }

    /// Largest accepted local error estimate (always positive).
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// `max_t ‖x(t)‖` over the stored nodes.
    pub fn sup_norm(&self) -> f64 {
        crate::norm::vec_norm(&self.states)
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Evaluates the dense output at `t`, reproducing stored states exactly at nodes.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let k = self.nodes.partition_point(|&x| x <= t);
        if self.nodes[k - 1] == t {
            out.copy_from_slice(self.state(k - 1));
        } else {
            self.segments[k - 1].eval_into(t, out);
        }
        Ok(())
    }
}

/// Free-function form of [`Trajectory::eval`].
pub fn eval_trajectory(traj: &Trajectory, t: f64) -> Result<Vec<f64>> {
    traj.eval(t)
}
