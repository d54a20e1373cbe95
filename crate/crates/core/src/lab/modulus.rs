use serde::{Deserialize, Serialize};

use super::sampler::SampledPair;
use crate::error::{Error, Result};
use crate::param::ParamBox;

/// Strictly decreasing list of positive separations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DeltaLadder(Vec<f64>);

impl DeltaLadder {
    pub fn new(rungs: Vec<f64>) -> Result<Self> {
        if rungs.is_empty() {
            return Err(Error::InvalidArgument("delta ladder is empty".into()));
        }
        if rungs.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::InvalidArgument("delta ladder rungs must be positive".into()));
        }
        if rungs.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("delta ladder must be strictly decreasing".into()));
        }
        Ok(Self(rungs))
    }

    /// `count` rungs spaced geometrically from `first` down to `last`.
    pub fn geometric(first: f64, last: f64, count: usize) -> Result<Self> {
        if count == 1 {
            return Self::new(vec![first]);
        }
        if count == 0 || !(first > last) {
            return Err(Error::InvalidArgument("geometric ladder needs count >= 1 and first > last".into()));
        }
        let ratio = (last / first).powf(1.0 / (count - 1) as f64);
        let mut rungs: Vec<f64> = (0..count).map(|k| first * ratio.powi(k as i32)).collect();
        rungs[count - 1] = last;
        Self::new(rungs)
    }

    /// Ten rungs from `1e-1` to `1e-4` of the box diameter.
    pub fn default_for(param_box: &ParamBox) -> Self {
        let d = param_box.diameter();
        Self::geometric(1e-1 * d, 1e-4 * d, 10).expect("box diameter is positive")
    }

    pub fn rungs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for DeltaLadder {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DeltaLadder> for Vec<f64> {
    fn from(l: DeltaLadder) -> Self {
        l.0
    }
}

/// Reading of an empirical modulus of continuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The modulus does not decay: a witness of non-uniform continuity.
    Violates,
    /// The modulus decays along the ladder.
    ConsistentWithUniform,
    Inconclusive,
}

impl Verdict {
    /// Decay to a quarter of the first rung reads as uniform; keeping three
    /// quarters or more reads as a violation.
    pub fn classify(omega: &[f64]) -> Self {
        let (Some(&first), Some(&last)) = (omega.first(), omega.last()) else {
            return Self::Inconclusive;
        };
        if first == 0.0 || last <= 0.25 * first {
            Self::ConsistentWithUniform
        } else if last >= 0.75 * first {
            Self::Violates
        } else {
            Self::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Violates => "violates",
            Self::ConsistentWithUniform => "consistent-with-uniform",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// A pair of parameters and the measured distance between the objects they
/// select.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub separation: f64,
    pub gap: f64,
}

/// `ω(δ)` along a ladder: the largest measured gap among pooled pairs closer
/// than each `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub delta_ladder: Vec<f64>,
    pub omega: Vec<f64>,
    pub pair_counts: Vec<usize>,
    /// Pair attaining each rung's value.
    pub worst: Vec<Option<WitnessPair>>,
    pub verdict: Verdict,
}

impl ModulusTable {
    /// Reduces per-pair gaps over nested rungs. `gaps[i]` belongs to `pool[i]`.
    pub fn from_gaps(ladder: &DeltaLadder, pool: &[SampledPair], gaps: &[f64]) -> Self {
        let rungs = ladder.rungs();
        let mut omega = vec![0.0; rungs.len()];
        let mut counts = vec![0usize; rungs.len()];
        let mut worst: Vec<Option<usize>> = vec![None; rungs.len()];
        for (i, (pair, &gap)) in pool.iter().zip(gaps).enumerate() {
            for (k, &delta) in rungs.iter().enumerate() {
                if pair.separation >= delta {
                    break;
                }
                counts[k] += 1;
                if worst[k].is_none() || gap > omega[k] {
                    omega[k] = gap;
                    worst[k] = Some(i);
                }
            }
        }
        let worst = worst
            .into_iter()
            .map(|w| {
                w.map(|i| WitnessPair {
                    mu1: pool[i].mu1.clone(),
                    mu2: pool[i].mu2.clone(),
                    separation: pool[i].separation,
                    gap: gaps[i],
                })
            })
            .collect();
        let verdict = Verdict::classify(&omega);
        Self { delta_ladder: rungs.to_vec(), omega, pair_counts: counts, worst, verdict }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::sampler::Stratum;

    fn pair(sep: f64) -> SampledPair {
        SampledPair { mu1: vec![0.5], mu2: vec![0.5 + sep], separation: sep, stratum: Stratum::Uniform }
    }

    #[test]
    fn ladder_validation() {
        assert!(DeltaLadder::new(vec![]).is_err());
        assert!(DeltaLadder::new(vec![0.1, 0.1]).is_err());
        assert!(DeltaLadder::new(vec![0.1, -0.1]).is_err());
        let l = DeltaLadder::geometric(1e-1, 1e-4, 10).unwrap();
        assert_eq!(l.len(), 10);
        assert_eq!(l.rungs()[0], 1e-1);
        assert_eq!(l.rungs()[9], 1e-4);
        let d = DeltaLadder::default_for(&ParamBox::interval(-2.0, 2.0).unwrap());
        assert!((d.rungs()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(Verdict::classify(&[1.0, 1.0]), Verdict::Violates);
        assert_eq!(Verdict::classify(&[1.0, 0.1]), Verdict::ConsistentWithUniform);
        assert_eq!(Verdict::classify(&[1.0, 0.5]), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(&[0.0, 0.0]), Verdict::ConsistentWithUniform);
        assert_eq!(Verdict::classify(&[]), Verdict::Inconclusive);
    }

    #[test]
    fn nested_rungs_reduce_monotonically() {
        let ladder = DeltaLadder::new(vec![1.0, 0.1, 0.01]).unwrap();
        let pool = vec![pair(0.5), pair(0.05), pair(0.005), pair(0.2)];
        let gaps = vec![3.0, 2.0, 1.0, 5.0];
        let t = ModulusTable::from_gaps(&ladder, &pool, &gaps);
        assert_eq!(t.omega, vec![5.0, 2.0, 1.0]);
        assert_eq!(t.pair_counts, vec![4, 2, 1]);
        assert_eq!(t.worst[1].as_ref().unwrap().separation, 0.05);
        assert_eq!(t.verdict, Verdict::ConsistentWithUniform);
    }
}
