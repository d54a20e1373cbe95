use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::modulus::DeltaLadder;
use crate::error::{Error, Result};
use crate::norm::vec_dist;
use crate::param::ParamBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    Uniform,
    Boundary,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPair {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub separation: f64,
    pub stratum: Stratum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    pub seed: u64,
    pub pairs_per_rung: usize,
    /// Share of each rung's pairs anchored next to a face of the box.
    pub boundary_fraction: f64,
    /// Width of the boundary band, relative to the edge length.
    pub boundary_band: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self { seed: 0, pairs_per_rung: 256, boundary_fraction: 0.25, boundary_band: 1e-3 }
    }
}

/// Stratified pair sampler.
///
/// Each rung contributes `pairs_per_rung` pairs with separation below its
/// `δ`; since rungs are read as nested constraint sets over one pool, the
/// resulting modulus is nonincreasing along the ladder.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairSampler {
    pub spec: SamplerSpec,
    pub witnesses: Vec<(Vec<f64>, Vec<f64>)>,
}

impl PairSampler {
    pub fn new(spec: SamplerSpec) -> Self {
        Self { spec, witnesses: Vec::new() }
    }

    pub fn with_seed(seed: u64) -> Self {
        Self::new(SamplerSpec { seed, ..SamplerSpec::default() })
    }

    pub fn with_witnesses(mut self, witnesses: Vec<(Vec<f64>, Vec<f64>)>) -> Self {
        self.witnesses = witnesses;
        self
    }

    pub fn pool(&self, param_box: &ParamBox, ladder: &DeltaLadder) -> Result<Vec<SampledPair>> {
        let s = &self.spec;
        if !(0.0..=1.0).contains(&s.boundary_fraction) || !(s.boundary_band > 0.0 && s.boundary_band < 0.5) {
            return Err(Error::InvalidArgument("sampler boundary settings out of range".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let n_boundary = (s.pairs_per_rung as f64 * s.boundary_fraction).round() as usize;
        let mut pool = Vec::with_capacity(ladder.len() * s.pairs_per_rung + self.witnesses.len());
        for &delta in ladder.rungs() {
            for k in 0..s.pairs_per_rung {
                let stratum = if k < n_boundary { Stratum::Boundary } else { Stratum::Uniform };
                if let Some(p) = draw_pair(&mut rng, param_box, delta, stratum, s.boundary_band) {
                    pool.push(p);
                }
            }
        }
        for (mu1, mu2) in &self.witnesses {
            if param_box.contains(mu1) && param_box.contains(mu2) && mu1 != mu2 {
                pool.push(SampledPair {
                    mu1: mu1.clone(),
                    mu2: mu2.clone(),
                    separation: vec_dist(mu1, mu2),
                    stratum: Stratum::Witness,
                });
            }
        }
        Ok(pool)
    }

    /// `count` pairs for bound checks: even indices are independent uniform
    /// draws, odd ones sit at a log-uniform separation in
    /// `[1e-10, 1e-2]` times the box diameter.
    pub fn check_pairs(&self, param_box: &ParamBox, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed ^ CHECK_STREAM);
        let m = param_box.dim();
        let diam = param_box.diameter();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mu1: Vec<f64> = (0..m).map(|i| interior(&mut rng, param_box.lo()[i], param_box.hi()[i])).collect();
            if out.len() % 2 == 0 {
                let mu2 = (0..m).map(|i| interior(&mut rng, param_box.lo()[i], param_box.hi()[i])).collect();
                out.push((mu1, mu2));
                continue;
            }
            let delta = diam * 10f64.powf(rng.gen_range(-10.0..-2.0));
            if let Some(p) = draw_pair(&mut rng, param_box, delta, Stratum::Uniform, 0.0) {
                out.push((p.mu1, p.mu2));
            }
        }
        out
    }
}

/// Separates the check-pair stream from the ladder pool stream.
const CHECK_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

fn interior(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.gen_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

fn draw_pair(rng: &mut ChaCha8Rng, b: &ParamBox, delta: f64, stratum: Stratum, band: f64) -> Option<SampledPair> {
    let m = b.dim();
    let mut mu1: Vec<f64> = (0..m).map(|i| interior(rng, b.lo()[i], b.hi()[i])).collect();
    if stratum == Stratum::Boundary {
        let i = rng.gen_range(0..m);
        let width = band * b.edge(i);
        mu1[i] = if rng.gen_bool(0.5) {
            interior(rng, b.lo()[i], b.lo()[i] + width)
        } else {
            b.hi()[i] - interior(rng, 0.0, width)
        };
    }
    for _ in 0..64 {
        let r = delta * rng.gen_range(0.0..1.0);
        if r == 0.0 {
            continue;
        }
        let mut dir: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let lead = rng.gen_range(0..m);
        dir[lead] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        for sign in [1.0, -1.0] {
            let mu2: Vec<f64> = mu1.iter().zip(&dir).map(|(x, d)| x + sign * r * d).collect();
            if b.contains(&mu2) {
                let separation = vec_dist(&mu1, &mu2);
                if separation > 0.0 && separation < delta {
                    return Some(SampledPair { mu1, mu2, separation, stratum });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_respects_box_and_rungs() {
        let b = ParamBox::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let ladder = DeltaLadder::geometric(0.1, 1e-4, 4).unwrap();
        let sampler = PairSampler::with_seed(7).with_witnesses(vec![(vec![0.5, 0.0], vec![0.6, 0.0]), (vec![2.0, 0.0], vec![0.5, 0.0])]);
        let pool = sampler.pool(&b, &ladder).unwrap();
        assert_eq!(pool.iter().filter(|p| p.stratum == Stratum::Witness).count(), 1);
        for p in &pool {
            assert!(b.contains(&p.mu1) && b.contains(&p.mu2));
            assert!(p.separation > 0.0);
        }
        let boundary = pool.iter().filter(|p| p.stratum == Stratum::Boundary);
        for p in boundary {
            assert!(b.distance_to_boundary(&p.mu1) < 1e-3 * 2.0);
        }
        assert!(pool.iter().filter(|p| p.separation < 1e-4).count() >= 200);
    }

    #[test]
    fn check_pairs_alternate_far_and_near() {
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        let pairs = PairSampler::with_seed(5).check_pairs(&b, 40);
        assert_eq!(pairs.len(), 40);
        assert_eq!(pairs, PairSampler::with_seed(5).check_pairs(&b, 40));
        for (k, (m1, m2)) in pairs.iter().enumerate() {
            assert!(b.contains(m1) && b.contains(m2));
            if k % 2 == 1 {
                assert!(vec_dist(m1, m2) < 1e-2);
            }
        }
    }

    #[test]
    fn pool_is_seed_deterministic() {
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        let ladder = DeltaLadder::default_for(&b);
        let a = PairSampler::with_seed(3).pool(&b, &ladder).unwrap();
        let c = PairSampler::with_seed(3).pool(&b, &ladder).unwrap();
        let d = PairSampler::with_seed(4).pool(&b, &ladder).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, d);
    }
}
