//! The bundled acceptance suite behind `pfc check --all`.
//!
//! Each criterion returns named metrics and a pass flag computed from them.
//! Wall-clock figures are collected separately under `timing` so the rest of
//! the report is a pure function of the seed.

use std::f64::consts::{E, PI};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bounds::{compute_K, BoundConstants, BoundReport, DEFAULT_SAFETY};
use crate::error::Result;
use crate::lab::{
    budget_reports, build_family, counterexample_witness_tol, domination_reports, equicontinuity_scan, h_lipschitz_pairs,
    lipschitz_scan, matrix_gap, measure_pair, mu_sin_inv_x, nilpotent, scalar_exp, verify_theorem2_measured, DeltaLadder,
    FamilyParams, PairMeasurement, PairSampler, TxGrid, Verdict, CAUCHY_GRID,
};
use crate::linear::{
    cauchy_matrix, fundamental_matrix, inverse_flow, lp_norm, random_linear, solve_linear_direct, variation_of_constants,
    LinearFamily, RandomLinearSpec,
};
use crate::norm::matrix_dist;
use crate::ode::DEFAULT_TOL;
use crate::piecewise::PiecewisePoly;
use crate::quadrature::{integrate, QuadOptions};
use crate::scenario::{run, strip_timing, to_json_string, CheckKind, ScenarioConfig, TOOL_NAME, TOOL_VERSION};

pub const DEFAULT_SUITE_SEED: u64 = 20240917;

/// Tolerance added to every bound before comparing.
pub const BOUND_SLACK: f64 = 1e-6;

pub const CRITERIA: [&str; 12] = [
    "counterexample-witnesses",
    "gronwall-domination",
    "flow-domination",
    "rho-domination",
    "forced-solution-domination",
    "delta-budget-soundness",
    "method-equivalence",
    "flow-identities",
    "closed-forms",
    "scanner-discrimination",
    "holder",
    "determinism",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SUITE_SEED, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub metrics: Map<String, Value>,
    pub error: Option<String>,
}

impl CriterionReport {
    fn new(id: usize) -> Self {
        Self { id, name: CRITERIA[id - 1].to_string(), passed: true, metrics: Map::new(), error: None }
    }

    fn metric(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.metrics.insert(key.to_string(), v.into());
        self
    }

    /// Records `value <= limit` as a metric and folds it into `passed`.
    fn at_most(&mut self, key: &str, value: f64, limit: f64) -> &mut Self {
        self.passed &= value <= limit;
        self.metric(key, value)
    }

    fn require(&mut self, cond: bool) -> &mut Self {
        self.passed &= cond;
        self
    }

    pub fn metric_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }

    pub fn line(&self) -> String {
        format!("{} criterion {:>2} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SuiteTiming {
    pub total_seconds: f64,
    pub criterion_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tool: String,
    pub version: String,
    pub options: SuiteOptions,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
    pub timing: SuiteTiming,
}

fn wrap(id: usize, body: impl FnOnce(&mut CriterionReport) -> Result<()>) -> CriterionReport {
    let mut r = CriterionReport::new(id);
    if let Err(e) = body(&mut r) {
        r.passed = false;
        r.error = Some(e.to_string());
    }
    r
}

/// Every parameter pair measured on one random family of the shared batch.
#[derive(Debug, Clone)]
pub struct BatchEntry {
    pub family_seed: u64,
    pub constants: BoundConstants,
    pub measurements: Vec<PairMeasurement>,
}

/// 200 random 3×3 families with 500 pairs in total, shared by the bound criteria.
#[derive(Debug, Clone)]
pub struct LinearBatch {
    pub entries: Vec<BatchEntry>,
}

pub const BATCH_FAMILIES: usize = 200;
pub const BATCH_PAIRS: usize = 500;

impl LinearBatch {
    pub fn generate(opts: &SuiteOptions) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let seeds: Vec<u64> = (0..BATCH_FAMILIES).map(|_| rng.gen()).collect();
        let entries: Vec<Result<BatchEntry>> = seeds
            .par_iter()
            .enumerate()
            .map(|(k, &family_seed)| {
                let count = BATCH_PAIRS / BATCH_FAMILIES + usize::from(k < BATCH_PAIRS % BATCH_FAMILIES);
                let fam = random_linear(&RandomLinearSpec::new(family_seed, 3))?;
                let pairs = PairSampler::with_seed(family_seed).check_pairs(fam.param_box(), count);
                let points: Vec<Vec<f64>> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
                let constants = compute_K(&fam, &points, DEFAULT_SAFETY)?;
                let measurements = pairs
                    .iter()
                    .map(|(a, b)| measure_pair(&fam, a, b, opts.tol, CAUCHY_GRID))
                    .collect::<Result<Vec<_>>>()?;
                Ok(BatchEntry { family_seed, constants, measurements })
            })
            .collect();
        Ok(Self { entries: entries.into_iter().collect::<Result<_>>()? })
    }

    pub fn pair_count(&self) -> usize {
        self.entries.iter().map(|e| e.measurements.len()).sum()
    }

    fn reports(&self) -> Vec<BoundReport> {
        self.entries
            .iter()
            .flat_map(|e| e.measurements.iter().flat_map(|m| domination_reports(&e.constants, m, BOUND_SLACK)))
            .collect()
    }
}

fn tally(r: &mut CriterionReport, reports: &[BoundReport], names: &[&str]) {
    for name in names {
        let sel: Vec<&BoundReport> = reports.iter().filter(|b| b.bound_name == *name).collect();
        let failures = sel.iter().filter(|b| !b.passed).count();
        let worst = sel.iter().map(|b| b.margin).fold(f64::INFINITY, f64::min);
        r.metric(&format!("{name}.checked"), sel.len());
        r.metric(&format!("{name}.failures"), failures);
        r.metric(&format!("{name}.min_margin"), worst);
        r.require(failures == 0 && !sel.is_empty());
    }
}

/// Witness separations match `1/(πn(2n+1))` and gaps equal 1.
pub fn witnesses(opts: &SuiteOptions) -> CriterionReport {
    wrap(1, |r| {
        let mut sep_err = 0.0f64;
        let mut gap_err = 0.0f64;
        for n in 1..=20 {
            let w = counterexample_witness_tol(n, opts.tol)?;
            let direct = w.mu1[0] - w.mu2[0];
            let nf = f64::from(n);
            sep_err = sep_err.max((w.separation - direct).abs() / direct);
            sep_err = sep_err.max((w.separation - 1.0 / (PI * nf * (2.0 * nf + 1.0))).abs() / direct);
            gap_err = gap_err.max((w.gap - 1.0).abs());
        }
        r.at_most("max_relative_separation_error", sep_err, 1e-12);
        r.at_most("max_gap_error", gap_err, 1e-7);
        Ok(())
    })
}

/// Gronwall bound with the measured field gap on 500 seeded pairs.
pub fn gronwall(opts: &SuiteOptions) -> CriterionReport {
    wrap(2, |r| {
        let problem = mu_sin_inv_x();
        let pairs = PairSampler::with_seed(opts.seed).check_pairs(problem.param_box(), 500);
        let reports = verify_theorem2_measured(&problem, &pairs, opts.tol)?;
        let failures = reports.iter().filter(|b| b.empirical > b.theoretical + BOUND_SLACK).count();
        r.metric("pairs", reports.len());
        r.metric("failures", failures);
        r.metric("min_margin", reports.iter().map(|b| b.margin).fold(f64::INFINITY, f64::min));
        r.require(failures == 0 && reports.len() == 500);
        Ok(())
    })
}

pub fn flow_domination(batch: &LinearBatch) -> CriterionReport {
    wrap(3, |r| {
        r.metric("families", batch.entries.len());
        r.metric("pairs", batch.pair_count());
        tally(r, &batch.reports(), &["flow-norm", "inverse-norm", "flow-diff", "inverse-diff", "cauchy-norm", "cauchy-diff"]);
        Ok(())
    })
}

pub fn rho_domination(batch: &LinearBatch) -> CriterionReport {
    wrap(4, |r| {
        tally(r, &batch.reports(), &["flow-rho", "solution-rho"]);
        Ok(())
    })
}

pub fn forced_domination(batch: &LinearBatch) -> CriterionReport {
    wrap(5, |r| {
        let max_phi = batch
            .entries
            .iter()
            .flat_map(|e| &e.measurements)
            .map(|m| m.seminorms1.phi.max(m.seminorms2.phi))
            .fold(0.0, f64::max);
        r.at_most("max_phi_seminorm", max_phi, 2.0);
        tally(r, &batch.reports(), &["solution-norm", "solution-diff", "solution-diff-sharp"]);
        Ok(())
    })
}

pub fn budget_soundness(batch: &LinearBatch) -> CriterionReport {
    wrap(6, |r| {
        for eps in [0.1, 1.0, 10.0] {
            let mut qualifying = 0;
            let mut failures = 0;
            for e in &batch.entries {
                let check = budget_reports(&e.constants, eps, &e.measurements, BOUND_SLACK)?;
                qualifying += check.qualifying;
                failures += check.reports.iter().filter(|b| !b.passed).count();
            }
            r.metric(&format!("eps={eps}.qualifying"), qualifying);
            r.metric(&format!("eps={eps}.failures"), failures);
            r.require(failures == 0);
        }
        Ok(())
    })
}

fn bundled_linear() -> Result<Vec<(String, LinearFamily)>> {
    let mut out = Vec::new();
    for info in crate::lab::builtin_families().iter().filter(|f| f.kind == "linear") {
        let fam = build_family(info.name, &FamilyParams::default())?;
        out.push((info.name.to_string(), fam.linear().expect("linear kind").clone()));
    }
    Ok(out)
}

fn sample_params(fam: &LinearFamily, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>> {
    let b = fam.param_box();
    (0..count)
        .map(|_| (0..b.dim()).map(|i| b.lo()[i] + b.edge(i) * rng.gen_range(0.01..0.99)).collect())
        .collect()
}

/// Variation of constants against the direct solve.
pub fn method_equivalence(opts: &SuiteOptions) -> CriterionReport {
    wrap(7, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 7);
        let mut fams = bundled_linear()?;
        for _ in 0..50 {
            let seed: u64 = rng.gen();
            fams.push((format!("random-{seed}"), random_linear(&RandomLinearSpec::new(seed, 3))?));
        }
        let jobs: Vec<(usize, Vec<f64>)> =
            fams.iter().enumerate().flat_map(|(k, (_, f))| sample_params(f, &mut rng, 3).into_iter().map(move |mu| (k, mu))).collect();
        let gaps = jobs
            .par_iter()
            .map(|(k, mu)| {
                let fam = &fams[*k].1;
                matrix_gap(&variation_of_constants(fam, mu, opts.tol)?, &solve_linear_direct(fam, mu, opts.tol)?)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        r.metric("families", fams.len());
        r.metric("solves", jobs.len());
        r.at_most("max_sup_difference", gaps.iter().copied().fold(0.0, f64::max), 1e-6);
        Ok(())
    })
}

/// `‖ZX - E‖` on the sup grid and the cocycle identity on random triples.
pub fn flow_identities(opts: &SuiteOptions) -> CriterionReport {
    wrap(8, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 8);
        let mut fams = bundled_linear()?;
        for _ in 0..5 {
            let seed: u64 = rng.gen();
            fams.push((format!("random-{seed}"), random_linear(&RandomLinearSpec::new(seed, 3))?));
        }
        let mut inverse_err = 0.0f64;
        let mut cocycle_err = 0.0f64;
        let mut triples = 0;
        for (_, fam) in &fams {
            let mu = sample_params(fam, &mut rng, 1).remove(0);
            let x = fundamental_matrix(fam, &mu, opts.tol)?;
            let z = inverse_flow(fam, &mu, opts.tol)?;
            let e = DMatrix::identity(fam.n(), fam.n());
            let (a, b) = fam.interval();
            for k in 0..=1024 {
                let t = a + (b - a) * k as f64 / 1024.0;
                inverse_err = inverse_err.max(matrix_dist(&(z.eval(t)? * x.eval(t)?), &e));
            }
            for _ in 0..100 {
                let [t, s, q] = [0; 3].map(|_| rng.gen_range(a..=b));
                let lhs = cauchy_matrix(&x, &z, t, s)? * cauchy_matrix(&x, &z, s, q)?;
                cocycle_err = cocycle_err.max(matrix_dist(&lhs, &cauchy_matrix(&x, &z, t, q)?));
                triples += 1;
            }
        }
        r.metric("families", fams.len());
        r.metric("triples", triples);
        r.at_most("max_inverse_error", inverse_err, 1e-7);
        r.at_most("max_cocycle_error", cocycle_err, 1e-7);
        Ok(())
    })
}

pub fn closed_forms(opts: &SuiteOptions) -> CriterionReport {
    wrap(9, |r| {
        let fam = scalar_exp();
        let x1 = fundamental_matrix(&fam, &[1.0], opts.tol)?;
        let x2 = fundamental_matrix(&fam, &[0.5], opts.tol)?;
        let v1 = x1.eval(1.0)?[(0, 0)];
        let v2 = x2.eval(1.0)?[(0, 0)];
        let err = (v1 - E).abs().max((v2 - 0.5f64.exp()).abs()).max(((v1 - v2) - (E - 0.5f64.exp())).abs());
        r.at_most("scalar_exp_error", err, 1e-8);
        let fam = nilpotent();
        let x = fundamental_matrix(&fam, &[0.5], opts.tol)?;
        let mut nil_err = 0.0f64;
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            let exact = DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]);
            nil_err = nil_err.max(matrix_dist(&x.eval(t)?, &exact));
        }
        r.at_most("nilpotent_error", nil_err, 1e-10);
        Ok(())
    })
}

pub fn scanner_discrimination(opts: &SuiteOptions) -> CriterionReport {
    wrap(10, |r| {
        let none = FamilyParams::default();
        let sin_inv = build_family("sin-inv", &none)?;
        let ladder = DeltaLadder::default_for(sin_inv.param_box());
        let sampler = PairSampler::with_seed(opts.seed).with_witnesses(sin_inv.witnesses.clone());
        let t = equicontinuity_scan(&*sin_inv.field(), &TxGrid::default_for(&sin_inv), &sampler, sin_inv.param_box(), &ladder)?;
        let min_omega = t.omega.iter().copied().fold(f64::INFINITY, f64::min);
        r.metric("sin_inv.min_omega", min_omega);
        r.metric("sin_inv.verdict", t.verdict.as_str());
        r.require(min_omega >= 1.0 && t.verdict == Verdict::Violates);

        let h = build_family("mu-sin-pi", &none)?;
        let grid = TxGrid::default_for(&h);
        let sampler = PairSampler::with_seed(opts.seed).with_witnesses(h.witnesses.clone());
        let t = equicontinuity_scan(&*h.field(), &grid, &sampler, h.param_box(), &ladder)?;
        let last = *t.omega.last().expect("ladder is nonempty");
        r.at_most("h.last_omega", last, 0.05);
        r.metric("h.verdict", t.verdict.as_str());
        r.require(t.verdict == Verdict::ConsistentWithUniform);

        let lip = lipschitz_scan(&*h.field(), &grid, &h_lipschitz_pairs(200))?;
        r.metric("h.lipschitz_lower_estimate", lip);
        r.require(lip > 100.0);
        Ok(())
    })
}

/// Random scalar piecewise polynomial on `[0, 1]`.
pub fn random_scalar_poly(rng: &mut ChaCha8Rng) -> PiecewisePoly {
    let pieces = rng.gen_range(1..=4);
    let mut breaks: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.05..0.95)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.insert(0, 0.0);
    breaks.push(1.0);
    breaks.dedup();
    let degree = rng.gen_range(0..=3);
    let pieces = (0..breaks.len() - 1).map(|_| (0..=degree).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect()).collect();
    PiecewisePoly { rows: 1, cols: 1, breaks, pieces }
}

pub const HOLDER_PAIRS: usize = 1000;

pub fn holder(opts: &SuiteOptions) -> CriterionReport {
    wrap(11, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 11);
        let pairs: Vec<(PiecewisePoly, PiecewisePoly)> =
            (0..HOLDER_PAIRS).map(|_| (random_scalar_poly(&mut rng), random_scalar_poly(&mut rng))).collect();
        let quad = QuadOptions::with_tol(1e-12);
        for p in [1.5, 2.0, 3.0] {
            let q = p / (p - 1.0);
            let margins = pairs
                .par_iter()
                .map(|(f, g)| {
                    let mut breaks = f.interior_breaks().to_vec();
                    breaks.extend_from_slice(g.interior_breaks());
                    breaks.sort_by(f64::total_cmp);
                    let fv = |t: f64| f.eval(t)[(0, 0)];
                    let gv = |t: f64| g.eval(t)[(0, 0)];
                    let lhs = integrate(|t| (fv(t) * gv(t)).abs(), 0.0, 1.0, &breaks, quad)?;
                    let rhs = lp_norm(fv, p, (0.0, 1.0), &breaks, quad)? * lp_norm(gv, q, (0.0, 1.0), &breaks, quad)?;
                    Ok(rhs - lhs)
                })
                .collect::<Vec<Result<f64>>>()
                .into_iter()
                .collect::<Result<Vec<f64>>>()?;
            let failures = margins.iter().filter(|&&m| m < -1e-9).count();
            r.metric(&format!("p={p}.failures"), failures);
            r.metric(&format!("p={p}.min_margin"), margins.iter().copied().fold(f64::INFINITY, f64::min));
            r.require(failures == 0);
        }
        r.metric("pairs", HOLDER_PAIRS);
        Ok(())
    })
}

/// Scenarios run by the determinism criterion.
pub fn bundled_scenarios(seed: u64) -> Vec<ScenarioConfig> {
    let mut witness = ScenarioConfig::for_family("sin-inv");
    witness.name = Some("sin-inv witnesses".into());
    witness.checks = vec![CheckKind::Witness, CheckKind::Equicontinuity, CheckKind::Modulus];
    witness.sampler.seed = Some(seed);
    witness.sampler.pairs_per_rung = 32;

    let mut linear = ScenarioConfig::for_family("random-linear");
    linear.name = Some("random linear bounds".into());
    linear.family.seed = Some(seed);
    linear.checks = vec![CheckKind::Domination, CheckKind::DeltaBudget, CheckKind::IntegralUc];
    linear.sampler.seed = Some(seed);
    linear.sampler.pairs_per_rung = 16;
    linear.pairs.count = 8;

    let mut gronwall = ScenarioConfig::for_family("mu-sin-inv-x");
    gronwall.name = Some("gronwall".into());
    gronwall.checks = vec![CheckKind::Theorem2];
    gronwall.sampler.seed = Some(seed);
    gronwall.pairs.count = 16;
    vec![witness, linear, gronwall]
}

fn scenario_json(configs: &[ScenarioConfig]) -> Result<String> {
    let mut out = String::new();
    for c in configs {
        out.push_str(&strip_timing(&to_json_string(&run(c)?)?)?);
    }
    Ok(out)
}

pub fn determinism(opts: &SuiteOptions) -> CriterionReport {
    wrap(12, |r| {
        let configs = bundled_scenarios(opts.seed);
        let a = scenario_json(&configs)?;
        let b = scenario_json(&configs)?;
        r.metric("scenarios", configs.len());
        r.metric("bytes", a.len());
        r.metric("identical", a == b);
        r.require(a == b);
        Ok(())
    })
}

fn batch_failure(id: usize, e: &crate::Error) -> CriterionReport {
    let mut r = CriterionReport::new(id);
    r.passed = false;
    r.error = Some(e.to_string());
    r
}

/// Runs all twelve criteria in order.
pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    let start = Instant::now();
    let mut criteria = Vec::with_capacity(12);
    let mut seconds = Vec::with_capacity(12);
    let mut timed = |f: &mut dyn FnMut() -> CriterionReport| {
        let t = Instant::now();
        criteria.push(f());
        seconds.push(t.elapsed().as_secs_f64());
    };
    timed(&mut || witnesses(opts));
    timed(&mut || gronwall(opts));
    let t = Instant::now();
    let batch = LinearBatch::generate(opts);
    let batch_seconds = t.elapsed().as_secs_f64();
    match &batch {
        Ok(b) => {
            timed(&mut || flow_domination(b));
            timed(&mut || rho_domination(b));
            timed(&mut || forced_domination(b));
            timed(&mut || budget_soundness(b));
        }
        Err(e) => (3..=6).for_each(|id| timed(&mut || batch_failure(id, e))),
    }
    timed(&mut || method_equivalence(opts));
    timed(&mut || flow_identities(opts));
    timed(&mut || closed_forms(opts));
    timed(&mut || scanner_discrimination(opts));
    timed(&mut || holder(opts));
    timed(&mut || determinism(opts));
    seconds[2] += batch_seconds;
    let passed = criteria.iter().all(|c| c.passed);
    SuiteReport {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        options: *opts,
        criteria,
        passed,
        timing: SuiteTiming { total_seconds: start.elapsed().as_secs_f64(), criterion_seconds: seconds },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        let opts = SuiteOptions::default();
        for r in [witnesses(&opts), closed_forms(&opts)] {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn report_lines() {
        let mut r = CriterionReport::new(3);
        assert_eq!(r.line(), "PASS criterion  3 flow-domination");
        r.at_most("x", 2.0, 1.0);
        assert!(r.line().starts_with("FAIL"));
        assert_eq!(r.metric_f64("x"), Some(2.0));
    }
}
