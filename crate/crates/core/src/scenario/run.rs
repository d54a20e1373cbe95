use std::time::Instant;

use super::config::{CheckKind, ScenarioConfig};
use super::report::{CheckOutcome, CheckResult, CheckStatus, RunReport, Summary, Timing, WitnessEntry};
use crate::bounds::{compute_K, BoundConstants};
use crate::error::{Error, Result};
use crate::lab::{
    budget_reports, counterexample_witness_tol, domination_reports, equicontinuity_scan, integral_uc_scan, measure_pair,
    verify_theorem2, verify_theorem2_measured, Family, ModulusTable, TxGrid, Verdict,
};
use crate::linear::LinearFamily;

pub const TOOL_NAME: &str = "pfc";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

struct Outcome {
    status: CheckStatus,
    verdict: Option<Verdict>,
    outcome: CheckOutcome,
}

/// Runs the requested checks in order. Config problems abort; a failing
/// check is recorded and the rest still run.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let family = config.build_family()?;
    let mut warnings = Vec::new();
    let mut results = Vec::with_capacity(config.checks.len());
    let mut check_seconds = Vec::with_capacity(config.checks.len());

    for &check in &config.checks {
        let t = Instant::now();
        let result = match run_check(check, config, &family, &mut warnings) {
            Ok(o) => {
                if o.verdict == Some(Verdict::Inconclusive) {
                    warnings.push(format!("{}: inconclusive verdict", check.as_str()));
                }
                CheckResult { check, status: o.status, verdict: o.verdict, error: None, outcome: Some(o.outcome) }
            }
            Err(e) => CheckResult { check, status: CheckStatus::Error, verdict: None, error: Some(e.to_string()), outcome: None },
        };
        check_seconds.push(t.elapsed().as_secs_f64());
        results.push(result);
    }

    let summary = Summary::from_results(&results);
    Ok(RunReport {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        config: config.clone(),
        results,
        summary,
        warnings,
        timing: Timing { total_seconds: start.elapsed().as_secs_f64(), check_seconds },
    })
}

fn need_linear(family: &Family, check: CheckKind) -> Result<&LinearFamily> {
    family.linear().ok_or_else(|| {
        Error::PreconditionUnmet(format!("`{}` needs a linear family, `{}` is nonlinear", check.as_str(), family.name))
    })
}

fn bound_status(all_passed: bool) -> CheckStatus {
    if all_passed {
        CheckStatus::Passed
    } else {
        CheckStatus::Failed
    }
}

fn modulus(table: ModulusTable) -> Outcome {
    Outcome { status: CheckStatus::Info, verdict: Some(table.verdict), outcome: CheckOutcome::Modulus { table } }
}

fn constants_for(
    fam: &LinearFamily,
    pairs: &[(Vec<f64>, Vec<f64>)],
    config: &ScenarioConfig,
    check: CheckKind,
    warnings: &mut Vec<String>,
) -> Result<BoundConstants> {
    let points: Vec<Vec<f64>> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let c = compute_K(fam, &points, config.bounds.safety)?;
    if c.is_oversized() {
        let msg = format!("{}: K = {:.3} exceeds 10, bounds are very loose", check.as_str(), c.K);
        eprintln!("warning: {msg}");
        warnings.push(msg);
    }
    Ok(c)
}

fn nonempty_pairs(config: &ScenarioConfig, family: &Family, check: CheckKind) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let pairs = config.check_pairs(family.param_box());
    if pairs.is_empty() {
        return Err(Error::PreconditionUnmet(format!("`{}` needs pairs.list or pairs.count", check.as_str())));
    }
    Ok(pairs)
}

fn run_check(check: CheckKind, config: &ScenarioConfig, family: &Family, warnings: &mut Vec<String>) -> Result<Outcome> {
    let tol = config.tol;
    match check {
        CheckKind::Equicontinuity => {
            let g = &config.grid;
            let grid = TxGrid::uniform(family.interval(), g.nt, family.state_dim(), (g.x_lo, g.x_hi), g.nx);
            let ladder = config.ladder.build(family.param_box())?;
            let sampler = config.sampler().with_witnesses(family.witnesses.clone());
            let table = equicontinuity_scan(&*family.field(), &grid, &sampler, family.param_box(), &ladder)?;
            Ok(modulus(table))
        }
        CheckKind::Modulus => {
            let ladder = config.ladder.build(family.param_box())?;
            let sampler = config.sampler().with_witnesses(family.witnesses.clone());
            Ok(modulus(family.solution_modulus(&sampler, &ladder, tol)?))
        }
        CheckKind::IntegralUc => {
            let fam = need_linear(family, check)?;
            let ladder = config.ladder.build(fam.param_box())?;
            let sampler = config.sampler().with_witnesses(family.witnesses.clone());
            let (a, f) = integral_uc_scan(fam, &sampler, &ladder)?;
            let verdict = match (a.verdict, f.verdict) {
                (Verdict::Violates, _) | (_, Verdict::Violates) => Verdict::Violates,
                (Verdict::ConsistentWithUniform, Verdict::ConsistentWithUniform) => Verdict::ConsistentWithUniform,
                _ => Verdict::Inconclusive,
            };
            Ok(Outcome { status: CheckStatus::Info, verdict: Some(verdict), outcome: CheckOutcome::IntegralUc { a, f } })
        }
        CheckKind::Domination => {
            let fam = need_linear(family, check)?;
            let pairs = nonempty_pairs(config, family, check)?;
            let c = constants_for(fam, &pairs, config, check, warnings)?;
            let ms = measure_batch(fam, &pairs, tol, config.bounds.cauchy_grid)?;
            let reports: Vec<_> = ms.iter().flat_map(|m| domination_reports(&c, m, 100.0 * tol)).collect();
            Ok(Outcome {
                status: bound_status(reports.iter().all(|r| r.passed)),
                verdict: None,
                outcome: CheckOutcome::Bounds { constants: Some(c), reports },
            })
        }
        CheckKind::DeltaBudget => {
            let fam = need_linear(family, check)?;
            let pairs = nonempty_pairs(config, family, check)?;
            let c = constants_for(fam, &pairs, config, check, warnings)?;
            let ms = measure_batch(fam, &pairs, tol, config.bounds.cauchy_grid)?;
            let checks = config
                .bounds
                .budget_eps
                .iter()
                .map(|&eps| budget_reports(&c, eps, &ms, 100.0 * tol))
                .collect::<Result<Vec<_>>>()?;
            let ok = checks.iter().flat_map(|b| &b.reports).all(|r| r.passed);
            Ok(Outcome { status: bound_status(ok), verdict: None, outcome: CheckOutcome::Budget { constants: c, checks } })
        }
        CheckKind::Theorem2 => {
            let problem = family.problem().ok_or_else(|| {
                Error::PreconditionUnmet(format!("`theorem2` needs a nonlinear family, `{}` is linear", family.name))
            })?;
            let pairs = nonempty_pairs(config, family, check)?;
            let reports = match config.bounds.eps {
                Some(eps) => verify_theorem2(problem, eps, &pairs, tol)?,
                None => verify_theorem2_measured(problem, &pairs, tol)?,
            };
            Ok(Outcome {
                status: bound_status(reports.iter().all(|r| r.passed)),
                verdict: None,
                outcome: CheckOutcome::Bounds { constants: None, reports },
            })
        }
        CheckKind::Witness => {
            if family.name != "sin-inv" {
                return Err(Error::PreconditionUnmet(format!(
                    "closed-form witnesses exist for `sin-inv` only, not `{}`",
                    family.name
                )));
            }
            let pairs = config
                .witness
                .n
                .iter()
                .map(|&n| Ok(WitnessEntry { n, pair: counterexample_witness_tol(n, tol)? }))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome { status: CheckStatus::Info, verdict: None, outcome: CheckOutcome::Witnesses { pairs } })
        }
    }
}

fn measure_batch(
    fam: &LinearFamily,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
    grid: usize,
) -> Result<Vec<crate::lab::PairMeasurement>> {
    use rayon::prelude::*;
    let ms: Vec<Result<_>> = pairs.par_iter().map(|(a, b)| measure_pair(fam, a, b, tol, grid)).collect();
    ms.into_iter().collect()
}
