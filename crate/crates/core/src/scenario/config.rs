use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::{build_family, builtin_families, DeltaLadder, Family, FamilyParams, Model, PairSampler, SamplerSpec};
use crate::linear::{LinearFamily, Smoothness};
use crate::ode::DEFAULT_TOL;
use crate::param::ParamBox;
use crate::piecewise::{ParamPiecewise, PiecewisePoly};

/// Checks a scenario may request, run in the order listed in the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Equicontinuity,
    Modulus,
    IntegralUc,
    Domination,
    Theorem2,
    Witness,
    DeltaBudget,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Equicontinuity => "equicontinuity",
            Self::Modulus => "modulus",
            Self::IntegralUc => "integral-uc",
            Self::Domination => "domination",
            Self::Theorem2 => "theorem2",
            Self::Witness => "witness",
            Self::DeltaBudget => "delta-budget",
        }
    }

    /// Checks whose failure makes the run exit non-zero.
    pub fn is_gate(self) -> bool {
        matches!(self, Self::Domination | Self::Theorem2 | Self::DeltaBudget)
    }

    fn uses_ladder(self) -> bool {
        matches!(self, Self::Equicontinuity | Self::Modulus | Self::IntegralUc)
    }

    fn uses_pairs(self) -> bool {
        matches!(self, Self::Domination | Self::Theorem2 | Self::DeltaBudget)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

/// A catalog family with its knobs, or `name = "inline"` with coefficient tables.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<Smoothness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_box: Option<ParamBox>,
    /// Coefficient matrix `A(t, μ)`, inline families only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ParamPiecewise>,
    /// Forcing `Φ(t, μ)`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<ParamPiecewise>,
    /// Initial value, read at `t0`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<ParamPiecewise>,
}

pub const INLINE_FAMILY: &str = "inline";

/// Separation ladder: explicit rungs, or a geometric ladder relative to the
/// box diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    pub first: f64,
    pub last: f64,
    pub rungs: usize,
}

impl Default for LadderSpec {
    fn default() -> Self {
        Self { deltas: None, first: 1e-1, last: 1e-4, rungs: 10 }
    }
}

impl LadderSpec {
    pub fn build(&self, param_box: &ParamBox) -> Result<DeltaLadder> {
        match &self.deltas {
            Some(d) => DeltaLadder::new(d.clone()),
            None => {
                let diam = param_box.diameter();
                DeltaLadder::geometric(self.first * diam, self.last * diam, self.rungs)
            }
        }
    }
}

/// Sampler settings; the seed is mandatory whenever anything is drawn at random.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub pairs_per_rung: usize,
    pub boundary_fraction: f64,
    pub boundary_band: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        let d = SamplerSpec::default();
        Self {
            seed: None,
            pairs_per_rung: d.pairs_per_rung,
            boundary_fraction: d.boundary_fraction,
            boundary_band: d.boundary_band,
        }
    }
}

/// Parameter pairs for the bound checks: an explicit list plus `count` seeded draws.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairsConfig {
    pub list: Vec<[Vec<f64>; 2]>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessConfig {
    pub n: Vec<u32>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { n: (1..=5).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    /// Multiplier on the largest sampled seminorm when forming `K`.
    pub safety: f64,
    pub cauchy_grid: usize,
    /// Fixed field gap for the Gronwall check; the measured gap when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub budget_eps: Vec<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            safety: crate::bounds::DEFAULT_SAFETY,
            cauchy_grid: crate::lab::CAUCHY_GRID,
            eps: None,
            budget_eps: vec![0.1, 1.0, 10.0],
        }
    }
}

/// `(t, x)` grid for the equicontinuity scan: `nt` times, `nx` points per
/// state axis on `[x_lo, x_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nt: usize,
    pub nx: usize,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nt: 17, nx: 5, x_lo: -2.0, x_hi: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: OutputFormat,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// A scenario file. Every field except `family` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: FamilySpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub ladder: LadderSpec,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub pairs: PairsConfig,
    #[serde(default)]
    pub witness: WitnessConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(path, format!("must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn for_family(name: &str) -> Self {
        Self {
            name: None,
            family: FamilySpec { name: name.to_string(), ..FamilySpec::default() },
            tol: DEFAULT_TOL,
            checks: Vec::new(),
            ladder: LadderSpec::default(),
            sampler: SamplerConfig::default(),
            pairs: PairsConfig::default(),
            witness: WitnessConfig::default(),
            bounds: BoundsConfig::default(),
            grid: GridConfig::default(),
            output: OutputConfig::default(),
        }
    }

    /// Parses without validating, so overrides can be applied first.
    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let path = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_else(|| "<root>".into());
            config_err(path, message)
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg = Self::parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a file without validating it.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_toml(&text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    fn needs_seed(&self) -> bool {
        self.checks.iter().any(|c| c.uses_ladder())
            || (self.pairs.count > 0 && self.checks.iter().any(|c| c.uses_pairs()))
    }

    pub fn validate(&self) -> Result<()> {
        positive("tol", self.tol)?;
        let fam = &self.family;
        let inline = fam.name == INLINE_FAMILY;
        if !inline && !builtin_families().iter().any(|f| f.name == fam.name) {
            return Err(config_err("family.name", format!("unknown family `{}`", fam.name)));
        }
        if inline {
            if fam.a.is_none() {
                return Err(config_err("family.a", "inline family needs a coefficient table"));
            }
            if fam.interval.is_none() || fam.param_box.is_none() {
                return Err(config_err("family", "inline family needs interval and param_box"));
            }
        } else {
            for (key, set) in [
                ("interval", fam.interval.is_some()),
                ("t0", fam.t0.is_some()),
                ("param_box", fam.param_box.is_some()),
                ("a", fam.a.is_some()),
                ("phi", fam.phi.is_some()),
                ("x0", fam.x0.is_some()),
            ] {
                if set {
                    return Err(config_err(format!("family.{key}"), "only inline families take coefficient data"));
                }
            }
        }
        if fam.name == "random-linear" && fam.seed.is_none() {
            return Err(config_err("family.seed", "random-linear needs a seed"));
        }
        for (key, v) in [("a_budget", fam.a_budget), ("phi_budget", fam.phi_budget), ("x0_bound", fam.x0_bound)] {
            if let Some(v) = v {
                positive(&format!("family.{key}"), v)?;
            }
        }

        let mut seen = HashSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            if !seen.insert(*c) {
                return Err(config_err(format!("checks[{i}]"), format!("`{}` requested twice", c.as_str())));
            }
        }
        if self.needs_seed() && self.sampler.seed.is_none() {
            return Err(config_err("sampler.seed", "random sampling requested without a seed"));
        }

        match &self.ladder.deltas {
            Some(d) => {
                DeltaLadder::new(d.clone()).map_err(|e| config_err("ladder.deltas", e.to_string()))?;
            }
            None => {
                positive("ladder.first", self.ladder.first)?;
                positive("ladder.last", self.ladder.last)?;
                if self.ladder.rungs == 0 || (self.ladder.rungs > 1 && !(self.ladder.first > self.ladder.last)) {
                    return Err(config_err("ladder", "needs rungs >= 1 and first > last"));
                }
            }
        }
        let s = &self.sampler;
        if s.pairs_per_rung == 0 {
            return Err(config_err("sampler.pairs_per_rung", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&s.boundary_fraction) {
            return Err(config_err("sampler.boundary_fraction", "must lie in [0, 1]"));
        }
        if !(s.boundary_band > 0.0 && s.boundary_band < 0.5) {
            return Err(config_err("sampler.boundary_band", "must lie in (0, 0.5)"));
        }
        if self.witness.n.contains(&0) {
            return Err(config_err("witness.n", "witness indices start at 1"));
        }
        if !(self.bounds.safety >= 1.0) || !self.bounds.safety.is_finite() {
            return Err(config_err("bounds.safety", "must be finite and >= 1"));
        }
        if self.bounds.cauchy_grid < 2 {
            return Err(config_err("bounds.cauchy_grid", "must be at least 2"));
        }
        if let Some(eps) = self.bounds.eps {
            positive("bounds.eps", eps)?;
        }
        for (i, &eps) in self.bounds.budget_eps.iter().enumerate() {
            positive(&format!("bounds.budget_eps[{i}]"), eps)?;
        }
        if self.grid.nt == 0 || self.grid.nx == 0 || !(self.grid.x_lo <= self.grid.x_hi) {
            return Err(config_err("grid", "needs nt, nx >= 1 and x_lo <= x_hi"));
        }
        Ok(())
    }

    pub fn sampler(&self) -> PairSampler {
        let s = &self.sampler;
        PairSampler::new(SamplerSpec {
            seed: s.seed.unwrap_or(0),
            pairs_per_rung: s.pairs_per_rung,
            boundary_fraction: s.boundary_fraction,
            boundary_band: s.boundary_band,
        })
    }

    /// Explicit pairs followed by the seeded draws.
    pub fn check_pairs(&self, param_box: &ParamBox) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = self.pairs.list.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        if self.pairs.count > 0 {
            pairs.extend(self.sampler().check_pairs(param_box, self.pairs.count));
        }
        pairs
    }

    pub fn build_family(&self) -> Result<Family> {
        let fam = &self.family;
        if fam.name != INLINE_FAMILY {
            let params = FamilyParams {
                seed: fam.seed,
                n: fam.n,
                smoothness: fam.smoothness,
                a_budget: fam.a_budget,
                phi_budget: fam.phi_budget,
                x0_bound: fam.x0_bound,
            };
            return build_family(&fam.name, &params).map_err(|e| config_err("family", e.to_string()));
        }
        let [a, b] = fam.interval.expect("validated");
        let param_box = fam.param_box.clone().expect("validated");
        let coeff = fam.a.clone().expect("validated");
        let n = coeff.rows;
        let phi = fam.phi.clone().unwrap_or_else(|| ParamPiecewise::zero(n, n));
        let p = phi.cols;
        let x0 = fam.x0.clone().unwrap_or_else(|| identity_table(n, p, a, b));
        let t0 = fam.t0.unwrap_or(a);
        let linear = LinearFamily::from_tables(coeff, phi, x0, (a, b), t0, param_box)
            .map_err(|e| config_err("family", e.to_string()))?;
        Ok(Family { name: INLINE_FAMILY.to_string(), model: Model::Linear(linear), witnesses: Vec::new() })
    }
}

fn identity_table(n: usize, p: usize, a: f64, b: f64) -> ParamPiecewise {
    let e = nalgebra::DMatrix::from_fn(n, p, |i, j| if i == j { 1.0 } else { 0.0 });
    ParamPiecewise {
        rows: n,
        cols: p,
        terms: vec![crate::piecewise::ParamTerm { mu_powers: Vec::new(), poly: PiecewisePoly::constant(&e, a, b) }],
    }
}
