use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pfc::lab::{builtin_families, counterexample_witness_tol};
use pfc::scenario::{self, CheckKind, OutputFormat, ScenarioConfig};
use pfc::suite::{self, SuiteOptions};

#[derive(Parser)]
#[command(name = "pfc", version, about = "Continuity-in-parameter checks for parametrised Cauchy problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file, used when `run` is given no path.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; without it the JSON report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides every seed in the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, env = "PFC_JOBS")]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { path: Option<PathBuf> },
    /// Closed-form witness pairs with measured gaps.
    Witness {
        #[arg(long, default_value = "sin-inv")]
        family: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    ListFamilies,
    /// Run the bundled acceptance suite.
    Check {
        #[arg(long, required = true)]
        all: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> pfc::Result<u8> {
    match &cli.command {
        Command::Run { path } => {
            let path = path.as_ref().or(cli.config.as_ref()).ok_or_else(|| pfc::Error::Config {
                path: "<cli>".into(),
                message: "run needs a scenario path or --config".into(),
            })?;
            let mut config = ScenarioConfig::read(path)?;
            apply_overrides(cli, &mut config);
            run_config(cli, &config)
        }
        Command::Witness { family, n } => {
            let mut config = ScenarioConfig::for_family(family);
            config.checks = vec![CheckKind::Witness];
            config.witness.n = (1..=*n).collect();
            apply_overrides(cli, &mut config);
            if cli.out.is_none() && !matches!(cli.format, Some(Format::Json)) {
                config.validate()?;
                println!("n,mu1,mu2,separation,gap");
                for k in 1..=*n {
                    if family != "sin-inv" {
                        return Err(pfc::Error::UnknownFamily(format!("{family} has no closed-form witnesses")));
                    }
                    let w = counterexample_witness_tol(k, config.tol)?;
                    println!("{k},{:.16e},{:.16e},{:.16e},{:.16e}", w.mu1[0], w.mu2[0], w.separation, w.gap);
                }
                return Ok(0);
            }
            run_config(cli, &config)
        }
        Command::ListFamilies => {
            for f in builtin_families() {
                println!("{:<16} {:<10} {}", f.name, f.kind, f.summary);
            }
            Ok(0)
        }
        Command::Check { .. } => {
            let mut opts = SuiteOptions::default();
            if let Some(s) = cli.seed {
                opts.seed = s;
            }
            if let Some(t) = cli.tol {
                opts.tol = t;
            }
            let report = suite::run_suite(&opts);
            if !cli.quiet {
                for c in &report.criteria {
                    eprintln!("{}", c.line());
                    if let Some(e) = &c.error {
                        eprintln!("  error: {e}");
                    }
                }
            }
            let json = scenario::to_json_string(&report)?;
            match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("suite.json"), json)?;
                }
                None => print!("{json}"),
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn apply_overrides(cli: &Cli, config: &mut ScenarioConfig) {
    if let Some(seed) = cli.seed {
        config.sampler.seed = Some(seed);
        if config.family.name == "random-linear" {
            config.family.seed = Some(seed);
        }
    }
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(out) = &cli.out {
        config.output.dir = Some(out.clone());
    }
    if let Some(f) = cli.format {
        config.output.format = f.into();
    }
}

fn run_config(cli: &Cli, config: &ScenarioConfig) -> pfc::Result<u8> {
    let report = scenario::run(config)?;
    if !cli.quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        for r in &report.results {
            let verdict = r.verdict.map(|v| format!(" ({})", v.as_str())).unwrap_or_default();
            eprintln!("{:<15} {:?}{verdict}", r.check.as_str(), r.status);
            if let Some(e) = &r.error {
                eprintln!("  error: {e}");
            }
        }
    }
    match &config.output.dir {
        Some(dir) => {
            for path in scenario::emit(&report, dir, config.output.format)? {
                if !cli.quiet {
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        None => print!("{}", scenario::to_json_string(&report)?),
    }
    Ok(report.exit_code() as u8)
}
