use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use drfcheck_core::causal::{classical_bound_in, membership, StrategySpace};
use drfcheck_core::inequality::{
    check_no_signaling, equivalent_to_canonical, evaluate_vbc, optimize_settings, LinearFunctional,
};
use drfcheck_core::spacetime::{check_requirements, fiber_delay};
use drfcheck_core::stats::{estimate, nosignal_stat_check, sample_counts_with, significance};
use drfcheck_core::{compute_behavior_with_angles, AngleSettings, Behavior, NoiseModel};

use crate::config::{Format, RunConfig, Sweep};
use crate::error::CliError;
use crate::report::{
    BoundSummary, ComparisonRow, CountSummary, FiberDelay, OptimizeSummary, Report,
    SignificanceCheck, SpacetimeSummary, SweepPoint,
};
use crate::{load_functional, BUNDLED_VBC};

/// Exact-probability tolerance for the no-signaling check.
const NO_SIGNALING_TOL: f64 = 1e-12;
/// Angle tolerance, in radians, for matching optimized settings.
const ANGLE_TOL: f64 = 1e-3;

/// Published values for the experimental run.
pub const PUBLISHED_VISIBILITY: f64 = 0.98;
pub const PUBLISHED_WERNER_P: f64 = 0.92;
pub const PUBLISHED: [(&str, f64, f64); 4] = [
    ("term1", 0.490, 0.004),
    ("term2", 0.492, 0.004),
    ("term3", 0.825, 0.009),
    ("total", 1.807, 0.010),
];
pub const PUBLISHED_SIGMAS: f64 = 5.7;

#[derive(Debug, Parser)]
#[command(
    name = "drfcheck",
    version,
    about = "Quantum-switch simulator and VBC causal-inequality checker"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (JSON). Defaults to $DRFCHECK_CONFIG_DIR/drfcheck.json, then built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides sampling.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// KEY=A:B:STEP with KEY one of visibility, werner_p (exact only, endpoints included).
    #[arg(long, global = true)]
    pub sweep: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact behavior, VBC terms and no-signaling check.
    Exact,
    /// Sampled counts, estimates and statistical no-signaling check.
    Sample,
    /// Classical bound of the configured functional.
    Bound,
    /// Causal-polytope membership of the configured behavior.
    Membership,
    /// Optimize measurement angles for the configured noise.
    Optimize,
    /// Check the spacetime scenario of the configuration.
    Spacetime,
    /// Canonical pipeline compared against the published numbers.
    ReproducePaper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Sample => "sample",
            Command::Bound => "bound",
            Command::Membership => "membership",
            Command::Optimize => "optimize",
            Command::Spacetime => "spacetime",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

/// Text to emit and where.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub path: Option<PathBuf>,
    /// Additional files, such as the count-table sidecar.
    pub extra: Vec<(PathBuf, String)>,
}

impl Rendered {
    pub fn write(&self) -> Result<(), CliError> {
        let write = |path: &Path, body: &str| {
            std::fs::write(path, body)
                .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
        };
        match &self.path {
            Some(p) => write(p, &self.body)?,
            None => print!("{}", self.body),
        }
        for (p, body) in &self.extra {
            write(p, body)?;
        }
        Ok(())
    }
}

/// Loads and adjusts the configuration according to the flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::resolve(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.sampling.seed = seed;
    }
    if let Some(format) = cli.format {
        config.output.format = format;
    }
    if let Some(path) = &cli.output {
        config.output.path = Some(path.clone());
    }
    Ok(config)
}

pub fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    let config = effective_config(cli)?;
    let sweeps = cli
        .sweep
        .iter()
        .map(|s| Sweep::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    if !sweeps.is_empty() && cli.command != Command::Exact {
        return Err(CliError::config("--sweep is only supported by `exact`"));
    }
    if sweeps.len() > 2 || (sweeps.len() == 2 && sweeps[0].key == sweeps[1].key) {
        return Err(CliError::config("at most one sweep per key"));
    }
    let format = config.output.format;
    let path = config.output.path.clone();
    let csv_ok = matches!(cli.command, Command::Sample | Command::ReproducePaper)
        || (cli.command == Command::Exact && !sweeps.is_empty());
    if format == Format::Csv && !csv_ok {
        return Err(CliError::config(format!(
            "csv output is available for sample, reproduce-paper and exact sweeps, not {}",
            cli.command.name()
        )));
    }
    if format == Format::Csv && cli.command == Command::Sample && path.is_none() {
        return Err(CliError::config(
            "sample --format csv needs --output for the counts and sidecar",
        ));
    }

    if cli.command == Command::Sample && format == Format::Csv {
        let behavior = configured_behavior(&config)?;
        let table = sample(&behavior, &config)?;
        let path = path.expect("checked above");
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        let sidecar =
            serde_json::to_string_pretty(&table.sidecar()).expect("sidecar serializes") + "\n";
        let sidecar_path = sidecar_path(&path);
        return Ok(Rendered {
            body: String::from_utf8(buf).expect("csv is utf-8"),
            path: Some(path),
            extra: vec![(sidecar_path, sidecar)],
        });
    }

    let report = run(cli.command, config, &sweeps)?;
    let body = match format {
        Format::Json => report.to_json(),
        Format::Csv => report_csv(&report),
    };
    Ok(Rendered {
        body,
        path,
        extra: Vec::new(),
    })
}

/// `counts.csv` → `counts.csv.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn configured_behavior(config: &RunConfig) -> Result<Behavior, CliError> {
    Ok(compute_behavior_with_angles(
        &config.noise,
        &config.angles(),
    )?)
}

fn sample(
    behavior: &Behavior,
    config: &RunConfig,
) -> Result<drfcheck_core::stats::CountTable, CliError> {
    let s = &config.sampling;
    Ok(sample_counts_with(
        behavior,
        s.rounds,
        config.noise.efficiency,
        s.seed,
        s.mode,
        s.shards,
    )?)
}

/// Runs one subcommand and builds its report.
pub fn run(command: Command, mut config: RunConfig, sweeps: &[Sweep]) -> Result<Report, CliError> {
    if command == Command::ReproducePaper {
        config.noise.visibility = PUBLISHED_VISIBILITY;
        config.noise.werner_p = PUBLISHED_WERNER_P;
        config.angles = None;
    }
    let mut report = Report::new(command.name(), config.clone());
    let results = &mut report.results;
    match command {
        Command::Exact if !sweeps.is_empty() => {
            let mut points = Vec::new();
            let outer = &sweeps[0];
            let inner = sweeps.get(1);
            for &a in &outer.values {
                let inner_values = inner.map_or(vec![f64::NAN], |s| s.values.clone());
                for &b in &inner_values {
                    let mut noise = config.noise;
                    outer.apply(&mut noise, a);
                    if let Some(s) = inner {
                        s.apply(&mut noise, b);
                    }
                    noise.validate().map_err(CliError::as_config)?;
                    let behavior = compute_behavior_with_angles(&noise, &config.angles())?;
                    points.push(SweepPoint {
                        visibility: noise.visibility,
                        werner_p: noise.werner_p,
                        vbc: evaluate_vbc(&behavior),
                    });
                }
            }
            results.sweep = Some(points);
        }
        Command::Exact => {
            let behavior = configured_behavior(&config)?;
            results.vbc = Some(evaluate_vbc(&behavior));
            results.no_signaling = Some(check_no_signaling(&behavior, NO_SIGNALING_TOL));
        }
        Command::Sample => {
            let behavior = configured_behavior(&config)?;
            let table = sample(&behavior, &config)?;
            results.vbc = Some(evaluate_vbc(&behavior));
            results.counts = Some(CountSummary {
                sidecar: table.sidecar(),
                detected: table.detected(),
            });
            results.nosignal_stat = Some(nosignal_stat_check(&table));
            results.estimate = Some(estimate(&table)?);
        }
        Command::Bound => {
            let (functional, warnings) = match &config.functional {
                Some(path) => load_functional(path)?,
                None => (bundled_vbc(), Vec::new()),
            };
            report.warnings.extend(warnings);
            let space = StrategySpace::new(config.first_outcome);
            report.results.bound = Some(BoundSummary {
                functional: functional.name().to_string(),
                first_outcome: config.first_outcome,
                result: classical_bound_in(&functional, &space),
            });
        }
        Command::Membership => {
            let behavior = configured_behavior(&config)?;
            results.vbc = Some(evaluate_vbc(&behavior));
            results.membership = Some(membership(&behavior)?);
        }
        Command::Optimize => {
            let result = optimize_settings(&config.noise)?;
            results.optimize = Some(OptimizeSummary {
                equivalent_to_canonical: equivalent_to_canonical(&result.angles, ANGLE_TOL),
                result,
            });
        }
        Command::Spacetime => {
            let scenario = config.spacetime.as_ref().ok_or_else(|| {
                CliError::config("`spacetime` needs a spacetime section in the config")
            })?;
            let fibers = scenario
                .fibers
                .iter()
                .map(|f| {
                    Ok(FiberDelay {
                        label: f.label.clone(),
                        length_m: f.length_m,
                        group_index: scenario.group_index,
                        delay_s: fiber_delay(f.length_m, scenario.group_index)?,
                    })
                })
                .collect::<Result<Vec<_>, drfcheck_core::Error>>()
                .map_err(CliError::as_config)?;
            let checks = check_requirements(&scenario.events, &scenario.requirements)
                .map_err(CliError::as_config)?;
            results.spacetime = Some(SpacetimeSummary {
                fibers,
                report: checks,
            });
        }
        Command::ReproducePaper => {
            let ideal =
                compute_behavior_with_angles(&NoiseModel::IDEAL, &AngleSettings::CANONICAL)?;
            results.ideal = Some(evaluate_vbc(&ideal));
            let behavior = configured_behavior(&config)?;
            let exact = evaluate_vbc(&behavior);
            results.vbc = Some(exact);
            results.no_signaling = Some(check_no_signaling(&behavior, NO_SIGNALING_TOL));
            let table = sample(&behavior, &config)?;
            let est = estimate(&table)?;
            results.counts = Some(CountSummary {
                sidecar: table.sidecar(),
                detected: table.detected(),
            });
            results.nosignal_stat = Some(nosignal_stat_check(&table));
            let space = StrategySpace::new(config.first_outcome);
            results.bound = Some(BoundSummary {
                functional: "vbc".into(),
                first_outcome: config.first_outcome,
                result: classical_bound_in(&bundled_vbc(), &space),
            });
            let (total, std) = (PUBLISHED[3].1, PUBLISHED[3].2);
            results.significance_check = Some(SignificanceCheck {
                total,
                std,
                sigmas: significance(total, std),
            });
            let model = [
                (exact.term1, est.term1),
                (exact.term2, est.term2),
                (exact.term3, est.term3),
                (exact.total, est.total),
            ];
            let mut rows: Vec<ComparisonRow> = PUBLISHED
                .iter()
                .zip(model)
                .map(|(&(name, value, std), (ex, sampled))| ComparisonRow {
                    quantity: name.into(),
                    published: value,
                    published_std: Some(std),
                    model_exact: Some(ex),
                    model_sampled: sampled.value,
                    model_sampled_std: Some(sampled.std),
                })
                .collect();
            rows.push(ComparisonRow {
                quantity: "sigmas_above_bound".into(),
                published: PUBLISHED_SIGMAS,
                published_std: None,
                model_exact: None,
                model_sampled: est.sigmas_above_bound,
                model_sampled_std: None,
            });
            results.estimate = Some(est);
            results.comparison = Some(rows);
        }
    }
    Ok(report)
}

fn bundled_vbc() -> LinearFunctional {
    crate::parse_functional(BUNDLED_VBC)
        .map(|(f, _)| f)
        .expect("bundled functional is valid")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV rendering of sweep points or the comparison table.
fn report_csv(report: &Report) -> String {
    let mut out = String::new();
    if let Some(points) = &report.results.sweep {
        out.push_str("visibility,werner_p,term1,term2,term3,total\n");
        for p in points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.visibility, p.werner_p, p.vbc.term1, p.vbc.term2, p.vbc.term3, p.vbc.total
            ));
        }
    } else if let Some(rows) = &report.results.comparison {
        out.push_str(
            "quantity,published,published_std,model_exact,model_sampled,model_sampled_std\n",
        );
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.quantity,
                r.published,
                fmt_opt(r.published_std),
                fmt_opt(r.model_exact),
                r.model_sampled,
                fmt_opt(r.model_sampled_std)
            ));
        }
    }
    out
}
