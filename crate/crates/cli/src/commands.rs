use std::fs;

use qjd_core::jointdist::{
    margenau_hill_joint, qjd_joint, sequential_joint, standard_commuting_joint,
};
use qjd_core::verify::{
    check_axioms, check_commuting_agreement, check_continuity_sweeps, check_unitary_covariance,
    survey_open_properties, IntRange, SuiteParams, SweepParams, VerificationReport,
};
use qjd_core::{eigendecompose, json, QjdConfig, QjdError, Tolerances};
use serde_json::json;

use crate::args::{Cli, Command, Format};
use crate::failure::{Failure, EXIT_PROPERTY};
use crate::load;
use crate::render::{self, Column};

const DEFAULT_TRIALS: usize = 100;
const DEFAULT_DIMS: IntRange = IntRange { lo: 2, hi: 6 };
const DEFAULT_NOBS: IntRange = IntRange { lo: 1, hi: 3 };
const VERIFY_SWEEPS: usize = 10;
const SWEEP_DIM: usize = 3;
const SWEEP_NOBS: usize = 2;

/// Defaults with the `--tol` overrides applied.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: QjdConfig,
    pub tolerances: Tolerances,
    pub agreement_tol: f64,
    pub covariance_tol: f64,
    pub axioms_tol: f64,
    pub sweep_slack: f64,
    pub sweep_cap: f64,
}

impl Settings {
    pub fn from_overrides(overrides: &[(String, f64)]) -> Self {
        let mut s = Settings {
            config: QjdConfig::default(),
            tolerances: Tolerances::default(),
            agreement_tol: 1e-8,
            covariance_tol: 1e-8,
            axioms_tol: 1e-10,
            sweep_slack: 1e-10,
            sweep_cap: 1e-2,
        };
        for (name, v) in overrides {
            let slot = match name.as_str() {
                "commute_tol" => &mut s.config.commute_tol,
                "cluster_tol" => &mut s.config.cluster_tol,
                "clamp_tol" => &mut s.config.clamp_tol,
                "hermitian_tol" => &mut s.tolerances.hermitian,
                "trace_tol" => &mut s.tolerances.trace,
                "psd_tol" => &mut s.tolerances.psd,
                "unitary_tol" => &mut s.tolerances.unitary,
                "agreement_tol" => &mut s.agreement_tol,
                "covariance_tol" => &mut s.covariance_tol,
                "axioms_tol" => &mut s.axioms_tol,
                "sweep_slack" => &mut s.sweep_slack,
                "sweep_cap" => &mut s.sweep_cap,
                // Names are checked while parsing.
                _ => continue,
            };
            *slot = *v;
        }
        s
    }
}

/// Runs one invocation and returns its exit code.
pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let settings = Settings::from_overrides(&cli.tol);
    match cli.command {
        Command::Decompose => decompose(cli, &settings),
        Command::Joint => joint(cli, &settings),
        Command::Baselines => baselines(cli, &settings),
        Command::Verify => verify(cli, &settings),
        Command::Sweep => sweep(cli, &settings),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    let mut s = json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn decompose(cli: &Cli, settings: &Settings) -> Result<u8, Failure> {
    let obs = load::observables(&cli.obs, &settings.tolerances)?;
    let measures = obs
        .iter()
        .map(|a| eigendecompose(a, settings.config.cluster_tol))
        .collect::<qjd_core::Result<Vec<_>>>()?;
    let labels: Vec<&str> = obs.iter().map(|a| a.label()).collect();
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json if measures.len() == 1 => to_json(&measures[0])?,
        Format::Json => to_json(&measures)?,
        Format::Table => render::spectral_table(&labels, &measures),
        Format::Csv => render::spectral_csv(&labels, &measures),
    };
    emit(cli, &text)?;
    Ok(0)
}

fn joint(cli: &Cli, settings: &Settings) -> Result<u8, Failure> {
    let obs = load::observables(&cli.obs, &settings.tolerances)?;
    let rho = load::state(cli.state.as_deref(), &settings.tolerances)?;
    let d = qjd_joint(&obs, &rho, &settings.config)?;
    let labels: Vec<&str> = obs.iter().map(|a| a.label()).collect();
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&d)?,
        Format::Table => render::distribution_table(&labels, &d),
        Format::Csv => render::distribution_csv(&labels, &d),
    };
    emit(cli, &text)?;
    Ok(0)
}

/// Runs a construction that may not apply; inapplicability becomes a note.
fn optional(
    result: qjd_core::Result<qjd_core::JointDistribution>,
) -> Result<(Option<qjd_core::JointDistribution>, Option<String>), Failure> {
    match result {
        Ok(d) => Ok((Some(d), None)),
        Err(e @ (QjdError::NotCommuting { .. } | QjdError::WrongArity { .. })) => {
            Ok((None, Some(e.to_string())))
        }
        Err(e) => Err(e.into()),
    }
}

fn baselines(cli: &Cli, settings: &Settings) -> Result<u8, Failure> {
    let obs = load::observables(&cli.obs, &settings.tolerances)?;
    let rho = load::state(cli.state.as_deref(), &settings.tolerances)?;
    let config = &settings.config;
    let qjd = qjd_joint(&obs, &rho, config)?;
    let sequential = sequential_joint(&obs, &rho, config)?;
    let (standard, standard_note) = optional(standard_commuting_joint(&obs, &rho, config))?;
    let (mh, mh_note) = optional(margenau_hill_joint(&obs, &rho, config))?;
    let columns = [
        Column {
            name: "qjd",
            dist: Some(&qjd),
            note: None,
        },
        Column {
            name: "standard",
            dist: standard.as_ref(),
            note: standard_note,
        },
        Column {
            name: "sequential",
            dist: Some(&sequential),
            note: None,
        },
        Column {
            name: "margenau_hill",
            dist: mh.as_ref(),
            note: mh_note,
        },
    ];
    let labels: Vec<&str> = obs.iter().map(|a| a.label()).collect();
    let text = match cli.format.unwrap_or(Format::Table) {
        Format::Json => {
            let devs = render::deviations(&qjd, &columns);
            let entries: Vec<_> = columns
                .iter()
                .zip(&devs)
                .map(|(c, dev)| {
                    json!({
                        "name": c.name,
                        "distribution": c.dist,
                        "max_deviation": dev,
                        "skipped": c.note,
                    })
                })
                .collect();
            let overall = devs.iter().flatten().copied().fold(0.0, f64::max);
            to_json(&json!({
                "labels": labels,
                "reference": "qjd",
                "constructions": entries,
                "max_deviation": overall,
            }))?
        }
        Format::Table => render::baseline_table(&labels, &qjd, &columns),
        Format::Csv => render::baseline_csv(&labels, &qjd, &columns),
    };
    emit(cli, &text)?;
    Ok(0)
}

fn require_seed(cli: &Cli) -> Result<u64, Failure> {
    cli.seed
        .ok_or_else(|| Failure::Input("--seed is required; there is no default randomness".into()))
}

fn require_trials(cli: &Cli, default: usize) -> Result<usize, Failure> {
    match cli.trials.unwrap_or(default) {
        0 => Err(Failure::Input("--trials must be at least 1".into())),
        n => Ok(n),
    }
}

fn clamp_into(v: usize, r: IntRange) -> usize {
    v.clamp(r.lo, r.hi)
}

fn verify(cli: &Cli, settings: &Settings) -> Result<u8, Failure> {
    let seed = require_seed(cli)?;
    let trials = require_trials(cli, DEFAULT_TRIALS)?;
    let dims = cli.dims.unwrap_or(DEFAULT_DIMS);
    let nobs = cli.nobs.unwrap_or(DEFAULT_NOBS);
    let suite = |tol| SuiteParams::new(trials, seed, dims, nobs, tol).with_config(settings.config);

    let mut template = SweepParams::new(
        seed,
        0,
        clamp_into(SWEEP_DIM, dims),
        clamp_into(SWEEP_NOBS, nobs),
    );
    template.slack = settings.sweep_slack;
    template.final_cap = settings.sweep_cap;
    template.config = settings.config;

    let reports: Vec<VerificationReport> = vec![
        check_commuting_agreement(&suite(settings.agreement_tol))?,
        check_unitary_covariance(&suite(settings.covariance_tol))?,
        check_continuity_sweeps(VERIFY_SWEEPS, seed, template.dim, template.n_obs, &template)?,
        check_axioms(&suite(settings.axioms_tol))?,
    ];
    let findings = survey_open_properties(&suite(0.0))?;
    let all_passed = reports.iter().all(VerificationReport::all_passed);

    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "seed": seed,
            "trials": trials,
            "dims": dims,
            "nobs": nobs,
            "all_passed": all_passed,
            "suites": reports,
            "findings": findings,
        }))?,
        Format::Table => {
            let mut s = String::new();
            for r in reports.iter().chain(std::iter::once(&findings)) {
                s.push_str(&r.to_table());
                s.push('\n');
            }
            s.push_str(if all_passed {
                "all suites passed\n"
            } else {
                "some suites FAILED\n"
            });
            s
        }
        Format::Csv => reports[2].sweep_csv().unwrap_or_default(),
    };
    emit(cli, &text)?;
    Ok(if all_passed { 0 } else { EXIT_PROPERTY })
}

fn single(range: Option<IntRange>, default: usize, flag: &str) -> Result<usize, Failure> {
    match range {
        None => Ok(default),
        Some(r) if r.lo == r.hi => Ok(r.lo),
        Some(r) => Err(Failure::Input(format!(
            "sweep takes a single {flag} value, got {r}"
        ))),
    }
}

fn sweep(cli: &Cli, settings: &Settings) -> Result<u8, Failure> {
    let seed = require_seed(cli)?;
    let count = require_trials(cli, 1)?;
    let dim = single(cli.dims, SWEEP_DIM, "--dims")?;
    let n_obs = single(cli.nobs, SWEEP_NOBS, "--nobs")?;
    let mut template = SweepParams::from_seed(seed, dim, n_obs);
    template.slack = settings.sweep_slack;
    template.final_cap = settings.sweep_cap;
    template.config = settings.config;
    let report = check_continuity_sweeps(count, seed, dim, n_obs, &template)?;
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&report)?,
        Format::Table => report.to_table(),
        Format::Csv => report.sweep_csv().unwrap_or_default(),
    };
    emit(cli, &text)?;
    Ok(if report.all_passed() {
        0
    } else {
        EXIT_PROPERTY
    })
}
