//! Command-line front end for the `valgraph` engine.
//!
//! Every subcommand is a thin adapter around one library call: read files,
//! run the call, format the result as CSV (or a `key=value` summary line),
//! and map errors to exit codes. All logic lives in the library; the tests
//! hold each adapter to byte-equality with the underlying call.
//!
//! Conventions:
//!
//! * `-` as a file argument means standard input.
//! * Tabular output is CSV with a header row; floats are printed with up to
//!   nine significant digits (see [`format_float`]).
//! * Exit code 0 is success, 1 a domain error (bad files, impossible
//!   problems), 2 a usage error (bad flags). Domain errors leave standard
//!   output empty — no partial CSV.
//! * The environment variable `VALGRAPH_MAX_VARS` overrides the model-size
//!   cap on exact enumeration.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use valgraph::infer::InferenceProblem;
use valgraph::model::{Literal, ModelError, WorldModel};
use valgraph::sampler::{GridPosterior, GridSpec, MhConfig, PosteriorSamples};
use valgraph::scenario::{
    builtin_scenario, emit_model, emit_observations, parse_model, parse_observations,
    ObservationSet, ScenarioError,
};
use valgraph::value::RewardTable;
use valgraph::{
    baseline_grid_posterior, baseline_posterior, baseline_predict, evaluate_values, explain_value,
    generalization_gap, grid_posterior, impact, mh_sample, predict_value, FlatProblem, GapConfig,
    GapReport, InferError, Posterior, PredictiveSummary, SamplerError, ValueError,
};

/// Outcome of one invocation: exit code plus captured streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 success, 1 domain error, 2 usage error.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("ConfigError: {0}")]
    Config(String),
    /// Flag combinations clap cannot catch; exits 2 like other usage errors.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "valgraph",
    version,
    about = "Subjective value propagation over causal world models",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every literal's intrinsic reward and total value
    Eval {
        /// Model file (`-` for standard input)
        #[arg(long)]
        model: String,
        /// Restrict output to one literal, e.g. `Flu=true`
        #[arg(long)]
        literal: Option<String>,
    },
    /// Print the causal contribution of a literal to one child variable
    Impact {
        #[arg(long)]
        model: String,
        /// Acting literal, e.g. `Vaccinated=true`
        #[arg(long)]
        of: String,
        /// Child variable name, e.g. `Flu`
        #[arg(long)]
        on: String,
    },
    /// Decompose a literal's value into intrinsic and per-child terms
    Explain {
        #[arg(long)]
        model: String,
        #[arg(long)]
        literal: String,
    },
    /// Sample the posterior over free rewards by Metropolis-Hastings
    Infer(InferArgs),
    /// Exact grid posterior over free rewards
    Oracle(OracleArgs),
    /// Posterior predictive distribution of a target literal's value
    Predict(PredictArgs),
    /// Flat-utility baseline: the same inference without the world model
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Run generative and baseline learners side by side on one target
    Compare(CompareArgs),
    /// Built-in scenarios
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: String,
    /// Observation file (`-` for standard input)
    #[arg(long)]
    obs: String,
    /// Retained draws
    #[arg(long, default_value_t = MhConfig::default().samples)]
    samples: usize,
    /// Discarded warm-up iterations
    #[arg(long, default_value_t = MhConfig::default().burn_in)]
    burn: usize,
    /// Proposal standard deviation
    #[arg(long, default_value_t = MhConfig::default().step_size)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the samples CSV (`-` for standard output)
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    obs: String,
    /// Grid as LO:HI:STEP, e.g. -20:20:0.05
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    obs: String,
    /// Literal whose value distribution to predict
    #[arg(long)]
    target: String,
    /// Use exact grid quadrature (the default)
    #[arg(long, conflicts_with = "samples")]
    oracle: bool,
    /// Reuse a samples CSV written by `infer` instead of the grid
    #[arg(long)]
    samples: Option<String>,
    /// Quadrature grid as LO:HI:STEP
    #[arg(long, allow_hyphen_values = true, default_value = "-20:20:0.05")]
    grid: String,
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Sample the posterior over flat utilities of mentioned literals
    Infer(InferArgs),
    /// Predictive distribution of a target literal's flat utility
    Predict(PredictArgs),
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    obs: String,
    #[arg(long)]
    target: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-20:20:0.05")]
    grid: String,
    #[arg(long, default_value_t = MhConfig::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = MhConfig::default().burn_in)]
    burn: usize,
    #[arg(long, default_value_t = MhConfig::default().step_size)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Write a built-in scenario's canonical files
    Emit {
        /// miriam | immune | chain | generalize | random-K [seed S]
        name: String,
        /// Print the observation file instead of the model file
        #[arg(long)]
        obs: bool,
        /// Write NAME.model.json and NAME.obs.json here instead
        #[arg(long)]
        out_dir: Option<String>,
    },
}

/// Parses `argv` and runs one subcommand, capturing both streams.
///
/// `stdin` is only read when some file argument is `-`.
pub fn run<I, T>(argv: I, stdin: &mut dyn BufRead) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => CommandResult {
                    code: 2,
                    stdout: String::new(),
                    stderr: first_line(&e.to_string()),
                },
            };
        }
    };
    match dispatch(cli.command, stdin) {
        Ok(stdout) => CommandResult {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CommandResult {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn first_line(text: &str) -> String {
    let mut line = text.lines().next().unwrap_or("invalid arguments").to_string();
    line.push('\n');
    line
}

fn dispatch(command: Command, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    match command {
        Command::Eval { model, literal } => cmd_eval(&model, literal.as_deref(), stdin),
        Command::Impact { model, of, on } => cmd_impact(&model, &of, &on, stdin),
        Command::Explain { model, literal } => cmd_explain(&model, &literal, stdin),
        Command::Infer(args) => cmd_infer(&args, stdin),
        Command::Oracle(args) => cmd_oracle(&args, stdin),
        Command::Predict(args) => cmd_predict(&args, stdin),
        Command::Baseline(BaselineCommand::Infer(args)) => cmd_baseline_infer(&args, stdin),
        Command::Baseline(BaselineCommand::Predict(args)) => cmd_baseline_predict(&args, stdin),
        Command::Compare(args) => cmd_compare(&args, stdin),
        Command::Scenario(ScenarioCommand::Emit { name, obs, out_dir }) => {
            cmd_scenario_emit(&name, obs, out_dir.as_deref())
        }
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

/// Prints a float with up to nine significant digits, keeping the shortest
/// decimal form that round-trips the rounded value (`4.0`, `0.05`,
/// `-0.000552931475`).
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific form parses");
    format!("{rounded:?}")
}

fn read_input(path: &str, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|source| CliError::Io {
            path: "-".into(),
            source,
        })?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })
    }
}

/// Loads and validates a model file, applying `VALGRAPH_MAX_VARS` if set.
fn load_model(
    path: &str,
    stdin: &mut dyn BufRead,
) -> Result<(WorldModel, RewardTable), CliError> {
    let text = read_input(path, stdin)?;
    let (model, rewards) = parse_model(&text)?;
    let model = match std::env::var("VALGRAPH_MAX_VARS") {
        Err(_) => model,
        Ok(setting) => {
            let cap: usize = setting.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "VALGRAPH_MAX_VARS must be a positive integer, got {setting:?}"
                ))
            })?;
            model.with_enumeration_cap(cap)
        }
    };
    Ok((model, rewards))
}

fn load_observations(
    path: &str,
    model: &WorldModel,
    stdin: &mut dyn BufRead,
) -> Result<ObservationSet, CliError> {
    let text = read_input(path, stdin)?;
    Ok(parse_observations(&text, model)?)
}

fn parse_literal_arg(text: &str) -> Result<Literal, CliError> {
    Literal::parse(text).map_err(|_| {
        CliError::Parse(format!(
            "{text:?} is not a literal of the form Name=true or Name=false"
        ))
    })
}

fn parse_grid_arg(text: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(CliError::Parse(format!(
            "grid must have the form LO:HI:STEP, got {text:?}"
        )));
    };
    let parse = |s: &str| {
        s.parse::<f64>().map_err(|_| {
            CliError::Parse(format!("grid bound {s:?} is not a number in {text:?}"))
        })
    };
    Ok(GridSpec::new(parse(lo)?, parse(hi)?, parse(step)?))
}

/// Builds the generative inference problem a model + observation file pair
/// describes: model-file rewards fixed, observation-file literals free.
fn generative_problem(
    model: WorldModel,
    rewards: RewardTable,
    set: &ObservationSet,
) -> Result<InferenceProblem, CliError> {
    let free = set
        .free
        .iter()
        .map(|literal| (literal.clone(), set.prior))
        .collect();
    Ok(InferenceProblem::new(
        model,
        rewards,
        free,
        set.observations.clone(),
    )?)
}

/// Builds the flat-utility counterpart: one free utility per literal
/// mentioned in the observations (first-mention order) plus any extra
/// targets, all under the observation file's prior.
fn flat_problem(set: &ObservationSet, targets: &[Literal]) -> Result<FlatProblem, CliError> {
    let mut free = Vec::new();
    let mut seen = BTreeSet::new();
    for observation in &set.observations {
        for literal in observation.literals() {
            if seen.insert(literal.clone()) {
                free.push((literal.clone(), set.prior));
            }
        }
    }
    for target in targets {
        if seen.insert(target.clone()) {
            free.push((target.clone(), set.prior));
        }
    }
    Ok(FlatProblem::new(
        free,
        Default::default(),
        set.observations.clone(),
    )?)
}

fn mh_config(samples: usize, burn: usize, step: f64) -> MhConfig {
    MhConfig {
        samples,
        burn_in: burn,
        step_size: step,
    }
}

fn join_floats<I: IntoIterator<Item = f64>>(values: I) -> String {
    values
        .into_iter()
        .map(format_float)
        .collect::<Vec<_>>()
        .join(",")
}

// ---------------------------------------------------------------------------
// forward commands

fn cmd_eval(
    model_path: &str,
    literal: Option<&str>,
    stdin: &mut dyn BufRead,
) -> Result<String, CliError> {
    let (model, rewards) = load_model(model_path, stdin)?;
    let values = evaluate_values(&model, &rewards)?;
    let mut out = String::from("literal,intrinsic,value\n");
    match literal {
        Some(text) => {
            let literal = parse_literal_arg(text)?;
            let value = values
                .get(&literal)
                .ok_or_else(|| ModelError::UnknownVariable(literal.variable.clone()))?;
            push_eval_row(&mut out, &literal, rewards.get(&literal), value);
        }
        None => {
            for (literal, value) in values.iter() {
                push_eval_row(&mut out, literal, rewards.get(literal), value);
            }
        }
    }
    Ok(out)
}

fn push_eval_row(out: &mut String, literal: &Literal, intrinsic: f64, value: f64) {
    out.push_str(&format!(
        "{literal},{},{}\n",
        format_float(intrinsic),
        format_float(value)
    ));
}

fn cmd_impact(
    model_path: &str,
    of: &str,
    on: &str,
    stdin: &mut dyn BufRead,
) -> Result<String, CliError> {
    let (model, rewards) = load_model(model_path, stdin)?;
    let values = evaluate_values(&model, &rewards)?;
    let of = parse_literal_arg(of)?;
    let amount = impact(&model, &values, &of, on)?;
    Ok(format!("{}\n", format_float(amount)))
}

fn cmd_explain(
    model_path: &str,
    literal: &str,
    stdin: &mut dyn BufRead,
) -> Result<String, CliError> {
    let (model, rewards) = load_model(model_path, stdin)?;
    let literal = parse_literal_arg(literal)?;
    let explanation = explain_value(&model, &rewards, &literal)?;
    let mut out = String::from("term,amount\n");
    out.push_str(&format!("intrinsic,{}\n", format_float(explanation.intrinsic)));
    for (child, amount) in &explanation.contributions {
        out.push_str(&format!("{child},{}\n", format_float(*amount)));
    }
    out.push_str(&format!("total,{}\n", format_float(explanation.total)));
    Ok(out)
}

// ---------------------------------------------------------------------------
// inference commands

/// Samples CSV: header of free-literal strings, one row per retained draw.
fn samples_csv(samples: &PosteriorSamples) -> String {
    let mut out = samples
        .free
        .iter()
        .map(Literal::to_string)
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for draw in &samples.draws {
        out.push_str(&join_floats(draw.iter().copied()));
        out.push('\n');
    }
    out
}

fn samples_summary(samples: &PosteriorSamples) -> String {
    let n = samples.free.len();
    let means: Vec<f64> = (0..n)
        .map(|i| {
            let xs = samples.coordinate(i);
            xs.iter().sum::<f64>() / xs.len() as f64
        })
        .collect();
    let sds: Vec<f64> = (0..n)
        .map(|i| {
            let xs = samples.coordinate(i);
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
        })
        .collect();
    format!(
        "mean={} sd={} accept={}\n",
        join_floats(means),
        join_floats(sds),
        format_float(samples.acceptance_rate)
    )
}

/// Writes the samples CSV to `--out` (or standard output for `-`) and
/// returns what belongs on standard output.
fn deliver_samples(out_path: &str, samples: &PosteriorSamples) -> Result<String, CliError> {
    let csv = samples_csv(samples);
    let summary = samples_summary(samples);
    if out_path == "-" {
        Ok(format!("{csv}{summary}"))
    } else {
        std::fs::write(out_path, csv).map_err(|source| CliError::Io {
            path: out_path.into(),
            source,
        })?;
        Ok(summary)
    }
}

fn cmd_infer(args: &InferArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, rewards) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    if set.free.is_empty() {
        return Err(CliError::Config(
            "the observation file declares no free literals to infer".into(),
        ));
    }
    let problem = generative_problem(model, rewards, &set)?;
    let config = mh_config(args.samples, args.burn, args.step);
    let samples = mh_sample(&problem, &config, args.seed)?;
    deliver_samples(&args.out, &samples)
}

fn cmd_baseline_infer(args: &InferArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, _) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    let flat = flat_problem(&set, &[])?;
    if flat.free().is_empty() {
        return Err(CliError::Config(
            "no literals are mentioned in the observations".into(),
        ));
    }
    let config = mh_config(args.samples, args.burn, args.step);
    let samples = baseline_posterior(&flat, &config, args.seed)?;
    deliver_samples(&args.out, &samples)
}

/// Grid CSV: single free coordinate gets the classic `r,mass` header;
/// several get one column per literal plus `mass`. Rows enumerate the
/// lattice with the first coordinate cycling fastest.
fn grid_csv(grid: &GridPosterior) -> String {
    let mut out = if grid.free.len() == 1 {
        String::from("r,mass\n")
    } else {
        let mut header = grid
            .free
            .iter()
            .map(Literal::to_string)
            .collect::<Vec<_>>()
            .join(",");
        header.push_str(",mass\n");
        header
    };
    for (flat, mass) in grid.mass.iter().enumerate() {
        let mut rest = flat;
        for axis in &grid.axes {
            out.push_str(&format_float(axis[rest % axis.len()]));
            out.push(',');
            rest /= axis.len();
        }
        out.push_str(&format_float(*mass));
        out.push('\n');
    }
    out
}

fn grid_summary(grid: &GridPosterior) -> String {
    let n = grid.axes.len();
    format!(
        "mean={} p_neg={}\n",
        join_floats((0..n).map(|i| grid.mean(i))),
        join_floats((0..n).map(|i| grid.prob_below(i, 0.0)))
    )
}

fn cmd_oracle(args: &OracleArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, rewards) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    if set.free.is_empty() {
        return Err(CliError::Config(
            "the observation file declares no free literals to infer".into(),
        ));
    }
    let problem = generative_problem(model, rewards, &set)?;
    let spec = parse_grid_arg(&args.grid)?;
    let grid = grid_posterior(&problem, &vec![spec; problem.free().len()])?;
    Ok(format!("{}{}", grid_csv(&grid), grid_summary(&grid)))
}

/// Reads a samples CSV back into a posterior over the given free literals.
fn read_samples_csv(path: &str, stdin: &mut dyn BufRead) -> Result<PosteriorSamples, CliError> {
    let text = read_input(path, stdin)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Parse("samples file is empty".into()))?;
    let free = header
        .split(',')
        .map(|s| parse_literal_arg(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut draws = Vec::new();
    for (index, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let draw = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    CliError::Parse(format!(
                        "samples row {}: {cell:?} is not a number",
                        index + 2
                    ))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if draw.len() != free.len() {
            return Err(CliError::Parse(format!(
                "samples row {} has {} column(s), expected {}",
                index + 2,
                draw.len(),
                free.len()
            )));
        }
        draws.push(draw);
    }
    if draws.is_empty() {
        return Err(CliError::Parse("samples file holds no draws".into()));
    }
    // chain metadata is not stored in the CSV; these fields are placeholders
    Ok(PosteriorSamples {
        free,
        draws,
        seed: 0,
        config: MhConfig::default(),
        acceptance_rate: f64::NAN,
    })
}

fn summary_csv(summary: &PredictiveSummary) -> String {
    format!(
        "target,mean,sd,q05,q50,q95,prob_positive\n{},{},{},{},{},{},{}\n",
        summary.target,
        format_float(summary.mean),
        format_float(summary.sd),
        format_float(summary.q05),
        format_float(summary.q50),
        format_float(summary.q95),
        format_float(summary.prob_positive)
    )
}

fn cmd_predict(args: &PredictArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, rewards) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    let target = parse_literal_arg(&args.target)?;
    let problem = generative_problem(model, rewards, &set)?;
    let summary = match &args.samples {
        Some(path) => {
            let samples = read_samples_csv(path, stdin)?;
            predict_value(&problem, Posterior::Samples(&samples), &target)?
        }
        None => {
            let spec = parse_grid_arg(&args.grid)?;
            let grid = grid_posterior(&problem, &vec![spec; problem.free().len()])?;
            predict_value(&problem, Posterior::Grid(&grid), &target)?
        }
    };
    Ok(summary_csv(&summary))
}

fn cmd_baseline_predict(args: &PredictArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, _) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    let target = parse_literal_arg(&args.target)?;
    let flat = flat_problem(&set, &[target.clone()])?;
    let summary = match &args.samples {
        Some(path) => {
            let samples = read_samples_csv(path, stdin)?;
            baseline_predict(&flat, Posterior::Samples(&samples), &target)?
        }
        None => {
            let spec = parse_grid_arg(&args.grid)?;
            let grid = baseline_grid_posterior(&flat, &spec)?;
            baseline_predict(&flat, Posterior::Grid(&grid), &target)?
        }
    };
    Ok(summary_csv(&summary))
}

fn gap_csv(report: &GapReport) -> String {
    let mut out = String::from("key,value\n");
    out.push_str(&format!("target,{}\n", report.target));
    let sides = [
        ("generative", &report.generative),
        ("baseline", &report.baseline),
    ];
    for (side, summary) in sides {
        out.push_str(&format!("{side}_mean,{}\n", format_float(summary.mean)));
        out.push_str(&format!("{side}_sd,{}\n", format_float(summary.sd)));
        out.push_str(&format!("{side}_q05,{}\n", format_float(summary.q05)));
        out.push_str(&format!("{side}_q50,{}\n", format_float(summary.q50)));
        out.push_str(&format!("{side}_q95,{}\n", format_float(summary.q95)));
        out.push_str(&format!(
            "{side}_prob_positive,{}\n",
            format_float(summary.prob_positive)
        ));
    }
    out.push_str(&format!(
        "baseline_prior_divergence,{}\n",
        format_float(report.baseline_prior_divergence)
    ));
    out.push_str(&format!(
        "generative_prior_divergence,{}\n",
        format_float(report.generative_prior_divergence)
    ));
    out
}

fn cmd_compare(args: &CompareArgs, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    let (model, rewards) = load_model(&args.model, stdin)?;
    let set = load_observations(&args.obs, &model, stdin)?;
    let target = parse_literal_arg(&args.target)?;
    let problem = generative_problem(model, rewards, &set)?;
    let flat = flat_problem(&set, &[target.clone()])?;
    let config = GapConfig {
        grid: parse_grid_arg(&args.grid)?,
        mh: mh_config(args.samples, args.burn, args.step),
    };
    let report = generalization_gap(&problem, &flat, &target, &config, args.seed)?;
    Ok(gap_csv(&report))
}

// ---------------------------------------------------------------------------
// scenarios

fn cmd_scenario_emit(
    name: &str,
    obs: bool,
    out_dir: Option<&str>,
) -> Result<String, CliError> {
    let scenario = builtin_scenario(name)?;
    let model_text = emit_model(&scenario.model, &scenario.rewards);
    let obs_text = emit_observations(&scenario.observations);
    match out_dir {
        None => Ok(if obs { obs_text } else { model_text }),
        Some(dir) => {
            let base: String = name
                .split_whitespace()
                .collect::<Vec<_>>()
                .join("-");
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.into(),
                source,
            })?;
            let mut written = String::new();
            for (suffix, text) in [("model", &model_text), ("obs", &obs_text)] {
                let path: PathBuf = [dir, &format!("{base}.{suffix}.json")].iter().collect();
                std::fs::write(&path, text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                written.push_str(&format!("{}\n", path.display()));
            }
            Ok(written)
        }
    }
}
