//! Scenario files: JSON interchange for models, rewards, and observations,
//! plus the built-in scenarios used by tests and the command line.
//!
//! Two document kinds exist, both carrying `format_version: 1`:
//!
//! * a **model file** with `variables` (name, parents, CPT rows), `rewards`
//!   (literal string → number), and `controllable` (variable names);
//! * an **observation file** with `observations` (tagged `value_report` /
//!   `choice` records) and an `inference` block naming the free reward
//!   literals, their shared Gaussian prior, and default `beta` / `sigma`
//!   for records that omit their own.
//!
//! Literal strings use the one cross-boundary convention `Name=true` /
//! `Name=false`. Emission is canonical — keys sorted, CPT rows in canonical
//! order, every default written out — so emitted files are byte-stable and
//! `emit(parse(text))` is a fixed point after one pass.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::infer::{GaussianPrior, InferError, InferenceProblem, Observation};
use crate::model::{CptRow, Literal, ModelError, ModelSpec, VariableSpec, WorldModel};
use crate::value::RewardTable;

/// The only schema revision these readers accept.
pub const FORMAT_VERSION: u64 = 1;

/// Largest variable count [`random_scenario`] will generate.
pub const RANDOM_SCENARIO_MAX_VARS: usize = 8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScenarioError {
    /// Malformed document: bad JSON, wrong schema, bad literal syntax, or an
    /// unsupported format version. Includes line/column when the JSON layer
    /// reports one.
    #[error("ParseError: {0}")]
    Parse(String),
    /// Structural problems detected while building the model.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// Valid documents that combine into an unusable problem.
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("UnknownScenarioError: {0}")]
    UnknownScenario(String),
}

/// Observations plus the inference settings that accompany them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    pub observations: Vec<Observation>,
    /// Reward literals to infer, in file order.
    pub free: Vec<Literal>,
    /// Shared prior over every free literal.
    pub prior: GaussianPrior,
}

impl Default for ObservationSet {
    fn default() -> Self {
        ObservationSet {
            observations: Vec::new(),
            free: Vec::new(),
            prior: GaussianPrior::default(),
        }
    }
}

/// A complete experiment setup: world model, known rewards, observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: WorldModel,
    pub rewards: RewardTable,
    pub observations: ObservationSet,
}

impl Scenario {
    /// Assembles the inference problem this scenario describes: the model
    /// file's rewards are fixed, the observation file's literals are free.
    pub fn problem(&self) -> Result<InferenceProblem, InferError> {
        let free = self
            .observations
            .free
            .iter()
            .map(|literal| (literal.clone(), self.observations.prior))
            .collect();
        InferenceProblem::new(
            self.model.clone(),
            self.rewards.clone(),
            free,
            self.observations.observations.clone(),
        )
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u64,
    variables: Vec<VariableDoc>,
    #[serde(default)]
    rewards: BTreeMap<String, f64>,
    #[serde(default)]
    controllable: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    #[serde(default)]
    parents: Vec<String>,
    cpt: Vec<CptRowDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CptRowDoc {
    #[serde(default)]
    given: BTreeMap<String, bool>,
    p_true: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationsDoc {
    format_version: u64,
    #[serde(default)]
    observations: Vec<ObservationDoc>,
    inference: Option<InferenceDoc>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ObservationDoc {
    ValueReport {
        literal: String,
        reported: f64,
        sigma: Option<f64>,
    },
    Choice {
        options: Vec<String>,
        chosen: String,
        beta: Option<f64>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InferenceDoc {
    #[serde(default)]
    free: Vec<String>,
    #[serde(default = "default_prior_mean")]
    prior_mean: f64,
    #[serde(default = "default_prior_sd")]
    prior_sd: f64,
    #[serde(default = "default_beta")]
    beta: f64,
    #[serde(default = "default_sigma")]
    sigma: f64,
}

fn default_prior_mean() -> f64 {
    0.0
}

fn default_prior_sd() -> f64 {
    5.0
}

fn default_beta() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    1.0
}

impl Default for InferenceDoc {
    fn default() -> Self {
        InferenceDoc {
            free: Vec::new(),
            prior_mean: default_prior_mean(),
            prior_sd: default_prior_sd(),
            beta: default_beta(),
            sigma: default_sigma(),
        }
    }
}

fn check_format_version(found: u64) -> Result<(), ScenarioError> {
    if found != FORMAT_VERSION {
        return Err(ScenarioError::Parse(format!(
            "unsupported format_version {found} (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

fn parse_literal(s: &str) -> Result<Literal, ScenarioError> {
    Literal::parse(s).map_err(|_| {
        ScenarioError::Parse(format!(
            "{s:?} is not a literal of the form Name=true or Name=false"
        ))
    })
}

fn resolve_literal(s: &str, model: &WorldModel) -> Result<Literal, ScenarioError> {
    let literal = parse_literal(s)?;
    model.var_index(&literal.variable)?;
    Ok(literal)
}

/// Reads a model file into a validated model and its reward table.
pub fn parse_model(text: &str) -> Result<(WorldModel, RewardTable), ScenarioError> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    check_format_version(doc.format_version)?;
    let spec = ModelSpec {
        variables: doc
            .variables
            .into_iter()
            .map(|v| VariableSpec {
                name: v.name,
                parents: v.parents,
                cpt: v
                    .cpt
                    .into_iter()
                    .map(|row| CptRow {
                        given: row.given,
                        p_true: row.p_true,
                    })
                    .collect(),
            })
            .collect(),
        controllable: doc.controllable,
    };
    let model = WorldModel::build(&spec)?;
    let mut rewards = RewardTable::new();
    for (key, value) in doc.rewards {
        let literal = resolve_literal(&key, &model)?;
        if !value.is_finite() {
            return Err(ScenarioError::Config(format!(
                "reward for {literal} is not finite"
            )));
        }
        rewards.set(literal, value);
    }
    Ok((model, rewards))
}

/// Reads an observation file, resolving every literal against the model.
/// Records missing `beta` or `sigma` inherit the inference-block defaults.
pub fn parse_observations(
    text: &str,
    model: &WorldModel,
) -> Result<ObservationSet, ScenarioError> {
    let doc: ObservationsDoc =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    check_format_version(doc.format_version)?;
    let inference = doc.inference.unwrap_or_default();
    let mut observations = Vec::with_capacity(doc.observations.len());
    for record in doc.observations {
        observations.push(match record {
            ObservationDoc::ValueReport {
                literal,
                reported,
                sigma,
            } => Observation::ValueReport {
                literal: resolve_literal(&literal, model)?,
                reported,
                sigma: sigma.unwrap_or(inference.sigma),
            },
            ObservationDoc::Choice {
                options,
                chosen,
                beta,
            } => Observation::Choice {
                options: options
                    .iter()
                    .map(|o| resolve_literal(o, model))
                    .collect::<Result<_, _>>()?,
                chosen: resolve_literal(&chosen, model)?,
                beta: beta.unwrap_or(inference.beta),
            },
        });
    }
    let free = inference
        .free
        .iter()
        .map(|s| resolve_literal(s, model))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ObservationSet {
        observations,
        free,
        prior: GaussianPrior::new(inference.prior_mean, inference.prior_sd),
    })
}

// ---------------------------------------------------------------------------
// emission

fn literal_string(literal: &Literal) -> String {
    literal.to_string()
}

/// Canonical model file: sorted keys, canonical CPT row order, rewards and
/// controllable always present. Ends with a newline.
pub fn emit_model(model: &WorldModel, rewards: &RewardTable) -> String {
    let spec = model.spec();
    let variables: Vec<Value> = spec
        .variables
        .iter()
        .map(|v| {
            let cpt: Vec<Value> = v
                .cpt
                .iter()
                .map(|row| json!({ "given": row.given, "p_true": row.p_true }))
                .collect();
            json!({ "cpt": cpt, "name": v.name, "parents": v.parents })
        })
        .collect();
    let reward_map: BTreeMap<String, f64> = rewards
        .iter()
        .map(|(literal, r)| (literal_string(literal), r))
        .collect();
    let doc = json!({
        "controllable": spec.controllable,
        "format_version": FORMAT_VERSION,
        "rewards": reward_map,
        "variables": variables,
    });
    to_pretty_text(&doc)
}

/// Canonical observation file: every record carries its own `beta`/`sigma`,
/// the inference block is always present, free literals sorted.
pub fn emit_observations(set: &ObservationSet) -> String {
    let observations: Vec<Value> = set
        .observations
        .iter()
        .map(|observation| match observation {
            Observation::ValueReport {
                literal,
                reported,
                sigma,
            } => json!({
                "literal": literal_string(literal),
                "reported": reported,
                "sigma": sigma,
                "type": "value_report",
            }),
            Observation::Choice {
                options,
                chosen,
                beta,
            } => json!({
                "beta": beta,
                "chosen": literal_string(chosen),
                "options": options.iter().map(literal_string).collect::<Vec<_>>(),
                "type": "choice",
            }),
        })
        .collect();
    let mut free: Vec<String> = set.free.iter().map(literal_string).collect();
    free.sort();
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "inference": {
            "beta": default_beta(),
            "free": free,
            "prior_mean": set.prior.mean,
            "prior_sd": set.prior.sd,
            "sigma": default_sigma(),
        },
        "observations": observations,
    });
    to_pretty_text(&doc)
}

fn to_pretty_text(doc: &Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// built-in scenarios

/// Returns a named built-in scenario.
///
/// Names: `miriam`, `immune`, `chain`, `generalize`, and seeded random
/// models as `random-K` (seed 0) or `random-K seed S` with K ≤ 8.
pub fn builtin_scenario(name: &str) -> Result<Scenario, ScenarioError> {
    match name.trim() {
        "miriam" => Ok(miriam()),
        "immune" => Ok(immune()),
        "chain" => Ok(chain()),
        "generalize" => Ok(generalize()),
        trimmed => {
            if let Some(spec) = trimmed.strip_prefix("random-") {
                let (k_text, seed_text) = match spec.split_once(char::is_whitespace) {
                    None => (spec, None),
                    Some((k, rest)) => match rest.trim().strip_prefix("seed") {
                        Some(s) => (k, Some(s.trim())),
                        None => {
                            return Err(ScenarioError::UnknownScenario(name.to_string()))
                        }
                    },
                };
                let k: usize = k_text
                    .parse()
                    .map_err(|_| ScenarioError::UnknownScenario(name.to_string()))?;
                let seed: u64 = match seed_text {
                    None => 0,
                    Some(s) => s
                        .parse()
                        .map_err(|_| ScenarioError::UnknownScenario(name.to_string()))?,
                };
                random_scenario(k, seed)
            } else {
                Err(ScenarioError::UnknownScenario(name.to_string()))
            }
        }
    }
}

fn row(pairs: &[(&str, bool)], p_true: f64) -> CptRow {
    CptRow {
        given: pairs
            .iter()
            .map(|(name, polarity)| (name.to_string(), *polarity))
            .collect(),
        p_true,
    }
}

/// Vaccination lowers flu risk; catching the flu is bad.
fn miriam() -> Scenario {
    let spec = ModelSpec {
        variables: vec![
            VariableSpec {
                name: "Vaccinated".into(),
                parents: vec![],
                cpt: vec![row(&[], 0.5)],
            },
            VariableSpec {
                name: "Flu".into(),
                parents: vec!["Vaccinated".into()],
                cpt: vec![
                    row(&[("Vaccinated", false)], 0.5),
                    row(&[("Vaccinated", true)], 0.1),
                ],
            },
        ],
        controllable: vec!["Vaccinated".into()],
    };
    Scenario {
        model: WorldModel::build(&spec).expect("built-in model is valid"),
        rewards: RewardTable::from_pairs([(Literal::new("Flu", true), -10.0)]),
        observations: ObservationSet::default(),
    }
}

/// Miriam for someone who cannot catch the flu: vaccination changes nothing.
fn immune() -> Scenario {
    let spec = ModelSpec {
        variables: vec![
            VariableSpec {
                name: "Vaccinated".into(),
                parents: vec![],
                cpt: vec![row(&[], 0.5)],
            },
            VariableSpec {
                name: "Flu".into(),
                parents: vec!["Vaccinated".into()],
                cpt: vec![
                    row(&[("Vaccinated", false)], 0.0),
                    row(&[("Vaccinated", true)], 0.0),
                ],
            },
        ],
        controllable: vec!["Vaccinated".into()],
    };
    Scenario {
        model: WorldModel::build(&spec).expect("built-in model is valid"),
        rewards: RewardTable::from_pairs([(Literal::new("Flu", true), -10.0)]),
        observations: ObservationSet::default(),
    }
}

/// Three-link chain A→B→C with the reward on the far end.
fn chain() -> Scenario {
    let spec = ModelSpec {
        variables: vec![
            VariableSpec {
                name: "A".into(),
                parents: vec![],
                cpt: vec![row(&[], 0.5)],
            },
            VariableSpec {
                name: "B".into(),
                parents: vec!["A".into()],
                cpt: vec![row(&[("A", false)], 0.1), row(&[("A", true)], 0.9)],
            },
            VariableSpec {
                name: "C".into(),
                parents: vec!["B".into()],
                cpt: vec![row(&[("B", false)], 0.2), row(&[("B", true)], 0.8)],
            },
        ],
        controllable: vec!["A".into()],
    };
    Scenario {
        model: WorldModel::build(&spec).expect("built-in model is valid"),
        rewards: RewardTable::from_pairs([(Literal::new("C", true), 10.0)]),
        observations: ObservationSet::default(),
    }
}

/// Two flu preventers, a free flu reward, and five observed choices of
/// vaccination — the setup for inferring the flu's value from behavior and
/// generalizing it to hand-washing.
fn generalize() -> Scenario {
    let spec = ModelSpec {
        variables: vec![
            VariableSpec {
                name: "Vaccinated".into(),
                parents: vec![],
                cpt: vec![row(&[], 0.5)],
            },
            VariableSpec {
                name: "HandWash".into(),
                parents: vec![],
                cpt: vec![row(&[], 0.5)],
            },
            VariableSpec {
                name: "Flu".into(),
                parents: vec!["Vaccinated".into(), "HandWash".into()],
                cpt: vec![
                    row(&[("Vaccinated", false), ("HandWash", false)], 0.60),
                    row(&[("Vaccinated", true), ("HandWash", false)], 0.15),
                    row(&[("Vaccinated", false), ("HandWash", true)], 0.35),
                    row(&[("Vaccinated", true), ("HandWash", true)], 0.05),
                ],
            },
        ],
        controllable: vec!["Vaccinated".into(), "HandWash".into()],
    };
    let choice = Observation::Choice {
        options: vec![
            Literal::new("Vaccinated", true),
            Literal::new("Vaccinated", false),
        ],
        chosen: Literal::new("Vaccinated", true),
        beta: 1.0,
    };
    Scenario {
        model: WorldModel::build(&spec).expect("built-in model is valid"),
        rewards: RewardTable::new(),
        observations: ObservationSet {
            observations: vec![choice; 5],
            free: vec![Literal::new("Flu", true)],
            prior: GaussianPrior::default(),
        },
    }
}

/// A seeded random DAG of `k ≤ 8` variables for property tests.
///
/// Variables `V1..Vk`; each draws up to three parents from its predecessors
/// (each with probability 0.4), CPT entries are uniform on (0.02, 0.98),
/// roots are controllable, and two random literals get uniform rewards on
/// (−10, 10). Identical `(k, seed)` always yields the identical scenario.
pub fn random_scenario(k: usize, seed: u64) -> Result<Scenario, ScenarioError> {
    if k == 0 || k > RANDOM_SCENARIO_MAX_VARS {
        return Err(ScenarioError::Config(format!(
            "random scenario size must be between 1 and {RANDOM_SCENARIO_MAX_VARS}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=k).map(|i| format!("V{i}")).collect();
    let mut variables = Vec::with_capacity(k);
    for i in 0..k {
        let mut parents = Vec::new();
        for candidate in names.iter().take(i) {
            if parents.len() == 3 {
                break;
            }
            if rng.gen::<f64>() < 0.4 {
                parents.push(candidate.clone());
            }
        }
        let mut cpt = Vec::with_capacity(1 << parents.len());
        for bits in 0..1u32 << parents.len() {
            let given: BTreeMap<String, bool> = parents
                .iter()
                .enumerate()
                .map(|(j, p)| (p.clone(), bits >> j & 1 == 1))
                .collect();
            cpt.push(CptRow {
                given,
                p_true: rng.gen_range(0.02..0.98),
            });
        }
        variables.push(VariableSpec {
            name: names[i].clone(),
            parents,
            cpt,
        });
    }
    let controllable = variables
        .iter()
        .filter(|v| v.parents.is_empty())
        .map(|v| v.name.clone())
        .collect();
    let spec = ModelSpec {
        variables,
        controllable,
    };
    let model = WorldModel::build(&spec)?;
    let mut rewards = RewardTable::new();
    for _ in 0..2 {
        let variable = &names[rng.gen_range(0..k)];
        let polarity = rng.gen::<bool>();
        let reward = rng.gen_range(-10.0..10.0);
        rewards.set(Literal::new(variable, polarity), reward);
    }
    Ok(Scenario {
        model,
        rewards,
        observations: ObservationSet::default(),
    })
}
