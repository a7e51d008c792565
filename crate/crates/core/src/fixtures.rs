//! Small hand-checked models shared by unit tests across modules.

use crate::model::{CptRow, ModelSpec, VariableSpec, WorldModel};
use crate::value::RewardTable;
use crate::Literal;

pub(crate) fn row(pairs: &[(&str, bool)], p_true: f64) -> CptRow {
    CptRow {
        given: pairs.iter().map(|(n, b)| (n.to_string(), *b)).collect(),
        p_true,
    }
}

/// Vaccinated → Flu, P(Flu | Vaccinated) = 0.1, P(Flu | ¬Vaccinated) = 0.5.
pub(crate) fn miriam_spec() -> ModelSpec {
    ModelSpec {
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
    }
}

pub(crate) fn miriam_model() -> WorldModel {
    WorldModel::build(&miriam_spec()).unwrap()
}

/// r(Flu=true) = −10, everything else 0.
pub(crate) fn miriam_rewards() -> RewardTable {
    let mut rewards = RewardTable::new();
    rewards.set(Literal::new("Flu", true), -10.0);
    rewards
}

/// Miriam with vaccination irrelevant: P(Flu | ·) = 0 either way.
pub(crate) fn immune_spec() -> ModelSpec {
    let mut spec = miriam_spec();
    spec.variables[1].cpt = vec![
        row(&[("Vaccinated", false)], 0.0),
        row(&[("Vaccinated", true)], 0.0),
    ];
    spec
}

/// A → B → C with P(B|A)=0.9/0.1 and P(C|B)=0.8/0.2.
pub(crate) fn chain_spec() -> ModelSpec {
    ModelSpec {
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
    }
}

pub(crate) fn chain_model() -> WorldModel {
    WorldModel::build(&chain_spec()).unwrap()
}

/// r(C=true) = 10, everything else 0.
pub(crate) fn chain_rewards() -> RewardTable {
    let mut rewards = RewardTable::new();
    rewards.set(Literal::new("C", true), 10.0);
    rewards
}

/// Vaccinated and HandWash both parents of Flu. At r(Flu=true) = r:
/// V(Vaccinated=true) = −0.375r, V(HandWash=true) = −0.175r.
pub(crate) fn generalize_spec() -> ModelSpec {
    ModelSpec {
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
    }
}

pub(crate) fn generalize_model() -> WorldModel {
    WorldModel::build(&generalize_spec()).unwrap()
}

/// Chose to vaccinate over not, at rationality β = 1.
pub(crate) fn vaccination_choice() -> crate::infer::Observation {
    crate::infer::Observation::Choice {
        options: vec![
            Literal::new("Vaccinated", true),
            Literal::new("Vaccinated", false),
        ],
        chosen: Literal::new("Vaccinated", true),
        beta: 1.0,
    }
}

/// The generalize model with r(Flu=true) free under the default prior and
/// `k` repeated vaccination choices observed.
pub(crate) fn generalize_problem(k: usize) -> crate::infer::InferenceProblem {
    crate::infer::InferenceProblem::new(
        generalize_model(),
        RewardTable::new(),
        vec![(
            Literal::new("Flu", true),
            crate::infer::GaussianPrior::default(),
        )],
        std::iter::repeat_with(vaccination_choice).take(k).collect(),
    )
    .unwrap()
}
