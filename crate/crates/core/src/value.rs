//! Value propagation: total subjective value of outcomes.
//!
//! An outcome's value is its intrinsic reward plus, for each direct child in
//! the causal graph, the impact the outcome has on that child:
//!
//! ```text
//! V(o)        = r(o) + Σ_x Impact(o, x)           x ranges over direct children
//! Impact(o,x) = EV(o, x) − EV(¬o, x)
//! EV(o, x)    = V(x)·P(x | do(o)) + V(¬x)·P(¬x | do(o))
//! ```
//!
//! Child values are context-free (not conditioned on the parent outcome), so
//! the table is computable in one reverse-topological sweep. The form is
//! structurally similar to a Bellman backup — an expected downstream value
//! plus an immediate term — but the baseline subtraction makes it a causal
//! contrast between doing and not doing, rather than a fixed-point equation;
//! nothing iterates to convergence here.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Literal, ModelError, WorldModel};

/// Errors from value evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ValueError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("NotAChildError: {child} is not a direct child of {variable}")]
    NotAChild { variable: String, child: String },
    #[error("ConfigError: reward for {0} is not finite")]
    NonFiniteReward(Literal),
    #[error("ConfigError: value table does not cover {0}")]
    MissingValue(Literal),
}

/// Intrinsic rewards r(·), keyed by literal. Absent literals reward 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardTable {
    rewards: BTreeMap<Literal, f64>,
}

impl RewardTable {
    pub fn new() -> Self {
        RewardTable::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Literal, f64)>,
    {
        RewardTable {
            rewards: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, literal: Literal, reward: f64) {
        self.rewards.insert(literal, reward);
    }

    /// The intrinsic reward of a literal; 0 when unset.
    pub fn get(&self, literal: &Literal) -> f64 {
        self.rewards.get(literal).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Literal, f64)> {
        self.rewards.iter().map(|(lit, r)| (lit, *r))
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Total subjective values V(·), covering both polarities of every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: BTreeMap<Literal, f64>,
}

impl ValueTable {
    pub fn get(&self, literal: &Literal) -> Option<f64> {
        self.values.get(literal).copied()
    }

    /// Iterates literals in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = (&Literal, f64)> {
        self.values.iter().map(|(lit, v)| (lit, *v))
    }

    pub(crate) fn require(&self, literal: &Literal) -> Result<f64, ValueError> {
        self.get(literal)
            .ok_or_else(|| ValueError::MissingValue(literal.clone()))
    }
}

/// A value broken into its additive terms: the intrinsic reward and one
/// impact per direct child.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueExplanation {
    pub literal: Literal,
    pub intrinsic: f64,
    /// (child variable, impact of the literal on that child), in the
    /// children's declaration order.
    pub contributions: Vec<(String, f64)>,
    pub total: f64,
}

/// Computes V(·) for both polarities of every variable by a single sweep in
/// reverse topological order; children are finished before their parents
/// need them.
pub fn evaluate_values(
    model: &WorldModel,
    rewards: &RewardTable,
) -> Result<ValueTable, ValueError> {
    if model.len() > model.enumeration_cap() {
        return Err(ModelError::ModelTooLarge {
            vars: model.len(),
            cap: model.enumeration_cap(),
        }
        .into());
    }
    for (literal, reward) in rewards.iter() {
        if !model.contains(&literal.variable) {
            return Err(ModelError::UnknownVariable(literal.variable.clone()).into());
        }
        if !reward.is_finite() {
            return Err(ValueError::NonFiniteReward(literal.clone()));
        }
    }

    let mut values = BTreeMap::new();
    for &v in model.topo_indices().iter().rev() {
        let name = model.name_of(v);
        let lit_true = Literal::new(name, true);
        let lit_false = Literal::new(name, false);
        let mut v_true = rewards.get(&lit_true);
        let mut v_false = rewards.get(&lit_false);
        if !model.child_indices(v).is_empty() {
            // One surgery per polarity covers every child of this variable.
            let do_true = model.do_surgery(&lit_true)?;
            let do_false = model.do_surgery(&lit_false)?;
            for &c in model.child_indices(v) {
                let child = model.name_of(c);
                let child_true = values[&Literal::new(child, true)];
                let child_false = values[&Literal::new(child, false)];
                let p_if_true = do_true.marginal(c, true);
                let p_if_false = do_false.marginal(c, true);
                let ev_true = child_true * p_if_true + child_false * (1.0 - p_if_true);
                let ev_false = child_true * p_if_false + child_false * (1.0 - p_if_false);
                v_true += ev_true - ev_false;
                v_false += ev_false - ev_true;
            }
        }
        values.insert(lit_true, v_true);
        values.insert(lit_false, v_false);
    }
    Ok(ValueTable { values })
}

fn require_child(model: &WorldModel, o: &Literal, x: &str) -> Result<(), ValueError> {
    if model.children_of(&o.variable)?.contains(&x) {
        Ok(())
    } else {
        model.var_index(x)?;
        Err(ValueError::NotAChild {
            variable: o.variable.clone(),
            child: x.to_string(),
        })
    }
}

/// V(x)·P(x | do(o)) + V(¬x)·P(¬x | do(o)) for a direct child x of o's
/// variable.
pub fn expected_value(
    model: &WorldModel,
    values: &ValueTable,
    o: &Literal,
    x: &str,
) -> Result<f64, ValueError> {
    require_child(model, o, x)?;
    let x_true = Literal::new(x, true);
    let v_true = values.require(&x_true)?;
    let v_false = values.require(&x_true.complement())?;
    let p = model.interventional_prob(&x_true, o)?;
    Ok(v_true * p + v_false * (1.0 - p))
}

/// The causal contrast EV(o, x) − EV(¬o, x): how much choosing o over ¬o
/// shifts the expected value carried by child x.
pub fn impact(
    model: &WorldModel,
    values: &ValueTable,
    o: &Literal,
    x: &str,
) -> Result<f64, ValueError> {
    let ev = expected_value(model, values, o, x)?;
    let ev_complement = expected_value(model, values, &o.complement(), x)?;
    Ok(ev - ev_complement)
}

/// Recomputes V(o) with the additive pieces kept separate, for reporting.
pub fn explain_value(
    model: &WorldModel,
    rewards: &RewardTable,
    o: &Literal,
) -> Result<ValueExplanation, ValueError> {
    let values = evaluate_values(model, rewards)?;
    let total = values.require(o)?;
    let mut contributions = Vec::new();
    for child in model.children_of(&o.variable)? {
        contributions.push((child.to_string(), impact(model, &values, o, child)?));
    }
    Ok(ValueExplanation {
        literal: o.clone(),
        intrinsic: rewards.get(o),
        contributions,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        chain_model, chain_rewards, immune_spec, miriam_model, miriam_rewards,
    };
    use approx::assert_abs_diff_eq;

    fn lit(name: &str, polarity: bool) -> Literal {
        Literal::new(name, polarity)
    }

    #[test]
    fn miriam_values() {
        let values = evaluate_values(&miriam_model(), &miriam_rewards()).unwrap();
        assert_abs_diff_eq!(values.get(&lit("Flu", true)).unwrap(), -10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values.get(&lit("Flu", false)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            values.get(&lit("Vaccinated", true)).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            values.get(&lit("Vaccinated", false)).unwrap(),
            -4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn immune_variant_has_null_impact() {
        let model = WorldModel::build(&immune_spec()).unwrap();
        let values = evaluate_values(&model, &miriam_rewards()).unwrap();
        assert_eq!(values.get(&lit("Vaccinated", true)).unwrap(), 0.0);
        assert_eq!(values.get(&lit("Vaccinated", false)).unwrap(), 0.0);
    }

    #[test]
    fn chain_values_recurse_two_levels() {
        let values = evaluate_values(&chain_model(), &chain_rewards()).unwrap();
        assert_abs_diff_eq!(values.get(&lit("C", true)).unwrap(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values.get(&lit("B", true)).unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values.get(&lit("B", false)).unwrap(), -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values.get(&lit("A", true)).unwrap(), 9.6, epsilon = 1e-12);
    }

    #[test]
    fn expected_value_examples() {
        let model = miriam_model();
        let values = evaluate_values(&model, &miriam_rewards()).unwrap();
        let ev_vacc = expected_value(&model, &values, &lit("Vaccinated", true), "Flu").unwrap();
        assert_abs_diff_eq!(ev_vacc, -1.0, epsilon = 1e-12);
        let ev_unvacc = expected_value(&model, &values, &lit("Vaccinated", false), "Flu").unwrap();
        assert_abs_diff_eq!(ev_unvacc, -5.0, epsilon = 1e-12);
    }

    #[test]
    fn expected_value_is_constant_when_child_values_agree() {
        // V(x) = V(¬x) = c makes the probability weights irrelevant.
        let model = miriam_model();
        let rewards = RewardTable::from_pairs([
            (lit("Flu", true), 3.5),
            (lit("Flu", false), 3.5),
        ]);
        let values = evaluate_values(&model, &rewards).unwrap();
        for o in [lit("Vaccinated", true), lit("Vaccinated", false)] {
            let ev = expected_value(&model, &values, &o, "Flu").unwrap();
            assert_abs_diff_eq!(ev, 3.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn impact_examples() {
        let model = miriam_model();
        let values = evaluate_values(&model, &miriam_rewards()).unwrap();
        let i = impact(&model, &values, &lit("Vaccinated", true), "Flu").unwrap();
        assert_abs_diff_eq!(i, 4.0, epsilon = 1e-12);

        let immune = WorldModel::build(&immune_spec()).unwrap();
        let values = evaluate_values(&immune, &miriam_rewards()).unwrap();
        let i = impact(&immune, &values, &lit("Vaccinated", true), "Flu").unwrap();
        assert_eq!(i, 0.0);

        let chain = chain_model();
        let values = evaluate_values(&chain, &chain_rewards()).unwrap();
        let i = impact(&chain, &values, &lit("A", true), "B").unwrap();
        assert_abs_diff_eq!(i, 9.6, epsilon = 1e-12);
    }

    #[test]
    fn impact_requires_direct_child() {
        let chain = chain_model();
        let values = evaluate_values(&chain, &chain_rewards()).unwrap();
        // C is a grandchild of A, not a child.
        assert!(matches!(
            impact(&chain, &values, &lit("A", true), "C"),
            Err(ValueError::NotAChild { .. })
        ));
        assert!(matches!(
            impact(&chain, &values, &lit("A", true), "Ghost"),
            Err(ValueError::Model(ModelError::UnknownVariable(_)))
        ));
    }

    #[test]
    fn explain_value_examples() {
        let model = miriam_model();
        let explanation =
            explain_value(&model, &miriam_rewards(), &lit("Vaccinated", true)).unwrap();
        assert_eq!(explanation.intrinsic, 0.0);
        assert_eq!(explanation.contributions.len(), 1);
        assert_eq!(explanation.contributions[0].0, "Flu");
        assert_abs_diff_eq!(explanation.contributions[0].1, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(explanation.total, 4.0, epsilon = 1e-12);

        let explanation = explain_value(&model, &miriam_rewards(), &lit("Flu", true)).unwrap();
        assert_eq!(explanation.intrinsic, -10.0);
        assert!(explanation.contributions.is_empty());
        assert_eq!(explanation.total, -10.0);

        let explanation =
            explain_value(&chain_model(), &chain_rewards(), &lit("A", true)).unwrap();
        assert_eq!(explanation.intrinsic, 0.0);
        assert_eq!(explanation.contributions.len(), 1);
        assert_eq!(explanation.contributions[0].0, "B");
        assert_abs_diff_eq!(explanation.contributions[0].1, 9.6, epsilon = 1e-12);
        assert_abs_diff_eq!(explanation.total, 9.6, epsilon = 1e-12);
    }

    #[test]
    fn complement_antisymmetry_on_chain() {
        let model = chain_model();
        let rewards = RewardTable::from_pairs([
            (lit("C", true), 10.0),
            (lit("B", false), 2.5),
            (lit("A", true), -1.0),
        ]);
        let values = evaluate_values(&model, &rewards).unwrap();
        for name in ["A", "B", "C"] {
            let o = lit(name, true);
            let gap = values.get(&o).unwrap() - rewards.get(&o);
            let gap_c = values.get(&o.complement()).unwrap() - rewards.get(&o.complement());
            assert_abs_diff_eq!(gap, -gap_c, epsilon = 1e-9);
        }
    }

    #[test]
    fn reward_scaling_scales_values() {
        let model = chain_model();
        let base = evaluate_values(&model, &chain_rewards()).unwrap();
        for c in [-2.0, 0.0, 3.0] {
            let scaled = RewardTable::from_pairs(
                chain_rewards().iter().map(|(l, r)| (l.clone(), c * r)),
            );
            let values = evaluate_values(&model, &scaled).unwrap();
            for (literal, v) in values.iter() {
                assert_abs_diff_eq!(
                    v,
                    c * base.get(literal).unwrap(),
                    epsilon = 1e-9 * c.abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn rejects_bad_rewards() {
        let model = miriam_model();
        let rewards = RewardTable::from_pairs([(lit("Ghost", true), 1.0)]);
        assert!(matches!(
            evaluate_values(&model, &rewards),
            Err(ValueError::Model(ModelError::UnknownVariable(_)))
        ));
        let rewards = RewardTable::from_pairs([(lit("Flu", true), f64::NAN)]);
        assert!(matches!(
            evaluate_values(&model, &rewards),
            Err(ValueError::NonFiniteReward(_))
        ));
    }

    #[test]
    fn propagates_model_too_large() {
        let model = miriam_model().with_enumeration_cap(1);
        assert!(matches!(
            evaluate_values(&model, &miriam_rewards()),
            Err(ValueError::Model(ModelError::ModelTooLarge { .. }))
        ));
    }
}
