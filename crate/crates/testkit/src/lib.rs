//! Brute-force reference implementations for cross-checking the engine.
//!
//! Everything here is written the slow, obvious way — full joint
//! enumeration over raw [`ModelSpec`] data and plain recursion — and shares
//! no query code with the main crate, so the two implementations can serve
//! as oracles for each other in tests. Nothing in this crate is meant for
//! use outside test suites; it is exponential in the number of variables.

use std::collections::{BTreeMap, BTreeSet};

use valgraph::{Literal, ModelSpec, RewardTable};

/// Name → position in `spec.variables`.
fn index_map(spec: &ModelSpec) -> BTreeMap<&str, usize> {
    spec.variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect()
}

/// P(variable = true | its parents) read straight off the CPT rows.
fn row_probability(spec: &ModelSpec, var: usize, assignment: &[bool]) -> f64 {
    let index = index_map(spec);
    let variable = &spec.variables[var];
    for row in &variable.cpt {
        if row
            .given
            .iter()
            .all(|(parent, polarity)| assignment[index[parent.as_str()]] == *polarity)
        {
            return row.p_true;
        }
    }
    panic!("no CPT row of {} matches the assignment", variable.name);
}

/// Probability of one full assignment, optionally under an intervention
/// that pins a variable and severs its incoming edges.
pub fn joint_probability(
    spec: &ModelSpec,
    assignment: &[bool],
    intervention: Option<&Literal>,
) -> f64 {
    let mut p = 1.0;
    for (v, variable) in spec.variables.iter().enumerate() {
        if let Some(pin) = intervention {
            if pin.variable == variable.name {
                if assignment[v] != pin.polarity {
                    return 0.0;
                }
                continue;
            }
        }
        let p_true = row_probability(spec, v, assignment);
        p *= if assignment[v] { p_true } else { 1.0 - p_true };
    }
    p
}

/// P(x | do(o)) by summing the surgered joint over every assignment.
pub fn interventional(spec: &ModelSpec, o: &Literal, x: &Literal) -> f64 {
    let index = index_map(spec);
    let n = spec.variables.len();
    assert!(n <= 16, "brute-force enumeration is for small test models");
    let x_index = index[x.variable.as_str()];
    let mut total = 0.0;
    for mask in 0u32..1 << n {
        let assignment: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        if assignment[x_index] == x.polarity {
            total += joint_probability(spec, &assignment, Some(o));
        }
    }
    total
}

/// Direct children of a variable: everything that lists it as a parent.
pub fn children_of<'a>(spec: &'a ModelSpec, name: &str) -> Vec<&'a str> {
    spec.variables
        .iter()
        .filter(|v| v.parents.iter().any(|p| p == name))
        .map(|v| v.name.as_str())
        .collect()
}

/// Total subjective value by plain recursion:
/// V(o) = r(o) + Σ over children x of [EV(o, x) − EV(¬o, x)] with
/// EV(o, x) = V(x)·P(x|do(o)) + V(¬x)·P(¬x|do(o)).
pub fn value(spec: &ModelSpec, rewards: &RewardTable, o: &Literal) -> f64 {
    let mut total = rewards.get(o);
    for child in children_of(spec, &o.variable) {
        let child_true = Literal::new(child, true);
        let v_true = value(spec, rewards, &child_true);
        let v_false = value(spec, rewards, &child_true.complement());
        let expected = |source: &Literal| {
            let p = interventional(spec, source, &child_true);
            v_true * p + v_false * (1.0 - p)
        };
        total += expected(o) - expected(&o.complement());
    }
    total
}

/// Strict ancestors of a variable (transitive parents).
pub fn ancestors_of(spec: &ModelSpec, name: &str) -> BTreeSet<String> {
    let parents: BTreeMap<&str, &[String]> = spec
        .variables
        .iter()
        .map(|v| (v.name.as_str(), v.parents.as_slice()))
        .collect();
    let mut found = BTreeSet::new();
    let mut frontier = vec![name.to_string()];
    while let Some(next) = frontier.pop() {
        for parent in parents[next.as_str()] {
            if found.insert(parent.clone()) {
                frontier.push(parent.clone());
            }
        }
    }
    found
}

/// Whether the undirected skeleton is acyclic (a forest). On such models a
/// variable's value is a function of its descendants' CPTs only, so
/// rewriting any ancestor's CPT must leave it untouched.
pub fn is_polytree(spec: &ModelSpec) -> bool {
    let index = index_map(spec);
    let n = spec.variables.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut edges = 0usize;
    for (v, variable) in spec.variables.iter().enumerate() {
        for parent in &variable.parents {
            let p = index[parent.as_str()];
            adjacency[v].push(p);
            adjacency[p].push(v);
            edges += 1;
        }
    }
    let mut seen = vec![false; n];
    let mut components = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    edges == n - components
}

/// A copy of the model with every CPT row of one variable rewritten by
/// p ↦ 1 − p/2, a change that moves every probability except p = 2/3.
pub fn with_mutated_cpt(spec: &ModelSpec, name: &str) -> ModelSpec {
    let mut mutated = spec.clone();
    for variable in &mut mutated.variables {
        if variable.name == name {
            for row in &mut variable.cpt {
                row.p_true = 1.0 - row.p_true / 2.0;
            }
        }
    }
    mutated
}

#[cfg(test)]
mod tests {
    use super::*;
    use valgraph::scenario::builtin_scenario;

    #[test]
    fn reproduces_the_worked_vaccination_numbers() {
        let scenario = builtin_scenario("miriam").unwrap();
        let spec = scenario.model.spec();
        let vaccinated = Literal::new("Vaccinated", true);
        let flu = Literal::new("Flu", true);
        assert!((interventional(&spec, &vaccinated, &flu) - 0.1).abs() < 1e-12);
        assert!((value(&spec, &scenario.rewards, &vaccinated) - 4.0).abs() < 1e-12);
        assert!((value(&spec, &scenario.rewards, &flu) + 10.0).abs() < 1e-12);
    }

    #[test]
    fn classifies_skeletons() {
        let chain = builtin_scenario("chain").unwrap().model.spec();
        assert!(is_polytree(&chain));
        let generalize = builtin_scenario("generalize").unwrap().model.spec();
        assert!(is_polytree(&generalize));
        assert_eq!(
            ancestors_of(&chain, "C"),
            ["A", "B"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn cpt_mutation_changes_every_row() {
        let spec = builtin_scenario("miriam").unwrap().model.spec();
        let mutated = with_mutated_cpt(&spec, "Flu");
        for (before, after) in spec.variables[1]
            .cpt
            .iter()
            .zip(&mutated.variables[1].cpt)
        {
            assert_ne!(before.p_true, after.p_true);
        }
        // the untouched variable keeps its rows
        assert_eq!(spec.variables[0], mutated.variables[0]);
    }
}
