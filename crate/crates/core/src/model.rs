//! Causal world models over binary variables.
//!
//! A [`WorldModel`] is a directed acyclic network of binary variables with
//! conditional probability tables. It answers observational queries
//! (joint probabilities) and interventional queries: [`WorldModel::do_surgery`]
//! cuts the incoming edges of a variable and pins its value, and
//! [`WorldModel::interventional_prob`] computes exact marginals on the
//! surgered model by enumeration.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Default cap on the number of variables exact enumeration will accept.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Errors from building or querying a world model.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("CycleError: parent graph has a cycle involving {0}")]
    Cycle(String),
    #[error("CptError: variable {variable}: {detail}")]
    Cpt { variable: String, detail: String },
    #[error("UnknownVariableError: {0}")]
    UnknownVariable(String),
    #[error("InvalidVariableError: {0}")]
    InvalidVariable(String),
    #[error("IncompleteAssignmentError: missing {0}")]
    IncompleteAssignment(String),
    #[error("SameVariableError: target and intervention both name {0}")]
    SameVariable(String),
    #[error("ModelTooLargeError: {vars} variables exceeds enumeration cap {cap}")]
    ModelTooLarge { vars: usize, cap: usize },
}

/// Error from parsing a `Name=true` / `Name=false` literal string.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("ParseError: expected literal of the form Name=true or Name=false, got {0:?}")]
pub struct ParseLiteralError(pub String);

/// An outcome: a variable fixed to a polarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub variable: String,
    pub polarity: bool,
}

impl Literal {
    pub fn new(variable: impl Into<String>, polarity: bool) -> Self {
        Literal {
            variable: variable.into(),
            polarity,
        }
    }

    /// The opposite-polarity literal over the same variable.
    pub fn complement(&self) -> Literal {
        Literal {
            variable: self.variable.clone(),
            polarity: !self.polarity,
        }
    }

    /// Parses the `Name=true` / `Name=false` interchange form.
    pub fn parse(s: &str) -> Result<Literal, ParseLiteralError> {
        let (name, pol) = s
            .rsplit_once('=')
            .ok_or_else(|| ParseLiteralError(s.to_string()))?;
        let polarity = match pol {
            "true" => true,
            "false" => false,
            _ => return Err(ParseLiteralError(s.to_string())),
        };
        if name.is_empty() {
            return Err(ParseLiteralError(s.to_string()));
        }
        Ok(Literal::new(name, polarity))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.polarity)
    }
}

/// One conditional-probability row: a total parent assignment and P(var=true).
#[derive(Debug, Clone, PartialEq)]
pub struct CptRow {
    pub given: BTreeMap<String, bool>,
    pub p_true: f64,
}

/// Raw description of one variable for [`WorldModel::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub parents: Vec<String>,
    pub cpt: Vec<CptRow>,
}

/// Raw description of a whole model for [`WorldModel::build`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelSpec {
    pub variables: Vec<VariableSpec>,
    pub controllable: Vec<String>,
}

/// A total assignment of polarities to variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    values: BTreeMap<String, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        Assignment {
            values: pairs
                .into_iter()
                .map(|(name, pol)| (name.into(), pol))
                .collect(),
        }
    }

    pub fn set(&mut self, name: impl Into<String>, polarity: bool) {
        self.values.insert(name.into(), polarity);
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.values.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.values.iter().map(|(name, pol)| (name.as_str(), *pol))
    }
}

/// A validated causal network of binary variables.
///
/// Immutable after build; every query is a pure function, so shared
/// concurrent reads are safe. Surgery returns a fresh model.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldModel {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    // cpt[v][bits] = P(v=true | parents assigned per bits), bit j = parents[v][j]
    cpt: Vec<Vec<f64>>,
    controllable: HashSet<usize>,
    topo: Vec<usize>,
    enumeration_cap: usize,
}

fn validate_name(name: &str) -> Result<(), ModelError> {
    if name.is_empty() {
        return Err(ModelError::InvalidVariable(
            "variable name must be nonempty".into(),
        ));
    }
    if let Some(bad) = name.chars().find(|c| "=,\"".contains(*c) || c.is_control()) {
        return Err(ModelError::InvalidVariable(format!(
            "variable name {name:?} contains forbidden character {bad:?}"
        )));
    }
    Ok(())
}

impl WorldModel {
    /// Validates and builds a model from its raw description.
    pub fn build(spec: &ModelSpec) -> Result<WorldModel, ModelError> {
        let n = spec.variables.len();
        let mut names = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for var in &spec.variables {
            validate_name(&var.name)?;
            if index.insert(var.name.clone(), names.len()).is_some() {
                return Err(ModelError::InvalidVariable(format!(
                    "duplicate variable name {:?}",
                    var.name
                )));
            }
            names.push(var.name.clone());
        }
        if n > 64 {
            return Err(ModelError::InvalidVariable(format!(
                "model has {n} variables; at most 64 are supported"
            )));
        }

        let mut parents = Vec::with_capacity(n);
        for var in &spec.variables {
            let mut ps = Vec::with_capacity(var.parents.len());
            let mut seen = HashSet::new();
            for p in &var.parents {
                let idx = *index
                    .get(p)
                    .ok_or_else(|| ModelError::UnknownVariable(p.clone()))?;
                if !seen.insert(idx) {
                    return Err(ModelError::InvalidVariable(format!(
                        "variable {:?} lists parent {p:?} twice",
                        var.name
                    )));
                }
                ps.push(idx);
            }
            parents.push(ps);
        }

        let mut cpt = Vec::with_capacity(n);
        for (v, var) in spec.variables.iter().enumerate() {
            cpt.push(build_cpt(&var.name, &names, &parents[v], &var.cpt)?);
        }

        let mut controllable = HashSet::new();
        for name in &spec.controllable {
            let idx = *index
                .get(name)
                .ok_or_else(|| ModelError::UnknownVariable(name.clone()))?;
            controllable.insert(idx);
        }

        let topo = topo_sort(&names, &parents)?;
        let children = children_of(&parents, n);

        Ok(WorldModel {
            names,
            index,
            parents,
            children,
            cpt,
            controllable,
            topo,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// Replaces the enumeration cap (the maximum variable count exact
    /// interventional queries will accept).
    pub fn with_enumeration_cap(mut self, cap: usize) -> WorldModel {
        self.enumeration_cap = cap;
        self
    }

    pub fn enumeration_cap(&self) -> usize {
        self.enumeration_cap
    }

    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn is_controllable(&self, name: &str) -> bool {
        self.index
            .get(name)
            .map_or(false, |idx| self.controllable.contains(idx))
    }

    /// Controllable variable names in sorted order.
    pub fn controllable_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .controllable
            .iter()
            .map(|&idx| self.names[idx].as_str())
            .collect();
        out.sort_unstable();
        out
    }

    pub(crate) fn var_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn parents_of(&self, name: &str) -> Result<Vec<&str>, ModelError> {
        let v = self.var_index(name)?;
        Ok(self.parents[v].iter().map(|&p| self.names[p].as_str()).collect())
    }

    pub fn children_of(&self, name: &str) -> Result<Vec<&str>, ModelError> {
        let v = self.var_index(name)?;
        Ok(self.children[v].iter().map(|&c| self.names[c].as_str()).collect())
    }

    pub(crate) fn child_indices(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub(crate) fn name_of(&self, v: usize) -> &str {
        &self.names[v]
    }

    /// Variables ordered so every parent precedes its children, ties broken
    /// by declaration order.
    pub fn topological_order(&self) -> Vec<&str> {
        self.topo.iter().map(|&v| self.names[v].as_str()).collect()
    }

    pub(crate) fn topo_indices(&self) -> &[usize] {
        &self.topo
    }

    /// The CPT of `name` as rows in canonical order (first parent varies
    /// fastest, false before true).
    pub fn cpt_rows(&self, name: &str) -> Result<Vec<CptRow>, ModelError> {
        let v = self.var_index(name)?;
        let ps = &self.parents[v];
        let mut rows = Vec::with_capacity(self.cpt[v].len());
        for (bits, &p_true) in self.cpt[v].iter().enumerate() {
            let mut given = BTreeMap::new();
            for (j, &p) in ps.iter().enumerate() {
                given.insert(self.names[p].clone(), bits >> j & 1 == 1);
            }
            rows.push(CptRow { given, p_true });
        }
        Ok(rows)
    }

    /// Reconstructs the raw description (canonical row order).
    pub fn spec(&self) -> ModelSpec {
        let variables = self
            .names
            .iter()
            .map(|name| VariableSpec {
                name: name.clone(),
                parents: self.parents_of(name).unwrap().iter().map(|s| s.to_string()).collect(),
                cpt: self.cpt_rows(name).unwrap(),
            })
            .collect();
        let controllable = self
            .controllable_names()
            .iter()
            .map(|s| s.to_string())
            .collect();
        ModelSpec {
            variables,
            controllable,
        }
    }

    /// Probability of a total assignment: the product of the CPT entries it
    /// selects.
    pub fn joint_probability(&self, assignment: &Assignment) -> Result<f64, ModelError> {
        let mut dense = vec![false; self.names.len()];
        for (v, name) in self.names.iter().enumerate() {
            dense[v] = assignment
                .get(name)
                .ok_or_else(|| ModelError::IncompleteAssignment(name.clone()))?;
        }
        if assignment.len() != self.names.len() {
            for (name, _) in assignment.iter() {
                if !self.index.contains_key(name) {
                    return Err(ModelError::UnknownVariable(name.to_string()));
                }
            }
        }
        let mut product = 1.0;
        for v in 0..self.names.len() {
            let bits = self.parent_bits(v, |p| dense[p]);
            let p = self.cpt[v][bits];
            product *= if dense[v] { p } else { 1.0 - p };
        }
        Ok(product)
    }

    fn parent_bits(&self, v: usize, value_of: impl Fn(usize) -> bool) -> usize {
        let mut bits = 0usize;
        for (j, &p) in self.parents[v].iter().enumerate() {
            if value_of(p) {
                bits |= 1 << j;
            }
        }
        bits
    }

    /// Cuts the incoming edges of the intervened variable and pins its value.
    /// Every other variable keeps its parents and CPT.
    pub fn do_surgery(&self, intervention: &Literal) -> Result<WorldModel, ModelError> {
        let v = self.var_index(&intervention.variable)?;
        let mut out = self.clone();
        out.parents[v] = Vec::new();
        out.cpt[v] = vec![if intervention.polarity { 1.0 } else { 0.0 }];
        out.children = children_of(&out.parents, out.names.len());
        out.topo = topo_sort(&out.names, &out.parents).expect("surgery cannot create a cycle");
        Ok(out)
    }

    /// Exact P(target | do(intervention)) by enumerating the surgered joint.
    ///
    /// Enumeration covers the target and its ancestors in the surgered graph;
    /// every other variable marginalizes out of the sum identically.
    pub fn interventional_prob(
        &self,
        target: &Literal,
        intervention: &Literal,
    ) -> Result<f64, ModelError> {
        if target.variable == intervention.variable {
            return Err(ModelError::SameVariable(target.variable.clone()));
        }
        let t = self.var_index(&target.variable)?;
        self.var_index(&intervention.variable)?;
        if self.names.len() > self.enumeration_cap {
            return Err(ModelError::ModelTooLarge {
                vars: self.names.len(),
                cap: self.enumeration_cap,
            });
        }
        let surgered = self.do_surgery(intervention)?;
        Ok(surgered.marginal(t, target.polarity))
    }

    /// Exact marginal P(var = polarity) of this model, enumerating the
    /// variable's ancestral set.
    pub(crate) fn marginal(&self, v: usize, polarity: bool) -> f64 {
        let relevant = self.ancestral_set(v);
        let mut position = vec![usize::MAX; self.names.len()];
        for (j, &r) in relevant.iter().enumerate() {
            position[r] = j;
        }
        let t_pos = position[v];
        let m = relevant.len();
        let mut total = 0.0;
        for mask in 0u128..(1u128 << m) {
            if (mask >> t_pos & 1 == 1) != polarity {
                continue;
            }
            let mut product = 1.0;
            for (j, &r) in relevant.iter().enumerate() {
                let bits = self.parent_bits(r, |p| mask >> position[p] & 1 == 1);
                let p = self.cpt[r][bits];
                product *= if mask >> j & 1 == 1 { p } else { 1.0 - p };
                if product == 0.0 {
                    break;
                }
            }
            total += product;
        }
        total
    }

    /// The variable together with its ancestors, ascending by index.
    fn ancestral_set(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &p in &self.parents[u] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..self.names.len()).filter(|&u| seen[u]).collect()
    }
}

fn build_cpt(
    name: &str,
    names: &[String],
    parents: &[usize],
    rows: &[CptRow],
) -> Result<Vec<f64>, ModelError> {
    let k = parents.len();
    let expected = 1usize << k;
    if rows.len() != expected {
        return Err(ModelError::Cpt {
            variable: name.to_string(),
            detail: format!(
                "expected {expected} rows for {k} parent(s), got {}",
                rows.len()
            ),
        });
    }
    let mut table = vec![f64::NAN; expected];
    for row in rows {
        if row.given.len() != k {
            return Err(ModelError::Cpt {
                variable: name.to_string(),
                detail: format!(
                    "row assigns {} variable(s), expected the {k} parent(s)",
                    row.given.len()
                ),
            });
        }
        let mut bits = 0usize;
        for (j, &p) in parents.iter().enumerate() {
            match row.given.get(&names[p]) {
                Some(true) => bits |= 1 << j,
                Some(false) => {}
                None => {
                    return Err(ModelError::Cpt {
                        variable: name.to_string(),
                        detail: format!("row is missing parent {:?}", names[p]),
                    })
                }
            }
        }
        if !table[bits].is_nan() {
            return Err(ModelError::Cpt {
                variable: name.to_string(),
                detail: format!("duplicate row for {:?}", row.given),
            });
        }
        if !(row.p_true >= 0.0 && row.p_true <= 1.0) {
            return Err(ModelError::Cpt {
                variable: name.to_string(),
                detail: format!("p_true {} outside [0, 1]", row.p_true),
            });
        }
        table[bits] = row.p_true;
    }
    // rows.len() == expected and no duplicates, so the table is full
    Ok(table)
}

/// Kahn's algorithm; among ready variables the lowest declaration index wins.
fn topo_sort(names: &[String], parents: &[Vec<usize>]) -> Result<Vec<usize>, ModelError> {
    let n = names.len();
    let mut remaining: Vec<usize> = parents.iter().map(|ps| ps.len()).collect();
    let mut children = children_of(parents, n);
    for c in &mut children {
        c.sort_unstable();
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n).find(|&v| !placed[v] && remaining[v] == 0);
        match next {
            Some(v) => {
                placed[v] = true;
                order.push(v);
                for &c in &children[v] {
                    remaining[c] -= 1;
                }
            }
            None => {
                let stuck = (0..n).find(|&v| !placed[v]).unwrap();
                return Err(ModelError::Cycle(names[stuck].clone()));
            }
        }
    }
    Ok(order)
}

fn children_of(parents: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::new(); n];
    for (v, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(v);
        }
    }
    children
}
