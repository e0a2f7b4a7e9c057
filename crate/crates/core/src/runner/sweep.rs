use std::fmt;

use super::RunnerError;
use crate::model::{ExperimentSpecification, TestSpecification, Value};

/// One point of the Cartesian sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPoint {
    pub index: usize,
    /// Parameter bindings in sweep order.
    pub bindings: Vec<(String, Value)>,
}

impl RunPoint {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for RunPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.index)?;
        for (name, value) in &self.bindings {
            write!(f, " {name}={value}")?;
        }
        Ok(())
    }
}

/// Expands the experiment's bindings into run points.
///
/// Dimensions follow the test's controllable parameters in declaration
/// order, then any extra experiment bindings in their order. The last
/// dimension varies fastest.
pub fn expand_sweep(es: &ExperimentSpecification, ts: &TestSpecification) -> Result<Vec<RunPoint>, RunnerError> {
    let mut dims: Vec<(&str, &[Value])> = Vec::new();
    for p in &ts.controllable {
        let bound = es
            .binding(&p.name)
            .ok_or_else(|| RunnerError::UnboundParameter(p.name.clone()))?;
        dims.push((&p.name, &bound.values));
    }
    for p in &es.sweep {
        if ts.controllable(&p.name).is_none() {
            dims.push((&p.name, &p.values));
        }
    }
    if let Some((name, _)) = dims.iter().find(|(_, values)| values.is_empty()) {
        return Err(RunnerError::EmptyBinding((*name).to_owned()));
    }

    let total: usize = dims.iter().map(|(_, v)| v.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rest = index;
        let mut bindings = vec![(String::new(), Value::Number(0.0)); dims.len()];
        for (slot, (name, values)) in dims.iter().enumerate().rev() {
            bindings[slot] = ((*name).to_owned(), values[rest % values.len()].clone());
            rest /= values.len();
        }
        points.push(RunPoint { index, bindings });
    }
    Ok(points)
}
