use crate::error::{Error, Result};
use crate::objective::{Objective, SetFunction};
use crate::systems::{IndependenceSystem, System};

/// A ground set with labels, an independence system and an objective.
///
/// Element `i` has identifier `labels[i]`; index order is identifier order
/// and is the default initial ordering of every search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub seed: Option<u64>,
    pub labels: Vec<String>,
    pub system: System,
    pub objective: Objective,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        system: System,
        objective: Objective,
    ) -> Result<Self> {
        let n = labels.len();
        if system.ground_size() != n || objective.ground_size() != n {
            return Err(Error::Semantic(format!(
                "{n} elements, but the system has {} and the objective {}",
                system.ground_size(),
                objective.ground_size()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Semantic(format!("duplicate element {:?}", w[0])));
        }
        Ok(Instance {
            name: name.into(),
            seed: None,
            labels,
            system,
            objective,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.system.exchange_k()
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Renders a set as `{a,b,c}` using element labels.
    pub fn format_set(&self, set: &[usize]) -> String {
        let names: Vec<&str> = set.iter().map(|&e| self.label(e)).collect();
        format!("{{{}}}", names.join(","))
    }
}
