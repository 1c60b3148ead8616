use std::collections::HashMap;

use crate::error::{Error, Result};

/// Global state index; states are numbered layer by layer.
pub type StateId = usize;

/// States partitioned into time layers `1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredStateSpace {
    names: Vec<String>,
    layers: Vec<Vec<StateId>>,
    layer_of: Vec<usize>,
    index_in_layer: Vec<usize>,
    by_name: HashMap<String, StateId>,
}

impl LayeredStateSpace {
    pub fn new(layers: Vec<Vec<String>>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "horizon must be at least 2, got {}",
                layers.len()
            )));
        }
        let mut names = Vec::new();
        let mut ids = Vec::with_capacity(layers.len());
        let mut layer_of = Vec::new();
        let mut index_in_layer = Vec::new();
        let mut by_name = HashMap::new();
        for (t, layer) in layers.into_iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::InvalidInstance(format!("layer {} is empty", t + 1)));
            }
            let mut row = Vec::with_capacity(layer.len());
            for (i, name) in layer.into_iter().enumerate() {
                let id = names.len();
                if by_name.insert(name.clone(), id).is_some() {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate state name {name:?}"
                    )));
                }
                names.push(name);
                layer_of.push(t);
                index_in_layer.push(i);
                row.push(id);
            }
            ids.push(row);
        }
        Ok(Self {
            names,
            layers: ids,
            layer_of,
            index_in_layer,
            by_name,
        })
    }

    /// Number of layers T.
    pub fn horizon(&self) -> usize {
        self.layers.len()
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    /// States of layer `t`, zero-based.
    pub fn layer(&self, t: usize) -> &[StateId] {
        &self.layers[t]
    }

    pub fn layers(&self) -> &[Vec<StateId>] {
        &self.layers
    }

    pub fn layer_of(&self, s: StateId) -> usize {
        self.layer_of[s]
    }

    pub fn index_in_layer(&self, s: StateId) -> usize {
        self.index_in_layer[s]
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        self.layer_of[s] + 1 == self.layers.len()
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    /// Successor states of `s` (the next layer), in order.
    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.layers[self.layer_of[s] + 1]
    }

    /// Nonterminal states in layer-major order.
    pub fn decision_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.layers[..self.layers.len() - 1]
            .iter()
            .flatten()
            .copied()
    }

    /// Layer `t` names, for serialization.
    pub fn layer_names(&self) -> Vec<Vec<String>> {
        self.layers
            .iter()
            .map(|l| l.iter().map(|&s| self.names[s].clone()).collect())
            .collect()
    }
}
