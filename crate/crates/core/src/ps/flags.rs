use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-percept flagged action sets (short-term memory). Sets are kept sorted
/// and are never empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSet {
    actions: usize,
    sets: Vec<Vec<usize>>,
}

impl FlagSet {
    /// Every action flagged for every percept.
    pub fn all(percepts: usize, actions: usize) -> Self {
        Self { actions, sets: vec![(0..actions).collect(); percepts] }
    }

    pub fn from_sets(actions: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(sets.len());
        for (s, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::InvalidInput(format!("empty flag set for percept {s}")));
            }
            if let Some(&a) = set.iter().find(|&&a| a >= actions) {
                return Err(Error::InvalidInput(format!("flagged action {a} out of range")));
            }
            clean.push(set);
        }
        Ok(Self { actions, sets: clean })
    }

    pub fn num_percepts(&self) -> usize {
        self.sets.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn flagged(&self, percept: usize) -> &[usize] {
        &self.sets[percept]
    }

    pub fn contains(&self, percept: usize, action: usize) -> bool {
        self.sets[percept].binary_search(&action).is_ok()
    }

    /// Boolean membership mask over the action clips.
    pub fn mask(&self, percept: usize) -> Vec<bool> {
        let mut m = vec![false; self.actions];
        for &a in &self.sets[percept] {
            m[a] = true;
        }
        m
    }

    /// Removes an unrewarded action; a depleted set resets to all actions.
    pub fn flag_update(&self, percept: usize, action: usize, rewarded: bool) -> Result<Self> {
        if percept >= self.sets.len() || !self.contains(percept, action) {
            return Err(Error::ActionNotFlagged { percept, action });
        }
        let mut next = self.clone();
        if !rewarded {
            let set = &mut next.sets[percept];
            set.retain(|&a| a != action);
            if set.is_empty() {
                *set = (0..self.actions).collect();
            }
        }
        Ok(next)
    }
}
