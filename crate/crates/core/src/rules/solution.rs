use std::collections::BTreeSet;
use std::fmt;

use crate::model::ParagraphId;

/// The set of included paragraphs: the aggregated document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution(BTreeSet<ParagraphId>);

impl Solution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, p: ParagraphId) -> bool {
        self.0.contains(&p)
    }

    pub fn insert(&mut self, p: ParagraphId) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: ParagraphId) -> bool {
        self.0.remove(&p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ParagraphId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_set(&self) -> &BTreeSet<ParagraphId> {
        &self.0
    }
}

impl FromIterator<ParagraphId> for Solution {
    fn from_iter<I: IntoIterator<Item = ParagraphId>>(iter: I) -> Self {
        Solution(iter.into_iter().collect())
    }
}

impl From<BTreeSet<ParagraphId>> for Solution {
    fn from(set: BTreeSet<ParagraphId>) -> Self {
        Solution(set)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Solutions for every prefix of a log, `R*(1..=|E|)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trajectory {
    pub prefix_solutions: Vec<Solution>,
    /// 1-based indices `i` with `R*(i+1) != R*(i)`.
    pub update_indices: Vec<usize>,
}

impl Trajectory {
    pub fn from_solutions(prefix_solutions: Vec<Solution>) -> Self {
        let update_indices = prefix_solutions
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(k, _)| k + 1)
            .collect();
        Trajectory {
            prefix_solutions,
            update_indices,
        }
    }

    pub fn len(&self) -> usize {
        self.prefix_solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix_solutions.is_empty()
    }

    pub fn last(&self) -> Option<&Solution> {
        self.prefix_solutions.last()
    }

    /// `U(R, E)`.
    pub fn updates(&self) -> usize {
        self.update_indices.len()
    }
}
